//! Large spectra, dissociated sets and their spans.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::Signed;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{to_f64, Q};
use crate::group::Group;
use crate::harmonic::{self, FunctionTable, Values};
use crate::set::GroupSet;

/// Relative guard band for threshold comparisons on floating transforms.
pub const SPECTRUM_GUARD: f64 = 1e-9;
/// Exhaustive dissociativity checks on general groups accept at most this
/// many characters.
pub const DISSOCIATED_CHECK_LIMIT: usize = 20;
/// Above this candidate count the maximum dissociated search is greedy.
pub const EXACT_SEARCH_LIMIT: usize = 24;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumMember {
    pub character: usize,
    pub magnitude: f64,
    /// Within the guard band of the threshold, so membership is not certain.
    pub borderline: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Spectrum {
    pub eps: String,
    /// `ε ‖f‖₁`.
    pub threshold: f64,
    /// Comparison done in exact integer arithmetic.
    pub exact: bool,
    pub members: Vec<SpectrumMember>,
}

impl Spectrum {
    pub fn characters(&self) -> Vec<usize> {
        self.members.iter().map(|m| m.character).collect()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search_by_key(&x, |m| m.character).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

fn check_eps(eps: &Q) -> Result<()> {
    if !eps.is_positive() || *eps > Q::from_integer(1.into()) {
        return Err(Error::InvalidArgument(format!("threshold {eps} not in (0, 1]")));
    }
    Ok(())
}

/// `{χ : |f̂(χ)| >= ε ‖f‖₁}`.
pub fn spectrum(f: &FunctionTable, eps: &Q) -> Result<Spectrum> {
    check_eps(eps)?;
    if f.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let fhat = harmonic::dft(f)?;
    spectrum_of_transform(&fhat, f.norm1_exact(), f.norm1(), eps)
}

/// Spectrum from a precomputed transform. `norm1_exact` enables the exact
/// comparison when the transform is integer valued.
pub fn spectrum_of_transform(
    fhat: &FunctionTable,
    norm1_exact: Option<i128>,
    norm1: f64,
    eps: &Q,
) -> Result<Spectrum> {
    check_eps(eps)?;
    let threshold = to_f64(eps) * norm1;
    let mut members = Vec::new();
    let exact = match (fhat.values(), norm1_exact) {
        (Values::Int(v), Some(n1)) => {
            let (num, den) = (eps.numer(), eps.denom());
            let rhs = num * BigInt::from(n1);
            for (i, &x) in v.iter().enumerate() {
                if BigInt::from(x.unsigned_abs()) * den >= rhs {
                    members.push(SpectrumMember {
                        character: i,
                        magnitude: x.unsigned_abs() as f64,
                        borderline: false,
                    });
                }
            }
            true
        }
        _ => {
            let lo = threshold * (1.0 - SPECTRUM_GUARD);
            let hi = threshold * (1.0 + SPECTRUM_GUARD);
            for i in 0..fhat.len() {
                let m = fhat.abs(i);
                if m >= lo {
                    members.push(SpectrumMember {
                        character: i,
                        magnitude: m,
                        borderline: m < hi,
                    });
                }
            }
            false
        }
    };
    Ok(Spectrum {
        eps: eps.to_string(),
        threshold,
        exact,
        members,
    })
}

fn dedup_nonzero(lambda: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = lambda.iter().copied().filter(|&x| x != 0).collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// GF(2) elimination: returns the members of `vectors` that extend the
/// running basis, in order.
fn independent_prefix(vectors: impl IntoIterator<Item = usize>) -> Vec<usize> {
    let mut basis: Vec<usize> = Vec::new();
    let mut chosen = Vec::new();
    for v in vectors {
        let mut r = v;
        for &b in &basis {
            r = r.min(r ^ b);
        }
        if r != 0 {
            basis.push(r);
            basis.sort_unstable_by(|a, b| b.cmp(a));
            chosen.push(v);
        }
    }
    chosen
}

/// True iff no nontrivial `{0, ±1}` combination of `lambda` vanishes.
/// Repeated characters count once.
pub fn is_dissociated(group: &Group, lambda: &[usize]) -> Result<bool> {
    if lambda.iter().any(|&x| x >= group.order()) {
        return Err(Error::IndexOutOfRange {
            index: *lambda.iter().max().unwrap_or(&0),
            order: group.order(),
        });
    }
    if lambda.contains(&0) {
        return Ok(false);
    }
    let mut l = lambda.to_vec();
    l.sort_unstable();
    l.dedup();
    if group.is_boolean() {
        return Ok(independent_prefix(l.iter().copied()).len() == l.len());
    }
    if l.len() > DISSOCIATED_CHECK_LIMIT {
        return Err(Error::SizeLimit {
            what: "dissociativity check",
            limit: DISSOCIATED_CHECK_LIMIT,
            actual: l.len(),
        });
    }
    Ok(zero_combinations(group, &l) == 1)
}

/// All `{0, ±1}` sums of `part`, with multiplicity.
fn signed_sums(group: &Group, part: &[usize]) -> HashMap<usize, u64> {
    let mut sums: HashMap<usize, u64> = HashMap::from([(0, 1)]);
    for &x in part {
        let mut next = HashMap::with_capacity(sums.len() * 3);
        for (&s, &c) in &sums {
            for t in [s, group.add_idx(s, x), group.sub_idx(s, x)] {
                *next.entry(t).or_insert(0) += c;
            }
        }
        sums = next;
    }
    sums
}

/// Number of sign vectors in `{0, ±1}^Λ` whose combination is zero, by
/// meet in the middle.
fn zero_combinations(group: &Group, lambda: &[usize]) -> u64 {
    let (left, right) = lambda.split_at(lambda.len() / 2);
    let l = signed_sums(group, left);
    let r = signed_sums(group, right);
    r.iter()
        .map(|(&s, &c)| c * l.get(&group.neg_idx(s)).copied().unwrap_or(0))
        .sum()
}

/// `{Σ ε_λ λ : ε_λ ∈ {0, ±1}}`.
pub fn span(group: &Group, lambda: &[usize]) -> Result<GroupSet> {
    let n = group.order();
    let mut inside = vec![false; n];
    inside[0] = true;
    let mut members = vec![0usize];
    for &x in lambda {
        if x >= n {
            return Err(Error::IndexOutOfRange { index: x, order: n });
        }
        extend_span(group, &mut inside, &mut members, x);
    }
    GroupSet::new(group.clone(), members)
}

fn extend_span(group: &Group, inside: &mut [bool], members: &mut Vec<usize>, x: usize) {
    let current = members.len();
    for i in 0..current {
        let s = members[i];
        for t in [group.add_idx(s, x), group.sub_idx(s, x)] {
            if !inside[t] {
                inside[t] = true;
                members.push(t);
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DissociationMode {
    /// Certified maximum over the candidates.
    Exact,
    /// Maximal (cannot be extended) but not certified maximum.
    Greedy,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DissociatedWitness {
    pub members: Vec<usize>,
    pub mode: DissociationMode,
    pub certified_size: usize,
}

/// Largest dissociated subset of `candidates`. `weights[i]` (one per
/// candidate) orders the greedy fallback, heaviest first.
pub fn max_dissociated(
    group: &Group,
    candidates: &[usize],
    weights: Option<&[f64]>,
) -> Result<DissociatedWitness> {
    if let Some(w) = weights {
        if w.len() != candidates.len() {
            return Err(Error::ShapeMismatch {
                expected: candidates.len(),
                found: w.len(),
            });
        }
    }
    if let Some(&x) = candidates.iter().find(|&&x| x >= group.order()) {
        return Err(Error::IndexOutOfRange {
            index: x,
            order: group.order(),
        });
    }
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    if let Some(w) = weights {
        order.sort_by(|&i, &j| w[j].total_cmp(&w[i]).then(candidates[i].cmp(&candidates[j])));
    } else {
        order.sort_by_key(|&i| candidates[i]);
    }
    let ordered: Vec<usize> = order.iter().map(|&i| candidates[i]).filter(|&x| x != 0).collect();

    if group.is_boolean() {
        let members = independent_prefix(ordered);
        return Ok(witness(members, DissociationMode::Exact));
    }
    let distinct = dedup_nonzero(&ordered);
    if distinct.len() <= EXACT_SEARCH_LIMIT {
        let members = exact_search(group, &distinct);
        return Ok(witness(members, DissociationMode::Exact));
    }
    let n = group.order();
    let mut inside = vec![false; n];
    inside[0] = true;
    let mut span_members = vec![0usize];
    let mut members = Vec::new();
    for x in ordered {
        if !inside[x] {
            members.push(x);
            extend_span(group, &mut inside, &mut span_members, x);
        }
    }
    Ok(witness(members, DissociationMode::Greedy))
}

fn witness(members: Vec<usize>, mode: DissociationMode) -> DissociatedWitness {
    DissociatedWitness {
        certified_size: members.len(),
        members,
        mode,
    }
}

/// Branch and bound over subsets. A set stays dissociated when the new
/// element lies outside the span of the old ones, and a dissociated set of
/// size `d` has `2^d` distinct subset sums, so `d <= log2 N`.
fn exact_search(group: &Group, cands: &[usize]) -> Vec<usize> {
    let n = group.order();
    let cap = (usize::BITS - 1 - n.leading_zeros()) as usize;
    let mut best = Vec::new();
    let mut inside = vec![false; n];
    inside[0] = true;
    let mut state = Search {
        group,
        cands,
        cap,
        best: &mut best,
        current: Vec::new(),
    };
    state.run(0, &inside, &[0]);
    best
}

struct Search<'a> {
    group: &'a Group,
    cands: &'a [usize],
    cap: usize,
    best: &'a mut Vec<usize>,
    current: Vec<usize>,
}

impl Search<'_> {
    fn run(&mut self, start: usize, inside: &[bool], members: &[usize]) {
        if self.current.len() > self.best.len() {
            *self.best = self.current.clone();
        }
        let open: Vec<usize> = (start..self.cands.len())
            .filter(|&i| !inside[self.cands[i]])
            .collect();
        let bound = (self.current.len() + open.len()).min(self.cap);
        if bound <= self.best.len() {
            return;
        }
        for (pos, &i) in open.iter().enumerate() {
            let remaining = open.len() - pos;
            if (self.current.len() + remaining).min(self.cap) <= self.best.len() {
                return;
            }
            let x = self.cands[i];
            let mut inside2 = inside.to_vec();
            let mut members2 = members.to_vec();
            extend_span(self.group, &mut inside2, &mut members2, x);
            self.current.push(x);
            self.run(i + 1, &inside2, &members2);
            self.current.pop();
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChangReport {
    pub eps: String,
    pub c_chang: f64,
    /// `ln(‖f‖₂² N / ‖f‖₁²)`.
    pub log_term: f64,
    /// `C ε⁻² log_term`.
    pub bound: f64,
    /// Size of a maximum dissociated subset of the spectrum.
    pub dimension: usize,
    pub mode: DissociationMode,
    pub holds: bool,
    pub asserted: bool,
}

/// Compares the additive dimension of `Spec_ε(f)` with the Chang-type bound
/// `C ε⁻² ln(‖f‖₂² N / ‖f‖₁²)`. Degenerate log terms compare against
/// `max(1, bound)`. Asserted only when `c_chang >= audit_constant`.
pub fn chang_bound(f: &FunctionTable, eps: &Q, c_chang: f64, audit_constant: f64) -> Result<ChangReport> {
    let spec = spectrum(f, eps)?;
    let n = f.len() as f64;
    let l1 = f.norm1();
    let log_term = (f.norm2_sq() * n / (l1 * l1)).ln().max(0.0);
    let e = to_f64(eps);
    let bound = c_chang * log_term / (e * e);
    let weights: Vec<f64> = spec.members.iter().map(|m| m.magnitude).collect();
    let w = max_dissociated(f.group(), &spec.characters(), Some(&weights))?;
    let limit = if log_term < 1e-12 { bound.max(1.0) } else { bound };
    Ok(ChangReport {
        eps: spec.eps,
        c_chang,
        log_term,
        bound,
        dimension: w.certified_size,
        mode: w.mode,
        holds: w.certified_size as f64 <= limit,
        asserted: c_chang >= audit_constant,
    })
}
