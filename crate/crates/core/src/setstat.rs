//! Set statistics: sumsets, slices, doubling, the peak Fourier coefficient,
//! additive and higher energies, higher difference counts, and exact checks
//! of the inequalities that relate them.

use std::collections::{BTreeMap, HashMap, HashSet};

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use crate::check::CheckRecord;
use crate::error::{Error, Result};
use crate::exact::{q, qi, qu, to_f64, Q};
use crate::group::Group;
use crate::harmonic::{self, FunctionTable, Values};
use crate::set::GroupSet;

/// Pair loops above this many pairs switch to the transform path.
const PAIR_LOOP_LIMIT: usize = 1 << 26;

/// Default cache budget for the higher difference count.
pub const DEFAULT_MEMO_BYTES: usize = 2 << 30;

pub fn sumset(a: &GroupSet, b: &GroupSet) -> Result<GroupSet> {
    a.group().ensure_same(b.group())?;
    let g = a.group();
    let mut hit = vec![false; g.order()];
    for x in a.iter() {
        for y in b.iter() {
            hit[g.add_idx(x, y)] = true;
        }
    }
    GroupSet::new(g.clone(), (0..g.order()).filter(|&i| hit[i]))
}

pub fn difference_set(a: &GroupSet, b: &GroupSet) -> Result<GroupSet> {
    sumset(a, &b.negate())
}

/// `A_x = A ∩ (A + x)`.
pub fn slice(a: &GroupSet, x: usize) -> Result<GroupSet> {
    let g = a.group();
    if x >= g.order() {
        return Err(Error::IndexOutOfRange {
            index: x,
            order: g.order(),
        });
    }
    a.intersect(&a.translate(x))
}

/// `r(x) = #{(a, b) ∈ A × B : a - b = x}`, which is `(B ∘ A)(x)`; for
/// `B = A` it is the slice size `|A_x|`.
pub fn difference_counts(a: &GroupSet, b: &GroupSet) -> Result<Vec<u64>> {
    a.group().ensure_same(b.group())?;
    let g = a.group();
    if a.len().saturating_mul(b.len()) <= PAIR_LOOP_LIMIT {
        let mut r = vec![0u64; g.order()];
        for x in a.iter() {
            for y in b.iter() {
                r[g.sub_idx(x, y)] += 1;
            }
        }
        return Ok(r);
    }
    let c = harmonic::correlate(&b.indicator(), &a.indicator())?;
    match c.values() {
        Values::Int(v) => Ok(v.iter().map(|&t| t as u64).collect()),
        _ => Err(Error::Precision("correlation of indicators is not integral".into())),
    }
}

/// `|A_x|` for every `x`.
pub fn slice_sizes(a: &GroupSet) -> Result<Vec<u64>> {
    difference_counts(a, a)
}

/// `|A - A| / |A|`.
pub fn doubling(a: &GroupSet) -> Result<Q> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(q(difference_set(a, a)?.len() as i64, a.len() as i64))
}

/// The largest nonprincipal Fourier coefficient of a set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Peak {
    /// Index of the maximizing character (smallest on ties).
    pub character: usize,
    /// `|Â(χ)|²`.
    pub value_sq: f64,
    /// `|Â(χ)|²` as an exact integer, available on `F2^n`.
    pub exact_sq: Option<i128>,
}

/// Relative guard used when a floating peak is compared with an exact bound.
pub const PEAK_GUARD: f64 = 1e-9;

impl Peak {
    /// `𝓜² > bound`. On general groups the float value must clear the bound
    /// by the relative guard [`PEAK_GUARD`].
    pub fn exceeds(&self, bound: &Q) -> bool {
        match self.exact_sq {
            Some(v) => qi(v) > *bound,
            None => self.value_sq > to_f64(bound) * (1.0 + PEAK_GUARD),
        }
    }

    /// `𝓜²` as a rational: exact on `F2^n`, otherwise the float rounded to
    /// a dyadic rational.
    pub fn value_q(&self) -> Q {
        match self.exact_sq {
            Some(v) => qi(v),
            None => Q::from_float(self.value_sq).unwrap_or_else(Q::zero),
        }
    }
}

/// `|Â(χ)|²` for every character.
pub fn power_spectrum(a: &GroupSet) -> Result<FunctionTable> {
    let t = harmonic::dft(&a.indicator())?;
    let g = a.group().clone();
    match t.values() {
        Values::Int(v) => {
            let sq = v
                .iter()
                .map(|&x| x.checked_mul(x).ok_or(Error::Overflow("power spectrum")))
                .collect::<Result<Vec<_>>>()?;
            FunctionTable::from_int(g, sq)
        }
        _ => FunctionTable::from_real(g, (0..t.len()).map(|i| t.get(i).norm_sqr()).collect()),
    }
}

pub fn peak_from_spectrum(power: &FunctionTable) -> Peak {
    match power.values() {
        Values::Int(v) => {
            let (mut best, mut arg) = (0i128, 1usize);
            for (i, &x) in v.iter().enumerate().skip(1) {
                if x > best {
                    best = x;
                    arg = i;
                }
            }
            Peak {
                character: arg,
                value_sq: best as f64,
                exact_sq: Some(best),
            }
        }
        _ => {
            let n = power.len();
            let best = (1..n).map(|i| power.get(i).re).fold(0.0, f64::max);
            let scale = power.get(0).re.max(1.0);
            let arg = (1..n)
                .find(|&i| power.get(i).re >= best - 1e-9 * scale)
                .unwrap_or(1);
            Peak {
                character: arg,
                value_sq: best,
                exact_sq: None,
            }
        }
    }
}

/// `𝓜(A)²` and the maximizing nonprincipal character.
pub fn peak_coefficient(a: &GroupSet) -> Result<Peak> {
    Ok(peak_from_spectrum(&power_spectrum(a)?))
}

/// `E(A, B) = #{a1 - b1 = a2 - b2}`.
pub fn energy(a: &GroupSet, b: &GroupSet) -> Result<u128> {
    let r = difference_counts(a, b)?;
    Ok(r.iter().map(|&c| c as u128 * c as u128).sum())
}

/// Histogram of slice sizes, from which every `E_k` follows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SliceHistogram {
    /// `slice size -> number of x with that size` (zero sizes omitted).
    pub counts: BTreeMap<u64, u64>,
}

impl SliceHistogram {
    pub fn new(a: &GroupSet) -> Result<SliceHistogram> {
        Ok(SliceHistogram::from_sizes(&slice_sizes(a)?))
    }

    pub fn from_sizes(sizes: &[u64]) -> SliceHistogram {
        let mut counts = BTreeMap::new();
        for &s in sizes.iter().filter(|&&s| s > 0) {
            *counts.entry(s).or_insert(0) += 1;
        }
        SliceHistogram { counts }
    }

    /// `E_k = Σ_x |A_x|^k`; also defined for `k = 0, 1`.
    pub fn energy(&self, k: u32) -> BigUint {
        self.counts
            .iter()
            .map(|(&s, &c)| BigUint::from(s).pow(k) * c)
            .sum()
    }
}

/// `E_k(A)` for `k >= 2`.
pub fn higher_energy(a: &GroupSet, k: u32) -> Result<BigUint> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("energy order {k} < 2")));
    }
    Ok(SliceHistogram::new(a)?.energy(k))
}

/// Number of `(x_1, …, x_{k-1})` with `B ∩ (B + x_1) ∩ … ∩ (B + x_{k-1})`
/// nonempty, for `k` in `2..=4`.
pub fn higher_difference_count(b: &GroupSet, k: u32) -> Result<u128> {
    higher_difference_count_capped(b, k, DEFAULT_MEMO_BYTES)
}

pub fn higher_difference_count_capped(b: &GroupSet, k: u32, memo_bytes: usize) -> Result<u128> {
    if !(2..=4).contains(&k) {
        return Err(Error::InvalidArgument(format!(
            "higher difference count supports k in 2..=4, got {k}"
        )));
    }
    if b.is_empty() {
        return Ok(0);
    }
    let mut d = Descent {
        b,
        g: b.group(),
        stamp: vec![0; b.group().order()],
        generation: 0,
        memo: HashMap::new(),
        bytes: 0,
        cap: memo_bytes,
    };
    d.count(b.members().to_vec(), k - 1)
}

struct Descent<'a> {
    b: &'a GroupSet,
    g: &'a Group,
    stamp: Vec<u32>,
    generation: u32,
    memo: HashMap<(Vec<usize>, u32), u128>,
    bytes: usize,
    cap: usize,
}

impl Descent<'_> {
    /// `S - B` as a list.
    fn shifts(&mut self, s: &[usize]) -> Vec<usize> {
        self.generation += 1;
        let mut out = Vec::new();
        for &x in s {
            for y in self.b.iter() {
                let t = self.g.sub_idx(x, y);
                if self.stamp[t] != self.generation {
                    self.stamp[t] = self.generation;
                    out.push(t);
                }
            }
        }
        out
    }

    /// Number of `(x_1, …, x_depth)` with `S ∩ (B + x_1) ∩ …` nonempty.
    /// The count is translation invariant in `S`, so `S` is normalized.
    fn count(&mut self, s: Vec<usize>, depth: u32) -> Result<u128> {
        let shifts = self.shifts(&s);
        if depth == 1 {
            return Ok(shifts.len() as u128);
        }
        let base = s[0];
        let mut key: Vec<usize> = s.iter().map(|&x| self.g.sub_idx(x, base)).collect();
        key.sort_unstable();
        let key = (key, depth);
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        let mut total = 0u128;
        for x in shifts {
            let next: Vec<usize> = s
                .iter()
                .copied()
                .filter(|&y| self.b.contains(self.g.sub_idx(y, x)))
                .collect();
            total += self.count(next, depth - 1)?;
        }
        self.bytes += key.0.len() * std::mem::size_of::<usize>() + 64;
        if self.bytes > self.cap {
            return Err(Error::MemoryCap(format!(
                "slice cache exceeded {} bytes",
                self.cap
            )));
        }
        self.memo.insert(key, total);
        Ok(total)
    }
}

/// Checks `B + A_x ⊆ (A + B)_x`.
pub fn check_katz_koester(a: &GroupSet, b: &GroupSet, x: usize) -> Result<bool> {
    let s = sumset(a, b)?;
    katz_koester_with_sumset(a, b, &s, x)
}

fn katz_koester_with_sumset(a: &GroupSet, b: &GroupSet, s: &GroupSet, x: usize) -> Result<bool> {
    let g = a.group();
    let ax = slice(a, x)?;
    for u in ax.iter() {
        for v in b.iter() {
            let w = g.add_idx(u, v);
            if !s.contains(w) || !s.contains(g.sub_idx(w, x)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Runs the inclusion for every `x ∈ A - A`; returns the first failing `x`.
pub fn katz_koester_all(a: &GroupSet, b: &GroupSet) -> Result<Option<usize>> {
    let s = sumset(a, b)?;
    for x in difference_set(a, a)?.iter() {
        if !katz_koester_with_sumset(a, b, &s, x)? {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

/// A finite set of `k`-tuples of group elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TupleSet {
    pub group: Group,
    pub arity: usize,
    pub tuples: Vec<Vec<usize>>,
}

impl TupleSet {
    pub fn new(group: Group, arity: usize, tuples: Vec<Vec<usize>>) -> Result<TupleSet> {
        for t in &tuples {
            if t.len() != arity {
                return Err(Error::ShapeMismatch {
                    expected: arity,
                    found: t.len(),
                });
            }
            if let Some(&x) = t.iter().find(|&&x| x >= group.order()) {
                return Err(Error::IndexOutOfRange {
                    index: x,
                    order: group.order(),
                });
            }
        }
        let mut tuples = tuples;
        tuples.sort();
        tuples.dedup();
        Ok(TupleSet {
            group,
            arity,
            tuples,
        })
    }

    pub fn from_set(a: &GroupSet) -> TupleSet {
        TupleSet {
            group: a.group().clone(),
            arity: 1,
            tuples: a.iter().map(|x| vec![x]).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TriangleReport {
    /// `|W × X| · |Y - Δ(Z)|`.
    pub lhs: u128,
    /// `|W × Y × Z - Δ(X)|`.
    pub rhs: u128,
    pub holds: bool,
}

/// Checks `|W × X| · |Y - Δ(Z)| <= |W × Y × Z - Δ(X)|` by exhaustive tuple
/// arithmetic.
pub fn check_generalized_triangle(
    w: &TupleSet,
    y: &TupleSet,
    x: &GroupSet,
    z: &GroupSet,
) -> Result<TriangleReport> {
    let g = x.group();
    for other in [&w.group, &y.group, z.group()] {
        g.ensure_same(other)?;
    }
    let mut y_minus_z: HashSet<Vec<usize>> = HashSet::new();
    for t in &y.tuples {
        for c in z.iter() {
            y_minus_z.insert(t.iter().map(|&u| g.sub_idx(u, c)).collect());
        }
    }
    let mut big: HashSet<Vec<usize>> = HashSet::new();
    let mut buf = Vec::with_capacity(w.arity + y.arity + 1);
    for tw in &w.tuples {
        for ty in &y.tuples {
            for c in z.iter() {
                for s in x.iter() {
                    buf.clear();
                    buf.extend(tw.iter().chain(ty).chain(std::iter::once(&c)).map(|&u| g.sub_idx(u, s)));
                    if !big.contains(&buf) {
                        big.insert(buf.clone());
                    }
                }
            }
        }
    }
    let lhs = (w.len() * x.len()) as u128 * y_minus_z.len() as u128;
    let rhs = big.len() as u128;
    Ok(TriangleReport {
        lhs,
        rhs,
        holds: lhs <= rhs,
    })
}

/// The energy inequality `E_k(B) · E(A, A+B)^k >= |A|^{2k+1} |B|^{2k} / K'`
/// with `K' = |A - A| / |A|`, compared exactly.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyProductReport {
    pub k: u32,
    pub ek_b: String,
    pub energy_a_sum: u128,
    pub lhs: String,
    pub rhs: String,
    pub margin: f64,
    pub holds: bool,
}

pub fn check_energy_product(a: &GroupSet, b: &GroupSet, k: u32) -> Result<EnergyProductReport> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    let ek = higher_energy(b, k)?;
    let s = sumset(a, b)?;
    let eas = energy(a, &s)?;
    let dd = difference_set(a, a)?.len();
    let lhs = &ek * BigUint::from(eas).pow(k);
    let an = BigUint::from(a.len());
    let bn = BigUint::from(b.len());
    // rhs = |A|^{2k+2} |B|^{2k} / |A - A|
    let rhs = Q::new(
        (an.pow(2 * k + 2) * bn.pow(2 * k)).into(),
        BigUint::from(dd).into(),
    );
    let lq = qu(&lhs);
    Ok(EnergyProductReport {
        k,
        ek_b: ek.to_string(),
        energy_a_sum: eas,
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
        margin: crate::exact::margin(&lq, &rhs),
        holds: lq >= rhs,
    })
}

/// `|B|^{2k} <= 𝒟_k · E_k(B)`.
pub fn check_difference_count_energy(b: &GroupSet, k: u32) -> Result<CheckRecord> {
    let d = higher_difference_count(b, k)?;
    let e = higher_energy(b, k)?;
    let lhs = qu(&(BigUint::from(d) * e));
    let rhs = qu(&BigUint::from(b.len()).pow(2 * k));
    Ok(CheckRecord::at_least(
        &format!("difference-count-energy k={k}"),
        "difference-count-cauchy-schwarz",
        &lhs,
        &rhs,
        false,
    ))
}

/// Exact surrogate for the peak lower bound: from `E(A) >= |A|^4/|A-A|` and
/// `E(A) <= |A|^4/N + 𝓜²|A|` one gets
/// `N |A-A| 𝓜² + |A|³ |A-A| >= N |A|³`.
pub fn check_peak_lower_bound(a: &GroupSet, peak: &Peak) -> Result<CheckRecord> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let n = qi(a.group().order() as u64);
    let dd = qi(difference_set(a, a)?.len() as u64);
    let a3 = qi(a.len() as u64).pow(3);
    let rhs = &n * &a3;
    let rec = match peak.exact_sq {
        Some(m2) => CheckRecord::at_least(
            "peak-lower-bound",
            "peak-coefficient-lower-bound",
            &(&n * &dd * qi(m2) + &a3 * &dd),
            &rhs,
            false,
        ),
        None => CheckRecord::at_least_f64(
            "peak-lower-bound",
            "peak-coefficient-lower-bound",
            to_f64(&n) * to_f64(&dd) * peak.value_sq + to_f64(&a3) * to_f64(&dd),
            to_f64(&rhs),
            1e-9,
        ),
    };
    Ok(rec)
}

/// `E_{k+1} <= |A| E_k` for `k` in `2..k_max`.
pub fn check_energy_monotonicity(hist: &SliceHistogram, size: usize, k_max: u32) -> Vec<CheckRecord> {
    (2..k_max)
        .map(|k| {
            CheckRecord::at_most(
                &format!("energy-monotonicity k={k}"),
                "higher-energy-monotonicity",
                &qu(&hist.energy(k + 1)),
                &qu(&(hist.energy(k) * BigUint::from(size))),
                false,
            )
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SetProfile {
    pub group: String,
    pub size: usize,
    pub density: String,
    pub diff_size: usize,
    pub doubling: String,
    /// `|A + B| / |A|` when a second set is given.
    pub sum_doubling: Option<String>,
    /// `|B| / |A|` when a second set is given.
    pub omega: Option<String>,
    pub peak: Peak,
    pub energy: u128,
    /// `(k, E_k)` for each requested order.
    pub higher_energies: Vec<(u32, String)>,
    pub checks: Vec<CheckRecord>,
}

/// Profiles `A` (and `A + B` when `b` is given), with the structural checks
/// that apply to every set.
pub fn profile(a: &GroupSet, b: Option<&GroupSet>, ks: &[u32]) -> Result<SetProfile> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let n = a.group().order();
    let diff = difference_set(a, a)?;
    let hist = SliceHistogram::new(a)?;
    let peak = peak_coefficient(a)?;
    let e2 = hist.energy(2);
    let mut checks = Vec::new();
    checks.push(CheckRecord::at_least(
        "energy-cauchy-schwarz",
        "energy-difference-lower-bound",
        &(qu(&e2) * qi(diff.len() as u64)),
        &qi(a.len() as u64).pow(4),
        false,
    ));
    let k_top = ks.iter().copied().max().unwrap_or(2).max(3);
    checks.extend(check_energy_monotonicity(&hist, a.len(), k_top));
    checks.push(check_peak_lower_bound(a, &peak)?);
    let slice_total: u64 = hist.counts.iter().map(|(&s, &c)| s * c).sum();
    checks.push(CheckRecord::boolean(
        "slice-sum",
        "slice-sizes-sum-to-square",
        slice_total as u128 == (a.len() as u128).pow(2),
        &format!("{slice_total}"),
    ));
    let (sum_doubling, omega) = match b {
        Some(b) => (
            Some(q(sumset(a, b)?.len() as i64, a.len() as i64).to_string()),
            Some(q(b.len() as i64, a.len() as i64).to_string()),
        ),
        None => (None, None),
    };
    for &k in ks {
        if k < 2 {
            return Err(Error::InvalidArgument(format!("energy order {k} < 2")));
        }
    }
    Ok(SetProfile {
        group: a.group().to_string(),
        size: a.len(),
        density: q(a.len() as i64, n as i64).to_string(),
        diff_size: diff.len(),
        doubling: q(diff.len() as i64, a.len() as i64).to_string(),
        sum_doubling,
        omega,
        peak,
        energy: e2.try_into().map_err(|_| Error::Overflow("energy"))?,
        higher_energies: ks.iter().map(|&k| (k, hist.energy(k).to_string())).collect(),
        checks,
    })
}
