use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::f2::{parity, F2Subspace};
use super::params::{PairStats, StructureParams};
use super::pipeline::{
    ensure_certificates, extract_bohr_unchecked, extract_subspace_unchecked, CosetDecomposition,
    InclusionReport, Piece, StructureResult,
};
use crate::bohr::BohrProfile;
use crate::check::CheckRecord;
use crate::error::{Error, Result};
use crate::exact::{ceil_q, q, qi, Q};
use crate::set::GroupSet;
use crate::setstat;

fn large(peak: &setstat::Peak, bound: Q) -> Piece {
    Piece::LargeCoefficient {
        character: peak.character,
        value_sq: peak.value_q().to_string(),
        bound: bound.to_string(),
    }
}

/// Every member of `set` must be a difference of two elements of `a`.
fn verify_inclusion(a: &GroupSet, set: &GroupSet) -> Result<usize> {
    let diff = setstat::difference_set(a, a)?;
    for x in set.iter() {
        if !diff.contains(x) {
            return Err(Error::InclusionFailed { element: x });
        }
    }
    Ok(set.len())
}

/// The `2 - ε` regime: either `|Â(x)|² >= (2 - ε)|A|²/K` for some `x ≠ 0`,
/// or a subspace (on `F2^n`) or regular Bohr set dilate lying inside
/// `A - A`, verified element by element.
pub fn certify_difference_subset(a: &GroupSet, eps: &Q) -> Result<StructureResult> {
    if !(eps > &Q::zero() && eps < &Q::one()) {
        return Err(Error::InvalidArgument(format!("ε = {eps} not in (0, 1)")));
    }
    let neg = a.negate();
    let stats = PairStats::new(a, &neg)?;
    let k = stats.k_prime();
    let gate = CheckRecord::at_most(
        "small-density-gate",
        "difference-subset-density-gate",
        &(qi(100) * &k * &k * stats.delta()),
        eps,
        false,
    );
    if !gate.holds {
        return Err(Error::HypothesisFailed(format!(
            "100 K² δ = {} exceeds ε = {eps}",
            gate.lhs
        )));
    }
    let asize = qi(a.len() as u64);
    let bound = (qi(2) - eps) * &asize * &asize / &k;
    let is_large = match stats.peak.exact_sq {
        Some(v) => qi(v) >= bound,
        None => stats.peak.exceeds(&bound),
    };
    if is_large {
        let mut r = StructureResult::new("certify_difference_subset", large(&stats.peak, bound));
        r.certificates.push(gate);
        return Ok(r);
    }
    let boolean = a.group().is_boolean();
    let kappa = if boolean { eps / qi(100) } else { eps / qi(200) };
    let m = qi(2) - eps;
    let p = StructureParams {
        m_prime: stats.energy_bound_from_peak(&m, &kappa),
        t: Q::one() + &kappa,
        zeta: kappa.clone(),
        omega: Q::one(),
        c_local: q(1, 32),
        k0_pad: 10,
        c_chang: qi(8),
        m,
        kappa,
    };
    let hyp = super::params::check_hypotheses(&stats, &p, &if boolean { Q::one() } else { q(1, 2) });
    let mut r = if boolean {
        extract_subspace_unchecked(&neg, &p)?
    } else {
        extract_bohr_unchecked(&neg, &p)?
    };
    r.operation = "certify_difference_subset".into();
    r.hypotheses = Some(hyp);
    r.certificates.insert(0, gate);
    let inclusion = match &r.piece {
        Piece::Subspace(s) => {
            let checked = verify_inclusion(a, &s.subspace)?;
            InclusionReport {
                checked,
                failures: 0,
                t: None,
                j: None,
                translate: None,
            }
        }
        Piece::Bohr(bp) => {
            let (report, extra) = two_dilate_inclusion(a, &bp.bohr.spec, eps)?;
            r.diagnostics.extend(extra);
            report
        }
        Piece::LargeCoefficient { .. } => unreachable!("extraction returns a structured piece"),
    };
    r.certificates.push(CheckRecord::boolean(
        "structured-set-inside-difference-set",
        "difference-set-inclusion",
        inclusion.failures == 0,
        &format!("{} members checked", inclusion.checked),
    ));
    r.inclusion = Some(inclusion);
    Ok(r)
}

/// Selects `j ∈ [1, t]` with `|B''|^t <= 8^{d+1} |B'|^t`, where `B'` and
/// `B''` are the dilates by `1/2 + (j-1)η` and `1/2 + jη`, `η = 1/(2t)`,
/// and checks `(B_*)_η ⊆ A - A`.
fn two_dilate_inclusion(
    a: &GroupSet,
    spec: &crate::bohr::BohrSpec,
    eps: &Q,
) -> Result<(InclusionReport, Vec<CheckRecord>)> {
    let g = a.group();
    let d = spec.dim();
    let t_big = ceil_q(&(qi(100 * d.max(1) as u64) / eps));
    let t: u64 = t_big
        .try_into()
        .map_err(|_| Error::Overflow("dilate count"))?;
    let eta = q(1, 2 * t as i64);
    let profile = BohrProfile::new(g, spec)?;
    let factor = BigUint::from(8u32).pow(d as u32 + 1);
    let half = q(1, 2);
    let mut chosen = None;
    for j in 1..=t {
        let s1 = &half + &eta * qi(j - 1);
        let s2 = &half + &eta * qi(j);
        let c1 = BigUint::from(profile.count(&s1));
        let c2 = BigUint::from(profile.count(&s2));
        if c2.pow(t as u32) <= &factor * c1.pow(t as u32) {
            chosen = Some((j, s1, s2));
            break;
        }
    }
    let (j, s1, s2) = chosen.ok_or_else(|| {
        Error::Precision("no dilate pair satisfies the growth bound".into())
    })?;
    let inner = profile.members(&s1);
    let outer = profile.members(&s2);
    let r1 = setstat::difference_counts(a, &inner)?;
    let r2 = setstat::difference_counts(a, &outer)?;
    let (z, best) = r1
        .iter()
        .zip(&r2)
        .map(|(x, y)| x + y)
        .enumerate()
        .fold((0, 0), |acc, (z, v)| if v > acc.1 { (z, v) } else { acc });
    let achieved = q(best as i64, (inner.len() + outer.len()) as i64);
    let diag = vec![CheckRecord::at_least(
        "two-dilate-density",
        "two-dilate-density",
        &achieved,
        &(half + eps / qi(8)),
        false,
    )
    .diagnostic()];
    let small = profile.members(&eta);
    let checked = verify_inclusion(a, &small)?;
    Ok((
        InclusionReport {
            checked,
            failures: 0,
            t: Some(t),
            j: Some(j),
            translate: Some(z),
        },
        diag,
    ))
}

/// The `M` dichotomy for a subset `B_sub` of `A` or `-A`: either
/// `|Â(x)|² > M|A|²/K` for some `x ≠ 0`, or a structured piece with
/// `|B_sub ∩ (piece + z)| >= ω |piece| / (8M)`. On `F2^n` with
/// `B_sub = ±A` the heavy-coset decomposition is certified as well.
pub fn dichotomy_m(a: &GroupSet, m: &Q, b_sub: &GroupSet) -> Result<StructureResult> {
    a.group().ensure_same(b_sub.group())?;
    let neg = a.negate();
    if b_sub.is_empty() || !(b_sub.is_subset(a) || b_sub.is_subset(&neg)) {
        return Err(Error::InvalidArgument("B_sub must be a nonempty subset of A or -A".into()));
    }
    let stats = PairStats::new(a, b_sub)?;
    let k = stats.k_prime();
    let n = qi(a.group().order() as u64);
    let gate = CheckRecord::at_most(
        "size-gate",
        "dichotomy-size-gate",
        &(qi(100) * &k * &k * qi(a.len() as u64)),
        &n,
        false,
    );
    if !gate.holds {
        return Err(Error::HypothesisFailed(format!("100 K² |A| = {} exceeds N = {n}", gate.lhs)));
    }
    if *m < Q::one() || *m > k {
        return Err(Error::InvalidArgument(format!("M = {m} not in [1, K = {k}]")));
    }
    let asize = qi(a.len() as u64);
    let bound = m * &asize * &asize / &k;
    if stats.peak.exceeds(&bound) {
        let mut r = StructureResult::new("dichotomy_m", large(&stats.peak, bound.clone()));
        r.certificates.push(gate);
        r.certificates.push(CheckRecord::at_least(
            "large-coefficient",
            "large-coefficient-branch",
            &stats.peak.value_q(),
            &bound,
            true,
        ));
        ensure_certificates(&r.certificates)?;
        return Ok(r);
    }
    let p = StructureParams {
        m: m.clone(),
        m_prime: qi(2) * m,
        kappa: Q::one(),
        zeta: q(1, 8),
        t: qi(2),
        omega: stats.omega(),
        c_local: q(1, 32),
        k0_pad: 10,
        c_chang: qi(8),
    };
    let boolean = a.group().is_boolean();
    let hyp = super::params::check_hypotheses(&stats, &p, &if boolean { Q::one() } else { q(1, 2) });
    let mut r = if boolean {
        extract_subspace_unchecked(b_sub, &p)?
    } else {
        extract_bohr_unchecked(b_sub, &p)?
    };
    r.operation = "dichotomy_m".into();
    r.hypotheses = Some(hyp);
    r.certificates.insert(0, gate);
    let (size, hits) = r.piece.size_and_hits().expect("structured piece");
    let required = &p.omega * qi(size as u64) / (qi(8) * m);
    r.certificates.push(CheckRecord::at_least(
        "density-over-8m",
        "density-over-8m",
        &qi(hits as u64),
        &required,
        false,
    ));
    r.certificates.push(CheckRecord::at_most(
        "no-large-coefficient",
        "large-coefficient-branch",
        &stats.peak.value_q(),
        &bound,
        false,
    ));
    if boolean && (*b_sub == *a) {
        if let Piece::Subspace(_) = &r.piece {
            let lambda = r.stage.as_ref().map(|s| s.lambda.members.clone()).unwrap_or_default();
            r.decomposition = Some(coset_decomposition(a, &lambda, m)?);
        }
    }
    let mut all = r.certificates.clone();
    if let Some(d) = &r.decomposition {
        all.extend(d.checks.iter().cloned());
    }
    ensure_certificates(&all)?;
    Ok(r)
}

/// Heavy cosets `λ + ℒ` with `|A ∩ (ℒ + λ)| >= |ℒ|/(16M)` and the three
/// counting certificates for `A_* = A ∩ (Λ ⊕ ℒ)`.
pub fn coset_decomposition(a: &GroupSet, lambda: &[usize], m: &Q) -> Result<CosetDecomposition> {
    let g = a.group();
    let ann = F2Subspace::annihilator(g.rank() as u32, lambda);
    let l = qi(1u64 << ann.dim());
    let syndrome = |x: usize| -> usize {
        lambda
            .iter()
            .enumerate()
            .fold(0usize, |s, (i, &v)| s | ((parity(v & x) as usize) << i))
    };
    let mut cosets: std::collections::BTreeMap<usize, (usize, usize)> = Default::default();
    for x in a.iter() {
        let e = cosets.entry(syndrome(x)).or_insert((0, x));
        e.0 += 1;
    }
    let asize = qi(a.len() as u64);
    let sum_sq: u64 = cosets.values().map(|&(c, _)| (c as u64) * (c as u64)).sum();
    let threshold = &l / (qi(16) * m);
    let heavy: Vec<(usize, usize, usize)> = cosets
        .iter()
        .filter(|(_, &(c, _))| qi(c as u64) >= threshold)
        .map(|(&s, &(c, rep))| (s, c, rep))
        .collect();
    let heavy_syndromes: std::collections::BTreeSet<usize> = heavy.iter().map(|h| h.0).collect();
    let a_star = GroupSet::new(g.clone(), a.iter().filter(|&x| heavy_syndromes.contains(&syndrome(x))))?;
    let count = heavy.len() as u64;
    let checks = vec![
        CheckRecord::at_least(
            "coset-energy",
            "coset-energy-lower-bound",
            &qi(sum_sq),
            &(&l * &asize / (qi(8) * m)),
            false,
        ),
        CheckRecord::at_least(
            "heavy-coset-mass",
            "heavy-coset-mass",
            &qi(a_star.len() as u64),
            &(&asize / (qi(16) * m)),
            false,
        ),
        CheckRecord::at_most(
            "heavy-coset-count",
            "heavy-coset-count",
            &(qi(count) * &l),
            &(qi(16) * m * &asize),
            false,
        ),
    ];
    let mut representatives: Vec<usize> = heavy.iter().map(|h| h.2).collect();
    representatives.sort_unstable();
    Ok(CosetDecomposition {
        representatives,
        subspace_size: 1 << ann.dim(),
        a_star,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Group;

    #[test]
    fn subgroup_inclusion_in_f2() {
        let g = Group::boolean(12).unwrap();
        let h = GroupSet::new(g, 0..16).unwrap();
        let r = certify_difference_subset(&h, &q(1, 2)).unwrap();
        let inc = r.inclusion.unwrap();
        assert_eq!(inc.failures, 0);
        assert!(inc.checked >= 16);
    }

    #[test]
    fn gate_rejects_dense_sets() {
        let g = Group::boolean(6).unwrap();
        let h = GroupSet::new(g, 0..16).unwrap();
        assert!(matches!(
            certify_difference_subset(&h, &q(1, 2)),
            Err(Error::HypothesisFailed(_))
        ));
        assert!(matches!(dichotomy_m(&h, &Q::one(), &h), Err(Error::HypothesisFailed(_))));
    }

    #[test]
    fn subgroup_inclusion_in_z3_power() {
        let g: Group = "Z3^6".parse().unwrap_or_else(|_| Group::new(&[3; 6]).unwrap());
        let h = GroupSet::new(g, [0, 1, 2]).unwrap();
        let r = certify_difference_subset(&h, &q(1, 2)).unwrap();
        assert!(!r.is_large_coefficient());
        assert_eq!(r.inclusion.unwrap().failures, 0);
    }

    #[test]
    fn dichotomy_on_planted_coset_union() {
        let g = Group::boolean(12).unwrap();
        // two cosets of a 3-dimensional subspace
        let a = GroupSet::new(g, (0..8).chain((0..8).map(|x| x | 1 << 9))).unwrap();
        let k = setstat::doubling(&a).unwrap();
        let r = dichotomy_m(&a, &Q::one().max(k.clone()).min(k), &a).unwrap();
        if let Some(d) = &r.decomposition {
            assert!(d.checks.iter().all(|c| c.holds));
        }
        assert!(r.failures().is_empty());
    }
}
