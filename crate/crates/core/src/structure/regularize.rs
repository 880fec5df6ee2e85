use num_traits::One;
use serde::Serialize;

use super::f2::{parity, F2Subspace};
use super::params::StructureParams;
use super::pipeline::{densest_annihilator_coset, spectral_stage};
use crate::check::CheckRecord;
use crate::error::{Error, Result};
use crate::exact::{q, qi, Q};
use crate::group::Group;
use crate::set::GroupSet;
use crate::setstat;

/// Largest rank accepted by the loop.
pub const REGULARIZE_MAX_RANK: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RegularizationBranch {
    /// Energy-jump extraction of a subspace of bounded codimension.
    Subspace,
    /// Split along the kernel of the largest coefficient.
    Halving,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegularizationStep {
    pub branch: RegularizationBranch,
    /// `M = 𝓜² K / |A|²` of the current set.
    pub m: String,
    /// `1 / (16 δ)`.
    pub threshold: String,
    /// Basis of the new ambient subspace, in the original group.
    pub basis: Vec<usize>,
    pub translate: usize,
    pub dim_before: usize,
    pub dim_after: usize,
    pub size_after: usize,
    pub density_before: String,
    pub density_after: String,
    pub guarantee: CheckRecord,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegularizationTrace {
    pub steps: Vec<RegularizationStep>,
    /// `Ã = A ∩ (H + z)` in the original group.
    pub final_set: GroupSet,
    pub basis: Vec<usize>,
    pub translate: usize,
    /// `K̃ = |Ã - Ã| / |Ã|`.
    pub final_doubling: String,
    /// `δ̃ = |Ã| / |H|`.
    pub final_density: String,
    pub checks: Vec<CheckRecord>,
}

struct Frame {
    /// Ambient subspace basis in the original group.
    basis: Vec<usize>,
    translate: usize,
    /// The current set in coordinates of `basis`.
    local: GroupSet,
}

impl Frame {
    fn to_original(&self, y: usize) -> usize {
        self.basis
            .iter()
            .enumerate()
            .filter(|(i, _)| y >> i & 1 == 1)
            .fold(self.translate, |acc, (_, &v)| acc ^ v)
    }

    fn density(&self) -> Q {
        q(self.local.len() as i64, 1i64 << self.basis.len())
    }

    /// Restricts to `A ∩ (sub + z)` (local coordinates) and re-coordinatizes.
    fn restrict(&self, sub: &F2Subspace, z: usize) -> Result<Frame> {
        // A point frame keeps {0} in a rank-1 carrier: density and doubling
        // are both 1 there, so the loop stops on it.
        let g = Group::boolean(sub.dim().max(1))?;
        let local = GroupSet::new(g, self.local.iter().filter_map(|x| sub.coords(x ^ z)))?;
        let basis = sub
            .basis()
            .iter()
            .map(|&v| {
                self.basis
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| v >> i & 1 == 1)
                    .fold(0, |acc, (_, &b)| acc ^ b)
            })
            .collect();
        Ok(Frame {
            basis,
            translate: self.to_original(z),
            local,
        })
    }
}

/// Density-increment loop on `F2^n`: while `100 K² δ <= 1`, pass either to
/// a dense coset of an extracted subspace (density at least doubles) or to
/// the denser half along the largest coefficient (density grows by a factor
/// of at least `1 + δ/8`).
pub fn regularize_density(a: &GroupSet) -> Result<RegularizationTrace> {
    let g = a.group();
    if !g.is_boolean() {
        return Err(Error::NotBoolean);
    }
    if g.rank() > REGULARIZE_MAX_RANK {
        return Err(Error::SizeLimit {
            what: "regularization rank",
            limit: REGULARIZE_MAX_RANK,
            actual: g.rank(),
        });
    }
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut frame = Frame {
        basis: (0..g.rank()).map(|i| 1usize << i).collect(),
        translate: 0,
        local: a.clone(),
    };
    let mut steps = Vec::new();
    loop {
        let cur = &frame.local;
        let k = setstat::doubling(cur)?;
        let delta = frame.density();
        if qi(100) * &k * &k * &delta > Q::one() {
            break;
        }
        let m_len = frame.basis.len();
        let peak = setstat::peak_coefficient(cur)?;
        let size = qi(cur.len() as u64);
        let m = peak.value_q() * &k / (&size * &size);
        let threshold = Q::one() / (qi(16) * &delta);
        let (branch, next, guarantee) = if m <= threshold {
            let m_eff = if m < Q::one() { Q::one() } else { m.clone() };
            let p = StructureParams {
                m_prime: qi(2) * &m_eff,
                m: m_eff,
                kappa: Q::one(),
                zeta: q(1, 8),
                t: qi(2),
                omega: Q::one(),
                c_local: q(1, 32),
                k0_pad: 10,
                c_chang: qi(8),
            };
            let stage = spectral_stage(cur, &p)?;
            let (sub, z, _) = densest_annihilator_coset(cur, &stage.lambda.members)?;
            let next = frame.restrict(&sub, z)?;
            let check = CheckRecord::at_least(
                "density-doubles",
                "subspace-density-increment",
                &next.density(),
                &(qi(2) * &delta),
                false,
            );
            (RegularizationBranch::Subspace, next, check)
        } else {
            let chi = peak.character;
            let sub = F2Subspace::annihilator(m_len as u32, &[chi]);
            let inside = cur.iter().filter(|&x| parity(chi & x) == 0).count();
            let z = if 2 * inside >= cur.len() { 0 } else { 1usize << chi.trailing_zeros() };
            let next = frame.restrict(&sub, z)?;
            let check = CheckRecord::at_least(
                "density-increment",
                "halving-density-increment",
                &next.density(),
                &(&delta * (Q::one() + &delta / qi(8))),
                false,
            );
            (RegularizationBranch::Halving, next, check)
        };
        let increased = next.density() > delta;
        if !guarantee.holds || !increased {
            return Err(Error::DensityGuaranteeFailed {
                hits: next.local.len(),
                required: guarantee.rhs.clone(),
                detail: format!("{branch:?} step {} at dimension {m_len}", steps.len()),
            });
        }
        steps.push(RegularizationStep {
            branch,
            m: m.to_string(),
            threshold: threshold.to_string(),
            basis: next.basis.clone(),
            translate: next.translate,
            dim_before: m_len,
            dim_after: next.basis.len(),
            size_after: next.local.len(),
            density_before: delta.to_string(),
            density_after: next.density().to_string(),
            guarantee,
        });
        frame = next;
    }
    let final_set = GroupSet::new(g.clone(), frame.local.iter().map(|y| frame.to_original(y)))?;
    let span = F2Subspace::span(g.rank() as u32, &frame.basis);
    let coset_part = GroupSet::new(
        g.clone(),
        a.iter().filter(|&x| span.contains(x ^ frame.translate)),
    )?;
    let k = setstat::doubling(&frame.local)?;
    let delta = frame.density();
    let mut checks = vec![
        CheckRecord::boolean(
            "final-set-is-coset-slice",
            "regularized-set",
            final_set == coset_part,
            &format!("{} elements", final_set.len()),
        ),
        CheckRecord::at_least(
            "stopping-condition",
            "regularization-stop",
            &(qi(100) * &k * &k * &delta),
            &Q::one(),
            true,
        ),
    ];
    let increasing = steps
        .windows(2)
        .all(|w| crate::exact::parse_q(&w[1].density_after).ok() > crate::exact::parse_q(&w[0].density_after).ok());
    checks.push(CheckRecord::boolean(
        "density-strictly-increasing",
        "regularization-increment",
        increasing,
        &format!("{} steps", steps.len()),
    ));
    Ok(RegularizationTrace {
        steps,
        final_set,
        basis: frame.basis,
        translate: frame.translate,
        final_doubling: k.to_string(),
        final_density: delta.to_string(),
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dense_set_stops_immediately() {
        let g = Group::boolean(8).unwrap();
        let a = GroupSet::new(g, (0..256).filter(|x| x % 2 == 0 || x % 3 == 0)).unwrap();
        let t = regularize_density(&a).unwrap();
        assert!(t.steps.is_empty());
        assert_eq!(t.final_set, a);
    }

    #[test]
    fn collapses_to_a_point() {
        let g = Group::boolean(13).unwrap();
        let a = GroupSet::new(g, [1, 2, 4]).unwrap();
        let t = regularize_density(&a).unwrap();
        assert!(t.checks.iter().all(|c| c.holds), "{:?}", t.checks);
        assert_eq!(t.final_set.len(), 1);
        assert!(t.basis.is_empty());
        assert_eq!(t.final_density, "1");
    }

    #[test]
    fn subgroup_plus_points() {
        let g = Group::boolean(14).unwrap();
        let mut members: Vec<usize> = (0..16).collect();
        members.push(1 << 10);
        let a = GroupSet::new(g, members).unwrap();
        let t = regularize_density(&a).unwrap();
        assert!(!t.steps.is_empty());
        assert!(t.checks.iter().all(|c| c.holds), "{:?}", t.checks);
        assert!(t.final_set.is_subset(&a));
    }
}
