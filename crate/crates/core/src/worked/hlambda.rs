use serde::{Deserialize, Serialize};

use crate::check::CheckRecord;
use crate::error::{Error, Result};
use crate::exact::{q, qi, Q};
use crate::group::Group;
use crate::harmonic;
use crate::set::GroupSet;
use crate::setstat::{self, SliceHistogram};
use crate::structure::phi_k;

/// `A = H + Λ` in `F2^n`: `H` spans the first `k` coordinates and `Λ` is
/// the next `lambda_size` standard basis vectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HLambdaSpec {
    pub n: usize,
    pub k: usize,
    pub lambda_size: usize,
}

const MAX_RANK: usize = 20;

pub fn make_h_lambda(spec: HLambdaSpec) -> Result<GroupSet> {
    if spec.n > MAX_RANK {
        return Err(Error::SizeLimit {
            what: "H + Λ rank",
            limit: MAX_RANK,
            actual: spec.n,
        });
    }
    if spec.lambda_size == 0 || spec.k + spec.lambda_size > spec.n {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= lambda_size and k + lambda_size <= n, got {spec:?}"
        )));
    }
    let g = Group::boolean(spec.n)?;
    let members = (0..spec.lambda_size).flat_map(|i| (0..1usize << spec.k).map(move |h| h | 1 << (spec.k + i)));
    GroupSet::new(g, members)
}

/// `r_k = Σ_{s ∈ H} |A_s|^k / E_k(A)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConcentrationRatio {
    pub k: u32,
    pub ratio: String,
    pub value: f64,
    /// `max_χ |φ̂_k(χ) - |A|^k Ĥ(χ)| / (|A|^k |H|)`.
    pub transform_deviation: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HLambdaReport {
    pub spec: HLambdaSpec,
    pub size: usize,
    pub diff_size: usize,
    pub doubling: String,
    pub ratios: Vec<ConcentrationRatio>,
    pub checks: Vec<CheckRecord>,
}

/// Largest rank for which the transform diagnostic is computed.
const TRANSFORM_DIAGNOSTIC_RANK: usize = 16;

/// Exact slice claims, the partition identity and the concentration of
/// higher energies on `H`.
pub fn verify_h_lambda(a: &GroupSet, spec: HLambdaSpec, k_max: u32) -> Result<HLambdaReport> {
    let expected = make_h_lambda(spec)?;
    let g = a.group().clone();
    let h_size = 1usize << spec.k;
    let in_h = |s: usize| s >> spec.k == 0;
    let slices = setstat::slice_sizes(a)?;
    let diff = setstat::difference_set(a, a)?;
    let lam = spec.lambda_size;
    let mut checks = vec![
        CheckRecord::boolean("set-matches-construction", "h-plus-lambda", *a == expected, ""),
        CheckRecord::at_least(
            "size",
            "h-plus-lambda-size",
            &qi(a.len() as u64),
            &qi((h_size * lam) as u64),
            false,
        ),
        CheckRecord::boolean(
            "difference-set-size",
            "h-plus-lambda-difference-set",
            diff.len() == h_size * (1 + lam * (lam - 1) / 2),
            &format!("{} vs {}", diff.len(), h_size * (1 + lam * (lam - 1) / 2)),
        ),
    ];
    let total: u64 = slices.iter().sum();
    checks.push(CheckRecord::boolean(
        "slice-partition",
        "slice-sum-identity",
        total == (a.len() as u64).pow(2),
        &format!("{total}"),
    ));
    let bad_h = (0..h_size).find(|&s| slices[s] != a.len() as u64);
    checks.push(CheckRecord::boolean(
        "slices-on-h-are-full",
        "slices-on-subgroup",
        bad_h.is_none(),
        &bad_h.map_or("every s in H".into(), |s| format!("s = {s}")),
    ));
    let mut bad_off = None;
    for s in diff.iter().filter(|&s| !in_h(s)) {
        let slice: Vec<usize> = a.iter().filter(|&x| a.contains(x ^ s)).collect();
        let mut cosets: Vec<usize> = slice.iter().map(|&x| x >> spec.k).collect();
        cosets.dedup();
        if slice.len() != 2 * h_size || cosets.len() != 2 {
            bad_off = Some(s);
            break;
        }
    }
    checks.push(CheckRecord::boolean(
        "slices-off-h-are-two-cosets",
        "slices-off-subgroup",
        bad_off.is_none(),
        &bad_off.map_or("every s in (A - A) \\ H".into(), |s| format!("s = {s}")),
    ));

    let hist = SliceHistogram::from_sizes(&slices);
    let on_h = SliceHistogram::from_sizes(&slices[..h_size]);
    let mut ratios = Vec::new();
    for k in 2..=k_max {
        let r: Q = crate::exact::qu(&on_h.energy(k)) / crate::exact::qu(&hist.energy(k));
        let transform_deviation = if g.rank() <= TRANSFORM_DIAGNOSTIC_RANK {
            transform_deviation(a, spec, k)?
        } else {
            None
        };
        ratios.push(ConcentrationRatio {
            k,
            value: crate::exact::to_f64(&r),
            ratio: r.to_string(),
            transform_deviation,
        });
    }
    let strictly = lam >= 3;
    let monotone = ratios.windows(2).all(|w| {
        let (x, y) = (
            crate::exact::parse_q(&w[0].ratio).expect("own output"),
            crate::exact::parse_q(&w[1].ratio).expect("own output"),
        );
        if strictly {
            y > x
        } else {
            y >= x
        }
    });
    checks.push(CheckRecord::boolean(
        "concentration-increasing",
        "higher-energy-concentration",
        monotone,
        if strictly { "strictly increasing" } else { "nondecreasing" },
    ));
    Ok(HLambdaReport {
        spec,
        size: a.len(),
        diff_size: diff.len(),
        doubling: q(diff.len() as i64, a.len() as i64).to_string(),
        ratios,
        checks,
    })
}

fn transform_deviation(a: &GroupSet, spec: HLambdaSpec, k: u32) -> Result<Option<f64>> {
    let phi = phi_k(a, k)?;
    let fhat = harmonic::dft(&phi.table)?;
    let scale = if phi.scaled {
        // values were divided by |A|^k
        1.0
    } else {
        (a.len() as f64).powi(k as i32)
    };
    let h = (1usize << spec.k) as f64;
    let low_mask = (1usize << spec.k) - 1;
    let mut worst: f64 = 0.0;
    for chi in 0..fhat.len() {
        let predicted = if chi & low_mask == 0 { scale * h } else { 0.0 };
        worst = worst.max((fhat.get(chi).re - predicted).abs());
    }
    Ok(Some(worst / (scale * h)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_instance() {
        let spec = HLambdaSpec {
            n: 8,
            k: 3,
            lambda_size: 5,
        };
        let a = make_h_lambda(spec).unwrap();
        assert_eq!(a.len(), 40);
        let r = verify_h_lambda(&a, spec, 6).unwrap();
        assert_eq!(r.diff_size, 88);
        assert_eq!(r.doubling, "11/5");
        assert!(r.checks.iter().all(|c| c.holds), "{:?}", r.checks);
        let dev: Vec<f64> = r.ratios.iter().map(|c| c.transform_deviation.unwrap()).collect();
        assert!(dev[4] < dev[0]);
    }

    #[test]
    fn degenerate_sizes() {
        let a = make_h_lambda(HLambdaSpec {
            n: 6,
            k: 2,
            lambda_size: 1,
        })
        .unwrap();
        assert_eq!(setstat::doubling(&a).unwrap(), Q::from_integer(1.into()));
        let l = make_h_lambda(HLambdaSpec {
            n: 6,
            k: 0,
            lambda_size: 4,
        })
        .unwrap();
        assert_eq!(l.members(), &[1, 2, 4, 8]);
        assert!(make_h_lambda(HLambdaSpec {
            n: 4,
            k: 3,
            lambda_size: 2
        })
        .is_err());
    }
}
