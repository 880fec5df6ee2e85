use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::check::CheckRecord;
use crate::error::{Error, Result};
use crate::exact::{ceil_q, parse_q, q, qi, Q};
use crate::set::GroupSet;
use crate::setstat::{self, Peak};

fn ser_q<S: serde::Serializer>(x: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Parameters of the energy-jump extraction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StructureParams {
    /// Peak bound: `𝓜² <= m |A|² / K`.
    #[serde(serialize_with = "ser_q")]
    pub m: Q,
    /// Energy bound: `E(B) <= m_prime |B|³ / K'`.
    #[serde(serialize_with = "ser_q")]
    pub m_prime: Q,
    /// Sumset bound: `|A + B|² <= kappa |A| N`.
    #[serde(serialize_with = "ser_q")]
    pub kappa: Q,
    /// Spectrum loss.
    #[serde(serialize_with = "ser_q")]
    pub zeta: Q,
    /// Jump ratio base, `1 < t <= m_prime (m + kappa) / omega`.
    #[serde(serialize_with = "ser_q")]
    pub t: Q,
    /// `|B| / |A|`.
    #[serde(serialize_with = "ser_q")]
    pub omega: Q,
    /// Constant in the Bohr radius `c_local ζ / (M_* |Λ|)`.
    #[serde(serialize_with = "ser_q")]
    pub c_local: Q,
    pub k0_pad: u32,
    #[serde(serialize_with = "ser_q")]
    pub c_chang: Q,
}

impl StructureParams {
    /// `M_* = (m + kappa) t / omega`.
    pub fn m_star(&self) -> Q {
        (&self.m + &self.kappa) * &self.t / &self.omega
    }

    /// `m_prime (m + kappa) / omega`, the upper end of the range for `t`.
    pub fn t_ceiling(&self) -> Q {
        &self.m_prime * (&self.m + &self.kappa) / &self.omega
    }

    /// `⌈pad · log_t(m_prime (m + kappa) / omega)⌉ + pad`.
    pub fn k0(&self) -> u32 {
        let x = crate::exact::to_f64(&self.t_ceiling());
        let t = crate::exact::to_f64(&self.t);
        let lg = if x > 1.0 && t > 1.0 { x.ln() / t.ln() } else { 0.0 };
        let pad = self.k0_pad as f64;
        ((pad * lg).ceil() + pad).min(u32::MAX as f64 / 2.0) as u32
    }
}

/// Optional overrides, read from configuration files as rational strings.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamOverrides {
    pub m: Option<String>,
    pub m_prime: Option<String>,
    pub kappa: Option<String>,
    pub zeta: Option<String>,
    pub t: Option<String>,
    pub c_local: Option<String>,
    pub k0_pad: Option<u32>,
    pub c_chang: Option<String>,
}

/// Exact statistics of an `(A, B)` pair used by the hypotheses.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairStats {
    pub order: usize,
    pub a_size: usize,
    pub b_size: usize,
    /// `|A + B|`.
    pub sum_size: usize,
    /// `|A - A|`.
    pub diff_size: usize,
    pub peak: Peak,
    pub energy_b: u128,
    /// `B = -A`, or `B = A` on `F2^n`.
    pub b_is_neg_a: bool,
}

impl PairStats {
    pub fn new(a: &GroupSet, b: &GroupSet) -> Result<PairStats> {
        a.group().ensure_same(b.group())?;
        if a.is_empty() || b.is_empty() {
            return Err(Error::EmptySet);
        }
        Ok(PairStats {
            order: a.group().order(),
            a_size: a.len(),
            b_size: b.len(),
            sum_size: setstat::sumset(a, b)?.len(),
            diff_size: setstat::difference_set(a, a)?.len(),
            peak: setstat::peak_coefficient(a)?,
            energy_b: setstat::energy(b, b)?,
            b_is_neg_a: *b == a.negate(),
        })
    }

    /// `K = |A + B| / |A|`.
    pub fn k(&self) -> Q {
        q(self.sum_size as i64, self.a_size as i64)
    }

    /// `K' = |A - A| / |A|`.
    pub fn k_prime(&self) -> Q {
        q(self.diff_size as i64, self.a_size as i64)
    }

    pub fn delta(&self) -> Q {
        q(self.a_size as i64, self.order as i64)
    }

    pub fn omega(&self) -> Q {
        q(self.b_size as i64, self.a_size as i64)
    }

    /// `m (1 + kappa / (K m))`, the energy bound implied by the peak bound
    /// when `B = -A`.
    pub fn energy_bound_from_peak(&self, m: &Q, kappa: &Q) -> Q {
        m * (Q::one() + kappa / (self.k() * m))
    }

    /// `E(B) K' / |B|³`, the smallest valid `m_prime`.
    pub fn tight_m_prime(&self) -> Q {
        qi(self.energy_b) * self.k_prime() / qi(self.b_size as u64).pow(3)
    }

    /// `⌈𝓜² K / |A|²⌉` clamped to `[1, K]`.
    pub fn default_m(&self) -> Q {
        let raw = self.peak.value_q() * self.k() / qi(self.a_size as u64).pow(2);
        let m = Q::from_integer(ceil_q(&raw));
        let k = self.k();
        if m < Q::one() {
            Q::one()
        } else if m > k {
            k
        } else {
            m
        }
    }

    /// `|A + B|² / (|A| N)`.
    pub fn default_kappa(&self) -> Q {
        qi(self.sum_size as u64).pow(2) / (qi(self.a_size as u64) * qi(self.order as u64))
    }
}

fn override_q(v: &Option<String>, default: Q) -> Result<Q> {
    match v {
        Some(s) => parse_q(s),
        None => Ok(default),
    }
}

/// Fills every parameter not overridden from the data of the instance.
pub fn derive_params(stats: &PairStats, o: &ParamOverrides) -> Result<StructureParams> {
    let m = override_q(&o.m, stats.default_m())?;
    let kappa = override_q(&o.kappa, stats.default_kappa())?;
    let m_prime_default = if stats.b_is_neg_a && !m.is_zero() {
        stats.energy_bound_from_peak(&m, &kappa)
    } else {
        stats.tight_m_prime()
    };
    let m_prime = override_q(&o.m_prime, m_prime_default)?;
    let omega = stats.omega();
    let ceiling = &m_prime * (&m + &kappa) / &omega;
    let two = qi(2);
    let t_default = if ceiling >= two {
        two
    } else {
        (Q::one() + &ceiling) / two
    };
    Ok(StructureParams {
        t: override_q(&o.t, t_default)?,
        zeta: override_q(&o.zeta, q(1, 8))?,
        c_local: override_q(&o.c_local, q(1, 32))?,
        k0_pad: o.k0_pad.unwrap_or(10),
        c_chang: override_q(&o.c_chang, qi(8))?,
        m,
        m_prime,
        kappa,
        omega,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HypothesisReport {
    pub checks: Vec<CheckRecord>,
    /// Range conditions that the extraction does not rely on.
    pub diagnostics: Vec<CheckRecord>,
    pub passed: bool,
}

impl HypothesisReport {
    pub fn failures(&self) -> String {
        self.checks
            .iter()
            .filter(|c| !c.holds)
            .map(|c| format!("{}: {} vs {}", c.name, c.lhs, c.rhs))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// Evaluates the peak, energy and sumset conditions and the parameter
/// ranges exactly. `zeta_limit` is 1 for subspaces and 1/2 for Bohr sets.
pub fn check_hypotheses(stats: &PairStats, p: &StructureParams, zeta_limit: &Q) -> HypothesisReport {
    let a = qi(stats.a_size as u64);
    let b = qi(stats.b_size as u64);
    let n = qi(stats.order as u64);
    let peak_bound = &p.m * &a * &a / stats.k();
    let mut peak_check = CheckRecord::at_most(
        "peak-condition",
        "peak-coefficient-condition",
        &stats.peak.value_q(),
        &peak_bound,
        false,
    );
    peak_check.holds = !stats.peak.exceeds(&peak_bound);
    let mut checks = vec![
        peak_check,
        CheckRecord::at_most(
            "energy-condition",
            "energy-condition",
            &qi(stats.energy_b),
            &(&p.m_prime * b.pow(3) / stats.k_prime()),
            false,
        ),
        CheckRecord::at_most(
            "sumset-condition",
            "sumset-size-condition",
            &qi(stats.sum_size as u64).pow(2),
            &(&p.kappa * &a * &n),
            false,
        ),
        CheckRecord::at_least("t-lower", "jump-base-range", &p.t, &Q::one(), true),
        CheckRecord::at_most("t-upper", "jump-base-range", &p.t, &p.t_ceiling(), false),
        CheckRecord::at_least("zeta-positive", "spectrum-loss-range", &p.zeta, &Q::zero(), true),
        CheckRecord::at_most("zeta-upper", "spectrum-loss-range", &p.zeta, zeta_limit, true),
        CheckRecord::at_least("kappa-positive", "sumset-size-condition", &p.kappa, &Q::zero(), true),
        CheckRecord::at_least("m-positive", "peak-coefficient-condition", &p.m, &Q::zero(), true),
        CheckRecord::at_least("c-local-positive", "bohr-radius-constant", &p.c_local, &Q::zero(), true),
    ];
    if p.omega != stats.omega() {
        checks.push(CheckRecord::boolean(
            "omega-matches-data",
            "size-ratio",
            false,
            &format!("{} vs {}", p.omega, stats.omega()),
        ));
    }
    let diagnostics = vec![
        CheckRecord::at_most("m-range", "parameter-range", &p.m, &stats.k(), false).diagnostic(),
        CheckRecord::at_most("m-prime-range", "parameter-range", &p.m_prime, &stats.k_prime(), false)
            .diagnostic(),
    ];
    let passed = checks.iter().all(|c| c.holds);
    HypothesisReport {
        checks,
        diagnostics,
        passed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Group;

    #[test]
    fn subgroup_defaults_pass() {
        let g = Group::boolean(8).unwrap();
        let h = GroupSet::new(g, 0..8).unwrap();
        let s = PairStats::new(&h, &h).unwrap();
        assert!(s.b_is_neg_a);
        let p = derive_params(&s, &ParamOverrides::default()).unwrap();
        assert_eq!(p.m, Q::one());
        assert_eq!(p.kappa, q(8, 256));
        let r = check_hypotheses(&s, &p, &Q::one());
        assert!(r.passed, "{}", r.failures());
        // M' = 1 is enough since E(H) = |H|³ and K' = 1
        let tight = derive_params(
            &s,
            &ParamOverrides {
                m_prime: Some("1".into()),
                t: Some("1.01".into()),
                ..Default::default()
            },
        )
        .unwrap();
        assert!(check_hypotheses(&s, &tight, &Q::one()).checks[1].holds);
    }

    #[test]
    fn overrides_parse() {
        let g = Group::cyclic(30).unwrap();
        let a = GroupSet::new(g, [0, 1, 2, 3]).unwrap();
        let s = PairStats::new(&a, &a).unwrap();
        let p = derive_params(
            &s,
            &ParamOverrides {
                zeta: Some("0.25".into()),
                k0_pad: Some(3),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(p.zeta, q(1, 4));
        assert_eq!(p.k0_pad, 3);
        assert!(derive_params(
            &s,
            &ParamOverrides {
                m: Some("x".into()),
                ..Default::default()
            }
        )
        .is_err());
    }
}
