//! Bohr sets `B(Γ, ε) = {x : ‖γ_j · x‖ < ε_j for all j}` with exact
//! rational membership, regularity on an η-grid, and the size lemmas as
//! checks.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use crate::check::CheckRecord;
use crate::error::{Error, Result};
use crate::exact::{q, qu, Q};
use crate::group::{Group, MAX_MEMBERSHIP_ORDER};
use crate::set::GroupSet;

/// A radius `num / den` in `(0, 1]`, kept reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Radius {
    num: u32,
    den: u32,
}

impl Radius {
    pub fn new(num: u64, den: u64) -> Result<Radius> {
        if num == 0 || den == 0 || num > den {
            return Err(Error::InvalidArgument(format!("radius {num}/{den} not in (0, 1]")));
        }
        let g = num.gcd(&den);
        let (n, d) = (num / g, den / g);
        match (u32::try_from(n), u32::try_from(d)) {
            (Ok(num), Ok(den)) => Ok(Radius { num, den }),
            _ => Err(Error::Overflow("radius denominator")),
        }
    }

    pub fn from_q(x: &Q) -> Result<Radius> {
        match (x.numer().to_u64(), x.denom().to_u64()) {
            (Some(n), Some(d)) => Radius::new(n, d),
            _ => Err(Error::InvalidArgument(format!("radius {x} not representable"))),
        }
    }

    pub fn num(&self) -> u32 {
        self.num
    }

    pub fn den(&self) -> u32 {
        self.den
    }

    pub fn to_q(&self) -> Q {
        q(self.num as i64, self.den as i64)
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl Ord for Radius {
    fn cmp(&self, other: &Radius) -> Ordering {
        (self.num as u64 * other.den as u64).cmp(&(other.num as u64 * self.den as u64))
    }
}

impl PartialOrd for Radius {
    fn partial_cmp(&self, other: &Radius) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Radius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl Serialize for Radius {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BohrSpec {
    /// Frequencies as character indices.
    pub gamma: Vec<usize>,
    pub radii: Vec<Radius>,
}

impl BohrSpec {
    pub fn new(gamma: Vec<usize>, radii: Vec<Radius>) -> Result<BohrSpec> {
        if gamma.len() != radii.len() {
            return Err(Error::ShapeMismatch {
                expected: gamma.len(),
                found: radii.len(),
            });
        }
        Ok(BohrSpec { gamma, radii })
    }

    /// Every frequency with the same radius.
    pub fn uniform(gamma: Vec<usize>, radius: Radius) -> BohrSpec {
        let radii = vec![radius; gamma.len()];
        BohrSpec { gamma, radii }
    }

    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    /// `B_ρ`: every radius multiplied by `rho`.
    pub fn dilate(&self, rho: &Q) -> Result<BohrSpec> {
        let radii = self
            .radii
            .iter()
            .map(|r| Radius::from_q(&(r.to_q() * rho)))
            .collect::<Result<Vec<_>>>()?;
        Ok(BohrSpec {
            gamma: self.gamma.clone(),
            radii,
        })
    }

    /// Frequencies of both, with the smaller radius on shared frequencies.
    pub fn intersect(&self, other: &BohrSpec) -> BohrSpec {
        let mut gamma = self.gamma.clone();
        let mut radii = self.radii.clone();
        for (&g, &r) in other.gamma.iter().zip(&other.radii) {
            match gamma.iter().position(|&h| h == g) {
                Some(i) => radii[i] = radii[i].min(r),
                None => {
                    gamma.push(g);
                    radii.push(r);
                }
            }
        }
        BohrSpec { gamma, radii }
    }

    fn validate(&self, group: &Group) -> Result<()> {
        if group.order() > MAX_MEMBERSHIP_ORDER {
            return Err(Error::SizeLimit {
                what: "Bohr set materialization",
                limit: MAX_MEMBERSHIP_ORDER,
                actual: group.order(),
            });
        }
        if let Some(&g) = self.gamma.iter().find(|&&g| g >= group.order()) {
            return Err(Error::IndexOutOfRange {
                index: g,
                order: group.order(),
            });
        }
        Ok(())
    }
}

/// `x ∈ B(Γ, ε)`, exactly.
pub fn contains(group: &Group, spec: &BohrSpec, x: usize) -> bool {
    let l = group.exponent() as u128;
    spec.gamma.iter().zip(&spec.radii).all(|(&g, r)| {
        let p = group.phase_num(g, x) as u128;
        let dist = p.min(l - p);
        dist * (r.den as u128) < (r.num as u128) * l
    })
}

/// For each element, the smallest dilation factor `s` with `x ∈ B(Γ, s ε)`
/// strictly excluded: `x ∈ B(Γ, s ε)` iff `scale(x) < s`. Scales are kept as
/// exact fractions and sorted, so the size of any dilate is a binary search.
#[derive(Clone, Debug)]
pub struct BohrProfile {
    group: Group,
    spec: BohrSpec,
    scale: Vec<(u64, u64)>,
    sorted: Vec<(u64, u64)>,
}

fn frac_cmp(a: (u64, u64), b: (u64, u64)) -> Ordering {
    (a.0 as u128 * b.1 as u128).cmp(&(b.0 as u128 * a.1 as u128))
}

impl BohrProfile {
    pub fn new(group: &Group, spec: &BohrSpec) -> Result<BohrProfile> {
        spec.validate(group)?;
        let l = group.exponent();
        let scale: Vec<(u64, u64)> = (0..group.order())
            .map(|x| {
                let mut best = (0u64, 1u64);
                for (&g, r) in spec.gamma.iter().zip(&spec.radii) {
                    let p = group.phase_num(g, x);
                    let dist = p.min(l - p);
                    // ‖γx‖ / ε_j = dist·den / (L·num)
                    let cand = (dist * r.den as u64, l * r.num as u64);
                    if frac_cmp(cand, best) == Ordering::Greater {
                        best = cand;
                    }
                }
                best
            })
            .collect();
        let mut sorted = scale.clone();
        sorted.sort_by(|&a, &b| frac_cmp(a, b));
        Ok(BohrProfile {
            group: group.clone(),
            spec: spec.clone(),
            scale,
            sorted,
        })
    }

    pub fn spec(&self) -> &BohrSpec {
        &self.spec
    }

    fn below(&self, s: &Q, v: (u64, u64)) -> bool {
        // v.0 / v.1 < s
        match (s.numer().to_u64(), s.denom().to_u64()) {
            (Some(n), Some(d)) => (v.0 as u128 * d as u128) < ((n as u128) * (v.1 as u128)),
            _ => BigInt::from(v.0) * s.denom() < s.numer() * BigInt::from(v.1),
        }
    }

    /// `|B(Γ, s ε)|`.
    pub fn count(&self, s: &Q) -> usize {
        self.sorted.partition_point(|&v| self.below(s, v))
    }

    /// Members of `B(Γ, s ε)`.
    pub fn members(&self, s: &Q) -> GroupSet {
        GroupSet::new(
            self.group.clone(),
            (0..self.scale.len()).filter(|&x| self.below(s, self.scale[x])),
        )
        .expect("profile group is materializable")
    }

    /// Regularity of `B(Γ, s ε)` on the default η-grid.
    pub fn regularity_at(&self, s: &Q) -> RegularityVerdict {
        regularity_on_grid(self, s, &default_eta_grid(self.spec.dim()))
    }
}

/// `η = ±i / (1000 d)` for `i = 1..=10`.
pub fn default_eta_grid(d: usize) -> Vec<Q> {
    if d == 0 {
        return Vec::new();
    }
    let den = 1000 * d as i64;
    (1..=10).flat_map(|i| [q(i, den), q(-i, den)]).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegularityVerdict {
    pub regular: bool,
    /// Smallest relative slack over the grid; positive iff regular.
    pub worst_margin: f64,
    pub grid_points: usize,
    /// Largest `|η|` tested.
    pub resolution: String,
    /// Grid evidence is not a proof over all η.
    pub evidence_only: bool,
}

fn regularity_on_grid(p: &BohrProfile, s: &Q, etas: &[Q]) -> RegularityVerdict {
    let d = p.spec.dim();
    if d == 0 {
        return RegularityVerdict {
            regular: true,
            worst_margin: f64::INFINITY,
            grid_points: 0,
            resolution: "0".into(),
            evidence_only: false,
        };
    }
    let base = p.count(s) as f64;
    let base_q = Q::from_integer(BigInt::from(p.count(s)));
    let dq = Q::from_integer(BigInt::from(100 * d));
    let mut regular = true;
    let mut worst = f64::INFINITY;
    let mut res = Q::from_integer(0.into());
    for eta in etas {
        let width = &dq * eta.abs();
        if width > Q::one() {
            continue;
        }
        let size = p.count(&(s * (Q::one() + eta)));
        let sq = Q::from_integer(BigInt::from(size));
        let lo = (Q::one() - &width) * &base_q;
        let hi = (Q::one() + &width) * &base_q;
        let ok = lo < sq && sq < hi;
        regular &= ok;
        let w = crate::exact::to_f64(&width) * base;
        let slack = if w > 0.0 {
            (w - (size as f64 - base).abs()) / w
        } else {
            0.0
        };
        worst = worst.min(slack);
        if eta.abs() > res {
            res = eta.abs();
        }
    }
    RegularityVerdict {
        regular,
        worst_margin: worst,
        grid_points: etas.len(),
        resolution: res.to_string(),
        evidence_only: true,
    }
}

/// Regularity of `B(Γ, ε)` on a caller-supplied η-grid; η with
/// `100 d |η| > 1` are skipped.
pub fn regularity_test(group: &Group, spec: &BohrSpec, etas: &[Q]) -> Result<RegularityVerdict> {
    let p = BohrProfile::new(group, spec)?;
    Ok(regularity_on_grid(&p, &Q::one(), etas))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BohrSet {
    pub spec: BohrSpec,
    pub members: GroupSet,
    pub regularity: RegularityVerdict,
}

impl BohrSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Enumerates `B(Γ, ε)` and tests its regularity on the default grid.
pub fn materialize(group: &Group, spec: &BohrSpec) -> Result<BohrSet> {
    let p = BohrProfile::new(group, spec)?;
    Ok(materialize_from_profile(&p, &Q::one()))
}

/// `B(Γ, s ε)` from a profile, with its regularity verdict. The returned
/// spec carries the scaled radii when they are representable.
pub fn materialize_from_profile(p: &BohrProfile, s: &Q) -> BohrSet {
    let spec = p.spec.dilate(s).unwrap_or_else(|_| p.spec.clone());
    BohrSet {
        spec,
        members: p.members(s),
        regularity: p.regularity_at(s),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegularSearch {
    pub spec: BohrSpec,
    /// `ε₁ = scale · ε`.
    pub scale: String,
    pub size: usize,
    pub verdict: RegularityVerdict,
    /// 0 on the base grid, 1 or 2 after densification.
    pub densified: u32,
    pub candidates_tried: usize,
}

pub const RADIUS_GRID: usize = 256;

/// Denominator used for candidate scales: at most `2^20`, reduced so the
/// scaled radii stay representable.
fn scale_denominator(spec: &BohrSpec) -> u64 {
    let max_den = spec.radii.iter().map(|r| r.den as u64).max().unwrap_or(1);
    let mut m = 20;
    while m > 4 && (1u64 << m) * max_den > u32::MAX as u64 {
        m -= 1;
    }
    1 << m
}

/// Candidate scales in `(1/2, 1)`, geometric, largest first.
fn candidate_scales(points: usize, den: u64) -> Vec<Q> {
    let mut out: Vec<Q> = Vec::new();
    for i in 1..=points {
        let s = 2f64.powf(-(i as f64) / (points as f64 + 1.0));
        let n = (s * den as f64).floor() as u64;
        let c = q(n as i64, den as i64);
        if 2 * n > den && n < den && out.last() != Some(&c) {
            out.push(c);
        }
    }
    out
}

/// Searches `ε₁ ∈ (ε/2, ε)` with `B(Γ, ε₁)` regular on the η-grid, over a
/// geometric grid of 256 scales, densified ×4 up to twice.
pub fn find_regular_radius(group: &Group, spec: &BohrSpec) -> Result<RegularSearch> {
    let p = BohrProfile::new(group, spec)?;
    let den = scale_denominator(spec);
    let mut tried = 0;
    let mut trace = Vec::new();
    for level in 0..=2u32 {
        let points = RADIUS_GRID * 4usize.pow(level);
        for s in candidate_scales(points, den) {
            tried += 1;
            let verdict = p.regularity_at(&s);
            if verdict.regular {
                let spec1 = spec.dilate(&s)?;
                return Ok(RegularSearch {
                    spec: spec1,
                    scale: s.to_string(),
                    size: p.count(&s),
                    verdict,
                    densified: level,
                    candidates_tried: tried,
                });
            }
            if level == 2 && trace.len() < 64 {
                trace.push(format!("{s}:{}", p.count(&s)));
            }
        }
    }
    Err(Error::RegularRadiusNotFound {
        trace: trace.join(" "),
    })
}

/// `|B(Γ, ε)| >= (N/2) ∏ ε_j`.
pub fn check_size_lower_bound(group: &Group, spec: &BohrSpec, size: usize) -> CheckRecord {
    let mut prod = Q::from_integer(BigInt::from(group.order())) / Q::from_integer(2.into());
    for r in &spec.radii {
        prod *= r.to_q();
    }
    CheckRecord::at_least(
        "bohr-size-lower-bound",
        "bohr-size-lower-bound",
        &Q::from_integer(BigInt::from(size)),
        &prod,
        false,
    )
}

/// `|B(Γ, ε)| <= 8^{d+1} |B(Γ, ε/2)|`.
pub fn check_doubling_bound(p: &BohrProfile) -> CheckRecord {
    let full = p.count(&Q::one());
    let half = p.count(&q(1, 2));
    let factor = BigUint::from(8u32).pow(p.spec.dim() as u32 + 1);
    CheckRecord::at_most(
        "bohr-halving-bound",
        "bohr-halving-bound",
        &Q::from_integer(BigInt::from(full)),
        &qu(&(factor * BigUint::from(half))),
        false,
    )
}

/// `|∧ B⁽ⁱ⁾| >= N ∏ (|B⁽ⁱ⁾_{1/2}| / N)` for an arbitrary sequence of specs.
pub fn check_intersection_bound(group: &Group, specs: &[BohrSpec]) -> Result<CheckRecord> {
    let n = BigUint::from(group.order());
    let mut meet = BohrSpec::uniform(Vec::new(), Radius::new(1, 1)?);
    let mut rhs = qu(&n);
    for s in specs {
        meet = meet.intersect(s);
        let half = BohrProfile::new(group, s)?.count(&q(1, 2));
        rhs = rhs * qu(&BigUint::from(half)) / qu(&n);
    }
    let size = BohrProfile::new(group, &meet)?.count(&Q::one());
    Ok(CheckRecord::at_least(
        "bohr-intersection-bound",
        "bohr-intersection-lower-bound",
        &Q::from_integer(BigInt::from(size)),
        &rhs,
        false,
    ))
}

/// The three size checks for one spec; the intersection bound is applied to
/// its one-dimensional constituents.
pub fn check_size_bounds(group: &Group, spec: &BohrSpec) -> Result<Vec<CheckRecord>> {
    let p = BohrProfile::new(group, spec)?;
    let constituents: Vec<BohrSpec> = spec
        .gamma
        .iter()
        .zip(&spec.radii)
        .map(|(&g, &r)| BohrSpec::uniform(vec![g], r))
        .collect();
    Ok(vec![
        check_size_lower_bound(group, spec, p.count(&Q::one())),
        check_doubling_bound(&p),
        check_intersection_bound(group, &constituents)?,
    ])
}

/// Parses a frequency list: `;`-separated elements, or `,`-separated
/// residues on cyclic groups.
pub fn parse_gamma(group: &Group, s: &str) -> Result<Vec<usize>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    if s.contains(';') || group.rank() > 1 {
        s.split(';').map(|e| group.parse_element(e.trim())).collect()
    } else {
        s.split(',').map(|e| group.parse_element(e.trim())).collect()
    }
}

/// Parses `1/4,1/3`.
pub fn parse_radii(s: &str) -> Result<Vec<Radius>> {
    s.split(',')
        .map(|r| Radius::from_q(&crate::exact::parse_q(r)?))
        .collect()
}
