use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use super::f2::{parity, F2Subspace};
use super::params::{check_hypotheses, StructureParams};
use crate::bohr::{self, BohrSet, BohrSpec, Radius};
use crate::check::CheckRecord;
use crate::error::{Error, Result};
use crate::exact::{floor_with_den, q, qi, qu, to_f64, Q};
use crate::harmonic::{self, FunctionTable, Values};
use crate::set::GroupSet;
use crate::setstat::{self, SliceHistogram};
use crate::spectral::{self, DissociatedWitness};

use super::params::PairStats;

/// Relative band around the jump threshold inside which the exact
/// comparison decides.
const JUMP_SCREEN: f64 = 1e-9;
/// Denominator used to round the Bohr radius down.
const RADIUS_DEN: u64 = 1 << 20;
/// Number of times `c_local` is halved after a failed Bohr certificate.
pub const C_LOCAL_RETRIES: u32 = 3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyJump {
    pub k: u32,
    pub k0: u32,
    pub e_k: String,
    pub e_k1: String,
    pub m_star: String,
    /// `E_{j+1} / (|B| E_j)` for `j = 2..=k`, in floating point.
    pub ratios: Vec<f64>,
}

/// Float ratios `E_{j+1} / E_j` for `j = 2..=k_max`, computed from the
/// histogram with the largest slice factored out.
fn energy_ratios(hist: &SliceHistogram, k_max: u32) -> Vec<f64> {
    let smax = hist.counts.keys().next_back().copied().unwrap_or(1) as f64;
    let terms: Vec<(f64, f64)> = hist.counts.iter().map(|(&s, &c)| (s as f64 / smax, c as f64)).collect();
    let mut pows: Vec<f64> = terms.iter().map(|&(r, _)| r * r).collect();
    let mut out = Vec::new();
    for _ in 2..=k_max {
        let ek: f64 = pows.iter().zip(&terms).map(|(p, &(_, c))| p * c).sum();
        let ek1: f64 = pows.iter().zip(&terms).map(|(p, &(r, c))| p * r * c).sum();
        out.push(smax * ek1 / ek);
        for (p, &(r, _)) in pows.iter_mut().zip(&terms) {
            *p *= r;
        }
    }
    out
}

/// Smallest `k ∈ [2, k0]` with `E_{k+1} M_* >= |B| E_k`. Candidates are
/// screened in floating point and every decision near the threshold, and
/// the returned jump itself, is made in exact arithmetic.
pub fn find_energy_jump(b: &GroupSet, p: &StructureParams) -> Result<EnergyJump> {
    if b.is_empty() {
        return Err(Error::EmptySet);
    }
    let hist = SliceHistogram::new(b)?;
    let m_star = p.m_star();
    let k0 = p.k0().max(2);
    let ratios = energy_ratios(&hist, k0);
    let target = b.len() as f64 / to_f64(&m_star);
    let bsize = BigUint::from(b.len());
    let exact_jump = |k: u32| -> (BigUint, BigUint, bool) {
        let ek = hist.energy(k);
        let ek1 = hist.energy(k + 1);
        let lhs = qu(&ek1) * &m_star;
        let rhs = qu(&(&bsize * &ek));
        let holds = lhs >= rhs;
        (ek, ek1, holds)
    };
    for (i, &r) in ratios.iter().enumerate() {
        let k = i as u32 + 2;
        if r < target * (1.0 - JUMP_SCREEN) {
            continue;
        }
        let (ek, ek1, holds) = exact_jump(k);
        if holds {
            return Ok(EnergyJump {
                k,
                k0,
                e_k: ek.to_string(),
                e_k1: ek1.to_string(),
                m_star: m_star.to_string(),
                ratios: ratios[..=i].iter().map(|x| x / b.len() as f64).collect(),
            });
        }
    }
    let mut energies: Vec<String> = (2..=k0.min(8)).map(|k| format!("E_{k}={}", hist.energy(k))).collect();
    energies.extend(
        ratios
            .iter()
            .enumerate()
            .take(32)
            .map(|(i, r)| format!("E_{}/E_{}={r:.6e}", i + 3, i + 2)),
    );
    Err(Error::NoJump { k0, energies })
}

/// `φ(x) = |B_x|^k`.
#[derive(Clone, Debug)]
pub struct PhiTable {
    pub table: FunctionTable,
    /// Values were divided by `(max |B_x|)^k` to stay in floating range;
    /// spectra are unaffected by the scaling.
    pub scaled: bool,
}

/// Integer table when `N · max|B_x|^k` fits comfortably in `i128`,
/// otherwise a scaled real table.
pub fn phi_k(b: &GroupSet, k: u32) -> Result<PhiTable> {
    let sizes = setstat::slice_sizes(b)?;
    let smax = sizes.iter().copied().max().unwrap_or(0);
    let n = sizes.len() as f64;
    let bits = (smax.max(1) as f64).log2() * k as f64 + n.log2();
    let g = b.group().clone();
    if bits < 120.0 {
        let vals: Vec<i128> = sizes.iter().map(|&s| (s as i128).pow(k)).collect();
        return Ok(PhiTable {
            table: FunctionTable::from_int(g, vals)?,
            scaled: false,
        });
    }
    let m = smax as f64;
    let vals: Vec<f64> = sizes.iter().map(|&s| (s as f64 / m).powi(k as i32)).collect();
    Ok(PhiTable {
        table: FunctionTable::from_real(g, vals)?,
        scaled: true,
    })
}

/// Everything computed before the structured set is chosen.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralStage {
    pub jump: EnergyJump,
    pub spectrum_size: usize,
    pub borderline: usize,
    pub spectrum_exact: bool,
    pub lambda: DissociatedWitness,
    pub checks: Vec<CheckRecord>,
    pub diagnostics: Vec<CheckRecord>,
}

fn phi_checks(phi: &PhiTable, fhat: &FunctionTable, e_k: &str) -> Vec<CheckRecord> {
    let mut out = Vec::new();
    match (fhat.values(), phi.table.norm1_exact()) {
        (Values::Int(v), Some(n1)) => {
            let neg = v.iter().position(|&x| x < 0);
            out.push(CheckRecord::boolean(
                "phi-transform-nonnegative",
                "phi-transform-nonnegative",
                neg.is_none(),
                &match neg {
                    Some(i) => format!("negative at character {i}"),
                    None => "all coefficients >= 0".into(),
                },
            ));
            let ek: u128 = e_k.parse().unwrap_or(u128::MAX);
            out.push(CheckRecord::boolean(
                "phi-norm-equals-energy",
                "phi-norm-energy-identity",
                n1 as u128 == ek && v[0] == n1,
                &format!("{n1} vs {e_k}"),
            ));
        }
        _ => {
            let n1 = phi.table.norm1();
            let tol = 1e-9 * n1;
            let worst = (0..fhat.len()).map(|i| fhat.get(i).re).fold(f64::INFINITY, f64::min);
            let imag = (0..fhat.len()).map(|i| fhat.get(i).im.abs()).fold(0.0, f64::max);
            out.push(CheckRecord::boolean(
                "phi-transform-nonnegative",
                "phi-transform-nonnegative",
                worst >= -tol && imag <= tol,
                &format!("min real part {worst:.3e}, max imaginary part {imag:.3e}"),
            ));
            if !phi.scaled {
                let ek: f64 = e_k.parse().unwrap_or(f64::NAN);
                out.push(CheckRecord::boolean(
                    "phi-norm-equals-energy",
                    "phi-norm-energy-identity",
                    (n1 - ek).abs() <= 1e-9 * ek,
                    &format!("{n1} vs {e_k}"),
                ));
            }
        }
    }
    out
}

/// Energy jump, `φ`, its spectrum and a maximal dissociated subset.
pub fn spectral_stage(b: &GroupSet, p: &StructureParams) -> Result<SpectralStage> {
    let jump = find_energy_jump(b, p)?;
    let phi = phi_k(b, jump.k)?;
    let fhat = harmonic::dft(&phi.table)?;
    let mut checks = phi_checks(&phi, &fhat, &jump.e_k);
    let m_star = p.m_star();
    let eps = &p.zeta / &m_star;
    let spec = spectral::spectrum_of_transform(&fhat, phi.table.norm1_exact(), phi.table.norm1(), &eps)?;
    let chars = spec.characters();
    let weights: Vec<f64> = spec.members.iter().map(|m| m.magnitude).collect();
    let lambda = spectral::max_dissociated(b.group(), &chars, Some(&weights))?;
    let g = b.group();
    if g.order() <= 1 << 20 {
        let sp = spectral::span(g, &lambda.members)?;
        let outside = chars.iter().find(|&&c| !sp.contains(c));
        checks.push(CheckRecord::boolean(
            "spectrum-inside-span",
            "spectrum-covered-by-span",
            outside.is_none(),
            &match outside {
                Some(c) => format!("character {c} outside the span"),
                None => format!("{} characters covered", chars.len()),
            },
        ));
    }
    // Chang-type dimension bounds; constants are unspecified so these are
    // reported only.
    let n = g.order() as f64;
    let l1 = phi.table.norm1();
    let log_term = (phi.table.norm2_sq() * n / (l1 * l1)).ln().max(0.0);
    let c = to_f64(&p.c_chang);
    let inv = to_f64(&(&m_star / &p.zeta));
    let d = lambda.members.len() as f64;
    let mut diagnostics = vec![CheckRecord::at_most_f64(
        "dimension-vs-chang-bound",
        "dimension-bound-via-chang",
        d,
        (c * inv * inv * log_term).max(1.0),
        0.0,
    )
    .diagnostic()];
    let mk = to_f64(&(&p.m + &p.kappa));
    let omega = to_f64(&p.omega);
    let t = to_f64(&p.t);
    let stats_term = (to_f64(&p.t_ceiling()).ln() / t.ln()).max(0.0) * (mk / omega).ln().max(0.0);
    let prefactor = (t * mk / (omega * to_f64(&p.zeta))).powi(2);
    diagnostics.push(
        CheckRecord::at_most_f64(
            "dimension-vs-parameter-bound",
            "dimension-bound-in-parameters",
            d,
            c * prefactor * stats_term.max(1.0),
            0.0,
        )
        .diagnostic(),
    );
    Ok(SpectralStage {
        jump,
        spectrum_size: spec.len(),
        borderline: spec.members.iter().filter(|m| m.borderline).count(),
        spectrum_exact: spec.exact,
        lambda,
        checks,
        diagnostics,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubspacePiece {
    /// The annihilator of `Λ`.
    pub subspace: GroupSet,
    pub codim: usize,
    pub translate: usize,
    /// `|B ∩ (ℒ + z)|` by direct count.
    pub hits: usize,
    /// `hits / |ℒ|`.
    pub density: String,
    /// `(1 - ζ) ω |ℒ| / (T (M + κ))`.
    pub guaranteed: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BohrPiece {
    pub bohr: BohrSet,
    pub dim: usize,
    pub translate: usize,
    /// `|B ∩ (B_* + z)|` by direct count.
    pub hits: usize,
    pub density: String,
    /// `(1 - 2ζ) ω |B_*| / (T (M + κ))`.
    pub guaranteed: String,
    /// `|B_*| / N`.
    pub size_ratio: f64,
    /// `ρ` before regularization.
    pub base_radius: String,
    /// `ε₁ / ρ` chosen by the regular-radius search.
    pub scale: String,
    pub c_local: String,
    pub retries: u32,
    pub densified: u32,
    pub candidates_tried: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Piece {
    LargeCoefficient {
        character: usize,
        value_sq: String,
        bound: String,
    },
    Subspace(SubspacePiece),
    Bohr(BohrPiece),
}

impl Piece {
    /// `(|piece|, hits)` for structured pieces.
    pub fn size_and_hits(&self) -> Option<(usize, usize)> {
        match self {
            Piece::LargeCoefficient { .. } => None,
            Piece::Subspace(s) => Some((s.subspace.len(), s.hits)),
            Piece::Bohr(b) => Some((b.bohr.len(), b.hits)),
        }
    }

    pub fn translate(&self) -> Option<usize> {
        match self {
            Piece::LargeCoefficient { .. } => None,
            Piece::Subspace(s) => Some(s.translate),
            Piece::Bohr(b) => Some(b.translate),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InclusionReport {
    /// Members of the structured set checked against `A - A`.
    pub checked: usize,
    pub failures: usize,
    /// Dilate `t` and index `j` of the two-dilate selection (general groups).
    pub t: Option<u64>,
    pub j: Option<u64>,
    /// Translate maximizing the two-dilate count.
    pub translate: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CosetDecomposition {
    /// Smallest member of `A` in each heavy coset.
    pub representatives: Vec<usize>,
    pub subspace_size: usize,
    /// `A_* = A ∩ (Λ ⊕ ℒ)`.
    pub a_star: GroupSet,
    pub checks: Vec<CheckRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StructureResult {
    pub operation: String,
    pub params: Option<StructureParams>,
    pub hypotheses: Option<super::params::HypothesisReport>,
    pub stage: Option<SpectralStage>,
    pub piece: Piece,
    /// Asserted bounds, all verified before return.
    pub certificates: Vec<CheckRecord>,
    pub diagnostics: Vec<CheckRecord>,
    pub inclusion: Option<InclusionReport>,
    pub decomposition: Option<CosetDecomposition>,
}

impl StructureResult {
    pub(crate) fn new(operation: &str, piece: Piece) -> StructureResult {
        StructureResult {
            operation: operation.to_string(),
            params: None,
            hypotheses: None,
            stage: None,
            piece,
            certificates: Vec::new(),
            diagnostics: Vec::new(),
            inclusion: None,
            decomposition: None,
        }
    }

    pub fn is_large_coefficient(&self) -> bool {
        matches!(self.piece, Piece::LargeCoefficient { .. })
    }

    pub fn failures(&self) -> Vec<&CheckRecord> {
        self.certificates.iter().filter(|c| c.is_failure()).collect()
    }
}

pub(crate) fn ensure_certificates(checks: &[CheckRecord]) -> Result<()> {
    match checks.iter().find(|c| c.is_failure()) {
        Some(c) => Err(Error::Precision(format!(
            "certificate {} failed: {} vs {}",
            c.name, c.lhs, c.rhs
        ))),
        None => Ok(()),
    }
}

fn guarantee(p: &StructureParams, loss: &Q, size: usize) -> Q {
    (Q::one() - loss) * &p.omega * qi(size as u64) / (&p.t * (&p.m + &p.kappa))
}

/// `ℒ = Λ^⊥` and the translate maximizing `|B ∩ (ℒ + z)|`, ties broken by
/// the smallest member of `B` in the coset.
pub(crate) fn densest_annihilator_coset(b: &GroupSet, lambda: &[usize]) -> Result<(F2Subspace, usize, usize)> {
    let g = b.group();
    let n = g.rank() as u32;
    let ann = F2Subspace::annihilator(n, lambda);
    let syndrome = |x: usize| -> usize {
        lambda
            .iter()
            .enumerate()
            .fold(0usize, |s, (i, &l)| s | ((parity(l & x) as usize) << i))
    };
    let mut counts: std::collections::HashMap<usize, (usize, usize)> = std::collections::HashMap::new();
    for x in b.iter() {
        let e = counts.entry(syndrome(x)).or_insert((0, x));
        e.0 += 1;
    }
    let (_, &(hits, z)) = counts
        .iter()
        .max_by(|(_, a), (_, c)| a.0.cmp(&c.0).then(c.1.cmp(&a.1)))
        .ok_or(Error::EmptySet)?;
    Ok((ann, z, hits))
}

/// Subspace extraction without the hypothesis gate. The density
/// certificate is verified by direct count; it is guaranteed whenever a
/// jump exists and `Λ` is maximal.
pub fn extract_subspace_unchecked(b: &GroupSet, p: &StructureParams) -> Result<StructureResult> {
    let g = b.group();
    if !g.is_boolean() {
        return Err(Error::NotBoolean);
    }
    let stage = spectral_stage(b, p)?;
    let lambda = stage.lambda.members.clone();
    let (ann, z, hits) = densest_annihilator_coset(b, &lambda)?;
    let subspace = ann.to_set(g)?;
    let direct = b.intersection_len(&subspace.translate(z));
    let required = guarantee(p, &p.zeta, subspace.len());
    let mut certificates = stage.checks.clone();
    certificates.push(CheckRecord::boolean(
        "coset-count-recomputed",
        "pigeonhole-translate",
        direct == hits,
        &format!("{direct} vs {hits}"),
    ));
    certificates.push(CheckRecord::at_least(
        "subspace-density-guarantee",
        "subspace-density-guarantee",
        &qi(direct as u64),
        &required,
        false,
    ));
    let diagnostics = stage.diagnostics.clone();
    if direct == hits && qi(hits as u64) < required {
        return Err(Error::DensityGuaranteeFailed {
            hits,
            required: required.to_string(),
            detail: format!(
                "k = {}, |Λ| = {}, mode {:?}, |ℒ| = {}",
                stage.jump.k,
                lambda.len(),
                stage.lambda.mode,
                subspace.len()
            ),
        });
    }
    ensure_certificates(&certificates)?;
    let piece = Piece::Subspace(SubspacePiece {
        codim: lambda.len(),
        density: q(hits as i64, subspace.len() as i64).to_string(),
        subspace,
        translate: z,
        hits,
        guaranteed: required.to_string(),
    });
    let mut r = StructureResult::new("extract_subspace", piece);
    r.params = Some(p.clone());
    r.stage = Some(stage);
    r.certificates = certificates;
    r.diagnostics = diagnostics;
    Ok(r)
}

fn gated(a: &GroupSet, b: &GroupSet, p: &StructureParams, zeta_limit: &Q) -> Result<super::params::HypothesisReport> {
    let stats = PairStats::new(a, b)?;
    let report = check_hypotheses(&stats, p, zeta_limit);
    if !report.passed {
        return Err(Error::HypothesisFailed(report.failures()));
    }
    Ok(report)
}

/// Subspace extraction on `F2^n`: energy jump, spectrum of `φ`, maximal
/// dissociated `Λ`, annihilator `ℒ` and the densest coset.
pub fn extract_subspace(a: &GroupSet, b: &GroupSet, p: &StructureParams) -> Result<StructureResult> {
    if !a.group().is_boolean() {
        return Err(Error::NotBoolean);
    }
    let report = gated(a, b, p, &Q::one())?;
    let mut r = extract_subspace_unchecked(b, p)?;
    r.hypotheses = Some(report);
    Ok(r)
}

/// Argmax of `|B ∩ (S + z)|` over `z`, smallest index on ties.
pub(crate) fn best_translate(b: &GroupSet, s: &GroupSet) -> Result<(usize, usize)> {
    let r = setstat::difference_counts(b, s)?;
    let mut best = (0usize, 0u64);
    for (z, &c) in r.iter().enumerate() {
        if c > best.1 {
            best = (z, c);
        }
    }
    Ok((best.0, best.1 as usize))
}

/// Bohr extraction without the hypothesis gate.
pub fn extract_bohr_unchecked(b: &GroupSet, p: &StructureParams) -> Result<StructureResult> {
    let g = b.group();
    let stage = spectral_stage(b, p)?;
    let lambda = stage.lambda.members.clone();
    let m_star = p.m_star();
    let d = lambda.len().max(1);
    let mut c_local = p.c_local.clone();
    let mut last_failure = None;
    for retry in 0..=C_LOCAL_RETRIES {
        let rho_exact = &c_local * &p.zeta / (&m_star * qi(d as u64));
        let rho = floor_with_den(&rho_exact.clone().min(Q::one()), RADIUS_DEN);
        if rho.is_zero() {
            return Err(Error::InvalidArgument(format!("Bohr radius {rho_exact} underflows")));
        }
        let base = BohrSpec::uniform(lambda.clone(), Radius::from_q(&rho)?);
        let search = bohr::find_regular_radius(g, &base)?;
        let bstar = bohr::materialize(g, &search.spec)?;
        let (z, hits) = best_translate(b, &bstar.members)?;
        let direct = b.intersection_len(&bstar.members.translate(z));
        let required = guarantee(p, &(qi(2) * &p.zeta), bstar.len());
        let mut certificates = stage.checks.clone();
        certificates.push(CheckRecord::boolean(
            "translate-count-recomputed",
            "pigeonhole-translate",
            direct == hits,
            &format!("{direct} vs {hits}"),
        ));
        certificates.push(CheckRecord::boolean(
            "bohr-set-regular",
            "regular-bohr-set",
            bstar.regularity.regular,
            &format!("worst margin {}", bstar.regularity.worst_margin),
        ));
        let density_check = CheckRecord::at_least(
            "bohr-density-guarantee",
            "bohr-density-guarantee",
            &qi(direct as u64),
            &required,
            false,
        );
        if !density_check.holds {
            last_failure = Some(Error::DensityGuaranteeFailed {
                hits: direct,
                required: required.to_string(),
                detail: format!(
                    "k = {}, |Λ| = {}, mode {:?}, c_local = {c_local}, retries = {retry}",
                    stage.jump.k,
                    lambda.len(),
                    stage.lambda.mode
                ),
            });
            c_local /= qi(2);
            continue;
        }
        certificates.push(density_check);
        ensure_certificates(&certificates)?;
        let mut diagnostics = stage.diagnostics.clone();
        diagnostics.extend(bohr::check_size_bounds(g, &bstar.spec)?.into_iter().map(CheckRecord::diagnostic));
        let size = bstar.len();
        let piece = Piece::Bohr(BohrPiece {
            dim: lambda.len(),
            translate: z,
            hits,
            density: q(hits as i64, size as i64).to_string(),
            guaranteed: required.to_string(),
            size_ratio: size as f64 / g.order() as f64,
            base_radius: rho.to_string(),
            scale: search.scale.clone(),
            c_local: c_local.to_string(),
            retries: retry,
            densified: search.densified,
            candidates_tried: search.candidates_tried,
            bohr: bstar,
        });
        let mut r = StructureResult::new("extract_bohr", piece);
        r.params = Some(p.clone());
        r.stage = Some(stage);
        r.certificates = certificates;
        r.diagnostics = diagnostics;
        return Ok(r);
    }
    Err(last_failure.expect("at least one attempt was made"))
}

/// Bohr-set extraction on any group: the spectral stage as for subspaces,
/// then a regular `B_* = B(Λ, ε₁)` with `ε₁` near `c_local ζ / (M_* |Λ|)` and
/// the densest translate.
pub fn extract_bohr(a: &GroupSet, b: &GroupSet, p: &StructureParams) -> Result<StructureResult> {
    let report = gated(a, b, p, &q(1, 2))?;
    let mut r = extract_bohr_unchecked(b, p)?;
    r.hypotheses = Some(report);
    Ok(r)
}

/// Parameter-free entry point: derives defaults, applies overrides and
/// dispatches on the group.
pub fn extract(
    a: &GroupSet,
    b: &GroupSet,
    overrides: &super::params::ParamOverrides,
    mode: ExtractMode,
) -> Result<StructureResult> {
    let stats = PairStats::new(a, b)?;
    let p = super::params::derive_params(&stats, overrides)?;
    let use_subspace = match mode {
        ExtractMode::Subspace => true,
        ExtractMode::Bohr => false,
        ExtractMode::Auto => a.group().is_boolean(),
    };
    if use_subspace {
        extract_subspace(a, b, &p)
    } else {
        extract_bohr(a, b, &p)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ExtractMode {
    Subspace,
    Bohr,
    Auto,
}

impl std::str::FromStr for ExtractMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<ExtractMode> {
        match s {
            "subspace" => Ok(ExtractMode::Subspace),
            "bohr" => Ok(ExtractMode::Bohr),
            "auto" => Ok(ExtractMode::Auto),
            _ => Err(Error::Parse(format!("unknown mode {s:?}"))),
        }
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::Group;
    use crate::structure::params::{derive_params, ParamOverrides};
    use num_traits::ToPrimitive;

    fn subgroup(n: usize, dim: usize) -> GroupSet {
        GroupSet::new(Group::boolean(n).unwrap(), 0..1usize << dim).unwrap()
    }

    #[test]
    fn subgroup_jumps_at_two() {
        let h = subgroup(8, 3);
        let s = PairStats::new(&h, &h).unwrap();
        let p = derive_params(&s, &ParamOverrides::default()).unwrap();
        let j = find_energy_jump(&h, &p).unwrap();
        assert_eq!(j.k, 2);
        assert_eq!(j.e_k, (8u64.pow(3)).to_string());
    }

    #[test]
    fn phi_of_subgroup() {
        let h = subgroup(6, 2);
        let phi = phi_k(&h, 3).unwrap();
        let v = phi.table.as_int().unwrap();
        for x in 0..64 {
            assert_eq!(v[x], if x < 4 { 64 } else { 0 });
        }
        let fhat = harmonic::dft(&phi.table).unwrap();
        assert_eq!(fhat.as_int().unwrap()[0], setstat::higher_energy(&h, 3).unwrap().to_i128().unwrap());
    }

    #[test]
    fn ratio_screen_matches_exact() {
        let g = Group::cyclic(40).unwrap();
        let b = GroupSet::new(g, [0, 1, 3, 7, 12, 20, 21]).unwrap();
        let hist = SliceHistogram::new(&b).unwrap();
        let r = energy_ratios(&hist, 6);
        for (i, x) in r.iter().enumerate() {
            let k = i as u32 + 2;
            let exact = to_f64(&(qu(&hist.energy(k + 1)) / qu(&hist.energy(k))));
            assert!((x - exact).abs() <= 1e-12 * exact);
        }
    }

    #[test]
    fn subspace_from_subgroup() {
        let h = subgroup(8, 3);
        let s = PairStats::new(&h, &h).unwrap();
        let p = derive_params(&s, &ParamOverrides::default()).unwrap();
        let r = extract_subspace(&h, &h, &p).unwrap();
        match &r.piece {
            Piece::Subspace(sp) => {
                assert!(h.is_subset(&sp.subspace));
                assert_eq!(sp.hits, 8);
                assert_eq!(sp.translate, 0);
            }
            _ => panic!("expected a subspace"),
        }
        assert!(r.failures().is_empty());
    }

    #[test]
    fn bohr_in_z60_subgroup() {
        let g = Group::cyclic(60).unwrap();
        let h = GroupSet::new(g, (0..60).step_by(6)).unwrap();
        let s = PairStats::new(&h, &h).unwrap();
        let p = derive_params(&s, &ParamOverrides::default()).unwrap();
        let r = extract_bohr(&h, &h, &p).unwrap();
        match &r.piece {
            Piece::Bohr(bp) => {
                assert!(h.is_subset(&bp.bohr.members), "{:?}", bp.bohr.members.members());
                assert!(bp.hits >= 10);
            }
            _ => panic!("expected a Bohr set"),
        }
    }

    #[test]
    fn bohr_on_interval_in_z101() {
        let g = Group::cyclic(101).unwrap();
        let a = GroupSet::new(g, 0..10).unwrap();
        let s = PairStats::new(&a, &a.negate()).unwrap();
        let p = derive_params(&s, &ParamOverrides::default()).unwrap();
        // certificates are verified inside; either success or an honest error
        match extract_bohr_unchecked(&a.negate(), &p) {
            Ok(r) => assert!(r.failures().is_empty()),
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn bohr_agrees_with_subspace_on_boolean() {
        let g = Group::boolean(8).unwrap();
        let a = GroupSet::new(g, [0, 1, 2, 3, 16, 17, 18, 19, 64]).unwrap();
        let s = PairStats::new(&a, &a).unwrap();
        let p = derive_params(&s, &ParamOverrides::default()).unwrap();
        let sub = extract_subspace_unchecked(&a, &p).unwrap();
        let bohr = extract_bohr_unchecked(&a, &p).unwrap();
        assert_eq!(sub.piece.size_and_hits(), bohr.piece.size_and_hits());
    }
}
