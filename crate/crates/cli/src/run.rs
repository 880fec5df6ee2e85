//! Orchestration of every subcommand and of config-driven runs.

use std::path::Path;
use std::time::Instant;

use addstruct::bohr::{self, BohrProfile, BohrSpec};
use addstruct::check::CheckRecord;
use addstruct::exact::{one, parse_q, Q};
use addstruct::harmonic::{self, FunctionTable, Values};
use addstruct::setstat::{self, SliceHistogram, TupleSet};
use addstruct::spectral;
use addstruct::structure::{
    self, certify_difference_subset, dichotomy_m, regularize_density, ExtractMode, ParamOverrides,
};
use addstruct::worked::{self, HLambdaSpec};
use addstruct::{Group, GroupSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::config::{Experiment, Pipeline, RunConfig, SetSource, Suite, VerifyConfig};
use crate::error::{CliError, CliResult};
use crate::report::RunReport;

/// Default largest group order for any command.
pub const DEFAULT_MAX_ORDER: usize = 1 << 20;

/// Central resource caps.
#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub max_order: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_order: DEFAULT_MAX_ORDER,
        }
    }
}

impl Limits {
    pub fn group(&self, spec: &str) -> CliResult<Group> {
        let g: Group = spec.parse()?;
        self.admit(&g)?;
        Ok(g)
    }

    pub fn admit(&self, g: &Group) -> CliResult<()> {
        if g.order() > self.max_order {
            return Err(CliError::Resource(format!(
                "group {g} has order {} above the cap {}",
                g.order(),
                self.max_order
            )));
        }
        Ok(())
    }

    pub fn load_set(&self, path: &Path) -> CliResult<GroupSet> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let header = text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#'));
        if let Some(h) = header {
            self.group(h)?;
        }
        Ok(GroupSet::from_text(&text)?)
    }

    pub fn load_function(&self, path: &Path) -> CliResult<FunctionTable> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let f = FunctionTable::from_text(&text)?;
        self.admit(f.group())?;
        Ok(f)
    }
}

fn q_arg(name: &str, s: &str) -> CliResult<Q> {
    parse_q(s).map_err(|e| CliError::Config(format!("{name}: {e}")))
}

/// Turns assertion-class pipeline errors into a failed record so the report
/// is still produced; other errors propagate.
fn record_or_propagate(report: &mut RunReport, anchor: &str, e: addstruct::Error) -> CliResult<()> {
    match CliError::from(e) {
        CliError::Assertion(msg) => {
            report.add_checks([CheckRecord::boolean("pipeline-error", anchor, false, &msg)]);
            Ok(())
        }
        other => Err(other),
    }
}

fn timed<T>(report: &mut RunReport, key: &str, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    report.timings.insert(key.to_string(), start.elapsed().as_secs_f64());
    out
}

// ---------------------------------------------------------------------------
// single commands

pub fn run_stats(a: &GroupSet, b: Option<&GroupSet>, ks: &[u32]) -> CliResult<RunReport> {
    let mut report = RunReport::new("stats", json!({ "group": a.group().to_string(), "ks": ks }));
    let profile = timed(&mut report, "profile", || setstat::profile(a, b, ks))?;
    report.add_checks(profile.checks.iter().cloned());
    report.add_result("profile", &profile);
    Ok(report)
}

pub fn run_spectrum(f: &FunctionTable, eps: &Q, c_chang: f64, audit: bool) -> CliResult<RunReport> {
    let mut report = RunReport::new(
        "spectrum",
        json!({ "group": f.group().to_string(), "eps": eps.to_string(), "c_chang": c_chang, "audit": audit }),
    );
    let spec = timed(&mut report, "spectrum", || spectral::spectrum(f, eps))?;
    let weights: Vec<f64> = spec.members.iter().map(|m| m.magnitude).collect();
    let witness = spectral::max_dissociated(f.group(), &spec.characters(), Some(&weights))?;
    let dissociated = spectral::is_dissociated(f.group(), &witness.members)?;
    report.add_checks([CheckRecord::boolean(
        "witness-dissociated",
        "dissociated-witness",
        dissociated,
        &format!("{} characters", witness.members.len()),
    )]);
    let audit_constant = if audit { c_chang } else { f64::INFINITY };
    let chang = spectral::chang_bound(f, eps, c_chang, audit_constant)?;
    let mut chang_record = CheckRecord::at_most_f64(
        "dissociated-dimension",
        "large-spectrum-dimension-bound",
        chang.dimension as f64,
        chang.bound.max(1.0),
        0.0,
    );
    if !chang.asserted {
        chang_record = chang_record.diagnostic();
    }
    report.add_checks([chang_record]);
    report.add_result("spectrum", &spec);
    report.add_result("witness", &witness);
    report.add_result("chang", &chang);
    Ok(report)
}

pub fn run_bohr(group: &Group, gamma: &str, eps: &str, regularize: bool) -> CliResult<RunReport> {
    let mut report = RunReport::new(
        "bohr",
        json!({ "group": group.to_string(), "gamma": gamma, "eps": eps, "regularize": regularize }),
    );
    let gamma = bohr::parse_gamma(group, gamma)?;
    let radii = bohr::parse_radii(eps)?;
    let spec = BohrSpec::new(gamma, radii)?;
    let profile = BohrProfile::new(group, &spec)?;
    let one = one();
    report.add_result("size", profile.count(&one));
    report.add_result("regularity", profile.regularity_at(&one));
    let checks = timed(&mut report, "lemmas", || bohr::check_size_bounds(group, &spec))?;
    report.add_checks(checks);
    if regularize {
        match timed(&mut report, "regular-radius", || bohr::find_regular_radius(group, &spec)) {
            Ok(s) => report.add_result("regular", &s),
            Err(e) => record_or_propagate(&mut report, "regular-radius-search", e)?,
        }
    }
    Ok(report)
}

/// The structure operations reachable from the command line.
#[derive(Clone, Debug)]
pub enum StructureOp {
    Extract(ExtractMode),
    Dichotomy(Q),
    Certify(Q),
    Regularize,
}

impl StructureOp {
    pub fn describe(&self) -> String {
        match self {
            StructureOp::Extract(mode) => format!("extract ({mode:?})").to_lowercase(),
            StructureOp::Dichotomy(m) => format!("dichotomy M = {m}"),
            StructureOp::Certify(eps) => format!("certify eps = {eps}"),
            StructureOp::Regularize => "regularize".into(),
        }
    }
}

pub fn run_structure(a: &GroupSet, b: Option<&GroupSet>, op: &StructureOp, params: &ParamOverrides) -> CliResult<RunReport> {
    let mut report = RunReport::new(
        "structure",
        json!({
            "group": a.group().to_string(),
            "size": a.len(),
            "b_size": b.map(GroupSet::len),
            "op": op.describe(),
            "params": params,
        }),
    );
    let b_set = b.cloned().unwrap_or_else(|| a.negate());
    let outcome = timed(&mut report, "pipeline", || match op {
        StructureOp::Extract(mode) => structure::extract(a, &b_set, params, *mode).map(result_parts),
        StructureOp::Dichotomy(m) => dichotomy_m(a, m, &b_set).map(result_parts),
        StructureOp::Certify(eps) => certify_difference_subset(a, eps).map(result_parts),
        StructureOp::Regularize => regularize_density(a).map(|t| {
            let checks = t.checks.clone();
            let steps = t.steps.iter().map(|s| s.guarantee.clone());
            (serde_json::to_value(&t).expect("trace serializes"), checks.into_iter().chain(steps).collect())
        }),
    });
    match outcome {
        Ok((value, checks)) => {
            report.add_checks(checks);
            report.add_result("structure", value);
        }
        Err(e) => record_or_propagate(&mut report, "structure-pipeline", e)?,
    }
    Ok(report)
}

/// Serializes a structure result and collects its checks.
fn result_parts(r: structure::StructureResult) -> (serde_json::Value, Vec<CheckRecord>) {
    let mut checks = Vec::new();
    if let Some(h) = &r.hypotheses {
        checks.extend(h.checks.iter().cloned());
        checks.extend(h.diagnostics.iter().cloned().map(CheckRecord::diagnostic));
    }
    checks.extend(r.certificates.iter().cloned());
    checks.extend(r.diagnostics.iter().cloned().map(CheckRecord::diagnostic));
    if let Some(d) = &r.decomposition {
        checks.extend(d.checks.iter().cloned());
    }
    (serde_json::to_value(&r).expect("result serializes"), checks)
}

#[derive(Clone, Debug)]
pub enum ExampleSpec {
    HLambda {
        spec: HLambdaSpec,
        k_max: u32,
        dichotomy: Option<Q>,
    },
    Katz {
        p: u64,
        d: u32,
        seed: u64,
    },
}

pub fn run_example(ex: &ExampleSpec) -> CliResult<(RunReport, GroupSet)> {
    match ex {
        ExampleSpec::HLambda { spec, k_max, dichotomy } => {
            let mut report = RunReport::new(
                "example h-lambda",
                json!({ "n": spec.n, "k": spec.k, "lambda": spec.lambda_size, "k_max": k_max,
                        "dichotomy": dichotomy.as_ref().map(Q::to_string) }),
            );
            let a = worked::make_h_lambda(*spec)?;
            let rep = timed(&mut report, "verify", || worked::verify_h_lambda(&a, *spec, *k_max))?;
            report.add_checks(rep.checks.iter().cloned());
            report.add_result("h_lambda", &rep);
            if let Some(m) = dichotomy {
                let op = StructureOp::Dichotomy(m.clone());
                let sub = run_structure(&a, Some(&a), &op, &ParamOverrides::default())?;
                report.merge("dichotomy", sub);
            }
            report.add_result("set_file", a.to_text());
            Ok((report, a))
        }
        ExampleSpec::Katz { p, d, seed } => {
            let mut report = RunReport::new("example katz", json!({ "p": p, "d": d, "seed": seed }));
            let field = worked::make_finite_field(*p, *d, *seed)?;
            let a = worked::make_katz_set(&field)?;
            let rep = timed(&mut report, "verify", || worked::verify_katz_bound(&a, &field))?;
            report.add_checks(rep.checks.iter().cloned());
            report.add_result("field", &field);
            report.add_result("katz", &rep);
            report.add_result("set_file", a.to_text());
            Ok((report, a))
        }
    }
}

// ---------------------------------------------------------------------------
// verification suites

/// Replaceable implementations checked by the suites; tests swap in broken
/// ones to see failures surface.
#[derive(Clone, Copy)]
pub struct Oracles {
    pub energy: fn(&GroupSet, &GroupSet) -> addstruct::Result<u128>,
}

impl Default for Oracles {
    fn default() -> Self {
        Oracles {
            energy: setstat::energy,
        }
    }
}

const BOHR_GROUPS: [&str; 3] = ["Z101", "Z256", "Z2520"];

fn suite_rng(seed: u64, suite: Suite, group: usize) -> ChaCha8Rng {
    let tag = Suite::ALL.iter().position(|&s| s == suite).unwrap_or(0) as u64;
    ChaCha8Rng::seed_from_u64(seed ^ (tag << 40) ^ ((group as u64) << 20))
}

fn random_set(g: &Group, r: &mut ChaCha8Rng, max: usize) -> addstruct::Result<GroupSet> {
    let size = r.gen_range(1..=max.clamp(1, g.order()));
    worked::make_random_set(g, size, r.gen())
}

fn prefixed(prefix: &str, mut c: CheckRecord) -> CheckRecord {
    c.name = format!("{prefix}/{}", c.name);
    c
}

/// `Σ_χ |Â(χ)|² |B̂(χ)|² / N`, exact on `F2^n` and rounded after a residual
/// check elsewhere.
fn fourier_energy(a: &GroupSet, b: &GroupSet) -> addstruct::Result<u128> {
    let (pa, pb) = (setstat::power_spectrum(a)?, setstat::power_spectrum(b)?);
    let n = a.group().order() as u128;
    if let (Values::Int(x), Values::Int(y)) = (pa.values(), pb.values()) {
        let s: i128 = x.iter().zip(y).map(|(u, v)| u * v).sum();
        return Ok(s as u128 / n);
    }
    let s: f64 = (0..pa.len()).map(|i| pa.get(i).re * pb.get(i).re).sum::<f64>() / n as f64;
    let r = s.round();
    if (s - r).abs() > 1e-6 * s.max(1.0) {
        return Err(addstruct::Error::Precision(format!("Fourier energy {s}")));
    }
    Ok(r as u128)
}

fn run_suite(suite: Suite, cfg: &VerifyConfig, seed: u64, limits: &Limits, oracles: &Oracles) -> CliResult<Vec<CheckRecord>> {
    let mut out = Vec::new();
    let name = suite.name();
    if suite == Suite::Bohr {
        for (gi, gs) in BOHR_GROUPS.iter().enumerate() {
            let g = limits.group(gs)?;
            let mut r = suite_rng(seed, suite, gi);
            for i in 0..cfg.instances {
                let d = r.gen_range(1..=3);
                let gamma: Vec<usize> = (0..d).map(|_| r.gen_range(1..g.order())).collect();
                let radii = (0..d)
                    .map(|_| {
                        let den = r.gen_range(4..=64u64);
                        bohr::Radius::new(r.gen_range(1..=den / 2), den)
                    })
                    .collect::<addstruct::Result<Vec<_>>>()?;
                let spec = BohrSpec::new(gamma, radii)?;
                let prefix = format!("{name}/{gs}/{i}");
                for c in bohr::check_size_bounds(&g, &spec)? {
                    out.push(prefixed(&prefix, c));
                }
                let found = bohr::find_regular_radius(&g, &spec);
                out.push(prefixed(
                    &prefix,
                    CheckRecord::boolean(
                        "regular-radius-found",
                        "regular-radius-search",
                        found.is_ok(),
                        &found.map_or_else(|e| e.to_string(), |s| format!("scale {}", s.scale)),
                    )
                    .diagnostic(),
                ));
            }
        }
        return Ok(out);
    }
    for (gi, gs) in cfg.groups.iter().enumerate() {
        let g = limits.group(gs)?;
        let mut r = suite_rng(seed, suite, gi);
        for i in 0..cfg.instances {
            let prefix = format!("{name}/{gs}/{i}");
            let a = random_set(&g, &mut r, cfg.max_size)?;
            let b = random_set(&g, &mut r, cfg.max_size)?;
            match suite {
                Suite::Parseval => {
                    let values: Vec<i128> = (0..g.order()).map(|_| r.gen_range(-50..=50)).collect();
                    let f = FunctionTable::from_int(g.clone(), values)?;
                    let c = harmonic::parseval(&f, 1e-9)?;
                    out.push(prefixed(
                        &prefix,
                        CheckRecord::boolean(
                            "parseval",
                            "parseval-identity",
                            c.holds && c.exact.is_some(),
                            &format!("{} = {}", c.lhs, c.rhs),
                        ),
                    ));
                }
                Suite::Triangle => {
                    let w = random_set(&g, &mut r, cfg.max_size)?;
                    let z = random_set(&g, &mut r, cfg.max_size)?;
                    let rep = setstat::check_generalized_triangle(&TupleSet::from_set(&w), &TupleSet::from_set(&a), &b, &z)?;
                    out.push(prefixed(
                        &prefix,
                        CheckRecord::at_most(
                            "triangle",
                            "generalized-triangle-inequality",
                            &Q::from_integer((rep.lhs as i128).into()),
                            &Q::from_integer((rep.rhs as i128).into()),
                            false,
                        ),
                    ));
                }
                Suite::EnergyProduct => {
                    let k = 2 + (i % 2) as u32;
                    let rep = setstat::check_energy_product(&a, &b, k)?;
                    out.push(prefixed(
                        &prefix,
                        CheckRecord::at_least(
                            &format!("energy-product-k{k}"),
                            "energy-product-inequality",
                            &parse_q(&rep.lhs)?,
                            &parse_q(&rep.rhs)?,
                            false,
                        ),
                    ));
                }
                Suite::EnergyIdentity => {
                    let direct = (oracles.energy)(&a, &b)?;
                    let fourier = fourier_energy(&a, &b)?;
                    out.push(prefixed(
                        &prefix,
                        CheckRecord::boolean(
                            "energy-identity",
                            "energy-fourier-identity",
                            direct == fourier,
                            &format!("{direct} vs {fourier}"),
                        ),
                    ));
                }
                Suite::EnergyMonotonicity => {
                    let hist = SliceHistogram::new(&a)?;
                    for c in setstat::check_energy_monotonicity(&hist, a.len(), 5) {
                        out.push(prefixed(&prefix, c));
                    }
                    out.push(prefixed(&prefix, setstat::check_difference_count_energy(&a, 2)?));
                }
                Suite::KatzKoester => {
                    let bad = setstat::katz_koester_all(&a, &b)?;
                    out.push(prefixed(
                        &prefix,
                        CheckRecord::boolean(
                            "katz-koester",
                            "katz-koester-inclusion",
                            bad.is_none(),
                            &bad.map_or("every x in A - A".into(), |x| format!("x = {x}")),
                        ),
                    ));
                }
                Suite::Bohr => unreachable!("handled above"),
            }
        }
    }
    Ok(out)
}

/// Runs the configured suites concurrently and merges them in suite order.
pub fn run_verify(cfg: &VerifyConfig, seed: u64, limits: &Limits, oracles: &Oracles) -> CliResult<RunReport> {
    let mut report = RunReport::new(
        "verify",
        json!({ "seed": seed, "verify": serde_json::to_value(cfg).expect("config serializes") }),
    );
    let results: Vec<(Suite, f64, CliResult<Vec<CheckRecord>>)> = cfg
        .suites
        .par_iter()
        .map(|&s| {
            let start = Instant::now();
            let r = run_suite(s, cfg, seed, limits, oracles);
            (s, start.elapsed().as_secs_f64(), r)
        })
        .collect();
    for (suite, secs, r) in results {
        let checks = r?;
        let failed = checks.iter().filter(|c| c.is_failure()).count();
        report.add_result(
            suite.name(),
            json!({ "checks": checks.len(), "failed": failed }),
        );
        report.timings.insert(suite.name().to_string(), secs);
        report.add_checks(checks);
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// config-driven runs

fn materialize(src: &SetSource, seed: Option<u64>, limits: &Limits) -> CliResult<GroupSet> {
    let need_seed = |s: &Option<u64>| {
        s.or(seed)
            .ok_or_else(|| CliError::Config("random generator without a seed".into()))
    };
    Ok(match src {
        SetSource::File { path } => limits.load_set(path)?,
        SetSource::Members { group, members } => {
            let g = limits.group(group)?;
            let idx = members.iter().map(|m| g.parse_element(m)).collect::<addstruct::Result<Vec<_>>>()?;
            GroupSet::new(g, idx)?
        }
        SetSource::Random { group, size, seed: s } => {
            worked::make_random_set(&limits.group(group)?, *size, need_seed(s)?)?
        }
        SetSource::Planted { group, dims, noise, seed: s } => {
            worked::make_planted(&limits.group(group)?, dims, *noise, need_seed(s)?)?.set
        }
        SetSource::HLambda { n, k, lambda } => {
            let a = worked::make_h_lambda(HLambdaSpec {
                n: *n,
                k: *k,
                lambda_size: *lambda,
            })?;
            limits.admit(a.group())?;
            a
        }
        SetSource::Katz { p, d, seed: s } => {
            let f = worked::make_finite_field(*p, *d, s.unwrap_or(0))?;
            worked::make_katz_set(&f)?
        }
    })
}

fn run_experiment(e: &Experiment, default_seed: Option<u64>, limits: &Limits) -> CliResult<RunReport> {
    let seed = e.seed.or(default_seed);
    let a = materialize(&e.set, seed, limits)?;
    let b = e.b.as_ref().map(|s| materialize(s, seed, limits)).transpose()?;
    let mut report = match &e.pipeline {
        Pipeline::Stats { ks } => run_stats(&a, b.as_ref(), ks)?,
        Pipeline::Extract { mode } => {
            let mode: ExtractMode = mode.parse()?;
            run_structure(&a, b.as_ref(), &StructureOp::Extract(mode), &e.params)?
        }
        Pipeline::Dichotomy { m } => run_structure(&a, b.as_ref(), &StructureOp::Dichotomy(q_arg("m", m)?), &e.params)?,
        Pipeline::Certify { eps } => run_structure(&a, b.as_ref(), &StructureOp::Certify(q_arg("eps", eps)?), &e.params)?,
        Pipeline::Regularize => run_structure(&a, b.as_ref(), &StructureOp::Regularize, &e.params)?,
        Pipeline::HLambda { k_max } => {
            let SetSource::HLambda { n, k, lambda } = e.set else {
                return Err(CliError::Config("h-lambda pipeline needs an h-lambda set".into()));
            };
            let spec = HLambdaSpec { n, k, lambda_size: lambda };
            run_example(&ExampleSpec::HLambda {
                spec,
                k_max: *k_max,
                dichotomy: None,
            })?
            .0
        }
        Pipeline::Katz => {
            let SetSource::Katz { p, d, seed: s } = e.set else {
                return Err(CliError::Config("katz pipeline needs a katz set".into()));
            };
            run_example(&ExampleSpec::Katz { p, d, seed: s.unwrap_or(0) })?.0
        }
    };
    report.add_result("input_size", a.len());
    Ok(report)
}

/// Runs the verification suites and every experiment concurrently. The
/// merged report is returned together with the first error by experiment
/// name, if any, so that it can still be written.
pub fn run_config(cfg: &RunConfig, oracles: &Oracles) -> (RunReport, Option<CliError>) {
    let limits = Limits {
        max_order: cfg.max_order.unwrap_or(DEFAULT_MAX_ORDER),
    };
    let mut report = RunReport::new("run", serde_json::to_value(cfg).expect("config serializes"));
    let mut first_error = None;
    if let Some(v) = &cfg.verify {
        let seed = cfg.seed.unwrap_or_default();
        match run_verify(v, seed, &limits, oracles) {
            Ok(r) => report.merge("verify", r),
            Err(e) => first_error = Some(e),
        }
    }
    let mut runs: Vec<(String, CliResult<RunReport>)> = cfg
        .experiments
        .par_iter()
        .map(|e| (e.name.clone(), run_experiment(e, cfg.seed, &limits)))
        .collect();
    runs.sort_by(|x, y| x.0.cmp(&y.0));
    for (name, r) in runs {
        match r {
            Ok(r) => report.merge(&name, r),
            Err(e) => {
                let c = CheckRecord::boolean("experiment-error", "experiment", false, &e.to_string());
                report.add_checks([prefixed(&name, c)]);
                first_error.get_or_insert(e);
            }
        }
    }
    (report, first_error)
}
