//! TOML run configuration.

use std::path::{Path, PathBuf};

use addstruct::structure::ParamOverrides;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Default seed for randomized generators and suites.
    pub seed: Option<u64>,
    /// Where to write the JSON report (stdout when absent).
    pub output: Option<PathBuf>,
    /// Where to write the plain-text summary (stderr when absent).
    pub summary: Option<PathBuf>,
    /// Largest group order accepted anywhere in the run.
    pub max_order: Option<usize>,
    pub verify: Option<VerifyConfig>,
    #[serde(default, rename = "experiment")]
    pub experiments: Vec<Experiment>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Deserialize, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Parseval,
    Triangle,
    EnergyProduct,
    EnergyIdentity,
    EnergyMonotonicity,
    KatzKoester,
    Bohr,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Parseval,
        Suite::Triangle,
        Suite::EnergyProduct,
        Suite::EnergyIdentity,
        Suite::EnergyMonotonicity,
        Suite::KatzKoester,
        Suite::Bohr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Parseval => "parseval",
            Suite::Triangle => "triangle",
            Suite::EnergyProduct => "energy-product",
            Suite::EnergyIdentity => "energy-identity",
            Suite::EnergyMonotonicity => "energy-monotonicity",
            Suite::KatzKoester => "katz-koester",
            Suite::Bohr => "bohr",
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default = "all_suites")]
    pub suites: Vec<Suite>,
    /// Random instances per suite and group.
    #[serde(default = "default_instances")]
    pub instances: usize,
    /// Groups for the set suites; the Bohr suite uses cyclic groups only.
    #[serde(default = "default_groups")]
    pub groups: Vec<String>,
    /// Largest random set drawn.
    #[serde(default = "default_max_size")]
    pub max_size: usize,
}

fn all_suites() -> Vec<Suite> {
    Suite::ALL.to_vec()
}

fn default_instances() -> usize {
    50
}

fn default_groups() -> Vec<String> {
    vec!["Z24".into(), "F2^6".into(), "Z4xZ6".into(), "Z15".into()]
}

fn default_max_size() -> usize {
    10
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            suites: all_suites(),
            instances: default_instances(),
            groups: default_groups(),
            max_size: default_max_size(),
        }
    }
}

/// Where a set comes from.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SetSource {
    File { path: PathBuf },
    Members { group: String, members: Vec<String> },
    Random { group: String, size: usize, seed: Option<u64> },
    Planted { group: String, dims: Vec<usize>, noise: usize, seed: Option<u64> },
    HLambda { n: usize, k: usize, lambda: usize },
    Katz { p: u64, d: u32, seed: Option<u64> },
}

impl SetSource {
    pub fn is_random(&self) -> bool {
        matches!(self, SetSource::Random { .. } | SetSource::Planted { .. })
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "op", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Pipeline {
    Stats {
        #[serde(default = "default_ks")]
        ks: Vec<u32>,
    },
    Extract {
        #[serde(default = "default_mode")]
        mode: String,
    },
    Dichotomy { m: String },
    Certify { eps: String },
    Regularize,
    /// Verification of the `H + Λ` claims; the source must be `h-lambda`.
    HLambda {
        #[serde(default = "default_k_max")]
        k_max: u32,
    },
    /// Character-sum bound for an index set; the source must be `katz`.
    Katz,
}

fn default_ks() -> Vec<u32> {
    vec![2, 3, 4]
}

fn default_mode() -> String {
    "auto".into()
}

fn default_k_max() -> u32 {
    6
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Experiment {
    pub name: String,
    pub set: SetSource,
    /// Optional second set (`B` of the pipeline).
    pub b: Option<SetSource>,
    pub pipeline: Pipeline,
    #[serde(default)]
    pub params: ParamOverrides,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn parse(text: &str) -> CliResult<RunConfig> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Reads a config and resolves relative paths against its directory.
    pub fn load(path: &Path) -> CliResult<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = RunConfig::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for e in &mut self.experiments {
            for s in std::iter::once(&mut e.set).chain(e.b.as_mut()) {
                if let SetSource::File { path } = s {
                    fix(path);
                }
            }
        }
        if let Some(p) = &mut self.output {
            fix(p);
        }
        if let Some(p) = &mut self.summary {
            fix(p);
        }
    }

    /// Unique experiment names, existing input files and a seed for every
    /// randomized generator.
    pub fn validate(&self) -> CliResult<()> {
        let mut names = std::collections::BTreeSet::new();
        for e in &self.experiments {
            if !names.insert(e.name.as_str()) {
                return Err(CliError::Config(format!("duplicate experiment name {:?}", e.name)));
            }
            for s in std::iter::once(&e.set).chain(e.b.as_ref()) {
                let has_seed = match s {
                    SetSource::Random { seed, .. } | SetSource::Planted { seed, .. } => seed.is_some(),
                    _ => true,
                };
                if s.is_random() && !has_seed && e.seed.is_none() && self.seed.is_none() {
                    return Err(CliError::Config(format!(
                        "experiment {:?} uses a random generator without a seed",
                        e.name
                    )));
                }
                if let SetSource::File { path } = s {
                    if !path.exists() {
                        return Err(CliError::Config(format!("{}: no such file", path.display())));
                    }
                }
            }
            match (&e.pipeline, &e.set) {
                (Pipeline::HLambda { .. }, SetSource::HLambda { .. }) | (Pipeline::Katz, SetSource::Katz { .. }) => {}
                (Pipeline::HLambda { .. }, _) | (Pipeline::Katz, _) => {
                    return Err(CliError::Config(format!(
                        "experiment {:?}: pipeline needs the matching generator",
                        e.name
                    )))
                }
                _ => {}
            }
        }
        if let Some(v) = &self.verify {
            if !v.suites.is_empty() && self.seed.is_none() {
                return Err(CliError::Config("verification suites need a seed".into()));
            }
        }
        Ok(())
    }
}
