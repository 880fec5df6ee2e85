use std::path::{Path, PathBuf};
use std::process::ExitCode;

use addstruct::exact::parse_q;
use addstruct::structure::{ExtractMode, ParamOverrides};
use addstruct::worked::HLambdaSpec;
use addstruct_cli::config::{RunConfig, Suite, VerifyConfig};
use addstruct_cli::run::{self, ExampleSpec, Limits, Oracles, StructureOp, DEFAULT_MAX_ORDER};
use addstruct_cli::{CliError, CliResult, RunReport};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "addstruct", version, about = "Exact additive-structure statistics and certified structure extraction")]
struct Cli {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write the text summary here instead of stderr.
    #[arg(long, global = true)]
    summary: Option<PathBuf>,
    /// Largest group order accepted.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_ORDER)]
    max_order: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Size, doubling, peak coefficient and higher energies of a set.
    Stats {
        setfile: PathBuf,
        /// Second set for the sum-set statistics.
        #[arg(long)]
        b: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
        k: Vec<u32>,
    },
    /// Large spectrum of a function with a maximal dissociated subset.
    Spectrum {
        funcfile: PathBuf,
        #[arg(long)]
        eps: String,
        #[arg(long, default_value_t = 8.0)]
        c_chang: f64,
        /// Assert the dimension bound instead of reporting it.
        #[arg(long)]
        audit: bool,
    },
    /// Bohr set size, regularity and size lemmas.
    Bohr {
        #[arg(long)]
        group: String,
        /// Frequencies: `1,7` on cyclic groups, `;`-separated elements otherwise.
        #[arg(long)]
        gamma: String,
        /// Radii, one per frequency.
        #[arg(long)]
        eps: String,
        /// Also search for a regular radius.
        #[arg(long)]
        regularize: bool,
    },
    /// Structure extraction and the drivers built on it.
    Structure {
        setfile: PathBuf,
        #[arg(long)]
        b: Option<PathBuf>,
        #[arg(long, default_value = "auto")]
        mode: String,
        /// TOML file of parameter overrides.
        #[arg(long)]
        params: Option<PathBuf>,
        /// Run the M dichotomy with this M instead of plain extraction.
        #[arg(long, conflicts_with_all = ["certify", "regularize"])]
        dichotomy: Option<String>,
        /// Certify a structured subset of A - A at this epsilon.
        #[arg(long, conflicts_with = "regularize")]
        certify: Option<String>,
        /// Run the density-regularization loop.
        #[arg(long)]
        regularize: bool,
    },
    /// Worked examples.
    Example {
        #[command(subcommand)]
        which: ExampleCmd,
    },
    /// Property suites, or a full TOML run configuration.
    Verify {
        /// Run configuration; suites and experiments come from it.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_delimiter = ',')]
        suites: Option<Vec<String>>,
        #[arg(long)]
        instances: Option<usize>,
    },
}

#[derive(Subcommand)]
enum ExampleCmd {
    /// `H + Λ` in F2^n.
    HLambda {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        lambda: usize,
        #[arg(long, default_value_t = 6)]
        k_max: u32,
        /// Also run the M dichotomy on the set.
        #[arg(long)]
        dichotomy: Option<String>,
        /// Write the set file here.
        #[arg(long)]
        set_out: Option<PathBuf>,
    },
    /// Index set `{ind(g + j)}` of F_{p^d}.
    Katz {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        d: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        set_out: Option<PathBuf>,
    },
}

fn q_arg(name: &str, s: &str) -> CliResult<addstruct::exact::Q> {
    parse_q(s).map_err(|e| CliError::Config(format!("--{name}: {e}")))
}

fn read_overrides(path: &Path) -> CliResult<ParamOverrides> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn parse_suites(names: &[String]) -> CliResult<Vec<Suite>> {
    names
        .iter()
        .map(|n| {
            Suite::ALL
                .into_iter()
                .find(|s| s.name() == n.trim())
                .ok_or_else(|| CliError::Config(format!("unknown suite {n:?}")))
        })
        .collect()
}

fn write_set(path: &Option<PathBuf>, set: &addstruct::GroupSet) -> CliResult<()> {
    if let Some(p) = path {
        std::fs::write(p, set.to_text())?;
    }
    Ok(())
}

/// Runs a command; the report is `None` only when nothing could be produced.
fn execute(cli: &Cli) -> (Option<RunReport>, Option<CliError>, Option<PathBuf>, Option<PathBuf>) {
    let limits = Limits {
        max_order: cli.max_order,
    };
    let single = |r: CliResult<RunReport>| match r {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e)),
    };
    let (report, err) = match &cli.command {
        Command::Stats { setfile, b, k } => single((|| {
            let a = limits.load_set(setfile)?;
            let b = b.as_ref().map(|p| limits.load_set(p)).transpose()?;
            run::run_stats(&a, b.as_ref(), k)
        })()),
        Command::Spectrum {
            funcfile,
            eps,
            c_chang,
            audit,
        } => single((|| {
            let f = limits.load_function(funcfile)?;
            run::run_spectrum(&f, &q_arg("eps", eps)?, *c_chang, *audit)
        })()),
        Command::Bohr {
            group,
            gamma,
            eps,
            regularize,
        } => single((|| run::run_bohr(&limits.group(group)?, gamma, eps, *regularize))()),
        Command::Structure {
            setfile,
            b,
            mode,
            params,
            dichotomy,
            certify,
            regularize,
        } => single((|| {
            let a = limits.load_set(setfile)?;
            let b = b.as_ref().map(|p| limits.load_set(p)).transpose()?;
            let overrides = params.as_deref().map(read_overrides).transpose()?.unwrap_or_default();
            let op = match (dichotomy, certify, regularize) {
                (Some(m), _, _) => StructureOp::Dichotomy(q_arg("dichotomy", m)?),
                (_, Some(e), _) => StructureOp::Certify(q_arg("certify", e)?),
                (_, _, true) => StructureOp::Regularize,
                _ => StructureOp::Extract(mode.parse::<ExtractMode>()?),
            };
            run::run_structure(&a, b.as_ref(), &op, &overrides)
        })()),
        Command::Example { which } => single((|| match which {
            ExampleCmd::HLambda {
                n,
                k,
                lambda,
                k_max,
                dichotomy,
                set_out,
            } => {
                let spec = HLambdaSpec {
                    n: *n,
                    k: *k,
                    lambda_size: *lambda,
                };
                let dichotomy = dichotomy.as_deref().map(|m| q_arg("dichotomy", m)).transpose()?;
                let (report, set) = run::run_example(&ExampleSpec::HLambda {
                    spec,
                    k_max: *k_max,
                    dichotomy,
                })?;
                write_set(set_out, &set)?;
                Ok(report)
            }
            ExampleCmd::Katz { p, d, seed, set_out } => {
                let (report, set) = run::run_example(&ExampleSpec::Katz {
                    p: *p,
                    d: *d,
                    seed: *seed,
                })?;
                write_set(set_out, &set)?;
                Ok(report)
            }
        })()),
        Command::Verify {
            config,
            seed,
            suites,
            instances,
        } => {
            let cfg = (|| -> CliResult<RunConfig> {
                let mut cfg = match config {
                    Some(p) => RunConfig::load(p)?,
                    None => RunConfig {
                        verify: Some(VerifyConfig::default()),
                        ..RunConfig::default()
                    },
                };
                if seed.is_some() {
                    cfg.seed = *seed;
                }
                if cfg.max_order.is_none() {
                    cfg.max_order = Some(cli.max_order);
                }
                if let Some(v) = cfg.verify.as_mut() {
                    if let Some(s) = suites {
                        v.suites = parse_suites(s)?;
                    }
                    if let Some(n) = instances {
                        v.instances = *n;
                    }
                }
                cfg.validate()?;
                Ok(cfg)
            })();
            match cfg {
                Ok(cfg) => {
                    let (report, err) = run::run_config(&cfg, &Oracles::default());
                    let out = cli.out.clone().or(cfg.output.clone());
                    let summary = cli.summary.clone().or(cfg.summary.clone());
                    return (Some(report), err, out, summary);
                }
                Err(e) => (None, Some(e)),
            }
        }
    };
    (report, err, cli.out.clone(), cli.summary.clone())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, err, out, summary) = execute(&cli);
    if let Some(r) = &report {
        let written = match &out {
            Some(p) => std::fs::write(p, r.to_json() + "\n"),
            None => {
                println!("{}", r.to_json());
                Ok(())
            }
        };
        let text = r.summary();
        let summary_written = match &summary {
            Some(p) => std::fs::write(p, &text),
            None => {
                eprint!("{text}");
                Ok(())
            }
        };
        if let Err(e) = written.and(summary_written) {
            eprintln!("error: cannot write the report: {e}");
            return ExitCode::from(2);
        }
    }
    if let Some(e) = &err {
        eprintln!("error: {e}");
        return ExitCode::from(e.exit_code() as u8);
    }
    match report {
        Some(r) if !r.passed => ExitCode::from(1),
        _ => ExitCode::SUCCESS,
    }
}
