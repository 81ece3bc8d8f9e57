//! Command-line front end for the `rdm` binary.
//!
//! Exit codes: 0 on success, 1 on runtime or numerical failure, 2 on usage
//! errors.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::experiment::{run_experiment, ExperimentConfig, ExperimentKind, ExperimentResult};
use crate::laws::MpLaw;
use crate::output::{emit_csv, emit_json, render_csv, render_json, render_mp_curve, write_text};
use crate::sampling::EntryDistribution;
use crate::spectra::EdgeSignConvention;
use crate::tracywidom::{TracyWidom, Tw2Params, Tw2Table};

#[derive(Parser, Debug)]
#[command(name = "rdm", version, about = "Spectra of random density matrices")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Pooled scaled spectrum against the Marchenko-Pastur law.
    Bulk(RunArgs),
    /// Largest-eigenvalue statistic against Tracy-Widom F2.
    EdgeLargest(RunArgs),
    /// Smallest-eigenvalue statistic against Tracy-Widom F2.
    EdgeSmallest(RunArgs),
    /// Von Neumann entropy minus ln n.
    Entropy(RunArgs),
    /// Stieltjes-transform rescaling identity.
    StieltjesCheck(RunArgs),
    /// Marchenko-Pastur density and CDF on a grid.
    MpCurve(MpCurveArgs),
    /// Painleve II table of q, F2 and its density.
    Tw2Table(TableArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Args, Debug, Default)]
struct RunArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    c: Option<f64>,
    /// [default: 100]
    #[arg(long)]
    trials: Option<usize>,
    /// [default: gaussian]
    #[arg(long, value_enum)]
    dist: Option<EntryDistribution>,
    /// [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// [default: 60]
    #[arg(long)]
    bins: Option<usize>,
    /// [default: 1]
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    format: OutputFormat,
    /// [default: verbatim]
    #[arg(long, value_enum)]
    edge_sign_convention: Option<EdgeSignConvention>,
    /// Comma-separated list of eps values for stieltjes-check.
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    /// JSON experiment config; flags may repeat its values but not contradict them.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MpCurveArgs {
    #[arg(long)]
    c: f64,
    #[arg(long, default_value_t = 0.0)]
    x_min: f64,
    /// [default: 1.1 x+]
    #[arg(long)]
    x_max: Option<f64>,
    #[arg(long, default_value_t = 200)]
    points: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TableArgs {
    #[arg(long, default_value_t = Tw2Params::default().s_max, allow_negative_numbers = true)]
    s_max: f64,
    #[arg(long, default_value_t = Tw2Params::default().s_min, allow_negative_numbers = true)]
    s_min: f64,
    #[arg(long, default_value_t = Tw2Params::default().step)]
    step: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Every field of [`ExperimentConfig`], all optional. The config echo stored
/// in a result's provenance is a valid config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    kind: Option<ExperimentKind>,
    n: Option<usize>,
    c: Option<f64>,
    trials: Option<usize>,
    distribution: Option<EntryDistribution>,
    master_seed: Option<u64>,
    bins: Option<usize>,
    eps_list: Option<Vec<f64>>,
    output_path: Option<String>,
    workers: Option<usize>,
    edge_sign_convention: Option<EdgeSignConvention>,
}

#[derive(Debug, PartialEq)]
pub enum Command {
    Run {
        config: ExperimentConfig,
        format: OutputFormat,
    },
    MpCurve {
        c: f64,
        x_min: f64,
        x_max: f64,
        points: usize,
        out: Option<PathBuf>,
    },
    Tw2Table {
        params: Tw2Params,
        out: Option<PathBuf>,
    },
}

#[derive(Debug)]
pub enum CliError {
    Clap(clap::Error),
    Usage(String),
    Runtime(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Clap(e) => e.exit_code(),
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Clap(e) => write!(f, "{e}"),
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Runtime(e) => write!(f, "error: {e}"),
        }
    }
}

/// Takes the flag value, the config value, or the default, in that order of
/// presence; a flag that disagrees with the config is an error.
fn merge<T: PartialEq + std::fmt::Debug>(
    name: &str,
    flag: Option<T>,
    file: Option<T>,
    default: Option<T>,
) -> std::result::Result<T, CliError> {
    match (flag, file) {
        (Some(a), Some(b)) if a != b => Err(CliError::Usage(format!(
            "--{name} {a:?} contradicts the config file value {b:?}"
        ))),
        (Some(a), _) | (None, Some(a)) => Ok(a),
        (None, None) => default.ok_or_else(|| CliError::Usage(format!("missing required --{name}"))),
    }
}

fn build_config(kind: ExperimentKind, args: RunArgs) -> std::result::Result<ExperimentConfig, CliError> {
    let file = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Runtime(Error::io(path, e)))?;
            let file: ConfigFile = serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
            file
        }
        None => ConfigFile::default(),
    };
    if let Some(k) = file.kind {
        if k != kind {
            return Err(CliError::Usage(format!("config kind {k:?} contradicts the subcommand")));
        }
    }
    let defaults = ExperimentConfig::new(kind, 0, 0.0);
    let out = args.out.map(|p| p.to_string_lossy().into_owned());
    let config = ExperimentConfig {
        kind,
        n: merge("n", args.n, file.n, None)?,
        c: merge("c", args.c, file.c, None)?,
        trials: merge("trials", args.trials, file.trials, Some(defaults.trials))?,
        distribution: merge("dist", args.dist, file.distribution, Some(defaults.distribution))?,
        master_seed: merge("seed", args.seed, file.master_seed, Some(defaults.master_seed))?,
        bins: merge("bins", args.bins, file.bins, Some(defaults.bins))?,
        eps_list: merge("eps", args.eps, file.eps_list, Some(defaults.eps_list))?,
        output_path: merge("out", out.map(Some), file.output_path.map(Some), Some(None))?,
        workers: merge("workers", args.workers, file.workers, Some(defaults.workers))?,
        edge_sign_convention: merge(
            "edge-sign-convention",
            args.edge_sign_convention,
            file.edge_sign_convention,
            Some(defaults.edge_sign_convention),
        )?,
    };
    config.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(config)
}

pub fn parse_cli<I, T>(argv: I) -> std::result::Result<Command, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(CliError::Clap)?;
    let run = |kind, args: RunArgs| {
        let format = args.format;
        Ok(Command::Run {
            config: build_config(kind, args)?,
            format,
        })
    };
    match cli.command {
        Sub::Bulk(a) => run(ExperimentKind::Bulk, a),
        Sub::EdgeLargest(a) => run(ExperimentKind::LargestEdge, a),
        Sub::EdgeSmallest(a) => run(ExperimentKind::SmallestEdge, a),
        Sub::Entropy(a) => run(ExperimentKind::Entropy, a),
        Sub::StieltjesCheck(a) => run(ExperimentKind::StieltjesIdentity, a),
        Sub::MpCurve(a) => {
            let law = MpLaw::new(a.c).map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(Command::MpCurve {
                c: a.c,
                x_min: a.x_min,
                x_max: a.x_max.unwrap_or(1.1 * law.x_plus),
                points: a.points,
                out: a.out,
            })
        }
        Sub::Tw2Table(a) => {
            let params = Tw2Params {
                s_max: a.s_max,
                s_min: a.s_min,
                step: a.step,
            };
            params.steps().map_err(|e| CliError::Usage(e.to_string()))?;
            Ok(Command::Tw2Table { params, out: a.out })
        }
    }
}

fn summary(result: &ExperimentResult) -> String {
    let a = &result.aggregates;
    let mut parts = vec![format!("p={} r={}", a.p, a.realized_r)];
    let mut add = |name: &str, v: Option<f64>| {
        if let Some(v) = v {
            parts.push(format!("{name}={v:.6}"));
        }
    };
    add("ks", a.ks_distance);
    add("l1", a.l1_distance);
    add("mean", a.statistic_mean);
    add("entropy_deviation", a.entropy_deviation);
    add("max_gap", a.max_stieltjes_gap);
    parts.join(" ")
}

fn print_or_write(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(path) => write_text(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Runs a parsed command. Writes to stdout when no output path is given;
/// the Tracy-Widom companion curve is only written next to a file.
pub fn execute(command: Command) -> Result<()> {
    match command {
        Command::Run { config, format } => {
            let result = run_experiment(&config)?;
            let out = config.output_path.as_ref().map(PathBuf::from);
            match (format, &out) {
                (OutputFormat::Csv, Some(path)) => {
                    let table = if config.kind.is_edge() {
                        Some(TracyWidom::load_or_build()?)
                    } else {
                        None
                    };
                    let table = table.as_ref().map(|t| t.table()).transpose()?;
                    emit_csv(&result, table, path)?;
                }
                (OutputFormat::Json, Some(path)) => emit_json(&result, path)?,
                (OutputFormat::Csv, None) => print!("{}", render_csv(&result)?),
                (OutputFormat::Json, None) => print!("{}", render_json(&result)?),
            }
            eprintln!("{}", summary(&result));
        }
        Command::MpCurve {
            c,
            x_min,
            x_max,
            points,
            out,
        } => {
            let text = render_mp_curve(&MpLaw::new(c)?, x_min, x_max, points)?;
            print_or_write(&text, out.as_ref())?;
        }
        Command::Tw2Table { params, out } => {
            let table = Tw2Table::build(params)?;
            print_or_write(&table.to_csv_string(), out.as_ref())?;
            eprintln!("sha256={}", table.checksum());
        }
    }
    Ok(())
}

/// Parses, executes and reports; returns the process exit code.
pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let outcome = parse_cli(argv).and_then(|cmd| execute(cmd).map_err(CliError::Runtime));
    match outcome {
        Ok(()) => 0,
        Err(CliError::Clap(e)) => {
            let _ = e.print();
            e.exit_code()
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}
