//! `perceptlet`: fit, evaluate and inspect multi-resolution percept-let
//! models from the command line.
//!
//! Exit status: 0 success, 1 I/O failure, 2 malformed input or arguments,
//! 3 grid violation in boundary mode.

mod input;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use perceptlet_core::automaton::{load_model, Automaton, AutomatonConfig, InputMapping, Mode};
use perceptlet_core::{basis_count, resolution_for, Error, PerceptionModel, Perceptlet};

use input::{logical_y, read_rows, OutputMapping, YSpace};

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Parse(String),
    Grid(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Parse(_) => 2,
            CliError::Grid(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Io(m) | CliError::Parse(m) | CliError::Grid(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) => CliError::Io(e.to_string()),
            Error::OffGrid { .. } | Error::MissingNodes(_) => CliError::Grid(e.to_string()),
            _ => CliError::Parse(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "perceptlet",
    version,
    about = "Multi-resolution percept-let function approximation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a model to `x,y` samples and write it as JSON.
    Fit(FitArgs),
    /// Print per-level estimates `x,f1,...,fpr` for each x.
    Eval(EvalArgs),
    /// Write per-level estimates on a uniform grid over [-1, 1] as CSV.
    Series(SeriesArgs),
    /// Basis counts, resolutions and model statistics.
    Info(InfoArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Family {
    Linear,
    Sin,
}

impl From<Family> for Perceptlet {
    fn from(f: Family) -> Self {
        match f {
            Family::Linear => Perceptlet::Linear,
            Family::Sin => Perceptlet::Sin,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FitModeArg {
    Boundary,
    Neighborhood,
    Online,
}

impl From<FitModeArg> for Mode {
    fn from(m: FitModeArg) -> Self {
        match m {
            FitModeArg::Boundary => Mode::Boundary,
            FitModeArg::Neighborhood => Mode::Neighborhood,
            FitModeArg::Online => Mode::Online,
        }
    }
}

#[derive(Args)]
struct FitArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, value_enum, default_value_t = Family::Sin)]
    family: Family,
    /// Perception resolution. Boundary mode infers it from the sample count.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=52))]
    pr: Option<u32>,
    #[arg(long, value_enum, default_value_t = FitModeArg::Boundary)]
    mode: FitModeArg,
    /// Map x through tanh before fitting.
    #[arg(long)]
    map_input: bool,
    #[arg(long, value_enum, default_value_t = YSpace::Logical)]
    y_space: YSpace,
    #[arg(long, value_enum, conflicts_with = "y_space")]
    map_output: Option<OutputMapping>,
    /// Drop correction weights with magnitude below this threshold.
    #[arg(long)]
    truncate: Option<f64>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    map_input: bool,
    #[arg(required = true, allow_negative_numbers = true)]
    x: Vec<f64>,
}

#[derive(Args)]
struct SeriesArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Number of grid points, including both ends.
    #[arg(long, default_value_t = 257, value_parser = clap::value_parser!(u32).range(2..))]
    density: u32,
}

#[derive(Args)]
struct InfoArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=52))]
    pr: Option<u32>,
    /// Report the resolution whose grid holds this many samples.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    model: Option<PathBuf>,
    /// Truncation preview threshold for --model.
    #[arg(long)]
    epsilon: Option<f64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fit(a) => cmd_fit(&a),
        Command::Eval(a) => cmd_eval(&a),
        Command::Series(a) => cmd_series(&a),
        Command::Info(a) => cmd_info(&a),
    };
    match result {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("perceptlet: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn mapping(map_input: bool) -> InputMapping {
    if map_input {
        InputMapping::Tanh
    } else {
        InputMapping::None
    }
}

/// Writes `contents` next to `path` and renames it into place.
fn write_atomically(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn read_model(path: &Path) -> Result<PerceptionModel, CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    load_model(file).map_err(|e| match e {
        Error::Io(_) => CliError::Io(format!("{}: {e}", path.display())),
        _ => CliError::Parse(format!("{}: {e}", path.display())),
    })
}

fn row_of(x: f64, levels: &[f64]) -> String {
    let mut row = x.to_string();
    for f in levels {
        let _ = write!(row, ",{f}");
    }
    row
}

fn cmd_fit(args: &FitArgs) -> Result<String, CliError> {
    let rows = read_rows(&args.input)?;
    let input_mapping = mapping(args.map_input);
    let mut pairs = Vec::with_capacity(rows.len());
    for row in &rows {
        if input_mapping == InputMapping::None && !(-1.0..=1.0).contains(&row.x) {
            return Err(CliError::Parse(format!(
                "line {}: x = {} is outside [-1, 1]; pass --map-input to map it with tanh",
                row.line, row.x
            )));
        }
        pairs.push((row.x, logical_y(row, args.y_space, args.map_output)?));
    }

    let mode = Mode::from(args.mode);
    let pr = match (args.pr, mode) {
        (Some(pr), _) => pr,
        (None, Mode::Boundary) => {
            let distinct: std::collections::BTreeSet<u64> = pairs.iter().map(|(x, _)| x.to_bits()).collect();
            resolution_for(distinct.len()).map_err(|e| CliError::Grid(e.to_string()))?
        }
        (None, _) => return Err(CliError::Parse("--pr is required outside boundary mode".into())),
    };
    let config = AutomatonConfig {
        truncation: args.truncate,
        input_mapping,
        ..AutomatonConfig::new(args.family.into(), pr, mode)
    };
    let (model, report) = Automaton::learn(&config, &pairs)?;
    let json = model.to_json()?;
    write_atomically(&args.output, format!("{json}\n").as_bytes())?;
    let line = serde_json::to_string(&report).map_err(|e| CliError::Parse(e.to_string()))?;
    Ok(format!("{line}\n"))
}

fn cmd_eval(args: &EvalArgs) -> Result<String, CliError> {
    let model = read_model(&args.model)?;
    let config = AutomatonConfig {
        input_mapping: mapping(args.map_input),
        ..AutomatonConfig::new(model.perceptlet().clone(), model.pr(), Mode::Boundary)
    };
    let mut out = String::new();
    for &x in &args.x {
        let r = Automaton::realize(&model, x, &config).map_err(|e| {
            CliError::Parse(format!(
                "{e}{}",
                if args.map_input {
                    ""
                } else {
                    " (use --map-input for raw values)"
                }
            ))
        })?;
        out.push_str(&row_of(x, &r.levels));
        out.push('\n');
    }
    Ok(out)
}

fn cmd_series(args: &SeriesArgs) -> Result<String, CliError> {
    let model = read_model(&args.model)?;
    let mut csv = String::from("x");
    for k in 1..=model.pr() {
        let _ = write!(csv, ",f{k}");
    }
    csv.push('\n');
    let n = args.density as usize;
    for i in 0..n {
        let x = if i + 1 == n {
            1.0
        } else {
            -1.0 + 2.0 * i as f64 / (n - 1) as f64
        };
        csv.push_str(&row_of(x, &model.realize_all_levels(x)?));
        csv.push('\n');
    }
    write_atomically(&args.output, csv.as_bytes())?;
    Ok(String::new())
}

fn cmd_info(args: &InfoArgs) -> Result<String, CliError> {
    let mut out = String::new();
    if let Some(pr) = args.pr {
        let _ = writeln!(out, "basis_count: {}", basis_count(pr)?);
    }
    if let Some(n) = args.samples {
        let _ = writeln!(out, "pr: {}", resolution_for(n)?);
    }
    if let Some(path) = &args.model {
        let model = read_model(path)?;
        let _ = writeln!(out, "family: {}", model.perceptlet().name());
        let _ = writeln!(out, "model_pr: {}", model.pr());
        let per_level: Vec<String> = model.weights_per_level().iter().map(usize::to_string).collect();
        let _ = writeln!(out, "weights_per_level: {}", per_level.join(","));
        if let Some(eps) = args.epsilon {
            let t = model.truncate(eps)?;
            let _ = writeln!(out, "truncate_removed: {}", t.removed);
            let _ = writeln!(out, "truncate_error_bound: {}", t.error_bound);
        }
    }
    if out.is_empty() {
        return Err(CliError::Parse(
            "nothing to report: pass --pr, --samples or --model".into(),
        ));
    }
    Ok(out)
}
