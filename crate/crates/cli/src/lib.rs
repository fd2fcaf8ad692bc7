//! Command-line front end: parses specs and flags, runs truncation sweeps
//! through `frameforge` and emits canonical JSON reports plus optional CSV
//! and SVG exports.

pub mod commands;
pub mod error;
pub mod inputs;
pub mod presets;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use error::CliError;
pub use report::{Report, Series, Table};

/// Environment variable overriding the ambient-dimension cap.
pub const MAX_DIM_ENV: &str = "FRAMEFORGE_MAX_DIM";

#[derive(Debug, Parser)]
#[command(name = "frameforge", version, about = "Weighted frame diagnostics on truncated sequences")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// JSON run configuration; flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Truncation indices, e.g. 4,8,16,32,64.
    #[arg(long = "Ns", global = true, value_delimiter = ',')]
    pub ns: Option<Vec<usize>>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    #[arg(long, global = true)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Frame bounds, completeness, minimality and excess across truncations.
    Analyze {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Weight synthesis and the weighted-frame verdict.
    Weigh(WeighArgs),
    /// Frame multiplier diagnostics.
    Multiplier {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_enum)]
        action: MultiplierAction,
    },
    /// Run a built-in counterexample pipeline and check its expected outcome.
    Reproduce {
        #[arg(long, value_enum)]
        preset: Preset,
        /// Dimension of the finite analysis domain (finite-domain preset).
        #[arg(long, default_value_t = 3)]
        d: usize,
    },
    /// Write one truncation of a spec as an explicit-sequence CSV.
    Export {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Debug, Args)]
pub struct WeighArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[command(flatten)]
    pub mode: WeighMode,
    /// Second sequence of the pair for --reproducing.
    #[arg(long, requires = "reproducing")]
    pub pair: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct WeighMode {
    /// Bessel weights with this bound.
    #[arg(long)]
    pub bessel: Option<f64>,
    /// Decide whether some weighting yields a frame.
    #[arg(long)]
    pub verdict: bool,
    /// Reweight the weakly dual pair formed with this spec.
    #[arg(long)]
    pub dual: Option<PathBuf>,
    /// Reweight a reproducing pair to this lower bound (needs --pair).
    #[arg(long)]
    pub reproducing: Option<f64>,
    /// Lower bound on span(e_1, ..., e_K) for this K.
    #[arg(long = "finite-domain")]
    pub finite_domain: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MultiplierAction {
    Apply,
    Invert,
    Unconditional,
    Shift,
    Interleave,
    Duality,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    #[value(name = "e1-plus-en")]
    E1PlusEn,
    #[value(name = "n-e1-plus-en")]
    NE1PlusEn,
    FiniteDomain,
    InterleaveIdentity,
}

/// What a command produced, before anything is written.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub table: Option<Table>,
    pub plot: Vec<Series>,
    /// Failed expectations of a reproduction preset.
    pub failures: Vec<String>,
}

/// Runs the parsed command line.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let config = inputs::resolve_config(&cli.global, std::env::var(MAX_DIM_ENV).ok().as_deref())?;
    match &cli.command {
        Command::Analyze { spec } => commands::analyze(spec, &config),
        Command::Weigh(args) => commands::weigh(args, &config),
        Command::Multiplier { spec, action } => commands::multiplier(spec, *action, &config),
        Command::Reproduce { preset, d } => presets::reproduce(*preset, *d, &config),
        Command::Export { spec, n } => commands::export(spec, *n, &config),
    }
}

/// Writes the outputs of `outcome` as requested by `global`.
pub fn emit(outcome: &Outcome, global: &GlobalArgs) -> Result<(), CliError> {
    let json = outcome.report.to_json();
    match &global.out {
        Some(path) => std::fs::write(path, &json).map_err(|e| CliError::io(path, e))?,
        None => {
            use std::io::Write;
            match std::io::stdout().lock().write_all(json.as_bytes()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    return Err(CliError::io(std::path::Path::new("<stdout>"), e))
                }
                _ => {}
            }
        }
    }
    if let (Some(path), Some(table)) = (&global.csv, &outcome.table) {
        table.write(path)?;
    }
    if let Some(path) = &global.svg {
        let svg = report::svg_plot(&outcome.report.command, &outcome.plot);
        std::fs::write(path, svg).map_err(|e| CliError::io(path, e))?;
    }
    Ok(())
}

/// Full run: parse, execute, emit. Returns the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = execute(&cli).and_then(|outcome| {
        emit(&outcome, &cli.global)?;
        if outcome.failures.is_empty() {
            Ok(())
        } else {
            Err(CliError::Expectations(outcome.failures))
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let detail = match &e {
                CliError::Expectations(list) => serde_json::json!(list),
                _ => serde_json::Value::Null,
            };
            let refusal = serde_json::json!({
                "error": { "code": e.exit_code(), "kind": e.kind(), "message": e.to_string(), "details": detail }
            });
            eprintln!("{}", serde_json::to_string_pretty(&refusal).expect("serializes"));
            e.exit_code()
        }
    }
}
