mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::check::{run_check, Suite};
use config::RunConfig;
use error::CliResult;

#[derive(Parser)]
#[command(
    name = "qgeom",
    version,
    about = "Quantum geometric tensors and higher-order geometry of coherent-state families"
)]
struct Cli {
    #[command(flatten)]
    opts: Options,
    #[command(subcommand)]
    command: Command,
}

/// Run configuration. Every flag can also be set as `key = value` in the
/// file given by `--config`; flags win.
#[derive(Args)]
struct Options {
    /// Flat key = value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// glauber | su2 | su11 | two-oscillator
    #[arg(long, global = true)]
    model: Option<String>,
    /// Representation label; complex values as `a+bi` (series command only).
    #[arg(long, global = true, allow_hyphen_values = true)]
    j: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    m: Option<String>,
    /// SU(1,1) series: dplus | dminus | projective-discrete | ck0 | ck12 | supplementary | projective-continuous
    #[arg(long, global = true)]
    series: Option<String>,
    /// Truncation dimension for infinite-dimensional models.
    #[arg(long, global = true)]
    trunc: Option<String>,
    /// `lo:hi:count,lo:hi:count`; defaults to the model chart, 5 points per axis.
    #[arg(long, global = true, allow_hyphen_values = true)]
    grid: Option<String>,
    /// tangent | logoverlap
    #[arg(long, global = true)]
    engine: Option<String>,
    /// Finite-difference step for C2.
    #[arg(long = "fd-step", global = true)]
    fd_step: Option<String>,
    /// Inverse mass tensor `q11,q22,q12re,q12im`.
    #[arg(long = "mass-q", global = true, allow_hyphen_values = true)]
    mass_q: Option<String>,
    /// `latitude:theta0:n`, `circle:c0:c1:r:n` or `rect:lo0:hi0:lo1:hi1:n`.
    #[arg(long = "loop", global = true, allow_hyphen_values = true)]
    loop_: Option<String>,
    /// `s0:s1:v0:v1:length:steps`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    geodesic: Option<String>,
    #[arg(long, global = true)]
    out: Option<String>,
    /// json | csv
    #[arg(long, global = true)]
    format: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
}

impl Options {
    fn overrides(&self) -> Vec<(String, String)> {
        let pairs = [
            ("model", &self.model),
            ("j", &self.j),
            ("m", &self.m),
            ("series", &self.series),
            ("trunc", &self.trunc),
            ("grid", &self.grid),
            ("engine", &self.engine),
            ("fd-step", &self.fd_step),
            ("mass-q", &self.mass_q),
            ("loop", &self.loop_),
            ("geodesic", &self.geodesic),
            ("out", &self.out),
            ("format", &self.format),
            ("seed", &self.seed),
        ];
        pairs
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
            .collect()
    }
}

#[derive(Subcommand)]
enum Command {
    /// C2, det, metric eigenvalues and Berry connection on a grid.
    Tensor,
    /// Classical and quantum Christoffel symbols on a grid.
    Christoffel,
    /// Riemann tensor, Ricci tensor and scalar curvature on a grid.
    Riemann,
    /// Berry phase, sigma flux and vector holonomy around --loop.
    Holonomy,
    /// Unit-speed geodesic of the quantum metric.
    Geodesic,
    /// Born-Oppenheimer potential, vector potential and force on a grid.
    Bo,
    /// Uncertainty determinant and principal minors on a grid.
    Uncertainty,
    /// Run invariant suites; exit 1 on any failure.
    Check {
        #[arg(value_enum, default_value_t = Suite::All)]
        suite: Suite,
    },
    /// Validate quantum numbers against a series.
    Series,
    /// Re-read a JSON report and reproduce its summary statistics.
    Summary { report: PathBuf },
}

fn run(cli: Cli) -> CliResult<()> {
    if let Command::Summary { report } = &cli.command {
        return commands::run_summary(report);
    }
    let cfg = RunConfig::load(cli.opts.config.as_deref(), cli.opts.overrides())?;
    log::info!("config {:?}", cfg.entries);
    match cli.command {
        Command::Tensor => commands::grid::run_tensor(&cfg),
        Command::Christoffel => commands::grid::run_christoffel(&cfg),
        Command::Riemann => commands::grid::run_riemann(&cfg),
        Command::Holonomy => commands::paths::run_holonomy(&cfg),
        Command::Geodesic => commands::paths::run_geodesic(&cfg),
        Command::Bo => commands::grid::run_bo(&cfg),
        Command::Uncertainty => commands::grid::run_uncertainty(&cfg),
        Command::Check { suite } => run_check(suite, &cfg),
        Command::Series => commands::series::run_series(&cfg),
        Command::Summary { .. } => unreachable!("handled above"),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qgeom: {e}");
            e.exit_code()
        }
    }
}
