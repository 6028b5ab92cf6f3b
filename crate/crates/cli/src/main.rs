//! `lspec`: command-line front end for lattice-spectra.

mod commands;
mod emit;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lattice_spectra::spectral::DEFAULT_TOL;
use lattice_spectra::Error;

#[derive(Parser, Debug)]
#[command(name = "lspec", version, about = "Dirichlet eigenvalues of lattice configurations")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Lattice dimension. Checked against input files; required where no file is read.
    #[arg(long = "dim", global = true)]
    pub dim: Option<usize>,
    /// Solver tolerance.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Worker threads for sweeps and enumeration (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for randomized restarts.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// First Dirichlet eigenpair of a configuration.
    Eig {
        config: PathBuf,
        /// Write the normalized eigenfunction in the lattice-function text format.
        #[arg(long)]
        dump_eigenfunction: Option<PathBuf>,
    },
    /// Perimeter and scaled perimeter.
    Perimeter { config: PathBuf },
    /// Symmetric decreasing rearrangement of a configuration, or of a
    /// function with `--function`.
    Rearrange {
        input: PathBuf,
        /// Read a lattice function (coordinates then value per line).
        #[arg(long)]
        function: bool,
        /// Write the result here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Summary of the continuum extension.
    Zeta { config: PathBuf },
    /// P1 eigenvalue on the continuum extension.
    Fem { config: PathBuf },
    /// Discrete and continuum asymmetry.
    Asym {
        config: PathBuf,
        /// Quadrature tolerance relative to the measure of the extension.
        #[arg(long, default_value_t = 1e-6)]
        quadrature_tol: f64,
    },
    /// Minimal configurations of a given cardinality.
    Minimize {
        #[arg(short = 'n', long = "n")]
        n: usize,
        #[command(flatten)]
        method: MinimizeMethod,
        /// Extra local-search starts from random connected configurations.
        #[arg(long, default_value_t = 0, requires = "local")]
        restarts: usize,
        /// Start the local search here instead of the ball competitor.
        #[arg(long, requires = "local")]
        start: Option<PathBuf>,
    },
    /// Ball or cube competitor.
    Competitor {
        #[arg(short = 'n', long = "n")]
        n: usize,
        #[command(flatten)]
        shape: CompetitorShape,
        /// Also write the configuration here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fluctuation sweep from a JSON spec.
    Fluctuate {
        spec: PathBuf,
        /// Output directory.
        #[arg(long, env = "LSPEC_OUT_DIR", default_value = ".")]
        out: PathBuf,
        /// Recompute every row even when the manifest matches.
        #[arg(long)]
        fresh: bool,
    },
    /// Write the continuum extension as a legacy VTK file.
    MeshExport {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct MinimizeMethod {
    /// Exhaustive search over connected configurations.
    #[arg(long)]
    exact: bool,
    /// Local search.
    #[arg(long)]
    local: bool,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct CompetitorShape {
    #[arg(long)]
    ball: bool,
    #[arg(long)]
    cube: bool,
}

/// Exit status by error class.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NonConvergence { .. }
        | Error::NotPositiveDefinite
        | Error::RearrangementCap { .. }
        | Error::QuadratureTolerance { .. } => 3,
        Error::Io(_) => 4,
        _ => 2,
    }
}

fn run(cli: Cli) -> lattice_spectra::Result<()> {
    let g = &cli.global;
    if g.tol.is_nan() || g.tol <= 0.0 {
        return Err(Error::InvalidArgument("--tol must be positive".into()));
    }
    if let Some(t) = g.threads {
        if t == 0 {
            return Err(Error::InvalidArgument("--threads must be at least 1".into()));
        }
        // fails only when a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match cli.command {
        Command::Eig { config, dump_eigenfunction } => commands::eig(g, &config, dump_eigenfunction.as_deref()),
        Command::Perimeter { config } => commands::perimeter_cmd(g, &config),
        Command::Rearrange { input, function, out } => commands::rearrange(g, &input, function, out.as_deref()),
        Command::Zeta { config } => commands::zeta_cmd(g, &config),
        Command::Fem { config } => commands::fem(g, &config),
        Command::Asym { config, quadrature_tol } => commands::asym(g, &config, quadrature_tol),
        Command::Minimize { n, method, restarts, start } => {
            if method.exact {
                commands::minimize_exact(g, n)
            } else {
                commands::minimize_local(g, n, restarts, start.as_deref())
            }
        }
        Command::Competitor { n, shape, out } => {
            if shape.ball {
                commands::competitor_ball(g, n, out.as_deref())
            } else {
                commands::competitor_cube(g, n, out.as_deref())
            }
        }
        Command::Fluctuate { spec, out, fresh } => sweep::fluctuate(g, &spec, &out, fresh),
        Command::MeshExport { config, out } => commands::mesh_export(g, &config, &out),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
