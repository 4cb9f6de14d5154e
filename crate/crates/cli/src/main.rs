mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use dirac_basis::basis::ExpandMode;

use crate::config::{Arithmetic, Config, ORTHONORMALITY};

const THREADS_VAR: &str = "DIRAC_BASIS_THREADS";

#[derive(Parser)]
#[command(name = "dirac-basis", version, about = "Bases and boundary tools for the quaternionic Dirac operator on the unit ball")]
struct Cli {
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[arg(long, global = true)]
    quad_order: Option<usize>,

    #[arg(long, global = true, value_enum)]
    arithmetic: Option<Arithmetic>,

    #[arg(long, global = true)]
    r_grid: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build or verify a basis file.
    #[command(subcommand)]
    Basis(BasisCommand),
    /// Expand a polynomial in a basis and report residuals.
    Expand {
        #[arg(long)]
        basis: PathBuf,
        /// Symbolic function JSON.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        terms: usize,
        #[arg(long, value_enum, default_value = "auto")]
        mode: Mode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    #[command(subcommand)]
    Poisson(PoissonCommand),
    #[command(subcommand)]
    Approx(ApproxCommand),
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Subcommand)]
enum BasisCommand {
    Build {
        #[arg(long)]
        max_degree: Option<u32>,
        #[arg(long)]
        out: PathBuf,
    },
    Verify {
        file: PathBuf,
        /// Orthonormality tolerance.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum PoissonCommand {
    /// Harmonic extension of boundary data to interior points.
    Extend {
        /// Symbolic function JSON restricted to the sphere.
        #[arg(long)]
        boundary: PathBuf,
        /// JSON array of points `[x0, x1, x2, x3]` with norm below 1.
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ApproxCommand {
    /// Least-squares polynomial fit on a grid in the ball.
    Fit {
        /// Built-in target name or a JSON file of `{point, value}` samples.
        #[arg(long)]
        target: String,
        #[arg(long)]
        degree: u32,
        /// Grid points per axis for built-in targets.
        #[arg(long, default_value_t = 9)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum VerifyCommand {
    /// Run the acceptance suite.
    All {
        /// Run only these criteria.
        #[arg(long = "criterion")]
        criteria: Vec<u32>,
        /// Also write the outcomes as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Mode {
    Literal,
    Conjugated,
    Auto,
}

impl From<Mode> for ExpandMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Literal => ExpandMode::Literal,
            Mode::Conjugated => ExpandMode::Conjugated,
            Mode::Auto => ExpandMode::Auto,
        }
    }
}

/// Failure classes mapped to exit codes.
enum Failure {
    Invariant(anyhow::Error),
    Usage(anyhow::Error),
}

fn classify(e: anyhow::Error) -> Failure {
    use dirac_basis::Error as E;
    match e.downcast_ref::<E>() {
        Some(E::InvalidArgument(_) | E::OutOfRange { .. } | E::DimensionMismatch { .. } | E::Json(_) | E::Io(_)) | None => Failure::Usage(e),
        Some(_) => Failure::Invariant(e),
    }
}

fn init_threads() -> anyhow::Result<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().with_context(|| format!("{THREADS_VAR}={raw} is not a thread count"))?;
    if n == 0 {
        anyhow::bail!("{THREADS_VAR} must be positive");
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn load_config(cli: &Cli) -> anyhow::Result<Config> {
    let mut cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(q) = cli.quad_order {
        cfg.quad_order = q;
    }
    if let Some(a) = cli.arithmetic {
        cfg.arithmetic = a;
    }
    if let Some(r) = cli.r_grid {
        cfg.r_grid = r;
    }
    match &cli.command {
        Command::Basis(BasisCommand::Build { max_degree: Some(m), .. }) => cfg.max_degree = *m,
        Command::Basis(BasisCommand::Verify { tol: Some(t), .. }) => {
            cfg.tolerances.insert(ORTHONORMALITY.to_string(), *t);
        }
        _ => {}
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<bool, Failure> {
    init_threads().map_err(Failure::Usage)?;
    let cfg = load_config(&cli).map_err(Failure::Usage)?;
    let result = match &cli.command {
        Command::Basis(BasisCommand::Build { out, .. }) => commands::basis_build(&cfg, out),
        Command::Basis(BasisCommand::Verify { file, out: o, .. }) => commands::basis_verify(&cfg, file, o.as_deref()),
        Command::Expand { basis, input, terms, mode, out: o } => {
            commands::expand_cmd(&cfg, basis, input, *terms, (*mode).into(), o.as_deref())
        }
        Command::Poisson(PoissonCommand::Extend { boundary, points, out: o }) => {
            commands::poisson_extend(&cfg, boundary, points, o.as_deref())
        }
        Command::Approx(ApproxCommand::Fit { target, degree, grid, out: o }) => commands::approx_fit(target, *degree, *grid, o.as_deref()),
        Command::Verify(VerifyCommand::All { criteria, out: o }) => commands::verify_all(criteria, o.as_deref()),
    };
    result.map_err(classify)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: invariant check failed; see the report");
            ExitCode::from(1)
        }
        Err(Failure::Invariant(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
