//! `tomokit`: command-line front end for the tomogram toolkit.
//!
//! Exit codes: 0 when every selected check passes, 1 when one fails, 2 on
//! usage or data errors.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tomokit::{GridSpec, PhaseGridSpec, StateSpec};

#[derive(Debug, Parser)]
#[command(name = "tomokit", version, about = "Tests whether functions are quantum or classical tomograms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List catalog states.
    Catalog {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Radon transform, filtered backprojection or characteristic function.
    Transform(TransformArgs),
    /// Run tomogram validity checks.
    Validate(ValidateArgs),
    /// Moment conditions, cubic flux and Hermite-class projection.
    Conserve(ConserveArgs),
    /// Evolve a state under a polynomial potential.
    Evolve(EvolveArgs),
    /// Merge JSON reports; passes when every merged report passed.
    Report {
        #[arg(long, num_args = 1.., required = true)]
        merge: Vec<PathBuf>,
        #[arg(long, default_value = "tomokit-report.json")]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Optical grid half-width.
    #[arg(long, default_value_t = 7.0, value_parser = positive_real)]
    pub x_max: f64,
    #[arg(long, default_value_t = 281)]
    pub n_x: usize,
    #[arg(long, default_value_t = 64)]
    pub n_theta: usize,
    /// Phase-space grid half-width in q (and in p unless overridden).
    #[arg(long, default_value_t = 7.0, value_parser = positive_real)]
    pub phase_extent: f64,
    /// Phase-space grid half-width in p.
    #[arg(long, value_parser = positive_real)]
    pub phase_p_extent: Option<f64>,
    /// Nodes per phase-space axis.
    #[arg(long, default_value_t = 256)]
    pub phase_n: usize,
}

impl GridArgs {
    pub fn optical(&self) -> tomokit::Result<GridSpec> {
        GridSpec::new(self.x_max, self.n_x, self.n_theta)
    }

    pub fn phase(&self) -> tomokit::Result<PhaseGridSpec> {
        let spec = PhaseGridSpec {
            q_max: self.phase_extent,
            p_max: self.phase_p_extent.unwrap_or(self.phase_extent),
            n_q: self.phase_n,
            n_p: self.phase_n,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TransformOp {
    Radon,
    Iradon,
    Char,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[arg(long)]
    pub state: StateSpec,
    #[arg(long, value_enum)]
    pub op: TransformOp,
    /// Output grid manifest (radon, iradon) or CSV (char).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Half-width of the (mu, nu) grid for `char`.
    #[arg(long, default_value_t = 5.0, value_parser = positive_real)]
    pub char_extent: f64,
    #[arg(long, default_value_t = 41)]
    pub char_n: usize,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub state: StateSpec,
    /// Comma-separated: structural, hirschman, klm, bochner, overlap,
    /// fixedpoint, conservation, or all.
    #[arg(long, default_value = "all", value_delimiter = ',')]
    pub checks: Vec<String>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Number of positivity point sets.
    #[arg(long, default_value_t = 100)]
    pub sets: usize,
    #[arg(long, default_value_t = 8)]
    pub set_size: usize,
    #[arg(long, default_value_t = 3.0, value_parser = positive_real)]
    pub radius: f64,
    /// Reference states for the overlap check (comma-separated).
    #[arg(long, value_delimiter = ',')]
    pub against: Vec<String>,
    #[arg(long, default_value = "tomokit-validate.json")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 1e-6, value_parser = positive_real)]
    pub tol_normalization: f64,
    #[arg(long, default_value_t = 1e-10, value_parser = positive_real)]
    pub tol_negativity: f64,
    #[arg(long, default_value_t = 1e-8, value_parser = positive_real)]
    pub tol_parity: f64,
    #[arg(long, default_value_t = 1e-10, value_parser = positive_real)]
    pub tol_homogeneity: f64,
    #[arg(long, default_value_t = 1e-3, value_parser = positive_real)]
    pub tol_hirschman: f64,
    /// Relative eigenvalue tolerance for KLM and Bochner matrices.
    #[arg(long, default_value_t = 1e-8, value_parser = positive_real)]
    pub tol_positivity: f64,
    #[arg(long, default_value_t = 1e-3, value_parser = positive_real)]
    pub tol_overlap: f64,
    #[arg(long, default_value_t = 5e-3, value_parser = positive_real)]
    pub tol_fixedpoint: f64,
    #[arg(long, default_value_t = 1e-6, value_parser = positive_real)]
    pub tol_conservation: f64,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Args)]
pub struct ConserveArgs {
    #[arg(long)]
    pub state: StateSpec,
    /// Highest moment order examined.
    #[arg(long, default_value_t = 4)]
    pub mmax: usize,
    /// Coupling of a `q^3` term whose normalization flux is reported.
    #[arg(long)]
    pub flux_c3: Option<f64>,
    /// Fock cutoff of the Hermite-class projection.
    #[arg(long, default_value_t = 10)]
    pub n_max: usize,
    #[arg(long, default_value_t = 1e-6, value_parser = positive_real)]
    pub tol: f64,
    #[arg(long, default_value = "tomokit-conserve.json")]
    pub out: PathBuf,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvolveMethod {
    /// Fock evolution for Hermite-class states, cubic flux otherwise.
    Drift,
    Fock,
    Liouville,
    Moyal,
    Harmonic,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[arg(long)]
    pub state: StateSpec,
    /// Terms `ck=value`, e.g. "c2=0.5,c3=0.1".
    #[arg(long)]
    pub potential: String,
    #[arg(long = "t", default_value_t = 1.0)]
    pub t_end: f64,
    #[arg(long, value_enum, default_value_t = EvolveMethod::Drift)]
    pub method: EvolveMethod,
    /// Time step; defaults to the method's stability limit.
    #[arg(long, value_parser = positive_real)]
    pub dt: Option<f64>,
    /// Fock cutoff for `--method fock`.
    #[arg(long, default_value_t = 40)]
    pub n_max: usize,
    #[arg(long, default_value_t = 1e-6, value_parser = positive_real)]
    pub tol: f64,
    #[arg(long, default_value = "tomokit-evolve.json")]
    pub out: PathBuf,
    #[command(flatten)]
    pub grid: GridArgs,
}

fn positive_real(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("`{s}` is not a positive real")),
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("TOMOKIT_THREADS") else { return Ok(()) };
    let n: usize = value
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| format!("TOMOKIT_THREADS must be a positive integer, got `{value}`"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let outcome = match cli.command {
        Command::Catalog { out } => commands::catalog(out.as_deref()),
        Command::Transform(args) => commands::transform(&args),
        Command::Validate(args) => commands::validate(&args),
        Command::Conserve(args) => commands::conserve(&args),
        Command::Evolve(args) => commands::evolve(&args),
        Command::Report { merge, out } => commands::merge(&merge, &out),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
