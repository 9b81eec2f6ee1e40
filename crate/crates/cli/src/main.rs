//! `twistlab`: twisted purity spectra and the G_k ansatz from the command line.

mod commands;
mod exit;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use exit::Failure;

#[derive(Parser, Debug)]
#[command(name = "twistlab", version, about = "Twisted purities and G_k correlation classes of fermionic states")]
struct Cli {
    /// Worker threads for the parallel kernels.
    #[arg(long, global = true, env = "TWISTLAB_THREADS")]
    threads: Option<usize>,

    /// Omit the `# generated ...` header line from CSV output.
    #[arg(long, global = true)]
    no_timestamp: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Twisted purity spectrum of a state file.
    Purity(PurityArgs),
    /// Eigenstate spectra of the periodic Hubbard chain at half filling.
    Hubbard(HubbardArgs),
    /// Ground-state spectrum of a seeded complex SYK realization at half filling.
    Syk(SykArgs),
    /// Monte-Carlo average of ω_k over real Haar-random states.
    Haar(HaarArgs),
    /// Spectrum of a wedge product of Bell-like pairs.
    Bell(BellArgs),
    /// Fit ansatz parameters to a state.
    Fit(FitArgs),
    /// Build a state from ansatz parameters.
    Build(BuildArgs),
    /// Randomized invariant checks.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
pub struct PurityArgs {
    pub state_file: PathBuf,
    /// Highest order (defaults to n).
    #[arg(long)]
    pub kmax: Option<usize>,
    /// auto, rdm-trace, residual-sum, tensor-apply or all.
    #[arg(long, default_value = "auto")]
    pub method: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct HubbardArgs {
    #[arg(long)]
    pub sites: usize,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    #[arg(long = "U", default_value_t = 0.0)]
    pub u: f64,
    /// `ground` or a 0-based eigenstate index.
    #[arg(long, default_value = "ground")]
    pub state: String,
    #[arg(long)]
    pub out_spectrum: Option<PathBuf>,
    #[arg(long)]
    pub out_state: Option<PathBuf>,
    /// Diagonalize only the S_z = 0 block.
    #[arg(long)]
    pub sz_restrict: bool,
}

#[derive(Args, Debug)]
pub struct SykArgs {
    #[arg(long)]
    pub modes: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// `literal`: one coupling per a>b>c>d. `generic`: Hermitian J over all pairs of pairs.
    #[arg(long, value_enum, default_value_t = SykVariant::Literal)]
    pub variant: SykVariant,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub out_state: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct HaarArgs {
    #[arg(long)]
    pub l: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Highest order (defaults to min(n, l-n)).
    #[arg(long)]
    pub kmax: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BellArgs {
    #[arg(long)]
    pub copies: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct FitArgs {
    pub state_file: PathBuf,
    /// Reference configuration, comma-separated 1-based modes (defaults to 1..n).
    #[arg(long = "G")]
    pub g: Option<String>,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub out_params: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BuildArgs {
    pub params_file: PathBuf,
    #[arg(long)]
    pub out_state: Option<PathBuf>,
    /// State file to report the fidelity against.
    #[arg(long)]
    pub compare: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SykVariant {
    Literal,
    Generic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Invariants,
    Oddeven,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[arg(long, default_value_t = 8)]
    pub l: usize,
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::runtime(format!("thread pool: {e}")))?;
    }
    let stamp = output::Stamp::new(!cli.no_timestamp);
    match cli.command {
        Command::Purity(a) => commands::purity(&a, &stamp),
        Command::Hubbard(a) => commands::hubbard(&a, &stamp),
        Command::Syk(a) => commands::syk(&a, &stamp),
        Command::Haar(a) => commands::haar(&a, &stamp),
        Command::Bell(a) => commands::bell(&a, &stamp),
        Command::Fit(a) => commands::fit(&a),
        Command::Build(a) => commands::build(&a),
        Command::Verify(a) => verify::run(&a, &stamp),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::PARSE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
