//! `jacobi-pe`: region maps, pseudospectra, finite section solves and
//! stability checks for random tridiagonal operators.
//!
//! Exit codes: 0 success, 1 runtime or I/O failure, 2 bad arguments or
//! input, 3 invalid grid, 4 finite sections diverge without `--shift auto`,
//! 5 a singular finite section was found. Errors are printed to stderr as
//! one JSON object per line.

mod args;
mod commands;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use output::RunManifest;

#[derive(Debug, Clone)]
pub struct CliError {
    pub code: u8,
    pub kind: &'static str,
    pub message: String,
    pub detail: Option<Value>,
}

impl CliError {
    pub fn new(code: u8, kind: &'static str, message: String) -> Self {
        Self {
            code,
            kind,
            message,
            detail: None,
        }
    }

    pub fn parse(message: String) -> Self {
        Self::new(2, "parse", message)
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Self::new(1, "io", format!("{}: {e}", path.display()))
    }

    pub fn with_detail(mut self, detail: Value) -> Self {
        self.detail = Some(detail);
        self
    }

    fn to_json(&self) -> Value {
        let mut v = json!({ "error": self.kind, "code": self.code, "message": self.message });
        if let Some(d) = &self.detail {
            v["detail"] = d.clone();
        }
        v
    }
}

impl From<jacobi_pe::Error> for CliError {
    fn from(e: jacobi_pe::Error) -> Self {
        use jacobi_pe::Error as E;
        let (code, kind) = match &e {
            E::Parse(_) => (2, "parse"),
            E::InvalidAlphabet(_) => (2, "invalid_alphabet"),
            E::InvalidArgument(_) => (2, "invalid_argument"),
            E::InvalidGrid(_) => (3, "invalid_grid"),
            _ => (1, "numerical"),
        };
        Self::new(code, kind, e.to_string())
    }
}

/// A finished run: its manifest, and a nonzero status that is still a
/// complete result (exit codes 4 and 5).
pub struct Done {
    pub manifest: RunManifest,
    pub status: Option<CliError>,
}

#[derive(Parser, Debug)]
#[command(name = "jacobi-pe", version, about = "Spectral tools for random tridiagonal operators")]
struct Cli {
    /// Worker threads (default: JACOBI_PE_THREADS, else all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Comma list of csv, ppm (rasters) and json.
    #[arg(long, default_value = "csv,ppm,json")]
    pub format: String,
}

#[derive(Args, Debug, Clone)]
pub struct GridArgs {
    /// x0,x1,y0,y1
    #[arg(long, allow_hyphen_values = true, default_value = "-4,4,-4,4")]
    pub window: String,
    /// N or NX,NY
    #[arg(long, default_value = "201")]
    pub res: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Partition of the plane into E0, E, E1, Em1 on a grid.
    Regions {
        #[arg(long)]
        triple: String,
        #[command(flatten)]
        grid: GridArgs,
        /// Also write exact Σ and Σ₊ masks (needs U = {0} or W = {0}).
        #[arg(long)]
        exact_bidiagonal: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Resolvent norm fields and ε-pseudospectra of growing sections.
    Pseudospec {
        #[arg(long)]
        triple: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        grid: GridArgs,
        /// a..b (doubling), a..b:step, or a comma list.
        #[arg(long, default_value = "100..400")]
        sizes: String,
        #[arg(long, default_value = "0.1")]
        eps: String,
        #[arg(long, default_value = "2")]
        norm: String,
        /// Use `≥ 1/ε` instead of `> 1/ε`.
        #[arg(long)]
        closed: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Finite section solve of a JSON job.
    Fsm {
        /// Job file (`-` for stdin).
        #[arg(long)]
        job: String,
        /// auto, 0, +1 or -1; overrides the job.
        #[arg(long, allow_hyphen_values = true)]
        shift: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Stability, duality and glueing checks of finite sections at λ.
    Check {
        #[arg(long)]
        triple: String,
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        lambda: String,
        /// Number of random seeds (1..=N).
        #[arg(long, default_value_t = 3)]
        seeds: u64,
        #[arg(long, default_value = "16..256")]
        sizes: String,
        #[command(flatten)]
        common: Common,
    },
    /// Inverse norm profile `‖(A_n - λ)⁻¹‖` over sizes.
    Profile {
        #[arg(long)]
        triple: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        lambda: String,
        #[arg(long, default_value = "10..1280")]
        sizes: String,
        #[arg(long, default_value = "2")]
        norm: String,
        #[command(flatten)]
        common: Common,
    },
    /// Reruns a manifest into a new directory and compares output hashes.
    Replay {
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn setup_threads(flag: Option<usize>) -> Result<(), CliError> {
    let n = match flag {
        Some(n) => Some(n),
        None => match std::env::var("JACOBI_PE_THREADS") {
            Ok(s) => Some(
                s.trim()
                    .parse()
                    .map_err(|_| CliError::parse(format!("JACOBI_PE_THREADS=`{s}` is not a count")))?,
            ),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        if n == 0 {
            return Err(CliError::parse("thread count must be at least 1".into()));
        }
        // a second initialization (replay) keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn run(command: Command, argv: Vec<String>) -> Result<Done, CliError> {
    match command {
        Command::Regions {
            triple,
            grid,
            exact_bidiagonal,
            common,
        } => commands::regions(&triple, &grid, exact_bidiagonal, &common, argv),
        Command::Pseudospec {
            triple,
            seed,
            grid,
            sizes,
            eps,
            norm,
            closed,
            common,
        } => commands::pseudospec(
            commands::PseudospecArgs {
                triple: &triple,
                seed,
                grid: &grid,
                sizes: &sizes,
                eps: &eps,
                norm: &norm,
                closed,
            },
            &common,
            argv,
        ),
        Command::Fsm { job, shift, common } => commands::fsm(&job, shift.as_deref(), &common, argv),
        Command::Check {
            triple,
            lambda,
            seeds,
            sizes,
            common,
        } => commands::check(&triple, &lambda, seeds, &sizes, &common, argv),
        Command::Profile {
            triple,
            seed,
            lambda,
            sizes,
            norm,
            common,
        } => commands::profile(&triple, seed, &lambda, &sizes, &norm, &common, argv),
        Command::Replay { manifest, out } => replay(&manifest, &out),
    }
}

fn replay(path: &Path, out: &Path) -> Result<Done, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let old: RunManifest =
        serde_json::from_str(&text).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
    let mut argv = vec!["jacobi-pe".to_string()];
    argv.extend(old.argv.iter().cloned());
    argv.push("--out".into());
    argv.push(out.display().to_string());
    let cli = Cli::try_parse_from(&argv).map_err(|e| CliError::parse(e.to_string()))?;
    if matches!(cli.command, Command::Replay { .. }) {
        return Err(CliError::parse("a manifest cannot replay another replay".into()));
    }
    let done = run(cli.command, old.argv.clone())?;
    let differing: Vec<&String> = old
        .outputs
        .iter()
        .filter(|(name, hash)| done.manifest.outputs.get(*name) != Some(*hash))
        .map(|(name, _)| name)
        .chain(done.manifest.outputs.keys().filter(|k| !old.outputs.contains_key(*k)))
        .collect();
    if !differing.is_empty() {
        return Err(CliError::new(1, "replay_mismatch", "outputs differ from the manifest".into())
            .with_detail(json!({ "files": differing })));
    }
    println!("{}", json!({ "replay": "identical", "files": old.outputs.len() }));
    Ok(done)
}

fn report(e: &CliError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(e.code)
}

fn main() -> ExitCode {
    let raw: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&raw) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion)
                || matches!(e.kind(), ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand)
            {
                let _ = e.print();
                return if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                    ExitCode::from(2)
                } else {
                    ExitCode::SUCCESS
                };
            }
            let msg = e.render().to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
            return report(&CliError::parse(first));
        }
    };
    if let Err(e) = setup_threads(cli.threads) {
        return report(&e);
    }
    let argv = output::replayable_argv(&raw[1..]);
    match run(cli.command, argv) {
        Ok(Done { status: None, .. }) => ExitCode::SUCCESS,
        Ok(Done { status: Some(e), .. }) => report(&e),
        Err(e) => report(&e),
    }
}
