//! fracmark: watermark keygen, embedding, verification, attack simulation,
//! corpus evaluation and localization heatmaps.
//!
//! Exit codes: 0 success (verify: Real), 1 verify judged Fake,
//! 2 usage/validation error, 3 I/O error.

mod attack_arg;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Environment variable consulted when --key is not given.
pub const KEY_ENV: &str = "FRACMARK_KEY";

#[derive(Parser)]
#[command(name = "fracmark", version, about = "Semi-fragile fractal watermarking toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct KeyArg {
    /// Key file path (falls back to $FRACMARK_KEY)
    #[arg(long)]
    key: Option<PathBuf>,
}

impl KeyArg {
    fn resolve(&self) -> Result<PathBuf, CliError> {
        if let Some(path) = &self.key {
            return Ok(path.clone());
        }
        match std::env::var_os(KEY_ENV) {
            Some(path) => Ok(PathBuf::from(path)),
            None => Err(CliError::Validation(format!(
                "no key file: pass --key or set {KEY_ENV}"
            ))),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Create a key file, either sampled from a seed or fully explicit
    Keygen {
        /// Output key file
        #[arg(long, default_value = "key.json")]
        out: PathBuf,
        /// Sample all parameters from this seed
        #[arg(long, conflicts_with_all = ["kind", "n", "r", "m", "o", "x0", "a", "k", "d"])]
        seed: Option<u64>,
        /// Curve kind: hilbert or zorder
        #[arg(long)]
        kind: Option<String>,
        /// Curve order (grid is 2^n x 2^n, image side 32 * 2^n)
        #[arg(long, default_value_t = 3)]
        n: u8,
        /// Rotation code 0..=3
        #[arg(long, default_value_t = 0)]
        r: u8,
        /// Mirror code 0..=8
        #[arg(long, default_value_t = 0)]
        m: u8,
        /// Order-modification code 0..=3 (must be 0 for zorder)
        #[arg(long, default_value_t = 0)]
        o: u8,
        /// Initial map value in [0.1, 0.9]
        #[arg(long)]
        x0: Option<f64>,
        /// Map parameter in [3.7, 4.0)
        #[arg(long)]
        a: Option<f64>,
        /// Warm-up index in [100, 1000]
        #[arg(long)]
        k: Option<u32>,
        /// Digit index in [2, 20]
        #[arg(long)]
        d: Option<u8>,
    },
    /// Embed the key's watermark into a PNG
    Embed {
        /// Input image (square, side 32 * 2^n)
        input: PathBuf,
        #[command(flatten)]
        key: KeyArg,
        /// Output PNG
        #[arg(long)]
        out: PathBuf,
        /// Quantization step override
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Verify an image against a key: prints rates and the verdict
    Verify {
        input: PathBuf,
        #[command(flatten)]
        key: KeyArg,
        /// Real/fake patch-rate threshold
        #[arg(long, default_value_t = fracmark::detect::DEFAULT_TAU)]
        tau: f64,
        /// Quantization step override (must match embedding)
        #[arg(long)]
        delta: Option<f64>,
        /// Write a red-overlay localization PNG here
        #[arg(long)]
        overlay: Option<PathBuf>,
        /// Append a CSV report row here
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Apply a named image operation or tamper proxy
    Attack {
        input: PathBuf,
        /// Output PNG
        #[arg(long)]
        out: PathBuf,
        /// Attack spec, e.g. jpeg:quality=80 or crop:x=0,y=0,w=2,h=2
        #[arg(long)]
        spec: String,
        /// Donor image for splice
        #[arg(long)]
        donor: Option<PathBuf>,
    },
    /// Run an attack grid over a corpus directory, write CSV + summary
    Evaluate {
        /// Directory of PNG images (all square, side 32 * 2^n)
        #[arg(long)]
        corpus: PathBuf,
        #[command(flatten)]
        key: KeyArg,
        /// Comma-separated attack specs; default is the benign grid
        #[arg(long)]
        attacks: Option<String>,
        /// Output CSV path
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, default_value_t = fracmark::detect::DEFAULT_TAU)]
        tau: f64,
        #[arg(long)]
        delta: Option<f64>,
    },
    /// Aggregate report CSVs into a normalized localization heatmap PNG
    Heatmap {
        /// Report CSVs produced by evaluate/verify
        inputs: Vec<PathBuf>,
        /// Output PNG
        #[arg(long)]
        out: PathBuf,
        /// Pixels per grid cell
        #[arg(long, default_value_t = 32)]
        cell: u32,
    },
    /// Center-crop and resize images into a watermarkable corpus
    Prepare {
        inputs: Vec<PathBuf>,
        /// Output directory
        #[arg(long)]
        out_dir: PathBuf,
        /// Target side, must be 32 * 2^n
        #[arg(long, default_value_t = 256)]
        size: u32,
    },
    /// Generate a synthetic desk corpus
    Synth {
        /// Output directory
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, default_value_t = 256)]
        size: u32,
        #[arg(long, default_value_t = 1000)]
        seed: u64,
    },
}

/// CLI failure with its exit-code class.
#[derive(Debug)]
pub enum CliError {
    /// Bad parameters or inconsistent inputs: exit 2.
    Validation(String),
    /// Filesystem or codec trouble: exit 3.
    Io(String),
}

impl From<fracmark::Error> for CliError {
    fn from(err: fracmark::Error) -> Self {
        match err {
            fracmark::Error::Image(e) => CliError::Io(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Io(err.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(err: csv::Error) -> Self {
        CliError::Io(err.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Keygen {
            out,
            seed,
            kind,
            n,
            r,
            m,
            o,
            x0,
            a,
            k,
            d,
        } => commands::keygen(&out, seed, kind.as_deref(), n, r, m, o, x0, a, k, d),
        Command::Embed {
            input,
            key,
            out,
            delta,
        } => key
            .resolve()
            .and_then(|key| commands::embed(&input, &key, &out, delta)),
        Command::Verify {
            input,
            key,
            tau,
            delta,
            overlay,
            csv,
        } => key.resolve().and_then(|key| {
            commands::verify(&input, &key, tau, delta, overlay.as_deref(), csv.as_deref())
        }),
        Command::Attack {
            input,
            out,
            spec,
            donor,
        } => commands::attack(&input, &out, &spec, donor.as_deref()),
        Command::Evaluate {
            corpus,
            key,
            attacks,
            csv,
            tau,
            delta,
        } => key.resolve().and_then(|key| {
            commands::evaluate(&corpus, &key, attacks.as_deref(), &csv, tau, delta)
        }),
        Command::Heatmap { inputs, out, cell } => commands::heatmap(&inputs, &out, cell),
        Command::Prepare {
            inputs,
            out_dir,
            size,
        } => commands::prepare(&inputs, &out_dir, size),
        Command::Synth {
            out_dir,
            count,
            size,
            seed,
        } => commands::synth(&out_dir, count, size, seed),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
