use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use chevweil::{PrimeSet, Report};
use chevweil_cli::{cmd_certify, cmd_fermat, cmd_verify, RunOptions, DEFAULT_FERMAT_BOUND};

#[derive(Parser)]
#[command(name = "chevweil", version, about = "Bad primes and ramification checks for explicit covers")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the JSON report to this path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Directory receiving `<command>.json` when `--out` is not given.
    #[arg(long, global = true, env = "CHEVWEIL_REPORT_DIR")]
    report_dir: Option<PathBuf>,

    /// Rendering printed on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(clap::Args)]
struct Bounds {
    /// Largest Nullstellensatz exponent tried.
    #[arg(long = "max-N")]
    max_n: Option<u32>,
    /// Largest degree of the certificate coefficients.
    #[arg(long)]
    max_degree: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Certify that a cover file describes an unramified cover and compute S.
    Certify {
        file: PathBuf,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Lift S-integral points along a certified cover and check ramification.
    Verify {
        file: PathBuf,
        /// File with one point per line.
        #[arg(long, conflicts_with = "sample")]
        points: Option<PathBuf>,
        /// Number of S-integral points to sample.
        #[arg(long)]
        sample: Option<usize>,
        /// Primes above which ramification is tested are capped by this.
        #[arg(long)]
        prime_budget: Option<u64>,
        /// Replace the computed S, e.g. "2, inf". For negative controls only.
        #[arg(long = "force-S")]
        force_s: Option<PrimeSet>,
        #[command(flatten)]
        bounds: Bounds,
    },
    /// Classify a x^p + b y^q = c z^r and list small primitive solutions.
    Fermat {
        #[arg(allow_negative_numbers = true)]
        a: i64,
        #[arg(allow_negative_numbers = true)]
        b: i64,
        #[arg(allow_negative_numbers = true)]
        c: i64,
        p: u32,
        q: u32,
        r: u32,
        #[arg(long, default_value_t = DEFAULT_FERMAT_BOUND)]
        bound: u64,
    },
}

fn write(path: &Path, report: &Report) -> Result<(), String> {
    fs::write(path, report.to_json()).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match &cli.command {
        Command::Certify { file, bounds } => {
            let opts = RunOptions {
                max_n: bounds.max_n,
                max_degree: bounds.max_degree,
                ..RunOptions::default()
            };
            cmd_certify(file, &opts)
        }
        Command::Verify {
            file,
            points,
            sample,
            prime_budget,
            force_s,
            bounds,
        } => {
            let opts = RunOptions {
                max_n: bounds.max_n,
                max_degree: bounds.max_degree,
                prime_budget: *prime_budget,
                sample: *sample,
                force_s: force_s.clone(),
            };
            cmd_verify(file, points.as_deref(), &opts)
        }
        Command::Fermat { a, b, c, p, q, r, bound } => cmd_fermat([*a, *b, *c], [*p, *q, *r], *bound),
    };
    match cli.format {
        Format::Text => print!("{}", report.to_text()),
        Format::Json => print!("{}", report.to_json()),
    }
    for m in &report.messages {
        eprintln!("chevweil: {m}");
    }
    let target = cli
        .out
        .clone()
        .or_else(|| cli.report_dir.as_ref().map(|d| d.join(format!("{}.json", report.command))));
    if let Some(path) = target {
        if let Err(e) = write(&path, &report) {
            eprintln!("chevweil: {e}");
            return ExitCode::from(2);
        }
    }
    ExitCode::from(report.exit_code as u8)
}
