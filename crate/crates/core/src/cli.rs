//! Command-line front end.
//!
//! Exit status is 0 on success, 1 for usage, missing-input and validation
//! errors, and 2 for failures while running or writing results. Output files
//! are rendered in memory first, so nothing is written on a nonzero exit.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::config::{parse_config, Mode, RunConfig};
use crate::error::{Error, Result};
use crate::montecarlo::{
    compare_theory, run_cooperative, run_single_user, run_sprt_attack, theory_cooperative, theory_single_user,
    Counting,
};
use crate::report::{emit_csv, emit_theory_csv};

/// Environment variable that overrides the configured RNG seed.
pub const SEED_ENV: &str = "COOPSENSE_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "coopsense", about = "Cooperative spectrum-sensing simulations", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        config: PathBuf,
        /// Override the configured output path.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Write closed-form curves only, without simulation.
    Theory {
        config: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Parse and check a config file without running it.
    Validate { config: PathBuf },
}

enum Failure {
    Validation(String),
    Runtime(String),
}

impl Failure {
    fn from_run(err: Error) -> Self {
        match err {
            Error::Validation { .. } | Error::Parse { .. } => Failure::Validation(err.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

/// Entry point used by the binary. Diagnostics go to `diag`.
pub fn run<I, T>(args: I, diag: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = write!(diag, "{}", err.render());
            return match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_VALIDATION,
            };
        }
    };
    match dispatch(cli.command, diag) {
        Ok(()) => EXIT_OK,
        Err(Failure::Validation(msg)) => {
            let _ = writeln!(diag, "error: {msg}");
            EXIT_VALIDATION
        }
        Err(Failure::Runtime(msg)) => {
            let _ = writeln!(diag, "error: {msg}");
            EXIT_RUNTIME
        }
    }
}

fn load(path: &Path) -> std::result::Result<RunConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Validation(format!("cannot read config {}: {e}", path.display())))?;
    let mut cfg = parse_config(&text).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))?;
    if let Ok(seed) = std::env::var(SEED_ENV) {
        cfg.experiment.seed = seed
            .trim()
            .parse()
            .map_err(|_| Failure::Validation(format!("{SEED_ENV} must be an unsigned integer, got {seed:?}")))?;
    }
    Ok(cfg)
}

fn dispatch(command: Command, diag: &mut dyn Write) -> std::result::Result<(), Failure> {
    match command {
        Command::Validate { config } => {
            let cfg = load(&config)?;
            let _ = writeln!(
                diag,
                "{}: ok ({:?}, {} channel(s), {} trials)",
                config.display(),
                cfg.mode,
                cfg.experiment.channels.len(),
                cfg.experiment.n_trials
            );
            Ok(())
        }
        Command::Run { config, output } => {
            let mut cfg = load(&config)?;
            if let Some(out) = output {
                cfg.output_path = out;
            }
            let files = execute(&cfg, diag).map_err(Failure::from_run)?;
            write_all(&files, diag)
        }
        Command::Theory { config, output } => {
            let mut cfg = load(&config)?;
            if let Some(out) = output {
                cfg.output_path = out;
            }
            cfg.mode = Mode::TheoryOnly;
            let files = execute(&cfg, diag).map_err(Failure::from_run)?;
            write_all(&files, diag)
        }
    }
}

/// Output path for channel `index` (1-based) of a per-channel run.
pub fn channel_path(base: &Path, index: usize) -> PathBuf {
    let stem = base.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match base.extension() {
        Some(ext) => format!("{stem}_ch{index}.{}", ext.to_string_lossy()),
        None => format!("{stem}_ch{index}"),
    };
    base.with_file_name(name)
}

/// Runs a config and renders every output file in memory.
pub fn execute(cfg: &RunConfig, diag: &mut dyn Write) -> Result<Vec<(PathBuf, Vec<u8>)>> {
    let spec = &cfg.experiment;
    let base = &cfg.output_path;
    let render = |points: &[_]| -> Vec<u8> {
        let mut buf = Vec::new();
        emit_csv(points, &mut buf).expect("writing to memory");
        buf
    };
    let _ = writeln!(
        diag,
        "running {:?}: {} channel(s), {} trials, seed {}",
        cfg.mode,
        spec.channels.len(),
        spec.n_trials,
        spec.seed
    );
    let files = match cfg.mode {
        Mode::SingleUser => {
            let curves = run_single_user(spec)?;
            let mut files = Vec::new();
            for (i, curve) in curves.iter().enumerate() {
                if spec.counting == Counting::Standard {
                    let dev = compare_theory(curve, spec.n_trials)?;
                    let _ = writeln!(
                        diag,
                        "channel {}: {:.1}% of points within 3 standard errors of theory",
                        i + 1,
                        100.0 * dev.fraction_within()
                    );
                }
                files.push((channel_path(base, i + 1), render(curve)));
            }
            files
        }
        Mode::Cooperative => {
            let curve = run_cooperative(spec)?;
            if spec.counting == Counting::Standard {
                let dev = compare_theory(&curve, spec.n_trials)?;
                let _ = writeln!(
                    diag,
                    "fused: {:.1}% of points within 3 standard errors of theory",
                    100.0 * dev.fraction_within()
                );
            }
            vec![(base.clone(), render(&curve))]
        }
        Mode::SprtAttack => {
            let sprt = cfg
                .sprt
                .as_ref()
                .ok_or_else(|| Error::Config("sprt_attack needs an [sprt] section".into()))?;
            let points = run_sprt_attack(spec, sprt)?;
            for p in &points {
                let _ = writeln!(
                    diag,
                    "threshold {}: mean reports {:.2} (H0) / {:.2} (H1), undecided {}",
                    p.curve.threshold, p.mean_reports_h0, p.mean_reports_h1, p.undecided
                );
            }
            let curve: Vec<_> = points.iter().map(|p| p.curve).collect();
            vec![(base.clone(), render(&curve))]
        }
        Mode::TheoryOnly => {
            let mut files = Vec::new();
            if spec.rule.is_some() {
                let mut buf = Vec::new();
                emit_theory_csv(&theory_cooperative(spec)?, &mut buf).expect("writing to memory");
                files.push((base.clone(), buf));
            } else {
                for (i, curve) in theory_single_user(spec)?.iter().enumerate() {
                    let mut buf = Vec::new();
                    emit_theory_csv(curve, &mut buf).expect("writing to memory");
                    files.push((channel_path(base, i + 1), buf));
                }
            }
            files
        }
    };
    Ok(files)
}

fn write_all(files: &[(PathBuf, Vec<u8>)], diag: &mut dyn Write) -> std::result::Result<(), Failure> {
    let mut written: Vec<&Path> = Vec::new();
    for (path, bytes) in files {
        let result = path
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .map_or(Ok(()), std::fs::create_dir_all)
            .and_then(|_| std::fs::write(path, bytes));
        if let Err(e) = result {
            for done in written {
                let _ = std::fs::remove_file(done);
            }
            return Err(Failure::Runtime(format!("cannot write {}: {e}", path.display())));
        }
        written.push(path);
        let _ = writeln!(diag, "wrote {} ({} bytes)", path.display(), bytes.len());
    }
    Ok(())
}
