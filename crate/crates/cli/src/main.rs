mod commands;
mod config;
mod output;
mod presets;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::Value;

use config::{Flags, Settings};
use output::{unix_now, write_report, Manifest, Report};
use presets::Preset;

/// Spectral gap experiments on sparse random symmetric matrices.
#[derive(Debug, Parser)]
#[command(name = "gaplab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample one matrix and print it
    Gen,
    /// Eigen-decomposition of a sampled or given matrix
    Spectrum {
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Gap tail frequencies for selected eigenvalue indices (1-based)
    Gaps {
        #[arg(long, value_delimiter = ',')]
        indices: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        deltas: Option<Vec<f64>>,
    },
    /// Approximate LCD of given vectors, or of eigenvector blocks
    Lcd {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        stride: usize,
    },
    /// Compressible / dominated / incompressible classification
    Classify {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        stride: usize,
    },
    /// Nodal domains of a given graph, or of G(n, p) samples
    Nodal {
        #[arg(long)]
        edges: Option<PathBuf>,
    },
    /// Small-ball probability of <w, X> for a fixed direction
    Smallball {
        /// `uniform`, `e1`, or a file holding one vector
        #[arg(long, default_value = "uniform")]
        vector: String,
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
    },
    /// Run a named experiment with its default sizes
    Experiment {
        #[arg(long, value_enum)]
        preset: Preset,
        #[arg(long, value_delimiter = ',')]
        ns: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        deltas: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
    },
    /// Regenerate one trial record from a manifest and compare
    Replay {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        trial: u64,
    },
}

impl Command {
    fn name(&self) -> String {
        match self {
            Command::Gen => "gen".into(),
            Command::Spectrum { .. } => "spectrum".into(),
            Command::Gaps { .. } => "gaps".into(),
            Command::Lcd { .. } => "lcd".into(),
            Command::Classify { .. } => "classify".into(),
            Command::Nodal { .. } => "nodal".into(),
            Command::Smallball { .. } => "smallball".into(),
            Command::Experiment { preset, .. } => {
                format!("experiment {}", clap::ValueEnum::to_possible_value(preset).unwrap().get_name())
            }
            Command::Replay { .. } => "replay".into(),
        }
    }
}

fn dispatch(s: &Settings, command: Command) -> Result<Report> {
    match command {
        Command::Gen => commands::gen(s),
        Command::Spectrum { input } => commands::spectrum(s, input.as_deref()),
        Command::Gaps { indices, deltas } => commands::gaps(s, (200, 0.5, 500), indices, deltas),
        Command::Lcd { input, stride } => commands::lcd(s, input.as_deref(), stride),
        Command::Classify { input, stride } => commands::classify(s, input.as_deref(), stride),
        Command::Nodal { edges } => commands::nodal(s, edges.as_deref()),
        Command::Smallball { vector, eps } => commands::smallball(s, &vector, eps),
        Command::Experiment { preset, ns, deltas, eps } => presets::run(s, preset, ns, deltas, eps),
        Command::Replay { .. } => unreachable!("handled before dispatch"),
    }
}

/// Returns whether the regenerated record matched.
fn replay(manifest_path: &Path, trial: u64) -> Result<bool> {
    let text = std::fs::read_to_string(manifest_path)
        .with_context(|| format!("reading {}", manifest_path.display()))?;
    let manifest: Manifest = serde_json::from_str(&text).context("parsing manifest")?;
    if manifest.version != env!("CARGO_PKG_VERSION") {
        eprintln!(
            "warning: manifest written by version {}, this is {}",
            manifest.version,
            env!("CARGO_PKG_VERSION")
        );
    }
    let Some(log) = manifest.trial_log else {
        bail!("manifest has no trial log; only commands that write trials.jsonl can be replayed");
    };
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let log_path = dir.join(&log.file);
    let records = std::fs::read_to_string(&log_path).with_context(|| format!("reading {}", log_path.display()))?;
    let mut stored = None;
    for (k, line) in records.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let v: Value = serde_json::from_str(line).with_context(|| format!("{} line {}", log_path.display(), k + 1))?;
        if v.get("trial_id").and_then(Value::as_u64) == Some(trial) {
            stored = Some(v);
            break;
        }
    }
    let Some(stored) = stored else {
        bail!("trial {trial} not found in {}", log_path.display());
    };
    let fresh = serde_json::to_value(gaplab::stats::trial_record(&log.ensemble, trial, log.tol_factor)?)?;
    let (Value::Object(a), Value::Object(b)) = (&stored, &fresh) else {
        bail!("trial record is not a JSON object");
    };
    let mut keys: Vec<&String> = a.keys().chain(b.keys()).collect();
    keys.sort();
    keys.dedup();
    let mut same = true;
    for k in keys {
        let (x, y) = (a.get(k), b.get(k));
        if x != y {
            same = false;
            eprintln!(
                "mismatch in `{k}`: stored {} regenerated {}",
                x.map_or("missing".into(), Value::to_string),
                y.map_or("missing".into(), Value::to_string)
            );
        }
    }
    if same {
        println!("trial {trial}: match");
    } else {
        println!("trial {trial}: MISMATCH");
    }
    Ok(same)
}

fn run(cli: Cli) -> Result<ExitCode> {
    if let Command::Replay { manifest, trial } = &cli.command {
        return Ok(if replay(manifest, *trial)? { ExitCode::SUCCESS } else { ExitCode::FAILURE });
    }
    let started = unix_now();
    let settings = Settings::resolve(cli.flags)?;
    let name = cli.command.name();
    let report = gaplab::trials::with_threads(settings.threads, || dispatch(&settings, cli.command))??;

    match &settings.out {
        Some(dir) => write_report(dir, &name, &settings, &report, started)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(report.files[0].1.as_bytes())?;
            stdout.flush()?;
        }
    }
    let mut ok = true;
    for c in &report.checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        if c.detail.is_empty() {
            eprintln!("{tag} {}", c.name);
        } else {
            eprintln!("{tag} {} ({})", c.name, c.detail);
        }
        ok &= c.passed;
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
