//! Experiment runner behind the `dmst` binary: graph generation, algorithm
//! runs with oracle cross-checks, and CSV, DOT and trace output.

pub mod args;
pub mod experiment;
pub mod output;
pub mod script;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

pub use args::{Algo, Cli, Command, GenSpec, RunArgs};
pub use experiment::{run_one, RunConfig, RunReport, Row};
pub use script::{parse_script, Scripted, Update};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] dmst_core::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("updates line {line}: {msg}")]
    Script { line: usize, msg: String },
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// All checks passed.
pub const EXIT_OK: u8 = 0;
/// Bad flags, unreadable input, or a run that could not complete.
pub const EXIT_USAGE: u8 = 1;
/// Some result disagreed with its oracle.
pub const EXIT_MISMATCH: u8 = 2;

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn write(path: &Path, text: &[u8]) -> CliResult<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Parses `args`, runs, and maps the outcome to the exit-code contract.
pub fn execute<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return ExitCode::from(code);
        }
    };
    match dispatch(&cli, out) {
        Ok(true) => ExitCode::from(EXIT_OK),
        Ok(false) => {
            let _ = writeln!(err, "oracle mismatch");
            ExitCode::from(EXIT_MISMATCH)
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

/// Returns whether every oracle check passed.
fn dispatch(cli: &Cli, out: &mut dyn Write) -> CliResult<bool> {
    match &cli.cmd {
        Command::Gen(a) => {
            let g = a.spec.build(0)?;
            let text = dmst_core::save_graph(&g);
            match &a.out {
                Some(p) => write(p, text.as_bytes())?,
                None => out.write_all(text.as_bytes()).map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })?,
            }
            Ok(true)
        }
        Command::Run(a) => run(a, out),
    }
}

fn run(a: &RunArgs, out: &mut dyn Write) -> CliResult<bool> {
    let updates = match &a.updates {
        Some(p) => parse_script(&read(p)?)?,
        None => Vec::new(),
    };
    let base = match &a.graph {
        Some(p) => Some(dmst_core::load_graph(&read(p)?)?),
        None => None,
    };
    let mut reports = Vec::with_capacity(a.sweep as usize);
    for i in 0..a.sweep {
        let offset = a.seed + i;
        let g = match (&base, &a.generate) {
            (Some(g), _) => g.clone(),
            (None, Some(spec)) => spec.build(offset)?,
            (None, None) => return Err(CliError::Usage("need --graph or --generate".into())),
        };
        let cfg = RunConfig {
            algo: a.algo,
            delay: a.delay.offset(offset),
            wakeup: a.wakeup.into(),
            z: a.z,
            trace: a.trace.is_some(),
        };
        reports.push(run_one(g, &updates, &cfg, offset)?);
    }
    let rows: Vec<&Row> = reports.iter().map(|r| &r.row).collect();
    let csv = output::csv_text(&rows)?;
    match &a.csv {
        Some(p) => write(p, csv.as_bytes())?,
        None => out.write_all(csv.as_bytes()).map_err(|source| CliError::Io {
            path: "<stdout>".into(),
            source,
        })?,
    }
    if let Some(p) = &a.trace {
        let mut text = String::new();
        for r in &reports {
            text += &format!("# seed={}\n", r.row.seed);
            text += &r.trace;
        }
        write(p, text.as_bytes())?;
    }
    if let (Some(p), Some(last)) = (&a.dot, reports.last()) {
        write(p, last.dot.as_bytes())?;
    }
    Ok(reports.iter().all(|r| r.row.oracle_match))
}
