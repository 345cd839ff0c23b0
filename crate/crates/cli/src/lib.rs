//! Command-line front end for the squeezed-light toolkit.

pub mod commands;
pub mod error;
pub mod report;
pub mod scenario;
pub mod table;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use commands::{CommandOutput, Sweep};
use error::{exit, CliError};
use table::Provenance;

pub const OUT_DIR_ENV: &str = "SQZKIT_OUT";

#[derive(Debug, Parser)]
#[command(
    name = "sqzkit",
    version,
    about = "Design and loss analysis for fiber-coupled squeezed-light sources"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Scenario JSON file.
    #[arg(long, global = true, value_name = "FILE")]
    pub scenario: Option<PathBuf>,

    /// Measured data CSV (used by `fit`).
    #[arg(long, global = true, value_name = "FILE")]
    pub data: Option<PathBuf>,

    /// Directory for CSV output; defaults to $SQZKIT_OUT when set.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Parameter sweep, e.g. `pump_power_mw=0:80:9`.
    #[arg(long, global = true, value_name = "KEY=LO:HI:N")]
    pub sweep: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Cavity length, mode sizes and fiber coupling.
    CavityDesign,
    /// Squeezing and antisqueezing versus pump power.
    OpoCurve,
    /// Fit escape-weighted efficiency and threshold to measured data.
    Fit,
    /// Tiered loss correction of measured squeezing.
    LossCorrect,
    /// Covariance simulation of a squeezer and beam-splitter network.
    Network,
    /// Compare toolkit output with the built-in published dataset.
    ReproducePaper,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::CavityDesign => "cavity-design",
            Command::OpoCurve => "opo-curve",
            Command::Fit => "fit",
            Command::LossCorrect => "loss-correct",
            Command::Network => "network",
            Command::ReproducePaper => "reproduce-paper",
        }
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn execute(cli: &Cli) -> Result<(CommandOutput, Option<String>), CliError> {
    let sweep = cli.sweep.as_deref().map(Sweep::parse).transpose()?;
    let sweep = sweep.as_ref();

    if cli.command == Command::ReproducePaper {
        if sweep.is_some() {
            return Err(CliError::input("reproduce-paper does not take --sweep"));
        }
        let digest = match &cli.scenario {
            Some(p) => Some(scenario::load(p)?.digest),
            None => None,
        };
        let (table, ok) = report::reproduce_report(&sqzkit_core::reference::fiber_setups());
        let mut out = CommandOutput {
            tables: vec![table],
            warnings: Vec::new(),
            exit_code: if ok {
                exit::SUCCESS
            } else {
                exit::REPRODUCTION_FAILED
            },
        };
        if !ok {
            out.warnings
                .push("one or more published values were not reproduced".into());
        }
        return Ok((out, digest));
    }

    let path = cli.scenario.as_deref().ok_or_else(|| {
        CliError::input(format!("{} requires --scenario FILE", cli.command.name()))
    })?;
    let loaded = scenario::load(path)?;
    let s = &loaded.scenario;
    let output = match cli.command {
        Command::CavityDesign => commands::cavity_design(s, sweep)?,
        Command::OpoCurve => commands::opo_curve(s, sweep)?,
        Command::Fit => {
            let data = cli
                .data
                .as_deref()
                .ok_or_else(|| CliError::input("fit requires --data FILE"))?;
            commands::fit(s, &read_text(data)?, sweep)?
        }
        Command::LossCorrect => commands::loss_correct(s, sweep)?,
        Command::Network => commands::network(s, sweep)?,
        Command::ReproducePaper => unreachable!(),
    };
    Ok((output, Some(loaded.digest)))
}

fn command_line(cli: &Cli) -> String {
    let mut parts = vec!["sqzkit".to_string(), cli.command.name().to_string()];
    let file_name = |p: &Path| {
        p.file_name()
            .map(|f| f.to_string_lossy().into_owned())
            .unwrap_or_default()
    };
    if let Some(p) = &cli.scenario {
        parts.push(format!("--scenario {}", file_name(p)));
    }
    if let Some(p) = &cli.data {
        parts.push(format!("--data {}", file_name(p)));
    }
    if let Some(s) = &cli.sweep {
        parts.push(format!("--sweep {s}"));
    }
    parts.join(" ")
}

/// Runs a parsed command, writing tables to `stdout` and to `out_dir` when given.
/// Returns the process exit code.
pub fn run_with(
    cli: &Cli,
    out_dir: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    let (output, digest) = match execute(cli) {
        Ok(v) => v,
        Err(e) => {
            let _ = writeln!(stderr, "sqzkit: {e}");
            return e.exit_code();
        }
    };
    for w in &output.warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    let provenance = Provenance {
        command: command_line(cli),
        scenario_digest: digest,
    };
    if let Some(dir) = out_dir {
        if let Err(source) = std::fs::create_dir_all(dir) {
            let e = CliError::Io {
                path: dir.display().to_string(),
                source,
            };
            let _ = writeln!(stderr, "sqzkit: {e}");
            return e.exit_code();
        }
    }
    for (k, table) in output.tables.iter().enumerate() {
        let text = table.render(&provenance);
        if k > 0 {
            let _ = writeln!(stdout);
        }
        let _ = writeln!(stdout, "## {}", table.name);
        let _ = write!(stdout, "{text}");
        if let Some(dir) = out_dir {
            let path = dir.join(format!("{}.csv", table.name));
            if let Err(source) = std::fs::write(&path, &text) {
                let e = CliError::Io {
                    path: path.display().to_string(),
                    source,
                };
                let _ = writeln!(stderr, "sqzkit: {e}");
                return e.exit_code();
            }
        }
    }
    output.exit_code
}

/// Entry point used by the binary: parses `args` and resolves `--out` against $SQZKIT_OUT.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    exit::SUCCESS
                }
                _ => exit::INPUT,
            };
        }
    };
    let out_dir = cli.out.clone().or_else(|| {
        std::env::var_os(OUT_DIR_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
    });
    run_with(
        &cli,
        out_dir.as_deref(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    )
}
