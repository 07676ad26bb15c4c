use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use zenolab::{cmd_evolve, cmd_report, cmd_sweep, cmd_verify, Axis, Report, RunConfig, Suite};

#[derive(Parser)]
#[command(name = "zenolab", version, about = "Absorbing-potential arrival-time experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the packet against a single V0.
    Evolve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evolve once per point of the V0 list or the profile list.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "v0")]
        axis: Axis,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Summarize the reports in an output directory.
    Report {
        #[arg(long)]
        out: PathBuf,
    },
}

fn load(path: &Path, out: Option<&Path>) -> anyhow::Result<(RunConfig, PathBuf)> {
    let cfg = RunConfig::load(path).with_context(|| format!("loading {}", path.display()))?;
    let dir = cfg.output_dir(out)?;
    Ok((cfg, dir))
}

fn summarize(report: &Report) -> bool {
    for c in report.results.iter().filter(|c| c.pass == Some(false)) {
        eprintln!("check failed: {} = {:?} (tolerance {:?}){}", c.name, c.value, c.tolerance, c.error.as_deref().map(|e| format!(": {e}")).unwrap_or_default());
    }
    report.pass
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Evolve { config, out } => {
            let (cfg, dir) = load(&config, out.as_deref())?;
            Ok(summarize(&cmd_evolve(&cfg, &dir)?))
        }
        Command::Sweep { config, out, axis, jobs } => {
            let (cfg, dir) = load(&config, out.as_deref())?;
            Ok(summarize(&cmd_sweep(&cfg, axis, &dir, jobs)?))
        }
        Command::Verify { config, out, suite, jobs } => {
            let (cfg, dir) = load(&config, out.as_deref())?;
            let mut pool = rayon::ThreadPoolBuilder::new();
            if let Some(j) = jobs {
                pool = pool.num_threads(j.max(1));
            }
            let report = pool.build()?.install(|| cmd_verify(&cfg, suite, &dir))?;
            Ok(summarize(&report))
        }
        Command::Report { out } => {
            let (text, pass) = cmd_report(&out)?;
            print!("{text}");
            Ok(pass)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
