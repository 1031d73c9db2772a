use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use driven_dicke::commands;
use driven_dicke::config::{Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "driven-dicke", version, about = "Liouvillian spectra, dynamics and dark-state counts of the driven Dicke model")]
struct Cli {
    /// TOML run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides output.dir)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for gaussian disorder (overrides disorder.seed)
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Physical decay rate, recorded for labeling only
    #[arg(long, global = true)]
    gamma: Option<f64>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Full Liouvillian spectrum and subradiant classification
    Spectrum,
    /// Gap and subradiant count over a (drive, disorder) grid
    Sweep,
    /// Two-atom correlation dynamics and exponential fits
    Dynamics,
    /// Irrep decompositions and dark-state counts
    Symmetry,
    /// Secular rate equation and predicted frequencies
    Rates,
}

fn run(cli: Cli) -> driven_dicke::Result<String> {
    let path = cli
        .config
        .ok_or_else(|| driven_dicke::Error::Config("--config PATH is required".into()))?;
    let ov = Overrides { out: cli.out, seed: cli.seed, gamma_label: cli.gamma };
    let cfg = RunConfig::load(&path)?.resolve(&ov)?;
    if let Some(k) = cli.threads {
        if k == 0 {
            return Err(driven_dicke::Error::Config("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| driven_dicke::Error::Config(e.to_string()))?;
    }
    let outcome = match cli.command {
        Cmd::Spectrum => commands::cmd_spectrum(&cfg),
        Cmd::Sweep => commands::cmd_sweep(&cfg),
        Cmd::Dynamics => commands::cmd_dynamics(&cfg),
        Cmd::Symmetry => commands::cmd_symmetry(&cfg),
        Cmd::Rates => commands::cmd_rates(&cfg),
    }?;
    let mut s = outcome.summary;
    for f in outcome.files {
        s.push_str(&format!("\nwrote {}", f.display()));
    }
    Ok(s)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(s) => {
            println!("{s}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
