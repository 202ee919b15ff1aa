use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use movpatch::harness::{example, run, Mode, RunConfig, RunOptions};

#[derive(Parser)]
#[command(name = "movpatch", version, about = "Moving and merging patch simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// Output directory (defaults to the config's own)
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Seed for sampled heterogeneity
    #[arg(long)]
    seed: Option<u64>,
    /// Snapshot interval
    #[arg(long)]
    snapshot_dt: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configuration file
    Run {
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run a built-in example
    Example {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=3))]
        number: u8,
        #[arg(long)]
        mode: Option<Mode>,
        #[command(flatten)]
        common: Common,
    },
    /// Check a configuration file without running it
    Validate { config: PathBuf },
}

fn execute(cli: Cli) -> movpatch::Result<()> {
    match cli.command {
        Command::Run { config, common } => {
            let cfg = RunConfig::load(&config)?;
            report(&cfg, None, common)
        }
        Command::Example { number, mode, common } => {
            let cfg = example(number as usize).expect("range checked by the parser");
            report(&cfg, mode, common)
        }
        Command::Validate { config } => {
            let cfg = RunConfig::load(&config)?;
            cfg.validate()?;
            println!("{}: ok", config.display());
            Ok(())
        }
    }
}

fn report(cfg: &RunConfig, mode: Option<Mode>, common: Common) -> movpatch::Result<()> {
    let opts = RunOptions { seed: common.seed, snapshot_dt: common.snapshot_dt, mode };
    let outcome = run(cfg, &opts, common.out_dir.as_deref())?;
    if let Some(p) = &outcome.patches {
        println!("merges: {}", p.merges.len());
    }
    if let Some(m) = &outcome.metrics {
        println!("max macro rmse: {:.3e}", m.max_macro_rmse());
        println!("max micro rmse: {:.3e}", m.max_micro_rmse());
        println!("max l2 relative error: {:.3e}", m.max_l2_rel());
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
