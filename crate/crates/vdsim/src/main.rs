use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use vdsim::config::ScenarioConfig;
use vdsim::scenarios;

/// Coupled-cavity lattice simulator: vacancy-seeded dressed states, photon
/// currents, effective couplings and topological phase diagrams.
#[derive(Parser)]
#[command(name = "vdsim", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a single-point scenario config.
    Run(RunArgs),
    /// Execute the sweep grid of a config with [[sweep]] axes.
    Sweep(RunArgs),
    /// Parse and validate a config without producing outputs.
    Validate {
        /// Path to the TOML scenario config.
        config: PathBuf,
    },
}

#[derive(clap::Args)]
struct RunArgs {
    /// Path to the TOML scenario config.
    config: PathBuf,
    /// Override the config's worker count.
    #[arg(long)]
    workers: Option<usize>,
    /// Override the config's output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Assert the pipeline is RNG-free (it is; the flag is reserved and
    /// accepted for forward compatibility).
    #[arg(long)]
    seedless: bool,
}

fn load(args: &RunArgs) -> Result<(ScenarioConfig, PathBuf)> {
    let mut cfg = ScenarioConfig::from_path(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    if let Some(w) = args.workers {
        cfg.workers = w;
    }
    if let Some(out) = &args.out {
        cfg.out_dir = out.clone();
    }
    cfg.validate()?;
    Ok((cfg.clone(), cfg.out_dir.clone()))
}

fn main() -> Result<()> {
    // Keep BLAS kernels single-threaded: parallelism lives in the sweep
    // runner and results stay identical for any worker count.
    std::env::set_var("OPENBLAS_NUM_THREADS", "1");
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => {
            let (cfg, out_dir) = load(&args)?;
            let rec = scenarios::run(&cfg, &out_dir)?;
            eprintln!(
                "run `{}` finished in {:.3} s; results in {}",
                rec.scenario,
                rec.wall_time.as_secs_f64(),
                out_dir.display()
            );
            println!("{}", summary_table(&rec.summary));
        }
        Command::Sweep(args) => {
            let (cfg, out_dir) = load(&args)?;
            let rec = scenarios::sweep(&cfg, &out_dir)?;
            eprintln!(
                "sweep `{}` finished in {:.3} s; results in {}",
                rec.scenario,
                rec.wall_time.as_secs_f64(),
                out_dir.display()
            );
            println!(
                "points: {} (failed: {})",
                rec.summary["n_points"], rec.summary["n_failed"]
            );
        }
        Command::Validate { config } => {
            let cfg = ScenarioConfig::from_path(&config)
                .with_context(|| format!("reading {}", config.display()))?;
            cfg.validate()?;
            println!(
                "ok: scenario `{}`, {} sweep axes, workers {}",
                cfg.scenario.name(),
                cfg.sweep.len(),
                cfg.workers
            );
        }
    }
    Ok(())
}

/// Flat key: value lines for the headline numbers.
fn summary_table(summary: &serde_json::Value) -> String {
    let mut out = String::new();
    if let Some(map) = summary.as_object() {
        for (k, v) in map {
            match v {
                serde_json::Value::Number(n) => out.push_str(&format!("{k:32} {n}\n")),
                serde_json::Value::Bool(b) => out.push_str(&format!("{k:32} {b}\n")),
                serde_json::Value::Null => out.push_str(&format!("{k:32} -\n")),
                _ => {}
            }
        }
    }
    out
}
