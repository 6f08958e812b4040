use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use planar_hodograph_cli::output::write_all;
use planar_hodograph_cli::{run_scenario, Mode, ScenarioConfig, WORKERS_ENV};

#[derive(Parser)]
#[command(name = "hodograph", version, about = "Run hodograph map scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and write report.json, points.csv, curves.csv
    /// and figure.svg.
    Run {
        config: PathBuf,
        /// Output directory (default: the config's output.dir, else
        /// out/<scenario name>).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Print stage timings and checks to stderr.
        #[arg(long)]
        verbose: bool,
    },
    /// Run only the invariant suites and print one line per check.
    Verify { config: PathBuf },
}

fn init_pool() -> Result<(), String> {
    let Ok(raw) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{WORKERS_ENV} = {raw:?} is not a positive integer"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn load(path: &PathBuf, seed: Option<u64>) -> Result<ScenarioConfig, String> {
    let mut cfg = ScenarioConfig::load(path).map_err(|e| e.to_string())?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_pool() {
        eprintln!("error: stage setup: {e}");
        return ExitCode::from(1);
    }
    let (config, seed, out, verbose, mode) = match cli.command {
        Command::Run { config, out, seed, verbose } => (config, seed, out, verbose, Mode::Run),
        Command::Verify { config } => (config, None, None, false, Mode::Verify),
    };
    let cfg = match load(&config, seed) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: stage config: {e}");
            return ExitCode::from(1);
        }
    };
    let dir = out
        .or_else(|| cfg.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(&cfg.name));

    let run = run_scenario(cfg, mode, verbose);
    for c in run.checks() {
        let line = format!(
            "{} {:<24} {:>12.3e} (limit {:.1e})",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.limit
        );
        if mode == Mode::Verify || verbose {
            println!("{line}");
        }
    }
    if let Some(e) = &run.error {
        eprintln!("error: {e}");
    }
    if mode == Mode::Run {
        if let Err(e) = write_all(&run, &dir) {
            eprintln!("error: stage output: {e}");
            return ExitCode::from(1);
        }
        if let Some(l) = &run.ledger {
            println!(
                "ledger u={} theta={} reflected={} conclusive={}",
                l.counts.u,
                l.counts.theta,
                l.counts.reflected,
                l.is_conclusive()
            );
        }
        println!("{}: {} -> {}", run.config.name, run.status(), dir.display());
    } else {
        println!("{}: {}", run.config.name, run.status());
    }
    ExitCode::from(run.exit_code() as u8)
}
