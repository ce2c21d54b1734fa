use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use sos_core::algorithms::Algorithm;
use sos_core::problems::SUITE_NAMES;
use sos_runner::{recompute_metrics, run_batch, run_single, run_sweep, ExperimentConfig, Policy};

#[derive(Parser)]
#[command(name = "sos", version, about = "Generate and evaluate sets of Pareto sets with multitask optimizers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// One seeded run of one algorithm on one suite.
    Run(Common),
    /// Every configured algorithm on every configured suite, `--runs` times.
    Batch(Common),
    /// One multitask suite built from a parameter grid, one run per seed.
    Sweep(Common),
    /// Recompute CHV of a stored batch under another normalization policy.
    Metrics {
        /// Batch output directory.
        #[arg(long)]
        out: PathBuf,
        /// pooled, per-algorithm or per-run.
        #[arg(long, default_value = "pooled")]
        policy: String,
    },
    /// Print the available suites and algorithms.
    List,
}

#[derive(Args)]
struct Common {
    /// Suite name(s), comma separated.
    #[arg(long, value_delimiter = ',')]
    suite: Vec<String>,
    /// Algorithm name(s), comma separated.
    #[arg(long, value_delimiter = ',')]
    algo: Vec<String>,
    #[arg(long)]
    runs: Option<usize>,
    /// Seed of the run, or base seed of a batch.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// TOML experiment configuration; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    workers: Option<usize>,
}

impl Common {
    fn resolve(&self) -> anyhow::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if !self.suite.is_empty() {
            cfg.suite.names = self.suite.clone();
        }
        if !self.algo.is_empty() {
            cfg.algorithm.names = self.algo.clone();
        }
        if let Some(runs) = self.runs {
            cfg.batch.runs = runs;
        }
        if let Some(seed) = self.seed {
            cfg.batch.base_seed = seed;
        }
        if let Some(out) = &self.out {
            cfg.batch.out = out.clone();
        }
        if let Some(workers) = self.workers {
            cfg.batch.workers = workers;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn main() -> anyhow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match Cli::parse().command {
        Command::Run(args) => {
            let cfg = args.resolve()?;
            let (suite, algo) = match (cfg.suite.names.as_slice(), cfg.algorithm.names.as_slice()) {
                ([s], [a]) => (s.clone(), a.parse::<Algorithm>()?),
                _ => bail!("run needs exactly one --suite and one --algo"),
            };
            let out = args
                .out
                .clone()
                .unwrap_or_else(|| cfg.batch.out.join(format!("{suite}_{algo}_seed{}", cfg.batch.base_seed)));
            let result = run_single(&cfg, &suite, algo, cfg.batch.base_seed, &out)
                .with_context(|| format!("{algo} on {suite}"))?;
            println!(
                "{algo} on {suite}: {} generations, archive sizes {:?}, written to {}",
                result.generations,
                result.sos.archives.iter().map(|a| a.len()).collect::<Vec<_>>(),
                out.display()
            );
        }
        Command::Batch(args) => {
            let cfg = args.resolve()?;
            let summary = run_batch(&cfg)?;
            println!("{:<6} {:<10} {:>22} {:>4}", "suite", "algo", "CHV +- std", "best");
            for c in &summary.cells {
                println!(
                    "{:<6} {:<10} {:>13.4} +- {:.4} {:>4}{}",
                    c.suite,
                    c.algorithm,
                    c.chv_mean,
                    c.chv_std,
                    if c.best { "*" } else { "" },
                    if c.is_complete() { String::new() } else { format!("  ({}/{} runs)", c.completed, c.runs) }
                );
            }
            for r in &summary.rmmd {
                println!("RMMD {} ({}, {} runs):", r.suite, r.algorithm, r.runs);
                for row in &r.symmetric {
                    println!("  {}", row.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>().join("  "));
                }
            }
            println!("written to {}", cfg.batch.out.display());
        }
        Command::Sweep(args) => {
            let mut cfg = args.resolve()?;
            if let [a] = args.algo.as_slice() {
                cfg.sweep.algorithm = a.clone();
            }
            let s = run_sweep(&cfg)?;
            for r in &s.rows {
                let means: Vec<String> = r.means.iter().map(|m| format!("{m:.4}")).collect();
                println!("run {:>3} {}={} means {}", r.run, s.param, r.value, means.join(" "));
            }
            println!(
                "non-decreasing in {} of {} runs; written to {}",
                s.nondecreasing_runs,
                s.nondecreasing.len(),
                cfg.batch.out.display()
            );
        }
        Command::Metrics { out, policy } => {
            let policy: Policy = policy.parse()?;
            let summary = recompute_metrics(&out, policy)?;
            for c in &summary.cells {
                println!("{:<6} {:<10} {:.4} +- {:.4}", c.suite, c.algorithm, c.chv_mean, c.chv_std);
            }
        }
        Command::List => {
            println!("suites: {}", SUITE_NAMES.join(", "));
            let names: Vec<&str> = Algorithm::ALL.iter().map(|a| a.name()).collect();
            println!("algorithms: {}", names.join(", "));
        }
    }
    Ok(())
}
