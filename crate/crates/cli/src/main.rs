use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use deeppm_core::harness::{
    cmd_plotdata, cmd_run, cmd_select, cmd_stats, cmd_train, ExperimentConfig,
};

/// Budget-constrained profit maximization on social graphs.
#[derive(Parser, Debug)]
#[command(name = "deeppm", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print node/edge counts and degree statistics of an edge list.
    Stats {
        /// Edge list; defaults to the config's dataset.
        dataset: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Treat each line as an undirected edge.
        #[arg(long)]
        undirected: bool,
    },
    /// Train the surrogate and autoencoder for one budget.
    Train {
        #[command(flatten)]
        common: Common,
        /// Defaults to the first configured budget.
        #[arg(long)]
        budget: Option<f64>,
    },
    /// Select seeds with a trained checkpoint.
    Select {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        checkpoint: PathBuf,
        /// Defaults to the checkpoint's budget.
        #[arg(long)]
        budget: Option<f64>,
    },
    /// Run every configured method at every budget and write records.csv.
    Run {
        #[command(flatten)]
        common: Common,
        /// Append to existing CSVs instead of overwriting them.
        #[arg(long)]
        append: bool,
    },
    /// Split a records CSV into one file per dataset, model and metric.
    Plotdata {
        records: PathBuf,
        #[arg(long, default_value = "plots")]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Output directory, overriding `out_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed, overriding `seed`.
    #[arg(long)]
    seed: Option<u64>,
}

impl Common {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::load(&self.config)
            .with_context(|| format!("loading config {}", self.config.display()))?;
        if let Some(out) = &self.out {
            cfg.out_dir = out.clone();
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match Cli::parse().command {
        Command::Stats {
            dataset,
            config,
            undirected,
        } => {
            let (path, directed) = match (dataset, config) {
                (Some(p), _) => (p, !undirected),
                (None, Some(c)) => {
                    let cfg = ExperimentConfig::load(&c)?;
                    (cfg.dataset, cfg.directed && !undirected)
                }
                (None, None) => bail!("give a dataset path or --config"),
            };
            let s = cmd_stats(&path, directed)?;
            println!("dataset\tnodes\tedges\tmax_degree\tavg_degree");
            println!(
                "{}\t{}\t{}\t{}\t{:.2}",
                path.display(),
                s.nodes,
                s.edges,
                s.max_degree,
                s.avg_degree
            );
        }
        Command::Train { common, budget } => {
            let cfg = common.load()?;
            let path = cmd_train(&cfg, budget)?;
            println!("{}", path.display());
        }
        Command::Select {
            common,
            checkpoint,
            budget,
        } => {
            let cfg = common.load()?;
            let (path, mask, diag) = cmd_select(&cfg, &checkpoint, budget)?;
            println!(
                "{} seeds, cost {:.2}, surrogate profit {:.2}, soft objective {:.2} -> {}",
                mask.count(),
                diag.cost_used,
                diag.surrogate_profit,
                diag.soft_objective,
                path.display()
            );
        }
        Command::Run { common, append } => {
            let cfg = common.load()?;
            let out = cmd_run(&cfg, append)?;
            println!("budget\tmethod\tprofit\tseed_size\ttime_sec");
            for r in &out.records {
                println!(
                    "{}\t{}\t{:.2}\t{}\t{:.3}",
                    r.budget, r.method, r.profit, r.seed_size, r.time_sec
                );
            }
        }
        Command::Plotdata { records, out } => {
            for f in cmd_plotdata(&records, &out)? {
                println!("{}", f.display());
            }
        }
    }
    Ok(())
}
