use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use log::info;

use super::config::{ExperimentConfig, Method};
use super::records::{write_records, DiagnosticsRecord, ExperimentRecord};
use super::seedfile::write_seed_file;
use crate::checkpoint::{fingerprint, Checkpoint};
use crate::diffusion::{evaluate_profit, SeedMask};
use crate::error::Result;
use crate::graph::{load_edge_list, Graph, GraphStats};
use crate::inference::{select_seeds, select_with_operator, SelectionDiagnostics};
use crate::operator::NormalizedOperator;
use crate::rng::derive_seed;
use crate::trainer::{generate_training_set, train, TrainedModel};
use crate::weights::{assign_cost_benefit, assign_probabilities, CostBenefit, EdgeProbabilities};

// stream tags for seeds derived from the master seed
const PROB_STREAM: u64 = 1;
const COST_STREAM: u64 = 2;
const TRAIN_STREAM: u64 = 0x10;
const INFER_STREAM: u64 = 0x11;
const BASELINE_STREAM: u64 = 0x12;
const EVAL_STREAM: u64 = 0x13;

fn budget_seed(master: u64, tag: u64, budget: f64) -> u64 {
    derive_seed(derive_seed(master, tag), budget.to_bits())
}

/// A loaded dataset with its sampled probabilities and costs.
#[derive(Debug, Clone)]
pub struct Instance {
    pub graph: Graph,
    pub probs: EdgeProbabilities,
    pub cb: CostBenefit,
}

pub fn prepare(cfg: &ExperimentConfig) -> Result<Instance> {
    let graph = load_edge_list(&cfg.dataset, cfg.directed)?;
    let probs = assign_probabilities(&graph, cfg.prob_model, derive_seed(cfg.seed, PROB_STREAM))?;
    let cost_seed = cfg.cost_seed.unwrap_or_else(|| derive_seed(cfg.seed, COST_STREAM));
    let cb = assign_cost_benefit(&graph, cfg.cost, cfg.benefit, cost_seed)?;
    Ok(Instance { graph, probs, cb })
}

pub fn cmd_stats(path: impl AsRef<Path>, directed: bool) -> Result<GraphStats> {
    Ok(load_edge_list(path, directed)?.stats())
}

fn config_fingerprint(cfg: &ExperimentConfig) -> Result<String> {
    let mut bytes = serde_json::to_vec(&cfg.train)?;
    bytes.extend(format!("{:?}|{:?}|{:?}", cfg.prob_model, cfg.cost, cfg.benefit).as_bytes());
    Ok(fingerprint(&bytes))
}

fn train_for_budget(inst: &Instance, a: &NormalizedOperator, cfg: &ExperimentConfig, budget: f64) -> Result<TrainedModel> {
    let seed = budget_seed(cfg.seed, TRAIN_STREAM, budget);
    let samples = generate_training_set(&inst.graph, &inst.probs, &inst.cb, budget, &cfg.train, seed)?;
    train(a, &samples, &cfg.train, seed)
}

fn write_loss_history(path: &Path, model: &TrainedModel) -> Result<()> {
    write_records(path, &model.history, false)
}

/// Trains the student for one budget (default: the first configured) and
/// writes `checkpoint.json` and `loss_history.csv` under `out_dir`.
pub fn cmd_train(cfg: &ExperimentConfig, budget: Option<f64>) -> Result<PathBuf> {
    let inst = prepare(cfg)?;
    let budget = budget.unwrap_or(cfg.budgets[0]);
    let a = NormalizedOperator::new(&inst.graph);
    let model = train_for_budget(&inst, &a, cfg, budget)?;
    fs::create_dir_all(&cfg.out_dir)?;
    write_loss_history(&cfg.out_dir.join("loss_history.csv"), &model)?;
    let ckpt = Checkpoint::new(
        model.theta,
        model.phi,
        budget,
        budget_seed(cfg.seed, TRAIN_STREAM, budget),
        config_fingerprint(cfg)?,
    );
    let path = cfg.out_dir.join("checkpoint.json");
    ckpt.save(&path)?;
    info!("wrote {}", path.display());
    Ok(path)
}

/// Selects seeds with a trained checkpoint and writes `seeds.txt` (original
/// node IDs) under `out_dir`. The budget defaults to the checkpoint's.
pub fn cmd_select(
    cfg: &ExperimentConfig,
    checkpoint: impl AsRef<Path>,
    budget: Option<f64>,
) -> Result<(PathBuf, SeedMask, SelectionDiagnostics)> {
    let inst = prepare(cfg)?;
    let ckpt = Checkpoint::load(checkpoint)?;
    let budget = budget.unwrap_or(ckpt.budget);
    let seed = budget_seed(cfg.seed, INFER_STREAM, budget);
    let (mask, diag) = select_seeds(&inst.graph, &inst.cb, budget, &ckpt, &cfg.inference, seed)?;
    fs::create_dir_all(&cfg.out_dir)?;
    let path = cfg.out_dir.join("seeds.txt");
    write_seed_file(&path, &inst.graph, &mask)?;
    Ok((path, mask, diag))
}

/// One method's choice for one budget.
#[derive(Debug, Clone)]
pub struct Selection {
    pub mask: SeedMask,
    /// DeepPM only.
    pub diagnostics: Option<SelectionDiagnostics>,
    /// DeepPM only; absent when the budget admits no seed at all.
    pub model: Option<TrainedModel>,
}

/// Runs a single method on a prepared instance with the seeds `cmd_run`
/// uses. DeepPM trains a fresh model for the budget; a budget below every
/// node's cost yields the empty set without training.
pub fn run_method(
    inst: &Instance,
    a: &NormalizedOperator,
    cfg: &ExperimentConfig,
    method: Method,
    budget: f64,
) -> Result<Selection> {
    match method {
        Method::DeepPm if budget < inst.cb.min_cost() => Ok(Selection {
            mask: SeedMask::empty(inst.graph.node_count()),
            diagnostics: None,
            model: None,
        }),
        Method::DeepPm => {
            let model = train_for_budget(inst, a, cfg, budget)?;
            let (mask, diag) = select_with_operator(
                a,
                &inst.cb,
                budget,
                &model.theta,
                &model.phi,
                &cfg.inference,
                budget_seed(cfg.seed, INFER_STREAM, budget),
            )?;
            Ok(Selection {
                mask,
                diagnostics: Some(diag),
                model: Some(model),
            })
        }
        Method::Baseline(b) => {
            let seed = budget_seed(cfg.seed, BASELINE_STREAM, budget);
            Ok(Selection {
                mask: b.run(&inst.graph, &inst.probs, &inst.cb, budget, &cfg.baseline, seed)?,
                diagnostics: None,
                model: None,
            })
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub records: Vec<ExperimentRecord>,
    pub diagnostics: Vec<DiagnosticsRecord>,
}

/// Full sweep over budgets × methods. Every method in a budget cell is
/// evaluated by the teacher on the same rollout streams. Writes
/// `records.csv` and `diagnostics.csv` under `out_dir` (appending when
/// `append` is set) plus one loss history per budget for DeepPM.
pub fn cmd_run(cfg: &ExperimentConfig, append: bool) -> Result<RunOutput> {
    cfg.validate()?;
    let inst = prepare(cfg)?;
    let a = NormalizedOperator::new(&inst.graph);
    fs::create_dir_all(&cfg.out_dir)?;
    let prob_model = cfg.prob_model.name().to_string();
    let mut records = Vec::new();
    let mut diagnostics = Vec::new();

    for &budget in &cfg.budgets {
        let eval_seed = budget_seed(cfg.seed, EVAL_STREAM, budget);
        for &method in &cfg.methods {
            let start = Instant::now();
            let sel = run_method(&inst, &a, cfg, method, budget)?;
            if let Some(model) = &sel.model {
                write_loss_history(&cfg.out_dir.join(format!("loss_history_b{budget}.csv")), model)?;
            }
            let (mask, extra) = (sel.mask, sel.diagnostics);
            let time_sec = start.elapsed().as_secs_f64();
            let est = evaluate_profit(&inst.graph, &inst.probs, &inst.cb, &mask, cfg.r_eval, eval_seed)?;
            info!(
                "budget {budget} {method}: profit {:.1} ± {:.1}, {} seeds, {time_sec:.2}s",
                est.profit,
                est.std_error,
                mask.count()
            );
            records.push(ExperimentRecord {
                dataset: cfg.dataset_name.clone(),
                prob_model: prob_model.clone(),
                budget,
                method: method.name().to_string(),
                profit: est.profit,
                seed_size: mask.count(),
                time_sec,
                rng_seed: cfg.seed,
            });
            diagnostics.push(DiagnosticsRecord {
                dataset: cfg.dataset_name.clone(),
                prob_model: prob_model.clone(),
                budget,
                method: method.name().to_string(),
                profit_std_error: est.std_error,
                cost_used: mask.cost(&inst.cb.cost),
                min_seed_bound: (budget / inst.cb.max_cost()).floor() as usize,
                max_seed_bound: (budget / inst.cb.min_cost()).floor() as usize,
                soft_objective: extra.map(|d| d.soft_objective),
                surrogate_profit: extra.map(|d| d.surrogate_profit),
            });
        }
    }
    write_records(cfg.out_dir.join("records.csv"), &records, append)?;
    write_records(cfg.out_dir.join("diagnostics.csv"), &diagnostics, append)?;
    Ok(RunOutput { records, diagnostics })
}
