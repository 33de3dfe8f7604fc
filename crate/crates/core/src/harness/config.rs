use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use crate::baselines::{Baseline, BaselineConfig};
use crate::error::{Error, Result};
use crate::inference::InferenceConfig;
use crate::trainer::TrainConfig;
use crate::weights::{Interval, ProbabilityModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Method {
    DeepPm,
    Baseline(Baseline),
}

impl Method {
    pub fn all() -> Vec<Method> {
        std::iter::once(Method::DeepPm)
            .chain(Baseline::ALL.into_iter().map(Method::Baseline))
            .collect()
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::DeepPm => "DeepPM",
            Method::Baseline(b) => b.name(),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::all()
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownMethod(s.trim().to_string()))
    }
}

/// Everything one experiment needs. Loaded from a flat `key = value` file.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: PathBuf,
    /// Label used in output records; defaults to the dataset file stem.
    pub dataset_name: String,
    pub directed: bool,
    pub prob_model: ProbabilityModel,
    pub cost: Interval,
    pub benefit: Interval,
    /// Seed for cost/benefit sampling; derived from `seed` when unset.
    pub cost_seed: Option<u64>,
    pub budgets: Vec<f64>,
    pub methods: Vec<Method>,
    pub r_eval: usize,
    pub train: TrainConfig,
    pub inference: InferenceConfig,
    pub baseline: BaselineConfig,
    pub out_dir: PathBuf,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dataset: PathBuf::new(),
            dataset_name: String::new(),
            directed: true,
            prob_model: ProbabilityModel::Uniform(0.1),
            cost: Interval::DEFAULT_COST,
            benefit: Interval::DEFAULT_BENEFIT,
            cost_seed: None,
            budgets: (1..=7).map(|k| 500.0 * k as f64).collect(),
            methods: Method::all(),
            r_eval: 10_000,
            train: TrainConfig::default(),
            inference: InferenceConfig::default(),
            baseline: BaselineConfig::default(),
            out_dir: PathBuf::from("results"),
            seed: 0,
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e| Error::Config(format!("`{key}`: cannot parse `{value}`: {e}")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>>
where
    T::Err: fmt::Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(key, s))
        .collect()
}

impl ExperimentConfig {
    /// Reads a config file. Relative `dataset` and `out_dir` paths are
    /// resolved against the config file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)?;
        let mut cfg = Self::parse_str(&text)?;
        if let Some(dir) = path.parent() {
            for p in [&mut cfg.dataset, &mut cfg.out_dir] {
                if p.is_relative() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(cfg)
    }

    /// Parses `key = value` lines; `#` starts a comment line.
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        let mut p_c = 0.1;
        let mut model = "uniform".to_string();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            cfg.set(key, value, &mut p_c, &mut model)?;
        }
        cfg.prob_model = match model.to_ascii_lowercase().as_str() {
            "uniform" => ProbabilityModel::Uniform(p_c),
            "trivalency" => ProbabilityModel::Trivalency,
            other => return Err(Error::Config(format!("unknown prob_model `{other}`"))),
        };
        if cfg.dataset_name.is_empty() {
            cfg.dataset_name = cfg
                .dataset
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "dataset".into());
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str, p_c: &mut f64, model: &mut String) -> Result<()> {
        match key {
            "dataset" => self.dataset = PathBuf::from(value),
            "dataset_name" => self.dataset_name = value.to_string(),
            "directed" => self.directed = parse(key, value)?,
            "prob_model" => *model = value.to_string(),
            "p_c" => *p_c = parse(key, value)?,
            "cost_min" => self.cost.lo = parse(key, value)?,
            "cost_max" => self.cost.hi = parse(key, value)?,
            "benefit_min" => self.benefit.lo = parse(key, value)?,
            "benefit_max" => self.benefit.hi = parse(key, value)?,
            "cost_seed" => self.cost_seed = Some(parse(key, value)?),
            "budgets" => self.budgets = parse_list(key, value)?,
            "methods" => {
                self.methods = if value.eq_ignore_ascii_case("all") {
                    Method::all()
                } else {
                    value
                        .split(',')
                        .filter(|s| !s.trim().is_empty())
                        .map(str::parse)
                        .collect::<Result<_>>()?
                }
            }
            "r_eval" => self.r_eval = parse(key, value)?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            "seed" => self.seed = parse(key, value)?,

            "train.masks" => self.train.masks = parse(key, value)?,
            "train.labels_per_mask" => self.train.labels_per_mask = parse(key, value)?,
            "train.epochs" => self.train.epochs = parse(key, value)?,
            "train.batch_size" => self.train.batch_size = parse(key, value)?,
            "train.lambda_diff" => self.train.lambda_diff = parse(key, value)?,
            "train.lambda_ae" => self.train.lambda_ae = parse(key, value)?,
            "train.learning_rate" => self.train.adam.learning_rate = parse(key, value)?,
            "train.hidden" => self.train.hidden = parse(key, value)?,
            "train.surrogate_bias" => self.train.surrogate_bias = parse(key, value)?,
            "train.ae_hidden" => self.train.ae_hidden = parse(key, value)?,
            "train.latent" => self.train.latent = parse(key, value)?,

            "infer.mu" => self.inference.mu = Some(parse(key, value)?),
            "infer.ascent_steps" => self.inference.ascent_steps = parse(key, value)?,
            "infer.step_size" => self.inference.step_size = parse(key, value)?,
            "infer.restarts" => self.inference.restarts = parse(key, value)?,
            "infer.candidate_cap" => self.inference.candidate_cap = parse(key, value)?,

            "baseline.rollouts" => self.baseline.rollouts = parse(key, value)?,
            "baseline.epsilon" => self.baseline.epsilon = parse(key, value)?,
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.budgets.is_empty() {
            return Err(Error::Config("at least one budget is required".into()));
        }
        if self.budgets.iter().any(|&b| !(b > 0.0 && b.is_finite())) {
            return Err(Error::Config("budgets must be positive".into()));
        }
        if self.budgets.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("budgets must be strictly ascending".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("at least one method is required".into()));
        }
        if self.r_eval == 0 {
            return Err(Error::Config("r_eval must be at least 1".into()));
        }
        if let ProbabilityModel::Uniform(p) = self.prob_model {
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::Config(format!("p_c = {p} outside (0, 1]")));
            }
        }
        self.train.validate()?;
        self.inference.validate()?;
        self.baseline.validate()?;
        Ok(())
    }
}
