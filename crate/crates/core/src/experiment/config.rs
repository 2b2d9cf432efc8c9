//! TOML experiment configuration.
//!
//! ```toml
//! [experiment]
//! name = "grid"            # required
//! dataset = "framed4x4"    # framed4x4 | bars2x4
//! output = "runs/grid"     # joined onto $QAE_OUTPUT_ROOT when relative
//!
//! [grid]
//! families = ["circuit1", "circuit2", "circuit3"]
//! layers = [3, 5, 7]
//! latent_qubits = [3, 2, 1]
//!
//! [optimizer]
//! learning_rate = 0.05
//! epochs = 40
//! n_iter = 10
//! batch_size = 7
//!
//! [data]
//! train_count = 14
//! replication = 3
//! # train_indices = [0, 3, 5]   # overrides the seeded selection
//!
//! [eval]
//! mode = "exact"           # exact | shots
//! shots = 8192
//!
//! [seeds]
//! split = 0
//! init = 0
//! shots = 0
//! ```
//!
//! Every key except `experiment.name` has a default; dataset-dependent
//! defaults are listed on [`DatasetKind`].

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::ansatz::AnsatzFamily;
use crate::datasets::{bars_and_stripes_2x4, framed_4x4_dataset, PixelImage};
use crate::error::{Error, Result};
use crate::trainer::{EvalMode, DEFAULT_LEARNING_RATE, DEFAULT_SHOTS};

pub const OUTPUT_ROOT_ENV: &str = "QAE_OUTPUT_ROOT";

/// | dataset   | qubits | train | replication | batch | n_iter | grid                         |
/// |-----------|--------|-------|-------------|-------|--------|------------------------------|
/// | framed4x4 | 4      | 14    | 3           | 7     | 10     | circuit1-3, L 3/5/7, 3/2/1   |
/// | bars2x4   | 3      | 10    | 2           | 5     | 1      | circuit1-dev3q, L 3, 2       |
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetKind {
    #[serde(rename = "framed4x4")]
    Framed4x4,
    #[serde(rename = "bars2x4")]
    Bars2x4,
}

impl DatasetKind {
    pub fn name(self) -> &'static str {
        match self {
            DatasetKind::Framed4x4 => "framed4x4",
            DatasetKind::Bars2x4 => "bars2x4",
        }
    }

    pub fn images(self) -> Vec<PixelImage> {
        match self {
            DatasetKind::Framed4x4 => framed_4x4_dataset(),
            DatasetKind::Bars2x4 => bars_and_stripes_2x4(),
        }
    }

    pub fn num_qubits(self) -> usize {
        match self {
            DatasetKind::Framed4x4 => 4,
            DatasetKind::Bars2x4 => 3,
        }
    }

    fn defaults(self) -> Defaults {
        match self {
            DatasetKind::Framed4x4 => Defaults {
                families: vec![
                    AnsatzFamily::Circuit1,
                    AnsatzFamily::Circuit2,
                    AnsatzFamily::Circuit3,
                ],
                layers: vec![3, 5, 7],
                latent: vec![3, 2, 1],
                train_count: 14,
                replication: 3,
                batch_size: 7,
                n_iter: 10,
            },
            DatasetKind::Bars2x4 => Defaults {
                families: vec![AnsatzFamily::Circuit1Device3q],
                layers: vec![3],
                latent: vec![2],
                train_count: 10,
                replication: 2,
                batch_size: 5,
                n_iter: 1,
            },
        }
    }
}

struct Defaults {
    families: Vec<AnsatzFamily>,
    layers: Vec<usize>,
    latent: Vec<usize>,
    train_count: usize,
    replication: usize,
    batch_size: usize,
    n_iter: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: RawExperiment,
    #[serde(default)]
    grid: RawGrid,
    #[serde(default)]
    optimizer: RawOptimizer,
    #[serde(default)]
    data: RawData,
    #[serde(default)]
    eval: RawEval,
    #[serde(default)]
    seeds: RawSeeds,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExperiment {
    name: String,
    dataset: Option<DatasetKind>,
    output: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    families: Option<Vec<AnsatzFamily>>,
    layers: Option<Vec<usize>>,
    latent_qubits: Option<Vec<usize>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOptimizer {
    learning_rate: Option<f64>,
    epochs: Option<usize>,
    n_iter: Option<usize>,
    batch_size: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawData {
    train_count: Option<usize>,
    replication: Option<usize>,
    train_indices: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
enum RawMode {
    #[default]
    Exact,
    Shots,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEval {
    #[serde(default)]
    mode: RawMode,
    shots: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSeeds {
    #[serde(default)]
    split: u64,
    #[serde(default)]
    init: u64,
    #[serde(default)]
    shots: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub dataset: DatasetKind,
    pub output: PathBuf,
    pub families: Vec<AnsatzFamily>,
    pub layers: Vec<usize>,
    pub latent_qubits: Vec<usize>,
    pub learning_rate: f64,
    pub epochs: usize,
    pub n_iter: usize,
    pub batch_size: usize,
    pub train_count: usize,
    pub replication: usize,
    pub train_indices: Option<Vec<usize>>,
    pub eval_mode: EvalMode,
    pub split_seed: u64,
    pub init_seed: u64,
}

impl ExperimentConfig {
    /// Defaults for `dataset`, written under `output`.
    pub fn with_defaults(name: &str, dataset: DatasetKind, output: impl Into<PathBuf>) -> Self {
        let d = dataset.defaults();
        Self {
            name: name.to_string(),
            dataset,
            output: output.into(),
            families: d.families,
            layers: d.layers,
            latent_qubits: d.latent,
            learning_rate: DEFAULT_LEARNING_RATE,
            epochs: 40,
            n_iter: d.n_iter,
            batch_size: d.batch_size,
            train_count: d.train_count,
            replication: d.replication,
            train_indices: None,
            eval_mode: EvalMode::ExactExpectation,
            split_seed: 0,
            init_seed: 0,
        }
    }

    /// Parses TOML text. Syntax and type errors carry the line number;
    /// semantic errors name the offending field.
    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_with_root(text, std::env::var_os(OUTPUT_ROOT_ENV).map(PathBuf::from))
    }

    pub fn parse_with_root(text: &str, output_root: Option<PathBuf>) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Parse {
            line: e.span().map_or(0, |s| {
                text[..s.start.min(text.len())].matches('\n').count() + 1
            }),
            message: e.message().trim().to_string(),
        })?;
        let dataset = raw.experiment.dataset.unwrap_or(DatasetKind::Framed4x4);
        let mut cfg = Self::with_defaults(&raw.experiment.name, dataset, PathBuf::new());

        let output = raw
            .experiment
            .output
            .unwrap_or_else(|| Path::new("runs").join(&raw.experiment.name));
        cfg.output = match output_root {
            Some(root) if output.is_relative() => root.join(output),
            _ => output,
        };
        if let Some(v) = raw.grid.families {
            cfg.families = v;
        }
        if let Some(v) = raw.grid.layers {
            cfg.layers = v;
        }
        if let Some(v) = raw.grid.latent_qubits {
            cfg.latent_qubits = v;
        }
        let o = raw.optimizer;
        cfg.learning_rate = o.learning_rate.unwrap_or(cfg.learning_rate);
        cfg.epochs = o.epochs.unwrap_or(cfg.epochs);
        cfg.n_iter = o.n_iter.unwrap_or(cfg.n_iter);
        cfg.batch_size = o.batch_size.unwrap_or(cfg.batch_size);
        cfg.train_count = raw.data.train_count.unwrap_or(cfg.train_count);
        cfg.replication = raw.data.replication.unwrap_or(cfg.replication);
        cfg.train_indices = raw.data.train_indices;
        if let Some(idx) = &cfg.train_indices {
            cfg.train_count = idx.len();
        }
        cfg.eval_mode = match raw.eval.mode {
            RawMode::Exact => {
                if raw.eval.shots.is_some() {
                    return Err(Error::config(
                        "eval.shots",
                        "only valid with mode = \"shots\"",
                    ));
                }
                EvalMode::ExactExpectation
            }
            RawMode::Shots => EvalMode::Shots {
                shots: raw.eval.shots.unwrap_or(DEFAULT_SHOTS),
                seed: raw.seeds.shots,
            },
        };
        cfg.split_seed = raw.seeds.split;
        cfg.init_seed = raw.seeds.init;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dataset.num_qubits();
        if self.name.trim().is_empty() {
            return Err(Error::config("experiment.name", "must not be empty"));
        }
        if self.families.is_empty() {
            return Err(Error::config(
                "grid.families",
                "must list at least one family",
            ));
        }
        if self.families.contains(&AnsatzFamily::Circuit1Device3q) && n != 3 {
            return Err(Error::config(
                "grid.families",
                format!(
                    "circuit1-dev3q needs 3 qubits, dataset {} has {n}",
                    self.dataset.name()
                ),
            ));
        }
        if self.layers.is_empty() || self.layers.contains(&0) {
            return Err(Error::config(
                "grid.layers",
                "must be a non-empty list of positive integers",
            ));
        }
        if self.latent_qubits.is_empty() {
            return Err(Error::config("grid.latent_qubits", "must not be empty"));
        }
        if let Some(&m) = self.latent_qubits.iter().find(|&&m| m == 0 || m >= n) {
            return Err(Error::config(
                "grid.latent_qubits",
                format!(
                    "latent size {m} must be in 1..{n} for {}",
                    self.dataset.name()
                ),
            ));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::config("optimizer.learning_rate", "must be positive"));
        }
        if self.n_iter == 0 {
            return Err(Error::config("optimizer.n_iter", "must be at least 1"));
        }
        let count = self.dataset.images().len();
        if self.train_count == 0 || self.train_count > count {
            return Err(Error::config(
                "data.train_count",
                format!("must be in 1..={count} for {}", self.dataset.name()),
            ));
        }
        if let Some(idx) = &self.train_indices {
            let mut sorted = idx.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != idx.len() || sorted.last().is_some_and(|&i| i >= count) {
                return Err(Error::config(
                    "data.train_indices",
                    format!("must be distinct indices below {count}"),
                ));
            }
        }
        if self.replication == 0 {
            return Err(Error::config("data.replication", "must be at least 1"));
        }
        let augmented = self.train_count * self.replication;
        if self.batch_size == 0 || !augmented.is_multiple_of(self.batch_size) {
            return Err(Error::config(
                "optimizer.batch_size",
                format!("must divide the {augmented} augmented training images"),
            ));
        }
        if let EvalMode::Shots { shots: 0, .. } = self.eval_mode {
            return Err(Error::config("eval.shots", "must be at least 1"));
        }
        Ok(())
    }

    /// Number of grid cells.
    pub fn num_cells(&self) -> usize {
        self.families.len() * self.layers.len() * self.latent_qubits.len()
    }
}
