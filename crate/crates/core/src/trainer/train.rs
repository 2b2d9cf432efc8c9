use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::cost::Evaluator;
use super::CompressionConfig;
use crate::ansatz::initial_parameters;
use crate::circuit::{adjoint, apply, apply_to_density, Circuit};
use crate::datasets::{DatasetSplit, EncodedImage};
use crate::error::{Error, Result};
use crate::quantum::{fidelity_with_pure, partial_trace, pure_density, DensityMatrix};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpochRecord {
    /// 1-based.
    pub epoch: usize,
    /// Mean base-run cost over every image evaluation in the epoch.
    pub mean_loss: f64,
    /// Parameters at the end of the epoch.
    pub theta: Vec<f64>,
    pub jobs_executed: u64,
    pub wall_clock_seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrainRun {
    pub config: CompressionConfig,
    pub records: Vec<EpochRecord>,
    pub initial_theta: Vec<f64>,
    /// End-of-epoch parameters of the lowest-loss epoch, or the initial
    /// parameters when no epoch ran.
    pub best_theta: Vec<f64>,
    pub best_epoch: Option<usize>,
    pub split_seed: u64,
    pub train_indices: Vec<usize>,
}

impl TrainRun {
    pub fn total_jobs(&self) -> u64 {
        self.records.iter().map(|r| r.jobs_executed).sum()
    }

    pub fn final_loss(&self) -> Option<f64> {
        self.records.last().map(|r| r.mean_loss)
    }

    pub fn best_loss(&self) -> Option<f64> {
        self.records
            .iter()
            .map(|r| r.mean_loss)
            .min_by(f64::total_cmp)
    }
}

pub fn train(split: &DatasetSplit, config: &CompressionConfig) -> Result<TrainRun> {
    train_with_observer(split, config, |_| Ok(()))
}

/// Trains and calls `observer` after each epoch, before the next starts.
pub fn train_with_observer<F>(
    split: &DatasetSplit,
    config: &CompressionConfig,
    mut observer: F,
) -> Result<TrainRun>
where
    F: FnMut(&EpochRecord) -> Result<()>,
{
    let evaluator = Evaluator::new(config)?;
    if split.train.is_empty() {
        return Err(Error::domain("training set is empty"));
    }
    if let Some(img) = split
        .train
        .iter()
        .find(|e| e.state.num_qubits() != config.n_input())
    {
        return Err(Error::DimensionMismatch {
            expected: 1 << config.n_input(),
            actual: img.state.dim(),
        });
    }
    if !split.train.len().is_multiple_of(config.batch_size) {
        return Err(Error::domain(format!(
            "batch size {} does not divide {} training images",
            config.batch_size,
            split.train.len()
        )));
    }

    let initial_theta = initial_parameters(evaluator.circuit().num_params(), config.init_seed);
    let mut theta = initial_theta.clone();
    let mut records = Vec::with_capacity(config.epochs);
    let mut job_counter = 0u64;

    for epoch in 1..=config.epochs {
        let start = Instant::now();
        let mut jobs = 0u64;
        let (mut loss_sum, mut raw_sum, mut count) = (0.0, 0.0, 0usize);
        for batch in split.train.chunks(config.batch_size) {
            for _ in 0..config.n_iter {
                let step = evaluator.batch_step(&theta, batch, job_counter)?;
                job_counter += step.jobs;
                jobs += step.jobs;
                for c in &step.costs {
                    loss_sum += c.value;
                    raw_sum += c.raw;
                    count += 1;
                }
                for (t, g) in theta.iter_mut().zip(&step.gradient) {
                    *t -= config.learning_rate * g;
                }
            }
        }
        let (mean_loss, mean_raw) = if count == 0 {
            (0.0, 0.0)
        } else {
            (loss_sum / count as f64, raw_sum / count as f64)
        };
        if !mean_raw.is_finite() || mean_raw > 1.0 + 1e-6 || theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::Diverged {
                epoch,
                loss: mean_raw,
            });
        }
        let record = EpochRecord {
            epoch,
            mean_loss,
            theta: theta.clone(),
            jobs_executed: jobs,
            wall_clock_seconds: start.elapsed().as_secs_f64(),
        };
        observer(&record)?;
        records.push(record);
    }

    let best = records
        .iter()
        .min_by(|a, b| a.mean_loss.total_cmp(&b.mean_loss));
    Ok(TrainRun {
        config: config.clone(),
        best_theta: best.map_or_else(|| initial_theta.clone(), |r| r.theta.clone()),
        best_epoch: best.map(|r| r.epoch),
        records,
        initial_theta,
        split_seed: split.seed,
        train_indices: split.train_indices.clone(),
    })
}

/// U†(θ) applied to |0⟩⟨0| on the trash qubits tensored with `latent`.
pub fn decompress(
    theta: &[f64],
    latent: &DensityMatrix,
    config: &CompressionConfig,
) -> Result<DensityMatrix> {
    decompress_with(&config.ansatz.build()?, theta, latent, config)
}

fn decompress_with(
    circuit: &Circuit,
    theta: &[f64],
    latent: &DensityMatrix,
    config: &CompressionConfig,
) -> Result<DensityMatrix> {
    if latent.num_qubits() != config.n_latent {
        return Err(Error::DimensionMismatch {
            expected: 1 << config.n_latent,
            actual: latent.dim(),
        });
    }
    let padded = DensityMatrix::with_zeroed_qubits(latent, &config.trash, config.n_input())?;
    apply_to_density(&adjoint(circuit), theta, &padded)
}

#[derive(Debug, Clone)]
pub struct Evaluation {
    pub image_id: usize,
    pub fidelity: f64,
    pub latent: DensityMatrix,
    pub decompressed: DensityMatrix,
}

/// Compress, trace out the trash, decompress and score each test image with
/// `best_theta`.
pub fn evaluate(run: &TrainRun, test: &[EncodedImage]) -> Result<Vec<Evaluation>> {
    evaluate_theta(&run.best_theta, &run.config, test)
}

pub fn evaluate_theta(
    theta: &[f64],
    config: &CompressionConfig,
    test: &[EncodedImage],
) -> Result<Vec<Evaluation>> {
    let circuit = config.ansatz.build()?;
    test.par_iter()
        .map(|img| {
            let compressed = pure_density(&apply(&circuit, theta, &img.state)?);
            let latent = partial_trace(&compressed, &config.trash)?;
            let decompressed = decompress_with(&circuit, theta, &latent, config)?;
            Ok(Evaluation {
                image_id: img.id,
                fidelity: fidelity_with_pure(&img.state, &decompressed)?,
                latent,
                decompressed,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{AnsatzFamily, AnsatzSpec};
    use crate::datasets::{bars_and_stripes_2x4, make_split};
    use crate::quantum::fidelity;

    fn small_config(epochs: usize) -> (DatasetSplit, CompressionConfig) {
        let split = make_split(&bars_and_stripes_2x4(), 10, 2, 5, 3).unwrap();
        let spec = AnsatzSpec::new(AnsatzFamily::Circuit1Device3q, 3, 3).unwrap();
        let mut cfg = CompressionConfig::new(spec, 2).unwrap();
        cfg.epochs = epochs;
        cfg.n_iter = 1;
        cfg.batch_size = 5;
        (split, cfg)
    }

    #[test]
    fn zero_epochs_keeps_initial_theta() {
        let (split, cfg) = small_config(0);
        let run = train(&split, &cfg).unwrap();
        assert!(run.records.is_empty());
        assert_eq!(run.best_theta, initial_parameters(12, cfg.init_seed));
        assert_eq!(run.best_epoch, None);
    }

    #[test]
    fn job_accounting_and_observer() {
        let (split, cfg) = small_config(2);
        let mut seen = Vec::new();
        let run = train_with_observer(&split, &cfg, |r| {
            seen.push(r.epoch);
            Ok(())
        })
        .unwrap();
        assert_eq!(seen, vec![1, 2]);
        assert!(run.records.iter().all(|r| r.jobs_executed == 500));
        assert_eq!(run.total_jobs(), 1000);
        let best = run.best_loss().unwrap();
        assert_eq!(run.records[run.best_epoch.unwrap() - 1].mean_loss, best);
    }

    #[test]
    fn identity_decompression_recovers_product_state() {
        let (_, mut cfg) = small_config(0);
        cfg.ansatz = AnsatzSpec::new(AnsatzFamily::Circuit1, 3, 1).unwrap();
        let c = cfg.ansatz.build().unwrap();
        let theta = vec![0.0; c.num_params()];
        // RY(0) walls and CNOTs on |000> leave it fixed.
        let zero = crate::quantum::StateVector::zero(3).unwrap();
        let rho = pure_density(&zero);
        let latent = partial_trace(&rho, &cfg.trash).unwrap();
        let back = decompress(&theta, &latent, &cfg).unwrap();
        assert!((fidelity(&rho, &back).unwrap() - 1.0).abs() < 1e-9);
        let wrong = DensityMatrix::maximally_mixed(1);
        assert!(decompress(&theta, &wrong, &cfg).is_err());
    }

    #[test]
    fn fidelity_paths_agree_on_random_theta() {
        let (split, cfg) = small_config(0);
        let theta = initial_parameters(12, 99);
        for ev in evaluate_theta(&theta, &cfg, &split.test).unwrap() {
            let img = split.test.iter().find(|e| e.id == ev.image_id).unwrap();
            let general = fidelity(&pure_density(&img.state), &ev.decompressed).unwrap();
            assert!((general - ev.fidelity).abs() < 1e-8);
            assert!((0.0..=1.0).contains(&ev.fidelity));
        }
    }
}
