//! Quantum autoencoder training: swap-test cost, parameter-shift gradient
//! descent, decompression and fidelity evaluation.
//!
//! Two cost scales are exposed. [`CostSample::value`] is `J = 1 - <0|ρ_A|0>`,
//! the trash-state infidelity used for optimization; the ancilla form
//! `J_anc = 1 - P(0)` equals `J / 2`.

mod cost;
mod io;
mod train;

pub use cost::{
    ancilla_zero_probability, cost, gradient, swap_test_circuit, swap_test_input, CostSample,
    Evaluator, ShiftRule,
};
pub use io::{
    fidelity_csv, loss_csv, write_loss_row, FidelityRow, FIDELITY_CSV_HEADER, LOSS_CSV_HEADER,
};
pub use train::{
    decompress, evaluate, evaluate_theta, train, train_with_observer, EpochRecord, Evaluation,
    TrainRun,
};

use serde::{Deserialize, Serialize};

use crate::ansatz::AnsatzSpec;
use crate::error::{Error, Result};
use crate::quantum::QubitSubset;

pub const DEFAULT_LEARNING_RATE: f64 = 0.05;
pub const DEFAULT_SHOTS: u64 = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum EvalMode {
    ExactExpectation,
    Shots { shots: u64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompressionConfig {
    pub ansatz: AnsatzSpec,
    pub n_latent: usize,
    pub trash: QubitSubset,
    pub learning_rate: f64,
    pub epochs: usize,
    pub n_iter: usize,
    pub batch_size: usize,
    pub eval_mode: EvalMode,
    /// Seed for the uniform [0, 2π) parameter initialization.
    pub init_seed: u64,
}

impl CompressionConfig {
    /// Defaults: highest-index qubits as trash, η = 0.05, 40 epochs,
    /// 10 iterations per batch, batch size 7, exact expectation.
    pub fn new(ansatz: AnsatzSpec, n_latent: usize) -> Result<Self> {
        let n = ansatz.num_qubits;
        if n_latent == 0 || n_latent >= n {
            return Err(Error::domain(format!(
                "latent size {n_latent} must be in 1..{n}"
            )));
        }
        let config = Self {
            ansatz,
            n_latent,
            trash: QubitSubset::highest(n - n_latent, n)?,
            learning_rate: DEFAULT_LEARNING_RATE,
            epochs: 40,
            n_iter: 10,
            batch_size: 7,
            eval_mode: EvalMode::ExactExpectation,
            init_seed: 0,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn n_input(&self) -> usize {
        self.ansatz.num_qubits
    }

    pub fn validate(&self) -> Result<()> {
        self.ansatz.validate()?;
        let n = self.n_input();
        if self.n_latent == 0 || self.n_latent >= n {
            return Err(Error::domain(format!(
                "latent size {} must be in 1..{n}",
                self.n_latent
            )));
        }
        if self.trash.len() != n - self.n_latent {
            return Err(Error::domain(format!(
                "trash has {} qubits, expected {}",
                self.trash.len(),
                n - self.n_latent
            )));
        }
        if let Some(&q) = self.trash.indices().last() {
            if q >= n {
                return Err(Error::IndexOutOfRange {
                    index: q,
                    num_qubits: n,
                });
            }
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::domain("learning rate must be positive"));
        }
        if self.batch_size == 0 {
            return Err(Error::domain("batch size must be at least 1"));
        }
        if let EvalMode::Shots { shots: 0, .. } = self.eval_mode {
            return Err(Error::domain("shots must be at least 1"));
        }
        Ok(())
    }

    /// Latent qubits, ascending.
    pub fn latent(&self) -> Vec<usize> {
        self.trash.complement(self.n_input())
    }
}
