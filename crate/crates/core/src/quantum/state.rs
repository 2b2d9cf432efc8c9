use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{QubitSubset, MAX_QUBITS, TOLERANCE};
use crate::error::{Error, Result};

/// A normalised pure state on `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

pub(crate) fn qubits_for_len(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::domain(format!(
            "length {len} is not a power of two of at least 2"
        )));
    }
    let n = len.trailing_zeros() as usize;
    if n > MAX_QUBITS {
        return Err(Error::domain(format!(
            "{n} qubits exceeds the dense backend limit of {MAX_QUBITS}"
        )));
    }
    Ok(n)
}

impl StateVector {
    /// |0…0⟩ on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    /// Computational basis state |index⟩.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::domain(format!(
                "unsupported register size {num_qubits}"
            )));
        }
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::domain(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Wraps amplitudes that must already be normalised within [`TOLERANCE`].
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let num_qubits = qubits_for_len(amplitudes.len())?;
        let norm = norm_sqr(&amplitudes);
        if (norm - 1.0).abs() > TOLERANCE {
            return Err(Error::domain(format!(
                "state is not normalised (norm² = {norm})"
            )));
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Normalises arbitrary non-zero amplitudes.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let num_qubits = qubits_for_len(amplitudes.len())?;
        let norm = norm_sqr(&amplitudes).sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::domain("cannot normalise a zero vector"));
        }
        for a in &mut amplitudes {
            *a /= norm;
        }
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Real amplitudes, normalised.
    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::normalized(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Haar-random state drawn from complex Gaussian amplitudes.
    pub fn random<R: Rng + ?Sized>(num_qubits: usize, rng: &mut R) -> Result<Self> {
        let dim = 1usize << num_qubits;
        let amps = (0..dim)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        Self::normalized(amps)
    }

    /// Product state with `low` on qubits `0..low.n` and `high` above it.
    pub fn tensor(low: &StateVector, high: &StateVector) -> Result<Self> {
        let n = low.num_qubits + high.num_qubits;
        if n > MAX_QUBITS {
            return Err(Error::domain("tensor product exceeds register limit"));
        }
        let mut amplitudes = Vec::with_capacity(1 << n);
        for h in &high.amplitudes {
            for l in &low.amplitudes {
                amplitudes.push(h * l);
            }
        }
        Ok(Self {
            num_qubits: n,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amplitudes)
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Probability that every qubit in `subset` reads 0.
    pub fn probability_all_zero(&self, subset: &QubitSubset) -> f64 {
        let mask = subset.mask();
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask == 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Probability that `qubit` reads 1.
    pub fn probability_one(&self, qubit: usize) -> Result<f64> {
        if qubit >= self.num_qubits {
            return Err(Error::IndexOutOfRange {
                index: qubit,
                num_qubits: self.num_qubits,
            });
        }
        let bit = 1 << qubit;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }
}

fn norm_sqr(amps: &[Complex64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

/// |⟨a|b⟩|².
pub fn state_overlap(a: &StateVector, b: &StateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr())
}
