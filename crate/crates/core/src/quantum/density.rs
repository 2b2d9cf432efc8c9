use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::linalg;
use super::state::qubits_for_len;
use super::{QubitSubset, StateVector, TOLERANCE};
use crate::error::{Error, Result};

/// A 2ⁿ×2ⁿ density operator stored densely in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn from_entries(num_qubits: usize, entries: Vec<Complex64>) -> Result<Self> {
        let dim = 1usize << num_qubits;
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: entries.len(),
            });
        }
        let rho = Self::from_entries_unchecked(num_qubits, entries);
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn from_entries_unchecked(num_qubits: usize, entries: Vec<Complex64>) -> Self {
        debug_assert_eq!(entries.len(), 1 << (2 * num_qubits));
        Self {
            num_qubits,
            entries,
        }
    }

    /// I / 2ⁿ.
    pub fn maximally_mixed(num_qubits: usize) -> Self {
        let dim = 1usize << num_qubits;
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::new(1.0 / dim as f64, 0.0);
        }
        Self::from_entries_unchecked(num_qubits, entries)
    }

    /// Random mixture of `rank` Haar-random pure states with random weights.
    pub fn random<R: Rng + ?Sized>(num_qubits: usize, rank: usize, rng: &mut R) -> Result<Self> {
        if rank == 0 {
            return Err(Error::domain("mixture rank must be positive"));
        }
        let weights: Vec<f64> = (0..rank).map(|_| rng.random::<f64>() + 1e-3).collect();
        let total: f64 = weights.iter().sum();
        let dim = 1usize << num_qubits;
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for w in weights {
            let psi = StateVector::random(num_qubits, rng)?;
            let a = psi.amplitudes();
            for i in 0..dim {
                for j in 0..dim {
                    entries[i * dim + j] += a[i] * a[j].conj() * (w / total);
                }
            }
        }
        Ok(Self::from_entries_unchecked(num_qubits, entries))
    }

    /// Places `latent` on the qubits outside `zeroed` and |0⟩⟨0| on `zeroed`.
    pub fn with_zeroed_qubits(
        latent: &DensityMatrix,
        zeroed: &QubitSubset,
        num_qubits: usize,
    ) -> Result<Self> {
        let kept = zeroed.complement(num_qubits);
        if kept.len() != latent.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: 1 << kept.len(),
                actual: latent.dim(),
            });
        }
        let dim = 1usize << num_qubits;
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        let ld = latent.dim();
        for i in 0..ld {
            let full_i = scatter_bits(i, &kept);
            for j in 0..ld {
                let full_j = scatter_bits(j, &kept);
                entries[full_i * dim + full_j] = latent.entries[i * ld + j];
            }
        }
        Ok(Self::from_entries_unchecked(num_qubits, entries))
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub(crate) fn entries_mut(&mut self) -> &mut [Complex64] {
        &mut self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim() + col]
    }

    pub fn trace(&self) -> Complex64 {
        let d = self.dim();
        (0..d).map(|i| self.entries[i * d + i]).sum()
    }

    /// Largest elementwise deviation |M - M†|.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                let diff = self.entries[i * d + j] - self.entries[j * d + i].conj();
                worst = worst.max(diff.norm());
            }
        }
        worst
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(linalg::to_matrix(self.dim(), &self.entries))
    }

    /// ⟨φ|ρ|φ⟩.
    pub fn expectation(&self, phi: &StateVector) -> Result<f64> {
        let d = self.dim();
        if phi.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: phi.dim(),
            });
        }
        let a = phi.amplitudes();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..d {
            let row = &self.entries[i * d..(i + 1) * d];
            let inner: Complex64 = row.iter().zip(a).map(|(r, x)| r * x).sum();
            acc += a[i].conj() * inner;
        }
        Ok(acc.re)
    }

    fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > TOLERANCE {
            return Err(Error::InvalidDensity(format!(
                "not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > TOLERANCE || tr.im.abs() > TOLERANCE {
            return Err(Error::InvalidDensity(format!("trace is {tr}")));
        }
        if let Some(&min) = self.eigenvalues().first() {
            if min < -super::NEGATIVE_EIGEN_TOLERANCE {
                return Err(Error::NotPositive(min));
            }
        }
        Ok(())
    }
}

/// Deposits the bits of `compact` at the positions listed in `positions`.
fn scatter_bits(compact: usize, positions: &[usize]) -> usize {
    positions
        .iter()
        .enumerate()
        .fold(0, |acc, (k, &q)| acc | (((compact >> k) & 1) << q))
}

/// |φ⟩⟨φ|.
pub fn pure_density(state: &StateVector) -> DensityMatrix {
    let a = state.amplitudes();
    let d = a.len();
    let mut entries = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            entries.push(a[i] * a[j].conj());
        }
    }
    DensityMatrix::from_entries_unchecked(state.num_qubits(), entries)
}

/// Traces out `traced_out`; the remaining qubits keep their relative order.
pub fn partial_trace(rho: &DensityMatrix, traced_out: &QubitSubset) -> Result<DensityMatrix> {
    let n = rho.num_qubits();
    if let Some(&q) = traced_out.indices().last() {
        if q >= n {
            return Err(Error::IndexOutOfRange {
                index: q,
                num_qubits: n,
            });
        }
    }
    if traced_out.len() >= n {
        return Err(Error::domain("cannot trace out every qubit"));
    }
    let kept = traced_out.complement(n);
    let traced = traced_out.indices();
    let d = rho.dim();
    let kd = 1usize << kept.len();
    let td = 1usize << traced.len();
    let traced_offsets: Vec<usize> = (0..td).map(|t| scatter_bits(t, traced)).collect();
    let kept_offsets: Vec<usize> = (0..kd).map(|k| scatter_bits(k, &kept)).collect();
    let mut entries = vec![Complex64::new(0.0, 0.0); kd * kd];
    for (i, &fi) in kept_offsets.iter().enumerate() {
        for (j, &fj) in kept_offsets.iter().enumerate() {
            entries[i * kd + j] = traced_offsets
                .iter()
                .map(|&t| rho.entries[(fi | t) * d + (fj | t)])
                .sum();
        }
    }
    let out = DensityMatrix::from_entries_unchecked(kept.len(), entries);
    debug_assert!((out.trace() - rho.trace()).norm() < 1e-9);
    debug_assert!(out.hermiticity_error() < 1e-9);
    Ok(out)
}

/// Tr[ρ²].
pub fn purity(rho: &DensityMatrix) -> f64 {
    // Tr[ρ²] = Σ_ij ρ_ij ρ_ji = Σ_ij |ρ_ij|² for Hermitian ρ.
    rho.entries.iter().map(|z| z.norm_sqr()).sum()
}

fn check_same_dim(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            actual: sigma.dim(),
        });
    }
    Ok(())
}

/// Uhlmann fidelity Tr√(√ρ σ √ρ), clamped to [0, 1].
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_same_dim(rho, sigma)?;
    let d = rho.dim();
    let root = linalg::psd_sqrt(linalg::to_matrix(d, &rho.entries))?;
    let s = linalg::to_matrix(d, &sigma.entries);
    let mut inner = &root * s * &root;
    // Symmetrise to remove round-off before the Hermitian solver.
    inner = (&inner + inner.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(linalg::trace_sqrt(inner)?.clamp(0.0, 1.0))
}

/// Fidelity between the pure state |φ⟩⟨φ| and σ: √⟨φ|σ|φ⟩.
pub fn fidelity_with_pure(phi: &StateVector, sigma: &DensityMatrix) -> Result<f64> {
    Ok(sigma.expectation(phi)?.clamp(0.0, 1.0).sqrt())
}

impl Serialize for DensityMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let d = self.dim();
        let rows: Vec<Vec<[f64; 2]>> = (0..d)
            .map(|i| {
                self.entries[i * d..(i + 1) * d]
                    .iter()
                    .map(|z| [z.re, z.im])
                    .collect()
            })
            .collect();
        rows.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let rows: Vec<Vec<[f64; 2]>> = Vec::deserialize(deserializer)?;
        let n = qubits_for_len(rows.len()).map_err(D::Error::custom)?;
        if rows.iter().any(|r| r.len() != rows.len()) {
            return Err(D::Error::custom("density matrix rows must be square"));
        }
        let entries = rows
            .into_iter()
            .flatten()
            .map(|[re, im]| Complex64::new(re, im))
            .collect();
        DensityMatrix::from_entries(n, entries).map_err(D::Error::custom)
    }
}
