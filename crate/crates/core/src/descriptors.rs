//! Expressibility and entangling-capability descriptors of an ansatz.
//!
//! Expressibility is the KL divergence between the histogram of
//! `F = |<ψ_θ|ψ_φ>|²` over random parameter pairs and the Haar fidelity law
//! `(N-1)(1-F)^(N-2)`. Entangling capability is the mean Meyer-Wallach `Q`.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{apply, Circuit};
use crate::error::{Error, Result};
use crate::quantum::{
    partial_trace, pure_density, purity, state_overlap, QubitSubset, StateVector,
};
use crate::rng;

pub const DEFAULT_EXPRESSIBILITY_SAMPLES: usize = 5000;
pub const DEFAULT_ENTANGLING_SAMPLES: usize = 2000;
/// 40 equal-width bins. At 75 bins even the real-Haar law (the best a
/// real-amplitude circuit can reach) sits 0.167 bits from complex Haar.
pub const DEFAULT_BINS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescriptorConfig {
    pub num_samples: usize,
    pub num_bins: usize,
    pub seed: u64,
}

impl DescriptorConfig {
    pub fn expressibility_default() -> Self {
        Self {
            num_samples: DEFAULT_EXPRESSIBILITY_SAMPLES,
            num_bins: DEFAULT_BINS,
            seed: 0,
        }
    }

    pub fn entangling_default() -> Self {
        Self {
            num_samples: DEFAULT_ENTANGLING_SAMPLES,
            num_bins: DEFAULT_BINS,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_samples < 100 {
            return Err(Error::domain("descriptors need at least 100 samples"));
        }
        if self.num_bins < 10 {
            return Err(Error::domain("descriptors need at least 10 histogram bins"));
        }
        Ok(())
    }
}

/// Haar probability of `F ∈ [low, high]` in dimension `n`.
pub fn haar_bin_mass(low: f64, high: f64, dimension: usize) -> Result<f64> {
    if !(0.0..1.0).contains(&low) || !(low < high && high <= 1.0) || dimension < 2 {
        return Err(Error::domain(format!(
            "invalid Haar bin [{low}, {high}] for dimension {dimension}"
        )));
    }
    let k = (dimension - 1) as i32;
    Ok((1.0 - low).powi(k) - (1.0 - high).powi(k))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub bin_low: f64,
    pub bin_high: f64,
    pub count: usize,
    pub haar_mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expressibility {
    pub kl_bits: f64,
    pub kl_nats: f64,
    pub histogram: Vec<HistogramBin>,
}

fn random_theta<R: Rng>(rng: &mut R, len: usize) -> Vec<f64> {
    (0..len)
        .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
        .collect()
}

fn prepare(circuit: &Circuit, theta: &[f64]) -> Result<StateVector> {
    apply(circuit, theta, &StateVector::zero(circuit.num_qubits())?)
}

pub fn expressibility_histogram(
    circuit: &Circuit,
    config: &DescriptorConfig,
) -> Result<Expressibility> {
    config.validate()?;
    let p = circuit.num_params();
    let fidelities = (0..config.num_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(config.seed, i as u64);
            let a = prepare(circuit, &random_theta(&mut rng, p))?;
            let b = prepare(circuit, &random_theta(&mut rng, p))?;
            state_overlap(&a, &b)
        })
        .collect::<Result<Vec<f64>>>()?;

    let bins = config.num_bins;
    let mut counts = vec![0usize; bins];
    for f in fidelities {
        let k = ((f.clamp(0.0, 1.0) * bins as f64) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let dim = 1usize << circuit.num_qubits();
    let total = config.num_samples as f64;
    let mut kl_nats = 0.0;
    let mut histogram = Vec::with_capacity(bins);
    for (k, &count) in counts.iter().enumerate() {
        let bin_low = k as f64 / bins as f64;
        let bin_high = (k + 1) as f64 / bins as f64;
        let haar_mass = haar_bin_mass(bin_low, bin_high, dim)?;
        if count > 0 {
            let prob = count as f64 / total;
            kl_nats += prob * (prob / haar_mass).ln();
        }
        histogram.push(HistogramBin {
            bin_low,
            bin_high,
            count,
            haar_mass,
        });
    }
    // KL is non-negative; only the last few ulps can dip below zero.
    let kl_nats = kl_nats.max(0.0);
    Ok(Expressibility {
        kl_bits: kl_nats / std::f64::consts::LN_2,
        kl_nats,
        histogram,
    })
}

/// Expressibility in bits.
pub fn expressibility(circuit: &Circuit, config: &DescriptorConfig) -> Result<f64> {
    Ok(expressibility_histogram(circuit, config)?.kl_bits)
}

/// Meyer-Wallach `Q = (1/n) Σ_k 2(1 - Tr ρ_k²)` of a pure state.
pub fn meyer_wallach(state: &StateVector) -> Result<f64> {
    let n = state.num_qubits();
    if n < 2 {
        return Err(Error::domain(
            "Meyer-Wallach measure needs at least 2 qubits",
        ));
    }
    let rho = pure_density(state);
    let mut sum = 0.0;
    for k in 0..n {
        let others = QubitSubset::new((0..n).filter(|&q| q != k), n)?;
        sum += 2.0 * (1.0 - purity(&partial_trace(&rho, &others)?));
    }
    Ok((sum / n as f64).clamp(0.0, 1.0))
}

pub fn entangling_capability(circuit: &Circuit, config: &DescriptorConfig) -> Result<f64> {
    config.validate()?;
    if circuit.num_qubits() < 2 {
        return Err(Error::domain(
            "entangling capability needs at least 2 qubits",
        ));
    }
    let p = circuit.num_params();
    let total: f64 = (0..config.num_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(config.seed, i as u64);
            meyer_wallach(&prepare(circuit, &random_theta(&mut rng, p))?)
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .sum();
    Ok(total / config.num_samples as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptorReport {
    pub num_qubits: usize,
    pub num_params: usize,
    pub expressibility_bits: f64,
    pub expressibility_nats: f64,
    pub entangling_capability: f64,
    pub expressibility_config: DescriptorConfig,
    pub entangling_config: DescriptorConfig,
    pub histogram: Vec<HistogramBin>,
}

pub fn describe(
    circuit: &Circuit,
    expressibility_config: &DescriptorConfig,
    entangling_config: &DescriptorConfig,
) -> Result<DescriptorReport> {
    let expr = expressibility_histogram(circuit, expressibility_config)?;
    Ok(DescriptorReport {
        num_qubits: circuit.num_qubits(),
        num_params: circuit.num_params(),
        expressibility_bits: expr.kl_bits,
        expressibility_nats: expr.kl_nats,
        entangling_capability: entangling_capability(circuit, entangling_config)?,
        expressibility_config: *expressibility_config,
        entangling_config: *entangling_config,
        histogram: expr.histogram,
    })
}

pub const HISTOGRAM_CSV_HEADER: &str = "bin_low,bin_high,count,haar_mass";

pub fn histogram_csv(histogram: &[HistogramBin]) -> String {
    let mut s = format!("{HISTOGRAM_CSV_HEADER}\n");
    for b in histogram {
        s.push_str(&format!(
            "{},{},{},{}\n",
            b.bin_low, b.bin_high, b.count, b.haar_mass
        ));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{GateKind, GateOp};

    #[test]
    fn haar_mass_examples() {
        assert!((haar_bin_mass(0.0, 1.0, 16).unwrap() - 1.0).abs() < 1e-15);
        assert!((haar_bin_mass(0.0, 0.5, 2).unwrap() - 0.5).abs() < 1e-15);
        assert!(haar_bin_mass(0.5, 0.5, 4).is_err());
        assert!(haar_bin_mass(-0.1, 0.5, 4).is_err());
        assert!(haar_bin_mass(0.1, 1.1, 4).is_err());
    }

    #[test]
    fn rotations_only_have_zero_entanglement() {
        let mut c = Circuit::new(3).unwrap();
        for q in 0..3 {
            c.push_rotation(GateKind::RY, q).unwrap();
            c.push_rotation(GateKind::RZ, q).unwrap();
        }
        let cfg = DescriptorConfig {
            num_samples: 200,
            ..DescriptorConfig::entangling_default()
        };
        assert!(entangling_capability(&c, &cfg).unwrap() < 1e-10);
    }

    #[test]
    fn bell_pair_has_unit_q() {
        let mut c = Circuit::new(2).unwrap();
        c.push(GateOp::h(0)).unwrap();
        c.push(GateOp::cnot(0, 1)).unwrap();
        let cfg = DescriptorConfig {
            num_samples: 100,
            ..DescriptorConfig::entangling_default()
        };
        assert!((entangling_capability(&c, &cfg).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn config_bounds() {
        let c = Circuit::new(2).unwrap();
        let few = DescriptorConfig {
            num_samples: 99,
            ..DescriptorConfig::expressibility_default()
        };
        assert!(expressibility(&c, &few).is_err());
        let coarse = DescriptorConfig {
            num_bins: 9,
            ..DescriptorConfig::expressibility_default()
        };
        assert!(expressibility(&c, &coarse).is_err());
        assert!(entangling_capability(
            &Circuit::new(1).unwrap(),
            &DescriptorConfig::entangling_default()
        )
        .is_err());
    }

    #[test]
    fn histogram_csv_header() {
        let c = Circuit::new(2).unwrap();
        let cfg = DescriptorConfig {
            num_samples: 100,
            ..DescriptorConfig::expressibility_default()
        };
        let h = expressibility_histogram(&c, &cfg).unwrap();
        let csv = histogram_csv(&h.histogram);
        assert!(csv.starts_with("bin_low,bin_high,count,haar_mass\n"));
        assert_eq!(csv.lines().count(), 41);
        assert_eq!(h.histogram[39].count, 100);
    }
}
