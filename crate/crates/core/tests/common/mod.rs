//! Oracles shared by the integration targets.
#![allow(dead_code)]

use qae_core::ansatz::AnsatzFamily;
use qae_core::circuit::{apply, Circuit};
use qae_core::datasets::EncodedImage;
use qae_core::quantum::StateVector;
use qae_core::trainer::{cost, CompressionConfig};

/// ⟨0…0|ρ_trash|0…0⟩ by summing |a_i|² over basis states whose trash bits
/// are all clear.
pub fn trash_zero_probability(out: &StateVector, trash: &[usize]) -> f64 {
    out.amplitudes()
        .iter()
        .enumerate()
        .filter(|(i, _)| trash.iter().all(|&q| (i >> q) & 1 == 0))
        .map(|(_, a)| a.norm_sqr())
        .sum()
}

/// Swap-test prediction P(ancilla = 0) = 1/2 + ⟨0|ρ_trash|0⟩ / 2.
pub fn swap_law(circuit: &Circuit, theta: &[f64], data: &StateVector, trash: &[usize]) -> f64 {
    let out = apply(circuit, theta, data).unwrap();
    0.5 + trash_zero_probability(&out, trash) / 2.0
}

/// Central differences of the batch-mean cost.
pub fn finite_difference(
    theta: &[f64],
    batch: &[EncodedImage],
    config: &CompressionConfig,
    h: f64,
) -> Vec<f64> {
    let mean = |t: &[f64]| {
        batch
            .iter()
            .map(|img| cost(t, img, config).unwrap())
            .sum::<f64>()
            / batch.len() as f64
    };
    (0..theta.len())
        .map(|j| {
            let mut plus = theta.to_vec();
            let mut minus = theta.to_vec();
            plus[j] += h;
            minus[j] -= h;
            (mean(&plus) - mean(&minus)) / (2.0 * h)
        })
        .collect()
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

pub const TABLE_FAMILIES: [AnsatzFamily; 3] = [
    AnsatzFamily::Circuit1,
    AnsatzFamily::Circuit2,
    AnsatzFamily::Circuit3,
];
