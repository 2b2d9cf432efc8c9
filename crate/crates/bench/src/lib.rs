//! Shared fixtures for the criterion benches.

use qae_core::ansatz::{AnsatzFamily, AnsatzSpec};
use qae_core::circuit::Circuit;
use qae_core::datasets::{encode, framed_4x4_dataset, EncodedImage};

/// Built ansatz plus a parameter vector spread over the rotation period.
pub fn ansatz_fixture(family: AnsatzFamily, qubits: usize, layers: usize) -> (Circuit, Vec<f64>) {
    let circuit = AnsatzSpec::new(family, qubits, layers)
        .and_then(|s| s.build())
        .expect("valid ansatz spec");
    let theta = (0..circuit.num_params())
        .map(|j| 0.37 * j as f64 + 0.11)
        .collect();
    (circuit, theta)
}

/// The first `count` framed 4×4 images, encoded.
pub fn framed_images(count: usize) -> Vec<EncodedImage> {
    framed_4x4_dataset()
        .iter()
        .take(count)
        .enumerate()
        .map(|(id, img)| encode(id, img).expect("power-of-two image"))
        .collect()
}
