use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use rand::RngCore;
use rayon::prelude::*;

use super::{CompressionConfig, EvalMode};
use crate::circuit::{apply, measure_qubit, Circuit, GateKind, GateOp};
use crate::datasets::EncodedImage;
use crate::error::{Error, Result};
use crate::quantum::{QubitSubset, StateVector};
use crate::rng;

/// Data register on qubits `0..n`, one reference qubit per trash qubit on
/// `n..n+t`, ancilla on `n+t`. The ansatz acts on the data register, then
/// the ancilla runs H, CSWAP(reference_i, trash_i), H.
pub fn swap_test_circuit(ansatz: &Circuit, trash: &QubitSubset) -> Result<Circuit> {
    let n = ansatz.num_qubits();
    let t = trash.len();
    if let Some(&q) = trash.indices().last() {
        if q >= n {
            return Err(Error::IndexOutOfRange {
                index: q,
                num_qubits: n,
            });
        }
    }
    if t >= n {
        return Err(Error::domain(format!(
            "{t} trash qubits leave no latent qubit in a {n}-qubit register"
        )));
    }
    let ancilla = n + t;
    let mut c = ansatz.widened(n + t + 1)?;
    c.push(GateOp::h(ancilla))?;
    for (i, &q) in trash.indices().iter().enumerate() {
        c.push(GateOp::cswap(ancilla, n + i, q))?;
    }
    c.push(GateOp::h(ancilla))?;
    Ok(c)
}

/// `data` with the reference and ancilla qubits appended in |0⟩.
pub fn swap_test_input(data: &StateVector, trash_len: usize) -> Result<StateVector> {
    StateVector::tensor(data, &StateVector::zero(trash_len + 1)?)
}

/// Exact P(ancilla = 0) of the swap-test circuit.
pub fn ancilla_zero_probability(
    ansatz: &Circuit,
    trash: &QubitSubset,
    theta: &[f64],
    data: &StateVector,
) -> Result<f64> {
    let swap = swap_test_circuit(ansatz, trash)?;
    let out = apply(&swap, theta, &swap_test_input(data, trash.len())?)?;
    Ok(1.0 - out.probability_one(ansatz.num_qubits() + trash.len())?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostSample {
    /// `J = 1 - overlap`, clamped to [0, 1].
    pub value: f64,
    /// The estimate before clamping. Only shot noise can push it outside [0, 1].
    pub raw: f64,
    /// `J_anc = 1 - P(ancilla = 0)`.
    pub ancilla: f64,
}

/// How a parameter's derivative is recovered from shifted evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftRule {
    /// `(f(θ+π/2) - f(θ-π/2)) / 2`, exact for RX, RY, RZ.
    TwoTerm,
    /// Four evaluations at ±π/2 and ±3π/2, exact for CRX and CRZ whose
    /// generator has eigenvalues {0, ±1/2}.
    FourTerm,
}

impl ShiftRule {
    fn for_kind(kind: GateKind) -> Self {
        match kind {
            GateKind::CRX | GateKind::CRZ => ShiftRule::FourTerm,
            _ => ShiftRule::TwoTerm,
        }
    }

    /// (shift, coefficient) pairs.
    fn terms(self) -> &'static [(f64, f64)] {
        const C_PLUS: f64 = (SQRT_2 + 1.0) / (4.0 * SQRT_2);
        const C_MINUS: f64 = (SQRT_2 - 1.0) / (4.0 * SQRT_2);
        match self {
            ShiftRule::TwoTerm => &[(FRAC_PI_2, 0.5), (-FRAC_PI_2, -0.5)],
            ShiftRule::FourTerm => &[
                (FRAC_PI_2, C_PLUS),
                (-FRAC_PI_2, -C_PLUS),
                (1.5 * PI, -C_MINUS),
                (-1.5 * PI, C_MINUS),
            ],
        }
    }
}

pub(crate) struct BatchStep {
    pub gradient: Vec<f64>,
    pub costs: Vec<CostSample>,
    pub jobs: u64,
}

/// Cost and gradient evaluation for one configuration.
#[derive(Debug, Clone)]
pub struct Evaluator {
    config: CompressionConfig,
    circuit: Circuit,
    swap: Circuit,
    rules: Vec<ShiftRule>,
}

impl Evaluator {
    pub fn new(config: &CompressionConfig) -> Result<Self> {
        config.validate()?;
        Self::with_circuit(config, config.ansatz.build()?)
    }

    /// Uses `circuit` in place of the configured ansatz.
    pub fn with_circuit(config: &CompressionConfig, circuit: Circuit) -> Result<Self> {
        if circuit.num_qubits() != config.n_input() {
            return Err(Error::DimensionMismatch {
                expected: config.n_input(),
                actual: circuit.num_qubits(),
            });
        }
        let mut rules = vec![ShiftRule::TwoTerm; circuit.num_params()];
        for op in circuit.ops() {
            if let Some(slot) = op.param_slot {
                rules[slot] = ShiftRule::for_kind(op.kind);
            }
        }
        Ok(Self {
            swap: swap_test_circuit(&circuit, &config.trash)?,
            config: config.clone(),
            circuit,
            rules,
        })
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn config(&self) -> &CompressionConfig {
        &self.config
    }

    pub fn shift_rules(&self) -> &[ShiftRule] {
        &self.rules
    }

    /// Circuit runs per image per iteration: one base run plus one per
    /// shift term. Equals `2·N_params + 1` when every rule is two-term.
    pub fn jobs_per_image(&self) -> u64 {
        1 + self
            .rules
            .iter()
            .map(|r| r.terms().len() as u64)
            .sum::<u64>()
    }

    /// Cost of one image. `job` picks the shot-sampling stream.
    pub fn cost(&self, theta: &[f64], data: &StateVector, job: u64) -> Result<CostSample> {
        match self.config.eval_mode {
            EvalMode::ExactExpectation => {
                let out = apply(&self.circuit, theta, data)?;
                let raw = 1.0 - out.probability_all_zero(&self.config.trash);
                let value = raw.clamp(0.0, 1.0);
                Ok(CostSample {
                    value,
                    raw,
                    ancilla: value / 2.0,
                })
            }
            EvalMode::Shots { shots, seed } => {
                let t = self.config.trash.len();
                let out = apply(&self.swap, theta, &swap_test_input(data, t)?)?;
                let sample_seed = rng::stream(seed, job).next_u64();
                let (zeros, ones) =
                    measure_qubit(&out, self.config.n_input() + t, shots, sample_seed)?;
                let p0 = zeros as f64 / shots as f64;
                let raw = 1.0 - (2.0 * p0 - 1.0);
                Ok(CostSample {
                    value: raw.clamp(0.0, 1.0),
                    raw,
                    ancilla: ones as f64 / shots as f64,
                })
            }
        }
    }

    /// Base costs and batch-mean parameter-shift gradient. Job ids run from
    /// `job_base` so shot streams do not depend on thread scheduling.
    pub(crate) fn batch_step(
        &self,
        theta: &[f64],
        batch: &[EncodedImage],
        job_base: u64,
    ) -> Result<BatchStep> {
        if batch.is_empty() {
            return Err(Error::domain("gradient needs a non-empty batch"));
        }
        if theta.len() != self.circuit.num_params() {
            return Err(Error::ParameterMismatch {
                expected: self.circuit.num_params(),
                actual: theta.len(),
            });
        }
        // (parameter, shift, coefficient); the base run has no parameter.
        let mut plan: Vec<Option<(usize, f64, f64)>> = vec![None];
        for (j, rule) in self.rules.iter().enumerate() {
            plan.extend(rule.terms().iter().map(|&(s, c)| Some((j, s, c))));
        }
        let per_image = plan.len() as u64;

        let tasks: Vec<(usize, usize)> = (0..batch.len())
            .flat_map(|i| (0..plan.len()).map(move |k| (i, k)))
            .collect();
        let results = tasks
            .par_iter()
            .map(|&(i, k)| {
                let job = job_base + i as u64 * per_image + k as u64;
                match plan[k] {
                    None => self.cost(theta, &batch[i].state, job),
                    Some((j, shift, _)) => {
                        let mut shifted = theta.to_vec();
                        shifted[j] += shift;
                        self.cost(&shifted, &batch[i].state, job)
                    }
                }
            })
            .collect::<Result<Vec<_>>>()?;

        let mut gradient = vec![0.0; theta.len()];
        let mut costs = Vec::with_capacity(batch.len());
        for chunk in results.chunks(plan.len()) {
            costs.push(chunk[0]);
            for (sample, term) in chunk.iter().zip(&plan).skip(1) {
                let (j, _, coeff) = term.expect("shift term");
                gradient[j] += coeff * sample.value;
            }
        }
        let scale = 1.0 / batch.len() as f64;
        gradient.iter_mut().for_each(|g| *g *= scale);
        Ok(BatchStep {
            gradient,
            costs,
            jobs: per_image * batch.len() as u64,
        })
    }
}

/// Cost of one image under `config`.
pub fn cost(theta: &[f64], encoded: &EncodedImage, config: &CompressionConfig) -> Result<f64> {
    Ok(Evaluator::new(config)?
        .cost(theta, &encoded.state, 0)?
        .value)
}

/// Batch-mean parameter-shift gradient.
pub fn gradient(
    theta: &[f64],
    batch: &[EncodedImage],
    config: &CompressionConfig,
) -> Result<Vec<f64>> {
    Ok(Evaluator::new(config)?
        .batch_step(theta, batch, 0)?
        .gradient)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{AnsatzFamily, AnsatzSpec};
    use crate::datasets::{encode, framed_4x4_dataset};

    fn config(n: usize, latent: usize) -> CompressionConfig {
        let spec = AnsatzSpec::new(AnsatzFamily::Circuit1, n, 1).unwrap();
        CompressionConfig::new(spec, latent).unwrap()
    }

    fn zero_image(n: usize) -> EncodedImage {
        let image = crate::datasets::PixelImage::from_bits(1 << n, 1, 0).unwrap();
        EncodedImage {
            id: 0,
            image,
            state: StateVector::zero(n).unwrap(),
        }
    }

    #[test]
    fn identity_gives_zero_cost() {
        let cfg = config(3, 2);
        let ev = Evaluator::with_circuit(&cfg, Circuit::new(3).unwrap()).unwrap();
        let s = ev.cost(&[], &StateVector::zero(3).unwrap(), 0).unwrap();
        assert_eq!(s.value, 0.0);
    }

    #[test]
    fn flipped_trash_gives_unit_cost() {
        let cfg = config(3, 2);
        let mut c = Circuit::new(3).unwrap();
        c.push(GateOp::x(2)).unwrap();
        let ev = Evaluator::with_circuit(&cfg, c.clone()).unwrap();
        let s = ev.cost(&[], &StateVector::zero(3).unwrap(), 0).unwrap();
        assert!((s.value - 1.0).abs() < 1e-12);
        assert!((s.ancilla - 0.5).abs() < 1e-12);
        let p0 =
            ancilla_zero_probability(&c, &cfg.trash, &[], &StateVector::zero(3).unwrap()).unwrap();
        assert!((p0 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn swap_test_shape() {
        let cfg = config(4, 2);
        let c = cfg.ansatz.build().unwrap();
        let swap = swap_test_circuit(&c, &cfg.trash).unwrap();
        assert_eq!(swap.num_qubits(), 7);
        assert_eq!(swap.ops().len(), c.ops().len() + 4);
        let all = QubitSubset::new(0..4, 4).unwrap();
        assert!(swap_test_circuit(&c, &all).is_err());
    }

    #[test]
    fn one_qubit_toy_gradient() {
        // RY(θ) on the trash qubit of |00⟩: J = sin²(θ/2), dJ/dθ = sin(θ)/2.
        let cfg = config(2, 1);
        let mut c = Circuit::new(2).unwrap();
        c.push_rotation(GateKind::RY, 1).unwrap();
        let ev = Evaluator::with_circuit(&cfg, c).unwrap();
        for theta in [0.0, 0.4, 1.3, 2.9, 5.0] {
            let step = ev.batch_step(&[theta], &[zero_image(2)], 0).unwrap();
            assert!((step.gradient[0] - theta.sin() / 2.0).abs() < 1e-12);
            assert!((step.costs[0].value - (theta / 2.0).sin().powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn disconnected_parameter_has_zero_gradient() {
        let cfg = config(2, 1);
        let mut c = Circuit::new(2).unwrap();
        c.push_rotation(GateKind::RZ, 0).unwrap();
        c.push_rotation(GateKind::RY, 1).unwrap();
        let ev = Evaluator::with_circuit(&cfg, c).unwrap();
        let step = ev.batch_step(&[0.7, 0.3], &[zero_image(2)], 0).unwrap();
        assert!(step.gradient[0].abs() < 1e-12);
    }

    #[test]
    fn four_term_rule_matches_finite_difference() {
        let cfg = config(2, 1);
        let mut c = Circuit::with_params(2, 3).unwrap();
        c.push(GateOp::ry(0, 0)).unwrap();
        c.push(GateOp::crx(0, 1, 1)).unwrap();
        c.push(GateOp::crz(1, 0, 2)).unwrap();
        c.push(GateOp::h(1)).unwrap();
        let ev = Evaluator::with_circuit(&cfg, c).unwrap();
        assert_eq!(ev.jobs_per_image(), 1 + 2 + 4 + 4);
        let img = encode(3, &crate::datasets::bars_and_stripes_2x4()[3]).unwrap();
        let img = EncodedImage {
            state: StateVector::normalized(img.state.amplitudes()[..4].to_vec()).unwrap(),
            ..img
        };
        let theta = [0.9, 1.7, -0.4];
        let step = ev
            .batch_step(&theta, std::slice::from_ref(&img), 0)
            .unwrap();
        let h = 1e-5;
        for j in 0..3 {
            let mut up = theta;
            let mut down = theta;
            up[j] += h;
            down[j] -= h;
            let fd = (ev.cost(&up, &img.state, 0).unwrap().value
                - ev.cost(&down, &img.state, 0).unwrap().value)
                / (2.0 * h);
            assert!((fd - step.gradient[j]).abs() < 1e-7, "param {j}");
        }
    }

    #[test]
    fn jobs_per_image_is_two_p_plus_one() {
        let spec = AnsatzSpec::new(AnsatzFamily::Circuit1Device3q, 3, 3).unwrap();
        let cfg = CompressionConfig::new(spec, 2).unwrap();
        assert_eq!(Evaluator::new(&cfg).unwrap().jobs_per_image(), 25);
    }

    #[test]
    fn shots_are_seeded_per_job() {
        let mut cfg = config(4, 3);
        cfg.eval_mode = EvalMode::Shots {
            shots: 1000,
            seed: 5,
        };
        let ev = Evaluator::new(&cfg).unwrap();
        let img = encode(7, &framed_4x4_dataset()[7]).unwrap();
        let theta = vec![0.3; ev.circuit().num_params()];
        let a = ev.cost(&theta, &img.state, 11).unwrap();
        assert_eq!(a, ev.cost(&theta, &img.state, 11).unwrap());
        assert!(a.raw >= 0.0 && a.raw <= 2.0);
    }
}
