use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use super::{Circuit, GateKind, GateOp};
use crate::error::{Error, Result};
use crate::quantum::{DensityMatrix, StateVector};

/// Single-qubit action, specialised by structure.
#[derive(Debug, Clone, Copy)]
enum Local {
    Dense([[Complex64; 2]; 2]),
    Diagonal([Complex64; 2]),
    Flip,
}

impl Local {
    fn conj(self) -> Self {
        match self {
            Local::Dense(m) => Local::Dense([
                [m[0][0].conj(), m[0][1].conj()],
                [m[1][0].conj(), m[1][1].conj()],
            ]),
            Local::Diagonal(d) => Local::Diagonal([d[0].conj(), d[1].conj()]),
            Local::Flip => Local::Flip,
        }
    }

    fn dense(self) -> [[Complex64; 2]; 2] {
        let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        match self {
            Local::Dense(m) => m,
            Local::Diagonal(d) => [[d[0], z], [z, d[1]]],
            Local::Flip => [[z, o], [o, z]],
        }
    }

    /// `next · self`: this action followed by `next`.
    fn then(self, next: Local) -> Local {
        match (self, next) {
            (Local::Diagonal(a), Local::Diagonal(b)) => Local::Diagonal([a[0] * b[0], a[1] * b[1]]),
            (Local::Dense(a), Local::Diagonal(d)) => Local::Dense([
                [d[0] * a[0][0], d[0] * a[0][1]],
                [d[1] * a[1][0], d[1] * a[1][1]],
            ]),
            (Local::Diagonal(d), Local::Dense(b)) => Local::Dense([
                [b[0][0] * d[0], b[0][1] * d[1]],
                [b[1][0] * d[0], b[1][1] * d[1]],
            ]),
            _ => {
                let (a, b) = (self.dense(), next.dense());
                let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
                for (i, row) in m.iter_mut().enumerate() {
                    for (j, v) in row.iter_mut().enumerate() {
                        *v = b[i][0] * a[0][j] + b[i][1] * a[1][j];
                    }
                }
                Local::Dense(m)
            }
        }
    }
}

fn rotation(kind: GateKind, angle: f64) -> Local {
    let (s, c) = (angle / 2.0).sin_cos();
    match kind {
        GateKind::RX | GateKind::CRX => Local::Dense([
            [Complex64::new(c, 0.0), Complex64::new(0.0, -s)],
            [Complex64::new(0.0, -s), Complex64::new(c, 0.0)],
        ]),
        GateKind::RY => Local::Dense([
            [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
            [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
        ]),
        GateKind::RZ | GateKind::CRZ => {
            Local::Diagonal([Complex64::new(c, -s), Complex64::new(c, s)])
        }
        _ => unreachable!("{kind} is not a rotation"),
    }
}

/// Applies `local` to bit `bit` of `amps`, restricted to indices where
/// all bits of `control_mask` are set.
fn apply_local(amps: &mut [Complex64], bit: usize, control_mask: usize, local: Local) {
    let step = 1usize << bit;
    let low = step - 1;
    // Pair k maps to (i, i | step), with i the k-th index whose `bit` is clear.
    let pairs = (0..amps.len() / 2)
        .map(move |k| ((k & !low) << 1) | (k & low))
        .filter(move |i| i & control_mask == control_mask);
    match local {
        Local::Dense(m) => {
            for i in pairs {
                let j = i | step;
                let (a0, a1) = (amps[i], amps[j]);
                amps[i] = m[0][0] * a0 + m[0][1] * a1;
                amps[j] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
        Local::Diagonal(d) => {
            for i in pairs {
                amps[i] *= d[0];
                amps[i | step] *= d[1];
            }
        }
        Local::Flip => {
            for i in pairs {
                amps.swap(i, i | step);
            }
        }
    }
}

fn apply_phase_flip(amps: &mut [Complex64], mask: usize) {
    for (i, a) in amps.iter_mut().enumerate() {
        if i & mask == mask {
            *a = -*a;
        }
    }
}

fn apply_swap(amps: &mut [Complex64], a: usize, b: usize, control_mask: usize) {
    let (ba, bb) = (1usize << a, 1usize << b);
    for i in 0..amps.len() {
        if i & control_mask == control_mask && i & ba != 0 && i & bb == 0 {
            amps.swap(i, (i & !ba) | bb);
        }
    }
}

/// The 2×2 action on the target of H, X, CNOT and the (controlled) rotations.
fn local_of(op: &GateOp, theta: &[f64]) -> Option<Local> {
    match op.kind {
        GateKind::H => {
            let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            Some(Local::Dense([[h, h], [h, -h]]))
        }
        GateKind::X | GateKind::CNOT => Some(Local::Flip),
        GateKind::RX | GateKind::RY | GateKind::RZ | GateKind::CRX | GateKind::CRZ => {
            let angle = op.angle(theta).expect("rotation has a slot");
            Some(rotation(op.kind, angle))
        }
        GateKind::CZ | GateKind::SWAP | GateKind::CSWAP => None,
    }
}

/// A circuit with runs of uncontrolled single-qubit gates on the same qubit
/// merged into one 2×2 matrix.
enum Kernel<'a> {
    Local(usize, Local),
    Gate(&'a GateOp),
}

fn fuse<'a>(circuit: &'a Circuit, theta: &[f64]) -> Vec<Kernel<'a>> {
    let mut pending: Vec<Option<Local>> = vec![None; circuit.num_qubits()];
    let mut out = Vec::with_capacity(circuit.ops().len());
    for op in circuit.ops() {
        if op.control.is_none() && op.targets.len() == 1 {
            if let Some(local) = local_of(op, theta) {
                let q = op.targets[0];
                pending[q] = Some(match pending[q] {
                    Some(prev) => prev.then(local),
                    None => local,
                });
                continue;
            }
        }
        for q in op.qubits() {
            if let Some(local) = pending[q].take() {
                out.push(Kernel::Local(q, local));
            }
        }
        out.push(Kernel::Gate(op));
    }
    for (q, local) in pending.into_iter().enumerate() {
        if let Some(local) = local {
            out.push(Kernel::Local(q, local));
        }
    }
    out
}

fn apply_kernel(
    amps: &mut [Complex64],
    kernel: &Kernel,
    theta: &[f64],
    offset: usize,
    conjugate: bool,
) {
    match kernel {
        Kernel::Local(q, local) => {
            let local = if conjugate { local.conj() } else { *local };
            apply_local(amps, q + offset, 0, local);
        }
        Kernel::Gate(op) => apply_gate(amps, op, theta, offset, conjugate),
    }
}

/// Applies one gate to `amps`, with qubit `q` living at bit `q + offset`.
/// `conjugate` applies the elementwise complex conjugate of the gate.
fn apply_gate(amps: &mut [Complex64], op: &GateOp, theta: &[f64], offset: usize, conjugate: bool) {
    let bit = |q: usize| q + offset;
    let cmask = op.control.map_or(0, |c| 1usize << bit(c));
    let t0 = bit(op.targets[0]);
    let local = match op.kind {
        GateKind::CZ => {
            apply_phase_flip(amps, cmask | (1 << t0));
            None
        }
        GateKind::SWAP | GateKind::CSWAP => {
            apply_swap(amps, t0, bit(op.targets[1]), cmask);
            None
        }
        _ => local_of(op, theta),
    };
    if let Some(local) = local {
        let local = if conjugate { local.conj() } else { local };
        apply_local(amps, t0, cmask, local);
    }
}

fn check_params(circuit: &Circuit, theta: &[f64]) -> Result<()> {
    if theta.len() != circuit.num_params() {
        return Err(Error::ParameterMismatch {
            expected: circuit.num_params(),
            actual: theta.len(),
        });
    }
    Ok(())
}

/// Runs the circuit on a copy of `input`.
pub fn apply(circuit: &Circuit, theta: &[f64], input: &StateVector) -> Result<StateVector> {
    let mut out = input.clone();
    apply_in_place(circuit, theta, &mut out)?;
    Ok(out)
}

/// Runs the circuit, overwriting `state`.
pub fn apply_in_place(circuit: &Circuit, theta: &[f64], state: &mut StateVector) -> Result<()> {
    check_params(circuit, theta)?;
    if state.num_qubits() != circuit.num_qubits() {
        return Err(Error::DimensionMismatch {
            expected: 1 << circuit.num_qubits(),
            actual: state.dim(),
        });
    }
    let amps = state.amplitudes_mut();
    for kernel in fuse(circuit, theta) {
        apply_kernel(amps, &kernel, theta, 0, false);
    }
    Ok(())
}

/// U ρ U†.
///
/// The row-major entries are treated as a vector on 2n qubits: the row index
/// occupies the high n bits and the column index the low n bits, so U acts on
/// the high half and U* on the low half.
pub fn apply_to_density(
    circuit: &Circuit,
    theta: &[f64],
    rho: &DensityMatrix,
) -> Result<DensityMatrix> {
    check_params(circuit, theta)?;
    let n = circuit.num_qubits();
    if rho.num_qubits() != n {
        return Err(Error::DimensionMismatch {
            expected: 1 << n,
            actual: rho.dim(),
        });
    }
    let mut out = rho.clone();
    let entries = out.entries_mut();
    for kernel in fuse(circuit, theta) {
        apply_kernel(entries, &kernel, theta, n, false);
        apply_kernel(entries, &kernel, theta, 0, true);
    }
    Ok(out)
}

/// Images of the computational basis states, i.e. the columns of U.
pub fn unitary_columns(circuit: &Circuit, theta: &[f64]) -> Result<Vec<Vec<Complex64>>> {
    let n = circuit.num_qubits();
    (0..1usize << n)
        .map(|k| {
            let basis = StateVector::basis(n, k)?;
            apply(circuit, theta, &basis).map(StateVector::into_amplitudes)
        })
        .collect()
}

/// Samples `shots` measurements of `qubit` from its exact marginal.
/// Returns `(count0, count1)`; identical seeds give identical counts.
pub fn measure_qubit(
    state: &StateVector,
    qubit: usize,
    shots: u64,
    seed: u64,
) -> Result<(u64, u64)> {
    if shots == 0 {
        return Err(Error::domain("shots must be at least 1"));
    }
    let p1 = state.probability_one(qubit)?.clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ones = Binomial::new(shots, p1)
        .map_err(|e| Error::domain(format!("binomial sampling: {e}")))?
        .sample(&mut rng);
    Ok((shots - ones, ones))
}
