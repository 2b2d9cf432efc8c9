//! Gate-level circuit IR, exact statevector execution, shot sampling and
//! resource counting.

mod gate;
mod resources;
mod sim;
mod text;

pub use gate::{GateKind, GateOp};
pub use resources::{resource_count, ResourceCount};
pub use sim::{apply, apply_in_place, apply_to_density, measure_qubit, unitary_columns};
pub use text::{from_text, to_text};

use crate::error::{Error, Result};
use crate::quantum::MAX_QUBITS;

/// An ordered gate list over `num_qubits` qubits reading a parameter vector
/// of length `num_params`. Each parameter slot feeds at most one gate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    num_qubits: usize,
    num_params: usize,
    ops: Vec<GateOp>,
    slot_used: Vec<bool>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Result<Self> {
        Self::with_params(num_qubits, 0)
    }

    /// Circuit with a pre-declared parameter vector length.
    pub fn with_params(num_qubits: usize, num_params: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(Error::domain(format!(
                "unsupported register size {num_qubits}"
            )));
        }
        Ok(Self {
            num_qubits,
            num_params,
            ops: Vec::new(),
            slot_used: vec![false; num_params],
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_params(&self) -> usize {
        self.num_params
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Appends a gate whose slot (if any) was declared up front.
    pub fn push(&mut self, op: GateOp) -> Result<()> {
        self.validate(&op)?;
        if let Some(slot) = op.param_slot {
            if slot >= self.num_params {
                return Err(Error::domain(format!(
                    "parameter slot {slot} outside declared {} parameters",
                    self.num_params
                )));
            }
            if self.slot_used[slot] {
                return Err(Error::domain(format!(
                    "parameter slot {slot} is already bound"
                )));
            }
            self.slot_used[slot] = true;
        }
        self.ops.push(op);
        Ok(())
    }

    /// Allocates the next parameter slot and returns it.
    pub fn next_slot(&mut self) -> usize {
        self.num_params += 1;
        self.slot_used.push(false);
        self.num_params - 1
    }

    /// Appends a rotation bound to a freshly allocated slot.
    pub fn push_rotation(&mut self, kind: GateKind, qubit: usize) -> Result<usize> {
        if !kind.is_parameterized() || kind.is_controlled() {
            return Err(Error::domain(format!(
                "{kind} is not a single-qubit rotation"
            )));
        }
        let slot = self.next_slot();
        let op = GateOp {
            kind,
            targets: vec![qubit],
            control: None,
            param_slot: Some(slot),
            negated: false,
        };
        if let Err(e) = self.push(op) {
            self.num_params -= 1;
            self.slot_used.pop();
            return Err(e);
        }
        Ok(slot)
    }

    /// Appends every gate of `other` (same parameter vector, qubits unchanged).
    pub fn extend_from(&mut self, other: &Circuit) -> Result<()> {
        if other.num_qubits > self.num_qubits {
            return Err(Error::domain("cannot append a wider circuit"));
        }
        while self.num_params < other.num_params {
            self.next_slot();
        }
        for op in &other.ops {
            self.push(op.clone())?;
        }
        Ok(())
    }

    /// Same gates on a wider register.
    pub fn widened(&self, num_qubits: usize) -> Result<Circuit> {
        let mut wide = Circuit::with_params(num_qubits, self.num_params)?;
        for op in &self.ops {
            wide.push(op.clone())?;
        }
        Ok(wide)
    }

    fn validate(&self, op: &GateOp) -> Result<()> {
        if op.targets.len() != op.kind.target_count() {
            return Err(Error::domain(format!(
                "{} takes {} target(s), got {}",
                op.kind,
                op.kind.target_count(),
                op.targets.len()
            )));
        }
        if op.kind.is_controlled() != op.control.is_some() {
            return Err(Error::domain(format!(
                "{} control qubit presence is wrong",
                op.kind
            )));
        }
        if op.kind.is_parameterized() != op.param_slot.is_some() {
            return Err(Error::domain(format!(
                "{} parameter slot presence is wrong",
                op.kind
            )));
        }
        if op.negated && op.param_slot.is_none() {
            return Err(Error::domain("only parameterised gates can be negated"));
        }
        let qubits: Vec<usize> = op.qubits().collect();
        for (i, &q) in qubits.iter().enumerate() {
            if q >= self.num_qubits {
                return Err(Error::IndexOutOfRange {
                    index: q,
                    num_qubits: self.num_qubits,
                });
            }
            if qubits[..i].contains(&q) {
                return Err(Error::domain(format!(
                    "{} acts twice on qubit {q}",
                    op.kind
                )));
            }
        }
        Ok(())
    }
}

/// U†: reversed gate order with every rotation angle negated. Parameter
/// slots are preserved so the adjoint reads the same θ.
pub fn adjoint(circuit: &Circuit) -> Circuit {
    let ops = circuit
        .ops
        .iter()
        .rev()
        .map(|op| {
            let mut op = op.clone();
            if op.param_slot.is_some() {
                op.negated = !op.negated;
            }
            op
        })
        .collect();
    Circuit {
        num_qubits: circuit.num_qubits,
        num_params: circuit.num_params,
        ops,
        slot_used: circuit.slot_used.clone(),
    }
}
