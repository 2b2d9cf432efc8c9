use serde::{Deserialize, Serialize};

use super::Circuit;

/// Gate-cost summary of a circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceCount {
    pub num_params: usize,
    pub two_qubit_gates: usize,
    /// Longest path in the greedy per-qubit layering: a gate sits one layer
    /// above the highest layer reached so far on any of its qubits.
    pub depth: usize,
}

pub fn resource_count(circuit: &Circuit) -> ResourceCount {
    let mut layer = vec![0usize; circuit.num_qubits()];
    let mut two_qubit_gates = 0;
    for op in circuit.ops() {
        if op.kind.is_multi_qubit() {
            two_qubit_gates += 1;
        }
        let next = 1 + op.qubits().map(|q| layer[q]).max().unwrap_or(0);
        for q in op.qubits() {
            layer[q] = next;
        }
    }
    ResourceCount {
        num_params: circuit.num_params(),
        two_qubit_gates,
        depth: layer.into_iter().max().unwrap_or(0),
    }
}
