use std::fmt;
use std::str::FromStr;

/// Gate vocabulary understood by the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    H,
    X,
    RX,
    RY,
    RZ,
    CNOT,
    CZ,
    CRZ,
    CRX,
    SWAP,
    CSWAP,
}

impl GateKind {
    pub const ALL: [GateKind; 11] = [
        GateKind::H,
        GateKind::X,
        GateKind::RX,
        GateKind::RY,
        GateKind::RZ,
        GateKind::CNOT,
        GateKind::CZ,
        GateKind::CRZ,
        GateKind::CRX,
        GateKind::SWAP,
        GateKind::CSWAP,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::RX => "RX",
            GateKind::RY => "RY",
            GateKind::RZ => "RZ",
            GateKind::CNOT => "CNOT",
            GateKind::CZ => "CZ",
            GateKind::CRZ => "CRZ",
            GateKind::CRX => "CRX",
            GateKind::SWAP => "SWAP",
            GateKind::CSWAP => "CSWAP",
        }
    }

    pub fn is_parameterized(self) -> bool {
        matches!(
            self,
            GateKind::RX | GateKind::RY | GateKind::RZ | GateKind::CRZ | GateKind::CRX
        )
    }

    pub fn is_controlled(self) -> bool {
        matches!(
            self,
            GateKind::CNOT | GateKind::CZ | GateKind::CRZ | GateKind::CRX | GateKind::CSWAP
        )
    }

    /// Number of target qubits (the control, if any, is extra).
    pub fn target_count(self) -> usize {
        match self {
            GateKind::SWAP | GateKind::CSWAP => 2,
            _ => 1,
        }
    }

    /// Gates acting on two or more qubits.
    pub fn is_multi_qubit(self) -> bool {
        self.is_controlled() || self == GateKind::SWAP
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GateKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown gate kind `{s}`"))
    }
}

/// One gate application. Parameterised kinds read `theta[param_slot]`,
/// negated when `negated` is set (used by circuit adjoints).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GateOp {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub control: Option<usize>,
    pub param_slot: Option<usize>,
    pub negated: bool,
}

impl GateOp {
    fn fixed(kind: GateKind, control: Option<usize>, targets: Vec<usize>) -> Self {
        Self {
            kind,
            targets,
            control,
            param_slot: None,
            negated: false,
        }
    }

    fn rotation(kind: GateKind, control: Option<usize>, target: usize, slot: usize) -> Self {
        Self {
            kind,
            targets: vec![target],
            control,
            param_slot: Some(slot),
            negated: false,
        }
    }

    pub fn h(q: usize) -> Self {
        Self::fixed(GateKind::H, None, vec![q])
    }

    pub fn x(q: usize) -> Self {
        Self::fixed(GateKind::X, None, vec![q])
    }

    pub fn rx(q: usize, slot: usize) -> Self {
        Self::rotation(GateKind::RX, None, q, slot)
    }

    pub fn ry(q: usize, slot: usize) -> Self {
        Self::rotation(GateKind::RY, None, q, slot)
    }

    pub fn rz(q: usize, slot: usize) -> Self {
        Self::rotation(GateKind::RZ, None, q, slot)
    }

    pub fn cnot(control: usize, target: usize) -> Self {
        Self::fixed(GateKind::CNOT, Some(control), vec![target])
    }

    pub fn cz(control: usize, target: usize) -> Self {
        Self::fixed(GateKind::CZ, Some(control), vec![target])
    }

    pub fn crz(control: usize, target: usize, slot: usize) -> Self {
        Self::rotation(GateKind::CRZ, Some(control), target, slot)
    }

    pub fn crx(control: usize, target: usize, slot: usize) -> Self {
        Self::rotation(GateKind::CRX, Some(control), target, slot)
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Self::fixed(GateKind::SWAP, None, vec![a, b])
    }

    pub fn cswap(control: usize, a: usize, b: usize) -> Self {
        Self::fixed(GateKind::CSWAP, Some(control), vec![a, b])
    }

    /// Control first (if any), then targets.
    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.control.into_iter().chain(self.targets.iter().copied())
    }

    /// Effective rotation angle under `theta`, or `None` for fixed gates.
    pub fn angle(&self, theta: &[f64]) -> Option<f64> {
        self.param_slot
            .map(|s| if self.negated { -theta[s] } else { theta[s] })
    }
}
