//! Builders for the three layered compression ansätze and the 3-qubit
//! device variant.
//!
//! Gate counts follow the closed forms below exactly under the greedy
//! layered depth metric of [`resource_count`](crate::circuit::resource_count):
//!
//! | family   | parameters  | two-qubit gates | depth        |
//! |----------|-------------|-----------------|--------------|
//! | circuit1 | n(L+1)      | nL              | (n+1)L + 1   |
//! | circuit2 | 4(n-1)L     | (n-1)L          | 6L           |
//! | circuit3 | 3nL         | nL              | (n+3)L       |

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, GateKind, GateOp, ResourceCount};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AnsatzFamily {
    #[serde(rename = "circuit1")]
    Circuit1,
    #[serde(rename = "circuit2")]
    Circuit2,
    #[serde(rename = "circuit3")]
    Circuit3,
    #[serde(rename = "circuit1-dev3q")]
    Circuit1Device3q,
}

impl AnsatzFamily {
    pub const ALL: [AnsatzFamily; 4] = [
        AnsatzFamily::Circuit1,
        AnsatzFamily::Circuit2,
        AnsatzFamily::Circuit3,
        AnsatzFamily::Circuit1Device3q,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AnsatzFamily::Circuit1 => "circuit1",
            AnsatzFamily::Circuit2 => "circuit2",
            AnsatzFamily::Circuit3 => "circuit3",
            AnsatzFamily::Circuit1Device3q => "circuit1-dev3q",
        }
    }
}

impl fmt::Display for AnsatzFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AnsatzFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AnsatzFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| {
                Error::domain(format!(
                    "unknown ansatz family `{s}` (expected circuit1 | circuit2 | circuit3 | circuit1-dev3q)"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AnsatzSpec {
    pub family: AnsatzFamily,
    pub num_qubits: usize,
    pub layers: usize,
}

impl AnsatzSpec {
    pub fn new(family: AnsatzFamily, num_qubits: usize, layers: usize) -> Result<Self> {
        let spec = Self {
            family,
            num_qubits,
            layers,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_qubits < 2 {
            return Err(Error::domain("ansatz needs at least 2 qubits"));
        }
        if self.layers == 0 {
            return Err(Error::domain("ansatz needs at least one layer"));
        }
        if self.family == AnsatzFamily::Circuit1Device3q && self.num_qubits != 3 {
            return Err(Error::domain(
                "circuit1-dev3q is defined on exactly 3 qubits",
            ));
        }
        Ok(())
    }

    pub fn build(&self) -> Result<Circuit> {
        self.validate()?;
        let mut c = Circuit::new(self.num_qubits)?;
        match self.family {
            AnsatzFamily::Circuit1 => {
                let ring = ring_pairs(self.num_qubits);
                layered_ry(&mut c, self.layers, &ring)?
            }
            AnsatzFamily::Circuit1Device3q => layered_ry(&mut c, self.layers, &[(0, 1), (1, 2)])?,
            AnsatzFamily::Circuit2 => brick_blocks(&mut c, self.layers)?,
            AnsatzFamily::Circuit3 => euler_ring(&mut c, self.layers)?,
        }
        Ok(c)
    }

    /// Closed-form resource counts for the three main families; `None` for
    /// the device variant, which has no closed form.
    pub fn expected_resources(&self) -> Option<ResourceCount> {
        let (n, l) = (self.num_qubits, self.layers);
        let (num_params, two_qubit_gates, depth) = match self.family {
            AnsatzFamily::Circuit1 => (n * (l + 1), n * l, (n + 1) * l + 1),
            AnsatzFamily::Circuit2 => (4 * (n - 1) * l, (n - 1) * l, 6 * l),
            AnsatzFamily::Circuit3 => (3 * n * l, n * l, (n + 3) * l),
            AnsatzFamily::Circuit1Device3q => return None,
        };
        Some(ResourceCount {
            num_params,
            two_qubit_gates,
            depth,
        })
    }
}

/// CNOT i→i+1 (mod n). For n = 2 this is the pair (0→1, 1→0).
fn ring_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).map(|q| (q, (q + 1) % n)).collect()
}

fn rotation_wall(c: &mut Circuit, kind: GateKind) -> Result<()> {
    for q in 0..c.num_qubits() {
        c.push_rotation(kind, q)?;
    }
    Ok(())
}

/// RY wall, then per layer: CNOT entanglers followed by an RY wall.
fn layered_ry(c: &mut Circuit, layers: usize, pairs: &[(usize, usize)]) -> Result<()> {
    rotation_wall(c, GateKind::RY)?;
    for _ in 0..layers {
        for &(ctl, tgt) in pairs {
            c.push(GateOp::cnot(ctl, tgt))?;
        }
        rotation_wall(c, GateKind::RY)?;
    }
    Ok(())
}

/// Per layer: RZ, RY, RZ walls then a CNOT ring.
fn euler_ring(c: &mut Circuit, layers: usize) -> Result<()> {
    let ring = ring_pairs(c.num_qubits());
    for _ in 0..layers {
        for kind in [GateKind::RZ, GateKind::RY, GateKind::RZ] {
            rotation_wall(c, kind)?;
        }
        for &(ctl, tgt) in &ring {
            c.push(GateOp::cnot(ctl, tgt))?;
        }
    }
    Ok(())
}

/// Two-qubit block on (a, a+1): RY on both, RZ on both, CNOT a→a+1.
fn pair_block(c: &mut Circuit, a: usize) -> Result<()> {
    for kind in [GateKind::RY, GateKind::RZ] {
        c.push_rotation(kind, a)?;
        c.push_rotation(kind, a + 1)?;
    }
    c.push(GateOp::cnot(a, a + 1))
}

/// Per layer: pair blocks on even pairs (0,1), (2,3), … then on odd pairs
/// (1,2), (3,4), …, so each layer is 6 steps deep for n ≥ 3.
///
/// A 2-qubit register has no odd pair; its block is framed by fixed X/H
/// gates to keep the same 6-step schedule.
fn brick_blocks(c: &mut Circuit, layers: usize) -> Result<()> {
    let n = c.num_qubits();
    for _ in 0..layers {
        if n == 2 {
            for q in 0..2 {
                c.push(GateOp::x(q))?;
                c.push(GateOp::h(q))?;
            }
            for kind in [GateKind::RY, GateKind::RZ] {
                rotation_wall(c, kind)?;
            }
            for q in 0..2 {
                c.push(GateOp::h(q))?;
            }
            c.push(GateOp::cnot(0, 1))?;
            continue;
        }
        for start in [0, 1] {
            for a in (start..n - 1).step_by(2) {
                pair_block(c, a)?;
            }
        }
    }
    Ok(())
}

/// Initial training parameters, i.i.d. uniform on [0, 2π).
pub fn initial_parameters(num_params: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..num_params)
        .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
        .collect()
}
