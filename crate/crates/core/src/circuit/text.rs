//! Line-based circuit format.
//!
//! ```text
//! qubits=3 params=2
//! RY 0 slot=0
//! CNOT 0,1
//! RZ 2 slot=1 neg
//! CSWAP 2,0,1
//! ```
//!
//! Qubit lists put the control first. Every line, the header included,
//! ends with `\n`.

use std::fmt::Write;

use super::{Circuit, GateKind, GateOp};
use crate::error::{Error, Result};

pub fn to_text(circuit: &Circuit) -> String {
    let mut out = format!(
        "qubits={} params={}\n",
        circuit.num_qubits(),
        circuit.num_params()
    );
    for op in circuit.ops() {
        let qubits: Vec<String> = op.qubits().map(|q| q.to_string()).collect();
        write!(out, "{} {}", op.kind, qubits.join(",")).unwrap();
        if let Some(slot) = op.param_slot {
            write!(out, " slot={slot}").unwrap();
        }
        if op.negated {
            out.push_str(" neg");
        }
        out.push('\n');
    }
    out
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_header(line: &str) -> Result<(usize, usize)> {
    let mut parts = line.split(' ');
    let field = |part: Option<&str>, key: &str| -> Result<usize> {
        part.and_then(|p| p.strip_prefix(key))
            .and_then(|v| v.strip_prefix('='))
            .ok_or_else(|| parse_err(1, format!("expected `{key}=<n>`")))?
            .parse()
            .map_err(|_| parse_err(1, format!("`{key}` is not an integer")))
    };
    let qubits = field(parts.next(), "qubits")?;
    let params = field(parts.next(), "params")?;
    if parts.next().is_some() {
        return Err(parse_err(1, "unexpected trailing header fields"));
    }
    Ok((qubits, params))
}

fn parse_op(text: &str, lineno: usize) -> Result<GateOp> {
    let mut parts = text.split(' ');
    let kind: GateKind = parts
        .next()
        .unwrap_or_default()
        .parse()
        .map_err(|e: String| parse_err(lineno, e))?;
    let qubits = parts
        .next()
        .ok_or_else(|| parse_err(lineno, "missing qubit list"))?
        .split(',')
        .map(|q| {
            q.parse::<usize>()
                .map_err(|_| parse_err(lineno, format!("bad qubit index `{q}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut param_slot = None;
    let mut negated = false;
    for part in parts {
        if let Some(v) = part.strip_prefix("slot=") {
            if param_slot.is_some() || negated {
                return Err(parse_err(lineno, "`slot=` out of order or repeated"));
            }
            param_slot = Some(
                v.parse()
                    .map_err(|_| parse_err(lineno, format!("bad slot `{v}`")))?,
            );
        } else if part == "neg" && !negated {
            negated = true;
        } else {
            return Err(parse_err(lineno, format!("unexpected token `{part}`")));
        }
    }
    let expected = kind.target_count() + usize::from(kind.is_controlled());
    if qubits.len() != expected {
        return Err(parse_err(
            lineno,
            format!("{kind} takes {expected} qubit(s), got {}", qubits.len()),
        ));
    }
    let (control, targets) = if kind.is_controlled() {
        (Some(qubits[0]), qubits[1..].to_vec())
    } else {
        (None, qubits)
    };
    Ok(GateOp {
        kind,
        targets,
        control,
        param_slot,
        negated,
    })
}

pub fn from_text(text: &str) -> Result<Circuit> {
    let body = text
        .strip_suffix('\n')
        .ok_or_else(|| parse_err(text.lines().count().max(1), "missing final newline"))?;
    let mut lines = body.split('\n');
    let (qubits, params) = parse_header(lines.next().unwrap_or_default())?;
    let mut circuit =
        Circuit::with_params(qubits, params).map_err(|e| parse_err(1, e.to_string()))?;
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let op = parse_op(line, lineno)?;
        circuit
            .push(op)
            .map_err(|e| parse_err(lineno, e.to_string()))?;
    }
    Ok(circuit)
}
