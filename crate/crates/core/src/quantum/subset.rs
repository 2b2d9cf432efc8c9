use serde::Serialize;

use crate::error::{Error, Result};

/// A non-empty, strictly increasing set of qubit positions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct QubitSubset {
    indices: Vec<usize>,
}

impl QubitSubset {
    /// Builds a subset of a `num_qubits` register. Input order is irrelevant,
    /// duplicates are rejected.
    pub fn new(indices: impl IntoIterator<Item = usize>, num_qubits: usize) -> Result<Self> {
        let mut indices: Vec<usize> = indices.into_iter().collect();
        if indices.is_empty() {
            return Err(Error::domain("qubit subset must be non-empty"));
        }
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::domain("qubit subset contains duplicate indices"));
        }
        if let Some(&last) = indices.last() {
            if last >= num_qubits {
                return Err(Error::IndexOutOfRange {
                    index: last,
                    num_qubits,
                });
            }
        }
        Ok(Self { indices })
    }

    /// The `count` highest-index qubits of an `num_qubits` register.
    pub fn highest(count: usize, num_qubits: usize) -> Result<Self> {
        if count > num_qubits {
            return Err(Error::domain(format!(
                "cannot take {count} qubits from a {num_qubits}-qubit register"
            )));
        }
        Self::new(num_qubits - count..num_qubits, num_qubits)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, qubit: usize) -> bool {
        self.indices.binary_search(&qubit).is_ok()
    }

    /// Bit mask with one bit set per member.
    pub fn mask(&self) -> usize {
        self.indices.iter().fold(0, |m, &q| m | (1 << q))
    }

    /// Qubits of a `num_qubits` register that are not in this subset, ascending.
    pub fn complement(&self, num_qubits: usize) -> Vec<usize> {
        (0..num_qubits).filter(|q| !self.contains(*q)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorted_and_validated() {
        let s = QubitSubset::new([3, 1], 4).unwrap();
        assert_eq!(s.indices(), &[1, 3]);
        assert_eq!(s.mask(), 0b1010);
        assert_eq!(s.complement(4), vec![0, 2]);
        assert!(QubitSubset::new([], 4).is_err());
        assert!(QubitSubset::new([1, 1], 4).is_err());
        assert!(matches!(
            QubitSubset::new([4], 4),
            Err(Error::IndexOutOfRange { index: 4, .. })
        ));
    }

    #[test]
    fn highest_qubits() {
        assert_eq!(QubitSubset::highest(2, 4).unwrap().indices(), &[2, 3]);
        assert!(QubitSubset::highest(5, 4).is_err());
    }
}
