use serde::{Deserialize, Serialize};

use crate::constellation::ConstellationSpec;
use crate::error::{Error, Result};

/// Symbol-major, bit-minor qubit assignment: bit `i` of real component `k`
/// (both zero-based) lives on qubit `k·W + i`. Components `0..Nt` are real
/// parts and `Nt..2Nt` imaginary parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QubitLayout {
    components: usize,
    bits_per_dim: usize,
}

impl QubitLayout {
    pub fn new(components: usize, bits_per_dim: usize) -> Result<Self> {
        if components == 0 || bits_per_dim == 0 {
            return Err(Error::Parameter("layout needs at least one component and one bit".into()));
        }
        let n = components
            .checked_mul(bits_per_dim)
            .ok_or_else(|| Error::Parameter("layout size overflows".into()))?;
        if n > super::MAX_QUBITS {
            return Err(Error::QubitRange { n, max: super::MAX_QUBITS });
        }
        Ok(Self { components, bits_per_dim })
    }

    /// Layout for `Nt` transmit antennas.
    pub fn for_antennas(nt: usize, spec: &ConstellationSpec) -> Result<Self> {
        Self::new(2 * nt, spec.bits_per_dim())
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn bits_per_dim(&self) -> usize {
        self.bits_per_dim
    }

    pub fn n_qubits(&self) -> usize {
        self.components * self.bits_per_dim
    }

    pub fn qubit(&self, k: usize, i: usize) -> usize {
        debug_assert!(k < self.components && i < self.bits_per_dim);
        k * self.bits_per_dim + i
    }

    pub fn position(&self, q: usize) -> (usize, usize) {
        (q / self.bits_per_dim, q % self.bits_per_dim)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bijective() {
        let l = QubitLayout::for_antennas(2, &ConstellationSpec::qam16()).unwrap();
        assert_eq!(l.n_qubits(), 8);
        let mut seen = [false; 8];
        for k in 0..4 {
            for i in 0..2 {
                let q = l.qubit(k, i);
                assert!(!seen[q]);
                seen[q] = true;
                assert_eq!(l.position(q), (k, i));
            }
        }
        assert!(QubitLayout::new(33, 2).is_err());
    }
}
