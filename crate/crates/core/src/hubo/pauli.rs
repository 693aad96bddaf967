//! Sums of Pauli-Z strings with a scalar offset.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients with magnitude below this are dropped.
pub const PRUNE_TOL: f64 = 1e-12;
/// Supports are tracked as `u64` bitmasks.
pub const MAX_QUBITS: usize = 64;
/// Largest register for which the full diagonal is materialised.
const MAX_DIAGONAL_QUBITS: usize = 26;

/// `coefficient · Π_{q ∈ support} Z_q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub coefficient: f64,
    /// Strictly increasing qubit indices.
    pub support: Vec<usize>,
}

impl PauliTerm {
    pub fn mask(&self) -> u64 {
        self.support.iter().fold(0u64, |m, &q| m | (1u64 << q))
    }

    pub fn weight(&self) -> usize {
        self.support.len()
    }
}

/// `offset·I + Σ terms`. Terms have distinct, non-empty supports, are pruned
/// at [`PRUNE_TOL`] and are kept sorted by support size, then support.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliHamiltonian {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
    offset: f64,
}

fn support_of(mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        let q = m.trailing_zeros() as usize;
        out.push(q);
        m &= m - 1;
    }
    out
}

impl PauliHamiltonian {
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::from_masks(n_qubits, std::iter::empty(), 0.0)
    }

    pub fn constant(n_qubits: usize, value: f64) -> Result<Self> {
        Self::from_masks(n_qubits, std::iter::empty(), value)
    }

    /// Builds from `(coefficient, qubits)` pairs. Repeated qubits inside one
    /// support cancel pairwise (`Z² = I`), equal supports are merged and an
    /// empty support is folded into the offset.
    pub fn from_terms<I, S>(n_qubits: usize, terms: I, offset: f64) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, S)>,
        S: AsRef<[usize]>,
    {
        if n_qubits > MAX_QUBITS {
            return Err(Error::QubitRange { n: n_qubits, max: MAX_QUBITS });
        }
        let mut masks = Vec::new();
        for (coef, support) in terms {
            let mut mask = 0u64;
            for &q in support.as_ref() {
                if q >= n_qubits {
                    return Err(Error::Parameter(format!(
                        "qubit index {q} out of range for {n_qubits} qubits"
                    )));
                }
                mask ^= 1u64 << q;
            }
            masks.push((coef, mask));
        }
        Self::from_masks(n_qubits, masks, offset)
    }

    pub(crate) fn from_masks<I>(n_qubits: usize, terms: I, offset: f64) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, u64)>,
    {
        if n_qubits > MAX_QUBITS {
            return Err(Error::QubitRange { n: n_qubits, max: MAX_QUBITS });
        }
        let mut acc: HashMap<u64, f64> = HashMap::new();
        let mut offset = offset;
        for (coef, mask) in terms {
            if !coef.is_finite() {
                return Err(Error::Numerical(format!("non-finite coefficient {coef}")));
            }
            if mask == 0 {
                offset += coef;
            } else {
                *acc.entry(mask).or_insert(0.0) += coef;
            }
        }
        if !offset.is_finite() {
            return Err(Error::Numerical(format!("non-finite offset {offset}")));
        }
        let mut terms: Vec<PauliTerm> = acc
            .into_iter()
            .filter(|(_, c)| c.abs() >= PRUNE_TOL)
            .map(|(mask, coefficient)| PauliTerm {
                coefficient,
                support: support_of(mask),
            })
            .collect();
        terms.sort_by(|a, b| {
            a.support
                .len()
                .cmp(&b.support.len())
                .then_with(|| a.support.cmp(&b.support))
        });
        Ok(Self { n_qubits, terms, offset })
    }

    /// `sign·Z_q`.
    pub fn z(n_qubits: usize, q: usize, sign: f64) -> Result<Self> {
        Self::from_terms(n_qubits, [(sign, [q])], 0.0)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient on the given support (0 if absent; the offset for `[]`).
    pub fn coefficient(&self, support: &[usize]) -> f64 {
        if support.is_empty() {
            return self.offset;
        }
        let mut sorted = support.to_vec();
        sorted.sort_unstable();
        self.terms
            .iter()
            .find(|t| t.support == sorted)
            .map_or(0.0, |t| t.coefficient)
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient.abs()).fold(0.0, f64::max)
    }

    /// `self + other`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        check_same(self, other)?;
        let terms = self
            .terms
            .iter()
            .chain(&other.terms)
            .map(|t| (t.coefficient, t.mask()));
        Self::from_masks(self.n_qubits, terms, self.offset + other.offset)
    }

    /// Every coefficient and the offset multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        let terms = self.terms.iter().map(|t| (t.coefficient * factor, t.mask()));
        Self::from_masks(self.n_qubits, terms, self.offset * factor)
    }

    /// `Σ coeff·Π(1 − 2b_q) + offset` for a basis index (qubit 0 = LSB).
    pub fn energy_of_index(&self, index: u64) -> f64 {
        let mut e = self.offset;
        for t in &self.terms {
            let parity = (t.mask() & index).count_ones() & 1;
            e += if parity == 0 { t.coefficient } else { -t.coefficient };
        }
        e
    }

    /// Energies of all `2^n` basis states, offset excluded.
    ///
    /// `E(b) = Σ_S c_S (−1)^{|S ∧ b|}` is the Walsh–Hadamard transform of the
    /// coefficient vector indexed by support mask.
    pub fn diagonal(&self) -> Result<Vec<f64>> {
        if self.n_qubits > MAX_DIAGONAL_QUBITS {
            return Err(Error::QubitRange { n: self.n_qubits, max: MAX_DIAGONAL_QUBITS });
        }
        let dim = 1usize << self.n_qubits;
        let mut v = vec![0.0; dim];
        for t in &self.terms {
            v[t.mask() as usize] += t.coefficient;
        }
        let mut h = 1;
        while h < dim {
            for block in (0..dim).step_by(2 * h) {
                for j in block..block + h {
                    let (a, b) = (v[j], v[j + h]);
                    v[j] = a + b;
                    v[j + h] = a - b;
                }
            }
            h *= 2;
        }
        Ok(v)
    }
}

/// `Σ coeff·Π_{q∈S}(1 − 2b_q) + offset`.
pub fn evaluate_energy(h: &PauliHamiltonian, bits: &[u8]) -> Result<f64> {
    if bits.len() != h.n_qubits {
        return Err(Error::Dimension(format!(
            "bitstring has {} entries for {} qubits",
            bits.len(),
            h.n_qubits
        )));
    }
    let mut index = 0u64;
    for (q, &b) in bits.iter().enumerate() {
        match b {
            0 => {}
            1 => index |= 1u64 << q,
            _ => return Err(Error::Parameter(format!("bit {q} is {b}, expected 0 or 1"))),
        }
    }
    Ok(h.energy_of_index(index))
}

fn check_same(a: &PauliHamiltonian, b: &PauliHamiltonian) -> Result<()> {
    if a.n_qubits != b.n_qubits {
        return Err(Error::Dimension(format!(
            "Hamiltonians act on {} and {} qubits",
            a.n_qubits, b.n_qubits
        )));
    }
    Ok(())
}

/// Product of two Z-polynomials; supports combine by symmetric difference.
pub fn poly_multiply(a: &PauliHamiltonian, b: &PauliHamiltonian) -> Result<PauliHamiltonian> {
    check_same(a, b)?;
    let with_identity = |h: &PauliHamiltonian| -> Vec<(f64, u64)> {
        let mut v: Vec<(f64, u64)> = h.terms.iter().map(|t| (t.coefficient, t.mask())).collect();
        if h.offset != 0.0 {
            v.push((h.offset, 0));
        }
        v
    };
    let lhs = with_identity(a);
    let rhs = with_identity(b);
    let products = lhs
        .iter()
        .flat_map(|&(ca, ma)| rhs.iter().map(move |&(cb, mb)| (ca * cb, ma ^ mb)));
    PauliHamiltonian::from_masks(a.n_qubits, products, 0.0)
}

/// Rescales by `α = 1 / max |coefficient|` over the non-constant terms.
pub fn scale_hamiltonian(h: &PauliHamiltonian) -> Result<(PauliHamiltonian, f64)> {
    let max = h.max_abs_coefficient();
    if h.terms.is_empty() || max == 0.0 {
        return Err(Error::Degenerate("Hamiltonian has no non-constant terms".into()));
    }
    let alpha = 1.0 / max;
    Ok((h.scaled(alpha)?, alpha))
}

/// Header `hamiltonian <n_qubits> <offset>`, then one `coeff q1 q2 …` line per
/// term. Floats are written in shortest round-trip form.
impl fmt::Display for PauliHamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "hamiltonian {} {}", self.n_qubits, self.offset)?;
        for t in &self.terms {
            write!(f, "{}", t.coefficient)?;
            for q in &t.support {
                write!(f, " {q}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

impl FromStr for PauliHamiltonian {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s
            .lines()
            .map(str::trim)
            .enumerate()
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Parse("missing header line".into()))?;
        let mut fields = header.split_whitespace();
        if fields.next() != Some("hamiltonian") {
            return Err(Error::Parse(format!("bad header {header:?}")));
        }
        let n_qubits: usize = fields
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad qubit count in {header:?}")))?;
        let offset: f64 = fields
            .next()
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad offset in {header:?}")))?;
        if fields.next().is_some() {
            return Err(Error::Parse(format!("trailing fields in {header:?}")));
        }
        let mut terms = Vec::new();
        for (lineno, line) in lines {
            let mut fields = line.split_whitespace();
            let coef: f64 = fields
                .next()
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| Error::Parse(format!("line {}: bad coefficient", lineno + 1)))?;
            let support = fields
                .map(|v| v.parse::<usize>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            let mut sorted = support.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != support.len() {
                return Err(Error::Parse(format!("line {}: repeated qubit", lineno + 1)));
            }
            terms.push((coef, support));
        }
        PauliHamiltonian::from_terms(n_qubits, terms, offset)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(n: usize, terms: &[(f64, &[usize])], offset: f64) -> PauliHamiltonian {
        PauliHamiltonian::from_terms(n, terms.iter().map(|&(c, s)| (c, s)), offset).unwrap()
    }

    #[test]
    fn z_squared_is_identity() {
        let z = PauliHamiltonian::z(2, 0, 1.0).unwrap();
        let p = poly_multiply(&z, &z).unwrap();
        assert!(p.is_empty());
        assert_eq!(p.offset(), 1.0);
    }

    #[test]
    fn symbol_square() {
        let s = h(2, &[(-2.0, &[0]), (-1.0, &[0, 1])], 0.0);
        let sq = poly_multiply(&s, &s).unwrap();
        assert_eq!(sq, h(2, &[(4.0, &[1])], 5.0));
    }

    #[test]
    fn distinct_qubits_multiply_to_string() {
        let a = PauliHamiltonian::z(3, 0, 1.0).unwrap();
        let b = PauliHamiltonian::z(3, 2, 1.0).unwrap();
        assert_eq!(poly_multiply(&a, &b).unwrap(), h(3, &[(1.0, &[0, 2])], 0.0));
    }

    #[test]
    fn canonical_order_and_pruning() {
        let x = h(3, &[(1.0, &[1, 2]), (2.0, &[2]), (3.0, &[0]), (1e-13, &[1]), (0.5, &[0, 1])], 0.0);
        let supports: Vec<_> = x.terms().iter().map(|t| t.support.clone()).collect();
        assert_eq!(supports, vec![vec![0], vec![2], vec![0, 1], vec![1, 2]]);
        let merged = h(2, &[(1.0, &[1, 0]), (1.0, &[0, 1]), (4.0, &[1, 1])], 0.0);
        assert_eq!(merged, h(2, &[(2.0, &[0, 1])], 4.0));
    }

    #[test]
    fn energies() {
        assert_eq!(evaluate_energy(&h(2, &[], 1.5), &[0, 1]).unwrap(), 1.5);
        let single = h(1, &[(3.0, &[0])], 0.25);
        assert_eq!(evaluate_energy(&single, &[1]).unwrap(), -3.0 + 0.25);
        assert!(evaluate_energy(&single, &[0, 1]).is_err());
        assert!(evaluate_energy(&single, &[2]).is_err());
    }

    #[test]
    fn diagonal_matches_pointwise() {
        let x = h(4, &[(1.0, &[0]), (-2.5, &[1, 3]), (0.75, &[0, 1, 2]), (0.1, &[0, 1, 2, 3])], 3.0);
        let d = x.diagonal().unwrap();
        for (b, &v) in d.iter().enumerate() {
            assert!((v + x.offset() - x.energy_of_index(b as u64)).abs() < 1e-12);
        }
    }

    #[test]
    fn scaling() {
        let x = h(3, &[(8.0, &[0]), (-4.0, &[1]), (2.0, &[2])], 4.0);
        let (s, alpha) = scale_hamiltonian(&x).unwrap();
        assert_eq!(alpha, 0.125);
        assert_eq!(s, h(3, &[(1.0, &[0]), (-0.5, &[1]), (0.25, &[2])], 0.5));
        let unit = h(1, &[(-1.0, &[0])], 0.0);
        assert_eq!(scale_hamiltonian(&unit).unwrap(), (unit.clone(), 1.0));
        assert!(matches!(scale_hamiltonian(&h(2, &[], 3.0)), Err(Error::Degenerate(_))));
    }

    #[test]
    fn text_round_trip() {
        let x = h(5, &[(0.1, &[0]), (-1.0 / 3.0, &[1, 4]), (2e-7, &[0, 2, 3])], -7.125);
        let text = x.to_string();
        assert!(text.starts_with("hamiltonian 5 -7.125\n"));
        assert_eq!(text.parse::<PauliHamiltonian>().unwrap(), x);
        assert!("hamiltonian 2\n".parse::<PauliHamiltonian>().is_err());
        assert!("hamiltonian 2 0\n1 0 0\n".parse::<PauliHamiltonian>().is_err());
        assert!("hamiltonian 2 0\n1 5\n".parse::<PauliHamiltonian>().is_err());
    }

    #[test]
    fn rejects_mismatched_registers() {
        let a = PauliHamiltonian::z(2, 0, 1.0).unwrap();
        let b = PauliHamiltonian::z(3, 0, 1.0).unwrap();
        assert!(poly_multiply(&a, &b).is_err());
        assert!(a.add(&b).is_err());
        assert!(PauliHamiltonian::zero(65).is_err());
    }
}
