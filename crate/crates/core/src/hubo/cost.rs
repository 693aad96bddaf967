//! Expansion of the quadratic detection objective into Z-strings.

use nalgebra::{DMatrix, DVector};

use super::gray::gray_unmap_pam_to_bits;
use super::layout::QubitLayout;
use super::pauli::{poly_multiply, PauliHamiltonian};
use crate::constellation::ConstellationSpec;
use crate::error::{Error, Result};

/// The PAM level of component `k` as a polynomial in `Z_{k,1} … Z_{k,W}`,
/// obtained by substituting `u = −Z` into the Gray map. For `W = 2` this is
/// `−2Z_{k,1} − Z_{k,1}Z_{k,2}`.
pub fn symbol_as_z_polynomial(k: usize, layout: &QubitLayout) -> Result<PauliHamiltonian> {
    if k >= layout.components() {
        return Err(Error::Parameter(format!(
            "component {k} out of range for {} components",
            layout.components()
        )));
    }
    let n = layout.n_qubits();
    let w = layout.bits_per_dim();
    let u = |i: usize| PauliHamiltonian::z(n, layout.qubit(k, i), -1.0);
    let mut prod = PauliHamiltonian::constant(n, 1.0)?;
    let mut inner = PauliHamiltonian::constant(n, f64::from(1u32 << (w - 1)))?;
    for i in 1..w {
        prod = poly_multiply(&prod, &u(i)?)?;
        inner = inner.add(&prod.scaled(-f64::from(1u32 << (w - 1 - i)))?)?;
    }
    poly_multiply(&u(0)?, &inner)
}

/// `H = Σ_{l,k} G_lk P_l P_k − Σ_k 2c_k P_k` with `P_k` from
/// [`symbol_as_z_polynomial`]. The identity part is kept as the offset, so the
/// energy of a bitstring equals `f(s(b)) = sᵀGs − 2cᵀs` exactly.
pub fn build_cost_hamiltonian(
    g: &DMatrix<f64>,
    c: &DVector<f64>,
    spec: &ConstellationSpec,
    layout: &QubitLayout,
) -> Result<PauliHamiltonian> {
    let dim = layout.components();
    if g.nrows() != dim || g.ncols() != dim || c.len() != dim {
        return Err(Error::Dimension(format!(
            "G is {}x{}, c has {} entries, layout has {dim} components",
            g.nrows(),
            g.ncols(),
            c.len()
        )));
    }
    if layout.bits_per_dim() != spec.bits_per_dim() {
        return Err(Error::Dimension(format!(
            "layout uses W = {}, constellation has W = {}",
            layout.bits_per_dim(),
            spec.bits_per_dim()
        )));
    }
    let scale = 1.0 + g.amax();
    for i in 0..dim {
        for j in i + 1..dim {
            if (g[(i, j)] - g[(j, i)]).abs() > 1e-12 * scale {
                return Err(Error::Parameter(format!(
                    "G is not symmetric at ({i}, {j}): {} vs {}",
                    g[(i, j)],
                    g[(j, i)]
                )));
            }
        }
    }
    let polys = (0..dim)
        .map(|k| symbol_as_z_polynomial(k, layout))
        .collect::<Result<Vec<_>>>()?;
    let mut h = PauliHamiltonian::zero(layout.n_qubits())?;
    for l in 0..dim {
        h = h.add(&poly_multiply(&polys[l], &polys[l])?.scaled(g[(l, l)])?)?;
        for k in l + 1..dim {
            h = h.add(&poly_multiply(&polys[l], &polys[k])?.scaled(2.0 * g[(l, k)])?)?;
        }
        h = h.add(&polys[l].scaled(-2.0 * c[l])?)?;
    }
    Ok(h)
}

/// Basis index (qubit 0 = LSB) of the bitstring that encodes the real
/// symbol vector `s`.
pub fn encode_symbols(s: &DVector<f64>, layout: &QubitLayout) -> Result<u64> {
    if s.len() != layout.components() {
        return Err(Error::Dimension(format!(
            "{} components for a layout of {}",
            s.len(),
            layout.components()
        )));
    }
    let mut index = 0u64;
    for (k, &v) in s.iter().enumerate() {
        if v.fract() != 0.0 || v.abs() > f64::from(i32::MAX) {
            return Err(Error::Parameter(format!("{v} is not a PAM level")));
        }
        let bits = gray_unmap_pam_to_bits(v as i32, layout.bits_per_dim())?;
        for (i, b) in bits.into_iter().enumerate() {
            index |= u64::from(b) << layout.qubit(k, i);
        }
    }
    Ok(index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hubo::gray::gray_map_bits_to_pam;

    #[test]
    fn sixteen_qam_symbol_polynomial() {
        let layout = QubitLayout::new(2, 2).unwrap();
        let p = symbol_as_z_polynomial(1, &layout).unwrap();
        let expected = PauliHamiltonian::from_terms(4, [(-2.0, vec![2]), (-1.0, vec![2, 3])], 0.0).unwrap();
        assert_eq!(p, expected);
    }

    #[test]
    fn bpsk_symbol_polynomial() {
        let layout = QubitLayout::new(1, 1).unwrap();
        let p = symbol_as_z_polynomial(0, &layout).unwrap();
        assert_eq!(p, PauliHamiltonian::from_terms(1, [(-1.0, [0])], 0.0).unwrap());
    }

    #[test]
    fn polynomial_reproduces_gray_map() {
        for w in 1..=4 {
            let layout = QubitLayout::new(1, w).unwrap();
            let p = symbol_as_z_polynomial(0, &layout).unwrap();
            for idx in 0..1u64 << w {
                let bits: Vec<u8> = (0..w).map(|i| ((idx >> i) & 1) as u8).collect();
                let level = gray_map_bits_to_pam(&bits).unwrap();
                assert_eq!(p.energy_of_index(idx), f64::from(level));
            }
        }
    }

    #[test]
    fn identity_gram_single_symbol() {
        let layout = QubitLayout::new(1, 2).unwrap();
        let h = build_cost_hamiltonian(
            &DMatrix::identity(1, 1),
            &DVector::zeros(1),
            &ConstellationSpec::qam16(),
            &layout,
        )
        .unwrap();
        assert_eq!(h, PauliHamiltonian::from_terms(2, [(4.0, [1])], 5.0).unwrap());
    }

    #[test]
    fn rejects_asymmetric_gram() {
        let layout = QubitLayout::new(2, 2).unwrap();
        let g = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.4, 1.0]);
        let err = build_cost_hamiltonian(&g, &DVector::zeros(2), &ConstellationSpec::qam16(), &layout);
        assert!(matches!(err, Err(Error::Parameter(_))));
    }

    #[test]
    fn encode_places_bits() {
        let layout = QubitLayout::new(2, 2).unwrap();
        // 3 → (1,0), −1 → (0,1)
        let idx = encode_symbols(&DVector::from_vec(vec![3.0, -1.0]), &layout).unwrap();
        assert_eq!(idx, 0b1001);
        assert!(encode_symbols(&DVector::from_vec(vec![2.0, 1.0]), &layout).is_err());
    }
}
