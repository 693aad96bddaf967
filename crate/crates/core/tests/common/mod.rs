#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use qmimo::hubo::{PauliHamiltonian, QubitLayout};
use qmimo::mimo::{generate_instance, DetectionInstance};
use qmimo::{ConstellationSpec, RngStream};

pub fn instance(nt: usize, snr_db: f64, seed: u64, stream: u64) -> DetectionInstance {
    generate_instance(&ConstellationSpec::qam16(), nt, nt, snr_db, &RngStream::new(seed, stream)).unwrap()
}

/// 16-QAM level of bits `(b1, b2)` by table lookup.
pub fn qam16_level(b1: u8, b2: u8) -> f64 {
    match (b1, b2) {
        (0, 0) => -3.0,
        (0, 1) => -1.0,
        (1, 1) => 1.0,
        (1, 0) => 3.0,
        _ => unreachable!(),
    }
}

/// Real components encoded by `index` under the symbol-major layout with W = 2.
pub fn qam16_components(index: u64, components: usize) -> DVector<f64> {
    DVector::from_fn(components, |k, _| {
        let b1 = ((index >> (2 * k)) & 1) as u8;
        let b2 = ((index >> (2 * k + 1)) & 1) as u8;
        qam16_level(b1, b2)
    })
}

/// Direct `sᵀGs − 2cᵀs`.
pub fn objective(g: &DMatrix<f64>, c: &DVector<f64>, s: &DVector<f64>) -> f64 {
    let mut v = 0.0;
    for i in 0..s.len() {
        for j in 0..s.len() {
            v += g[(i, j)] * s[i] * s[j];
        }
        v -= 2.0 * c[i] * s[i];
    }
    v
}

/// The 16-QAM cost Hamiltonian written out term by term.
pub fn qam16_closed_form(g: &DMatrix<f64>, c: &DVector<f64>) -> PauliHamiltonian {
    let n = g.nrows();
    let layout = QubitLayout::new(n, 2).unwrap();
    let q = |k: usize, i: usize| layout.qubit(k, i - 1);
    let mut terms: Vec<(f64, Vec<usize>)> = Vec::new();
    for l in 0..n {
        for k in l + 1..n {
            let glk = g[(l, k)];
            terms.push((8.0 * glk, vec![q(l, 1), q(k, 1)]));
            terms.push((4.0 * glk, vec![q(l, 1), q(k, 1), q(k, 2)]));
            terms.push((4.0 * glk, vec![q(l, 1), q(l, 2), q(k, 1)]));
            terms.push((2.0 * glk, vec![q(l, 1), q(l, 2), q(k, 1), q(k, 2)]));
        }
    }
    let mut offset = 0.0;
    for k in 0..n {
        terms.push((4.0 * c[k], vec![q(k, 1)]));
        terms.push((4.0 * g[(k, k)], vec![q(k, 2)]));
        terms.push((2.0 * c[k], vec![q(k, 1), q(k, 2)]));
        offset += 5.0 * g[(k, k)];
    }
    PauliHamiltonian::from_terms(2 * n, terms, offset).unwrap()
}
