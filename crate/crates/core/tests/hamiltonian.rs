mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use qmimo::hubo::{
    build_cost_hamiltonian, evaluate_energy, gray_map_bits_to_pam, gray_unmap_pam_to_bits, poly_multiply,
    scale_hamiltonian, PauliHamiltonian, QubitLayout,
};
use qmimo::ConstellationSpec;

fn bits_of(index: u64, n: usize) -> Vec<u8> {
    (0..n).map(|q| ((index >> q) & 1) as u8).collect()
}

fn build(nt: usize, snr: f64, stream: u64) -> (qmimo::mimo::DetectionInstance, PauliHamiltonian) {
    let inst = common::instance(nt, snr, 11, stream);
    let spec = ConstellationSpec::qam16();
    let layout = QubitLayout::for_antennas(nt, &spec).unwrap();
    let h = build_cost_hamiltonian(&inst.g, &inst.c, &spec, &layout).unwrap();
    (inst, h)
}

#[test]
fn energies_match_objective_exhaustively() {
    for stream in 0..20 {
        let (inst, h) = build(2, 7.0, stream);
        for b in 0..256u64 {
            let s = common::qam16_components(b, 4);
            let want = common::objective(&inst.g, &inst.c, &s);
            let got = evaluate_energy(&h, &bits_of(b, 8)).unwrap();
            assert!((got - want).abs() <= 1e-9 * (1.0 + want.abs()), "stream {stream} b {b}: {got} vs {want}");
        }
    }
}

#[test]
fn energies_match_objective_on_random_bitstrings_3x3() {
    let (inst, h) = build(3, 10.0, 3);
    let diag = h.diagonal().unwrap();
    for b in (0..4096u64).step_by(7) {
        let s = common::qam16_components(b, 6);
        let want = common::objective(&inst.g, &inst.c, &s);
        assert!((diag[b as usize] + h.offset() - want).abs() <= 1e-9 * (1.0 + want.abs()));
    }
}

#[test]
fn generic_builder_equals_closed_form() {
    for stream in 0..10 {
        let (inst, h) = build(2, 2.0, stream);
        let closed = common::qam16_closed_form(&inst.g, &inst.c);
        assert_eq!(h.len(), closed.len());
        for (a, b) in h.terms().iter().zip(closed.terms()) {
            assert_eq!(a.support, b.support);
            assert!((a.coefficient - b.coefficient).abs() < 1e-10);
        }
        assert!((h.offset() - closed.offset()).abs() < 1e-10);
    }
}

#[test]
fn term_count_bound() {
    for nt in 1..=3 {
        let (_, h) = build(nt, 5.0, 0);
        let n = 2 * nt;
        assert!(h.len() <= 4 * n * (n - 1) / 2 + 3 * n);
    }
}

#[test]
fn scaling_keeps_argmin() {
    for stream in 0..10 {
        let (_, h) = build(2, 12.0, stream);
        let (scaled, alpha) = scale_hamiltonian(&h).unwrap();
        assert!((scaled.max_abs_coefficient() - 1.0).abs() < 1e-12);
        let argmin = |d: &[f64]| (0..d.len()).min_by(|&a, &b| d[a].total_cmp(&d[b])).unwrap();
        assert_eq!(argmin(&h.diagonal().unwrap()), argmin(&scaled.diagonal().unwrap()));
        assert!((scaled.offset() - alpha * h.offset()).abs() < 1e-12 * (1.0 + h.offset().abs()));
    }
}

#[test]
fn text_round_trip() {
    let (_, h) = build(2, 7.0, 5);
    let back: PauliHamiltonian = h.to_string().parse().unwrap();
    assert_eq!(back, h);
}

fn coefficient_map(h: &PauliHamiltonian) -> BTreeMap<Vec<usize>, f64> {
    let mut m: BTreeMap<Vec<usize>, f64> = h.terms().iter().map(|t| (t.support.clone(), t.coefficient)).collect();
    m.insert(Vec::new(), h.offset());
    m
}

fn maps_close(a: &PauliHamiltonian, b: &PauliHamiltonian) -> bool {
    let (ma, mb) = (coefficient_map(a), coefficient_map(b));
    let keys: Vec<&Vec<usize>> = ma.keys().chain(mb.keys()).collect();
    keys.iter().all(|&k| {
        let x = ma.get(k).copied().unwrap_or(0.0);
        let y = mb.get(k).copied().unwrap_or(0.0);
        (x - y).abs() <= 1e-12 * (1.0 + x.abs().max(y.abs()))
    })
}

fn hamiltonian(n: usize) -> impl Strategy<Value = PauliHamiltonian> {
    (
        prop::collection::vec((-2.0f64..2.0, prop::collection::vec(0..n, 0..4)), 0..6),
        -2.0f64..2.0,
    )
        .prop_map(move |(terms, offset)| PauliHamiltonian::from_terms(n, terms, offset).unwrap())
}

proptest! {
    #[test]
    fn multiply_commutes(a in hamiltonian(5), b in hamiltonian(5)) {
        let ab = poly_multiply(&a, &b).unwrap();
        let ba = poly_multiply(&b, &a).unwrap();
        prop_assert!(maps_close(&ab, &ba));
    }

    #[test]
    fn multiply_associates(a in hamiltonian(4), b in hamiltonian(4), c in hamiltonian(4)) {
        let left = poly_multiply(&poly_multiply(&a, &b).unwrap(), &c).unwrap();
        let right = poly_multiply(&a, &poly_multiply(&b, &c).unwrap()).unwrap();
        prop_assert!(maps_close(&left, &right));
    }

    #[test]
    fn product_energy_is_product_of_energies(a in hamiltonian(5), b in hamiltonian(5), idx in 0u64..32) {
        let ab = poly_multiply(&a, &b).unwrap();
        let want = a.energy_of_index(idx) * b.energy_of_index(idx);
        prop_assert!((ab.energy_of_index(idx) - want).abs() <= 1e-9 * (1.0 + want.abs()));
    }

    #[test]
    fn gray_round_trip(w in 1usize..=4, bits in prop::collection::vec(0u8..2, 4)) {
        let bits = &bits[..w];
        let level = gray_map_bits_to_pam(bits).unwrap();
        prop_assert_eq!(gray_unmap_pam_to_bits(level, w).unwrap(), bits.to_vec());
    }

    #[test]
    fn scaled_argmin_random(h in hamiltonian(6)) {
        prop_assume!(h.max_abs_coefficient() > 1e-6);
        let (s, _) = scale_hamiltonian(&h).unwrap();
        let d = h.diagonal().unwrap();
        let ds = s.diagonal().unwrap();
        let min = d.iter().copied().fold(f64::INFINITY, f64::min);
        let best = (0..ds.len()).min_by(|&a, &b| ds[a].total_cmp(&ds[b])).unwrap();
        prop_assert!((d[best] - min).abs() <= 1e-9 * (1.0 + min.abs()));
    }
}
