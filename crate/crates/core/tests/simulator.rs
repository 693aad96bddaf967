use num_complex::Complex64;
use proptest::prelude::*;
use qmimo::hubo::PauliHamiltonian;
use qmimo::sim::{sample_distribution, InitKind, MixerKind, QaoaCircuit};
use qmimo::{DensityMatrix, NoiseParams, RngStream, StateVector};

fn random_state(n: usize, seed: u64) -> StateVector {
    use rand::Rng;
    let mut r = RngStream::new(seed, 0).rng();
    let amps: Vec<Complex64> = (0..1 << n)
        .map(|_| Complex64::new(r.random::<f64>() - 0.5, r.random::<f64>() - 0.5))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    StateVector::from_amplitudes(amps.into_iter().map(|a| a / norm).collect()).unwrap()
}

fn random_hamiltonian(n: usize, seed: u64) -> PauliHamiltonian {
    use rand::Rng;
    let mut r = RngStream::new(seed, 1).rng();
    let terms: Vec<(f64, Vec<usize>)> = (0..8)
        .map(|_| {
            let support: Vec<usize> = (0..n).filter(|_| r.random::<bool>()).collect();
            (r.random_range(-2.0..2.0), support)
        })
        .collect();
    PauliHamiltonian::from_terms(n, terms, 0.3).unwrap()
}

fn probs(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..0.99, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gates_preserve_norm(seed in 0u64..1000, gamma in -3.0f64..3.0, beta in -3.0f64..3.0, x in probs(5)) {
        let h = random_hamiltonian(5, seed);
        let mut s = random_state(5, seed);
        s.apply_cost_phase(&h, gamma).unwrap();
        s.apply_rx_mixer(beta);
        s.apply_ws_mixer(beta, &x).unwrap();
        prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cost_phases_compose_additively(seed in 0u64..1000, g1 in -2.0f64..2.0, g2 in -2.0f64..2.0) {
        let h = random_hamiltonian(4, seed);
        let mut a = random_state(4, seed);
        let mut b = a.clone();
        a.apply_cost_phase(&h, g1).unwrap();
        a.apply_cost_phase(&h, g2).unwrap();
        b.apply_cost_phase(&h, g1 + g2).unwrap();
        prop_assert!((a.fidelity(&b).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn warm_state_is_a_mixer_eigenvector(x in probs(4), beta in -3.0f64..3.0) {
        let psi0 = StateVector::prepare_warm_start(&x).unwrap();
        let mut s = psi0.clone();
        s.apply_ws_mixer(beta, &x).unwrap();
        prop_assert!((s.fidelity(&psi0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noisy_evolution_keeps_trace_and_hermiticity(seed in 0u64..1000, g in 0.0f64..2.0, b in 0.0f64..2.0, x in probs(3)) {
        let circuit = QaoaCircuit {
            hamiltonian: random_hamiltonian(3, seed),
            init: InitKind::Warm(x.clone()),
            mixer: MixerKind::WarmStart(x),
            gammas: vec![g, 0.5 * g],
            betas: vec![b, 0.5 * b],
        };
        let rho = DensityMatrix::evolve(&circuit, &NoiseParams::eagle_r3()).unwrap();
        prop_assert!((rho.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(rho.trace().im.abs() < 1e-12);
        prop_assert!(rho.hermiticity_error() < 1e-12);
        prop_assert!(rho.diagonal().iter().all(|&p| p > -1e-14));
    }
}

#[test]
fn warm_fixed_point_recovers_hard_decision() {
    let x = [0.9, 0.2, 0.7, 0.99];
    let circuit = QaoaCircuit {
        hamiltonian: random_hamiltonian(4, 3),
        init: InitKind::Warm(x.to_vec()),
        mixer: MixerKind::WarmStart(x.to_vec()),
        gammas: vec![0.0; 5],
        betas: vec![0.7; 5],
    };
    let p = circuit.statevector().unwrap().probabilities();
    let hard = 0b1101;
    let want: f64 = x.iter().map(|&v| v.max(1.0 - v)).product();
    assert!((p[hard] - want).abs() < 1e-12);
}

#[test]
fn noiseless_density_path_matches_statevector() {
    for (init, mixer) in [
        (InitKind::Uniform, MixerKind::TransverseX),
        (InitKind::Warm(vec![0.3, 0.8, 0.6, 0.1]), MixerKind::WarmStart(vec![0.3, 0.8, 0.6, 0.1])),
    ] {
        let circuit = QaoaCircuit {
            hamiltonian: random_hamiltonian(4, 9),
            init,
            mixer,
            gammas: vec![0.2, 0.4, 0.6],
            betas: vec![0.9, 0.5, 0.1],
        };
        let sv = circuit.statevector().unwrap().probabilities();
        let dm = DensityMatrix::evolve(&circuit, &NoiseParams::noiseless()).unwrap().measurement_probabilities(0.0);
        for (a, b) in sv.iter().zip(&dm) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}

#[test]
fn sampling_frequencies_follow_probabilities() {
    let p = [0.5, 0.25, 0.125, 0.125];
    let shots = 200_000;
    let counts = sample_distribution(&p, shots, &mut RngStream::new(5, 5).rng()).unwrap();
    assert_eq!(counts.values().sum::<u64>(), shots as u64);
    for (i, &pi) in p.iter().enumerate() {
        let f = *counts.get(&i).unwrap_or(&0) as f64 / shots as f64;
        let sd = (pi * (1.0 - pi) / shots as f64).sqrt();
        assert!((f - pi).abs() < 5.0 * sd, "outcome {i}: {f} vs {pi}");
    }
}

#[test]
fn sampling_never_returns_zero_probability_outcomes() {
    let p = [0.0, 0.6, 0.0, 0.4];
    let counts = sample_distribution(&p, 10_000, &mut RngStream::new(1, 2).rng()).unwrap();
    assert!(!counts.contains_key(&0) && !counts.contains_key(&2));
}

#[test]
fn readout_flips_mix_outcomes() {
    let rho = DensityMatrix::zero_state(2).unwrap();
    let p = rho.measurement_probabilities(0.1);
    assert!((p[0] - 0.81).abs() < 1e-12);
    assert!((p[1] - 0.09).abs() < 1e-12 && (p[2] - 0.09).abs() < 1e-12);
    assert!((p[3] - 0.01).abs() < 1e-12);
}
