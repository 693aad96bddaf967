use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::hubo::PauliHamiltonian;
use crate::rng::StreamRng;

pub const MAX_STATE_QUBITS: usize = 24;

pub(crate) type Gate = [[Complex64; 2]; 2];

/// `2^n` amplitudes; bit `q` of the index is qubit `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 || n > MAX_STATE_QUBITS {
        return Err(Error::QubitRange { n, max: MAX_STATE_QUBITS });
    }
    Ok(())
}

/// Applies `gate` to bit `q` of an amplitude array.
pub(crate) fn apply_gate_slice(amps: &mut [Complex64], q: usize, gate: &Gate) {
    let stride = 1usize << q;
    let [[a, b], [c, d]] = *gate;
    for block in (0..amps.len()).step_by(2 * stride) {
        let (lo, hi) = amps[block..block + 2 * stride].split_at_mut(stride);
        for (x0, x1) in lo.iter_mut().zip(hi.iter_mut()) {
            let (v0, v1) = (*x0, *x1);
            *x0 = a * v0 + b * v1;
            *x1 = c * v0 + d * v1;
        }
    }
}

pub(crate) fn rx_gate(beta: f64) -> Gate {
    let (s, c) = beta.sin_cos();
    let mis = Complex64::new(0.0, -s);
    [[Complex64::new(c, 0.0), mis], [mis, Complex64::new(c, 0.0)]]
}

/// `cos β·I − i sin β·P` with `P = 2√(x(1−x))·X + (1−2x)·Z`.
pub(crate) fn ws_mixer_gate(beta: f64, x: f64) -> Gate {
    let (s, c) = beta.sin_cos();
    let pz = 1.0 - 2.0 * x;
    let px = 2.0 * (x * (1.0 - x)).sqrt();
    [
        [Complex64::new(c, -s * pz), Complex64::new(0.0, -s * px)],
        [Complex64::new(0.0, -s * px), Complex64::new(c, s * pz)],
    ]
}

pub(crate) fn ry_gate(theta: f64) -> Gate {
    let (s, c) = (theta / 2.0).sin_cos();
    [
        [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
        [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
    ]
}

pub(crate) fn hadamard_gate() -> Gate {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

pub(crate) fn check_probabilities(x: &[f64]) -> Result<()> {
    if let Some((q, v)) = x.iter().enumerate().find(|(_, v)| !(0.0..=1.0).contains(*v)) {
        return Err(Error::Parameter(format!("probability x[{q}] = {v} outside [0, 1]")));
    }
    Ok(())
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero_state(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_qubits(n)?;
        if index >> n != 0 {
            return Err(Error::Parameter(format!("basis index {index} out of range for {n} qubits")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits: n, amps })
    }

    /// Wraps raw amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if !len.is_power_of_two() {
            return Err(Error::Dimension(format!("{len} amplitudes is not a power of two")));
        }
        let n = len.trailing_zeros() as usize;
        check_qubits(n)?;
        Ok(Self { n_qubits: n, amps })
    }

    /// Every amplitude `2^{−n/2}`.
    pub fn prepare_uniform(n: usize) -> Result<Self> {
        check_qubits(n)?;
        let a = Complex64::new((1.0 / (1u64 << n) as f64).sqrt(), 0.0);
        Ok(Self { n_qubits: n, amps: vec![a; 1 << n] })
    }

    /// Product state `⊗_q (√(1−x_q)|0⟩ + √x_q|1⟩)`, i.e. `RY(2 asin √x_q)|0⟩`.
    pub fn prepare_warm_start(x: &[f64]) -> Result<Self> {
        let n = x.len();
        check_qubits(n)?;
        check_probabilities(x)?;
        let mut amps = vec![Complex64::new(1.0, 0.0); 1 << n];
        for (q, &p) in x.iter().enumerate() {
            let (a0, a1) = ((1.0 - p).sqrt(), p.sqrt());
            for (b, amp) in amps.iter_mut().enumerate() {
                *amp *= if (b >> q) & 1 == 1 { a1 } else { a0 };
            }
        }
        Ok(Self { n_qubits: n, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `|⟨self|other⟩|`.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        self.check_len(other.amps.len())?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .norm())
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.amps.len() {
            return Err(Error::Dimension(format!(
                "length {len} does not match a {}-qubit state",
                self.n_qubits
            )));
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, q: usize, gate: &[[Complex64; 2]; 2]) -> Result<()> {
        if q >= self.n_qubits {
            return Err(Error::Parameter(format!("qubit {q} out of range")));
        }
        apply_gate_slice(&mut self.amps, q, gate);
        Ok(())
    }

    /// `amp[b] *= exp(−iγE(b))`, offset excluded (it is a global phase).
    pub fn apply_cost_phase(&mut self, h: &PauliHamiltonian, gamma: f64) -> Result<()> {
        if h.n_qubits() != self.n_qubits {
            return Err(Error::Dimension(format!(
                "Hamiltonian on {} qubits, state on {}",
                h.n_qubits(),
                self.n_qubits
            )));
        }
        let diag = h.diagonal()?;
        self.apply_diagonal_phase(&diag, gamma)
    }

    /// As [`StateVector::apply_cost_phase`] with precomputed energies.
    pub fn apply_diagonal_phase(&mut self, energies: &[f64], gamma: f64) -> Result<()> {
        self.check_len(energies.len())?;
        for (a, &e) in self.amps.iter_mut().zip(energies) {
            let (s, c) = (-gamma * e).sin_cos();
            *a *= Complex64::new(c, s);
        }
        Ok(())
    }

    /// Multiplies by precomputed unit phases.
    pub fn apply_phases(&mut self, phases: &[Complex64]) -> Result<()> {
        self.check_len(phases.len())?;
        for (a, p) in self.amps.iter_mut().zip(phases) {
            *a *= p;
        }
        Ok(())
    }

    /// `Π_q e^{−iβX_q}`.
    pub fn apply_rx_mixer(&mut self, beta: f64) {
        let gate = rx_gate(beta);
        for q in 0..self.n_qubits {
            apply_gate_slice(&mut self.amps, q, &gate);
        }
    }

    /// `Π_q e^{−iβP_q}` with `P_q = 2√(x_q(1−x_q))·X + (1−2x_q)·Z`.
    pub fn apply_ws_mixer(&mut self, beta: f64, x: &[f64]) -> Result<()> {
        if x.len() != self.n_qubits {
            return Err(Error::Dimension(format!(
                "{} mixer probabilities for {} qubits",
                x.len(),
                self.n_qubits
            )));
        }
        check_probabilities(x)?;
        for (q, &p) in x.iter().enumerate() {
            apply_gate_slice(&mut self.amps, q, &ws_mixer_gate(beta, p));
        }
        Ok(())
    }

    /// `Σ_b |amp_b|² E(b)`, offset included.
    pub fn expectation(&self, h: &PauliHamiltonian) -> Result<f64> {
        if h.n_qubits() != self.n_qubits {
            return Err(Error::Dimension(format!(
                "Hamiltonian on {} qubits, state on {}",
                h.n_qubits(),
                self.n_qubits
            )));
        }
        let diag = h.diagonal()?;
        Ok(self.expectation_diagonal(&diag) + h.offset())
    }

    pub(crate) fn expectation_diagonal(&self, energies: &[f64]) -> f64 {
        self.amps
            .iter()
            .zip(energies)
            .map(|(a, e)| a.norm_sqr() * e)
            .sum()
    }

    /// `shots` i.i.d. draws from `|amp|²`.
    pub fn sample(&self, shots: usize, rng: &mut StreamRng) -> Result<Counts> {
        sample_distribution(&self.probabilities(), shots, rng)
    }
}

/// Basis index → number of shots.
pub type Counts = BTreeMap<usize, u64>;

/// Inverse-CDF sampling from an (unnormalised) probability vector.
pub fn sample_distribution(probs: &[f64], shots: usize, rng: &mut StreamRng) -> Result<Counts> {
    if shots == 0 {
        return Err(Error::Parameter("shots must be at least 1".into()));
    }
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs {
        acc += p.max(0.0);
        cdf.push(acc);
    }
    if !(acc > 0.0) || !acc.is_finite() {
        return Err(Error::Numerical("probability vector has no mass".into()));
    }
    let mut counts = Counts::new();
    for _ in 0..shots {
        let u: f64 = rng.random::<f64>() * acc;
        let idx = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
        *counts.entry(idx).or_insert(0) += 1;
    }
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn uniform_amplitudes() {
        let s = StateVector::prepare_uniform(1).unwrap();
        assert!(s.amplitudes().iter().all(|a| close(*a, Complex64::new(0.5f64.sqrt(), 0.0))));
        let s = StateVector::prepare_uniform(3).unwrap();
        assert!(s.amplitudes().iter().all(|a| close(*a, Complex64::new(0.125f64.sqrt(), 0.0))));
        assert!(StateVector::prepare_uniform(0).is_err());
        assert!(StateVector::prepare_uniform(25).is_err());
    }

    #[test]
    fn warm_start_states() {
        let half = StateVector::prepare_warm_start(&[0.5; 4]).unwrap();
        assert!(half.fidelity(&StateVector::prepare_uniform(4).unwrap()).unwrap() > 1.0 - 1e-12);
        let basis = StateVector::prepare_warm_start(&[1.0, 0.0]).unwrap();
        assert_eq!(basis.probabilities(), vec![0.0, 1.0, 0.0, 0.0]);
        let s = StateVector::prepare_warm_start(&[0.3]).unwrap();
        assert!((s.probabilities()[1] - 0.3).abs() < 1e-12);
        assert!(StateVector::prepare_warm_start(&[1.2]).is_err());
    }

    #[test]
    fn warm_start_matches_ry_circuit() {
        let x = [0.1f64, 0.7, 0.45];
        let mut s = StateVector::zero_state(3).unwrap();
        for (q, &p) in x.iter().enumerate() {
            s.apply_gate(q, &ry_gate(2.0 * p.sqrt().asin())).unwrap();
        }
        let direct = StateVector::prepare_warm_start(&x).unwrap();
        for (a, b) in s.amplitudes().iter().zip(direct.amplitudes()) {
            assert!(close(*a, *b));
        }
    }

    #[test]
    fn rx_mixer_examples() {
        let mut s = StateVector::zero_state(1).unwrap();
        s.apply_rx_mixer(std::f64::consts::FRAC_PI_2);
        assert!(close(s.amplitudes()[1], Complex64::new(0.0, -1.0)));
        let before = StateVector::prepare_warm_start(&[0.2, 0.9]).unwrap();
        let mut after = before.clone();
        after.apply_rx_mixer(0.0);
        assert_eq!(before, after);
    }

    #[test]
    fn ws_mixer_limits() {
        let beta = 0.37;
        let g = ws_mixer_gate(beta, 1.0);
        assert!(close(g[0][0], Complex64::from_polar(1.0, beta)));
        assert!(close(g[1][1], Complex64::from_polar(1.0, -beta)));
        assert!(close(g[0][1], Complex64::new(0.0, 0.0)));
        let rx = rx_gate(beta);
        let half = ws_mixer_gate(beta, 0.5);
        for i in 0..2 {
            for j in 0..2 {
                assert!(close(rx[i][j], half[i][j]));
            }
        }
    }

    #[test]
    fn cost_phase_examples() {
        let z0 = PauliHamiltonian::z(2, 0, 1.0).unwrap();
        let psi = StateVector::prepare_warm_start(&[0.3, 0.6]).unwrap();
        let mut s = psi.clone();
        s.apply_cost_phase(&z0, 0.0).unwrap();
        assert_eq!(s, psi);
        s.apply_cost_phase(&z0, std::f64::consts::PI).unwrap();
        assert!(s.fidelity(&psi).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn expectation_examples() {
        let h = PauliHamiltonian::from_terms(3, [(1.5, vec![0]), (-2.0, vec![1, 2])], 0.5).unwrap();
        for b in 0..8 {
            let s = StateVector::basis(3, b).unwrap();
            assert!((s.expectation(&h).unwrap() - h.energy_of_index(b as u64)).abs() < 1e-12);
        }
        let z0 = PauliHamiltonian::z(3, 0, 1.0).unwrap();
        assert!(StateVector::prepare_uniform(3).unwrap().expectation(&z0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn sampling_basics() {
        let mut rng = RngStream::new(3, 0).rng();
        let s = StateVector::basis(4, 9).unwrap();
        let counts = s.sample(500, &mut rng).unwrap();
        assert_eq!(counts.len(), 1);
        assert_eq!(counts[&9], 500);
        let u = StateVector::prepare_uniform(3).unwrap().sample(1000, &mut rng).unwrap();
        assert_eq!(u.values().sum::<u64>(), 1000);
        assert!(s.sample(0, &mut rng).is_err());
    }
}
