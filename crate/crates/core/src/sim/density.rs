//! Density-matrix execution with depolarizing gate noise and readout flips.
//!
//! Gate-noise accounting: every single-qubit gate (state preparation, mixer)
//! is followed by a one-qubit depolarizing channel on its target. The diagonal
//! cost unitary is charged per Pauli term as if compiled to a CNOT ladder: a
//! weight-1 term costs one one-qubit channel, a weight-`w` term costs
//! `2(w−1)` two-qubit channels on consecutive pairs of its sorted support plus
//! one one-qubit channel on the ladder root (its last qubit). Depolarizing
//! channels are Pauli channels and commute with one another, so the channels
//! of one cost layer are merged per target (`m` applications contract by
//! `λ^m`) and applied after the layer's exact diagonal phase.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::StreamRng;

use super::circuit::{InitKind, MixerKind, QaoaCircuit};
use super::statevector::{
    apply_gate_slice, hadamard_gate, ry_gate, rx_gate, sample_distribution, ws_mixer_gate, Counts,
    Gate,
};

pub const MAX_DENSITY_QUBITS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub p_1q: f64,
    pub p_2q: f64,
    pub p_ro: f64,
    /// Recorded for provenance; no thermal-relaxation channel is applied.
    pub t1_us: Option<f64>,
    pub t2_us: Option<f64>,
}

impl NoiseParams {
    pub fn noiseless() -> Self {
        Self { p_1q: 0.0, p_2q: 0.0, p_ro: 0.0, t1_us: None, t2_us: None }
    }

    /// Median calibration of a 127-qubit Eagle r3 device.
    pub fn eagle_r3() -> Self {
        Self {
            p_1q: 2.639e-4,
            p_2q: 8.401e-3,
            p_ro: 2.76e-2,
            t1_us: Some(247.6),
            t2_us: Some(105.29),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, p) in [("p_1q", self.p_1q), ("p_2q", self.p_2q), ("p_ro", self.p_ro)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Parameter(format!("{name} = {p} outside [0, 1]")));
            }
        }
        Ok(())
    }

    fn lambda_1q(&self) -> f64 {
        1.0 - 4.0 * self.p_1q / 3.0
    }

    fn lambda_2q(&self) -> f64 {
        1.0 - 16.0 * self.p_2q / 15.0
    }
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self::eagle_r3()
    }
}

/// Row-major `2^n × 2^n` matrix. Entry `(r, c)` is stored at `r·2^n + c`, so
/// qubit `q` of the column index is bit `q` and of the row index bit `q + n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    rho: Vec<Complex64>,
}

fn conj_gate(g: &Gate) -> Gate {
    [[g[0][0].conj(), g[0][1].conj()], [g[1][0].conj(), g[1][1].conj()]]
}

impl DensityMatrix {
    /// `|0…0⟩⟨0…0|`.
    pub fn zero_state(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_DENSITY_QUBITS {
            return Err(Error::QubitRange { n, max: MAX_DENSITY_QUBITS });
        }
        let dim = 1usize << n;
        let mut rho = vec![Complex64::new(0.0, 0.0); dim * dim];
        rho[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits: n, rho })
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn from_pure(amps: &[Complex64]) -> Result<Self> {
        let dim = amps.len();
        if !dim.is_power_of_two() {
            return Err(Error::Dimension(format!("{dim} amplitudes is not a power of two")));
        }
        let n = dim.trailing_zeros() as usize;
        let mut out = Self::zero_state(n)?;
        for r in 0..dim {
            for c in 0..dim {
                out.rho[r * dim + c] = amps[r] * amps[c].conj();
            }
        }
        Ok(out)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn entry(&self, r: usize, c: usize) -> Complex64 {
        self.rho[r * self.dim() + c]
    }

    pub fn trace(&self) -> Complex64 {
        let dim = self.dim();
        (0..dim).map(|i| self.rho[i * dim + i]).sum()
    }

    /// `max |ρ − ρ†|`.
    pub fn hermiticity_error(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for r in 0..dim {
            for c in r..dim {
                worst = worst.max((self.rho[r * dim + c] - self.rho[c * dim + r].conj()).norm());
            }
        }
        worst
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let dim = self.dim();
        (0..dim).map(|i| self.rho[i * dim + i].re).collect()
    }

    /// `UρU†` for a single-qubit `U` on qubit `q`.
    pub fn apply_gate(&mut self, q: usize, gate: &Gate) -> Result<()> {
        self.check_qubit(q)?;
        apply_gate_slice(&mut self.rho, q + self.n_qubits, gate);
        apply_gate_slice(&mut self.rho, q, &conj_gate(gate));
        Ok(())
    }

    /// Conjugation by `diag(e^{−iγE(b)})`.
    pub fn apply_diagonal_phase(&mut self, energies: &[f64], gamma: f64) -> Result<()> {
        let dim = self.dim();
        if energies.len() != dim {
            return Err(Error::Dimension(format!("{} energies for dimension {dim}", energies.len())));
        }
        let phases: Vec<Complex64> = energies
            .iter()
            .map(|&e| Complex64::from_polar(1.0, -gamma * e))
            .collect();
        for r in 0..dim {
            let pr = phases[r];
            let row = &mut self.rho[r * dim..(r + 1) * dim];
            for (v, pc) in row.iter_mut().zip(&phases) {
                *v *= pr * pc.conj();
            }
        }
        Ok(())
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(Error::Parameter(format!("qubit {q} out of range")));
        }
        Ok(())
    }

    /// `ρ → λρ + (1−λ)·Tr_q(ρ)⊗I/2`.
    pub fn depolarize_1q(&mut self, q: usize, lambda: f64) -> Result<()> {
        self.check_qubit(q)?;
        let col = 1usize << q;
        let row = col << self.n_qubits;
        let mix = 0.5 * (1.0 - lambda);
        for base in 0..self.rho.len() {
            if base & (col | row) != 0 {
                continue;
            }
            let (i00, i11) = (base, base | row | col);
            let (a, d) = (self.rho[i00], self.rho[i11]);
            let t = (a + d) * mix;
            self.rho[i00] = a * lambda + t;
            self.rho[i11] = d * lambda + t;
            self.rho[base | col] *= lambda;
            self.rho[base | row] *= lambda;
        }
        Ok(())
    }

    /// `ρ → λρ + (1−λ)·Tr_{ab}(ρ)⊗I/4`.
    pub fn depolarize_2q(&mut self, a: usize, b: usize, lambda: f64) -> Result<()> {
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        if a == b {
            return Err(Error::Parameter(format!("two-qubit channel on repeated qubit {a}")));
        }
        let n = self.n_qubits;
        let subs = [0usize, 1 << a, 1 << b, (1 << a) | (1 << b)];
        let mask = subs[3] | (subs[3] << n);
        let mix = 0.25 * (1.0 - lambda);
        for base in 0..self.rho.len() {
            if base & mask != 0 {
                continue;
            }
            let diag_idx = subs.map(|s| base | s | (s << n));
            let tr: Complex64 = diag_idx.iter().map(|&i| self.rho[i]).sum();
            for &rs in &subs {
                for &cs in &subs {
                    let i = base | (rs << n) | cs;
                    self.rho[i] = if rs == cs {
                        self.rho[i] * lambda + tr * mix
                    } else {
                        self.rho[i] * lambda
                    };
                }
            }
        }
        Ok(())
    }

    /// Final noisy state of a circuit.
    pub fn evolve(circuit: &QaoaCircuit, noise: &NoiseParams) -> Result<Self> {
        circuit.validate()?;
        noise.validate()?;
        let n = circuit.n_qubits();
        let mut rho = Self::zero_state(n)?;
        let l1 = noise.lambda_1q();
        let l2 = noise.lambda_2q();

        for q in 0..n {
            let gate = match &circuit.init {
                InitKind::Uniform => hadamard_gate(),
                InitKind::Warm(x) => ry_gate(2.0 * x[q].sqrt().asin()),
            };
            rho.apply_gate(q, &gate)?;
            rho.depolarize_1q(q, l1)?;
        }

        let mut ones = vec![0i32; n];
        let mut pairs: BTreeMap<(usize, usize), i32> = BTreeMap::new();
        for t in circuit.hamiltonian.terms() {
            let s = &t.support;
            if let Some(&root) = s.last() {
                ones[root] += 1;
            }
            for w in s.windows(2) {
                *pairs.entry((w[0], w[1])).or_insert(0) += 2;
            }
        }

        let diag = circuit.hamiltonian.diagonal()?;
        for (&gamma, &beta) in circuit.gammas.iter().zip(&circuit.betas) {
            rho.apply_diagonal_phase(&diag, gamma)?;
            for (&(a, b), &m) in &pairs {
                rho.depolarize_2q(a, b, l2.powi(m))?;
            }
            for (q, &m) in ones.iter().enumerate() {
                if m > 0 {
                    rho.depolarize_1q(q, l1.powi(m))?;
                }
            }
            for q in 0..n {
                let gate = match &circuit.mixer {
                    MixerKind::TransverseX => rx_gate(beta),
                    MixerKind::WarmStart(x) => ws_mixer_gate(beta, x[q]),
                };
                rho.apply_gate(q, &gate)?;
                rho.depolarize_1q(q, l1)?;
            }
        }
        Ok(rho)
    }

    /// Outcome distribution after independent per-qubit readout flips.
    pub fn measurement_probabilities(&self, p_ro: f64) -> Vec<f64> {
        let mut p: Vec<f64> = self.diagonal().into_iter().map(|v| v.max(0.0)).collect();
        if p_ro > 0.0 {
            for q in 0..self.n_qubits {
                let bit = 1usize << q;
                for b in 0..p.len() {
                    if b & bit == 0 {
                        let (p0, p1) = (p[b], p[b | bit]);
                        p[b] = (1.0 - p_ro) * p0 + p_ro * p1;
                        p[b | bit] = (1.0 - p_ro) * p1 + p_ro * p0;
                    }
                }
            }
        }
        p
    }
}

/// Samples `shots` noisy measurement outcomes of `circuit`.
pub fn noisy_execute(
    circuit: &QaoaCircuit,
    noise: &NoiseParams,
    shots: usize,
    rng: &mut StreamRng,
) -> Result<Counts> {
    let rho = DensityMatrix::evolve(circuit, noise)?;
    sample_distribution(&rho.measurement_probabilities(noise.p_ro), shots, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hubo::PauliHamiltonian;
    use crate::rng::RngStream;

    fn bloch(rho: &DensityMatrix) -> [f64; 3] {
        let r01 = rho.entry(0, 1);
        [2.0 * r01.re, -2.0 * r01.im, (rho.entry(0, 0) - rho.entry(1, 1)).re]
    }

    #[test]
    fn one_qubit_depolarizing_contracts_bloch_vector() {
        let p = 0.1;
        let lambda = 1.0 - 4.0 * p / 3.0;
        for (theta, phi) in [(0.3, 1.1), (1.9, -0.4), (2.8, 2.2)] {
            let amps = [
                Complex64::new((theta / 2.0f64).cos(), 0.0),
                Complex64::from_polar((theta / 2.0f64).sin(), phi),
            ];
            let mut rho = DensityMatrix::from_pure(&amps).unwrap();
            let before = bloch(&rho);
            rho.depolarize_1q(0, lambda).unwrap();
            let after = bloch(&rho);
            for i in 0..3 {
                assert!((after[i] - lambda * before[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn kraus_form_agrees_with_mixing_form() {
        // (1−p)ρ + p/3 (XρX + YρY + ZρZ) on a random 2-qubit state, qubit 1.
        let amps: Vec<Complex64> = [(0.3, 0.1), (-0.5, 0.2), (0.1, -0.6), (0.4, 0.25)]
            .iter()
            .map(|&(a, b)| Complex64::new(a, b))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let amps: Vec<Complex64> = amps.iter().map(|a| a / norm).collect();
        let p = 0.2;
        let mut fast = DensityMatrix::from_pure(&amps).unwrap();
        fast.depolarize_1q(1, 1.0 - 4.0 * p / 3.0).unwrap();

        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let paulis: [Gate; 3] = [[[zero, one], [one, zero]], [[zero, -i], [i, zero]], [[one, zero], [zero, -one]]];
        let base = DensityMatrix::from_pure(&amps).unwrap();
        let mut slow: Vec<Complex64> = base.rho.iter().map(|v| v * (1.0 - p)).collect();
        for pg in &paulis {
            let mut t = base.clone();
            t.apply_gate(1, pg).unwrap();
            for (s, v) in slow.iter_mut().zip(&t.rho) {
                *s += v * (p / 3.0);
            }
        }
        for (a, b) in fast.rho.iter().zip(&slow) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn full_two_qubit_depolarizing_gives_maximally_mixed() {
        let mut rho = DensityMatrix::from_pure(&bell()).unwrap();
        rho.depolarize_2q(0, 1, 0.0).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                let expected = if r == c { 0.25 } else { 0.0 };
                assert!((rho.entry(r, c) - Complex64::new(expected, 0.0)).norm() < 1e-12);
            }
        }
    }

    fn bell() -> Vec<Complex64> {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let z = Complex64::new(0.0, 0.0);
        vec![h, z, z, h]
    }

    fn circuit() -> QaoaCircuit {
        let h = PauliHamiltonian::from_terms(
            4,
            [(1.0, vec![0]), (-0.5, vec![1, 2]), (0.25, vec![0, 2, 3]), (0.7, vec![0, 1, 2, 3])],
            2.0,
        )
        .unwrap();
        QaoaCircuit {
            hamiltonian: h,
            init: InitKind::Warm(vec![0.2, 0.7, 0.5, 0.9]),
            mixer: MixerKind::WarmStart(vec![0.2, 0.7, 0.5, 0.9]),
            gammas: vec![0.3, 0.6],
            betas: vec![0.5, 0.2],
        }
    }

    #[test]
    fn noiseless_density_matches_statevector() {
        let c = circuit();
        let rho = DensityMatrix::evolve(&c, &NoiseParams::noiseless()).unwrap();
        let probs = c.statevector().unwrap().probabilities();
        for (a, b) in rho.diagonal().iter().zip(&probs) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn noisy_evolution_preserves_trace_and_hermiticity() {
        let noise = NoiseParams { p_1q: 0.05, p_2q: 0.1, p_ro: 0.0, t1_us: None, t2_us: None };
        let rho = DensityMatrix::evolve(&circuit(), &noise).unwrap();
        assert!((rho.trace() - Complex64::new(1.0, 0.0)).norm() < 1e-9);
        assert!(rho.hermiticity_error() < 1e-10);
    }

    #[test]
    fn readout_half_scrambles_bits() {
        let rho = DensityMatrix::from_pure(&[Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)]).unwrap();
        let p = rho.measurement_probabilities(0.5);
        for v in p {
            assert!((v - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn guards() {
        assert!(DensityMatrix::zero_state(11).is_err());
        let bad = NoiseParams { p_1q: -0.1, ..NoiseParams::noiseless() };
        let mut rng = RngStream::new(0, 0).rng();
        assert!(noisy_execute(&circuit(), &bad, 10, &mut rng).is_err());
    }
}
