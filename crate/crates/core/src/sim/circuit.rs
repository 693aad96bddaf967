use crate::error::{Error, Result};
use crate::hubo::PauliHamiltonian;

use super::statevector::{check_probabilities, StateVector};

#[derive(Debug, Clone, PartialEq)]
pub enum InitKind {
    /// `H^{⊗n}|0⟩`.
    Uniform,
    /// `⊗ RY(2 asin √x_q)|0⟩`.
    Warm(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum MixerKind {
    TransverseX,
    WarmStart(Vec<f64>),
}

/// `p` layers of `e^{−iβ_k H_M} e^{−iγ_k H}` applied to the initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct QaoaCircuit {
    pub hamiltonian: PauliHamiltonian,
    pub init: InitKind,
    pub mixer: MixerKind,
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
}

impl QaoaCircuit {
    pub fn n_qubits(&self) -> usize {
        self.hamiltonian.n_qubits()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_qubits();
        if self.gammas.len() != self.betas.len() {
            return Err(Error::Dimension(format!(
                "{} gammas and {} betas",
                self.gammas.len(),
                self.betas.len()
            )));
        }
        for x in [self.init.probabilities(), self.mixer.probabilities()].into_iter().flatten() {
            if x.len() != n {
                return Err(Error::Dimension(format!("{} probabilities for {n} qubits", x.len())));
            }
            check_probabilities(x)?;
        }
        Ok(())
    }

    /// Exact noiseless final state.
    pub fn statevector(&self) -> Result<StateVector> {
        self.validate()?;
        let diag = self.hamiltonian.diagonal()?;
        let mut state = match &self.init {
            InitKind::Uniform => StateVector::prepare_uniform(self.n_qubits())?,
            InitKind::Warm(x) => StateVector::prepare_warm_start(x)?,
        };
        for (&gamma, &beta) in self.gammas.iter().zip(&self.betas) {
            state.apply_diagonal_phase(&diag, gamma)?;
            match &self.mixer {
                MixerKind::TransverseX => state.apply_rx_mixer(beta),
                MixerKind::WarmStart(x) => state.apply_ws_mixer(beta, x)?,
            }
        }
        Ok(state)
    }
}

impl InitKind {
    fn probabilities(&self) -> Option<&Vec<f64>> {
        match self {
            InitKind::Uniform => None,
            InitKind::Warm(x) => Some(x),
        }
    }
}

impl MixerKind {
    fn probabilities(&self) -> Option<&Vec<f64>> {
        match self {
            MixerKind::TransverseX => None,
            MixerKind::WarmStart(x) => Some(x),
        }
    }
}
