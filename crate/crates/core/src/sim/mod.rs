//! Exact statevector and density-matrix simulation of QAOA circuits.

mod circuit;
mod density;
mod statevector;

pub use circuit::{InitKind, MixerKind, QaoaCircuit};
pub use density::{noisy_execute, DensityMatrix, NoiseParams, MAX_DENSITY_QUBITS};
pub use statevector::{sample_distribution, Counts, StateVector, MAX_STATE_QUBITS};
