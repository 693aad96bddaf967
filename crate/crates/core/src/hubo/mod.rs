//! Gray-coded symbol polynomials and the HUBO cost Hamiltonian.

mod cost;
mod gray;
mod layout;
mod pauli;

pub use cost::{build_cost_hamiltonian, encode_symbols, symbol_as_z_polynomial};
pub use gray::{gray_map_bits_to_pam, gray_unmap_pam_to_bits};
pub use layout::QubitLayout;
pub use pauli::{evaluate_energy, poly_multiply, scale_hamiltonian, PauliHamiltonian, PauliTerm, MAX_QUBITS, PRUNE_TOL};
