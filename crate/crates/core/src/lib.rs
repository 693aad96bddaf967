//! Hybrid MIMO detection: real-valued reformulation, Gray-coded HUBO
//! compilation, Burer–Monteiro warm starts and QAOA detectors evaluated on an
//! exact simulator, with classical baselines and a Monte-Carlo harness.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod bmbcd;
pub mod constellation;
pub mod detectors;
pub mod error;
pub mod hubo;
pub mod mimo;
pub mod qaoa;
pub mod rng;
pub mod sim;

pub use bmbcd::{bm_bcd_solve, BmBcdConfig, BmBcdResult};
pub use constellation::ConstellationSpec;
pub use detectors::{ml_detect, mmse_detect, quantize_to_pam, zf_detect, MlSolution};
pub use error::{Error, Result};
pub use hubo::{
    build_cost_hamiltonian, gray_map_bits_to_pam, gray_unmap_pam_to_bits, poly_multiply,
    scale_hamiltonian, symbol_as_z_polynomial, PauliHamiltonian, PauliTerm, QubitLayout,
};
pub use mimo::{
    build_lifted_q, generate_instance, generate_instance_with, noise_variance, objective_f,
    DetectionInstance, SnrConvention,
};
pub use qaoa::{
    decode_bitstring, linear_ramp, flat_schedule, run_variant, ser_of, soft_bits, Schedule,
    TrialRecord, Variant, VariantConfig, WarmStart,
};
pub use rng::RngStream;
pub use sim::{noisy_execute, DensityMatrix, NoiseParams, StateVector};
