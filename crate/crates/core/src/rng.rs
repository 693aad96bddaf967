//! Reproducible random streams.
//!
//! Every trial owns an [`RngStream`] keyed by `(seed, stream)`. Consumers inside
//! a trial (instance generation, solver initialisation, shot sampling) take
//! labelled forks so their draws never interleave, which keeps results
//! independent of scheduling order and of which detectors are enabled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// The concrete generator handed to consumers.
pub type StreamRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

/// Fork labels used by the pipeline. Kept in one place so that two consumers
/// never share a label by accident.
pub mod label {
    pub const INSTANCE: u64 = 1;
    pub const BMBCD: u64 = 2;
    pub const SHOTS: u64 = 3;
    pub const DETECTOR_BASE: u64 = 0x100;
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// Derives an independent child stream for a named consumer.
    pub fn fork(&self, label: u64) -> Self {
        Self {
            seed: splitmix64(self.seed ^ splitmix64(label.wrapping_mul(0xD1B5_4A32_D192_ED03))),
            stream: self.stream,
        }
    }

    pub fn rng(&self) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}
