//! QAOA detector variants: schedules, warm starts and the Δ-sweep.

mod schedule;
mod variant;
mod warm_start;

pub use schedule::{flat_schedule, linear_ramp, ramp_schedule, Schedule, ScheduleKind};
pub use variant::{
    decode_bitstring, mode_of, run_variant, run_variant_in, ser_of, Candidate, FlatParams,
    ProblemContext, TrialRecord, Variant, VariantConfig,
};
pub(crate) use variant::grid_axis;
pub use warm_start::{soft_bits, WarmStart, CLIP_HIGH, CLIP_LOW};
