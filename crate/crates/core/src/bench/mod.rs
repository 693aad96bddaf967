//! Experiment drivers: SER sweeps, cost landscapes, single-instance traces.

mod config;
mod landscape;
mod report;
mod ser;
mod single;

pub use config::{
    parse_detector_list, parse_snr_list, resolve_out_dir, Detector, ExperimentConfig,
    ExperimentKind, LandscapeSettings, NoiseSettings, QaoaSettings,
};
pub use landscape::{
    landscape_for_context, landscape_instance, run_landscape, LandscapeReport, LandscapeStats,
    VariantLandscape,
};
pub use report::{emit_report, format_sig6, Report};
pub use ser::{ci95_half_width, run_ser_experiment, trial_stream, DeltaCount, SerCell, SerReport};
pub use single::{run_single, ClassicalResult, InstanceDump, RelaxationDump, SingleTrace};
