//! Exact expected-cost landscapes over `(γ_max, β_max)` grids.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mimo::{generate_instance_with, DetectionInstance};
use crate::qaoa::{ProblemContext, ScheduleKind, Variant};
use crate::rng::RngStream;
use crate::sim::StateVector;

use super::config::ExperimentConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandscapeStats {
    pub min: f64,
    pub max: f64,
    pub range: f64,
    pub mean: f64,
    /// Population standard deviation over all cells.
    pub std: f64,
}

impl LandscapeStats {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        Self { min, max, range: max - min, mean, std: var.sqrt() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantLandscape {
    pub variant: Variant,
    /// `values[i·R + j]` is `⟨H_C⟩` at `(gamma_axis[i], beta_axis[j])`.
    pub values: Vec<f64>,
    pub stats: LandscapeStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandscapeReport {
    pub config: ExperimentConfig,
    pub snr_db: f64,
    pub instance_checksum: u64,
    pub axis: Vec<f64>,
    pub variants: Vec<VariantLandscape>,
}

impl LandscapeReport {
    pub fn variant(&self, v: Variant) -> Option<&VariantLandscape> {
        self.variants.iter().find(|l| l.variant == v)
    }
}

/// `⟨H_C⟩` (unscaled, offset included) of every variant on a
/// `resolution × resolution` grid over `[0, max]²`.
///
/// Evolution uses the scaled Hamiltonian. Flat variants use `γ_k = γ_max`,
/// `β_k = β_max`; ramp variants `γ_k = (k/p)γ_max`, `β_k = (1−(k−1)/p)β_max`.
pub fn landscape_for_context(
    ctx: &ProblemContext,
    variants: &[Variant],
    p: usize,
    temperature: f64,
    resolution: usize,
    max: f64,
) -> Result<Vec<VariantLandscape>> {
    if resolution < 2 {
        return Err(Error::Parameter(format!("grid resolution {resolution} must be at least 2")));
    }
    if p == 0 {
        return Err(Error::Parameter("p must be at least 1".into()));
    }
    let axis = crate::qaoa::grid_axis(resolution, max);
    let warm = ctx.warm_start(temperature)?;
    let n = ctx.n_qubits();
    let pf = p as f64;
    let diag = &ctx.scaled_diagonal;
    let offset = ctx.hamiltonian.offset();

    let mut out = Vec::with_capacity(variants.len());
    for &v in variants {
        let ramp = v.schedule_kind() == ScheduleKind::LinearRamp;
        let layer_gamma = |k: usize, g: f64| if ramp { k as f64 / pf * g } else { g };
        let layer_beta = |k: usize, b: f64| if ramp { (1.0 - (k - 1) as f64 / pf) * b } else { b };
        let initial = if v.warm_init() {
            StateVector::prepare_warm_start(&warm.x)?
        } else {
            StateVector::prepare_uniform(n)?
        };
        let mut values = Vec::with_capacity(resolution * resolution);
        for &gmax in &axis {
            let phases: Vec<Vec<Complex64>> = (1..=p)
                .map(|k| {
                    let g = layer_gamma(k, gmax);
                    diag.iter().map(|&e| Complex64::from_polar(1.0, -g * e)).collect()
                })
                .collect();
            for &bmax in &axis {
                let mut state = initial.clone();
                for (k, ph) in (1..=p).zip(&phases) {
                    state.apply_phases(ph)?;
                    let beta = layer_beta(k, bmax);
                    if v.warm_mixer() {
                        state.apply_ws_mixer(beta, &warm.x)?;
                    } else {
                        state.apply_rx_mixer(beta);
                    }
                }
                values.push(state.expectation_diagonal(diag) / ctx.alpha + offset);
            }
        }
        let stats = LandscapeStats::of(&values);
        out.push(VariantLandscape { variant: v, values, stats });
    }
    Ok(out)
}

/// Landscape instance: stream `landscape.instance_stream` under `seed`.
pub fn landscape_instance(config: &ExperimentConfig) -> Result<(DetectionInstance, RngStream)> {
    let spec = config.spec()?;
    let stream = RngStream::new(config.seed, config.landscape.instance_stream);
    let snr = config.snr_db[0];
    let inst = generate_instance_with(&spec, config.nt, config.nr, snr, config.snr_convention, &stream)?;
    Ok((inst, stream))
}

/// Landscapes of all six variants for the configured instance at the first
/// configured SNR.
pub fn run_landscape(config: &ExperimentConfig) -> Result<LandscapeReport> {
    config.validate()?;
    let (inst, stream) = landscape_instance(config)?;
    let ctx = ProblemContext::new(&inst, &stream)?;
    let variants = landscape_for_context(
        &ctx,
        &Variant::ALL,
        config.qaoa.p,
        config.qaoa.temperature,
        config.landscape.grid,
        config.landscape.max,
    )?;
    Ok(LandscapeReport {
        config: config.clone(),
        snr_db: config.snr_db[0],
        instance_checksum: inst.checksum(),
        axis: crate::qaoa::grid_axis(config.landscape.grid, config.landscape.max),
        variants,
    })
}
