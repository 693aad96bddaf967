//! Full trace of one instance through every detector.

use serde::{Deserialize, Serialize};

use crate::bmbcd::bcd_detect;
use crate::detectors::{ml_detect, mmse_detect, zf_detect};
use crate::error::Result;
use crate::mimo::{generate_instance_with, objective_f};
use crate::qaoa::{run_variant_in, ser_of, ProblemContext, TrialRecord, Variant, WarmStart};
use crate::rng::{label, RngStream};

use super::config::{Detector, ExperimentConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceDump {
    pub nt: usize,
    pub nr: usize,
    pub snr_db: f64,
    pub sigma2: f64,
    pub checksum: u64,
    /// Row-major `[re, im]` pairs.
    pub h: Vec<[f64; 2]>,
    pub x_true: Vec<[f64; 2]>,
    pub y: Vec<[f64; 2]>,
    /// Row-major.
    pub g: Vec<f64>,
    pub c: Vec<f64>,
    pub q: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelaxationDump {
    pub rank: usize,
    pub sweeps: usize,
    pub converged: bool,
    pub objective_trace: Vec<f64>,
    pub warm_start: WarmStart,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalResult {
    pub detector: String,
    pub s_hat: Vec<f64>,
    pub energy: f64,
    pub symbol_errors: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingleTrace {
    pub config: ExperimentConfig,
    pub instance: InstanceDump,
    /// Serialized cost Hamiltonian (offset included).
    pub hamiltonian: String,
    pub alpha: f64,
    pub relaxation: RelaxationDump,
    pub classical: Vec<ClassicalResult>,
    pub variants: Vec<TrialRecord>,
}

impl SingleTrace {
    pub fn ml_energy(&self) -> Option<f64> {
        self.classical.iter().find(|c| c.detector == "ML").map(|c| c.energy)
    }
}

/// Trial stream 0 at the first configured SNR, run through every classical
/// detector and all six variants with shot histograms recorded.
pub fn run_single(config: &ExperimentConfig) -> Result<SingleTrace> {
    config.validate()?;
    let spec = config.spec()?;
    let snr = config.snr_db[0];
    let stream = RngStream::new(config.seed, 0);
    let inst = generate_instance_with(&spec, config.nt, config.nr, snr, config.snr_convention, &stream)?;
    let ctx = ProblemContext::new(&inst, &stream)?;

    let pairs = |v: &[num_complex::Complex64]| v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>();
    let row_major = |m: &nalgebra::DMatrix<f64>| m.transpose().as_slice().to_vec();
    let instance = InstanceDump {
        nt: inst.nt,
        nr: inst.nr,
        snr_db: snr,
        sigma2: inst.sigma2,
        checksum: inst.checksum(),
        h: pairs(inst.h.transpose().as_slice()),
        x_true: pairs(inst.x_true.as_slice()),
        y: pairs(inst.y.as_slice()),
        g: row_major(&inst.g),
        c: inst.c.as_slice().to_vec(),
        q: row_major(&inst.q),
    };

    let mut classical = Vec::new();
    let ml = ml_detect(&inst)?;
    let mut push = |name: &str, s: nalgebra::DVector<f64>| -> Result<()> {
        classical.push(ClassicalResult {
            detector: name.to_string(),
            energy: objective_f(&inst.g, &inst.c, &s)?,
            symbol_errors: ser_of(&s, &inst.x_true)?.0,
            s_hat: s.as_slice().to_vec(),
        });
        Ok(())
    };
    push("ML", ml.s_hat)?;
    push("ZF", zf_detect(&inst)?)?;
    push("MMSE", mmse_detect(&inst)?)?;
    push("BCD", bcd_detect(&ctx.relaxation, &spec))?;

    let mut variants = Vec::new();
    for v in Variant::ALL {
        let mut vcfg = config.variant_config(v);
        vcfg.record_histograms = true;
        let shots = stream.fork(label::DETECTOR_BASE + Detector::Qaoa(v).stream_id());
        variants.push(run_variant_in(&ctx, &inst, &vcfg, &shots)?);
    }

    Ok(SingleTrace {
        config: config.clone(),
        instance,
        hamiltonian: ctx.hamiltonian.to_string(),
        alpha: ctx.alpha,
        relaxation: RelaxationDump {
            rank: ctx.relaxation.r.ncols(),
            sweeps: ctx.relaxation.sweeps,
            converged: ctx.relaxation.converged,
            objective_trace: ctx.relaxation.objective_trace.clone(),
            warm_start: ctx.warm_start(config.qaoa.temperature)?,
        },
        classical,
        variants,
    })
}
