//! Monte-Carlo symbol-error-rate sweeps.

use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bmbcd::bcd_detect;
use crate::detectors::{ml_detect, mmse_detect, zf_detect};
use crate::error::{Error, Result};
use crate::mimo::{generate_instance_with, DetectionInstance};
use crate::qaoa::{run_variant_in, ser_of, ProblemContext, VariantConfig};
use crate::rng::{label, RngStream};

use super::config::{Detector, ExperimentConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaCount {
    pub delta: f64,
    pub count: u64,
}

/// One `(detector, SNR)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SerCell {
    pub detector: String,
    pub snr_db: f64,
    pub trials: u64,
    pub errors: u64,
    pub symbols: u64,
    pub ser: f64,
    /// Half-width of the normal-approximation 95% binomial interval.
    pub ci95: f64,
    /// Time spent inside this detector, summed over worker threads.
    pub wall_time_s: f64,
    /// How often each slope won, for ramp variants.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub delta_selection: Vec<DeltaCount>,
}

impl SerCell {
    pub fn delta_fraction(&self, delta: f64) -> Option<f64> {
        let total: u64 = self.delta_selection.iter().map(|d| d.count).sum();
        self.delta_selection
            .iter()
            .find(|d| d.delta == delta)
            .filter(|_| total > 0)
            .map(|d| d.count as f64 / total as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SerReport {
    pub config: ExperimentConfig,
    pub cells: Vec<SerCell>,
    /// Set when the run was interrupted; cells then hold completed trials only.
    pub truncated: bool,
    /// Per SNR: wrapping sum of the instance fingerprints of completed trials.
    pub instance_digests: Vec<u64>,
}

impl SerReport {
    pub fn cell(&self, detector: Detector, snr_db: f64) -> Option<&SerCell> {
        self.cells
            .iter()
            .find(|c| c.detector == detector.name() && c.snr_db == snr_db)
    }
}

/// `1.96·√(p(1−p)/n)`.
pub fn ci95_half_width(errors: u64, symbols: u64) -> f64 {
    if symbols == 0 {
        return 0.0;
    }
    let p = errors as f64 / symbols as f64;
    1.96 * (p * (1.0 - p) / symbols as f64).sqrt()
}

#[derive(Debug, Clone, Default)]
struct Tally {
    errors: u64,
    symbols: u64,
    seconds: f64,
    deltas: Vec<u64>,
}

#[derive(Debug)]
struct TrialOutcome {
    checksum: u64,
    per_detector: Vec<(usize, usize, f64, Option<usize>)>,
}

/// Trial `t` at SNR index `i` owns stream `(seed, i·2³² + t)`.
pub fn trial_stream(seed: u64, snr_index: usize, trial: u64) -> RngStream {
    RngStream::new(seed, ((snr_index as u64) << 32) | trial)
}

fn run_trial(
    cfg: &ExperimentConfig,
    spec: &crate::constellation::ConstellationSpec,
    variant_cfgs: &[Option<VariantConfig>],
    snr_index: usize,
    snr_db: f64,
    trial: u64,
) -> Result<TrialOutcome> {
    let stream = trial_stream(cfg.seed, snr_index, trial);
    let inst = generate_instance_with(spec, cfg.nt, cfg.nr, snr_db, cfg.snr_convention, &stream)?;
    let checksum = inst.checksum();
    let needs_ctx = cfg
        .detectors
        .iter()
        .any(|d| matches!(d, Detector::Bcd | Detector::Qaoa(_)));
    let ctx = if needs_ctx { Some(ProblemContext::new(&inst, &stream)?) } else { None };

    let mut per_detector = Vec::with_capacity(cfg.detectors.len());
    for (d, vcfg) in cfg.detectors.iter().zip(variant_cfgs) {
        let start = Instant::now();
        let (errors, symbols, delta) = run_detector(*d, &inst, ctx.as_ref(), vcfg.as_ref(), &stream)?;
        per_detector.push((errors, symbols, start.elapsed().as_secs_f64(), delta));
    }
    if inst.checksum() != checksum {
        return Err(Error::Numerical("instance changed while detectors ran".into()));
    }
    Ok(TrialOutcome { checksum, per_detector })
}

fn run_detector(
    detector: Detector,
    inst: &DetectionInstance,
    ctx: Option<&ProblemContext>,
    vcfg: Option<&VariantConfig>,
    stream: &RngStream,
) -> Result<(usize, usize, Option<usize>)> {
    let s_hat = match detector {
        Detector::Ml => ml_detect(inst)?.s_hat,
        Detector::Zf => zf_detect(inst)?,
        Detector::Mmse => mmse_detect(inst)?,
        Detector::Bcd => bcd_detect(&ctx.expect("context built").relaxation, &inst.spec),
        Detector::Qaoa(_) => {
            let ctx = ctx.expect("context built");
            let vcfg = vcfg.expect("variant config built");
            let shots = stream.fork(label::DETECTOR_BASE + detector.stream_id());
            let rec = run_variant_in(ctx, inst, vcfg, &shots)?;
            let delta = rec.delta.map(|_| rec.selected);
            return Ok((rec.symbol_errors, rec.symbols, delta));
        }
    };
    let (e, n) = ser_of(&s_hat, &inst.x_true)?;
    Ok((e, n, None))
}

/// Runs every detector on the same instance for each trial and SNR.
///
/// Trials are independent and seeded by [`trial_stream`], and tallies are
/// integer sums, so counts do not depend on the number of threads. When
/// `cancel` becomes true the run stops after the current chunk and the
/// report is marked truncated.
pub fn run_ser_experiment(config: &ExperimentConfig, cancel: Option<&AtomicBool>) -> Result<SerReport> {
    config.validate()?;
    let spec = config.spec()?;
    let variant_cfgs: Vec<Option<VariantConfig>> = config
        .detectors
        .iter()
        .map(|d| match d {
            Detector::Qaoa(v) => Some(config.variant_config(*v)),
            _ => None,
        })
        .collect();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = config.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;

    let n_det = config.detectors.len();
    let mut cells = Vec::new();
    let mut digests = Vec::new();
    let mut truncated = false;

    for (si, &snr) in config.snr_db.iter().enumerate() {
        let mut tallies = vec![Tally::default(); n_det];
        for (t, vcfg) in tallies.iter_mut().zip(&variant_cfgs) {
            if let Some(v) = vcfg {
                t.deltas = vec![0; v.deltas.len()];
            }
        }
        let mut trials_done = 0u64;
        let mut digest = 0u64;
        let total = config.trials as u64;
        while trials_done < total {
            if cancel.is_some_and(|c| c.load(Ordering::Relaxed)) {
                truncated = true;
                break;
            }
            let end = (trials_done + config.chunk_size as u64).min(total);
            let outcomes: Vec<TrialOutcome> = pool.install(|| {
                (trials_done..end)
                    .into_par_iter()
                    .map(|t| run_trial(config, &spec, &variant_cfgs, si, snr, t))
                    .collect::<Result<Vec<_>>>()
            })?;
            for o in outcomes {
                digest = digest.wrapping_add(o.checksum);
                for (tally, (e, n, secs, delta)) in tallies.iter_mut().zip(o.per_detector) {
                    tally.errors += e as u64;
                    tally.symbols += n as u64;
                    tally.seconds += secs;
                    if let Some(i) = delta {
                        tally.deltas[i] += 1;
                    }
                }
            }
            trials_done = end;
        }
        for ((d, tally), vcfg) in config.detectors.iter().zip(&tallies).zip(&variant_cfgs) {
            let delta_selection = match vcfg {
                Some(v) if !tally.deltas.iter().all(|&c| c == 0) => v
                    .deltas
                    .iter()
                    .zip(&tally.deltas)
                    .map(|(&delta, &count)| DeltaCount { delta, count })
                    .collect(),
                _ => Vec::new(),
            };
            cells.push(SerCell {
                detector: d.name().to_string(),
                snr_db: snr,
                trials: trials_done,
                errors: tally.errors,
                symbols: tally.symbols,
                ser: if tally.symbols == 0 { 0.0 } else { tally.errors as f64 / tally.symbols as f64 },
                ci95: ci95_half_width(tally.errors, tally.symbols),
                wall_time_s: tally.seconds,
                delta_selection,
            });
        }
        digests.push(digest);
        if truncated {
            break;
        }
    }
    Ok(SerReport { config: config.clone(), cells, truncated, instance_digests: digests })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qaoa::Variant;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            snr_db: vec![2.0, 12.0],
            trials: 40,
            chunk_size: 7,
            detectors: vec![Detector::Ml, Detector::Zf, Detector::Mmse, Detector::Bcd, Detector::Qaoa(Variant::WslrW)],
            qaoa: super::super::config::QaoaSettings { shots: 64, ..Default::default() },
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn report_shape() {
        let r = run_ser_experiment(&small(), None).unwrap();
        assert_eq!(r.cells.len(), 10);
        assert!(!r.truncated);
        for c in &r.cells {
            assert_eq!(c.trials, 40);
            assert_eq!(c.symbols, 80);
            assert!(c.errors <= c.symbols && (0.0..=1.0).contains(&c.ser));
        }
        let w = r.cell(Detector::Qaoa(Variant::WslrW), 2.0).unwrap();
        assert_eq!(w.delta_selection.iter().map(|d| d.count).sum::<u64>(), 40);
    }

    #[test]
    fn thread_count_does_not_change_counts() {
        let one = run_ser_experiment(&ExperimentConfig { threads: Some(1), ..small() }, None).unwrap();
        let many = run_ser_experiment(&ExperimentConfig { threads: Some(3), chunk_size: 40, ..small() }, None).unwrap();
        let strip = |r: &SerReport| r.cells.iter().map(|c| (c.errors, c.delta_selection.clone())).collect::<Vec<_>>();
        assert_eq!(strip(&one), strip(&many));
        assert_eq!(one.instance_digests, many.instance_digests);
    }

    #[test]
    fn detector_subset_does_not_change_counts() {
        let all = run_ser_experiment(&small(), None).unwrap();
        let only = run_ser_experiment(
            &ExperimentConfig { detectors: vec![Detector::Qaoa(Variant::WslrW)], ..small() },
            None,
        )
        .unwrap();
        let d = Detector::Qaoa(Variant::WslrW);
        assert_eq!(all.cell(d, 12.0).unwrap().errors, only.cell(d, 12.0).unwrap().errors);
    }

    #[test]
    fn cancellation_truncates() {
        let flag = AtomicBool::new(true);
        let r = run_ser_experiment(&small(), Some(&flag)).unwrap();
        assert!(r.truncated);
        assert!(r.cells.iter().all(|c| c.trials == 0));
    }

    #[test]
    fn ci_half_width() {
        assert_eq!(ci95_half_width(0, 100), 0.0);
        assert!((ci95_half_width(50, 100) - 1.96 * 0.05).abs() < 1e-15);
    }
}
