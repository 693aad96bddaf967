use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    Flat,
    LinearRamp,
}

/// Per-layer cost angles `γ_k` and mixer angles `β_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
    pub kind: ScheduleKind,
}

impl Schedule {
    pub fn p(&self) -> usize {
        self.gammas.len()
    }
}

fn check(p: usize, values: &[f64]) -> Result<()> {
    if p == 0 {
        return Err(Error::Parameter("p must be at least 1".into()));
    }
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::Parameter(format!("schedule parameter {v} is not finite")));
    }
    Ok(())
}

/// `γ_k = (k/p)·γ_max`, `β_k = (1 − (k−1)/p)·β_max` for `k = 1…p`.
pub fn ramp_schedule(p: usize, gamma_max: f64, beta_max: f64) -> Result<Schedule> {
    check(p, &[gamma_max, beta_max])?;
    let pf = p as f64;
    Ok(Schedule {
        gammas: (1..=p).map(|k| k as f64 / pf * gamma_max).collect(),
        betas: (1..=p).map(|k| (1.0 - (k - 1) as f64 / pf) * beta_max).collect(),
        kind: ScheduleKind::LinearRamp,
    })
}

/// [`ramp_schedule`] with a single slope `Δ > 0` for both angles.
pub fn linear_ramp(p: usize, delta: f64) -> Result<Schedule> {
    if !(delta > 0.0) {
        return Err(Error::Parameter(format!("ramp slope {delta} must be positive")));
    }
    ramp_schedule(p, delta, delta)
}

/// Constant angles in every layer.
pub fn flat_schedule(p: usize, gamma: f64, beta: f64) -> Result<Schedule> {
    check(p, &[gamma, beta])?;
    Ok(Schedule {
        gammas: vec![gamma; p],
        betas: vec![beta; p],
        kind: ScheduleKind::Flat,
    })
}
