//! Low-rank semidefinite relaxation solved by Burer–Monteiro block coordinate
//! descent.
//!
//! The relaxation `min Tr(QX)` over `X ⪰ 0`, `1 ≤ X_ii ≤ B²` (`i < N`),
//! `X_NN = 1` is parameterised as `X = RRᵀ` with `R ∈ ℝ^{N×K}`. Each sweep
//! visits rows in order and replaces row `i` by the minimiser of the
//! row-restricted objective `q_ii‖r‖² + 2rᵀΣ_{j≠i} q_ij r_j`, projected onto
//! the row's feasible set. The last row is the homogenising coordinate; its
//! inner products with the other rows form the warm-start vector.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::constellation::ConstellationSpec;
use crate::detectors::quantize_to_pam;
use crate::error::{Error, Result};
use crate::rng::RngStream;

const ZERO_DIAGONAL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BmBcdConfig {
    /// Columns of `R`. `None` picks `⌈√N⌉` (at least 2).
    pub rank: Option<usize>,
    pub max_sweeps: usize,
    pub tol_rel: f64,
    /// Upper bound on the row norms of rows `1..N−1`.
    pub upper_bound: f64,
}

impl BmBcdConfig {
    /// Defaults for a constellation: `B = L − 1`.
    pub fn for_spec(spec: &ConstellationSpec) -> Self {
        Self {
            rank: None,
            max_sweeps: 500,
            tol_rel: 1e-6,
            upper_bound: spec.max_level(),
        }
    }

    pub fn resolved_rank(&self, n: usize) -> usize {
        self.rank
            .unwrap_or_else(|| (n as f64).sqrt().ceil() as usize)
            .max(2)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(k) = self.rank {
            if k < 2 {
                return Err(Error::Parameter(format!("rank K = {k} must be at least 2")));
            }
        }
        if !(self.upper_bound >= 1.0) {
            return Err(Error::Parameter(format!(
                "upper bound B = {} must be at least 1",
                self.upper_bound
            )));
        }
        if self.max_sweeps == 0 {
            return Err(Error::Parameter("max_sweeps must be at least 1".into()));
        }
        if !(self.tol_rel > 0.0) {
            return Err(Error::Parameter(format!("tol_rel = {} must be positive", self.tol_rel)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct BmBcdResult {
    pub r: DMatrix<f64>,
    /// `Tr(QRRᵀ)` after initialisation.
    pub initial_objective: f64,
    /// `Tr(QRRᵀ)` after each sweep, tracked incrementally.
    pub objective_trace: Vec<f64>,
    /// `⟨row_i, row_N⟩` for `i < N`.
    pub warm_vector: DVector<f64>,
    pub converged: bool,
    pub sweeps: usize,
}

impl BmBcdResult {
    pub fn final_objective(&self) -> f64 {
        self.objective_trace
            .last()
            .copied()
            .unwrap_or(self.initial_objective)
    }
}

/// Dense `Tr(QRRᵀ)`.
pub fn trace_objective(q: &DMatrix<f64>, r: &DMatrix<f64>) -> f64 {
    let x = r * r.transpose();
    q.component_mul(&x).sum()
}

/// Projects a row onto `{1 ≤ ‖r‖ ≤ upper}`; a zero row maps to `e₁`.
fn project_annulus(row: &mut [f64], upper: f64) {
    let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        row.fill(0.0);
        row[0] = 1.0;
    } else if norm < 1.0 {
        row.iter_mut().for_each(|v| *v /= norm);
    } else if norm > upper {
        let s = upper / norm;
        row.iter_mut().for_each(|v| *v *= s);
    }
}

fn normalize_unit(row: &mut [f64]) {
    let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        row.fill(0.0);
        row[0] = 1.0;
    } else {
        row.iter_mut().for_each(|v| *v /= norm);
    }
}

/// Solves the relaxation for a lifted matrix `Q` (size `N = 2Nt + 1`).
pub fn bm_bcd_solve(q: &DMatrix<f64>, config: &BmBcdConfig, rng: &RngStream) -> Result<BmBcdResult> {
    config.validate()?;
    let n = q.nrows();
    if q.ncols() != n || n < 2 {
        return Err(Error::Dimension(format!("Q must be square with N >= 2, got {}x{}", q.nrows(), q.ncols())));
    }
    if q.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("Q contains non-finite entries".into()));
    }
    let asym = (q - q.transpose()).amax();
    if asym > 1e-9 * (1.0 + q.amax()) {
        return Err(Error::Parameter(format!("Q is not symmetric (max asymmetry {asym:e})")));
    }
    let k = config.resolved_rank(n);
    let upper = config.upper_bound;

    // Rows stored contiguously: rows[i*k..(i+1)*k].
    let mut gen = rng.rng();
    let mut rows: Vec<f64> = (0..n * k).map(|_| gen.sample::<f64, _>(StandardNormal)).collect();
    for i in 0..n {
        let row = &mut rows[i * k..(i + 1) * k];
        if i + 1 < n {
            project_annulus(row, upper);
        } else {
            normalize_unit(row);
        }
    }

    let as_matrix = |rows: &[f64]| DMatrix::from_row_slice(n, k, rows);
    let initial_objective = trace_objective(q, &as_matrix(&rows));
    let mut objective = initial_objective;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut grad = vec![0.0; k];
    let mut new_row = vec![0.0; k];

    for _ in 0..config.max_sweeps {
        let before = objective;
        for i in 0..n {
            grad.fill(0.0);
            for j in 0..n {
                if j == i {
                    continue;
                }
                let qij = q[(i, j)];
                if qij == 0.0 {
                    continue;
                }
                let rj = &rows[j * k..(j + 1) * k];
                for (g, v) in grad.iter_mut().zip(rj) {
                    *g += qij * v;
                }
            }
            let qii = q[(i, i)];
            let scale = if qii.abs() < ZERO_DIAGONAL { 1.0 } else { 1.0 / qii };
            for (nv, g) in new_row.iter_mut().zip(&grad) {
                *nv = -scale * g;
            }
            if i + 1 < n {
                project_annulus(&mut new_row, upper);
            } else {
                normalize_unit(&mut new_row);
            }
            let old = &rows[i * k..(i + 1) * k];
            let old_sq: f64 = old.iter().map(|v| v * v).sum();
            let new_sq: f64 = new_row.iter().map(|v| v * v).sum();
            let lin: f64 = new_row
                .iter()
                .zip(old)
                .zip(&grad)
                .map(|((a, b), g)| (a - b) * g)
                .sum();
            objective += qii * (new_sq - old_sq) + 2.0 * lin;
            rows[i * k..(i + 1) * k].copy_from_slice(&new_row);
        }
        if !objective.is_finite() || rows.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("BM-BCD iterate became non-finite".into()));
        }
        trace.push(objective);
        let decrease = before - objective;
        if decrease < config.tol_rel * before.abs().max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
    }

    let r = as_matrix(&rows);
    let last = r.row(n - 1).transpose();
    let warm_vector = DVector::from_fn(n - 1, |i, _| r.row(i).dot(&last.transpose()));
    Ok(BmBcdResult {
        sweeps: trace.len(),
        r,
        initial_objective,
        objective_trace: trace,
        warm_vector,
        converged,
    })
}

/// Classical detector: the warm vector quantised to the PAM alphabet.
pub fn bcd_detect(result: &BmBcdResult, spec: &ConstellationSpec) -> DVector<f64> {
    quantize_to_pam(&result.warm_vector, spec)
}
