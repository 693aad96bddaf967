//! Classical baselines: exhaustive ML, zero-forcing and linear MMSE.

use nalgebra::{DMatrix, DVector};

use crate::constellation::ConstellationSpec;
use crate::error::{Error, Result};
use crate::mimo::DetectionInstance;

/// Largest enumerable search space for [`ml_detect`], in bits.
pub const ML_MAX_BITS: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct MlSolution {
    pub s_hat: DVector<f64>,
    /// `f(s_hat) = sᵀGs − 2cᵀs`.
    pub energy: f64,
}

/// Exhaustive search over `PAM^{2Nt}`.
///
/// Candidates are visited in lexicographic order (first coordinate most
/// significant, levels ascending) and only a strictly smaller objective
/// replaces the incumbent, so ties resolve to the lexicographically smallest
/// candidate.
pub fn ml_detect(instance: &DetectionInstance) -> Result<MlSolution> {
    ml_search(&instance.g, &instance.c, &instance.spec)
}

/// [`ml_detect`] on a bare `(G, c)` pair.
pub fn ml_search(g: &DMatrix<f64>, c: &DVector<f64>, spec: &ConstellationSpec) -> Result<MlSolution> {
    let dim = c.len();
    if g.nrows() != dim || g.ncols() != dim {
        return Err(Error::Dimension(format!(
            "G is {}x{}, c has {dim} entries",
            g.nrows(),
            g.ncols()
        )));
    }
    let bits = dim * spec.bits_per_dim();
    if bits > ML_MAX_BITS {
        return Err(Error::SearchSpaceTooLarge {
            bits,
            limit: ML_MAX_BITS,
        });
    }
    if dim == 0 {
        return Ok(MlSolution {
            s_hat: DVector::zeros(0),
            energy: 0.0,
        });
    }
    let levels: Vec<f64> = spec.pam_points().iter().map(|&p| f64::from(p)).collect();
    let nl = levels.len();

    // Depth-first walk. partial[k] holds the objective restricted to the
    // first k coordinates; adding coordinate k with value v contributes
    // G_kk v² + 2v Σ_{i<k} G_ik s_i − 2 c_k v.
    let mut idx = vec![0usize; dim];
    let mut s = vec![levels[0]; dim];
    let mut partial = vec![0.0f64; dim + 1];
    let mut best = f64::INFINITY;
    let mut best_idx = idx.clone();

    let extend = |k: usize, s: &[f64], partial: &[f64]| -> f64 {
        let v = s[k];
        let mut cross = 0.0;
        for i in 0..k {
            cross += g[(i, k)] * s[i];
        }
        partial[k] + g[(k, k)] * v * v + 2.0 * v * cross - 2.0 * c[k] * v
    };

    for k in 0..dim {
        partial[k + 1] = extend(k, &s, &partial);
    }
    loop {
        let value = partial[dim];
        if value < best {
            best = value;
            best_idx.copy_from_slice(&idx);
        }
        // advance odometer from the last coordinate
        let mut k = dim;
        loop {
            if k == 0 {
                let s_hat = DVector::from_iterator(dim, best_idx.iter().map(|&i| levels[i]));
                return Ok(MlSolution {
                    s_hat,
                    energy: best,
                });
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < nl {
                break;
            }
            idx[k] = 0;
            s[k] = levels[0];
        }
        s[k] = levels[idx[k]];
        for j in k..dim {
            partial[j + 1] = extend(j, &s, &partial);
        }
    }
}

/// Unquantised least-squares estimate `(MᵀM)⁻¹Mᵀz`.
pub fn zf_estimate(instance: &DetectionInstance) -> Result<DVector<f64>> {
    let svd = instance.m_real.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > 1e-12 * smax) {
        return Err(Error::Singular(format!(
            "real channel matrix is rank deficient (singular values {smin:e} .. {smax:e})"
        )));
    }
    svd.solve(&instance.z, 0.0)
        .map_err(|e| Error::Numerical(e.to_string()))
}

pub fn zf_detect(instance: &DetectionInstance) -> Result<DVector<f64>> {
    Ok(quantize_to_pam(&zf_estimate(instance)?, &instance.spec))
}

/// Unquantised linear MMSE estimate `(G + σ²/(Es/2)·I)⁻¹ c`.
pub fn mmse_estimate(instance: &DetectionInstance) -> Result<DVector<f64>> {
    let dim = instance.dim();
    let reg = instance.sigma2 / (instance.spec.symbol_energy() / 2.0);
    let a = &instance.g + DMatrix::<f64>::identity(dim, dim) * reg;
    if let Some(chol) = a.clone().cholesky() {
        return Ok(chol.solve(&instance.c));
    }
    a.lu()
        .solve(&instance.c)
        .ok_or_else(|| Error::Singular("MMSE system matrix is singular".into()))
}

pub fn mmse_detect(instance: &DetectionInstance) -> Result<DVector<f64>> {
    Ok(quantize_to_pam(&mmse_estimate(instance)?, &instance.spec))
}

/// Coordinate-wise nearest PAM level; see [`ConstellationSpec::quantize`].
pub fn quantize_to_pam(v: &DVector<f64>, spec: &ConstellationSpec) -> DVector<f64> {
    v.map(|x| spec.quantize(x))
}
