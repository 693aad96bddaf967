//! Channel instances and the real-valued reformulation shared by every detector.
//!
//! A complex system `y = Hx + n` is lifted to `z = M s + n_r` with
//! `s = [Re x; Im x]`, `z = [Re y; Im y]` and
//! `M = [[Re H, −Im H], [Im H, Re H]]`. The detection objective becomes
//! `f(s) = sᵀGs − 2cᵀs` with `G = MᵀM`, `c = Mᵀz`, which differs from
//! `‖z − Ms‖²` only by the constant `zᵀz`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::constellation::ConstellationSpec;
use crate::error::{Error, Result};
use crate::rng::{label, RngStream};

/// How a nominal SNR in dB is turned into a per-real-dimension noise variance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SnrConvention {
    /// `σ² = Nr·Es / (2·SNR)`; each real noise component has variance `σ²`,
    /// so each complex noise entry is `CN(0, 2σ²)`.
    Nominal,
    /// Noise power a factor of four (6.02 dB) below [`SnrConvention::Nominal`]
    /// at the same nominal SNR: per-real-dimension variance `Nr·Es / (8·SNR)`.
    /// Default for SER sweeps.
    #[default]
    Shifted6dB,
}

impl SnrConvention {
    fn power_scale(self) -> f64 {
        match self {
            SnrConvention::Nominal => 1.0,
            SnrConvention::Shifted6dB => 0.25,
        }
    }
}

/// Per-real-dimension noise variance for a given nominal SNR.
pub fn noise_variance(
    spec: &ConstellationSpec,
    nr: usize,
    snr_db: f64,
    convention: SnrConvention,
) -> Result<f64> {
    if !snr_db.is_finite() {
        return Err(Error::Parameter(format!("SNR {snr_db} dB is not finite")));
    }
    let snr_linear = 10f64.powf(snr_db / 10.0);
    if !(snr_linear > 0.0 && snr_linear.is_finite()) {
        return Err(Error::Parameter(format!(
            "SNR {snr_db} dB has no positive finite linear value"
        )));
    }
    Ok(convention.power_scale() * nr as f64 * spec.symbol_energy() / (2.0 * snr_linear))
}

/// One channel use: the complex system and its real lift.
#[derive(Debug, Clone)]
pub struct DetectionInstance {
    pub spec: ConstellationSpec,
    pub nt: usize,
    pub nr: usize,
    pub h: DMatrix<Complex64>,
    pub x_true: DVector<Complex64>,
    pub y: DVector<Complex64>,
    /// Per-real-dimension noise variance actually used.
    pub sigma2: f64,
    pub m_real: DMatrix<f64>,
    pub z: DVector<f64>,
    pub g: DMatrix<f64>,
    pub c: DVector<f64>,
    pub q: DMatrix<f64>,
}

/// `[[Re H, −Im H], [Im H, Re H]]`.
pub fn real_lift_matrix(h: &DMatrix<Complex64>) -> DMatrix<f64> {
    let (nr, nt) = h.shape();
    DMatrix::from_fn(2 * nr, 2 * nt, |i, j| {
        let e = h[(i % nr, j % nt)];
        match (i < nr, j < nt) {
            (true, true) | (false, false) => e.re,
            (true, false) => -e.im,
            (false, true) => e.im,
        }
    })
}

/// `[Re v; Im v]`.
pub fn real_lift_vector(v: &DVector<Complex64>) -> DVector<f64> {
    let n = v.len();
    DVector::from_fn(2 * n, |i, _| if i < n { v[i].re } else { v[i - n].im })
}

/// Inverse of [`real_lift_vector`].
pub fn complex_from_real(s: &DVector<f64>) -> DVector<Complex64> {
    let n = s.len() / 2;
    DVector::from_fn(n, |i, _| Complex64::new(s[i], s[i + n]))
}

impl DetectionInstance {
    /// Builds an instance from explicit complex quantities.
    pub fn from_parts(
        spec: ConstellationSpec,
        h: DMatrix<Complex64>,
        x_true: DVector<Complex64>,
        y: DVector<Complex64>,
        sigma2: f64,
    ) -> Result<Self> {
        let (nr, nt) = h.shape();
        if nt == 0 || nr < nt {
            return Err(Error::Parameter(format!(
                "need Nt >= 1 and Nr >= Nt, got Nt = {nt}, Nr = {nr}"
            )));
        }
        if x_true.len() != nt || y.len() != nr {
            return Err(Error::Dimension(format!(
                "x has {} entries and y has {}, expected {nt} and {nr}",
                x_true.len(),
                y.len()
            )));
        }
        if !(sigma2 >= 0.0 && sigma2.is_finite()) {
            return Err(Error::Parameter(format!("noise variance {sigma2} invalid")));
        }
        let m_real = real_lift_matrix(&h);
        let z = real_lift_vector(&y);
        let g = m_real.transpose() * &m_real;
        let c = m_real.transpose() * &z;
        let q = build_lifted_q(&g, &c)?;
        Ok(Self {
            spec,
            nt,
            nr,
            h,
            x_true,
            y,
            sigma2,
            m_real,
            z,
            g,
            c,
            q,
        })
    }

    /// Real lift of the transmitted symbols.
    pub fn s_true(&self) -> DVector<f64> {
        real_lift_vector(&self.x_true)
    }

    /// Number of real unknowns, 2·Nt.
    pub fn dim(&self) -> usize {
        2 * self.nt
    }

    /// FNV-1a fingerprint of the instance data, used to confirm
    /// that paired detectors saw the same channel use.
    pub fn checksum(&self) -> u64 {
        const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
        const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;
        let mut hash = FNV_OFFSET;
        let mut feed = |v: f64| {
            for byte in v.to_bits().to_le_bytes() {
                hash ^= u64::from(byte);
                hash = hash.wrapping_mul(FNV_PRIME);
            }
        };
        for e in self.h.iter().chain(self.x_true.iter()).chain(self.y.iter()) {
            feed(e.re);
            feed(e.im);
        }
        feed(self.sigma2);
        hash
    }
}

/// Draws one channel use with i.i.d. `CN(0,1)` channel entries, uniform
/// symbols and Gaussian noise at the nominal SNR, using the default
/// [`SnrConvention`].
pub fn generate_instance(
    spec: &ConstellationSpec,
    nt: usize,
    nr: usize,
    snr_db: f64,
    rng: &RngStream,
) -> Result<DetectionInstance> {
    generate_instance_with(spec, nt, nr, snr_db, SnrConvention::default(), rng)
}

pub fn generate_instance_with(
    spec: &ConstellationSpec,
    nt: usize,
    nr: usize,
    snr_db: f64,
    convention: SnrConvention,
    rng: &RngStream,
) -> Result<DetectionInstance> {
    if nt == 0 || nr < nt {
        return Err(Error::Parameter(format!(
            "need Nt >= 1 and Nr >= Nt, got Nt = {nt}, Nr = {nr}"
        )));
    }
    let sigma2 = noise_variance(spec, nr, snr_db, convention)?;
    let mut r = rng.fork(label::INSTANCE).rng();
    let half = std::f64::consts::FRAC_1_SQRT_2;

    let mut h_entries = Vec::with_capacity(nr * nt);
    for _ in 0..nr * nt {
        let re: f64 = r.sample(StandardNormal);
        let im: f64 = r.sample(StandardNormal);
        h_entries.push(Complex64::new(re * half, im * half));
    }
    // row-major draw order
    let h = DMatrix::from_row_slice(nr, nt, &h_entries);

    let pam = spec.pam_points();
    let x_true = DVector::from_fn(nt, |_, _| {
        let re = pam[r.random_range(0..pam.len())];
        let im = pam[r.random_range(0..pam.len())];
        Complex64::new(f64::from(re), f64::from(im))
    });

    let sd = sigma2.sqrt();
    let noise = DVector::from_fn(nr, |_, _| {
        let re: f64 = r.sample(StandardNormal);
        let im: f64 = r.sample(StandardNormal);
        Complex64::new(re * sd, im * sd)
    });
    let y = &h * &x_true + noise;

    DetectionInstance::from_parts(spec.clone(), h, x_true, y, sigma2)
}

/// `Q = [[G, −c], [−cᵀ, 0]]`, so that `[s;1]ᵀ Q [s;1] = sᵀGs − 2cᵀs`.
pub fn build_lifted_q(g: &DMatrix<f64>, c: &DVector<f64>) -> Result<DMatrix<f64>> {
    let n = g.nrows();
    if g.ncols() != n || c.len() != n {
        return Err(Error::Dimension(format!(
            "G is {}x{} and c has {} entries",
            g.nrows(),
            g.ncols(),
            c.len()
        )));
    }
    let mut q = DMatrix::zeros(n + 1, n + 1);
    q.view_mut((0, 0), (n, n)).copy_from(g);
    for i in 0..n {
        q[(i, n)] = -c[i];
        q[(n, i)] = -c[i];
    }
    Ok(q)
}

/// `sᵀGs − 2cᵀs`.
pub fn objective_f(g: &DMatrix<f64>, c: &DVector<f64>, s: &DVector<f64>) -> Result<f64> {
    let n = s.len();
    if g.nrows() != n || g.ncols() != n || c.len() != n {
        return Err(Error::Dimension(format!(
            "G is {}x{}, c has {}, s has {}",
            g.nrows(),
            g.ncols(),
            c.len(),
            n
        )));
    }
    Ok(objective_unchecked(g.as_slice(), c.as_slice(), s.as_slice()))
}

/// Column-major `g`, no dimension checks.
pub(crate) fn objective_unchecked(g: &[f64], c: &[f64], s: &[f64]) -> f64 {
    let n = s.len();
    let mut quad = 0.0;
    for j in 0..n {
        let col = &g[j * n..(j + 1) * n];
        let mut acc = 0.0;
        for i in 0..n {
            acc += col[i] * s[i];
        }
        quad += acc * s[j];
    }
    let lin: f64 = c.iter().zip(s).map(|(a, b)| a * b).sum();
    quad - 2.0 * lin
}
