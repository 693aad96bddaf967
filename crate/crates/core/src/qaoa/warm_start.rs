//! Soft bits from a relaxed symbol estimate.
//!
//! For component `k` with relaxed value `r`, the sign bit is
//! `x_1 = σ(r/T)`. The folded residual `d_1 = −r`,
//! `d_i = |d_{i−1}| − 2^{W−i+1}` tracks the distance to the Gray sub-level
//! boundaries: the second bit is one when `d_2 < 0` and every later bit is one
//! when `d_i > 0`, giving `x_2 = σ(−d_2/T)` and `x_i = σ(d_i/T)` for `i ≥ 3`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CLIP_LOW: f64 = 0.01;
pub const CLIP_HIGH: f64 = 0.99;

fn sigmoid(v: f64) -> f64 {
    1.0 / (1.0 + (-v).exp())
}

/// Clipped per-qubit probabilities, symbol-major and bit-minor.
pub fn soft_bits(r_star: &[f64], temperature: f64, w: usize) -> Result<Vec<f64>> {
    if !(temperature > 0.0) || !temperature.is_finite() {
        return Err(Error::Parameter(format!("temperature {temperature} must be positive")));
    }
    if w == 0 || w > 15 {
        return Err(Error::Parameter(format!("bits per dimension W = {w} outside 1..=15")));
    }
    let mut x = Vec::with_capacity(r_star.len() * w);
    for &r in r_star {
        if !r.is_finite() {
            return Err(Error::Numerical(format!("relaxed value {r} is not finite")));
        }
        x.push(sigmoid(r / temperature));
        let mut d = -r;
        for i in 2..=w {
            d = d.abs() - f64::from(1u32 << (w - i + 1));
            x.push(if i == 2 { sigmoid(-d / temperature) } else { sigmoid(d / temperature) });
        }
    }
    Ok(x.into_iter().map(|v| v.clamp(CLIP_LOW, CLIP_HIGH)).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WarmStart {
    pub r_star: Vec<f64>,
    pub temperature: f64,
    pub x: Vec<f64>,
    /// `2·asin(√x)`.
    pub theta: Vec<f64>,
}

impl WarmStart {
    pub fn new(r_star: &[f64], temperature: f64, w: usize) -> Result<Self> {
        let x = soft_bits(r_star, temperature, w)?;
        let theta = x.iter().map(|v| 2.0 * v.sqrt().asin()).collect();
        Ok(Self { r_star: r_star.to_vec(), temperature, x, theta })
    }

    /// Bitstring (qubit 0 = LSB) obtained by thresholding `x` at ½.
    pub fn hard_decision(&self) -> u64 {
        self.x
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 0.5)
            .fold(0u64, |acc, (q, _)| acc | (1u64 << q))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hubo::gray_unmap_pam_to_bits;

    #[test]
    fn sixteen_qam_examples() {
        let x = soft_bits(&[3.0], 0.2, 2).unwrap();
        assert_eq!(x, vec![0.99, 0.01]);
        // σ(5) ≈ 0.9933 on both bits, above the clip
        let x = soft_bits(&[1.0], 0.2, 2).unwrap();
        assert_eq!(x, vec![0.99, 0.99]);
        let x = soft_bits(&[1.0], 1.0, 2).unwrap();
        let s1 = 1.0 / (1.0 + (-1.0f64).exp());
        assert!((x[0] - s1).abs() < 1e-12 && (x[1] - s1).abs() < 1e-12);
    }

    #[test]
    fn second_bit_unfolds_once() {
        for &r in &[-2.7, -0.3, 0.9, 1.8, 2.2] {
            let x = soft_bits(&[r], 0.5, 2).unwrap();
            let expected = (1.0 / (1.0 + ((r.abs() - 2.0) / 0.5).exp())).clamp(CLIP_LOW, CLIP_HIGH);
            assert!((x[1] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn hard_decision_recovers_gray_bits() {
        for w in 1..=4 {
            let max = (1i32 << w) - 1;
            for level in (-max..=max).step_by(2) {
                let x = soft_bits(&[f64::from(level)], 0.2, w).unwrap();
                let bits: Vec<u8> = x.iter().map(|&v| u8::from(v > 0.5)).collect();
                assert_eq!(bits, gray_unmap_pam_to_bits(level, w).unwrap(), "W = {w}, level {level}");
            }
        }
    }

    #[test]
    fn clipped_and_angles() {
        let ws = WarmStart::new(&[5.0, -0.2, 0.0, -9.0], 0.2, 2).unwrap();
        assert!(ws.x.iter().all(|&v| (CLIP_LOW..=CLIP_HIGH).contains(&v)));
        for (t, x) in ws.theta.iter().zip(&ws.x) {
            assert!(((t / 2.0).sin().powi(2) - x).abs() < 1e-12);
        }
        assert!(soft_bits(&[1.0], 0.0, 2).is_err());
        assert!(soft_bits(&[f64::NAN], 0.2, 2).is_err());
    }
}
