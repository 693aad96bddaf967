//! Square M-QAM constellations and their per-dimension PAM alphabets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A square M-QAM constellation, described through its PAM alphabet
/// `{±1, ±3, …, ±(L−1)}` on each of the real and imaginary axes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstellationSpec {
    order: usize,
    levels: usize,
    bits_per_dim: usize,
    pam_points: Vec<i32>,
}

impl ConstellationSpec {
    /// `order` must be an even power of two (4, 16, 64, …).
    pub fn new(order: usize) -> Result<Self> {
        if order < 4 || !order.is_power_of_two() || !order.trailing_zeros().is_multiple_of(2) {
            return Err(Error::Parameter(format!(
                "constellation order {order} is not an even power of two >= 4"
            )));
        }
        let bits_per_dim = (order.trailing_zeros() / 2) as usize;
        if bits_per_dim > 15 {
            return Err(Error::Parameter(format!("constellation order {order} too large")));
        }
        let levels = 1usize << bits_per_dim;
        let pam_points = (0..levels).map(|i| 2 * i as i32 - (levels as i32 - 1)).collect();
        Ok(Self {
            order,
            levels,
            bits_per_dim,
            pam_points,
        })
    }

    pub fn qam16() -> Self {
        Self::new(16).expect("16 is a valid order")
    }

    /// M.
    pub fn order(&self) -> usize {
        self.order
    }

    /// L = √M.
    pub fn levels(&self) -> usize {
        self.levels
    }

    /// W = log2 L.
    pub fn bits_per_dim(&self) -> usize {
        self.bits_per_dim
    }

    /// Ascending PAM levels.
    pub fn pam_points(&self) -> &[i32] {
        &self.pam_points
    }

    /// Largest PAM magnitude, L − 1.
    pub fn max_level(&self) -> f64 {
        (self.levels - 1) as f64
    }

    /// Average complex-symbol energy, `2·mean(pam²)` = `2(L²−1)/3`.
    pub fn symbol_energy(&self) -> f64 {
        let mean_sq: f64 = self
            .pam_points
            .iter()
            .map(|&p| f64::from(p * p))
            .sum::<f64>()
            / self.levels as f64;
        2.0 * mean_sq
    }

    pub fn is_level(&self, v: f64) -> bool {
        self.pam_points.iter().any(|&p| f64::from(p) == v)
    }

    /// Maps a real value to its nearest PAM level.
    ///
    /// Exact midpoints (even integers) go to the level nearer zero; zero itself
    /// maps to `+1`. Values beyond the outer levels clip to `±(L−1)`.
    pub fn quantize(&self, v: f64) -> f64 {
        let max = self.max_level();
        if !v.is_finite() {
            return if v.is_nan() { 1.0 } else { v.signum() * max };
        }
        let mag = v.abs();
        let floor_even = 2.0 * (mag / 2.0).floor();
        let level = if mag == floor_even && mag > 0.0 {
            mag - 1.0
        } else {
            floor_even + 1.0
        };
        let level = level.min(max);
        if v < 0.0 {
            -level
        } else {
            level
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qam16_energy_is_ten() {
        let spec = ConstellationSpec::qam16();
        assert_eq!(spec.levels(), 4);
        assert_eq!(spec.bits_per_dim(), 2);
        assert_eq!(spec.pam_points(), &[-3, -1, 1, 3]);
        assert_eq!(spec.symbol_energy(), 10.0);
    }

    #[test]
    fn energies_of_other_orders() {
        assert_eq!(ConstellationSpec::new(4).unwrap().symbol_energy(), 2.0);
        assert_eq!(ConstellationSpec::new(64).unwrap().symbol_energy(), 42.0);
        assert_eq!(ConstellationSpec::new(256).unwrap().symbol_energy(), 170.0);
    }

    #[test]
    fn rejects_odd_powers_and_non_powers() {
        for m in [0, 1, 2, 8, 12, 32, 128] {
            assert!(ConstellationSpec::new(m).is_err(), "order {m}");
        }
    }

    #[test]
    fn quantizer_rules() {
        let spec = ConstellationSpec::qam16();
        assert_eq!(spec.quantize(2.0), 1.0);
        assert_eq!(spec.quantize(-2.0), -1.0);
        assert_eq!(spec.quantize(7.3), 3.0);
        assert_eq!(spec.quantize(-7.3), -3.0);
        assert_eq!(spec.quantize(-0.4), -1.0);
        assert_eq!(spec.quantize(0.0), 1.0);
        assert_eq!(spec.quantize(2.01), 3.0);
        assert_eq!(spec.quantize(1.99), 1.0);
        assert_eq!(spec.quantize(4.0), 3.0);
        assert_eq!(spec.quantize(f64::INFINITY), 3.0);
    }

    #[test]
    fn quantizer_matches_nearest_level_off_midpoints() {
        let spec = ConstellationSpec::new(64).unwrap();
        for i in -900..=900 {
            let v = i as f64 * 0.01 + 0.003;
            let brute = spec
                .pam_points()
                .iter()
                .map(|&p| f64::from(p))
                .min_by(|a, b| (a - v).abs().total_cmp(&(b - v).abs()))
                .unwrap();
            assert_eq!(spec.quantize(v), brute, "v = {v}");
        }
    }
}
