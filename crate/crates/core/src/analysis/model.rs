//! Angle, distance and total error of one greedy approximation step with an
//! IID Gaussian codebook, and the resulting distortion lower bound.
//!
//! For a target `t` and an independent codeword `b` in `ℝ^N`, the squared
//! cosine `ρ²` is Beta(1/2, (N−1)/2). The best of `K` codewords leaves the
//! squared angle error `a² = 1 − max_k ρ_k²`, so
//! `P(a² ≤ r) = 1 − I_{1−r}(1/2, (N−1)/2)^K`. Rounding the scale factor to a
//! power of two adds a distance error with mean `(1 − ā²)/27`, giving a total
//! `ε̄² = (1 + 26ā²)/27` per step. Treating `s + 1` steps as independent
//! bounds the remaining error from below by `ε̄^{2(s+1)}`.

use super::beta::reg_inc_beta_pair;
use super::quadrature::integrate;
use crate::error::{domain, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngleErrorModel {
    n: usize,
    k: u64,
}

impl AngleErrorModel {
    /// `n ≥ 2` rows and `k ≥ 1` codewords.
    pub fn new(n: usize, k: u64) -> Result<Self> {
        if n < 2 {
            return Err(domain(format!("angle error model needs N >= 2, got {n}")));
        }
        if k < 1 {
            return Err(domain("angle error model needs K >= 1"));
        }
        Ok(AngleErrorModel { n, k })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// `R = log2(K)/N`.
    pub fn rate(&self) -> f64 {
        (self.k as f64).log2() / self.n as f64
    }

    fn shape_b(&self) -> f64 {
        (self.n as f64 - 1.0) / 2.0
    }

    /// `P(ρ² ≤ r)`.
    pub fn rho2_cdf(&self, r: f64) -> f64 {
        let r = r.clamp(0.0, 1.0);
        reg_inc_beta_pair(0.5, self.shape_b(), r, 1.0 - r).0
    }

    /// `P(a² ≤ r) = 1 − I_{1−r}^K`, evaluated as `−expm1(K·ln I)`.
    pub fn angle_error_cdf(&self, r: f64) -> f64 {
        let r = r.clamp(0.0, 1.0);
        -(self.k as f64 * self.ln_i(1.0 - r, r)).exp_m1()
    }

    fn ln_i(&self, x: f64, y: f64) -> f64 {
        let (i, c) = reg_inc_beta_pair(0.5, self.shape_b(), x, y);
        if c < 0.5 { (-c).ln_1p() } else { i.ln() }
    }

    /// `ā² = ∫₀¹ I_r(1/2, (N−1)/2)^K dr`.
    pub fn mean_sq_angle_error(&self) -> f64 {
        let k = self.k as f64;
        integrate(|r| (k * self.ln_i(r, 1.0 - r)).exp(), 0.0, 1.0, 1e-14, 1e-10)
    }

    /// `ε̄² = (1 + 26ā²)/27`.
    pub fn total_error(&self) -> f64 {
        total_error_from(self.mean_sq_angle_error())
    }

    /// `(ε̄²)^{s+1}`.
    pub fn distortion_lower_bound(&self, s: u32) -> f64 {
        self.total_error().powi(s as i32 + 1)
    }
}

/// `(1 + 26ā²)/27`: angle error plus mean distance error `(1 − ā²)/27`.
pub fn total_error_from(mean_sq_angle: f64) -> f64 {
    (1.0 + 26.0 * mean_sq_angle) / 27.0
}

/// `I_r(1/2, (N−1)/2)`.
pub fn rho2_cdf(n: usize, r: f64) -> Result<f64> {
    Ok(AngleErrorModel::new(n, 1)?.rho2_cdf(r))
}

pub fn angle_error_cdf(n: usize, k: u64, r: f64) -> Result<f64> {
    Ok(AngleErrorModel::new(n, k)?.angle_error_cdf(r))
}

pub fn mean_sq_angle_error(n: usize, k: u64) -> Result<f64> {
    Ok(AngleErrorModel::new(n, k)?.mean_sq_angle_error())
}

pub fn total_error(n: usize, k: u64) -> Result<f64> {
    Ok(AngleErrorModel::new(n, k)?.total_error())
}

pub fn distortion_lower_bound(n: usize, k: u64, s: u32) -> Result<f64> {
    Ok(AngleErrorModel::new(n, k)?.distortion_lower_bound(s))
}

/// Large-`N` limit of the squared angle error at rate `R`: `4^{−R}`.
pub fn asymptotic_threshold(rate: f64) -> Result<f64> {
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(domain(format!("rate must be positive, got {rate}")));
    }
    Ok(0.25f64.powf(rate))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn rho2_closed_forms() {
        for i in 0..=20 {
            let r = f64::from(i) / 20.0;
            assert!(close(rho2_cdf(3, r).unwrap(), r.sqrt(), 1e-13));
        }
        assert_eq!(rho2_cdf(7, 1.0).unwrap(), 1.0);
        assert!(close(rho2_cdf(2, 0.5).unwrap(), 0.5, 1e-14));
        assert!(rho2_cdf(1, 0.5).is_err());
    }

    #[test]
    fn angle_cdf_closed_form() {
        for i in 0..=20 {
            let r = f64::from(i) / 20.0;
            assert!(close(angle_error_cdf(3, 1, r).unwrap(), 1.0 - (1.0 - r).sqrt(), 1e-13));
        }
        assert_eq!(angle_error_cdf(9, 1 << 20, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn cdf_steepens_at_half_rate() {
        // R = 1/2: N = 2·log2 K. Slope of the CDF across the asymptotic step
        // at 1/2 grows with K.
        let spread = |k: u64| {
            let n = 2 * k.ilog2() as usize;
            angle_error_cdf(n, k, 0.7).unwrap() - angle_error_cdf(n, k, 0.3).unwrap()
        };
        assert!(spread(4) < spread(256));
        assert!(spread(256) < spread(65_536));
        assert!(spread(65_536) > 0.9);
    }

    #[test]
    fn mean_sq_angle_closed_forms() {
        assert!(close(mean_sq_angle_error(3, 1).unwrap(), 2.0 / 3.0, 1e-10));
        assert!(close(mean_sq_angle_error(2, 1).unwrap(), 0.5, 1e-10));
        let a = mean_sq_angle_error(8, 256).unwrap();
        let b = mean_sq_angle_error(8, 4096).unwrap();
        assert!(b < a && a < 0.5);
    }

    #[test]
    fn total_error_formula() {
        assert_eq!(total_error_from(0.0), 1.0 / 27.0);
        assert_eq!(total_error_from(1.0), 1.0);
        assert!(close(total_error_from(0.25), 7.5 / 27.0, 1e-15));
        let e = total_error(8, 256).unwrap();
        assert!((1.0 / 27.0..=1.0).contains(&e));
        assert!(close(distortion_lower_bound(8, 256, 0).unwrap(), e, 1e-15));
        assert!(close(distortion_lower_bound(8, 256, 2).unwrap(), e.powi(3), 1e-15));
    }

    #[test]
    fn asymptote() {
        assert_eq!(asymptotic_threshold(1.0).unwrap(), 0.25);
        assert_eq!(asymptotic_threshold(0.5).unwrap(), 0.5);
        assert_eq!(asymptotic_threshold(2.0).unwrap(), 1.0 / 16.0);
        assert!(asymptotic_threshold(0.0).is_err());
    }
}
