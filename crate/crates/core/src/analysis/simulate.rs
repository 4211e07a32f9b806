//! Monte-Carlo counterparts of the error model.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use super::model::AngleErrorModel;
use crate::codebook::{self_design_build, Codebook, CodebookKind};
use crate::codebook::gaussian_build;
use crate::error::{domain, Result};
use crate::matrix::Matrix;
use crate::rng;
use crate::wiring::StageRunner;

/// Sorted samples of `a² = 1 − max_k ρ_k²` for a Gaussian target against
/// `k` Gaussian codewords in `ℝ^n`. Trial `i` draws from stream `i` of `seed`.
pub fn simulate_angle_error(n: usize, k: usize, trials: usize, seed: u64) -> Result<Vec<f64>> {
    if n < 1 || k < 1 || trials < 1 {
        return Err(domain("angle error simulation needs N, K and trials >= 1"));
    }
    let mut samples: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(seed, i);
            let mut draw = || -> f64 { StandardNormal.sample(&mut r) };
            let t: Vec<f64> = (0..n).map(|_| draw()).collect();
            let tt: f64 = t.iter().map(|v| v * v).sum();
            let mut best: f64 = 0.0;
            let mut b = vec![0.0; n];
            for _ in 0..k {
                b.iter_mut().for_each(|v| *v = draw());
                let bb: f64 = b.iter().map(|v| v * v).sum();
                let tb: f64 = t.iter().zip(&b).map(|(x, y)| x * y).sum();
                best = best.max(tb * tb / (tt * bb));
            }
            1.0 - best
        })
        .collect();
    samples.sort_by(f64::total_cmp);
    Ok(samples)
}

/// Kolmogorov–Smirnov distance between sorted samples and a CDF.
pub fn ks_distance(sorted: &[f64], cdf: impl Fn(f64) -> f64 + Sync) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .par_iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .reduce(|| 0.0, f64::max)
}

/// 95% Dvoretzky–Kiefer–Wolfowitz band half-width, `√(ln(2/0.05)/(2n))`.
pub fn dkw_band(samples: usize) -> f64 {
    ((2.0f64 / 0.05).ln() / (2.0 * samples as f64)).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurvePoint {
    /// Number of `s_ℓ = 1` stages, i.e. wiring additions per column.
    pub s: u32,
    pub lower_bound: f64,
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecompositionCurve {
    pub n: usize,
    pub k: usize,
    pub codebook: String,
    pub samples: usize,
    pub points: Vec<CurvePoint>,
}

fn codebook_for(kind: CodebookKind, target: &Matrix<f64>, seed: u64) -> Result<Codebook> {
    let (n, k) = target.shape();
    match kind {
        CodebookKind::Gaussian => Ok(Codebook::gaussian(n, k, seed)),
        CodebookKind::SelfDesigning => self_design_build(target, 1),
        CodebookKind::TwoSparse => Codebook::two_sparse(n, k),
        CodebookKind::Mailman => {
            if n >= usize::BITS as usize || k != 1 << n {
                return Err(domain(format!("mailman codebook needs K = 2^N, got {n}x{k}")));
            }
            Codebook::mailman(n)
        }
    }
}

/// Mean relative squared column error after each of `stages` stages with
/// `s_ℓ = 1`, over `samples` Gaussian targets. Point `s = 0` is the zero
/// approximation. Sample `i` uses seeds `derive_seed(seed, 2i)` for the target
/// and `derive_seed(seed, 2i + 1)` for a random codebook.
pub fn simulate_decomposition(
    n: usize,
    k: usize,
    stages: u32,
    kind: CodebookKind,
    seed: u64,
    samples: usize,
) -> Result<DecompositionCurve> {
    if samples < 1 {
        return Err(domain("need at least one matrix sample"));
    }
    let model = AngleErrorModel::new(n, k as u64)?;
    let eps = model.total_error();
    let mut per_stage = vec![Vec::with_capacity(samples); stages as usize];
    for i in 0..samples as u64 {
        let target: Matrix<f64> = gaussian_build(n, k, rng::derive_seed(seed, 2 * i));
        let codebook = codebook_for(kind, &target, rng::derive_seed(seed, 2 * i + 1))?;
        let mut runner = StageRunner::new(&target, codebook.dense())?;
        for slot in per_stage.iter_mut() {
            runner.push_stage(1)?;
            let errs = runner.column_relative_errors();
            slot.push(errs.iter().sum::<f64>() / errs.len() as f64);
        }
    }
    let mut points = vec![CurvePoint { s: 0, lower_bound: eps, mean: 1.0, stderr: 0.0 }];
    for (l, vals) in per_stage.iter().enumerate() {
        let (mean, stderr) = mean_stderr(vals);
        points.push(CurvePoint { s: l as u32 + 1, lower_bound: eps.powi(l as i32 + 2), mean, stderr });
    }
    Ok(DecompositionCurve { n, k, codebook: kind.name().into(), samples, points })
}

/// Sample mean and its standard error.
pub fn mean_stderr(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::model::angle_error_cdf;

    #[test]
    fn single_codeword_matches_closed_form() {
        let s = simulate_angle_error(3, 1, 20_000, 1).unwrap();
        let d = ks_distance(&s, |r| 1.0 - (1.0 - r).sqrt());
        assert!(d < dkw_band(s.len()), "{d}");
    }

    #[test]
    fn simulation_matches_model() {
        let s = simulate_angle_error(6, 16, 20_000, 2).unwrap();
        assert!(ks_distance(&s, |r| angle_error_cdf(6, 16, r).unwrap()) < dkw_band(s.len()));
        assert_eq!(s, simulate_angle_error(6, 16, 20_000, 2).unwrap());
    }

    #[test]
    fn concentrates_with_growing_k() {
        // R = 1: N = log2 K; mass gathers around 4^{-1}.
        let near = |n: usize| {
            let s = simulate_angle_error(n, 1 << n, 2000, 3).unwrap();
            s.iter().filter(|&&x| (x - 0.25).abs() < 0.15).count()
        };
        assert!(near(4) < near(10));
    }

    #[test]
    fn decomposition_curve_shape() {
        let c = simulate_decomposition(4, 16, 5, CodebookKind::Gaussian, 9, 4).unwrap();
        assert_eq!(c.points.len(), 6);
        assert_eq!(c.points[0].mean, 1.0);
        assert!(c.points.windows(2).all(|w| w[1].mean <= w[0].mean));
        assert!(c.points.iter().skip(1).all(|p| p.mean >= 0.95 * p.lower_bound));
        assert!(simulate_decomposition(3, 9, 1, CodebookKind::Mailman, 0, 1).is_err());
        assert!(simulate_decomposition(3, 8, 1, CodebookKind::Mailman, 0, 1).is_ok());
    }
}
