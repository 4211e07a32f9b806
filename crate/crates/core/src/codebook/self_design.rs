use std::borrow::Cow;

use crate::codebook::{gaussian_build, Codebook};
use crate::error::{domain, Result};
use crate::matrix::Matrix;
use crate::scalar::Real;
use crate::wiring::fit_stage;

/// Builds `B = [I 0]·B₁·B₂` with `B₁ = fit(aux, [I 0])` and
/// `B₂ = fit(aux, [I 0]·B₁)`, each stage allowing `1 + stage_sparsity` terms
/// per column.
pub fn self_design_build<F: Real>(aux: &Matrix<F>, stage_sparsity: usize) -> Result<Codebook> {
    let (n, k) = aux.shape();
    if n == 0 || k < n {
        return Err(domain(format!("self-designing codebook needs K >= N >= 1, got {n}x{k}")));
    }
    let b0: Matrix<F> = Matrix::from_fn(n, k, |i, j| if i == j { F::one() } else { F::zero() });
    let b1 = fit_stage(aux, &b0, stage_sparsity)?;
    let b01 = b1.left_mul(&b0)?;
    let b2 = fit_stage(aux, &b01, stage_sparsity)?;
    Codebook::self_designing(n, b1, b2)
}

/// Rough Gaussianity screen: entries centred relative to their spread
/// (`|mean| ≤ std/4`).
pub fn is_gaussian_like<F: Real>(target: &Matrix<F>) -> bool {
    let v = target.as_col_major();
    if v.len() < 2 {
        return false;
    }
    let n = F::lit(v.len() as f64);
    let mean = v.iter().copied().sum::<F>() / n;
    let var = v.iter().map(|&x| (x - mean) * (x - mean)).sum::<F>() / n;
    var > F::zero() && mean.abs() <= F::lit(0.25) * var.sqrt()
}

/// Auxiliary target for self-design: the target itself when it looks
/// Gaussian, otherwise a seeded Gaussian matrix of the same shape.
pub fn auxiliary_target<F: Real>(target: &Matrix<F>, seed: u64) -> Cow<'_, Matrix<F>> {
    if is_gaussian_like(target) {
        Cow::Borrowed(target)
    } else {
        Cow::Owned(gaussian_build(target.rows(), target.cols(), seed))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::Pow2Matrix;

    #[test]
    fn unit_columns_reproduced() {
        let n = 3;
        let aux = Matrix::from_fn(n, 8, |i, j| if j < n { if i == j { 1.0 } else { 0.0 } } else { (i * 7 + j) as f64 * 0.1 - 1.0 });
        let Codebook::SelfDesigning { b1, .. } = self_design_build(&aux, 1).unwrap() else { unreachable!() };
        for j in 0..n {
            assert_eq!(b1.column(j), Pow2Matrix::identity(8).column(j));
        }
    }

    #[test]
    fn gaussian_codebook_costs_at_most_2k() {
        let aux: Matrix<f64> = gaussian_build(8, 256, 3);
        let b = self_design_build(&aux, 1).unwrap();
        assert!(b.nominal_additions().unwrap() <= 512);
        let x: Vec<f64> = (0..256).map(|i| (i % 5) as f64 - 2.0).collect();
        let (y, ops) = b.apply(&x).unwrap();
        let reference = b.dense::<f64>().mul_vec(&x).unwrap();
        for (a, r) in y.iter().zip(&reference) {
            assert!((a - r).abs() <= 1e-9 * (1.0 + r.abs()));
        }
        assert_eq!(Some(ops), b.structural_ops());
    }

    #[test]
    fn aux_selection() {
        let g: Matrix<f64> = gaussian_build(4, 64, 1);
        assert!(is_gaussian_like(&g));
        let u = Matrix::from_fn(4, 64, |i, j| ((i * 64 + j) as f64 + 0.5) / 256.0);
        assert!(!is_gaussian_like(&u));
        assert!(matches!(auxiliary_target(&u, 5), Cow::Owned(_)));
        assert!(self_design_build(&Matrix::<f64>::zeros(4, 2), 1).is_err());
    }
}
