//! Multiplierless evaluation of plans and of entry-wise quantized matrices.
//!
//! Every scalar operation is a shift, a negation or an addition. Adding a
//! term into an empty accumulator is free, so the counts depend only on the
//! sparsity structure, never on the input values. Accumulation across
//! columns is charged per output row: a factor with `nnz` terms spread over
//! `r` nonempty rows costs `nnz − r` additions.

use rayon::prelude::*;

use crate::codebook::OpCount;
use crate::error::{dim, Result};
use crate::matrix::Matrix;
use crate::plan::{per_entry, CostReport, DecompositionPlan};
use crate::pot_arith::{binary_encode, csd_encode, CsdForm};
use crate::scalar::{Real, ShiftAdd};

/// `y = B(W₁(⋯(W_L x)))`, stages applied in decreasing order. The report's
/// executed counts are the ones tallied during this evaluation.
pub fn apply<S: ShiftAdd>(plan: &DecompositionPlan, x: &[S]) -> Result<(Vec<S>, CostReport)> {
    if x.len() != plan.cols() {
        return Err(dim(format!("input of length {} for a plan with K = {}", x.len(), plan.cols())));
    }
    let mut ops = OpCount::default();
    let mut v = x.to_vec();
    for w in plan.stages().iter().rev() {
        let (next, o) = w.apply(&v)?;
        ops += o;
        v = next;
    }
    let (y, o) = plan.codebook().apply(&v)?;
    ops += o;
    let mut report = plan.cost();
    report.executed_additions = Some(ops.additions);
    report.shifts = ops.shifts;
    report.sign_changes = ops.negations;
    Ok((y, report))
}

/// Each entry in `q`-bit sign-magnitude form: `q − 1` fractional bits,
/// truncated toward zero. Entries must lie in `[−1, 1]`.
pub fn binary_quantize<F: Real>(target: &Matrix<F>, q: u32) -> Result<Matrix<CsdForm>> {
    if q < 2 {
        return Err(crate::error::domain("fixed-point baseline needs at least 2 bits"));
    }
    let forms = target.as_col_major().par_iter().map(|&t| binary_encode(t, q - 1)).collect::<Result<Vec<_>>>()?;
    Matrix::from_col_major(target.rows(), target.cols(), forms)
}

/// Each entry in canonical signed digit form with at most `terms` digits.
pub fn csd_quantize<F: Real>(target: &Matrix<F>, terms: usize) -> Matrix<CsdForm> {
    let forms = target.as_col_major().par_iter().map(|&t| csd_encode(t, terms)).collect();
    Matrix::from_col_major(target.rows(), target.cols(), forms).expect("same shape")
}

/// Mean squared entry error of an entry-wise quantization.
pub fn quantization_mse<F: Real>(target: &Matrix<F>, forms: &Matrix<CsdForm>) -> Result<f64> {
    if target.shape() != forms.shape() {
        return Err(dim("quantized matrix shape differs from target"));
    }
    let n = target.as_col_major().len();
    if n == 0 {
        return Ok(0.0);
    }
    let sum: f64 = target
        .as_col_major()
        .par_iter()
        .zip(forms.as_col_major())
        .map(|(&t, f)| {
            let e = t.to_f64().unwrap_or(f64::NAN) - f.value::<f64>();
            e * e
        })
        .sum();
    Ok(sum / n as f64)
}

/// `y_n = Σ_k Σ_{(±, e) ∈ form(n,k)} ±x_k·2^e`, rows in parallel.
pub fn apply_forms<S: ShiftAdd + Send + Sync>(forms: &Matrix<CsdForm>, x: &[S]) -> Result<(Vec<S>, CostReport)> {
    let (n, k) = forms.shape();
    if x.len() != k {
        return Err(dim(format!("input of length {} for {k} columns", x.len())));
    }
    let rows: Vec<(S, OpCount)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut acc: Option<S> = None;
            let mut ops = OpCount::default();
            for (j, xj) in x.iter().enumerate() {
                for term in forms.get(i, j).terms() {
                    let v = term.apply(xj);
                    ops.shifts += 1;
                    ops.negations += u64::from(term.is_negative());
                    acc = Some(match acc.take() {
                        None => v,
                        Some(a) => {
                            ops.additions += 1;
                            a + v
                        }
                    });
                }
            }
            (acc.unwrap_or_else(S::zero), ops)
        })
        .collect();
    let mut ops = OpCount::default();
    let mut y = Vec::with_capacity(n);
    for (v, o) in rows {
        y.push(v);
        ops += o;
    }
    let report = CostReport {
        additions: ops.additions,
        executed_additions: Some(ops.additions),
        shifts: ops.shifts,
        sign_changes: ops.negations,
        adds_per_entry: per_entry(ops.additions, n, k),
        codebook_additions: None,
        stage_additions: Vec::new(),
        stage_sparsity: Vec::new(),
        analytic_only: false,
    };
    Ok((y, report))
}

/// Fixed-point reference: `q`-bit sign-magnitude entries, shift-add evaluation.
pub fn baseline_apply<F: Real, S: ShiftAdd + Send + Sync>(
    target: &Matrix<F>,
    q: u32,
    x: &[S],
) -> Result<(Vec<S>, CostReport)> {
    apply_forms(&binary_quantize(target, q)?, x)
}

/// Like [`baseline_apply`] with canonical signed digit entries of at most
/// `terms` digits.
pub fn csd_baseline_apply<F: Real, S: ShiftAdd + Send + Sync>(
    target: &Matrix<F>,
    terms: usize,
    x: &[S],
) -> Result<(Vec<S>, CostReport)> {
    apply_forms(&csd_quantize(target, terms), x)
}
