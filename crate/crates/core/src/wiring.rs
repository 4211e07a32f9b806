//! Greedy power-of-two sparse recovery and the multi-stage decomposition
//! driver.
//!
//! Each target column `t` is approximated as `B·ω` where `ω` holds at most
//! `1 + s` coefficients from `{0, ±2^e}`. Starting from `ω = 0`, every step
//! evaluates, for each codebook column `j`, the best value `v_j` for
//! component `j` alone (the least-squares coefficient against the residual
//! with component `j` removed, rounded to the nearest signed power of two)
//! and applies the single change that lowers `‖t − Bω‖²` the most. Ties go to
//! the smallest column index. A step that cannot strictly lower the residual
//! ends the column early.
//!
//! Stages chain: stage `ℓ` treats `B·W₁⋯W_{ℓ−1}` as its codebook, and the
//! materialized product is updated once per stage.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codebook::{Codebook, Pow2Matrix};
use crate::error::{dim, domain, Error, Result};
use crate::matrix::{dot, norm_sq, Matrix};
use crate::plan::{threshold, DecompositionPlan, PlanMeta};
use crate::pot_arith::{quantize_pow2_in, Pow2Range, SignedPow2};
use crate::scalar::Real;

/// How many wiring stages to fit and with which per-column budgets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum StageSchedule {
    /// Stage `ℓ` allows `1 + sparsity[ℓ]` nonzeros per column (the last entry
    /// repeats). Without `target_bits` exactly `sparsity.len()` stages are
    /// fitted; with it, stages are added until the relative error reaches
    /// [`threshold`]`(target_bits)`, failing after `max_stages`.
    FixedStages { sparsity: Vec<usize>, target_bits: Option<u32>, max_stages: usize },
    /// One wiring matrix; every column keeps adding terms until its own
    /// relative squared error reaches [`threshold`]`(target_bits)`, with at
    /// most `1 + max_stages` terms per column.
    AdaptiveSingleStage { target_bits: u32, max_stages: usize },
}

pub const DEFAULT_MAX_STAGES: usize = 64;

impl StageSchedule {
    pub fn fixed(sparsity: Vec<usize>) -> Self {
        StageSchedule::FixedStages { sparsity, target_bits: None, max_stages: DEFAULT_MAX_STAGES }
    }

    pub fn until_bits(stage_sparsity: usize, bits: u32, max_stages: usize) -> Self {
        StageSchedule::FixedStages {
            sparsity: vec![stage_sparsity],
            target_bits: Some(bits),
            max_stages,
        }
    }

    pub fn adaptive(bits: u32, max_stages: usize) -> Self {
        StageSchedule::AdaptiveSingleStage { target_bits: bits, max_stages }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            StageSchedule::FixedStages { sparsity, target_bits, .. } => {
                if sparsity.is_empty() && target_bits.is_some() {
                    return Err(domain("fixed-stage schedule needs at least one sparsity value"));
                }
                if *target_bits == Some(0) {
                    return Err(domain("target bits must be at least 1"));
                }
            }
            StageSchedule::AdaptiveSingleStage { target_bits, .. } => {
                if *target_bits == 0 {
                    return Err(domain("target bits must be at least 1"));
                }
            }
        }
        Ok(())
    }
}

/// Result of fitting one column.
#[derive(Clone, Debug, PartialEq)]
pub struct ColumnFit<F> {
    /// Nonzero coefficients by increasing codebook index.
    pub coeffs: Vec<(usize, SignedPow2)>,
    pub residual_sq: F,
    /// Squared residual before the first step and after each accepted step.
    pub trace: Vec<F>,
}

impl<F> ColumnFit<F> {
    pub fn steps(&self) -> usize {
        self.trace.len() - 1
    }
}

/// Codebook columns with their squared norms, computed once per stage.
pub struct PreparedCodebook<'a, F> {
    columns: &'a Matrix<F>,
    norms: Vec<F>,
    range: Pow2Range,
}

impl<'a, F: Real> PreparedCodebook<'a, F> {
    pub fn new(columns: &'a Matrix<F>) -> Self {
        PreparedCodebook::with_range(columns, Pow2Range::default())
    }

    pub fn with_range(columns: &'a Matrix<F>, range: Pow2Range) -> Self {
        let norms = columns.columns().map(norm_sq).collect();
        PreparedCodebook { columns, norms, range }
    }

    /// Best value for component `j` given its current value and
    /// `g = ⟨r, b_j⟩`. Zero only wins when the least-squares coefficient
    /// sits below half the smallest representable magnitude.
    fn refit(&self, current: F, g: F, norm: F) -> SignedPow2 {
        let c = current + g / norm;
        let q = quantize_pow2_in(c, self.range);
        if q.clamped && q.value.exponent() == self.range.min_exp && c.abs() < F::exp2i(self.range.min_exp - 1) {
            SignedPow2::ZERO
        } else {
            q.value
        }
    }

    /// Greedy fit of one column with at most `max_terms` steps. Stops once
    /// `‖r‖² ≤ stop_sq` when given.
    pub fn fit(&self, target: &[F], max_terms: usize, stop_sq: Option<F>) -> ColumnFit<F> {
        let k = self.columns.cols();
        let mut omega = vec![SignedPow2::ZERO; k];
        let mut residual = target.to_vec();
        let mut res_sq = norm_sq(&residual);
        let mut trace = vec![res_sq];
        let mut g = vec![F::zero(); k];
        for _ in 0..max_terms {
            if res_sq.is_zero() || stop_sq.is_some_and(|s| res_sq <= s) {
                break;
            }
            for (gj, col) in g.iter_mut().zip(self.columns.columns()) {
                *gj = dot(&residual, col);
            }
            // Change of ‖r‖² when component j moves from w to v, with d = w − v:
            // Δ = d·(2g + d·n) ≥ −g²/n, which prunes candidates exactly.
            let mut best: Option<(usize, SignedPow2, F, F)> = None;
            let mut best_delta = F::zero();
            for j in 0..k {
                let n = self.norms[j];
                if n.is_zero() {
                    continue;
                }
                let gj = g[j];
                if -(gj * gj) / n >= best_delta {
                    continue;
                }
                let w = omega[j].value::<F>();
                let v = self.refit(w, gj, n);
                let d = w - v.value::<F>();
                let delta = d * (gj + gj + d * n);
                if delta < best_delta {
                    best_delta = delta;
                    best = Some((j, v, d, delta));
                }
            }
            let Some((j, v, d, _)) = best else { break };
            omega[j] = v;
            for (r, &b) in residual.iter_mut().zip(self.columns.column(j)) {
                *r += d * b;
            }
            res_sq = norm_sq(&residual);
            trace.push(res_sq);
        }
        let coeffs = omega.into_iter().enumerate().filter(|(_, v)| !v.is_zero()).collect();
        ColumnFit { coeffs, residual_sq: res_sq, trace }
    }
}

fn check_codebook<F: Real>(rows: usize, codebook: &Matrix<F>) -> Result<()> {
    if codebook.rows() != rows {
        return Err(dim(format!("target height {rows} vs codebook height {}", codebook.rows())));
    }
    Ok(())
}

/// Fits one target column with at most `1 + s` nonzero coefficients.
pub fn fit_column<F: Real>(target: &[F], codebook: &Matrix<F>, s: usize) -> Result<ColumnFit<F>> {
    check_codebook(target.len(), codebook)?;
    Ok(PreparedCodebook::new(codebook).fit(target, 1 + s, None))
}

/// A fitted wiring matrix with per-column squared residuals.
#[derive(Clone, Debug)]
pub struct StageFit<F> {
    pub wiring: Pow2Matrix,
    pub residual_sq: Vec<F>,
    pub steps: Vec<usize>,
}

/// Fits every column of `target` independently (in parallel).
pub fn fit_stage_detailed<F: Real>(
    target: &Matrix<F>,
    codebook: &Matrix<F>,
    max_terms: usize,
    stop_relative: Option<F>,
) -> Result<StageFit<F>> {
    check_codebook(target.rows(), codebook)?;
    let prepared = PreparedCodebook::new(codebook);
    let fits: Vec<ColumnFit<F>> = (0..target.cols())
        .into_par_iter()
        .map(|c| {
            let t = target.column(c);
            let stop = stop_relative.map(|rel| rel * norm_sq(t));
            prepared.fit(t, max_terms, stop)
        })
        .collect();
    let residual_sq = fits.iter().map(|f| f.residual_sq).collect();
    let steps = fits.iter().map(ColumnFit::steps).collect();
    let wiring = Pow2Matrix::from_unsorted(codebook.cols(), fits.into_iter().map(|f| f.coeffs).collect())?;
    Ok(StageFit { wiring, residual_sq, steps })
}

/// Wiring matrix (`K × K_t`) with at most `1 + s` nonzeros per column.
pub fn fit_stage<F: Real>(target: &Matrix<F>, codebook: &Matrix<F>, s: usize) -> Result<Pow2Matrix> {
    Ok(fit_stage_detailed(target, codebook, 1 + s, None)?.wiring)
}

/// Incremental stage fitting against a fixed target, exposing the error
/// after every stage.
pub struct StageRunner<'a, F: Real> {
    target: &'a Matrix<F>,
    effective: Matrix<F>,
    target_col_sq: Vec<F>,
    column_err_sq: Vec<F>,
    stages: Vec<Pow2Matrix>,
    steps: Vec<Vec<usize>>,
}

impl<'a, F: Real> StageRunner<'a, F> {
    /// `codebook` is the materialized `N × K` codebook; before any stage the
    /// approximation is the codebook itself.
    pub fn new(target: &'a Matrix<F>, codebook: Matrix<F>) -> Result<Self> {
        if target.shape() != codebook.shape() {
            return Err(dim(format!(
                "target {:?} and codebook {:?} must have the same shape",
                target.shape(),
                codebook.shape()
            )));
        }
        let target_col_sq = target.columns().map(norm_sq).collect();
        let column_err_sq = target
            .columns()
            .zip(codebook.columns())
            .map(|(t, b)| t.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum())
            .collect();
        Ok(StageRunner { target, effective: codebook, target_col_sq, column_err_sq, stages: Vec::new(), steps: Vec::new() })
    }

    /// `‖T − M‖²_F / ‖T‖²_F` of the current approximation.
    pub fn relative_error(&self) -> F {
        let t: F = self.target_col_sq.iter().copied().sum();
        let e: F = self.column_err_sq.iter().copied().sum();
        if t.is_zero() {
            if e.is_zero() { F::zero() } else { F::infinity() }
        } else {
            e / t
        }
    }

    /// Per-column `‖t_k − m_k‖² / ‖t_k‖²` (zero columns report 0 when exact).
    pub fn column_relative_errors(&self) -> Vec<F> {
        self.column_err_sq
            .iter()
            .zip(&self.target_col_sq)
            .map(|(&e, &t)| if t.is_zero() { if e.is_zero() { F::zero() } else { F::infinity() } } else { e / t })
            .collect()
    }

    fn push(&mut self, fit: StageFit<F>) -> Result<()> {
        self.effective = fit.wiring.left_mul(&self.effective)?;
        self.column_err_sq = fit.residual_sq;
        self.stages.push(fit.wiring);
        self.steps.push(fit.steps);
        Ok(())
    }

    /// Adds a stage with `1 + s` terms per column.
    pub fn push_stage(&mut self, s: usize) -> Result<()> {
        let fit = fit_stage_detailed(self.target, &self.effective, 1 + s, None)?;
        self.push(fit)
    }

    /// Adds a stage whose columns stop at relative error `rel`, using at most
    /// `max_terms` terms each.
    pub fn push_adaptive_stage(&mut self, max_terms: usize, rel: F) -> Result<()> {
        let fit = fit_stage_detailed(self.target, &self.effective, max_terms, Some(rel))?;
        self.push(fit)
    }

    pub fn stages(&self) -> &[Pow2Matrix] {
        &self.stages
    }

    /// Greedy steps taken per column, per stage.
    pub fn steps(&self) -> &[Vec<usize>] {
        &self.steps
    }

    pub fn effective_codebook(&self) -> &Matrix<F> {
        &self.effective
    }

    pub fn into_stages(self) -> Vec<Pow2Matrix> {
        self.stages
    }
}

/// Decomposes `target ≈ B·W₁⋯W_L` for the given codebook and schedule.
pub fn decompose<F: Real>(target: &Matrix<F>, codebook: Codebook, schedule: &StageSchedule) -> Result<DecompositionPlan> {
    schedule.validate()?;
    if codebook.rows() != target.rows() || codebook.cols() != target.cols() {
        return Err(dim(format!(
            "target is {}x{} but codebook is {}x{}",
            target.rows(),
            target.cols(),
            codebook.rows(),
            codebook.cols()
        )));
    }
    let mut runner = StageRunner::new(target, codebook.dense::<F>())?;
    match schedule {
        StageSchedule::FixedStages { sparsity, target_bits: None, .. } => {
            for &s in sparsity {
                runner.push_stage(s)?;
            }
        }
        StageSchedule::FixedStages { sparsity, target_bits: Some(q), max_stages } => {
            let goal = F::lit(threshold(*q));
            while runner.relative_error() > goal {
                let l = runner.stages().len();
                if l == *max_stages {
                    return Err(Error::AccuracyUnreachable(format!(
                        "{q}-bit accuracy not reached after {max_stages} stages (relative error {:.3e})",
                        runner.relative_error().to_f64().unwrap_or(f64::NAN)
                    )));
                }
                runner.push_stage(sparsity[l.min(sparsity.len() - 1)])?;
            }
        }
        StageSchedule::AdaptiveSingleStage { target_bits, max_stages } => {
            let goal = F::lit(threshold(*target_bits));
            runner.push_adaptive_stage(1 + max_stages, goal)?;
            if let Some((k, e)) = runner
                .column_relative_errors()
                .into_iter()
                .enumerate()
                .find(|(_, e)| *e > goal)
            {
                return Err(Error::AccuracyUnreachable(format!(
                    "column {k} stays at relative error {:.3e} after {} terms ({target_bits}-bit target)",
                    e.to_f64().unwrap_or(f64::NAN),
                    1 + max_stages
                )));
            }
        }
    }
    let meta = PlanMeta::for_target(target, schedule.clone());
    DecompositionPlan::new(codebook, runner.into_stages(), meta)
}
