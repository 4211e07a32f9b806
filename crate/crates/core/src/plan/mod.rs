//! Decomposition plans: `T ≈ B·W₁⋯W_L` with reconstruction, cost and
//! distortion accounting.
//!
//! Stages are stored in design order (`W₁` first). Evaluating `T·x` applies
//! them in reverse, `B(W₁(⋯(W_L x)))`.
//!
//! Two addition counts are reported. The nominal count charges every column
//! of a sparse factor `max(nnz − 1, 0)` additions, so a wiring stage with
//! `1 + s` terms per column costs `sK` and a plan with self-designed codebook
//! costs `(L·s + 2)K` at unit codebook sparsity. The executed count is what a
//! shift-add evaluation actually performs: each output row of a factor sums
//! its terms, `nnz − #nonempty rows`. The two agree whenever every row and
//! column of a factor is used, and differ for factors with many more columns
//! than used rows.

mod format;

use std::collections::BTreeMap;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::codebook::{Codebook, Pow2Matrix};
use crate::error::{dim, Result};
use crate::matrix::Matrix;
use crate::pot_arith::Dyadic;
use crate::scalar::Real;
use crate::wiring::StageSchedule;

pub use format::{FORMAT_NAME, FORMAT_VERSION};

/// Relative squared error of `q`-bit signed arithmetic: `4^{−(q−1)}/3`.
pub fn threshold(q: u32) -> f64 {
    assert!(q >= 1, "bit count must be positive");
    0.25f64.powi(q as i32 - 1) / 3.0
}

/// Largest integer `q ≥ 1` with `d_rel ≤ threshold(q)`; `0` when even one
/// bit is missed and infinity for an exact match.
pub fn achieved_bits(d_rel: f64) -> f64 {
    if d_rel.is_nan() || d_rel > threshold(1) {
        return 0.0;
    }
    if d_rel == 0.0 {
        return f64::INFINITY;
    }
    let mut q = (1.0 - (3.0 * d_rel).log(4.0)).floor().max(1.0) as u32;
    while q > 1 && d_rel > threshold(q) {
        q -= 1;
    }
    while d_rel <= threshold(q + 1) {
        q += 1;
    }
    f64::from(q)
}

/// Creation metadata carried alongside a plan.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PlanMeta {
    /// SHA-256 of the target (see [`target_hash`]).
    pub target_hash: Option<String>,
    pub seed: Option<u64>,
    pub schedule: Option<StageSchedule>,
    /// Free-form creation parameters.
    pub params: BTreeMap<String, String>,
}

impl PlanMeta {
    pub fn for_target<F: Real>(target: &Matrix<F>, schedule: StageSchedule) -> Self {
        PlanMeta { target_hash: Some(target_hash(target)), schedule: Some(schedule), ..PlanMeta::default() }
    }
}

/// Hex SHA-256 over the shape (two little-endian `u64`) followed by the
/// entries as little-endian `f64` in row-major order.
pub fn target_hash<F: Real>(target: &Matrix<F>) -> String {
    let mut h = Sha256::new();
    h.update((target.rows() as u64).to_le_bytes());
    h.update((target.cols() as u64).to_le_bytes());
    for v in target.row_major() {
        h.update(v.to_f64().unwrap_or(f64::NAN).to_le_bytes());
    }
    hex::encode(h.finalize())
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecompositionPlan {
    codebook: Codebook,
    stages: Vec<Pow2Matrix>,
    pub meta: PlanMeta,
}

impl DecompositionPlan {
    /// Every stage must be `K × K` for the codebook's `K`.
    pub fn new(codebook: Codebook, stages: Vec<Pow2Matrix>, meta: PlanMeta) -> Result<Self> {
        let k = codebook.cols();
        for (l, w) in stages.iter().enumerate() {
            if w.rows() != k || w.cols() != k {
                return Err(dim(format!("stage {} is {}x{}, expected {k}x{k}", l + 1, w.rows(), w.cols())));
            }
        }
        Ok(DecompositionPlan { codebook, stages, meta })
    }

    pub fn rows(&self) -> usize {
        self.codebook.rows()
    }

    pub fn cols(&self) -> usize {
        self.codebook.cols()
    }

    pub fn codebook(&self) -> &Codebook {
        &self.codebook
    }

    /// Stages in design order `W₁, …, W_L`.
    pub fn stages(&self) -> &[Pow2Matrix] {
        &self.stages
    }

    /// `B·W₁⋯W_L` in exact arithmetic.
    pub fn reconstruct_exact(&self) -> Matrix<Dyadic> {
        let mut m = self.codebook.exact();
        for w in &self.stages {
            m = w.left_mul(&m).expect("validated stage shapes");
        }
        m
    }

    /// The exact reconstruction rounded to `F`.
    pub fn reconstruct<F: Real>(&self) -> Matrix<F> {
        self.reconstruct_exact().map(|d| F::lit(d.to_f64()))
    }

    pub fn cost(&self) -> CostReport {
        let (n, k) = (self.rows(), self.cols());
        let codebook_additions = self.codebook.nominal_additions();
        let codebook_ops = self.codebook.structural_ops();
        let stage_additions: Vec<u64> = self.stages.iter().map(Pow2Matrix::column_additions).collect();
        let stage_sparsity = self
            .stages
            .iter()
            .map(|w| if k == 0 { 0.0 } else { w.nnz() as f64 / k as f64 - 1.0 })
            .collect();
        let additions = codebook_additions.unwrap_or(0) + stage_additions.iter().sum::<u64>();
        let mut shifts = codebook_ops.map_or(0, |o| o.shifts);
        let mut sign_changes = codebook_ops.map_or(0, |o| o.negations);
        let mut executed = codebook_ops.map(|o| o.additions);
        for w in &self.stages {
            let ops = w.structural_ops();
            shifts += ops.shifts;
            sign_changes += ops.negations;
            executed = executed.map(|e| e + ops.additions);
        }
        CostReport {
            additions,
            executed_additions: executed,
            shifts,
            sign_changes,
            adds_per_entry: per_entry(additions, n, k),
            codebook_additions,
            stage_additions,
            stage_sparsity,
            analytic_only: codebook_additions.is_none(),
        }
    }

    pub fn distortion<F: Real>(&self, target: &Matrix<F>) -> Result<DistortionReport> {
        if target.shape() != (self.rows(), self.cols()) {
            return Err(dim(format!(
                "target is {:?} but plan reconstructs {:?}",
                target.shape(),
                (self.rows(), self.cols())
            )));
        }
        let m: Matrix<f64> = self.reconstruct();
        let t: Matrix<f64> = target.cast();
        Ok(DistortionReport::between(&t, &m))
    }
}

pub(crate) fn per_entry(additions: u64, n: usize, k: usize) -> f64 {
    if n * k == 0 {
        0.0
    } else {
        additions as f64 / (n * k) as f64
    }
}

/// Free-function form of [`DecompositionPlan::reconstruct`].
pub fn reconstruct(plan: &DecompositionPlan) -> Matrix<f64> {
    plan.reconstruct()
}

/// Free-function form of [`DecompositionPlan::cost`].
pub fn cost_of(plan: &DecompositionPlan) -> CostReport {
    plan.cost()
}

/// Free-function form of [`DecompositionPlan::distortion`].
pub fn distortion<F: Real>(plan: &DecompositionPlan, target: &Matrix<F>) -> Result<DistortionReport> {
    plan.distortion(target)
}

/// Operation counts of a plan or of one evaluation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CostReport {
    /// Nominal additions: codebook plus `Σ_ℓ Σ_cols (nnz − 1)⁺`.
    pub additions: u64,
    /// Additions a shift-add evaluation performs; `None` when the codebook
    /// has no shift-add form.
    pub executed_additions: Option<u64>,
    pub shifts: u64,
    pub sign_changes: u64,
    /// `additions / (N·K)`.
    pub adds_per_entry: f64,
    pub codebook_additions: Option<u64>,
    pub stage_additions: Vec<u64>,
    /// Realized average `s_ℓ = nnz(W_ℓ)/K − 1` per stage.
    pub stage_sparsity: Vec<f64>,
    /// The codebook cost is not counted (analysis-only codebook).
    pub analytic_only: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistortionReport {
    /// `‖T − M‖²_F / ‖T‖²_F`.
    pub d_rel: f64,
    /// `‖t_k − m_k‖² / ‖t_k‖²` per column.
    pub column_errors: Vec<f64>,
    pub db: f64,
    pub achieved_bits: f64,
}

impl DistortionReport {
    pub fn between(target: &Matrix<f64>, approx: &Matrix<f64>) -> Self {
        let mut num = 0.0;
        let mut den = 0.0;
        let column_errors = target
            .columns()
            .zip(approx.columns())
            .map(|(t, m)| {
                let e: f64 = t.iter().zip(m).map(|(a, b)| (a - b) * (a - b)).sum();
                let s: f64 = t.iter().map(|a| a * a).sum();
                num += e;
                den += s;
                ratio(e, s)
            })
            .collect();
        DistortionReport::from_parts(ratio(num, den), column_errors)
    }

    pub fn from_parts(d_rel: f64, column_errors: Vec<f64>) -> Self {
        DistortionReport { d_rel, column_errors, db: 10.0 * d_rel.log10(), achieved_bits: achieved_bits(d_rel) }
    }
}

fn ratio(e: f64, s: f64) -> f64 {
    if s == 0.0 {
        if e == 0.0 { 0.0 } else { f64::INFINITY }
    } else {
        e / s
    }
}
