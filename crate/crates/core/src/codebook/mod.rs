//! Codebook matrices: the cheap left factor `B` of a decomposition.
//!
//! Four designs are provided. The binary mailman matrix lists every binary
//! column once and multiplies in fewer than `2K` additions. The two-sparse
//! codebook holds pairwise non-collinear columns with one or two signed
//! power-of-two entries. The self-designing codebook is `B₀·B₁·B₂`, where
//! `B₀ = [I 0]` and `B₁, B₂` are wiring matrices fitted to an auxiliary
//! target. The Gaussian codebook exists for analysis only; its entries are not
//! powers of two, so it has no shift-add evaluation.

mod mailman;
mod pow2_matrix;
mod self_design;
mod two_sparse;

use std::fmt;
use std::str::FromStr;

use rand_distr::{Distribution, StandardNormal};

pub use mailman::{mailman_additions, mailman_apply, mailman_build, mailman_entry, mailman_pow2, MAILMAN_MAX_ROWS};
pub use pow2_matrix::{Entry, OpCount, Pow2Matrix};
pub use self_design::{auxiliary_target, is_gaussian_like, self_design_build};
pub use two_sparse::{two_sparse_build, two_sparse_build_capped, two_sparse_capacity, TWO_SPARSE_MAX_EXP};

use crate::error::{domain, Error, Result};
use crate::matrix::Matrix;
use crate::pot_arith::Dyadic;
use crate::rng;
use crate::scalar::{Real, ShiftAdd};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum CodebookKind {
    Mailman,
    TwoSparse,
    SelfDesigning,
    Gaussian,
}

impl CodebookKind {
    pub fn name(self) -> &'static str {
        match self {
            CodebookKind::Mailman => "mailman",
            CodebookKind::TwoSparse => "two-sparse",
            CodebookKind::SelfDesigning => "self-designing",
            CodebookKind::Gaussian => "gaussian",
        }
    }
}

impl fmt::Display for CodebookKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CodebookKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mailman" => Ok(CodebookKind::Mailman),
            "two-sparse" => Ok(CodebookKind::TwoSparse),
            "self" | "self-designing" => Ok(CodebookKind::SelfDesigning),
            "gaussian" => Ok(CodebookKind::Gaussian),
            _ => Err(domain(format!("unknown codebook kind {s:?}"))),
        }
    }
}

/// IID standard-normal `n × k` matrix, filled column by column from the
/// seeded generator.
pub fn gaussian_build<F: Real>(n: usize, k: usize, seed: u64) -> Matrix<F> {
    let mut rng = rng::seeded(seed);
    Matrix::from_fn(n, k, |_, _| {
        let z: f64 = StandardNormal.sample(&mut rng);
        F::lit(z)
    })
}

/// A codebook descriptor: enough data to rebuild `B` deterministically.
#[derive(Clone, PartialEq, Debug)]
pub enum Codebook {
    /// `N × 2^N` binary mailman matrix.
    Mailman { n: usize },
    /// Two-sparse enumeration; `matrix` is rebuilt from `(rows, cols)`.
    TwoSparse { matrix: Pow2Matrix },
    /// `[I_N 0]·B₁·B₂`; every entry of `b1` lies in the first `n` rows.
    SelfDesigning { n: usize, b1: Pow2Matrix, b2: Pow2Matrix },
    /// Seeded Gaussian matrix, analysis only.
    Gaussian { n: usize, k: usize, seed: u64 },
}

impl Codebook {
    pub fn mailman(n: usize) -> Result<Self> {
        if !(1..=MAILMAN_MAX_ROWS).contains(&n) {
            return Err(domain(format!("mailman rows must be in 1..={MAILMAN_MAX_ROWS}, got {n}")));
        }
        Ok(Codebook::Mailman { n })
    }

    pub fn two_sparse(n: usize, k: usize) -> Result<Self> {
        Ok(Codebook::TwoSparse { matrix: two_sparse_build(n, k)? })
    }

    /// Checks shapes: `b1` and `b2` are `K × K` and `b1` only uses rows below `n`.
    pub fn self_designing(n: usize, b1: Pow2Matrix, b2: Pow2Matrix) -> Result<Self> {
        let k = b2.cols();
        if n == 0 || n > k {
            return Err(domain(format!("self-designing codebook needs 1 <= N <= K, got N={n}, K={k}")));
        }
        if b1.rows() != k || b1.cols() != k || b2.rows() != k {
            return Err(domain(format!(
                "self-designing factors must be {k}x{k}, got {}x{} and {}x{}",
                b1.rows(),
                b1.cols(),
                b2.rows(),
                b2.cols()
            )));
        }
        if b1.columns().iter().flatten().any(|e| e.row >= n) {
            return Err(domain("first self-designing factor reaches beyond the identity block"));
        }
        Ok(Codebook::SelfDesigning { n, b1, b2 })
    }

    pub fn gaussian(n: usize, k: usize, seed: u64) -> Self {
        Codebook::Gaussian { n, k, seed }
    }

    pub fn kind(&self) -> CodebookKind {
        match self {
            Codebook::Mailman { .. } => CodebookKind::Mailman,
            Codebook::TwoSparse { .. } => CodebookKind::TwoSparse,
            Codebook::SelfDesigning { .. } => CodebookKind::SelfDesigning,
            Codebook::Gaussian { .. } => CodebookKind::Gaussian,
        }
    }

    pub fn rows(&self) -> usize {
        match self {
            Codebook::Mailman { n } | Codebook::SelfDesigning { n, .. } | Codebook::Gaussian { n, .. } => *n,
            Codebook::TwoSparse { matrix } => matrix.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            Codebook::Mailman { n } => 1 << n,
            Codebook::TwoSparse { matrix } => matrix.cols(),
            Codebook::SelfDesigning { b2, .. } => b2.cols(),
            Codebook::Gaussian { k, .. } => *k,
        }
    }

    /// Whether [`apply`](Self::apply) is available.
    pub fn is_shift_add(&self) -> bool {
        !matches!(self, Codebook::Gaussian { .. })
    }

    /// `B` as a floating-point matrix.
    pub fn dense<F: Real>(&self) -> Matrix<F> {
        match self {
            Codebook::Mailman { n } => mailman_build(*n).expect("validated row count"),
            Codebook::TwoSparse { matrix } => matrix.to_dense(),
            Codebook::SelfDesigning { n, b1, b2 } => {
                let b01: Matrix<F> = b1.to_dense::<F>().select_rows(*n);
                b2.left_mul(&b01).expect("validated shapes")
            }
            Codebook::Gaussian { n, k, seed } => gaussian_build(*n, *k, *seed),
        }
    }

    /// `B` in exact dyadic arithmetic.
    pub fn exact(&self) -> Matrix<Dyadic> {
        match self {
            Codebook::Mailman { n } => {
                mailman_build::<f64>(*n).expect("validated row count").map(|&v| Dyadic::from_i64(v as i64))
            }
            Codebook::TwoSparse { matrix } => matrix.to_dyadic(),
            Codebook::SelfDesigning { n, b1, b2 } => {
                let b01 = b1.to_dyadic().select_rows(*n);
                b2.left_mul(&b01).expect("validated shapes")
            }
            Codebook::Gaussian { n, k, seed } => gaussian_build::<f64>(*n, *k, *seed)
                .map(|&v| Dyadic::from_f64(v).expect("finite normal draw")),
        }
    }

    /// `B·h` by shifts and additions, with the executed operation count.
    pub fn apply<S: ShiftAdd>(&self, h: &[S]) -> Result<(Vec<S>, OpCount)> {
        match self {
            Codebook::Mailman { n } => {
                let (y, additions) = mailman_apply(*n, h)?;
                Ok((y, OpCount { additions, ..OpCount::default() }))
            }
            Codebook::TwoSparse { matrix } => matrix.apply(h),
            Codebook::SelfDesigning { n, b1, b2 } => {
                let (mid, mut ops) = b2.apply(h)?;
                let (mut y, ops1) = b1.apply(&mid)?;
                ops += ops1;
                y.truncate(*n);
                Ok((y, ops))
            }
            Codebook::Gaussian { .. } => Err(Error::NotShiftAdd("gaussian")),
        }
    }

    /// Operations executed by [`apply`](Self::apply); `None` for Gaussian.
    pub fn structural_ops(&self) -> Option<OpCount> {
        match self {
            Codebook::Mailman { n } => Some(OpCount { additions: mailman_additions(*n), ..OpCount::default() }),
            Codebook::TwoSparse { matrix } => Some(matrix.structural_ops()),
            Codebook::SelfDesigning { b1, b2, .. } => {
                let mut ops = b1.structural_ops();
                ops += b2.structural_ops();
                Some(ops)
            }
            Codebook::Gaussian { .. } => None,
        }
    }

    /// Nominal additions under the per-column convention: mailman `c(N)`,
    /// two-sparse one per two-sparse column, self-designing the column
    /// additions of `B₁` and `B₂`. `None` for Gaussian.
    pub fn nominal_additions(&self) -> Option<u64> {
        match self {
            Codebook::Mailman { n } => Some(mailman_additions(*n)),
            Codebook::TwoSparse { matrix } => Some(matrix.column_additions()),
            Codebook::SelfDesigning { b1, b2, .. } => Some(b1.column_additions() + b2.column_additions()),
            Codebook::Gaussian { .. } => None,
        }
    }
}
