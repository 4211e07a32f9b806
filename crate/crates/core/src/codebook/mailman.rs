use crate::codebook::{Entry, Pow2Matrix};
use crate::error::{dim, domain, Result};
use crate::matrix::Matrix;
use crate::pot_arith::SignedPow2;
use crate::scalar::{Real, ShiftAdd};

pub const MAILMAN_MAX_ROWS: usize = 24;

fn check_rows(n: usize) -> Result<()> {
    if !(1..=MAILMAN_MAX_ROWS).contains(&n) {
        return Err(domain(format!("mailman rows must be in 1..={MAILMAN_MAX_ROWS}, got {n}")));
    }
    Ok(())
}

/// Bit `n` of column index `k`: row 0 is the least significant bit, so the
/// last row splits the columns into an all-zero and an all-one half.
pub fn mailman_entry(n: usize, k: usize) -> bool {
    (k >> n) & 1 == 1
}

/// The `N × 2^N` binary matrix whose columns enumerate every binary word.
pub fn mailman_build<F: Real>(n: usize) -> Result<Matrix<F>> {
    check_rows(n)?;
    Ok(Matrix::from_fn(n, 1 << n, |i, k| if mailman_entry(i, k) { F::one() } else { F::zero() }))
}

/// The same matrix in sparse power-of-two form.
pub fn mailman_pow2(n: usize) -> Result<Pow2Matrix> {
    check_rows(n)?;
    let columns = (0..1usize << n)
        .map(|k| (0..n).filter(|&i| mailman_entry(i, k)).map(|row| Entry { row, coeff: SignedPow2::ONE }).collect())
        .collect();
    Pow2Matrix::new(n, columns)
}

/// Additions used by [`mailman_apply`]: `c(1) = 0`, `c(N) = c(N−1) + 2^N − 1`,
/// i.e. `2^{N+1} − N − 3`.
pub fn mailman_additions(n: usize) -> u64 {
    if n == 0 {
        return 0;
    }
    (1u64 << (n + 1)) - n as u64 - 3
}

/// `B_{N×K} · h` by the halving recursion: the last output is the sum of the
/// upper half of `h`, the rest is the `N−1` product applied to the folded
/// vector `h₁ + h₂`. Returns the output and the number of additions.
pub fn mailman_apply<S: ShiftAdd>(n: usize, h: &[S]) -> Result<(Vec<S>, u64)> {
    check_rows(n)?;
    if h.len() != 1 << n {
        return Err(dim(format!("mailman N={n} needs {} inputs, got {}", 1u64 << n, h.len())));
    }
    let mut out = vec![S::zero(); n];
    let mut adds = 0;
    fold(h, &mut out, &mut adds);
    Ok((out, adds))
}

fn fold<S: ShiftAdd>(h: &[S], out: &mut [S], adds: &mut u64) {
    let n = out.len();
    if n == 1 {
        out[0] = h[1].clone();
        return;
    }
    let (lo, hi) = h.split_at(h.len() / 2);
    let mut sum = hi[0].clone();
    for v in &hi[1..] {
        sum = sum + v.clone();
        *adds += 1;
    }
    out[n - 1] = sum;
    let folded: Vec<S> = lo.iter().zip(hi).map(|(a, b)| a.clone() + b.clone()).collect();
    *adds += folded.len() as u64;
    fold(&folded, &mut out[..n - 1], adds);
}
