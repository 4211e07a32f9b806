use crate::codebook::{Entry, Pow2Matrix};
use crate::error::{domain, Error, Result};
use crate::pot_arith::SignedPow2;

/// Largest magnitude exponent the two-sparse enumeration may use by default.
pub const TWO_SPARSE_MAX_EXP: u32 = 30;

/// Number of pairwise non-collinear 1- and 2-sparse columns of height `n`
/// whose magnitudes are at most `2^max_exp`.
pub fn two_sparse_capacity(n: usize, max_exp: u32) -> u128 {
    let pairs = (n as u128) * (n.saturating_sub(1) as u128) / 2;
    n as u128 + pairs * (2 + 4 * max_exp as u128)
}

/// Two-sparse codebook with the default magnitude cap.
pub fn two_sparse_build(n: usize, k: usize) -> Result<Pow2Matrix> {
    two_sparse_build_capped(n, k, TWO_SPARSE_MAX_EXP)
}

/// `n × k` codebook of 1- and 2-sparse columns, no two collinear.
///
/// Enumeration order: the `n` unit columns; then, for growing magnitude
/// exponent `m = 0, 1, …`, every row pair `(i, j)` in lexicographic order
/// with patterns `(1, ±1)` for `m = 0` and `(2^m, ±1), (1, ±2^m)` otherwise.
/// The first entry is always positive and the smaller magnitude is `1`,
/// which picks one representative per collinearity class.
pub fn two_sparse_build_capped(n: usize, k: usize, max_exp: u32) -> Result<Pow2Matrix> {
    if n == 0 {
        return Err(domain("two-sparse codebook needs at least one row"));
    }
    let capacity = two_sparse_capacity(n, max_exp);
    if k as u128 > capacity {
        return Err(Error::Infeasible(format!(
            "{k} non-collinear two-sparse columns of height {n} need magnitudes beyond 2^{max_exp} \
             (capacity {capacity})"
        )));
    }
    let pos = |e: u32| SignedPow2::new(false, e as i32);
    let neg = |e: u32| SignedPow2::new(true, e as i32);
    let mut columns: Vec<Vec<Entry>> = Vec::with_capacity(k);
    columns.extend((0..n.min(k)).map(|i| vec![Entry { row: i, coeff: SignedPow2::ONE }]));
    let mut m = 0u32;
    'outer: while columns.len() < k {
        for i in 0..n {
            for j in i + 1..n {
                let patterns = if m == 0 {
                    vec![(pos(0), pos(0)), (pos(0), neg(0))]
                } else {
                    vec![(pos(m), pos(0)), (pos(m), neg(0)), (pos(0), pos(m)), (pos(0), neg(m))]
                };
                for (a, b) in patterns {
                    if columns.len() == k {
                        break 'outer;
                    }
                    columns.push(vec![Entry { row: i, coeff: a }, Entry { row: j, coeff: b }]);
                }
            }
        }
        m += 1;
    }
    Pow2Matrix::new(n, columns)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(m: &Pow2Matrix) -> Vec<Vec<f64>> {
        m.to_dense::<f64>().columns().map(<[f64]>::to_vec).collect()
    }

    #[test]
    fn small_examples() {
        let m = two_sparse_build(2, 4).unwrap();
        assert_eq!(dense(&m), vec![vec![1., 0.], vec![0., 1.], vec![1., 1.], vec![1., -1.]]);
        let m = two_sparse_build(2, 2).unwrap();
        assert_eq!(dense(&m), vec![vec![1., 0.], vec![0., 1.]]);
        let m = two_sparse_build(2, 6).unwrap();
        assert_eq!(dense(&m)[4..], [vec![2., 1.], vec![2., -1.]]);
    }

    #[test]
    fn uses_minimal_magnitudes() {
        // 8 + 28·2 = 64 columns fit at magnitude 1, 8 + 28·6 = 176 at 2, 288 at 4.
        let m = two_sparse_build(8, 256).unwrap();
        let max = m.columns().iter().flatten().map(|e| e.coeff.exponent()).max().unwrap();
        assert_eq!(max, 2);
        let m = two_sparse_build(8, 64).unwrap();
        assert!(m.columns().iter().flatten().all(|e| e.coeff.exponent() == 0));
    }

    #[test]
    fn infeasible_sizes() {
        assert!(matches!(two_sparse_build(1, 2), Err(Error::Infeasible(_))));
        assert!(two_sparse_build(1, 1).is_ok());
        assert!(matches!(two_sparse_build_capped(3, 3 + 3 * 6 + 1, 1), Err(Error::Infeasible(_))));
        assert!(two_sparse_build_capped(3, 3 + 3 * 6, 1).is_ok());
    }
}
