//! Additions-per-entry benchmarks.
//!
//! Gaussian targets use a codebook self-designed from the target itself and
//! a chain of `s_ℓ = 1` stages; one run per matrix records the first stage
//! count that reaches each requested accuracy. Uniform targets use a codebook
//! self-designed from a seeded Gaussian auxiliary matrix and a single
//! adaptive wiring matrix per accuracy.

use rand::Rng as _;
use serde::Serialize;

use crate::analysis::mean_stderr;
use crate::codebook::{gaussian_build, self_design_build};
use crate::engine::{baseline_apply, binary_quantize, csd_quantize, quantization_mse, apply_forms};
use crate::error::{domain, Result};
use crate::matrix::Matrix;
use crate::plan::{per_entry, threshold};
use crate::rng;
use crate::wiring::StageRunner;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchCell {
    pub scheme: String,
    pub rows: usize,
    pub cols: usize,
    pub bits: u32,
    /// Mean nominal additions per matrix entry over successful samples.
    pub adds_per_entry: f64,
    pub stderr: f64,
    /// Mean relative squared error of the successful samples.
    pub d_rel: f64,
    pub samples: usize,
    /// Samples that missed the accuracy within the stage limit.
    pub failures: usize,
}

fn cell(scheme: &str, n: usize, k: usize, bits: u32, adds: &[f64], errs: &[f64], failures: usize) -> BenchCell {
    let (mean, stderr) = if adds.is_empty() { (f64::NAN, f64::NAN) } else { mean_stderr(adds) };
    let d_rel = if errs.is_empty() { f64::NAN } else { errs.iter().sum::<f64>() / errs.len() as f64 };
    BenchCell {
        scheme: scheme.into(),
        rows: n,
        cols: k,
        bits,
        adds_per_entry: mean,
        stderr,
        d_rel,
        samples: adds.len() + failures,
        failures,
    }
}

fn check(n: usize, k: usize, bits: &[u32], samples: usize) -> Result<()> {
    if n == 0 || k < n {
        return Err(domain(format!("benchmark shape needs K >= N >= 1, got {n}x{k}")));
    }
    if samples == 0 || bits.is_empty() || bits.contains(&0) {
        return Err(domain("benchmark needs samples >= 1 and positive bit counts"));
    }
    Ok(())
}

/// Gaussian targets, target-designed codebook, `s_ℓ = 1` stages. Sample `i`
/// draws its target with seed `derive_seed(seed, i)`.
pub fn gaussian_targets(n: usize, k: usize, bits: &[u32], samples: usize, seed: u64, max_stages: usize) -> Result<Vec<BenchCell>> {
    check(n, k, bits, samples)?;
    let mut adds = vec![Vec::new(); bits.len()];
    let mut errs = vec![Vec::new(); bits.len()];
    let mut failures = vec![0; bits.len()];
    for i in 0..samples as u64 {
        let target: Matrix<f64> = gaussian_build(n, k, rng::derive_seed(seed, i));
        let codebook = self_design_build(&target, 1)?;
        let mut total = codebook.nominal_additions().expect("shift-add codebook");
        let mut runner = StageRunner::new(&target, codebook.dense())?;
        let mut pending: Vec<usize> = (0..bits.len()).collect();
        loop {
            let d = runner.relative_error();
            pending.retain(|&c| {
                if d <= threshold(bits[c]) {
                    adds[c].push(per_entry(total, n, k));
                    errs[c].push(d);
                    false
                } else {
                    true
                }
            });
            if pending.is_empty() || runner.stages().len() == max_stages {
                break;
            }
            runner.push_stage(1)?;
            total += runner.stages().last().expect("just pushed").column_additions();
        }
        for c in pending {
            failures[c] += 1;
        }
    }
    Ok((0..bits.len()).map(|c| cell("gaussian", n, k, bits[c], &adds[c], &errs[c], failures[c])).collect())
}

/// Uniform `[0, 1)` targets, codebook designed from a Gaussian auxiliary
/// matrix, one adaptive wiring matrix per accuracy with at most
/// `1 + max_terms` terms per column. Sample `i` uses stream `2i` of `seed`
/// for the target and `derive_seed(seed, 2i + 1)` for the auxiliary matrix.
pub fn uniform_targets(n: usize, k: usize, bits: &[u32], samples: usize, seed: u64, max_terms: usize) -> Result<Vec<BenchCell>> {
    check(n, k, bits, samples)?;
    let mut adds = vec![Vec::new(); bits.len()];
    let mut errs = vec![Vec::new(); bits.len()];
    let mut failures = vec![0; bits.len()];
    for i in 0..samples as u64 {
        let mut r = rng::stream(seed, 2 * i);
        let target = Matrix::from_fn(n, k, |_, _| r.random::<f64>());
        let aux: Matrix<f64> = gaussian_build(n, k, rng::derive_seed(seed, 2 * i + 1));
        let codebook = self_design_build(&aux, 1)?;
        let base = codebook.nominal_additions().expect("shift-add codebook");
        let dense: Matrix<f64> = codebook.dense();
        for (c, &q) in bits.iter().enumerate() {
            let goal = threshold(q);
            let mut runner = StageRunner::new(&target, dense.clone())?;
            runner.push_adaptive_stage(1 + max_terms, goal)?;
            if runner.column_relative_errors().iter().any(|&e| e > goal) {
                failures[c] += 1;
                continue;
            }
            let total = base + runner.stages()[0].column_additions();
            adds[c].push(per_entry(total, n, k));
            errs[c].push(runner.relative_error());
        }
    }
    Ok((0..bits.len()).map(|c| cell("uniform", n, k, bits[c], &adds[c], &errs[c], failures[c])).collect())
}

/// Entry-wise references on a uniform `[−1, 1]` matrix: `q`-bit fixed point
/// and canonical signed digits with the fewest digits whose mean squared
/// error stays within `threshold(q)`. The reported error is the mean squared
/// entry error.
pub fn baselines(n: usize, k: usize, q: u32, seed: u64) -> Result<Vec<BenchCell>> {
    check(n, k, &[q], 1)?;
    let mut r = rng::seeded(seed);
    let target = Matrix::from_fn(n, k, |_, _| r.random_range(-1.0..=1.0f64));
    let x = vec![1.0f64; k];
    let (_, cost) = baseline_apply(&target, q, &x)?;
    let mse = quantization_mse(&target, &binary_quantize(&target, q)?)?;
    let mut out = vec![cell("fixed-point", n, k, q, &[cost.adds_per_entry], &[mse], 0)];
    let goal = threshold(q);
    for terms in 0..=64 {
        let forms = csd_quantize(&target, terms);
        let mse = quantization_mse(&target, &forms)?;
        if mse <= goal {
            let (_, cost) = apply_forms(&forms, &x)?;
            out.push(cell(&format!("csd-{terms}"), n, k, q, &[cost.adds_per_entry], &[mse], 0));
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_cells_monotone_in_bits() {
        let cells = gaussian_targets(4, 32, &[2, 4, 8], 3, 1, 64).unwrap();
        assert!(cells.iter().all(|c| c.failures == 0 && c.samples == 3));
        assert!(cells.windows(2).all(|w| w[0].adds_per_entry <= w[1].adds_per_entry));
        assert!(cells.iter().all(|c| c.d_rel <= threshold(c.bits)));
    }

    #[test]
    fn stage_limit_reports_failures() {
        let cells = gaussian_targets(4, 32, &[24], 2, 1, 2).unwrap();
        assert_eq!(cells[0].failures, 2);
        assert!(cells[0].adds_per_entry.is_nan());
    }

    #[test]
    fn uniform_cells() {
        let cells = uniform_targets(4, 32, &[4, 8], 2, 3, 64).unwrap();
        assert!(cells.iter().all(|c| c.failures == 0));
        assert!(cells[0].adds_per_entry < cells[1].adds_per_entry);
    }

    #[test]
    fn baseline_rows() {
        let cells = baselines(8, 256, 8, 5).unwrap();
        assert_eq!(cells[0].scheme, "fixed-point");
        // 7 fractional bits: 3.5 ones on average, one fewer addition per row.
        assert!((cells[0].adds_per_entry - 3.5).abs() < 0.2);
        assert!(cells[1].scheme.starts_with("csd-"));
        assert!(cells[1].adds_per_entry < cells[0].adds_per_entry);
    }
}
