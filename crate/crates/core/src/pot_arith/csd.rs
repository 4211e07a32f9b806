use std::fmt;

use num_traits::Zero;
use rand::Rng as _;
use rayon::prelude::*;

use super::{quantize_pow2, Dyadic, SignedPow2};
use crate::error::{domain, Result};
use crate::rng;
use crate::scalar::Real;

/// A sum of signed powers of two with strictly decreasing exponents.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct CsdForm {
    terms: Vec<SignedPow2>,
}

impl CsdForm {
    pub fn new(terms: Vec<SignedPow2>) -> Result<Self> {
        if terms.iter().any(|t| t.is_zero()) {
            return Err(domain("CSD terms must be nonzero"));
        }
        if terms.windows(2).any(|w| w[0].exponent() <= w[1].exponent()) {
            return Err(domain("CSD exponents must be strictly decreasing"));
        }
        Ok(CsdForm { terms })
    }

    pub fn terms(&self) -> &[SignedPow2] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn value<F: Real>(&self) -> F {
        self.terms.iter().map(|t| t.value::<F>()).sum()
    }
}

impl fmt::Display for CsdForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// Sign-magnitude binary expansion of `t ∈ [-1, 1]` with `num_bits`
/// fractional bits. The magnitude is truncated (rounded toward zero), which
/// makes the quantization error of a uniform `t` average `4^{-b}/3`.
pub fn binary_encode<F: Real>(t: F, num_bits: u32) -> Result<CsdForm> {
    if !(1..=64).contains(&num_bits) {
        return Err(domain(format!("num_bits must be in 1..=64, got {num_bits}")));
    }
    let mag = t.abs();
    if mag.is_nan() || mag > F::one() {
        return Err(domain(format!("binary_encode needs t in [-1, 1], got {t}")));
    }
    let scaled = (mag * F::exp2i(num_bits as i32)).floor();
    let bits = scaled.to_u128().expect("bounded by 2^64");
    let negative = t.is_sign_negative();
    let terms = (0..=num_bits)
        .rev()
        .filter(|&i| bits >> i & 1 == 1)
        .map(|i| SignedPow2::new(negative, i as i32 - num_bits as i32))
        .collect();
    Ok(CsdForm { terms })
}

/// Greedy signed-digit expansion: repeatedly takes the nearest signed power
/// of two of the residual. Stops after `max_terms` terms or at an exact fit.
///
/// Each step leaves a residual of at most a third of the previous one, so the
/// final error is bounded by `|t| / 3^len`.
pub fn csd_encode<F: Real>(t: F, max_terms: usize) -> CsdForm {
    let mut terms: Vec<SignedPow2> = Vec::with_capacity(max_terms);
    let mut residual = t;
    while terms.len() < max_terms && !residual.is_zero() {
        let q = quantize_pow2(residual).value;
        // Only reachable once the exponent range clamps.
        if terms.last().is_some_and(|last| q.exponent() >= last.exponent()) {
            break;
        }
        // Exact: |residual| lies within a factor of two of the term.
        residual -= q.value::<F>();
        terms.push(q);
    }
    CsdForm { terms }
}

pub fn csd_decode(form: &CsdForm) -> Dyadic {
    form.terms.iter().fold(Dyadic::zero(), |acc, t| acc + t.to_dyadic())
}

const CHUNK: usize = 1 << 16;

fn empirical_mse(samples: usize, seed: u64, err: impl Fn(f64) -> f64 + Sync) -> f64 {
    let chunks = samples.div_ceil(CHUNK);
    let total: f64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = rng::stream(seed, c as u64);
            let n = CHUNK.min(samples - c * CHUNK);
            (0..n)
                .map(|_| {
                    let e = err(rng.random_range(-1.0..=1.0));
                    e * e
                })
                .sum::<f64>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    total / samples as f64
}

/// Empirical mean squared error of [`csd_encode`] with `num_terms` terms for
/// `t` uniform on `[-1, 1]`. Tends to `28^{-C}/3`.
pub fn csd_empirical_mse(num_terms: usize, samples: usize, seed: u64) -> f64 {
    assert!(samples >= 1, "need at least one sample");
    empirical_mse(samples, seed, |t| t - csd_encode(t, num_terms).value::<f64>())
}

/// Empirical mean squared error of [`binary_encode`] at `num_bits` fractional
/// bits for `t` uniform on `[-1, 1]`. Tends to `4^{-b}/3`.
pub fn binary_empirical_mse(num_bits: u32, samples: usize, seed: u64) -> f64 {
    assert!(samples >= 1, "need at least one sample");
    empirical_mse(samples, seed, |t| {
        t - binary_encode(t, num_bits).expect("t in range").value::<f64>()
    })
}
