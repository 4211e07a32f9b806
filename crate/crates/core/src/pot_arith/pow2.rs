use std::fmt;

use serde::{Deserialize, Serialize};

use super::Dyadic;
use crate::scalar::{Real, ShiftAdd};

/// A coefficient from the alphabet `{0, ±2^e}`. Multiplying by one is a
/// shift and an optional sign flip.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct SignedPow2 {
    sign: i8,
    exponent: i32,
}

impl SignedPow2 {
    pub const ZERO: SignedPow2 = SignedPow2 { sign: 0, exponent: 0 };
    pub const ONE: SignedPow2 = SignedPow2 { sign: 1, exponent: 0 };

    pub fn new(negative: bool, exponent: i32) -> Self {
        SignedPow2 { sign: if negative { -1 } else { 1 }, exponent }
    }

    /// Builds from a raw sign in `{-1, 0, 1}`; `None` for anything else.
    pub fn from_parts(sign: i8, exponent: i32) -> Option<Self> {
        match sign {
            0 => Some(SignedPow2::ZERO),
            1 | -1 => Some(SignedPow2 { sign, exponent }),
            _ => None,
        }
    }

    pub fn sign(self) -> i8 {
        self.sign
    }

    /// Meaningless (and reported as 0) for the zero coefficient.
    pub fn exponent(self) -> i32 {
        self.exponent
    }

    pub fn is_zero(self) -> bool {
        self.sign == 0
    }

    pub fn is_negative(self) -> bool {
        self.sign < 0
    }

    pub fn value<F: Real>(self) -> F {
        match self.sign {
            0 => F::zero(),
            s => F::lit(f64::from(s)) * F::exp2i(self.exponent),
        }
    }

    pub fn to_dyadic(self) -> Dyadic {
        match self.sign {
            0 => num_traits::Zero::zero(),
            s => Dyadic::pow2(s < 0, i64::from(self.exponent)),
        }
    }

    /// `self · x` using a shift and, for negative coefficients, a negation.
    pub fn apply<S: ShiftAdd>(self, x: &S) -> S {
        match self.sign {
            0 => S::zero(),
            s if s > 0 => x.shift(self.exponent),
            _ => -x.shift(self.exponent),
        }
    }

}

impl std::ops::Neg for SignedPow2 {
    type Output = SignedPow2;

    fn neg(self) -> Self {
        SignedPow2 { sign: -self.sign, exponent: self.exponent }
    }
}

impl fmt::Display for SignedPow2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            0 => write!(f, "0"),
            s => write!(f, "{}2^{}", if s > 0 { '+' } else { '-' }, self.exponent),
        }
    }
}

/// Inclusive exponent range coefficients are clamped to.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Pow2Range {
    pub min_exp: i32,
    pub max_exp: i32,
}

impl Default for Pow2Range {
    fn default() -> Self {
        Pow2Range { min_exp: -64, max_exp: 63 }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Quantized {
    pub value: SignedPow2,
    /// The unclamped exponent fell outside the range.
    pub clamped: bool,
}

/// Nearest signed power of two under the default exponent range.
pub fn quantize_pow2<F: Real>(x: F) -> Quantized {
    quantize_pow2_in(x, Pow2Range::default())
}

/// Nearest signed power of two: with `p = 2^⌊log2|x|⌋`, returns `2p` when
/// `|x| ≥ 1.5p` and `p` otherwise. The comparison is done on the exact
/// binary mantissa, so the midpoint tie always goes to the larger exponent.
pub fn quantize_pow2_in<F: Real>(x: F, range: Pow2Range) -> Quantized {
    if x.is_nan() || x.is_zero() {
        return Quantized { value: SignedPow2::ZERO, clamped: x.is_nan() };
    }
    let negative = x.is_sign_negative();
    let exponent = if x.is_infinite() {
        i64::MAX
    } else {
        let (mant, exp, _) = x.integer_decode();
        let bitlen = 64 - i64::from(mant.leading_zeros());
        let floor_log2 = i64::from(exp) + bitlen - 1;
        let round_up = bitlen >= 2 && mant >= 3u64 << (bitlen - 2);
        floor_log2 + i64::from(round_up)
    };
    let clamped_exp = exponent.clamp(i64::from(range.min_exp), i64::from(range.max_exp));
    Quantized {
        value: SignedPow2::new(negative, clamped_exp as i32),
        clamped: clamped_exp != exponent,
    }
}
