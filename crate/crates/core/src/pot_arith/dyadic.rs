//! Exact dyadic rationals `m · 2^e`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::error::{malformed, Error};
use crate::scalar::ShiftAdd;

/// An exact number `mantissa · 2^exponent`.
///
/// Always kept in canonical form: the mantissa is odd, or the value is zero
/// with exponent 0. Structural equality is therefore value equality.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Dyadic {
    mantissa: BigInt,
    exponent: i64,
}

impl Dyadic {
    pub fn new(mantissa: impl Into<BigInt>, exponent: i64) -> Self {
        let mut d = Dyadic { mantissa: mantissa.into(), exponent };
        d.normalize();
        d
    }

    /// `±2^exponent`.
    pub fn pow2(negative: bool, exponent: i64) -> Self {
        let m = if negative { -BigInt::one() } else { BigInt::one() };
        Dyadic { mantissa: m, exponent }
    }

    pub fn from_i64(v: i64) -> Self {
        Dyadic::new(v, 0)
    }

    /// Exact conversion; every finite float is dyadic. `None` for NaN/inf.
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Dyadic::zero());
        }
        let (m, e, s) = num_traits::Float::integer_decode(x);
        let m = BigInt::from(m) * i64::from(s);
        Some(Dyadic::new(m, i64::from(e)))
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn signum(&self) -> i32 {
        match self.mantissa.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        Dyadic { mantissa: self.mantissa.abs(), exponent: self.exponent }
    }

    /// Multiplies by `2^k`.
    pub fn shl(&self, k: i64) -> Self {
        if self.mantissa.is_zero() {
            return self.clone();
        }
        Dyadic { mantissa: self.mantissa.clone(), exponent: self.exponent + k }
    }

    /// Nearest-ish `f64` (at most two roundings); `±inf`/`0` outside range.
    pub fn to_f64(&self) -> f64 {
        if self.mantissa.is_zero() {
            return 0.0;
        }
        let bits = self.mantissa.bits() as i64;
        let (m, e) = if bits > 63 {
            let drop = bits - 63;
            (&self.mantissa >> (drop as usize), self.exponent + drop)
        } else {
            (self.mantissa.clone(), self.exponent)
        };
        ldexp(m.to_i64().expect("fits after truncation") as f64, e)
    }

    fn normalize(&mut self) {
        match self.mantissa.trailing_zeros() {
            None => self.exponent = 0,
            Some(0) => {}
            Some(tz) => {
                self.mantissa >>= tz as usize;
                self.exponent += tz as i64;
            }
        }
    }

    /// Parses a decimal literal (`-0.375`, `12`, `1.5e-3`) whose value has a
    /// power-of-two denominator.
    pub fn parse_decimal(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let (body, exp10) = match s.find(['e', 'E']) {
            Some(i) => {
                let e: i64 = s[i + 1..]
                    .parse()
                    .map_err(|_| malformed(format!("bad exponent in {s:?}")))?;
                (&s[..i], e)
            }
            None => (s, 0),
        };
        let (negative, body) = match body.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, body.strip_prefix('+').unwrap_or(body)),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty()
            || !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit())
        {
            return Err(malformed(format!("not a decimal number: {s:?}")));
        }
        let digits = format!("{int_part}{frac_part}");
        let mut m: BigInt = digits.parse().map_err(|_| malformed(format!("bad digits in {s:?}")))?;
        if negative {
            m = -m;
        }
        if exp10.abs() > MAX_DECIMAL_EXPONENT {
            return Err(malformed(format!("decimal exponent out of range in {s:?}")));
        }
        let e10 = exp10 - frac_part.len() as i64;
        if e10 >= 0 {
            let five = BigInt::from(5).pow(e10 as u64);
            return Ok(Dyadic::new(m * five, e10));
        }
        let five = BigInt::from(5).pow((-e10) as u64);
        let (q, r) = m.div_rem(&five);
        if !r.is_zero() {
            return Err(malformed(format!("{s:?} is not a dyadic rational")));
        }
        Ok(Dyadic::new(q, e10))
    }
}

const MAX_DECIMAL_EXPONENT: i64 = 4096;

fn ldexp(mut x: f64, mut e: i64) -> f64 {
    e = e.clamp(-2300, 2300);
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

impl Zero for Dyadic {
    fn zero() -> Self {
        Dyadic { mantissa: BigInt::zero(), exponent: 0 }
    }

    fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }
}

impl One for Dyadic {
    fn one() -> Self {
        Dyadic { mantissa: BigInt::one(), exponent: 0 }
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: &Dyadic) -> Dyadic {
        if self.mantissa.is_zero() {
            return rhs.clone();
        }
        if rhs.mantissa.is_zero() {
            return self.clone();
        }
        let e = self.exponent.min(rhs.exponent);
        let a = &self.mantissa << ((self.exponent - e) as usize);
        let b = &rhs.mantissa << ((rhs.exponent - e) as usize);
        Dyadic::new(a + b, e)
    }
}

impl Add for Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: Dyadic) -> Dyadic {
        &self + &rhs
    }
}

impl AddAssign<&Dyadic> for Dyadic {
    fn add_assign(&mut self, rhs: &Dyadic) {
        *self = &*self + rhs;
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;

    fn neg(self) -> Dyadic {
        Dyadic { mantissa: -self.mantissa, exponent: self.exponent }
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;

    fn neg(self) -> Dyadic {
        Dyadic { mantissa: -&self.mantissa, exponent: self.exponent }
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;

    fn sub(self, rhs: &Dyadic) -> Dyadic {
        self + &(-rhs)
    }
}

impl Sub for Dyadic {
    type Output = Dyadic;

    fn sub(self, rhs: Dyadic) -> Dyadic {
        &self - &rhs
    }
}

// Products only appear in reference (oracle-style) dense multiplies, never in
// the shift-add engine.
impl Mul for &Dyadic {
    type Output = Dyadic;

    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mantissa * &rhs.mantissa, self.exponent + rhs.exponent)
    }
}

impl Mul for Dyadic {
    type Output = Dyadic;

    fn mul(self, rhs: Dyadic) -> Dyadic {
        &self * &rhs
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

impl ShiftAdd for Dyadic {
    fn shift(&self, exp: i32) -> Self {
        self.shl(i64::from(exp))
    }
}

/// Exact decimal rendering (dyadic rationals have terminating expansions).
impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent >= 0 {
            return write!(f, "{}", &self.mantissa << (self.exponent as usize));
        }
        let places = (-self.exponent) as usize;
        let scaled = self.mantissa.abs() * BigInt::from(5).pow(places as u64);
        let digits = scaled.to_string();
        let sign = if self.mantissa.is_negative() { "-" } else { "" };
        if digits.len() > places {
            let (i, frac) = digits.split_at(digits.len() - places);
            write!(f, "{sign}{i}.{frac}")
        } else {
            write!(f, "{sign}0.{}{digits}", "0".repeat(places - digits.len()))
        }
    }
}

impl FromStr for Dyadic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Dyadic::parse_decimal(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form() {
        let d = Dyadic::new(12, -4);
        assert_eq!(d.mantissa(), &BigInt::from(3));
        assert_eq!(d.exponent(), -2);
        assert_eq!(Dyadic::new(0, 17), Dyadic::zero());
        assert_eq!(Dyadic::new(6, 0), Dyadic::new(3, 1));
    }

    #[test]
    fn add_aligns_exponents() {
        let a = Dyadic::new(1, 0);
        let b = Dyadic::new(-1, -2);
        assert_eq!(&a + &b, Dyadic::new(3, -2));
        assert_eq!(&a - &a, Dyadic::zero());
    }

    #[test]
    fn float_roundtrip() {
        for x in [0.0, 1.0, -0.375, 1e-300, 3.0e200, f64::MIN_POSITIVE / 8.0, 0.1] {
            assert_eq!(Dyadic::from_f64(x).unwrap().to_f64(), x);
        }
        assert!(Dyadic::from_f64(f64::NAN).is_none());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(Dyadic::new(3, -2).to_string(), "0.75");
        assert_eq!(Dyadic::new(-1, -1).to_string(), "-0.5");
        assert_eq!(Dyadic::new(5, 3).to_string(), "40");
        assert_eq!(Dyadic::new(1, -5).to_string(), "0.03125");
        assert_eq!(Dyadic::zero().to_string(), "0");
    }

    #[test]
    fn decimal_parsing() {
        assert_eq!(Dyadic::parse_decimal("-0.375").unwrap(), Dyadic::new(-3, -3));
        assert_eq!(Dyadic::parse_decimal("40").unwrap(), Dyadic::new(5, 3));
        assert!(Dyadic::parse_decimal("1.5e-1").unwrap_err().to_string().contains("dyadic"));
        assert_eq!(Dyadic::parse_decimal("3.125e-2").unwrap(), Dyadic::new(1, -5));
        assert!(Dyadic::parse_decimal("abc").is_err());
        assert!(Dyadic::parse_decimal("").is_err());
    }

    #[test]
    fn ordering() {
        assert!(Dyadic::new(1, -1) < Dyadic::new(3, -2));
        assert!(Dyadic::new(-5, 0) < Dyadic::zero());
    }
}
