//! Exact arithmetic for energies.
//!
//! Every energy on G(k,n) is affine in (ε, h) with integer coefficients, so it
//! is stored as the triple (A, B, C) with H = A + Bε + Ch and evaluated either
//! exactly over rationals or in double precision.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = Rational64;

/// `num / den` as a rational.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(num, den)
}

pub fn to_f64(r: Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Parses `"-0.6"`, `"3/5"`, `"1e-2"` or `"2"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let err = || Error::Parse(s.to_string());
    let t = s.trim();
    if t.is_empty() {
        return Err(err());
    }
    if let Some((num, den)) = t.split_once('/') {
        let num: i64 = num.trim().parse().map_err(|_| err())?;
        let den: i64 = den.trim().parse().map_err(|_| err())?;
        if den == 0 {
            return Err(err());
        }
        return Ok(Rational::new(num, den));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| err())?),
        None => (t, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut num: i64 = if all.is_empty() { 0 } else { all.parse().map_err(|_| err())? };
    if negative {
        num = -num;
    }
    let scale = exp - frac_part.len() as i32;
    let pow = |e: u32| 10i64.checked_pow(e).ok_or_else(err);
    if scale >= 0 {
        let p = pow(scale as u32)?;
        Ok(Rational::from_integer(num.checked_mul(p).ok_or_else(err)?))
    } else {
        Ok(Rational::new(num, pow((-scale) as u32)?))
    }
}

/// Formats a rational as `"p/q"` or `"p"`.
pub fn format_rational(r: Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Serde adapter storing a rational as its string form.
pub mod serde_rational {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(*r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Energy `constant + epsilon·ε + field·h` with integer coefficients.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Affine {
    pub constant: i64,
    pub epsilon: i64,
    pub field: i64,
}

impl Affine {
    pub const ZERO: Affine = Affine { constant: 0, epsilon: 0, field: 0 };

    pub const fn new(constant: i64, epsilon: i64, field: i64) -> Self {
        Affine { constant, epsilon, field }
    }

    pub fn eval(&self, eps: Rational, h: Rational) -> Rational {
        Rational::from_integer(self.constant) + eps * self.epsilon + h * self.field
    }

    pub fn eval_f64(&self, eps: f64, h: f64) -> f64 {
        self.constant as f64 + self.epsilon as f64 * eps + self.field as f64 * h
    }

    /// Positive part `[self]₊` evaluated in double precision, with the sign
    /// decided exactly.
    pub fn positive_part_f64(&self, eps: Rational, h: Rational) -> f64 {
        let v = self.eval(eps, h);
        if v.is_positive() {
            to_f64(v)
        } else {
            0.0
        }
    }

    pub fn is_zero_at(&self, eps: Rational, h: Rational) -> bool {
        self.eval(eps, h).is_zero()
    }

    pub fn abs_at(&self, eps: Rational, h: Rational) -> Rational {
        self.eval(eps, h).abs()
    }
}

impl Add for Affine {
    type Output = Affine;
    fn add(self, o: Affine) -> Affine {
        Affine::new(self.constant + o.constant, self.epsilon + o.epsilon, self.field + o.field)
    }
}

impl AddAssign for Affine {
    fn add_assign(&mut self, o: Affine) {
        *self = *self + o;
    }
}

impl Sub for Affine {
    type Output = Affine;
    fn sub(self, o: Affine) -> Affine {
        self + (-o)
    }
}

impl Neg for Affine {
    type Output = Affine;
    fn neg(self) -> Affine {
        Affine::new(-self.constant, -self.epsilon, -self.field)
    }
}

impl Mul<i64> for Affine {
    type Output = Affine;
    fn mul(self, k: i64) -> Affine {
        Affine::new(self.constant * k, self.epsilon * k, self.field * k)
    }
}

impl fmt::Display for Affine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.constant)?;
        for (c, sym) in [(self.epsilon, "ε"), (self.field, "h")] {
            match c {
                0 => {}
                c if c < 0 => write!(f, " - {}{sym}", -c)?,
                c => write!(f, " + {c}{sym}")?,
            }
        }
        Ok(())
    }
}
