//! Coefficient scalars for polynomials and numeric evaluation.
//!
//! Two modes are supported: exact rationals ([`Rat`]) for certificate
//! verification, and `f64` for SDP assembly. Conversions between the modes
//! are explicit ([`Coeff::to_f64`], [`crate::algebra::StatePoly::to_float`]).

use num::BigRational;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar.
pub type Rat = BigRational;

/// Scalar type usable as a polynomial coefficient and as a matrix entry
/// during evaluation.
pub trait Coeff:
    Clone
    + PartialEq
    + std::fmt::Debug
    + std::fmt::Display
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Neg<Output = Self>
    + Zero
    + One
    + Send
    + Sync
    + 'static
{
    fn from_i64(v: i64) -> Self;

    /// Magnitude used for tolerance checks; exact types report an exact
    /// conversion of their absolute value.
    fn abs_f64(&self) -> f64;

    /// Lossy conversion for reporting and mode switching.
    fn to_f64(&self) -> f64;
}

impl Coeff for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn abs_f64(&self) -> f64 {
        self.abs()
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Coeff for Rat {
    fn from_i64(v: i64) -> Self {
        Rat::from_integer(v.into())
    }
    fn abs_f64(&self) -> f64 {
        ToPrimitive::to_f64(&self.abs()).unwrap_or(f64::INFINITY)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

impl Coeff for Complex64 {
    fn from_i64(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }
    fn abs_f64(&self) -> f64 {
        self.norm()
    }
    fn to_f64(&self) -> f64 {
        self.re
    }
}

/// Parses a coefficient literal: integer, `p/q` fraction, or decimal.
/// Decimals convert exactly into rationals (`0.25` becomes `1/4`).
pub fn rat_from_str(s: &str) -> Option<Rat> {
    use num::BigInt;
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Rat::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let int_part: BigInt = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            int.parse().ok()?
        };
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let num: BigInt = frac.parse().ok()?;
        let den = num::pow::pow(BigInt::from(10u8), frac.len());
        let abs = Rat::new(int_part.abs() * &den + num, den);
        return Some(if neg { -abs } else { abs });
    }
    let p: BigInt = s.parse().ok()?;
    Some(Rat::from_integer(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_literals() {
        assert_eq!(rat_from_str("3/8"), Some(Rat::new(3.into(), 8.into())));
        assert_eq!(rat_from_str("0.25"), Some(Rat::new(1.into(), 4.into())));
        assert_eq!(rat_from_str("-1.5"), Some(Rat::new((-3).into(), 2.into())));
        assert_eq!(rat_from_str("7"), Some(Rat::from_integer(7.into())));
        assert_eq!(rat_from_str("1/0"), None);
    }
}
