//! Exact arithmetic in quadratic number fields Q(sqrt(m)).
//!
//! [`QuadNum`] stores a + b*sqrt(m) with rational a, b and a squarefree
//! integer radicand m. Negative m (imaginary quadratic fields) is allowed;
//! m = 0 encodes a plain rational. Mixing two different nonzero radicands
//! in one operation is a programming error and panics.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Rational from an integer.
pub fn rat_i(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Rational n/d.
pub fn rat_pair(n: i64, d: i64) -> BigRational {
    debug_assert!(d != 0);
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Write n = s^2 * m with m squarefree (m carries the sign of n).
///
/// Factors by trial division; a leftover cofactor that is neither 1 nor a
/// perfect square is accepted as squarefree when it is small enough to
/// contain no square of a prime above the trial bound, otherwise the input
/// is rejected as too large to factor.
pub fn factor_squarefree(n: &BigInt) -> Result<(BigInt, i64)> {
    if n.is_zero() {
        return Ok((BigInt::zero(), 0));
    }
    let neg = n.is_negative();
    let mut rem = n.abs();
    let mut s = BigInt::one();
    let mut m: i64 = 1;
    let bound: u64 = 1_000_000;
    let mut p: u64 = 2;
    while p <= bound {
        let bp = BigInt::from(p);
        if (&rem % &bp).is_zero() {
            let mut e = 0u64;
            while (&rem % &bp).is_zero() {
                rem /= &bp;
                e += 1;
            }
            if e >= 2 {
                s *= bp.pow((e / 2) as u32);
            }
            if e % 2 == 1 {
                m = m
                    .checked_mul(p as i64)
                    .ok_or_else(|| Error::Capacity("squarefree radicand exceeds i64".into()))?;
            }
        }
        // Skip even candidates after 2.
        p = if p == 2 { 3 } else { p + 2 };
        if rem == BigInt::one() {
            break;
        }
    }
    if !rem.is_one() {
        let r = rem.sqrt();
        if &r * &r == rem {
            s *= r;
        } else if rem < BigInt::from(bound).pow(2) {
            // No prime factor exceeds the trial bound squared, so any square
            // divisor would have been found already: rem is squarefree.
            let rr = rem
                .to_i64()
                .ok_or_else(|| Error::Capacity("squarefree radicand exceeds i64".into()))?;
            m = m
                .checked_mul(rr)
                .ok_or_else(|| Error::Capacity("squarefree radicand exceeds i64".into()))?;
        } else {
            return Err(Error::Capacity(format!(
                "cannot certify squarefree part of {}",
                n
            )));
        }
    }
    if neg {
        m = -m;
    }
    Ok((s, m))
}

/// Exact square root of a rational as coef*sqrt(rad), rad squarefree >= 0
/// in absolute value (negative rad encodes an imaginary result).
pub fn sqrt_rational(q: &BigRational) -> Result<QuadNum> {
    if q.is_zero() {
        return Ok(QuadNum::zero());
    }
    // sqrt(n/d) = sqrt(n*d)/d.
    let nd = q.numer() * q.denom();
    let (s, m) = factor_squarefree(&nd)?;
    let coef = BigRational::new(s, q.denom().clone());
    if m == 1 {
        Ok(QuadNum::from_rational(coef))
    } else {
        Ok(QuadNum::new(BigRational::zero(), coef, m))
    }
}

/// a + b*sqrt(m) with squarefree radicand m (0 when the value is rational).
#[derive(Clone, PartialEq, Eq)]
pub struct QuadNum {
    pub a: BigRational,
    pub b: BigRational,
    pub m: i64,
}

impl QuadNum {
    /// Build and normalize: b = 0 or m in {0, 1} collapse to a rational.
    pub fn new(a: BigRational, b: BigRational, m: i64) -> Self {
        if b.is_zero() || m == 0 {
            return QuadNum {
                a,
                b: BigRational::zero(),
                m: 0,
            };
        }
        if m == 1 {
            return QuadNum {
                a: a + b,
                b: BigRational::zero(),
                m: 0,
            };
        }
        QuadNum { a, b, m }
    }

    pub fn from_rational(a: BigRational) -> Self {
        QuadNum {
            a,
            b: BigRational::zero(),
            m: 0,
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(rat_i(n))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    /// The rational part when the value is rational, else None.
    pub fn as_rational(&self) -> Option<&BigRational> {
        if self.is_rational() {
            Some(&self.a)
        } else {
            None
        }
    }

    fn joint_radicand(&self, other: &Self) -> i64 {
        match (self.m, other.m) {
            (0, m) | (m, 0) => m,
            (m1, m2) => {
                assert!(m1 == m2, "mixed radicands {} and {}", m1, m2);
                m1
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let m = self.joint_radicand(o);
        QuadNum::new(&self.a + &o.a, &self.b + &o.b, m)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let m = self.joint_radicand(o);
        QuadNum::new(&self.a - &o.a, &self.b - &o.b, m)
    }

    pub fn neg(&self) -> Self {
        QuadNum::new(-self.a.clone(), -self.b.clone(), self.m)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let m = self.joint_radicand(o);
        let a = &self.a * &o.a + &self.b * &o.b * rat_i(m);
        let b = &self.a * &o.b + &self.b * &o.a;
        QuadNum::new(a, b, m)
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        QuadNum::new(&self.a * q, &self.b * q, self.m)
    }

    /// Galois conjugate a - b*sqrt(m).
    pub fn conj(&self) -> Self {
        QuadNum::new(self.a.clone(), -self.b.clone(), self.m)
    }

    /// Field norm a^2 - m*b^2 (a rational number).
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.b * &self.b * rat_i(self.m)
    }

    pub fn inv(&self) -> Self {
        assert!(!self.is_zero(), "division by zero");
        let n = self.norm();
        self.conj().scale(&n.recip())
    }

    pub fn div(&self, o: &Self) -> Self {
        self.mul(&o.inv())
    }

    pub fn powi(&self, e: i64) -> Self {
        if e < 0 {
            return self.inv().powi(-e);
        }
        let mut base = self.clone();
        let mut e = e as u64;
        let mut acc = QuadNum::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Numeric value as (re, im) doubles. Intended for display and for
    /// coarse checks; exact routines never round through this.
    pub fn to_f64_pair(&self) -> (f64, f64) {
        let a = self.a.to_f64().unwrap_or(f64::NAN);
        let b = self.b.to_f64().unwrap_or(f64::NAN);
        if self.m >= 0 {
            (a + b * (self.m as f64).sqrt(), 0.0)
        } else {
            (a, b * ((-self.m) as f64).sqrt())
        }
    }
}

impl fmt::Display for QuadNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        if self.a.is_zero() {
            return write!(f, "{}*sqrt({})", self.b, self.m);
        }
        if self.b.is_negative() {
            write!(f, "{} - {}*sqrt({})", self.a, -self.b.clone(), self.m)
        } else {
            write!(f, "{} + {}*sqrt({})", self.a, self.b, self.m)
        }
    }
}

impl fmt::Debug for QuadNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// Roots of a quadratic c2*y^2 + c1*y + c0 with rational coefficients,
/// returned exactly in the field Q(sqrt(m)) determined by the discriminant.
/// The boolean is true when the root is a double root.
pub fn quadratic_roots(
    c2: &BigRational,
    c1: &BigRational,
    c0: &BigRational,
) -> Result<(QuadNum, QuadNum, bool)> {
    assert!(!c2.is_zero(), "leading coefficient is zero");
    let disc = c1 * c1 - rat_i(4) * c2 * c0;
    let half = rat_pair(1, 2) / c2;
    if disc.is_zero() {
        let r = QuadNum::from_rational(-c1 * &half);
        return Ok((r.clone(), r, true));
    }
    let sq = sqrt_rational(&disc)?;
    let minus_c1 = QuadNum::from_rational(-c1.clone());
    let r1 = minus_c1.add(&sq).scale(&half);
    let r2 = minus_c1.sub(&sq).scale(&half);
    Ok((r1, r2, false))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squarefree_extraction() {
        let (s, m) = factor_squarefree(&BigInt::from(648)).unwrap();
        assert_eq!((s, m), (BigInt::from(18), 2));
        let (s, m) = factor_squarefree(&BigInt::from(-8)).unwrap();
        assert_eq!((s, m), (BigInt::from(2), -2));
        let (s, m) = factor_squarefree(&BigInt::from(1)).unwrap();
        assert_eq!((s, m), (BigInt::from(1), 1));
    }

    #[test]
    fn field_arithmetic() {
        // (1 + sqrt(-2))^2 = -1 + 2*sqrt(-2)
        let x = QuadNum::new(rat_i(1), rat_i(1), -2);
        let sq = x.mul(&x);
        assert_eq!(sq, QuadNum::new(rat_i(-1), rat_i(2), -2));
        // and its 6th power divided by 3^6 is (329 - 460*sqrt(-2))/729
        // up to conjugation: (1+i*sqrt2)^12 = 329 - 460*i*sqrt2... check powi
        let p12 = x.powi(12);
        assert_eq!(p12, QuadNum::new(rat_i(329), rat_i(-460), -2));
        assert_eq!(x.mul(&x.inv()), QuadNum::one());
    }

    #[test]
    fn quadratic_root_fields() {
        // 6u^2 - 44u + 81 has roots (22 +- i*sqrt2)/6.
        let (r1, r2, dbl) = quadratic_roots(&rat_i(6), &rat_i(-44), &rat_i(81)).unwrap();
        assert!(!dbl);
        assert_eq!(r1, QuadNum::new(rat_pair(22, 6), rat_pair(1, 6), -2));
        assert_eq!(r2, QuadNum::new(rat_pair(22, 6), rat_pair(-1, 6), -2));
        // 25u^2 - 360u + 1296 has the double root 36/5.
        let (r1, _r2, dbl) = quadratic_roots(&rat_i(25), &rat_i(-360), &rat_i(1296)).unwrap();
        assert!(dbl);
        assert_eq!(r1, QuadNum::from_rational(rat_pair(36, 5)));
    }
}
