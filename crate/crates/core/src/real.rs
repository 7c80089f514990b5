//! Arbitrary-precision real and complex arithmetic.
//!
//! Thin ergonomic layer over `astro_float::BigFloat`: a [`RealCtx`] fixes
//! the working precision, rounding mode and shared constants cache, and
//! every operation goes through it. [`Cx`] is a complex number built from
//! two `BigFloat`s with the usual field and transcendental operations.

use std::cell::RefCell;
use std::cmp::Ordering;

pub use astro_float::BigFloat;

use astro_float::{Consts, Exponent, Radix, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Shared precision context. All results carry `p` bits of mantissa.
pub struct RealCtx {
    pub p: usize,
    rm: RoundingMode,
    cc: RefCell<Consts>,
}

impl RealCtx {
    /// Context with `p` bits of working precision (at least 64).
    pub fn new(p: usize) -> Self {
        RealCtx {
            p: p.max(64),
            rm: RoundingMode::ToEven,
            cc: RefCell::new(Consts::new().expect("constants cache")),
        }
    }

    /// Context sized for roughly `digits` significant decimal digits,
    /// with guard bits for intermediate rounding.
    pub fn with_decimal_digits(digits: usize) -> Self {
        Self::new(digits * 10 / 3 + 96)
    }

    pub fn zero(&self) -> BigFloat {
        BigFloat::from_f64(0.0, self.p)
    }

    pub fn one(&self) -> BigFloat {
        BigFloat::from_f64(1.0, self.p)
    }

    pub fn f(&self, v: f64) -> BigFloat {
        BigFloat::from_f64(v, self.p)
    }

    pub fn pi(&self) -> BigFloat {
        self.cc.borrow_mut().pi(self.p, self.rm)
    }

    /// Exact power of two, 2^k.
    pub fn two_pow(&self, k: i64) -> BigFloat {
        let mut x = self.f(0.5);
        let e: Exponent = (k + 1).try_into().expect("exponent out of range");
        x.set_exponent(e);
        x
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.p, self.rm)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.p, self.rm)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.p, self.rm)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.p, self.rm)
    }

    pub fn neg(&self, a: &BigFloat) -> BigFloat {
        let mut x = a.clone();
        x.inv_sign();
        x
    }

    pub fn sqrt(&self, a: &BigFloat) -> BigFloat {
        a.sqrt(self.p, self.rm)
    }

    pub fn exp(&self, a: &BigFloat) -> BigFloat {
        a.exp(self.p, self.rm, &mut self.cc.borrow_mut())
    }

    pub fn ln(&self, a: &BigFloat) -> BigFloat {
        a.ln(self.p, self.rm, &mut self.cc.borrow_mut())
    }

    pub fn sin(&self, a: &BigFloat) -> BigFloat {
        a.sin(self.p, self.rm, &mut self.cc.borrow_mut())
    }

    pub fn cos(&self, a: &BigFloat) -> BigFloat {
        a.cos(self.p, self.rm, &mut self.cc.borrow_mut())
    }

    pub fn atan(&self, a: &BigFloat) -> BigFloat {
        a.atan(self.p, self.rm, &mut self.cc.borrow_mut())
    }

    pub fn acos(&self, a: &BigFloat) -> BigFloat {
        a.acos(self.p, self.rm, &mut self.cc.borrow_mut())
    }

    pub fn powi(&self, a: &BigFloat, n: i64) -> BigFloat {
        if n < 0 {
            let x = self.powi(a, -n);
            return self.div(&self.one(), &x);
        }
        a.powi(n as usize, self.p, self.rm)
    }

    /// a^q for positive a and rational q, via exp(q ln a).
    pub fn pow_rat(&self, a: &BigFloat, q: &BigRational) -> BigFloat {
        debug_assert!(self.cmp(a, &self.zero()) == Ordering::Greater);
        let e = self.mul(&self.rational(q), &self.ln(a));
        self.exp(&e)
    }

    pub fn abs(&self, a: &BigFloat) -> BigFloat {
        a.abs()
    }

    pub fn cmp(&self, a: &BigFloat, b: &BigFloat) -> Ordering {
        match a.cmp(b) {
            Some(s) if s < 0 => Ordering::Less,
            Some(s) if s > 0 => Ordering::Greater,
            _ => Ordering::Equal,
        }
    }

    pub fn is_zero(&self, a: &BigFloat) -> bool {
        a.is_zero()
    }

    /// atan2(y, x) with the usual quadrant conventions, range (-pi, pi].
    pub fn atan2(&self, y: &BigFloat, x: &BigFloat) -> BigFloat {
        let zero = self.zero();
        if self.is_zero(x) {
            let half_pi = self.div(&self.pi(), &self.f(2.0));
            return match self.cmp(y, &zero) {
                Ordering::Greater => half_pi,
                Ordering::Less => self.neg(&half_pi),
                Ordering::Equal => zero,
            };
        }
        let base = self.atan(&self.div(y, x));
        match self.cmp(x, &zero) {
            Ordering::Greater => base,
            _ => {
                if self.cmp(y, &zero) == Ordering::Less {
                    self.sub(&base, &self.pi())
                } else {
                    self.add(&base, &self.pi())
                }
            }
        }
    }

    /// Nonnegative big integer to float (top 192 bits kept exactly, which
    /// is far below the rounding error of any later operation at p >= 200).
    fn biguint(&self, n: &BigUint) -> BigFloat {
        if n.is_zero() {
            return self.zero();
        }
        let bits = n.bits();
        let keep: u64 = 192;
        let (top, shift) = if bits > keep {
            ((n >> (bits - keep)).clone(), bits - keep)
        } else {
            (n.clone(), 0)
        };
        let two32 = self.f(4294967296.0);
        let mut x = self.zero();
        for d in top.iter_u64_digits().rev() {
            let hi = self.f((d >> 32) as f64);
            let lo = self.f((d & 0xffff_ffff) as f64);
            // x = x*2^64 + d
            x = self.mul(&x, &two32);
            x = self.mul(&x, &two32);
            x = self.add(&x, &self.add(&self.mul(&hi, &two32), &lo));
        }
        if shift > 0 {
            x = self.mul(&x, &self.two_pow(shift as i64));
        }
        x
    }

    pub fn bigint(&self, n: &BigInt) -> BigFloat {
        let x = self.biguint(n.magnitude());
        if n.is_negative() {
            self.neg(&x)
        } else {
            x
        }
    }

    pub fn rational(&self, q: &BigRational) -> BigFloat {
        self.div(&self.bigint(q.numer()), &self.bigint(q.denom()))
    }

    /// Round-to-double for display and coarse comparisons.
    pub fn to_f64(&self, a: &BigFloat) -> f64 {
        if a.is_zero() {
            return 0.0;
        }
        if a.is_nan() {
            return f64::NAN;
        }
        if a.is_inf_pos() {
            return f64::INFINITY;
        }
        if a.is_inf_neg() {
            return f64::NEG_INFINITY;
        }
        let (words, _n, sign, exp, _inexact) = a.as_raw_parts().expect("finite");
        let mut frac = 0.0f64;
        let mut scale = 0.5f64 / (u64::MAX as f64 + 1.0) * 2.0;
        for w in words.iter().rev().take(2) {
            frac += (*w as f64) * scale;
            scale /= u64::MAX as f64 + 1.0;
        }
        let v = frac * 2f64.powi(exp);
        if sign == Sign::Neg {
            -v
        } else {
            v
        }
    }

    /// ln|x| as a double, defined for nonzero x.
    pub fn ln_abs_f64(&self, a: &BigFloat) -> f64 {
        debug_assert!(!a.is_zero());
        let (words, _n, _s, exp, _i) = a.as_raw_parts().expect("finite");
        let top = *words.last().unwrap() as f64 / (u64::MAX as f64 + 1.0);
        top.ln() + (exp as f64) * std::f64::consts::LN_2
    }

    /// Decimal rendering with `digits` significant digits, scientific form.
    /// Exact and deterministic: the dyadic mantissa is scaled by a power of
    /// ten with big-integer arithmetic and rounded once.
    pub fn fmt_dec(&self, a: &BigFloat, digits: usize) -> String {
        let digits = digits.max(1);
        if a.is_zero() {
            return "0".into();
        }
        if a.is_nan() {
            return "nan".into();
        }
        if a.is_inf_pos() {
            return "inf".into();
        }
        if a.is_inf_neg() {
            return "-inf".into();
        }
        let (words, _n, sign, exp, _inexact) = a.as_raw_parts().expect("finite");
        let mut bytes = Vec::with_capacity(words.len() * 8);
        for w in words {
            bytes.extend_from_slice(&w.to_le_bytes());
        }
        let mant = BigUint::from_bytes_le(&bytes);
        // value = mant * 2^(exp - 64*words)
        let e2: i64 = exp as i64 - 64 * words.len() as i64;
        // decimal exponent estimate of |value|
        let log10 = ((mant.bits() as f64) + e2 as f64) * std::f64::consts::LOG10_2;
        let mut d10 = log10.floor() as i64;
        loop {
            // y = round(|value| * 10^(digits-1-d10)) should have `digits` digits
            let k = digits as i64 - 1 - d10;
            let mut num = BigInt::from(mant.clone());
            let mut den = BigInt::from(1u32);
            if e2 >= 0 {
                num <<= e2 as u64;
            } else {
                den <<= (-e2) as u64;
            }
            if k >= 0 {
                num *= BigInt::from(10u32).pow(k as u32);
            } else {
                den *= BigInt::from(10u32).pow((-k) as u32);
            }
            let y = BigRational::new(num, den).round().to_integer();
            let s = y.to_string();
            if s.len() > digits {
                d10 += 1;
                continue;
            }
            if s.len() < digits {
                d10 -= 1;
                continue;
            }
            let mut out = String::new();
            if sign == Sign::Neg {
                out.push('-');
            }
            out.push_str(&s[..1]);
            if digits > 1 {
                out.push('.');
                out.push_str(&s[1..]);
            }
            out.push('e');
            out.push_str(&d10.to_string());
            return out;
        }
    }

    /// Parse a decimal literal at context precision.
    pub fn parse(&self, s: &str) -> BigFloat {
        BigFloat::parse(s, Radix::Dec, self.p, self.rm, &mut self.cc.borrow_mut())
    }

    /// Gamma function for positive real argument, by Spouge's expansion.
    /// Truncation error is below 2^-p; the alternating sum cancels by
    /// roughly e^0.3a, so it is evaluated at elevated internal precision.
    pub fn gamma(&self, z: &BigFloat) -> BigFloat {
        debug_assert!(self.cmp(z, &self.zero()) == Ordering::Greater);
        let a = self.p * 2 / 5 + 12;
        let ctx = RealCtx::new(self.p + a + 64);
        // Spouge: Gamma(z) = (z-1+a)^(z-1/2) e^(-(z-1+a)) [c0 + sum ck/(z-1+k)]
        let zm1 = ctx.sub(z, &ctx.one());
        let two_pi = ctx.mul(&ctx.f(2.0), &ctx.pi());
        let mut acc = ctx.sqrt(&two_pi);
        let mut fact = ctx.one();
        for k in 1..a {
            if k > 1 {
                fact = ctx.mul(&fact, &ctx.f((k - 1) as f64));
            }
            let amk = ctx.f((a - k) as f64);
            // ck = (-1)^(k-1)/(k-1)! * (a-k)^(k-1/2) * e^(a-k)
            let pw = ctx.exp(&ctx.mul(&ctx.f(k as f64 - 0.5), &ctx.ln(&amk)));
            let mut ck = ctx.div(&ctx.mul(&pw, &ctx.exp(&amk)), &fact);
            if k % 2 == 0 {
                ck = ctx.neg(&ck);
            }
            let denom = ctx.add(&zm1, &ctx.f(k as f64));
            acc = ctx.add(&acc, &ctx.div(&ck, &denom));
        }
        let za = ctx.add(&zm1, &ctx.f(a as f64));
        let pw = ctx.exp(&ctx.mul(&ctx.sub(z, &ctx.f(0.5)), &ctx.ln(&za)));
        let g = ctx.mul(&ctx.mul(&pw, &ctx.exp(&ctx.neg(&za))), &acc);
        self.add(&g, &self.zero())
    }
}

/// Complex number on top of `BigFloat`.
#[derive(Clone, Debug)]
pub struct Cx {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl Cx {
    pub fn new(re: BigFloat, im: BigFloat) -> Self {
        Cx { re, im }
    }

    pub fn real(ctx: &RealCtx, re: BigFloat) -> Self {
        Cx { re, im: ctx.zero() }
    }

    pub fn from_f64(ctx: &RealCtx, re: f64, im: f64) -> Self {
        Cx {
            re: ctx.f(re),
            im: ctx.f(im),
        }
    }

    pub fn add(&self, ctx: &RealCtx, o: &Cx) -> Cx {
        Cx::new(ctx.add(&self.re, &o.re), ctx.add(&self.im, &o.im))
    }

    pub fn sub(&self, ctx: &RealCtx, o: &Cx) -> Cx {
        Cx::new(ctx.sub(&self.re, &o.re), ctx.sub(&self.im, &o.im))
    }

    pub fn mul(&self, ctx: &RealCtx, o: &Cx) -> Cx {
        Cx::new(
            ctx.sub(&ctx.mul(&self.re, &o.re), &ctx.mul(&self.im, &o.im)),
            ctx.add(&ctx.mul(&self.re, &o.im), &ctx.mul(&self.im, &o.re)),
        )
    }

    pub fn conj(&self, ctx: &RealCtx) -> Cx {
        Cx::new(self.re.clone(), ctx.neg(&self.im))
    }

    pub fn scale(&self, ctx: &RealCtx, s: &BigFloat) -> Cx {
        Cx::new(ctx.mul(&self.re, s), ctx.mul(&self.im, s))
    }

    pub fn abs2(&self, ctx: &RealCtx) -> BigFloat {
        ctx.add(&ctx.mul(&self.re, &self.re), &ctx.mul(&self.im, &self.im))
    }

    pub fn abs(&self, ctx: &RealCtx) -> BigFloat {
        ctx.sqrt(&self.abs2(ctx))
    }

    pub fn arg(&self, ctx: &RealCtx) -> BigFloat {
        ctx.atan2(&self.im, &self.re)
    }

    pub fn div(&self, ctx: &RealCtx, o: &Cx) -> Cx {
        let n2 = o.abs2(ctx);
        let num = self.mul(ctx, &o.conj(ctx));
        Cx::new(ctx.div(&num.re, &n2), ctx.div(&num.im, &n2))
    }

    pub fn neg(&self, ctx: &RealCtx) -> Cx {
        Cx::new(ctx.neg(&self.re), ctx.neg(&self.im))
    }

    /// exp(self).
    pub fn exp(&self, ctx: &RealCtx) -> Cx {
        let r = ctx.exp(&self.re);
        Cx::new(
            ctx.mul(&r, &ctx.cos(&self.im)),
            ctx.mul(&r, &ctx.sin(&self.im)),
        )
    }

    /// Principal logarithm: ln|z| + i arg(z), arg in (-pi, pi].
    pub fn ln(&self, ctx: &RealCtx) -> Cx {
        Cx::new(ctx.ln(&self.abs(ctx)), self.arg(ctx))
    }

    /// Principal square root.
    pub fn sqrt(&self, ctx: &RealCtx) -> Cx {
        let l = self.ln(ctx);
        l.scale(ctx, &ctx.f(0.5)).exp(ctx)
    }

    pub fn powi(&self, ctx: &RealCtx, n: i64) -> Cx {
        if n < 0 {
            let inv = Cx::real(ctx, ctx.one()).div(ctx, self);
            return inv.powi(ctx, -n);
        }
        let mut acc = Cx::real(ctx, ctx.one());
        let mut base = self.clone();
        let mut e = n as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(ctx, &base);
            }
            base = base.mul(ctx, &base);
            e >>= 1;
        }
        acc
    }

    pub fn to_f64_pair(&self, ctx: &RealCtx) -> (f64, f64) {
        (ctx.to_f64(&self.re), ctx.to_f64(&self.im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn two_pow_and_bigint() {
        let ctx = RealCtx::new(256);
        assert_eq!(ctx.to_f64(&ctx.two_pow(10)), 1024.0);
        assert_eq!(ctx.to_f64(&ctx.two_pow(-3)), 0.125);
        let n = BigInt::from(3u32).pow(100);
        let x = ctx.bigint(&n);
        let expect = 100.0 * 3f64.ln();
        assert!(close(ctx.ln_abs_f64(&x), expect, 1e-12));
        assert_eq!(ctx.to_f64(&ctx.bigint(&BigInt::from(-12345))), -12345.0);
    }

    #[test]
    fn rational_and_fmt() {
        let ctx = RealCtx::new(256);
        let q = BigRational::new(BigInt::from(1), BigInt::from(3));
        let x = ctx.rational(&q);
        assert!(close(ctx.to_f64(&x), 1.0 / 3.0, 1e-15));
        assert_eq!(ctx.fmt_dec(&x, 10), "3.333333333e-1");
        assert_eq!(ctx.fmt_dec(&ctx.f(-2.5), 3), "-2.50e0");
        assert_eq!(ctx.fmt_dec(&ctx.zero(), 5), "0");
        // 1e5 exactly
        assert_eq!(ctx.fmt_dec(&ctx.f(100000.0), 6), "1.00000e5");
    }

    #[test]
    fn atan2_quadrants() {
        let ctx = RealCtx::new(192);
        let pi = std::f64::consts::PI;
        let cases = [
            (1.0, 1.0, pi / 4.0),
            (1.0, -1.0, 3.0 * pi / 4.0),
            (-1.0, -1.0, -3.0 * pi / 4.0),
            (-1.0, 1.0, -pi / 4.0),
            (1.0, 0.0, pi / 2.0),
        ];
        for (y, x, want) in cases {
            let got = ctx.to_f64(&ctx.atan2(&ctx.f(y), &ctx.f(x)));
            assert!(close(got, want, 1e-14), "atan2({y},{x})={got} want {want}");
        }
    }

    #[test]
    fn complex_ops() {
        let ctx = RealCtx::new(192);
        // (1+2i)(3-i) = 5+5i
        let a = Cx::from_f64(&ctx, 1.0, 2.0);
        let b = Cx::from_f64(&ctx, 3.0, -1.0);
        let (re, im) = a.mul(&ctx, &b).to_f64_pair(&ctx);
        assert!(close(re, 5.0, 1e-14) && close(im, 5.0, 1e-14));
        // exp(i pi) = -1
        let ipi = Cx::new(ctx.zero(), ctx.pi());
        let (re, im) = ipi.exp(&ctx).to_f64_pair(&ctx);
        assert!(close(re, -1.0, 1e-14) && im.abs() < 1e-30);
        // sqrt(-4) = 2i
        let m4 = Cx::from_f64(&ctx, -4.0, 0.0);
        let (re, im) = m4.sqrt(&ctx).to_f64_pair(&ctx);
        assert!(re.abs() < 1e-30 && close(im, 2.0, 1e-14));
        // division round trip
        let q = a.div(&ctx, &b).mul(&ctx, &b);
        let (re, im) = q.to_f64_pair(&ctx);
        assert!(close(re, 1.0, 1e-14) && close(im, 2.0, 1e-14));
    }

    #[test]
    fn gamma_values() {
        let ctx = RealCtx::new(256);
        // Gamma(1/2) = sqrt(pi)
        let g = ctx.gamma(&ctx.f(0.5));
        let d = ctx.sub(&g, &ctx.sqrt(&ctx.pi()));
        assert!(ctx.cmp(&ctx.abs(&d), &ctx.f(1e-60)) == Ordering::Less);
        // Gamma(5) = 24
        let g = ctx.gamma(&ctx.f(5.0));
        let d = ctx.sub(&g, &ctx.f(24.0));
        assert!(ctx.cmp(&ctx.abs(&d), &ctx.f(1e-58)) == Ordering::Less);
        // Reflection at 1/3: Gamma(1/3) Gamma(2/3) = 2 pi / sqrt(3)
        let third = ctx.rational(&BigRational::new(BigInt::one(), BigInt::from(3)));
        let two_thirds = ctx.rational(&BigRational::new(BigInt::from(2), BigInt::from(3)));
        let prod = ctx.mul(&ctx.gamma(&third), &ctx.gamma(&two_thirds));
        let want = ctx.div(&ctx.mul(&ctx.f(2.0), &ctx.pi()), &ctx.sqrt(&ctx.f(3.0)));
        let d = ctx.sub(&prod, &want);
        assert!(ctx.cmp(&ctx.abs(&d), &ctx.f(1e-58)) == Ordering::Less);
    }
}
