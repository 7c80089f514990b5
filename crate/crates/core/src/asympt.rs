//! Asymptotics of balanced factorial sums.
//!
//! A balanced term is a product
//!
//! ```text
//!     t(n, k) = C0^n C1^k prod_j A_j(n, k)!^(eps_j),
//!     A_j(n, k) = alpha_j n + beta_j k + c_j,
//! ```
//!
//! whose exponents satisfy sum eps_j alpha_j = sum eps_j beta_j = 0.
//! A sequence a_n = sum_k t(n, k) of this shape has an asymptotic
//! expansion
//!
//! ```text
//!     a_n ~ sum_u lambda(u)^n n^alpha(u) S(u) (1 + mu_1/n + mu_2/n^2 + ...)
//! ```
//!
//! with one contribution per critical point u of the potential
//! V(u) = log C0 + u log C1 + sum_j eps_j A_j(u) log A_j(u), where
//! A_j(u) = alpha_j + beta_j u.  This module finds the critical points
//! exactly when they live in a degree <= 2 extension of the rationals,
//! classifies their order, and evaluates the growth rate, power
//! exponent and Stokes constant of each contribution.  It also expands
//! the reciprocal theta normalization into an exact 1/n series, solves
//! recurrences by power-like formal series (the practical route to the
//! correction terms mu_l), and estimates spectral radii numerically.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{half_slacks, SqrtVal};
use crate::quadnum::{quadratic_roots, rat_i, rat_pair, QuadNum};
use crate::real::{Cx, RealCtx};
use crate::tet::{quad_to_cx, TetData, VERTEX_TRIPLES};

/// One factorial factor A(n, k)!^eps with A(n, k) = alpha n + beta k + c.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Factor {
    pub alpha: i64,
    pub beta: i64,
    pub c: i64,
    pub eps: i32,
}

impl Factor {
    fn arg(&self, n: i64, k: i64) -> i64 {
        self.alpha * n + self.beta * k + self.c
    }

    /// A(u) = alpha + beta u in the root field.
    fn at(&self, u: &QuadNum) -> QuadNum {
        u.scale(&rat_i(self.beta))
            .add(&QuadNum::from_int(self.alpha))
    }
}

/// A sum of balanced factorial terms over one lattice direction k.
#[derive(Clone, Debug)]
pub struct BalancedTerm {
    pub c0: BigRational,
    pub c1: BigRational,
    pub factors: Vec<Factor>,
}

/// One critical point of the potential with its asymptotic data.
#[derive(Clone, Debug)]
pub struct Contribution {
    pub u: QuadNum,
    /// Order of the critical point: V'' ... V^(order) vanish there.
    pub order: usize,
    /// Exact growth rate e^V(u) = C0 prod A_j(u)^(eps_j alpha_j).
    pub rate: QuadNum,
    pub alpha: BigRational,
    pub stokes: Cx,
    /// True when u lies on the cut of the potential, where the Stokes
    /// constant takes its absolute-value form.
    pub on_cut: bool,
}

/// All critical contributions plus the subset that actually appears in
/// the asymptotic expansion of the sum.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub contributions: Vec<Contribution>,
    pub selected: Vec<usize>,
    /// Set when several critical points sit on the cut and the dominant
    /// one was picked by smallest growth rate rather than by a proof.
    pub selection_heuristic: bool,
}

fn ensure_factorials(cache: &mut Vec<BigInt>, m: usize) {
    if cache.is_empty() {
        cache.push(BigInt::one());
    }
    while cache.len() <= m {
        let next = cache.last().unwrap() * BigInt::from(cache.len());
        cache.push(next);
    }
}

/// Multiply an ascending-coefficient polynomial by (alpha + beta u).
fn linear_mul(poly: &mut Vec<BigRational>, alpha: i64, beta: i64) {
    let a = rat_i(alpha);
    let b = rat_i(beta);
    poly.push(BigRational::zero());
    for i in (0..poly.len()).rev() {
        let lower = if i > 0 {
            &poly[i - 1] * &b
        } else {
            BigRational::zero()
        };
        poly[i] = &poly[i] * &a + lower;
    }
}

impl BalancedTerm {
    pub fn new(c0: BigRational, c1: BigRational, factors: Vec<Factor>) -> Result<Self> {
        if c0.is_zero() || c1.is_zero() {
            return Err(Error::Parse("term bases must be nonzero".into()));
        }
        let sa: i64 = factors.iter().map(|f| f.eps as i64 * f.alpha).sum();
        let sb: i64 = factors.iter().map(|f| f.eps as i64 * f.beta).sum();
        if sa != 0 || sb != 0 {
            return Err(Error::Parse("factorial exponents are not balanced".into()));
        }
        if !factors.iter().any(|f| f.beta != 0) {
            return Err(Error::Parse(
                "no factor depends on the summation index".into(),
            ));
        }
        Ok(BalancedTerm { c0, c1, factors })
    }

    /// Range of k where every factorial argument is nonnegative.
    pub fn support(&self, n: i64) -> Option<(i64, i64)> {
        let mut lo = i64::MIN;
        let mut hi = i64::MAX;
        for f in &self.factors {
            let base = f.alpha * n + f.c;
            if f.beta > 0 {
                lo = lo.max((-base + f.beta - 1).div_euclid(f.beta));
            } else if f.beta < 0 {
                hi = hi.min(base.div_euclid(-f.beta));
            } else if base < 0 {
                // A constant-in-k factor with negative argument: the
                // reciprocal of such a factorial vanishes identically.
                assert!(f.eps < 0, "negative argument in a numerator factor");
                return None;
            }
        }
        if lo > hi {
            None
        } else {
            Some((lo, hi))
        }
    }

    fn term_cached(&self, n: i64, k: i64, cache: &mut Vec<BigInt>) -> BigRational {
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        for f in &self.factors {
            let arg = f.arg(n, k);
            debug_assert!(arg >= 0, "argument outside the support");
            ensure_factorials(cache, arg as usize);
            let fv = &cache[arg as usize];
            for _ in 0..f.eps.unsigned_abs() {
                if f.eps > 0 {
                    num *= fv;
                } else {
                    den *= fv;
                }
            }
        }
        let base = BigRational::new(num, den);
        base * Pow::pow(&self.c0, n as i32) * Pow::pow(&self.c1, k as i32)
    }

    /// Exact value of sum_k t(n, k).
    pub fn sum(&self, n: i64) -> BigRational {
        self.sum_cached(n, &mut Vec::new())
    }

    fn sum_cached(&self, n: i64, cache: &mut Vec<BigInt>) -> BigRational {
        let Some((lo, hi)) = self.support(n) else {
            return BigRational::zero();
        };
        let mut acc = BigRational::zero();
        for k in lo..=hi {
            acc += self.term_cached(n, k, cache);
        }
        acc
    }

    /// Exact values for n = 0..=nmax, sharing one factorial table.
    pub fn sequence(&self, nmax: i64) -> Vec<BigRational> {
        let mut cache = Vec::new();
        (0..=nmax).map(|n| self.sum_cached(n, &mut cache)).collect()
    }

    /// mu = (1/2) sum_j eps_j.
    pub fn mu(&self) -> BigRational {
        rat_pair(self.factors.iter().map(|f| f.eps as i64).sum(), 2)
    }

    /// nu = sum_j eps_j c_j.
    pub fn nu(&self) -> BigRational {
        rat_i(self.factors.iter().map(|f| f.eps as i64 * f.c).sum())
    }

    /// Power exponent alpha = mu + nu + 1 - 1/(order + 1).
    pub fn alpha(&self, order: usize) -> BigRational {
        self.mu() + self.nu() + BigRational::one() - rat_pair(1, order as i64 + 1)
    }

    /// The critical equation C1 prod A_j(u)^(eps_j beta_j) = 1 cleared of
    /// denominators, as ascending polynomial coefficients.
    pub fn critical_polynomial(&self) -> Vec<BigRational> {
        let mut pos = vec![BigRational::one()];
        let mut neg = vec![BigRational::one()];
        for f in &self.factors {
            let e = f.eps as i64 * f.beta;
            let (tgt, cnt) = match e.signum() {
                1 => (&mut pos, e),
                -1 => (&mut neg, -e),
                _ => continue,
            };
            for _ in 0..cnt {
                linear_mul(tgt, f.alpha, f.beta);
            }
        }
        let len = pos.len().max(neg.len());
        let mut out = vec![BigRational::zero(); len];
        for (i, c) in pos.into_iter().enumerate() {
            out[i] = &self.c1 * c;
        }
        for (i, c) in neg.into_iter().enumerate() {
            out[i] -= c;
        }
        while out.last().is_some_and(|c| c.is_zero()) {
            out.pop();
        }
        out
    }

    /// Critical points with their orders.  Only root fields of degree at
    /// most two are supported exactly.
    pub fn criticals(&self) -> Result<Vec<(QuadNum, usize)>> {
        let p = self.critical_polynomial();
        let roots = match p.len() {
            0 | 1 => {
                return Err(Error::Degenerate(
                    "the critical equation has no roots".into(),
                ))
            }
            2 => {
                let r = QuadNum::from_rational(-&p[0] / &p[1]);
                vec![(r, 1)]
            }
            3 => {
                let (r1, r2, double) = quadratic_roots(&p[2], &p[1], &p[0])?;
                if double {
                    vec![(r1, 2)]
                } else {
                    vec![(r1, 1), (r2, 1)]
                }
            }
            n => {
                return Err(Error::Capacity(format!(
                    "critical equation of degree {} is beyond the quadratic solver",
                    n - 1
                )))
            }
        };
        for (u, order) in &roots {
            for f in &self.factors {
                if f.beta != 0 && f.at(u).is_zero() {
                    return Err(Error::Degenerate(
                        "a critical point lies on a face of the support".into(),
                    ));
                }
            }
            if *order == 2 {
                debug_assert!(self.v_deriv(u, 2).is_zero());
                if self.v_deriv(u, 3).is_zero() {
                    return Err(Error::Degenerate(
                        "critical point of order above two".into(),
                    ));
                }
            }
        }
        Ok(roots)
    }

    /// Exact derivative V^(r)(u) for r >= 2:
    /// (-1)^r (r-2)! sum_j eps_j beta_j^r / A_j(u)^(r-1).
    pub fn v_deriv(&self, u: &QuadNum, r: usize) -> QuadNum {
        assert!(r >= 2);
        let mut acc = QuadNum::zero();
        for f in &self.factors {
            if f.beta == 0 {
                continue;
            }
            let coef = rat_i(f.eps as i64) * rat_i(f.beta).pow(r as i32);
            acc = acc.add(&f.at(u).powi(-(r as i64 - 1)).scale(&coef));
        }
        let mut scale = BigRational::from_integer(crate::exact::factorial(r as u64 - 2));
        if r % 2 == 1 {
            scale = -scale;
        }
        acc.scale(&scale)
    }

    /// Exact growth rate e^V(u) = C0 prod A_j(u)^(eps_j alpha_j).
    pub fn rate(&self, u: &QuadNum) -> QuadNum {
        let mut acc = QuadNum::from_rational(self.c0.clone());
        for f in &self.factors {
            let e = f.eps as i64 * f.alpha;
            if e == 0 {
                continue;
            }
            let a = f.at(u);
            debug_assert!(!a.is_zero());
            acc = acc.mul(&a.powi(e));
        }
        acc
    }

    /// Endpoints of the interval on which all A_j are positive.  The cut
    /// of the potential is the complement (-inf, lo] union [hi, inf).
    pub fn cut_bounds(&self) -> (Option<BigRational>, Option<BigRational>) {
        let mut lo: Option<BigRational> = None;
        let mut hi: Option<BigRational> = None;
        for f in &self.factors {
            if f.beta == 0 {
                continue;
            }
            let bound = rat_pair(-f.alpha, f.beta);
            if f.beta > 0 {
                lo = Some(lo.map_or(bound.clone(), |v| v.max(bound)));
            } else {
                hi = Some(hi.map_or(bound.clone(), |v| v.min(bound)));
            }
        }
        (lo, hi)
    }

    /// Saddle weight W(u) = prod_j A_j(u)^(eps_j (1/2 + c_j)), or its
    /// absolute value when `absolute` is set.
    fn w_value(&self, ctx: &RealCtx, u: &QuadNum, absolute: bool) -> Cx {
        let mut acc = Cx::real(ctx, ctx.one());
        for f in &self.factors {
            let q = rat_pair(f.eps as i64 * (1 + 2 * f.c), 2);
            if q.is_zero() {
                continue;
            }
            let base = quad_to_cx(ctx, &f.at(u));
            if absolute {
                let p = ctx.pow_rat(&base.abs(ctx), &q);
                acc = acc.scale(ctx, &p);
            } else {
                acc = acc.mul(ctx, &cx_pow_rat(ctx, &base, &q));
            }
        }
        acc
    }

    /// Stokes constant of the contribution at u:
    ///
    /// ```text
    ///     S(u) = (2 pi)^mu c_m W(u) / (-V^(m+1)(u))^(1/(m+1)),
    ///     c_m  = 2 Gamma((m+2)/(m+1)) ((m+1)!)^(1/(m+1)),
    /// ```
    ///
    /// with W and V^(m+1) replaced by their absolute values when u lies
    /// on the cut.
    pub fn stokes(&self, ctx: &RealCtx, u: &QuadNum, order: usize, on_cut: bool) -> Cx {
        let m1 = order as i64 + 1;
        let two_pi = ctx.mul(&ctx.f(2.0), &ctx.pi());
        let pref = ctx.pow_rat(&two_pi, &self.mu());
        let g = ctx.gamma(&ctx.rational(&rat_pair(order as i64 + 2, m1)));
        let fac = ctx.bigint(&crate::exact::factorial(m1 as u64));
        let cm = ctx.mul(
            &ctx.f(2.0),
            &ctx.mul(&g, &ctx.pow_rat(&fac, &rat_pair(1, m1))),
        );
        let scale = ctx.mul(&pref, &cm);
        let vd = quad_to_cx(ctx, &self.v_deriv(u, order + 1));
        if on_cut {
            let w = self.w_value(ctx, u, true);
            let denom = ctx.pow_rat(&vd.abs(ctx), &rat_pair(1, m1));
            Cx::real(ctx, ctx.mul(&scale, &ctx.div(&w.re, &denom)))
        } else {
            let w = self.w_value(ctx, u, false);
            let denom = cx_pow_rat(ctx, &vd.neg(ctx), &rat_pair(1, m1));
            w.div(ctx, &denom).scale(ctx, &scale)
        }
    }

    /// Full asymptotic analysis: every critical contribution, plus the
    /// selection of those that appear in the expansion of the sum.  Real
    /// critical points on the cut contribute through the absolute-value
    /// Stokes form; when more than one sits there, the one with the
    /// smallest growth rate is kept and the heuristic flag is raised.
    pub fn analyze(&self, ctx: &RealCtx) -> Result<Analysis> {
        let crits = self.criticals()?;
        let (lo, hi) = self.cut_bounds();
        let lo = lo.and_then(|v| v.to_f64());
        let hi = hi.and_then(|v| v.to_f64());
        let mut contributions = Vec::new();
        for (u, order) in crits {
            let (re, im) = u.to_f64_pair();
            let on_cut = im == 0.0 && (lo.is_some_and(|b| re <= b) || hi.is_some_and(|b| re >= b));
            let rate = self.rate(&u);
            let alpha = self.alpha(order);
            let stokes = self.stokes(ctx, &u, order, on_cut);
            contributions.push(Contribution {
                u,
                order,
                rate,
                alpha,
                stokes,
                on_cut,
            });
        }
        let mut selected: Vec<usize> = contributions
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.on_cut)
            .map(|(i, _)| i)
            .collect();
        let on_cut: Vec<usize> = contributions
            .iter()
            .enumerate()
            .filter(|(_, c)| c.on_cut)
            .map(|(i, _)| i)
            .collect();
        let mut selection_heuristic = false;
        match on_cut.len() {
            0 => {}
            1 => selected.push(on_cut[0]),
            _ => {
                let best = on_cut
                    .into_iter()
                    .min_by(|&i, &j| {
                        let mi = rate_modulus(&contributions[i].rate);
                        let mj = rate_modulus(&contributions[j].rate);
                        mi.partial_cmp(&mj).unwrap()
                    })
                    .unwrap();
                selected.push(best);
                selection_heuristic = true;
            }
        }
        selected.sort_unstable();
        Ok(Analysis {
            contributions,
            selected,
            selection_heuristic,
        })
    }
}

fn rate_modulus(q: &QuadNum) -> f64 {
    let (re, im) = q.to_f64_pair();
    (re * re + im * im).sqrt()
}

/// z^q on the principal branch.
fn cx_pow_rat(ctx: &RealCtx, z: &Cx, q: &BigRational) -> Cx {
    let l = z.ln(ctx);
    let qf = ctx.rational(q);
    Cx::new(ctx.mul(&l.re, &qf), ctx.mul(&l.im, &qf)).exp(ctx)
}

/// The standard 6j evaluation at n times the coloring as a balanced
/// term: sum_k (-1)^k (k+1)! / prod_j (k - n T_j)! prod_i (n S_i - k)!.
pub fn sixj_term(data: &TetData) -> Result<BalancedTerm> {
    let mut factors = vec![Factor {
        alpha: 0,
        beta: 1,
        c: 1,
        eps: 1,
    }];
    for i in 0..3 {
        factors.push(Factor {
            alpha: data.s[i],
            beta: -1,
            c: 0,
            eps: -1,
        });
    }
    for j in 0..4 {
        factors.push(Factor {
            alpha: -data.t[j],
            beta: 1,
            c: 0,
            eps: -1,
        });
    }
    BalancedTerm::new(rat_i(1), rat_i(-1), factors)
}

/// The unitary 6j sequence n -> <tet, n gamma>_U as a balanced term.
/// The reciprocal theta normalization is an exact factorial product
/// only when the vertex thetas pair up; colorings whose four vertex
/// slack triples contain one with odd multiplicity are rejected.
pub fn unitary_term(data: &TetData) -> Result<BalancedTerm> {
    let base = sixj_term(data)?;
    let mut groups: BTreeMap<[u32; 4], i32> = BTreeMap::new();
    for tri in VERTEX_TRIPLES {
        let (a, b, c) = (
            data.colors[tri[0]],
            data.colors[tri[1]],
            data.colors[tri[2]],
        );
        let (x, y, z) = half_slacks(a, b, c)
            .ok_or_else(|| Error::Degenerate("inadmissible vertex triple".into()))?;
        let mut key = [x, y, z, x + y + z];
        key[..3].sort_unstable();
        *groups.entry(key).or_insert(0) += 1;
    }
    let mut factors = base.factors;
    for (key, count) in groups {
        if count % 2 != 0 {
            return Err(Error::Capacity(
                "unitary scaling needs vertex thetas of even multiplicity".into(),
            ));
        }
        let pairs = count / 2;
        for &w in &key[..3] {
            if w > 0 {
                factors.push(Factor {
                    alpha: w as i64,
                    beta: 0,
                    c: 0,
                    eps: pairs,
                });
            }
        }
        factors.push(Factor {
            alpha: key[3] as i64,
            beta: 0,
            c: 1,
            eps: -pairs,
        });
    }
    BalancedTerm::new(rat_i(1), rat_i(-1), factors)
}

/// Bernoulli numbers B_2, B_4, ..., B_16.
const BERNOULLI: [(i64, i64); 8] = [
    (1, 6),
    (-1, 30),
    (1, 42),
    (-1, 30),
    (5, 66),
    (-691, 2730),
    (7, 6),
    (-3617, 510),
];

/// Stirling tail sum_r B_2r / (2r (2r-1) N^(2r-1)) for N = w n, as an
/// ascending series in 1/n.
fn stirling_tail(w: i64, depth: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); depth + 1];
    for r in 1..=BERNOULLI.len() {
        let pow = 2 * r - 1;
        if pow > depth {
            break;
        }
        let (bn, bd) = BERNOULLI[r - 1];
        let den = rat_i(2 * r as i64 * (2 * r as i64 - 1)) * rat_i(w).pow(pow as i32);
        out[pow] = rat_pair(bn, bd) / den;
    }
    out
}

fn series_exp(a: &[BigRational]) -> Vec<BigRational> {
    debug_assert!(a[0].is_zero());
    let mut e = vec![BigRational::zero(); a.len()];
    e[0] = BigRational::one();
    for n in 1..a.len() {
        let mut acc = BigRational::zero();
        for j in 1..=n {
            acc += rat_i(j as i64) * &a[j] * &e[n - j];
        }
        e[n] = acc / rat_i(n as i64);
    }
    e
}

/// Exact 1/n expansion of the reciprocal theta normalization of a list
/// of vertex color triples:
///
/// ```text
///     prod_v |theta(n a, n b, n c)|^(-1/2)
///         ~ (2 pi n^0)^(V/2) prod_v s_v . (prod_v l_v)^n
///           . (1 + mu_1/n + mu_2/n^2 + ...)
/// ```
///
/// Returns [1, mu_1, ..., mu_depth].  Each vertex contributes the
/// series -1/2 [S(ns) - S(nx) - S(ny) - S(nz) + log(1 + 1/(ns))] in the
/// exponent, with (x, y, z) the slacks and s their sum; the constant
/// and the growth rate are exposed separately.
pub fn theta_norm_series(triples: &[[u32; 3]], depth: usize) -> Result<Vec<BigRational>> {
    if depth >= 2 * BERNOULLI.len() {
        return Err(Error::Capacity(format!(
            "theta series depth {} exceeds the Bernoulli table",
            depth
        )));
    }
    let mut q = vec![BigRational::zero(); depth + 1];
    for &[a, b, c] in triples {
        let (x, y, z) = positive_slacks(a, b, c)?;
        let s = x + y + z;
        let tails = [(s, -1), (x, 1), (y, 1), (z, 1)];
        for (w, sign) in tails {
            let t = stirling_tail(w, depth);
            for (i, v) in t.into_iter().enumerate() {
                q[i] += rat_pair(sign, 2) * v;
            }
        }
        // -1/2 log(1 + 1/(ns)) = sum_r (-1)^r / (2 r s^r n^r)
        for r in 1..=depth {
            let sign = if r % 2 == 0 { 1 } else { -1 };
            q[r] += rat_pair(sign, 2 * r as i64) / rat_i(s).pow(r as i32);
        }
    }
    Ok(series_exp(&q))
}

fn positive_slacks(a: u32, b: u32, c: u32) -> Result<(i64, i64, i64)> {
    let (x, y, z) = half_slacks(a, b, c)
        .ok_or_else(|| Error::Degenerate("inadmissible theta triple".into()))?;
    if x == 0 || y == 0 || z == 0 {
        return Err(Error::Degenerate(
            "theta normalization series needs positive slacks".into(),
        ));
    }
    Ok((x as i64, y as i64, z as i64))
}

/// Exact growth rate prod_v sqrt(x^x y^y z^z / s^s) of the reciprocal
/// theta normalization, with per-vertex slacks (x, y, z) and s = x+y+z.
pub fn theta_norm_rate(triples: &[[u32; 3]]) -> Result<SqrtVal> {
    let mut exps: BTreeMap<i64, i64> = BTreeMap::new();
    for &[a, b, c] in triples {
        let (x, y, z) = half_slacks(a, b, c)
            .ok_or_else(|| Error::Degenerate("inadmissible theta triple".into()))?;
        let (x, y, z) = (x as i64, y as i64, z as i64);
        let s = x + y + z;
        for (base, e) in [(x, x), (y, y), (z, z), (s, -s)] {
            if base == 0 {
                continue;
            }
            let mut rem = base;
            let mut p = 2;
            while p * p <= rem {
                while rem % p == 0 {
                    *exps.entry(p).or_insert(0) += e;
                    rem /= p;
                }
                p += 1;
            }
            if rem > 1 {
                *exps.entry(rem).or_insert(0) += e;
            }
        }
    }
    let mut q = BigRational::one();
    let mut m = BigInt::one();
    for (p, e) in exps {
        let r = e.rem_euclid(2);
        let h = (e - r) / 2;
        q *= rat_i(p).pow(h as i32);
        if r == 1 {
            m *= BigInt::from(p);
        }
    }
    Ok(SqrtVal { q, m })
}

/// Per-vertex constant of the reciprocal theta normalization:
/// (2 pi)^(V/2) prod_v (x y z s)^(1/4) / s.
pub fn theta_norm_constant(ctx: &RealCtx, triples: &[[u32; 3]]) -> Result<astro_float::BigFloat> {
    let two_pi = ctx.mul(&ctx.f(2.0), &ctx.pi());
    let mut acc = ctx.pow_rat(&two_pi, &rat_pair(triples.len() as i64, 2));
    for &[a, b, c] in triples {
        let (x, y, z) = positive_slacks(a, b, c)?;
        let s = x + y + z;
        let prod = ctx.f((x * y * z * s) as f64);
        let root = ctx.pow_rat(&prod, &rat_pair(1, 4));
        acc = ctx.mul(&acc, &ctx.div(&root, &ctx.f(s as f64)));
    }
    Ok(acc)
}

/// A power-like formal solution Lambda^n n^alpha (1 + mu_1/n + ...) of a
/// linear recurrence with polynomial coefficients.
#[derive(Clone, Debug)]
pub struct FormalSolution {
    pub lambda: QuadNum,
    pub alpha: QuadNum,
    /// Correction coefficients starting with mu_0 = 1.
    pub mu: Vec<QuadNum>,
    /// Multiplicity of lambda as a characteristic root.
    pub order: usize,
}

/// Power-like formal solutions of sum_i p_i(n) a_{n+i} = 0.  The input
/// is one coefficient row per shift i, each by descending powers of n
/// and all of the same length.  Substituting a_n = Lambda^n n^alpha
/// (1 + mu_1/n + ...) and expanding in x = 1/n reduces the recurrence
/// to the triangular system sum_t mu_t [x^(s-t)] G_t = 0 with
///
/// ```text
///     G_t(x) = sum_i Lambda^i ptilde_i(x) (1 + i x)^(alpha - t),
/// ```
///
/// where ptilde_i reverses the coefficients of p_i.  Simple
/// characteristic roots determine alpha linearly; double roots lead to
/// a quadratic indicial equation with two branches.
pub fn formal_solutions(coeffs: &[Vec<BigRational>], depth: usize) -> Result<Vec<FormalSolution>> {
    let r = coeffs.len().saturating_sub(1);
    if r == 0 {
        return Err(Error::Parse("recurrence needs at least two shifts".into()));
    }
    let width = coeffs[0].len();
    if width == 0 || coeffs.iter().any(|c| c.len() != width) {
        return Err(Error::Parse(
            "coefficient rows must share one degree".into(),
        ));
    }
    let chi_row = |j: usize| -> Vec<BigRational> {
        (0..=r)
            .map(|i| coeffs[i].get(j).cloned().unwrap_or_else(BigRational::zero))
            .collect()
    };
    let chi = chi_row(0);
    let chi1 = chi_row(1);
    let chi2 = chi_row(2);

    let mut poly = chi.clone();
    while poly.last().is_some_and(|c| c.is_zero()) {
        poly.pop();
    }
    let shift = poly.iter().take_while(|c| c.is_zero()).count();
    let poly = &poly[shift..];
    let roots: Vec<(QuadNum, usize)> = match poly.len() {
        0 | 1 => Vec::new(),
        2 => vec![(QuadNum::from_rational(-&poly[0] / &poly[1]), 1)],
        3 => {
            let (r1, r2, double) = quadratic_roots(&poly[2], &poly[1], &poly[0])?;
            if double {
                vec![(r1, 2)]
            } else {
                vec![(r1, 1), (r2, 1)]
            }
        }
        n => {
            return Err(Error::Capacity(format!(
                "characteristic polynomial of degree {} is beyond the quadratic solver",
                n - 1
            )))
        }
    };

    let eval = |p: &[BigRational], x: &QuadNum| -> QuadNum {
        let mut acc = QuadNum::zero();
        for c in p.iter().rev() {
            acc = acc.mul(x).add(&QuadNum::from_rational(c.clone()));
        }
        acc
    };

    let mut out = Vec::new();
    for (lambda, order) in roots {
        if lambda.is_zero() {
            continue;
        }
        // chi'(Lambda) and the weighted sums entering the indicial data.
        let chi_p = {
            let mut acc = QuadNum::zero();
            for (i, c) in chi.iter().enumerate().skip(1) {
                acc = acc.add(&lambda.powi(i as i64 - 1).scale(&(rat_i(i as i64) * c)));
            }
            acc
        };
        if order == 1 {
            let denom = lambda.mul(&chi_p);
            if denom.is_zero() {
                return Err(Error::Degenerate(
                    "simple root with vanishing indicial slope".into(),
                ));
            }
            let alpha = eval(&chi1, &lambda).div(&denom).neg();
            let g = g_table(coeffs, &lambda, &alpha, depth + 1);
            let mut mu = vec![QuadNum::one()];
            for s in 2..=depth + 1 {
                debug_assert_eq!(
                    g[s - 1][1],
                    denom.scale(&rat_i(s as i64 - 1)).neg(),
                    "indicial column mismatch"
                );
                let mut acc = QuadNum::zero();
                for t in 0..=s - 2 {
                    acc = acc.add(&mu[t].mul(&g[t][s - t]));
                }
                mu.push(acc.div(&denom.scale(&rat_i(s as i64 - 1))));
            }
            out.push(FormalSolution {
                lambda,
                alpha,
                mu,
                order,
            });
        } else {
            if !eval(&chi1, &lambda).is_zero() {
                return Err(Error::Degenerate(
                    "double characteristic root without power-like solutions".into(),
                ));
            }
            let lam = lambda
                .as_rational()
                .ok_or_else(|| Error::Capacity("double root outside the rationals".into()))?
                .clone();
            let mut beta1 = BigRational::zero();
            let mut beta2 = BigRational::zero();
            let mut lampow = BigRational::one();
            for i in 0..=r {
                if i >= 1 {
                    lampow *= &lam;
                    beta1 += rat_i(i as i64) * &chi1[i] * &lampow;
                    beta2 += rat_i((i * i) as i64) * &chi[i] * &lampow;
                }
            }
            let chi2_v = {
                let mut acc = BigRational::zero();
                let mut p = BigRational::one();
                for c in chi2.iter() {
                    acc += c * &p;
                    p *= &lam;
                }
                acc
            };
            // Q(z) = chi2(Lambda) + z beta1 + z(z-1)/2 beta2
            let c2 = &beta2 / rat_i(2);
            let c1 = &beta1 - &c2;
            let alphas = if c2.is_zero() {
                if c1.is_zero() {
                    return Err(Error::Degenerate(
                        "degenerate indicial equation at a double root".into(),
                    ));
                }
                vec![QuadNum::from_rational(-&chi2_v / &c1)]
            } else {
                let (a1, a2, double) = quadratic_roots(&c2, &c1, &chi2_v)?;
                if double {
                    vec![a1]
                } else {
                    vec![a1, a2]
                }
            };
            let q_at = |z: &QuadNum| -> QuadNum {
                let zz = z.mul(z);
                zz.scale(&c2)
                    .add(&z.scale(&c1))
                    .add(&QuadNum::from_rational(chi2_v.clone()))
            };
            for alpha in alphas {
                let g = g_table(coeffs, &lambda, &alpha, depth + 2);
                let mut mu = vec![QuadNum::one()];
                for s in 1..=depth {
                    let qv = q_at(&alpha.sub(&QuadNum::from_int(s as i64)));
                    debug_assert_eq!(g[s][2], qv, "indicial column mismatch");
                    let mut acc = QuadNum::zero();
                    for t in 0..=s - 1 {
                        acc = acc.add(&mu[t].mul(&g[t][s + 2 - t]));
                    }
                    if qv.is_zero() {
                        // Resonance: the two indicial roots differ by an
                        // integer.  A power-like solution survives only
                        // when the obstruction vanishes, and mu_s is
                        // then free; normalize it to zero.
                        if !acc.is_zero() {
                            return Err(Error::Degenerate("resonant double root".into()));
                        }
                        mu.push(QuadNum::zero());
                    } else {
                        mu.push(acc.div(&qv).neg());
                    }
                }
                out.push(FormalSolution {
                    lambda: lambda.clone(),
                    alpha,
                    mu,
                    order,
                });
            }
        }
    }
    Ok(out)
}

/// Coefficient table g[t][q] = [x^q] G_t(x) for t, q = 0..=max_ord.
fn g_table(
    coeffs: &[Vec<BigRational>],
    lambda: &QuadNum,
    alpha: &QuadNum,
    max_ord: usize,
) -> Vec<Vec<QuadNum>> {
    let r = coeffs.len() - 1;
    let mut table = Vec::with_capacity(max_ord + 1);
    for t in 0..=max_ord {
        let a = alpha.sub(&QuadNum::from_int(t as i64));
        let mut row = vec![QuadNum::zero(); max_ord + 1];
        for i in 0..=r {
            let li = lambda.powi(i as i64);
            // binomial coefficients of (1 + i x)^(alpha - t)
            let mut bin = QuadNum::one();
            for q in 0..=max_ord {
                if q > 0 {
                    bin = bin
                        .mul(&a.sub(&QuadNum::from_int(q as i64 - 1)))
                        .scale(&rat_pair(1, q as i64));
                }
                let ipow = (i as i64).pow(q as u32);
                if ipow == 0 && q > 0 {
                    continue;
                }
                let step = bin.scale(&rat_i(ipow)).mul(&li);
                for (j, c) in coeffs[i].iter().enumerate() {
                    if j + q <= max_ord && !c.is_zero() {
                        row[j + q] = row[j + q].add(&step.scale(c));
                    }
                }
            }
        }
        table.push(row);
    }
    table
}

/// Natural log of |q| for a nonzero rational, stable for huge values.
pub fn rat_ln_abs(q: &BigRational) -> f64 {
    ln_bigint_abs(q.numer()) - ln_bigint_abs(q.denom())
}

fn ln_bigint_abs(n: &BigInt) -> f64 {
    let mag = n.magnitude();
    let bits = mag.bits();
    if bits <= 53 {
        return mag.to_f64().unwrap().ln();
    }
    let top = (mag >> (bits - 53)).to_f64().unwrap();
    top.ln() + (bits - 53) as f64 * std::f64::consts::LN_2
}

/// Estimate the exponential growth rate of a sequence by regressing
/// log |a_n| on {n, log n, 1} over the tail, with iterated trimming of
/// outliers (sign changes of an oscillating amplitude leave isolated
/// near-zero values that would otherwise poison the fit).
pub fn spectral_radius(seq: &[BigRational]) -> Result<f64> {
    let start = (seq.len() / 3).max(2);
    let mut pts: Vec<(f64, f64)> = seq
        .iter()
        .enumerate()
        .skip(start)
        .filter(|(_, v)| !v.is_zero())
        .map(|(n, v)| (n as f64, rat_ln_abs(v)))
        .collect();
    if pts.len() < 8 {
        return Err(Error::Degenerate(
            "too few nonzero terms for a growth fit".into(),
        ));
    }
    for _ in 0..3 {
        let coef = fit_three(&pts)?;
        let resid: Vec<f64> = pts
            .iter()
            .map(|&(n, y)| y - coef[0] * n - coef[1] * n.ln() - coef[2])
            .collect();
        let sigma = (resid.iter().map(|r| r * r).sum::<f64>() / resid.len() as f64).sqrt();
        if sigma == 0.0 {
            return Ok(coef[0].exp());
        }
        let kept: Vec<(f64, f64)> = pts
            .iter()
            .zip(&resid)
            .filter(|(_, r)| r.abs() <= 3.0 * sigma)
            .map(|(p, _)| *p)
            .collect();
        if kept.len() == pts.len() || kept.len() < 8 {
            return Ok(coef[0].exp());
        }
        pts = kept;
    }
    Ok(fit_three(&pts)?[0].exp())
}

fn fit_three(pts: &[(f64, f64)]) -> Result<[f64; 3]> {
    let mut m = [[0.0f64; 3]; 3];
    let mut b = [0.0f64; 3];
    for &(n, y) in pts {
        let phi = [n, n.ln(), 1.0];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += phi[i] * phi[j];
            }
            b[i] += phi[i] * y;
        }
    }
    let det = det3(&m);
    if det.abs() < 1e-12 {
        return Err(Error::Degenerate("growth regression is singular".into()));
    }
    let mut out = [0.0f64; 3];
    for c in 0..3 {
        let mut mc = m;
        for r in 0..3 {
            mc[r][c] = b[r];
        }
        out[c] = det3(&mc) / det;
    }
    Ok(out)
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// One probe point of an expansion residual: ln of the absolute
/// residual, NEG_INFINITY when it vanishes exactly.
#[derive(Clone, Debug)]
pub struct ResidualRow {
    pub n: usize,
    pub ln_abs: f64,
}

#[derive(Clone, Debug)]
pub struct ResidualReport {
    pub rows: Vec<ResidualRow>,
    /// Fitted decay order of the residual envelope; None when every
    /// residual is exactly zero.
    pub observed: Option<f64>,
    /// Decay order the truncation error should show, relative to a
    /// unit-modulus growth rate: max_i Re alpha_i - depth - 1.
    pub expected: f64,
}

/// Residuals a_n - sum_i S_i Lambda_i^n n^(alpha_i) (sum_{l<=depth} mu_l n^-l)
/// over the probe points, one Stokes constant per formal solution.
///
/// The decay order is fitted on block maxima of ln|r_n| against ln n:
/// a conjugate pair of branches leaves an oscillating residual whose
/// near-zero dips would poison a pointwise regression, while the
/// envelope maxima track the truncation order cleanly.
pub fn expansion_residual(
    ctx: &RealCtx,
    seq: &[BigRational],
    solutions: &[FormalSolution],
    stokes: &[Cx],
    depth: usize,
    probe: &[usize],
) -> Result<ResidualReport> {
    if solutions.is_empty() || solutions.len() != stokes.len() {
        return Err(Error::Degenerate(
            "need one Stokes constant per formal solution".into(),
        ));
    }
    for sol in solutions {
        if sol.mu.len() <= depth {
            return Err(Error::Capacity(format!(
                "solutions carry corrections to depth {}, requested {depth}",
                sol.mu.len() - 1
            )));
        }
    }
    let mut ns: Vec<usize> = probe.to_vec();
    ns.sort_unstable();
    ns.dedup();
    if ns.first().is_some_and(|&n| n == 0) || ns.last().is_some_and(|&n| n >= seq.len()) {
        return Err(Error::Parse("probe points must lie in 1..len(seq)".into()));
    }

    struct Branch {
        s: Cx,
        lam: Cx,
        alpha: Cx,
        mu: Vec<Cx>,
    }
    let branches: Vec<Branch> = solutions
        .iter()
        .zip(stokes)
        .map(|(sol, s)| Branch {
            s: s.clone(),
            lam: quad_to_cx(ctx, &sol.lambda),
            alpha: quad_to_cx(ctx, &sol.alpha),
            mu: sol.mu[..=depth]
                .iter()
                .map(|m| quad_to_cx(ctx, m))
                .collect(),
        })
        .collect();

    let mut rows = Vec::with_capacity(ns.len());
    for &n in &ns {
        let nf = ctx.f(n as f64);
        let ln_n = Cx::real(ctx, ctx.ln(&nf));
        let mut pred = Cx::real(ctx, ctx.zero());
        for br in &branches {
            let mut tail = Cx::real(ctx, ctx.zero());
            for (l, m) in br.mu.iter().enumerate() {
                tail = tail.add(ctx, &m.scale(ctx, &ctx.powi(&nf, -(l as i64))));
            }
            let power = br.alpha.mul(ctx, &ln_n).exp(ctx);
            let term =
                br.s.mul(ctx, &br.lam.powi(ctx, n as i64))
                    .mul(ctx, &power)
                    .mul(ctx, &tail);
            pred = pred.add(ctx, &term);
        }
        let r = Cx::real(ctx, ctx.rational(&seq[n])).sub(ctx, &pred);
        let abs = r.abs(ctx);
        let ln_abs = if abs.is_zero() {
            f64::NEG_INFINITY
        } else {
            ctx.ln_abs_f64(&abs)
        };
        rows.push(ResidualRow { n, ln_abs });
    }

    let expected = solutions
        .iter()
        .map(|s| s.alpha.to_f64_pair().0)
        .fold(f64::NEG_INFINITY, f64::max)
        - depth as f64
        - 1.0;

    if rows.iter().all(|r| r.ln_abs == f64::NEG_INFINITY) {
        return Ok(ResidualReport {
            rows,
            observed: None,
            expected,
        });
    }

    // Envelope: split the probe points into blocks, keep the maximum
    // of each, regress on ln n.
    if rows.len() < 16 {
        return Err(Error::Degenerate(
            "need at least 16 probe points for a decay fit".into(),
        ));
    }
    let nblocks = (rows.len() / 4).clamp(4, 8);
    let mut env: Vec<(f64, f64)> = Vec::with_capacity(nblocks);
    for chunk in rows.chunks(rows.len().div_ceil(nblocks)) {
        if let Some(best) = chunk
            .iter()
            .filter(|r| r.ln_abs > f64::NEG_INFINITY)
            .max_by(|a, b| a.ln_abs.total_cmp(&b.ln_abs))
        {
            env.push(((best.n as f64).ln(), best.ln_abs));
        }
    }
    let spread = env.last().unwrap().0 - env.first().unwrap().0;
    if env.len() < 4 || spread < 0.3 {
        return Err(Error::Degenerate(
            "probe range too narrow for a decay fit".into(),
        ));
    }
    let k = env.len() as f64;
    let (sx, sy) = env
        .iter()
        .fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
    let (sxx, sxy) = env
        .iter()
        .fold((0.0, 0.0), |(a, b), &(x, y)| (a + x * x, b + x * y));
    let slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);

    Ok(ResidualReport {
        rows,
        observed: Some(slope),
        expected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{self, Norm};
    use crate::graph::Graph;
    use crate::tet::{self, sqrtval_to_float};

    fn bt(c0: i64, c1: i64, factors: &[(i64, i64, i64, i32)]) -> BalancedTerm {
        let fs = factors
            .iter()
            .map(|&(alpha, beta, c, eps)| Factor {
                alpha,
                beta,
                c,
                eps,
            })
            .collect();
        BalancedTerm::new(rat_i(c0), rat_i(c1), fs).unwrap()
    }

    fn assert_close(ctx: &RealCtx, got: &Cx, want: &Cx, tol: f64) {
        let d = got.sub(ctx, want).abs(ctx);
        let df = ctx.to_f64(&d);
        assert!(df.abs() < tol, "difference {df} exceeds {tol}");
    }

    #[test]
    fn row_sums_of_pascal() {
        // sum_k C(2n, k) = 4^n
        let t = bt(1, 1, &[(2, 0, 0, 1), (0, 1, 0, -1), (2, -1, 0, -1)]);
        for n in 0..8i64 {
            assert_eq!(t.sum(n), rat_i(4).pow(n as i32));
        }
        let ctx = RealCtx::with_decimal_digits(60);
        let analysis = t.analyze(&ctx).unwrap();
        assert_eq!(analysis.contributions.len(), 1);
        assert!(!analysis.selection_heuristic);
        assert_eq!(analysis.selected, vec![0]);
        let c = &analysis.contributions[0];
        assert_eq!(c.order, 1);
        assert!(!c.on_cut);
        assert_eq!(c.u, QuadNum::from_int(1));
        assert_eq!(c.rate, QuadNum::from_int(4));
        assert_eq!(c.alpha, rat_i(0));
        assert_close(&ctx, &c.stokes, &Cx::real(&ctx, ctx.one()), 1e-40);
    }

    #[test]
    fn central_binomial_saddle() {
        // sum_k C(n, k)^2 = C(2n, n) ~ 4^n / sqrt(pi n)
        let t = bt(
            1,
            1,
            &[
                (1, 0, 0, 1),
                (1, 0, 0, 1),
                (0, 1, 0, -1),
                (0, 1, 0, -1),
                (1, -1, 0, -1),
                (1, -1, 0, -1),
            ],
        );
        for n in 0..8i64 {
            let want = BigRational::from_integer(
                exact::factorial(2 * n as u64)
                    / (exact::factorial(n as u64) * exact::factorial(n as u64)),
            );
            assert_eq!(t.sum(n), want);
        }
        let ctx = RealCtx::with_decimal_digits(60);
        let analysis = t.analyze(&ctx).unwrap();
        assert_eq!(analysis.contributions.len(), 1);
        let c = &analysis.contributions[0];
        assert_eq!(c.u, QuadNum::from_rational(rat_pair(1, 2)));
        assert_eq!(c.rate, QuadNum::from_int(4));
        assert_eq!(c.alpha, rat_pair(-1, 2));
        let inv_sqrt_pi = ctx.div(&ctx.one(), &ctx.sqrt(&ctx.pi()));
        assert_close(&ctx, &c.stokes, &Cx::real(&ctx, inv_sqrt_pi), 1e-40);
    }

    #[test]
    fn sixj_term_matches_closed_form() {
        for colors in [
            [2u32, 2, 2, 2, 2, 2],
            [3, 4, 4, 3, 5, 5],
            [4, 4, 4, 4, 6, 6],
        ] {
            let data = tet::tet_data(&colors).unwrap();
            let term = sixj_term(&data).unwrap();
            for n in 1..=3u32 {
                let scaled = colors.map(|c| c * n);
                let want = BigRational::from_integer(exact::sixj_std(&scaled));
                assert_eq!(term.sum(n as i64), want, "colors {colors:?} n {n}");
            }
        }
    }

    #[test]
    fn unitary_term_matches_evaluator() {
        let g = Graph::tet();
        for colors in [[2u32, 2, 2, 2, 2, 2], [3, 4, 4, 3, 5, 5]] {
            let data = tet::tet_data(&colors).unwrap();
            let term = unitary_term(&data).unwrap();
            for n in 1..=3u32 {
                let scaled: Vec<u32> = colors.iter().map(|c| c * n).collect();
                let want = exact::eval(&g, &scaled, Norm::Unitary).unwrap();
                assert!(want.is_rational());
                assert_eq!(term.sum(n as i64), want.q, "colors {colors:?} n {n}");
            }
        }
    }

    #[test]
    fn euclidean_engine_matches_geometry() {
        let ctx = RealCtx::with_decimal_digits(120);
        let data = tet::tet_data(&[2, 2, 2, 2, 2, 2]).unwrap();
        let term = unitary_term(&data).unwrap();
        let analysis = term.analyze(&ctx).unwrap();
        assert_eq!(analysis.contributions.len(), 2);
        assert_eq!(analysis.selected, vec![0, 1]);
        assert!(!analysis.selection_heuristic);

        let rates: Vec<QuadNum> = data
            .growth_rates()
            .unwrap()
            .into_iter()
            .map(|c| c.exact.unwrap())
            .collect();
        for c in &analysis.contributions {
            assert!(!c.on_cut);
            assert_eq!(c.alpha, rat_pair(-3, 2));
            assert!(rates.contains(&c.rate), "rate {:?} unmatched", c.rate);
        }
        assert_ne!(
            analysis.contributions[0].rate,
            analysis.contributions[1].rate
        );

        let (sp, sm) = data.stokes_euclidean(&ctx).unwrap();
        let want = [sp, sm];
        for c in &analysis.contributions {
            let hit = want.iter().any(|w| {
                let d = c.stokes.sub(&ctx, w).abs(&ctx);
                ctx.to_f64(&d) < 1e-40
            });
            assert!(hit, "stokes constant unmatched");
        }
    }

    #[test]
    fn plane_engine_matches_geometry() {
        let ctx = RealCtx::with_decimal_digits(120);
        let data = tet::tet_data(&[3, 4, 4, 3, 5, 5]).unwrap();
        let term = unitary_term(&data).unwrap();

        // Dual route to the third derivative of the potential.
        let crits = term.criticals().unwrap();
        assert_eq!(crits.len(), 1);
        let (u, order) = crits[0].clone();
        assert_eq!(order, 2);
        assert_eq!(u, QuadNum::from_rational(rat_pair(36, 5)));
        let v3 = term.v_deriv(&u, 3);
        assert_eq!(
            v3.as_rational().unwrap(),
            &data.plane_third_derivative().unwrap()
        );

        let analysis = term.analyze(&ctx).unwrap();
        assert_eq!(analysis.contributions.len(), 1);
        assert_eq!(analysis.selected, vec![0]);
        assert!(!analysis.selection_heuristic);
        let c = &analysis.contributions[0];
        assert!(c.on_cut);
        assert_eq!(c.rate, QuadNum::from_int(-1));
        assert_eq!(c.alpha, rat_pair(-4, 3));
        let want = Cx::real(&ctx, data.stokes_plane(&ctx).unwrap());
        assert_close(&ctx, &c.stokes, &want, 1e-40);
    }

    #[test]
    fn minkowskian_engine_matches_geometry() {
        let ctx = RealCtx::with_decimal_digits(120);
        let data = tet::tet_data(&[4, 4, 4, 4, 6, 6]).unwrap();
        let term = unitary_term(&data).unwrap();
        let analysis = term.analyze(&ctx).unwrap();
        assert_eq!(analysis.contributions.len(), 2);
        assert!(analysis.selection_heuristic);
        assert_eq!(analysis.selected.len(), 1);
        for c in &analysis.contributions {
            assert!(c.on_cut);
            assert_eq!(c.alpha, rat_pair(-3, 2));
        }

        let rates: Vec<QuadNum> = data
            .growth_rates()
            .unwrap()
            .into_iter()
            .map(|c| c.exact.unwrap())
            .collect();
        for c in &analysis.contributions {
            assert!(rates.contains(&c.rate));
        }

        let sel = &analysis.contributions[analysis.selected[0]];
        let m = rate_modulus(&sel.rate);
        assert!((m - 0.794127).abs() < 1e-6);
        let (lam, stokes) = data.minkowskian_branch(&ctx).unwrap();
        assert!((ctx.to_f64(&lam.abs(&ctx)) - m).abs() < 1e-12);
        assert_close(&ctx, &sel.stokes, &stokes, 1e-40);
    }

    #[test]
    fn theta_rate_matches_vertex_prefactor() {
        for colors in [
            [2u32, 2, 2, 2, 2, 2],
            [3, 4, 4, 3, 5, 5],
            [4, 4, 4, 4, 6, 6],
            [1, 1, 2, 2, 2, 1],
        ] {
            let data = tet::tet_data(&colors).unwrap();
            let triples = VERTEX_TRIPLES.map(|t| [colors[t[0]], colors[t[1]], colors[t[2]]]);
            assert_eq!(theta_norm_rate(&triples).unwrap(), data.sqrt_q());
        }
    }

    #[test]
    fn theta_series_approximates_exact_values() {
        let ctx = RealCtx::with_decimal_digits(90);
        let g = Graph::theta();
        // One triple per vertex of the theta graph.
        let triples = [[2u32, 2, 2], [2, 2, 2]];
        let mus = theta_norm_series(&triples, 8).unwrap();
        let rate = sqrtval_to_float(&ctx, &theta_norm_rate(&triples).unwrap());
        let constant = theta_norm_constant(&ctx, &triples).unwrap();
        let mut errs = Vec::new();
        for n in [24u32, 48] {
            let exact_norm = exact::theta_norm_std(&g, &[2 * n, 2 * n, 2 * n]).unwrap();
            let inv = ctx.div(&ctx.one(), &sqrtval_to_float(&ctx, &exact_norm));
            let lead = ctx.mul(&constant, &ctx.powi(&rate, n as i64));
            let ratio = ctx.div(&inv, &lead);
            let mut series = ctx.zero();
            let nf = ctx.f(n as f64);
            for (l, mu) in mus.iter().enumerate() {
                let term = ctx.div(&ctx.rational(mu), &ctx.powi(&nf, l as i64));
                series = ctx.add(&series, &term);
            }
            let err = ctx
                .to_f64(&ctx.sub(&ctx.div(&ratio, &series), &ctx.one()))
                .abs();
            errs.push(err);
        }
        // The depth-8 remainder scales like n^{-9}.
        assert!(errs[0] < 1e-10, "error {} too large at n=24", errs[0]);
        assert!(errs[1] < errs[0] / 100.0, "no n^{{-9}} decay: {errs:?}");
    }

    #[test]
    fn factorial_recurrence_has_no_power_solutions() {
        // a_{n+1} = (n+1) a_n
        let coeffs = vec![vec![rat_i(-1), rat_i(-1)], vec![rat_i(0), rat_i(1)]];
        assert!(formal_solutions(&coeffs, 4).unwrap().is_empty());
    }

    #[test]
    fn formal_solution_of_geometric_over_n() {
        // a_n = 2^n / n solves (n+1) a_{n+1} - 2n a_n = 0.
        let coeffs = vec![vec![rat_i(-2), rat_i(0)], vec![rat_i(1), rat_i(1)]];
        let sols = formal_solutions(&coeffs, 4).unwrap();
        assert_eq!(sols.len(), 1);
        let s = &sols[0];
        assert_eq!(s.lambda, QuadNum::from_int(2));
        assert_eq!(s.alpha, QuadNum::from_int(-1));
        assert!(s.mu[1..].iter().all(|m| m.is_zero()));
    }

    #[test]
    fn formal_solution_with_one_correction_term() {
        // a_n = 3^n (1 + 1/n) solves (n+1)^2 a_{n+1} - 3n(n+2) a_n = 0.
        let coeffs = vec![
            vec![rat_i(-3), rat_i(-6), rat_i(0)],
            vec![rat_i(1), rat_i(2), rat_i(1)],
        ];
        let sols = formal_solutions(&coeffs, 5).unwrap();
        assert_eq!(sols.len(), 1);
        let s = &sols[0];
        assert_eq!(s.lambda, QuadNum::from_int(3));
        assert_eq!(s.alpha, QuadNum::zero());
        assert_eq!(s.mu[1], QuadNum::one());
        assert!(s.mu[2..].iter().all(|m| m.is_zero()));
    }

    #[test]
    fn formal_solutions_at_a_double_root() {
        // (n+2) a_{n+2} + (2n+2) a_{n+1} + n a_n = 0 has the exact
        // solutions (-1)^n and (-1)^n / n.
        let coeffs = vec![
            vec![rat_i(1), rat_i(0)],
            vec![rat_i(2), rat_i(2)],
            vec![rat_i(1), rat_i(2)],
        ];
        let sols = formal_solutions(&coeffs, 5).unwrap();
        assert_eq!(sols.len(), 2);
        let mut alphas: Vec<QuadNum> = sols.iter().map(|s| s.alpha.clone()).collect();
        alphas.sort_by_key(|a| a.as_rational().unwrap().clone());
        assert_eq!(alphas, vec![QuadNum::from_int(-1), QuadNum::zero()]);
        for s in &sols {
            assert_eq!(s.lambda, QuadNum::from_int(-1));
            assert_eq!(s.order, 2);
            assert!(s.mu[1..].iter().all(|m| m.is_zero()));
        }
    }

    #[test]
    fn radius_of_synthetic_power_law() {
        let seq: Vec<BigRational> = (0..=120i64)
            .map(|n| rat_i(3).pow(n as i32) * rat_i(n * n))
            .collect();
        let r = spectral_radius(&seq).unwrap();
        assert!((r / 3.0 - 1.0).abs() < 0.02, "radius {r}");
    }

    #[test]
    fn radius_of_unknot_sequence() {
        let seq: Vec<BigRational> = (0..=150u32)
            .map(|n| BigRational::from_integer(exact::unknot_std(n)))
            .collect();
        let r = spectral_radius(&seq).unwrap();
        assert!((r - 1.0).abs() < 0.02, "radius {r}");
    }

    /// Formal solutions and Stokes constants of the regular unitary
    /// sequence, the Stokes constant of each branch matched by the
    /// angle route.
    fn regular_expansion(ctx: &RealCtx) -> (Vec<BigRational>, Vec<FormalSolution>, Vec<Cx>) {
        let data = tet::tet_data(&[2; 6]).unwrap();
        let term = unitary_term(&data).unwrap();
        let seq = term.sequence(200);
        let rec = crate::recurrence::guess_recurrence(&seq[..40], 2, 8).unwrap();
        let sols = formal_solutions(&rec.coeffs, 7).unwrap();
        let (_, weighted) = data.angle_sums(ctx).unwrap();
        let half = weighted.scale(ctx, &ctx.f(0.5));
        let ep = Cx::new(ctx.neg(&half.im), half.re.clone()).exp(ctx);
        let (sp, sm) = data.stokes_euclidean(ctx).unwrap();
        let stokes: Vec<Cx> = sols
            .iter()
            .map(|s| {
                let lam = quad_to_cx(ctx, &s.lambda);
                let d = ctx.to_f64(&lam.sub(ctx, &ep).abs(ctx));
                if d < 1e-6 {
                    sp.clone()
                } else {
                    sm.clone()
                }
            })
            .collect();
        (seq, sols, stokes)
    }

    #[test]
    fn residual_decay_tracks_truncation_depth() {
        let ctx = RealCtx::new(320);
        let (seq, sols, stokes) = regular_expansion(&ctx);
        let probe: Vec<usize> = (50..=200).collect();
        let deep = expansion_residual(&ctx, &seq, &sols, &stokes, 6, &probe).unwrap();
        assert_eq!(deep.expected, -8.5);
        let got = deep.observed.unwrap();
        assert!((got - (-8.5)).abs() < 0.2, "deep decay {got}");
        let shallow = expansion_residual(&ctx, &seq, &sols, &stokes, 0, &probe).unwrap();
        assert_eq!(shallow.expected, -2.5);
        let got = shallow.observed.unwrap();
        assert!((got - (-2.5)).abs() < 0.2, "shallow decay {got}");
    }

    #[test]
    fn residual_of_zero_sequence_vanishes() {
        let ctx = RealCtx::new(128);
        let (_, sols, _) = regular_expansion(&ctx);
        let zeros = vec![BigRational::zero(); 81];
        let no_stokes = vec![Cx::real(&ctx, ctx.zero()); sols.len()];
        let probe: Vec<usize> = (40..=80).collect();
        let rep = expansion_residual(&ctx, &zeros, &sols, &no_stokes, 6, &probe).unwrap();
        assert!(rep.observed.is_none());
        assert!(rep.rows.iter().all(|r| r.ln_abs == f64::NEG_INFINITY));
    }

    #[test]
    fn residual_rejects_narrow_probes() {
        let ctx = RealCtx::new(128);
        let (seq, sols, stokes) = regular_expansion(&ctx);
        let err = expansion_residual(&ctx, &seq, &sols, &stokes, 2, &[60, 61, 62, 63]);
        assert!(matches!(err, Err(Error::Degenerate(_))));
    }

    #[test]
    fn guessed_recurrence_is_window_independent() {
        let data = tet::tet_data(&[2; 6]).unwrap();
        let term = unitary_term(&data).unwrap();
        let seq = term.sequence(80);
        let short = crate::recurrence::guess_recurrence(&seq[..40], 2, 8).unwrap();
        let long = crate::recurrence::guess_recurrence(&seq, 2, 12).unwrap();
        assert_eq!(short.coeffs, long.coeffs);

        // The two growth rates are reciprocal, so the characteristic
        // quadratic is palindromic: chi_0 = chi_2.
        let chi = short.characteristic();
        assert_eq!(chi.len(), 3);
        assert_eq!(chi[0], chi[2]);
    }
}
