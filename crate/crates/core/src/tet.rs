//! Metric geometry of the labeled tetrahedron.
//!
//! The six colors (a,b,c,d,e,f) are read as edge lengths of the dual
//! tetrahedron on points 1..4 with d12=a, d23=b, d14=c, d34=d, d13=e,
//! d24=f. The sign of the Cayley-Menger determinant decides whether
//! those lengths are realized in Euclidean 3-space, in the plane, or in
//! Minkowski space, and the exterior dihedral angles, growth rates and
//! Stokes constants of the evaluation asymptotics are all computed from
//! that realization.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use astro_float::BigFloat;

use crate::error::{Error, Result};
use crate::exact::{half_slacks, SqrtVal};
use crate::quadnum::{quadratic_roots, rat_i, rat_pair, QuadNum};
use crate::real::{Cx, RealCtx};

/// Color indices at the four vertices: (a,b,e), (a,c,f), (c,d,e), (b,d,f).
pub const VERTEX_TRIPLES: [[usize; 3]; 4] = [[0, 1, 4], [0, 2, 5], [2, 3, 4], [1, 3, 5]];

/// Point pair joined by each edge in the metric realization.
const EDGE_POINTS: [(usize, usize); 6] = [(1, 2), (2, 3), (1, 4), (3, 4), (1, 3), (2, 4)];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Geometry {
    Euclidean,
    Plane,
    Minkowskian,
}

impl std::fmt::Display for Geometry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Geometry::Euclidean => "euclidean",
            Geometry::Plane => "plane",
            Geometry::Minkowskian => "minkowskian",
        };
        write!(f, "{s}")
    }
}

/// Exact invariants of a colored tetrahedron.
pub struct TetData {
    pub colors: [u32; 6],
    /// Quadrilateral half-sums S1..S3 plus the sentinel S4 = 0.
    pub s: [i64; 4],
    /// Vertex half-sums T1..T4.
    pub t: [i64; 4],
    pub detc: BigRational,
    /// Coefficients of the variational equation A u^2 + B u + C' = 0.
    pub a: BigRational,
    pub b: BigRational,
    pub cprime: BigRational,
    pub disc: BigRational,
}

/// A critical point of the evaluation together with its growth rate,
/// split into the algebraic part lam and the vertex prefactor sqrt(Q).
pub struct Critical {
    pub v: QuadNum,
    pub lam: QuadNum,
    pub sqrt_q: SqrtVal,
    /// sqrt(Q) * lam when sqrt(Q) is rational, which keeps the rate in
    /// the quadratic field of the critical point.
    pub exact: Option<QuadNum>,
}

impl Critical {
    /// Numeric value of the growth rate at the given precision.
    pub fn numeric(&self, ctx: &RealCtx) -> Cx {
        let sq = sqrtval_to_float(ctx, &self.sqrt_q);
        quad_to_cx(ctx, &self.lam).scale(ctx, &sq)
    }
}

/// Evaluate a quadratic-field number as a complex float.
pub fn quad_to_cx(ctx: &RealCtx, q: &QuadNum) -> Cx {
    let a = ctx.rational(&q.a);
    if q.b.is_zero() {
        return Cx::real(ctx, a);
    }
    let root = ctx.sqrt(&ctx.bigint(&BigInt::from(q.m.abs())));
    let b = ctx.mul(&ctx.rational(&q.b), &root);
    if q.m < 0 {
        Cx::new(a, b)
    } else {
        Cx::real(ctx, ctx.add(&a, &b))
    }
}

/// Evaluate q * sqrt(m) as a float.
pub fn sqrtval_to_float(ctx: &RealCtx, v: &SqrtVal) -> BigFloat {
    let q = ctx.rational(&v.q);
    if v.is_rational() {
        q
    } else {
        ctx.mul(&q, &ctx.sqrt(&ctx.bigint(&v.m)))
    }
}

/// Rational determinant by cofactor expansion; fine for the 5x5 and
/// smaller matrices used here.
fn det_rat(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = BigRational::zero();
    for (j, top) in m[0].iter().enumerate() {
        if top.is_zero() {
            continue;
        }
        let minor: Vec<Vec<BigRational>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let term = top * det_rat(&minor);
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

/// Squared color as an exact rational.
fn color_sq(c: u32) -> BigRational {
    BigRational::from_integer(BigInt::from(c) * BigInt::from(c))
}

/// The modified Cayley-Menger matrix: row 0 is (0,-1,-1,-1,-1), column 0
/// is +1 below the corner, and C_ij = 1 - d_ij^2/2 for the points.
pub fn cayley_menger(colors: &[u32; 6]) -> Vec<Vec<BigRational>> {
    let mut c = vec![vec![BigRational::zero(); 5]; 5];
    for j in 1..5 {
        c[0][j] = rat_i(-1);
        c[j][0] = rat_i(1);
    }
    for i in 1..5 {
        c[i][i] = rat_i(1);
    }
    for (e, &(i, j)) in EDGE_POINTS.iter().enumerate() {
        let v = rat_i(1) - color_sq(colors[e]) / rat_i(2);
        c[i][j] = v.clone();
        c[j][i] = v;
    }
    c
}

fn cofactor(c: &[Vec<BigRational>], row: usize, col: usize) -> BigRational {
    let minor: Vec<Vec<BigRational>> = c
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| {
            r.iter()
                .enumerate()
                .filter(|(j, _)| *j != col)
                .map(|(_, v)| v.clone())
                .collect()
        })
        .collect();
    let d = det_rat(&minor);
    if (row + col).is_multiple_of(2) {
        d
    } else {
        -d
    }
}

fn delete_two(c: &[Vec<BigRational>], k: usize, l: usize) -> Vec<Vec<BigRational>> {
    c.iter()
        .enumerate()
        .filter(|(i, _)| *i != k && *i != l)
        .map(|(_, r)| {
            r.iter()
                .enumerate()
                .filter(|(j, _)| *j != k && *j != l)
                .map(|(_, v)| v.clone())
                .collect()
        })
        .collect()
}

/// Multiply out a product of linear factors sign*(u + shift) given as
/// (leading sign, constant term) pairs; returns coefficients by degree.
fn poly_product(factors: &[(i64, i64)]) -> Vec<BigRational> {
    let mut coeff = vec![rat_i(1)];
    for &(lead, cst) in factors {
        let mut next = vec![BigRational::zero(); coeff.len() + 1];
        for (d, c) in coeff.iter().enumerate() {
            next[d + 1] += c * rat_i(lead);
            next[d] += c * rat_i(cst);
        }
        coeff = next;
    }
    coeff
}

pub fn tet_data(colors: &[u32; 6]) -> Result<TetData> {
    let mut t = [0i64; 4];
    for (vi, tri) in VERTEX_TRIPLES.iter().enumerate() {
        let (a, b, c) = (colors[tri[0]], colors[tri[1]], colors[tri[2]]);
        if half_slacks(a, b, c).is_none() {
            return Err(Error::Degenerate(format!(
                "vertex colors ({a},{b},{c}) are inadmissible"
            )));
        }
        t[vi] = (a as i64 + b as i64 + c as i64) / 2;
    }
    let [a, b, c, d, e, f] = colors.map(|x| x as i64);
    let s = [
        (a + d + b + c) / 2,
        (a + d + e + f) / 2,
        (b + c + e + f) / 2,
        0,
    ];
    let detc = det_rat(&cayley_menger(colors));
    // E(u) = -prod(S_i - u) + prod(u - T_j) collapses to a quadratic
    let p1 = poly_product(&[(-1, s[0]), (-1, s[1]), (-1, s[2]), (-1, 0)]);
    let p2 = poly_product(&[(1, -t[0]), (1, -t[1]), (1, -t[2]), (1, -t[3])]);
    let eu: Vec<BigRational> = p1.iter().zip(&p2).map(|(x, y)| y - x).collect();
    debug_assert!(eu[4].is_zero() && eu[3].is_zero());
    let (qa, qb, qc) = (eu[2].clone(), eu[1].clone(), eu[0].clone());
    debug_assert_eq!(qa, rat_pair(a * d + b * c + e * f, 2));
    debug_assert_eq!(
        qb,
        -rat_pair(
            b * c * (b + c)
                + a * d * (a + d)
                + e * f * (e + f)
                + a * b * c
                + a * b * d
                + a * c * d
                + b * c * d
                + a * b * e
                + b * c * e
                + a * d * e
                + c * d * e
                + a * c * f
                + b * c * f
                + a * d * f
                + b * d * f
                + a * e * f
                + b * e * f
                + c * e * f
                + d * e * f,
            4
        )
    );
    let disc = &qb * &qb - rat_i(4) * &qa * &qc;
    debug_assert_eq!(disc, -&detc / rat_i(4));
    Ok(TetData {
        colors: *colors,
        s,
        t,
        detc,
        a: qa,
        b: qb,
        cprime: qc,
        disc,
    })
}

impl TetData {
    pub fn geometry(&self) -> Geometry {
        if self.detc.is_zero() {
            Geometry::Plane
        } else if self.detc.is_positive() {
            Geometry::Euclidean
        } else {
            Geometry::Minkowskian
        }
    }

    /// A tetrahedron is degenerate when some S_i equals some T_j (with
    /// S4 = 0 included); the critical points then collide with the
    /// branch points of the evaluation.
    pub fn is_degenerate(&self) -> bool {
        self.s.iter().any(|si| self.t.contains(si))
    }

    fn check_nondegenerate(&self) -> Result<()> {
        if self.is_degenerate() {
            return Err(Error::Degenerate(format!(
                "degenerate tetrahedron: coinciding half-sums in {:?}",
                self.colors
            )));
        }
        Ok(())
    }

    pub fn volume(&self, ctx: &RealCtx) -> BigFloat {
        let v = ctx.sqrt(&ctx.rational(&self.detc.abs()));
        ctx.div(&v, &ctx.f(6.0))
    }

    /// Roots of the variational equation; equal roots in the Plane case.
    pub fn critical_points(&self) -> Result<(QuadNum, QuadNum, bool)> {
        quadratic_roots(&self.a, &self.b, &self.cprime)
    }

    /// Product of x^x y^y z^z / s^s over the four vertices, as an exact
    /// square root via prime factorization.
    pub fn sqrt_q(&self) -> SqrtVal {
        let mut exps: std::collections::BTreeMap<u64, i64> = Default::default();
        let mut add = |base: u64, e: i64| {
            if base < 2 || e == 0 {
                return;
            }
            let mut n = base;
            let mut p = 2u64;
            while p * p <= n {
                while n.is_multiple_of(p) {
                    *exps.entry(p).or_insert(0) += e;
                    n /= p;
                }
                p += 1;
            }
            if n > 1 {
                *exps.entry(n).or_insert(0) += e;
            }
        };
        for tri in VERTEX_TRIPLES {
            let (a, b, c) = (
                self.colors[tri[0]],
                self.colors[tri[1]],
                self.colors[tri[2]],
            );
            let (x, y, z) = half_slacks(a, b, c).expect("admissible by construction");
            let sum = ((a + b + c) / 2) as u64;
            add(x as u64, x as i64);
            add(y as u64, y as i64);
            add(z as u64, z as i64);
            add(sum, -(sum as i64));
        }
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        let mut m = BigInt::one();
        for (p, e) in exps {
            let r = e.rem_euclid(2);
            let h = (e - r) / 2;
            if h >= 0 {
                num *= BigInt::from(p).pow(h as u32);
            } else {
                den *= BigInt::from(p).pow((-h) as u32);
            }
            if r == 1 {
                m *= BigInt::from(p);
            }
        }
        SqrtVal {
            q: BigRational::new(num, den),
            m,
        }
    }

    /// The growth rates, one per critical point (a single entry in the
    /// Plane case).
    pub fn growth_rates(&self) -> Result<Vec<Critical>> {
        self.check_nondegenerate()?;
        let (r1, r2, double) = self.critical_points()?;
        let sqrt_q = self.sqrt_q();
        let roots = if double { vec![r1] } else { vec![r1, r2] };
        let mut out = Vec::new();
        for v in roots {
            let mut lam = QuadNum::one();
            for &tj in &self.t {
                let lin = v.sub(&QuadNum::from_int(tj));
                lam = lam.mul(&lin.powi(tj));
            }
            for &si in &self.s[..3] {
                let lin = QuadNum::from_int(si).sub(&v);
                lam = lam.div(&lin.powi(si));
            }
            let exact = if sqrt_q.is_rational() {
                Some(lam.scale(&sqrt_q.q))
            } else {
                None
            };
            out.push(Critical {
                v,
                lam,
                sqrt_q: sqrt_q.clone(),
                exact,
            });
        }
        Ok(out)
    }

    /// Exterior dihedral angles at the six edges, principal values.
    /// Real in the Euclidean case and of the form n*pi + i*omega in the
    /// Minkowskian case.
    pub fn dihedral_angles(&self, ctx: &RealCtx) -> Result<[Cx; 6]> {
        self.check_nondegenerate()?;
        let c = cayley_menger(&self.colors);
        let mut out = Vec::with_capacity(6);
        for (e, &(i, j)) in EDGE_POINTS.iter().enumerate() {
            let (k, l) = {
                let mut rest = [1usize, 2, 3, 4].into_iter().filter(|&p| p != i && p != j);
                (rest.next().unwrap(), rest.next().unwrap())
            };
            let adkl = cofactor(&c, k, l);
            let adkk = cofactor(&c, k, k);
            let adll = cofactor(&c, l, l);
            debug_assert_eq!(adkl, cofactor(&c, l, k));
            let ckkll = det_rat(&delete_two(&c, k, l));
            let d2 = color_sq(self.colors[e]);
            debug_assert_eq!(ckkll, d2);
            // Jacobi identity ties the minors to det(C)
            debug_assert_eq!(&adkk * &adll - &adkl * &adkl, &self.detc * &ckkll);
            let denom2 = &adkk * &adll;
            if denom2.is_zero() {
                return Err(Error::Degenerate(format!(
                    "flat vertex triangle at edge {e} of {:?}",
                    self.colors
                )));
            }
            let rad = -&self.detc * &d2;
            let num = Cx::real(ctx, ctx.rational(&adkl)).add(ctx, &sqrt_of_rational(ctx, &rad));
            let den = sqrt_of_rational(ctx, &denom2);
            let z = num.div(ctx, &den);
            // theta = -i Log z
            let lnz = z.ln(ctx);
            out.push(Cx::new(lnz.im.clone(), ctx.neg(&lnz.re)));
        }
        Ok(out.try_into().map_err(|_| ()).unwrap())
    }

    /// (sum_a theta_a, sum_a gamma_a theta_a) over the six edges.
    pub fn angle_sums(&self, ctx: &RealCtx) -> Result<(Cx, Cx)> {
        let th = self.dihedral_angles(ctx)?;
        let mut plain = Cx::real(ctx, ctx.zero());
        let mut weighted = Cx::real(ctx, ctx.zero());
        for (e, angle) in th.iter().enumerate() {
            plain = plain.add(ctx, angle);
            weighted = weighted.add(ctx, &angle.scale(ctx, &ctx.f(self.colors[e] as f64)));
        }
        Ok((plain, weighted))
    }

    /// Stokes constants for the Euclidean case,
    /// exp(+-i(sum theta/2 + pi/4)) / sqrt(6 pi Vol).
    pub fn stokes_euclidean(&self, ctx: &RealCtx) -> Result<(Cx, Cx)> {
        let (plain, _) = self.angle_sums(ctx)?;
        let denom = ctx.sqrt(&ctx.mul(&ctx.mul(&ctx.f(6.0), &ctx.pi()), &self.volume(ctx)));
        let quarter = ctx.div(&ctx.pi(), &ctx.f(4.0));
        let half = plain.scale(ctx, &ctx.f(0.5));
        let phase = half.add(ctx, &Cx::real(ctx, quarter));
        let i_phase = Cx::new(ctx.neg(&phase.im), phase.re.clone());
        let sp = i_phase.exp(ctx);
        let sm = i_phase.neg(ctx).exp(ctx);
        Ok((
            sp.scale(ctx, &ctx.div(&ctx.one(), &denom)),
            sm.scale(ctx, &ctx.div(&ctx.one(), &denom)),
        ))
    }

    /// Stokes constants for the Minkowskian case,
    /// -+ exp(+-i sum theta/2) / sqrt(6 pi Vol).
    pub fn stokes_minkowskian(&self, ctx: &RealCtx) -> Result<(Cx, Cx)> {
        let (plain, _) = self.angle_sums(ctx)?;
        let denom = ctx.sqrt(&ctx.mul(&ctx.mul(&ctx.f(6.0), &ctx.pi()), &self.volume(ctx)));
        let half = plain.scale(ctx, &ctx.f(0.5));
        let i_phase = Cx::new(ctx.neg(&half.im), half.re.clone());
        let sp = i_phase.exp(ctx).neg(ctx);
        let sm = i_phase.neg(ctx).exp(ctx);
        Ok((
            sp.scale(ctx, &ctx.div(&ctx.one(), &denom)),
            sm.scale(ctx, &ctx.div(&ctx.one(), &denom)),
        ))
    }

    /// The branch of the Minkowskian expansion that survives: the growth
    /// rate exp(epsilon i sum gamma theta / 2) inside the unit circle
    /// together with its Stokes constant.
    pub fn minkowskian_branch(&self, ctx: &RealCtx) -> Result<(Cx, Cx)> {
        let (_, weighted) = self.angle_sums(ctx)?;
        let half = weighted.scale(ctx, &ctx.f(0.5));
        let i_half = Cx::new(ctx.neg(&half.im), half.re.clone());
        let lp = i_half.exp(ctx);
        let lm = i_half.neg(ctx).exp(ctx);
        let (sp, sm) = self.stokes_minkowskian(ctx)?;
        let one = ctx.one();
        if ctx.cmp(&lp.abs(ctx), &one) == std::cmp::Ordering::Less {
            Ok((lp, sp))
        } else if ctx.cmp(&lm.abs(ctx), &one) == std::cmp::Ordering::Less {
            Ok((lm, sm))
        } else {
            Err(Error::Degenerate(
                "no Minkowskian growth rate inside the unit circle".into(),
            ))
        }
    }

    /// Stokes constant for the Plane case,
    /// Gamma(4/3) (12A)^(1/3) / (pi prod |B_j|^(1/6)).
    pub fn stokes_plane(&self, ctx: &RealCtx) -> Result<BigFloat> {
        if self.geometry() != Geometry::Plane {
            return Err(Error::Degenerate(
                "plane Stokes constant requested for a non-plane tetrahedron".into(),
            ));
        }
        self.check_nondegenerate()?;
        let g43 = ctx.gamma(&ctx.rational(&rat_pair(4, 3)));
        let twelve_a = ctx.mul(&ctx.f(12.0), &ctx.rational(&self.a));
        let mut num = ctx.mul(&g43, &ctx.pow_rat(&twelve_a, &rat_pair(1, 3)));
        for bj in self.plane_b() {
            let f = ctx.pow_rat(&ctx.rational(&bj.abs()), &rat_pair(1, 6));
            num = ctx.div(&num, &f);
        }
        Ok(ctx.div(&num, &ctx.pi()))
    }

    /// The four cubic invariants B_j = B + 2 A T_j of a Plane tetrahedron.
    pub fn plane_b(&self) -> [BigRational; 4] {
        self.t.map(|tj| &self.b + rat_i(2) * &self.a * rat_i(tj))
    }

    /// Exact third derivative of the potential at the double critical
    /// point of a Plane tetrahedron: V'''(v) = -2A / prod(v - T_j).
    pub fn plane_third_derivative(&self) -> Result<BigRational> {
        if !self.disc.is_zero() {
            return Err(Error::Degenerate(
                "third-derivative identity needs a double critical point".into(),
            ));
        }
        let v = -&self.b / (rat_i(2) * &self.a);
        let mut prod = rat_i(1);
        for &tj in &self.t {
            prod *= &v - rat_i(tj);
        }
        Ok(-rat_i(2) * &self.a / prod)
    }

    /// Leading Ponzano-Regge estimate of the unitary evaluation at n
    /// times the coloring, for Euclidean tetrahedra:
    /// sqrt(2) cos(n sum a theta_a/2 + sum theta_a/2 + pi/4)
    ///   / sqrt(3 pi n^3 Vol).
    pub fn ponzano_regge(&self, ctx: &RealCtx, n: u64) -> Result<BigFloat> {
        if self.geometry() != Geometry::Euclidean {
            return Err(Error::Degenerate(
                "Ponzano-Regge estimate requested for a non-Euclidean tetrahedron".into(),
            ));
        }
        let (plain, weighted) = self.angle_sums(ctx)?;
        let nf = ctx.f(n as f64);
        let mut arg = ctx.mul(&nf, &ctx.div(&weighted.re, &ctx.f(2.0)));
        arg = ctx.add(&arg, &ctx.div(&plain.re, &ctx.f(2.0)));
        arg = ctx.add(&arg, &ctx.div(&ctx.pi(), &ctx.f(4.0)));
        let n3 = ctx.mul(&nf, &ctx.mul(&nf, &nf));
        let denom = ctx.sqrt(&ctx.mul(
            &ctx.mul(&ctx.f(3.0), &ctx.pi()),
            &ctx.mul(&n3, &self.volume(ctx)),
        ));
        Ok(ctx.div(&ctx.mul(&ctx.sqrt(&ctx.f(2.0)), &ctx.cos(&arg)), &denom))
    }
}

/// Principal square root of a rational as a complex float.
fn sqrt_of_rational(ctx: &RealCtx, q: &BigRational) -> Cx {
    if q.is_zero() {
        return Cx::real(ctx, ctx.zero());
    }
    let root = ctx.sqrt(&ctx.rational(&q.abs()));
    if q.is_negative() {
        Cx::new(ctx.zero(), root)
    } else {
        Cx::real(ctx, root)
    }
}
