//! Exact evaluation of colored cubic ribbon graphs.
//!
//! A coloring assigns a nonnegative integer to every edge and free loop.
//! It is admissible when at every vertex the three incident colors have
//! even sum and satisfy the triangle inequalities; inadmissible colorings
//! evaluate to zero.
//!
//! The production evaluator ([`eval_std`]) expands the bracket as a signed
//! sum over multisets of curves (cycle-space elements): a multiset L with
//! edge multiplicity vector equal to the coloring contributes
//! `(-1)^(i(L)+|L|) (|L|+1) |L|!/prod_c L_c!`, where i(L) counts crossing
//! pairs. An independent strand-diagram state sum ([`state_sum_penrose`])
//! serves as an oracle for the vertex-factored normalization.
//!
//! Four normalizations are exposed: `std` (the curve sum itself),
//! `penrose` (multiplied by the product of vertex half-slack factorials),
//! `edge` (penrose divided by the product of edge-color factorials), and
//! `unitary` (std divided by the positive square root of the product of
//! absolute theta values at the vertices).

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::graph::Graph;

// ==================== integer helpers ====================

pub fn factorial(n: u64) -> BigInt {
    let mut f = BigInt::one();
    for i in 2..=n {
        f *= i;
    }
    f
}

/// Multinomial coefficient (sum parts)! / prod parts!, kept integral at
/// every step of the accumulation.
pub fn multinomial(parts: &[u64]) -> BigInt {
    let mut acc = BigInt::one();
    let mut n = 0u64;
    for &p in parts {
        for i in 1..=p {
            n += 1;
            acc = acc * n / i;
        }
    }
    acc
}

fn rat_pow(r: &BigRational, n: u32) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..n {
        acc *= r;
    }
    acc
}

/// Half-slacks (x, y, z) of an admissible triple:
/// x = (-a+b+c)/2, y = (a-b+c)/2, z = (a+b-c)/2.
pub fn half_slacks(a: u32, b: u32, c: u32) -> Option<(u32, u32, u32)> {
    let (a, b, c) = (a as i64, b as i64, c as i64);
    if (a + b + c) % 2 != 0 {
        return None;
    }
    let x = -a + b + c;
    let y = a - b + c;
    let z = a + b - c;
    if x < 0 || y < 0 || z < 0 {
        None
    } else {
        Some(((x / 2) as u32, (y / 2) as u32, (z / 2) as u32))
    }
}

pub fn admissible(g: &Graph, coloring: &[u32]) -> bool {
    (0..g.nv()).all(|v| {
        let (a, b, c) = g.vertex_colors(v, coloring);
        half_slacks(a, b, c).is_some()
    })
}

// ==================== closed forms ====================

/// Theta network: (-1)^s (s+1) s!/(x! y! z!) with s = (a+b+c)/2.
pub fn theta_std(a: u32, b: u32, c: u32) -> BigInt {
    match half_slacks(a, b, c) {
        None => BigInt::zero(),
        Some((x, y, z)) => {
            let s = (x + y + z) as u64;
            let v = multinomial(&[x as u64, y as u64, z as u64]) * (s + 1);
            if s % 2 == 1 {
                -v
            } else {
                v
            }
        }
    }
}

/// Tetrahedron network with edge colors (a,b,c,d,e,f) and vertex triples
/// (a,b,e), (a,c,f), (c,d,e), (b,d,f):
///
/// ```text
/// sum_k (-1)^k (k+1) multinomial(k; S1-k, S2-k, S3-k, k-T1, .., k-T4)
/// ```
///
/// over max T <= k <= min S, where S1 = (a+b+c+d)/2, S2 = (a+d+e+f)/2,
/// S3 = (b+c+e+f)/2 and T1..T4 are the vertex half-sums. Each term is an
/// integer because the seven parts sum to k.
pub fn sixj_std(col: &[u32; 6]) -> BigInt {
    let [a, b, c, d, e, f] = col.map(|x| x as u64);
    for (p, q, r) in [(a, b, e), (a, c, f), (c, d, e), (b, d, f)] {
        if half_slacks(p as u32, q as u32, r as u32).is_none() {
            return BigInt::zero();
        }
    }
    let s = [
        (a + d + b + c) / 2,
        (a + d + e + f) / 2,
        (b + c + e + f) / 2,
    ];
    let t = [
        (a + b + e) / 2,
        (a + c + f) / 2,
        (c + d + e) / 2,
        (b + d + f) / 2,
    ];
    let kmin = *t.iter().max().unwrap();
    let kmax = *s.iter().min().unwrap();
    let mut sum = BigInt::zero();
    for k in kmin..=kmax {
        let parts = [
            s[0] - k,
            s[1] - k,
            s[2] - k,
            k - t[0],
            k - t[1],
            k - t[2],
            k - t[3],
        ];
        let term = multinomial(&parts) * (k + 1);
        if k % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
    }
    sum
}

/// A free loop colored m: (-1)^m (m+1).
pub fn unknot_std(m: u32) -> BigInt {
    let v = BigInt::from(m + 1);
    if m % 2 == 1 {
        -v
    } else {
        v
    }
}

// ==================== curve-multiset evaluator ====================

const CONFIG_BUDGET: u64 = 100_000_000;

struct CurveSum<'a> {
    g: &'a Graph,
    curves: &'a [u64],
    suffix_cover: Vec<u64>,
    iota_memo: HashMap<(usize, usize), u8>,
    visits: u64,
    total: BigInt,
}

impl CurveSum<'_> {
    fn iota(&mut self, i: usize, j: usize) -> u8 {
        let key = if i < j { (i, j) } else { (j, i) };
        if let Some(&p) = self.iota_memo.get(&key) {
            return p;
        }
        let p = self
            .g
            .crossing_parity(self.curves[key.0], self.curves[key.1]);
        self.iota_memo.insert(key, p);
        p
    }

    fn go(
        &mut self,
        i: usize,
        rem: &[u32],
        size: u64,
        denom: &BigInt,
        parity: u8,
        odd: &mut Vec<usize>,
    ) -> Result<()> {
        self.visits += 1;
        if self.visits > CONFIG_BUDGET {
            return Err(Error::Capacity(
                "curve-multiset enumeration exceeded its budget".into(),
            ));
        }
        let rem_mask: u64 = rem
            .iter()
            .enumerate()
            .filter(|(_, &r)| r > 0)
            .fold(0, |m, (e, _)| m | 1 << e);
        if rem_mask == 0 {
            // every later curve is forced to multiplicity 0
            let term = factorial(size) / denom * (size + 1);
            if (parity as u64 + size) % 2 == 1 {
                self.total -= term;
            } else {
                self.total += term;
            }
            return Ok(());
        }
        if i == self.curves.len() || rem_mask & !self.suffix_cover[i] != 0 {
            return Ok(());
        }
        let c = self.curves[i];
        let maxk = (0..rem.len())
            .filter(|&e| (c >> e) & 1 == 1)
            .map(|e| rem[e])
            .min()
            .unwrap_or(0);
        self.go(i + 1, rem, size, denom, parity, odd)?;
        if maxk == 0 {
            return Ok(());
        }
        let pc: u8 = {
            let idx: Vec<usize> = odd.clone();
            idx.into_iter().fold(0, |p, j| p ^ self.iota(i, j))
        };
        let mut r2 = rem.to_vec();
        let mut dk = denom.clone();
        for k in 1..=maxk {
            for (e, r) in r2.iter_mut().enumerate() {
                if (c >> e) & 1 == 1 {
                    *r -= 1;
                }
            }
            dk *= k as u64;
            let par = parity ^ ((k % 2) as u8 * pc);
            if k % 2 == 1 {
                odd.push(i);
            }
            let res = self.go(i + 1, &r2, size + k as u64, &dk, par, odd);
            if k % 2 == 1 {
                odd.pop();
            }
            res?;
        }
        Ok(())
    }
}

/// Exact evaluation in the std normalization.
pub fn eval_std(g: &Graph, coloring: &[u32]) -> Result<BigInt> {
    if coloring.len() != g.ncolors() {
        return Err(Error::Parse(format!(
            "coloring has {} entries, graph needs {}",
            coloring.len(),
            g.ncolors()
        )));
    }
    let mut loop_fac = BigInt::one();
    for l in 0..g.nloops() {
        loop_fac *= unknot_std(coloring[g.ne() + l]);
    }
    if g.ne() == 0 {
        return Ok(loop_fac);
    }
    if !admissible(g, coloring) {
        return Ok(BigInt::zero());
    }
    let target = &coloring[..g.ne()];
    if target.iter().all(|&c| c == 0) {
        return Ok(loop_fac);
    }
    let curves = g.curves()?;
    let mut suffix_cover = vec![0u64; curves.len() + 1];
    for i in (0..curves.len()).rev() {
        suffix_cover[i] = suffix_cover[i + 1] | curves[i];
    }
    let mut cs = CurveSum {
        g,
        curves: &curves,
        suffix_cover,
        iota_memo: HashMap::new(),
        visits: 0,
        total: BigInt::zero(),
    };
    cs.go(0, target, 0, &BigInt::one(), 0, &mut Vec::new())?;
    Ok(cs.total * loop_fac)
}

// ==================== strand-diagram state sum ====================

const STATE_SUM_BUDGET: u128 = 10_000_000;

/// All permutations of 0..n in a flat buffer with their sign bits,
/// generated by Heap's algorithm (each step is one transposition).
fn heap_permutations(n: usize) -> (Vec<u8>, Vec<u8>, usize) {
    let count: usize = (1..=n).product();
    let mut flat = Vec::with_capacity(count * n);
    let mut signs = Vec::with_capacity(count);
    let mut cur: Vec<u8> = (0..n as u8).collect();
    let mut sign = 0u8;
    flat.extend_from_slice(&cur);
    signs.push(sign);
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                cur.swap(0, i);
            } else {
                cur.swap(c[i], i);
            }
            sign ^= 1;
            flat.extend_from_slice(&cur);
            signs.push(sign);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    debug_assert_eq!(signs.len(), count);
    (flat, signs, count)
}

/// Independent oracle: expand every edge of color m into m strands joined
/// by a permutation (summed over all of them with their signs), tie the
/// strands at each vertex with the fixed noncrossing matching in reading
/// coordinates, and weight each state by (-2)^(number of closed loops).
/// The result is the vertex-factored (penrose) normalization. Free loops
/// contribute their exact closed form as a factor.
pub fn state_sum_penrose(g: &Graph, coloring: &[u32]) -> Result<BigInt> {
    if coloring.len() != g.ncolors() {
        return Err(Error::Parse(format!(
            "coloring has {} entries, graph needs {}",
            coloring.len(),
            g.ncolors()
        )));
    }
    let mut loop_fac = BigInt::one();
    for l in 0..g.nloops() {
        loop_fac *= unknot_std(coloring[g.ne() + l]);
    }
    if !admissible(g, coloring) {
        return Ok(BigInt::zero());
    }
    let mut budget: u128 = 1;
    for e in 0..g.ne() {
        budget = budget.saturating_mul((1..=coloring[e] as u128).product::<u128>().max(1));
    }
    if budget > STATE_SUM_BUDGET {
        return Err(Error::Capacity(format!(
            "state sum needs {budget} permutation states (limit {STATE_SUM_BUDGET})"
        )));
    }

    // node ids: one per (half-edge, strand line)
    let nh = 3 * g.nv();
    let mut node_base = vec![0usize; nh + 1];
    for h in 0..nh {
        node_base[h + 1] = node_base[h] + coloring[g.edge_of(h)] as usize;
    }
    let nnodes = node_base[nh];
    if nnodes == 0 {
        return Ok(loop_fac);
    }

    // reading position i (1-based) on half-edge h -> node id
    let node = |h: usize, i: u32| -> usize {
        let m = coloring[g.edge_of(h)];
        let s = if g.is_first_half(h) { i } else { m + 1 - i };
        node_base[h] + (s - 1) as usize
    };

    // fixed noncrossing matching at each vertex
    let mut vmatch = vec![usize::MAX; nnodes];
    for v in 0..g.nv() {
        let [ha, hb, hc] = g.vertex(v);
        let (a, b, c) = g.vertex_colors(v, coloring);
        let (x, y, z) = half_slacks(a, b, c).unwrap();
        let mut link = |h1: usize, i1: u32, h2: usize, i2: u32| {
            let n1 = node(h1, i1);
            let n2 = node(h2, i2);
            vmatch[n1] = n2;
            vmatch[n2] = n1;
        };
        for j in 1..=z {
            link(ha, a - j + 1, hb, j);
        }
        for j in 1..=x {
            link(hb, b - j + 1, hc, j);
        }
        for j in 1..=y {
            link(hc, c - j + 1, ha, j);
        }
    }
    debug_assert!(vmatch.iter().all(|&n| n != usize::MAX));

    // per-edge permutation tables
    let mut tables = Vec::with_capacity(g.ne());
    for e in 0..g.ne() {
        tables.push(heap_permutations(coloring[e] as usize));
    }

    // powers of -2 up to the maximal possible loop count
    let maxloops = nnodes / 2;
    let mut pow = Vec::with_capacity(maxloops + 1);
    pow.push(BigInt::one());
    for i in 1..=maxloops {
        pow.push(&pow[i - 1] * -2);
    }

    let mut ematch = vec![0usize; nnodes];
    let mut idx = vec![0usize; g.ne()];
    let mut visited = vec![false; nnodes];
    let mut total = BigInt::zero();
    loop {
        // wire the strands through every edge by the selected permutations
        let mut sign = 0u8;
        for e in 0..g.ne() {
            let m = coloring[e] as usize;
            let (flat, signs, _) = &tables[e];
            sign ^= signs[idx[e]];
            let perm = &flat[idx[e] * m..(idx[e] + 1) * m];
            let [h1, h2] = g.edge(e);
            for (s, &p) in perm.iter().enumerate() {
                let n1 = node_base[h1] + s;
                let n2 = node_base[h2] + p as usize;
                ematch[n1] = n2;
                ematch[n2] = n1;
            }
        }
        // count closed loops of the union of the two matchings
        visited.iter_mut().for_each(|b| *b = false);
        let mut loops = 0usize;
        for n0 in 0..nnodes {
            if visited[n0] {
                continue;
            }
            loops += 1;
            let mut cur = n0;
            loop {
                visited[cur] = true;
                let a = vmatch[cur];
                visited[a] = true;
                cur = ematch[a];
                if cur == n0 {
                    break;
                }
            }
        }
        if sign == 1 {
            total -= &pow[loops];
        } else {
            total += &pow[loops];
        }
        // odometer
        let mut e = 0;
        loop {
            if e == g.ne() {
                return Ok(total * loop_fac);
            }
            idx[e] += 1;
            if idx[e] < tables[e].2 {
                break;
            }
            idx[e] = 0;
            e += 1;
        }
    }
}

// ==================== normalizations ====================

/// Value of the form q * sqrt(m) with rational q and squarefree m >= 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SqrtVal {
    pub q: BigRational,
    pub m: BigInt,
}

impl SqrtVal {
    pub fn rational(q: BigRational) -> Self {
        SqrtVal {
            q,
            m: BigInt::one(),
        }
    }

    pub fn integer(n: BigInt) -> Self {
        Self::rational(BigRational::from_integer(n))
    }

    pub fn zero() -> Self {
        Self::integer(BigInt::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.q.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.m.is_one()
    }

    pub fn to_f64(&self) -> f64 {
        let q = self.q.numer().to_f64().unwrap_or(f64::NAN)
            / self.q.denom().to_f64().unwrap_or(f64::NAN);
        q * self.m.to_f64().unwrap_or(f64::NAN).sqrt()
    }
}

impl fmt::Display for SqrtVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() || self.is_zero() {
            write!(f, "{}", self.q)
        } else {
            write!(f, "{}*sqrt({})", self.q, self.m)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Norm {
    Std,
    Penrose,
    Edge,
    Unitary,
}

impl Norm {
    pub fn parse(s: &str) -> Result<Norm> {
        match s {
            "std" => Ok(Norm::Std),
            "penrose" => Ok(Norm::Penrose),
            "edge" => Ok(Norm::Edge),
            "unitary" => Ok(Norm::Unitary),
            _ => Err(Error::Parse(format!(
                "unknown normalization {s} (std, penrose, edge, unitary)"
            ))),
        }
    }
}

/// Product over vertices of x! y! z! (the half-slack factorials).
/// Requires an admissible coloring.
pub fn i_factor(g: &Graph, coloring: &[u32]) -> BigInt {
    let mut f = BigInt::one();
    for v in 0..g.nv() {
        let (a, b, c) = g.vertex_colors(v, coloring);
        let (x, y, z) = half_slacks(a, b, c).expect("admissible coloring");
        f *= factorial(x as u64) * factorial(y as u64) * factorial(z as u64);
    }
    f
}

/// Product of color factorials over edges and free loops.
pub fn e_factor(g: &Graph, coloring: &[u32]) -> BigInt {
    let mut f = BigInt::one();
    for &c in coloring.iter().take(g.ncolors()) {
        f *= factorial(c as u64);
    }
    f
}

fn legendre(n: u64, p: u64) -> i64 {
    let mut e = 0i64;
    let mut q = p;
    while q <= n {
        e += (n / q) as i64;
        match q.checked_mul(p) {
            Some(next) => q = next,
            None => break,
        }
    }
    e
}

fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    for i in 2..=n {
        if sieve[i] {
            for j in (i * i..=n).step_by(i) {
                sieve[j] = false;
            }
        }
    }
    (2..=n).filter(|&i| sieve[i]).map(|i| i as u64).collect()
}

/// Positive square root of the product over vertices of |theta| values,
/// as an exact q * sqrt(m). Per vertex |theta| = (s+1)!/(x! y! z!), so
/// the prime exponents come from Legendre's factorial formula.
pub fn theta_norm_std(g: &Graph, coloring: &[u32]) -> Result<SqrtVal> {
    if !admissible(g, coloring) {
        return Err(Error::Degenerate(
            "theta normalization of an inadmissible coloring".into(),
        ));
    }
    let mut exps: BTreeMap<u64, i64> = BTreeMap::new();
    let mut maxn = 1u64;
    for v in 0..g.nv() {
        let (a, b, c) = g.vertex_colors(v, coloring);
        let s = (a as u64 + b as u64 + c as u64) / 2;
        maxn = maxn.max(s + 1);
    }
    let primes = primes_up_to(maxn);
    for v in 0..g.nv() {
        let (a, b, c) = g.vertex_colors(v, coloring);
        let (x, y, z) = half_slacks(a, b, c).unwrap();
        let s = (x + y + z) as u64;
        for &p in &primes {
            if p > s + 1 {
                break;
            }
            let e = legendre(s + 1, p)
                - legendre(x as u64, p)
                - legendre(y as u64, p)
                - legendre(z as u64, p);
            if e != 0 {
                *exps.entry(p).or_insert(0) += e;
            }
        }
    }
    let mut q = BigInt::one();
    let mut m = BigInt::one();
    for (p, e) in exps {
        debug_assert!(e >= 0);
        q *= BigInt::from(p).pow((e / 2) as u32);
        if e % 2 == 1 {
            m *= p;
        }
    }
    Ok(SqrtVal {
        q: BigRational::from_integer(q),
        m,
    })
}

/// Evaluate in the requested normalization.
pub fn eval(g: &Graph, coloring: &[u32], norm: Norm) -> Result<SqrtVal> {
    let std = eval_std(g, coloring)?;
    if std.is_zero() {
        return Ok(SqrtVal::zero());
    }
    match norm {
        Norm::Std => Ok(SqrtVal::integer(std)),
        Norm::Penrose => Ok(SqrtVal::integer(std * i_factor(g, coloring))),
        Norm::Edge => Ok(SqrtVal::rational(BigRational::new(
            std * i_factor(g, coloring),
            e_factor(g, coloring),
        ))),
        Norm::Unitary => {
            let th = theta_norm_std(g, coloring)?;
            // std / (q sqrt(m)) = (std / (q m)) sqrt(m)
            let q =
                BigRational::from_integer(std) / (&th.q * BigRational::from_integer(th.m.clone()));
            Ok(SqrtVal { q, m: th.m })
        }
    }
}

// ==================== closed forms for drum and k33 ====================

/// Uniform coloring m on the drum with s radials, via the spectral
/// decomposition of the cyclic composition of its rungs: the block with
/// boundary color pair (m, 2j) contributes eigenvalue
/// sixj(m,m,m,m,m,2j)/theta(m,m,2j) with multiplicity weight (2j+1).
pub fn drum_closed_form(s: u32, m: u32) -> BigRational {
    if m % 2 == 1 {
        return BigRational::zero();
    }
    let mut total = BigRational::zero();
    for j in 0..=m {
        let k = 2 * j;
        let num = sixj_std(&[m, m, m, m, m, k]);
        let den = theta_std(m, m, k);
        let ratio = BigRational::new(num, den);
        total += BigRational::from_integer(BigInt::from(2 * j + 1)) * rat_pow(&ratio, s);
    }
    total
}

/// Uniform coloring m on k33; same block decomposition with the twist
/// sign (-1)^j from the diagonal crossings.
pub fn k33_closed_form(m: u32) -> BigRational {
    if m % 2 == 1 {
        return BigRational::zero();
    }
    let mut total = BigRational::zero();
    for j in 0..=m {
        let k = 2 * j;
        let num = sixj_std(&[m, m, m, m, m, k]);
        let den = theta_std(m, m, k);
        let term = BigRational::from_integer(BigInt::from(2 * j + 1))
            * rat_pow(&BigRational::new(num, den), 3);
        if j % 2 == 1 {
            total -= term;
        } else {
            total += term;
        }
    }
    total
}

/// Sign picked up by the std value when one vertex's cyclic order is
/// reversed: (-1)^(T(a)+T(b)+T(c)) with T(x) = x(x-1)/2.
pub fn flip_sign(a: u32, b: u32, c: u32) -> i32 {
    let t = |x: u64| x * (x.saturating_sub(1)) / 2;
    if (t(a as u64) + t(b as u64) + t(c as u64)) % 2 == 1 {
        -1
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn big(n: i64) -> BigInt {
        BigInt::from(n)
    }

    #[test]
    fn factorial_and_multinomial() {
        assert_eq!(factorial(6), big(720));
        assert_eq!(multinomial(&[2, 2, 0]), big(6));
        assert_eq!(multinomial(&[1, 1, 1]), big(6));
        assert_eq!(multinomial(&[3]), big(1));
        assert_eq!(multinomial(&[]), big(1));
    }

    #[test]
    fn theta_closed_form() {
        assert_eq!(theta_std(1, 1, 2), big(6));
        assert_eq!(theta_std(2, 2, 4), big(30));
        assert_eq!(theta_std(2, 2, 2), big(-24));
        assert_eq!(theta_std(0, 0, 0), big(1));
        assert_eq!(theta_std(1, 1, 1), big(0));
        assert_eq!(theta_std(1, 1, 4), big(0));
        assert_eq!(theta_std(3, 4, 5), big(420));
        assert_eq!(theta_std(4, 4, 6), big(-1120));
    }

    #[test]
    fn sixj_closed_form() {
        assert_eq!(sixj_std(&[2, 2, 2, 2, 2, 2]), big(96));
        assert_eq!(sixj_std(&[4, 4, 4, 4, 4, 4]), big(-17010));
        assert_eq!(sixj_std(&[3, 4, 4, 3, 5, 5]), big(-19740));
        assert_eq!(sixj_std(&[4, 4, 4, 4, 6, 6]), big(89600));
        assert_eq!(sixj_std(&[2, 2, 2, 2, 2, 0]), big(-24));
        assert_eq!(sixj_std(&[2, 2, 2, 2, 2, 4]), big(120));
        assert_eq!(sixj_std(&[1, 1, 1, 1, 1, 1]), big(0));
        assert_eq!(sixj_std(&[0, 0, 0, 0, 0, 0]), big(1));
    }

    #[test]
    fn chromatic_matches_theta_closed_form() {
        let g = Graph::theta();
        for a in 0..=6u32 {
            for b in 0..=6u32 {
                for c in 0..=6u32 {
                    let got = eval_std(&g, &[a, b, c]).unwrap();
                    assert_eq!(got, theta_std(a, b, c), "theta({a},{b},{c})");
                }
            }
        }
    }

    #[test]
    fn chromatic_matches_sixj_closed_form() {
        let g = Graph::tet();
        // a few fixed spot checks plus a random sweep
        for col in [
            [2u32, 2, 2, 2, 2, 2],
            [2, 2, 2, 2, 2, 0],
            [2, 2, 2, 2, 2, 4],
            [1, 1, 1, 1, 2, 2],
            [3, 4, 4, 3, 5, 5],
        ] {
            let got = eval_std(&g, &col).unwrap();
            assert_eq!(got, sixj_std(&col), "{col:?}");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut hits = 0;
        while hits < 10 {
            let col = g.random_even_coloring(&mut rng, 2).unwrap();
            let arr: [u32; 6] = col.clone().try_into().unwrap();
            if arr.iter().any(|&c| c > 4) {
                continue;
            }
            hits += 1;
            assert_eq!(eval_std(&g, &col).unwrap(), sixj_std(&arr), "{arr:?}");
        }
    }

    #[test]
    fn disconnected_curves_are_required() {
        // prism with 0-colored radials factors into two triangles
        let g = Graph::drum(3).unwrap();
        // edge order: c0 c1 c2 b0 b1 b2 r0 r1 r2
        let coloring = [2, 2, 2, 2, 2, 2, 0, 0, 0];
        assert_eq!(eval_std(&g, &coloring).unwrap(), big(9));
    }

    #[test]
    fn circle_and_zero_colorings() {
        let c = Graph::circle();
        assert_eq!(eval_std(&c, &[0]).unwrap(), big(1));
        assert_eq!(eval_std(&c, &[1]).unwrap(), big(-2));
        assert_eq!(eval_std(&c, &[5]).unwrap(), big(-6));
        let g = Graph::tet();
        assert_eq!(eval_std(&g, &[0; 6]).unwrap(), big(1));
        assert_eq!(eval_std(&g, &[1, 1, 1, 1, 1, 1]).unwrap(), big(0));
    }

    #[test]
    fn state_sum_agrees_with_curve_sum() {
        let th = Graph::theta();
        assert_eq!(state_sum_penrose(&th, &[1, 1, 2]).unwrap(), big(6));
        for col in [[1, 1, 2], [2, 2, 2], [2, 2, 4], [1, 2, 3], [3, 3, 2]] {
            let p = state_sum_penrose(&th, &col).unwrap();
            let s = eval_std(&th, &col).unwrap();
            assert_eq!(p, s * i_factor(&th, &col), "{col:?}");
        }
        let tet = Graph::tet();
        for col in [[2, 2, 2, 2, 2, 2], [1, 1, 1, 1, 2, 2], [2, 2, 2, 2, 2, 0]] {
            let p = state_sum_penrose(&tet, &col).unwrap();
            let s = eval_std(&tet, &col).unwrap();
            assert_eq!(p, s * i_factor(&tet, &col), "{col:?}");
        }
    }

    #[test]
    fn state_sum_on_prism_exercises_disconnected_curves() {
        let g = Graph::drum(3).unwrap();
        let coloring = [2, 2, 2, 2, 2, 2, 0, 0, 0];
        let p = state_sum_penrose(&g, &coloring).unwrap();
        assert_eq!(p, big(9) * i_factor(&g, &coloring));
        assert_eq!(i_factor(&g, &coloring), big(64));
    }

    #[test]
    fn normalization_goldens() {
        let th = Graph::theta();
        assert_eq!(
            eval(&th, &[1, 1, 2], Norm::Penrose).unwrap(),
            SqrtVal::integer(big(6))
        );
        assert_eq!(
            eval(&th, &[2, 2, 4], Norm::Std).unwrap(),
            SqrtVal::integer(big(30))
        );
        assert_eq!(
            eval(&th, &[2, 2, 4], Norm::Penrose).unwrap(),
            SqrtVal::integer(big(480))
        );
        // unitary theta is always a sign
        for col in [[1, 1, 2], [2, 2, 2], [2, 2, 4], [3, 3, 4]] {
            let u = eval(&th, &col, Norm::Unitary).unwrap();
            assert!(u.is_rational());
            let q = u.q.clone();
            assert!(q.is_one() || (-q).is_one(), "{col:?}");
        }
        // tetrahedron all twos: 96 / 576
        let tet = Graph::tet();
        let u = eval(&tet, &[2; 6], Norm::Unitary).unwrap();
        assert_eq!(u, SqrtVal::rational(BigRational::new(big(1), big(6))));
    }

    #[test]
    fn theta_norm_exact_sqrt() {
        let th = Graph::theta();
        // |theta(2,2,2)| = 24 at both vertices: sqrt(24)^2 = 24
        let t = theta_norm_std(&th, &[2, 2, 2]).unwrap();
        assert_eq!(t, SqrtVal::integer(big(24)));
        // single sqrt stays irrational: tet all twos has Theta = 24^2
        let tet = Graph::tet();
        let t = theta_norm_std(&tet, &[2; 6]).unwrap();
        assert_eq!(t, SqrtVal::integer(big(576)));
        // mixed: theta(1,1,2) has |theta| = 6, Theta = 6
        let t = theta_norm_std(&th, &[1, 1, 2]).unwrap();
        assert_eq!(t, SqrtVal::integer(big(6)));
        // coloring (c0, b0, r0) = (2, 2, 0): vertex triples (2,0,2) twice,
        // |theta(2,2,0)| = 3 each, so Theta = 3
        let g = Graph::drum(1).unwrap();
        let t = theta_norm_std(&g, &[2, 2, 0]).unwrap();
        assert_eq!(t, SqrtVal::integer(big(3)));
        // odd power of a prime survives under the root:
        // |theta| product 24 * 30 * 120 * 30 = 2^8 3^4 5^3
        let t = theta_norm_std(&tet, &[2, 2, 4, 4, 2, 2]).unwrap();
        assert_eq!(t.q, BigRational::from_integer(big(720)));
        assert_eq!(t.m, big(5));
    }

    #[test]
    fn drum_and_k33_closed_forms() {
        assert!(drum_closed_form(1, 2).is_zero());
        assert!(drum_closed_form(1, 4).is_zero());
        assert!(k33_closed_form(2).is_zero());
        // against the curve evaluator
        let d3 = Graph::drum(3).unwrap();
        let got = eval_std(&d3, &[2; 9]).unwrap();
        assert_eq!(BigRational::from_integer(got), drum_closed_form(3, 2));
        let k = Graph::k33();
        let got = eval_std(&k, &[2; 9]).unwrap();
        assert!(got.is_zero());
        assert_eq!(BigRational::from_integer(got), k33_closed_form(2));
    }

    #[test]
    fn drum1_vanishes_identically() {
        let g = Graph::drum(1).unwrap();
        for m in [2u32, 4, 6] {
            assert!(eval_std(&g, &[m, m, m]).unwrap().is_zero());
        }
    }

    #[test]
    fn flip_sign_values() {
        assert_eq!(flip_sign(2, 2, 2), -1);
        assert_eq!(flip_sign(0, 1, 1), 1);
        assert_eq!(flip_sign(1, 1, 2), -1);
        assert_eq!(flip_sign(0, 0, 0), 1);
    }

    #[test]
    fn flip_changes_std_by_the_lemma_sign() {
        let tet = Graph::tet();
        for col in [
            [2u32, 2, 2, 2, 2, 2],
            [2, 2, 2, 2, 2, 4],
            [1, 1, 2, 2, 2, 1],
        ] {
            let base = eval_std(&tet, &col).unwrap();
            assert!(!base.is_zero());
            for v in 0..tet.nv() {
                let flipped = tet.flip(v);
                let (a, b, c) = tet.vertex_colors(v, &col);
                let got = eval_std(&flipped, &col).unwrap();
                assert_eq!(got, base.clone() * flip_sign(a, b, c), "v={v} {col:?}");
            }
        }
    }

    #[test]
    fn subdivision_preserves_std() {
        let tet = Graph::tet();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let col = tet.random_even_coloring(&mut rng, 2).unwrap();
            let base = eval_std(&tet, &col).unwrap();
            for e in [0usize, 3, 5] {
                let (g2, [e1, e2, e3, rung]) = tet.subdivide(e);
                let mut col2 = vec![0u32; g2.ncolors()];
                let mut src = 0;
                for f in 0..tet.ne() {
                    if f == e {
                        continue;
                    }
                    col2[src] = col[f];
                    src += 1;
                }
                col2[e1] = col[e];
                col2[e2] = col[e];
                col2[e3] = col[e];
                col2[rung] = 0;
                assert_eq!(eval_std(&g2, &col2).unwrap(), base, "edge {e}");
            }
        }
    }

    #[test]
    fn norm_parsing() {
        assert_eq!(Norm::parse("std").unwrap(), Norm::Std);
        assert_eq!(Norm::parse("unitary").unwrap(), Norm::Unitary);
        assert!(Norm::parse("hyper").is_err());
    }
}
