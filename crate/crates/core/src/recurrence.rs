//! Guessing linear recurrences with polynomial coefficients.
//!
//! Given exact rational values a_0, a_1, ..., the guesser searches for
//! a relation
//!
//! ```text
//!     sum_{i=0}^{r} p_i(n) a_{n+i} = 0   for all n >= 0,
//! ```
//!
//! with polynomials p_i of degree at most d, trying orders and degrees
//! in increasing size.  The linear system for the coefficients is
//! solved modulo 62-bit primes; candidate kernels found there are
//! lifted by Chinese remaindering and rational reconstruction.  A
//! candidate is accepted only after an exact check against every input
//! term, including a block of held-out values that never entered the
//! linear system, so a wrong lift can cost time but never correctness.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::quadnum::rat_i;

/// A recurrence sum_i p_i(n) a_{n+i} = 0.  Row i holds the coefficients
/// of p_i by descending powers of n; all rows share one width.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recurrence {
    pub coeffs: Vec<Vec<BigRational>>,
}

impl Recurrence {
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn degree(&self) -> usize {
        self.coeffs[0].len() - 1
    }

    /// p_i(n).
    pub fn poly_at(&self, i: usize, n: i64) -> BigRational {
        let mut acc = BigRational::zero();
        for c in &self.coeffs[i] {
            acc = acc * rat_i(n) + c;
        }
        acc
    }

    /// Verify the relation at every window of the given values.
    pub fn check(&self, seq: &[BigRational]) -> bool {
        let r = self.order();
        if seq.len() <= r {
            return false;
        }
        for n in 0..seq.len() - r {
            let mut acc = BigRational::zero();
            for i in 0..=r {
                acc += self.poly_at(i, n as i64) * &seq[n + i];
            }
            if !acc.is_zero() {
                return false;
            }
        }
        true
    }

    /// Extend a sequence in place up to index `upto` using the
    /// recurrence, solving for the top shift each step.
    pub fn extend(&self, seq: &mut Vec<BigRational>, upto: usize) -> Result<()> {
        let r = self.order();
        if seq.len() < r {
            return Err(Error::Degenerate(
                "not enough initial terms to run the recurrence".into(),
            ));
        }
        while seq.len() <= upto {
            let n = (seq.len() - r) as i64;
            let lead = self.poly_at(r, n);
            if lead.is_zero() {
                return Err(Error::Degenerate(format!(
                    "leading recurrence coefficient vanishes at n = {n}"
                )));
            }
            let mut acc = BigRational::zero();
            for i in 0..r {
                acc += self.poly_at(i, n) * &seq[n as usize + i];
            }
            seq.push(-acc / lead);
        }
        Ok(())
    }

    /// Characteristic polynomial: ascending coefficients chi_i = c_{i,0},
    /// the leading n-coefficients of the p_i.
    pub fn characteristic(&self) -> Vec<BigRational> {
        self.coeffs.iter().map(|row| row[0].clone()).collect()
    }
}

impl std::fmt::Display for Recurrence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let d = self.degree();
        for (i, row) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "(")?;
            let mut first = true;
            for (j, c) in row.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let pow = d - j;
                if first {
                    write!(f, "{c}")?;
                    first = false;
                } else if c.is_negative() {
                    write!(f, " - {}", -c)?;
                } else {
                    write!(f, " + {c}")?;
                }
                match pow {
                    0 => {}
                    1 => write!(f, " n")?,
                    _ => write!(f, " n^{pow}")?,
                }
            }
            if first {
                write!(f, "0")?;
            }
            write!(f, ") a(n+{i})")?;
        }
        write!(f, " = 0")
    }
}

const HELD_OUT: usize = 8;

/// Stop lifting a candidate kernel once the modulus passes this size.
const MODULUS_BITS: u64 = 4096;

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    acc
}

fn invmod(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

/// Deterministic Miller-Rabin for 64-bit integers.
fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Fixed stream of 62-bit primes, largest first.
fn next_prime_below(n: u64) -> u64 {
    let mut c = if n.is_multiple_of(2) { n - 1 } else { n - 2 };
    loop {
        if is_prime_u64(c) {
            return c;
        }
        c -= 2;
    }
}

fn bigint_mod(n: &BigInt, p: u64) -> u64 {
    let r = n % BigInt::from(p);
    let r = if r.is_negative() {
        r + BigInt::from(p)
    } else {
        r
    };
    r.to_u64().unwrap()
}

/// Reduce the sequence mod p; None when a denominator vanishes.
fn reduce_mod(seq: &[BigRational], p: u64) -> Option<Vec<u64>> {
    let mut out = Vec::with_capacity(seq.len());
    for v in seq {
        let den = bigint_mod(v.denom(), p);
        if den == 0 {
            return None;
        }
        let num = bigint_mod(v.numer(), p);
        out.push(mulmod(num, invmod(den, p), p));
    }
    Some(out)
}

/// Kernel of a dense matrix over Z/p in reduced echelon normal form.
/// Returns the pivot columns and one basis vector per free column.
fn kernel_mod(mut m: Vec<Vec<u64>>, p: u64) -> (Vec<usize>, Vec<Vec<u64>>) {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots: Vec<usize> = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let inv = invmod(m[rank][col], p);
        for c in col..cols {
            m[rank][c] = mulmod(m[rank][c], inv, p);
        }
        for r in 0..rows {
            if r != rank && m[r][col] != 0 {
                let f = m[r][col];
                for c in col..cols {
                    let sub = mulmod(f, m[rank][c], p);
                    m[r][c] = (m[r][c] + p - sub) % p;
                }
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == rows {
            break;
        }
    }
    let mut basis = Vec::new();
    for free in 0..cols {
        if pivots.contains(&free) {
            continue;
        }
        let mut v = vec![0u64; cols];
        v[free] = 1;
        for (row, &pc) in pivots.iter().enumerate() {
            if pc < free && m[row][free] != 0 {
                v[pc] = p - m[row][free];
            }
        }
        basis.push(v);
    }
    (pivots, basis)
}

/// Rational reconstruction of c mod m with numerator and denominator
/// bounded by sqrt(m/2).
fn rational_reconstruct(c: &BigInt, m: &BigInt) -> Option<BigRational> {
    let bound: BigInt = (m >> 1u8).sqrt();
    let mut r0 = m.clone();
    let mut r1 = c.mod_floor(m);
    let mut t0 = BigInt::zero();
    let mut t1 = BigInt::one();
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.magnitude() > bound.magnitude() {
        return None;
    }
    if t1.is_negative() {
        r1 = -r1;
        t1 = -t1;
    }
    if r1.gcd(&t1) != BigInt::one() {
        return None;
    }
    Some(BigRational::new(r1, t1))
}

/// Clear denominators, divide by the content and fix the sign so that
/// the leading coefficient of the top polynomial is positive.
fn normalize(vec: &[BigRational], r: usize, width: usize) -> Option<Recurrence> {
    let mut lcm = BigInt::one();
    for v in vec {
        lcm = num_integer::lcm(lcm, v.denom().clone());
    }
    let ints: Vec<BigInt> = vec.iter().map(|v| v.numer() * (&lcm / v.denom())).collect();
    let mut content = BigInt::zero();
    for v in &ints {
        content = num_integer::gcd(content, v.clone());
    }
    if content.is_zero() {
        return None;
    }
    let mut ints: Vec<BigInt> = ints.into_iter().map(|v| v / &content).collect();
    // Reject relations whose top polynomial vanishes identically: they
    // are lower-order relations in disguise.
    if ints[r * width..].iter().all(|v| v.is_zero()) {
        return None;
    }
    let lead = ints[r * width..].iter().find(|v| !v.is_zero()).unwrap();
    if lead.is_negative() {
        for v in &mut ints {
            *v = -v.clone();
        }
    }
    let coeffs = ints
        .chunks(width)
        .map(|row| {
            row.iter()
                .map(|v| BigRational::from_integer(v.clone()))
                .collect()
        })
        .collect();
    Some(Recurrence { coeffs })
}

/// Linear-system rows mod p for one (r, d) candidate: row n has the
/// entries n^(d-j) a_{n+i} for the unknown coefficients c_{ij}.
fn build_rows(am: &[u64], p: u64, r: usize, width: usize, rows: usize) -> Vec<Vec<u64>> {
    let mut m = Vec::with_capacity(rows);
    for n in 0..rows {
        let mut npow = vec![1u64; width];
        for j in (0..width.saturating_sub(1)).rev() {
            npow[j] = mulmod(npow[j + 1], n as u64 % p, p);
        }
        let mut row = Vec::with_capacity((r + 1) * width);
        for i in 0..=r {
            for np in &npow {
                row.push(mulmod(*np, am[n + i], p));
            }
        }
        m.push(row);
    }
    m
}

fn crt_merge(acc: &mut [BigInt], modulus: &BigInt, residues: &[u64], p: u64) {
    let minv = invmod(bigint_mod(modulus, p), p);
    for (a, &b) in acc.iter_mut().zip(residues) {
        // x = a + M t with t = (b - a) / M mod p
        let diff = (b + p - bigint_mod(a, p)) % p;
        let t = mulmod(diff, minv, p);
        *a += modulus * BigInt::from(t);
    }
}

/// Search for the smallest recurrence satisfied by the given exact
/// values, by increasing order and then degree.  The last eight windows
/// are held out of the linear system and only used for validation.
pub fn guess_recurrence(
    seq: &[BigRational],
    max_order: usize,
    max_degree: usize,
) -> Result<Recurrence> {
    if seq.is_empty() {
        return Err(Error::Parse("empty sequence".into()));
    }
    let mut primes: Vec<u64> = Vec::new();
    let mut reduced: Vec<Vec<u64>> = Vec::new();
    let mut cursor = 1u64 << 62;
    let mut take_prime = |primes: &mut Vec<u64>, reduced: &mut Vec<Vec<u64>>, idx: usize| {
        while primes.len() <= idx {
            loop {
                cursor = next_prime_below(cursor);
                if let Some(am) = reduce_mod(seq, cursor) {
                    primes.push(cursor);
                    reduced.push(am);
                    break;
                }
            }
        }
    };

    for r in 1..=max_order {
        for d in 0..=max_degree {
            let width = d + 1;
            let unknowns = (r + 1) * width;
            if seq.len() < unknowns + (r + 1) + r + HELD_OUT {
                continue;
            }
            let fit_rows = seq.len() - r - HELD_OUT;

            take_prime(&mut primes, &mut reduced, 0);
            let p0 = primes[0];
            let (pivots, basis) = kernel_mod(build_rows(&reduced[0], p0, r, width, fit_rows), p0);
            if basis.is_empty() {
                continue;
            }

            let mut lifted: Vec<Vec<BigInt>> = basis
                .iter()
                .map(|v| v.iter().map(|&x| BigInt::from(x)).collect())
                .collect();
            let mut modulus = BigInt::from(p0);
            let mut idx = 1;
            loop {
                // Attempt reconstruction of every basis vector at the
                // current modulus; only exactly validated hits count.
                for vec in &lifted {
                    let cand: Option<Vec<BigRational>> = vec
                        .iter()
                        .map(|c| rational_reconstruct(c, &modulus))
                        .collect();
                    if let Some(cand) = cand {
                        if let Some(rec) = normalize(&cand, r, width) {
                            if rec.check(seq) {
                                return Ok(rec);
                            }
                        }
                    }
                }
                if modulus.bits() > MODULUS_BITS {
                    break;
                }
                take_prime(&mut primes, &mut reduced, idx);
                let p = primes[idx];
                let (piv, bas) = kernel_mod(build_rows(&reduced[idx], p, r, width, fit_rows), p);
                idx += 1;
                if piv != pivots || bas.len() != lifted.len() {
                    // Unlucky prime: the rank pattern differs.
                    continue;
                }
                for (acc, res) in lifted.iter_mut().zip(&bas) {
                    crt_merge(acc, &modulus, res, p);
                }
                modulus *= BigInt::from(p);
            }
        }
    }
    Err(Error::NotFound(format!(
        "no recurrence of order <= {max_order} and degree <= {max_degree} fits {} terms",
        seq.len()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact;
    use crate::quadnum::rat_pair;

    fn ints(vals: &[i64]) -> Vec<BigRational> {
        vals.iter().map(|&v| rat_i(v)).collect()
    }

    #[test]
    fn prime_stream_is_prime() {
        let p = next_prime_below(1 << 62);
        assert!(is_prime_u64(p));
        assert!(!is_prime_u64((1 << 62) - 1));
        assert!(is_prime_u64((1 << 61) - 1));
    }

    #[test]
    fn reconstructs_small_rationals() {
        let m = BigInt::from(1_000_003u64) * BigInt::from(999_983u64);
        // 22/7 mod m
        let c = (BigInt::from(22) * BigInt::from(7).modinv(&m).unwrap()) % &m;
        let got = rational_reconstruct(&c, &m).unwrap();
        assert_eq!(got, rat_pair(22, 7));
    }

    #[test]
    fn guesses_fibonacci() {
        let mut seq = ints(&[0, 1]);
        for n in 2..40 {
            let next = &seq[n - 1] + &seq[n - 2];
            seq.push(next);
        }
        let rec = guess_recurrence(&seq, 3, 3).unwrap();
        assert_eq!(rec.order(), 2);
        assert_eq!(rec.degree(), 0);
        assert_eq!(
            rec.coeffs,
            vec![vec![rat_i(-1)], vec![rat_i(-1)], vec![rat_i(1)]]
        );
    }

    #[test]
    fn guesses_catalan() {
        // C_{n+1} = 2(2n+1)/(n+2) C_n:
        // (n+2) a(n+1) - (4n+2) a(n) = 0
        let mut seq = vec![BigRational::one()];
        for n in 0..35i64 {
            let next = &seq[n as usize] * rat_pair(2 * (2 * n + 1), n + 2);
            seq.push(next);
        }
        let rec = guess_recurrence(&seq, 2, 2).unwrap();
        assert_eq!(rec.order(), 1);
        assert_eq!(rec.degree(), 1);
        assert_eq!(
            rec.coeffs,
            vec![vec![rat_i(-4), rat_i(-2)], vec![rat_i(1), rat_i(2)]]
        );
    }

    #[test]
    fn guessed_recurrence_extends() {
        let mut seq = vec![BigRational::one()];
        for n in 0..40i64 {
            let next = &seq[n as usize] * rat_pair(2 * (2 * n + 1), n + 2);
            seq.push(next);
        }
        let rec = guess_recurrence(&seq[..30], 2, 2).unwrap();
        let mut ext = seq[..5].to_vec();
        rec.extend(&mut ext, 40).unwrap();
        assert_eq!(ext, seq);
    }

    #[test]
    fn rejects_random_data() {
        // Pseudo-random values admit no small recurrence.
        let mut seq = Vec::new();
        let mut state = 12345u64;
        for _ in 0..40 {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            seq.push(rat_i((state >> 40) as i64 + 1));
        }
        assert!(matches!(
            guess_recurrence(&seq, 2, 2),
            Err(Error::NotFound(_))
        ));
    }

    #[test]
    fn theta_diagonal_recurrence_has_cubic_characteristic_root() {
        // theta(2n, 2n, 2n) = (-1)^n (3n+1)!/n!^3 grows like (-27)^n.
        let seq: Vec<BigRational> = (0..40u32)
            .map(|n| BigRational::from_integer(exact::theta_std(2 * n, 2 * n, 2 * n)))
            .collect();
        let rec = guess_recurrence(&seq, 2, 3).unwrap();
        assert_eq!(rec.order(), 1);
        assert!(rec.check(&seq));
        let chi = rec.characteristic();
        assert_eq!(&chi[0] + &chi[1] * rat_i(-27), rat_i(0));
    }

    #[test]
    fn display_reads_like_a_recurrence() {
        let rec = Recurrence {
            coeffs: vec![vec![rat_i(-4), rat_i(-2)], vec![rat_i(1), rat_i(2)]],
        };
        assert_eq!(rec.to_string(), "(-4 n - 2) a(n+0) + (1 n + 2) a(n+1) = 0");
    }
}
