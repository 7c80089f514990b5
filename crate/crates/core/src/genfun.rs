//! Multivariate generating function of a colored graph.
//!
//! With one variable per edge (and per free loop), the series
//! `F = sum_gamma <G, gamma>_std z^gamma` is a finite signed combination
//! `F = sum_{X subset C} a_X P_X^(-2)` over subsets of the curve set C:
//! `P_X = 1 + sum_c s_c z^c` with `s_c = -1` exactly for `c in X`, and
//!
//! ```text
//! a_X = 2^(-|C|) sum_{Y subset C} (-1)^(|X inter Y| + i(Y))
//! ```
//!
//! where i(Y) counts crossing pairs inside Y. The coefficients are a
//! Walsh-Hadamard transform of the sign vector (-1)^i(Y); for planar
//! graphs every i vanishes and the only term is a_empty = 1.
//!
//! Free loops participate as extra curves that cross nothing, each
//! carrying its own variable.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::exact::factorial;
use crate::graph::Graph;

const CURVE_LIMIT: usize = 20;
const CONFIG_BUDGET: u64 = 100_000_000;

/// In-place Walsh-Hadamard transform; applying it twice multiplies by
/// the length.
fn fwht(v: &mut [i64]) {
    let n = v.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for chunk in v.chunks_mut(2 * h) {
            for i in 0..h {
                let (a, b) = (chunk[i], chunk[i + h]);
                chunk[i] = a + b;
                chunk[i + h] = a - b;
            }
        }
        h *= 2;
    }
}

pub struct GenFun {
    /// Curves as color-slot bitmasks: cycle-space elements over the edge
    /// bits, then one singleton per free loop.
    pub curves: Vec<u64>,
    /// Walsh-Hadamard spectrum: a_X = ahat[X] / 2^n.
    pub ahat: Vec<i64>,
    ncolors: usize,
    /// Sign (-1)^i(O) per curve subset, recovered from the spectrum and
    /// checked against the direct crossing count.
    signs: Vec<i8>,
}

/// Compute the curve set and its Walsh-Hadamard spectrum.
pub fn genfun(g: &Graph) -> Result<GenFun> {
    let mut curves = g.curves()?;
    let real = curves.len();
    for l in 0..g.nloops() {
        curves.push(1u64 << (g.ne() + l));
    }
    let n = curves.len();
    if n > CURVE_LIMIT {
        return Err(Error::Capacity(format!(
            "{n} curves exceed the generating-function limit {CURVE_LIMIT}"
        )));
    }
    // pairwise crossing parities as adjacency rows
    let mut rows = vec![0u32; n];
    for i in 0..real {
        for j in i + 1..real {
            if g.crossing_parity(curves[i], curves[j]) == 1 {
                rows[i] |= 1 << j;
                rows[j] |= 1 << i;
            }
        }
    }
    // parity of i(Y) for every subset, one new pair row per element
    let size = 1usize << n;
    let mut par = vec![0u8; size];
    for y in 1..size {
        let i = y.trailing_zeros() as usize;
        let rest = y & (y - 1);
        par[y] = par[rest] ^ ((rows[i] as usize & rest).count_ones() as u8 & 1);
    }
    let mut ahat: Vec<i64> = par.iter().map(|&p| if p == 1 { -1 } else { 1 }).collect();
    fwht(&mut ahat);
    // invert the spectrum and require the round trip to reproduce the
    // sign vector exactly
    let mut inv = ahat.clone();
    fwht(&mut inv);
    let scale = size as i64;
    let mut signs = vec![0i8; size];
    for y in 0..size {
        let expect = if par[y] == 1 { -1 } else { 1 };
        assert_eq!(inv[y], expect * scale, "spectrum round trip at {y:#x}");
        signs[y] = expect as i8;
    }
    Ok(GenFun {
        curves,
        ahat,
        ncolors: g.ncolors(),
        signs,
    })
}

impl GenFun {
    /// Nonzero terms (X, a_X), X ascending as a curve-index bitmask.
    pub fn terms(&self) -> Vec<(u64, BigRational)> {
        let n = self.curves.len();
        self.ahat
            .iter()
            .enumerate()
            .filter(|(_, &a)| a != 0)
            .map(|(x, &a)| {
                (
                    x as u64,
                    BigRational::new(BigInt::from(a), BigInt::from(1i64 << n)),
                )
            })
            .collect()
    }

    /// True when the whole series is the single planar term P_empty^(-2).
    pub fn is_planar_form(&self) -> bool {
        let t = self.terms();
        t.len() == 1 && t[0].0 == 0 && t[0].1.is_one()
    }

    /// Series coefficient of z^target, expanded from the P_X^(-2) terms:
    /// a multiset L of curves with color vector equal to `target`
    /// contributes (-1)^|L| (|L|+1) |L|!/prod L_c! times the subset sign
    /// T(odd support of L) read off the spectrum.
    pub fn coefficient(&self, target: &[u32]) -> Result<BigInt> {
        if target.len() != self.ncolors {
            return Err(Error::Parse(format!(
                "coloring has {} entries, expected {}",
                target.len(),
                self.ncolors
            )));
        }
        let mut suffix = vec![0u64; self.curves.len() + 1];
        for i in (0..self.curves.len()).rev() {
            suffix[i] = suffix[i + 1] | self.curves[i];
        }
        let mut st = Expand {
            gf: self,
            suffix,
            visits: 0,
            total: BigInt::ZERO,
        };
        st.go(0, target, 0, &BigInt::one(), 0)?;
        Ok(st.total)
    }

    /// Coefficients along the ray n*dir for n = 0..=nmax.
    pub fn diagonal(&self, dir: &[u32], nmax: u32) -> Result<Vec<BigInt>> {
        (0..=nmax)
            .map(|n| {
                let t: Vec<u32> = dir.iter().map(|&d| n * d).collect();
                self.coefficient(&t)
            })
            .collect()
    }
}

struct Expand<'a> {
    gf: &'a GenFun,
    suffix: Vec<u64>,
    visits: u64,
    total: BigInt,
}

impl Expand<'_> {
    fn go(
        &mut self,
        i: usize,
        rem: &[u32],
        size: u64,
        denom: &BigInt,
        odd_mask: usize,
    ) -> Result<()> {
        self.visits += 1;
        if self.visits > CONFIG_BUDGET {
            return Err(Error::Capacity(
                "series expansion exceeded its budget".into(),
            ));
        }
        let rem_mask: u64 = rem
            .iter()
            .enumerate()
            .filter(|(_, &r)| r > 0)
            .fold(0, |m, (e, _)| m | 1 << e);
        if rem_mask == 0 {
            let term = factorial(size) / denom * (size + 1);
            let neg = (self.gf.signs[odd_mask] < 0) ^ (size % 2 == 1);
            if neg {
                self.total -= term;
            } else {
                self.total += term;
            }
            return Ok(());
        }
        if i == self.gf.curves.len() || rem_mask & !self.suffix[i] != 0 {
            return Ok(());
        }
        let c = self.gf.curves[i];
        let maxk = (0..rem.len())
            .filter(|&e| (c >> e) & 1 == 1)
            .map(|e| rem[e])
            .min()
            .unwrap_or(0);
        self.go(i + 1, rem, size, denom, odd_mask)?;
        if maxk == 0 {
            return Ok(());
        }
        let mut r2 = rem.to_vec();
        let mut dk = denom.clone();
        for k in 1..=maxk {
            for (e, r) in r2.iter_mut().enumerate() {
                if (c >> e) & 1 == 1 {
                    *r -= 1;
                }
            }
            dk *= k as u64;
            let om = odd_mask ^ (((k % 2) as usize) << i);
            self.go(i + 1, &r2, size + k as u64, &dk, om)?;
        }
        Ok(())
    }
}

/// Label a curve mask by its color-slot names, for display.
pub fn curve_label(g: &Graph, mask: u64) -> String {
    let mut parts = Vec::new();
    for e in 0..g.ne() {
        if (mask >> e) & 1 == 1 {
            parts.push(g.edge_names[e].clone());
        }
    }
    for l in 0..g.nloops() {
        if (mask >> (g.ne() + l)) & 1 == 1 {
            parts.push(g.loop_names[l].clone());
        }
    }
    parts.join("+")
}

/// Convenience map from every admissible coloring with colors below a cap
/// to its series coefficient; useful for exhaustive comparisons.
pub fn coefficients_up_to(gf: &GenFun, g: &Graph, cap: u32) -> Result<HashMap<Vec<u32>, BigInt>> {
    let mut out = HashMap::new();
    let mut stack = vec![Vec::<u32>::new()];
    while let Some(cur) = stack.pop() {
        if cur.len() == g.ncolors() {
            let v = gf.coefficient(&cur)?;
            out.insert(cur, v);
            continue;
        }
        for c in 0..=cap {
            let mut nx = cur.clone();
            nx.push(c);
            stack.push(nx);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{eval_std, unknot_std};

    #[test]
    fn planar_graphs_have_delta_spectrum() {
        for g in [
            Graph::theta(),
            Graph::tet(),
            Graph::drum(1).unwrap(),
            Graph::drum(3).unwrap(),
            Graph::circle(),
        ] {
            let gf = genfun(&g).unwrap();
            assert!(gf.is_planar_form(), "{:?}", g.edge_names);
        }
    }

    #[test]
    fn k33_spectrum_is_nontrivial_and_sums_to_one() {
        let gf = genfun(&Graph::k33()).unwrap();
        let t = gf.terms();
        assert!(t.len() > 1);
        let sum: BigRational = t.iter().map(|(_, a)| a.clone()).sum();
        assert!(sum.is_one());
    }

    #[test]
    fn circle_series() {
        let gf = genfun(&Graph::circle()).unwrap();
        for m in 0..8u32 {
            assert_eq!(gf.coefficient(&[m]).unwrap(), unknot_std(m));
        }
    }

    #[test]
    fn theta_coefficients_match_evaluator() {
        let g = Graph::theta();
        let gf = genfun(&g).unwrap();
        for a in 0..=5u32 {
            for b in 0..=5u32 {
                for c in 0..=5u32 {
                    assert_eq!(
                        gf.coefficient(&[a, b, c]).unwrap(),
                        eval_std(&g, &[a, b, c]).unwrap(),
                        "({a},{b},{c})"
                    );
                }
            }
        }
    }

    #[test]
    fn tet_coefficients_match_evaluator() {
        let g = Graph::tet();
        let gf = genfun(&g).unwrap();
        for col in [
            [0u32, 0, 0, 0, 0, 0],
            [2, 2, 2, 2, 2, 2],
            [2, 2, 2, 2, 2, 0],
            [2, 2, 2, 2, 2, 4],
            [1, 1, 2, 2, 2, 1],
            [1, 2, 3, 2, 3, 3],
            [3, 3, 3, 3, 3, 3],
        ] {
            assert_eq!(
                gf.coefficient(&col).unwrap(),
                eval_std(&g, &col).unwrap(),
                "{col:?}"
            );
        }
    }

    #[test]
    fn k33_coefficients_match_evaluator() {
        let g = Graph::k33();
        let gf = genfun(&g).unwrap();
        let all2 = [2u32; 9];
        assert_eq!(gf.coefficient(&all2).unwrap(), BigInt::ZERO);
        assert_eq!(eval_std(&g, &all2).unwrap(), BigInt::ZERO);
        // a hexagon curve with multiplicity 2, diagonals 0
        let hexagon = [2u32, 2, 2, 2, 2, 2, 0, 0, 0];
        assert_eq!(
            gf.coefficient(&hexagon).unwrap(),
            eval_std(&g, &hexagon).unwrap()
        );
        // mixed colorings exercising crossing terms
        for col in [[1u32, 1, 1, 1, 1, 1, 1, 1, 1], [2, 1, 1, 2, 1, 1, 2, 1, 1]] {
            assert_eq!(
                gf.coefficient(&col).unwrap(),
                eval_std(&g, &col).unwrap(),
                "{col:?}"
            );
        }
    }

    #[test]
    fn prism_disconnected_coloring_via_series() {
        let g = Graph::drum(3).unwrap();
        let gf = genfun(&g).unwrap();
        let col = [2u32, 2, 2, 2, 2, 2, 0, 0, 0];
        assert_eq!(gf.coefficient(&col).unwrap(), BigInt::from(9));
    }

    #[test]
    fn diagonal_matches_pointwise() {
        let g = Graph::theta();
        let gf = genfun(&g).unwrap();
        let d = gf.diagonal(&[2, 2, 2], 5).unwrap();
        for (n, v) in d.iter().enumerate() {
            let c = 2 * n as u32;
            assert_eq!(*v, eval_std(&g, &[c, c, c]).unwrap());
        }
    }

    #[test]
    fn labels() {
        let g = Graph::theta();
        let gf = genfun(&g).unwrap();
        let names: Vec<String> = gf.curves.iter().map(|&c| curve_label(&g, c)).collect();
        assert_eq!(names, vec!["a+b", "a+c", "b+c"]);
    }
}
