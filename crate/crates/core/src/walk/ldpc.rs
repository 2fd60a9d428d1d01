//! Rejection sampler for sparse `{0,1}` matrices whose columns are i.i.d.
//! copies of `W(d)` and any `s` of which are independent over GF(2).

use std::collections::HashMap;

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::linalg::{BitVec, IntegerMatrix};
use crate::num::{self, Q, Z};

use super::{admissible_s, return_prob_bound, return_prob_exact, stream_rng, walk_with};

/// Largest number of subsets the exhaustive independence check will visit.
pub const SWISE_BUDGET: u128 = 1 << 31;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LdpcParams {
    pub m: usize,
    pub n: usize,
    pub d: usize,
    pub s: usize,
    pub c: Q,
    pub max_tries: u64,
    pub seed: u64,
}

/// `ceil(4 d n / m)`
pub fn row_bound(m: usize, n: usize, d: usize) -> usize {
    (4 * d * n).div_ceil(m)
}

/// Checks `3 <= d <= m <= n`, `n >= m ln m / d`, `0 < c < 1` and that `s` is
/// admissible for `c`.
pub fn check_hypotheses(p: &LdpcParams) -> Result<()> {
    let bad = |m: String| Err(Error::InvalidParameter(m));
    if !(3 <= p.d && p.d <= p.m && p.m <= p.n) {
        return bad(format!("need 3 <= d <= m <= n, got d={} m={} n={}", p.d, p.m, p.n));
    }
    if !p.c.is_positive() || p.c >= num::rat(1, 1) {
        return bad("c must lie in (0, 1)".into());
    }
    // m ln m is irrational for m >= 2, so a fine enough enclosure decides it
    let lhs = Interval::point(num::rat((p.n * p.d) as i64, 1));
    let mut bits = 64;
    loop {
        let rhs = Interval::point(num::rat(p.m as i64, 1))
            .ln(bits)
            .scale(&num::rat(p.m as i64, 1));
        if rhs.certainly_le(&lhs) {
            break;
        }
        if lhs.certainly_lt(&rhs) {
            return bad(format!("n = {} is below m ln m / d", p.n));
        }
        bits *= 2;
    }
    let s_max = admissible_s(p.m, p.n, p.d, &p.c)?;
    if p.s > s_max {
        return bad(format!("s = {} exceeds the admissible {s_max} for this c", p.s));
    }
    Ok(())
}

/// Some nonempty set of at most `s` columns summing to zero mod 2, if any.
///
/// Exhaustive over all subsets of size `< s`; the last element is found by
/// hashing, so the cost is about `C(n, s-1)` lookups.
pub fn dependent_subset(cols: &[BitVec], s: usize) -> Result<Option<Vec<usize>>> {
    let n = cols.len();
    if s == 0 || n == 0 {
        return Ok(None);
    }
    let visits: u128 = (0..s.min(n) as u64)
        .map(|r| num::binomial(n as u64, r).try_into().unwrap_or(u128::MAX))
        .fold(0u128, |a, b: u128| a.saturating_add(b));
    if visits > SWISE_BUDGET {
        return Err(Error::Unverifiable(format!(
            "exhaustive {s}-wise check over {n} columns needs {visits} subset visits"
        )));
    }
    let mut index: HashMap<&BitVec, Vec<usize>> = HashMap::new();
    for (j, c) in cols.iter().enumerate() {
        index.entry(c).or_default().push(j);
    }
    let len = cols[0].len();
    let mut chosen = Vec::with_capacity(s);
    Ok(search(cols, &index, s, 0, &BitVec::zeros(len), &mut chosen).then_some(chosen))
}

fn search(
    cols: &[BitVec],
    index: &HashMap<&BitVec, Vec<usize>>,
    left: usize,
    start: usize,
    acc: &BitVec,
    chosen: &mut Vec<usize>,
) -> bool {
    // closing element: a later column equal to the running sum
    if let Some(js) = index.get(acc) {
        if let Some(&j) = js.iter().find(|&&j| j >= start) {
            chosen.push(j);
            return true;
        }
    }
    if left <= 1 {
        return false;
    }
    for j in start..cols.len() {
        let mut next = acc.clone();
        next.xor_assign(&cols[j]);
        chosen.push(j);
        if search(cols, index, left - 1, j + 1, &next, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Whether every `s` columns of `a` are independent over GF(2).
pub fn s_wise_independent(a: &IntegerMatrix, s: usize) -> Result<bool> {
    Ok(dependent_subset(&columns(a), s)?.is_none())
}

fn columns(a: &IntegerMatrix) -> Vec<BitVec> {
    (0..a.cols()).map(|j| BitVec::from_parity(&a.col(j))).collect()
}

/// One draw of the random matrix and the outcome of each acceptance test.
#[derive(Clone, Debug)]
pub struct Attempt {
    pub matrix: IntegerMatrix,
    pub max_row_weight: usize,
    pub row_ok: bool,
    pub zero_column: bool,
    /// `None` when an earlier test already rejected the draw.
    pub independent: Option<bool>,
}

impl Attempt {
    pub fn accepted(&self) -> bool {
        self.row_ok && self.independent == Some(true)
    }
}

/// Draw number `try_index`: column `j` uses substream `(try_index << 32) | j`.
pub fn sample_attempt(p: &LdpcParams, try_index: u64) -> Result<Attempt> {
    let cols: Vec<BitVec> = (0..p.n)
        .into_par_iter()
        .map(|j| walk_with(p.m, p.d as u64, &mut stream_rng(p.seed, (try_index << 32) | j as u64)))
        .collect();
    let mut row_w = vec![0usize; p.m];
    let mut matrix = IntegerMatrix::zeros(p.m, p.n);
    for (j, c) in cols.iter().enumerate() {
        for i in c.ones() {
            row_w[i] += 1;
            matrix.set(i, j, Z::from(1));
        }
    }
    let max_row_weight = row_w.into_iter().max().unwrap_or(0);
    let row_ok = max_row_weight <= row_bound(p.m, p.n, p.d);
    let zero_column = p.s >= 1 && cols.iter().any(BitVec::is_zero);
    let independent = if row_ok && !zero_column {
        Some(dependent_subset(&cols, p.s)?.is_none())
    } else {
        None
    };
    Ok(Attempt {
        matrix,
        max_row_weight,
        row_ok,
        zero_column,
        independent,
    })
}

/// `E[D] = sum_{r=1}^{s} C(n, r) Pr[W(d r) = 0]`, exact when the walk
/// lengths are small, otherwise the upper bound from `2 (t/m)^{t/2}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CollisionBound {
    Exact(Q),
    Upper(Q),
}

impl CollisionBound {
    pub fn value(&self) -> &Q {
        match self {
            CollisionBound::Exact(q) | CollisionBound::Upper(q) => q,
        }
    }
}

const EXACT_WALK_CAP: usize = 400;

pub fn expected_collision_bound(p: &LdpcParams) -> CollisionBound {
    let exact = p.d * p.s <= EXACT_WALK_CAP;
    let mut acc = Q::zero();
    for r in 1..=p.s {
        let t = (p.d * r) as u64;
        let pr = if exact {
            return_prob_exact(p.m, t)
        } else {
            return_prob_bound(p.m, t)
        };
        if !pr.is_zero() {
            acc += Q::from_integer(num::binomial(p.n as u64, r as u64)) * pr;
        }
    }
    if exact {
        CollisionBound::Exact(acc)
    } else {
        CollisionBound::Upper(acc)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LdpcStats {
    pub seed: u64,
    pub tries: u64,
    pub accepted: bool,
    pub row_bound: usize,
    pub s: usize,
    pub c: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e_d_exact: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub e_d_upper: Option<String>,
    pub row_sparsity_pass_rate: f64,
}

#[derive(Clone, Debug)]
pub struct LdpcSample {
    pub matrix: IntegerMatrix,
    pub stats: LdpcStats,
}

/// Redraw until a matrix passes the row-weight, zero-column and `s`-wise
/// independence tests, or `max_tries` draws are used up.
pub fn sample_ldpc(p: &LdpcParams) -> Result<LdpcSample> {
    check_hypotheses(p)?;
    let (e_d_exact, e_d_upper) = match expected_collision_bound(p) {
        CollisionBound::Exact(q) => (Some(num::fmt_rational(&q)), None),
        CollisionBound::Upper(q) => (None, Some(num::fmt_rational(&q))),
    };
    let mut row_pass = 0u64;
    for k in 0..p.max_tries {
        let a = sample_attempt(p, k)?;
        row_pass += u64::from(a.row_ok);
        if a.accepted() {
            let tries = k + 1;
            return Ok(LdpcSample {
                matrix: a.matrix,
                stats: LdpcStats {
                    seed: p.seed,
                    tries,
                    accepted: true,
                    row_bound: row_bound(p.m, p.n, p.d),
                    s: p.s,
                    c: num::fmt_rational(&p.c),
                    e_d_exact,
                    e_d_upper,
                    row_sparsity_pass_rate: row_pass as f64 / tries as f64,
                },
            });
        }
    }
    Err(Error::SamplerExhausted { tries: p.max_tries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;

    fn bits(rows: &[&str]) -> Vec<BitVec> {
        rows.iter()
            .map(|r| {
                let mut v = BitVec::zeros(r.len());
                for (i, ch) in r.chars().enumerate() {
                    if ch == '1' {
                        v.set(i);
                    }
                }
                v
            })
            .collect()
    }

    #[test]
    fn finds_small_dependencies() {
        let cols = bits(&["1100", "0110", "1010", "0001"]);
        assert_eq!(dependent_subset(&cols, 2).unwrap(), None);
        let mut d = dependent_subset(&cols, 3).unwrap().unwrap();
        d.sort();
        assert_eq!(d, vec![0, 1, 2]);
        let dup = bits(&["1100", "0011", "1100"]);
        assert_eq!(dependent_subset(&dup, 2).unwrap(), Some(vec![0, 2]));
        assert_eq!(dependent_subset(&bits(&["000"]), 1).unwrap(), Some(vec![0]));
    }

    #[test]
    fn zero_s_is_empty_sum() {
        let p = LdpcParams {
            m: 32,
            n: 256,
            d: 4,
            s: 0,
            c: rat(1, 4000),
            max_tries: 5,
            seed: 1,
        };
        assert_eq!(expected_collision_bound(&p), CollisionBound::Exact(Q::zero()));
        assert_eq!(row_bound(32, 256, 4), 128);
        let out = sample_ldpc(&p).unwrap();
        assert_eq!(out.stats.tries, 1);
    }

    #[test]
    fn hypothesis_violations() {
        let mut p = LdpcParams {
            m: 32,
            n: 256,
            d: 4,
            s: 0,
            c: rat(1, 4000),
            max_tries: 5,
            seed: 1,
        };
        assert!(check_hypotheses(&p).is_ok());
        p.n = 20;
        assert!(check_hypotheses(&p).is_err());
        p.n = 256;
        p.s = 1;
        assert!(check_hypotheses(&p).is_err());
        p.s = 0;
        p.c = rat(1, 1);
        assert!(check_hypotheses(&p).is_err());
    }
}
