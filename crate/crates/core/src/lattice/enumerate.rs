//! Fincke-Pohst enumeration of short lattice vectors from a Gram matrix.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::RationalMatrix;
use crate::num::{self, Q, Z};

/// Default cap on visited enumeration nodes.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// `q(x) = sum_i d[i] * (x_i + sum_{j>i} l[j][i] x_j)^2`
struct Ldl {
    d: Vec<Q>,
    /// `l[j][i]` for `j > i`
    l: Vec<Vec<Q>>,
}

fn ldl(g: &RationalMatrix) -> Result<Ldl> {
    let r = g.rows();
    let mut a: Vec<Vec<Q>> = g.to_rows();
    let mut d = vec![Q::zero(); r];
    let mut l = vec![vec![Q::zero(); r]; r];
    for i in 0..r {
        let piv = a[i][i].clone();
        if !piv.is_positive() {
            return Err(Error::InvalidParameter("Gram matrix is not positive definite".into()));
        }
        for j in i + 1..r {
            l[j][i] = &a[i][j] / &piv;
        }
        for j in i + 1..r {
            for k in i + 1..r {
                let v = &l[j][i] * &a[i][k];
                a[j][k] -= v;
            }
        }
        d[i] = piv;
    }
    Ok(Ldl { d, l })
}

struct State<'a, F> {
    ldl: &'a Ldl,
    bound: Q,
    budget: u64,
    nodes: u64,
    x: Vec<Z>,
    visit: F,
}

impl<F: FnMut(&[Z], &Q) -> Option<Q>> State<'_, F> {
    /// Enumerate coordinate `i` with `used` = partial norm of coordinates > i.
    fn recurse(&mut self, i: usize, used: Q, all_zero: bool) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::EnumerationBudget { budget: self.budget });
        }
        let r = self.x.len();
        let c: Q = (i + 1..r).fold(Q::zero(), |acc, j| {
            acc + &self.ldl.l[j][i] * Q::from_integer(self.x[j].clone())
        });
        let rest = &self.bound - &used;
        if rest.is_negative() {
            return Ok(());
        }
        let t = &rest / &self.ldl.d[i];
        let (_, s) = num::sqrt_bounds(&t, 32);
        let lo = num::ceil(&(-&c - &s));
        let hi = num::floor(&(-&c + &s));
        let lo = if all_zero && lo.is_negative() { Z::zero() } else { lo };
        let mut xi = lo;
        while xi <= hi {
            let y = Q::from_integer(xi.clone()) + &c;
            let contrib = &self.ldl.d[i] * &y * &y;
            let total = &used + &contrib;
            if total <= self.bound {
                self.x[i] = xi.clone();
                let zero_here = all_zero && xi.is_zero();
                if i == 0 {
                    if !zero_here {
                        if let Some(nb) = (self.visit)(&self.x, &total) {
                            self.bound = nb;
                        }
                    }
                } else {
                    self.recurse(i - 1, total, zero_here)?;
                }
            }
            xi += 1;
        }
        self.x[i] = Z::zero();
        Ok(())
    }
}

/// Visit every nonzero coefficient vector `x` (one of each pair `±x`) with
/// `x^T G x <= bound`. The callback may return a tightened bound.
/// Returns the number of nodes visited.
pub fn enumerate<F>(g: &RationalMatrix, bound: &Q, budget: u64, visit: F) -> Result<u64>
where
    F: FnMut(&[Z], &Q) -> Option<Q>,
{
    let r = g.rows();
    if r == 0 {
        return Ok(0);
    }
    let ldl = ldl(g)?;
    let mut st = State {
        ldl: &ldl,
        bound: bound.clone(),
        budget,
        nodes: 0,
        x: vec![Z::zero(); r],
        visit,
    };
    st.recurse(r - 1, Q::zero(), true)?;
    Ok(st.nodes)
}

/// All nonzero coefficient vectors with `x^T G x <= bound`, both signs.
pub fn short_vectors(g: &RationalMatrix, bound: &Q, budget: u64) -> Result<Vec<(Vec<Z>, Q)>> {
    let mut out = Vec::new();
    enumerate(g, bound, budget, |x, q| {
        out.push((x.to_vec(), q.clone()));
        out.push((x.iter().map(|v| -v).collect(), q.clone()));
        None
    })?;
    Ok(out)
}

/// Minimum of `x^T G x` over nonzero integer `x` with value `<= bound`.
pub fn minimum(g: &RationalMatrix, bound: &Q, budget: u64) -> Result<Option<Q>> {
    let mut best: Option<Q> = None;
    enumerate(g, bound, budget, |_, q| {
        if best.as_ref().is_none_or(|b| q < b) {
            best = Some(q.clone());
        }
        best.clone()
    })?;
    Ok(best)
}

pub fn quad_form(g: &RationalMatrix, x: &[Z]) -> Q {
    let r = g.rows();
    let mut acc = Q::zero();
    for i in 0..r {
        if x[i].is_zero() {
            continue;
        }
        for j in 0..r {
            if x[j].is_zero() {
                continue;
            }
            acc += g.get(i, j) * Q::from_integer(&x[i] * &x[j]);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::IntegerMatrix;
    use crate::num::rat;

    fn brute(g: &RationalMatrix, bound: &Q, box_: i64) -> usize {
        let r = g.rows();
        let mut count = 0;
        let mut x = vec![-box_; r];
        loop {
            let xz: Vec<Z> = x.iter().map(|&v| num::int(v)).collect();
            if xz.iter().any(|v| !v.is_zero()) && &quad_form(g, &xz) <= bound {
                count += 1;
            }
            let mut k = 0;
            loop {
                if k == r {
                    return count;
                }
                x[k] += 1;
                if x[k] > box_ {
                    x[k] = -box_;
                    k += 1;
                } else {
                    break;
                }
            }
        }
    }

    #[test]
    fn counts_match_brute_force() {
        let g = IntegerMatrix::from_i64(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 2]]).to_rational();
        for b in [1, 2, 3, 5, 8] {
            let bound = rat(b, 1);
            let got = short_vectors(&g, &bound, DEFAULT_BUDGET).unwrap().len();
            assert_eq!(got, brute(&g, &bound, 4), "bound {b}");
        }
    }

    #[test]
    fn minimum_of_standard_lattices() {
        let id = RationalMatrix::identity(4);
        assert_eq!(minimum(&id, &rat(10, 1), DEFAULT_BUDGET).unwrap(), Some(rat(1, 1)));
        assert_eq!(minimum(&id, &rat(1, 2), DEFAULT_BUDGET).unwrap(), None);
        let g = IntegerMatrix::from_i64(&[&[9, 0], &[0, 9]]).to_rational();
        assert_eq!(minimum(&g, &rat(100, 1), DEFAULT_BUDGET).unwrap(), Some(rat(9, 1)));
    }

    #[test]
    fn budget_is_enforced() {
        let id = RationalMatrix::identity(6);
        assert!(matches!(
            short_vectors(&id, &rat(20, 1), 50),
            Err(Error::EnumerationBudget { budget: 50 })
        ));
    }
}
