//! Vertex enumeration by incremental double description.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{self, dot, BitVec, Matrix};
use crate::num::{self, Q};

/// Vertices of `{u : alpha_i . u <= beta_i}` together with the set of
/// constraints tight at each vertex (indices into `alphas`).
#[derive(Clone, Debug)]
pub struct VertexSet {
    pub points: Vec<Vec<Q>>,
    pub tight: Vec<BitVec>,
}

const MAX_DOUBLINGS: u32 = 64;

/// Enumerate vertices of a bounded polytope of full dimension `r`.
pub fn vertices(alphas: &[Vec<Q>], betas: &[Q]) -> Result<VertexSet> {
    let r = alphas.first().map_or(0, Vec::len);
    if r == 0 || alphas.iter().any(|a| a.len() != r) {
        return Err(Error::Dimension("constraints must share a positive dimension".into()));
    }
    // Initial box half-width: a power of two above every offset scale.
    let mut bits = betas
        .iter()
        .map(|b| b.numer().bits() as i64 - b.denom().bits() as i64 + 2)
        .max()
        .unwrap_or(1)
        .max(1);
    for _ in 0..MAX_DOUBLINGS {
        let m = num::pow2(bits);
        let vs = with_box(alphas, betas, &m, r);
        let on_box = vs.tight.iter().any(|t| (0..2 * r).any(|i| t.get(i)));
        if vs.points.is_empty() {
            return Err(Error::Degenerate);
        }
        if !on_box {
            return finish(vs, alphas.len(), r);
        }
        bits += 4;
    }
    Err(Error::Degenerate)
}

fn finish(vs: VertexSet, k: usize, r: usize) -> Result<VertexSet> {
    // drop box bits, keep constraint indices only
    let tight = vs
        .tight
        .iter()
        .map(|t| {
            let mut b = BitVec::zeros(k);
            for i in t.ones().filter(|&i| i >= 2 * r) {
                b.set(i - 2 * r);
            }
            b
        })
        .collect();
    let out = VertexSet {
        points: vs.points,
        tight,
    };
    if affine_rank(&out.points) != r {
        return Err(Error::Degenerate);
    }
    Ok(out)
}

pub fn affine_rank(points: &[Vec<Q>]) -> usize {
    if points.len() < 2 {
        return 0;
    }
    let diffs: Vec<Vec<Q>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(&points[0]).map(|(a, b)| a - b).collect())
        .collect();
    linalg::rank_rational(&Matrix::from_rows(diffs).expect("equal lengths"))
}

fn with_box(alphas: &[Vec<Q>], betas: &[Q], m: &Q, r: usize) -> VertexSet {
    let total = 2 * r + alphas.len();
    let mut points = Vec::with_capacity(1 << r);
    let mut tight = Vec::with_capacity(1 << r);
    for mask in 0..(1usize << r) {
        let mut p = Vec::with_capacity(r);
        let mut t = BitVec::zeros(total);
        for i in 0..r {
            if mask >> i & 1 == 1 {
                p.push(m.clone());
                t.set(2 * i);
            } else {
                p.push(-m.clone());
                t.set(2 * i + 1);
            }
        }
        points.push(p);
        tight.push(t);
    }
    let mut vs = VertexSet { points, tight };
    for (k, (a, b)) in alphas.iter().zip(betas).enumerate() {
        add_constraint(&mut vs, a, b, 2 * r + k, r);
        if vs.points.is_empty() {
            break;
        }
    }
    vs
}

fn add_constraint(vs: &mut VertexSet, a: &[Q], b: &Q, idx: usize, r: usize) {
    let slack: Vec<Q> = vs.points.iter().map(|p| dot(a, p) - b).collect();
    let plus: Vec<usize> = (0..slack.len()).filter(|&i| slack[i].is_positive()).collect();
    if plus.is_empty() {
        for (i, s) in slack.iter().enumerate() {
            if s.is_zero() {
                vs.tight[i].set(idx);
            }
        }
        return;
    }
    let minus: Vec<usize> = (0..slack.len()).filter(|&i| slack[i].is_negative()).collect();
    let mut new_points = Vec::new();
    let mut new_tight = Vec::new();
    for &p in &plus {
        for &q in &minus {
            let common = vs.tight[p].and(&vs.tight[q]);
            if common.weight() + 1 < r {
                continue;
            }
            let blocked = (0..vs.points.len()).any(|w| w != p && w != q && common.is_subset_of(&vs.tight[w]));
            if blocked {
                continue;
            }
            // point on segment p -> q where the slack vanishes
            let t = &slack[p] / (&slack[p] - &slack[q]);
            let pt: Vec<Q> = vs.points[p]
                .iter()
                .zip(&vs.points[q])
                .map(|(x, y)| x + &t * (y - x))
                .collect();
            let mut tt = common;
            tt.set(idx);
            new_points.push(pt);
            new_tight.push(tt);
        }
    }
    let mut points = Vec::new();
    let mut tight = Vec::new();
    for (i, s) in slack.iter().enumerate() {
        if s.is_positive() {
            continue;
        }
        let mut t = vs.tight[i].clone();
        if s.is_zero() {
            t.set(idx);
        }
        points.push(vs.points[i].clone());
        tight.push(t);
    }
    points.extend(new_points);
    tight.extend(new_tight);
    vs.points = points;
    vs.tight = tight;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;

    fn cube(r: usize) -> (Vec<Vec<Q>>, Vec<Q>) {
        let mut a = Vec::new();
        let mut b = Vec::new();
        for i in 0..r {
            for s in [1, -1] {
                let mut v = vec![rat(0, 1); r];
                v[i] = rat(s, 1);
                a.push(v);
                b.push(rat(1, 2));
            }
        }
        (a, b)
    }

    #[test]
    fn cube_vertices() {
        for r in 1..=5 {
            let (a, b) = cube(r);
            let vs = vertices(&a, &b).unwrap();
            assert_eq!(vs.points.len(), 1 << r);
            assert!(vs.tight.iter().all(|t| t.weight() == r));
        }
    }

    #[test]
    fn redundant_and_degenerate_constraints() {
        let (mut a, mut b) = cube(3);
        // a plane touching a single vertex, and a duplicate facet
        a.push(vec![rat(1, 1), rat(1, 1), rat(1, 1)]);
        b.push(rat(3, 2));
        a.push(vec![rat(2, 1), rat(0, 1), rat(0, 1)]);
        b.push(rat(1, 1));
        let vs = vertices(&a, &b).unwrap();
        assert_eq!(vs.points.len(), 8);
        // cutting off a corner
        a.push(vec![rat(1, 1), rat(1, 1), rat(1, 1)]);
        b.push(rat(1, 1));
        let vs = vertices(&a, &b).unwrap();
        assert_eq!(vs.points.len(), 10);
    }

    #[test]
    fn unbounded_and_flat_are_rejected() {
        let a = vec![vec![rat(1, 1), rat(0, 1)], vec![rat(-1, 1), rat(0, 1)]];
        let b = vec![rat(1, 1), rat(1, 1)];
        assert!(matches!(vertices(&a, &b), Err(Error::Degenerate)));
        let (mut a, mut b) = cube(2);
        a.push(vec![rat(1, 1), rat(0, 1)]);
        b.push(rat(-1, 2));
        assert!(matches!(vertices(&a, &b), Err(Error::Degenerate)));
    }
}
