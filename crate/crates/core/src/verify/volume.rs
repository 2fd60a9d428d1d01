//! Box-counting volume enclosure, independent of the triangulation engine.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::linalg::dot;
use crate::num::{self, Q};
use crate::polytope::HPolytope;

pub const BRUTE_FORCE_MAX_DIM: usize = 4;

/// Encloses `vol(K)` between the cells of a `grid^n` subdivision of the
/// bounding box that lie inside `K` and those that meet it.
///
/// A cell is inside when every halfspace holds at its worst corner and
/// outside when some halfspace fails at its best corner; both are decided
/// exactly, so the enclosure is rigorous.
pub fn brute_force_volume(k: &HPolytope, grid: usize) -> Result<Interval> {
    let n = k.ambient_dim();
    if n > BRUTE_FORCE_MAX_DIM {
        return Err(Error::DimensionCap {
            dim: n,
            cap: BRUTE_FORCE_MAX_DIM,
        });
    }
    if k.dim() != n || grid == 0 {
        return Err(Error::InvalidParameter(
            "need a full-dimensional body and a positive grid".into(),
        ));
    }
    let verts = k.geometry()?.ambient_vertices();
    let lo: Vec<Q> = (0..n)
        .map(|j| verts.iter().map(|v| v[j].clone()).min().unwrap())
        .collect();
    let hi: Vec<Q> = (0..n)
        .map(|j| verts.iter().map(|v| v[j].clone()).max().unwrap())
        .collect();
    let g = num::rat(grid as i64, 1);
    let h: Vec<Q> = lo.iter().zip(&hi).map(|(a, b)| (b - a) / &g).collect();

    // per halfspace: value at the box corner and the step along each axis
    let planes: Vec<(Q, Vec<Q>, Q)> = k
        .halfspaces()
        .iter()
        .map(|hs| {
            let steps = hs.a.iter().zip(&h).map(|(a, s)| a * s).collect();
            (dot(&hs.a, &lo), steps, hs.b.clone())
        })
        .collect();

    let cells = grid.pow(n as u32);
    let (inside, meets) = (0..cells)
        .into_par_iter()
        .map(|c| {
            let mut idx = vec![0usize; n];
            let mut r = c;
            for x in idx.iter_mut() {
                *x = r % grid;
                r /= grid;
            }
            let mut all_in = true;
            for (base, steps, b) in &planes {
                let mut min = base.clone();
                let mut max = base.clone();
                for (s, &i) in steps.iter().zip(&idx) {
                    let at = s * num::rat(i as i64, 1);
                    let next = &at + s;
                    if s >= &Q::default() {
                        min += at;
                        max += next;
                    } else {
                        min += next;
                        max += at;
                    }
                }
                if &min > b {
                    return (0u64, 0u64);
                }
                if &max > b {
                    all_in = false;
                }
            }
            (u64::from(all_in), 1)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let cell: Q = h.iter().product();
    Ok(Interval::new(
        &cell * num::rat(inside as i64, 1),
        &cell * num::rat(meets as i64, 1),
    ))
}
