use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::lattice::{enumerate, Lattice, DEFAULT_BUDGET};
use crate::linalg::gram_schmidt;
use crate::num::{Q, Z};

use super::{HPolytope, Halfspace};

pub fn voronoi_cell(l: &Lattice) -> Result<HPolytope> {
    voronoi_cell_with_budget(l, DEFAULT_BUDGET)
}

/// Voronoi cell of `l` inside its span, as irredundant halfspaces
/// `<y, x> <= |y|^2 / 2`.
///
/// Candidates are lattice vectors with `|y|^2 <= sum |b_i*|^2`, which is
/// four times a bound on the covering radius, so every facet vector is
/// among them. Within each class of `L / 2L` only a vector that is, up to
/// sign, the unique shortest one can define a facet; the remaining
/// candidates are pruned by vertex enumeration.
pub fn voronoi_cell_with_budget(l: &Lattice, budget: u64) -> Result<HPolytope> {
    let r = l.rank();
    if r == 0 {
        return Err(Error::InvalidParameter("Voronoi cell of a rank-0 lattice".into()));
    }
    let red = l.reduced();
    let basis = red.basis();
    let g = red.gram();
    let (_, norms) = gram_schmidt(&basis.to_cols());
    let bound: Q = norms.iter().fold(Q::zero(), |a, b| a + b);

    let mut classes: BTreeMap<Vec<bool>, (Q, Vec<Vec<Z>>)> = BTreeMap::new();
    enumerate::enumerate(&g, &bound, budget, |x, q| {
        let key: Vec<bool> = x.iter().map(|v| v.is_odd()).collect();
        let e = classes.entry(key).or_insert_with(|| (q.clone(), Vec::new()));
        if q < &e.0 {
            *e = (q.clone(), vec![x.to_vec()]);
        } else if q == &e.0 {
            e.1.push(x.to_vec());
        }
        None
    })?;

    let mut cands: Vec<(Q, Vec<Z>)> = classes
        .into_values()
        .filter(|(_, xs)| xs.len() == 1)
        .flat_map(|(q, xs)| {
            let x = xs.into_iter().next().expect("one vector");
            let neg: Vec<Z> = x.iter().map(|v| -v).collect();
            [(q.clone(), x), (q, neg)]
        })
        .collect();
    cands.sort();

    let n = l.ambient_dim();
    let hs: Vec<Halfspace> = cands
        .iter()
        .map(|(q, x)| {
            let xq: Vec<Q> = x.iter().map(|v| Q::from_integer(v.clone())).collect();
            let y = basis.mul_vec(&xq).expect("coefficient length");
            Halfspace::new(y, q / Q::from_integer(2.into()))
        })
        .collect();
    let sub = if r == n { None } else { Some(red.span()) };
    HPolytope::new(n, sub, hs)?.pruned()
}
