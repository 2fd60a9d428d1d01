//! Sampled tiling check with exact containment tests.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construction::Parallelotope;
use crate::error::{Error, Result};
use crate::linalg;
use crate::num::{self, Q, Z};
use crate::walk::stream_rng;

/// Fractional bits of each sampled lattice coordinate.
const SAMPLE_BITS: u32 = 40;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TilingReport {
    pub samples: u64,
    /// Inside exactly one closed translate, and in its interior.
    pub covered_exactly_once: u64,
    /// On the boundary of two or more translates and interior to none.
    pub boundary_hits: u64,
    /// Points in no closed translate.
    pub uncovered: u64,
    /// Largest number of open translates containing one sample.
    pub max_multiplicity: u64,
    /// `vol(K) = covol(L)`, decided exactly.
    pub volume_check: bool,
    pub seed: u64,
    pub pass: bool,
}

/// One halfspace `a . C(u - k) <= beta` rewritten over lattice coordinates
/// as `g . (U - 2^w k) <= 2^w b` with integer `g`, `b` and `u = U / 2^w`.
struct LatticeHalfspace {
    g: Vec<Z>,
    b: Z,
    small: Option<(Vec<i128>, i128)>,
}

impl LatticeHalfspace {
    fn new(a: &[Q], beta: &Q, basis: &linalg::RationalMatrix) -> Self {
        let g: Vec<Q> = basis.transpose().mul_vec(a).expect("basis shape");
        let den = g.iter().chain([beta]).fold(Z::one(), |acc, q| acc.lcm(q.denom()));
        let scale = Q::from_integer(den);
        let g: Vec<Z> = g.iter().map(|q| (q * &scale).to_integer()).collect();
        let b = (beta * &scale).to_integer();
        let fits = |z: &Z| z.bits() < 62;
        let small = (g.iter().all(fits) && fits(&b))
            .then(|| (g.iter().map(|z| z.to_i128().unwrap()).collect(), b.to_i128().unwrap()));
        LatticeHalfspace { g, b, small }
    }

    /// Sign of `lhs - rhs`.
    fn slack_sign(&self, u: &[u64], k: &[i64]) -> std::cmp::Ordering {
        if let Some((g, b)) = &self.small {
            if let Some(v) = eval_small(g, *b, u, k) {
                return v.cmp(&0);
            }
        }
        let w = BigInt::one() << SAMPLE_BITS;
        let mut lhs = Z::zero();
        for ((gi, &ui), &ki) in self.g.iter().zip(u).zip(k) {
            lhs += gi * (Z::from(ui) - &w * ki);
        }
        lhs.cmp(&(&self.b * &w))
    }
}

fn eval_small(g: &[i128], b: i128, u: &[u64], k: &[i64]) -> Option<i128> {
    let w = 1i128 << SAMPLE_BITS;
    let mut acc = 0i128;
    for ((&gi, &ui), &ki) in g.iter().zip(u).zip(k) {
        let x = (ui as i128).checked_sub(w.checked_mul(ki as i128)?)?;
        acc = acc.checked_add(gi.checked_mul(x)?)?;
    }
    acc.checked_sub(b.checked_mul(w)?)
}

struct Prepared {
    halfspaces: Vec<LatticeHalfspace>,
    /// Bounding box of `C^{-1} K`.
    lo: Vec<Q>,
    hi: Vec<Q>,
}

fn prepare(p: &Parallelotope) -> Result<Prepared> {
    let n = p.lattice.ambient_dim();
    if !p.lattice.is_full_rank() || p.body.ambient_dim() != n || p.body.dim() != n {
        return Err(Error::Dimension(
            "tiling check needs a full-dimensional body and full-rank lattice".into(),
        ));
    }
    let basis = p.lattice.basis();
    let inv = linalg::inverse(basis)?;
    let verts = p.body.geometry()?.ambient_vertices();
    let coords: Vec<Vec<Q>> = verts.iter().map(|v| inv.mul_vec(v).expect("shape")).collect();
    let lo = (0..n)
        .map(|j| coords.iter().map(|c| c[j].clone()).min().unwrap())
        .collect();
    let hi = (0..n)
        .map(|j| coords.iter().map(|c| c[j].clone()).max().unwrap())
        .collect();
    let halfspaces = p
        .body
        .halfspaces()
        .iter()
        .map(|h| LatticeHalfspace::new(&h.a, &h.b, basis))
        .collect();
    Ok(Prepared { halfspaces, lo, hi })
}

#[derive(Clone, Copy, Default)]
struct Tally {
    once: u64,
    boundary: u64,
    uncovered: u64,
    max_open: u64,
}

impl Tally {
    fn merge(self, o: Tally) -> Tally {
        Tally {
            once: self.once + o.once,
            boundary: self.boundary + o.boundary,
            uncovered: self.uncovered + o.uncovered,
            max_open: self.max_open.max(o.max_open),
        }
    }
}

fn classify(prep: &Prepared, u: &[u64]) -> Tally {
    let n = u.len();
    let w = num::pow2(-(SAMPLE_BITS as i64));
    // z - Ck in K  =>  k in [u - hi, u - lo] coordinatewise
    let ranges: Vec<(i64, i64)> = (0..n)
        .map(|j| {
            let uj = Q::from_integer(Z::from(u[j])) * &w;
            let a = num::ceil(&(&uj - &prep.hi[j])).to_i64().expect("small range");
            let b = num::floor(&(&uj - &prep.lo[j])).to_i64().expect("small range");
            (a, b)
        })
        .collect();
    let (mut closed, mut open) = (0u64, 0u64);
    let mut k: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    if ranges.iter().all(|r| r.0 <= r.1) {
        loop {
            let mut inside = true;
            let mut strict = true;
            for h in &prep.halfspaces {
                match h.slack_sign(u, &k) {
                    std::cmp::Ordering::Greater => {
                        inside = false;
                        break;
                    }
                    std::cmp::Ordering::Equal => strict = false,
                    std::cmp::Ordering::Less => {}
                }
            }
            if inside {
                closed += 1;
                open += u64::from(strict);
            }
            // odometer over the candidate box
            let mut j = 0;
            while j < n {
                if k[j] < ranges[j].1 {
                    k[j] += 1;
                    break;
                }
                k[j] = ranges[j].0;
                j += 1;
            }
            if j == n {
                break;
            }
        }
    }
    Tally {
        once: u64::from(open == 1 && closed == 1),
        boundary: u64::from(open == 0 && closed >= 2),
        uncovered: u64::from(closed == 0),
        max_open: open,
    }
}

/// Draws `samples` dyadic points uniformly from the fundamental
/// parallelepiped of the lattice and counts the translates of the body
/// containing each one.
///
/// Passes iff every sample is interior to exactly one translate or lies on
/// the boundary of several and in the interior of none, and the body's
/// volume equals the covolume.
pub fn verify_tiling(p: &Parallelotope, samples: u64, seed: u64) -> Result<TilingReport> {
    let prep = prepare(p)?;
    let n = p.lattice.ambient_dim();
    let t = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, i);
            let u: Vec<u64> = (0..n).map(|_| rng.gen_range(0..1u64 << SAMPLE_BITS)).collect();
            classify(&prep, &u)
        })
        .reduce(Tally::default, Tally::merge);
    let volume_check = p.measures.volume == p.lattice.covolume().as_surd();
    Ok(TilingReport {
        samples,
        covered_exactly_once: t.once,
        boundary_hits: t.boundary,
        uncovered: t.uncovered,
        max_multiplicity: t.max_open,
        volume_check,
        seed,
        pass: volume_check && t.once + t.boundary == samples,
    })
}

/// Exact version of the sampled check at a single point.
pub fn translates_containing(p: &Parallelotope, z: &[Q]) -> Result<(usize, usize)> {
    let prep = prepare(p)?;
    let inv = linalg::inverse(p.lattice.basis())?;
    let u = inv.mul_vec(z)?;
    let n = u.len();
    let mut closed = 0;
    let mut open = 0;
    let ranges: Vec<(Z, Z)> = (0..n)
        .map(|j| (num::ceil(&(&u[j] - &prep.hi[j])), num::floor(&(&u[j] - &prep.lo[j]))))
        .collect();
    if ranges.iter().any(|(a, b)| a > b) {
        return Ok((0, 0));
    }
    let mut k: Vec<Z> = ranges.iter().map(|r| r.0.clone()).collect();
    loop {
        let kq: Vec<Q> = k.iter().map(|v| Q::from_integer(v.clone())).collect();
        let x: Vec<Q> = p.lattice.basis().mul_vec(&kq)?;
        let y: Vec<Q> = z.iter().zip(&x).map(|(a, b)| a - b).collect();
        if p.body.contains(&y) {
            closed += 1;
            if p.body.contains_interior(&y) {
                open += 1;
            }
        }
        let mut j = 0;
        while j < n {
            if k[j] < ranges[j].1 {
                k[j] += 1;
                break;
            }
            k[j] = ranges[j].0.clone();
            j += 1;
        }
        if j == n {
            break;
        }
    }
    Ok((closed, open))
}
