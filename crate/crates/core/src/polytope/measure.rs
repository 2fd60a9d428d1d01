//! Vertices, facets, and exact measures via pulling triangulations.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::linalg::{self, dot, BitVec, Matrix, RationalMatrix};
use crate::num::{self, Q};
use crate::surd::Surd;

use super::{dd, HPolytope, MeasuresJson, ENCLOSURE_BITS};

#[derive(Clone, Debug)]
pub struct Facet {
    /// Index of the defining halfspace.
    pub halfspace: usize,
    /// Vertices on the facet.
    pub vertices: BitVec,
    /// Intrinsic (r-1)-dimensional measure.
    pub area: Surd,
}

#[derive(Clone, Debug)]
pub struct Geometry {
    pub dim: usize,
    pub frame: RationalMatrix,
    pub gram: RationalMatrix,
    /// Vertices in frame coordinates.
    pub vertices: Vec<Vec<Q>>,
    pub facets: Vec<Facet>,
    pub volume: Surd,
    pub surface_area: Surd,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BodyMeasures {
    pub dim: usize,
    pub volume: Surd,
    pub surface_area: Surd,
    pub ratio: Surd,
}

impl BodyMeasures {
    pub fn new(dim: usize, volume: Surd, surface_area: Surd) -> Result<Self> {
        let ratio = surface_area.div(&volume)?;
        Ok(BodyMeasures {
            dim,
            volume,
            surface_area,
            ratio,
        })
    }

    pub fn ratio_interval(&self) -> Interval {
        self.ratio.enclose(ENCLOSURE_BITS)
    }

    pub fn to_json(&self) -> MeasuresJson {
        MeasuresJson {
            dim: self.dim,
            volume: self.volume.to_json(ENCLOSURE_BITS),
            surface_area: self.surface_area.to_json(ENCLOSURE_BITS),
            ratio: self.ratio.to_json(ENCLOSURE_BITS),
        }
    }
}

impl Geometry {
    pub fn measures(&self) -> BodyMeasures {
        BodyMeasures::new(self.dim, self.volume.clone(), self.surface_area.clone())
            .expect("volume is a single-term surd")
    }

    pub fn ambient_vertices(&self) -> Vec<Vec<Q>> {
        self.vertices
            .iter()
            .map(|u| self.frame.mul_vec(u).expect("frame shape"))
            .collect()
    }

    /// Max squared Euclidean norm over vertices (circumradius about 0, squared).
    pub fn circumradius_sq(&self) -> Q {
        self.ambient_vertices()
            .iter()
            .map(|v| dot(v, v))
            .max()
            .unwrap_or_default()
    }
}

pub(crate) fn geometry(p: &HPolytope) -> Result<Geometry> {
    let r = p.dim();
    let (alphas, betas) = p.intrinsic_constraints();
    if alphas.is_empty() {
        return Err(Error::Degenerate);
    }
    let vs = dd::vertices(&alphas, &betas)?;
    let nv = vs.points.len();

    // facets: constraints whose tight vertices span an (r-1)-flat
    let mut facets: Vec<(usize, BitVec)> = Vec::new();
    for k in 0..alphas.len() {
        let mut on = BitVec::zeros(nv);
        for (v, t) in vs.tight.iter().enumerate() {
            if t.get(k) {
                on.set(v);
            }
        }
        if on.weight() < r || facets.iter().any(|(_, f)| f == &on) {
            continue;
        }
        let pts: Vec<Vec<Q>> = on.ones().map(|v| vs.points[v].clone()).collect();
        if dd::affine_rank(&pts) + 1 == r {
            facets.push((k, on));
        }
    }
    let facet_sets: Vec<BitVec> = facets.iter().map(|(_, f)| f.clone()).collect();

    let frame = p.frame();
    let gram = linalg::gram(&frame);
    let det_g = linalg::det_rational(&gram)?;

    let mut all = BitVec::zeros(nv);
    for v in 0..nv {
        all.set(v);
    }
    let simplices = triangulate(&all, r, &facet_sets);
    let mut vol_u = Q::zero();
    for s in &simplices {
        vol_u += simplex_det(&vs.points, s).abs();
    }
    vol_u /= Q::from_integer(num::factorial(r as u64));
    let volume = Surd::sqrt(&det_g).scale(&vol_u);

    let mut out_facets = Vec::new();
    let mut surface = Surd::zero();
    for (k, set) in facets {
        let area = facet_area(&vs.points, &set, r, &alphas[k], &gram, &facet_sets)?;
        surface = surface.add(&area);
        out_facets.push(Facet {
            halfspace: k,
            vertices: set,
            area,
        });
    }
    Ok(Geometry {
        dim: r,
        frame,
        gram,
        vertices: vs.points,
        facets: out_facets,
        volume,
        surface_area: surface,
    })
}

/// Pulling triangulation of the face with vertex set `face` and dimension `k`.
fn triangulate(face: &BitVec, k: usize, facets: &[BitVec]) -> Vec<Vec<usize>> {
    let apex = face.lowest_set().expect("nonempty face");
    if k == 0 {
        return vec![vec![apex]];
    }
    let mut out = Vec::new();
    for sub in subfaces(face, facets) {
        if sub.get(apex) {
            continue;
        }
        for mut s in triangulate(&sub, k - 1, facets) {
            s.push(apex);
            out.push(s);
        }
    }
    out
}

/// Facets of a face: inclusion-maximal proper nonempty intersections with
/// facets of the whole polytope.
fn subfaces(face: &BitVec, facets: &[BitVec]) -> Vec<BitVec> {
    let mut cands: Vec<BitVec> = Vec::new();
    for f in facets {
        let c = face.and(f);
        if c.is_zero() || &c == face || cands.contains(&c) {
            continue;
        }
        cands.push(c);
    }
    cands
        .iter()
        .filter(|c| !cands.iter().any(|d| d != *c && c.is_subset_of(d)))
        .cloned()
        .collect()
}

/// Determinant of the edge vectors `v_i - v_last` of a full simplex.
fn simplex_det(points: &[Vec<Q>], s: &[usize]) -> Q {
    let base = &points[*s.last().expect("nonempty simplex")];
    let rows: Vec<Vec<Q>> = s[..s.len() - 1]
        .iter()
        .map(|&i| points[i].iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    if rows.is_empty() {
        return Q::from_integer(1.into());
    }
    linalg::det_rational(&Matrix::from_rows(rows).expect("square")).expect("square")
}

/// Intrinsic (r-1)-measure of a facet with normal `alpha` (frame coordinates).
fn facet_area(
    points: &[Vec<Q>],
    set: &BitVec,
    r: usize,
    alpha: &[Q],
    gram: &RationalMatrix,
    facets: &[BitVec],
) -> Result<Surd> {
    if r == 1 {
        // a point; counting measure
        return Ok(Surd::from_int(1));
    }
    // Basis of the facet direction with an identity block on rows `free`.
    let normal = Matrix::from_rows(vec![alpha.to_vec()])?;
    let wf = linalg::rational_kernel(&normal);
    let (_, piv) = linalg::rref(&normal);
    let free: Vec<usize> = (0..r).filter(|j| !piv.contains(j)).collect();
    let wf_m = Matrix::from_cols(r, &wf)?;
    let g_f = wf_m.transpose().matmul(gram)?.matmul(&wf_m)?;
    let det_f = linalg::det_rational(&g_f)?;

    let mut total = Q::zero();
    for s in triangulate(set, r - 1, facets) {
        let base = &points[*s.last().expect("nonempty")];
        let rows: Vec<Vec<Q>> = s[..s.len() - 1]
            .iter()
            .map(|&i| free.iter().map(|&j| &points[i][j] - &base[j]).collect())
            .collect();
        total += linalg::det_rational(&Matrix::from_rows(rows)?)?.abs();
    }
    total /= Q::from_integer(num::factorial(r as u64 - 1));
    Ok(Surd::sqrt(&det_f).scale(&total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;

    #[test]
    fn cube_measures() {
        for n in 1..=5 {
            let c = HPolytope::cube(n, &rat(1, 2));
            let m = c.measures().unwrap();
            assert_eq!(m.volume, Surd::from_int(1));
            assert_eq!(m.surface_area, Surd::from_int(2 * n as i64));
        }
    }

    #[test]
    fn cross_polytope_and_simplex() {
        let m = HPolytope::cross_polytope(3).measures().unwrap();
        assert_eq!(m.volume.as_rational(), Some(rat(4, 3)));
        // 8 equilateral triangles of side sqrt 2: area 8 * sqrt(3)/2
        assert_eq!(m.surface_area, Surd::sqrt(&rat(3, 1)).scale(&rat(4, 1)));
        let s = HPolytope::simplex(2, &rat(1, 1)).measures().unwrap();
        assert_eq!(s.volume.as_rational(), Some(rat(1, 2)));
        assert_eq!(s.surface_area, Surd::from_int(2).add(&Surd::sqrt(&rat(2, 1))));
    }

    #[test]
    fn rectangle_perimeter() {
        let b = HPolytope::axis_box(&[rat(-1, 1), rat(-1, 2)], &[rat(1, 1), rat(1, 2)]);
        let m = b.measures().unwrap();
        assert_eq!(m.volume, Surd::from_int(2));
        assert_eq!(m.surface_area, Surd::from_int(6));
        assert_eq!(m.ratio, Surd::from_int(3));
    }
}
