//! Exact H-polytopes inside rational subspaces.
//!
//! A body is a list of closed halfspaces `<a, x> <= b` intersected with an
//! optional subspace `V` (the whole space when absent). All geometry is
//! computed in coordinates `u` of a fixed basis `W` of `V` (`x = W u`), where
//! a halfspace reads `(W^T a) . u <= b`; intrinsic measures pick up the
//! factor `sqrt(det W^T W)`.

pub mod dd;
mod hrep;
mod measure;
mod ops;
mod voronoi;

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Subspace;
use crate::linalg::{dot, Matrix, RationalMatrix};
use crate::num::{self, Q};
use crate::surd::{Surd, SurdJson};

pub use measure::{BodyMeasures, Geometry};
pub use ops::{inradius_certify, inradius_certify_sq, linear_image, orthogonal_product, product_measures};
pub use voronoi::{voronoi_cell, voronoi_cell_with_budget};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Halfspace {
    pub a: Vec<Q>,
    pub b: Q,
}

impl Halfspace {
    pub fn new(a: Vec<Q>, b: Q) -> Self {
        Halfspace { a, b }
    }

    /// Canonical positive multiple: first nonzero normal entry is +-1.
    pub fn normalized(&self) -> Halfspace {
        let lead = self.a.iter().find(|v| !v.is_zero()).cloned().unwrap_or_else(Q::one);
        let k = lead.abs().recip();
        Halfspace {
            a: self.a.iter().map(|v| v * &k).collect(),
            b: &self.b * &k,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HPolytope {
    ambient_dim: usize,
    subspace: Option<Subspace>,
    halfspaces: Vec<Halfspace>,
}

impl HPolytope {
    /// Normals are replaced by their projections onto the subspace, which
    /// leaves the body unchanged.
    pub fn new(ambient_dim: usize, subspace: Option<Subspace>, halfspaces: Vec<Halfspace>) -> Result<Self> {
        if halfspaces.iter().any(|h| h.a.len() != ambient_dim) {
            return Err(Error::Dimension(
                "halfspace normal length differs from ambient_dim".into(),
            ));
        }
        let subspace = match subspace {
            Some(s) if s.ambient_dim() != ambient_dim => {
                return Err(Error::Dimension("subspace ambient dimension differs".into()))
            }
            Some(s) if s.is_full() => None,
            Some(s) if s.dim() == 0 => return Err(Error::InvalidParameter("body in the zero subspace".into())),
            other => other,
        };
        let halfspaces = match &subspace {
            None => halfspaces,
            Some(s) => {
                let p = s.projector();
                halfspaces
                    .into_iter()
                    .map(|h| Halfspace {
                        a: p.mul_vec(&h.a).expect("lengths checked"),
                        b: h.b,
                    })
                    .collect()
            }
        };
        if halfspaces.iter().any(|h| h.a.iter().all(Zero::is_zero)) {
            return Err(Error::InvalidParameter(
                "halfspace normal vanishes on the subspace".into(),
            ));
        }
        Ok(HPolytope {
            ambient_dim,
            subspace,
            halfspaces,
        })
    }

    /// `[-h, h]^n`
    pub fn cube(n: usize, half_side: &Q) -> Self {
        let mut hs = Vec::new();
        for i in 0..n {
            for s in [1, -1] {
                let mut a = vec![Q::zero(); n];
                a[i] = num::rat(s, 1);
                hs.push(Halfspace::new(a, half_side.clone()));
            }
        }
        HPolytope {
            ambient_dim: n,
            subspace: None,
            halfspaces: hs,
        }
    }

    /// Axis-parallel box `prod [lo_i, hi_i]`.
    pub fn axis_box(lo: &[Q], hi: &[Q]) -> Self {
        let n = lo.len();
        let mut hs = Vec::new();
        for i in 0..n {
            let mut a = vec![Q::zero(); n];
            a[i] = Q::one();
            hs.push(Halfspace::new(a.clone(), hi[i].clone()));
            a[i] = -Q::one();
            hs.push(Halfspace::new(a, -lo[i].clone()));
        }
        HPolytope {
            ambient_dim: n,
            subspace: None,
            halfspaces: hs,
        }
    }

    /// `{x : sum |x_i| <= 1}`
    pub fn cross_polytope(n: usize) -> Self {
        let mut hs = Vec::new();
        for mask in 0..(1usize << n) {
            let a = (0..n)
                .map(|i| if mask >> i & 1 == 1 { -Q::one() } else { Q::one() })
                .collect();
            hs.push(Halfspace::new(a, Q::one()));
        }
        HPolytope {
            ambient_dim: n,
            subspace: None,
            halfspaces: hs,
        }
    }

    /// Simplex `{x >= 0, sum x_i <= 1}` scaled by `k`.
    pub fn simplex(n: usize, k: &Q) -> Self {
        let mut hs = Vec::new();
        for i in 0..n {
            let mut a = vec![Q::zero(); n];
            a[i] = -Q::one();
            hs.push(Halfspace::new(a, Q::zero()));
        }
        hs.push(Halfspace::new(vec![Q::one(); n], k.clone()));
        HPolytope {
            ambient_dim: n,
            subspace: None,
            halfspaces: hs,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn subspace(&self) -> Option<&Subspace> {
        self.subspace.as_ref()
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    /// Intrinsic dimension.
    pub fn dim(&self) -> usize {
        self.subspace.as_ref().map_or(self.ambient_dim, Subspace::dim)
    }

    /// Basis `W` of the ambient subspace (identity when full).
    pub fn frame(&self) -> RationalMatrix {
        match &self.subspace {
            Some(s) => s.basis().clone(),
            None => RationalMatrix::identity(self.ambient_dim),
        }
    }

    /// The subspace, with the full space made explicit.
    pub fn span(&self) -> Subspace {
        self.subspace
            .clone()
            .unwrap_or_else(|| Subspace::full(self.ambient_dim))
    }

    /// Constraints in frame coordinates: `(W^T a_i, b_i)`.
    pub fn intrinsic_constraints(&self) -> (Vec<Vec<Q>>, Vec<Q>) {
        match &self.subspace {
            None => (
                self.halfspaces.iter().map(|h| h.a.clone()).collect(),
                self.halfspaces.iter().map(|h| h.b.clone()).collect(),
            ),
            Some(s) => {
                let wt = s.basis().transpose();
                (
                    self.halfspaces
                        .iter()
                        .map(|h| wt.mul_vec(&h.a).expect("lengths"))
                        .collect(),
                    self.halfspaces.iter().map(|h| h.b.clone()).collect(),
                )
            }
        }
    }

    pub fn in_span(&self, x: &[Q]) -> bool {
        x.len() == self.ambient_dim && self.subspace.as_ref().is_none_or(|s| s.contains(x))
    }

    /// Closed containment.
    pub fn contains(&self, x: &[Q]) -> bool {
        self.in_span(x) && self.halfspaces.iter().all(|h| dot(&h.a, x) <= h.b)
    }

    /// Containment in the relative interior.
    pub fn contains_interior(&self, x: &[Q]) -> bool {
        self.in_span(x) && self.halfspaces.iter().all(|h| dot(&h.a, x) < h.b)
    }

    /// `k K` for `k > 0`.
    pub fn scaled(&self, k: &Q) -> HPolytope {
        assert!(k.is_positive(), "scale factor must be positive");
        HPolytope {
            ambient_dim: self.ambient_dim,
            subspace: self.subspace.clone(),
            halfspaces: self
                .halfspaces
                .iter()
                .map(|h| Halfspace::new(h.a.clone(), &h.b * k))
                .collect(),
        }
    }

    /// Halfspaces up to positive scaling, as a set.
    pub fn normalized_halfspace_set(&self) -> BTreeSet<Halfspace> {
        self.halfspaces.iter().map(Halfspace::normalized).collect()
    }

    /// Same body with only facet-defining halfspaces.
    pub fn pruned(&self) -> Result<HPolytope> {
        let g = self.geometry()?;
        Ok(HPolytope {
            ambient_dim: self.ambient_dim,
            subspace: self.subspace.clone(),
            halfspaces: g.facets.iter().map(|f| self.halfspaces[f.halfspace].clone()).collect(),
        })
    }

    pub fn geometry(&self) -> Result<Geometry> {
        measure::geometry(self)
    }

    pub fn measures(&self) -> Result<BodyMeasures> {
        Ok(self.geometry()?.measures())
    }

    /// Monte Carlo volume estimate over a frame-coordinate box.
    ///
    /// Statistical, not certified: the returned interval is a Hoeffding
    /// confidence interval at level `1 - delta`. The caller must supply a
    /// box containing the body.
    pub fn monte_carlo_volume(
        &self,
        lo: &[Q],
        hi: &[Q],
        samples: u64,
        seed: u64,
        delta: f64,
    ) -> Result<MonteCarloVolume> {
        let r = self.dim();
        if lo.len() != r || hi.len() != r || samples == 0 {
            return Err(Error::InvalidParameter("box must match the intrinsic dimension".into()));
        }
        let (alphas, betas) = self.intrinsic_constraints();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut hits = 0u64;
        let scale = num::pow2(-30);
        for _ in 0..samples {
            let u: Vec<Q> = (0..r)
                .map(|i| {
                    let t = Q::from_integer(rng.gen_range(0i64..(1 << 30)).into()) * &scale;
                    &lo[i] + (&hi[i] - &lo[i]) * t
                })
                .collect();
            if alphas.iter().zip(&betas).all(|(a, b)| &dot(a, &u) <= b) {
                hits += 1;
            }
        }
        let box_vol: Q = lo.iter().zip(hi).fold(Q::one(), |acc, (l, h)| acc * (h - l));
        let sqrt_det = Surd::sqrt(&crate::linalg::det_rational(&crate::linalg::gram(&self.frame()))?);
        let frac = hits as f64 / samples as f64;
        let eps = ((2.0 / delta).ln() / (2.0 * samples as f64)).sqrt();
        let bv = num::to_f64(&box_vol) * sqrt_det.to_f64();
        Ok(MonteCarloVolume {
            estimate: frac * bv,
            lo: ((frac - eps).max(0.0)) * bv,
            hi: ((frac + eps).min(1.0)) * bv,
            samples,
            seed,
            confidence: 1.0 - delta,
            certified: false,
        })
    }

    pub fn to_json(&self) -> PolytopeJson {
        PolytopeJson {
            ambient_dim: self.ambient_dim,
            subspace_basis: self.subspace.as_ref().map(|s| {
                s.basis()
                    .to_cols()
                    .iter()
                    .map(|c| c.iter().map(num::fmt_rational).collect())
                    .collect()
            }),
            halfspaces: self
                .halfspaces
                .iter()
                .map(|h| HalfspaceJson {
                    a: h.a.iter().map(num::fmt_rational).collect(),
                    b: num::fmt_rational(&h.b),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &PolytopeJson) -> Result<HPolytope> {
        let n = j.ambient_dim;
        let subspace = match &j.subspace_basis {
            None => None,
            Some(cols) => {
                let cols = cols
                    .iter()
                    .map(|c| {
                        if c.len() != n {
                            return Err(Error::Parse("subspace column length differs from ambient_dim".into()));
                        }
                        c.iter().map(|s| num::parse_rational(s)).collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                Some(Subspace::new(Matrix::from_cols(n, &cols)?)?)
            }
        };
        let hs = j
            .halfspaces
            .iter()
            .map(|h| {
                Ok(Halfspace::new(
                    h.a.iter().map(|s| num::parse_rational(s)).collect::<Result<Vec<_>>>()?,
                    num::parse_rational(&h.b)?,
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        HPolytope::new(n, subspace, hs)
    }

    pub fn to_hrep(&self) -> String {
        hrep::write(self)
    }

    pub fn from_hrep(text: &str) -> Result<HPolytope> {
        hrep::parse(text)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MonteCarloVolume {
    pub estimate: f64,
    pub lo: f64,
    pub hi: f64,
    pub samples: u64,
    pub seed: u64,
    pub confidence: f64,
    pub certified: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct HalfspaceJson {
    pub a: Vec<String>,
    pub b: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PolytopeJson {
    pub ambient_dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subspace_basis: Option<Vec<Vec<String>>>,
    pub halfspaces: Vec<HalfspaceJson>,
}

/// Measures in JSON form.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MeasuresJson {
    pub dim: usize,
    pub volume: SurdJson,
    pub surface_area: SurdJson,
    pub ratio: SurdJson,
}

/// Default precision for interval enclosures of irrational measures.
pub const ENCLOSURE_BITS: u32 = 96;
