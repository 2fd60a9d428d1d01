use num_traits::Signed;

use crate::error::{Error, Result};
use crate::lattice::Subspace;
use crate::linalg::{self, norm_sq, RationalMatrix};
use crate::num::Q;

use super::{BodyMeasures, HPolytope, Halfspace};

/// Whether the ball of radius `sqrt(r_sq)` about the origin (inside the
/// body's subspace) lies in `k`: `b >= 0` and `b^2 >= r_sq |a|^2` for every
/// halfspace.
pub fn inradius_certify_sq(k: &HPolytope, r_sq: &Q) -> bool {
    k.halfspaces()
        .iter()
        .all(|h| !h.b.is_negative() && &h.b * &h.b >= r_sq * norm_sq(&h.a))
}

pub fn inradius_certify(k: &HPolytope, r: &Q) -> bool {
    !r.is_negative() && inradius_certify_sq(k, &(r * r))
}

/// `K1 + K2` for bodies in orthogonal complementary subspaces.
pub fn orthogonal_product(k1: &HPolytope, k2: &HPolytope) -> Result<HPolytope> {
    let n = k1.ambient_dim();
    if k2.ambient_dim() != n {
        return Err(Error::Dimension("bodies live in different ambient spaces".into()));
    }
    let s1 = k1.span();
    let s2 = k2.span();
    if s1.dim() + s2.dim() != n || !s1.is_orthogonal_to(&s2) {
        return Err(Error::NotOrthogonal);
    }
    let hs: Vec<Halfspace> = k1.halfspaces().iter().chain(k2.halfspaces()).cloned().collect();
    HPolytope::new(n, None, hs)
}

/// Measures of an orthogonal sum from the measures of its factors:
/// `vol = v1 v2`, `surface = s1 v2 + v1 s2`.
pub fn product_measures(m1: &BodyMeasures, m2: &BodyMeasures) -> Result<BodyMeasures> {
    let vol = m1.volume.mul(&m2.volume);
    let surf = m1.surface_area.mul(&m2.volume).add(&m1.volume.mul(&m2.surface_area));
    BodyMeasures::new(m1.dim + m2.dim, vol, surf)
}

/// Image `T K` for `T` (N x n) injective on the span of `K`.
///
/// Frame coordinates are preserved: with `T_S = T W`, the image lives in the
/// column span of `T_S` and a halfspace `alpha . u <= b` becomes
/// `<T_S (T_S^T T_S)^{-1} alpha, y> <= b`.
pub fn linear_image(t: &RationalMatrix, k: &HPolytope) -> Result<HPolytope> {
    if t.cols() != k.ambient_dim() {
        return Err(Error::Dimension("map and body dimensions differ".into()));
    }
    let w = k.frame();
    let ts = t.matmul(&w)?;
    let r = ts.cols();
    if linalg::rank_rational(&ts) != r {
        return Err(Error::NotInjective);
    }
    let g = linalg::gram(&ts);
    let m = ts.matmul(&linalg::inverse(&g)?)?;
    let (alphas, betas) = k.intrinsic_constraints();
    let hs = alphas
        .iter()
        .zip(betas)
        .map(|(a, b)| Ok(Halfspace::new(m.mul_vec(a)?, b)))
        .collect::<Result<Vec<_>>>()?;
    let n = t.rows();
    let sub = if r == n { None } else { Some(Subspace::new(ts)?) };
    HPolytope::new(n, sub, hs)
}
