//! Independent checks of constructed bodies and reports.

mod suite;
mod tiling;
mod volume;

pub use suite::{inequality_suite, is_psd, norm_sq_at_most, Check, Status, SuiteResult};
pub use tiling::{translates_containing, verify_tiling, TilingReport};
pub use volume::{brute_force_volume, BRUTE_FORCE_MAX_DIM};

use crate::construction::Construction;
use crate::error::{Error, Result};
use crate::num::Q;
use crate::polytope::{inradius_certify_sq, BodyMeasures, HPolytope};
use crate::surd::Surd;

/// Tiling check for a construction; bound-only runs have no body to test.
pub fn verify_construction(c: &Construction, samples: u64, seed: u64) -> Result<TilingReport> {
    match &c.parallelotope {
        Some(p) => verify_tiling(p, samples, seed),
        None => Err(Error::Unverifiable(
            "bound-only construction has no body to tile".into(),
        )),
    }
}

/// `ratio <= n / R` for a body containing the ball of radius `R`, where
/// `R^2 = r_sq`. Returns `None` when the inradius is not certified.
pub fn inradius_ratio_bound(body: &HPolytope, measures: &BodyMeasures, r_sq: &Q) -> Option<bool> {
    if !inradius_certify_sq(body, r_sq) {
        return None;
    }
    // n / R = sqrt(n^2 / R^2)
    let n = Q::from_integer(measures.dim.into());
    Some(measures.ratio.le(&Surd::sqrt(&(&n * &n / r_sq))))
}
