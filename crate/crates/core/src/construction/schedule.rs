//! Certified arithmetic for the dimension schedule and the predicted bound.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interval::{pi_bounds, Interval, IntervalJson};
use crate::num::{self, Q, Z};

const BITS: u32 = 64;
const MAX_BITS: u32 = 4096;

fn ln_int(n: u64, bits: u32) -> Interval {
    Interval::point(Q::from_integer(BigInt::from(n))).ln(bits)
}

/// `sqrt(2 ln n ln(2 kappa))`
fn exponent(n: u64, kappa: &Q, bits: u32) -> Interval {
    let l2k = Interval::point(kappa * num::rat(2, 1)).ln(bits);
    (&ln_int(n, bits) * &l2k).scale(&num::rat(2, 1)).sqrt(bits)
}

/// `4 kappa^2`, the largest `n` handled by the a priori bound.
pub fn recursion_cutoff(kappa: &Q) -> Q {
    kappa * kappa * num::rat(4, 1)
}

/// `m = floor(n exp(-sqrt(2 ln n ln(2 kappa))))`, evaluated at increasing
/// precision until the floor is determined.
///
/// Errors with `Regime` unless `n > 4 kappa^2`, `4 <= m < n` and
/// `n >= m ln m / 4`.
pub fn choose_m(n: u64, kappa: &Q) -> Result<u64> {
    if kappa < &num::rat(4, 1) {
        return Err(Error::InvalidParameter("kappa must be at least 4".into()));
    }
    if Q::from_integer(BigInt::from(n)) <= recursion_cutoff(kappa) {
        return Err(Error::Regime(format!(
            "n = {n} is within the base-case range n <= 4 kappa^2"
        )));
    }
    let m = schedule_m(n, kappa)?;
    regime_check(n, m)?;
    Ok(m)
}

fn regime_check(n: u64, m: u64) -> Result<()> {
    if m < 4 || m >= n {
        return Err(Error::Regime(format!("schedule gives m = {m}, outside 4 <= m < {n}")));
    }
    // n >= m ln m / 4  <=>  4n >= m ln m
    let rhs = ln_int(m, BITS).scale(&Q::from_integer(BigInt::from(m)));
    if !rhs.certainly_le(&Interval::point(Q::from_integer(BigInt::from(4 * n)))) {
        return Err(Error::Regime(format!("n = {n} is below m ln m / 4 for m = {m}")));
    }
    Ok(())
}

/// The raw schedule value, without the regime checks.
pub fn schedule_m(n: u64, kappa: &Q) -> Result<u64> {
    let mut bits = BITS;
    loop {
        let v = exponent(n, kappa, bits)
            .scale(&num::rat(-1, 1))
            .exp(bits)
            .scale(&Q::from_integer(BigInt::from(n)));
        if let Some(f) = v.floor_if_determined() {
            return f
                .to_u64()
                .ok_or_else(|| Error::InvalidParameter("schedule value out of range".into()));
        }
        if bits >= MAX_BITS {
            return Err(Error::Unverifiable(format!(
                "floor of the schedule at n = {n} not determined"
            )));
        }
        bits *= 2;
    }
}

/// Enclosure of `4 kappa sqrt(n) exp(sqrt(2 ln n ln(2 kappa)))`.
pub fn predicted_bound(n: u64, kappa: &Q) -> Interval {
    assert!(n >= 1, "n must be positive");
    let root = Interval::point(Q::from_integer(BigInt::from(n))).sqrt(BITS);
    let e = exponent(n, kappa, BITS).exp(BITS);
    (&root * &e).scale(&(kappa * num::rat(4, 1)))
}

/// One instance of the induction inequality
/// `4 kappa sqrt(m) e^{sqrt(2 ln m ln 2kappa)} sqrt(n/m) <= 2 sqrt(n) e^{sqrt(2 ln n ln 2kappa)}`
/// at the scheduled `m`.
#[derive(Clone, Debug, Serialize)]
pub struct InductionCheck {
    pub n: u64,
    pub m: u64,
    /// Whether `m` also meets `4 <= m < n` and `n >= m ln m / 4`.
    pub regime_ok: bool,
    pub lhs: IntervalJson,
    pub rhs: IntervalJson,
    pub holds: bool,
}

pub fn induction_check(n: u64, kappa: &Q) -> Result<InductionCheck> {
    if Q::from_integer(BigInt::from(n)) <= recursion_cutoff(kappa) {
        return Err(Error::Regime(format!("n = {n} is within the base-case range")));
    }
    let m = schedule_m(n, kappa)?;
    if m == 0 {
        return Err(Error::Regime(format!("schedule gives m = 0 at n = {n}")));
    }
    // sqrt(m) sqrt(n/m) = sqrt(n)
    let root_n = Interval::point(Q::from_integer(BigInt::from(n))).sqrt(BITS);
    let lhs = (&root_n * &exponent(m, kappa, BITS).exp(BITS)).scale(&(kappa * num::rat(4, 1)));
    let rhs = (&root_n * &exponent(n, kappa, BITS).exp(BITS)).scale(&num::rat(2, 1));
    Ok(InductionCheck {
        n,
        m,
        regime_ok: regime_check(n, m).is_ok(),
        holds: lhs.certainly_le(&rhs),
        lhs: IntervalJson::from(&lhs),
        rhs: IntervalJson::from(&rhs),
    })
}

/// `min(count, hi - lo)` distinct integers spread logarithmically over
/// `(lo, hi]`. Where rounding would repeat a value at the dense low end the
/// next integer up is taken instead.
pub fn log_spaced(lo: u64, hi: u64, count: usize) -> Vec<u64> {
    if hi <= lo || count == 0 {
        return Vec::new();
    }
    let count = count.min(usize::try_from(hi - lo).unwrap_or(usize::MAX));
    let a = (lo as f64 + 1.0).ln();
    let b = (hi as f64).ln();
    let mut out: Vec<u64> = Vec::with_capacity(count);
    for i in 0..count {
        let t = if count == 1 { 1.0 } else { i as f64 / (count - 1) as f64 };
        let x = ((a + t * (b - a)).exp().round() as u64).clamp(lo + 1, hi);
        // leave room for the points still to come
        let ceiling = hi - (count - 1 - i) as u64;
        let floor = out.last().map_or(lo + 1, |p| p + 1);
        out.push(x.max(floor).min(ceiling));
    }
    out
}

/// Enclosure of the volume of the unit ball in `R^n`.
pub fn unit_ball_volume(n: usize, bits: u32) -> Interval {
    let pi = pi_bounds(bits);
    let k = (n / 2) as u32;
    if n.is_multiple_of(2) {
        // pi^k / k!
        pi.powi(k).scale(&Q::new(Z::one(), num::factorial(k as u64)))
    } else {
        // 2 k! (4 pi)^k / (2k+1)!
        let c = Q::new(num::factorial(k as u64) * 2, num::factorial(n as u64));
        pi.scale(&num::rat(4, 1)).powi(k).scale(&c)
    }
}

/// Enclosure of `ln omega_n`. Small `n` goes through the exact product;
/// larger `n` uses `(n/2) ln pi - ln Gamma(n/2 + 1)` with the two-sided
/// Stirling bound `0 < lnGamma(x+1) - ((x+1/2) ln x - x + ln(2 pi)/2) < 1/(12x)`.
pub fn ln_unit_ball_volume(n: usize, bits: u32) -> Interval {
    if n <= 64 {
        return unit_ball_volume(n, bits).ln(bits);
    }
    let x = Q::new(Z::from(n), Z::from(2));
    let pi = pi_bounds(bits);
    let ln_pi = pi.ln(bits);
    let ln_x = Interval::point(x.clone()).ln(bits);
    let ln_2pi = pi.scale(&num::rat(2, 1)).ln(bits);
    let stirling =
        &(&ln_x.scale(&(&x + num::rat(1, 2))) - &Interval::point(x.clone())) + &ln_2pi.scale(&num::rat(1, 2));
    let slack = Interval::new(Q::zero(), Q::new(Z::one(), Z::from(6 * n)));
    let ln_gamma = &stirling + &slack;
    &ln_pi.scale(&x) - &ln_gamma
}

/// Lower bound on `surface / volume` for any body of the given volume in
/// `R^n`: the ball of that volume minimises it, giving
/// `n omega_n^{1/n} vol^{-1/n}`.
pub fn isoperimetric_ratio_lower(n: usize, volume: &Interval, bits: u32) -> Interval {
    assert!(n >= 1 && volume.lo().is_positive(), "need n >= 1 and positive volume");
    if n == 1 {
        // attained by every segment, so keep it exact
        return volume.recip().scale(&Q::from_integer(Z::from(2)));
    }
    let inv_n = Q::new(Z::one(), Z::from(n));
    let w = ln_unit_ball_volume(n, bits);
    let v = volume.ln(bits);
    (&w - &v).scale(&inv_n).exp(bits).scale(&Q::from_integer(Z::from(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;

    #[test]
    fn predicted_at_one_is_sixteen() {
        let p = predicted_bound(1, &rat(4, 1));
        assert!(p.contains(&rat(16, 1)));
        assert!(p.width() < num::pow2(-40));
    }

    #[test]
    fn base_range_is_regime_error() {
        assert!(matches!(choose_m(64, &rat(4, 1)), Err(Error::Regime(_))));
        assert!(matches!(choose_m(10, &rat(4, 1)), Err(Error::Regime(_))));
        assert!(choose_m(100, &rat(3, 1)).is_err());
    }

    #[test]
    fn schedule_matches_floating_point() {
        for n in [1000u64, 12345, 1_000_000] {
            let x = (2.0 * (n as f64).ln() * 8f64.ln()).sqrt();
            let approx = n as f64 * (-x).exp();
            let m = schedule_m(n, &rat(4, 1)).unwrap();
            assert!((m as f64 - approx.floor()).abs() <= 1.0, "{n}: {m} vs {approx}");
        }
    }

    #[test]
    fn ball_volumes() {
        let pi = std::f64::consts::PI;
        for (n, v) in [(1, 2.0), (2, pi), (3, 4.0 * pi / 3.0), (4, pi * pi / 2.0)] {
            let iv = unit_ball_volume(n, 64);
            assert!(iv.lo() < &num::from_f64(v * (1.0 + 1e-12)).unwrap());
            assert!(iv.hi() > &num::from_f64(v * (1.0 - 1e-12)).unwrap());
        }
    }

    #[test]
    fn stirling_branch_matches_exact() {
        for n in [65usize, 80, 101] {
            let a = unit_ball_volume(n, 96).ln(96);
            let b = ln_unit_ball_volume(n, 96);
            assert!(a.lo() <= b.hi() && b.lo() <= a.hi(), "n = {n}");
            assert!(b.width() < rat(1, 5 * n as i64));
        }
        // lgamma oracle: ln omega_n = (n/2) ln pi - lgamma(n/2 + 1)
        let n = 1_000_000f64;
        let oracle = n / 2.0 * std::f64::consts::PI.ln() - ln_gamma_f64(n / 2.0 + 1.0);
        let b = ln_unit_ball_volume(1_000_000, 64);
        assert!((b.mid_f64() - oracle).abs() / oracle.abs() < 1e-9);
    }

    // Lanczos-free asymptotic series, accurate for large arguments
    fn ln_gamma_f64(z: f64) -> f64 {
        let x = z - 1.0;
        (x + 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x) - 1.0 / (360.0 * x.powi(3))
    }

    #[test]
    fn isoperimetric_square() {
        // unit-area disc: ratio 2 sqrt(pi) = 3.5449...
        let lb = isoperimetric_ratio_lower(2, &Interval::from_int(1), 64);
        assert!((lb.mid_f64() - 2.0 * std::f64::consts::PI.sqrt()).abs() < 1e-12);
        assert!(lb.hi() < &rat(4, 1));
    }

    #[test]
    fn isoperimetric_segment_is_exact() {
        let lb = isoperimetric_ratio_lower(1, &Interval::from_int(1), 64);
        assert!(lb.is_point());
        assert_eq!(lb.lo(), &rat(2, 1));
    }

    #[test]
    fn log_spaced_points_are_distinct() {
        let v = log_spaced(64, 1_000_000, 1000);
        assert_eq!(v.len(), 1000);
        assert!(v.windows(2).all(|w| w[0] < w[1]));
        assert_eq!((v[0], v[999]), (65, 1_000_000));
        // upper half keeps the geometric spacing
        let r = v[900] as f64 / v[899] as f64;
        assert!((r - (1e6f64 / 65.0).powf(1.0 / 999.0)).abs() < 1e-3);
        assert_eq!(log_spaced(10, 13, 50), vec![11, 12, 13]);
        assert!(log_spaced(5, 5, 3).is_empty());
    }
}
