//! The standard random walk on the hypercube `{0,1}^m` and its return
//! probabilities, plus the sparse `{0,1}` matrix sampler built from it.

mod ldpc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::linalg::BitVec;
use crate::num::{self, Q, Z};

pub use ldpc::{
    check_hypotheses, dependent_subset, expected_collision_bound, row_bound, s_wise_independent, sample_attempt,
    sample_ldpc, Attempt, CollisionBound, LdpcParams, LdpcSample, LdpcStats, SWISE_BUDGET,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkParams {
    pub m: usize,
    pub t: u64,
    pub seed: u64,
}

/// Generator for substream `stream` of `seed`. Streams are independent, so
/// callers can hand one to each column and stay scheduling-independent.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Run `t` steps from the origin with the given generator.
pub fn walk_with<R: Rng>(m: usize, t: u64, rng: &mut R) -> BitVec {
    let mut v = BitVec::zeros(m);
    for _ in 0..t {
        v.flip(rng.gen_range(0..m));
    }
    v
}

/// One sample of `W(t)`, drawn from stream 0 of `p.seed`.
pub fn walk_sample(p: &WalkParams) -> Result<BitVec> {
    if p.m == 0 {
        return Err(Error::InvalidParameter("walk dimension must be at least 1".into()));
    }
    Ok(walk_with(p.m, p.t, &mut stream_rng(p.seed, 0)))
}

/// Above this dimension the return probability is computed from the moment
/// generating function instead of the eigenvalue sum.
const SPECTRAL_MAX_M: usize = 512;

/// `Pr[W(t) = 0]`, exactly.
///
/// Small `m` uses `2^{-m} sum_k C(m,k) (1 - 2k/m)^t`. For large `m` the same
/// number is `E[X^t] / m^t` with `X` a sum of `m` independent signs, and
/// `E[X^t] = t! [z^t] cosh(z)^m` needs only `O(t^2 log m)` work.
pub fn return_prob_exact(m: usize, t: u64) -> Q {
    assert!(m >= 1, "walk dimension must be at least 1");
    if t % 2 == 1 {
        return Q::zero();
    }
    if t == 0 {
        return Q::one();
    }
    let mt = BigInt::from(m).pow(t as u32);
    if m <= SPECTRAL_MAX_M {
        let mut binom = BigInt::one();
        let mut acc = BigInt::zero();
        for k in 0..=m {
            let base = BigInt::from(m as i64 - 2 * k as i64);
            acc += &binom * base.pow(t as u32);
            binom = binom * (m - k) / (k + 1);
        }
        Q::new(acc, mt << m)
    } else {
        let half = (t / 2) as usize;
        // cosh(z) = sum_j z^{2j} / (2j)!, truncated in the variable z^2
        let cosh: Vec<Q> = (0..=half)
            .map(|j| Q::new(BigInt::one(), num::factorial(2 * j as u64)))
            .collect();
        let moment = truncated_pow(&cosh, m as u64, half)[half].clone() * Q::from_integer(num::factorial(t));
        moment / Q::from_integer(mt)
    }
}

fn truncated_mul(a: &[Q], b: &[Q], deg: usize) -> Vec<Q> {
    let mut out = vec![Q::zero(); deg + 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(deg + 1 - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn truncated_pow(base: &[Q], mut e: u64, deg: usize) -> Vec<Q> {
    let mut acc = vec![Q::zero(); deg + 1];
    acc[0] = Q::one();
    let mut b = base.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = truncated_mul(&acc, &b, deg);
        }
        e >>= 1;
        if e > 0 {
            b = truncated_mul(&b, &b, deg);
        }
    }
    acc
}

/// `2 (t/m)^{t/2}` for even `t`, and `0` for odd `t` (where the walk cannot
/// be at the origin).
pub fn return_prob_bound(m: usize, t: u64) -> Q {
    assert!(m >= 1, "walk dimension must be at least 1");
    if t % 2 == 1 {
        return Q::zero();
    }
    let ratio = Q::new(BigInt::from(t), BigInt::from(m));
    num::rat(2, 1) * num::pow_q(&ratio, t / 2)
}

/// Largest `s` with `s <= (c/d) (m^d / n^2)^{1/(d-2)}`, decided exactly via
/// `(s d)^{d-2} n^2 <= c^{d-2} m^d`. Zero means no `s >= 1` is admissible.
pub fn admissible_s(m: usize, n: usize, d: usize, c: &Q) -> Result<usize> {
    if d < 3 {
        return Err(Error::InvalidParameter(format!(
            "walk length d = {d} must be at least 3"
        )));
    }
    if !c.is_positive() {
        return Ok(0);
    }
    let e = (d - 2) as u64;
    let rhs = num::pow_q(c, e) * Q::from_integer(BigInt::from(m).pow(d as u32));
    let n2 = Q::from_integer(BigInt::from(n).pow(2));
    let ok = |s: usize| num::pow_q(&Q::from_integer(BigInt::from(s * d)), e) * &n2 <= rhs;
    if !ok(1) {
        return Ok(0);
    }
    let mut lo = 1usize;
    let mut hi = 2usize;
    while ok(hi) {
        lo = hi;
        hi = hi
            .checked_mul(2)
            .ok_or_else(|| Error::InvalidParameter("admissible s overflows".into()))?;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Enclosure of `(1/(7 e d))^{2/(d-2)}`.
pub fn c_threshold(d: usize, bits: u32) -> Interval {
    assert!(d >= 3, "walk length must be at least 3");
    let seven_d = Interval::point(num::rat(7 * d as i64, 1));
    let log = &seven_d.ln(bits) + &Interval::from_int(1);
    log.scale(&num::rat(-2, d as i64 - 2)).exp(bits)
}

/// A rational strictly below `min_{3 <= d <= d_max} (1/(7 e d))^{2/(d-2)}`.
pub fn default_c(d_max: usize) -> Result<Q> {
    if d_max < 3 {
        return Err(Error::InvalidParameter("d_max must be at least 3".into()));
    }
    let bits = 96;
    let lo = (3..=d_max)
        .map(|d| c_threshold(d, bits).lo().clone())
        .min()
        .expect("nonempty range");
    // truncate to a short dyadic, then step one ulp down to make it strict
    let c = num::round_down(&lo, 64) - num::pow2(-64);
    debug_assert!(c.is_positive() && c < Q::one());
    Ok(c)
}

/// `d = 2 + floor(2/eps)`.
pub fn choose_d(eps: &Q) -> Result<usize> {
    if !eps.is_positive() || eps > &num::rat(2, 1) {
        return Err(Error::InvalidParameter("epsilon must lie in (0, 2]".into()));
    }
    let f = num::floor(&(num::rat(2, 1) / eps));
    let f: usize = usize::try_from(f).map_err(|_| Error::InvalidParameter("epsilon too small".into()))?;
    Ok(2 + f)
}

/// Exact law of `|W(t)|` (Ehrenfest chain on weights): entry `k` is
/// `Pr[|W(t)| = k]`.
pub fn weight_distribution(m: usize, t: u64) -> Vec<Q> {
    let mut p = vec![Q::zero(); m + 1];
    p[0] = Q::one();
    let inv = Q::new(BigInt::one(), BigInt::from(m));
    for _ in 0..t {
        let mut next = vec![Q::zero(); m + 1];
        for (k, pk) in p.iter().enumerate() {
            if pk.is_zero() {
                continue;
            }
            if k > 0 {
                next[k - 1] += pk * &inv * Q::from_integer(Z::from(k));
            }
            if k < m {
                next[k + 1] += pk * &inv * Q::from_integer(Z::from(m - k));
            }
        }
        p = next;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;

    #[test]
    fn spec_values() {
        assert_eq!(return_prob_exact(2, 2), rat(1, 2));
        assert_eq!(return_prob_exact(3, 2), rat(1, 3));
        assert_eq!(return_prob_exact(5, 3), rat(0, 1));
        assert_eq!(return_prob_bound(2, 2), rat(2, 1));
        assert_eq!(return_prob_bound(16, 4), rat(1, 8));
        assert_eq!(return_prob_bound(4, 2), rat(1, 1));
        assert_eq!(return_prob_exact(4, 2), rat(1, 4));
    }

    #[test]
    fn both_formulas_agree() {
        for m in [SPECTRAL_MAX_M - 1, SPECTRAL_MAX_M] {
            for t in [2u64, 4, 8, 12] {
                let spectral = return_prob_exact(m, t);
                let half = (t / 2) as usize;
                let cosh: Vec<Q> = (0..=half)
                    .map(|j| Q::new(BigInt::one(), num::factorial(2 * j as u64)))
                    .collect();
                let moment = truncated_pow(&cosh, m as u64, half)[half].clone() * Q::from_integer(num::factorial(t))
                    / Q::from_integer(BigInt::from(m).pow(t as u32));
                assert_eq!(spectral, moment);
            }
        }
        // four steps: return iff the flips pair up, (3m^2 - 2m) / m^4
        let m = 1000usize;
        assert_eq!(return_prob_exact(m, 4), rat(3 * 1_000_000 - 2000, 1_000_000_000_000));
    }

    #[test]
    fn choose_d_values() {
        assert_eq!(choose_d(&rat(1, 1)).unwrap(), 4);
        assert_eq!(choose_d(&rat(2, 1)).unwrap(), 3);
        assert_eq!(choose_d(&rat(1, 2)).unwrap(), 6);
        assert!(choose_d(&rat(0, 1)).is_err());
        assert!(choose_d(&rat(3, 1)).is_err());
    }

    #[test]
    fn default_c_below_threshold() {
        let c3 = default_c(3).unwrap();
        let v = num::to_f64(&c3);
        let oracle = (1.0 / (21.0 * std::f64::consts::E)).powi(2);
        assert!(v < oracle && v > oracle * (1.0 - 1e-9), "{v} vs {oracle}");
        assert!(c3 < *c_threshold(3, 80).lo());
        assert!(default_c(10).unwrap() <= c3);
        assert!(default_c(2).is_err());
    }

    #[test]
    fn admissible_s_examples() {
        let c = rat(1, 2);
        // d = 4, m = n: s <= (c/4) m
        assert_eq!(admissible_s(400, 400, 4, &c).unwrap(), 50);
        assert_eq!(admissible_s(400, 400, 4, &rat(0, 1)).unwrap(), 0);
        // d = 3: s <= (c/3) m^3 / n^2
        assert_eq!(admissible_s(30, 30, 3, &rat(1, 1)).unwrap(), 10);
        assert!(admissible_s(30, 30, 2, &c).is_err());
    }

    #[test]
    fn walk_parity_and_seed() {
        for t in 0..20 {
            let p = WalkParams { m: 7, t, seed: 11 };
            let w = walk_sample(&p).unwrap();
            assert_eq!(w.weight() as u64 % 2, t % 2);
            assert_eq!(w, walk_sample(&p).unwrap());
        }
        assert!(walk_sample(&WalkParams { m: 5, t: 0, seed: 1 }).unwrap().is_zero());
        assert_eq!(walk_sample(&WalkParams { m: 5, t: 1, seed: 1 }).unwrap().weight(), 1);
    }

    #[test]
    fn weight_chain_sums_to_one() {
        let p = weight_distribution(6, 5);
        assert_eq!(p.iter().fold(Q::zero(), |a, b| a + b), Q::one());
        assert_eq!(weight_distribution(6, 4)[0], return_prob_exact(6, 4));
    }
}
