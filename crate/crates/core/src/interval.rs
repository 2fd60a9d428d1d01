//! Certified interval arithmetic with rational endpoints.
//!
//! Every enclosure is rigorous: endpoints are exact rationals and every
//! rounding step moves them outward. Transcendental functions use truncated
//! series with explicit remainder bounds, so results never depend on the
//! platform `libm`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::num::{self, Q};

/// Default working precision in bits for transcendental enclosures.
pub const DEFAULT_BITS: u32 = 96;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: Q,
    hi: Q,
}

impl Interval {
    pub fn new(lo: Q, hi: Q) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        Interval { lo, hi }
    }

    pub fn point(x: Q) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn from_int(v: i64) -> Self {
        Self::point(num::rat(v, 1))
    }

    pub fn lo(&self) -> &Q {
        &self.lo
    }

    pub fn hi(&self) -> &Q {
        &self.hi
    }

    pub fn width(&self) -> Q {
        &self.hi - &self.lo
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Q) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// Certainly `self <= other` for every pair of represented reals.
    pub fn certainly_le(&self, other: &Interval) -> bool {
        self.hi <= other.lo
    }

    pub fn certainly_lt(&self, other: &Interval) -> bool {
        self.hi < other.lo
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    pub fn mid_f64(&self) -> f64 {
        num::to_f64(&((&self.lo + &self.hi) / num::rat(2, 1)))
    }

    /// Outward-round both endpoints to `bits` bits of relative precision.
    pub fn rounded(&self, bits: u32) -> Interval {
        Interval {
            lo: num::round_down(&self.lo, bits),
            hi: num::round_up(&self.hi, bits),
        }
    }

    pub fn recip(&self) -> Interval {
        assert!(!self.contains_zero(), "reciprocal of interval containing zero");
        Interval {
            lo: self.hi.recip(),
            hi: self.lo.recip(),
        }
    }

    pub fn div(&self, other: &Interval) -> Interval {
        self * &other.recip()
    }

    pub fn scale(&self, k: &Q) -> Interval {
        let a = &self.lo * k;
        let b = &self.hi * k;
        if a <= b {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }

    pub fn powi(&self, e: u32) -> Interval {
        let mut acc = Interval::from_int(1);
        for _ in 0..e {
            acc = &acc * self;
        }
        if e.is_multiple_of(2) && self.contains_zero() {
            acc.lo = Q::zero();
        }
        acc
    }

    pub fn sqrt(&self, bits: u32) -> Interval {
        assert!(!self.lo.is_negative(), "sqrt of interval with negative part");
        let (lo, _) = num::sqrt_bounds(&self.lo, bits);
        let (_, hi) = num::sqrt_bounds(&self.hi, bits);
        Interval { lo, hi }
    }

    pub fn exp(&self, bits: u32) -> Interval {
        Interval {
            lo: exp_bounds(&self.lo, bits).0,
            hi: exp_bounds(&self.hi, bits).1,
        }
    }

    pub fn ln(&self, bits: u32) -> Interval {
        assert!(self.lo.is_positive(), "log of non-positive interval");
        Interval {
            lo: ln_bounds(&self.lo, bits).0,
            hi: ln_bounds(&self.hi, bits).1,
        }
    }

    pub fn floor_if_determined(&self) -> Option<num::Z> {
        let a = num::floor(&self.lo);
        let b = num::floor(&self.hi);
        (a == b).then_some(a)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.15e}, {:.15e}]", num::to_f64(&self.lo), num::to_f64(&self.hi))
    }
}

impl Add for &Interval {
    type Output = Interval;
    fn add(self, o: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }
}

impl Sub for &Interval {
    type Output = Interval;
    fn sub(self, o: &Interval) -> Interval {
        Interval {
            lo: &self.lo - &o.hi,
            hi: &self.hi - &o.lo,
        }
    }
}

impl Neg for &Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }
}

impl Mul for &Interval {
    type Output = Interval;
    fn mul(self, o: &Interval) -> Interval {
        let c = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        let lo = c.iter().min().unwrap().clone();
        let hi = c.iter().max().unwrap().clone();
        Interval { lo, hi }
    }
}

/// Serialized form: decimal approximations plus the exact endpoints.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct IntervalJson {
    pub lo: f64,
    pub hi: f64,
    pub lo_exact: String,
    pub hi_exact: String,
}

impl From<&Interval> for IntervalJson {
    fn from(iv: &Interval) -> Self {
        // f64 views are rounded outward so they still enclose the value.
        let lo = num::to_f64(&iv.lo);
        let hi = num::to_f64(&iv.hi);
        let lo = if num::from_f64(lo).is_some_and(|q| q > iv.lo) {
            lo.next_down()
        } else {
            lo
        };
        let hi = if num::from_f64(hi).is_some_and(|q| q < iv.hi) {
            hi.next_up()
        } else {
            hi
        };
        IntervalJson {
            lo,
            hi,
            lo_exact: num::fmt_rational(&iv.lo),
            hi_exact: num::fmt_rational(&iv.hi),
        }
    }
}

impl TryFrom<&IntervalJson> for Interval {
    type Error = crate::error::Error;
    fn try_from(j: &IntervalJson) -> crate::error::Result<Self> {
        let lo = num::parse_rational(&j.lo_exact)?;
        let hi = num::parse_rational(&j.hi_exact)?;
        if lo > hi {
            return Err(crate::error::Error::Parse("interval endpoints out of order".into()));
        }
        Ok(Interval { lo, hi })
    }
}

/// Bounds `[lo, hi]` on `exp(x)` for rational `x`.
pub fn exp_bounds(x: &Q, bits: u32) -> (Q, Q) {
    if x.is_zero() {
        return (Q::one(), Q::one());
    }
    let (a, b) = (num::round_down(x, bits + 32), num::round_up(x, bits + 32));
    if a == b {
        return exp_exact_series(&a, bits);
    }
    (exp_exact_series(&a, bits).0, exp_exact_series(&b, bits).1)
}

fn exp_exact_series(x: &Q, bits: u32) -> (Q, Q) {
    // Range reduction: y = x / 2^k with |y| <= 1/2, then square k times.
    let mut k = 0u32;
    let half = num::rat(1, 2);
    let mut y = x.clone();
    while y.abs() > half {
        y /= num::rat(2, 1);
        k += 1;
    }
    let work = bits + k + 16;
    // Fixed point with `grid` fractional bits. Since |y| < 1 old truncation
    // errors shrink, so every term is within two grid steps of the truth.
    let grid = work + 16;
    let one = BigInt::one() << grid;
    let yf = to_fixed(&y, grid);
    let tol = BigInt::one() << (grid - work);
    let mut sum = BigInt::zero();
    let mut term = one;
    let mut i: u64 = 0;
    // For |y| <= 1/2 the tail after the current term is at most 2 |term|.
    while term.abs() * 2 >= tol {
        sum += &term;
        i += 1;
        term = ((&term * &yf) >> grid) / i;
    }
    let err = term.abs() * 2 + BigInt::from(2 * (i + 2));
    let den = BigInt::one() << grid;
    let mut iv = Interval {
        lo: num::round_down(&Q::new(&sum - &err, den.clone()), work),
        hi: num::round_up(&Q::new(&sum + &err, den), work),
    };
    for _ in 0..k {
        iv = (&iv * &iv).rounded(work);
    }
    (iv.lo, iv.hi)
}

/// `x` truncated toward zero to a multiple of `2^-w`, as an integer count of
/// `2^-w` steps.
fn to_fixed(x: &Q, w: u32) -> BigInt {
    (x.numer() << w) / x.denom()
}

fn atanh_series(z: &Q, work: u32) -> (Q, Q) {
    // atanh(z) = sum z^(2i+1)/(2i+1) for 0 <= z <= 1/3;
    // tail after N terms <= z^(2N+1) / ((2N+1)(1 - z^2)).
    // Everything is truncated down in fixed point, so the partial sum is a
    // lower bound and each term is low by less than three grid steps.
    assert!(!z.is_negative());
    let grid = work + 16;
    let zf = to_fixed(z, grid + 8);
    let z2 = (&zf * &zf) >> (grid + 8);
    let mut pow = zf >> 8;
    let mut sum = BigInt::zero();
    let mut i: u64 = 0;
    let tol = BigInt::one() << (grid - work);
    loop {
        sum += &pow / (2 * i + 1);
        pow = (&pow * &z2) >> (grid + 8);
        i += 1;
        if pow < tol {
            break;
        }
    }
    let den = BigInt::one() << grid;
    let pow_q = Q::new(pow, den.clone());
    let z2_q = z * z;
    let tail = &pow_q / (num::rat(2 * i as i64 + 1, 1) * (Q::one() - &z2_q));
    let err = Q::new(BigInt::from(4 * i + 8), den.clone());
    let sum = Q::new(sum, den);
    (num::round_down(&sum, work), num::round_up(&(sum + tail + err), work))
}

/// Bounds on `ln 2`.
pub fn ln2_bounds(bits: u32) -> (Q, Q) {
    let (lo, hi) = atanh_series(&num::rat(1, 3), bits + 8);
    (lo * num::rat(2, 1), hi * num::rat(2, 1))
}

/// Bounds `[lo, hi]` on `ln(x)` for rational `x > 0`.
pub fn ln_bounds(x: &Q, bits: u32) -> (Q, Q) {
    assert!(x.is_positive());
    if x.is_one() {
        return (Q::zero(), Q::zero());
    }
    let (a, b) = (num::round_down(x, bits + 32), num::round_up(x, bits + 32));
    if a == b {
        return ln_exact_series(&a, bits);
    }
    (ln_exact_series(&a, bits).0, ln_exact_series(&b, bits).1)
}

fn ln_exact_series(x: &Q, bits: u32) -> (Q, Q) {
    if x.is_one() {
        return (Q::zero(), Q::zero());
    }
    // x = 2^e * y with 1 <= y < 2
    let mut e: i64 = x.numer().bits() as i64 - x.denom().bits() as i64;
    let mut y = x * num::pow2(-e);
    while y >= num::rat(2, 1) {
        y /= num::rat(2, 1);
        e += 1;
    }
    while y < Q::one() {
        y *= num::rat(2, 1);
        e -= 1;
    }
    let work = bits + 16;
    let z = (&y - Q::one()) / (&y + Q::one());
    let (alo, ahi) = atanh_series(&z, work);
    let ly = Interval::new(alo * num::rat(2, 1), ahi * num::rat(2, 1));
    let (l2lo, l2hi) = ln2_bounds(work);
    let l2 = Interval::new(l2lo, l2hi).scale(&num::rat(e, 1));
    let r = (&ly + &l2).rounded(work);
    (r.lo, r.hi)
}

fn atan_recip_series(k: i64, work: u32) -> (Q, Q) {
    // atan(1/k) alternating series; error bounded by the first omitted term.
    let z = num::rat(1, k);
    let z2 = &z * &z;
    let mut pow = z.clone();
    let mut sum = Q::zero();
    let mut i: i64 = 0;
    let tol = num::pow2(-(work as i64));
    loop {
        let t = &pow / num::rat(2 * i + 1, 1);
        if i % 2 == 0 {
            sum += t;
        } else {
            sum -= t;
        }
        pow = &pow * &z2;
        i += 1;
        if &pow / num::rat(2 * i + 1, 1) < tol {
            break;
        }
    }
    let next = &pow / num::rat(2 * i + 1, 1);
    (&sum - &next, &sum + &next)
}

/// Bounds on pi via Machin's formula.
pub fn pi_bounds(bits: u32) -> Interval {
    let work = bits + 8;
    let (a_lo, a_hi) = atan_recip_series(5, work);
    let (b_lo, b_hi) = atan_recip_series(239, work);
    let a = Interval::new(a_lo, a_hi).scale(&num::rat(16, 1));
    let b = Interval::new(b_lo, b_hi).scale(&num::rat(4, 1));
    (&a - &b).rounded(work)
}
