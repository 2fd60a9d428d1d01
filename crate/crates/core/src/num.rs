//! Scalar helpers over arbitrary-precision integers and rationals.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Z = BigInt;
pub type Q = BigRational;

pub fn int(v: i64) -> Z {
    BigInt::from(v)
}

pub fn rat(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn from_int(v: &Z) -> Q {
    Q::from_integer(v.clone())
}

pub fn floor(x: &Q) -> Z {
    x.floor().to_integer()
}

pub fn ceil(x: &Q) -> Z {
    x.ceil().to_integer()
}

/// `2^k` as a rational, `k` may be negative.
pub fn pow2(k: i64) -> Q {
    if k >= 0 {
        Q::from_integer(BigInt::one() << (k as usize))
    } else {
        Q::new(BigInt::one(), BigInt::one() << ((-k) as usize))
    }
}

/// Exact square root of a non-negative rational when it is rational.
pub fn rational_sqrt(x: &Q) -> Option<Q> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer();
    let d = x.denom();
    let rn = n.sqrt();
    let rd = d.sqrt();
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        Some(Q::new(rn, rd))
    } else {
        None
    }
}

/// Lower and upper rational bounds for `sqrt(x)` with absolute error at most `2^-bits`
/// (relative to the scale of `x`'s denominator).
pub fn sqrt_bounds(x: &Q, bits: u32) -> (Q, Q) {
    assert!(!x.is_negative(), "sqrt of negative rational");
    if let Some(r) = rational_sqrt(x) {
        return (r.clone(), r);
    }
    // Scale so that the integer square root carries `bits` fractional bits.
    let p = bits as usize + x.denom().bits() as usize / 2 + 1;
    let scale = BigInt::one() << (2 * p);
    let scaled = x * Q::from_integer(scale);
    let lo_arg = floor(&scaled);
    let hi_arg = ceil(&scaled);
    let lo = lo_arg.sqrt();
    let mut hi = hi_arg.sqrt();
    if &hi * &hi < hi_arg {
        hi += 1;
    }
    let den = BigInt::one() << p;
    (Q::new(lo, den.clone()), Q::new(hi, den))
}

/// Largest integer `k` with `k*k <= x` for rational `x >= 0`.
pub fn isqrt_floor(x: &Q) -> Z {
    floor(x).sqrt()
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Very large or tiny values: go through a shifted integer quotient.
        let n = x.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = x.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

pub fn from_f64(v: f64) -> Option<Q> {
    Q::from_float(v)
}

/// Round `x` down to a dyadic rational with `bits` bits of relative precision.
pub fn round_down(x: &Q, bits: u32) -> Q {
    round_dyadic(x, bits, false)
}

/// Round `x` up to a dyadic rational with `bits` bits of relative precision.
pub fn round_up(x: &Q, bits: u32) -> Q {
    round_dyadic(x, bits, true)
}

fn round_dyadic(x: &Q, bits: u32, up: bool) -> Q {
    if x.is_zero() || x.denom().bits() <= bits as u64 {
        return x.clone();
    }
    let mag = x.numer().bits() as i64 - x.denom().bits() as i64;
    let shift = bits as i64 - mag;
    let scaled = x * pow2(shift);
    let k = if up { ceil(&scaled) } else { floor(&scaled) };
    Q::from_integer(k) * pow2(-shift)
}

pub fn parse_rational(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => {
            let n: BigInt = s.parse().map_err(|_| bad())?;
            Ok(Q::from_integer(n))
        }
    }
}

pub fn parse_integer(s: &str) -> Result<Z> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("not an integer: {s:?}")))
}

pub fn fmt_rational(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// `x^e` by repeated squaring.
pub fn pow_q(x: &Q, mut e: u64) -> Q {
    let mut acc = Q::one();
    let mut b = x.clone();
    while e > 0 {
        if e & 1 == 1 {
            acc *= &b;
        }
        e >>= 1;
        if e > 0 {
            b = &b * &b;
        }
    }
    acc
}

pub fn factorial(n: u64) -> Z {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

pub fn binomial(n: u64, k: u64) -> Z {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Split `n > 0` into `(f, r)` with `n = f^2 * r` and `r` squarefree.
///
/// Trial division runs up to `min(cbrt(n), limit)`. The returned flag is
/// `true` when `r` is certified squarefree; for radicands too large to
/// finish trial division it may be `false`.
pub fn square_part(n: &Z, limit: u64) -> (Z, Z, bool) {
    assert!(n.sign() == Sign::Plus, "square_part of non-positive value");
    let mut rest = n.clone();
    let mut factor = BigInt::one();
    let mut radical = BigInt::one();
    let mut certified = true;
    let mut p: u64 = 2;
    loop {
        let pz = BigInt::from(p);
        if &pz * &pz * &pz > rest {
            break;
        }
        if p > limit {
            certified = false;
            break;
        }
        let mut e = 0u32;
        while rest.is_multiple_of(&pz) {
            rest /= &pz;
            e += 1;
        }
        for _ in 0..e / 2 {
            factor *= &pz;
        }
        if e % 2 == 1 {
            radical *= &pz;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    // `rest` has no prime factor below its cube root (unless we gave up), so
    // it is 1, a prime, a product of two distinct primes, or a prime square.
    let r = rest.sqrt();
    if &r * &r == rest {
        factor *= r;
    } else {
        radical *= rest;
    }
    (factor, radical, certified)
}
