//! Exact sums of square roots, `sum_i q_i * sqrt(r_i)` with rational `q_i`
//! and squarefree integer radicands `r_i`.
//!
//! Square roots of distinct squarefree integers are linearly independent
//! over Q, so the canonical form decides equality exactly. Polytope volumes
//! and facet measures inside rational subspaces all live in this set.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalJson};
use crate::num::{self, Q, Z};

const TRIAL_DIVISION_LIMIT: u64 = 2_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Surd {
    terms: BTreeMap<Z, Q>,
    /// False when some radicand could not be certified squarefree.
    canonical: bool,
}

impl Surd {
    pub fn zero() -> Self {
        Surd {
            terms: BTreeMap::new(),
            canonical: true,
        }
    }

    pub fn rational(q: Q) -> Self {
        let mut s = Surd::zero();
        s.push(BigInt::one(), q);
        s
    }

    pub fn from_int(v: i64) -> Self {
        Self::rational(num::rat(v, 1))
    }

    /// `sqrt(q)` for rational `q >= 0`.
    pub fn sqrt(q: &Q) -> Self {
        assert!(!q.is_negative(), "sqrt of negative rational");
        if q.is_zero() {
            return Surd::zero();
        }
        let nd = q.numer() * q.denom();
        let (f, r, ok) = num::square_part(&nd, TRIAL_DIVISION_LIMIT);
        let mut s = Surd::zero();
        s.canonical = ok;
        s.push(r, Q::new(f, q.denom().clone()));
        s
    }

    fn push(&mut self, radicand: Z, coef: Q) {
        if coef.is_zero() {
            return;
        }
        let e = self.terms.entry(radicand).or_insert_with(Q::zero);
        *e += coef;
        if e.is_zero() {
            self.terms.retain(|_, c| !c.is_zero());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical
    }

    /// The value as a rational, when it has no irrational part.
    pub fn as_rational(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => self.terms.get(&BigInt::one()).cloned(),
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Z, &Q)> {
        self.terms.iter()
    }

    pub fn scale(&self, k: &Q) -> Surd {
        let mut out = Surd::zero();
        out.canonical = self.canonical;
        for (r, c) in &self.terms {
            out.push(r.clone(), c * k);
        }
        out
    }

    pub fn add(&self, other: &Surd) -> Surd {
        let mut out = self.clone();
        out.canonical &= other.canonical;
        for (r, c) in &other.terms {
            out.push(r.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Surd) -> Surd {
        self.add(&other.scale(&-Q::one()))
    }

    pub fn mul(&self, other: &Surd) -> Surd {
        let mut out = Surd::zero();
        out.canonical = self.canonical && other.canonical;
        for (r1, c1) in &self.terms {
            for (r2, c2) in &other.terms {
                let prod = r1 * r2;
                let (f, r, ok) = num::square_part(&prod, TRIAL_DIVISION_LIMIT);
                out.canonical &= ok;
                out.push(r, c1 * c2 * Q::from_integer(f));
            }
        }
        out
    }

    /// Division by a single-term surd `q * sqrt(r)`.
    pub fn div(&self, other: &Surd) -> Result<Surd> {
        if other.terms.len() != 1 {
            return Err(Error::InvalidParameter(
                "division only supported by single-term surds".into(),
            ));
        }
        let (r, c) = other.terms.iter().next().unwrap();
        // 1 / (c sqrt r) = sqrt(r) / (c r)
        let inv = {
            let mut s = Surd::zero();
            s.canonical = other.canonical;
            s.push(r.clone(), (Q::from_integer(r.clone()) * c).recip());
            s
        };
        Ok(self.mul(&inv))
    }

    /// Certified enclosure with roughly `bits` bits of absolute precision.
    pub fn enclose(&self, bits: u32) -> Interval {
        let mut acc = Interval::from_int(0);
        for (r, c) in &self.terms {
            let root = Interval::point(Q::from_integer(r.clone())).sqrt(bits + 8);
            acc = &acc + &root.scale(c);
        }
        acc
    }

    /// Exact sign; `None` only when the form is not certified canonical and
    /// the value cannot be separated from zero at high precision.
    pub fn signum(&self) -> Option<Ordering> {
        if self.terms.is_empty() {
            return Some(Ordering::Equal);
        }
        let mut bits = 64;
        loop {
            let iv = self.enclose(bits);
            if iv.lo().is_positive() {
                return Some(Ordering::Greater);
            }
            if iv.hi().is_negative() {
                return Some(Ordering::Less);
            }
            if bits >= 4096 {
                return None;
            }
            bits *= 2;
        }
    }

    pub fn cmp_exact(&self, other: &Surd) -> Option<Ordering> {
        self.sub(other).signum()
    }

    pub fn le(&self, other: &Surd) -> bool {
        matches!(self.cmp_exact(other), Some(Ordering::Less | Ordering::Equal))
    }

    pub fn lt(&self, other: &Surd) -> bool {
        matches!(self.cmp_exact(other), Some(Ordering::Less))
    }

    pub fn to_f64(&self) -> f64 {
        self.enclose(64).mid_f64()
    }

    pub fn to_json(&self, bits: u32) -> SurdJson {
        SurdJson {
            exact: self.to_string(),
            terms: self
                .terms
                .iter()
                .map(|(r, c)| SurdTermJson {
                    coef: num::fmt_rational(c),
                    radicand: r.to_string(),
                })
                .collect(),
            interval: IntervalJson::from(&self.enclose(bits)),
            approx: self.to_f64(),
        }
    }

    pub fn from_json(j: &SurdJson) -> Result<Surd> {
        let mut s = Surd::zero();
        for t in &j.terms {
            let r = num::parse_integer(&t.radicand)?;
            if !r.is_positive() {
                return Err(Error::Parse("radicand must be positive".into()));
            }
            let c = num::parse_rational(&t.coef)?;
            s = s.add(&Surd::sqrt(&Q::from_integer(r)).scale(&c));
        }
        Ok(s)
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (r, c) in &self.terms {
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            if r.is_one() {
                write!(f, "{}", num::fmt_rational(&a))?;
            } else if a.is_one() {
                write!(f, "sqrt({r})")?;
            } else if a.numer().is_one() {
                write!(f, "sqrt({r})/{}", a.denom())?;
            } else if a.is_integer() {
                write!(f, "{}*sqrt({r})", a.numer())?;
            } else {
                write!(f, "{}*sqrt({r})/{}", a.numer(), a.denom())?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SurdTermJson {
    pub coef: String,
    pub radicand: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SurdJson {
    pub exact: String,
    pub terms: Vec<SurdTermJson>,
    pub interval: IntervalJson,
    pub approx: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;

    #[test]
    fn canonical_forms_decide_equality() {
        let a = Surd::sqrt(&rat(8, 1));
        let b = Surd::sqrt(&rat(2, 1)).scale(&rat(2, 1));
        assert_eq!(a, b);
        let half = Surd::sqrt(&rat(1, 2));
        assert_eq!(half.to_string(), "sqrt(2)/2");
        let six_root2 = Surd::sqrt(&rat(2, 1)).scale(&rat(6, 1));
        let sum = Surd::sqrt(&rat(2, 1))
            .scale(&rat(2, 1))
            .add(&Surd::sqrt(&rat(2, 1)).scale(&rat(4, 1)));
        assert_eq!(sum, six_root2);
        assert_eq!(six_root2.to_string(), "6*sqrt(2)");
    }

    #[test]
    fn products_and_quotients() {
        let r2 = Surd::sqrt(&rat(2, 1));
        assert_eq!(r2.mul(&r2).as_rational(), Some(rat(2, 1)));
        let r6 = Surd::sqrt(&rat(6, 1));
        let r3 = Surd::sqrt(&rat(3, 1));
        assert_eq!(r6.div(&r3).unwrap(), r2);
        let mixed = Surd::from_int(1).add(&r2);
        assert!(Surd::from_int(1).div(&mixed).is_err());
    }

    #[test]
    fn signs_are_exact() {
        // sqrt(2) + sqrt(3) vs sqrt(10): 3.146 > 3.162? no, less.
        let lhs = Surd::sqrt(&rat(2, 1)).add(&Surd::sqrt(&rat(3, 1)));
        let rhs = Surd::sqrt(&rat(10, 1));
        assert_eq!(lhs.cmp_exact(&rhs), Some(Ordering::Less));
        let eq = Surd::sqrt(&rat(18, 1)).sub(&Surd::sqrt(&rat(2, 1)).scale(&rat(3, 1)));
        assert_eq!(eq.signum(), Some(Ordering::Equal));
    }

    #[test]
    fn json_roundtrip() {
        let s = Surd::sqrt(&rat(2, 1)).scale(&rat(6, 1)).add(&Surd::from_int(1));
        let j = s.to_json(64);
        assert_eq!(Surd::from_json(&j).unwrap(), s);
        assert!(j.interval.lo <= 9.485281375 && j.interval.hi >= 9.485281374);
    }
}
