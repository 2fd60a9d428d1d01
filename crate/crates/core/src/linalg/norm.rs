use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::num::{self, Q, Z};

use super::{Completion, IntegerMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormMethod {
    RowColProduct,
    RayleighInterval,
}

/// Certified bounds on the spectral norm `||M||`.
///
/// `squared_upper >= ||M||^2` always; `value_upper` is a rational with
/// `value_upper^2 >= squared_upper`. `squared_lower`, when present, is a
/// certified lower bound on `||M||^2` (a Rayleigh quotient).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormCertificate {
    pub method: NormMethod,
    pub squared_upper: Q,
    pub squared_lower: Option<Q>,
    pub value_upper: Q,
}

impl NormCertificate {
    fn from_squared(method: NormMethod, squared_upper: Q, squared_lower: Option<Q>) -> Self {
        let (_, hi) = num::sqrt_bounds(&squared_upper, 64);
        NormCertificate {
            method,
            squared_upper,
            squared_lower,
            value_upper: hi,
        }
    }
}

fn abs_sums(m: &IntegerMatrix) -> (Z, Z) {
    let row = (0..m.rows())
        .map(|i| m.row(i).iter().map(|v| v.abs()).sum::<Z>())
        .max()
        .unwrap_or_default();
    let col = (0..m.cols())
        .map(|j| (0..m.rows()).map(|i| m.get(i, j).abs()).sum::<Z>())
        .max()
        .unwrap_or_default();
    (row, col)
}

/// `||M||^2 <= (max row abs-sum) * (max column abs-sum)`, exact.
pub fn operator_norm_upper(m: &IntegerMatrix) -> NormCertificate {
    let (r, c) = abs_sums(m);
    NormCertificate::from_squared(NormMethod::RowColProduct, Q::from_integer(r * c), None)
}

const POWER_ITERS: usize = 300;
const SCALE_BITS: i32 = 40;

fn to_f64_rows(m: &IntegerMatrix) -> Vec<Vec<f64>> {
    m.to_rows()
        .iter()
        .map(|r| r.iter().map(|v| num::to_f64(&Q::from_integer(v.clone()))).collect())
        .collect()
}

fn mul(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    a.iter().map(|r| r.iter().zip(x).map(|(p, q)| p * q).sum()).collect()
}

fn mul_t(a: &[Vec<f64>], y: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for (r, yi) in a.iter().zip(y) {
        for (o, v) in out.iter_mut().zip(r) {
            *o += v * yi;
        }
    }
    out
}

fn normalize(v: &mut [f64]) -> bool {
    let s = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if s == 0.0 || !s.is_finite() {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= s);
    true
}

fn integerize(v: &[f64], floor_one: bool) -> Vec<Z> {
    let scale = 2f64.powi(SCALE_BITS);
    v.iter()
        .map(|x| {
            let k = (x * scale).round() as i64;
            BigInt::from(if floor_one { k.max(1) } else { k })
        })
        .collect()
}

fn imul(m: &[Vec<Z>], x: &[Z]) -> Vec<Z> {
    m.iter()
        .map(|r| r.iter().zip(x).filter(|(a, _)| !a.is_zero()).map(|(a, b)| a * b).sum())
        .collect()
}

fn imul_t(m: &[Vec<Z>], y: &[Z], n: usize) -> Vec<Z> {
    let mut out = vec![Z::zero(); n];
    for (r, yi) in m.iter().zip(y) {
        if yi.is_zero() {
            continue;
        }
        for (o, v) in out.iter_mut().zip(r) {
            if !v.is_zero() {
                *o += v * yi;
            }
        }
    }
    out
}

/// Certified two-sided bounds on `||M||^2` from floating power iteration.
///
/// The floats only pick test vectors; the bounds themselves are exact:
/// the lower bound is the Rayleigh quotient `|Mv|^2/|v|^2` of an integer
/// vector, the upper bound is the Collatz-Wielandt bound
/// `max_i (N x)_i / x_i >= lambda_max(N)` for `N = |M||M|^T` and a positive
/// integer vector `x`, and `||M|| <= || |M| ||`. The upper bound is also
/// capped by the row-column product.
pub fn operator_norm_rayleigh(m: &IntegerMatrix) -> NormCertificate {
    let rows = m.rows();
    let cols = m.cols();
    let rowcol = operator_norm_upper(m).squared_upper;
    if m.is_zero() {
        return NormCertificate::from_squared(NormMethod::RayleighInterval, Q::zero(), Some(Q::zero()));
    }
    let f = to_f64_rows(m);
    let fabs: Vec<Vec<f64>> = f.iter().map(|r| r.iter().map(|v| v.abs()).collect()).collect();

    // lower bound: power iteration on M^T M
    let mut v: Vec<f64> = (0..cols).map(|j| 1.0 + (j as f64) * 1e-3).collect();
    for _ in 0..POWER_ITERS {
        let mut w = mul_t(&f, &mul(&f, &v), cols);
        if !normalize(&mut w) {
            break;
        }
        v = w;
    }
    let mi = m.to_rows();
    let vi = integerize(&v, false);
    let vv: Z = vi.iter().map(|x| x * x).sum();
    let lower = if vv.is_zero() {
        Q::zero()
    } else {
        let mv = imul(&mi, &vi);
        let num_: Z = mv.iter().map(|x| x * x).sum();
        Q::new(num_, vv)
    };

    // upper bound: Collatz-Wielandt on |M||M|^T
    let mut x = vec![1.0; rows];
    for _ in 0..POWER_ITERS {
        let mut w = mul(&fabs, &mul_t(&fabs, &x, cols));
        if !normalize(&mut w) {
            break;
        }
        x = w;
    }
    let absi: Vec<Vec<Z>> = mi.iter().map(|r| r.iter().map(|v| v.abs()).collect()).collect();
    let mut xi = integerize(&x, true);
    // a couple of exact iterations smooth out the clamped entries
    for _ in 0..2 {
        let next = imul(&absi, &imul_t(&absi, &xi, cols));
        if next.iter().all(|v| v.is_positive()) {
            xi = next;
        } else {
            break;
        }
    }
    let nx = imul(&absi, &imul_t(&absi, &xi, cols));
    let cw = nx
        .iter()
        .zip(&xi)
        .map(|(a, b)| Q::new(a.clone(), b.clone()))
        .max()
        .unwrap_or_default();
    let upper = if cw < rowcol { cw } else { rowcol };
    NormCertificate::from_squared(NormMethod::RayleighInterval, upper, Some(lower))
}

/// Evidence that `||B||^2 <= 1 + ||A||^2` for a completed matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompletionNormCheck {
    pub a_squared_lower: Q,
    pub b_squared_upper: Q,
    /// `b_squared_upper <= 1 + a_squared_lower`, exact comparison.
    pub numeric_pass: bool,
    /// Rows of `B` are distinct rows of `A` plus distinct unit vectors, so
    /// `A^T A + I - B^T B` is a sum of rank-one PSD terms.
    pub structural_pass: bool,
}

pub fn completion_norm_check(a: &IntegerMatrix, c: &Completion) -> CompletionNormCheck {
    let na = operator_norm_rayleigh(a);
    let nb = operator_norm_rayleigh(&c.b);
    let a_lo = na.squared_lower.unwrap_or_default();
    let numeric_pass = nb.squared_upper <= &a_lo + Q::from_integer(1.into());

    let n = a.cols();
    let mut structural = c.b.rows() == a.rows() && c.rank + c.unit_rows.len() == a.rows();
    if structural {
        for (pos, &src) in c.row_perm.iter().take(c.rank).enumerate() {
            structural &= c.b.row(pos) == a.row(src);
        }
        let mut seen = vec![false; n];
        for (k, &j) in c.unit_rows.iter().enumerate() {
            structural &= j < n && !seen[j];
            if j < n {
                seen[j] = true;
                let row = c.b.row(c.rank + k);
                structural &= row
                    .iter()
                    .enumerate()
                    .all(|(t, v)| if t == j { v == &Z::from(1) } else { v.is_zero() });
            }
        }
    }
    CompletionNormCheck {
        a_squared_lower: a_lo,
        b_squared_upper: nb.squared_upper,
        numeric_pass,
        structural_pass: structural,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;

    #[test]
    fn identity_and_ones() {
        let id = IntegerMatrix::identity(4);
        assert_eq!(operator_norm_upper(&id).value_upper, rat(1, 1));
        let r = operator_norm_rayleigh(&id);
        assert_eq!(r.squared_upper, rat(1, 1));
        assert_eq!(r.squared_lower, Some(rat(1, 1)));
        let ones = IntegerMatrix::from_i64(&[&[1, 1], &[1, 1]]);
        assert_eq!(operator_norm_upper(&ones).value_upper, rat(2, 1));
        let r = operator_norm_rayleigh(&ones);
        assert!(r.squared_lower.unwrap() <= rat(4, 1));
        assert!(r.squared_upper >= rat(4, 1));
    }

    #[test]
    fn rayleigh_brackets_known_value() {
        // [[2,1],[1,2]] has norm 3
        let m = IntegerMatrix::from_i64(&[&[2, 1], &[1, 2]]);
        let r = operator_norm_rayleigh(&m);
        let lo = r.squared_lower.unwrap();
        assert!(lo <= rat(9, 1) && r.squared_upper >= rat(9, 1));
        assert!(num::to_f64(&(&r.squared_upper - &lo)) < 1e-6);
    }

    #[test]
    fn signed_entries() {
        // norm of [[1,-1],[1,1]] is sqrt 2; |M| has norm 2
        let m = IntegerMatrix::from_i64(&[&[1, -1], &[1, 1]]);
        let r = operator_norm_rayleigh(&m);
        assert!(r.squared_lower.unwrap() <= rat(2, 1));
        assert!(r.squared_upper >= rat(2, 1));
    }
}
