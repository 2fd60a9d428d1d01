//! Exact linear algebra over Z, Q and GF(2).

mod gf2;
mod lll;
mod matrix;
mod norm;

pub use gf2::BitVec;
pub use lll::{gram_schmidt, lll_reduce};
pub use matrix::{dot, norm_sq, IntegerMatrix, Matrix, MatrixJson, RationalMatrix};
pub use norm::{
    completion_norm_check, operator_norm_rayleigh, operator_norm_upper, CompletionNormCheck, NormCertificate,
    NormMethod,
};

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::{Q, Z};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Field {
    Q,
    GF2,
}

/// Reduced row echelon form; returns the matrix and its pivot columns.
pub fn rref(m: &RationalMatrix) -> (RationalMatrix, Vec<usize>) {
    let mut a = m.to_rows();
    let rows = m.rows();
    let cols = m.cols();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for v in a[r].iter_mut() {
            *v *= &inv;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let out = if rows == 0 {
        RationalMatrix::zeros(0, cols)
    } else {
        Matrix::from_rows(a).expect("shape preserved")
    };
    (out, pivots)
}

pub fn rank_rational(m: &RationalMatrix) -> usize {
    rref(m).1.len()
}

/// Rank over Q via fraction-free (Bareiss) elimination.
pub fn rank_over_rationals(m: &IntegerMatrix) -> usize {
    let mut a = m.to_rows();
    let rows = m.rows();
    let cols = m.cols();
    let mut prev = Z::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = (&a[r][c] * &a[i][j] - &a[i][c] * &a[r][j]) / &prev;
                a[i][j] = v;
            }
            a[i][c] = Z::zero();
        }
        prev = a[r][c].clone();
        r += 1;
    }
    r
}

/// Determinant of a square integer matrix (Bareiss).
pub fn det_integer(m: &IntegerMatrix) -> Result<Z> {
    if m.rows() != m.cols() {
        return Err(Error::Dimension("determinant of non-square matrix".into()));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(Z::one());
    }
    let mut a = m.to_rows();
    let mut prev = Z::one();
    let mut sign = Z::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Ok(Z::zero());
        };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[k][k] * &a[i][j] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    Ok(sign * &a[n - 1][n - 1])
}

/// Determinant of a square rational matrix.
pub fn det_rational(m: &RationalMatrix) -> Result<Q> {
    if m.rows() != m.cols() {
        return Err(Error::Dimension("determinant of non-square matrix".into()));
    }
    let n = m.rows();
    let mut a = m.to_rows();
    let mut det = Q::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Ok(Q::zero());
        };
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        det *= &a[k][k];
        let inv = a[k][k].recip();
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] * &inv;
            for j in k..n {
                let v = &a[k][j] * &f;
                a[i][j] -= v;
            }
        }
    }
    Ok(det)
}

pub fn inverse(m: &RationalMatrix) -> Result<RationalMatrix> {
    let n = m.rows();
    if n != m.cols() {
        return Err(Error::Dimension("inverse of non-square matrix".into()));
    }
    let mut aug = RationalMatrix::zeros(n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            aug.set(i, j, m.get(i, j).clone());
        }
        aug.set(i, n + i, Q::one());
    }
    let (r, piv) = rref(&aug);
    if piv.len() < n || piv[n - 1] >= n {
        return Err(Error::RankDeficient {
            rank: piv.iter().filter(|&&p| p < n).count(),
            expected: n,
        });
    }
    let idx: Vec<usize> = (n..2 * n).collect();
    Ok(r.select_cols(&idx))
}

/// Solve `a x = b`; `None` when inconsistent. Free variables are set to 0.
pub fn solve(a: &RationalMatrix, b: &[Q]) -> Option<Vec<Q>> {
    let n = a.cols();
    let mut aug = RationalMatrix::zeros(a.rows(), n + 1);
    for i in 0..a.rows() {
        for j in 0..n {
            aug.set(i, j, a.get(i, j).clone());
        }
        aug.set(i, n, b[i].clone());
    }
    let (r, piv) = rref(&aug);
    if piv.last() == Some(&n) {
        return None;
    }
    let mut x = vec![Q::zero(); n];
    for (i, &p) in piv.iter().enumerate() {
        x[p] = r.get(i, n).clone();
    }
    Some(x)
}

/// Basis of the rational null space `{x : m x = 0}`.
pub fn rational_kernel(m: &RationalMatrix) -> Vec<Vec<Q>> {
    let n = m.cols();
    let (r, piv) = rref(m);
    let free: Vec<usize> = (0..n).filter(|j| !piv.contains(j)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Q::zero(); n];
            v[f] = Q::one();
            for (i, &p) in piv.iter().enumerate() {
                v[p] = -r.get(i, f).clone();
            }
            v
        })
        .collect()
}

/// Gram matrix `Mᵀ M` of the columns of `m`.
pub fn gram(m: &RationalMatrix) -> RationalMatrix {
    m.transpose().matmul(m).expect("compatible shapes")
}

pub fn rank_over_gf2(m: &IntegerMatrix) -> usize {
    let rows: Vec<BitVec> = (0..m.rows()).map(|i| BitVec::from_parity(m.row(i))).collect();
    gf2::rank(rows)
}

/// Whether the columns of `m` indexed by `s` are linearly independent.
pub fn columns_independent(m: &IntegerMatrix, s: &[usize], field: Field) -> Result<bool> {
    if let Some(&bad) = s.iter().find(|&&j| j >= m.cols()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            len: m.cols(),
        });
    }
    if s.len() > m.rows() {
        return Ok(false);
    }
    let sub = m.select_cols(s);
    Ok(match field {
        Field::Q => rank_over_rationals(&sub) == s.len(),
        Field::GF2 => {
            let cols: Vec<BitVec> = (0..s.len()).map(|j| BitVec::from_parity(&sub.col(j))).collect();
            gf2::rank(cols) == s.len()
        }
    })
}

/// Result of completing a matrix to full row rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Completion {
    pub b: IntegerMatrix,
    /// `row_perm[i]` is the row of `A` moved to position `i`; the first
    /// `rank` entries are the rows kept in `B`.
    pub row_perm: Vec<usize>,
    /// Column order in which the appended unit vectors come last among
    /// the first `m` positions. `B` itself keeps the original column order.
    pub col_perm: Vec<usize>,
    pub rank: usize,
    /// Indices `j` of the unit rows `e_j` appended to `B`.
    pub unit_rows: Vec<usize>,
}

/// Replace dependent rows of `A` by unit vectors so the result has full row rank.
///
/// Keeps a maximal independent set of rows of `A` (greedy, in order) and
/// appends `e_j` for the smallest indices `j` that keep the rows independent.
/// Any set of columns independent in `A` stays independent in `B`.
pub fn complete_to_full_rank(a: &IntegerMatrix) -> Result<Completion> {
    let m = a.rows();
    let n = a.cols();
    if m == 0 || m > n {
        return Err(Error::Dimension(format!(
            "rank completion needs 1 <= m <= n, got {m}x{n}"
        )));
    }
    let mut basis = Echelon::new(n);
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for i in 0..m {
        let row: Vec<Q> = a.row(i).iter().map(|v| Q::from_integer(v.clone())).collect();
        if basis.insert(row) {
            kept.push(i);
        } else {
            dropped.push(i);
        }
    }
    let rank = kept.len();
    let mut unit_rows = Vec::new();
    for j in 0..n {
        if unit_rows.len() == m - rank {
            break;
        }
        let mut e = vec![Q::zero(); n];
        e[j] = Q::one();
        if basis.insert(e) {
            unit_rows.push(j);
        }
    }
    let mut rows: Vec<Vec<Z>> = kept.iter().map(|&i| a.row_vec(i)).collect();
    for &j in &unit_rows {
        let mut e = vec![Z::zero(); n];
        e[j] = Z::one();
        rows.push(e);
    }
    let row_perm: Vec<usize> = kept.iter().chain(&dropped).copied().collect();
    let mut col_perm: Vec<usize> = (0..n).filter(|j| !unit_rows.contains(j)).collect();
    let tail = col_perm.split_off(rank.min(col_perm.len()));
    col_perm.extend(unit_rows.iter().copied());
    col_perm.extend(tail);
    Ok(Completion {
        b: Matrix::from_rows(rows)?,
        row_perm,
        col_perm,
        rank,
        unit_rows,
    })
}

/// Incremental echelon basis used for greedy independence tests.
struct Echelon {
    rows: Vec<(usize, Vec<Q>)>,
}

impl Echelon {
    fn new(_n: usize) -> Self {
        Echelon { rows: Vec::new() }
    }

    fn insert(&mut self, mut v: Vec<Q>) -> bool {
        for (p, r) in &self.rows {
            if !v[*p].is_zero() {
                let f = v[*p].clone() / &r[*p];
                for (x, y) in v.iter_mut().zip(r) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        match v.iter().position(|x| !x.is_zero()) {
            Some(p) => {
                self.rows.push((p, v));
                true
            }
            None => false,
        }
    }
}

/// Column-style Hermite reduction: returns `(H, U)` with `B U = H`, `U`
/// unimodular and `H` lower-echelon (each row's pivot strictly to the right
/// of the previous one). Columns of `U` past the pivot count span the
/// integer kernel.
pub fn column_hermite(b: &IntegerMatrix) -> (IntegerMatrix, IntegerMatrix, usize) {
    let m = b.rows();
    let n = b.cols();
    let mut cols: Vec<Vec<Z>> = b.to_cols();
    let mut u: Vec<Vec<Z>> = IntegerMatrix::identity(n).to_cols();
    let mut k = 0;
    for i in 0..m {
        if k == n {
            break;
        }
        loop {
            // smallest nonzero |entry| in row i among columns k..
            let best = (k..n)
                .filter(|&j| !cols[j][i].is_zero())
                .min_by(|&x, &y| cols[x][i].abs().cmp(&cols[y][i].abs()));
            let Some(p) = best else { break };
            cols.swap(k, p);
            u.swap(k, p);
            let mut done = true;
            for j in k + 1..n {
                if cols[j][i].is_zero() {
                    continue;
                }
                let q = cols[j][i].div_floor(&cols[k][i]);
                axpy(&mut cols, j, k, &q);
                axpy(&mut u, j, k, &q);
                if !cols[j][i].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if k < n && !cols[k][i].is_zero() {
            if cols[k][i].is_negative() {
                for x in cols[k].iter_mut().chain(u[k].iter_mut()) {
                    *x = -x.clone();
                }
            }
            k += 1;
        }
    }
    let h = Matrix::from_cols(m, &cols).expect("shape preserved");
    let uu = Matrix::from_cols(n, &u).expect("shape preserved");
    (h, uu, k)
}

/// `cols[j] -= q * cols[k]`
fn axpy(cols: &mut [Vec<Z>], j: usize, k: usize, q: &Z) {
    let (src, dst) = if j > k {
        let (a, b) = cols.split_at_mut(j);
        (&a[k], &mut b[0])
    } else {
        let (a, b) = cols.split_at_mut(k);
        (&b[0], &mut a[j])
    };
    for (d, s) in dst.iter_mut().zip(src) {
        if !s.is_zero() {
            *d -= q * s;
        }
    }
}

/// Largest dimension for which kernel bases are LLL-reduced.
const KERNEL_LLL_MAX: usize = 64;

/// Integer basis (as columns) of `{x in Z^n : B x = 0}` for `B` of full row rank.
pub fn integer_kernel_basis(b: &IntegerMatrix) -> Result<IntegerMatrix> {
    let m = b.rows();
    let n = b.cols();
    let rank = rank_over_rationals(b);
    if rank != m {
        return Err(Error::RankDeficient { rank, expected: m });
    }
    let (_, u, k) = column_hermite(b);
    debug_assert_eq!(k, m);
    let idx: Vec<usize> = (k..n).collect();
    let ker = u.select_cols(&idx);
    if ker.cols() == 0 || n > KERNEL_LLL_MAX {
        return Ok(ker);
    }
    let mut basis: Vec<Vec<Q>> = ker
        .to_cols()
        .into_iter()
        .map(|c| c.into_iter().map(Q::from_integer).collect())
        .collect();
    lll_reduce(&mut basis);
    let cols: Vec<Vec<Z>> = basis
        .into_iter()
        .map(|c| c.into_iter().map(|q| q.to_integer()).collect())
        .collect();
    Matrix::from_cols(n, &cols)
}

/// Basis (as columns) of the lattice generated by integer vectors `gens`
/// (columns of `g`), via column Hermite reduction.
pub fn integer_lattice_basis(g: &IntegerMatrix) -> IntegerMatrix {
    let (h, _, k) = column_hermite(g);
    let idx: Vec<usize> = (0..k).collect();
    h.select_cols(&idx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;

    #[test]
    fn ranks() {
        assert_eq!(rank_over_rationals(&IntegerMatrix::identity(2)), 2);
        assert_eq!(rank_over_rationals(&IntegerMatrix::zeros(3, 4)), 0);
        assert_eq!(rank_over_rationals(&IntegerMatrix::from_i64(&[&[1, 1], &[1, 1]])), 1);
        assert_eq!(rank_over_gf2(&IntegerMatrix::from_i64(&[&[1, 0], &[0, 1]])), 2);
        assert_eq!(rank_over_gf2(&IntegerMatrix::from_i64(&[&[1, 1], &[1, 1]])), 1);
        assert_eq!(rank_over_gf2(&IntegerMatrix::from_i64(&[&[2, 4], &[6, 8]])), 0);
        // full rank over Q, singular mod 2
        let m = IntegerMatrix::from_i64(&[&[1, 1], &[1, -1]]);
        assert_eq!(rank_over_rationals(&m), 2);
        assert_eq!(rank_over_gf2(&m), 1);
    }

    #[test]
    fn determinants_and_inverse() {
        let m = IntegerMatrix::from_i64(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(det_integer(&m).unwrap(), crate::num::int(18));
        let q = m.to_rational();
        assert_eq!(det_rational(&q).unwrap(), rat(18, 1));
        let inv = inverse(&q).unwrap();
        assert_eq!(q.matmul(&inv).unwrap(), RationalMatrix::identity(3));
        assert!(inverse(&IntegerMatrix::from_i64(&[&[1, 1], &[1, 1]]).to_rational()).is_err());
    }

    #[test]
    fn independence_checks() {
        let id = IntegerMatrix::identity(3);
        assert!(columns_independent(&id, &[0, 1, 2], Field::Q).unwrap());
        let dup = IntegerMatrix::from_i64(&[&[1, 1, 0], &[0, 0, 1]]);
        assert!(!columns_independent(&dup, &[0, 1], Field::GF2).unwrap());
        let even = IntegerMatrix::from_i64(&[&[2, 1], &[4, 0]]);
        assert!(!columns_independent(&even, &[0], Field::GF2).unwrap());
        assert!(columns_independent(&even, &[0], Field::Q).unwrap());
        assert!(matches!(
            columns_independent(&id, &[3], Field::Q),
            Err(Error::IndexOutOfRange { index: 3, len: 3 })
        ));
    }

    #[test]
    fn completion_examples() {
        let c = complete_to_full_rank(&IntegerMatrix::identity(2)).unwrap();
        assert_eq!(c.b, IntegerMatrix::identity(2));
        assert_eq!(c.row_perm, vec![0, 1]);
        assert_eq!(c.col_perm, vec![0, 1]);

        let c = complete_to_full_rank(&IntegerMatrix::from_i64(&[&[1, 1], &[1, 1]])).unwrap();
        assert_eq!(c.b, IntegerMatrix::from_i64(&[&[1, 1], &[1, 0]]));
        assert_eq!(rank_over_rationals(&c.b), 2);

        let c = complete_to_full_rank(&IntegerMatrix::from_i64(&[&[1, 0, 0], &[0, 0, 0]])).unwrap();
        assert_eq!(c.b, IntegerMatrix::from_i64(&[&[1, 0, 0], &[0, 1, 0]]));
        assert_eq!(c.unit_rows, vec![1]);
    }

    #[test]
    fn kernel_examples() {
        let b = IntegerMatrix::from_i64(&[&[1, 1, 0, 0], &[0, 0, 1, 1]]);
        let k = integer_kernel_basis(&b).unwrap();
        assert_eq!(k.cols(), 2);
        assert!(b.matmul(&k).unwrap().is_zero());
        let g = k.transpose().matmul(&k).unwrap();
        assert_eq!(det_integer(&g).unwrap(), crate::num::int(4));

        let k = integer_kernel_basis(&IntegerMatrix::from_i64(&[&[1, 0]])).unwrap();
        assert_eq!(
            k.col(0).iter().map(|v| v.abs()).collect::<Vec<_>>(),
            vec![crate::num::int(0), crate::num::int(1)]
        );

        let k = integer_kernel_basis(&IntegerMatrix::identity(3)).unwrap();
        assert_eq!(k.cols(), 0);

        assert!(integer_kernel_basis(&IntegerMatrix::from_i64(&[&[1, 2], &[2, 4]])).is_err());
    }

    #[test]
    fn kernel_is_saturated() {
        // 2x + 4y + 6z = 0 has kernel lattice of covolume |(1,2,3)|, not scaled by 2
        let b = IntegerMatrix::from_i64(&[&[2, 4, 6]]);
        let k = integer_kernel_basis(&b).unwrap();
        let g = k.transpose().matmul(&k).unwrap();
        assert_eq!(det_integer(&g).unwrap(), crate::num::int(14));
    }

    #[test]
    fn solve_and_kernel() {
        let a = RationalMatrix::from_ratios(&[&[(1, 1), (2, 1)], &[(2, 1), (4, 1)]]);
        assert!(solve(&a, &[rat(1, 1), rat(3, 1)]).is_none());
        let x = solve(&a, &[rat(1, 1), rat(2, 1)]).unwrap();
        assert_eq!(a.mul_vec(&x).unwrap(), vec![rat(1, 1), rat(2, 1)]);
        let k = rational_kernel(&a);
        assert_eq!(k.len(), 1);
        assert!(a.mul_vec(&k[0]).unwrap().iter().all(Zero::is_zero));
    }
}
