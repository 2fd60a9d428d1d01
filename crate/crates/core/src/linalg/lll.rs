use num_traits::{Signed, Zero};

use crate::num::{self, Q};

use super::matrix::dot;

/// Gram-Schmidt data: `mu[i][j]` for `j < i` and squared norms of `b_i*`.
pub fn gram_schmidt(basis: &[Vec<Q>]) -> (Vec<Vec<Q>>, Vec<Q>) {
    let n = basis.len();
    let mut mu = vec![vec![Q::zero(); n]; n];
    let mut bstar: Vec<Vec<Q>> = Vec::with_capacity(n);
    let mut norms = Vec::with_capacity(n);
    for i in 0..n {
        let mut v = basis[i].clone();
        for j in 0..i {
            let m = dot(&basis[i], &bstar[j]) / &norms[j];
            for (x, y) in v.iter_mut().zip(&bstar[j]) {
                *x -= &m * y;
            }
            mu[i][j] = m;
        }
        norms.push(dot(&v, &v));
        bstar.push(v);
    }
    (mu, norms)
}

fn round(q: &Q) -> Q {
    let h = Q::new(1.into(), 2.into());
    Q::from_integer(num::floor(&(q + h)))
}

fn size_reduce(basis: &mut [Vec<Q>], mu: &mut [Vec<Q>], k: usize, l: usize) {
    let half = Q::new(1.into(), 2.into());
    if mu[k][l].abs() <= half {
        return;
    }
    let q = round(&mu[k][l]);
    let bl = basis[l].clone();
    for (x, y) in basis[k].iter_mut().zip(&bl) {
        *x -= &q * y;
    }
    for j in 0..l {
        let v = &q * &mu[l][j];
        mu[k][j] -= v;
    }
    mu[k][l] -= &q;
}

/// In-place LLL reduction (delta = 3/4) of linearly independent vectors.
pub fn lll_reduce(basis: &mut [Vec<Q>]) {
    let n = basis.len();
    if n < 2 {
        return;
    }
    let delta = Q::new(3.into(), 4.into());
    let (mut mu, mut b) = gram_schmidt(basis);
    let mut k = 1;
    while k < n {
        size_reduce(basis, &mut mu, k, k - 1);
        let lhs = b[k].clone();
        let rhs = (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * &b[k - 1];
        if lhs < rhs {
            let m = mu[k][k - 1].clone();
            let big_b = &b[k] + &m * &m * &b[k - 1];
            mu[k][k - 1] = &m * &b[k - 1] / &big_b;
            b[k] = &b[k - 1] * &b[k] / &big_b;
            b[k - 1] = big_b;
            basis.swap(k, k - 1);
            for j in 0..k - 1 {
                let t = mu[k][j].clone();
                mu[k][j] = mu[k - 1][j].clone();
                mu[k - 1][j] = t;
            }
            for i in k + 1..n {
                let t = mu[i][k].clone();
                mu[i][k] = &mu[i][k - 1] - &m * &t;
                mu[i][k - 1] = t + &mu[k][k - 1] * &mu[i][k];
            }
            k = (k - 1).max(1);
        } else {
            for l in (0..k - 1).rev() {
                size_reduce(basis, &mut mu, k, l);
            }
            k += 1;
        }
    }
}
