//! Lattices and subspaces of Q^n.

pub mod enumerate;

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    self, dot, integer_kernel_basis, integer_lattice_basis, lll_reduce, IntegerMatrix, Matrix, RationalMatrix,
};
use crate::num::{self, Q, Z};
use crate::surd::Surd;

pub use enumerate::DEFAULT_BUDGET;

/// Linear subspace of Q^n spanned by the columns of `basis`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient_dim: usize,
    basis: RationalMatrix,
}

impl Subspace {
    pub fn new(basis: RationalMatrix) -> Result<Self> {
        let k = basis.cols();
        let rank = linalg::rank_rational(&basis);
        if rank != k {
            return Err(Error::RankDeficient { rank, expected: k });
        }
        Ok(Subspace {
            ambient_dim: basis.rows(),
            basis,
        })
    }

    /// Span of arbitrary (possibly dependent) vectors.
    pub fn span(ambient_dim: usize, vectors: &[Vec<Q>]) -> Result<Self> {
        if vectors.is_empty() {
            return Ok(Subspace {
                ambient_dim,
                basis: RationalMatrix::zeros(ambient_dim, 0),
            });
        }
        let m = Matrix::from_cols(ambient_dim, vectors)?;
        let (_, piv) = linalg::rref(&m);
        Subspace::new(m.select_cols(&piv))
    }

    pub fn full(n: usize) -> Self {
        Subspace {
            ambient_dim: n,
            basis: RationalMatrix::identity(n),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &RationalMatrix {
        &self.basis
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient_dim
    }

    pub fn gram(&self) -> RationalMatrix {
        linalg::gram(&self.basis)
    }

    /// Orthogonal projector `W (W^T W)^{-1} W^T`.
    pub fn projector(&self) -> RationalMatrix {
        if self.dim() == 0 {
            return RationalMatrix::zeros(self.ambient_dim, self.ambient_dim);
        }
        let ginv = linalg::inverse(&self.gram()).expect("basis is independent");
        self.basis
            .matmul(&ginv)
            .and_then(|m| m.matmul(&self.basis.transpose()))
            .expect("compatible shapes")
    }

    pub fn project(&self, x: &[Q]) -> Vec<Q> {
        self.projector().mul_vec(x).expect("length checked by caller")
    }

    pub fn orthogonal_complement(&self) -> Subspace {
        if self.dim() == 0 {
            return Subspace::full(self.ambient_dim);
        }
        let ker = linalg::rational_kernel(&self.basis.transpose());
        if ker.is_empty() {
            return Subspace {
                ambient_dim: self.ambient_dim,
                basis: RationalMatrix::zeros(self.ambient_dim, 0),
            };
        }
        Subspace::new(Matrix::from_cols(self.ambient_dim, &ker).expect("shape")).expect("kernel basis")
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        if x.iter().all(Zero::is_zero) {
            return true;
        }
        if self.dim() == 0 {
            return false;
        }
        linalg::solve(&self.basis, x).is_some()
    }

    /// Whether every vector of `self` is orthogonal to every vector of `other`.
    pub fn is_orthogonal_to(&self, other: &Subspace) -> bool {
        self.basis.transpose().matmul(&other.basis).is_ok_and(|m| m.is_zero())
    }

    /// Coordinates `u` of `x` in this basis, if `x` lies in the subspace.
    pub fn coordinates(&self, x: &[Q]) -> Option<Vec<Q>> {
        linalg::solve(&self.basis, x).filter(|u| self.basis.mul_vec(u).ok().as_deref() == Some(x))
    }
}

/// The row span `V = B^T R^m` of a full-row-rank matrix.
pub fn row_span(b: &IntegerMatrix) -> Result<Subspace> {
    let rank = linalg::rank_over_rationals(b);
    if rank != b.rows() {
        return Err(Error::RankDeficient {
            rank,
            expected: b.rows(),
        });
    }
    Subspace::new(b.transpose().to_rational())
}

/// Lattice generated by the (independent) columns of `basis`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    ambient_dim: usize,
    basis: RationalMatrix,
    is_integer: bool,
}

/// Covolume `sqrt(det Gram)`, rational when the determinant is a square.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Covolume {
    Exact(Q),
    Squared(Q),
}

impl Covolume {
    pub fn squared(&self) -> Q {
        match self {
            Covolume::Exact(q) => q * q,
            Covolume::Squared(q) => q.clone(),
        }
    }

    pub fn as_surd(&self) -> Surd {
        match self {
            Covolume::Exact(q) => Surd::rational(q.clone()),
            Covolume::Squared(q) => Surd::sqrt(q),
        }
    }
}

impl Lattice {
    pub fn new(basis: RationalMatrix) -> Result<Self> {
        let k = basis.cols();
        let rank = linalg::rank_rational(&basis);
        if rank != k {
            return Err(Error::RankDeficient { rank, expected: k });
        }
        Ok(Lattice {
            ambient_dim: basis.rows(),
            is_integer: basis.is_integral(),
            basis,
        })
    }

    pub fn from_integer(basis: &IntegerMatrix) -> Result<Self> {
        Lattice::new(basis.to_rational())
    }

    /// The standard lattice Z^n.
    pub fn integer(n: usize) -> Self {
        Lattice {
            ambient_dim: n,
            basis: RationalMatrix::identity(n),
            is_integer: true,
        }
    }

    /// `k Z^n`.
    pub fn scaled_integer(n: usize, k: i64) -> Self {
        Lattice::new(RationalMatrix::identity(n).scale(&num::rat(k, 1))).expect("k nonzero")
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &RationalMatrix {
        &self.basis
    }

    pub fn is_integer(&self) -> bool {
        self.is_integer
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.ambient_dim
    }

    pub fn gram(&self) -> RationalMatrix {
        linalg::gram(&self.basis)
    }

    pub fn span(&self) -> Subspace {
        Subspace {
            ambient_dim: self.ambient_dim,
            basis: self.basis.clone(),
        }
    }

    pub fn covolume(&self) -> Covolume {
        if self.rank() == 0 {
            return Covolume::Exact(Q::one());
        }
        let d = linalg::det_rational(&self.gram()).expect("square Gram");
        match num::rational_sqrt(&d) {
            Some(r) => Covolume::Exact(r),
            None => Covolume::Squared(d),
        }
    }

    pub fn contains(&self, x: &[Q]) -> bool {
        if x.len() != self.ambient_dim {
            return false;
        }
        if self.rank() == 0 {
            return x.iter().all(Zero::is_zero);
        }
        self.span()
            .coordinates(x)
            .is_some_and(|u| u.iter().all(|q| q.is_integer()))
    }

    /// Same lattice with an LLL-reduced basis.
    pub fn reduced(&self) -> Lattice {
        let mut cols = self.basis.to_cols();
        lll_reduce(&mut cols);
        Lattice {
            ambient_dim: self.ambient_dim,
            basis: Matrix::from_cols(self.ambient_dim, &cols).expect("shape"),
            is_integer: self.is_integer,
        }
    }

    /// Whether `other` generates the same lattice.
    pub fn same_lattice(&self, other: &Lattice) -> bool {
        self.ambient_dim == other.ambient_dim
            && self.rank() == other.rank()
            && other.basis.to_cols().iter().all(|c| self.contains(c))
            && self.basis.to_cols().iter().all(|c| other.contains(c))
    }

    pub fn to_json(&self) -> LatticeJson {
        LatticeJson {
            ambient_dim: self.ambient_dim,
            basis_cols: self
                .basis
                .to_cols()
                .iter()
                .map(|c| c.iter().map(num::fmt_rational).collect())
                .collect(),
            integer: self.is_integer,
        }
    }

    pub fn from_json(j: &LatticeJson) -> Result<Lattice> {
        let cols = j
            .basis_cols
            .iter()
            .map(|c| {
                if c.len() != j.ambient_dim {
                    return Err(Error::Parse("basis column length differs from ambient_dim".into()));
                }
                c.iter().map(|s| num::parse_rational(s)).collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let l = Lattice::new(Matrix::from_cols(j.ambient_dim, &cols)?)?;
        if j.integer && !l.is_integer {
            return Err(Error::Parse("lattice flagged integer has fractional entries".into()));
        }
        Ok(l)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct LatticeJson {
    pub ambient_dim: usize,
    pub basis_cols: Vec<Vec<String>>,
    pub integer: bool,
}

/// Common denominator of all entries.
fn denominator_lcm(m: &RationalMatrix) -> Z {
    m.entries().iter().fold(Z::one(), |acc, q| acc.lcm(q.denom()))
}

/// `V^⊥ ∩ L` where `V` is the row span of `B`, for a full-rank `L`.
///
/// With `L = C Z^n`, this is `C ker_Z(B C)`.
pub fn intersect_with_kernel(l: &Lattice, b: &IntegerMatrix) -> Result<Lattice> {
    if b.cols() != l.ambient_dim() {
        return Err(Error::Dimension("B and lattice dimensions differ".into()));
    }
    if !l.is_full_rank() {
        return Err(Error::InvalidParameter("lattice must have full rank".into()));
    }
    let rank = linalg::rank_over_rationals(b);
    if rank != b.rows() {
        return Err(Error::RankDeficient {
            rank,
            expected: b.rows(),
        });
    }
    let bc = b.to_rational().matmul(l.basis())?;
    let den = denominator_lcm(&bc);
    let bc_int = bc
        .scale(&Q::from_integer(den))
        .to_integer()
        .expect("denominators cleared");
    let k = integer_kernel_basis(&bc_int)?;
    let basis = l.basis().matmul(&k.to_rational())?;
    let out = Lattice::new(basis)?;
    Ok(if out.rank() > 0 && out.ambient_dim() <= 64 {
        out.reduced()
    } else {
        out
    })
}

/// Orthogonal projection of `L` onto `V`, as a lattice of rank `dim V`.
///
/// Generators `P c_j` are mapped injectively into Z^k through an integer
/// matrix with rows spanning `V`, reduced to a basis there, and pulled back.
pub fn project_lattice(l: &Lattice, v: &Subspace) -> Result<Lattice> {
    if v.ambient_dim() != l.ambient_dim() {
        return Err(Error::Dimension("subspace and lattice dimensions differ".into()));
    }
    if !l.is_full_rank() {
        return Err(Error::InvalidParameter("lattice must have full rank".into()));
    }
    if v.dim() == 0 {
        return Lattice::new(RationalMatrix::zeros(l.ambient_dim(), 0));
    }
    if v.is_full() {
        return Ok(l.clone());
    }
    // Integer matrix whose rows span V; on V it is injective, and it
    // annihilates V^⊥, so Bv x = Bv P x.
    let wt = v.basis().transpose();
    let bv = wt
        .scale(&Q::from_integer(denominator_lcm(&wt)))
        .to_integer()
        .expect("denominators cleared");
    let img = bv.to_rational().matmul(l.basis())?;
    let den = denominator_lcm(&img);
    let img_int = img
        .scale(&Q::from_integer(den.clone()))
        .to_integer()
        .expect("denominators cleared");
    let h = integer_lattice_basis(&img_int);
    if h.cols() != v.dim() {
        return Err(Error::RankDeficient {
            rank: h.cols(),
            expected: v.dim(),
        });
    }
    // pull back: x = Bv^T (Bv Bv^T)^{-1} h / den
    let bvq = bv.to_rational();
    let t = bvq
        .transpose()
        .matmul(&linalg::inverse(&bvq.matmul(&bvq.transpose())?)?)?;
    let basis = t.matmul(&h.to_rational())?.scale(&Q::new(Z::one(), den));
    let out = Lattice::new(basis)?;
    Ok(if out.ambient_dim() <= 64 { out.reduced() } else { out })
}

/// `B L` for `B` injective on the span of `L`.
pub fn apply_matrix_to_lattice(b: &IntegerMatrix, l: &Lattice) -> Result<Lattice> {
    if b.cols() != l.ambient_dim() {
        return Err(Error::Dimension("matrix and lattice dimensions differ".into()));
    }
    let img = b.to_rational().matmul(l.basis())?;
    if linalg::rank_rational(&img) != l.rank() {
        return Err(Error::NotInjective);
    }
    Lattice::new(img)
}

/// Result of a bounded shortest-vector search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ShortestVector {
    /// Exact minimum squared norm over nonzero lattice vectors.
    Value(Q),
    /// Every nonzero lattice vector has squared norm greater than the bound.
    ExceedsBound,
}

pub fn shortest_vector_length_sq(l: &Lattice, bound: &Q, budget: u64) -> Result<ShortestVector> {
    if l.rank() == 0 {
        return Err(Error::InvalidParameter(
            "lattice of rank 0 has no nonzero vectors".into(),
        ));
    }
    if bound <= &Q::zero() {
        return Err(Error::InvalidParameter("bound must be positive".into()));
    }
    let red = l.reduced();
    Ok(match enumerate::minimum(&red.gram(), bound, budget)? {
        Some(q) => ShortestVector::Value(q),
        None => ShortestVector::ExceedsBound,
    })
}

/// Squared norm of the lattice vector with coefficients `x`.
pub fn vector_norm_sq(l: &Lattice, x: &[Z]) -> Q {
    let v = l
        .basis()
        .mul_vec(&x.iter().map(|z| Q::from_integer(z.clone())).collect::<Vec<_>>())
        .expect("coefficient length");
    dot(&v, &v)
}
