//! Shifted lattices `v0 + span_Z(periods)` in canonical form.
//!
//! Every value is kept canonical: the periods are the nonzero columns of
//! their Hermite normal form and the base is reduced against the pivots, so
//! two shifted lattices denote the same set exactly when they are equal.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Signed, Zero};

use crate::error::{Error, Result};
use crate::intlin::{
    self, column_span_basis, ext_gcd_chain, is_zero_vector, scale, solve_system, unit_vector, zero_vector,
    BigMatrix, BigVector,
};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Coset {
    base: BigVector,
    periods: Vec<BigVector>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ShiftedLattice {
    dim: usize,
    coset: Option<Coset>,
}

fn pivot_row(col: &[BigInt]) -> usize {
    col.iter().position(|x| !x.is_zero()).expect("zero period in canonical basis")
}

/// Reduces `v` against an echelon basis, returning the coefficients used and
/// leaving the remainder in `v`. Pivot entries of the remainder land in
/// `[0, pivot)`.
fn reduce(v: &mut BigVector, periods: &[BigVector]) {
    for p in periods {
        let r = pivot_row(p);
        let q = v[r].div_floor(&p[r]);
        if !q.is_zero() {
            for (x, y) in v.iter_mut().zip(p) {
                *x -= &q * y;
            }
        }
    }
}

/// Canonical form of `base + span_Z(periods)`: HNF periods and a base
/// reduced top-down against the pivots.
pub fn canonicalize(base: BigVector, periods: Vec<BigVector>) -> (BigVector, Vec<BigVector>) {
    let d = base.len();
    let basis = column_span_basis(&BigMatrix::from_columns(d, periods)).into_columns();
    let mut b = base;
    reduce(&mut b, &basis);
    (b, basis)
}

fn check_index_set(indices: &[usize], dim: usize) -> Result<()> {
    for &i in indices {
        if i == 0 || i > dim {
            return Err(Error::IndexOutOfRange { index: i, dim });
        }
    }
    Ok(())
}

impl ShiftedLattice {
    pub fn empty(dim: usize) -> Self {
        ShiftedLattice { dim, coset: None }
    }

    pub fn full(dim: usize) -> Self {
        ShiftedLattice {
            dim,
            coset: Some(Coset { base: zero_vector(dim), periods: (0..dim).map(|i| unit_vector(dim, i)).collect() }),
        }
    }

    pub fn point(p: BigVector) -> Self {
        ShiftedLattice { dim: p.len(), coset: Some(Coset { base: p, periods: Vec::new() }) }
    }

    /// `base + span_Z(periods)`; the periods may be linearly dependent.
    pub fn new(base: BigVector, periods: Vec<BigVector>) -> Self {
        let dim = base.len();
        for p in &periods {
            assert_eq!(p.len(), dim, "period length does not match base length");
        }
        let (base, periods) = canonicalize(base, periods);
        ShiftedLattice { dim, coset: Some(Coset { base, periods }) }
    }

    pub fn from_i64(base: &[i64], periods: &[Vec<i64>]) -> Self {
        ShiftedLattice::new(intlin::vector(base), periods.iter().map(|p| intlin::vector(p)).collect())
    }

    /// Rebuilds a value from parts already in canonical form, checking that
    /// they are.
    pub fn from_canonical_parts(base: BigVector, periods: Vec<BigVector>) -> Option<Self> {
        let x = ShiftedLattice::new(base.clone(), periods.clone());
        (x.base() == Some(&base) && x.periods() == periods.as_slice()).then_some(x)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coset.is_none()
    }

    pub fn base(&self) -> Option<&BigVector> {
        self.coset.as_ref().map(|c| &c.base)
    }

    pub fn periods(&self) -> &[BigVector] {
        self.coset.as_ref().map_or(&[], |c| &c.periods)
    }

    pub fn rank(&self) -> usize {
        self.periods().len()
    }

    /// True when the base is zero, i.e. the set is a lattice.
    pub fn is_lattice(&self) -> bool {
        self.base().is_some_and(|b| is_zero_vector(b))
    }

    /// Idempotent; values are canonical on construction.
    pub fn canonicalize(&self) -> Self {
        match &self.coset {
            None => self.clone(),
            Some(c) => ShiftedLattice::new(c.base.clone(), c.periods.clone()),
        }
    }

    /// Whether `v` lies in the period lattice.
    pub fn spans(&self, v: &[BigInt]) -> bool {
        let mut w = v.to_vec();
        reduce(&mut w, self.periods());
        is_zero_vector(&w)
    }

    pub fn member(&self, p: &[BigInt]) -> bool {
        assert_eq!(p.len(), self.dim, "point dimension mismatch");
        match &self.coset {
            None => false,
            Some(c) => {
                let mut w = intlin::sub(p, &c.base);
                reduce(&mut w, &c.periods);
                is_zero_vector(&w)
            }
        }
    }

    pub fn member_i64(&self, p: &[i64]) -> bool {
        self.member(&intlin::vector(p))
    }

    /// Embeds into `Z^m` as a cylinder over the new coordinates.
    pub fn pad_to_dim(&self, m: usize) -> Result<Self> {
        if m < self.dim {
            return Err(Error::ShrinkForbidden { from: self.dim, to: m });
        }
        if m == self.dim {
            return Ok(self.clone());
        }
        Ok(match &self.coset {
            None => ShiftedLattice::empty(m),
            Some(c) => {
                let extend = |v: &BigVector| {
                    let mut w = v.clone();
                    w.resize(m, BigInt::zero());
                    w
                };
                let mut periods: Vec<BigVector> = c.periods.iter().map(extend).collect();
                periods.extend((self.dim..m).map(|i| unit_vector(m, i)));
                ShiftedLattice::new(extend(&c.base), periods)
            }
        })
    }

    fn padded_pair(&self, other: &Self) -> (Self, Self) {
        let m = self.dim.max(other.dim);
        (self.pad_to_dim(m).unwrap(), other.pad_to_dim(m).unwrap())
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let (x, y) = self.padded_pair(other);
        let d = x.dim;
        let (cx, cy) = match (&x.coset, &y.coset) {
            (Some(a), Some(b)) => (a, b),
            _ => return ShiftedLattice::empty(d),
        };
        let k = cx.periods.len();
        let mut cols = cx.periods.clone();
        cols.extend(cy.periods.iter().map(|p| scale(&-BigInt::one(), p)));
        let m = BigMatrix::from_columns(d, cols);
        let rhs = intlin::sub(&cy.base, &cx.base);
        match solve_system(&m, &rhs).expect("dimensions agree") {
            None => ShiftedLattice::empty(d),
            Some((sol, kernel)) => {
                let a = BigMatrix::from_columns(d, cx.periods.clone());
                let base = intlin::add(&cx.base, &a.mul_vec(&sol[..k]));
                let periods = kernel.iter().map(|z| a.mul_vec(&z[..k])).collect();
                ShiftedLattice::new(base, periods)
            }
        }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        let (x, y) = self.padded_pair(other);
        match (&x.coset, &y.coset) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(cx), Some(_)) => y.member(&cx.base) && cx.periods.iter().all(|p| y.spans(p)),
        }
    }

    /// Projection that removes the last `k` coordinates.
    pub fn drop_project(&self, k: usize) -> Result<Self> {
        if k > self.dim {
            return Err(Error::IndexOutOfRange { index: k, dim: self.dim });
        }
        let d = self.dim - k;
        Ok(match &self.coset {
            None => ShiftedLattice::empty(d),
            Some(c) => ShiftedLattice::new(
                c.base[..d].to_vec(),
                c.periods.iter().map(|p| p[..d].to_vec()).collect(),
            ),
        })
    }

    /// Cylinder projection `proj(I, X)`: the coordinates in `I` (1-based)
    /// become free, the dimension is unchanged.
    pub fn project_indices(&self, indices: &[usize]) -> Result<Self> {
        check_index_set(indices, self.dim)?;
        let extra: Vec<BigVector> = indices.iter().map(|&i| unit_vector(self.dim, i - 1)).collect();
        Ok(self.add_periods(&extra))
    }

    /// Minkowski sum with the lattice spanned by `extra`.
    pub fn add_periods(&self, extra: &[BigVector]) -> Self {
        match &self.coset {
            None => self.clone(),
            Some(c) => {
                let mut periods = c.periods.clone();
                periods.extend(extra.iter().cloned());
                ShiftedLattice::new(c.base.clone(), periods)
            }
        }
    }

    /// Coordinate permutation: coordinate `i` of the result is coordinate
    /// `perm[i]` of `self` (0-based).
    pub fn permute(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.dim);
        match &self.coset {
            None => self.clone(),
            Some(c) => {
                let apply = |v: &BigVector| perm.iter().map(|&j| v[j].clone()).collect::<BigVector>();
                ShiftedLattice::new(apply(&c.base), c.periods.iter().map(apply).collect())
            }
        }
    }

    /// Intersects with `{x : x_j = 0 for j >= keep}` and drops those
    /// coordinates. Exact for sets that are cylinders in the dropped block.
    pub fn restrict_prefix(&self, keep: usize) -> Self {
        assert!(keep <= self.dim);
        let zero_tail = ShiftedLattice::new(zero_vector(self.dim), (0..keep).map(|i| unit_vector(self.dim, i)).collect());
        self.intersect(&zero_tail).drop_project(self.dim - keep).unwrap()
    }

    /// Basis of the orthogonal lattice `{v in Z^d : <v, u> = 0 for all u in L}`.
    pub fn orthogonal(&self) -> Result<Vec<BigVector>> {
        let c = self.coset.as_ref().ok_or(Error::EmptyInput)?;
        if !is_zero_vector(&c.base) {
            return Err(Error::NotALattice);
        }
        let d = self.dim;
        let mut acc = ShiftedLattice::full(d);
        for u in &c.periods {
            let perp = ShiftedLattice::new(zero_vector(d), orthogonal_of_vector(u));
            acc = acc.intersect(&perp);
        }
        Ok(acc.periods().to_vec())
    }

    /// The lattice `L'` of every slice `{t in Z^k : (x, t) in self}` over the
    /// last `k` coordinates. Non-empty slices are cosets of `L'`.
    pub fn slice_lattice(&self, k: usize) -> Result<Self> {
        let c = self.coset.as_ref().ok_or(Error::EmptyInput)?;
        if k > self.dim {
            return Err(Error::IndexOutOfRange { index: k, dim: self.dim });
        }
        let kept = self.dim - k;
        let p = BigMatrix::from_columns(self.dim, c.periods.clone());
        let top = p.row_block(0, kept);
        let bottom = p.row_block(kept, self.dim);
        let kernel = intlin::kernel_basis(&top);
        Ok(ShiftedLattice::new(zero_vector(k), kernel.iter().map(|y| bottom.mul_vec(y)).collect()))
    }

    /// Index of a full-rank lattice, the product of its HNF pivots.
    pub fn index(&self) -> Option<BigInt> {
        let c = self.coset.as_ref()?;
        if c.periods.len() != self.dim {
            return None;
        }
        Some(c.periods.iter().map(|p| p[pivot_row(p)].clone()).product())
    }

    /// Number of points in the box `[0, s)^d`, which is `s^d / det(L)` when
    /// `s * e_i` is a period for every `i`.
    pub fn count_points_in_fundamental_box(&self, s: &BigInt) -> Result<BigInt> {
        if self.is_empty() {
            return Err(Error::EmptyInput);
        }
        let d = self.dim;
        let ok = s.is_positive() && (0..d).all(|i| self.spans(&scale(s, &unit_vector(d, i))));
        if !ok {
            return Err(Error::PreconditionViolation(format!("{s} * e_i is not a period for every i")));
        }
        let det = self.index().expect("full rank once s*e_i are periods");
        Ok(Pow::pow(s, d) / det)
    }
}

/// Basis of `(Z u)^perp` by the gcd-chain echelon construction.
fn orthogonal_of_vector(u: &[BigInt]) -> Vec<BigVector> {
    let d = u.len();
    let Some(t) = u.iter().position(|x| !x.is_zero()) else {
        return (0..d).map(|i| unit_vector(d, i)).collect();
    };
    let mut w = u.to_vec();
    w.swap(0, t);
    let chain = ext_gcd_chain(&w).expect("first entry nonzero");
    let mut out = Vec::with_capacity(d.saturating_sub(1));
    for j in 0..d - 1 {
        let (gj, aj) = &chain[j];
        let gnext = &chain[j + 1].0;
        let beta = &w[j + 1] / gnext;
        let mut v = zero_vector(d);
        for (i, a) in aj.iter().enumerate() {
            v[i] = -(&beta * a);
        }
        v[j + 1] = gj / gnext;
        v.swap(0, t);
        out.push(v);
    }
    out
}

impl fmt::Display for ShiftedLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vec = |v: &BigVector| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ");
        match &self.coset {
            None => write!(f, "empty({})", self.dim),
            Some(c) => {
                write!(f, "({})", vec(&c.base))?;
                for p in &c.periods {
                    write!(f, " + Z({})", vec(p))?;
                }
                Ok(())
            }
        }
    }
}
