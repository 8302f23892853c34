//! Exact integer linear algebra over arbitrary-precision integers.
//!
//! Matrices are stored column-major because every reduction here is a column
//! operation. The Hermite normal form is the column-style one, `H = A * U`
//! with `U` unimodular and `H` lower echelon.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type BigVector = Vec<BigInt>;

pub fn vector<T: Into<BigInt> + Copy>(xs: &[T]) -> BigVector {
    xs.iter().map(|&x| x.into()).collect()
}

pub fn zero_vector(n: usize) -> BigVector {
    vec![BigInt::zero(); n]
}

pub fn unit_vector(n: usize, i: usize) -> BigVector {
    let mut v = zero_vector(n);
    v[i] = BigInt::one();
    v
}

pub fn is_zero_vector(v: &[BigInt]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn add(a: &[BigInt], b: &[BigInt]) -> BigVector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[BigInt], b: &[BigInt]) -> BigVector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(c: &BigInt, a: &[BigInt]) -> BigVector {
    a.iter().map(|x| c * x).collect()
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `a += c * b`
fn axpy(a: &mut [BigInt], c: &BigInt, b: &[BigInt]) {
    if c.is_zero() {
        return;
    }
    for (x, y) in a.iter_mut().zip(b) {
        if !y.is_zero() {
            *x += c * y;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BigMatrix {
    rows: usize,
    cols: Vec<BigVector>,
}

impl BigMatrix {
    pub fn zeros(rows: usize, ncols: usize) -> Self {
        BigMatrix { rows, cols: vec![zero_vector(rows); ncols] }
    }

    pub fn identity(n: usize) -> Self {
        BigMatrix { rows: n, cols: (0..n).map(|i| unit_vector(n, i)).collect() }
    }

    pub fn from_columns(rows: usize, cols: Vec<BigVector>) -> Self {
        for c in &cols {
            assert_eq!(c.len(), rows, "column length does not match row count");
        }
        BigMatrix { rows, cols }
    }

    /// Builds a matrix from row-major small integers. `ncols` is needed for
    /// the zero-row case.
    pub fn from_rows<T: Into<BigInt> + Copy>(ncols: usize, rows: &[Vec<T>]) -> Self {
        let mut m = BigMatrix::zeros(rows.len(), ncols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), ncols, "ragged row");
            for (c, &x) in row.iter().enumerate() {
                m.cols[c][r] = x.into();
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.cols[c][r]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.cols[c][r] = v;
    }

    pub fn column(&self, c: usize) -> &BigVector {
        &self.cols[c]
    }

    pub fn columns(&self) -> &[BigVector] {
        &self.cols
    }

    pub fn into_columns(self) -> Vec<BigVector> {
        self.cols
    }

    pub fn row(&self, r: usize) -> BigVector {
        self.cols.iter().map(|c| c[r].clone()).collect()
    }

    pub fn mul_vec(&self, y: &[BigInt]) -> BigVector {
        assert_eq!(y.len(), self.ncols());
        let mut out = zero_vector(self.rows);
        for (c, yc) in self.cols.iter().zip(y) {
            axpy(&mut out, yc, c);
        }
        out
    }

    pub fn mul(&self, other: &BigMatrix) -> BigMatrix {
        assert_eq!(self.ncols(), other.rows);
        BigMatrix { rows: self.rows, cols: other.cols.iter().map(|c| self.mul_vec(c)).collect() }
    }

    pub fn transpose(&self) -> BigMatrix {
        BigMatrix { rows: self.ncols(), cols: (0..self.rows).map(|r| self.row(r)).collect() }
    }

    pub fn hcat(&self, other: &BigMatrix) -> BigMatrix {
        assert_eq!(self.rows, other.rows);
        let mut cols = self.cols.clone();
        cols.extend(other.cols.iter().cloned());
        BigMatrix { rows: self.rows, cols }
    }

    /// Keeps rows `lo..hi`.
    pub fn row_block(&self, lo: usize, hi: usize) -> BigMatrix {
        BigMatrix { rows: hi - lo, cols: self.cols.iter().map(|c| c[lo..hi].to_vec()).collect() }
    }
}

/// Extended gcd with a non-negative gcd: returns `(g, x, y)` with
/// `x*a + y*b = g`. When `a` divides `b` the identity on `a` is preferred.
pub fn ext_gcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    if b.is_zero() {
        return (a.abs(), BigInt::from(a.signum()), BigInt::zero());
    }
    if !a.is_zero() && (b % a).is_zero() {
        return (a.abs(), BigInt::from(a.signum()), BigInt::zero());
    }
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (BigInt::one(), BigInt::zero());
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while !r1.is_zero() {
        let q = r0.div_floor(&r1);
        let r2 = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r2);
        let s2 = &s0 - &q * &s1;
        s0 = std::mem::replace(&mut s1, s2);
        let t2 = &t0 - &q * &t1;
        t0 = std::mem::replace(&mut t1, t2);
    }
    if r0.is_negative() {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Replaces columns `i`, `j` by `x*ci + y*cj` and `a*cj - b*ci`; the 2x2
/// transform has determinant `x*a + y*b = 1`.
fn combine(cols: &mut [BigVector], i: usize, j: usize, x: &BigInt, y: &BigInt, a: &BigInt, b: &BigInt) {
    let ci = std::mem::take(&mut cols[i]);
    let cj = std::mem::take(&mut cols[j]);
    let ni = ci.iter().zip(&cj).map(|(p, q)| x * p + y * q).collect();
    let nj = ci.iter().zip(&cj).map(|(p, q)| a * q - b * p).collect();
    cols[i] = ni;
    cols[j] = nj;
}

fn negate(col: &mut [BigInt]) {
    for x in col.iter_mut() {
        *x = -std::mem::take(x);
    }
}

#[derive(Clone, Debug)]
pub struct Hnf {
    pub h: BigMatrix,
    pub u: BigMatrix,
    pub rank: usize,
    /// `pivot_rows[j]` is the row of the pivot of column `j`, strictly increasing.
    pub pivot_rows: Vec<usize>,
}

/// Column-style Hermite normal form. Pivots are positive, entries to the left
/// of a pivot lie in `[0, pivot)`, and the `n - rank` zero columns sit at the
/// right end.
pub fn hnf(a: &BigMatrix) -> Hnf {
    let m = a.nrows();
    let n = a.ncols();
    let mut h = a.cols.clone();
    let mut u = BigMatrix::identity(n).cols;
    let mut pivot_rows = Vec::new();
    let mut pc = 0;
    for r in 0..m {
        if pc == n {
            break;
        }
        for c in pc + 1..n {
            if h[c][r].is_zero() {
                continue;
            }
            let (g, x, y) = ext_gcd(&h[pc][r], &h[c][r]);
            let a_ = &h[pc][r] / &g;
            let b_ = &h[c][r] / &g;
            combine(&mut h, pc, c, &x, &y, &a_, &b_);
            combine(&mut u, pc, c, &x, &y, &a_, &b_);
        }
        if h[pc][r].is_zero() {
            continue;
        }
        if h[pc][r].is_negative() {
            negate(&mut h[pc]);
            negate(&mut u[pc]);
        }
        let p = h[pc][r].clone();
        let (left, rest) = h.split_at_mut(pc);
        let (uleft, urest) = u.split_at_mut(pc);
        for c in 0..pc {
            let q = left[c][r].div_floor(&p);
            if !q.is_zero() {
                let nq = -q;
                axpy(&mut left[c], &nq, &rest[0]);
                axpy(&mut uleft[c], &nq, &urest[0]);
            }
        }
        pivot_rows.push(r);
        pc += 1;
    }
    Hnf {
        h: BigMatrix { rows: m, cols: h },
        u: BigMatrix { rows: n, cols: u },
        rank: pc,
        pivot_rows,
    }
}

pub fn rank(a: &BigMatrix) -> usize {
    hnf(a).rank
}

/// Integral solutions of `A y = b` as `base + span_Z(periods)`, or `None`
/// when there are none. The periods are linearly independent.
pub fn solve_system(a: &BigMatrix, b: &[BigInt]) -> Result<Option<(BigVector, Vec<BigVector>)>> {
    if b.len() != a.nrows() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), found: b.len() });
    }
    let hn = hnf(a);
    let n = a.ncols();
    let mut res = b.to_vec();
    let mut y = zero_vector(n);
    let mut j = 0;
    for r in 0..a.nrows() {
        if j < hn.rank && hn.pivot_rows[j] == r {
            let (q, rem) = res[r].div_rem(hn.h.get(r, j));
            if !rem.is_zero() {
                return Ok(None);
            }
            axpy(&mut res, &-&q, hn.h.column(j));
            y[j] = q;
            j += 1;
        } else if !res[r].is_zero() {
            return Ok(None);
        }
    }
    let base = hn.u.mul_vec(&y);
    let periods = hn.u.cols[hn.rank..].to_vec();
    Ok(Some((base, periods)))
}

/// Basis of the integer kernel `{y : A y = 0}`.
pub fn kernel_basis(a: &BigMatrix) -> Vec<BigVector> {
    let hn = hnf(a);
    hn.u.cols[hn.rank..].to_vec()
}

/// Reduced basis of the integer column span: the nonzero columns of the HNF.
pub fn column_span_basis(m: &BigMatrix) -> BigMatrix {
    let hn = hnf(m);
    let mut cols = hn.h.cols;
    cols.truncate(hn.rank);
    BigMatrix { rows: m.nrows(), cols }
}

/// Determinant of a square matrix by fraction-free Bareiss elimination.
pub fn determinant(m: &BigMatrix) -> BigInt {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "determinant of a non-square matrix");
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<BigVector> = (0..n).map(|r| m.row(r)).collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Volume of the lattice spanned by the columns of `b`, `sqrt(det(B^T B))`.
pub fn det_of_basis(b: &BigMatrix) -> Result<BigInt> {
    let k = b.ncols();
    if k == 0 {
        return Ok(BigInt::one());
    }
    if rank(b) < k {
        return Err(Error::NotIndependent);
    }
    let gram = b.transpose().mul(b);
    let d = determinant(&gram);
    let s = d.sqrt();
    if &s * &s != d {
        return Err(Error::NotIntegral);
    }
    Ok(s)
}

/// Running gcds `g_j = gcd(u_1..u_j)` with coefficients `a_j` such that
/// `sum_i a_{j,i} u_i = g_j`.
pub fn ext_gcd_chain(u: &[BigInt]) -> Result<Vec<(BigInt, BigVector)>> {
    if u.is_empty() || u[0].is_zero() {
        return Err(Error::FirstZero);
    }
    let mut out: Vec<(BigInt, BigVector)> = Vec::with_capacity(u.len());
    out.push((u[0].abs(), vec![BigInt::from(u[0].signum())]));
    for ui in &u[1..] {
        let (g_prev, a_prev) = out.last().unwrap();
        let (g, x, y) = ext_gcd(g_prev, ui);
        let mut a = scale(&x, a_prev);
        a.push(y);
        out.push((g, a));
    }
    Ok(out)
}
