//! Matrices over a noncommutative ring: exact inversion, quasideterminants,
//! Wronski and Vandermonde matrices.

use std::fmt::Write as _;

use crate::algebra::{pow, Differential, Ring, Scalar, SqMatrix};
use crate::error::{Error, Result};
use crate::series::{Derivation, TruncSeries};

/// Rectangular matrix with entries in a (possibly noncommutative) ring.
#[derive(Clone, Debug, PartialEq)]
pub struct NcMatrix<R> {
    rows: usize,
    cols: usize,
    entries: Vec<R>,
}

impl<R: Ring> NcMatrix<R> {
    pub fn new(rows: usize, cols: usize, entries: Vec<R>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimMismatch(rows * cols, entries.len()));
        }
        Ok(NcMatrix { rows, cols, entries })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> R) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        NcMatrix { rows, cols, entries }
    }

    pub fn from_rows(rows: Vec<Vec<R>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Shape("ragged rows".into()));
        }
        Ok(NcMatrix { rows: r, cols: c, entries: rows.into_iter().flatten().collect() })
    }

    /// `n x n` identity over the ring of `template`.
    pub fn identity(n: usize, template: &R) -> Self {
        let (zero, one) = (template.zero_like(), template.one_like());
        Self::from_fn(n, n, |i, j| if i == j { one.clone() } else { zero.clone() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &R {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: R) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn entries(&self) -> &[R] {
        &self.entries
    }

    pub fn map<T: Ring>(&self, f: impl Fn(&R) -> T) -> NcMatrix<T> {
        NcMatrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(f).collect() }
    }

    /// Submatrix with row `i` and column `j` removed.
    pub fn minor(&self, i: usize, j: usize) -> Self {
        self.select(
            &(0..self.rows).filter(|&r| r != i).collect::<Vec<_>>(),
            &(0..self.cols).filter(|&c| c != j).collect::<Vec<_>>(),
        )
    }

    /// Submatrix on the given rows and columns, in that order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |r, c| self.get(rows[r], cols[c]).clone())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimMismatch(self.cols, other.rows));
        }
        let zero = self
            .entries
            .first()
            .or(other.entries.first())
            .map(Ring::zero_like)
            .ok_or_else(|| Error::Shape("empty product".into()))?;
        Ok(Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(zero.clone(), |acc, k| acc.add(&self.get(i, k).mul(other.get(k, j))))
        }))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimMismatch(self.rows * self.cols, other.rows * other.cols));
        }
        Ok(Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j).sub(other.get(i, j))))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Ring::is_zero)
    }

    /// Exactly the identity (to the working truncation of the entries).
    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let e = self.get(i, j);
                    if i == j {
                        e.is_one()
                    } else {
                        e.is_zero()
                    }
                })
            })
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Gauss-Jordan inverse over a noncommutative ring.
    ///
    /// In each column the first row (by index) holding a ring-invertible entry
    /// is the pivot. Every row operation multiplies from the left, so the
    /// accumulated transform is a left inverse, which for a square matrix
    /// over these rings is the two-sided inverse.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::NotSquare(self.rows, self.cols));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(self.clone());
        }
        let mut a = self.clone();
        let mut inv = Self::identity(n, &self.entries[0]);
        for col in 0..n {
            let (p, p_inv) =
                (col..n).find_map(|r| a.get(r, col).try_inverse().map(|x| (r, x))).ok_or(Error::NotInvertible)?;
            a.swap_rows(p, col);
            inv.swap_rows(p, col);
            for c in 0..n {
                let v = p_inv.mul(a.get(col, c));
                a.set(col, c, v);
                let w = p_inv.mul(inv.get(col, c));
                inv.set(col, c, w);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a.get(r, col).clone();
                for c in 0..n {
                    let v = a.get(r, c).sub(&f.mul(a.get(col, c)));
                    a.set(r, c, v);
                    let w = inv.get(r, c).sub(&f.mul(inv.get(col, c)));
                    inv.set(r, c, w);
                }
            }
        }
        Ok(inv)
    }

    /// Quasideterminant `|X|_{ij} = x_ij - r_i^(j) (X^{ij})^{-1} c_j^(i)`
    /// (0-based indices).
    pub fn quasidet(&self, i: usize, j: usize) -> Result<R> {
        if !self.is_square() {
            return Err(Error::NotSquare(self.rows, self.cols));
        }
        if i >= self.rows || j >= self.cols {
            return Err(Error::Shape(format!("index ({i},{j}) out of range")));
        }
        let m = self.rows;
        let x = self.get(i, j).clone();
        if m == 1 {
            return Ok(x);
        }
        let rest_rows: Vec<usize> = (0..m).filter(|&r| r != i).collect();
        let rest_cols: Vec<usize> = (0..m).filter(|&c| c != j).collect();
        let inv = self.select(&rest_rows, &rest_cols).inverse().map_err(|_| Error::QuasidetUndefined { i, j })?;
        let row = self.select(&[i], &rest_cols);
        let col = self.select(&rest_rows, &[j]);
        let corr = row.mul(&inv)?.mul(&col)?;
        Ok(x.sub(corr.get(0, 0)))
    }

    /// Classical Laplace-expansion determinant. Meaningful only over a
    /// commutative ring.
    pub fn det_commutative(&self) -> Result<R> {
        if !self.is_square() {
            return Err(Error::NotSquare(self.rows, self.cols));
        }
        if self.rows == 0 {
            return Err(Error::Shape("empty matrix".into()));
        }
        Ok(self.laplace(&(0..self.cols).collect::<Vec<_>>(), 0))
    }

    fn laplace(&self, cols: &[usize], row: usize) -> R {
        if cols.len() == 1 {
            return self.get(row, cols[0]).clone();
        }
        let mut acc = self.get(row, cols[0]).zero_like();
        for (k, &c) in cols.iter().enumerate() {
            let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let term = self.get(row, c).mul(&self.laplace(&rest, row + 1));
            acc = if k % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
        }
        acc
    }
}

/// Wronski matrix: row `r` holds `D^r f_1, ..., D^r f_m`.
pub fn wronski<R: Differential>(f: &[R], d: Derivation) -> NcMatrix<R> {
    let m = f.len();
    let mut rows: Vec<Vec<R>> = Vec::with_capacity(m);
    let mut cur = f.to_vec();
    for _ in 0..m {
        let next = cur.iter().map(|x| d.apply(x)).collect();
        rows.push(std::mem::replace(&mut cur, next));
    }
    NcMatrix::from_rows(rows).expect("rectangular by construction")
}

/// Vandermonde matrix `V_ij = x_j^i` (0-based).
pub fn vandermonde<R: Ring>(x: &[R]) -> NcMatrix<R> {
    let n = x.len();
    NcMatrix::from_fn(n, n, |i, j| pow(&x[j], i as u32))
}

impl<S: Scalar> NcMatrix<TruncSeries<SqMatrix<S>>> {
    /// Entrywise constant terms.
    pub fn constant_terms(&self) -> NcMatrix<SqMatrix<S>> {
        self.map(TruncSeries::constant_term)
    }

    /// Dump every entry as `entry (r,c):` followed by its series dump.
    pub fn to_dump(&self) -> String {
        let mut out = String::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let _ = writeln!(out, "entry ({i},{j}):");
                out.push_str(&self.get(i, j).to_dump());
            }
        }
        out
    }
}
