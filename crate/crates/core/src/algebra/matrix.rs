use std::fmt;
use std::ops;
use std::str::FromStr;

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Algebra, Ring, Scalar, Star};
use crate::error::{Error, Result};

/// Square `d x d` matrix over a scalar field; the concrete star-algebra
/// with transpose as involution.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SqMatrix<S> {
    dim: usize,
    entries: Vec<S>,
}

impl<S: Scalar> SqMatrix<S> {
    /// Row-major construction. Fails unless `entries.len() == dim * dim`.
    pub fn new(dim: usize, entries: Vec<S>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::DimMismatch(dim * dim, entries.len()));
        }
        Ok(SqMatrix { dim, entries })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        SqMatrix { dim, entries }
    }

    /// Matrix with small integer entries, row-major.
    pub fn from_ints(dim: usize, ints: &[i64]) -> Self {
        assert_eq!(ints.len(), dim * dim, "expected {} entries", dim * dim);
        Self::from_fn(dim, |i, j| S::from_i64(ints[i * dim + j]).expect("integer scalar"))
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_fn(dim, |_, _| S::zero())
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { S::one() } else { S::zero() })
    }

    /// `s * identity`.
    pub fn scalar(dim: usize, s: S) -> Self {
        Self::from_fn(dim, |i, j| if i == j { s.clone() } else { S::zero() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[S] {
        &self.entries
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).clone())
    }

    pub fn trace(&self) -> S {
        (0..self.dim).fold(S::zero(), |acc, i| acc + self.get(i, i).clone())
    }

    fn check_dim(&self, other: &Self) {
        assert_eq!(self.dim, other.dim, "algebra elements of different dimension ({} vs {})", self.dim, other.dim);
    }

    /// Determinant by Gaussian elimination over the field.
    pub fn det(&self) -> S {
        let n = self.dim;
        let mut a = self.entries.clone();
        let mut det = S::one();
        for col in 0..n {
            let Some(p) = pivot_row(&a, n, col) else {
                return S::zero();
            };
            if p != col {
                swap_rows(&mut a, n, p, col);
                det = -det;
            }
            let piv = a[col * n + col].clone();
            det = det * piv.clone();
            for r in col + 1..n {
                let f = a[r * n + col].clone() / piv.clone();
                if f.is_zero() {
                    continue;
                }
                for c in col..n {
                    let v = a[col * n + c].clone() * f.clone();
                    a[r * n + c] = a[r * n + c].clone() - v;
                }
            }
        }
        det
    }

    /// Gauss-Jordan inverse; `NotInvertible` when the determinant vanishes.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.dim;
        let mut a = self.entries.clone();
        let mut inv = Self::identity(n).entries;
        for col in 0..n {
            let p = pivot_row(&a, n, col).ok_or(Error::NotInvertible)?;
            swap_rows(&mut a, n, p, col);
            swap_rows(&mut inv, n, p, col);
            let piv = a[col * n + col].clone();
            for c in 0..n {
                a[col * n + c] = a[col * n + c].clone() / piv.clone();
                inv[col * n + c] = inv[col * n + c].clone() / piv.clone();
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[r * n + col].clone();
                if f.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let va = a[col * n + c].clone() * f.clone();
                    a[r * n + c] = a[r * n + c].clone() - va;
                    let vi = inv[col * n + c].clone() * f.clone();
                    inv[r * n + c] = inv[r * n + c].clone() - vi;
                }
            }
        }
        Ok(SqMatrix { dim: n, entries: inv })
    }

    /// Lossy conversion for plotting and numeric comparisons.
    pub fn to_f64(&self) -> SqMatrix<f64> {
        SqMatrix { dim: self.dim, entries: self.entries.iter().map(|s| s.to_f64().unwrap_or(f64::NAN)).collect() }
    }
}

// Largest-magnitude pivot; for exact scalars any nonzero one would do.
fn pivot_row<S: Scalar>(a: &[S], n: usize, col: usize) -> Option<usize> {
    let mut best: Option<(usize, S)> = None;
    for r in col..n {
        let v = a[r * n + col].abs();
        if v.is_zero() {
            continue;
        }
        match &best {
            Some((_, b)) if *b >= v => {}
            _ => best = Some((r, v)),
        }
    }
    best.map(|(r, _)| r)
}

fn swap_rows<S>(a: &mut [S], n: usize, r1: usize, r2: usize) {
    if r1 == r2 {
        return;
    }
    for c in 0..n {
        a.swap(r1 * n + c, r2 * n + c);
    }
}

impl<S: Scalar> Ring for SqMatrix<S> {
    fn zero_like(&self) -> Self {
        Self::zeros(self.dim)
    }

    fn one_like(&self) -> Self {
        Self::identity(self.dim)
    }

    fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    fn is_one(&self) -> bool {
        (0..self.dim).all(|i| {
            (0..self.dim).all(|j| {
                let v = self.get(i, j);
                if i == j {
                    v.is_one()
                } else {
                    v.is_zero()
                }
            })
        })
    }

    fn add(&self, rhs: &Self) -> Self {
        self.check_dim(rhs);
        SqMatrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }

    fn sub(&self, rhs: &Self) -> Self {
        self.check_dim(rhs);
        SqMatrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }

    fn neg(&self) -> Self {
        SqMatrix { dim: self.dim, entries: self.entries.iter().map(|a| -a.clone()).collect() }
    }

    fn mul(&self, rhs: &Self) -> Self {
        self.check_dim(rhs);
        let n = self.dim;
        if n == 1 {
            return SqMatrix { dim: 1, entries: vec![self.entries[0].clone() * rhs.entries[0].clone()] };
        }
        let mut out = vec![S::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = &self.entries[i * n + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &rhs.entries[k * n + j];
                    if b.is_zero() {
                        continue;
                    }
                    out[i * n + j] = out[i * n + j].clone() + a.clone() * b.clone();
                }
            }
        }
        SqMatrix { dim: n, entries: out }
    }

    fn mul_int(&self, n: i64) -> Self {
        self.scale(&S::from_i64(n).expect("integer scalar"))
    }

    fn try_inverse(&self) -> Option<Self> {
        self.inverse().ok()
    }

    fn is_invertible(&self) -> bool {
        !self.det().is_zero()
    }
}

impl<S: Scalar> Algebra for SqMatrix<S> {
    type Scalar = S;

    fn scale(&self, s: &S) -> Self {
        SqMatrix { dim: self.dim, entries: self.entries.iter().map(|a| a.clone() * s.clone()).collect() }
    }
}

impl<S: Scalar> Star for SqMatrix<S> {
    fn star(&self) -> Self {
        self.transpose()
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $ring:path) => {
        impl<'a, S: Scalar> ops::$trait<&'a SqMatrix<S>> for &'a SqMatrix<S> {
            type Output = SqMatrix<S>;
            fn $method(self, rhs: &'a SqMatrix<S>) -> SqMatrix<S> {
                $ring(self, rhs)
            }
        }
    };
}

forward_binop!(Add, add, Ring::add);
forward_binop!(Sub, sub, Ring::sub);
forward_binop!(Mul, mul, Ring::mul);

impl<S: Scalar> ops::Neg for &SqMatrix<S> {
    type Output = SqMatrix<S>;
    fn neg(self) -> SqMatrix<S> {
        Ring::neg(self)
    }
}

/// Literal format `d; r11 r12; r21 r22;`.
impl<S: Scalar> fmt::Display for SqMatrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};", self.dim)?;
        for i in 0..self.dim {
            for j in 0..self.dim {
                write!(f, " {}", self.get(i, j))?;
            }
            write!(f, ";")?;
        }
        Ok(())
    }
}

impl<S: Scalar> fmt::Debug for SqMatrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

impl<S: Scalar> FromStr for SqMatrix<S> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(';').map(str::trim);
        let head = parts.next().ok_or_else(|| Error::Parse("empty literal".into()))?;
        let dim: usize = head.parse().map_err(|_| Error::Parse(format!("bad dimension `{head}`")))?;
        if dim == 0 {
            return Err(Error::Parse("dimension must be positive".into()));
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for row in 0..dim {
            let line = parts.next().ok_or_else(|| Error::Parse(format!("missing row {}", row + 1)))?;
            let before = entries.len();
            for tok in line.split_whitespace() {
                let v = tok.parse::<S>().map_err(|_| Error::Parse(format!("bad scalar `{tok}`")))?;
                entries.push(v);
            }
            if entries.len() - before != dim {
                return Err(Error::Parse(format!(
                    "row {} has {} entries, expected {dim}",
                    row + 1,
                    entries.len() - before
                )));
            }
        }
        if parts.any(|p| !p.is_empty()) {
            return Err(Error::Parse("trailing data after last row".into()));
        }
        SqMatrix::new(dim, entries)
    }
}

/// Deterministic integer matrix with entries in `[-bound, bound]`.
pub fn random_element<S: Scalar>(seed: u64, dim: usize, bound: i64) -> SqMatrix<S> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_with(&mut rng, dim, bound)
}

pub(crate) fn random_with<S: Scalar>(rng: &mut impl rand::Rng, dim: usize, bound: i64) -> SqMatrix<S> {
    let bound = bound.abs();
    SqMatrix::from_fn(dim, |_, _| {
        let v = if bound == 0 { 0 } else { rng.random_range(-bound..=bound) };
        S::from_i64(v).expect("integer scalar")
    })
}

/// Random invertible integer matrix (rejection sampling).
pub fn random_invertible<S: Scalar>(rng: &mut impl rand::Rng, dim: usize, bound: i64) -> SqMatrix<S> {
    assert!(bound >= 1, "bound must be positive to find an invertible element");
    loop {
        let m: SqMatrix<S> = random_with(rng, dim, bound);
        if !m.det().is_zero() {
            return m;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use num_traits::Signed;
    use proptest::prelude::*;

    type M = SqMatrix<Rational>;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn inverse_examples() {
        let id = M::identity(2);
        assert_eq!(id.inverse().unwrap(), id);
        let swap = M::from_ints(2, &[0, 1, 1, 0]);
        assert_eq!(swap.inverse().unwrap(), swap);
        let x = M::from_ints(2, &[1, 2, 3, 4]);
        let want = M::new(2, vec![q(-2, 1), q(1, 1), q(3, 2), q(-1, 2)]).unwrap();
        let inv = x.inverse().unwrap();
        assert_eq!(inv, want);
        assert!(x.mul(&inv).is_one() && inv.mul(&x).is_one());
    }

    #[test]
    fn singular_is_rejected() {
        let x = M::from_ints(2, &[1, 2, 2, 4]);
        assert_eq!(x.inverse(), Err(Error::NotInvertible));
        assert!(x.try_inverse().is_none());
        assert!(x.det().is_zero());
    }

    #[test]
    fn star_is_transpose() {
        let x = M::from_ints(2, &[1, 2, 3, 4]);
        assert_eq!(x.star(), M::from_ints(2, &[1, 3, 2, 4]));
        assert_eq!(M::identity(3).star(), M::identity(3));
    }

    #[test]
    fn random_element_examples() {
        let z: M = random_element(1, 1, 0);
        assert_eq!(z, M::zeros(1));
        let a: M = random_element(7, 2, 5);
        let b: M = random_element(7, 2, 5);
        let c: M = random_element(8, 2, 5);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.entries().iter().all(|e| e.abs() <= q(5, 1) && e.is_integer()));
    }

    #[test]
    fn literal_round_trip() {
        let x = M::new(2, vec![q(1, 2), q(-3, 1), q(0, 1), q(7, 5)]).unwrap();
        let s = x.to_string();
        assert_eq!(s, "2; 1/2 -3; 0 7/5;");
        assert_eq!(s.parse::<M>().unwrap(), x);
        assert!("2; 1 2; 3;".parse::<M>().is_err());
        assert!("0;".parse::<M>().is_err());
    }

    #[test]
    fn float_instance_inverts() {
        let x = SqMatrix::<f64>::from_ints(2, &[4, 7, 2, 6]);
        let p = x.mul(&x.inverse().unwrap());
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((p.get(i, j) - want).abs() < 1e-12);
            }
        }
    }

    fn arb_matrix(dim: usize) -> impl Strategy<Value = M> {
        proptest::collection::vec(-6i64..=6, dim * dim).prop_map(move |v| M::from_ints(dim, &v))
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_matrix(2), b in arb_matrix(2), c in arb_matrix(2)) {
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.add(&b).mul(&c), a.mul(&c).add(&b.mul(&c)));
            prop_assert_eq!(a.mul(&a.one_like()), a.clone());
            prop_assert_eq!(a.one_like().mul(&a), a.clone());
        }

        #[test]
        fn star_is_antimultiplicative(a in arb_matrix(3), b in arb_matrix(3)) {
            prop_assert_eq!(a.mul(&b).star(), b.star().mul(&a.star()));
            prop_assert_eq!(a.add(&b).star(), a.star().add(&b.star()));
            prop_assert_eq!(a.star().star(), a);
        }

        #[test]
        fn double_inverse(a in arb_matrix(3)) {
            if let Ok(inv) = a.inverse() {
                prop_assert!(a.mul(&inv).is_one());
                prop_assert_eq!(inv.inverse().unwrap(), a);
            } else {
                prop_assert!(a.det().is_zero());
            }
        }

        #[test]
        fn literal_parse_print(a in arb_matrix(3), s in 1i64..9) {
            let x = a.div_int(s);
            prop_assert_eq!(x.to_string().parse::<M>().unwrap(), x);
        }
    }
}
