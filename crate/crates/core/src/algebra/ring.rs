use std::fmt;

use super::Scalar;

/// Name of a formal variable (`t`, `u`, `v`, `x`, ...).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Var(char);

impl Var {
    pub const T: Var = Var('t');
    pub const U: Var = Var('u');
    pub const V: Var = Var('v');
    pub const X: Var = Var('x');

    pub const fn new(name: char) -> Self {
        Var(name)
    }

    pub fn name(self) -> char {
        self.0
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Associative ring with unit, not necessarily commutative.
///
/// Elements carry their own "ring instance" (matrix dimension, series
/// variables and truncation), so the constants are produced from an
/// existing element rather than out of thin air.
pub trait Ring: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;

    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    /// Multiplication by an integer, i.e. by `n * 1`.
    fn mul_int(&self, n: i64) -> Self;

    /// Two-sided inverse, if one exists.
    fn try_inverse(&self) -> Option<Self>;

    fn is_one(&self) -> bool {
        self.sub(&self.one_like()).is_zero()
    }

    fn is_invertible(&self) -> bool {
        self.try_inverse().is_some()
    }
}

/// Ring that is also an algebra over a field of scalars.
pub trait Algebra: Ring {
    type Scalar: Scalar;

    fn scale(&self, s: &Self::Scalar) -> Self;

    fn div_int(&self, n: i64) -> Self {
        let n = <Self::Scalar as num_traits::FromPrimitive>::from_i64(n).expect("integer fits the scalar field");
        self.scale(&(<Self::Scalar as num_traits::One>::one() / n))
    }
}

/// Involutive antiautomorphism: `(xy)* = y* x*`, `x** = x`.
pub trait Star: Ring {
    fn star(&self) -> Self;
}

/// Ring with a family of commuting derivations indexed by variable.
pub trait Differential: Ring {
    fn derive(&self, var: Var) -> Self;
}

/// `x^k` by repeated squaring; `x^0` is the unit of `x`'s ring.
pub fn pow<R: Ring>(x: &R, mut k: u32) -> R {
    let mut acc = x.one_like();
    let mut base = x.clone();
    while k > 0 {
        if k & 1 == 1 {
            acc = acc.mul(&base);
        }
        k >>= 1;
        if k > 0 {
            base = base.mul(&base);
        }
    }
    acc
}
