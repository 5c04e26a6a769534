//! Truncated formal power series over an algebra, in one or two commuting
//! variables.
//!
//! Coefficients are stored in a box of `size[0] x size[1]` degrees. In each
//! variable a series is either *exact* (every coefficient outside the box is
//! zero: polynomials, constants) or truncated, in which case it knows the
//! coefficients of degree `< size` in that variable and nothing beyond.
//! Operations propagate this: sums and products are truncated at the
//! smallest truncated operand, differentiating a truncated series costs one
//! coefficient, integration gains one (up to the series' cap). The box of a
//! truncated series therefore doubles as the reliable-order watermark of
//! every derived quantity.

use std::fmt::Write as _;

use crate::algebra::{Algebra, Differential, Ring, Scalar, SqMatrix, Star, Var};
use crate::error::{Error, Result};

/// Variables of a series: one, or an ordered pair.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Vars {
    One(Var),
    Two(Var, Var),
}

impl Vars {
    pub fn arity(self) -> usize {
        match self {
            Vars::One(_) => 1,
            Vars::Two(..) => 2,
        }
    }

    /// Slot of `var`, if present.
    pub fn index(self, var: Var) -> Option<usize> {
        match self {
            Vars::One(a) if a == var => Some(0),
            Vars::Two(a, _) if a == var => Some(0),
            Vars::Two(_, b) if b == var => Some(1),
            _ => None,
        }
    }

    pub fn get(self, slot: usize) -> Option<Var> {
        match (self, slot) {
            (Vars::One(a), 0) | (Vars::Two(a, _), 0) => Some(a),
            (Vars::Two(_, b), 1) => Some(b),
            _ => None,
        }
    }

    fn describe(self) -> String {
        match self {
            Vars::One(a) => a.to_string(),
            Vars::Two(a, b) => format!("{a},{b}"),
        }
    }
}

/// The derivation `d/dvar` acting on series.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Derivation(pub Var);

impl Derivation {
    pub fn var(self) -> Var {
        self.0
    }

    pub fn apply<R: Differential>(self, f: &R) -> R {
        f.derive(self.0)
    }

    pub fn apply_n<R: Differential>(self, f: &R, n: usize) -> R {
        (0..n).fold(f.clone(), |acc, _| acc.derive(self.0))
    }
}

/// Truncated power series with coefficients in `A`.
#[derive(Clone, Debug)]
pub struct TruncSeries<A> {
    vars: Vars,
    // stored degrees per slot; slot 1 is 1 for univariate series
    size: [usize; 2],
    // per slot: all coefficients outside the box vanish
    exact: [bool; 2],
    // integration and exact products may use a box up to this
    cap: [usize; 2],
    coeffs: Vec<A>,
    zero: A,
}

// Exact slots compare by value whatever their box; truncated slots must
// know the same number of coefficients.
impl<A: Algebra> PartialEq for TruncSeries<A> {
    fn eq(&self, other: &Self) -> bool {
        if self.vars != other.vars || self.exact != other.exact {
            return false;
        }
        if (0..2).any(|k| !self.exact[k] && self.size[k] != other.size[k]) {
            return false;
        }
        let n = [self.size[0].max(other.size[0]), self.size[1].max(other.size[1])];
        (0..n[0]).all(|i| (0..n[1]).all(|j| self.coeff(i, j) == other.coeff(i, j)))
    }
}

/// How a binary operation combines the operands' per-slot truncation.
fn combine_slot(a: (usize, bool), b: (usize, bool)) -> (usize, bool) {
    match (a.1, b.1) {
        (true, true) => (a.0.max(b.0), true),
        (true, false) => (b.0, false),
        (false, true) => (a.0, false),
        (false, false) => (a.0.min(b.0), false),
    }
}

impl<A: Algebra> TruncSeries<A> {
    fn raw(vars: Vars, size: [usize; 2], exact: [bool; 2], coeffs: Vec<A>, zero: A) -> Self {
        debug_assert_eq!(coeffs.len(), size[0] * size[1]);
        let (size, exact) = if vars.arity() == 1 { ([size[0], 1], [exact[0], true]) } else { (size, exact) };
        TruncSeries { vars, size, exact, cap: size, coeffs, zero }
    }

    fn zeros(vars: Vars, size: [usize; 2], exact: [bool; 2], zero: A) -> Self {
        let size = if vars.arity() == 1 { [size[0], 1] } else { size };
        let coeffs = vec![zero.clone(); size[0] * size[1]];
        Self::raw(vars, size, exact, coeffs, zero)
    }

    fn with_cap_of(mut self, cap: [usize; 2]) -> Self {
        self.cap = [cap[0].max(self.size[0]), cap[1].max(self.size[1])];
        self
    }

    /// Univariate series from its known coefficients `c_0, ..., c_N`
    /// (truncated after degree `N`).
    pub fn univariate(var: Var, coeffs: Vec<A>) -> Self {
        assert!(!coeffs.is_empty(), "need at least the constant coefficient");
        let zero = coeffs[0].zero_like();
        let n = coeffs.len();
        Self::raw(Vars::One(var), [n, 1], [false, true], coeffs, zero)
    }

    /// The polynomial `c_0 + c_1 t + ...` (exact), in a box of degrees
    /// `0..=order`. Coefficients above `order` are dropped, making the
    /// result truncated.
    pub fn polynomial(var: Var, coeffs: &[A], order: usize) -> Self {
        assert!(!coeffs.is_empty(), "need at least the constant coefficient");
        let zero = coeffs[0].zero_like();
        let overflow = coeffs[(order + 1).min(coeffs.len())..].iter().any(|c| !c.is_zero());
        let c = (0..=order).map(|i| coeffs.get(i).cloned().unwrap_or_else(|| zero.clone())).collect();
        Self::raw(Vars::One(var), [order + 1, 1], [!overflow, true], c, zero)
    }

    /// Bivariate series with known coefficient `f(i, j)` of `a^i b^j` for
    /// `i <= orders.0`, `j <= orders.1`; truncated in both variables.
    pub fn bivariate(a: Var, b: Var, orders: (usize, usize), mut f: impl FnMut(usize, usize) -> A) -> Self {
        assert_ne!(a, b, "bivariate series needs two distinct variables");
        let size = [orders.0 + 1, orders.1 + 1];
        let mut coeffs = Vec::with_capacity(size[0] * size[1]);
        for i in 0..size[0] {
            for j in 0..size[1] {
                coeffs.push(f(i, j));
            }
        }
        let zero = coeffs[0].zero_like();
        Self::raw(Vars::Two(a, b), size, [false, false], coeffs, zero)
    }

    /// Declare the series exact: all coefficients outside the box vanish.
    pub fn into_exact(mut self) -> Self {
        self.exact = [true, true];
        self
    }

    /// The constant `c` (exact), in a box of the given orders.
    pub fn constant(c: A, vars: Vars, orders: (usize, usize)) -> Self {
        let mut s = Self::zeros(vars, [orders.0 + 1, orders.1 + 1], [true, true], c.zero_like());
        s.coeffs[0] = c;
        s
    }

    /// Monomial `c * var^k` (exact) in a univariate box of degrees `0..=order`.
    pub fn monomial(var: Var, c: A, k: usize, order: usize) -> Self {
        let mut coeffs = vec![c.zero_like(); k + 1];
        coeffs[k] = c;
        Self::polynomial(var, &coeffs, order)
    }

    /// Allow integration to raise the precision up to `orders` (per slot).
    pub fn with_cap(self, orders: (usize, usize)) -> Self {
        let slot1 = if self.vars.arity() == 1 { 1 } else { orders.1 + 1 };
        self.with_cap_of([orders.0 + 1, slot1])
    }

    pub fn vars(&self) -> Vars {
        self.vars
    }

    /// Size of the coefficient box per slot. For a truncated slot this is
    /// the number of known coefficients.
    pub fn precision(&self) -> (usize, usize) {
        (self.size[0], self.size[1])
    }

    /// Known coefficients in `var` (`None` if exact in `var` or `var` is absent).
    pub fn precision_in(&self, var: Var) -> Option<usize> {
        self.vars.index(var).filter(|&k| !self.exact[k]).map(|k| self.size[k])
    }

    /// Whether the series is exact in slot `k`.
    pub fn is_exact_in(&self, slot: usize) -> bool {
        self.exact[slot]
    }

    /// Highest degree per slot held in the box (`-1`: empty box).
    pub fn orders(&self) -> (i64, i64) {
        (self.size[0] as i64 - 1, self.size[1] as i64 - 1)
    }

    /// Whether at least one coefficient is known.
    pub fn is_informative(&self) -> bool {
        (0..2).all(|k| self.exact[k] || self.size[k] > 0)
    }

    /// Coefficient of `a^i b^j` (`j = 0` for univariate series); zero
    /// outside the box.
    pub fn coeff(&self, i: usize, j: usize) -> &A {
        if i < self.size[0] && j < self.size[1] {
            &self.coeffs[i * self.size[1] + j]
        } else {
            &self.zero
        }
    }

    pub fn constant_term(&self) -> A {
        self.coeff(0, 0).clone()
    }

    /// Iterate `((i, j), c)` over the stored coefficients.
    pub fn terms(&self) -> impl Iterator<Item = ((usize, usize), &A)> {
        let w = self.size[1];
        self.coeffs.iter().enumerate().map(move |(k, c)| ((k / w, k % w), c))
    }

    pub fn coeff_zero(&self) -> &A {
        &self.zero
    }

    /// Highest degree in slot `k` with a nonzero stored coefficient.
    fn degree(&self, k: usize) -> Option<usize> {
        self.terms().filter(|(_, c)| !c.is_zero()).map(|((i, j), _)| if k == 0 { i } else { j }).max()
    }

    fn is_exact_zero(&self) -> bool {
        self.exact == [true, true] && self.is_zero()
    }

    fn check_vars(&self, other: &Self) -> Result<()> {
        if self.vars != other.vars {
            return Err(Error::VarMismatch(self.vars.describe(), other.vars.describe()));
        }
        Ok(())
    }

    fn common_shape(&self, other: &Self) -> ([usize; 2], [bool; 2], [usize; 2]) {
        let s0 = combine_slot((self.size[0], self.exact[0]), (other.size[0], other.exact[0]));
        let s1 = combine_slot((self.size[1], self.exact[1]), (other.size[1], other.exact[1]));
        let cap = [self.cap[0].min(other.cap[0]), self.cap[1].min(other.cap[1])];
        ([s0.0, s1.0], [s0.1, s1.1], cap)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&A, &A) -> A) -> Self {
        if let Err(e) = self.check_vars(other) {
            panic!("{e}");
        }
        let (size, exact, cap) = self.common_shape(other);
        let mut coeffs = Vec::with_capacity(size[0] * size[1]);
        for i in 0..size[0] {
            for j in 0..size[1] {
                coeffs.push(f(self.coeff(i, j), other.coeff(i, j)));
            }
        }
        Self::raw(self.vars, size, exact, coeffs, self.zero.clone()).with_cap_of(cap)
    }

    fn map(&self, f: impl Fn(&A) -> A) -> Self {
        TruncSeries { coeffs: self.coeffs.iter().map(f).collect(), ..self.clone() }
    }

    /// Forget every coefficient of degree `>= prec` (per slot): the result
    /// is truncated in each slot, with at most `prec` known coefficients.
    pub fn truncate(&self, prec: (usize, usize)) -> Self {
        let want = [prec.0, if self.vars.arity() == 1 { 1 } else { prec.1 }];
        let size = [0, 1].map(|k| if self.exact[k] { want[k] } else { self.size[k].min(want[k]) });
        let mut coeffs = Vec::with_capacity(size[0] * size[1]);
        for i in 0..size[0] {
            for j in 0..size[1] {
                coeffs.push(self.coeff(i, j).clone());
            }
        }
        Self::raw(self.vars, size, [false, false], coeffs, self.zero.clone()).with_cap_of(self.cap)
    }

    /// Truncated Cauchy product `self * other`; coefficients multiply in
    /// that order.
    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        let (size, mut exact, cap) = self.common_shape(other);
        if self.is_exact_zero() || other.is_exact_zero() {
            return Ok(Self::zeros(self.vars, size, [true, true], self.zero.clone()).with_cap_of(cap));
        }
        for k in 0..2 {
            if exact[k] {
                let overflow = match (self.degree(k), other.degree(k)) {
                    (Some(a), Some(b)) => a + b >= size[k],
                    _ => false,
                };
                exact[k] = !overflow;
            }
        }
        let mut out = vec![self.zero.clone(); size[0] * size[1]];
        for i1 in 0..size[0].min(self.size[0]) {
            for j1 in 0..size[1].min(self.size[1]) {
                let a = self.coeff(i1, j1);
                if a.is_zero() {
                    continue;
                }
                for i2 in 0..(size[0] - i1).min(other.size[0]) {
                    for j2 in 0..(size[1] - j1).min(other.size[1]) {
                        let b = other.coeff(i2, j2);
                        if b.is_zero() {
                            continue;
                        }
                        let k = (i1 + i2) * size[1] + j1 + j2;
                        out[k] = out[k].add(&a.mul(b));
                    }
                }
            }
        }
        Ok(Self::raw(self.vars, size, exact, out, self.zero.clone()).with_cap_of(cap))
    }

    /// `c * self` for a constant `c` of the coefficient algebra.
    pub fn left_mul(&self, c: &A) -> Self {
        self.map(|x| c.mul(x))
    }

    /// `self * c` for a constant `c` of the coefficient algebra.
    pub fn right_mul(&self, c: &A) -> Self {
        self.map(|x| x.mul(c))
    }

    fn slot(&self, var: Var) -> Result<usize> {
        self.vars.index(var).ok_or(Error::UnknownVar(var.name()))
    }

    /// Partial derivative. A truncated slot loses one known coefficient.
    pub fn try_derive(&self, var: Var) -> Result<Self> {
        let k = self.slot(var)?;
        let mut size = self.size;
        if !self.exact[k] {
            size[k] = size[k].saturating_sub(1);
        }
        let mut coeffs = Vec::with_capacity(size[0] * size[1]);
        for i in 0..size[0] {
            for j in 0..size[1] {
                let (src, deg) = if k == 0 { ((i + 1, j), i + 1) } else { ((i, j + 1), j + 1) };
                coeffs.push(self.coeff(src.0, src.1).mul_int(deg as i64));
            }
        }
        Ok(Self::raw(self.vars, size, self.exact, coeffs, self.zero.clone()).with_cap_of(self.cap))
    }

    /// Definite integral from 0: `sum a_i t^i -> sum a_i t^(i+1) / (i+1)`.
    /// The box grows by one while below the cap; an exact series whose top
    /// coefficient no longer fits becomes truncated.
    pub fn try_integrate(&self, var: Var) -> Result<Self> {
        let k = self.slot(var)?;
        let mut size = self.size;
        let mut exact = self.exact;
        let grown = (size[k] + 1).min(self.cap[k].max(size[k]));
        if exact[k] {
            let top = self.degree(k);
            if top.is_some_and(|d| d + 1 >= size[k]) {
                size[k] = grown;
                exact[k] = top.is_some_and(|d| d + 1 < size[k]);
            }
        } else {
            size[k] = grown;
        }
        let mut coeffs = Vec::with_capacity(size[0] * size[1]);
        for i in 0..size[0] {
            for j in 0..size[1] {
                let deg = if k == 0 { i } else { j };
                if deg == 0 {
                    coeffs.push(self.zero.clone());
                } else {
                    let src = if k == 0 { self.coeff(i - 1, j) } else { self.coeff(i, j - 1) };
                    coeffs.push(src.div_int(deg as i64));
                }
            }
        }
        Ok(Self::raw(self.vars, size, exact, coeffs, self.zero.clone()).with_cap_of(self.cap))
    }

    pub fn integrate(&self, var: Var) -> Self {
        self.try_integrate(var).unwrap_or_else(|e| panic!("{e}"))
    }

    /// Two-sided multiplicative inverse.
    ///
    /// Solves `f * g = 1` degree by degree, `g_m = -f_0^{-1} sum_{a != 0} f_a g_{m-a}`,
    /// then checks `g * f = 1` as well. The inverse is exact only in slots
    /// where `f` is constant.
    pub fn inverse(&self) -> Result<Self> {
        let c0_inv = self.coeff(0, 0).try_inverse().ok_or(Error::NotInvertible)?;
        let size = self.size;
        if size[0] == 0 || size[1] == 0 {
            return Ok(self.clone());
        }
        let mut g = vec![self.zero.clone(); size[0] * size[1]];
        g[0] = c0_inv.clone();
        for i in 0..size[0] {
            for j in 0..size[1] {
                if i == 0 && j == 0 {
                    continue;
                }
                let mut acc = self.zero.clone();
                for a in 0..=i {
                    for b in 0..=j {
                        if a == 0 && b == 0 {
                            continue;
                        }
                        let fa = self.coeff(a, b);
                        if fa.is_zero() {
                            continue;
                        }
                        let gb = &g[(i - a) * size[1] + (j - b)];
                        if gb.is_zero() {
                            continue;
                        }
                        acc = acc.add(&fa.mul(gb));
                    }
                }
                g[i * size[1] + j] = c0_inv.mul(&acc).neg();
            }
        }
        let exact = [0, 1].map(|k| self.exact[k] && self.degree(k).unwrap_or(0) == 0);
        let inv = Self::raw(self.vars, size, exact, g, self.zero.clone()).with_cap_of(self.cap);
        if !inv.try_mul(self)?.is_one() {
            return Err(Error::Inconsistent("series inverse is not two-sided".into()));
        }
        Ok(inv)
    }

    /// `exp(p) = sum p^k / k!`, for `p` with zero constant term.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeff(0, 0).is_zero() {
            return Err(Error::NonzeroConstantTerm);
        }
        // the exact powers would otherwise never leave the box
        let mut p = self.clone();
        p.exact = [0, 1].map(|k| self.exact[k] && self.degree(k).is_none());
        let max_deg = self.size[0] + self.size[1];
        let mut result = Ring::one_like(&p);
        let mut term = result.clone();
        for k in 1..=max_deg {
            term = term.try_mul(&p)?.div_int(k as i64);
            if term.is_zero() {
                break;
            }
            result = Ring::add(&result, &term);
        }
        Ok(result)
    }

    /// Slice at `var = 0`, as a univariate series in the remaining variable.
    pub fn restrict_zero(&self, var: Var) -> Result<Self> {
        let k = self.slot(var)?;
        let Vars::Two(a, b) = self.vars else {
            return Err(Error::Shape("restriction needs a bivariate series".into()));
        };
        if self.size[k] == 0 && !self.exact[k] {
            return Err(Error::Shape(format!("nothing is known at {var} = 0")));
        }
        let (rest, n) = if k == 0 { (b, self.size[1]) } else { (a, self.size[0]) };
        let c = (0..n).map(|d| if k == 0 { self.coeff(0, d) } else { self.coeff(d, 0) }.clone()).collect();
        let s = Self::raw(Vars::One(rest), [n, 1], [self.exact[1 - k], true], c, self.zero.clone());
        Ok(s.with_cap_of([self.cap[1 - k], 1]))
    }

    /// View a univariate series as a bivariate one over `(a, b)`, constant
    /// (hence exact) in the other variable, boxed to `other_size` degrees.
    pub fn embed(&self, a: Var, b: Var, other_size: usize) -> Result<Self> {
        let Vars::One(own) = self.vars else {
            return Err(Error::Shape("only univariate series can be embedded".into()));
        };
        let n = self.size[0];
        let other_size = other_size.max(1);
        let (size, exact, own_first) = if own == a {
            ([n, other_size], [self.exact[0], true], true)
        } else if own == b {
            ([other_size, n], [true, self.exact[0]], false)
        } else {
            return Err(Error::VarMismatch(own.to_string(), format!("{a},{b}")));
        };
        let mut coeffs = vec![self.zero.clone(); size[0] * size[1]];
        for d in 0..n {
            let idx = if own_first { d * size[1] } else { d };
            coeffs[idx] = self.coeffs[d].clone();
        }
        let s = Self::raw(Vars::Two(a, b), size, exact, coeffs, self.zero.clone());
        let own_cap = self.cap[0];
        Ok(s.with_cap_of(if own_first { [own_cap, other_size] } else { [other_size, own_cap] }))
    }

    /// Whether all non-constant coefficients vanish.
    pub fn is_constant(&self) -> bool {
        self.terms().all(|((i, j), c)| (i == 0 && j == 0) || c.is_zero())
    }

    /// Whether `self` and `other` agree on every commonly known coefficient.
    pub fn agrees_with(&self, other: &Self) -> bool {
        self.vars == other.vars && Ring::sub(self, other).is_zero()
    }

    /// Apply a coefficientwise map (e.g. the involution).
    pub fn map_coeffs(&self, f: impl Fn(&A) -> A) -> Self {
        self.map(f)
    }
}

impl<A: Algebra> Ring for TruncSeries<A> {
    fn zero_like(&self) -> Self {
        Self::zeros(self.vars, self.size, [true, true], self.zero.clone()).with_cap_of(self.cap)
    }

    fn one_like(&self) -> Self {
        let mut s = self.zero_like();
        if let Some(c) = s.coeffs.first_mut() {
            *c = self.zero.one_like();
        }
        s
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Ring::is_zero)
    }

    fn is_one(&self) -> bool {
        self.terms().all(|((i, j), c)| if i == 0 && j == 0 { c.is_one() } else { c.is_zero() })
    }

    fn add(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, |a, b| a.add(b))
    }

    fn sub(&self, rhs: &Self) -> Self {
        self.zip_with(rhs, |a, b| a.sub(b))
    }

    fn neg(&self) -> Self {
        self.map(|a| a.neg())
    }

    fn mul(&self, rhs: &Self) -> Self {
        self.try_mul(rhs).unwrap_or_else(|e| panic!("{e}"))
    }

    fn mul_int(&self, n: i64) -> Self {
        self.map(|a| a.mul_int(n))
    }

    fn try_inverse(&self) -> Option<Self> {
        self.inverse().ok()
    }

    fn is_invertible(&self) -> bool {
        self.coeff(0, 0).is_invertible()
    }
}

impl<A: Algebra> Algebra for TruncSeries<A> {
    type Scalar = A::Scalar;

    fn scale(&self, s: &A::Scalar) -> Self {
        self.map(|a| a.scale(s))
    }
}

impl<A: Algebra + Star> Star for TruncSeries<A> {
    fn star(&self) -> Self {
        self.map(Star::star)
    }
}

impl<A: Algebra> Differential for TruncSeries<A> {
    fn derive(&self, var: Var) -> Self {
        self.try_derive(var).unwrap_or_else(|e| panic!("{e}"))
    }
}

impl<S: Scalar> TruncSeries<SqMatrix<S>> {
    pub fn dim(&self) -> usize {
        self.zero.dim()
    }

    /// Evaluate in double precision at `point` (one value per variable).
    /// Approximate by nature.
    pub fn eval_float(&self, point: &[f64]) -> Result<SqMatrix<f64>> {
        if point.len() != self.vars.arity() {
            return Err(Error::DimMismatch(self.vars.arity(), point.len()));
        }
        let d = self.dim();
        let a = point[0];
        let b = point.get(1).copied().unwrap_or(0.0);
        let mut acc = vec![0.0f64; d * d];
        // Horner in the first slot, inner Horner in the second
        for i in (0..self.size[0]).rev() {
            let mut row = vec![0.0f64; d * d];
            for j in (0..self.size[1]).rev() {
                let c = self.coeff(i, j).to_f64();
                for (r, e) in row.iter_mut().zip(c.entries()) {
                    *r = *r * b + e;
                }
            }
            for (x, r) in acc.iter_mut().zip(&row) {
                *x = *x * a + r;
            }
        }
        SqMatrix::new(d, acc)
    }

    /// Line-oriented dump: header `vars=u,v orders=6,6 dim=2`, then one line
    /// `i j : <matrix literal>` per nonzero coefficient. Exact slots are
    /// listed in an extra header field, e.g. `exact=v`.
    pub fn to_dump(&self) -> String {
        let mut out = String::new();
        let (o1, o2) = self.orders();
        match self.vars {
            Vars::One(a) => {
                let _ = writeln!(out, "vars={a} orders={o1} dim={}", self.dim());
            }
            Vars::Two(a, b) => {
                let _ = writeln!(out, "vars={a},{b} orders={o1},{o2} dim={}", self.dim());
            }
        }
        let exact: Vec<String> = (0..self.vars.arity())
            .filter(|&k| self.exact[k])
            .filter_map(|k| self.vars.get(k))
            .map(|v| v.to_string())
            .collect();
        if !exact.is_empty() {
            out.insert_str(out.len() - 1, &format!(" exact={}", exact.join(",")));
        }
        for ((i, j), c) in self.terms() {
            if c.is_zero() {
                continue;
            }
            match self.vars {
                Vars::One(_) => {
                    let _ = writeln!(out, "{i} : {c}");
                }
                Vars::Two(..) => {
                    let _ = writeln!(out, "{i} {j} : {c}");
                }
            }
        }
        out
    }

    /// Inverse of [`to_dump`](Self::to_dump).
    pub fn from_dump(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty dump".into()))?;
        let mut vars = None;
        let mut orders = None;
        let mut dim = None;
        let mut exact_names = Vec::new();
        for field in header.split_whitespace() {
            let (key, val) =
                field.split_once('=').ok_or_else(|| Error::Parse(format!("bad header field `{field}`")))?;
            match key {
                "vars" => vars = Some(parse_vars(val)?),
                "orders" => {
                    let o: Vec<i64> = val
                        .split(',')
                        .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad order `{t}`"))))
                        .collect::<Result<_>>()?;
                    orders = Some(o);
                }
                "dim" => dim = Some(val.parse::<usize>().map_err(|_| Error::Parse(format!("bad dim `{val}`")))?),
                "exact" => exact_names = val.split(',').map(str::to_owned).collect(),
                _ => return Err(Error::Parse(format!("unknown header field `{key}`"))),
            }
        }
        let vars = vars.ok_or_else(|| Error::Parse("missing vars".into()))?;
        let orders = orders.ok_or_else(|| Error::Parse("missing orders".into()))?;
        let dim = dim.ok_or_else(|| Error::Parse("missing dim".into()))?;
        if orders.len() != vars.arity() || orders.iter().any(|&o| o < -1) {
            return Err(Error::Parse("orders do not match vars".into()));
        }
        if dim == 0 {
            return Err(Error::Parse("dim must be positive".into()));
        }
        let prec = [(orders[0] + 1) as usize, orders.get(1).map_or(1, |&o| (o + 1) as usize)];
        let mut exact = [false, vars.arity() == 1];
        for name in &exact_names {
            let slot = (0..vars.arity())
                .find(|&k| vars.get(k).is_some_and(|v| v.to_string() == *name))
                .ok_or_else(|| Error::Parse(format!("unknown exact variable `{name}`")))?;
            exact[slot] = true;
        }
        let mut s = Self::zeros(vars, prec, exact, SqMatrix::zeros(dim));
        for line in lines {
            let (idx, lit) =
                line.split_once(':').ok_or_else(|| Error::Parse(format!("bad coefficient line `{line}`")))?;
            let ix: Vec<usize> = idx
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad index `{t}`"))))
                .collect::<Result<_>>()?;
            if ix.len() != vars.arity() {
                return Err(Error::Parse(format!("index arity mismatch in `{line}`")));
            }
            let (i, j) = (ix[0], ix.get(1).copied().unwrap_or(0));
            if i >= prec[0] || j >= prec[1] {
                return Err(Error::Parse(format!("index out of range in `{line}`")));
            }
            let c: SqMatrix<S> = lit.trim().parse()?;
            if c.dim() != dim {
                return Err(Error::DimMismatch(dim, c.dim()));
            }
            s.coeffs[i * prec[1] + j] = c;
        }
        Ok(s)
    }
}

fn parse_vars(val: &str) -> Result<Vars> {
    let names: Vec<char> = val
        .split(',')
        .map(|t| {
            let mut cs = t.chars();
            match (cs.next(), cs.next()) {
                (Some(c), None) => Ok(c),
                _ => Err(Error::Parse(format!("bad variable `{t}`"))),
            }
        })
        .collect::<Result<_>>()?;
    match names.as_slice() {
        [a] => Ok(Vars::One(Var::new(*a))),
        [a, b] if a != b => Ok(Vars::Two(Var::new(*a), Var::new(*b))),
        _ => Err(Error::Parse(format!("bad vars `{val}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::random_element;
    use crate::{AlgebraElement as M, Rational, Series};
    use proptest::prelude::*;

    fn rnd(seed: u64) -> M {
        random_element(seed, 2, 4)
    }

    fn rnd_series(seed: u64, var: Var, order: usize) -> Series {
        Series::univariate(var, (0..=order).map(|k| rnd(seed * 100 + k as u64)).collect())
    }

    fn rnd_bi(seed: u64, orders: (usize, usize)) -> Series {
        Series::bivariate(Var::U, Var::V, orders, |i, j| rnd(seed * 1000 + (i * 31 + j) as u64))
    }

    // independent convolution: accumulate every pair, then drop what falls outside
    fn naive_mul(f: &Series, g: &Series) -> Series {
        let (p, q) = f.precision();
        Series::bivariate(Var::U, Var::V, (p - 1, q - 1), |i, j| {
            let mut acc = M::zeros(2);
            for ((a, b), c) in f.terms() {
                for ((x, y), e) in g.terms() {
                    if a + x == i && b + y == j {
                        acc = &acc + &(c * e);
                    }
                }
            }
            acc
        })
    }

    #[test]
    fn mul_examples() {
        let e = rnd(3);
        let one = M::identity(2);
        let p = Series::polynomial(Var::T, &[one.clone(), e.clone()], 4);
        let m = Series::polynomial(Var::T, &[one.clone(), e.neg()], 4);
        let want = Series::polynomial(Var::T, &[one.clone(), M::zeros(2), e.mul(&e).neg()], 4);
        assert_eq!(p.mul(&m), want);
        assert_eq!(p.mul(&p.one_like()), p);
        let f = rnd_bi(1, (3, 2));
        let g = rnd_bi(2, (3, 2));
        assert_eq!(f.mul(&g), naive_mul(&f, &g));
        assert_ne!(f.mul(&g), g.mul(&f));
    }

    #[test]
    fn var_mismatch_is_an_error() {
        let f = rnd_series(1, Var::T, 3);
        let g = rnd_series(2, Var::U, 3);
        assert!(matches!(f.try_mul(&g), Err(Error::VarMismatch(..))));
        assert!(matches!(f.try_derive(Var::X), Err(Error::UnknownVar('x'))));
    }

    #[test]
    fn exactness_bookkeeping() {
        let one = Series::constant(M::identity(2), Vars::One(Var::T), (3, 0));
        assert!(one.derive(Var::T).is_exact_in(0) && one.derive(Var::T).is_zero());
        let f = rnd_series(4, Var::T, 5);
        assert_eq!(f.derive(Var::T).precision_in(Var::T), Some(5));
        assert_eq!(f.mul(&one).precision_in(Var::T), Some(6));
        // (1 + t)^2 still fits the box, (1 + t)^4 does not
        let p = Series::polynomial(Var::T, &[M::identity(2), M::identity(2)], 3);
        let p2 = p.mul(&p);
        assert!(p2.is_exact_in(0));
        let p4 = p2.mul(&p2);
        assert_eq!(p4.precision_in(Var::T), Some(4));
        assert_eq!(*p4.coeff(3, 0), M::identity(2).mul_int(4));
        let g = p.inverse().unwrap();
        assert!(!g.is_exact_in(0));
        let b = Series::bivariate(Var::U, Var::V, (3, 2), |i, j| rnd((i * 7 + j) as u64));
        let e = Series::univariate(Var::U, vec![rnd(1), rnd(2)]).embed(Var::U, Var::V, 3).unwrap();
        assert!(e.is_exact_in(1));
        assert_eq!(b.mul(&e).precision(), (2, 3));
    }

    #[test]
    fn derive_examples() {
        let c = Series::constant(rnd(1), Vars::One(Var::T), (5, 0));
        assert!(c.derive(Var::T).is_zero());
        let e = rnd(2);
        let t3 = Series::monomial(Var::T, e.clone(), 3, 6);
        assert_eq!(t3.derive(Var::T), Series::monomial(Var::T, e.mul_int(3), 2, 5));
    }

    #[test]
    fn integrate_examples() {
        let z = Series::constant(M::zeros(2), Vars::One(Var::T), (4, 0));
        assert!(z.integrate(Var::T).is_zero());
        let (a0, a1) = (rnd(5), rnd(6));
        let f = Series::polynomial(Var::T, &[a0.clone(), a1.clone()], 3).with_cap((4, 0));
        let want = Series::polynomial(Var::T, &[M::zeros(2), a0, a1.div_int(2)], 4);
        assert_eq!(f.integrate(Var::T), want);
        // without headroom the top coefficient is dropped
        let g = Series::polynomial(Var::T, &[rnd(1)], 3);
        assert_eq!(g.integrate(Var::T).precision(), (4, 1));
    }

    #[test]
    fn inverse_examples() {
        let one = Series::constant(M::identity(2), Vars::One(Var::T), (5, 0));
        assert_eq!(one.inverse().unwrap(), one);
        let e = rnd(9);
        let f = Series::polynomial(Var::T, &[M::identity(2), e.neg()], 5);
        let geo: Vec<M> = (0..=5).map(|k| crate::algebra::pow(&e, k)).collect();
        assert_eq!(f.inverse().unwrap(), Series::univariate(Var::T, geo));
        let singular = Series::polynomial(Var::T, &[M::from_ints(2, &[1, 1, 1, 1])], 3);
        assert_eq!(singular.inverse(), Err(Error::NotInvertible));
    }

    #[test]
    fn exp_examples() {
        let z = Series::constant(M::zeros(2), Vars::One(Var::T), (6, 0));
        assert!(z.exp().unwrap().is_one());
        let x = rnd(4);
        let tx = Series::monomial(Var::T, x.clone(), 1, 8);
        let e = tx.exp().unwrap();
        assert!(e.mul(&tx.neg().exp().unwrap()).is_one());
        assert_eq!(e.derive(Var::T), e.left_mul(&x).truncate((8, 1)));
        assert_eq!(Series::constant(M::identity(2), Vars::One(Var::T), (3, 0)).exp(), Err(Error::NonzeroConstantTerm));
    }

    #[test]
    fn eval_float_examples() {
        let one = M::identity(1);
        let f =
            Series::bivariate(Var::U, Var::V, (2, 2), |i, j| if i == j && i <= 1 { one.clone() } else { M::zeros(1) });
        let v = f.eval_float(&[0.5, 0.5]).unwrap();
        assert_eq!(*v.get(0, 0), 1.25);
        let c = rnd(3);
        let cs = Series::constant(c.clone(), Vars::Two(Var::U, Var::V), (3, 3));
        assert_eq!(cs.eval_float(&[0.7, -0.2]).unwrap(), c.to_f64());
        let x = Series::monomial(Var::T, M::identity(1), 1, 16).exp().unwrap();
        let y = x.eval_float(&[0.1]).unwrap();
        assert!((y.get(0, 0) - 0.1f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn restrict_examples() {
        let one = M::identity(1);
        let f =
            Series::bivariate(Var::U, Var::V, (3, 3), |i, j| if i == j && i <= 1 { one.clone() } else { M::zeros(1) });
        assert!(f.restrict_zero(Var::V).unwrap().is_one());
        let c = Series::constant(rnd(2), Vars::Two(Var::U, Var::V), (2, 2));
        assert_eq!(c.restrict_zero(Var::U).unwrap(), Series::constant(rnd(2), Vars::One(Var::V), (2, 0)));
    }

    #[test]
    fn embed_then_restrict() {
        let f = rnd_series(3, Var::V, 4);
        let b = f.embed(Var::U, Var::V, 3).unwrap();
        assert_eq!(b.precision(), (3, 5));
        assert_eq!(b.restrict_zero(Var::U).unwrap(), f);
        assert!(b.derive(Var::U).is_zero());
    }

    #[test]
    fn dump_round_trip() {
        let f = rnd_bi(7, (3, 2)).div_int(3);
        let text = f.to_dump();
        assert!(text.starts_with("vars=u,v orders=3,2 dim=2\n"));
        assert_eq!(Series::from_dump(&text).unwrap(), f);
        let g = rnd_series(2, Var::T, 4);
        assert_eq!(Series::from_dump(&g.to_dump()).unwrap(), g);
        assert!(Series::from_dump("vars=u orders=3,3 dim=2").is_err());
    }

    #[test]
    fn rational_scalars_stay_reduced() {
        let f = Series::polynomial(Var::T, &[M::identity(1), M::identity(1).mul_int(2)], 5);
        let g = f.inverse().unwrap();
        for (_, c) in g.terms() {
            let r: &Rational = c.get(0, 0);
            assert_eq!(r.reduced(), *r);
            assert!(*r.denom() > 0.into());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn leibniz_rule(s1 in 0u64..500, s2 in 0u64..500) {
            let f = rnd_bi(s1, (4, 3));
            let g = rnd_bi(s2, (4, 3));
            for var in [Var::U, Var::V] {
                let lhs = f.mul(&g).derive(var);
                let rhs = f.derive(var).mul(&g).add(&f.mul(&g.derive(var)));
                prop_assert_eq!(lhs, rhs);
            }
        }

        #[test]
        fn derive_undoes_integrate(s in 0u64..500) {
            let f = rnd_bi(s, (3, 3));
            for var in [Var::U, Var::V] {
                prop_assert!(f.integrate(var).derive(var).agrees_with(&f));
            }
        }

        #[test]
        fn partials_commute(s in 0u64..500) {
            let f = rnd_bi(s, (4, 4));
            prop_assert_eq!(f.derive(Var::U).derive(Var::V), f.derive(Var::V).derive(Var::U));
        }

        #[test]
        fn inverse_is_two_sided(s in 0u64..500) {
            let f = rnd_bi(s, (3, 3));
            if let Ok(g) = f.inverse() {
                prop_assert!(f.mul(&g).is_one());
                prop_assert!(g.mul(&f).is_one());
            } else {
                prop_assert!(!f.constant_term().is_invertible());
            }
        }

        #[test]
        fn truncation_is_monotone(s1 in 0u64..500, s2 in 0u64..500) {
            let f = rnd_bi(s1, (4, 4));
            let g = rnd_bi(s2, (4, 4));
            let lo = (3, 2);
            prop_assert_eq!(f.mul(&g).truncate(lo), f.truncate(lo).mul(&g.truncate(lo)));
            prop_assert_eq!(f.derive(Var::U).truncate((2, 2)), f.truncate(lo).derive(Var::U));
            if let (Ok(a), Ok(b)) = (f.inverse(), f.truncate(lo).inverse()) {
                prop_assert_eq!(a.truncate(lo), b);
            }
        }
    }
}
