//! Differential operators `sum a_k D^k` with coefficients on the left.

use std::fmt::Write as _;

use crate::algebra::{pow, Algebra, Differential, Ring, Scalar, SqMatrix, Var};
use crate::error::{Error, Result};
use crate::ncmatrix::{vandermonde, wronski, NcMatrix};
use crate::series::{Derivation, TruncSeries};

/// `sum_k coeffs[k] D^k`, coefficients stored by ascending power of `D`.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffOp<R> {
    var: Var,
    coeffs: Vec<R>,
}

/// Binomial coefficient `C(k, i)` for `0 <= i <= k`.
pub(crate) fn binomial(k: usize, i: usize) -> i64 {
    (0..i).fold(1i64, |acc, t| acc * (k - t) as i64 / (t + 1) as i64)
}

impl<R: Differential> DiffOp<R> {
    /// Operator from coefficients by ascending power. Trailing zero
    /// coefficients are kept, so the formal order is `coeffs.len() - 1`.
    pub fn new(var: Var, coeffs: Vec<R>) -> Self {
        assert!(!coeffs.is_empty(), "operator needs at least one coefficient");
        DiffOp { var, coeffs }
    }

    /// Monic operator `D^n + lower[n-1] D^(n-1) + ... + lower[0]`.
    pub fn monic(var: Var, lower: Vec<R>, template: &R) -> Self {
        let mut coeffs = lower;
        coeffs.push(template.one_like());
        DiffOp { var, coeffs }
    }

    /// Multiplication by `a`.
    pub fn constant(var: Var, a: R) -> Self {
        DiffOp { var, coeffs: vec![a] }
    }

    pub fn identity(var: Var, template: &R) -> Self {
        Self::constant(var, template.one_like())
    }

    /// `D - b`.
    pub fn linear(var: Var, b: &R) -> Self {
        DiffOp { var, coeffs: vec![b.neg(), b.one_like()] }
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `D^k` (zero above the order).
    pub fn coeff(&self, k: usize) -> R {
        self.coeffs.get(k).cloned().unwrap_or_else(|| self.coeffs[0].zero_like())
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(Ring::is_one)
    }

    pub fn apply(&self, f: &R) -> R {
        let mut acc = f.zero_like();
        let mut df = f.clone();
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                df = df.derive(self.var);
            }
            acc = acc.add(&c.mul(&df));
        }
        acc
    }

    /// `self o other`, normalized by `D^k b = sum_i C(k, i) (D^i b) D^(k-i)`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.var != other.var {
            return Err(Error::VarMismatch(self.var.to_string(), other.var.to_string()));
        }
        let zero = self.coeffs[0].zero_like();
        let mut out = vec![zero; self.order() + other.order() + 1];
        for (j, b) in other.coeffs.iter().enumerate() {
            let mut db = b.clone();
            for i in 0..=self.order() {
                if i > 0 {
                    db = db.derive(self.var);
                }
                for k in i..=self.order() {
                    let a = &self.coeffs[k];
                    let term = a.mul(&db).mul_int(binomial(k, i));
                    out[k - i + j] = out[k - i + j].add(&term);
                }
            }
        }
        Ok(DiffOp { var: self.var, coeffs: out })
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        DiffOp { var: self.var, coeffs: (0..n).map(|k| self.coeff(k).sub(&other.coeff(k))).collect() }
    }

    pub fn map(&self, f: impl Fn(&R) -> R) -> Self {
        DiffOp { var: self.var, coeffs: self.coeffs.iter().map(f).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Ring::is_zero)
    }

    /// The monic operator of order `n` annihilating `f_1, ..., f_n`.
    ///
    /// Its lower coefficients solve `(c_0, ..., c_{n-1}) W = -(D^n f_1, ..., D^n f_n)`
    /// with `W` the Wronski matrix.
    pub fn from_kernel(f: &[R], d: Derivation) -> Result<Self> {
        let n = f.len();
        if n == 0 {
            return Err(Error::Shape("empty kernel".into()));
        }
        let w = wronski(f, d);
        let w_inv = w.inverse().map_err(|_| Error::DegenerateKernel)?;
        let top = NcMatrix::from_fn(1, n, |_, i| d.apply_n(&f[i], n).neg());
        let c = top.mul(&w_inv)?;
        Ok(Self::monic(d.var(), c.entries().to_vec(), &f[0]))
    }

    /// Factor the operator annihilating `f` as `(D - b_n) ... (D - b_1)`,
    /// with `b_i = (D W_i) W_i^{-1}` and `W_i = |W(f_1, ..., f_i)|_ii`.
    pub fn factorize(f: &[R], d: Derivation) -> Result<Factorization<R>> {
        let mut b = Vec::with_capacity(f.len());
        for i in 1..=f.len() {
            let wi = wronski(&f[..i], d).quasidet(i - 1, i - 1).map_err(|_| Error::DegeneratePrefix(i))?;
            let wi_inv = wi.try_inverse().ok_or(Error::DegeneratePrefix(i))?;
            b.push(d.apply(&wi).mul(&wi_inv));
        }
        Ok(Factorization { var: d.var(), b })
    }
}

impl<S: Scalar> DiffOp<TruncSeries<SqMatrix<S>>> {
    /// `order=n` followed by the coefficient dumps, leading coefficient first.
    pub fn to_dump(&self) -> String {
        let n = self.order();
        let mut out = format!("order={n}\n");
        for r in 0..=n {
            let _ = writeln!(out, "a{r}:");
            out.push_str(&self.coeffs[n - r].to_dump());
        }
        out
    }
}

/// `L = (D - b_n) ... (D - b_1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Factorization<R> {
    pub var: Var,
    pub b: Vec<R>,
}

impl<R: Differential> Factorization<R> {
    pub fn recompose(&self) -> Result<DiffOp<R>> {
        let first = self.b.first().ok_or_else(|| Error::Shape("empty factorization".into()))?;
        let mut l = DiffOp::linear(self.var, first);
        for b in &self.b[1..] {
            l = DiffOp::linear(self.var, b).compose(&l)?;
        }
        Ok(l)
    }

    /// Partial products `L_i = (D - b_i) ... (D - b_1)`, `i = 1..n`.
    pub fn prefixes(&self) -> Result<Vec<DiffOp<R>>> {
        let mut out: Vec<DiffOp<R>> = Vec::with_capacity(self.b.len());
        for b in &self.b {
            let lin = DiffOp::linear(self.var, b);
            let next = match out.last() {
                Some(prev) => lin.compose(prev)?,
                None => lin,
            };
            out.push(next);
        }
        Ok(out)
    }
}

/// Kernel `f_1, ..., f_n` of `(D - b_n) ... (D - b_1)` with `b_i = (D g_i) g_i^{-1}`,
/// normalized so that the Wronski matrix at 0 is unit lower triangular.
///
/// Uses `kernel(g) = [g_1] ++ [g_1 * int_0 g_1^{-1} h | h in kernel(g_2, ..., g_n)]`.
pub fn kernel_from_factorization<A: Algebra>(g: &[TruncSeries<A>], var: Var) -> Result<Vec<TruncSeries<A>>> {
    for (i, gi) in g.iter().enumerate() {
        if !gi.constant_term().is_one() {
            return Err(Error::ConstantTermNotOne(i + 1));
        }
    }
    kernel_rec(g, var)
}

fn kernel_rec<A: Algebra>(g: &[TruncSeries<A>], var: Var) -> Result<Vec<TruncSeries<A>>> {
    let Some((g1, rest)) = g.split_first() else {
        return Ok(Vec::new());
    };
    let g1_inv = g1.inverse()?;
    let mut out = vec![g1.clone()];
    for h in kernel_rec(rest, var)? {
        out.push(g1.try_mul(&g1_inv.try_mul(&h)?.try_integrate(var)?)?);
    }
    Ok(out)
}

/// `b_i = (D g_i) g_i^{-1}`.
pub fn log_derivatives<R: Differential>(g: &[R], d: Derivation) -> Result<Factorization<R>> {
    let b = g
        .iter()
        .map(|gi| gi.try_inverse().map(|inv| d.apply(gi).mul(&inv)).ok_or(Error::NotInvertible))
        .collect::<Result<_>>()?;
    Ok(Factorization { var: d.var(), b })
}

/// Conjugated roots `y_i = q_i x_i q_i^{-1}`, `q_i = |V(x_1, ..., x_i)|_ii`.
pub fn vieta_roots<R: Ring>(x: &[R]) -> Result<Vec<R>> {
    let mut y = Vec::with_capacity(x.len());
    for i in 1..=x.len() {
        let q = vandermonde(&x[..i]).quasidet(i - 1, i - 1).map_err(|_| Error::DegeneratePrefix(i))?;
        let q_inv = q.try_inverse().ok_or(Error::DegeneratePrefix(i))?;
        y.push(q.mul(&x[i - 1]).mul(&q_inv));
    }
    Ok(y)
}

/// Coefficients `a_1, ..., a_n` of the monic polynomial `x^n + a_1 x^(n-1) + ... + a_n`
/// (coefficients on the left) vanishing at each `x_k`.
///
/// They are the coefficients of `(D - y_n) ... (D - y_1)` for constant `y_i`,
/// i.e. `a_r = (-1)^r sum_{i_1 < ... < i_r} y_{i_r} ... y_{i_1}`.
pub fn vieta_coeffs<R: Ring>(x: &[R]) -> Result<Vec<R>> {
    let y = vieta_roots(x)?;
    let Some(first) = y.first() else {
        return Ok(Vec::new());
    };
    // p[k] = coefficient of D^k in the running product
    let mut p = vec![first.neg(), first.one_like()];
    for yi in &y[1..] {
        let mut next = vec![first.zero_like(); p.len() + 1];
        for (k, c) in p.iter().enumerate() {
            next[k + 1] = next[k + 1].add(c);
            next[k] = next[k].sub(&yi.mul(c));
        }
        p = next;
    }
    let n = y.len();
    Ok((1..=n).map(|r| p[n - r].clone()).collect())
}

/// `x^n + a_1 x^(n-1) + ... + a_n` with coefficients on the left.
pub fn eval_monic<R: Ring>(a: &[R], x: &R) -> R {
    let n = a.len();
    let mut acc = pow(x, n as u32);
    for (r, ar) in a.iter().enumerate() {
        acc = acc.add(&ar.mul(&pow(x, (n - r - 1) as u32)));
    }
    acc
}

/// Factor the operator annihilating `e^{t x_1}, ..., e^{t x_n}` (series to
/// `order`); the resulting `b_i` are constants equal to the conjugated roots.
pub fn vieta_via_factorization<A: Algebra>(x: &[A], var: Var, order: usize) -> Result<Factorization<TruncSeries<A>>> {
    let f = x.iter().map(|xi| TruncSeries::monomial(var, xi.clone(), 1, order).exp()).collect::<Result<Vec<_>>>()?;
    DiffOp::factorize(&f, Derivation(var))
}
