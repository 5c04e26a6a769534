//! Nonabelian Toda field equations in two variables `u`, `v`.
//!
//! A solution of length `n` is a list of invertible series
//! `phi_1, ..., phi_n` in `A[[u, v]]` with
//!
//! ```text
//! d/du((d/dv phi_j) phi_j^{-1}) = phi_{j+1} phi_j^{-1} - phi_j phi_{j-1}^{-1}
//! ```
//!
//! where the terms involving `phi_0` or `phi_{n+1}` are dropped. Types C
//! and B are the reductions `phi_{n+1-i} = (phi_i^*)^{-1}` for even and odd
//! `n`. Indices are 0-based in the API.

use crate::algebra::{Algebra, Differential, Ring, Star, Var};
use crate::diffop::{kernel_from_factorization, DiffOp, Factorization};
use crate::error::{Error, Result};
use crate::ncmatrix::{wronski, NcMatrix};
use crate::series::{Derivation, TruncSeries, Vars};

pub const U: Var = Var::U;
pub const V: Var = Var::V;
const DU: Derivation = Derivation(Var::U);
const DV: Derivation = Derivation(Var::V);

/// The pair of variables every solution lives in.
pub const UV: Vars = Vars::Two(U, V);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TodaType {
    A,
    B,
    C,
}

impl TodaType {
    /// Length of the full system for `half` supplied components.
    pub fn full_len(self, half: usize) -> usize {
        match self {
            TodaType::A => half,
            TodaType::B => 2 * half - 1,
            TodaType::C => 2 * half,
        }
    }
}

/// Initial data `phi_i(0, v) = eta_i(v)`, `phi_i(u, 0) = psi_i(u)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TodaInitial<A: Algebra> {
    pub eta: Vec<TruncSeries<A>>,
    pub psi: Vec<TruncSeries<A>>,
}

impl<A: Algebra> TodaInitial<A> {
    pub fn len(&self) -> usize {
        self.eta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eta.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.eta.len() != self.psi.len() {
            return Err(Error::DimMismatch(self.eta.len(), self.psi.len()));
        }
        if self.eta.is_empty() {
            return Err(Error::Shape("empty initial data".into()));
        }
        for (i, (e, p)) in self.eta.iter().zip(&self.psi).enumerate() {
            if e.vars() != Vars::One(V) || p.vars() != Vars::One(U) {
                return Err(Error::Shape(format!("initial data {i}: eta must be in v, psi in u")));
            }
            if e.constant_term() != p.constant_term() {
                return Err(Error::DegenerateData(format!("eta_{i}(0) != psi_{i}(0)")));
            }
            if !e.constant_term().is_invertible() {
                return Err(Error::DegenerateData(format!("eta_{i}(0) is not invertible")));
            }
        }
        Ok(())
    }
}

impl<A: Algebra + Star> TodaInitial<A> {
    /// Complete the first half by `eta_{n+1-i} = (eta_i^*)^{-1}` (and the
    /// same for `psi`). For type B the last supplied component is the middle
    /// one and must satisfy `x^* x = 1`.
    pub fn extend(&self, kind: TodaType) -> Result<TodaInitial<A>> {
        self.validate()?;
        let k = self.len();
        let mirrored = match kind {
            TodaType::A => return Ok(self.clone()),
            TodaType::C => k,
            TodaType::B => {
                for (name, x) in [("eta", &self.eta[k - 1]), ("psi", &self.psi[k - 1])] {
                    if !x.star().try_mul(x)?.is_one() {
                        return Err(Error::SymmetryViolated(format!("middle {name} is not unitary")));
                    }
                }
                k - 1
            }
        };
        let mirror = |xs: &[TruncSeries<A>]| -> Result<Vec<TruncSeries<A>>> {
            let mut out = xs.to_vec();
            for x in xs[..mirrored].iter().rev() {
                out.push(x.star().inverse()?);
            }
            Ok(out)
        };
        Ok(TodaInitial { eta: mirror(&self.eta)?, psi: mirror(&self.psi)? })
    }
}

/// `phi_1, ..., phi_n` in `A[[u, v]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TodaSolution<A: Algebra> {
    pub phi: Vec<TruncSeries<A>>,
    /// Highest degrees in `(u, v)` known exactly for every component.
    pub reliable_orders: (i64, i64),
}

impl<A: Algebra> TodaSolution<A> {
    pub fn new(phi: Vec<TruncSeries<A>>) -> Self {
        let reliable_orders =
            phi.iter().map(TruncSeries::orders).fold((i64::MAX, i64::MAX), |a, b| (a.0.min(b.0), a.1.min(b.1)));
        TodaSolution { phi, reliable_orders }
    }
}

/// Lower triangular `Delta(u)` and `Theta(u)` with `Delta' = Delta Theta`.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaTheta<A: Algebra> {
    pub delta: NcMatrix<TruncSeries<A>>,
    pub theta: NcMatrix<TruncSeries<A>>,
}

/// Build `Delta` from `psi_1, ..., psi_n` (series in `u`).
///
/// `Delta_jj = psi_j`, `Delta_ij = 0` for `i < j`, and for `i > j`
/// `Delta_ij(u) = (int_0^u Delta_{i,j+1} psi_j^{-1}) psi_j(u)`, which unrolls
/// to the iterated integral of alternating `psi`, `psi^{-1}` factors.
/// `Theta` has `psi_j^{-1} psi_j'` on the diagonal and ones just below it.
pub fn toda_delta<A: Algebra>(psi: &[TruncSeries<A>]) -> Result<DeltaTheta<A>> {
    let n = psi.len();
    let first = psi.first().ok_or_else(|| Error::Shape("empty psi".into()))?;
    let zero = first.zero_like();
    let psi_inv = psi.iter().map(TruncSeries::inverse).collect::<Result<Vec<_>>>()?;
    let mut delta = NcMatrix::from_fn(n, n, |_, _| zero.clone());
    for i in 0..n {
        delta.set(i, i, psi[i].clone());
        for j in (0..i).rev() {
            let inner = delta.get(i, j + 1).try_mul(&psi_inv[j])?.try_integrate(U)?;
            delta.set(i, j, inner.try_mul(&psi[j])?);
        }
    }
    let theta = NcMatrix::from_fn(n, n, |i, j| {
        if i == j {
            psi_inv[i].mul(&psi[i].derive(U))
        } else if i == j + 1 {
            zero.one_like()
        } else {
            zero.clone()
        }
    });
    let d_delta = delta.map(|x| x.derive(U));
    if !d_delta.sub(&delta.mul(&theta)?)?.is_zero() {
        return Err(Error::Inconsistent("Delta' != Delta Theta".into()));
    }
    Ok(DeltaTheta { delta, theta })
}

/// Solve the type A initial value problem.
///
/// With `g_i = eta_i eta_i(0)^{-1}` and `f` the normalized kernel of
/// `(D - b_n) ... (D - b_1)`, `b_i = (D g_i) g_i^{-1}`, put `f^u = f Delta(u)`
/// and `phi_i = |W(f^u_1, ..., f^u_i)|_ii` (Wronskian in `v`).
pub fn toda_solve_a<A: Algebra>(init: &TodaInitial<A>, orders: (usize, usize)) -> Result<TodaSolution<A>> {
    init.validate()?;
    let n = init.len();
    let g: Vec<_> = init
        .eta
        .iter()
        .map(|e| Ok(e.right_mul(&e.constant_term().try_inverse().ok_or(Error::NotInvertible)?)))
        .collect::<Result<_>>()?;
    let f = kernel_from_factorization(&g, V)?;
    let dt = toda_delta(&init.psi)?;
    let (pu, pv) = (orders.0 + 1, orders.1 + 1);
    let f2 = f.iter().map(|x| x.embed(U, V, pu)).collect::<Result<Vec<_>>>()?;
    let d2 = dt.delta.map(|x| x.embed(U, V, pv).expect("Delta is univariate in u"));
    let row = NcMatrix::from_fn(1, n, |_, i| f2[i].clone());
    let fu = row.mul(&d2)?;
    let fu = fu.entries();
    let phi = (1..=n)
        .map(|i| {
            wronski(&fu[..i], DV)
                .quasidet(i - 1, i - 1)
                .map_err(|_| Error::DegenerateData(format!("|W(f^u_1..f^u_{i})|_ii is undefined")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TodaSolution::new(phi))
}

/// Extend symmetric first-half data, solve as type A, verify the symmetry
/// of the result and return the supplied half (B: including the middle).
pub fn toda_solve_sym<A: Algebra + Star>(
    init: &TodaInitial<A>,
    kind: TodaType,
    orders: (usize, usize),
) -> Result<TodaSolution<A>> {
    let full = init.extend(kind)?;
    let sol = toda_solve_a(&full, orders)?;
    if !symmetry_holds(&sol.phi) {
        return Err(Error::SymmetryViolated("solution lost phi_{n+1-i} phi_i^* = 1".into()));
    }
    Ok(TodaSolution::new(sol.phi[..init.len()].to_vec()))
}

/// `phi_{n+1-i} phi_i^* = 1` for every `i`, on the known coefficients.
pub fn symmetry_holds<A: Algebra + Star>(phi: &[TruncSeries<A>]) -> bool {
    let n = phi.len();
    (0..n).all(|i| phi[n - 1 - i].try_mul(&phi[i].star()).is_ok_and(|p| p.is_informative() && p.is_one()))
}

/// `d/du((d/dv phi) phi^{-1})`.
fn toda_lhs<A: Algebra>(phi: &TruncSeries<A>) -> Result<TruncSeries<A>> {
    phi.try_derive(V)?.try_mul(&phi.inverse()?)?.try_derive(U)
}

fn ratio<A: Algebra>(a: &TruncSeries<A>, b: &TruncSeries<A>) -> Result<TruncSeries<A>> {
    a.try_mul(&b.inverse()?)
}

/// Residuals of the type A system; all zero iff `phi` solves it. For `n = 1`
/// the system is `d/du((d/dv phi) phi^{-1}) = 0`.
pub fn toda_residual_a<A: Algebra>(phi: &[TruncSeries<A>]) -> Result<Vec<TruncSeries<A>>> {
    let n = phi.len();
    (0..n)
        .map(|j| {
            let mut r = toda_lhs(&phi[j])?;
            if j + 1 < n {
                r = r.sub(&ratio(&phi[j + 1], &phi[j])?);
            }
            if j > 0 {
                r = r.add(&ratio(&phi[j], &phi[j - 1])?);
            }
            Ok(r)
        })
        .collect()
}

/// Residuals of the type C system in the first half `phi_1, ..., phi_k`.
pub fn toda_residual_c<A: Algebra + Star>(half: &[TruncSeries<A>]) -> Result<Vec<TruncSeries<A>>> {
    let k = half.len();
    (0..k)
        .map(|j| {
            let mut r = toda_lhs(&half[j])?;
            if j + 1 < k {
                r = r.sub(&ratio(&half[j + 1], &half[j])?);
            } else {
                r = r.sub(&half[j].star().inverse()?.try_mul(&half[j].inverse()?)?);
            }
            if j > 0 {
                r = r.add(&ratio(&half[j], &half[j - 1])?);
            }
            Ok(r)
        })
        .collect()
}

/// Residuals of the type B system in `phi_1, ..., phi_{k+1}`, the last one
/// being the middle component with `phi_{k+1}^* = phi_{k+1}^{-1}`.
pub fn toda_residual_b<A: Algebra + Star>(half: &[TruncSeries<A>]) -> Result<Vec<TruncSeries<A>>> {
    let m = half.len();
    if m < 2 {
        return Err(Error::Shape("type B needs k >= 1".into()));
    }
    (0..m)
        .map(|j| {
            let mut r = toda_lhs(&half[j])?;
            if j + 1 < m {
                r = r.sub(&ratio(&half[j + 1], &half[j])?);
                if j > 0 {
                    r = r.add(&ratio(&half[j], &half[j - 1])?);
                }
            } else {
                let k = m - 2;
                let rhs = half[k].star().inverse()?.try_mul(&half[j].star())?;
                r = r.sub(&rhs).add(&ratio(&half[j], &half[k])?);
            }
            Ok(r)
        })
        .collect()
}

pub fn toda_residual<A: Algebra + Star>(kind: TodaType, phi: &[TruncSeries<A>]) -> Result<Vec<TruncSeries<A>>> {
    match kind {
        TodaType::A => toda_residual_a(phi),
        TodaType::B => toda_residual_b(phi),
        TodaType::C => toda_residual_c(phi),
    }
}

/// The operators `L_i = (D - b_i) ... (D - b_1)`, `b_i = (d/dv phi_i) phi_i^{-1}`.
pub fn lax_operators<A: Algebra>(phi: &[TruncSeries<A>]) -> Result<Vec<DiffOp<TruncSeries<A>>>> {
    crate::diffop::log_derivatives(phi, DV)?.prefixes()
}

/// Lax form of the system: `d/du L_i + phi_{i+1} phi_i^{-1} L_{i-1}` for
/// `i < n` and `d/du L_n`, as operators in `D = d/dv` (`L_0 = 1`).
pub fn toda_lax_residual<A: Algebra>(phi: &[TruncSeries<A>]) -> Result<Vec<DiffOp<TruncSeries<A>>>> {
    let n = phi.len();
    let ls = lax_operators(phi)?;
    let one = DiffOp::identity(V, &phi[0].one_like());
    (0..n)
        .map(|i| {
            let du = ls[i].map(|c| c.derive(U));
            if i + 1 == n {
                return Ok(du);
            }
            let prev = if i == 0 { &one } else { &ls[i - 1] };
            let c = ratio(&phi[i + 1], &phi[i])?;
            let term = DiffOp::constant(V, c).compose(prev)?;
            Ok(du.sub(&term.map(|x| x.neg())))
        })
        .collect()
}

/// Nonabelian Liouville solution
/// `phi = eta(v) (a^{-1} + P(v) Q(u)) psi(u)` with
/// `P = int_0^v eta^{-1} (eta^*)^{-1}` and `Q = int_0^u a^* (psi^*)^{-1} psi^{-1}`.
pub fn liouville_solve<A: Algebra + Star>(
    eta: &TruncSeries<A>,
    psi: &TruncSeries<A>,
    a: &A,
    orders: (usize, usize),
) -> Result<TruncSeries<A>> {
    let a_inv = a.try_inverse().ok_or(Error::NotInvertible)?;
    if &eta.constant_term() != a || &psi.constant_term() != a {
        return Err(Error::DegenerateData("eta(0) = psi(0) = a is required".into()));
    }
    let (pu, pv) = (orders.0 + 1, orders.1 + 1);
    let p = eta.inverse()?.try_mul(&eta.star().inverse()?)?.try_integrate(V)?;
    let q = psi.star().inverse()?.try_mul(&psi.inverse()?)?.left_mul(&a.star()).try_integrate(U)?;
    let pq = p.embed(U, V, pu)?.try_mul(&q.embed(U, V, pv)?)?;
    let mid = pq.add(&TruncSeries::constant(a_inv, UV, orders));
    eta.embed(U, V, pu)?.try_mul(&mid)?.try_mul(&psi.embed(U, V, pv)?)
}

/// `Y_i(f) = W_v(f, d_u f, ..., d_u^{i-1} f)`.
pub fn mixed_wronski<A: Algebra>(f: &TruncSeries<A>, i: usize) -> NcMatrix<TruncSeries<A>> {
    let cols: Vec<_> = (0..i).map(|k| DU.apply_n(f, k)).collect();
    wronski(&cols, DV)
}

/// `phi_i = |Y_i(f)|_ii` (1-based `i`), the `i`-th component of the
/// infinite Toda solution with `phi_1 = f`.
pub fn toda_infinite_step<A: Algebra>(f: &TruncSeries<A>, i: usize) -> Result<TruncSeries<A>> {
    if i == 0 {
        return Err(Error::Shape("components are numbered from 1".into()));
    }
    mixed_wronski(f, i)
        .quasidet(i - 1, i - 1)
        .map_err(|_| Error::DegenerateData(format!("Y_{i}(f) has no quasideterminant")))
}

/// Whether `f` is a kernel of rank `n`, `f = sum_{i<=n} q_i(v) p_i(u)`:
/// `|Y_{n+1}(f)|_{n+1,n+1} = 0` on the known coefficients, given
/// `Y_1, ..., Y_n` invertible. Over a noncommutative algebra the `v`-factors
/// must stand on the left; `p(u) q(v)` is in general not of finite rank.
pub fn kernel_rank_check<A: Algebra>(f: &TruncSeries<A>, n: usize) -> Result<bool> {
    let y = mixed_wronski(f, n + 1);
    // Y_i is the leading i x i block; a series matrix is invertible iff its
    // constant terms are
    let y0 = y.map(TruncSeries::constant_term);
    for i in 1..=n {
        let lead: Vec<usize> = (0..i).collect();
        if y0.select(&lead, &lead).inverse().is_err() {
            return Err(Error::DegenerateData(format!("Y_{i}(f) is not invertible")));
        }
    }
    let q = y.quasidet(n, n).map_err(|_| Error::DegenerateData(format!("Y_{}(f) has no quasideterminant", n + 1)))?;
    Ok(q.is_informative() && q.is_zero())
}

/// Flow form: the solution with `phi(u, 0) = 1` generated by a kernel `f`
/// in `v`. Returns the solution, `Delta(u)` and the recomposed operator
/// `L_n` whose coefficients should not depend on `u`.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowSolution<A: Algebra> {
    pub solution: TodaSolution<A>,
    pub delta: DeltaTheta<A>,
    pub operator: DiffOp<TruncSeries<A>>,
}

pub fn toda_flow_factorization<A: Algebra>(kernel: &[TruncSeries<A>], u_order: usize) -> Result<FlowSolution<A>> {
    let n = kernel.len();
    let first = kernel.first().ok_or_else(|| Error::Shape("empty kernel".into()))?;
    let v_order = first.orders().0.max(0) as usize;
    let fac: Factorization<_> = DiffOp::factorize(kernel, DV).map_err(|e| match e {
        Error::DegeneratePrefix(i) => Error::DegenerateData(format!("kernel prefix {i} is degenerate")),
        e => e,
    })?;
    // W_i = |W(f_1..f_i)|_ii solves D W_i = b_i W_i; normalize to W_i(0) = 1
    let eta = (1..=n)
        .map(|i| {
            let w = wronski(&kernel[..i], DV).quasidet(i - 1, i - 1)?;
            let c = w.constant_term().try_inverse().ok_or(Error::NotInvertible)?;
            Ok(w.right_mul(&c))
        })
        .collect::<Result<Vec<_>>>()?;
    debug_assert_eq!(fac.b.len(), n);
    let one = TruncSeries::constant(first.coeff_zero().one_like(), Vars::One(U), (u_order, 0));
    let init = TodaInitial { eta, psi: vec![one; n] };
    let solution = toda_solve_a(&init, (u_order, v_order))?;
    let delta = toda_delta(&init.psi)?;
    let operator = lax_operators(&solution.phi)?.pop().expect("n >= 1");
    Ok(FlowSolution { solution, delta, operator })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::random_element;
    use crate::{AlgebraElement as M, Rational, Series};

    fn rnd(seed: u64) -> M {
        random_element(seed, 2, 3)
    }

    fn konst(c: M, var: Var, order: usize) -> Series {
        Series::constant(c, Vars::One(var), (order, 0))
    }

    fn poly(var: Var, c0: &M, seed: u64, deg: usize, order: usize) -> Series {
        let mut c = vec![c0.clone()];
        c.extend((1..=deg).map(|k| rnd(seed * 11 + k as u64)));
        Series::polynomial(var, &c, order)
    }

    fn all_zero(rs: &[Series]) -> bool {
        rs.iter().all(|r| r.is_informative() && r.is_zero())
    }

    fn bi(f: impl FnMut(usize, usize) -> M, orders: (usize, usize)) -> Series {
        Series::bivariate(U, V, orders, f)
    }

    #[test]
    fn constants_do_not_solve_length_two() {
        let one = bi(|i, j| if i + j == 0 { M::identity(1) } else { M::zeros(1) }, (3, 3));
        let r = toda_residual_a(&[one.clone(), one.clone()]).unwrap();
        assert!(r[0].agrees_with(&one.neg()) && r[0].is_informative());
        assert!(r[1].agrees_with(&one));
    }

    #[test]
    fn length_one_product_solution() {
        let (e, f) = (rnd(1), rnd(2));
        let eta = Series::polynomial(V, &[M::identity(2), e.clone()], 5);
        let psi = Series::polynomial(U, &[M::identity(2), f.clone()], 5);
        let sol = toda_solve_a(&TodaInitial { eta: vec![eta.clone()], psi: vec![psi.clone()] }, (5, 5)).unwrap();
        let closed = eta.embed(U, V, 6).unwrap().try_mul(&psi.embed(U, V, 6).unwrap()).unwrap();
        assert!(sol.phi[0].agrees_with(&closed));
        assert!(all_zero(&toda_residual_a(&sol.phi).unwrap()));
        let c = random_element::<Rational>(5, 2, 3);
        let init = TodaInitial { eta: vec![konst(c.clone(), V, 3)], psi: vec![konst(c.clone(), U, 3)] };
        let sol = toda_solve_a(&init, (3, 3)).unwrap();
        assert!(sol.phi[0].is_constant() && sol.phi[0].constant_term() == c);
    }

    #[test]
    fn delta_examples() {
        let one = konst(M::identity(2), U, 5);
        let dt = toda_delta(&[one.clone(), one.clone(), one.clone()]).unwrap();
        // e^{uJ}: entries u^{i-j}/(i-j)!
        for i in 0..3 {
            for j in 0..3 {
                let e = dt.delta.get(i, j);
                if i < j {
                    assert!(e.is_zero());
                } else {
                    let k = i - j;
                    let fact = (1..=k as i64).product::<i64>();
                    let want = Series::monomial(U, M::identity(2), k, 5).scale(&Rational::new(1.into(), fact.into()));
                    assert!(e.agrees_with(&want));
                }
                let t = dt.theta.get(i, j);
                assert!(if i == j + 1 { t.is_one() } else { t.is_zero() });
            }
        }
        let psi = poly(U, &rnd(9), 1, 3, 5);
        let psi = psi.right_mul(&psi.constant_term().inverse().unwrap());
        let dt = toda_delta(std::slice::from_ref(&psi)).unwrap();
        assert_eq!(dt.delta.get(0, 0), &psi);
        let p1 = Series::polynomial(U, &[M::identity(1), M::identity(1)], 6);
        let p2 = konst(M::identity(1), U, 6);
        let dt = toda_delta(&[p1.clone(), p2.clone()]).unwrap();
        let want = p2.try_mul(&p1.inverse().unwrap()).unwrap().integrate(U).try_mul(&p1).unwrap();
        assert!(dt.delta.get(1, 0).agrees_with(&want));
    }

    fn random_init(seed: u64, n: usize, order: usize) -> TodaInitial<M> {
        let c: Vec<M> = (0..n)
            .map(|i| {
                let mut k = 0;
                loop {
                    let x = rnd(seed * 101 + i as u64 * 7 + k);
                    if x.is_invertible() {
                        break x;
                    }
                    k += 1000;
                }
            })
            .collect();
        TodaInitial {
            eta: (0..n).map(|i| poly(V, &c[i], seed * 3 + i as u64, 3, order)).collect(),
            psi: (0..n).map(|i| poly(U, &c[i], seed * 5 + 100 + i as u64, 3, order)).collect(),
        }
    }

    #[test]
    fn type_a_round_trip() {
        let init = random_init(4, 3, 5);
        let sol = toda_solve_a(&init, (5, 5)).unwrap();
        assert!(all_zero(&toda_residual_a(&sol.phi).unwrap()));
        for r in toda_lax_residual(&sol.phi).unwrap() {
            assert!(r.coeffs().iter().all(|c| c.is_informative() && c.is_zero()));
        }
        for i in 0..3 {
            assert!(sol.phi[i].restrict_zero(V).unwrap().agrees_with(&init.psi[i]));
            assert!(sol.phi[i].restrict_zero(U).unwrap().agrees_with(&init.eta[i]));
            assert!(kernel_rank_check(&sol.phi[0], 3).unwrap());
            let via_f = toda_infinite_step(&sol.phi[0], i + 1).unwrap();
            assert!(via_f.agrees_with(&sol.phi[i]));
        }
        assert!(sol.reliable_orders.0 >= 3 && sol.reliable_orders.1 >= 3);
    }

    #[test]
    fn perturbed_solution_fails_both_certificates() {
        let init = random_init(6, 2, 4);
        let mut phi = toda_solve_a(&init, (4, 4)).unwrap().phi;
        let bump = bi(|i, j| if (i, j) == (1, 1) { M::identity(2) } else { M::zeros(2) }, (4, 4));
        phi[1] = phi[1].add(&bump);
        assert!(!all_zero(&toda_residual_a(&phi).unwrap()));
        let lax = toda_lax_residual(&phi).unwrap();
        assert!(lax.iter().any(|r| !r.is_zero()));
    }

    #[test]
    fn infinite_step_examples() {
        let f = bi(|i, j| M::identity(1).mul_int(((i == j) && i <= 1) as i64), (5, 5));
        assert_eq!(toda_infinite_step(&f, 1).unwrap(), f);
        // f = 1 + uv: Y_2 = [[f, v], [u, 1]], |Y_2|_22 = 1 - u f^{-1} v
        let phi2 = toda_infinite_step(&f, 2).unwrap();
        let u = bi(|i, j| M::identity(1).mul_int((i == 1 && j == 0) as i64), (5, 5));
        let v = bi(|i, j| M::identity(1).mul_int((i == 0 && j == 1) as i64), (5, 5));
        let want = f.one_like().sub(&u.mul(&f.inverse().unwrap()).mul(&v));
        assert!(phi2.agrees_with(&want));
        // rank one product, v-factor on the left
        let p = poly(U, &M::identity(2), 3, 3, 5).embed(U, V, 6).unwrap();
        let q = poly(V, &M::identity(2), 4, 3, 5).embed(U, V, 6).unwrap();
        assert!(kernel_rank_check(&q.mul(&p), 1).unwrap());
        assert!(!kernel_rank_check(&p.mul(&q), 1).unwrap());
    }

    #[test]
    fn liouville_examples() {
        let one = M::identity(1);
        let phi = liouville_solve(&konst(one.clone(), V, 6), &konst(one.clone(), U, 6), &one, (6, 6)).unwrap();
        let want = bi(|i, j| one.mul_int((i == j && i <= 1) as i64), (6, 6));
        assert!(phi.agrees_with(&want));
        let lhs = toda_lhs(&phi).unwrap();
        let rhs = phi.inverse().unwrap().mul(&phi.inverse().unwrap());
        assert!(lhs.agrees_with(&rhs) && lhs.is_informative());
        // psi = 1 gives eta(v)(1 + u int eta^{-1} (eta^*)^{-1})
        let eta = poly(V, &M::identity(2), 7, 3, 5);
        let psi = konst(M::identity(2), U, 5);
        let phi = liouville_solve(&eta, &psi, &M::identity(2), (5, 5)).unwrap();
        let p = eta.inverse().unwrap().mul(&eta.star().inverse().unwrap()).integrate(V).embed(U, V, 6).unwrap();
        let u = bi(|i, j| M::identity(2).mul_int((i == 1 && j == 0) as i64), (5, 5));
        let want = eta.embed(U, V, 6).unwrap().mul(&u.one_like().add(&u.mul(&p)));
        assert!(phi.agrees_with(&want));
        assert!(all_zero(&toda_residual_c(&[phi]).unwrap()));
    }

    #[test]
    fn liouville_matches_type_c_length_two() {
        let init = random_init(8, 1, 5);
        let a = init.eta[0].constant_term();
        let phi = liouville_solve(&init.eta[0], &init.psi[0], &a, (5, 5)).unwrap();
        let sol = toda_solve_sym(&init, TodaType::C, (5, 5)).unwrap();
        assert!(phi.agrees_with(&sol.phi[0]));
        assert!(all_zero(&toda_residual_c(&sol.phi).unwrap()));
    }

    fn cayley(var: Var, s0: &M, seed: u64, order: usize) -> Series {
        // (1 - S)(1 + S)^{-1} is orthogonal for skew S
        let mut c = vec![s0.clone()];
        c.extend((1..=2).map(|k| {
            let x = rnd(seed + k);
            x.sub(&x.star())
        }));
        let s = Series::polynomial(var, &c, order);
        s.one_like().sub(&s).mul(&s.one_like().add(&s).inverse().unwrap())
    }

    #[test]
    fn type_b_unitary_middle() {
        let mut init = random_init(2, 1, 4);
        let s0 = M::from_ints(2, &[0, 1, -1, 0]);
        init.eta.push(cayley(V, &s0, 10, 4));
        init.psi.push(cayley(U, &s0, 20, 4));
        let sol = toda_solve_sym(&init, TodaType::B, (4, 4)).unwrap();
        assert_eq!(sol.phi.len(), 2);
        assert!(all_zero(&toda_residual_b(&sol.phi).unwrap()));
        let mut bad = init.clone();
        bad.eta[1] = poly(V, &M::identity(2), 1, 2, 4);
        bad.psi[1] = poly(U, &M::identity(2), 2, 2, 4);
        assert!(matches!(bad.extend(TodaType::B), Err(Error::SymmetryViolated(_))));
    }

    #[test]
    fn flow_form_examples() {
        let g = poly(V, &M::identity(2), 1, 3, 5);
        let fl = toda_flow_factorization(std::slice::from_ref(&g), 5).unwrap();
        assert!(fl.solution.phi[0].agrees_with(&g.embed(U, V, 6).unwrap()));
        let f: Vec<Series> = (0..2).map(|k| poly(V, &rnd(40 + k), 50 + k, 3, 6)).collect();
        let fl = toda_flow_factorization(&f, 4).unwrap();
        let l = DiffOp::from_kernel(&f, DV).unwrap();
        for k in 0..=2 {
            let c = fl.operator.coeff(k);
            assert!(c.derive(U).is_zero());
            assert!(c.restrict_zero(U).unwrap().agrees_with(&l.coeff(k)));
        }
        for phi in &fl.solution.phi {
            assert!(phi.restrict_zero(V).unwrap().is_one());
        }
    }
}
