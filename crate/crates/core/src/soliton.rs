//! Dressing construction of KP and KdV multisolitons.
//!
//! Only one KP time is kept symbolic: solutions are bivariate series in
//! `(x, t)` with `t = t_m` for the active index `m`, all other times frozen
//! at zero. The phase of a generator is then `xi(alpha) = x alpha + t alpha^m`.

use std::fmt::Write as _;

use crate::algebra::{Algebra, Differential, Ring, Scalar, SqMatrix, Var};
use crate::diffop::DiffOp;
use crate::error::{Error, Result};
use crate::ncmatrix::{wronski, NcMatrix};
use crate::psdo::{kp_rhs, PsDO};
use crate::series::{Derivation, TruncSeries, Vars};

pub const X: Var = Var::X;
pub const T: Var = Var::T;
pub const XT: Vars = Vars::Two(X, T);
const DX: Derivation = Derivation(X);

type Ser<S> = TruncSeries<SqMatrix<S>>;

/// Parameters `alpha_s, beta_s, a_s` of the generators
/// `y_s = e^{xi(alpha_s)} + a_s e^{xi(beta_s)}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SolitonSpec<S: Scalar> {
    pub dim: usize,
    pub alphas: Vec<SqMatrix<S>>,
    pub betas: Vec<SqMatrix<S>>,
    pub amps: Vec<SqMatrix<S>>,
    /// Index `m` of the symbolic time `t_m`.
    pub active_time: u32,
    /// Orders in `(x, t)` of the generator series.
    pub orders: (usize, usize),
}

impl<S: Scalar> SolitonSpec<S> {
    /// KdV specialization: `beta_s = -alpha_s`, time `t_3`.
    pub fn kdv(dim: usize, alphas: Vec<SqMatrix<S>>, amps: Vec<SqMatrix<S>>, orders: (usize, usize)) -> Result<Self> {
        let betas = alphas.iter().map(Ring::neg).collect();
        let spec = SolitonSpec { dim, alphas, betas, amps, active_time: 3, orders };
        spec.validate()?;
        Ok(spec)
    }

    pub fn count(&self) -> usize {
        self.alphas.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.alphas.len();
        if self.betas.len() != n || self.amps.len() != n {
            return Err(Error::Shape("alphas, betas and amplitudes differ in length".into()));
        }
        if self.active_time == 0 {
            return Err(Error::Shape("the active time index starts at 1".into()));
        }
        let dims = self.alphas.iter().chain(&self.betas).chain(&self.amps).map(SqMatrix::dim);
        if let Some(d) = dims.into_iter().find(|&d| d != self.dim) {
            return Err(Error::DimMismatch(self.dim, d));
        }
        Ok(())
    }

    pub fn is_kdv(&self) -> bool {
        self.active_time == 3 && self.alphas.iter().zip(&self.betas).all(|(a, b)| a.add(b).is_zero())
    }

    fn one(&self) -> Ser<S> {
        TruncSeries::constant(SqMatrix::identity(self.dim), XT, self.orders)
    }
}

/// `xi = x alpha + t alpha^m`, exact.
pub fn phase<S: Scalar>(alpha: &SqMatrix<S>, m: u32, orders: (usize, usize)) -> Ser<S> {
    let am = crate::algebra::pow(alpha, m);
    let zero = alpha.zero_like();
    TruncSeries::bivariate(X, T, orders, |i, j| match (i, j) {
        (1, 0) => alpha.clone(),
        (0, 1) => am.clone(),
        _ => zero.clone(),
    })
    .into_exact()
}

/// Phase of the `s`-th alpha.
pub fn xi_phase<S: Scalar>(spec: &SolitonSpec<S>, s: usize) -> Ser<S> {
    phase(&spec.alphas[s], spec.active_time, spec.orders)
}

/// `y_s = e^{xi(alpha_s)} + a_s e^{xi(beta_s)}`, amplitude on the left.
pub fn soliton_generators<S: Scalar>(spec: &SolitonSpec<S>) -> Result<Vec<Ser<S>>> {
    spec.validate()?;
    let m = spec.active_time;
    (0..spec.count())
        .map(|s| {
            let ea = phase(&spec.alphas[s], m, spec.orders).exp()?;
            let eb = phase(&spec.betas[s], m, spec.orders).exp()?;
            Ok(ea.add(&eb.left_mul(&spec.amps[s])))
        })
        .collect()
}

/// `Phi f = |W(y_1, ..., y_N, f)|_{N+1,N+1}`: the monic operator of order
/// `N` in `d/dx` annihilating the generators.
pub fn dressing_operator<S: Scalar>(spec: &SolitonSpec<S>) -> Result<DiffOp<Ser<S>>> {
    let y = soliton_generators(spec)?;
    if y.is_empty() {
        return Ok(DiffOp::identity(X, &spec.one()));
    }
    DiffOp::from_kernel(&y, DX).map_err(|e| match e {
        Error::DegenerateKernel => {
            Error::DegenerateGenerators("Wronski matrix of the generators is not invertible".into())
        }
        e => e,
    })
}

/// `Phi o d^n o Phi^{-1}`, known down to order `floor`.
pub fn dressed_power<S: Scalar>(spec: &SolitonSpec<S>, n: u32, floor: i64) -> Result<PsDO<Ser<S>>> {
    let phi = PsDO::from_diffop(&dressing_operator(spec)?);
    let big_n = phi.kmax();
    let inv = phi.inverse_monic(floor - big_n - n as i64)?;
    let dn = PsDO::monomial(X, spec.one(), n as i64);
    phi.compose(&dn, i64::MIN)?.compose(&inv, floor)
}

/// `L = Phi o d o Phi^{-1}` down to `floor`, checked to have the shape
/// `d + w_0 d^{-1} + ...`.
pub fn dressed_l<S: Scalar>(spec: &SolitonSpec<S>, floor: i64) -> Result<PsDO<Ser<S>>> {
    if floor > 0 {
        return Err(Error::FloorTooShallow("the order 0 coefficient of L must be known".into()));
    }
    let l = dressed_power(spec, 1, floor)?;
    if !l.is_kp_shape() {
        return Err(Error::Inconsistent("dressed operator is not of the form d + O(d^-1)".into()));
    }
    Ok(l)
}

/// `dL/dt - [(L^m)_+, L]` on the negative orders, for the active time `t_m`.
pub fn flow_residual<S: Scalar>(spec: &SolitonSpec<S>, floor: i64) -> Result<PsDO<Ser<S>>> {
    kp_flow_residual(&dressed_l(spec, floor)?, spec.active_time)
}

/// `dL/dt - [(L^m)_+, L]` on the negative orders of a given `L(x, t)`.
pub fn kp_flow_residual<S: Scalar>(l: &PsDO<Ser<S>>, m: u32) -> Result<PsDO<Ser<S>>> {
    let rhs = kp_rhs(l, m)?;
    let lhs = l.map(|c| c.derive(T)).split().1;
    Ok(lhs.sub(&rhs))
}

/// KdV multisoliton: `u` with the ingredients of its two closed forms.
#[derive(Clone, Debug, PartialEq)]
pub struct SolitonSolution<S: Scalar> {
    /// `2 d/dx (b_1 + ... + b_N)`.
    pub u: Ser<S>,
    /// `2 d/dx (Y_N W_N^{-1})`.
    pub u_modified: Ser<S>,
    /// `b_i = (d W_i) W_i^{-1}`.
    pub b: Vec<Ser<S>>,
    /// `W_i = |W(y_1, ..., y_i)|_ii`.
    pub w_quasi: Vec<Ser<S>>,
}

/// Both closed forms of the KdV multisoliton, without checking them.
pub fn kdv_u_unchecked<S: Scalar>(spec: &SolitonSpec<S>) -> Result<SolitonSolution<S>> {
    if !spec.is_kdv() {
        return Err(Error::Shape("KdV solitons need beta = -alpha and the time t_3".into()));
    }
    let y = soliton_generators(spec)?;
    let n = y.len();
    if n == 0 {
        let u = spec.one().zero_like();
        return Ok(SolitonSolution { u: u.clone(), u_modified: u, b: vec![], w_quasi: vec![] });
    }
    let degenerate = |i: usize| Error::DegenerateGenerators(format!("quasideterminant W_{i} is not invertible"));
    let mut b = Vec::with_capacity(n);
    let mut w_quasi = Vec::with_capacity(n);
    for i in 1..=n {
        let wi = wronski(&y[..i], DX).quasidet(i - 1, i - 1).map_err(|_| degenerate(i))?;
        let wi_inv = wi.try_inverse().ok_or_else(|| degenerate(i))?;
        b.push(DX.apply(&wi).mul(&wi_inv));
        w_quasi.push(wi);
    }
    let sum = b[1..].iter().fold(b[0].clone(), |acc, bi| acc.add(bi));
    let u = DX.apply(&sum).mul_int(2);
    let u_modified = u_from_modified_wronskian(&y, &w_quasi[n - 1])?;
    Ok(SolitonSolution { u, u_modified, b, w_quasi })
}

/// `u = 2 d/dx (b_1 + ... + b_N)`, cross-checked against
/// `u = 2 d/dx (Y_N W_N^{-1})` and against the KdV equation.
pub fn kdv_u<S: Scalar>(spec: &SolitonSpec<S>) -> Result<SolitonSolution<S>> {
    let sol = kdv_u_unchecked(spec)?;
    if !sol.u.agrees_with(&sol.u_modified) {
        return Err(Error::Inconsistent("the two closed forms of u disagree".into()));
    }
    if !kdv_residual(&sol.u).is_zero() {
        return Err(Error::Inconsistent("u does not satisfy the KdV equation".into()));
    }
    Ok(sol)
}

/// `2 d/dx (Y_N W_N^{-1})`, where `Y` is the Wronski matrix with its last
/// row raised to the `N`-th derivatives.
fn u_from_modified_wronskian<S: Scalar>(y: &[Ser<S>], w_n: &Ser<S>) -> Result<Ser<S>> {
    let n = y.len();
    let modified = NcMatrix::from_fn(n, n, |r, c| DX.apply_n(&y[c], if r + 1 == n { n } else { r }));
    let y_n = modified
        .quasidet(n - 1, n - 1)
        .map_err(|_| Error::DegenerateGenerators("modified Wronski matrix is degenerate".into()))?;
    let w_inv = w_n.try_inverse().ok_or(Error::NotInvertible)?;
    Ok(DX.apply(&y_n.mul(&w_inv)).mul_int(2))
}

/// `u_t - (u_xxx + 3 u_x u + 3 u u_x) / 4`.
pub fn kdv_residual<A: Algebra>(u: &TruncSeries<A>) -> TruncSeries<A> {
    let ux = u.derive(X);
    let uxxx = ux.derive(X).derive(X);
    let rhs = uxxx.add(&ux.mul(u).mul_int(3)).add(&u.mul(&ux).mul_int(3));
    u.derive(T).mul_int(4).sub(&rhs)
}

/// For `d = 1`: whether `2 d/dx [(d/dx det W) (det W)^{-1}]`, the classical
/// `2 (ln det W)''`, equals `u` from [`kdv_u`].
pub fn commutative_tau_check<S: Scalar>(spec: &SolitonSpec<S>) -> Result<bool> {
    if spec.dim != 1 {
        return Err(Error::Shape("the determinant formula needs dim 1".into()));
    }
    let sol = kdv_u(spec)?;
    let y = soliton_generators(spec)?;
    let tau = if y.is_empty() { spec.one() } else { wronski(&y, DX).det_commutative()? };
    let tau_inv =
        tau.try_inverse().ok_or_else(|| Error::DegenerateGenerators("Wronskian vanishes at the origin".into()))?;
    let u = DX.apply(&DX.apply(&tau).mul(&tau_inv)).mul_int(2);
    Ok(u.agrees_with(&sol.u) && u.is_informative())
}

/// Square sample grid `[-radius, radius]^2` with `points` nodes per axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub radius: f64,
    pub points: usize,
}

impl Grid {
    pub fn coords(&self) -> Vec<f64> {
        match self.points {
            0 => vec![],
            1 => vec![0.0],
            n => (0..n).map(|i| -self.radius + 2.0 * self.radius * i as f64 / (n - 1) as f64).collect(),
        }
    }

    /// `(x, t)` pairs, `x` outer.
    pub fn nodes(&self) -> Vec<(f64, f64)> {
        let c = self.coords();
        c.iter().flat_map(|&x| c.iter().map(move |&t| (x, t))).collect()
    }
}

/// Result of comparing the series 1-soliton with its closed form.
#[derive(Clone, Debug, PartialEq)]
pub struct SechReport {
    pub max_deviation: f64,
    pub samples: usize,
    /// Series value at the origin.
    pub peak: f64,
}

/// `2 alpha^2 / cosh^2(alpha x + alpha^3 t - ln(a) / 2)`.
pub fn sech_profile(alpha: f64, a: f64, x: f64, t: f64) -> f64 {
    let c = 0.5 * a.ln();
    let ch = (alpha * x + alpha.powi(3) * t - c).cosh();
    2.0 * alpha * alpha / (ch * ch)
}

/// Evaluate the scalar 1-soliton series on the nodes of `grid` with
/// `|x + t| <= radius` and compare it with the sech-squared profile.
pub fn classical_sech_check<S: Scalar>(spec: &SolitonSpec<S>, grid: &Grid) -> Result<SechReport> {
    if spec.dim != 1 || spec.count() != 1 {
        return Err(Error::Shape("the sech profile is the scalar 1-soliton".into()));
    }
    let alpha = spec.alphas[0].get(0, 0).to_f64().ok_or_else(|| Error::Shape("alpha is not real".into()))?;
    let a = spec.amps[0].get(0, 0).to_f64().ok_or_else(|| Error::Shape("amplitude is not real".into()))?;
    // singular data (y(0) = 0) is reported as degenerate before the sign
    let sol = kdv_u(spec)?;
    if a <= 0.0 {
        return Err(Error::Shape("the sech profile needs a positive amplitude".into()));
    }
    let peak = *sol.u.eval_float(&[0.0, 0.0])?.get(0, 0);
    let mut max_deviation = 0.0f64;
    let nodes: Vec<_> = grid.nodes().into_iter().filter(|(x, t)| (x + t).abs() <= grid.radius).collect();
    for &(x, t) in &nodes {
        let series = *sol.u.eval_float(&[x, t])?.get(0, 0);
        max_deviation = max_deviation.max((series - sech_profile(alpha, a, x, t)).abs());
    }
    Ok(SechReport { max_deviation, samples: nodes.len(), peak })
}

/// CSV samples of `u`: header `x,t,u11,u12,...`, one row per grid node.
pub fn sample_csv<S: Scalar>(u: &Ser<S>, grid: &Grid) -> Result<String> {
    let d = u.dim();
    let mut out = String::from("x,t");
    for r in 1..=d {
        for c in 1..=d {
            let _ = write!(out, ",u{r}{c}");
        }
    }
    out.push('\n');
    for (x, t) in grid.nodes() {
        let val = u.eval_float(&[x, t])?;
        let _ = write!(out, "{x},{t}");
        for e in val.entries() {
            let _ = write!(out, ",{e}");
        }
        out.push('\n');
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{AlgebraElement as M, Rational};

    fn random_element(seed: u64, dim: usize, bound: i64) -> M {
        crate::algebra::random_element(seed, dim, bound)
    }

    fn scalar(n: i64) -> M {
        M::from_ints(1, &[n])
    }

    fn one_soliton(alpha: i64, a: i64, orders: (usize, usize)) -> SolitonSpec<Rational> {
        SolitonSpec::kdv(1, vec![scalar(alpha)], vec![scalar(a)], orders).unwrap()
    }

    fn fact(n: usize) -> i64 {
        (1..=n as i64).product()
    }

    #[test]
    fn phases() {
        let z = phase(&M::zeros(2), 3, (3, 2));
        assert!(z.is_zero());
        let s = one_soliton(1, 1, (3, 2));
        let xi = xi_phase(&s, 0);
        assert!(xi.coeff(1, 0).is_one() && xi.coeff(0, 1).is_one() && xi.coeff(1, 1).is_zero());
        let a = random_element(4, 2, 3);
        let xi = phase(&a, 3, (2, 2));
        assert_eq!(*xi.coeff(0, 1), a.mul(&a).mul(&a));
        assert_eq!(*xi.coeff(1, 0), a);
    }

    #[test]
    fn generators() {
        let a = random_element(5, 2, 3);
        let spec = SolitonSpec::kdv(2, vec![a.clone()], vec![M::zeros(2)], (4, 2)).unwrap();
        let y = &soliton_generators(&spec).unwrap()[0];
        // pure exponential: coefficient of x^i t^j is a^(i + 3j) / (i! j!)
        for i in 0..=4 {
            for j in 0..=2 {
                let want = crate::algebra::pow(&a, (i + 3 * j) as u32).div_int(fact(i) * fact(j));
                assert_eq!(*y.coeff(i, j), want);
            }
        }
        // 2 cosh(x) at t = 0
        let y = &soliton_generators(&one_soliton(1, 1, (8, 2))).unwrap()[0];
        let slice = y.restrict_zero(T).unwrap();
        for i in 0..=8 {
            let want = if i % 2 == 0 { scalar(2).div_int(fact(i)) } else { scalar(0) };
            assert_eq!(*slice.coeff(i, 0), want);
        }
        // d/dx y = alpha e^{xi(alpha)} + a beta e^{xi(beta)}
        let (al, be, am) = (random_element(6, 2, 3), random_element(7, 2, 3), random_element(8, 2, 3));
        let spec = SolitonSpec {
            dim: 2,
            alphas: vec![al.clone()],
            betas: vec![be.clone()],
            amps: vec![am.clone()],
            active_time: 2,
            orders: (5, 3),
        };
        let y = &soliton_generators(&spec).unwrap()[0];
        let ea = phase(&al, 2, (5, 3)).exp().unwrap();
        let eb = phase(&be, 2, (5, 3)).exp().unwrap();
        let want = ea.left_mul(&al).add(&eb.left_mul(&am.mul(&be)));
        assert!(y.derive(X).agrees_with(&want));
    }

    #[test]
    fn dressing_examples() {
        let none = SolitonSpec::<Rational>::kdv(2, vec![], vec![], (4, 2)).unwrap();
        let phi = dressing_operator(&none).unwrap();
        assert_eq!(phi.order(), 0);
        assert!(phi.coeff(0).is_one());
        let l = dressed_l(&none, -3).unwrap();
        assert!(l.coeff(1).is_one() && (-3..=0).all(|k| l.coeff(k).is_zero()));

        let s = one_soliton(2, 3, (6, 2));
        let y = &soliton_generators(&s).unwrap()[0];
        let phi = dressing_operator(&s).unwrap();
        let want = y.derive(X).mul(&y.try_inverse().unwrap()).neg();
        assert!(phi.coeff(0).agrees_with(&want) && phi.coeff(1).is_one());

        let spec = SolitonSpec::kdv(
            2,
            vec![random_element(11, 2, 3), random_element(12, 2, 3)],
            vec![random_element(13, 2, 3), random_element(14, 2, 3)],
            (6, 2),
        )
        .unwrap();
        let phi = dressing_operator(&spec).unwrap();
        for y in soliton_generators(&spec).unwrap() {
            let r = phi.apply(&y);
            assert!(r.is_zero() && r.is_informative());
        }
    }

    #[test]
    fn degenerate_generators() {
        // a = -1 and alpha = 0 give y = 0
        let s = one_soliton(0, -1, (4, 2));
        assert!(matches!(dressing_operator(&s), Err(Error::DegenerateGenerators(_))));
        assert!(matches!(kdv_u(&s), Err(Error::DegenerateGenerators(_))));
    }

    #[test]
    fn one_soliton_formula() {
        let s = one_soliton(1, 1, (8, 3));
        let sol = kdv_u(&s).unwrap();
        assert_eq!(*sol.u.coeff(0, 0), scalar(2));
        // 2 d/dx [(e - a e^-) alpha (e + a e^-)^-1]
        let (al, a) = (random_element(21, 2, 3), random_element(22, 2, 3));
        let spec = SolitonSpec::kdv(2, vec![al.clone()], vec![a.clone()], (6, 3)).unwrap();
        let ep = phase(&al, 3, (6, 3)).exp().unwrap();
        let em = phase(&al.neg(), 3, (6, 3)).exp().unwrap();
        let top = ep.sub(&em.left_mul(&a)).right_mul(&al);
        let bottom = ep.add(&em.left_mul(&a)).try_inverse().unwrap();
        let want = top.mul(&bottom).derive(X).mul_int(2);
        let sol = kdv_u(&spec).unwrap();
        assert!(sol.u.agrees_with(&want) && sol.u.is_informative());
    }

    #[test]
    fn two_soliton_matrix() {
        let spec = SolitonSpec::kdv(
            2,
            vec![random_element(31, 2, 3), random_element(32, 2, 3)],
            vec![random_element(33, 2, 3), random_element(34, 2, 3)],
            (7, 3),
        )
        .unwrap();
        let sol = kdv_u(&spec).unwrap();
        assert!(sol.u.is_informative() && kdv_residual(&sol.u).is_informative());
        // the dressed L^2 is d^2 + u
        let m = dressed_power(&spec, 2, -2).unwrap();
        assert!(m.coeff(2).is_one() && m.coeff(1).is_zero());
        assert!(m.coeff(0).agrees_with(&sol.u));
        assert!((-2..0).all(|k| m.coeff(k).is_zero() && m.coeff(k).is_informative()));
    }

    #[test]
    fn kp_flow_certificate() {
        let spec = SolitonSpec {
            dim: 2,
            alphas: vec![random_element(41, 2, 2)],
            betas: vec![random_element(42, 2, 2)],
            amps: vec![random_element(43, 2, 2)],
            active_time: 2,
            orders: (8, 3),
        };
        let r = flow_residual(&spec, -4).unwrap();
        assert!(r.kmin() <= -2);
        assert!(r.is_zero() && r.terms().all(|(_, c)| c.is_informative()));
    }

    #[test]
    fn commutative_reductions() {
        assert!(commutative_tau_check(&one_soliton(1, 1, (6, 3))).unwrap());
        let s = SolitonSpec::kdv(1, vec![scalar(1), scalar(2)], vec![scalar(1), scalar(-3)], (7, 3)).unwrap();
        assert!(commutative_tau_check(&s).unwrap());
        let none = SolitonSpec::<Rational>::kdv(1, vec![], vec![], (4, 2)).unwrap();
        assert!(commutative_tau_check(&none).unwrap());
        assert!(kdv_u(&none).unwrap().u.is_zero());
    }

    #[test]
    fn sech_profile_checks() {
        let grid = Grid { radius: 0.25, points: 5 };
        let r = classical_sech_check(&one_soliton(1, 1, (12, 12)), &grid).unwrap();
        assert_eq!(r.samples, 19);
        assert!((r.peak - 2.0).abs() < 1e-12);
        assert!(r.max_deviation < 1e-5, "{}", r.max_deviation);
        let flat = classical_sech_check(&one_soliton(0, 1, (4, 4)), &grid).unwrap();
        assert_eq!(flat.max_deviation, 0.0);
        assert!(classical_sech_check(&one_soliton(1, -1, (4, 4)), &grid).is_err());
    }

    #[test]
    fn csv_layout() {
        let u = kdv_u(&one_soliton(1, 1, (6, 3))).unwrap().u;
        let empty = sample_csv(&u, &Grid { radius: 0.5, points: 0 }).unwrap();
        assert_eq!(empty, "x,t,u11\n");
        let full = sample_csv(&u, &Grid { radius: 0.5, points: 11 }).unwrap();
        assert_eq!(full.lines().count(), 122);
        assert!(full.lines().nth(1).unwrap().starts_with("-0.5,-0.5,"));
    }
}
