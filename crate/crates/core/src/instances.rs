//! Seeded random instances for the certificates. Every generator draws from
//! a ChaCha stream seeded by the caller, so an instance is a pure function
//! of its arguments. Degenerate draws are rejected and redrawn from the same
//! stream.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{random_invertible, random_with, Ring, Star, Var};
use crate::ncmatrix::wronski;
use crate::psdo::PsDO;
use crate::series::{Derivation, Vars};
use crate::soliton::SolitonSpec;
use crate::toda::{TodaInitial, TodaType, U, V};
use crate::{AlgebraElement, Rational, Series};

/// Entry bound of random matrices.
const BOUND: i64 = 3;
/// Redraw limit before a generator gives up.
const ATTEMPTS: usize = 1000;

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

fn element(r: &mut ChaCha8Rng, dim: usize) -> AlgebraElement {
    random_with(r, dim, BOUND)
}

fn random_series(r: &mut ChaCha8Rng, var: Var, dim: usize, order: usize) -> Series {
    Series::univariate(var, (0..=order).map(|_| element(r, dim)).collect())
}

/// Univariate series in `var` with random coefficients up to `order`.
pub fn series(seed: u64, var: Var, dim: usize, order: usize) -> Series {
    random_series(&mut rng(seed, 1), var, dim, order)
}

/// Whether every leading Wronski matrix `W(f_1, ..., f_i)` is invertible at 0.
fn generic(f: &[Series], var: Var) -> bool {
    (1..=f.len()).all(|i| wronski(&f[..i], Derivation(var)).constant_terms().inverse().is_ok())
}

/// `n` series in `var` with every leading Wronski matrix invertible at 0.
pub fn kernel(seed: u64, var: Var, dim: usize, n: usize, order: usize) -> Vec<Series> {
    let mut r = rng(seed, 2);
    for _ in 0..ATTEMPTS {
        let f: Vec<Series> = (0..n).map(|_| random_series(&mut r, var, dim, order)).collect();
        if generic(&f, var) {
            return f;
        }
    }
    panic!("no nondegenerate kernel found for seed {seed}");
}

/// Random `g_1, ..., g_n` in `var` with constant term 1.
pub fn unit_factors(seed: u64, var: Var, dim: usize, n: usize, order: usize) -> Vec<Series> {
    let mut r = rng(seed, 3);
    (0..n)
        .map(|_| {
            let mut c: Vec<AlgebraElement> = (0..=order).map(|_| element(&mut r, dim)).collect();
            c[0] = AlgebraElement::identity(dim);
            Series::univariate(var, c)
        })
        .collect()
}

/// `n` constant elements with all Vandermonde prefixes nondegenerate.
pub fn vieta_roots(seed: u64, dim: usize, n: usize) -> Vec<AlgebraElement> {
    let mut r = rng(seed, 4);
    for _ in 0..ATTEMPTS {
        let x: Vec<AlgebraElement> = (0..n).map(|_| element(&mut r, dim)).collect();
        if crate::diffop::vieta_roots(&x).is_ok() {
            return x;
        }
    }
    panic!("no generic roots found for seed {seed}");
}

fn polynomial(r: &mut ChaCha8Rng, var: Var, c0: &AlgebraElement, degree: usize, order: usize) -> Series {
    let mut c = vec![c0.clone()];
    c.extend((0..degree).map(|_| element(r, c0.dim())));
    Series::polynomial(var, &c, order)
}

/// Type A initial data: polynomials of the given degree with matching,
/// invertible constant terms.
pub fn toda_initial(seed: u64, dim: usize, n: usize, degree: usize, order: usize) -> TodaInitial<AlgebraElement> {
    let mut r = rng(seed, 5);
    let c: Vec<AlgebraElement> = (0..n).map(|_| random_invertible(&mut r, dim, BOUND)).collect();
    TodaInitial {
        eta: c.iter().map(|c| polynomial(&mut r, V, c, degree, order)).collect(),
        psi: c.iter().map(|c| polynomial(&mut r, U, c, degree, order)).collect(),
    }
}

/// `(1 - S)(1 + S)^{-1}` for a skew polynomial `S` of the given degree:
/// a series `x` with `x^* x = 1`.
fn cayley(r: &mut ChaCha8Rng, var: Var, s0: &AlgebraElement, degree: usize, order: usize) -> Series {
    let mut c = vec![s0.clone()];
    c.extend((0..degree).map(|_| {
        let x = element(r, s0.dim());
        x.sub(&x.star())
    }));
    let s = Series::polynomial(var, &c, order);
    let one = s.one_like();
    one.sub(&s).mul(&one.add(&s).inverse().expect("1 + S is invertible for skew S"))
}

/// First-half data for the symmetric systems: `k` free components, plus a
/// unitary middle component for type B.
pub fn toda_sym_initial(
    seed: u64,
    kind: TodaType,
    dim: usize,
    k: usize,
    degree: usize,
    order: usize,
) -> TodaInitial<AlgebraElement> {
    let mut init = toda_initial(seed, dim, k, degree, order);
    if kind == TodaType::B {
        let mut r = rng(seed, 6);
        let x = element(&mut r, dim);
        let s0 = x.sub(&x.star());
        init.eta.push(cayley(&mut r, V, &s0, degree, order));
        init.psi.push(cayley(&mut r, U, &s0, degree, order));
    }
    init
}

/// `f = sum_{i <= n} q_i(v) p_i(u)`, a kernel of rank `n`, with generic
/// polynomial factors of the given degree, known up to `orders`.
pub fn rank_kernel(seed: u64, dim: usize, n: usize, degree: usize, orders: (usize, usize)) -> Series {
    let mut r = rng(seed, 7);
    let mut acc: Option<Series> = None;
    for _ in 0..n {
        let c = element(&mut r, dim);
        let q = polynomial(&mut r, V, &c, degree, orders.1).embed(U, V, orders.0 + 1).expect("univariate");
        let c = element(&mut r, dim);
        let p = polynomial(&mut r, U, &c, degree, orders.0).embed(U, V, orders.1 + 1).expect("univariate");
        let term = q.mul(&p);
        acc = Some(match acc {
            Some(a) => a.add(&term),
            None => term,
        });
    }
    acc.unwrap_or_else(|| Series::constant(AlgebraElement::zeros(dim), Vars::Two(U, V), orders))
        .truncate((orders.0 + 1, orders.1 + 1))
}

/// `d + w_0 d^{-1} + ... + w_{depth-1} d^{-depth}` in `x` with random
/// series coefficients.
pub fn kp_operator(seed: u64, dim: usize, depth: usize, order: usize) -> PsDO<Series> {
    let mut r = rng(seed, 8);
    let x = Var::X;
    let mut c: Vec<Series> = (0..depth).map(|_| random_series(&mut r, x, dim, order)).collect();
    let one = Series::constant(AlgebraElement::identity(dim), Vars::One(x), (order, 0));
    c.push(one.zero_like());
    c.push(one);
    PsDO::new(x, -(depth as i64), c, false)
}

/// `d^n + u_2 d^{n-2} + ... + u_n` in `x` (exact differential operator).
pub fn kdv_operator(seed: u64, dim: usize, n: usize, order: usize) -> PsDO<Series> {
    let mut r = rng(seed, 9);
    let x = Var::X;
    let one = Series::constant(AlgebraElement::identity(dim), Vars::One(x), (order, 0));
    let mut c: Vec<Series> = (0..n.saturating_sub(1)).map(|_| random_series(&mut r, x, dim, order)).collect();
    if n >= 1 {
        c.push(one.zero_like());
    }
    c.push(one);
    PsDO::new(x, 0, c, true)
}

/// KdV multisoliton parameters whose generators are generic.
pub fn kdv_spec(seed: u64, dim: usize, n: usize, orders: (usize, usize)) -> SolitonSpec<Rational> {
    let mut r = rng(seed, 10);
    for _ in 0..ATTEMPTS {
        let alphas = (0..n).map(|_| element(&mut r, dim)).collect();
        let amps = (0..n).map(|_| element(&mut r, dim)).collect();
        let spec = SolitonSpec::kdv(dim, alphas, amps, orders).expect("consistent dimensions");
        if crate::soliton::soliton_generators(&spec).is_ok_and(|y| generic(&y, Var::X)) {
            return spec;
        }
    }
    panic!("no generic soliton parameters found for seed {seed}");
}

/// KP multisoliton parameters (independent `beta`) for the time `t_m`.
pub fn kp_spec(seed: u64, dim: usize, n: usize, m: u32, orders: (usize, usize)) -> SolitonSpec<Rational> {
    let mut r = rng(seed, 11);
    for _ in 0..ATTEMPTS {
        let draw = |r: &mut ChaCha8Rng| (0..n).map(|_| element(r, dim)).collect::<Vec<_>>();
        let spec =
            SolitonSpec { dim, alphas: draw(&mut r), betas: draw(&mut r), amps: draw(&mut r), active_time: m, orders };
        if crate::soliton::dressing_operator(&spec).is_ok() {
            return spec;
        }
    }
    panic!("no generic soliton parameters found for seed {seed}");
}
