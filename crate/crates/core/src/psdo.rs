//! Formal pseudodifferential operators `sum_k c_k d^k`, coefficients on the
//! left, with a truncated tail of negative orders.
//!
//! Every operator records the lowest order `lo` whose coefficient is known.
//! An operator is *exact* when all orders below `lo` are known to vanish
//! (differential operators, monomials); otherwise the coefficients below
//! `lo` are simply unknown and all results derived from it carry the
//! corresponding reliability bound. The negative part of a truncated
//! operator may know no coefficient at all (`kmin() > kmax()`).

use std::fmt::Write as _;

use crate::algebra::{Algebra, Differential, Ring, Scalar, SqMatrix, Var};
use crate::diffop::DiffOp;
use crate::error::{Error, Result};
use crate::series::TruncSeries;

#[derive(Clone, Debug, PartialEq)]
pub struct PsDO<R> {
    var: Var,
    kmax: i64,
    lo: i64,
    /// Coefficients of orders `lo..=kmax`.
    coeffs: Vec<R>,
    exact: bool,
    zero: R,
}

/// Generalized binomial coefficient `k (k-1) ... (k-i+1) / i!`.
pub(crate) fn gen_binomial(k: i64, i: usize) -> i64 {
    let mut c: i128 = 1;
    for t in 0..i as i128 {
        c = c * (k as i128 - t) / (t + 1);
    }
    i64::try_from(c).expect("binomial coefficient overflows i64")
}

impl<R: Differential> PsDO<R> {
    /// Operator with coefficients `coeffs[k - lo]` for `lo <= k <= kmax`.
    pub fn new(var: Var, lo: i64, coeffs: Vec<R>, exact: bool) -> Self {
        assert!(!coeffs.is_empty(), "operator needs at least one coefficient");
        let zero = coeffs[0].zero_like();
        let kmax = lo + coeffs.len() as i64 - 1;
        PsDO { var, kmax, lo, coeffs, exact, zero }
    }

    /// `c d^k`, exact.
    pub fn monomial(var: Var, c: R, k: i64) -> Self {
        Self::new(var, k, vec![c], true)
    }

    /// `d`, exact.
    pub fn d(var: Var, template: &R) -> Self {
        Self::monomial(var, template.one_like(), 1)
    }

    pub fn from_diffop(l: &DiffOp<R>) -> Self {
        Self::new(l.var(), 0, l.coeffs().to_vec(), true)
    }

    /// The differential operator of the nonnegative orders.
    pub fn to_diffop(&self) -> Result<DiffOp<R>> {
        if self.kmax < 0 {
            return Ok(DiffOp::constant(self.var, self.zero.clone()));
        }
        let (plus, _) = self.split();
        if !plus.exact {
            return Err(Error::FloorTooShallow("nonnegative orders are not all known".into()));
        }
        Ok(DiffOp::new(self.var, (0..=self.kmax).map(|k| plus.coeff(k)).collect()))
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn kmax(&self) -> i64 {
        self.kmax
    }

    /// Lowest order with a known coefficient.
    pub fn kmin(&self) -> i64 {
        self.lo
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    /// Lowest reliable order; `i64::MIN` for exact operators.
    pub fn floor(&self) -> i64 {
        if self.exact {
            i64::MIN
        } else {
            self.lo
        }
    }

    /// Coefficient of `d^k`; zero above `kmax` and, for exact operators,
    /// below `lo`.
    pub fn coeff(&self, k: i64) -> R {
        if k < self.lo || k > self.kmax {
            assert!(k > self.kmax || self.exact, "order {k} is below the known floor {}", self.lo);
            return self.zero.clone();
        }
        self.coeffs[(k - self.lo) as usize].clone()
    }

    /// Whether the coefficient of `d^k` is known.
    pub fn knows(&self, k: i64) -> bool {
        self.exact || k >= self.lo
    }

    /// `(k, c_k)` for every stored order, highest first.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &R)> {
        self.coeffs.iter().enumerate().rev().map(move |(i, c)| (self.lo + i as i64, c))
    }

    pub fn map(&self, f: impl Fn(&R) -> R) -> Self {
        PsDO { coeffs: self.coeffs.iter().map(f).collect(), ..self.clone() }
    }

    /// Drop everything below order `floor`.
    pub fn truncate(&self, floor: i64) -> Self {
        if floor <= self.lo {
            return self.clone();
        }
        if floor > self.kmax {
            return PsDO { kmax: floor, lo: floor, coeffs: vec![self.zero.clone()], exact: false, ..self.clone() };
        }
        let coeffs = self.coeffs[(floor - self.lo) as usize..].to_vec();
        PsDO { lo: floor, coeffs, exact: false, ..self.clone() }
    }

    fn combine(&self, other: &Self, f: impl Fn(&R, &R) -> R) -> Self {
        assert_eq!(self.var, other.var, "operators in different variables");
        let exact = self.exact && other.exact;
        let lo = if exact {
            self.lo.min(other.lo)
        } else {
            [self, other].iter().filter(|p| !p.exact).map(|p| p.lo).max().expect("one is inexact")
        };
        let kmax = self.kmax.max(other.kmax).max(lo);
        let get = |p: &Self, k: i64| if p.knows(k) { p.coeff(k) } else { p.zero.clone() };
        let coeffs = (lo..=kmax).map(|k| f(&get(self, k), &get(other, k))).collect();
        PsDO { var: self.var, kmax, lo, coeffs, exact, zero: self.zero.clone() }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a.sub(b))
    }

    /// `self o other`, keeping orders `>= floor` (and only those that are
    /// reliable given the operands' own floors).
    ///
    /// Uses `d^k o b = sum_{i >= 0} C(k, i) (D^i b) d^(k-i)`, a finite sum
    /// for `k >= 0`.
    pub fn compose(&self, other: &Self, floor: i64) -> Result<Self> {
        if self.var != other.var {
            return Err(Error::VarMismatch(self.var.to_string(), other.var.to_string()));
        }
        let mut bound = floor;
        if !self.exact {
            bound = bound.max(self.lo + other.kmax);
        }
        if !other.exact {
            bound = bound.max(other.lo + self.kmax);
        }
        let finite = self.exact && other.exact && self.lo >= 0;
        let (lo, exact) = if finite && bound <= other.lo {
            (other.lo, true)
        } else if bound == i64::MIN {
            return Err(Error::FloorTooShallow("infinite composition needs a floor".into()));
        } else {
            (bound, false)
        };
        let kmax = (self.kmax + other.kmax).max(lo);
        let mut out = vec![self.zero.clone(); (kmax - lo + 1) as usize];
        for (j, b) in other.terms() {
            let mut db = b.clone();
            let mut i = 0usize;
            loop {
                // highest reachable order for this derivative count
                if self.kmax - i as i64 + j < lo {
                    break;
                }
                if self.lo >= 0 && i as i64 > self.kmax {
                    break;
                }
                if i > 0 {
                    db = db.derive(self.var);
                }
                for (k, a) in self.terms() {
                    let order = k - i as i64 + j;
                    if (k >= 0 && (i as i64) > k) || order < lo {
                        continue;
                    }
                    let c = gen_binomial(k, i);
                    let idx = (order - lo) as usize;
                    out[idx] = out[idx].add(&a.mul(&db).mul_int(c));
                }
                i += 1;
            }
        }
        Ok(PsDO { var: self.var, kmax, lo, coeffs: out, exact, zero: self.zero.clone() })
    }

    /// `(P_+, P_-)`: orders `>= 0` and orders `<= -1`.
    pub fn split(&self) -> (Self, Self) {
        let plus = if self.kmax < 0 {
            PsDO { kmax: 0, lo: 0, coeffs: vec![self.zero.clone()], exact: true, ..self.clone() }
        } else {
            let lo = self.lo.max(0);
            PsDO {
                kmax: self.kmax,
                lo,
                coeffs: self.coeffs[(lo - self.lo) as usize..].to_vec(),
                exact: self.exact || self.lo <= 0,
                ..self.clone()
            }
        };
        let minus = if self.lo > -1 && self.exact {
            PsDO { kmax: -1, lo: -1, coeffs: vec![self.zero.clone()], ..self.clone() }
        } else if self.lo > -1 {
            // no negative order is known
            PsDO { kmax: -1, lo: 0, coeffs: vec![], ..self.clone() }
        } else {
            let top = self.kmax.min(-1);
            PsDO {
                kmax: top,
                lo: self.lo,
                coeffs: self.coeffs[..(top - self.lo + 1) as usize].to_vec(),
                ..self.clone()
            }
        };
        (plus, minus)
    }

    /// `self^m`, `m >= 1`.
    pub fn power(&self, m: u32, floor: i64) -> Result<Self> {
        if m == 0 {
            return Err(Error::Shape("power needs m >= 1".into()));
        }
        // intermediate products keep enough orders for the later factors
        let step = self.kmax.max(0);
        let mut acc = self.clone();
        for r in 1..m {
            let later = (m - 1 - r) as i64 * step;
            acc = acc.compose(self, floor.saturating_sub(later))?;
        }
        Ok(acc)
    }

    /// Inverse of `d^N + (lower orders)`, known down to order `floor`.
    ///
    /// The tail coefficient `r_j` of `d^{-N} + r_1 d^{-N-1} + ...` is fixed
    /// by cancelling order `-j` of `self o (the inverse so far)`.
    pub fn inverse_monic(&self, floor: i64) -> Result<Self> {
        let n = self.kmax;
        if !self.coeff(n).is_one() {
            return Err(Error::Shape("operator is not monic".into()));
        }
        if floor > -n {
            return Err(Error::FloorTooShallow(format!("the inverse starts at order {}", -n)));
        }
        let depth = (-n - floor) as usize;
        // coeffs[i] holds the coefficient of d^(floor + i)
        let mut coeffs = vec![self.zero.clone(); depth + 1];
        coeffs[depth] = self.zero.one_like();
        for j in 1..=depth {
            let slot = depth - j;
            let trial = PsDO::new(self.var, -n - j as i64, coeffs[slot..].to_vec(), false);
            let prod = self.compose(&trial, -(j as i64))?;
            if !prod.knows(-(j as i64)) {
                return Err(Error::FloorTooShallow("operator tail is not known deep enough".into()));
            }
            coeffs[slot] = prod.coeff(-(j as i64)).neg();
        }
        Ok(PsDO::new(self.var, floor, coeffs, false))
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &Self, floor: i64) -> Result<Self> {
        Ok(self.compose(other, floor)?.sub(&other.compose(self, floor)?))
    }

    /// Whether every known coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Ring::is_zero)
    }

    /// Highest order with a nonzero known coefficient.
    pub fn leading_nonzero(&self) -> Option<i64> {
        self.terms().find(|(_, c)| !c.is_zero()).map(|(k, _)| k)
    }

    /// Shape `d + w_0 d^{-1} + w_1 d^{-2} + ...`.
    pub fn is_kp_shape(&self) -> bool {
        self.knows(0) && self.kmax == 1 && self.coeff(1).is_one() && self.coeff(0).is_zero()
    }

    /// Shape `d^n + u_2 d^{n-2} + ... + u_n`: exact, differential, monic,
    /// no `d^{n-1}` term.
    pub fn check_kdv_shape(&self) -> Result<usize> {
        let n = self.kmax;
        if !self.exact || self.lo < 0 || n < 1 {
            return Err(Error::Shape("expected a differential operator of positive order".into()));
        }
        if !self.coeff(n).is_one() {
            return Err(Error::Shape("operator is not monic".into()));
        }
        if n >= 2 && !self.coeff(n - 1).is_zero() {
            return Err(Error::Shape("subleading coefficient must vanish".into()));
        }
        Ok(n as usize)
    }
}

impl<R: Differential + Algebra> PsDO<R> {
    /// `L = d + w_0 d^{-1} + ... + w_{depth-1} d^{-depth}` with `L^n = M`
    /// down to order `n - 1 - depth`.
    ///
    /// `w_j` is fixed by the coefficient of `d^{n-2-j}` in `L^n`, which is
    /// `n w_j` plus terms in `w_0, ..., w_{j-1}`.
    pub fn nth_root(m_op: &Self, depth: usize) -> Result<Self> {
        let n = m_op.check_kdv_shape()?;
        let var = m_op.var;
        let zero = m_op.zero.clone();
        // coeffs[i] holds the coefficient of d^(i - depth); w_j sits at d^(-1-j)
        let mut coeffs = vec![zero.clone(); depth + 2];
        coeffs[depth + 1] = zero.one_like();
        for j in 0..depth {
            let slot = depth - 1 - j;
            let trial = PsDO::new(var, -1 - j as i64, coeffs[slot..].to_vec(), false);
            let target = n as i64 - 2 - j as i64;
            let pw = trial.power(n as u32, target)?;
            let have = pw.coeff(target);
            let want = if target >= 0 { m_op.coeff(target) } else { zero.clone() };
            coeffs[slot] = want.sub(&have).div_int(n as i64);
        }
        Ok(PsDO::new(var, -(depth as i64), coeffs, false))
    }
}

/// `[B_m, L]` with `B_m = (L^m)_+`: the KP flow `dL/dt_m`. The orders
/// `>= 0` cancel for `L` of the shape `d + w_0 d^{-1} + ...`; a surviving
/// term there is a [`Error::TangencyViolation`].
pub fn kp_rhs<R: Differential>(l: &PsDO<R>, m: u32) -> Result<PsDO<R>> {
    if !l.is_kp_shape() {
        return Err(Error::Shape("L must be d + w_0 d^{-1} + ...".into()));
    }
    let floor = l.kmin();
    let b = b_part(l, m)?;
    let rhs = b.commutator(l, floor)?;
    if let Some(k) = rhs.terms().filter(|(k, c)| *k >= 0 && !c.is_zero()).map(|(k, _)| k).next() {
        return Err(Error::TangencyViolation(k));
    }
    if rhs.kmin() > -1 {
        return Err(Error::FloorTooShallow(format!("L must be known down to order {} for m = {m}", -1 - m as i64)));
    }
    Ok(rhs.split().1)
}

/// `(L^m)_+`, which must be fully known.
pub fn b_part<R: Differential>(l: &PsDO<R>, m: u32) -> Result<PsDO<R>> {
    let pw = l.power(m, 0)?;
    let (plus, _) = pw.split();
    if !plus.is_exact() {
        return Err(Error::FloorTooShallow(format!("(L^{m})_+ needs a deeper floor")));
    }
    Ok(plus)
}

/// `[(M^{1/n})^m_+, M]` for `M = d^n + u_2 d^{n-2} + ... + u_n`. The
/// result is a differential operator of order at most `n - 2`.
pub fn nkdv_rhs<R: Differential + Algebra>(m_op: &PsDO<R>, m: u32) -> Result<PsDO<R>> {
    let n = m_op.check_kdv_shape()?;
    let root = PsDO::nth_root(m_op, m as usize + 1)?;
    let b = b_part(&root, m)?;
    let rhs = b.commutator(m_op, i64::MIN)?;
    for k in (n as i64 - 1)..=rhs.kmax() {
        if !rhs.coeff(k).is_zero() {
            return Err(Error::TangencyViolation(k));
        }
    }
    Ok(rhs)
}

impl<S: Scalar> PsDO<TruncSeries<SqMatrix<S>>> {
    /// `kmax=.. kmin=..` followed by one series dump per order, highest first.
    pub fn to_dump(&self) -> String {
        let mut out = format!("kmax={} kmin={}{}\n", self.kmax, self.lo, if self.exact { " exact" } else { "" });
        for (k, c) in self.terms() {
            let _ = writeln!(out, "order {k}:");
            out.push_str(&c.to_dump());
        }
        out
    }
}
