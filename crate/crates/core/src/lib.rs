//! Exact noncommutative computer algebra for integrable systems.
//!
//! The crate is built bottom-up:
//!
//! * [`algebra`]: exact scalars, `d x d` matrices as a concrete star-algebra,
//!   and the [`Ring`] contract everything else is generic over;
//! * [`series`]: truncated formal power series in one or two variables;
//! * [`ncmatrix`]: matrices over noncommutative rings, inverses and
//!   quasideterminants, Wronski and Vandermonde builders;
//! * [`diffop`]: differential operators, construction from a kernel,
//!   factorization and the noncommutative Vieta formulas;
//! * [`toda`]: nonabelian Toda field equations of types A, B, C;
//! * [`psdo`]: pseudodifferential operators and the KP / nKdV flows;
//! * [`soliton`]: dressing construction of KP and KdV multisolitons.
//!
//! All checks are exact over [`Rational`]; every truncated object carries
//! the precision up to which its coefficients are known.

pub mod algebra;
pub mod diffop;
pub mod error;
pub mod instances;
pub mod ncmatrix;
pub mod psdo;
pub mod series;
pub mod soliton;
pub mod toda;

pub use algebra::{Algebra, Differential, Ring, Scalar, SqMatrix, Star, Var};
pub use diffop::{DiffOp, Factorization};
pub use error::{Error, Result};
pub use ncmatrix::NcMatrix;
pub use psdo::PsDO;
pub use series::{Derivation, TruncSeries, Vars};

/// Exact rational scalars.
pub type Rational = num_rational::BigRational;
/// The algebra `A`: square matrices over the rationals.
pub type AlgebraElement = SqMatrix<Rational>;
/// Double-precision matrices, used for sampling solutions on grids.
pub type FloatElement = SqMatrix<f64>;
/// Truncated power series over `A`.
pub type Series = TruncSeries<AlgebraElement>;
/// Differential operator with series coefficients.
pub type Operator = DiffOp<Series>;
/// Pseudodifferential operator with series coefficients.
pub type PseudoOp = PsDO<Series>;
/// Matrix over the series ring.
pub type SeriesMatrix = NcMatrix<Series>;
