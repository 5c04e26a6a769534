//! Exact scalars, the matrix star-algebra, and the ring contract every
//! higher-level structure is generic over.

mod matrix;
mod ring;
mod scalar;

pub(crate) use matrix::random_with;
pub use matrix::{random_element, random_invertible, SqMatrix};
pub use ring::{pow, Algebra, Differential, Ring, Star, Var};
pub use scalar::Scalar;
