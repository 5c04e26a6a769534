use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// Ground field of the matrix algebra.
///
/// Implemented for every type with field-like `num-traits` arithmetic:
/// `BigRational` for exact work, `f64`/`f32` for sampling and plotting.
/// Only the rational instance gives exact zero tests.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + FromStr
    + PartialEq
    + PartialOrd
    + Num
    + Signed
    + FromPrimitive
    + ToPrimitive
    + Send
    + Sync
    + 'static
{
}

impl<T> Scalar for T where
    T: Clone
        + Debug
        + Display
        + FromStr
        + PartialEq
        + PartialOrd
        + Num
        + Signed
        + FromPrimitive
        + ToPrimitive
        + Send
        + Sync
        + 'static
{
}
