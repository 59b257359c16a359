//! Weight scalars.
//!
//! Every algorithm in this crate is generic over the type used to store
//! influence weights. Exact rationals are the default because the cohesion
//! predicates separate `>= 1/2` from `> 1/2`; floating-point weights are
//! supported for speed and interop but only behave exactly on dyadic weights.

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::{Num, ToPrimitive};

/// Numeric type usable as an influence weight and as a social cost.
pub trait Scalar: Num + Clone + Debug + PartialOrd + Send + Sync + 'static {
    /// Whether arithmetic on this type is exact.
    const EXACT: bool;

    /// Builds `numer / denom`. `denom` must be non-zero.
    fn from_ratio(numer: i64, denom: i64) -> Self;

    fn from_int(value: i64) -> Self {
        Self::from_ratio(value, 1)
    }

    fn half() -> Self {
        Self::from_ratio(1, 2)
    }

    fn to_f64(&self) -> f64;

    /// True when a row sum should be accepted as exactly one.
    fn is_unit_sum(&self) -> bool;

    /// Renders the value as `num/den` for the edge-list format.
    fn to_ratio_string(&self) -> String;

    /// `self <= other`, allowing rounding slack on inexact types so that
    /// ties that are exact in rational arithmetic stay ties.
    fn tol_le(&self, other: &Self) -> bool {
        self <= other
    }

    fn tol_ge(&self, other: &Self) -> bool {
        other.tol_le(self)
    }
}

macro_rules! impl_ratio_scalar {
    ($int:ty) => {
        impl Scalar for Ratio<$int> {
            const EXACT: bool = true;

            fn from_ratio(numer: i64, denom: i64) -> Self {
                Ratio::new(numer as $int, denom as $int)
            }

            fn to_f64(&self) -> f64 {
                ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
            }

            fn is_unit_sum(&self) -> bool {
                *self == Ratio::from_integer(1)
            }

            fn to_ratio_string(&self) -> String {
                format!("{}/{}", self.numer(), self.denom())
            }
        }
    };
}

impl_ratio_scalar!(i64);
impl_ratio_scalar!(i128);

macro_rules! impl_float_scalar {
    ($float:ty, $tol:expr) => {
        impl Scalar for $float {
            const EXACT: bool = false;

            fn from_ratio(numer: i64, denom: i64) -> Self {
                numer as $float / denom as $float
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn is_unit_sum(&self) -> bool {
                (*self - 1.0).abs() <= $tol
            }

            fn tol_le(&self, other: &Self) -> bool {
                *self <= *other + $tol * (1.0 + other.abs())
            }

            fn to_ratio_string(&self) -> String {
                match Ratio::<i64>::approximate_float(*self) {
                    Some(r) => format!("{}/{}", r.numer(), r.denom()),
                    None => format!("{}", self),
                }
            }
        }
    };
}

impl_float_scalar!(f64, 1e-9);
impl_float_scalar!(f32, 1e-5);
