//! Scalar abstraction shared by every table in the crate.
//!
//! All algorithms are written against [`Scalar`], implemented for `f32` and
//! `f64`. The tolerances that separate genuine structure from rounding noise
//! differ per precision, so each scalar carries its own defaults.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point type usable as a probability value.
pub trait Scalar:
    'static
    + Send
    + Sync
    + Float
    + NumAssign
    + FromPrimitive
    + ToPrimitive
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
{
    /// Default tolerance for normalization, consistency and additivity checks.
    const DEFAULT_EPS: f64;
    /// Pivot magnitude below which a column is treated as linearly dependent.
    const DEFAULT_PIVOT: f64;

    /// Converts an `f64` constant into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    const DEFAULT_EPS: f64 = 1e-9;
    const DEFAULT_PIVOT: f64 = 1e-10;
}

impl Scalar for f32 {
    const DEFAULT_EPS: f64 = 1e-4;
    const DEFAULT_PIVOT: f64 = 1e-5;
}

/// Numerical thresholds used by the structural checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances<T> {
    /// Distributions must sum to one within this.
    pub norm: T,
    /// Overlapping marginals must agree on shared variables within this.
    pub consistency: T,
    /// Additivity identities and reconstructions must hold within this.
    pub sep: T,
    /// Rank threshold for Gaussian elimination in the sufficiency oracle.
    pub pivot: T,
}

impl<T: Scalar> Default for Tolerances<T> {
    fn default() -> Self {
        let eps = T::lit(T::DEFAULT_EPS);
        Tolerances {
            norm: eps,
            consistency: eps,
            sep: eps,
            pivot: T::lit(T::DEFAULT_PIVOT),
        }
    }
}

impl<T: Scalar> Tolerances<T> {
    /// Same threshold for norm, consistency and separability checks.
    pub fn uniform(eps: T) -> Self {
        Tolerances {
            norm: eps,
            consistency: eps,
            sep: eps,
            ..Self::default()
        }
    }
}
