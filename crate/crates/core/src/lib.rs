//! Detection and exploitation of additive separability in discrete
//! conditional distributions, with exact marginal propagation for dynamic
//! Bayesian networks decomposed into self-sufficient subsystems.
//!
//! All algorithms are generic over a [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar to `f64`.

pub mod cpt;
pub mod dbn;
pub mod error;
pub mod factor;
pub mod inference;
pub mod marginals;
pub mod random;
pub mod scalar;
pub mod separability;
pub mod transform;
pub mod variable;

pub use error::{Error, Result, Witness};
pub use scalar::{Scalar, Tolerances};
pub use variable::{Assignment, Variable};

pub type Factor = factor::Factor<f64>;
pub type Cpt = cpt::Cpt<f64>;
pub type MarginalSet = marginals::MarginalSet<f64>;
pub type SeparableDecomposition = separability::SeparableDecomposition<f64>;
pub type TreeDecomposition = separability::TreeDecomposition<f64>;
pub type DbnModel = dbn::DbnModel<f64>;
pub type SubsystemFamily = dbn::SubsystemFamily<f64>;
