use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::scalar::{Scalar, Tolerances};

use super::family::SubsystemFamily;
use super::model::DbnModel;
use super::predict::{predict_exact_counted, predict_marginals_counted, DEFAULT_EXACT_CAP};

/// Measured multiply-add counts of both propagation engines next to their
/// analytic bounds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    /// Horizon `T`.
    pub horizon: usize,
    /// Number of subsets `n`.
    pub subsets: usize,
    /// Largest subset size `m`.
    pub max_subset: usize,
    /// Largest cardinality `b`.
    pub cardinality: usize,
    /// Number of state variables `M`.
    pub state_vars: usize,
    pub marginal_ops: u64,
    pub exact_ops: u64,
    /// `T * n * b^m`.
    pub marginal_bound: f64,
    /// `T * b^M`.
    pub exact_bound: f64,
}

pub fn cost_report<T: Scalar>(
    family: &SubsystemFamily<T>,
    model: &DbnModel<T>,
    horizon: usize,
    tol: &Tolerances<T>,
) -> Result<CostReport> {
    let (_, marginal) = predict_marginals_counted(family, model, horizon, tol)?;
    let (_, exact) = predict_exact_counted(model, horizon, DEFAULT_EXACT_CAP)?;
    let b = model.max_cardinality() as f64;
    let (n, m, big_m) = (family.n(), family.m(), model.state().len());
    Ok(CostReport {
        horizon,
        subsets: n,
        max_subset: m,
        cardinality: model.max_cardinality(),
        state_vars: big_m,
        marginal_ops: marginal.0,
        exact_ops: exact.0,
        marginal_bound: horizon as f64 * n as f64 * b.powi(m as i32),
        exact_bound: horizon as f64 * b.powi(big_m as i32),
    })
}
