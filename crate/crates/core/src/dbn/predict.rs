use crate::error::{Error, Result};
use crate::factor::Factor;
use crate::marginals::MarginalSet;
use crate::scalar::{Scalar, Tolerances};
use crate::separability::{Decomposition, OpCount};
use crate::variable::{space_size, Variable};

use super::family::SubsystemFamily;
use super::model::DbnModel;

/// Default bound on the number of joint states for exact propagation.
pub const DEFAULT_EXACT_CAP: usize = 1 << 20;

/// One propagation step: each subset's next marginal from the current
/// marginals of all subsets.
pub fn predict_step<T: Scalar>(
    family: &SubsystemFamily<T>,
    current: &MarginalSet<T>,
    tol: &Tolerances<T>,
    ops: &mut OpCount,
) -> Result<MarginalSet<T>> {
    current.check_consistency(tol.consistency)?;
    let next = family
        .decompositions
        .iter()
        .zip(&family.subsets)
        .map(|(d, s)| {
            let out = d.evaluate(current, ops)?;
            Factor::new(s.clone(), out.into_values())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MarginalSet::from_parts(next, current.is_approximate()))
}

/// Subset marginals at every step `0..=horizon`.
pub fn predict_marginals<T: Scalar>(
    family: &SubsystemFamily<T>,
    model: &DbnModel<T>,
    horizon: usize,
    tol: &Tolerances<T>,
) -> Result<Vec<MarginalSet<T>>> {
    predict_marginals_counted(family, model, horizon, tol).map(|(m, _)| m)
}

pub fn predict_marginals_counted<T: Scalar>(
    family: &SubsystemFamily<T>,
    model: &DbnModel<T>,
    horizon: usize,
    tol: &Tolerances<T>,
) -> Result<(Vec<MarginalSet<T>>, OpCount)> {
    let mut ops = OpCount::default();
    let mut out = Vec::with_capacity(horizon + 1);
    out.push(model.initial_marginals(&family.subsets)?);
    for _ in 0..horizon {
        let next = predict_step(family, out.last().expect("non-empty"), tol, &mut ops)?;
        out.push(next);
    }
    out.last()
        .expect("non-empty")
        .check_consistency(tol.consistency)?;
    Ok((out, ops))
}

/// Transition operator over joint states with rows of nonzero entries,
/// state indices in `model.state()` order.
#[derive(Clone, Debug)]
pub struct ExactTransition<T> {
    state: Vec<Variable>,
    rows: Vec<Vec<(usize, T)>>,
}

impl<T: Scalar> ExactTransition<T> {
    pub fn new(model: &DbnModel<T>, cap: usize) -> Result<Self> {
        let state = model.state().to_vec();
        let size = space_size(&state);
        if size > cap {
            return Err(Error::ExactTooLarge { size, cap });
        }
        // Transition of each variable re-expressed over the full state.
        let full: Vec<_> = model
            .transitions()
            .iter()
            .map(|t| t.broadcast_parents(&state))
            .collect::<Result<_>>()?;
        let cards: Vec<usize> = state.iter().map(Variable::cardinality).collect();
        let mut rows = Vec::with_capacity(size);
        for s in 0..size {
            let per_var: Vec<&[T]> = full.iter().map(|t| t.row(s)).collect();
            let mut row = Vec::new();
            let mut digits = vec![0usize; cards.len()];
            for next in 0..size {
                let p = per_var
                    .iter()
                    .zip(&digits)
                    .fold(T::one(), |acc, (r, d)| acc * r[*d]);
                if p != T::zero() {
                    row.push((next, p));
                }
                for k in (0..cards.len()).rev() {
                    digits[k] += 1;
                    if digits[k] < cards[k] {
                        break;
                    }
                    digits[k] = 0;
                }
            }
            rows.push(row);
        }
        Ok(ExactTransition { state, rows })
    }

    /// Number of stored nonzero entries.
    pub fn nonzeros(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Pushes a joint over the state one step forward.
    pub fn step(&self, joint: &Factor<T>, ops: &mut OpCount) -> Result<Factor<T>> {
        let joint = joint.reorder(&self.state)?;
        let mut out = vec![T::zero(); self.rows.len()];
        for (row, q) in self.rows.iter().zip(joint.values()) {
            for (next, p) in row {
                out[*next] += *q * *p;
            }
            ops.add(row.len());
        }
        Factor::new(self.state.clone(), out)
    }
}

/// Joint over the state at every step `0..=horizon`.
pub fn predict_exact<T: Scalar>(model: &DbnModel<T>, horizon: usize) -> Result<Vec<Factor<T>>> {
    predict_exact_counted(model, horizon, DEFAULT_EXACT_CAP).map(|(j, _)| j)
}

pub fn predict_exact_counted<T: Scalar>(
    model: &DbnModel<T>,
    horizon: usize,
    cap: usize,
) -> Result<(Vec<Factor<T>>, OpCount)> {
    let initial = model
        .initial_joint()
        .ok_or_else(|| Error::InvalidModel("exact propagation needs an initial joint".into()))?
        .reorder(model.state())?;
    let transition = ExactTransition::new(model, cap)?;
    let mut ops = OpCount::default();
    let mut out = Vec::with_capacity(horizon + 1);
    out.push(initial);
    for _ in 0..horizon {
        let next = transition.step(out.last().expect("non-empty"), &mut ops)?;
        out.push(next);
    }
    Ok((out, ops))
}
