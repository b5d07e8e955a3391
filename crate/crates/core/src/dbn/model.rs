use crate::cpt::Cpt;
use crate::error::{Error, Result};
use crate::factor::Factor;
use crate::marginals::MarginalSet;
use crate::scalar::{Scalar, Tolerances};
use crate::variable::{check_distinct, contains, space_size, Variable};

/// Name of the next-slice copy of a state variable.
pub fn next_name(name: &str) -> String {
    format!("{name}'")
}

/// Next-slice copy of a state variable.
pub fn next_var(v: &Variable) -> Variable {
    Variable::new(next_name(v.name()), v.cardinality()).expect("state variables are valid")
}

/// Initial state distribution.
#[derive(Clone, Debug, PartialEq)]
pub enum Initial<T> {
    Joint(Factor<T>),
    Marginals(MarginalSet<T>),
}

/// State variables with one transition per variable, each conditioned on
/// previous-slice state only.
#[derive(Clone, Debug, PartialEq)]
pub struct DbnModel<T> {
    state: Vec<Variable>,
    transitions: Vec<Cpt<T>>,
    initial: Initial<T>,
}

impl<T: Scalar> DbnModel<T> {
    /// `transitions[i]` must have the single child `next_var(state[i])` and
    /// parents drawn from `state`.
    pub fn new(
        state: Vec<Variable>,
        transitions: Vec<Cpt<T>>,
        initial: Initial<T>,
        tol: &Tolerances<T>,
    ) -> Result<Self> {
        if state.is_empty() {
            return Err(Error::InvalidModel("no state variables".into()));
        }
        check_distinct(&state)?;
        for v in &state {
            if contains(&state, &next_var(v)) {
                return Err(Error::InvalidModel(format!(
                    "state name `{}` clashes with a next-slice name",
                    next_name(v.name())
                )));
            }
        }
        if transitions.len() != state.len() {
            return Err(Error::InvalidModel(format!(
                "{} state variables but {} transitions",
                state.len(),
                transitions.len()
            )));
        }
        for (v, t) in state.iter().zip(&transitions) {
            if t.children() != [next_var(v)] {
                return Err(Error::InvalidModel(format!(
                    "transition for `{v}` must have child `{}`",
                    next_name(v.name())
                )));
            }
            for p in t.parents() {
                match state.iter().find(|s| s.name() == p.name()) {
                    Some(s) if s.cardinality() == p.cardinality() => {}
                    Some(s) => {
                        return Err(Error::CardinalityMismatch {
                            name: p.name().to_string(),
                            left: s.cardinality(),
                            right: p.cardinality(),
                        })
                    }
                    None => {
                        return Err(Error::InvalidModel(format!(
                            "transition for `{v}` has non-state parent `{p}`"
                        )))
                    }
                }
            }
            t.validate(tol)?;
        }
        match &initial {
            Initial::Joint(j) => {
                if j.scope().len() != state.len() || state.iter().any(|v| !j.has_var(v)) {
                    return Err(Error::InvalidModel(
                        "initial joint must cover exactly the state".into(),
                    ));
                }
                if (j.total() - T::one()).abs() > tol.norm {
                    return Err(Error::NotNormalized {
                        row: 0,
                        sum: j.total().as_f64(),
                    });
                }
            }
            Initial::Marginals(m) => {
                for f in m.marginals() {
                    if let Some(v) = f.scope().iter().find(|v| !contains(&state, v)) {
                        return Err(Error::InvalidModel(format!(
                            "initial marginal over non-state `{v}`"
                        )));
                    }
                }
                m.check_consistency(tol.consistency)?;
            }
        }
        Ok(DbnModel {
            state,
            transitions,
            initial,
        })
    }

    /// Builds from per-variable transitions given in any order.
    pub fn from_unordered(
        state: Vec<Variable>,
        mut transitions: Vec<Cpt<T>>,
        initial: Initial<T>,
        tol: &Tolerances<T>,
    ) -> Result<Self> {
        let mut ordered = Vec::with_capacity(state.len());
        for v in &state {
            let name = next_name(v.name());
            let pos = transitions
                .iter()
                .position(|t| t.children().iter().any(|c| c.name() == name))
                .ok_or_else(|| Error::InvalidModel(format!("no transition for `{v}`")))?;
            ordered.push(transitions.swap_remove(pos));
        }
        if !transitions.is_empty() {
            return Err(Error::InvalidModel(
                "transition for non-state variable".into(),
            ));
        }
        Self::new(state, ordered, initial, tol)
    }

    pub fn state(&self) -> &[Variable] {
        &self.state
    }

    pub fn transitions(&self) -> &[Cpt<T>] {
        &self.transitions
    }

    pub fn initial(&self) -> &Initial<T> {
        &self.initial
    }

    pub fn with_initial(&self, initial: Initial<T>, tol: &Tolerances<T>) -> Result<Self> {
        Self::new(self.state.clone(), self.transitions.clone(), initial, tol)
    }

    pub fn transition(&self, v: &Variable) -> Option<&Cpt<T>> {
        self.state
            .iter()
            .position(|s| s.name() == v.name())
            .map(|i| &self.transitions[i])
    }

    /// Number of joint state assignments.
    pub fn state_space(&self) -> usize {
        space_size(&self.state)
    }

    /// Largest state cardinality.
    pub fn max_cardinality(&self) -> usize {
        self.state
            .iter()
            .map(Variable::cardinality)
            .max()
            .unwrap_or(0)
    }

    /// Joint next-slice conditional `P(subset' | parents)` of a set of state
    /// variables, children in `subset` order. Next-slice copies are
    /// conditionally independent given the previous slice.
    pub fn subset_transition(&self, subset: &[Variable]) -> Result<Cpt<T>> {
        let mut iter = subset.iter();
        let first = iter
            .next()
            .ok_or_else(|| Error::InvalidModel("empty subset".into()))?;
        let lookup = |v: &Variable| {
            self.transition(v)
                .cloned()
                .ok_or_else(|| Error::InvalidModel(format!("`{v}` is not a state variable")))
        };
        let mut out = lookup(first)?;
        for v in iter {
            out = out.product(&lookup(v)?)?;
        }
        Ok(out)
    }

    /// Marginals over `subsets` at time 0.
    pub fn initial_marginals(&self, subsets: &[Vec<Variable>]) -> Result<MarginalSet<T>> {
        match &self.initial {
            Initial::Joint(j) => MarginalSet::from_joint(j, subsets),
            Initial::Marginals(m) => {
                let parts = subsets
                    .iter()
                    .map(|s| m.marginal_of(s))
                    .collect::<Result<Vec<_>>>()?;
                Ok(MarginalSet::from_parts(parts, m.is_approximate()))
            }
        }
    }

    /// Initial joint, if one was given.
    pub fn initial_joint(&self) -> Option<&Factor<T>> {
        match &self.initial {
            Initial::Joint(j) => Some(j),
            Initial::Marginals(_) => None,
        }
    }
}
