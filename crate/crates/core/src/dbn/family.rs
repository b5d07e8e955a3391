use crate::error::{Error, Result};
use crate::scalar::{Scalar, Tolerances};
use crate::separability::{
    sufficiency_oracle_with_cap, tree_separate, TreeDecomposition, TreeRepresentation,
    DEFAULT_ORACLE_CAP,
};
use crate::variable::{contains, Variable};

use super::model::DbnModel;

/// How a family's self-sufficiency was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verification {
    /// Tree decompositions exist and the null-space oracle agrees.
    Oracle,
    /// Tree decompositions exist; the parent space was beyond the oracle cap.
    Unverified,
}

/// Subsets of the state whose marginals propagate exactly, with the
/// decomposed next-slice conditional of each subset.
#[derive(Clone, Debug, PartialEq)]
pub struct SubsystemFamily<T> {
    pub(crate) subsets: Vec<Vec<Variable>>,
    pub(crate) tree: TreeRepresentation,
    pub(crate) decompositions: Vec<TreeDecomposition<T>>,
    pub(crate) verification: Verification,
}

impl<T: Scalar> SubsystemFamily<T> {
    pub fn subsets(&self) -> &[Vec<Variable>] {
        &self.subsets
    }

    pub fn tree(&self) -> &TreeRepresentation {
        &self.tree
    }

    /// Decomposition of `P(subset_i' | state)` for each subset.
    pub fn decompositions(&self) -> &[TreeDecomposition<T>] {
        &self.decompositions
    }

    pub fn verification(&self) -> Verification {
        self.verification
    }

    /// Number of subsets.
    pub fn n(&self) -> usize {
        self.subsets.len()
    }

    /// Largest subset size.
    pub fn m(&self) -> usize {
        self.subsets.iter().map(Vec::len).max().unwrap_or(0)
    }
}

fn names(vars: &[Variable]) -> Vec<String> {
    vars.iter().map(|v| v.name().to_string()).collect()
}

fn same_set(a: &[Variable], b: &[Variable]) -> bool {
    a.len() == b.len() && a.iter().all(|v| contains(b, v))
}

/// Decomposes the next-slice conditional of `subset` along `tree`, whose
/// leaves are the source subsets. With `oracle_cap`, the result is
/// cross-checked against the null-space oracle when the parent space fits.
pub fn check_subset<T: Scalar>(
    model: &DbnModel<T>,
    subset: &[Variable],
    tree: &TreeRepresentation,
    tol: &Tolerances<T>,
    oracle_cap: Option<usize>,
) -> Result<(TreeDecomposition<T>, Verification)> {
    let cpt = model.subset_transition(subset)?;
    let fail = |reason: String, witness| Error::NotSelfSufficient {
        subset: names(subset),
        reason,
        witness,
    };
    let d = tree_separate(&cpt, tree, tol).map_err(|e| {
        let reason = e.to_string();
        match e {
            Error::NotTSeparable { witness, .. } => fail(reason, Some(witness)),
            other => other,
        }
    })?;
    let mut verification = Verification::Unverified;
    if let Some(cap) = oracle_cap {
        match sufficiency_oracle_with_cap(&cpt, &tree.leaves(), tol, cap) {
            Ok(true) => verification = Verification::Oracle,
            Ok(false) => return Err(fail(
                "tree decomposition exists but subset marginals do not determine the conditional"
                    .into(),
                None,
            )),
            Err(Error::OracleTooLarge { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok((d, verification))
}

/// Verifies that the marginals over `subsets` at one slice determine each
/// subset's marginal at the next, storing the decompositions that compute
/// it. `tree` must have the subsets as its leaves.
pub fn check_self_sufficient<T: Scalar>(
    model: &DbnModel<T>,
    subsets: &[Vec<Variable>],
    tree: &TreeRepresentation,
    tol: &Tolerances<T>,
) -> Result<SubsystemFamily<T>> {
    check_self_sufficient_with_cap(model, subsets, tree, tol, DEFAULT_ORACLE_CAP)
}

pub fn check_self_sufficient_with_cap<T: Scalar>(
    model: &DbnModel<T>,
    subsets: &[Vec<Variable>],
    tree: &TreeRepresentation,
    tol: &Tolerances<T>,
    oracle_cap: usize,
) -> Result<SubsystemFamily<T>> {
    if subsets.is_empty() {
        return Err(Error::InvalidModel("empty family".into()));
    }
    for s in subsets {
        if s.is_empty() {
            return Err(Error::InvalidModel("empty subset in family".into()));
        }
        if let Some(v) = s.iter().find(|v| !contains(model.state(), v)) {
            return Err(Error::InvalidModel(format!(
                "`{v}` is not a state variable"
            )));
        }
    }
    if let Some(v) = model
        .state()
        .iter()
        .find(|v| !subsets.iter().any(|s| contains(s, v)))
    {
        return Err(Error::InvalidModel(format!("`{v}` is in no subset")));
    }
    let leaves = tree.leaves();
    if leaves.len() != subsets.len()
        || !subsets
            .iter()
            .all(|s| leaves.iter().any(|l| same_set(s, l)))
    {
        return Err(Error::InvalidTree(
            "tree leaves must be exactly the family subsets".into(),
        ));
    }

    let mut decompositions = Vec::with_capacity(subsets.len());
    let mut verification = Verification::Oracle;
    for s in subsets {
        let (d, v) = check_subset(model, s, tree, tol, Some(oracle_cap))?;
        if v == Verification::Unverified {
            verification = Verification::Unverified;
        }
        decompositions.push(d);
    }
    Ok(SubsystemFamily {
        subsets: subsets.to_vec(),
        tree: tree.clone(),
        decompositions,
        verification,
    })
}
