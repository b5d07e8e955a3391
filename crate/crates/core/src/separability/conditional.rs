use crate::cpt::Cpt;
use crate::error::{Error, Result};
use crate::scalar::{Scalar, Tolerances};
use crate::variable::{contains, difference, space_size, Assignment, Variable};

use super::additive::{separate_n, SeparableDecomposition};

/// One separable decomposition of the sliced conditional per assignment of
/// the conditioning set.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalDecomposition<T> {
    pub(crate) conditioning: Vec<Variable>,
    pub(crate) entries: Vec<(Assignment, SeparableDecomposition<T>)>,
}

impl<T: Scalar> ConditionalDecomposition<T> {
    pub fn conditioning(&self) -> &[Variable] {
        &self.conditioning
    }

    /// Entries in index order of the conditioning assignments.
    pub fn entries(&self) -> &[(Assignment, SeparableDecomposition<T>)] {
        &self.entries
    }

    /// Decomposition for a given conditioning assignment.
    pub fn get(&self, context: &Assignment) -> Option<&SeparableDecomposition<T>> {
        self.entries
            .iter()
            .find(|(a, _)| a.iter().all(|(v, x)| context.get(v) == Some(x)))
            .map(|(_, d)| d)
    }

    /// Checks every slice against the matching slice of `source`.
    pub fn validate_against(&self, source: &Cpt<T>, tol: &Tolerances<T>) -> Result<()> {
        if self.entries.len() != space_size(&self.conditioning) {
            return Err(Error::InvalidModel("missing conditioning entries".into()));
        }
        for (ctx, d) in &self.entries {
            d.validate_against(&source.condition(ctx)?, tol)?;
        }
        Ok(())
    }
}

/// Two-set conditional separation: for every assignment of `given`, the
/// slice must separate into `left - given` and `right - given`.
pub fn conditional_separate<T: Scalar>(
    cpt: &Cpt<T>,
    left: &[Variable],
    right: &[Variable],
    given: &[Variable],
    tol: &Tolerances<T>,
) -> Result<ConditionalDecomposition<T>> {
    conditional_separate_n(cpt, &[left.to_vec(), right.to_vec()], given, tol)
}

/// n-set generalization of [`conditional_separate`].
pub fn conditional_separate_n<T: Scalar>(
    cpt: &Cpt<T>,
    sets: &[Vec<Variable>],
    given: &[Variable],
    tol: &Tolerances<T>,
) -> Result<ConditionalDecomposition<T>> {
    for v in cpt.parents() {
        if !sets.iter().any(|s| contains(s, v)) {
            return Err(Error::InvalidBlocks(format!("parent `{v}` is in no set")));
        }
    }
    for v in sets.iter().flatten().chain(given) {
        if !contains(cpt.parents(), v) {
            return Err(Error::InvalidBlocks(format!("`{v}` is not a parent")));
        }
    }
    let blocks: Vec<Vec<Variable>> = sets.iter().map(|s| difference(s, given)).collect();
    for (i, a) in blocks.iter().enumerate() {
        for b in &blocks[i + 1..] {
            if let Some(v) = a.iter().find(|v| contains(b, v)) {
                return Err(Error::InvalidBlocks(format!(
                    "`{v}` is shared between sets but not conditioned on"
                )));
            }
        }
    }
    let mut entries = Vec::with_capacity(space_size(given));
    for idx in 0..space_size(given) {
        let context = Assignment::from_index(given, idx);
        let slice = cpt.condition(&context)?;
        match separate_n(&slice, &blocks, tol) {
            Ok(d) => entries.push((context, d)),
            Err(Error::NotSeparable(mut w)) => {
                let mut parents = context.named();
                parents.append(&mut w.parents);
                w.parents = parents;
                return Err(Error::NotConditionallySeparable {
                    context: context.named(),
                    witness: w,
                });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(ConditionalDecomposition {
        conditioning: given.to_vec(),
        entries,
    })
}
