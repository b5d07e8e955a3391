use crate::error::{Error, Result};
use crate::factor::Factor;
use crate::marginals::MarginalSet;
use crate::scalar::Scalar;
use crate::variable::{contains, Assignment};

use super::family::SubsystemFamily;

/// How to condition subset marginals on evidence.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FilterPolicy {
    /// Only evidence on variables present in every subset is accepted; the
    /// result stays exact.
    Strict,
    /// Conditions the subsets that contain each observed variable and leaves
    /// the rest alone. The result is flagged approximate.
    Demonstrate,
}

/// Conditions subset marginals on evidence. Scopes are kept; entries
/// inconsistent with the evidence become zero before renormalizing.
pub fn filter_step<T: Scalar>(
    family: &SubsystemFamily<T>,
    marginals: &MarginalSet<T>,
    evidence: &Assignment,
    policy: FilterPolicy,
) -> Result<MarginalSet<T>> {
    let subsets = marginals.subsets();
    if subsets.len() != family.n() || subsets.iter().zip(family.subsets()).any(|(a, b)| a != b) {
        return Err(Error::InvalidQuery(
            "marginals do not match the family subsets".into(),
        ));
    }
    for (v, x) in evidence.iter() {
        if !subsets.iter().any(|s| contains(s, v)) {
            return Err(Error::InvalidQuery(format!(
                "`{v}` is not a state variable"
            )));
        }
        if x >= v.cardinality() {
            return Err(Error::ValueOutOfRange {
                name: v.name().to_string(),
                value: x,
                cardinality: v.cardinality(),
            });
        }
        if policy == FilterPolicy::Strict {
            let missing: Vec<usize> = subsets
                .iter()
                .enumerate()
                .filter(|(_, s)| !contains(s, v))
                .map(|(i, _)| i)
                .collect();
            if !missing.is_empty() {
                return Err(Error::SufficiencyBroken {
                    variable: v.name().to_string(),
                    missing,
                });
            }
        }
    }
    let out = marginals
        .marginals()
        .iter()
        .map(|m| {
            if evidence.iter().any(|(v, _)| m.has_var(v)) {
                m.observe(evidence).normalize()
            } else {
                Ok(m.clone())
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let shared = evidence
        .iter()
        .all(|(v, _)| subsets.iter().all(|s| contains(s, v)));
    Ok(MarginalSet::from_parts(
        out,
        marginals.is_approximate() || !shared,
    ))
}

/// Exact counterpart: condition the joint and renormalize.
pub fn filter_joint<T: Scalar>(joint: &Factor<T>, evidence: &Assignment) -> Result<Factor<T>> {
    for (v, _) in evidence.iter() {
        if !joint.has_var(v) {
            return Err(Error::NotInScope(v.name().to_string()));
        }
    }
    joint.observe(evidence).normalize()
}
