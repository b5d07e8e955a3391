use std::fmt;

use serde::{Deserialize, Serialize};

/// A named cell `(parent assignment, child assignment)` together with the
/// value the additive model predicts there and the value actually present.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub parents: Vec<(String, usize)>,
    pub child: Vec<(String, usize)>,
    pub actual: f64,
    pub additive: f64,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fmt_pairs = |pairs: &[(String, usize)]| {
            pairs
                .iter()
                .map(|(n, v)| format!("{n}={v}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(
            f,
            "P({} | {}) = {} but additivity demands {}",
            fmt_pairs(&self.child),
            fmt_pairs(&self.parents),
            self.actual,
            self.additive
        )
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid variable: {0}")]
    InvalidVariable(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("variable `{name}` used with cardinalities {left} and {right}")]
    CardinalityMismatch {
        name: String,
        left: usize,
        right: usize,
    },
    #[error("value {value} out of range for `{name}` (cardinality {cardinality})")]
    ValueOutOfRange {
        name: String,
        value: usize,
        cardinality: usize,
    },
    #[error("table has {found} entries, scope requires {expected}")]
    TableLength { expected: usize, found: usize },
    #[error("table entry {index} is negative or not finite ({value})")]
    InvalidEntry { index: usize, value: f64 },
    #[error("variable `{0}` is not in scope")]
    NotInScope(String),
    #[error("factor has zero total mass")]
    ZeroMass,
    #[error("conditional distribution for parent row {row} sums to {sum}")]
    NotNormalized { row: usize, sum: f64 },
    #[error("invalid blocks: {0}")]
    InvalidBlocks(String),
    #[error("not separable: {0}")]
    NotSeparable(Box<Witness>),
    #[error("component {block} has entry {value} below tolerance")]
    ComponentNotDistribution { block: usize, value: f64 },
    #[error("not conditionally separable given {context:?}: {witness}")]
    NotConditionallySeparable {
        context: Vec<(String, usize)>,
        witness: Box<Witness>,
    },
    #[error("not separable along tree path {path:?} given {context:?}: {witness}")]
    NotTSeparable {
        path: Vec<usize>,
        context: Vec<(String, usize)>,
        witness: Box<Witness>,
    },
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("parent space of {size} assignments exceeds oracle cap {cap}")]
    OracleTooLarge { size: usize, cap: usize },
    #[error("no marginal covers variables {0:?}")]
    MissingMarginal(Vec<String>),
    #[error("marginals disagree on {vars:?} by {gap}")]
    InconsistentMarginals { vars: Vec<String>, gap: f64 },
    #[error("subset {subset:?} is not self-sufficient: {reason}")]
    NotSelfSufficient {
        subset: Vec<String>,
        reason: String,
        witness: Option<Box<Witness>>,
    },
    #[error("observing `{variable}` breaks sufficiency: missing from subsets {missing:?}")]
    SufficiencyBroken {
        variable: String,
        missing: Vec<usize>,
    },
    #[error("state space of {size} exceeds exact-propagation cap {cap}")]
    ExactTooLarge { size: usize, cap: usize },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("premise not satisfied: {0}")]
    PremiseViolated(String),
    #[error("document error: {0}")]
    Document(String),
}

impl Error {
    /// Whether this error reports a structural negative result (as opposed
    /// to malformed input).
    pub fn is_structural(&self) -> bool {
        matches!(
            self,
            Error::NotSeparable(_)
                | Error::ComponentNotDistribution { .. }
                | Error::NotConditionallySeparable { .. }
                | Error::NotTSeparable { .. }
                | Error::NotSelfSufficient { .. }
                | Error::SufficiencyBroken { .. }
                | Error::ZeroMass
                | Error::InconsistentMarginals { .. }
        )
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Error::NotSeparable(w) => Some(w),
            Error::NotConditionallySeparable { witness, .. } => Some(witness),
            Error::NotTSeparable { witness, .. } => Some(witness),
            Error::NotSelfSufficient {
                witness: Some(w), ..
            } => Some(w),
            _ => None,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
