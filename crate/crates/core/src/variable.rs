use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A discrete random variable: a name plus a number of values.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable {
    name: Arc<str>,
    cardinality: usize,
}

impl Variable {
    /// Creates a model variable. Cardinality must be at least 2.
    pub fn new(name: impl AsRef<str>, cardinality: usize) -> Result<Self> {
        if cardinality < 2 {
            return Err(Error::InvalidVariable(format!(
                "`{}` has cardinality {cardinality}, need at least 2",
                name.as_ref()
            )));
        }
        Self::selector(name, cardinality)
    }

    /// Creates a latent selector variable. These may have a single value
    /// (a one-component mixture) and are never part of a user model.
    pub fn selector(name: impl AsRef<str>, cardinality: usize) -> Result<Self> {
        let name = name.as_ref();
        if name.is_empty() {
            return Err(Error::InvalidVariable("empty name".into()));
        }
        if cardinality == 0 {
            return Err(Error::InvalidVariable(format!("`{name}` has no values")));
        }
        Ok(Variable {
            name: Arc::from(name),
            cardinality,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn cardinality(&self) -> usize {
        self.cardinality
    }
}

impl fmt::Debug for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.name, self.cardinality)
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Rejects duplicate names and conflicting cardinalities within one scope.
pub(crate) fn check_distinct(vars: &[Variable]) -> Result<()> {
    for (i, v) in vars.iter().enumerate() {
        for u in &vars[..i] {
            if u.name() == v.name() {
                return Err(Error::DuplicateVariable(v.name().to_string()));
            }
        }
    }
    Ok(())
}

/// Product of cardinalities; 1 for the empty scope.
pub fn space_size(vars: &[Variable]) -> usize {
    vars.iter().map(Variable::cardinality).product()
}

/// Position of `var` (matched by name) in `scope`.
pub(crate) fn position(scope: &[Variable], var: &Variable) -> Option<usize> {
    scope.iter().position(|v| v.name() == var.name())
}

pub(crate) fn contains(scope: &[Variable], var: &Variable) -> bool {
    position(scope, var).is_some()
}

/// Variables of `a` that are not in `b`, in `a`'s order.
pub(crate) fn difference(a: &[Variable], b: &[Variable]) -> Vec<Variable> {
    a.iter().filter(|v| !contains(b, v)).cloned().collect()
}

/// Ordered partial assignment of values to variables.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Assignment {
    pairs: Vec<(Variable, usize)>,
}

impl Assignment {
    pub fn empty() -> Self {
        Assignment::default()
    }

    pub fn new(pairs: Vec<(Variable, usize)>) -> Result<Self> {
        let vars: Vec<Variable> = pairs.iter().map(|(v, _)| v.clone()).collect();
        check_distinct(&vars)?;
        for (v, x) in &pairs {
            if *x >= v.cardinality() {
                return Err(Error::ValueOutOfRange {
                    name: v.name().to_string(),
                    value: *x,
                    cardinality: v.cardinality(),
                });
            }
        }
        Ok(Assignment { pairs })
    }

    /// Assignment of `vars` decoded from a mixed-radix index (first variable
    /// most significant).
    pub fn from_index(vars: &[Variable], mut index: usize) -> Self {
        let mut values = vec![0; vars.len()];
        for (slot, v) in values.iter_mut().zip(vars).rev() {
            *slot = index % v.cardinality();
            index /= v.cardinality();
        }
        Assignment {
            pairs: vars.iter().cloned().zip(values).collect(),
        }
    }

    pub fn get(&self, var: &Variable) -> Option<usize> {
        self.get_by_name(var.name())
    }

    pub fn get_by_name(&self, name: &str) -> Option<usize> {
        self.pairs
            .iter()
            .find(|(v, _)| v.name() == name)
            .map(|(_, x)| *x)
    }

    pub fn vars(&self) -> Vec<Variable> {
        self.pairs.iter().map(|(v, _)| v.clone()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Variable, usize)> {
        self.pairs.iter().map(|(v, x)| (v, *x))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Concatenation; fails on overlapping variables.
    pub fn extend(&self, other: &Assignment) -> Result<Assignment> {
        let mut pairs = self.pairs.clone();
        pairs.extend(other.pairs.iter().cloned());
        Assignment::new(pairs)
    }

    pub fn named(&self) -> Vec<(String, usize)> {
        self.pairs
            .iter()
            .map(|(v, x)| (v.name().to_string(), *x))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_cardinality_and_empty_name() {
        assert!(Variable::new("X", 1).is_err());
        assert!(Variable::new("", 2).is_err());
        assert!(Variable::selector("I", 1).is_ok());
    }

    #[test]
    fn assignment_checks_range_and_duplicates() {
        let x = Variable::new("X", 2).unwrap();
        assert!(Assignment::new(vec![(x.clone(), 2)]).is_err());
        assert!(Assignment::new(vec![(x.clone(), 0), (x.clone(), 1)]).is_err());
    }

    #[test]
    fn from_index_is_mixed_radix() {
        let x = Variable::new("X", 2).unwrap();
        let y = Variable::new("Y", 3).unwrap();
        let a = Assignment::from_index(&[x.clone(), y.clone()], 4);
        assert_eq!(a.get(&x), Some(1));
        assert_eq!(a.get(&y), Some(1));
    }
}
