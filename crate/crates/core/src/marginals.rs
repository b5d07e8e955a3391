use crate::error::{Error, Result};
use crate::factor::Factor;
use crate::scalar::{Scalar, Tolerances};
use crate::variable::{check_distinct, contains, Variable};

/// One normalized marginal per subset of a family.
#[derive(Clone, Debug, PartialEq)]
pub struct MarginalSet<T> {
    marginals: Vec<Factor<T>>,
    approximate: bool,
}

impl<T: Scalar> MarginalSet<T> {
    pub fn new(marginals: Vec<Factor<T>>, tol: &Tolerances<T>) -> Result<Self> {
        for m in &marginals {
            let total = m.total();
            if (total - T::one()).abs() > tol.norm {
                return Err(Error::NotNormalized {
                    row: 0,
                    sum: total.as_f64(),
                });
            }
        }
        Ok(MarginalSet {
            marginals,
            approximate: false,
        })
    }

    pub(crate) fn from_parts(marginals: Vec<Factor<T>>, approximate: bool) -> Self {
        MarginalSet {
            marginals,
            approximate,
        }
    }

    /// Marginals of a joint distribution over each subset.
    pub fn from_joint(joint: &Factor<T>, subsets: &[Vec<Variable>]) -> Result<Self> {
        let joint = joint.normalize()?;
        let marginals = subsets
            .iter()
            .map(|s| joint.marginalize_to(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(MarginalSet {
            marginals,
            approximate: false,
        })
    }

    pub fn len(&self) -> usize {
        self.marginals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.marginals.is_empty()
    }

    pub fn marginals(&self) -> &[Factor<T>] {
        &self.marginals
    }

    pub fn get(&self, i: usize) -> &Factor<T> {
        &self.marginals[i]
    }

    pub fn subsets(&self) -> Vec<Vec<Variable>> {
        self.marginals.iter().map(|m| m.scope().to_vec()).collect()
    }

    /// Set when produced by a filtering step that does not preserve exactness.
    pub fn is_approximate(&self) -> bool {
        self.approximate
    }

    /// Index of the lowest subset containing every variable of `vars`.
    pub fn covering(&self, vars: &[Variable]) -> Option<usize> {
        self.marginals
            .iter()
            .position(|m| vars.iter().all(|v| m.has_var(v)))
    }

    /// Marginal over `vars` from the lowest covering subset.
    pub fn marginal_of(&self, vars: &[Variable]) -> Result<Factor<T>> {
        check_distinct(vars)?;
        let i = self.covering(vars).ok_or_else(|| {
            Error::MissingMarginal(vars.iter().map(|v| v.name().to_string()).collect())
        })?;
        self.marginals[i].marginalize_to(vars)
    }

    /// Checks that overlapping subsets agree on their shared variables.
    pub fn check_consistency(&self, eps: T) -> Result<()> {
        for (i, a) in self.marginals.iter().enumerate() {
            for b in &self.marginals[i + 1..] {
                let shared: Vec<Variable> = a
                    .scope()
                    .iter()
                    .filter(|v| contains(b.scope(), v))
                    .cloned()
                    .collect();
                if shared.is_empty() {
                    continue;
                }
                let gap = a
                    .marginalize_to(&shared)?
                    .max_abs_diff(&b.marginalize_to(&shared)?)?;
                if gap > eps {
                    return Err(Error::InconsistentMarginals {
                        vars: shared.iter().map(|v| v.name().to_string()).collect(),
                        gap: gap.as_f64(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Largest entry difference across corresponding subsets.
    pub fn max_abs_diff(&self, other: &MarginalSet<T>) -> Result<T> {
        if self.len() != other.len() {
            return Err(Error::InvalidQuery("marginal sets differ in length".into()));
        }
        let mut worst = T::zero();
        for (a, b) in self.marginals.iter().zip(&other.marginals) {
            worst = worst.max(a.max_abs_diff(b)?);
        }
        Ok(worst)
    }

    /// Joint over `query` assuming independence between subsets: if one subset
    /// covers the query its marginal is used, otherwise the product of
    /// single-variable marginals.
    pub fn independent_product(&self, query: &[Variable]) -> Result<Factor<T>> {
        if self.covering(query).is_some() {
            return self.marginal_of(query);
        }
        let mut out = Factor::scalar(T::one());
        for v in query {
            out = out.multiply(&self.marginal_of(std::slice::from_ref(v))?)?;
        }
        out.reorder(query)
    }
}
