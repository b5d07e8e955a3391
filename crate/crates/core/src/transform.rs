//! Sum-of-products rewriting of separable conditionals.
//!
//! A mixture `sum_i g_i P_i(Z | X_i)` becomes `sum_I prod_i f_i(I, Z, X_i)`
//! over a latent selector `I`, where `f_i` holds `g_i P_i` on the slice
//! `I = i` and ones elsewhere. Each factor then touches a single block, so
//! elimination never needs a table over all parents at once.

use crate::cpt::Cpt;
use crate::error::{Error, Result};
use crate::factor::Factor;
use crate::scalar::{Scalar, Tolerances};
use crate::separability::{separate_n, SeparableDecomposition};
use crate::variable::{contains, space_size, Variable};

/// Selector variable plus one factor per mixture component.
#[derive(Clone, Debug, PartialEq)]
pub struct SelectorFactorization<T> {
    pub selector: Variable,
    /// Factor `i` has scope `(selector, children.., block_i..)`.
    pub factors: Vec<Factor<T>>,
}

impl<T: Scalar> SelectorFactorization<T> {
    /// `sum_I prod_i f_i` as one table, scope ordered as the product leaves it
    /// with the selector removed.
    pub fn collapse(&self) -> Result<Factor<T>> {
        let mut prod = Factor::scalar(T::one());
        for f in &self.factors {
            prod = prod.multiply(f)?;
        }
        prod.sum_out(&self.selector)
    }
}

/// Default selector name for a decomposed node.
pub fn selector_name(children: &[Variable]) -> String {
    let names: Vec<&str> = children.iter().map(Variable::name).collect();
    format!("I[{}]", names.join(","))
}

pub fn to_sum_of_products<T: Scalar>(
    d: &SeparableDecomposition<T>,
) -> Result<SelectorFactorization<T>> {
    to_sum_of_products_named(d, &selector_name(d.children()))
}

pub fn to_sum_of_products_named<T: Scalar>(
    d: &SeparableDecomposition<T>,
    selector: &str,
) -> Result<SelectorFactorization<T>> {
    let n = d.blocks().len();
    let sel = Variable::selector(selector, n)?;
    if d.parents()
        .iter()
        .chain(d.children())
        .any(|v| v.name() == selector)
    {
        return Err(Error::DuplicateVariable(selector.to_string()));
    }
    let cs = space_size(d.children());
    let factors = d
        .blocks()
        .iter()
        .zip(d.components())
        .zip(d.weights())
        .enumerate()
        .map(|(i, ((block, comp), g))| {
            let bs = space_size(block);
            let mut scope = vec![sel.clone()];
            scope.extend(d.children().iter().cloned());
            scope.extend(block.iter().cloned());
            let mut values = Vec::with_capacity(n * cs * bs);
            for j in 0..n {
                for z in 0..cs {
                    for a in 0..bs {
                        values.push(if j == i {
                            *g * comp.prob(a, z)
                        } else {
                            T::one()
                        });
                    }
                }
            }
            Factor::new(scope, values)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SelectorFactorization {
        selector: sel,
        factors,
    })
}

/// Request to decompose the node with the given child into parent blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Annotation {
    pub child: String,
    pub blocks: Vec<Vec<Variable>>,
}

/// Factor list of a rewritten network plus the selectors it introduced.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformedNetwork<T> {
    pub factors: Vec<Factor<T>>,
    pub selectors: Vec<Variable>,
}

/// Replaces annotated conditionals by their selector factorizations; other
/// conditionals pass through as their tables.
pub fn transform_network<T: Scalar>(
    network: &[Cpt<T>],
    annotations: &[Annotation],
    tol: &Tolerances<T>,
) -> Result<TransformedNetwork<T>> {
    for a in annotations {
        if !network
            .iter()
            .any(|c| c.children().iter().any(|v| v.name() == a.child))
        {
            return Err(Error::InvalidModel(format!("no node `{}`", a.child)));
        }
    }
    let mut taken: Vec<Variable> = network
        .iter()
        .flat_map(|c| c.parents().iter().chain(c.children()).cloned())
        .collect();
    let mut out = TransformedNetwork {
        factors: Vec::new(),
        selectors: Vec::new(),
    };
    for cpt in network {
        let annotation = annotations
            .iter()
            .find(|a| cpt.children().iter().any(|v| v.name() == a.child));
        let Some(a) = annotation else {
            out.factors.push(cpt.table().clone());
            continue;
        };
        let d = separate_n(cpt, &a.blocks, tol)?;
        let mut name = selector_name(cpt.children());
        while taken.iter().any(|v| v.name() == name) {
            name.push('\'');
        }
        let sf = to_sum_of_products_named(&d, &name)?;
        if !contains(&taken, &sf.selector) {
            taken.push(sf.selector.clone());
        }
        out.selectors.push(sf.selector);
        out.factors.extend(sf.factors);
    }
    Ok(out)
}
