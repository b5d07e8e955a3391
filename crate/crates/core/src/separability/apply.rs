use crate::error::Result;
use crate::factor::Factor;
use crate::marginals::MarginalSet;
use crate::scalar::{Scalar, Tolerances};
use crate::variable::{Assignment, Variable};

use super::additive::SeparableDecomposition;
use super::tree::{DecompNode, TreeDecomposition};

/// Running count of scalar multiply-add operations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct OpCount(pub u64);

impl OpCount {
    #[inline]
    pub fn add(&mut self, n: usize) {
        self.0 += n as u64;
    }
}

/// A decomposed conditional that maps subset marginals of its parents to
/// the child distribution.
pub trait Decomposition<T: Scalar> {
    fn children(&self) -> &[Variable];

    /// Child distribution induced by the marginals, counting work in `ops`.
    /// Marginal consistency is not checked here.
    fn evaluate(&self, marginals: &MarginalSet<T>, ops: &mut OpCount) -> Result<Factor<T>>;
}

/// Child distribution implied by a set of subset marginals. Overlapping
/// marginals must agree on their shared variables; values are read from the
/// lowest-indexed subset covering what is needed.
pub fn apply_decomposition<T: Scalar, D: Decomposition<T> + ?Sized>(
    d: &D,
    marginals: &MarginalSet<T>,
    tol: &Tolerances<T>,
) -> Result<Factor<T>> {
    marginals.check_consistency(tol.consistency)?;
    d.evaluate(marginals, &mut OpCount::default())
}

fn lookup<T: Scalar>(
    marginals: &MarginalSet<T>,
    vars: &[Variable],
    ops: &mut OpCount,
) -> Result<Factor<T>> {
    let f = marginals.marginal_of(vars)?;
    if let Some(i) = marginals.covering(vars) {
        ops.add(marginals.get(i).len());
    }
    Ok(f)
}

impl<T: Scalar> Decomposition<T> for SeparableDecomposition<T> {
    fn children(&self) -> &[Variable] {
        &self.children
    }

    fn evaluate(&self, marginals: &MarginalSet<T>, ops: &mut OpCount) -> Result<Factor<T>> {
        let cs = self.components[0].child_space();
        let mut out = vec![T::zero(); cs];
        for ((w, block), comp) in self.weights.iter().zip(&self.blocks).zip(&self.components) {
            if *w == T::zero() {
                continue;
            }
            let q = lookup(marginals, block, ops)?;
            for (a, qa) in q.values().iter().enumerate() {
                let mass = *w * *qa;
                if mass == T::zero() {
                    continue;
                }
                for (o, p) in out.iter_mut().zip(comp.row(a)) {
                    *o += mass * *p;
                }
                ops.add(cs + 1);
            }
        }
        Factor::new(self.children.clone(), out)
    }
}

impl<T: Scalar> Decomposition<T> for TreeDecomposition<T> {
    fn children(&self) -> &[Variable] {
        &self.children
    }

    fn evaluate(&self, marginals: &MarginalSet<T>, ops: &mut OpCount) -> Result<Factor<T>> {
        let cs = crate::variable::space_size(&self.children);
        let out = eval_node(&self.root, &Assignment::empty(), marginals, cs, ops)?;
        Factor::new(self.children.clone(), out)
    }
}

/// Expected child row given the context assignment, under the marginals'
/// conditional distribution of the node's variables given that context.
fn eval_node<T: Scalar>(
    node: &DecompNode<T>,
    context: &Assignment,
    marginals: &MarginalSet<T>,
    cs: usize,
    ops: &mut OpCount,
) -> Result<Vec<T>> {
    let mut out = vec![T::zero(); cs];
    let mut need = context.vars();
    match node {
        DecompNode::Leaf(cpt) => {
            need.extend(cpt.parents().iter().cloned());
            let q = lookup(marginals, &need, ops)?.condition(context)?;
            let mass = q.total();
            ops.add(q.len());
            if mass <= T::zero() {
                return Ok(out);
            }
            for (u, qu) in q.values().iter().enumerate() {
                if *qu == T::zero() {
                    continue;
                }
                let weight = *qu / mass;
                for (o, p) in out.iter_mut().zip(cpt.row(u)) {
                    *o += weight * *p;
                }
                ops.add(cs + 1);
            }
        }
        DecompNode::Node {
            conditioning,
            branches,
        } => {
            need.extend(conditioning.iter().cloned());
            let q = lookup(marginals, &need, ops)?.condition(context)?;
            let mass = q.total();
            ops.add(q.len());
            if mass <= T::zero() {
                return Ok(out);
            }
            for (idx, (qw, branch)) in q.values().iter().zip(branches).enumerate() {
                if *qw == T::zero() {
                    continue;
                }
                let ctx = context.extend(&Assignment::from_index(conditioning, idx))?;
                let pw = *qw / mass;
                for (g, child) in branch.weights.iter().zip(&branch.children) {
                    if *g == T::zero() {
                        continue;
                    }
                    let sub = eval_node(child, &ctx, marginals, cs, ops)?;
                    let scale = pw * *g;
                    for (o, s) in out.iter_mut().zip(sub) {
                        *o += scale * s;
                    }
                    ops.add(cs + 1);
                }
            }
        }
    }
    Ok(out)
}
