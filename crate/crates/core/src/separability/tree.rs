use crate::cpt::Cpt;
use crate::error::{Error, Result};
use crate::scalar::{Scalar, Tolerances};
use crate::variable::{check_distinct, contains, difference, space_size, Assignment, Variable};

use super::additive::separate_n;

/// Node of a tree whose leaves are variable subsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeNode {
    Leaf(Vec<Variable>),
    Internal(Vec<TreeNode>),
}

impl TreeNode {
    /// Distinct variables in the leaves beneath this node, in first-seen order.
    pub fn vars_under(&self) -> Vec<Variable> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut Vec<Variable>) {
        match self {
            TreeNode::Leaf(s) => {
                for v in s {
                    if !contains(out, v) {
                        out.push(v.clone());
                    }
                }
            }
            TreeNode::Internal(children) => children.iter().for_each(|c| c.collect_vars(out)),
        }
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a Vec<Variable>>) {
        match self {
            TreeNode::Leaf(s) => out.push(s),
            TreeNode::Internal(children) => children.iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    /// Variables located at this node once `exclude` has been removed: for
    /// a leaf, its remaining variables; for an internal node, those found
    /// beneath at least two different children.
    pub fn located_here(&self, exclude: &[Variable]) -> Vec<Variable> {
        match self {
            TreeNode::Leaf(s) => difference(s, exclude),
            TreeNode::Internal(children) => {
                let per_child: Vec<Vec<Variable>> =
                    children.iter().map(TreeNode::vars_under).collect();
                difference(&self.vars_under(), exclude)
                    .into_iter()
                    .filter(|v| per_child.iter().filter(|c| contains(c, v)).count() >= 2)
                    .collect()
            }
        }
    }
}

/// Tree with one leaf per subset of a family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeRepresentation {
    root: TreeNode,
}

impl TreeRepresentation {
    pub fn new(root: TreeNode) -> Result<Self> {
        fn check(node: &TreeNode) -> Result<()> {
            match node {
                TreeNode::Leaf(s) => {
                    if s.is_empty() {
                        return Err(Error::InvalidTree("empty leaf subset".into()));
                    }
                    check_distinct(s)
                }
                TreeNode::Internal(c) if c.is_empty() => {
                    Err(Error::InvalidTree("internal node without children".into()))
                }
                TreeNode::Internal(c) => c.iter().try_for_each(check),
            }
        }
        check(&root)?;
        let tree = TreeRepresentation { root };
        let vars = tree.variables();
        for leaf in tree.leaves() {
            for v in &leaf {
                let canonical = vars
                    .iter()
                    .find(|u| u.name() == v.name())
                    .expect("collected");
                if canonical.cardinality() != v.cardinality() {
                    return Err(Error::CardinalityMismatch {
                        name: v.name().to_string(),
                        left: canonical.cardinality(),
                        right: v.cardinality(),
                    });
                }
            }
        }
        Ok(tree)
    }

    /// Root with one leaf child per subset (a bare leaf for a single subset).
    pub fn star(subsets: &[Vec<Variable>]) -> Result<Self> {
        match subsets {
            [] => Err(Error::InvalidTree("no subsets".into())),
            [one] => Self::new(TreeNode::Leaf(one.clone())),
            many => Self::new(TreeNode::Internal(
                many.iter().cloned().map(TreeNode::Leaf).collect(),
            )),
        }
    }

    pub fn root(&self) -> &TreeNode {
        &self.root
    }

    /// Leaf subsets in depth-first order.
    pub fn leaves(&self) -> Vec<Vec<Variable>> {
        let mut out = Vec::new();
        self.root.collect_leaves(&mut out);
        out.into_iter().cloned().collect()
    }

    pub fn variables(&self) -> Vec<Variable> {
        self.root.vars_under()
    }

    pub fn node(&self, path: &[usize]) -> Option<&TreeNode> {
        let mut node = &self.root;
        for &i in path {
            node = match node {
                TreeNode::Internal(c) => c.get(i)?,
                TreeNode::Leaf(_) => return None,
            };
        }
        Some(node)
    }

    /// Path to the lowest node under which all subsets containing `var` lie.
    pub fn location(&self, var: &Variable) -> Option<Vec<usize>> {
        if !contains(&self.variables(), var) {
            return None;
        }
        let mut path = Vec::new();
        let mut node = &self.root;
        loop {
            match node {
                TreeNode::Leaf(_) => return Some(path),
                TreeNode::Internal(children) => {
                    let holding: Vec<usize> = children
                        .iter()
                        .enumerate()
                        .filter(|(_, c)| contains(&c.vars_under(), var))
                        .map(|(i, _)| i)
                        .collect();
                    if holding.len() != 1 {
                        return Some(path);
                    }
                    path.push(holding[0]);
                    node = &children[holding[0]];
                }
            }
        }
    }

    /// Every leaf beneath a variable's location contains that variable.
    pub fn is_complete(&self) -> bool {
        self.variables().iter().all(|v| {
            let path = self.location(v).expect("variable in tree");
            let mut leaves = Vec::new();
            self.node(&path)
                .expect("valid path")
                .collect_leaves(&mut leaves);
            leaves.iter().all(|l| contains(l, v))
        })
    }
}

/// Recursive decomposition mirroring a [`TreeRepresentation`].
#[derive(Clone, Debug, PartialEq)]
pub enum DecompNode<T> {
    /// Conditional over the leaf's variables not fixed by ancestors.
    Leaf(Cpt<T>),
    Node {
        /// Variables located at this node.
        conditioning: Vec<Variable>,
        /// One branch per conditioning assignment, in index order.
        branches: Vec<TreeBranch<T>>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct TreeBranch<T> {
    pub weights: Vec<T>,
    pub blocks: Vec<Vec<Variable>>,
    pub children: Vec<DecompNode<T>>,
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TreeDecomposition<T> {
    pub(crate) parents: Vec<Variable>,
    pub(crate) children: Vec<Variable>,
    pub(crate) root: DecompNode<T>,
}

impl<T: Scalar> DecompNode<T> {
    fn row(&self, x: &Assignment, cs: usize) -> Result<Vec<T>> {
        match self {
            DecompNode::Leaf(cpt) => {
                let idx = index_in(cpt.parents(), x)?;
                Ok(cpt.row(idx).to_vec())
            }
            DecompNode::Node {
                conditioning,
                branches,
            } => {
                let branch = &branches[index_in(conditioning, x)?];
                let mut out = vec![T::zero(); cs];
                for (w, child) in branch.weights.iter().zip(&branch.children) {
                    if *w == T::zero() {
                        continue;
                    }
                    for (o, v) in out.iter_mut().zip(child.row(x, cs)?) {
                        *o += *w * v;
                    }
                }
                Ok(out)
            }
        }
    }

    fn check_weights(&self, tol: &Tolerances<T>) -> Result<()> {
        match self {
            DecompNode::Leaf(cpt) => cpt.validate(tol),
            DecompNode::Node { branches, .. } => {
                for b in branches {
                    let total: T = b.weights.iter().copied().sum();
                    if b.weights.iter().any(|w| *w < T::zero())
                        || (total - T::one()).abs() > tol.norm
                    {
                        return Err(Error::NotNormalized {
                            row: 0,
                            sum: total.as_f64(),
                        });
                    }
                    b.children.iter().try_for_each(|c| c.check_weights(tol))?;
                }
                Ok(())
            }
        }
    }
}

pub(crate) fn index_in(vars: &[Variable], x: &Assignment) -> Result<usize> {
    let mut idx = 0;
    for v in vars {
        let value = x
            .get(v)
            .ok_or_else(|| Error::NotInScope(v.name().to_string()))?;
        idx = idx * v.cardinality() + value;
    }
    Ok(idx)
}

impl<T: Scalar> TreeDecomposition<T> {
    pub fn parents(&self) -> &[Variable] {
        &self.parents
    }

    pub fn children(&self) -> &[Variable] {
        &self.children
    }

    pub fn root(&self) -> &DecompNode<T> {
        &self.root
    }

    /// Assembles a decomposition from parts (used when loading documents).
    pub fn from_parts(
        parents: Vec<Variable>,
        children: Vec<Variable>,
        root: DecompNode<T>,
        tol: &Tolerances<T>,
    ) -> Result<Self> {
        root.check_weights(tol)?;
        Ok(TreeDecomposition {
            parents,
            children,
            root,
        })
    }

    pub fn reconstruct(&self) -> Result<Cpt<T>> {
        let ps = space_size(&self.parents);
        let cs = space_size(&self.children);
        let mut values = Vec::with_capacity(ps * cs);
        for p in 0..ps {
            values.extend(
                self.root
                    .row(&Assignment::from_index(&self.parents, p), cs)?,
            );
        }
        Cpt::joint_with(
            self.children.clone(),
            self.parents.clone(),
            values,
            T::lit(T::DEFAULT_EPS).max(T::epsilon() * T::lit(64.0)),
        )
    }

    pub fn validate_against(&self, source: &Cpt<T>, tol: &Tolerances<T>) -> Result<()> {
        self.root.check_weights(tol)?;
        let source = source.broadcast_parents(&self.parents)?;
        let gap = self.reconstruct()?.max_abs_diff(&source)?;
        if gap > tol.sep {
            return Err(Error::InvalidModel(format!(
                "tree decomposition reconstructs source only within {}",
                gap.as_f64()
            )));
        }
        Ok(())
    }
}

/// Recursively separates `cpt` along `tree`: at each internal node the
/// conditional is sliced on the variables located there and separated over
/// the variables of each child subtree; each component is then decomposed
/// along its subtree.
///
/// Tree variables that are not parents of `cpt` are added as irrelevant
/// parents; parents missing from the tree are an error.
pub fn tree_separate<T: Scalar>(
    cpt: &Cpt<T>,
    tree: &TreeRepresentation,
    tol: &Tolerances<T>,
) -> Result<TreeDecomposition<T>> {
    let vars = tree.variables();
    if let Some(v) = cpt.parents().iter().find(|v| !contains(&vars, v)) {
        return Err(Error::InvalidTree(format!("parent `{v}` is in no leaf")));
    }
    let mut parents = cpt.parents().to_vec();
    parents.extend(difference(&vars, cpt.parents()));
    let full = cpt.broadcast_parents(&parents)?;
    let root = separate_node(
        &full,
        tree.root(),
        &Assignment::empty(),
        &mut Vec::new(),
        tol,
    )?;
    Ok(TreeDecomposition {
        parents,
        children: cpt.children().to_vec(),
        root,
    })
}

fn separate_node<T: Scalar>(
    cpt: &Cpt<T>,
    node: &TreeNode,
    context: &Assignment,
    path: &mut Vec<usize>,
    tol: &Tolerances<T>,
) -> Result<DecompNode<T>> {
    let children = match node {
        TreeNode::Leaf(_) => return Ok(DecompNode::Leaf(cpt.clone())),
        TreeNode::Internal(children) => children,
    };
    let fixed = context.vars();
    let conditioning = node.located_here(&fixed);
    let mut excluded = fixed.clone();
    excluded.extend(conditioning.iter().cloned());
    let blocks: Vec<Vec<Variable>> = children
        .iter()
        .map(|c| difference(&c.vars_under(), &excluded))
        .collect();

    let mut branches = Vec::with_capacity(space_size(&conditioning));
    for idx in 0..space_size(&conditioning) {
        let w = Assignment::from_index(&conditioning, idx);
        let slice = cpt.condition(&w)?;
        let ctx = context.extend(&w)?;
        let dec = separate_n(&slice, &blocks, tol).map_err(|e| match e {
            Error::NotSeparable(mut witness) => {
                let mut parents = ctx.named();
                parents.append(&mut witness.parents);
                witness.parents = parents;
                Error::NotTSeparable {
                    path: path.clone(),
                    context: ctx.named(),
                    witness,
                }
            }
            other => other,
        })?;
        let mut sub = Vec::with_capacity(children.len());
        for (i, (comp, child)) in dec.components.iter().zip(children).enumerate() {
            path.push(i);
            sub.push(separate_node(comp, child, &ctx, path, tol)?);
            path.pop();
        }
        branches.push(TreeBranch {
            weights: dec.weights.clone(),
            blocks: blocks.clone(),
            children: sub,
            degenerate: dec.degenerate,
        });
    }
    Ok(DecompNode::Node {
        conditioning,
        branches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> Variable {
        Variable::new(n, 2).unwrap()
    }

    /// Root {3}, internal {2} over leaves {1,2,3},{2,3,4}, plus leaf {3,5}.
    fn nested() -> TreeRepresentation {
        TreeRepresentation::new(TreeNode::Internal(vec![
            TreeNode::Internal(vec![
                TreeNode::Leaf(vec![v("1"), v("2"), v("3")]),
                TreeNode::Leaf(vec![v("2"), v("3"), v("4")]),
            ]),
            TreeNode::Leaf(vec![v("3"), v("5")]),
        ]))
        .unwrap()
    }

    #[test]
    fn locations_follow_lowest_covering_node() {
        let t = nested();
        assert_eq!(t.location(&v("3")), Some(vec![]));
        assert_eq!(t.location(&v("2")), Some(vec![0]));
        assert_eq!(t.location(&v("1")), Some(vec![0, 0]));
        assert_eq!(t.location(&v("5")), Some(vec![1]));
        assert_eq!(t.root().located_here(&[]), vec![v("3")]);
        assert!(t.is_complete());
    }

    #[test]
    fn incomplete_tree_detected() {
        let t = TreeRepresentation::new(TreeNode::Internal(vec![
            TreeNode::Leaf(vec![v("A"), v("B")]),
            TreeNode::Internal(vec![
                TreeNode::Leaf(vec![v("B"), v("C")]),
                TreeNode::Leaf(vec![v("C"), v("D")]),
            ]),
        ]))
        .unwrap();
        assert!(!t.is_complete());
    }

    #[test]
    fn rejects_empty_nodes() {
        assert!(TreeRepresentation::new(TreeNode::Internal(vec![])).is_err());
        assert!(TreeRepresentation::new(TreeNode::Leaf(vec![])).is_err());
    }
}
