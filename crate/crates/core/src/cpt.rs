use crate::error::{Error, Result};
use crate::factor::{projected_offsets, Factor};
use crate::scalar::{Scalar, Tolerances};
use crate::variable::{check_distinct, contains, space_size, Assignment, Variable};

/// Conditional distribution of one or more child variables given parents.
///
/// The table's scope is the parents followed by the children, so each
/// parent assignment owns a contiguous row over the joint child space.
/// A single child is the common case; joint children arise when the
/// transitions of a whole subsystem are multiplied together.
#[derive(Clone, Debug, PartialEq)]
pub struct Cpt<T> {
    parents: Vec<Variable>,
    children: Vec<Variable>,
    table: Factor<T>,
}

impl<T: Scalar> Cpt<T> {
    pub fn new(child: Variable, parents: Vec<Variable>, values: Vec<T>) -> Result<Self> {
        Self::joint(vec![child], parents, values)
    }

    pub fn joint(children: Vec<Variable>, parents: Vec<Variable>, values: Vec<T>) -> Result<Self> {
        Self::joint_with(children, parents, values, T::lit(T::DEFAULT_EPS))
    }

    /// As [`Cpt::joint`] with an explicit row-normalization tolerance.
    pub fn joint_with(
        children: Vec<Variable>,
        parents: Vec<Variable>,
        values: Vec<T>,
        eps: T,
    ) -> Result<Self> {
        if children.is_empty() {
            return Err(Error::InvalidModel("conditional needs a child".into()));
        }
        let mut scope = parents.clone();
        scope.extend(children.iter().cloned());
        check_distinct(&scope)?;
        let table = Factor::new(scope, values)?;
        let cpt = Cpt {
            parents,
            children,
            table,
        };
        cpt.check_rows(eps)?;
        Ok(cpt)
    }

    fn check_rows(&self, eps: T) -> Result<()> {
        for row in 0..self.parent_space() {
            let sum: T = self.row(row).iter().copied().sum();
            if (sum - T::one()).abs() > eps {
                return Err(Error::NotNormalized {
                    row,
                    sum: sum.as_f64(),
                });
            }
        }
        Ok(())
    }

    /// Builds a conditional from a rule giving the child row for each parent
    /// value vector.
    pub fn from_rows(
        children: Vec<Variable>,
        parents: Vec<Variable>,
        mut row: impl FnMut(&[usize]) -> Vec<T>,
    ) -> Result<Self> {
        let ps = space_size(&parents);
        let cs = space_size(&children);
        let mut values = Vec::with_capacity(ps * cs);
        for p in 0..ps {
            let digits = Assignment::from_index(&parents, p)
                .iter()
                .map(|(_, x)| x)
                .collect::<Vec<_>>();
            let r = row(&digits);
            if r.len() != cs {
                return Err(Error::TableLength {
                    expected: cs,
                    found: r.len(),
                });
            }
            values.extend(r);
        }
        Self::joint(children, parents, values)
    }

    /// Deterministic copy: child takes the value of `source`.
    pub fn copy_of(child: Variable, source: Variable) -> Result<Self> {
        if child.cardinality() != source.cardinality() {
            return Err(Error::CardinalityMismatch {
                name: child.name().to_string(),
                left: child.cardinality(),
                right: source.cardinality(),
            });
        }
        let c = child.cardinality();
        Self::from_rows(vec![child], vec![source], |d| {
            (0..c)
                .map(|z| if z == d[0] { T::one() } else { T::zero() })
                .collect()
        })
    }

    pub fn parents(&self) -> &[Variable] {
        &self.parents
    }

    pub fn children(&self) -> &[Variable] {
        &self.children
    }

    /// The single child; panics on joint conditionals.
    pub fn child(&self) -> &Variable {
        assert_eq!(
            self.children.len(),
            1,
            "joint conditional has no single child"
        );
        &self.children[0]
    }

    pub fn table(&self) -> &Factor<T> {
        &self.table
    }

    pub fn parent_space(&self) -> usize {
        space_size(&self.parents)
    }

    pub fn child_space(&self) -> usize {
        space_size(&self.children)
    }

    /// Child distribution for the parent assignment with linear index `parent`.
    pub fn row(&self, parent: usize) -> &[T] {
        let cs = self.child_space();
        &self.table.values()[parent * cs..(parent + 1) * cs]
    }

    #[inline]
    pub fn prob(&self, parent: usize, child: usize) -> T {
        self.table.values()[parent * self.child_space() + child]
    }

    /// Fixes some parents; the result conditions on the remaining ones.
    pub fn condition(&self, evidence: &Assignment) -> Result<Cpt<T>> {
        for (v, _) in evidence.iter() {
            if !contains(&self.parents, v) {
                return Err(Error::NotInScope(v.name().to_string()));
            }
        }
        let table = self.table.condition(evidence)?;
        let parents = self
            .parents
            .iter()
            .filter(|v| evidence.get(v).is_none())
            .cloned()
            .collect();
        Ok(Cpt {
            parents,
            children: self.children.clone(),
            table,
        })
    }

    /// Same conditional with parents permuted to `order`.
    pub fn reorder_parents(&self, order: &[Variable]) -> Result<Cpt<T>> {
        if order.len() != self.parents.len() || order.iter().any(|v| !contains(&self.parents, v)) {
            return Err(Error::InvalidBlocks(format!(
                "{order:?} is not a permutation of {:?}",
                self.parents
            )));
        }
        let mut scope = order.to_vec();
        scope.extend(self.children.iter().cloned());
        Ok(Cpt {
            parents: order.to_vec(),
            children: self.children.clone(),
            table: self.table.reorder(&scope)?,
        })
    }

    /// Re-expresses the conditional over a superset of its parents, in the
    /// given order; rows are constant in the added parents.
    pub fn broadcast_parents(&self, parents: &[Variable]) -> Result<Cpt<T>> {
        check_distinct(parents)?;
        if let Some(v) = self.parents.iter().find(|v| !contains(parents, v)) {
            return Err(Error::NotInScope(v.name().to_string()));
        }
        if parents == self.parents.as_slice() {
            return Ok(self.clone());
        }
        let map = projected_offsets(parents, &self.parents);
        let mut values = Vec::with_capacity(map.len() * self.child_space());
        for &old in &map {
            values.extend_from_slice(self.row(old));
        }
        let mut scope = parents.to_vec();
        scope.extend(self.children.iter().cloned());
        Ok(Cpt {
            parents: parents.to_vec(),
            children: self.children.clone(),
            table: Factor::new(scope, values)?,
        })
    }

    /// Joint conditional of two conditionally independent children sets.
    pub fn product(&self, other: &Cpt<T>) -> Result<Cpt<T>> {
        for c in &other.children {
            if contains(&self.children, c) || contains(&self.parents, c) {
                return Err(Error::DuplicateVariable(c.name().to_string()));
            }
        }
        let mut parents = self.parents.clone();
        parents.extend(
            other
                .parents
                .iter()
                .filter(|v| !contains(&self.parents, v))
                .cloned(),
        );
        let mut children = self.children.clone();
        children.extend(other.children.iter().cloned());
        let mut scope = parents.clone();
        scope.extend(children.iter().cloned());
        let product = self.table.multiply(&other.table)?.reorder(&scope)?;
        Ok(Cpt {
            parents,
            children,
            table: product,
        })
    }

    /// Child distribution obtained by averaging rows under a parent
    /// distribution `q` (whose scope must equal the parent set).
    pub fn expect(&self, q: &Factor<T>) -> Result<Factor<T>> {
        let q = q.reorder(&self.parents)?;
        let cs = self.child_space();
        let mut out = vec![T::zero(); cs];
        for (p, w) in q.values().iter().enumerate() {
            if *w == T::zero() {
                continue;
            }
            for (o, v) in out.iter_mut().zip(self.row(p)) {
                *o += *w * *v;
            }
        }
        Factor::new(self.children.clone(), out)
    }

    /// Largest cell difference after aligning `other` to this layout.
    pub fn max_abs_diff(&self, other: &Cpt<T>) -> Result<T> {
        self.table.max_abs_diff(&other.table)
    }

    /// Child digits of the flat child index.
    pub fn child_assignment(&self, child: usize) -> Assignment {
        Assignment::from_index(&self.children, child)
    }

    pub fn parent_assignment(&self, parent: usize) -> Assignment {
        Assignment::from_index(&self.parents, parent)
    }

    /// Linear parent index for each assignment of `block`, with the other
    /// parents held at 0.
    pub(crate) fn block_offsets(&self, block: &[Variable]) -> Vec<usize> {
        projected_offsets(block, &self.parents)
    }

    pub fn validate(&self, tol: &Tolerances<T>) -> Result<()> {
        self.check_rows(tol.norm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unnormalized_rows() {
        let x = Variable::new("X", 2).unwrap();
        let z = Variable::new("Z", 2).unwrap();
        assert!(Cpt::new(z.clone(), vec![x.clone()], vec![0.5, 0.5, 0.6, 0.6]).is_err());
        assert!(Cpt::new(z, vec![x], vec![0.5, 0.5, 0.4, 0.6]).is_ok());
    }

    #[test]
    fn product_of_copies_is_joint_copy() {
        let x = Variable::new("X", 2).unwrap();
        let y = Variable::new("Y", 2).unwrap();
        let z1 = Variable::new("Z1", 2).unwrap();
        let z2 = Variable::new("Z2", 2).unwrap();
        let a = Cpt::<f64>::copy_of(z1, x).unwrap();
        let b = Cpt::<f64>::copy_of(z2, y).unwrap();
        let p = a.product(&b).unwrap();
        assert_eq!(p.parent_space(), 4);
        assert_eq!(p.child_space(), 4);
        for row in 0..4 {
            for c in 0..4 {
                assert_eq!(p.prob(row, c), if row == c { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn condition_drops_parent() {
        let x = Variable::new("X", 2).unwrap();
        let y = Variable::new("Y", 2).unwrap();
        let z = Variable::new("Z", 2).unwrap();
        let c = Cpt::new(
            z,
            vec![x.clone(), y.clone()],
            vec![1.0, 0.0, 0.0, 1.0, 0.5, 0.5, 0.2, 0.8],
        )
        .unwrap();
        let s = c
            .condition(&Assignment::new(vec![(x, 1)]).unwrap())
            .unwrap();
        assert_eq!(s.parents(), &[y]);
        assert_eq!(s.row(1), &[0.2, 0.8]);
    }
}
