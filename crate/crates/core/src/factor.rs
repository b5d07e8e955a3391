//! Dense tables over ordered variable scopes.
//!
//! Values are laid out mixed-radix with the first scope variable most
//! significant and the last one varying fastest.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::variable::{check_distinct, contains, position, space_size, Assignment, Variable};

#[derive(Clone, Debug, PartialEq)]
pub struct Factor<T> {
    scope: Vec<Variable>,
    values: Vec<T>,
}

/// Row-major strides for `scope`.
pub(crate) fn strides(scope: &[Variable]) -> Vec<usize> {
    let mut out = vec![1; scope.len()];
    for i in (0..scope.len().saturating_sub(1)).rev() {
        out[i] = out[i + 1] * scope[i + 1].cardinality();
    }
    out
}

/// For every assignment of `over` (in index order), the linear index in
/// `onto` of its projection. Variables of `onto` missing from `over` are
/// held at value 0.
pub(crate) fn projected_offsets(over: &[Variable], onto: &[Variable]) -> Vec<usize> {
    let onto_strides = strides(onto);
    let steps: Vec<usize> = over
        .iter()
        .map(|v| position(onto, v).map_or(0, |p| onto_strides[p]))
        .collect();
    let n = space_size(over);
    let mut out = Vec::with_capacity(n);
    let mut digits = vec![0usize; over.len()];
    let mut offset = 0usize;
    for _ in 0..n {
        out.push(offset);
        for k in (0..over.len()).rev() {
            digits[k] += 1;
            offset += steps[k];
            if digits[k] < over[k].cardinality() {
                break;
            }
            offset -= steps[k] * digits[k];
            digits[k] = 0;
        }
    }
    out
}

fn check_compatible(a: &[Variable], b: &[Variable]) -> Result<()> {
    for v in b {
        if let Some(p) = position(a, v) {
            if a[p].cardinality() != v.cardinality() {
                return Err(Error::CardinalityMismatch {
                    name: v.name().to_string(),
                    left: a[p].cardinality(),
                    right: v.cardinality(),
                });
            }
        }
    }
    Ok(())
}

impl<T: Scalar> Factor<T> {
    pub fn new(scope: Vec<Variable>, values: Vec<T>) -> Result<Self> {
        check_distinct(&scope)?;
        let expected = space_size(&scope);
        if values.len() != expected {
            return Err(Error::TableLength {
                expected,
                found: values.len(),
            });
        }
        if let Some((index, value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v >= T::zero()))
        {
            return Err(Error::InvalidEntry {
                index,
                value: value.as_f64(),
            });
        }
        Ok(Factor { scope, values })
    }

    /// Scalar factor with empty scope.
    pub fn scalar(value: T) -> Self {
        Factor {
            scope: Vec::new(),
            values: vec![value],
        }
    }

    pub fn ones(scope: Vec<Variable>) -> Result<Self> {
        let n = space_size(&scope);
        Self::new(scope, vec![T::one(); n])
    }

    pub fn uniform(scope: Vec<Variable>) -> Result<Self> {
        let n = space_size(&scope);
        Self::new(scope, vec![T::one() / T::lit(n as f64); n])
    }

    /// Builds a table by evaluating `f` on each assignment's value indices.
    pub fn from_fn(scope: Vec<Variable>, mut f: impl FnMut(&[usize]) -> T) -> Result<Self> {
        let n = space_size(&scope);
        let mut values = Vec::with_capacity(n);
        let mut digits = vec![0usize; scope.len()];
        for _ in 0..n {
            values.push(f(&digits));
            for k in (0..scope.len()).rev() {
                digits[k] += 1;
                if digits[k] < scope[k].cardinality() {
                    break;
                }
                digits[k] = 0;
            }
        }
        Self::new(scope, values)
    }

    /// Indicator of a full assignment over its own variables.
    pub fn point_mass(assignment: &Assignment) -> Self {
        let scope = assignment.vars();
        let mut values = vec![T::zero(); space_size(&scope)];
        let idx: usize = strides(&scope)
            .iter()
            .zip(assignment.iter())
            .map(|(s, (_, x))| s * x)
            .sum();
        values[idx] = T::one();
        Factor { scope, values }
    }

    pub fn scope(&self) -> &[Variable] {
        &self.scope
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total(&self) -> T {
        self.values.iter().copied().sum()
    }

    pub fn has_var(&self, v: &Variable) -> bool {
        contains(&self.scope, v)
    }

    /// Linear index of a digit vector in scope order.
    pub fn index_of(&self, digits: &[usize]) -> usize {
        strides(&self.scope)
            .iter()
            .zip(digits)
            .map(|(s, d)| s * d)
            .sum()
    }

    /// Value at an assignment covering the scope (extra variables ignored).
    pub fn value_at(&self, assignment: &Assignment) -> Result<T> {
        let mut idx = 0;
        for (v, s) in self.scope.iter().zip(strides(&self.scope)) {
            let x = assignment
                .get(v)
                .ok_or_else(|| Error::NotInScope(v.name().to_string()))?;
            idx += x * s;
        }
        Ok(self.values[idx])
    }

    /// Pointwise product over the union scope (this factor's order first).
    pub fn multiply(&self, other: &Factor<T>) -> Result<Factor<T>> {
        check_compatible(&self.scope, &other.scope)?;
        let mut scope = self.scope.clone();
        scope.extend(
            other
                .scope
                .iter()
                .filter(|v| !contains(&self.scope, v))
                .cloned(),
        );
        let off_a = projected_offsets(&scope, &self.scope);
        let off_b = projected_offsets(&scope, &other.scope);
        let values = off_a
            .iter()
            .zip(&off_b)
            .map(|(&i, &j)| self.values[i] * other.values[j])
            .collect();
        Ok(Factor { scope, values })
    }

    pub fn sum_out(&self, var: &Variable) -> Result<Factor<T>> {
        if !self.has_var(var) {
            return Err(Error::NotInScope(var.name().to_string()));
        }
        let keep: Vec<Variable> = self
            .scope
            .iter()
            .filter(|v| v.name() != var.name())
            .cloned()
            .collect();
        Ok(self.project(keep))
    }

    /// Sums out everything outside `subset`, returning scope in `subset` order.
    pub fn marginalize_to(&self, subset: &[Variable]) -> Result<Factor<T>> {
        check_distinct(subset)?;
        for v in subset {
            if !self.has_var(v) {
                return Err(Error::NotInScope(v.name().to_string()));
            }
        }
        check_compatible(&self.scope, subset)?;
        Ok(self.project(subset.to_vec()))
    }

    fn project(&self, keep: Vec<Variable>) -> Factor<T> {
        let offsets = projected_offsets(&self.scope, &keep);
        let mut values = vec![T::zero(); space_size(&keep)];
        for (v, &o) in self.values.iter().zip(&offsets) {
            values[o] += *v;
        }
        Factor {
            scope: keep,
            values,
        }
    }

    /// Slice at the evidence; evidence variables leave the scope.
    pub fn condition(&self, evidence: &Assignment) -> Result<Factor<T>> {
        let st = strides(&self.scope);
        let mut base = 0;
        for (v, x) in evidence.iter() {
            let p =
                position(&self.scope, v).ok_or_else(|| Error::NotInScope(v.name().to_string()))?;
            if self.scope[p].cardinality() != v.cardinality() {
                return Err(Error::CardinalityMismatch {
                    name: v.name().to_string(),
                    left: self.scope[p].cardinality(),
                    right: v.cardinality(),
                });
            }
            base += x * st[p];
        }
        let keep: Vec<Variable> = self
            .scope
            .iter()
            .filter(|v| evidence.get(v).is_none())
            .cloned()
            .collect();
        let values = projected_offsets(&keep, &self.scope)
            .into_iter()
            .map(|o| self.values[base + o])
            .collect();
        Ok(Factor {
            scope: keep,
            values,
        })
    }

    /// Like [`Factor::condition`] on the variables in scope, but keeps the
    /// scope and zeroes inconsistent entries. Evidence on absent variables is
    /// ignored.
    pub fn observe(&self, evidence: &Assignment) -> Factor<T> {
        let digits_of = |mut idx: usize| {
            let mut d = vec![0; self.scope.len()];
            for k in (0..self.scope.len()).rev() {
                d[k] = idx % self.scope[k].cardinality();
                idx /= self.scope[k].cardinality();
            }
            d
        };
        let checks: Vec<(usize, usize)> = evidence
            .iter()
            .filter_map(|(v, x)| position(&self.scope, v).map(|p| (p, x)))
            .collect();
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let d = digits_of(i);
                if checks.iter().all(|&(p, x)| d[p] == x) {
                    v
                } else {
                    T::zero()
                }
            })
            .collect();
        Factor {
            scope: self.scope.clone(),
            values,
        }
    }

    pub fn normalize(&self) -> Result<Factor<T>> {
        let total = self.total();
        if total.partial_cmp(&T::zero()) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::ZeroMass);
        }
        Ok(Factor {
            scope: self.scope.clone(),
            values: self.values.iter().map(|v| *v / total).collect(),
        })
    }

    /// Same table under a permuted scope.
    pub fn reorder(&self, order: &[Variable]) -> Result<Factor<T>> {
        if order.len() != self.scope.len() {
            return Err(Error::InvalidQuery(format!(
                "reorder needs a permutation of {:?}",
                self.scope
            )));
        }
        self.marginalize_to(order)
    }

    /// Largest absolute entry difference after aligning `other` to this scope.
    pub fn max_abs_diff(&self, other: &Factor<T>) -> Result<T> {
        let aligned = other.reorder(&self.scope)?;
        Ok(self
            .values
            .iter()
            .zip(&aligned.values)
            .map(|(a, b)| (*a - *b).abs())
            .fold(T::zero(), T::max))
    }

    /// Applies `f` to every value; negative or non-finite results are rejected.
    pub fn map(&self, f: impl Fn(T) -> T) -> Result<Factor<T>> {
        Factor::new(
            self.scope.clone(),
            self.values.iter().map(|v| f(*v)).collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type F = Factor<f64>;

    fn var(n: &str, c: usize) -> Variable {
        Variable::new(n, c).unwrap()
    }

    #[test]
    fn multiply_identity_pointwise_and_outer() {
        let x = var("X", 2);
        let y = var("Y", 2);
        let f = F::new(vec![x.clone()], vec![0.2, 0.8]).unwrap();
        let unit = F::scalar(1.0);
        assert_eq!(unit.multiply(&f).unwrap().values(), f.values());

        let g = F::new(vec![x.clone()], vec![0.5, 0.5]).unwrap();
        assert_eq!(f.multiply(&g).unwrap().values(), &[0.1, 0.4]);

        let f = F::new(vec![x.clone()], vec![0.3, 0.7]).unwrap();
        let g = F::new(vec![y.clone()], vec![0.4, 0.6]).unwrap();
        let p = f.multiply(&g).unwrap();
        assert_eq!(p.scope(), &[x, y]);
        for (a, b) in p.values().iter().zip([0.12, 0.18, 0.28, 0.42]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn multiply_rejects_cardinality_mismatch() {
        let f = F::new(vec![var("X", 2)], vec![0.5, 0.5]).unwrap();
        let g = F::new(vec![var("X", 3)], vec![0.2, 0.3, 0.5]).unwrap();
        assert!(matches!(
            f.multiply(&g),
            Err(Error::CardinalityMismatch { .. })
        ));
    }

    #[test]
    fn sum_out_rows_and_total() {
        let x = var("X", 2);
        let y = var("Y", 2);
        let f = F::new(vec![x.clone(), y.clone()], vec![0.12, 0.18, 0.28, 0.42]).unwrap();
        let m = f.sum_out(&y).unwrap();
        assert!((m.values()[0] - 0.3).abs() < 1e-15);
        assert!((m.values()[1] - 0.7).abs() < 1e-15);
        let s = m.sum_out(&x).unwrap();
        assert!(s.scope().is_empty());
        assert!((s.values()[0] - 1.0).abs() < 1e-15);
        assert!(matches!(s.sum_out(&x), Err(Error::NotInScope(_))));
    }

    #[test]
    fn condition_slices_without_renormalizing() {
        let x = var("X", 2);
        let y = var("Y", 2);
        let f = F::new(vec![x.clone(), y.clone()], vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let e = Assignment::new(vec![(x.clone(), 0)]).unwrap();
        let c = f.condition(&e).unwrap();
        assert_eq!(c.scope(), std::slice::from_ref(&y));
        assert_eq!(c.values(), &[0.1, 0.2]);
        assert_eq!(f.condition(&Assignment::empty()).unwrap(), f);
        let z = var("Z", 2);
        let bad = Assignment::new(vec![(z, 0)]).unwrap();
        assert!(f.condition(&bad).is_err());
    }

    #[test]
    fn marginalize_and_normalize() {
        let x = var("X", 2);
        let y = var("Y", 2);
        let f = F::new(vec![x.clone(), y.clone()], vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let m = f.marginalize_to(std::slice::from_ref(&y)).unwrap();
        assert!((m.values()[0] - 0.4).abs() < 1e-15);
        assert!((m.values()[1] - 0.6).abs() < 1e-15);
        let p = f.marginalize_to(&[y.clone(), x.clone()]).unwrap();
        assert_eq!(p.values(), &[0.1, 0.3, 0.2, 0.4]);

        let u = F::new(vec![x.clone()], vec![2.0, 6.0]).unwrap();
        assert_eq!(u.normalize().unwrap().values(), &[0.25, 0.75]);
        let z = F::new(vec![x], vec![0.0, 0.0]).unwrap();
        assert_eq!(z.normalize(), Err(Error::ZeroMass));
    }

    #[test]
    fn observe_keeps_scope() {
        let x = var("X", 2);
        let y = var("Y", 3);
        let f = Factor::<f64>::ones(vec![x.clone(), y.clone()]).unwrap();
        let o = f.observe(&Assignment::new(vec![(y.clone(), 2)]).unwrap());
        assert_eq!(o.values(), &[0.0, 0.0, 1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn rejects_bad_tables() {
        let x = var("X", 2);
        assert!(F::new(vec![x.clone()], vec![0.5]).is_err());
        assert!(F::new(vec![x.clone()], vec![-0.1, 1.1]).is_err());
        assert!(F::new(vec![x.clone(), x], vec![0.25; 4]).is_err());
    }

    #[test]
    fn generic_over_f32() {
        let x = var("X", 2);
        let f = Factor::<f32>::new(vec![x], vec![1.0, 3.0]).unwrap();
        assert_eq!(f.normalize().unwrap().values(), &[0.25f32, 0.75]);
    }
}
