use crate::cpt::Cpt;
use crate::error::{Error, Result};
use crate::scalar::{Scalar, Tolerances};
use crate::separability::sufficiency_oracle;
use crate::variable::{difference, Variable};

fn union(a: &[Variable], b: &[Variable]) -> Vec<Variable> {
    let mut out = a.to_vec();
    out.extend(difference(b, a));
    out
}

fn require_sufficient<T: Scalar>(
    cpt: &Cpt<T>,
    x: &[Variable],
    y: &[Variable],
    tol: &Tolerances<T>,
) -> Result<()> {
    if sufficiency_oracle(cpt, &[x.to_vec(), y.to_vec()], tol)? {
        Ok(())
    } else {
        Err(Error::PremiseViolated(format!(
            "{{{}}} and {{{}}} are not sufficient for {:?}",
            names(x),
            names(y),
            cpt.children()
                .iter()
                .map(Variable::name)
                .collect::<Vec<_>>()
        )))
    }
}

fn names(vars: &[Variable]) -> String {
    vars.iter()
        .map(Variable::name)
        .collect::<Vec<_>>()
        .join(",")
}

/// Given `x1, y1` sufficient for `cpt1` and `x2, y2` sufficient for `cpt2`,
/// whether the four cross unions are sufficient for the joint child of the
/// two conditionally independent conditionals.
pub fn merge_rule_check<T: Scalar>(
    cpt1: &Cpt<T>,
    cpt2: &Cpt<T>,
    (x1, y1): (&[Variable], &[Variable]),
    (x2, y2): (&[Variable], &[Variable]),
    tol: &Tolerances<T>,
) -> Result<bool> {
    require_sufficient(cpt1, x1, y1, tol)?;
    require_sufficient(cpt2, x2, y2, tol)?;
    let joint = cpt1.product(cpt2)?;
    let subsets = [union(x1, x2), union(x1, y2), union(y1, x2), union(y1, y2)];
    sufficiency_oracle(&joint, &subsets, tol)
}

/// Given `x, y` sufficient for each conditional separately, whether they
/// are sufficient for the joint child. Not implied in general.
pub fn simple_merge_check<T: Scalar>(
    cpt1: &Cpt<T>,
    cpt2: &Cpt<T>,
    x: &[Variable],
    y: &[Variable],
    tol: &Tolerances<T>,
) -> Result<bool> {
    require_sufficient(cpt1, x, y, tol)?;
    require_sufficient(cpt2, x, y, tol)?;
    let joint = cpt1.product(cpt2)?;
    sufficiency_oracle(&joint, &[x.to_vec(), y.to_vec()], tol)
}
