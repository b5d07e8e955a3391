//! Variable elimination over factor lists.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::factor::Factor;
use crate::scalar::Scalar;
use crate::separability::OpCount;
use crate::variable::{contains, Assignment, Variable};

/// Cost record of one elimination run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EliminationReport {
    pub ordering: Vec<Variable>,
    /// Scope size of the product formed at each step, eliminated variable
    /// included.
    pub scope_sizes: Vec<usize>,
    /// Multiply-adds spent forming products and summing out.
    pub ops: u64,
}

impl EliminationReport {
    pub fn max_scope(&self) -> usize {
        self.scope_sizes.iter().copied().max().unwrap_or(0)
    }
}

fn all_vars<T: Scalar>(factors: &[Factor<T>]) -> Vec<Variable> {
    let mut out: Vec<Variable> = Vec::new();
    for f in factors {
        for v in f.scope() {
            if !contains(&out, v) {
                out.push(v.clone());
            }
        }
    }
    out
}

/// Greedy min-fill order over every variable not in `keep`; ties go to the
/// lexicographically smallest name.
pub fn min_fill_ordering<T: Scalar>(factors: &[Factor<T>], keep: &[Variable]) -> Vec<Variable> {
    let vars = all_vars(factors);
    let name_of = |i: usize| vars[i].name();
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); vars.len()];
    for f in factors {
        let idx: Vec<usize> = f
            .scope()
            .iter()
            .map(|v| {
                vars.iter()
                    .position(|u| u.name() == v.name())
                    .expect("collected")
            })
            .collect();
        for &a in &idx {
            for &b in &idx {
                if a != b {
                    adj[a].insert(b);
                }
            }
        }
    }
    let mut remaining: BTreeSet<usize> = (0..vars.len())
        .filter(|&i| !contains(keep, &vars[i]))
        .collect();
    let mut order = Vec::with_capacity(remaining.len());
    while !remaining.is_empty() {
        let fill = |i: usize| {
            let nb: Vec<usize> = adj[i].iter().copied().collect();
            let mut missing = 0usize;
            for (k, a) in nb.iter().enumerate() {
                for b in &nb[k + 1..] {
                    if !adj[*a].contains(b) {
                        missing += 1;
                    }
                }
            }
            missing
        };
        let best = remaining
            .iter()
            .copied()
            .min_by(|&a, &b| {
                fill(a)
                    .cmp(&fill(b))
                    .then_with(|| name_of(a).cmp(name_of(b)))
            })
            .expect("non-empty");
        let nb: Vec<usize> = adj[best].iter().copied().collect();
        for &a in &nb {
            adj[a].remove(&best);
            for &b in &nb {
                if a != b {
                    adj[a].insert(b);
                }
            }
        }
        adj[best].clear();
        remaining.remove(&best);
        order.push(vars[best].clone());
    }
    order
}

/// Posterior over `query` given `evidence`, eliminating by min-fill.
pub fn eliminate<T: Scalar>(
    factors: &[Factor<T>],
    query: &[Variable],
    evidence: &Assignment,
) -> Result<(Factor<T>, EliminationReport)> {
    let (f, report) = eliminate_unnormalized(factors, query, evidence, None)?;
    Ok((f.normalize()?, report))
}

/// As [`eliminate`] with an explicit order for the non-query variables.
pub fn eliminate_with_order<T: Scalar>(
    factors: &[Factor<T>],
    query: &[Variable],
    evidence: &Assignment,
    order: &[Variable],
) -> Result<(Factor<T>, EliminationReport)> {
    let (f, report) = eliminate_unnormalized(factors, query, evidence, Some(order))?;
    Ok((f.normalize()?, report))
}

/// Sum over all non-query variables of the product of the factors, after
/// slicing at the evidence. No normalization; an empty query gives the
/// total mass as a scalar factor.
pub fn eliminate_unnormalized<T: Scalar>(
    factors: &[Factor<T>],
    query: &[Variable],
    evidence: &Assignment,
    order: Option<&[Variable]>,
) -> Result<(Factor<T>, EliminationReport)> {
    let vars = all_vars(factors);
    for v in query {
        if !contains(&vars, v) {
            return Err(Error::InvalidQuery(format!("query `{v}` is in no factor")));
        }
        if evidence.get(v).is_some() {
            return Err(Error::InvalidQuery(format!(
                "`{v}` is both queried and observed"
            )));
        }
    }
    for (v, _) in evidence.iter() {
        if !contains(&vars, v) {
            return Err(Error::InvalidQuery(format!(
                "evidence `{v}` is in no factor"
            )));
        }
    }
    let mut pool: Vec<Factor<T>> = factors
        .iter()
        .map(|f| {
            let local: Vec<(Variable, usize)> = evidence
                .iter()
                .filter(|(v, _)| f.has_var(v))
                .map(|(v, x)| (v.clone(), x))
                .collect();
            f.condition(&Assignment::new(local)?)
        })
        .collect::<Result<_>>()?;
    let mut keep = query.to_vec();
    keep.extend(evidence.vars());
    let order = match order {
        Some(o) => {
            let expected = min_fill_ordering(factors, &keep);
            if o.len() != expected.len() || expected.iter().any(|v| !contains(o, v)) {
                return Err(Error::InvalidQuery(
                    "ordering must list every non-query, non-evidence variable once".into(),
                ));
            }
            o.to_vec()
        }
        None => min_fill_ordering(&pool, query),
    };

    let mut ops = OpCount::default();
    let mut report = EliminationReport {
        ordering: order.clone(),
        ..Default::default()
    };
    for v in &order {
        let (with, without): (Vec<_>, Vec<_>) = pool.into_iter().partition(|f| f.has_var(v));
        pool = without;
        if with.is_empty() {
            continue;
        }
        let prod = multiply_all(&with, &mut ops)?;
        report.scope_sizes.push(prod.scope().len());
        ops.add(prod.len());
        pool.push(prod.sum_out(v)?);
    }
    let prod = multiply_all(&pool, &mut ops)?;
    let out = prod.marginalize_to(query)?;
    report.ops = ops.0;
    Ok((out, report))
}

fn multiply_all<T: Scalar>(factors: &[Factor<T>], ops: &mut OpCount) -> Result<Factor<T>> {
    let mut iter = factors.iter();
    let mut prod = match iter.next() {
        Some(f) => f.clone(),
        None => return Ok(Factor::scalar(T::one())),
    };
    for f in iter {
        prod = prod.multiply(f)?;
        ops.add(prod.len());
    }
    Ok(prod)
}
