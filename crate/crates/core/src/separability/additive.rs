use crate::cpt::Cpt;
use crate::error::{Error, Result, Witness};
use crate::factor::{projected_offsets, Factor};
use crate::scalar::{Scalar, Tolerances};
use crate::variable::{contains, space_size, Assignment, Variable};

/// Intermediate quantities of the constructive decomposition.
#[derive(Clone, Debug, PartialEq)]
pub struct DecompositionTrace<T> {
    /// Child value whose probability varies most across parent assignments.
    pub z1: usize,
    /// Parent assignment minimizing the probability of `z1`.
    pub reference: Assignment,
    /// Child row at the reference assignment.
    pub baseline: Factor<T>,
    /// Per block: child row at (block value, reference elsewhere) minus the
    /// baseline.
    pub deltas: Vec<DeltaTable<T>>,
    /// Per block: largest delta at `z1`.
    pub ranges: Vec<T>,
}

/// `P(Z | parents) = sum_i weights[i] * components[i](Z | blocks[i])`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparableDecomposition<T> {
    pub(crate) parents: Vec<Variable>,
    pub(crate) children: Vec<Variable>,
    pub(crate) blocks: Vec<Vec<Variable>>,
    pub(crate) weights: Vec<T>,
    pub(crate) components: Vec<Cpt<T>>,
    pub(crate) trace: Option<DecompositionTrace<T>>,
    pub(crate) degenerate: bool,
}

impl<T: Scalar> SeparableDecomposition<T> {
    /// Assembles a decomposition from explicit parts, checking the mixture
    /// invariants. Component `i` must have parents equal to `blocks[i]`.
    pub fn from_parts(
        parents: Vec<Variable>,
        blocks: Vec<Vec<Variable>>,
        weights: Vec<T>,
        components: Vec<Cpt<T>>,
        tol: &Tolerances<T>,
    ) -> Result<Self> {
        check_partition(&parents, &blocks)?;
        if weights.len() != blocks.len() || components.len() != blocks.len() || blocks.is_empty() {
            return Err(Error::InvalidBlocks(
                "need one weight and one component per block".into(),
            ));
        }
        if weights.iter().any(|w| *w < T::zero()) {
            return Err(Error::InvalidBlocks("negative mixture weight".into()));
        }
        let total: T = weights.iter().copied().sum();
        if (total - T::one()).abs() > tol.norm {
            return Err(Error::NotNormalized {
                row: 0,
                sum: total.as_f64(),
            });
        }
        let children = components[0].children().to_vec();
        for (c, b) in components.iter().zip(&blocks) {
            if c.parents() != b.as_slice() || c.children() != children.as_slice() {
                return Err(Error::InvalidBlocks(
                    "component scope does not match its block".into(),
                ));
            }
            c.validate(tol)?;
        }
        Ok(SeparableDecomposition {
            parents,
            children,
            blocks,
            weights,
            components,
            trace: None,
            degenerate: false,
        })
    }

    pub fn parents(&self) -> &[Variable] {
        &self.parents
    }

    pub fn children(&self) -> &[Variable] {
        &self.children
    }

    pub fn blocks(&self) -> &[Vec<Variable>] {
        &self.blocks
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn components(&self) -> &[Cpt<T>] {
        &self.components
    }

    pub fn trace(&self) -> Option<&DecompositionTrace<T>> {
        self.trace.as_ref()
    }

    /// The child did not depend on any parent; weights are uniform.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// The mixture as a single conditional over the original parent order.
    pub fn reconstruct(&self) -> Result<Cpt<T>> {
        let ps = space_size(&self.parents);
        let cs = space_size(&self.children);
        let maps: Vec<Vec<usize>> = self
            .blocks
            .iter()
            .map(|b| projected_offsets(&self.parents, b))
            .collect();
        let mut values = vec![T::zero(); ps * cs];
        for x in 0..ps {
            let row = &mut values[x * cs..(x + 1) * cs];
            for ((w, comp), map) in self.weights.iter().zip(&self.components).zip(&maps) {
                if *w == T::zero() {
                    continue;
                }
                for (o, p) in row.iter_mut().zip(comp.row(map[x])) {
                    *o += *w * *p;
                }
            }
        }
        Cpt::joint_with(
            self.children.clone(),
            self.parents.clone(),
            values,
            T::lit(T::DEFAULT_EPS).max(T::epsilon() * T::lit(64.0)),
        )
    }

    /// Checks the invariants against the conditional it was derived from.
    pub fn validate_against(&self, source: &Cpt<T>, tol: &Tolerances<T>) -> Result<()> {
        let total: T = self.weights.iter().copied().sum();
        if self.weights.iter().any(|w| *w < T::zero()) || (total - T::one()).abs() > tol.norm {
            return Err(Error::NotNormalized {
                row: 0,
                sum: total.as_f64(),
            });
        }
        for c in &self.components {
            c.validate(tol)?;
        }
        let rebuilt = self.reconstruct()?;
        let gap = rebuilt.max_abs_diff(source)?;
        if gap > tol.sep {
            return Err(Error::InvalidModel(format!(
                "decomposition reconstructs source only within {}",
                gap.as_f64()
            )));
        }
        Ok(())
    }
}

/// Blocks must be disjoint and cover exactly the parents.
pub(crate) fn check_partition(parents: &[Variable], blocks: &[Vec<Variable>]) -> Result<()> {
    let mut seen: Vec<&Variable> = Vec::new();
    for b in blocks {
        for v in b {
            if !contains(parents, v) {
                return Err(Error::InvalidBlocks(format!("`{v}` is not a parent")));
            }
            if seen.iter().any(|u| u.name() == v.name()) {
                return Err(Error::InvalidBlocks(format!("`{v}` appears in two blocks")));
            }
            seen.push(v);
        }
    }
    if let Some(v) = parents
        .iter()
        .find(|p| !seen.iter().any(|u| u.name() == p.name()))
    {
        return Err(Error::InvalidBlocks(format!("parent `{v}` is in no block")));
    }
    Ok(())
}

pub(crate) fn witness<T: Scalar>(
    cpt: &Cpt<T>,
    x: usize,
    z: usize,
    actual: T,
    additive: T,
) -> Witness {
    Witness {
        parents: cpt.parent_assignment(x).named(),
        child: cpt.child_assignment(z).named(),
        actual: actual.as_f64(),
        additive: additive.as_f64(),
    }
}

/// Two-block separation `g P_L(Z | left) + (1 - g) P_R(Z | right)`.
pub fn separate_two<T: Scalar>(
    cpt: &Cpt<T>,
    left: &[Variable],
    right: &[Variable],
    tol: &Tolerances<T>,
) -> Result<SeparableDecomposition<T>> {
    separate_n(cpt, &[left.to_vec(), right.to_vec()], tol)
}

/// Separates `cpt` into a mixture of conditionals on the given disjoint
/// blocks, or reports a cell where additivity fails.
///
/// A single reference assignment (minimizing the probability of the most
/// parent-sensitive child value) anchors per-block deltas; the table is
/// separable iff it equals the baseline plus the sum of deltas everywhere.
/// The baseline mass left after covering every block's negative deltas is
/// shared between blocks in proportion to their ranges at that child value.
/// With a binary child this yields weights `range_i / sum_j range_j`.
pub fn separate_n<T: Scalar>(
    cpt: &Cpt<T>,
    blocks: &[Vec<Variable>],
    tol: &Tolerances<T>,
) -> Result<SeparableDecomposition<T>> {
    if blocks.is_empty() {
        return Err(Error::InvalidBlocks("no blocks".into()));
    }
    check_partition(cpt.parents(), blocks)?;
    let eps = tol.sep;
    let ps = cpt.parent_space();
    let cs = cpt.child_space();
    let n = blocks.len();

    // Child value most affected by the parents; lowest index on ties.
    let mut z1 = 0;
    let mut best_range = -T::one();
    for z in 0..cs {
        let (mut lo, mut hi) = (T::infinity(), T::neg_infinity());
        for x in 0..ps {
            let p = cpt.prob(x, z);
            lo = lo.min(p);
            hi = hi.max(p);
        }
        if hi - lo > best_range {
            best_range = hi - lo;
            z1 = z;
        }
    }
    let mut reference = 0;
    for x in 1..ps {
        if cpt.prob(x, z1) < cpt.prob(reference, z1) {
            reference = x;
        }
    }
    let baseline: Vec<T> = cpt.row(reference).to_vec();

    // parent index -> block-local index, and block-local index -> parent
    // index with the other blocks at their reference values.
    let to_block: Vec<Vec<usize>> = blocks
        .iter()
        .map(|b| projected_offsets(cpt.parents(), b))
        .collect();
    let deltas: Vec<Vec<T>> = blocks
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let own = cpt.block_offsets(b);
            let rest = reference - own[to_block[i][reference]];
            let mut d = Vec::with_capacity(own.len() * cs);
            for &o in &own {
                for (z, &base) in baseline.iter().enumerate() {
                    d.push(cpt.prob(rest + o, z) - base);
                }
            }
            d
        })
        .collect();

    for x in 0..ps {
        for (z, &base) in baseline.iter().enumerate() {
            let mut additive = base;
            for i in 0..n {
                additive += deltas[i][to_block[i][x] * cs + z];
            }
            let actual = cpt.prob(x, z);
            if (actual - additive).abs() > eps {
                return Err(Error::NotSeparable(Box::new(witness(
                    cpt, x, z, actual, additive,
                ))));
            }
        }
    }

    let ranges: Vec<T> = deltas
        .iter()
        .map(|d| d.chunks(cs).map(|row| row[z1]).fold(T::zero(), T::max))
        .collect();
    // Per block and child value: mass needed to lift the block's most
    // negative delta back to zero.
    let lift: Vec<Vec<T>> = deltas
        .iter()
        .map(|d| {
            (0..cs)
                .map(|z| d.chunks(cs).map(|row| -row[z]).fold(T::zero(), T::max))
                .collect()
        })
        .collect();
    let slack: Vec<T> = (0..cs)
        .map(|z| {
            let s = baseline[z] - lift.iter().map(|l| l[z]).sum::<T>();
            s.max(T::zero())
        })
        .collect();
    let range_total: T = ranges.iter().copied().sum();
    let degenerate = range_total <= eps;
    let share: Vec<T> = if degenerate {
        vec![T::one() / T::lit(n as f64); n]
    } else {
        ranges.iter().map(|r| *r / range_total).collect()
    };

    let mut weights = Vec::with_capacity(n);
    let mut components = Vec::with_capacity(n);
    for i in 0..n {
        let offset: Vec<T> = (0..cs).map(|z| lift[i][z] + share[i] * slack[z]).collect();
        let mut gamma: T = offset.iter().copied().sum();
        let block_space = space_size(&blocks[i]);
        let values = if degenerate || gamma <= eps {
            if !degenerate {
                gamma = T::zero();
            }
            (0..block_space)
                .flat_map(|_| baseline.iter().copied())
                .collect()
        } else {
            let mut values = Vec::with_capacity(block_space * cs);
            for a in 0..block_space {
                let mut row: Vec<T> = (0..cs).map(|z| deltas[i][a * cs + z] + offset[z]).collect();
                for v in row.iter_mut() {
                    if *v < -eps {
                        return Err(Error::ComponentNotDistribution {
                            block: i,
                            value: (*v / gamma).as_f64(),
                        });
                    }
                    *v = v.max(T::zero());
                }
                let sum: T = row.iter().copied().sum();
                values.extend(row.into_iter().map(|v| v / sum));
            }
            values
        };
        weights.push(gamma);
        components.push(Cpt::joint_with(
            cpt.children().to_vec(),
            blocks[i].clone(),
            values,
            tol.norm.max(T::epsilon() * T::lit(64.0)),
        )?);
    }
    let total: T = weights.iter().copied().sum();
    for w in weights.iter_mut() {
        *w /= total;
    }
    if n == 1 {
        weights[0] = T::one();
        components[0] = cpt.reorder_parents(&blocks[0])?;
    }

    let trace = DecompositionTrace {
        z1,
        reference: cpt.parent_assignment(reference),
        baseline: Factor::new(cpt.children().to_vec(), baseline)?,
        deltas: blocks
            .iter()
            .zip(deltas)
            .map(|(b, d)| {
                let mut scope = b.clone();
                scope.extend(cpt.children().iter().cloned());
                DeltaTable { scope, values: d }
            })
            .collect(),
        ranges,
    };

    Ok(SeparableDecomposition {
        parents: cpt.parents().to_vec(),
        children: cpt.children().to_vec(),
        blocks: blocks.to_vec(),
        weights,
        components,
        trace: Some(trace),
        degenerate,
    })
}

/// Signed table over a block followed by the children.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaTable<T> {
    pub scope: Vec<Variable>,
    pub values: Vec<T>,
}
