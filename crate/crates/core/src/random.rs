//! Seeded random tables for demos and property tests.
//!
//! The generator is ChaCha8 (`rand_chacha`) seeded through
//! `SeedableRng::seed_from_u64`; uniform reals come from `rand`'s standard
//! `f64` distribution. Distributions are drawn as normalized unit
//! exponentials, i.e. uniformly over the simplex.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cpt::Cpt;
use crate::error::Result;
use crate::factor::Factor;
use crate::scalar::Scalar;
use crate::variable::{space_size, Variable};

pub type DemoRng = ChaCha8Rng;

pub fn rng(seed: u64) -> DemoRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point of the probability simplex with `n` entries.
pub fn distribution<T: Scalar, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<T> {
    let raw: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| T::lit(x / total)).collect()
}

/// Conditional with independently drawn rows.
pub fn cpt<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    children: Vec<Variable>,
    parents: Vec<Variable>,
) -> Result<Cpt<T>> {
    let cs = space_size(&children);
    Cpt::from_rows(children, parents, |_| distribution(rng, cs))
}

pub fn joint<T: Scalar, R: Rng + ?Sized>(rng: &mut R, scope: Vec<Variable>) -> Result<Factor<T>> {
    let n = space_size(&scope);
    Factor::new(scope, distribution(rng, n))
}

/// Mixture `sum_i weights[i] P_i(children | blocks[i])` with random
/// components; parents are the concatenated blocks.
pub fn mixture<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    children: Vec<Variable>,
    blocks: &[Vec<Variable>],
    weights: &[T],
) -> Result<Cpt<T>> {
    let parents: Vec<Variable> = blocks.iter().flatten().cloned().collect();
    let comps = blocks
        .iter()
        .map(|b| cpt::<T, R>(rng, children.clone(), b.clone()))
        .collect::<Result<Vec<_>>>()?;
    mix(&children, &parents, blocks, weights, &comps)
}

/// Evaluates a mixture of block conditionals cell by cell.
pub fn mix<T: Scalar>(
    children: &[Variable],
    parents: &[Variable],
    blocks: &[Vec<Variable>],
    weights: &[T],
    comps: &[Cpt<T>],
) -> Result<Cpt<T>> {
    let cs = space_size(children);
    let maps: Vec<Vec<usize>> = blocks
        .iter()
        .map(|b| crate::factor::projected_offsets(parents, b))
        .collect();
    let mut values = Vec::with_capacity(space_size(parents) * cs);
    for x in 0..space_size(parents) {
        for z in 0..cs {
            let mut p = T::zero();
            for ((w, c), m) in weights.iter().zip(comps).zip(&maps) {
                p += *w * c.prob(m[x], z);
            }
            values.push(p);
        }
    }
    Cpt::joint(children.to_vec(), parents.to_vec(), values)
}
