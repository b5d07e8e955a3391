use crate::cpt::Cpt;
use crate::error::{Error, Result};
use crate::factor::projected_offsets;
use crate::scalar::{Scalar, Tolerances};
use crate::variable::{contains, difference, space_size, Variable};

/// Largest parent space the oracle will build a dense system for.
pub const DEFAULT_ORACLE_CAP: usize = 4096;

/// Basis of the null space of a row-major `rows x cols` matrix, by
/// Gauss-Jordan elimination with partial pivoting. Pivots of magnitude at
/// most `pivot_tol` count as zero.
pub fn null_space<T: Scalar>(matrix: &[T], rows: usize, cols: usize, pivot_tol: T) -> Vec<Vec<T>> {
    assert_eq!(matrix.len(), rows * cols);
    let mut m = matrix.to_vec();
    let mut pivot_cols = Vec::new();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let (best, mag) =
            (rank..rows)
                .map(|r| (r, m[r * cols + c].abs()))
                .fold(
                    (rank, -T::one()),
                    |acc, x| if x.1 > acc.1 { x } else { acc },
                );
        if mag <= pivot_tol {
            continue;
        }
        if best != rank {
            for k in 0..cols {
                m.swap(best * cols + k, rank * cols + k);
            }
        }
        let inv = T::one() / m[rank * cols + c];
        for k in c..cols {
            m[rank * cols + k] *= inv;
        }
        for r in 0..rows {
            if r == rank {
                continue;
            }
            let f = m[r * cols + c];
            if f == T::zero() {
                continue;
            }
            for k in c..cols {
                let delta = f * m[rank * cols + k];
                m[r * cols + k] -= delta;
            }
        }
        pivot_cols.push(c);
        rank += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivot_cols.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![T::zero(); cols];
            v[f] = T::one();
            for (r, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = -m[r * cols + f];
            }
            v
        })
        .collect()
}

/// Whether the subset marginals of a parent distribution determine the
/// induced child distribution, decided from linear algebra alone.
///
/// Two parent distributions with equal subset marginals differ by a vector
/// in the null space of the stacked marginalization map. Sufficiency holds
/// iff the child-by-parent matrix of conditionals annihilates that null
/// space (zero-total-mass vectors only; a row of ones enforces this).
pub fn sufficiency_oracle<T: Scalar>(
    cpt: &Cpt<T>,
    subsets: &[Vec<Variable>],
    tol: &Tolerances<T>,
) -> Result<bool> {
    sufficiency_oracle_with_cap(cpt, subsets, tol, DEFAULT_ORACLE_CAP)
}

pub fn sufficiency_oracle_with_cap<T: Scalar>(
    cpt: &Cpt<T>,
    subsets: &[Vec<Variable>],
    tol: &Tolerances<T>,
    cap: usize,
) -> Result<bool> {
    if let Some(v) = cpt
        .parents()
        .iter()
        .find(|v| !subsets.iter().any(|s| contains(s, v)))
    {
        return Err(Error::InvalidBlocks(format!(
            "parent `{v}` is in no subset"
        )));
    }
    let mut parents = cpt.parents().to_vec();
    for s in subsets {
        parents.extend(difference(s, &parents));
    }
    let cpt = cpt.broadcast_parents(&parents)?;
    let cols = cpt.parent_space();
    if cols > cap {
        return Err(Error::OracleTooLarge { size: cols, cap });
    }

    let rows: usize = 1 + subsets.iter().map(|s| space_size(s)).sum::<usize>();
    let mut m = vec![T::zero(); rows * cols];
    m[..cols].iter_mut().for_each(|x| *x = T::one());
    let mut base = 1;
    for s in subsets {
        for (x, r) in projected_offsets(&parents, s).into_iter().enumerate() {
            m[(base + r) * cols + x] = T::one();
        }
        base += space_size(s);
    }

    let cs = cpt.child_space();
    for v in null_space(&m, rows, cols, tol.pivot) {
        let scale: T = v.iter().map(|x| x.abs()).sum();
        for z in 0..cs {
            let phi: T = (0..cols).map(|x| cpt.prob(x, z) * v[x]).sum();
            if phi.abs() > tol.sep * scale.max(T::one()) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
