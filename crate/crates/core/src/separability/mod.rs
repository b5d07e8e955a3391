//! Sufficiency and additive separability of conditional distributions.
//!
//! A conditional `P(Z | X_1..X_n)` is separable over disjoint parent blocks
//! when it is a convex mixture `sum_i g_i P_i(Z | X_i)` of single-block
//! conditionals. Separability holds exactly when the block marginals of any
//! parent distribution determine the induced child distribution. This module
//! constructs such decompositions (plain, conditional on a shared set, and
//! recursively along a tree of subsets) and checks sufficiency independently
//! through a null-space computation.

mod additive;
mod apply;
mod conditional;
mod oracle;
mod tree;

pub use additive::{
    separate_n, separate_two, DecompositionTrace, DeltaTable, SeparableDecomposition,
};
pub use apply::{apply_decomposition, Decomposition, OpCount};
pub use conditional::{conditional_separate, conditional_separate_n, ConditionalDecomposition};
pub use oracle::{null_space, sufficiency_oracle, sufficiency_oracle_with_cap, DEFAULT_ORACLE_CAP};
pub use tree::{
    tree_separate, DecompNode, TreeBranch, TreeDecomposition, TreeNode, TreeRepresentation,
};
