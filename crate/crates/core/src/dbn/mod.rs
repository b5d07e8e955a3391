//! Dynamic Bayesian networks: self-sufficient subsystem families, exact
//! marginal propagation, filtering, and model generators.

mod cost;
mod family;
mod filter;
mod generators;
mod merge;
mod model;
mod predict;

pub use cost::{cost_report, CostReport};
pub use family::{
    check_self_sufficient, check_self_sufficient_with_cap, check_subset, SubsystemFamily,
    Verification,
};
pub use filter::{filter_joint, filter_step, FilterPolicy};
pub use generators::{
    figure5_default_initial, figure6_take_over, figure6_top_down, figure6_tree, make_figure5,
    make_from_modes, make_weather, ModeSpec, ModeWeights, WeatherModelSpec, MODE_VAR,
};
pub use merge::{merge_rule_check, simple_merge_check};
pub use model::{next_name, next_var, DbnModel, Initial};
pub use predict::{
    predict_exact, predict_exact_counted, predict_marginals, predict_marginals_counted,
    predict_step, ExactTransition, DEFAULT_EXACT_CAP,
};
