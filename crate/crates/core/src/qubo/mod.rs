//! Cost function construction.

mod compose;
mod financial;
mod layout;
mod logical;
mod model;
mod monotonicity;
mod penalty;
mod weights;

pub use compose::{compose, compose_parts, ComposeOptions, LogicalEncoding, MonotonicityEncoding};
pub use financial::{penalty_cardinality, penalty_concentration};
pub use layout::{
    default_thresholds, slack_width, ExactMonotonicityBlock, LayoutOptions, ThresholdBlock, VariableLayout,
};
pub use logical::{penalty_logical_global, penalty_logical_local};
pub use model::QuboModel;
pub use monotonicity::{
    complete_exact_auxiliaries, default_difference_matrix, penalty_monotonicity_approx, penalty_monotonicity_exact,
    product_terms, rosenberg, ProductTerm,
};
pub use penalty::{inequality_slack_width, penalty_equality, penalty_inequality_slack};
pub use weights::{preset_weights, PenaltyWeights};
