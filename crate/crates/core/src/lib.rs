//! Rating-scale definition as quadratic unconstrained binary optimization.
//!
//! A population of score-ordered counterparts is split into contiguous
//! grades. [`qubo`] turns the partitioning constraints into a cost function
//! over binary variables, [`solvers`] minimizes it, and [`scale`] checks the
//! decoded partition classically. [`baseline`] enumerates every partition for
//! comparison and [`experiments`] reproduces the validation studies.

pub mod baseline;
pub mod dataset;
pub mod error;
pub mod experiments;
pub mod qubo;
pub mod scale;
pub mod solvers;

pub use dataset::Dataset;
pub use error::{Error, Result};
pub use qubo::{PenaltyWeights, QuboModel, VariableLayout};
pub use scale::{Partition, ValidityReport};
pub use solvers::SolveResult;
