use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

use super::financial::{penalty_cardinality, penalty_concentration};
use super::layout::VariableLayout;
use super::logical::{penalty_logical_global, penalty_logical_local};
use super::model::QuboModel;
use super::monotonicity::{penalty_monotonicity_approx, penalty_monotonicity_exact};
use super::weights::PenaltyWeights;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LogicalEncoding {
    #[default]
    Global,
    Local,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MonotonicityEncoding {
    None,
    #[default]
    Approximate,
    Exact,
}

/// Which penalty families enter the cost function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComposeOptions {
    pub logical: Option<LogicalEncoding>,
    pub monotonicity: MonotonicityEncoding,
    pub concentration: bool,
    pub cardinality: bool,
}

impl Default for ComposeOptions {
    fn default() -> Self {
        ComposeOptions {
            logical: Some(LogicalEncoding::Global),
            monotonicity: MonotonicityEncoding::Approximate,
            concentration: true,
            cardinality: true,
        }
    }
}

impl ComposeOptions {
    pub fn logical_only() -> Self {
        ComposeOptions {
            logical: Some(LogicalEncoding::Global),
            monotonicity: MonotonicityEncoding::None,
            concentration: false,
            cardinality: false,
        }
    }
}

/// Individual penalty models selected by `options`, in family order.
pub fn compose_parts(
    layout: &VariableLayout,
    weights: &PenaltyWeights,
    ds: &Dataset,
    options: &ComposeOptions,
) -> Result<Vec<(&'static str, QuboModel)>> {
    weights.validate()?;
    if ds.len() != layout.counterparts() {
        return Err(Error::LayoutMismatch(format!(
            "dataset has {} counterparts, layout has {}",
            ds.len(),
            layout.counterparts()
        )));
    }
    let mut parts = Vec::new();
    match options.logical {
        Some(LogicalEncoding::Global) => parts.push(("logical", penalty_logical_global(layout, weights)?)),
        Some(LogicalEncoding::Local) => parts.push(("logical", penalty_logical_local(layout, weights)?)),
        None => {}
    }
    match options.monotonicity {
        MonotonicityEncoding::None => {}
        MonotonicityEncoding::Approximate => {
            parts.push(("monotonicity", penalty_monotonicity_approx(layout, ds, weights.mu1)?))
        }
        MonotonicityEncoding::Exact => parts.push((
            "monotonicity",
            penalty_monotonicity_exact(layout, ds, weights.lambda0, weights.lambda)?,
        )),
    }
    if options.concentration {
        weights.require_positive(&["mu3"])?;
        parts.push(("concentration", penalty_concentration(layout, weights.mu3)?));
    }
    if options.cardinality {
        weights.require_positive(&["mu41", "mu42"])?;
        parts.push(("cardinality", penalty_cardinality(layout, weights.mu41, weights.mu42)?));
    }
    Ok(parts)
}

/// Sum of the selected penalty families.
pub fn compose(
    layout: &VariableLayout,
    weights: &PenaltyWeights,
    ds: &Dataset,
    options: &ComposeOptions,
) -> Result<QuboModel> {
    let mut model = QuboModel::new(layout.total_variables());
    for (_, part) in compose_parts(layout, weights, ds, options)? {
        model.add_model(&part);
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::layout::LayoutOptions;
    use crate::qubo::weights::preset_weights;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn compose_is_sum_of_parts() {
        let ds = Dataset::from_default_positions(6, &[4, 6]).unwrap();
        let opts = LayoutOptions {
            thresholds: true,
            lower: Some(1),
            upper: Some(4),
            exact_monotonicity_defaults: Some(2),
        };
        let layout = VariableLayout::new(6, 2, &opts).unwrap();
        let w = preset_weights(1, 6, 2, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for monotonicity in [MonotonicityEncoding::Approximate, MonotonicityEncoding::Exact] {
            for logical in [LogicalEncoding::Global, LogicalEncoding::Local] {
                let options = ComposeOptions {
                    logical: Some(logical),
                    monotonicity,
                    ..Default::default()
                };
                let total = compose(&layout, &w, &ds, &options).unwrap();
                let parts = compose_parts(&layout, &w, &ds, &options).unwrap();
                for _ in 0..100 {
                    let z: Vec<bool> = (0..layout.total_variables()).map(|_| rng.random()).collect();
                    let sum: f64 = parts.iter().map(|(_, p)| p.evaluate(&z).unwrap()).sum();
                    let e = total.evaluate(&z).unwrap();
                    assert!((e - sum).abs() <= 1e-9 * sum.abs().max(1.0));
                }
            }
        }
    }

    #[test]
    fn logical_only_equals_global_builder() {
        let ds = Dataset::from_default_positions(5, &[5]).unwrap();
        let layout = VariableLayout::new(5, 2, &LayoutOptions::default()).unwrap();
        let w = preset_weights(1, 5, 2, 1).unwrap();
        let model = compose(&layout, &w, &ds, &ComposeOptions::logical_only()).unwrap();
        assert_eq!(model, penalty_logical_global(&layout, &w).unwrap());
    }

    #[test]
    fn exact_without_layout_block_fails() {
        let ds = Dataset::from_default_positions(5, &[5]).unwrap();
        let layout = VariableLayout::new(5, 2, &LayoutOptions::default()).unwrap();
        let w = preset_weights(1, 5, 2, 1).unwrap();
        let options = ComposeOptions {
            monotonicity: MonotonicityEncoding::Exact,
            cardinality: false,
            ..Default::default()
        };
        assert!(matches!(compose(&layout, &w, &ds, &options), Err(Error::LayoutMismatch(_))));
    }

    #[test]
    fn cardinality_without_thresholds_fails() {
        let ds = Dataset::from_default_positions(5, &[5]).unwrap();
        let layout = VariableLayout::new(5, 2, &LayoutOptions::default()).unwrap();
        let w = preset_weights(1, 5, 2, 1).unwrap();
        assert!(compose(&layout, &w, &ds, &ComposeOptions::default()).is_err());
    }
}
