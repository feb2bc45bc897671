//! Shared fixtures for the criterion benchmarks in `benches/`.

use gradequbo::qubo::{compose, preset_weights, ComposeOptions, LayoutOptions, QuboModel, VariableLayout};
use gradequbo::Dataset;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// 150 counterparts with six defaults in the tail.
pub fn tail_defaults_150() -> Dataset {
    Dataset::from_default_positions(150, &[115, 131, 133, 147, 149, 150]).expect("valid positions")
}

/// Layout and first-preset model with every penalty enabled.
pub fn preset_model(ds: &Dataset, m: usize) -> (VariableLayout, QuboModel) {
    let layout = VariableLayout::new(ds.len(), m, &LayoutOptions::with_thresholds()).expect("feasible thresholds");
    let weights = preset_weights(1, ds.len(), m, ds.default_count()).expect("valid preset");
    let model = compose(&layout, &weights, ds, &ComposeOptions::default()).expect("consistent options");
    (layout, model)
}

/// Dense random model with coefficients in [-1, 1].
pub fn random_model(dimension: usize, seed: u64) -> QuboModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut next = || rng.random_range(-1.0..=1.0);
    let mut model = QuboModel::new(dimension);
    for i in 0..dimension {
        model.add_linear(i, next());
        for j in i + 1..dimension {
            model.add_quadratic(i, j, next());
        }
    }
    model
}
