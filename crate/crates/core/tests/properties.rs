use proptest::prelude::*;

use gradequbo::qubo::{compose, compose_parts, preset_weights, ComposeOptions, LayoutOptions, MonotonicityEncoding};
use gradequbo::solvers::{delta_energy, solve_anneal, solve_exact, AnnealOptions, CompiledQubo};
use gradequbo::{Dataset, QuboModel, VariableLayout};

fn model_strategy() -> impl Strategy<Value = QuboModel> {
    (2usize..=10).prop_flat_map(|dim| {
        let pairs = dim * (dim - 1) / 2;
        (
            prop::collection::vec(-4i32..=4, dim),
            prop::collection::vec(-4i32..=4, pairs),
        )
            .prop_map(move |(lin, quad)| {
                let mut m = QuboModel::new(dim);
                for (i, c) in lin.into_iter().enumerate() {
                    m.add_linear(i, c as f64);
                }
                let mut k = 0;
                for i in 0..dim {
                    for j in i + 1..dim {
                        m.add_quadratic(i, j, quad[k] as f64);
                        k += 1;
                    }
                }
                m
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generate_places_rounded_default_count(n in 2usize..400, fraction in 0.01f64..0.99, seed in any::<u64>()) {
        let expected = (n as f64 * fraction).round() as usize;
        prop_assume!(expected >= 1 && expected < n);
        let ds = Dataset::generate(n, fraction, seed).unwrap();
        prop_assert_eq!(ds.default_count(), expected);
        prop_assert_eq!(ds, Dataset::generate(n, fraction, seed).unwrap());
    }

    #[test]
    fn save_then_load_is_identity(n in 2usize..60, fraction in 0.05f64..0.9, seed in any::<u64>()) {
        prop_assume!(((n as f64 * fraction).round() as usize).clamp(1, n - 1) == (n as f64 * fraction).round() as usize);
        let ds = Dataset::generate(n, fraction, seed).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ds.csv");
        ds.save(&path).unwrap();
        prop_assert_eq!(Dataset::load(&path).unwrap(), ds);
    }

    #[test]
    fn compose_is_coefficientwise_sum_of_parts(
        n in 6usize..12,
        m in 2usize..4,
        positions in prop::collection::btree_set(1usize..=6, 1..4),
        exact in any::<bool>(),
    ) {
        let positions: Vec<usize> = positions.into_iter().map(|p| p + n - 6).collect();
        let ds = Dataset::from_default_positions(n, &positions).unwrap();
        let options = ComposeOptions {
            monotonicity: if exact { MonotonicityEncoding::Exact } else { MonotonicityEncoding::Approximate },
            ..Default::default()
        };
        let layout = VariableLayout::new(n, m, &LayoutOptions {
            thresholds: true,
            lower: Some(1),
            upper: Some(n),
            exact_monotonicity_defaults: exact.then_some(ds.default_count()),
        }).unwrap();
        let w = preset_weights(1, n, m, ds.default_count()).unwrap();
        let total = compose(&layout, &w, &ds, &options).unwrap();
        let mut summed = QuboModel::new(layout.total_variables());
        for (_, part) in compose_parts(&layout, &w, &ds, &options).unwrap() {
            summed.add_model(&part);
        }
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0);
        prop_assert!(close(total.offset(), summed.offset()));
        for i in 0..layout.total_variables() {
            prop_assert!(close(total.linear_coefficient(i), summed.linear_coefficient(i)));
        }
        for (&(i, j), &c) in summed.quadratic() {
            prop_assert!(close(total.quadratic_coefficient(i, j), c));
        }
        prop_assert_eq!(total.quadratic().len(), summed.quadratic().len());
    }

    #[test]
    fn anneal_never_beats_exact_and_ends_in_local_minimum(model in model_strategy(), seed in any::<u64>()) {
        let exact = solve_exact(&model, 16).unwrap();
        let options = AnnealOptions { seed, restarts: 2, ..Default::default() };
        let anneal = solve_anneal(&model, &options).unwrap();
        prop_assert!(anneal.best_energy >= exact.best_energy - 1e-9);
        prop_assert_eq!(model.evaluate(&anneal.best_state).unwrap(), anneal.best_energy);
        let compiled = CompiledQubo::new(&model);
        for k in 0..model.dimension() {
            prop_assert!(delta_energy(&compiled, &anneal.best_state, k) >= -1e-9);
        }
    }
}
