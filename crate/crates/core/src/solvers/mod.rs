//! Exact and heuristic minimization, decoding and end-to-end solving.

mod anneal;
mod compiled;
mod decode;
mod exact;
mod polish;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize, Serializer};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::qubo::{
    complete_exact_auxiliaries, compose, ComposeOptions, LayoutOptions, MonotonicityEncoding, PenaltyWeights,
    QuboModel, VariableLayout,
};
use crate::scale::{validate, Partition, ValidationConfig, ValidityReport};

pub use anneal::{resolve_schedule, solve_anneal, AnnealOptions, Schedule, Temperatures};
pub use compiled::{delta_energy, CompiledQubo};
pub use decode::{decode, diagnose, StructuralIssue};
pub use exact::{solve_exact, DEFAULT_EXACT_CAP, MAX_STORED_MINIMIZERS};
pub use polish::{polish_staircase, project_to_staircase, Polished};

/// Largest model built with exact monotonicity that [`solve_and_validate`]
/// accepts without an explicit override.
pub const EXACT_MONOTONICITY_CAP: usize = 30;

pub(crate) fn mask_to_state(mask: u64, dim: usize) -> Vec<bool> {
    (0..dim).map(|k| mask >> k & 1 == 1).collect()
}

/// `"0110..."`, variable 0 first.
pub fn state_to_string(state: &[bool]) -> String {
    state.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

pub fn state_from_string(text: &str) -> Result<Vec<bool>> {
    text.trim()
        .chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::InvalidArgument(format!("state strings hold only 0 and 1, found `{other}`"))),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    Exact,
    Anneal,
}

fn ser_state<S: Serializer>(state: &[bool], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&state_to_string(state))
}

fn ser_states<S: Serializer>(states: &Option<Vec<Vec<bool>>>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match states {
        Some(v) => s.collect_seq(v.iter().map(|x| state_to_string(x))),
        None => s.serialize_none(),
    }
}

fn ser_seconds<S: Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveResult {
    pub solver: SolverKind,
    #[serde(rename = "state", serialize_with = "ser_state")]
    pub best_state: Vec<bool>,
    #[serde(rename = "energy")]
    pub best_energy: f64,
    /// Exact solver only.
    #[serde(serialize_with = "ser_states")]
    pub minimizers: Option<Vec<Vec<bool>>>,
    pub minimizer_count: Option<u64>,
    pub minimizers_truncated: bool,
    pub decoded: Option<Partition>,
    pub diagnosis: Option<Vec<StructuralIssue>>,
    pub validity: Option<ValidityReport>,
    #[serde(rename = "wall_time_seconds", serialize_with = "ser_seconds")]
    pub wall_time: Duration,
    pub evaluations: u64,
}

impl SolveResult {
    pub fn to_json(&self, pretty: bool) -> String {
        let out = if pretty {
            serde_json::to_string_pretty(self)
        } else {
            serde_json::to_string(self)
        };
        out.expect("solve results always serialize")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverChoice {
    /// Exact when the model fits under the exact cap, annealing otherwise.
    #[default]
    Auto,
    Exact,
    Anneal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub compose: ComposeOptions,
    /// Grade size bound overrides; the slack block exists only when the
    /// cardinality penalty is enabled.
    pub lower: Option<usize>,
    pub upper: Option<usize>,
    pub solver: SolverChoice,
    pub exact_cap: usize,
    pub anneal: AnnealOptions,
    /// Give the annealer one-hot moves over each counterpart's grade bits.
    pub group_moves: bool,
    /// Refine annealed states with staircase boundary shifts.
    pub polish: bool,
    pub allow_large_exact_monotonicity: bool,
    /// Defaults to [`ValidationConfig::default`] with the layout's bounds.
    pub validation: Option<ValidationConfig>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            compose: ComposeOptions::default(),
            lower: None,
            upper: None,
            solver: SolverChoice::Auto,
            exact_cap: DEFAULT_EXACT_CAP,
            anneal: AnnealOptions {
                schedule: Schedule::CoefficientSpan,
                ..Default::default()
            },
            group_moves: true,
            polish: true,
            allow_large_exact_monotonicity: false,
            validation: None,
        }
    }
}

impl SolveOptions {
    pub fn layout_options(&self, ds: &Dataset) -> LayoutOptions {
        LayoutOptions {
            thresholds: self.compose.cardinality,
            lower: self.lower,
            upper: self.upper,
            exact_monotonicity_defaults: (self.compose.monotonicity == MonotonicityEncoding::Exact)
                .then(|| ds.default_count()),
        }
    }
}

/// Layout and composed model for `solve_and_validate`'s inputs.
pub fn build_model(
    ds: &Dataset,
    m: usize,
    weights: &PenaltyWeights,
    options: &SolveOptions,
) -> Result<(VariableLayout, QuboModel)> {
    let layout = VariableLayout::new(ds.len(), m, &options.layout_options(ds))?;
    let model = compose(&layout, weights, ds, &options.compose)?;
    Ok((layout, model))
}

/// Minimizes `model` with the configured solver.
pub fn solve_model(model: &QuboModel, layout: Option<&VariableLayout>, options: &SolveOptions) -> Result<SolveResult> {
    let exact = match options.solver {
        SolverChoice::Exact => true,
        SolverChoice::Anneal => false,
        SolverChoice::Auto => model.dimension() <= options.exact_cap,
    };
    if exact {
        return solve_exact(model, options.exact_cap);
    }
    let mut anneal = options.anneal.clone();
    if options.group_moves {
        if let Some(layout) = layout {
            anneal.swap_groups.extend(layout.assignment_rows());
        }
    }
    solve_anneal(model, &anneal)
}

/// Decodes the best state and, when it is a staircase, validates it.
pub fn attach_outcome(
    result: &mut SolveResult,
    ds: &Dataset,
    layout: &VariableLayout,
    validation: &ValidationConfig,
) -> Result<()> {
    // prefer a minimizer that decodes, when the exact solver found ties
    if let Some(all) = &result.minimizers {
        if let Some(s) = all.iter().find(|s| decode(s, layout).is_ok()) {
            result.best_state.clone_from(s);
        }
    }
    match decode(&result.best_state, layout) {
        Ok(p) => {
            result.validity = Some(validate(ds, &p, validation)?);
            result.decoded = Some(p);
            result.diagnosis = None;
        }
        Err(Error::NotStaircase(issues)) => {
            result.decoded = None;
            result.diagnosis = Some(issues);
        }
        Err(e) => return Err(e),
    }
    Ok(())
}

fn validation_for(layout: &VariableLayout, options: &SolveOptions) -> ValidationConfig {
    options.validation.clone().unwrap_or_else(|| ValidationConfig {
        cardinality_bounds: layout.thresholds().map(|t| (t.lower, t.upper)),
        ..Default::default()
    })
}

/// Composes the model, minimizes it, decodes the best state and checks every
/// constraint on the decoded partition.
pub fn solve_and_validate(
    ds: &Dataset,
    m: usize,
    weights: &PenaltyWeights,
    options: &SolveOptions,
) -> Result<SolveResult> {
    let start = Instant::now();
    let (layout, model) = build_model(ds, m, weights, options)?;
    let mut result = solve_built(ds, &layout, &model, options)?;
    result.wall_time = start.elapsed();
    Ok(result)
}

/// [`solve_and_validate`] for a model already built over `layout`, such as
/// one read back from a file.
pub fn solve_built(ds: &Dataset, layout: &VariableLayout, model: &QuboModel, options: &SolveOptions) -> Result<SolveResult> {
    let start = Instant::now();
    if model.dimension() != layout.total_variables() {
        return Err(Error::LayoutMismatch(format!(
            "model has {} variables but the layout needs {}",
            model.dimension(),
            layout.total_variables()
        )));
    }
    if layout.exact_monotonicity().is_some()
        && layout.total_variables() > EXACT_MONOTONICITY_CAP
        && !options.allow_large_exact_monotonicity
    {
        return Err(Error::TooLarge {
            variables: layout.total_variables(),
            states: format!("2^{}", layout.total_variables()),
            cap: EXACT_MONOTONICITY_CAP,
        });
    }
    let mut result = solve_model(model, Some(layout), options)?;
    if result.solver == SolverKind::Anneal && options.polish {
        let compiled = CompiledQubo::new(model);
        let start = project_to_staircase(&result.best_state, layout)?;
        let polished = polish_staircase(&compiled, layout, ds, &start)?;
        result.evaluations += polished.evaluations;
        if polished.energy <= result.best_energy {
            result.best_state = polished.state;
            result.best_energy = polished.energy;
        }
    }
    attach_outcome(&mut result, ds, layout, &validation_for(layout, options))?;
    result.wall_time = start.elapsed();
    Ok(result)
}

/// Staircase state for `p` with every auxiliary bit at its best value.
pub fn partition_to_state(layout: &VariableLayout, ds: &Dataset, p: &Partition) -> Result<Vec<bool>> {
    let mut state = layout.encode_partition(p)?;
    if layout.exact_monotonicity().is_some() {
        complete_exact_auxiliaries(layout, ds, &mut state)?;
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::preset_weights;

    // presets only make staircases optimal once n*m is large
    fn strong_uniqueness(mut w: PenaltyWeights) -> PenaltyWeights {
        w.mu01 *= 100.0;
        w
    }

    #[test]
    fn state_strings() {
        let s = vec![true, false, false, true];
        assert_eq!(state_to_string(&s), "1001");
        assert_eq!(state_from_string("1001\n").unwrap(), s);
        assert!(state_from_string("10x").is_err());
    }

    #[test]
    fn small_instance_takes_exact_path() {
        let ds = Dataset::from_default_positions(8, &[7, 8]).unwrap();
        let w = strong_uniqueness(preset_weights(1, 8, 3, 2).unwrap());
        let options = SolveOptions {
            compose: ComposeOptions {
                cardinality: false,
                ..Default::default()
            },
            ..Default::default()
        };
        let r = solve_and_validate(&ds, 3, &w, &options).unwrap();
        assert_eq!(r.solver, SolverKind::Exact);
        assert_eq!(r.best_state.len(), 24);
        let v = r.validity.unwrap();
        assert!(v.monotonicity);
        for s in r.minimizers.unwrap() {
            assert!(decode(&s, &VariableLayout::new(8, 3, &LayoutOptions::default()).unwrap()).is_ok());
        }
    }

    #[test]
    fn exact_monotonicity_gate() {
        let ds = Dataset::from_default_positions(5, &[2, 3]).unwrap();
        let w = preset_weights(1, 5, 3, 2).unwrap();
        let options = SolveOptions {
            compose: ComposeOptions {
                monotonicity: MonotonicityEncoding::Exact,
                cardinality: false,
                ..Default::default()
            },
            ..Default::default()
        };
        assert!(matches!(solve_and_validate(&ds, 3, &w, &options), Err(Error::TooLarge { .. })));
        let (layout, model) = build_model(&ds, 3, &w, &options).unwrap();
        assert_eq!(layout.total_variables(), 45);
        assert_eq!(model.dimension(), 45);
    }

    #[test]
    fn result_json_shape() {
        let ds = Dataset::from_default_positions(6, &[6]).unwrap();
        let w = strong_uniqueness(preset_weights(1, 6, 2, 1).unwrap());
        let options = SolveOptions {
            compose: ComposeOptions {
                cardinality: false,
                ..Default::default()
            },
            ..Default::default()
        };
        let r = solve_and_validate(&ds, 2, &w, &options).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json(false)).unwrap();
        assert_eq!(v["solver"], "exact");
        assert_eq!(v["state"].as_str().unwrap().len(), 12);
        assert!(v["energy"].is_f64());
        assert!(v["decoded"].is_array());
        assert!(v["validity"]["monotonicity"].is_boolean());
        assert!(v["wall_time_seconds"].is_f64());
    }
}
