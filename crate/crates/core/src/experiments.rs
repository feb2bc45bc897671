//! Validation studies: how well the soft monotonicity penalty picks monotone
//! scales, and end-to-end solves with the weight presets.

use std::fmt::{self, Write as _};
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baseline::{count_configurations, enumerate_partitions};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::qubo::{
    compose, preset_weights, ComposeOptions, LayoutOptions, LogicalEncoding, MonotonicityEncoding, PenaltyWeights,
    VariableLayout,
};
use crate::scale::{check_monotonicity, grade_stats, GradeStats, Partition};
use crate::solvers::{solve_and_validate, CompiledQubo, SolveOptions, SolveResult};

/// Largest number of scales [`monotonicity_confusion`] will enumerate.
pub const CONFUSION_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn actual_positives(&self) -> u64 {
        self.tp + self.fn_
    }

    fn add(&mut self, label: Label) {
        match label {
            Label::TP => self.tp += 1,
            Label::FP => self.fp += 1,
            Label::TN => self.tn += 1,
            Label::FN => self.fn_ += 1,
        }
    }
}

impl fmt::Display for ConfusionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "                 predicted +  predicted -")?;
        writeln!(f, "actual +  {:>12}  {:>11}", self.tp, self.fn_)?;
        write!(f, "actual -  {:>12}  {:>11}", self.fp, self.tn)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Label {
    TP,
    FP,
    TN,
    FN,
}

impl Label {
    fn of(actual: bool, predicted: bool) -> Self {
        match (actual, predicted) {
            (true, true) => Label::TP,
            (false, true) => Label::FP,
            (false, false) => Label::TN,
            (true, false) => Label::FN,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostHistogramRow {
    pub energy: f64,
    pub label: Label,
    pub partition: Partition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionOptions {
    pub logical: LogicalEncoding,
    /// Relative tolerance for counting a scale as tied with the minimum.
    pub tie_tolerance: f64,
    pub limit: u64,
}

impl Default for ConfusionOptions {
    fn default() -> Self {
        ConfusionOptions {
            logical: LogicalEncoding::Global,
            tie_tolerance: 1e-9,
            limit: CONFUSION_LIMIT,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfusionReport {
    pub matrix: ConfusionMatrix,
    pub minimum_energy: f64,
    pub minimizers: Vec<Partition>,
    /// One row per scale, in lexicographic order.
    pub rows: Vec<CostHistogramRow>,
}

/// Weights for the confusion study: the first preset for this instance.
pub fn confusion_weights(ds: &Dataset, m: usize) -> Result<PenaltyWeights> {
    preset_weights(1, ds.len(), m, ds.default_count())
}

/// Scores every rating scale with the logical plus soft monotonicity cost.
///
/// Actual positives are the monotone scales; predicted positives are the
/// scales at the minimum cost.
pub fn monotonicity_confusion(
    ds: &Dataset,
    m: usize,
    weights: &PenaltyWeights,
    options: &ConfusionOptions,
) -> Result<ConfusionReport> {
    let n = ds.len();
    let count = count_configurations(n, m)?;
    if count > options.limit.into() {
        return Err(Error::InvalidArgument(format!(
            "{count} scales exceed the enumeration limit of {}",
            options.limit
        )));
    }
    let layout = VariableLayout::new(n, m, &LayoutOptions::default())?;
    let compose_options = ComposeOptions {
        logical: Some(options.logical),
        monotonicity: MonotonicityEncoding::Approximate,
        concentration: false,
        cardinality: false,
    };
    let model = CompiledQubo::new(&compose(&layout, weights, ds, &compose_options)?);
    let partitions: Vec<Partition> = enumerate_partitions(n, m)?.collect();
    let scored: Vec<(f64, bool)> = partitions
        .par_iter()
        .map(|p| -> Result<(f64, bool)> {
            let energy = model.energy(&layout.encode_partition(p)?)?;
            Ok((energy, check_monotonicity(&grade_stats(ds, p)?)))
        })
        .collect::<Result<_>>()?;

    let minimum = scored.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let tie = options.tie_tolerance * minimum.abs().max(1.0);
    let mut matrix = ConfusionMatrix::default();
    let mut rows = Vec::with_capacity(partitions.len());
    let mut minimizers = Vec::new();
    for (p, (energy, actual)) in partitions.into_iter().zip(scored) {
        let predicted = energy <= minimum + tie;
        let label = Label::of(actual, predicted);
        matrix.add(label);
        if predicted {
            minimizers.push(p.clone());
        }
        rows.push(CostHistogramRow {
            energy,
            label,
            partition: p,
        });
    }
    Ok(ConfusionReport {
        matrix,
        minimum_energy: minimum,
        minimizers,
        rows,
    })
}

/// Histogram rows as CSV with header `energy,label`.
pub fn write_histogram_csv<W: Write>(rows: &[CostHistogramRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let fail = |e: csv::Error| Error::InvalidArgument(format!("csv output failed: {e}"));
    w.write_record(["energy", "label"]).map_err(fail)?;
    for row in rows {
        w.write_record([row.energy.to_string(), row.label.to_string()]).map_err(fail)?;
    }
    w.flush().map_err(|e| Error::io("<histogram output>", e))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradeRow {
    pub grade: usize,
    pub cardinality: usize,
    pub defaults: usize,
    pub default_rate: f64,
}

impl GradeRow {
    pub fn table(stats: &[GradeStats]) -> Vec<GradeRow> {
        stats
            .iter()
            .enumerate()
            .map(|(j, s)| GradeRow {
                grade: j + 1,
                cardinality: s.cardinality,
                defaults: s.default_count,
                default_rate: s.default_rate,
            })
            .collect()
    }
}

/// Aligned text rendering of a grade table.
pub fn grade_table_text(rows: &[GradeRow]) -> String {
    let mut out = String::from("grade  cardinality  defaults  default rate\n");
    for r in rows {
        let _ = writeln!(out, "{:>5}  {:>11}  {:>8}  {:>12.6}", r.grade, r.cardinality, r.defaults, r.default_rate);
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct PresetReport {
    pub n: usize,
    pub m: usize,
    pub preset: u8,
    pub weights: PenaltyWeights,
    pub grades: Option<Vec<GradeRow>>,
    pub result: SolveResult,
}

/// Builds the model with a weight preset, solves it and tabulates the grades.
pub fn run_preset_experiment(
    n: usize,
    m: usize,
    default_positions: &[usize],
    preset: u8,
    options: &SolveOptions,
) -> Result<PresetReport> {
    let ds = Dataset::from_default_positions(n, default_positions)?;
    let weights = preset_weights(preset, n, m, ds.default_count())?;
    let result = solve_and_validate(&ds, m, &weights, options)?;
    let grades = match &result.decoded {
        Some(p) => Some(GradeRow::table(&grade_stats(&ds, p)?)),
        None => None,
    };
    Ok(PresetReport {
        n,
        m,
        preset,
        weights,
        grades,
        result,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RuntimeEstimate {
    pub log10_configurations: f64,
    pub log10_seconds: f64,
    /// Infinite when beyond the range of f64.
    pub seconds: f64,
    pub days: f64,
}

/// Brute-force runtime `a * C(n-1, m-1)^b`, computed in log space.
pub fn extrapolate_runtime(a: f64, b: f64, n: usize, m: usize) -> Result<RuntimeEstimate> {
    if !(a > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidArgument(format!("need a > 0 and finite b, got a={a}, b={b}")));
    }
    if m < 2 || m > n {
        return Err(Error::InvalidArgument(format!("need 2 <= m <= n, got n={n}, m={m}")));
    }
    let k = (m - 1).min(n - m);
    let ln_c: f64 = (0..k).map(|i| ((n - 1 - i) as f64 / (i + 1) as f64).ln()).sum();
    let ln_seconds = a.ln() + b * ln_c;
    let seconds = ln_seconds.exp();
    Ok(RuntimeEstimate {
        log10_configurations: ln_c / std::f64::consts::LN_10,
        log10_seconds: ln_seconds / std::f64::consts::LN_10,
        seconds,
        days: seconds / 86_400.0,
    })
}
