use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use gradequbo::baseline::{
    brute_force_search, count_configurations, enumerate_partitions, fit_power_law, write_benchmark_csv,
    BruteForceConfig,
};
use gradequbo::experiments::{
    confusion_weights, grade_table_text, monotonicity_confusion, write_histogram_csv, ConfusionOptions, GradeRow,
};
use gradequbo::qubo::{compose, default_thresholds, preset_weights, ComposeOptions, VariableLayout};
use gradequbo::scale::{grade_stats, validate, HomogeneityConfig, Partition, ValidationConfig};
use gradequbo::solvers::{
    solve_built, AnnealOptions, Schedule, SolveOptions, SolveResult,
};
use gradequbo::{Dataset, QuboModel};

use crate::args::*;

pub fn execute(config: &RunConfig) -> Result<()> {
    let pretty = config.run.pretty;
    match &config.command {
        Command::Generate(a) => generate(a),
        Command::Enumerate(a) => enumerate(a),
        Command::Build(a) => build(a, pretty),
        Command::Solve(a) => solve(a, pretty),
        Command::Confusion(a) => confusion(a, pretty),
        Command::Benchmark(a) => benchmark(a, pretty),
        Command::Validate(a) => validate_scale(a, pretty),
        Command::Replay(_) => bail!("a saved configuration cannot itself be a replay"),
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn print_json<T: Serialize>(value: &T, pretty: bool) -> Result<()> {
    let text = if pretty {
        serde_json::to_string_pretty(value)?
    } else {
        serde_json::to_string(value)?
    };
    println!("{text}");
    Ok(())
}

fn load_dataset(a: &DatasetArgs) -> Result<Dataset> {
    Ok(match (&a.dataset, a.n) {
        (Some(path), _) => Dataset::load(path)?,
        (None, Some(n)) => Dataset::from_default_positions(n, &a.defaults)?,
        (None, None) => bail!("either --dataset or --n is required"),
    })
}

fn compose_options(a: &ModelArgs) -> ComposeOptions {
    ComposeOptions {
        logical: Some(a.logical.into()),
        monotonicity: a.monotonicity(),
        concentration: !a.no_concentration,
        cardinality: !a.no_thresholds,
    }
}

fn generate(a: &GenerateArgs) -> Result<()> {
    let ds = Dataset::generate(a.n, a.default_fraction, a.seed)?;
    match &a.out {
        Some(path) => ds.save(path)?,
        None => ds.write_csv(io::stdout().lock())?,
    }
    Ok(())
}

fn enumerate(a: &EnumerateArgs) -> Result<()> {
    let count = count_configurations(a.n, a.m)?;
    if a.count_only {
        println!("{count}");
        return Ok(());
    }
    if count > a.limit.into() {
        bail!("{count} scales exceed --limit {}", a.limit);
    }
    let mut out = output(None)?;
    for p in enumerate_partitions(a.n, a.m)? {
        writeln!(out, "{p}")?;
    }
    Ok(())
}

#[derive(Serialize)]
struct BuildSummary {
    n: usize,
    m: usize,
    defaults: usize,
    dimension: usize,
    assignment_variables: usize,
    nonzeros: usize,
    lower: Option<usize>,
    upper: Option<usize>,
}

fn build_layout(ds: &Dataset, a: &ModelArgs) -> Result<(SolveOptions, VariableLayout)> {
    let options = SolveOptions {
        compose: compose_options(a),
        lower: a.lower,
        upper: a.upper,
        ..Default::default()
    };
    let layout = VariableLayout::new(ds.len(), a.m, &options.layout_options(ds))?;
    Ok((options, layout))
}

fn build_model(ds: &Dataset, a: &ModelArgs) -> Result<(SolveOptions, VariableLayout, QuboModel)> {
    let (options, layout) = build_layout(ds, a)?;
    let weights = preset_weights(a.preset, ds.len(), a.m, ds.default_count())?;
    let model = compose(&layout, &weights, ds, &options.compose)?;
    Ok((options, layout, model))
}

fn build(a: &BuildArgs, pretty: bool) -> Result<()> {
    let ds = load_dataset(&a.dataset)?;
    let (_, layout, model) = build_model(&ds, &a.model)?;
    let summary = BuildSummary {
        n: ds.len(),
        m: a.model.m,
        defaults: ds.default_count(),
        dimension: model.dimension(),
        assignment_variables: layout.assignment_variables(),
        nonzeros: model.nonzeros(),
        lower: layout.thresholds().map(|t| t.lower),
        upper: layout.thresholds().map(|t| t.upper),
    };
    match &a.out {
        Some(path) => {
            model.export(path)?;
            if pretty {
                eprintln!(
                    "wrote {} ({} variables, {} nonzero terms)",
                    path.display(),
                    summary.dimension,
                    summary.nonzeros
                );
            } else {
                print_json(&summary, false)?;
            }
        }
        None => print!("{}", model.to_text()),
    }
    Ok(())
}

fn solve(a: &SolveArgs, pretty: bool) -> Result<()> {
    let ds = load_dataset(&a.dataset)?;
    let (mut options, layout, model) = match &a.model_file {
        Some(path) => {
            let (options, layout) = build_layout(&ds, &a.model)?;
            (options, layout, QuboModel::import(path)?)
        }
        None => build_model(&ds, &a.model)?,
    };
    options.solver = a.solver.into();
    options.exact_cap = a.exact_cap;
    options.group_moves = !a.no_group_moves;
    options.polish = !a.no_polish;
    options.allow_large_exact_monotonicity = a.allow_large_exact;
    options.anneal = AnnealOptions {
        schedule: match a.schedule {
            ScheduleArg::Auto => Schedule::Auto,
            ScheduleArg::Span => Schedule::CoefficientSpan,
            ScheduleArg::Explicit => Schedule::Explicit {
                t_start: a.t_start.context("--t-start is required")?,
                t_end: a.t_end.context("--t-end is required")?,
            },
        },
        sweeps: a.sweeps,
        restarts: a.restarts,
        seed: a.seed,
        swap_groups: Vec::new(),
    };
    options.validation = Some(ValidationConfig {
        cardinality_bounds: layout.thresholds().map(|t| (t.lower, t.upper)),
        homogeneity: Some(HomogeneityConfig {
            seed: a.seed,
            ..Default::default()
        }),
        ..Default::default()
    });
    let result = solve_built(&ds, &layout, &model, &options)?;
    if let Some(path) = &a.out {
        let mut out = output(Some(path))?;
        writeln!(out, "{}", result.to_json(pretty))?;
    } else if pretty {
        print!("{}", solve_text(&ds, &result)?);
    } else {
        println!("{}", result.to_json(false));
    }
    Ok(())
}

fn solve_text(ds: &Dataset, r: &SolveResult) -> Result<String> {
    let mut out = format!(
        "solver: {:?}\nenergy: {}\nwall time: {:.3} s\n",
        r.solver,
        r.best_energy,
        r.wall_time.as_secs_f64()
    );
    match (&r.decoded, &r.validity) {
        (Some(p), Some(v)) => {
            out += &grade_table_text(&GradeRow::table(&grade_stats(ds, p)?));
            out += &format!(
                "monotonicity: {}\nconcentration: {} (H_adj {:.6})\ncardinality: {}\n",
                v.monotonicity,
                v.concentration,
                v.herfindahl_adjusted,
                v.cardinality.map_or("not checked".to_string(), |c| c.to_string())
            );
        }
        _ => {
            out += "not a staircase:\n";
            for issue in r.diagnosis.iter().flatten() {
                out += &format!("  {issue}\n");
            }
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct ConfusionSummary<'a> {
    matrix: gradequbo::experiments::ConfusionMatrix,
    minimum_energy: f64,
    minimizers: &'a [Partition],
    scales: usize,
}

fn confusion(a: &ConfusionArgs, pretty: bool) -> Result<()> {
    let ds = load_dataset(&a.dataset)?;
    let mut weights = confusion_weights(&ds, a.m)?;
    if let Some(ratio) = a.ratio {
        if !(ratio.is_finite() && ratio > 0.0) {
            bail!("--ratio must be positive, got {ratio}");
        }
        weights.mu1 = weights.mu03 / ratio;
    }
    let options = ConfusionOptions {
        logical: a.logical.into(),
        ..Default::default()
    };
    let report = monotonicity_confusion(&ds, a.m, &weights, &options)?;
    if let Some(path) = &a.histogram {
        write_histogram_csv(&report.rows, output(Some(path))?)?;
    }
    if pretty {
        println!("{}", report.matrix);
        let minimizers: Vec<String> = report.minimizers.iter().map(|p| p.to_string()).collect();
        println!("minimum energy {} at {}", report.minimum_energy, minimizers.join("; "));
    } else {
        print_json(
            &ConfusionSummary {
                matrix: report.matrix,
                minimum_energy: report.minimum_energy,
                minimizers: &report.minimizers,
                scales: report.rows.len(),
            },
            false,
        )?;
    }
    Ok(())
}

fn parse_size(text: &str) -> Result<(usize, usize)> {
    let (n, m) = text
        .split_once(':')
        .with_context(|| format!("size `{text}` is not of the form n:m"))?;
    Ok((
        n.trim().parse().with_context(|| format!("bad n in `{text}`"))?,
        m.trim().parse().with_context(|| format!("bad m in `{text}`"))?,
    ))
}

fn benchmark(a: &BenchmarkArgs, pretty: bool) -> Result<()> {
    let config = if a.monotonicity_only {
        BruteForceConfig::monotonicity_only()
    } else {
        BruteForceConfig::default()
    };
    let mut rows = Vec::new();
    for size in &a.sizes {
        let (n, m) = parse_size(size)?;
        let ds = Dataset::generate(n, a.default_fraction, a.seed)?;
        rows.push(brute_force_search(&ds, m, &config)?.row);
    }
    write_benchmark_csv(&rows, output(a.out.as_deref())?)?;
    if a.fit {
        let (coef, exponent) = fit_power_law(&rows)?;
        if pretty {
            eprintln!("t = {coef:.6e} * C^{exponent:.6}");
        } else {
            eprintln!("{}", serde_json::json!({ "a": coef, "b": exponent }));
        }
    }
    Ok(())
}

fn validate_scale(a: &ValidateArgs, pretty: bool) -> Result<()> {
    let ds = load_dataset(&a.dataset)?;
    let p: Partition = a.partition.parse()?;
    let (l, u) = default_thresholds(ds.len());
    let bounds = Some((a.lower.unwrap_or(l), a.upper.unwrap_or(u)));
    let config = ValidationConfig {
        concentration_threshold: a.concentration_threshold,
        cardinality_bounds: bounds,
        heterogeneity_alpha: Some(a.alpha),
        homogeneity: Some(HomogeneityConfig {
            iterations: a.homogeneity_iterations,
            seed: a.seed,
            ..Default::default()
        }),
    };
    let report = validate(&ds, &p, &config)?;
    if pretty {
        print!("{}", grade_table_text(&GradeRow::table(&grade_stats(&ds, &p)?)));
        println!("monotonicity: {}", report.monotonicity);
        println!("concentration: {} (H_adj {:.6})", report.concentration, report.herfindahl_adjusted);
        println!("cardinality: {:?}", report.cardinality);
        println!("heterogeneity: {:?}", report.heterogeneity);
        println!("homogeneity: {:?}", report.homogeneity);
    } else {
        print_json(&report, false)?;
    }
    Ok(())
}
