//! Constrained brute-force search over all rating scales.

use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::scale::{
    grade_stats, herfindahl_adjusted_of, t_test_heterogeneity, z_test_homogeneity, HomogeneityConfig, Partition,
};

fn check_grades(n: usize, m: usize) -> Result<()> {
    if m < 2 || m > n {
        return Err(Error::InvalidArgument(format!("need 2 <= m <= n, got n={n}, m={m}")));
    }
    Ok(())
}

/// Number of rating scales of `n` counterparts into `m` grades, C(n-1, m-1).
pub fn count_configurations(n: usize, m: usize) -> Result<BigUint> {
    check_grades(n, m)?;
    let k = (m - 1).min(n - m);
    let mut c = BigUint::from(1u32);
    for i in 0..k {
        // c stays C(n-1, i+1) after each step, so the division is exact
        c = c * BigUint::from(n - 1 - i) / BigUint::from(i + 1);
    }
    Ok(c)
}

/// Compositions of `total` into `parts` positive parts, in lexicographic order.
#[derive(Debug, Clone)]
struct Compositions {
    current: Vec<usize>,
    started: bool,
    done: bool,
}

impl Compositions {
    fn new(total: usize, parts: usize) -> Self {
        let mut current = vec![1; parts];
        if let Some(last) = current.last_mut() {
            *last = total + 1 - parts;
        }
        Compositions {
            current,
            started: false,
            done: false,
        }
    }

    /// Moves to the next composition and returns it.
    fn next_slice(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if self.started && !self.advance() {
            self.done = true;
            return None;
        }
        self.started = true;
        Some(&self.current)
    }

    fn advance(&mut self) -> bool {
        let m = self.current.len();
        // rightmost non-final part that can grow by taking one from the tail
        let mut tail = self.current[m - 1];
        for k in (0..m - 1).rev() {
            if tail > m - 1 - k {
                self.current[k] += 1;
                for part in &mut self.current[k + 1..m - 1] {
                    *part = 1;
                }
                self.current[m - 1] = tail - 1 - (m - 2 - k);
                return true;
            }
            tail += self.current[k];
        }
        false
    }
}

/// Iterator over the partitions of `n` into `m` grades.
#[derive(Debug, Clone)]
pub struct Partitions(Compositions);

impl Iterator for Partitions {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        self.0
            .next_slice()
            .map(|c| Partition::new(c.to_vec()).expect("compositions into m >= 2 parts are partitions"))
    }
}

/// Every partition of `n` counterparts into `m` grades, in lexicographic order.
pub fn enumerate_partitions(n: usize, m: usize) -> Result<Partitions> {
    check_grades(n, m)?;
    Ok(Partitions(Compositions::new(n, m)))
}

/// Checks applied by [`brute_force_search`], in the order monotonicity,
/// heterogeneity, concentration, cardinality, homogeneity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BruteForceConfig {
    pub monotonicity: bool,
    /// Reject equal default rates in adjacent grades.
    pub strict_monotonicity: bool,
    pub heterogeneity_alpha: Option<f64>,
    pub concentration_threshold: Option<f64>,
    pub cardinality_bounds: Option<(usize, usize)>,
    pub homogeneity: Option<HomogeneityConfig>,
}

impl Default for BruteForceConfig {
    fn default() -> Self {
        BruteForceConfig {
            monotonicity: true,
            strict_monotonicity: false,
            heterogeneity_alpha: None,
            concentration_threshold: Some(0.05),
            cardinality_bounds: None,
            homogeneity: None,
        }
    }
}

impl BruteForceConfig {
    pub fn monotonicity_only() -> Self {
        BruteForceConfig {
            concentration_threshold: None,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRow {
    pub n: usize,
    pub m: usize,
    pub configurations: u64,
    pub valid_count: u64,
    pub elapsed_seconds: f64,
}

impl BenchmarkRow {
    pub fn elapsed(&self) -> Duration {
        Duration::from_secs_f64(self.elapsed_seconds)
    }
}

#[derive(Debug, Clone)]
pub struct BruteForceOutcome {
    /// Surviving partitions in lexicographic order.
    pub survivors: Vec<Partition>,
    pub row: BenchmarkRow,
}

struct Filter<'a> {
    ds: &'a Dataset,
    prefix: Vec<usize>,
    config: &'a BruteForceConfig,
}

impl Filter<'_> {
    fn accepts(&self, cards: &[usize]) -> Result<bool> {
        let n = self.ds.len();
        let c = self.config;
        if c.monotonicity {
            let mut start = 0;
            let mut prev: Option<(usize, usize)> = None;
            for &size in cards {
                let defaults = self.prefix[start + size] - self.prefix[start];
                if let Some((pd, pn)) = prev {
                    // D_prev / N_prev vs D / N by cross-multiplication
                    let (lhs, rhs) = (pd * size, defaults * pn);
                    if lhs > rhs || (c.strict_monotonicity && lhs == rhs) {
                        return Ok(false);
                    }
                }
                prev = Some((defaults, size));
                start += size;
            }
        }
        let needs_partition = c.heterogeneity_alpha.is_some() || c.homogeneity.is_some();
        let partition = if needs_partition {
            Some(Partition::new(cards.to_vec())?)
        } else {
            None
        };
        if let (Some(alpha), Some(p)) = (c.heterogeneity_alpha, &partition) {
            let stats = grade_stats(self.ds, p)?;
            for w in stats.windows(2) {
                let t = t_test_heterogeneity(&w[0], &w[1], alpha)?;
                if !(t.applicable && t.heterogeneous) {
                    return Ok(false);
                }
            }
        }
        if let Some(threshold) = c.concentration_threshold {
            if herfindahl_adjusted_of(cards, n) >= threshold {
                return Ok(false);
            }
        }
        if let Some((lo, hi)) = c.cardinality_bounds {
            if cards.iter().any(|&s| s < lo || s > hi) {
                return Ok(false);
            }
        }
        if let (Some(h), Some(p)) = (&c.homogeneity, &partition) {
            for grade in 0..p.grades() {
                let seed = h.seed.wrapping_add(grade as u64);
                match z_test_homogeneity(self.ds, p, grade, h.iterations, h.alpha, seed)? {
                    Some(test) if test.homogeneous => {}
                    _ => return Ok(false),
                }
            }
        }
        Ok(true)
    }
}

/// Enumerates every partition of the dataset into `m` grades and keeps those
/// passing all enabled checks; a failing check discards the partition
/// without running later ones.
///
/// The search is split by the size of the first grade across the rayon pool.
/// The reported time covers only the filtering loop.
pub fn brute_force_search(ds: &Dataset, m: usize, config: &BruteForceConfig) -> Result<BruteForceOutcome> {
    let n = ds.len();
    check_grades(n, m)?;
    let filter = Filter {
        ds,
        prefix: ds.default_prefix_sums(),
        config,
    };
    let start = Instant::now();
    let chunks: Vec<Result<(u64, Vec<Partition>)>> = (1..=n - m + 1)
        .into_par_iter()
        .map(|first| {
            let mut seen = 0u64;
            let mut kept = Vec::new();
            let mut cards = vec![first; m];
            let mut rest = Compositions::new(n - first, m - 1);
            while let Some(tail) = rest.next_slice() {
                cards[1..].copy_from_slice(tail);
                seen += 1;
                if filter.accepts(&cards)? {
                    kept.push(Partition::new(cards.clone())?);
                }
            }
            Ok((seen, kept))
        })
        .collect();
    let elapsed = start.elapsed();

    let mut configurations = 0;
    let mut survivors = Vec::new();
    for chunk in chunks {
        let (seen, kept) = chunk?;
        configurations += seen;
        survivors.extend(kept);
    }
    Ok(BruteForceOutcome {
        row: BenchmarkRow {
            n,
            m,
            configurations,
            valid_count: survivors.len() as u64,
            elapsed_seconds: elapsed.as_secs_f64(),
        },
        survivors,
    })
}

/// Writes rows as CSV with header `n,m,configurations,valid_count,elapsed_seconds`.
pub fn write_benchmark_csv<W: Write>(rows: &[BenchmarkRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|e| Error::InvalidArgument(format!("csv output failed: {e}")))?;
    }
    w.flush().map_err(|e| Error::io("<benchmark output>", e))?;
    Ok(())
}

pub fn save_benchmark_csv(rows: &[BenchmarkRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_benchmark_csv(rows, file)
}

/// Least-squares fit of `y = a x^b` on log-log axes.
pub fn fit_power_law_points(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    if points.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "power-law fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite())) {
        return Err(Error::InvalidArgument("power-law fit needs positive finite values".into()));
    }
    let k = points.len() as f64;
    let logs: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("power-law fit needs at least two distinct sizes".into()));
    }
    let b = sxy / sxx;
    Ok(((my - b * mx).exp(), b))
}

/// Fits `elapsed = a * configurations^b` to benchmark rows.
pub fn fit_power_law(rows: &[BenchmarkRow]) -> Result<(f64, f64)> {
    let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.configurations as f64, r.elapsed_seconds)).collect();
    fit_power_law_points(&points)
}
