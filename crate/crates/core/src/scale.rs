//! Rating-scale partitions, grade statistics and the classical constraint
//! checks (monotonicity, heterogeneity, concentration, cardinality,
//! homogeneity).

use std::fmt;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// Minimum sample size for the normal approximation of the t and z tests.
pub const MIN_TEST_SAMPLE: usize = 30;

/// Contiguous grade sizes N_1..N_m of a score-ordered population.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Partition(Vec<usize>);

impl Partition {
    pub fn new(cardinalities: Vec<usize>) -> Result<Self> {
        if cardinalities.len() < 2 {
            return Err(Error::InvalidPartition(format!(
                "need at least 2 grades, got {}",
                cardinalities.len()
            )));
        }
        if let Some(j) = cardinalities.iter().position(|&c| c == 0) {
            return Err(Error::InvalidPartition(format!("grade {} is empty", j + 1)));
        }
        Ok(Partition(cardinalities))
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.0
    }

    pub fn grades(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    /// Half-open index ranges of each grade over the counterpart sequence.
    pub fn ranges(&self) -> impl Iterator<Item = std::ops::Range<usize>> + '_ {
        self.0.iter().scan(0, |start, &c| {
            let r = *start..*start + c;
            *start += c;
            Some(r)
        })
    }

    /// Grade (0-based) of every counterpart, in order.
    pub fn assignment(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(j, &c)| std::iter::repeat(j).take(c))
            .collect()
    }
}

impl TryFrom<Vec<usize>> for Partition {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Partition::new(v)
    }
}

impl From<Partition> for Vec<usize> {
    fn from(p: Partition) -> Self {
        p.0
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidPartition(format!("bad cardinality `{t}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Partition::new(parts)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradeStats {
    pub cardinality: usize,
    pub default_count: usize,
    pub default_rate: f64,
}

impl GradeStats {
    pub fn new(cardinality: usize, default_count: usize) -> Result<Self> {
        if cardinality == 0 || default_count > cardinality {
            return Err(Error::InvalidArgument(format!(
                "grade with {default_count} defaults out of {cardinality}"
            )));
        }
        Ok(GradeStats {
            cardinality,
            default_count,
            default_rate: default_count as f64 / cardinality as f64,
        })
    }

    /// Binomial variance of the default indicator, l (1 - l).
    pub fn variance(&self) -> f64 {
        self.default_rate * (1.0 - self.default_rate)
    }
}

fn check_sizes(ds: &Dataset, p: &Partition) -> Result<()> {
    if p.total() != ds.len() {
        return Err(Error::InvalidPartition(format!(
            "partition covers {} counterparts, dataset has {}",
            p.total(),
            ds.len()
        )));
    }
    Ok(())
}

/// Cardinality, default count and default rate of every grade.
pub fn grade_stats(ds: &Dataset, p: &Partition) -> Result<Vec<GradeStats>> {
    check_sizes(ds, p)?;
    let prefix = ds.default_prefix_sums();
    p.ranges()
        .map(|r| GradeStats::new(r.len(), prefix[r.end] - prefix[r.start]))
        .collect()
}

/// Herfindahl index of the grade shares, sum of (N_j / n)^2.
pub fn herfindahl(p: &Partition) -> f64 {
    let n = p.total() as f64;
    p.cardinalities().iter().map(|&c| (c as f64 / n).powi(2)).sum()
}

/// Adjusted Herfindahl index (H - 1/m) / (1 - 1/m), in [0, 1].
pub fn herfindahl_adjusted(p: &Partition) -> f64 {
    herfindahl_adjusted_of(p.cardinalities(), p.total())
}

pub(crate) fn herfindahl_adjusted_of(cardinalities: &[usize], n: usize) -> f64 {
    let n = n as u128;
    let m = cardinalities.len() as u128;
    // m * sum(N^2) - n^2 over (m - 1) n^2, exact in integers up to the final division
    let sum_sq: u128 = cardinalities.iter().map(|&c| (c as u128) * (c as u128)).sum();
    let num = m * sum_sq - n * n;
    num as f64 / ((m - 1) * n * n) as f64
}

/// Non-strict monotonicity: l_j <= l_{j+1} for every adjacent pair.
pub fn check_monotonicity(stats: &[GradeStats]) -> bool {
    // compare D_j / N_j <= D_{j+1} / N_{j+1} by cross-multiplication
    stats
        .windows(2)
        .all(|w| w[0].default_count * w[1].cardinality <= w[1].default_count * w[0].cardinality)
}

pub fn check_cardinality(p: &Partition, lower: usize, upper: usize) -> bool {
    p.cardinalities().iter().all(|&c| lower <= c && c <= upper)
}

/// True when the adjusted Herfindahl index is strictly below `threshold`.
pub fn check_concentration(p: &Partition, threshold: f64) -> bool {
    herfindahl_adjusted(p) < threshold
}

fn standard_normal() -> Normal {
    Normal::standard()
}

/// Two-tailed critical value G^-1((2 - alpha) / 2) of the standard normal.
pub fn two_tailed_critical_value(alpha: f64) -> f64 {
    standard_normal().inverse_cdf((2.0 - alpha) / 2.0)
}

/// Two-tailed probability 2 - 2 G(|z|).
pub fn two_tailed_probability(z: f64) -> f64 {
    2.0 - 2.0 * standard_normal().cdf(z.abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeterogeneityTest {
    /// `None` when the pooled deviation is zero.
    pub t: Option<f64>,
    pub applicable: bool,
    pub heterogeneous: bool,
}

/// t-test separation between two consecutive grades.
///
/// The test applies when both grades hold at least 30 counterparts and the
/// ratio of their binomial deviations lies strictly within (1/2, 2).
pub fn t_test_heterogeneity(a: &GradeStats, b: &GradeStats, alpha: f64) -> Result<HeterogeneityTest> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha {alpha} outside (0, 1)")));
    }
    let (na, nb) = (a.cardinality as f64, b.cardinality as f64);
    let pooled_var = ((na - 1.0) * a.variance() + (nb - 1.0) * b.variance()) / (na + nb - 2.0);
    let t = (pooled_var > 0.0 && pooled_var.is_finite())
        .then(|| (a.default_rate - b.default_rate) / (pooled_var.sqrt() * (1.0 / na + 1.0 / nb).sqrt()));

    let (sa, sb) = (a.variance().sqrt(), b.variance().sqrt());
    let ratio_ok = sb > 0.0 && {
        let r = sa / sb;
        0.5 < r && r < 2.0
    };
    let applicable =
        t.is_some() && a.cardinality >= MIN_TEST_SAMPLE && b.cardinality >= MIN_TEST_SAMPLE && ratio_ok;
    let heterogeneous = applicable && t.is_some_and(|t| t.abs() >= two_tailed_critical_value(alpha));
    Ok(HeterogeneityTest {
        t,
        applicable,
        heterogeneous,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomogeneityTest {
    pub pass_fraction: f64,
    pub homogeneous: bool,
}

/// z-test closeness of random complementary halves of one grade.
///
/// Each iteration draws a split size uniformly from [30, N_j - 30] and a
/// uniform random subset of that size. The grade is homogeneous when every
/// split's two-tailed probability is at least `alpha`. Returns `None` when the
/// grade is smaller than 60 counterparts.
pub fn z_test_homogeneity(
    ds: &Dataset,
    p: &Partition,
    grade: usize,
    iterations: usize,
    alpha: f64,
    seed: u64,
) -> Result<Option<HomogeneityTest>> {
    check_sizes(ds, p)?;
    if grade >= p.grades() {
        return Err(Error::InvalidArgument(format!(
            "grade {grade} out of range for {} grades",
            p.grades()
        )));
    }
    if iterations == 0 {
        return Err(Error::InvalidArgument("homogeneity test needs at least one iteration".into()));
    }
    let range = p.ranges().nth(grade).expect("grade index checked");
    let size = range.len();
    if size < 2 * MIN_TEST_SAMPLE {
        return Ok(None);
    }
    let members = &ds.defaults()[range];
    let total_defaults = members.iter().filter(|&&d| d).count();
    let pooled = total_defaults as f64 / size as f64;
    let spread = pooled * (1.0 - pooled);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut passes = 0;
    for _ in 0..iterations {
        let first = rng.random_range(MIN_TEST_SAMPLE..=size - MIN_TEST_SAMPLE);
        let second = size - first;
        let first_defaults = sample(&mut rng, size, first).iter().filter(|&k| members[k]).count();
        let z = if spread > 0.0 {
            let l1 = first_defaults as f64 / first as f64;
            let l2 = (total_defaults - first_defaults) as f64 / second as f64;
            (l1 - l2) / (spread * (1.0 / first as f64 + 1.0 / second as f64)).sqrt()
        } else {
            0.0
        };
        if two_tailed_probability(z) >= alpha {
            passes += 1;
        }
    }
    Ok(Some(HomogeneityTest {
        pass_fraction: passes as f64 / iterations as f64,
        homogeneous: passes == iterations,
    }))
}

/// Thresholds and switches for [`validate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationConfig {
    /// Upper bound (exclusive) on the adjusted Herfindahl index.
    pub concentration_threshold: f64,
    /// Inclusive grade size bounds; `None` skips the check.
    pub cardinality_bounds: Option<(usize, usize)>,
    /// Significance level of the heterogeneity t-test; `None` skips it.
    pub heterogeneity_alpha: Option<f64>,
    /// Homogeneity z-test settings; `None` skips it.
    pub homogeneity: Option<HomogeneityConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HomogeneityConfig {
    pub iterations: usize,
    pub alpha: f64,
    pub seed: u64,
}

impl Default for HomogeneityConfig {
    fn default() -> Self {
        HomogeneityConfig {
            iterations: 500,
            alpha: 0.05,
            seed: 0,
        }
    }
}

impl Default for ValidationConfig {
    fn default() -> Self {
        ValidationConfig {
            concentration_threshold: 0.05,
            cardinality_bounds: None,
            heterogeneity_alpha: Some(0.01),
            homogeneity: Some(HomogeneityConfig::default()),
        }
    }
}

impl ValidationConfig {
    /// Defaults plus the 1% / 15% cardinality bounds for a population of `n`.
    pub fn for_population(n: usize) -> Self {
        ValidationConfig {
            cardinality_bounds: Some(crate::qubo::default_thresholds(n)),
            ..Default::default()
        }
    }
}

/// Outcome of every constraint check for one partition.
///
/// Statistical checks are `None` when their sample-size preconditions do not
/// hold for some grade (and no applicable grade failed) or when disabled.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub monotonicity: bool,
    pub concentration: bool,
    /// `None` when no bounds were configured.
    pub cardinality: Option<bool>,
    pub heterogeneity: Option<bool>,
    pub homogeneity: Option<bool>,
    pub herfindahl_adjusted: f64,
    pub concentration_threshold: f64,
    pub cardinality_bounds: Option<(usize, usize)>,
    pub default_rates: Vec<f64>,
    /// One entry per adjacent grade pair.
    pub t_statistics: Vec<HeterogeneityTest>,
    /// One entry per grade; `None` for grades too small to split.
    pub homogeneity_pass_fractions: Vec<Option<f64>>,
}

impl ValidityReport {
    /// True when the three encoded financial constraints hold.
    pub fn encoded_constraints_hold(&self) -> bool {
        self.monotonicity && self.concentration && self.cardinality.unwrap_or(true)
    }
}

/// Folds per-item outcomes: any failure fails, otherwise any inapplicable item
/// makes the whole check inapplicable.
fn fold_outcomes(items: impl IntoIterator<Item = Option<bool>>) -> Option<bool> {
    let mut all_applicable = true;
    for item in items {
        match item {
            Some(false) => return Some(false),
            None => all_applicable = false,
            Some(true) => {}
        }
    }
    all_applicable.then_some(true)
}

/// Runs every constraint check on `p`.
pub fn validate(ds: &Dataset, p: &Partition, config: &ValidationConfig) -> Result<ValidityReport> {
    let stats = grade_stats(ds, p)?;
    let h_adj = herfindahl_adjusted(p);

    let mut t_statistics = Vec::new();
    let heterogeneity = match config.heterogeneity_alpha {
        Some(alpha) => {
            for w in stats.windows(2) {
                t_statistics.push(t_test_heterogeneity(&w[0], &w[1], alpha)?);
            }
            fold_outcomes(t_statistics.iter().map(|t| t.applicable.then_some(t.heterogeneous)))
        }
        None => None,
    };

    let mut homogeneity_pass_fractions = Vec::new();
    let homogeneity = match &config.homogeneity {
        Some(h) => {
            let mut outcomes = Vec::new();
            for grade in 0..p.grades() {
                let seed = h.seed.wrapping_add(grade as u64);
                let test = z_test_homogeneity(ds, p, grade, h.iterations, h.alpha, seed)?;
                homogeneity_pass_fractions.push(test.as_ref().map(|t| t.pass_fraction));
                outcomes.push(test.map(|t| t.homogeneous));
            }
            fold_outcomes(outcomes)
        }
        None => None,
    };

    Ok(ValidityReport {
        monotonicity: check_monotonicity(&stats),
        concentration: h_adj < config.concentration_threshold,
        cardinality: config.cardinality_bounds.map(|(lo, hi)| check_cardinality(p, lo, hi)),
        heterogeneity,
        homogeneity,
        herfindahl_adjusted: h_adj,
        concentration_threshold: config.concentration_threshold,
        cardinality_bounds: config.cardinality_bounds,
        default_rates: stats.iter().map(|s| s.default_rate).collect(),
        t_statistics,
        homogeneity_pass_fractions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const SET1_DEFAULTS: [usize; 6] = [115, 131, 133, 147, 149, 150];
    const SET2_DEFAULTS: [usize; 18] = [
        56, 63, 91, 96, 104, 106, 107, 113, 119, 122, 126, 127, 129, 133, 135, 144, 146, 149,
    ];

    fn part(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    fn stats(pairs: &[(usize, usize)]) -> Vec<GradeStats> {
        pairs.iter().map(|&(n, d)| GradeStats::new(n, d).unwrap()).collect()
    }

    #[test]
    fn partition_rejects_degenerate_input() {
        assert!(Partition::new(vec![5]).is_err());
        assert!(Partition::new(vec![3, 0, 2]).is_err());
        assert!("3,4".parse::<Partition>().is_ok());
        assert!("3,x".parse::<Partition>().is_err());
    }

    #[test]
    fn set1_last_grade_stats() {
        let ds = Dataset::from_default_positions(150, &SET1_DEFAULTS).unwrap();
        let p = part(&[16, 16, 16, 16, 17, 17, 17, 17, 18]);
        let s = grade_stats(&ds, &p).unwrap();
        assert_eq!(s[8].cardinality, 18);
        assert_eq!(s[8].default_count, 4);
        assert!((s[8].default_rate - 0.222222).abs() < 1e-6);
        assert_eq!(s.iter().map(|g| g.default_count).sum::<usize>(), 6);
        let rates: Vec<f64> = s.iter().map(|g| g.default_rate).collect();
        assert!((rates[6] - 0.058824).abs() < 1e-6);
        assert!((rates[7] - 0.058824).abs() < 1e-6);
        assert!(check_monotonicity(&s));
    }

    #[test]
    fn grade_stats_edge_cases() {
        let ds = Dataset::from_default_positions(6, &[]).unwrap();
        let s = grade_stats(&ds, &part(&[2, 4])).unwrap();
        assert!(s.iter().all(|g| g.default_rate == 0.0));

        let ds = Dataset::from_default_positions(6, &[5, 6]).unwrap();
        let s = grade_stats(&ds, &part(&[2, 4])).unwrap();
        assert_eq!(s[1].default_rate, 2.0 / 4.0);

        assert!(grade_stats(&ds, &part(&[2, 3])).is_err());
    }

    #[test]
    fn herfindahl_values() {
        assert_eq!(herfindahl_adjusted(&part(&[5, 5, 5])), 0.0);
        assert!((herfindahl(&part(&[9, 1])) - 0.82).abs() < 1e-15);
        assert!((herfindahl_adjusted(&part(&[9, 1])) - 0.64).abs() < 1e-15);
        // 16,16,16,16,17,17,17,17,18: (9 * 2504 - 22500) / (8 * 22500) = 36 / 180000
        let h = herfindahl_adjusted(&part(&[16, 16, 16, 16, 17, 17, 17, 17, 18]));
        assert!((h - 2.0e-4).abs() < 1e-15, "{h}");
    }

    #[test]
    fn monotonicity_examples() {
        assert!(check_monotonicity(&stats(&[(20, 0), (20, 1), (7, 1), (16, 5)])));
        assert!(!check_monotonicity(&stats(&[(20, 2), (20, 1)])));
        // equal adjacent rates are allowed
        assert!(check_monotonicity(&stats(&[(17, 1), (17, 1)])));
    }

    #[test]
    fn cardinality_examples() {
        let t4 = part(&[16, 16, 16, 16, 17, 17, 17, 17, 18]);
        assert!(check_cardinality(&t4, 1, 23));
        assert!(check_cardinality(&part(&[1, 8, 3]), 0, 12));
        assert!(!check_cardinality(&part(&[30, 5]), 10, 35));
    }

    #[test]
    fn concentration_examples() {
        assert!(check_concentration(&part(&[4, 4, 4]), 1e-9));
        assert!(!check_concentration(&part(&[9, 1]), 0.05));
        assert!(check_concentration(&part(&[16, 16, 16, 16, 17, 17, 17, 17, 18]), 0.05));
    }

    #[test]
    fn t_test_identical_grades() {
        let a = GradeStats::new(50, 5).unwrap();
        let r = t_test_heterogeneity(&a, &a, 0.01).unwrap();
        assert_eq!(r.t, Some(0.0));
        assert!(r.applicable);
        assert!(!r.heterogeneous);
    }

    #[test]
    fn t_test_small_grades_not_applicable() {
        let a = GradeStats::new(20, 2).unwrap();
        let b = GradeStats::new(40, 6).unwrap();
        assert!(!t_test_heterogeneity(&a, &b, 0.01).unwrap().applicable);
    }

    #[test]
    fn t_test_zero_pooled_variance_not_applicable() {
        let a = GradeStats::new(40, 0).unwrap();
        let b = GradeStats::new(40, 40).unwrap();
        let r = t_test_heterogeneity(&a, &b, 0.01).unwrap();
        assert_eq!(r.t, None);
        assert!(!r.applicable && !r.heterogeneous);
    }

    #[test]
    fn t_test_separated_grades() {
        // Frozen from an independent evaluation (scipy.stats.norm):
        // pooled sd = sqrt((99*0.0475 + 99*0.16) / 198), t = -0.15 / (sd * sqrt(0.02)),
        // gamma = norm.ppf(0.995)
        let a = GradeStats::new(100, 5).unwrap();
        let b = GradeStats::new(100, 20).unwrap();
        let r = t_test_heterogeneity(&a, &b, 0.01).unwrap();
        assert!((r.t.unwrap() - (-3.2929277996907107)).abs() < 1e-12);
        assert!((two_tailed_critical_value(0.01) - 2.5758293035489004).abs() < 1e-9);
        assert!(r.applicable && r.heterogeneous);
    }

    #[test]
    fn t_test_rejects_bad_alpha() {
        let a = GradeStats::new(100, 5).unwrap();
        assert!(t_test_heterogeneity(&a, &a, 0.0).is_err());
        assert!(t_test_heterogeneity(&a, &a, 1.0).is_err());
    }

    #[test]
    fn z_test_zero_defaults_is_homogeneous() {
        let ds = Dataset::from_default_positions(130, &[]).unwrap();
        let p = part(&[70, 60]);
        let r = z_test_homogeneity(&ds, &p, 0, 50, 0.05, 3).unwrap().unwrap();
        assert_eq!(r.pass_fraction, 1.0);
        assert!(r.homogeneous);
    }

    #[test]
    fn z_test_small_grade_not_applicable() {
        let ds = Dataset::from_default_positions(100, &[3]).unwrap();
        let p = part(&[59, 41]);
        assert_eq!(z_test_homogeneity(&ds, &p, 0, 10, 0.05, 0).unwrap(), None);
        assert!(z_test_homogeneity(&ds, &p, 2, 10, 0.05, 0).is_err());
        assert!(z_test_homogeneity(&ds, &p, 0, 0, 0.05, 0).is_err());
    }

    #[test]
    fn z_test_is_deterministic() {
        let ds = Dataset::generate(200, 0.1, 5).unwrap();
        let p = part(&[120, 80]);
        let a = z_test_homogeneity(&ds, &p, 0, 200, 0.05, 9).unwrap();
        let b = z_test_homogeneity(&ds, &p, 0, 200, 0.05, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn z_test_detects_split_population() {
        // every default sits in the last 30 members of a 60-member grade
        let positions: Vec<usize> = (31..=60).collect();
        let ds = Dataset::from_default_positions(100, &positions).unwrap();
        let p = part(&[60, 40]);
        let r = z_test_homogeneity(&ds, &p, 0, 200, 0.05, 1).unwrap().unwrap();
        assert!(!r.homogeneous);
        assert!(r.pass_fraction < 1.0);
    }

    #[test]
    fn validate_set1_solution() {
        let ds = Dataset::from_default_positions(150, &SET1_DEFAULTS).unwrap();
        let p = part(&[16, 16, 16, 16, 17, 17, 17, 17, 18]);
        let r = validate(&ds, &p, &ValidationConfig::for_population(150)).unwrap();
        assert!(r.monotonicity);
        assert!(r.concentration);
        assert_eq!(r.cardinality, Some(true));
        assert_eq!(r.cardinality_bounds, Some((1, 23)));
        // grades of 16-18 counterparts are below the sample-size floor
        assert_eq!(r.heterogeneity, None);
        assert_eq!(r.homogeneity, None);
        assert!(r.encoded_constraints_hold());
    }

    #[test]
    fn validate_set2_solution() {
        let ds = Dataset::from_default_positions(150, &SET2_DEFAULTS).unwrap();
        let p = part(&[36, 40, 42, 32]);
        let r = validate(&ds, &p, &ValidationConfig::default()).unwrap();
        assert!(r.monotonicity);
        assert!(r.default_rates.windows(2).all(|w| w[0] < w[1]));
        assert!((r.default_rates[3] - 0.3125).abs() < 1e-12);
        assert!((r.default_rates[2] - 6.0 / 42.0).abs() < 1e-12);
        assert_eq!(r.t_statistics.len(), 3);
        assert_eq!(r.homogeneity_pass_fractions, vec![None; 4]);
    }

    #[test]
    fn fold_outcomes_rules() {
        assert_eq!(fold_outcomes([Some(true), Some(true)]), Some(true));
        assert_eq!(fold_outcomes([Some(true), None]), None);
        assert_eq!(fold_outcomes([None, Some(false)]), Some(false));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;
        use rand::Rng;

        fn partition_strategy() -> impl Strategy<Value = Partition> {
            prop::collection::vec(1usize..40, 2..8).prop_map(|v| Partition::new(v).unwrap())
        }

        proptest! {
            #[test]
            fn herfindahl_adjusted_in_unit_interval(p in partition_strategy()) {
                let h = herfindahl_adjusted(&p);
                prop_assert!((0.0..=1.0).contains(&h));
                let equal = p.cardinalities().iter().all(|&c| c == p.cardinalities()[0]);
                prop_assert_eq!(h == 0.0, equal);
            }

            #[test]
            fn transfer_toward_larger_grade_increases_concentration(p in partition_strategy()) {
                let c = p.cardinalities();
                let (small, large) = if c[0] <= c[1] { (0, 1) } else { (1, 0) };
                prop_assume!(c[small] >= 2);
                let mut moved = c.to_vec();
                moved[small] -= 1;
                moved[large] += 1;
                let q = Partition::new(moved).unwrap();
                prop_assert!(herfindahl_adjusted(&q) > herfindahl_adjusted(&p));
            }

            #[test]
            fn weighted_default_rates_average_to_overall_rate(
                p in partition_strategy(),
                seed in any::<u64>(),
            ) {
                let n = p.total();
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let defaults: Vec<bool> = (0..n).map(|_| rng.random_bool(0.2)).collect();
                let d = defaults.iter().filter(|&&x| x).count();
                let ds = Dataset::new(defaults, None).unwrap();
                let s = grade_stats(&ds, &p).unwrap();
                let total: usize = s.iter().map(|g| g.default_count).sum();
                prop_assert_eq!(total, d);
                let weighted: f64 = s.iter().map(|g| g.default_rate * g.cardinality as f64).sum::<f64>() / n as f64;
                prop_assert!((weighted - d as f64 / n as f64).abs() < 1e-12);
            }

            #[test]
            fn t_statistic_is_antisymmetric(
                na in 1usize..200, da in 0usize..200,
                nb in 1usize..200, db in 0usize..200,
            ) {
                let a = GradeStats::new(na, da.min(na)).unwrap();
                let b = GradeStats::new(nb, db.min(nb)).unwrap();
                let ab = t_test_heterogeneity(&a, &b, 0.01).unwrap();
                let ba = t_test_heterogeneity(&b, &a, 0.01).unwrap();
                match (ab.t, ba.t) {
                    (Some(x), Some(y)) => prop_assert!((x + y).abs() < 1e-12),
                    (None, None) => {}
                    _ => prop_assert!(false),
                }
                prop_assert_eq!(ab.heterogeneous, ba.heterogeneous);
            }
        }
    }
}
