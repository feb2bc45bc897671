//! Score-ordered counterpart populations with binary default flags.
//!
//! Counterparts are indexed 1..=n in ascending order of risk. Every algorithm
//! in the crate consumes only that order and the default flags; scores are
//! carried along for reporting.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use rand::seq::index::sample_weighted;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Logistic steepness in rank: the top decile is ten times more likely to
/// default than the bottom decile (e^(0.45 s) = 10).
const RANK_STEEPNESS: f64 = std::f64::consts::LN_10 / 0.45;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    defaults: Vec<bool>,
    scores: Option<Vec<f64>>,
}

impl Dataset {
    /// Builds a dataset from explicit default flags and optional scores.
    pub fn new(defaults: Vec<bool>, scores: Option<Vec<f64>>) -> Result<Self> {
        if defaults.is_empty() {
            return Err(Error::InvalidDataset("dataset has no counterparts".into()));
        }
        if let Some(s) = &scores {
            if s.len() != defaults.len() {
                return Err(Error::InvalidDataset(format!(
                    "{} scores for {} counterparts",
                    s.len(),
                    defaults.len()
                )));
            }
            if let Some(k) = s.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidDataset(format!("score of counterpart {} is not finite", k + 1)));
            }
            if let Some(k) = s.windows(2).position(|w| w[1] < w[0]) {
                return Err(Error::InvalidDataset(format!(
                    "scores decrease between counterparts {} and {}",
                    k + 1,
                    k + 2
                )));
            }
        }
        Ok(Dataset { defaults, scores })
    }

    /// Dataset of `n` counterparts with defaults at the given 1-based positions.
    pub fn from_default_positions(n: usize, positions: &[usize]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDataset("dataset has no counterparts".into()));
        }
        let mut defaults = vec![false; n];
        for &p in positions {
            if p == 0 || p > n {
                return Err(Error::InvalidDataset(format!("default position {p} outside [1, {n}]")));
            }
            if defaults[p - 1] {
                return Err(Error::InvalidDataset(format!("default position {p} listed twice")));
            }
            defaults[p - 1] = true;
        }
        Ok(Dataset { defaults, scores: None })
    }

    /// Synthetic population with `round(n * default_fraction)` defaults.
    ///
    /// Defaults are drawn without replacement with logistic-in-rank weights,
    /// so they concentrate toward the risky tail. Scores are sorted uniform
    /// draws. The result depends only on the arguments.
    pub fn generate(n: usize, default_fraction: f64, seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("need at least 2 counterparts, got {n}")));
        }
        if !(default_fraction > 0.0 && default_fraction < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "default fraction {default_fraction} outside (0, 1)"
            )));
        }
        let count = (n as f64 * default_fraction).round() as usize;
        if count == 0 || count >= n {
            return Err(Error::InvalidArgument(format!(
                "default fraction {default_fraction} yields {count} defaults out of {n}"
            )));
        }

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weight = |i: usize| {
            let rank = (i as f64 + 0.5) / n as f64;
            1.0 / (1.0 + (-RANK_STEEPNESS * (rank - 0.5)).exp())
        };
        let picked = sample_weighted(&mut rng, n, weight, count)
            .map_err(|e| Error::InvalidArgument(format!("default sampling failed: {e}")))?;
        let mut defaults = vec![false; n];
        for i in picked.iter() {
            defaults[i] = true;
        }

        let mut scores: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        scores.sort_by(f64::total_cmp);

        Ok(Dataset {
            defaults,
            scores: Some(scores),
        })
    }

    pub fn len(&self) -> usize {
        self.defaults.len()
    }

    pub fn is_empty(&self) -> bool {
        self.defaults.is_empty()
    }

    pub fn defaults(&self) -> &[bool] {
        &self.defaults
    }

    pub fn scores(&self) -> Option<&[f64]> {
        self.scores.as_deref()
    }

    /// Default flag of counterpart `i` (0-based).
    pub fn is_default(&self, i: usize) -> bool {
        self.defaults[i]
    }

    /// Total number of defaults.
    pub fn default_count(&self) -> usize {
        self.defaults.iter().filter(|&&d| d).count()
    }

    /// 1-based positions of the defaulted counterparts.
    pub fn default_positions(&self) -> Vec<usize> {
        self.defaults
            .iter()
            .enumerate()
            .filter_map(|(i, &d)| d.then_some(i + 1))
            .collect()
    }

    /// Prefix sums of the default flags; entry `k` counts defaults among the first `k` counterparts.
    pub fn default_prefix_sums(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.len() + 1);
        out.push(0);
        let mut acc = 0;
        for &d in &self.defaults {
            acc += d as usize;
            out.push(acc);
        }
        out
    }

    /// Writes the dataset as CSV (`index,score,default`, score omitted when absent).
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_records(file).map_err(|e| csv_error(path, e))
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        self.write_records(out).map_err(|e| csv_error(Path::new("<stream>"), e))
    }

    fn write_records<W: std::io::Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        match &self.scores {
            Some(scores) => {
                w.write_record(["index", "score", "default"])?;
                for (i, (&d, s)) in self.defaults.iter().zip(scores).enumerate() {
                    w.write_record([(i + 1).to_string(), s.to_string(), (d as u8).to_string()])?;
                }
            }
            None => {
                w.write_record(["index", "default"])?;
                for (i, &d) in self.defaults.iter().enumerate() {
                    w.write_record([(i + 1).to_string(), (d as u8).to_string()])?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a dataset written by [`Dataset::save`] or by hand in the same format.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);

        let headers = r.headers().map_err(|e| csv_error(path, e))?.clone();
        let column = |name: &str| headers.iter().position(|h| h == name);
        let index_col = column("index").ok_or_else(|| Error::format(path, 1, "missing `index` column"))?;
        let default_col = column("default").ok_or_else(|| Error::format(path, 1, "missing `default` column"))?;
        let score_col = column("score");

        let mut defaults = Vec::new();
        let mut scores = score_col.map(|_| Vec::new());
        for (row, record) in r.records().enumerate() {
            let line = row + 2;
            let record = record.map_err(|e| csv_error(path, e))?;
            let field = |col: usize| {
                record
                    .get(col)
                    .ok_or_else(|| Error::format(path, line, format!("expected {} fields", headers.len())))
            };

            let index: usize = field(index_col)?
                .parse()
                .map_err(|_| Error::format(path, line, format!("bad index `{}`", &record[index_col])))?;
            if index != defaults.len() + 1 {
                return Err(Error::format(
                    path,
                    line,
                    format!("index {index} out of sequence (expected {})", defaults.len() + 1),
                ));
            }
            let default = match field(default_col)? {
                "0" => false,
                "1" => true,
                other => return Err(Error::format(path, line, format!("default must be 0 or 1, got `{other}`"))),
            };
            defaults.push(default);

            if let (Some(col), Some(scores)) = (score_col, scores.as_mut()) {
                let raw = field(col)?;
                let s: f64 = raw
                    .parse()
                    .map_err(|_| Error::format(path, line, format!("bad score `{raw}`")))?;
                if !s.is_finite() {
                    return Err(Error::format(path, line, format!("score `{raw}` is not finite")));
                }
                if scores.last().is_some_and(|&prev| s < prev) {
                    return Err(Error::format(path, line, "scores must be non-decreasing"));
                }
                scores.push(s);
            }
        }
        if defaults.is_empty() {
            return Err(Error::format(path, 1, "no counterparts"));
        }
        Ok(Dataset { defaults, scores })
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        kind => Error::format(path, line, format!("{kind:?}")),
    }
}

/// Writes `text` to `path`, mapping failures into the crate error type.
pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(text.as_bytes()).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generate_hits_requested_default_count() {
        let ds = Dataset::generate(150, 0.04, 7).unwrap();
        assert_eq!(ds.len(), 150);
        assert_eq!(ds.default_count(), 6);
        let ds = Dataset::generate(150, 0.12, 3).unwrap();
        assert_eq!(ds.default_count(), 18);
    }

    #[test]
    fn generate_is_deterministic() {
        assert_eq!(Dataset::generate(40, 0.1, 11).unwrap(), Dataset::generate(40, 0.1, 11).unwrap());
        assert_ne!(Dataset::generate(40, 0.1, 11).unwrap(), Dataset::generate(40, 0.1, 12).unwrap());
    }

    #[test]
    fn generate_skews_defaults_toward_the_tail() {
        let mut low = 0;
        let mut high = 0;
        for seed in 0..200 {
            let ds = Dataset::generate(100, 0.1, seed).unwrap();
            low += ds.defaults()[..50].iter().filter(|&&d| d).count();
            high += ds.defaults()[50..].iter().filter(|&&d| d).count();
        }
        assert!(high > 2 * low, "high {high} low {low}");
    }

    #[test]
    fn generate_rejects_bad_arguments() {
        assert!(Dataset::generate(1, 0.5, 0).is_err());
        assert!(Dataset::generate(10, 0.0, 0).is_err());
        assert!(Dataset::generate(10, 1.0, 0).is_err());
        // 0.04 * 10 rounds to 0 defaults
        assert!(Dataset::generate(10, 0.04, 0).is_err());
        // 0.97 * 10 rounds to all defaults
        assert!(Dataset::generate(10, 0.97, 0).is_err());
    }

    #[test]
    fn default_positions_fixtures() {
        let ds = Dataset::from_default_positions(13, &[10, 11, 13]).unwrap();
        assert_eq!(ds.default_count(), 3);
        assert_eq!(ds.default_positions(), vec![10, 11, 13]);
        let ds = Dataset::from_default_positions(14, &[11, 13, 14]).unwrap();
        assert_eq!(ds.default_count(), 3);
        let ds = Dataset::from_default_positions(5, &[]).unwrap();
        assert_eq!(ds.default_count(), 0);
        assert_eq!(ds.defaults(), &[false; 5]);
    }

    #[test]
    fn default_positions_errors() {
        assert!(Dataset::from_default_positions(5, &[0]).is_err());
        assert!(Dataset::from_default_positions(5, &[6]).is_err());
        assert!(Dataset::from_default_positions(5, &[2, 2]).is_err());
    }

    #[test]
    fn new_rejects_descending_scores() {
        assert!(Dataset::new(vec![false, true], Some(vec![0.5, 0.1])).is_err());
        assert!(Dataset::new(vec![false, true], Some(vec![0.1])).is_err());
        assert!(Dataset::new(vec![false, true], Some(vec![0.1, 0.1])).is_ok());
    }

    #[test]
    fn prefix_sums() {
        let ds = Dataset::from_default_positions(5, &[2, 5]).unwrap();
        assert_eq!(ds.default_prefix_sums(), vec![0, 0, 1, 1, 1, 2]);
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ds.csv");
        let ds = Dataset::generate(20, 0.1, 1).unwrap();
        ds.save(&path).unwrap();
        assert_eq!(Dataset::load(&path).unwrap(), ds);

        let plain = Dataset::from_default_positions(6, &[4, 6]).unwrap();
        plain.save(&path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap().lines().next(), Some("index,default"));
        assert_eq!(Dataset::load(&path).unwrap(), plain);
    }

    #[test]
    fn csv_rejects_non_binary_default() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "index,score,default\n1,0.1,0\n2,0.2,2\n").unwrap();
        let err = Dataset::load(&path).unwrap_err();
        assert!(matches!(err, Error::Format { line: 3, .. }), "{err}");
    }

    #[test]
    fn csv_rejects_descending_scores() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "index,score,default\n1,0.5,0\n2,0.2,1\n").unwrap();
        let err = Dataset::load(&path).unwrap_err();
        assert!(err.to_string().contains("non-decreasing"), "{err}");
    }

    #[test]
    fn csv_rejects_malformed_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "index,default\n1,0\n3,1\n").unwrap();
        assert!(Dataset::load(&path).is_err());
        std::fs::write(&path, "index,default\n1\n").unwrap();
        assert!(Dataset::load(&path).is_err());
        std::fs::write(&path, "idx,default\n1,0\n").unwrap();
        assert!(Dataset::load(&path).is_err());
    }
}
