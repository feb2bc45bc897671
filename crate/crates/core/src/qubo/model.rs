use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Quadratic pseudo-Boolean function `offset + sum c_i x_i + sum c_ij x_i x_j`.
///
/// Quadratic keys are stored as `(i, j)` with `i < j`; products `x_i x_i` are
/// folded into the linear part. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct QuboModel {
    dimension: usize,
    offset: f64,
    linear: BTreeMap<usize, f64>,
    quadratic: BTreeMap<(usize, usize), f64>,
}

impl QuboModel {
    pub fn new(dimension: usize) -> Self {
        QuboModel {
            dimension,
            ..Default::default()
        }
    }

    /// Builds a model from a square matrix read as `x^T Q x + offset`.
    ///
    /// Both triangles contribute; the diagonal becomes linear terms.
    pub fn from_dense(matrix: &[Vec<f64>], offset: f64) -> Result<Self> {
        let dim = matrix.len();
        let mut model = QuboModel::new(dim);
        model.add_offset(offset);
        for (i, row) in matrix.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::InvalidArgument(format!(
                    "row {i} has {} entries, expected {dim}",
                    row.len()
                )));
            }
            for (j, &c) in row.iter().enumerate() {
                model.add_quadratic(i, j, c);
            }
        }
        Ok(model)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn linear(&self) -> &BTreeMap<usize, f64> {
        &self.linear
    }

    pub fn quadratic(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.quadratic
    }

    pub fn linear_coefficient(&self, i: usize) -> f64 {
        self.linear.get(&i).copied().unwrap_or(0.0)
    }

    pub fn quadratic_coefficient(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return self.linear_coefficient(i);
        }
        let key = if i < j { (i, j) } else { (j, i) };
        self.quadratic.get(&key).copied().unwrap_or(0.0)
    }

    /// Number of stored linear and quadratic coefficients.
    pub fn nonzeros(&self) -> usize {
        self.linear.len() + self.quadratic.len()
    }

    /// Grows the variable space; existing indices are unchanged.
    pub fn resize(&mut self, dimension: usize) {
        assert!(
            dimension >= self.dimension,
            "cannot shrink a model from {} to {dimension} variables",
            self.dimension
        );
        self.dimension = dimension;
    }

    pub fn add_offset(&mut self, c: f64) {
        self.offset += c;
    }

    pub fn add_linear(&mut self, i: usize, c: f64) {
        assert!(i < self.dimension, "index {i} out of range for dimension {}", self.dimension);
        accumulate(&mut self.linear, i, c);
    }

    pub fn add_quadratic(&mut self, i: usize, j: usize, c: f64) {
        if i == j {
            self.add_linear(i, c);
            return;
        }
        let key = if i < j { (i, j) } else { (j, i) };
        assert!(key.1 < self.dimension, "index {} out of range for dimension {}", key.1, self.dimension);
        accumulate(&mut self.quadratic, key, c);
    }

    /// Coefficient-wise sum; the result spans the larger of the two dimensions.
    pub fn add_model(&mut self, other: &QuboModel) {
        self.dimension = self.dimension.max(other.dimension);
        self.offset += other.offset;
        for (&i, &c) in &other.linear {
            accumulate(&mut self.linear, i, c);
        }
        for (&k, &c) in &other.quadratic {
            accumulate(&mut self.quadratic, k, c);
        }
    }

    pub fn scaled(&self, factor: f64) -> QuboModel {
        let mut out = QuboModel::new(self.dimension);
        out.offset = self.offset * factor;
        for (&i, &c) in &self.linear {
            accumulate(&mut out.linear, i, c * factor);
        }
        for (&k, &c) in &self.quadratic {
            accumulate(&mut out.quadratic, k, c * factor);
        }
        out
    }

    /// Value of the function at `state`.
    pub fn evaluate(&self, state: &[bool]) -> Result<f64> {
        if state.len() != self.dimension {
            return Err(Error::StateLength {
                expected: self.dimension,
                actual: state.len(),
            });
        }
        let mut e = self.offset;
        for (&i, &c) in &self.linear {
            if state[i] {
                e += c;
            }
        }
        for (&(i, j), &c) in &self.quadratic {
            if state[i] && state[j] {
                e += c;
            }
        }
        Ok(e)
    }

    /// Writes the `qubo v1` text format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "qubo v1 dim={} offset={}", self.dimension, self.offset).unwrap();
        for (i, c) in &self.linear {
            writeln!(out, "L {i} {c}").unwrap();
        }
        for ((i, j), c) in &self.quadratic {
            writeln!(out, "Q {i} {j} {c}").unwrap();
        }
        out
    }

    /// Parses the `qubo v1` text format. `path` is used for diagnostics only.
    pub fn from_text(text: &str, path: &Path) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| Error::format(path, 1, "empty file"))?;
        let mut model = parse_header(header).map_err(|m| Error::format(path, 1, m))?;
        let dim = model.dimension;

        for (k, line) in lines {
            let line_no = k + 1;
            let err = |m: String| Error::format(path, line_no, m);
            let fields: Vec<&str> = line.split_whitespace().collect();
            let index = |s: &str| -> Result<usize> {
                let i: usize = s.parse().map_err(|_| err(format!("bad index `{s}`")))?;
                if i >= dim {
                    return Err(err(format!("index {i} out of range for dim={dim}")));
                }
                Ok(i)
            };
            let coeff = |s: &str| -> Result<f64> {
                let c: f64 = s.parse().map_err(|_| err(format!("bad coefficient `{s}`")))?;
                if !c.is_finite() {
                    return Err(err(format!("coefficient `{s}` is not finite")));
                }
                Ok(c)
            };
            match fields.as_slice() {
                ["L", i, c] => {
                    let (i, c) = (index(i)?, coeff(c)?);
                    model.add_linear(i, c);
                }
                ["Q", i, j, c] => {
                    let (i, j, c) = (index(i)?, index(j)?, coeff(c)?);
                    model.add_quadratic(i, j, c);
                }
                _ => return Err(err(format!("unrecognized line `{line}`"))),
            }
        }
        Ok(model)
    }

    pub fn export(&self, path: impl AsRef<Path>) -> Result<()> {
        crate::dataset::write_text(path.as_ref(), &self.to_text())
    }

    pub fn import(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text, path)
    }
}

fn parse_header(line: &str) -> std::result::Result<QuboModel, String> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    let ["qubo", "v1", dim, offset] = fields.as_slice() else {
        return Err(format!("expected `qubo v1 dim=<D> offset=<q>`, got `{line}`"));
    };
    let dim: usize = dim
        .strip_prefix("dim=")
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| format!("bad dimension field `{dim}`"))?;
    let offset: f64 = offset
        .strip_prefix("offset=")
        .and_then(|s| s.parse().ok())
        .filter(|v: &f64| v.is_finite())
        .ok_or_else(|| format!("bad offset field `{offset}`"))?;
    let mut model = QuboModel::new(dim);
    model.offset = offset;
    Ok(model)
}

fn accumulate<K: Ord>(map: &mut BTreeMap<K, f64>, key: K, c: f64) {
    if c == 0.0 {
        return;
    }
    match map.entry(key) {
        Entry::Vacant(v) => {
            v.insert(c);
        }
        Entry::Occupied(mut o) => {
            *o.get_mut() += c;
            if *o.get() == 0.0 {
                o.remove();
            }
        }
    }
}

/// Integer-coefficient polynomial used while expanding penalties.
///
/// Every penalty with integer data is expanded here exactly and converted to
/// floating point once, when it is scaled by its weight.
#[derive(Debug, Clone, Default, PartialEq)]
pub(crate) struct IntPoly {
    pub offset: i128,
    pub linear: BTreeMap<usize, i128>,
    pub quadratic: BTreeMap<(usize, usize), i128>,
}

impl IntPoly {
    pub fn add_constant(&mut self, c: i128) {
        self.offset += c;
    }

    pub fn add_linear(&mut self, i: usize, c: i128) {
        if c != 0 {
            *self.linear.entry(i).or_insert(0) += c;
        }
    }

    pub fn add_quadratic(&mut self, i: usize, j: usize, c: i128) {
        if c == 0 {
            return;
        }
        if i == j {
            self.add_linear(i, c);
        } else {
            let key = if i < j { (i, j) } else { (j, i) };
            *self.quadratic.entry(key).or_insert(0) += c;
        }
    }

    /// Adds `(sum_k a_k x_k + constant)^2`.
    pub fn add_square(&mut self, terms: &[(usize, i128)], constant: i128) {
        let mut merged: BTreeMap<usize, i128> = BTreeMap::new();
        for &(i, a) in terms {
            *merged.entry(i).or_insert(0) += a;
        }
        merged.retain(|_, a| *a != 0);
        let merged: Vec<(usize, i128)> = merged.into_iter().collect();

        self.add_constant(constant * constant);
        for (k, &(i, a)) in merged.iter().enumerate() {
            // x^2 = x for binaries
            self.add_linear(i, a * a + 2 * a * constant);
            for &(j, b) in &merged[k + 1..] {
                self.add_quadratic(i, j, 2 * a * b);
            }
        }
    }

    /// Converts to a floating-point model multiplied by `factor`.
    pub fn scaled(&self, dimension: usize, factor: f64) -> QuboModel {
        let mut model = QuboModel::new(dimension);
        model.add_offset(self.offset as f64 * factor);
        for (&i, &c) in &self.linear {
            model.add_linear(i, c as f64 * factor);
        }
        for (&(i, j), &c) in &self.quadratic {
            model.add_quadratic(i, j, c as f64 * factor);
        }
        model
    }
}
