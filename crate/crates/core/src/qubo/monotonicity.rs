//! Default-rate monotonicity penalties.

use crate::dataset::Dataset;
use crate::error::{Error, Result};

use super::layout::{best_slack, VariableLayout};
use super::model::{IntPoly, QuboModel};

/// Antisymmetric matrix `d_i1 - d_i2`.
pub fn default_difference_matrix(ds: &Dataset) -> Vec<Vec<i8>> {
    let d = ds.defaults();
    d.iter()
        .map(|&a| d.iter().map(|&b| a as i8 - b as i8).collect())
        .collect()
}

fn check_population(layout: &VariableLayout, ds: &Dataset) -> Result<()> {
    if ds.len() != layout.counterparts() {
        return Err(Error::LayoutMismatch(format!(
            "dataset has {} counterparts, layout has {}",
            ds.len(),
            layout.counterparts()
        )));
    }
    Ok(())
}

/// `sum_j (D_j N_(j+1) - N_j D_(j+1))` as a quadratic form in `x`.
pub(crate) fn cross_terms(layout: &VariableLayout, ds: &Dataset) -> IntPoly {
    let (n, m) = (layout.counterparts(), layout.grades());
    let mut poly = IntPoly::default();
    for i1 in 0..n {
        for i2 in 0..n {
            let diff = ds.is_default(i1) as i128 - ds.is_default(i2) as i128;
            if diff == 0 {
                continue;
            }
            for j in 0..m - 1 {
                poly.add_quadratic(layout.x(i1, j), layout.x(i2, j + 1), diff);
            }
        }
    }
    poly
}

/// Soft monotonicity penalty with no auxiliary variables.
///
/// On a staircase it evaluates to `mu1 * sum_j (D_j N_(j+1) - N_j D_(j+1))`,
/// which is negative when default rates grow across grades.
pub fn penalty_monotonicity_approx(layout: &VariableLayout, ds: &Dataset, mu1: f64) -> Result<QuboModel> {
    check_population(layout, ds)?;
    if !mu1.is_finite() || mu1 < 0.0 {
        return Err(Error::InvalidArgument(format!("weight mu1 must be finite and >= 0, got {mu1}")));
    }
    Ok(cross_terms(layout, ds).scaled(layout.total_variables(), mu1))
}

/// A product variable `y = x_a x_b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProductTerm {
    /// Counterpart in grade `grade`.
    pub first: usize,
    /// Counterpart in grade `grade + 1`.
    pub second: usize,
    pub grade: usize,
}

impl ProductTerm {
    /// +1 if `first` defaulted and `second` did not, -1 for the reverse.
    fn sign(&self, ds: &Dataset) -> i128 {
        ds.is_default(self.first) as i128 - ds.is_default(self.second) as i128
    }
}

/// Triples `(i1, i2, j)` with `d_i1 != d_i2`, in lexicographic order; the
/// position in this list is the product variable's rank.
pub fn product_terms(ds: &Dataset, m: usize) -> Vec<ProductTerm> {
    let n = ds.len();
    let mut out = Vec::new();
    for first in 0..n {
        for second in 0..n {
            if ds.is_default(first) == ds.is_default(second) {
                continue;
            }
            for grade in 0..m.saturating_sub(1) {
                out.push(ProductTerm { first, second, grade });
            }
        }
    }
    out
}

fn exact_context(layout: &VariableLayout, ds: &Dataset) -> Result<Vec<ProductTerm>> {
    check_population(layout, ds)?;
    let block = layout.exact_monotonicity().ok_or_else(|| {
        Error::LayoutMismatch("exact monotonicity requested but the layout has no product block".into())
    })?;
    if block.defaults != ds.default_count() {
        return Err(Error::LayoutMismatch(format!(
            "layout reserves products for {} defaults, dataset has {}",
            block.defaults,
            ds.default_count()
        )));
    }
    let terms = product_terms(ds, layout.grades());
    debug_assert_eq!(terms.len(), block.products);
    Ok(terms)
}

/// `lambda0 (x_a x_b + 3 y - 2 x_a y - 2 x_b y)`: zero iff `y = x_a x_b`.
pub fn rosenberg(dimension: usize, a: usize, b: usize, y: usize, lambda0: f64) -> QuboModel {
    let mut poly = IntPoly::default();
    add_rosenberg(&mut poly, a, b, y);
    poly.scaled(dimension, lambda0)
}

fn add_rosenberg(poly: &mut IntPoly, a: usize, b: usize, y: usize) {
    poly.add_quadratic(a, b, 1);
    poly.add_linear(y, 3);
    poly.add_quadratic(a, y, -2);
    poly.add_quadratic(b, y, -2);
}

/// Hard monotonicity penalty over product and slack variables.
///
/// Rosenberg gadgets tie each product variable to its pair of assignment
/// bits, and for each adjacent grade pair `lambda (sum_t sign_t y_t + S_j)^2`
/// forces `D_j N_(j+1) - N_j D_(j+1) <= 0`.
pub fn penalty_monotonicity_exact(layout: &VariableLayout, ds: &Dataset, lambda0: f64, lambda: f64) -> Result<QuboModel> {
    let terms = exact_context(layout, ds)?;
    for (name, v) in [("lambda0", lambda0), ("lambda", lambda)] {
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::InvalidArgument(format!("weight {name} must be positive, got {v}")));
        }
    }
    let dim = layout.total_variables();
    let m = layout.grades();
    let bits = layout.exact_monotonicity().map_or(0, |b| b.slack_bits);

    let mut gadgets = IntPoly::default();
    let mut per_grade: Vec<Vec<(usize, i128)>> = vec![Vec::new(); m - 1];
    for (t, term) in terms.iter().enumerate() {
        let y = layout.product(t);
        add_rosenberg(&mut gadgets, layout.x(term.first, term.grade), layout.x(term.second, term.grade + 1), y);
        per_grade[term.grade].push((y, term.sign(ds)));
    }
    let mut balance = IntPoly::default();
    for (j, mut row) in per_grade.into_iter().enumerate() {
        row.extend((0..bits).map(|l| (layout.pair_slack(l, j), 1i128 << l)));
        balance.add_square(&row, 0);
    }

    let mut model = gadgets.scaled(dim, lambda0);
    model.add_model(&balance.scaled(dim, lambda));
    Ok(model)
}

/// Sets product bits to their pair products and pair slacks to their best
/// values for the assignment block currently in `state`.
pub fn complete_exact_auxiliaries(layout: &VariableLayout, ds: &Dataset, state: &mut [bool]) -> Result<()> {
    let terms = exact_context(layout, ds)?;
    let m = layout.grades();
    let bits = layout.exact_monotonicity().map_or(0, |b| b.slack_bits);
    let mut excess = vec![0i64; m - 1];
    for (t, term) in terms.iter().enumerate() {
        let y = state[layout.x(term.first, term.grade)] && state[layout.x(term.second, term.grade + 1)];
        state[layout.product(t)] = y;
        if y {
            excess[term.grade] += term.sign(ds) as i64;
        }
    }
    for (j, e) in excess.into_iter().enumerate() {
        let s = best_slack(-e, bits);
        for l in 0..bits {
            state[layout.pair_slack(l, j)] = s >> l & 1 == 1;
        }
    }
    Ok(())
}
