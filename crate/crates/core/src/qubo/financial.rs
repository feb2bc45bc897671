//! Concentration and grade-size penalties.

use crate::error::{Error, Result};

use super::layout::VariableLayout;
use super::model::{IntPoly, QuboModel};
use super::penalty::add_inequality;

/// `mu3 [m / ((m-1) n^2) sum_j N_j^2 - 1/(m-1)]`, which is `mu3 * H_adj` on
/// a staircase.
pub fn penalty_concentration(layout: &VariableLayout, mu3: f64) -> Result<QuboModel> {
    if !mu3.is_finite() || mu3 < 0.0 {
        return Err(Error::InvalidArgument(format!("weight mu3 must be finite and >= 0, got {mu3}")));
    }
    let (n, m) = (layout.counterparts() as f64, layout.grades() as f64);
    let mut squares = IntPoly::default();
    for j in 0..layout.grades() {
        let column: Vec<(usize, i128)> = (0..layout.counterparts()).map(|i| (layout.x(i, j), 1)).collect();
        squares.add_square(&column, 0);
    }
    let mut model = squares.scaled(layout.total_variables(), mu3 * m / ((m - 1.0) * n * n));
    model.add_offset(-mu3 / (m - 1.0));
    Ok(model)
}

/// Slack-encoded `lambda1 <= N_j` (weight `mu41`) and `N_j <= lambda2`
/// (weight `mu42`) for every grade.
pub fn penalty_cardinality(layout: &VariableLayout, mu41: f64, mu42: f64) -> Result<QuboModel> {
    let t = *layout
        .thresholds()
        .ok_or_else(|| Error::LayoutMismatch("cardinality penalty requires a layout with threshold slacks".into()))?;
    for (name, v) in [("mu41", mu41), ("mu42", mu42)] {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::InvalidArgument(format!("weight {name} must be finite and >= 0, got {v}")));
        }
    }
    let (n, m) = (layout.counterparts(), layout.grades());
    let mut lower = IntPoly::default();
    let mut upper = IntPoly::default();
    for j in 0..m {
        let lower_slack: Vec<usize> = (0..t.lower_bits).map(|l| layout.lower_slack(l, j)).collect();
        let upper_slack: Vec<usize> = (0..t.upper_bits).map(|l| layout.upper_slack(l, j)).collect();
        let neg: Vec<(usize, i64)> = (0..n).map(|i| (layout.x(i, j), -1)).collect();
        let pos: Vec<(usize, i64)> = (0..n).map(|i| (layout.x(i, j), 1)).collect();
        add_inequality(&mut lower, &neg, -(t.lower as i64), &lower_slack);
        add_inequality(&mut upper, &pos, t.upper as i64, &upper_slack);
    }
    let dim = layout.total_variables();
    let mut model = lower.scaled(dim, mu41);
    model.add_model(&upper.scaled(dim, mu42));
    Ok(model)
}
