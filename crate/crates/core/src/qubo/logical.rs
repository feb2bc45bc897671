//! Penalties forcing the assignment block into a binary staircase matrix.

use crate::error::Result;

use super::layout::VariableLayout;
use super::model::{IntPoly, QuboModel};
use super::weights::PenaltyWeights;

/// `sum_i (sum_j x_ij - 1)^2`: every counterpart in exactly one grade.
pub(crate) fn uniqueness_terms(layout: &VariableLayout) -> IntPoly {
    let mut poly = IntPoly::default();
    for i in 0..layout.counterparts() {
        let row: Vec<(usize, i128)> = (0..layout.grades()).map(|j| (layout.x(i, j), 1)).collect();
        poly.add_square(&row, -1);
    }
    poly
}

/// `(1 - x_11) + (1 - x_nm)`.
pub(crate) fn endpoint_terms(layout: &VariableLayout) -> IntPoly {
    let (n, m) = (layout.counterparts(), layout.grades());
    let mut poly = IntPoly::default();
    poly.add_constant(2);
    poly.add_linear(layout.x(0, 0), -1);
    poly.add_linear(layout.x(n - 1, m - 1), -1);
    poly
}

/// `sum x_ij x_(i+1)j`, rewarded.
pub(crate) fn vertical_terms(layout: &VariableLayout) -> IntPoly {
    let mut poly = IntPoly::default();
    for i in 0..layout.counterparts() - 1 {
        for j in 0..layout.grades() {
            poly.add_quadratic(layout.x(i, j), layout.x(i + 1, j), 1);
        }
    }
    poly
}

/// `sum x_ij x_(i+1)(j+1)`, rewarded.
pub(crate) fn diagonal_terms(layout: &VariableLayout) -> IntPoly {
    let mut poly = IntPoly::default();
    for i in 0..layout.counterparts() - 1 {
        for j in 0..layout.grades() - 1 {
            poly.add_quadratic(layout.x(i, j), layout.x(i + 1, j + 1), 1);
        }
    }
    poly
}

/// Adds `(1 - a - b) c + a b` for each 2x2 window, with the three cells
/// selected by `pick`.
fn window_terms(
    layout: &VariableLayout,
    pick: impl Fn(usize, usize) -> (usize, usize, usize),
) -> IntPoly {
    let mut poly = IntPoly::default();
    for i in 0..layout.counterparts() - 1 {
        for j in 0..layout.grades() - 1 {
            let (a, b, c) = pick(i, j);
            poly.add_linear(c, 1);
            poly.add_quadratic(a, c, -1);
            poly.add_quadratic(b, c, -1);
            poly.add_quadratic(a, b, 1);
        }
    }
    poly
}

/// A set cell must be followed, in the next row, by the same or next grade.
pub(crate) fn successor_terms(layout: &VariableLayout) -> IntPoly {
    window_terms(layout, |i, j| (layout.x(i + 1, j), layout.x(i + 1, j + 1), layout.x(i, j)))
}

/// A set cell must be preceded, in the previous row, by the same or previous grade.
pub(crate) fn predecessor_terms(layout: &VariableLayout) -> IntPoly {
    window_terms(layout, |i, j| (layout.x(i, j), layout.x(i, j + 1), layout.x(i + 1, j + 1)))
}

/// `sum x_i(j+1) x_(i+1)j`: no step back to a lower grade.
pub(crate) fn anti_diagonal_terms(layout: &VariableLayout) -> IntPoly {
    let mut poly = IntPoly::default();
    for i in 0..layout.counterparts() - 1 {
        for j in 0..layout.grades() - 1 {
            poly.add_quadratic(layout.x(i, j + 1), layout.x(i + 1, j), 1);
        }
    }
    poly
}

/// Weak penalty on a grade opening below a row that holds neither it nor its successor.
pub(crate) fn restart_terms(layout: &VariableLayout) -> IntPoly {
    window_terms(layout, |i, j| (layout.x(i, j), layout.x(i, j + 1), layout.x(i + 1, j)))
}

fn dimension(layout: &VariableLayout) -> usize {
    layout.total_variables()
}

fn shared_terms(layout: &VariableLayout, w: &PenaltyWeights) -> QuboModel {
    let dim = dimension(layout);
    let mut model = uniqueness_terms(layout).scaled(dim, w.mu01);
    model.add_model(&endpoint_terms(layout).scaled(dim, w.mu02));
    model
}

/// Logical penalty built from row uniqueness, endpoints and rewards for
/// vertical and diagonal adjacency.
pub fn penalty_logical_global(layout: &VariableLayout, w: &PenaltyWeights) -> Result<QuboModel> {
    w.validate()?;
    w.require_positive(&["mu01", "mu02", "mu03", "mu04"])?;
    let dim = dimension(layout);
    let mut model = shared_terms(layout, w);
    model.add_model(&vertical_terms(layout).scaled(dim, -w.mu03));
    model.add_model(&diagonal_terms(layout).scaled(dim, -w.mu04));
    Ok(model)
}

/// Logical penalty built from row uniqueness, endpoints and forbidden 2x2
/// windows.
pub fn penalty_logical_local(layout: &VariableLayout, w: &PenaltyWeights) -> Result<QuboModel> {
    w.validate()?;
    w.require_positive(&["mu01", "mu02", "mu04", "mu05", "mu06", "mu_restart"])?;
    let dim = dimension(layout);
    let mut model = shared_terms(layout, w);
    model.add_model(&successor_terms(layout).scaled(dim, w.mu04));
    model.add_model(&predecessor_terms(layout).scaled(dim, w.mu05));
    model.add_model(&anti_diagonal_terms(layout).scaled(dim, w.mu06));
    model.add_model(&restart_terms(layout).scaled(dim, w.mu_restart));
    Ok(model)
}
