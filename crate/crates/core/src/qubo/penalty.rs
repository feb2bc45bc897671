use crate::error::{Error, Result};

use super::layout::slack_width;
use super::model::{IntPoly, QuboModel};

fn check_weight(mu: f64) -> Result<()> {
    if mu.is_finite() && mu > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("penalty weight must be positive, got {mu}")))
    }
}

fn check_indices(dimension: usize, indices: impl IntoIterator<Item = usize>) -> Result<()> {
    for i in indices {
        if i >= dimension {
            return Err(Error::InvalidArgument(format!(
                "variable index {i} out of range for dimension {dimension}"
            )));
        }
    }
    Ok(())
}

/// `mu * (sum p_l x_l - g)^2`.
pub fn penalty_equality(dimension: usize, coeffs: &[(usize, i64)], g: i64, mu: f64) -> Result<QuboModel> {
    check_weight(mu)?;
    check_indices(dimension, coeffs.iter().map(|c| c.0))?;
    let terms: Vec<(usize, i128)> = coeffs.iter().map(|&(i, p)| (i, p as i128)).collect();
    let mut poly = IntPoly::default();
    poly.add_square(&terms, -(g as i128));
    Ok(poly.scaled(dimension, mu))
}

/// Number of slack bits needed to turn `sum q_l x_l <= d` into an equality.
///
/// Fails when no assignment of `x` can satisfy the inequality.
pub fn inequality_slack_width(coeffs: &[(usize, i64)], d: i64) -> Result<usize> {
    let lowest: i64 = coeffs.iter().map(|&(_, q)| q.min(0)).sum();
    let range = d - lowest;
    if range < 0 {
        return Err(Error::InvalidArgument(format!(
            "inequality with bound {d} cannot be met (smallest left side is {lowest})"
        )));
    }
    Ok(slack_width(range as usize))
}

/// `mu * (d - sum q_l x_l - sum 2^l s_l)^2` for `sum q_l x_l <= d`.
pub fn penalty_inequality_slack(
    dimension: usize,
    coeffs: &[(usize, i64)],
    d: i64,
    mu: f64,
    slack: &[usize],
) -> Result<QuboModel> {
    check_weight(mu)?;
    let width = inequality_slack_width(coeffs, d)?;
    if slack.len() != width {
        return Err(Error::InvalidArgument(format!(
            "inequality needs {width} slack bits, got {}",
            slack.len()
        )));
    }
    check_indices(dimension, coeffs.iter().map(|c| c.0).chain(slack.iter().copied()))?;
    let mut poly = IntPoly::default();
    add_inequality(&mut poly, coeffs, d, slack);
    Ok(poly.scaled(dimension, mu))
}

pub(crate) fn add_inequality(poly: &mut IntPoly, coeffs: &[(usize, i64)], d: i64, slack: &[usize]) {
    let terms: Vec<(usize, i128)> = coeffs
        .iter()
        .map(|&(i, q)| (i, -(q as i128)))
        .chain(slack.iter().enumerate().map(|(l, &s)| (s, -(1i128 << l))))
        .collect();
    poly.add_square(&terms, d as i128);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(mask: u64, dim: usize) -> Vec<bool> {
        (0..dim).map(|k| mask >> k & 1 == 1).collect()
    }

    #[test]
    fn equality_expansion() {
        let m = penalty_equality(2, &[(0, 1), (1, 1)], 1, 1.0).unwrap();
        assert_eq!(m.offset(), 1.0);
        assert_eq!(m.linear_coefficient(0), -1.0);
        assert_eq!(m.linear_coefficient(1), -1.0);
        assert_eq!(m.quadratic_coefficient(0, 1), 2.0);
    }

    #[test]
    fn empty_equality_is_zero() {
        let m = penalty_equality(3, &[], 0, 2.0).unwrap();
        assert_eq!(m, QuboModel::new(3));
    }

    #[test]
    fn equality_vanishes_on_solutions() {
        let coeffs = [(0, 2), (1, -1), (2, 3), (3, 1)];
        let m = penalty_equality(4, &coeffs, 3, 1.5).unwrap();
        for mask in 0..16u64 {
            let x = bits(mask, 4);
            let lhs: i64 = coeffs.iter().map(|&(i, p)| p * x[i] as i64).sum();
            let expected = 1.5 * ((lhs - 3) * (lhs - 3)) as f64;
            assert_eq!(m.evaluate(&x).unwrap(), expected);
        }
    }

    #[test]
    fn single_bit_inequality_brute_force() {
        // x + s = 1 over all four states
        let m = penalty_inequality_slack(2, &[(0, 1)], 1, 1.0, &[1]).unwrap();
        let expected = [1.0, 0.0, 0.0, 1.0];
        for mask in 0..4u64 {
            assert_eq!(m.evaluate(&bits(mask, 2)).unwrap(), expected[mask as usize]);
        }
    }

    #[test]
    fn inequality_zero_iff_satisfied_with_best_slack() {
        let coeffs = [(0, 1), (1, 2), (2, -1)];
        let d = 2;
        let width = inequality_slack_width(&coeffs, d).unwrap();
        assert_eq!(width, 2);
        let slack = [3, 4];
        let mu = 0.5;
        let m = penalty_inequality_slack(5, &coeffs, d, mu, &slack).unwrap();
        for xm in 0..8u64 {
            let x = bits(xm, 3);
            let lhs: i64 = coeffs.iter().map(|&(i, q)| q * x[i] as i64).sum();
            let best = (0..4u64)
                .map(|s| {
                    let mut state = x.clone();
                    state.extend(bits(s, 2));
                    m.evaluate(&state).unwrap()
                })
                .fold(f64::INFINITY, f64::min);
            if lhs <= d {
                assert_eq!(best, 0.0);
            } else {
                assert!(best >= mu);
            }
        }
    }

    #[test]
    fn inequality_rejects_wrong_width() {
        assert!(penalty_inequality_slack(3, &[(0, 1)], 3, 1.0, &[1]).is_err());
        assert!(penalty_inequality_slack(3, &[(0, 1)], -1, 1.0, &[]).is_err());
    }

    #[test]
    fn rejects_bad_weight_and_index() {
        assert!(penalty_equality(2, &[(0, 1)], 1, 0.0).is_err());
        assert!(penalty_equality(2, &[(0, 1)], 1, f64::NAN).is_err());
        assert!(penalty_equality(2, &[(2, 1)], 1, 1.0).is_err());
    }
}
