use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Multipliers of the penalty families.
///
/// `mu05`, `mu06` and `mu_restart` are only read by the local logical
/// encoding; `lambda0` and `lambda` only by the exact monotonicity encoding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltyWeights {
    pub mu01: f64,
    pub mu02: f64,
    pub mu03: f64,
    pub mu04: f64,
    pub mu05: f64,
    pub mu06: f64,
    pub mu_restart: f64,
    pub mu1: f64,
    pub mu3: f64,
    pub mu41: f64,
    pub mu42: f64,
    pub lambda0: f64,
    pub lambda: f64,
}

impl PenaltyWeights {
    fn fields(&self) -> [(&'static str, f64); 13] {
        [
            ("mu01", self.mu01),
            ("mu02", self.mu02),
            ("mu03", self.mu03),
            ("mu04", self.mu04),
            ("mu05", self.mu05),
            ("mu06", self.mu06),
            ("mu_restart", self.mu_restart),
            ("mu1", self.mu1),
            ("mu3", self.mu3),
            ("mu41", self.mu41),
            ("mu42", self.mu42),
            ("lambda0", self.lambda0),
            ("lambda", self.lambda),
        ]
    }

    /// Checks that every weight is finite and non-negative.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in self.fields() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidArgument(format!("weight {name} must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }

    /// Multiplies every weight by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        PenaltyWeights {
            mu01: self.mu01 * factor,
            mu02: self.mu02 * factor,
            mu03: self.mu03 * factor,
            mu04: self.mu04 * factor,
            mu05: self.mu05 * factor,
            mu06: self.mu06 * factor,
            mu_restart: self.mu_restart * factor,
            mu1: self.mu1 * factor,
            mu3: self.mu3 * factor,
            mu41: self.mu41 * factor,
            mu42: self.mu42 * factor,
            lambda0: self.lambda0 * factor,
            lambda: self.lambda * factor,
        }
    }

    pub(crate) fn require_positive(&self, names: &[&str]) -> Result<()> {
        for (name, v) in self.fields() {
            if names.contains(&name) && v <= 0.0 {
                return Err(Error::InvalidArgument(format!("weight {name} must be positive for the selected penalties")));
            }
        }
        Ok(())
    }
}

/// The two weight presets for `n` counterparts, `m` grades and `d`
/// defaults.
///
/// `mu3` is the tabulated concentration weight times `n^2`: the tabulated
/// value weighs squared grade sizes `N_j^2`, while the concentration penalty
/// is written over squared fractions `(N_j / n)^2`.
pub fn preset_weights(set_id: u8, n: usize, m: usize, d: usize) -> Result<PenaltyWeights> {
    let (nf, mf, df) = (n as f64, m as f64, d as f64);
    let nm = nf * mf;
    let (mu01, mu03, mu1, mu3, mu4) = match set_id {
        1 => (nm * nm, 40.0 * nm, 5.0 * df, 10.0 * nf / mf, 5.0 * nf / mf),
        2 => {
            let mu3 = 3.0 * nf / mf;
            (4.0 * nm * nm, 75.0 * nm, 12.0 * df, mu3, mu3 / 2.0)
        }
        _ => return Err(Error::InvalidArgument(format!("unknown weight preset {set_id}, expected 1 or 2"))),
    };
    Ok(PenaltyWeights {
        mu01,
        mu02: 5.0 * nm,
        mu03,
        mu04: mu03,
        mu05: mu03,
        mu06: mu03,
        mu_restart: nm,
        mu1,
        mu3: mu3 * nf * nf,
        mu41: mu4,
        mu42: mu4,
        lambda0: mu03,
        lambda: mu03,
    })
}
