use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scale::Partition;

/// Number of binary digits needed to represent `0..=k`, i.e. floor(1 + log2 k).
pub fn slack_width(k: usize) -> usize {
    (usize::BITS - k.leading_zeros()) as usize
}

/// Grade size bounds `(max(1, floor(n/100)), ceil(15n/100))`.
///
/// The lower bound is clamped to 1 so that small populations cannot produce
/// empty grades.
pub fn default_thresholds(n: usize) -> (usize, usize) {
    ((n / 100).max(1), (15 * n).div_ceil(100))
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutOptions {
    /// Reserve slack blocks for the grade cardinality bounds.
    pub thresholds: bool,
    /// Overrides for the lower / upper grade size bound.
    pub lower: Option<usize>,
    pub upper: Option<usize>,
    /// Reserve the auxiliary blocks of the exact monotonicity encoding for a
    /// population with this many defaults.
    pub exact_monotonicity_defaults: Option<usize>,
}

impl LayoutOptions {
    pub fn with_thresholds() -> Self {
        LayoutOptions {
            thresholds: true,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdBlock {
    pub lower: usize,
    pub upper: usize,
    pub lower_bits: usize,
    pub upper_bits: usize,
    lower_offset: usize,
    upper_offset: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactMonotonicityBlock {
    pub defaults: usize,
    /// Width of each per-pair slack integer, floor(1 + log2((n - d) d)).
    pub slack_bits: usize,
    pub products: usize,
    y_offset: usize,
    slack_offset: usize,
}

/// Map from (counterpart, grade) pairs and auxiliary blocks to flat indices.
///
/// Blocks, in order: x (n*m, row-major by counterpart), lower-bound slacks
/// (m per bit), upper-bound slacks, product variables y, and the per-pair
/// monotonicity slacks ((m-1) per bit).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableLayout {
    n: usize,
    m: usize,
    thresholds: Option<ThresholdBlock>,
    exact: Option<ExactMonotonicityBlock>,
    total: usize,
}

impl VariableLayout {
    pub fn new(n: usize, m: usize, options: &LayoutOptions) -> Result<Self> {
        if m < 2 || m > n {
            return Err(Error::InvalidArgument(format!("need 2 <= m <= n, got n={n}, m={m}")));
        }
        let mut next = n * m;

        let thresholds = if options.thresholds {
            let (default_lower, default_upper) = default_thresholds(n);
            let lower = options.lower.unwrap_or(default_lower);
            let upper = options.upper.unwrap_or(default_upper);
            if lower > upper {
                return Err(Error::InfeasibleThresholds(format!(
                    "lower bound {lower} exceeds upper bound {upper}"
                )));
            }
            if m * lower > n {
                return Err(Error::InfeasibleThresholds(format!(
                    "m*lambda1 <= n violated: {m}*{lower} = {} > {n}",
                    m * lower
                )));
            }
            if n > m * upper {
                return Err(Error::InfeasibleThresholds(format!(
                    "n <= m*lambda2 violated: {n} > {m}*{upper} = {}",
                    m * upper
                )));
            }
            let lower_bits = slack_width(n - lower);
            let upper_bits = slack_width(upper);
            let block = ThresholdBlock {
                lower,
                upper,
                lower_bits,
                upper_bits,
                lower_offset: next,
                upper_offset: next + m * lower_bits,
            };
            next += m * (lower_bits + upper_bits);
            Some(block)
        } else {
            None
        };

        let exact = match options.exact_monotonicity_defaults {
            Some(d) => {
                if d == 0 || d >= n {
                    return Err(Error::InvalidArgument(format!(
                        "exact monotonicity needs 1 <= d <= n-1, got d={d} for n={n}"
                    )));
                }
                let pairs = (n - d) * d;
                let block = ExactMonotonicityBlock {
                    defaults: d,
                    slack_bits: slack_width(pairs),
                    products: 2 * (m - 1) * pairs,
                    y_offset: next,
                    slack_offset: next + 2 * (m - 1) * pairs,
                };
                next += block.products + (m - 1) * block.slack_bits;
                Some(block)
            }
            None => None,
        };

        Ok(VariableLayout {
            n,
            m,
            thresholds,
            exact,
            total: next,
        })
    }

    pub fn counterparts(&self) -> usize {
        self.n
    }

    pub fn grades(&self) -> usize {
        self.m
    }

    pub fn total_variables(&self) -> usize {
        self.total
    }

    pub fn assignment_variables(&self) -> usize {
        self.n * self.m
    }

    pub fn thresholds(&self) -> Option<&ThresholdBlock> {
        self.thresholds.as_ref()
    }

    pub fn exact_monotonicity(&self) -> Option<&ExactMonotonicityBlock> {
        self.exact.as_ref()
    }

    /// Index of x_{ij} for 0-based counterpart `i` and grade `j`.
    #[inline]
    pub fn x(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.n && j < self.m);
        i * self.m + j
    }

    /// Index of bit `l` of the lower-bound slack of grade `j`.
    pub fn lower_slack(&self, l: usize, j: usize) -> usize {
        let t = self.thresholds.as_ref().expect("layout has no threshold block");
        debug_assert!(l < t.lower_bits && j < self.m);
        t.lower_offset + l * self.m + j
    }

    pub fn upper_slack(&self, l: usize, j: usize) -> usize {
        let t = self.thresholds.as_ref().expect("layout has no threshold block");
        debug_assert!(l < t.upper_bits && j < self.m);
        t.upper_offset + l * self.m + j
    }

    /// Index of the product variable with rank `t`.
    pub fn product(&self, t: usize) -> usize {
        let e = self.exact.as_ref().expect("layout has no exact monotonicity block");
        debug_assert!(t < e.products);
        e.y_offset + t
    }

    /// Index of bit `l` of the slack for grade pair (`j`, `j`+1).
    pub fn pair_slack(&self, l: usize, j: usize) -> usize {
        let e = self.exact.as_ref().expect("layout has no exact monotonicity block");
        debug_assert!(l < e.slack_bits && j + 1 < self.m);
        e.slack_offset + l * (self.m - 1) + j
    }

    /// One-hot groups of the assignment block: the m variables of each counterpart.
    pub fn assignment_rows(&self) -> Vec<Vec<usize>> {
        (0..self.n).map(|i| (0..self.m).map(|j| self.x(i, j)).collect()).collect()
    }

    /// Binary staircase encoding of `p`, with threshold slacks set to their
    /// best values and all other auxiliary bits cleared.
    pub fn encode_partition(&self, p: &Partition) -> Result<Vec<bool>> {
        if p.total() != self.n || p.grades() != self.m {
            return Err(Error::LayoutMismatch(format!(
                "partition of {} into {} grades does not fit a layout with n={}, m={}",
                p.total(),
                p.grades(),
                self.n,
                self.m
            )));
        }
        let mut state = vec![false; self.total];
        for (j, range) in p.ranges().enumerate() {
            for i in range {
                state[self.x(i, j)] = true;
            }
        }
        self.complete_threshold_slacks(&mut state);
        Ok(state)
    }

    /// Sets the threshold slack bits to minimize the cardinality penalty for
    /// the grade sizes currently encoded in `state`.
    pub fn complete_threshold_slacks(&self, state: &mut [bool]) {
        let Some(t) = self.thresholds else { return };
        for j in 0..self.m {
            let size = (0..self.n).filter(|&i| state[self.x(i, j)]).count();
            let lower = best_slack(size as i64 - t.lower as i64, t.lower_bits);
            let upper = best_slack(t.upper as i64 - size as i64, t.upper_bits);
            for l in 0..t.lower_bits {
                state[self.lower_slack(l, j)] = lower >> l & 1 == 1;
            }
            for l in 0..t.upper_bits {
                state[self.upper_slack(l, j)] = upper >> l & 1 == 1;
            }
        }
    }
}

/// Slack value in `[0, 2^bits)` closest to `residual`.
pub(crate) fn best_slack(residual: i64, bits: usize) -> u64 {
    let max = (1u64 << bits) - 1;
    residual.clamp(0, max as i64) as u64
}
