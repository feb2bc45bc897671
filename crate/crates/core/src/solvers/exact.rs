use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::qubo::QuboModel;

use super::compiled::{CompiledQubo, FieldState};
use super::{mask_to_state, SolveResult, SolverKind};

/// Default largest dimension accepted by [`solve_exact`].
pub const DEFAULT_EXACT_CAP: usize = 26;

/// Hard ceiling on the cap: states are enumerated as 64-bit masks.
const MAX_EXACT_CAP: usize = 40;

/// Minimizers kept in memory; beyond this the list is truncated.
pub const MAX_STORED_MINIMIZERS: usize = 1 << 16;

const PREFIX_BITS: usize = 4;

#[derive(Debug, Default)]
struct Scan {
    best: f64,
    candidates: Vec<u64>,
    /// States within tolerance of the running best, including unstored ones.
    count: u64,
    evaluations: u64,
}

impl Scan {
    fn new() -> Self {
        Scan {
            best: f64::INFINITY,
            ..Default::default()
        }
    }

    fn offer(&mut self, energy: f64, mask: u64, tol: f64) {
        if energy < self.best - tol {
            self.best = energy;
            self.candidates.clear();
            self.count = 0;
        } else if energy > self.best + tol {
            return;
        } else if energy < self.best {
            self.best = energy;
        }
        self.count += 1;
        if self.candidates.len() < MAX_STORED_MINIMIZERS {
            self.candidates.push(mask);
        }
    }

    fn merge(self, other: Scan, tol: f64) -> Scan {
        let evaluations = self.evaluations + other.evaluations;
        let mut out = if other.best < self.best - tol {
            other
        } else if other.best > self.best + tol {
            self
        } else {
            let mut out = self;
            out.best = out.best.min(other.best);
            out.count += other.count;
            let room = MAX_STORED_MINIMIZERS - out.candidates.len();
            out.candidates.extend(other.candidates.into_iter().take(room));
            out
        };
        out.evaluations = evaluations;
        out
    }
}

/// Enumerates the low `free` bits with a Gray code, the high bits fixed to `prefix`.
fn scan_block(model: &CompiledQubo, prefix: u64, free: usize, tol: f64) -> Scan {
    let dim = model.dimension();
    let mut mask = prefix << free;
    let mut fs = FieldState::new(model, mask_to_state(mask, dim));
    let mut scan = Scan::new();
    scan.offer(fs.energy, mask, tol);
    for k in 1u64..1u64 << free {
        let bit = k.trailing_zeros() as usize;
        fs.flip(bit);
        mask ^= 1 << bit;
        scan.offer(fs.energy, mask, tol);
    }
    scan.evaluations = 1u64 << free;
    scan
}

/// Exhaustive minimization by Gray-code enumeration.
///
/// Refuses models above `cap` variables. All global minimizers are returned
/// (up to [`MAX_STORED_MINIMIZERS`]); energies within a relative 1e-9 of the
/// minimum count as ties.
pub fn solve_exact(model: &QuboModel, cap: usize) -> Result<SolveResult> {
    let dim = model.dimension();
    let cap = cap.min(MAX_EXACT_CAP);
    if dim > cap {
        return Err(Error::TooLarge {
            variables: dim,
            states: if dim < 128 {
                format!("2^{dim} = {}", 1u128 << dim)
            } else {
                format!("2^{dim}")
            },
            cap,
        });
    }
    let start = Instant::now();
    let compiled = CompiledQubo::new(model);
    // incremental updates drift; keep a loose window and re-filter exactly below
    let tol = 1e-7 * compiled.magnitude().max(1.0);
    let prefix_bits = PREFIX_BITS.min(dim);
    let free = dim - prefix_bits;
    let scan = (0..1u64 << prefix_bits)
        .into_par_iter()
        .map(|prefix| scan_block(&compiled, prefix, free, tol))
        .reduce(Scan::new, |a, b| a.merge(b, tol));

    let exact: Vec<(u64, f64)> = scan
        .candidates
        .iter()
        .map(|&mask| (mask, compiled.energy(&mask_to_state(mask, dim)).expect("dimension matches")))
        .collect();
    let best = exact.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let tie = 1e-9 * best.abs().max(1.0);
    let minimizers: Vec<u64> = exact.iter().filter(|p| p.1 <= best + tie).map(|p| p.0).collect();
    let truncated = scan.count > scan.candidates.len() as u64;
    let minimizer_count = if truncated { scan.count } else { minimizers.len() as u64 };

    let best_mask = minimizers[0];
    Ok(SolveResult {
        solver: SolverKind::Exact,
        best_state: mask_to_state(best_mask, dim),
        best_energy: best,
        minimizers: Some(minimizers.iter().map(|&m| mask_to_state(m, dim)).collect()),
        minimizer_count: Some(minimizer_count),
        minimizers_truncated: truncated,
        decoded: None,
        diagnosis: None,
        validity: None,
        wall_time: start.elapsed(),
        evaluations: scan.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn naive_argmin(model: &QuboModel) -> (f64, Vec<Vec<bool>>) {
        let dim = model.dimension();
        let energies: Vec<(Vec<bool>, f64)> = (0..1u64 << dim)
            .map(|m| {
                let s = mask_to_state(m, dim);
                let e = model.evaluate(&s).unwrap();
                (s, e)
            })
            .collect();
        let best = energies.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        let tie = 1e-9 * best.abs().max(1.0);
        let mut arg: Vec<Vec<bool>> = energies.into_iter().filter(|p| p.1 <= best + tie).map(|p| p.0).collect();
        arg.sort();
        (best, arg)
    }

    #[test]
    fn matches_naive_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..40 {
            let dim = rng.random_range(1..=12);
            let mut m = QuboModel::new(dim);
            for i in 0..dim {
                // small integer coefficients create ties
                m.add_linear(i, rng.random_range(-2..=2) as f64);
                for j in i + 1..dim {
                    if rng.random_bool(0.4) {
                        m.add_quadratic(i, j, rng.random_range(-2..=2) as f64);
                    }
                }
            }
            let r = solve_exact(&m, DEFAULT_EXACT_CAP).unwrap();
            let (best, mut arg) = naive_argmin(&m);
            let mut got = r.minimizers.clone().unwrap();
            got.sort();
            arg.sort();
            assert_eq!(r.best_energy, best);
            assert_eq!(got, arg);
            assert_eq!(r.minimizer_count, Some(arg.len() as u64));
        }
    }

    #[test]
    fn offset_only_model() {
        let mut m = QuboModel::new(5);
        m.add_offset(3.5);
        let r = solve_exact(&m, DEFAULT_EXACT_CAP).unwrap();
        assert_eq!(r.best_energy, 3.5);
        assert_eq!(r.minimizers.unwrap().len(), 32);
        assert!(!r.minimizers_truncated);
    }

    #[test]
    fn positive_linear_unique_zero() {
        let mut m = QuboModel::new(8);
        for i in 0..8 {
            m.add_linear(i, 1.0);
        }
        let r = solve_exact(&m, DEFAULT_EXACT_CAP).unwrap();
        assert_eq!(r.minimizers.unwrap(), vec![vec![false; 8]]);
        assert_eq!(r.best_energy, 0.0);
    }

    #[test]
    fn refuses_above_cap() {
        let m = QuboModel::new(27);
        let err = solve_exact(&m, DEFAULT_EXACT_CAP).unwrap_err();
        assert!(err.to_string().contains("2^27"), "{err}");
    }

    #[test]
    fn truncates_huge_tie_sets() {
        let m = QuboModel::new(18);
        let r = solve_exact(&m, DEFAULT_EXACT_CAP).unwrap();
        assert!(r.minimizers_truncated);
        assert_eq!(r.minimizer_count, Some(1 << 18));
        assert_eq!(r.minimizers.unwrap().len(), MAX_STORED_MINIMIZERS);
    }

    #[test]
    fn zero_dimension() {
        let mut m = QuboModel::new(0);
        m.add_offset(-1.0);
        let r = solve_exact(&m, DEFAULT_EXACT_CAP).unwrap();
        assert_eq!(r.best_energy, -1.0);
        assert_eq!(r.minimizers.unwrap(), vec![Vec::<bool>::new()]);
    }
}
