//! Boundary-shift refinement over staircase states.

use crate::dataset::Dataset;
use crate::error::Result;
use crate::qubo::VariableLayout;
use crate::scale::Partition;

use super::compiled::CompiledQubo;
use super::partition_to_state;

/// Staircase whose grade sizes follow the per-grade assignment counts of
/// `state`, repaired to sum to `n` with no empty grade.
pub fn project_to_staircase(state: &[bool], layout: &VariableLayout) -> Result<Partition> {
    let (n, m) = (layout.counterparts(), layout.grades());
    let mut sizes = vec![0usize; m];
    for i in 0..n {
        if let Some(j) = (0..m).find(|&j| state[layout.x(i, j)]) {
            sizes[j] += 1;
        }
    }
    for s in sizes.iter_mut() {
        *s = (*s).max(1);
    }
    let mut total: usize = sizes.iter().sum();
    while total > n {
        let j = (0..m).max_by_key(|&j| (sizes[j], std::cmp::Reverse(j))).expect("m >= 2");
        sizes[j] -= 1;
        total -= 1;
    }
    while total < n {
        let j = (0..m).min_by_key(|&j| (sizes[j], j)).expect("m >= 2");
        sizes[j] += 1;
        total += 1;
    }
    Partition::new(sizes)
}

#[derive(Debug, Clone)]
pub struct Polished {
    pub partition: Partition,
    pub state: Vec<bool>,
    pub energy: f64,
    pub evaluations: u64,
}

/// Best-improvement search over moves that carry a power-of-two number of
/// counterparts from one grade to another, shifting every boundary between
/// them, scored by the full model energy with
/// completed auxiliaries.
pub fn polish_staircase(
    model: &CompiledQubo,
    layout: &VariableLayout,
    ds: &Dataset,
    start: &Partition,
) -> Result<Polished> {
    let score = |sizes: &[usize]| -> Result<(Vec<bool>, f64)> {
        let state = partition_to_state(layout, ds, &Partition::new(sizes.to_vec())?)?;
        let e = model.energy(&state)?;
        Ok((state, e))
    };
    let mut sizes = start.cardinalities().to_vec();
    let (mut state, mut energy) = score(&sizes)?;
    let mut evaluations = 1;
    let n = layout.counterparts();
    loop {
        let mut best: Option<(Vec<usize>, Vec<bool>, f64)> = None;
        for from in 0..sizes.len() {
            let mut step = 1;
            while step < n {
                for to in (0..sizes.len()).filter(|&to| to != from) {
                    if sizes[from] <= step {
                        break;
                    }
                    let mut trial = sizes.clone();
                    trial[from] -= step;
                    trial[to] += step;
                    let (s, e) = score(&trial)?;
                    evaluations += 1;
                    if e < best.as_ref().map_or(energy, |b| b.2) {
                        best = Some((trial, s, e));
                    }
                }
                step *= 2;
            }
        }
        match best {
            Some((trial, s, e)) => {
                sizes = trial;
                state = s;
                energy = e;
            }
            None => break,
        }
    }
    Ok(Polished {
        partition: Partition::new(sizes)?,
        state,
        energy,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baseline::enumerate_partitions;
    use crate::qubo::{compose, preset_weights, ComposeOptions, LayoutOptions};

    #[test]
    fn projection_keeps_counts() {
        let l = VariableLayout::new(6, 3, &LayoutOptions::default()).unwrap();
        let p = Partition::new(vec![1, 2, 3]).unwrap();
        assert_eq!(project_to_staircase(&l.encode_partition(&p).unwrap(), &l).unwrap(), p);
        let empty = vec![false; l.total_variables()];
        assert_eq!(project_to_staircase(&empty, &l).unwrap().total(), 6);
        let mut shuffled = vec![false; l.total_variables()];
        for (i, j) in [(0, 2), (1, 0), (2, 2), (3, 0), (4, 0), (5, 2)] {
            shuffled[l.x(i, j)] = true;
        }
        assert_eq!(project_to_staircase(&shuffled, &l).unwrap().cardinalities(), &[2, 1, 3]);
    }

    #[test]
    fn reaches_best_staircase_on_small_models() {
        let ds = Dataset::from_default_positions(12, &[9, 11, 12]).unwrap();
        let w = preset_weights(1, 12, 3, 3).unwrap();
        let opts = LayoutOptions {
            thresholds: true,
            lower: Some(1),
            upper: Some(6),
            ..Default::default()
        };
        let l = VariableLayout::new(12, 3, &opts).unwrap();
        let model = compose(&l, &w, &ds, &ComposeOptions::default()).unwrap();
        let compiled = CompiledQubo::new(&model);
        let best = enumerate_partitions(12, 3)
            .unwrap()
            .map(|p| compiled.energy(&partition_to_state(&l, &ds, &p).unwrap()).unwrap())
            .fold(f64::INFINITY, f64::min);
        let start = Partition::new(vec![1, 1, 10]).unwrap();
        let r = polish_staircase(&compiled, &l, &ds, &start).unwrap();
        assert!((r.energy - best).abs() <= 1e-9 * best.abs());
        assert_eq!(compiled.energy(&r.state).unwrap(), r.energy);
    }
}
