use crate::error::{Error, Result};
use crate::qubo::QuboModel;

/// Adjacency-list form of a [`QuboModel`] for incremental evaluation.
#[derive(Debug, Clone)]
pub struct CompiledQubo {
    offset: f64,
    linear: Vec<f64>,
    start: Vec<usize>,
    neighbors: Vec<usize>,
    weights: Vec<f64>,
}

impl CompiledQubo {
    pub fn new(model: &QuboModel) -> Self {
        let n = model.dimension();
        let mut linear = vec![0.0; n];
        for (&i, &c) in model.linear() {
            linear[i] = c;
        }
        let mut degree = vec![0usize; n];
        for &(i, j) in model.quadratic().keys() {
            degree[i] += 1;
            degree[j] += 1;
        }
        let mut start = vec![0usize; n + 1];
        for i in 0..n {
            start[i + 1] = start[i] + degree[i];
        }
        let mut fill = start.clone();
        let mut neighbors = vec![0usize; start[n]];
        let mut weights = vec![0.0; start[n]];
        // keys (k, i) with k < i precede keys (i, j), so every adjacency list ends up sorted
        for (&(i, j), &c) in model.quadratic() {
            neighbors[fill[i]] = j;
            weights[fill[i]] = c;
            fill[i] += 1;
            neighbors[fill[j]] = i;
            weights[fill[j]] = c;
            fill[j] += 1;
        }
        CompiledQubo {
            offset: model.offset(),
            linear,
            start,
            neighbors,
            weights,
        }
    }

    pub fn dimension(&self) -> usize {
        self.linear.len()
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn linear(&self, i: usize) -> f64 {
        self.linear[i]
    }

    /// Neighbors of `i` with their coupling, sorted by index.
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.start[i]..self.start[i + 1];
        self.neighbors[r.clone()].iter().copied().zip(self.weights[r].iter().copied())
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        let r = self.start[i]..self.start[i + 1];
        match self.neighbors[r.clone()].binary_search(&j) {
            Ok(k) => self.weights[r.start + k],
            Err(_) => 0.0,
        }
    }

    pub(crate) fn check_state(&self, state: &[bool]) -> Result<()> {
        if state.len() != self.dimension() {
            return Err(Error::StateLength {
                expected: self.dimension(),
                actual: state.len(),
            });
        }
        Ok(())
    }

    pub fn energy(&self, state: &[bool]) -> Result<f64> {
        self.check_state(state)?;
        let mut e = self.offset;
        for i in 0..self.dimension() {
            if state[i] {
                e += self.linear[i];
                for (j, w) in self.neighbors(i) {
                    if j > i && state[j] {
                        e += w;
                    }
                }
            }
        }
        Ok(e)
    }

    /// `linear_i + sum_j Q_ij x_j`: the energy change of setting bit `i`
    /// from 0 to 1 with all other bits fixed.
    pub fn local_field(&self, state: &[bool], i: usize) -> f64 {
        self.linear[i] + self.neighbors(i).filter(|&(j, _)| state[j]).map(|(_, w)| w).sum::<f64>()
    }

    pub fn local_fields(&self, state: &[bool]) -> Vec<f64> {
        (0..self.dimension()).map(|i| self.local_field(state, i)).collect()
    }

    /// Smallest nonzero absolute coefficient, if any.
    pub fn smallest_coefficient(&self) -> Option<f64> {
        self.linear
            .iter()
            .chain(self.weights.iter())
            .map(|c| c.abs())
            .filter(|&c| c > 0.0)
            .min_by(f64::total_cmp)
    }

    /// Sum of absolute coefficients, a scale for tolerances.
    pub fn magnitude(&self) -> f64 {
        self.offset.abs() + self.linear.iter().map(|c| c.abs()).sum::<f64>() + self.weights.iter().map(|c| c.abs()).sum::<f64>() / 2.0
    }
}

/// Energy change of flipping `flip` in `state`, in time proportional to the
/// variable's neighborhood.
pub fn delta_energy(model: &CompiledQubo, state: &[bool], flip: usize) -> f64 {
    let field = model.local_field(state, flip);
    if state[flip] {
        -field
    } else {
        field
    }
}

/// Local fields kept in step with a state under single-bit flips.
#[derive(Debug, Clone)]
pub(crate) struct FieldState<'a> {
    pub model: &'a CompiledQubo,
    pub state: Vec<bool>,
    pub fields: Vec<f64>,
    pub energy: f64,
}

impl<'a> FieldState<'a> {
    pub fn new(model: &'a CompiledQubo, state: Vec<bool>) -> Self {
        let fields = model.local_fields(&state);
        let energy = model.energy(&state).expect("state length matches model");
        FieldState {
            model,
            state,
            fields,
            energy,
        }
    }

    #[inline]
    pub fn delta(&self, i: usize) -> f64 {
        if self.state[i] {
            -self.fields[i]
        } else {
            self.fields[i]
        }
    }

    /// Energy change of flipping both `a` and `b`.
    #[inline]
    pub fn pair_delta(&self, a: usize, b: usize) -> f64 {
        let sa = if self.state[a] { -1.0 } else { 1.0 };
        let sb = if self.state[b] { -1.0 } else { 1.0 };
        sa * self.fields[a] + sb * self.fields[b] + self.model.coupling(a, b) * sa * sb
    }

    pub fn flip(&mut self, i: usize) {
        let delta = self.delta(i);
        let sign = if self.state[i] { -1.0 } else { 1.0 };
        self.state[i] = !self.state[i];
        self.energy += delta;
        for (j, w) in self.model.neighbors(i) {
            self.fields[j] += sign * w;
        }
    }

    /// Flips the most improving bit; returns false at a 1-flip local minimum.
    pub fn descend_once(&mut self) -> bool {
        let eps = 1e-12 * self.energy.abs().max(1.0);
        let mut best = (-eps, None);
        for i in 0..self.state.len() {
            let d = self.delta(i);
            if d < best.0 {
                best = (d, Some(i));
            }
        }
        match best.1 {
            Some(i) => {
                self.flip(i);
                true
            }
            None => false,
        }
    }

    pub fn descend(&mut self) -> u64 {
        let mut steps = 0;
        while self.descend_once() {
            steps += 1;
        }
        steps
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_model(rng: &mut ChaCha8Rng, dim: usize, density: f64) -> QuboModel {
        let mut m = QuboModel::new(dim);
        m.add_offset(rng.random_range(-1.0..1.0));
        for i in 0..dim {
            m.add_linear(i, rng.random_range(-1.0..1.0));
            for j in i + 1..dim {
                if rng.random_bool(density) {
                    m.add_quadratic(i, j, rng.random_range(-1.0..1.0));
                }
            }
        }
        m
    }

    #[test]
    fn delta_matches_full_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let dim = rng.random_range(1..30);
            let model = random_model(&mut rng, dim, 0.3);
            let c = CompiledQubo::new(&model);
            let mut state: Vec<bool> = (0..dim).map(|_| rng.random()).collect();
            let i = rng.random_range(0..dim);
            let before = model.evaluate(&state).unwrap();
            let d = delta_energy(&c, &state, i);
            state[i] = !state[i];
            let after = model.evaluate(&state).unwrap();
            assert!((after - before - d).abs() <= 1e-9 * (1.0 + before.abs()));
        }
    }

    #[test]
    fn double_flip_cancels_and_isolated_delta() {
        let mut m = QuboModel::new(3);
        m.add_linear(2, 4.5);
        m.add_quadratic(0, 1, -2.0);
        let c = CompiledQubo::new(&m);
        let state = vec![false; 3];
        assert_eq!(delta_energy(&c, &state, 2), 4.5);
        let mut fs = FieldState::new(&c, vec![true, false, true]);
        let e0 = fs.energy;
        let d1 = fs.delta(1);
        fs.flip(1);
        let d2 = fs.delta(1);
        fs.flip(1);
        assert_eq!(d1 + d2, 0.0);
        assert_eq!(fs.energy, e0);
    }

    #[test]
    fn energy_and_pair_delta() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let model = random_model(&mut rng, 12, 0.5);
            let c = CompiledQubo::new(&model);
            let state: Vec<bool> = (0..12).map(|_| rng.random()).collect();
            let e = model.evaluate(&state).unwrap();
            assert!((c.energy(&state).unwrap() - e).abs() < 1e-12);
            let fs = FieldState::new(&c, state.clone());
            let (a, b) = (rng.random_range(0..12), rng.random_range(0..12));
            if a == b {
                continue;
            }
            let mut s = state.clone();
            s[a] = !s[a];
            s[b] = !s[b];
            let expected = model.evaluate(&s).unwrap() - e;
            assert!((fs.pair_delta(a, b) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn descent_reaches_local_minimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let model = random_model(&mut rng, 40, 0.2);
        let c = CompiledQubo::new(&model);
        let mut fs = FieldState::new(&c, (0..40).map(|_| rng.random()).collect());
        fs.descend();
        for i in 0..40 {
            assert!(delta_energy(&c, &fs.state, i) >= -1e-9);
        }
        assert!((fs.energy - model.evaluate(&fs.state).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn state_length_checked() {
        let c = CompiledQubo::new(&QuboModel::new(3));
        assert!(c.energy(&[true]).is_err());
    }
}
