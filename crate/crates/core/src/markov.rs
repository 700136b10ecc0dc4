//! The Markov chain of asynchronous iterations under a uniform strategy.
//!
//! With the strategy index drawn uniformly from `1..=n` at each step, the
//! distribution `pi^t` of the configuration evolves as `pi^(t+1) = pi^t M`
//! where `M[j][i] = counts[j][i] / n` and `counts[j][i]` is the number of
//! directions `k` with `F_f(k, j) = i`. Counts are kept as integers so that
//! the structural checks are exact; only [`evolve`] and [`mixing_time`] use
//! floating point.

use std::collections::VecDeque;

use crate::dynamics::BooleanMap;
use crate::error::{Error, Result};
use crate::MAX_ANALYSIS_BITS;

/// Exact count matrix, stored by rows. Each row has at most `n` non-zero
/// entries and always sums to `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkovMatrix {
    n: usize,
    // (target, count), sorted by target
    rows: Vec<Vec<(u32, u8)>>,
}

/// Builds the count matrix of `f`, `n <= 12`.
pub fn build_markov<F: BooleanMap + ?Sized>(f: &F) -> Result<MarkovMatrix> {
    let n = f.dimension();
    if n == 0 {
        return Err(Error::EmptyConfiguration);
    }
    if n > MAX_ANALYSIS_BITS {
        return Err(Error::Capacity { n, limit: MAX_ANALYSIS_BITS });
    }
    let rows = (0..1u64 << n)
        .map(|j| {
            let mut targets: Vec<u32> = (1..=n).map(|k| f.step_index(k, j) as u32).collect();
            targets.sort_unstable();
            let mut row: Vec<(u32, u8)> = Vec::with_capacity(n);
            for t in targets {
                match row.last_mut() {
                    Some((last, count)) if *last == t => *count += 1,
                    _ => row.push((t, 1)),
                }
            }
            row
        })
        .collect();
    Ok(MarkovMatrix { n, rows })
}

/// Period of the chain and whether it is primitive (period 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Periodicity {
    pub period: u64,
    pub primitive: bool,
}

impl MarkovMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn states(&self) -> usize {
        self.rows.len()
    }

    /// `counts[j][i]`.
    pub fn count(&self, j: usize, i: usize) -> u8 {
        self.rows[j]
            .binary_search_by_key(&(i as u32), |&(t, _)| t)
            .map(|pos| self.rows[j][pos].1)
            .unwrap_or(0)
    }

    /// Non-zero `(target, count)` pairs of row `j`.
    pub fn row(&self, j: usize) -> &[(u32, u8)] {
        &self.rows[j]
    }

    pub fn to_dense_counts(&self) -> Vec<Vec<u8>> {
        let size = self.states();
        self.rows
            .iter()
            .map(|row| {
                let mut dense = vec![0u8; size];
                for &(t, c) in row {
                    dense[t as usize] = c;
                }
                dense
            })
            .collect()
    }

    pub fn row_sums(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.iter().map(|&(_, c)| c as usize).sum()).collect()
    }

    pub fn column_sums(&self) -> Vec<usize> {
        let mut sums = vec![0usize; self.states()];
        for row in &self.rows {
            for &(t, c) in row {
                sums[t as usize] += c as usize;
            }
        }
        sums
    }

    /// Every column of the count matrix sums to exactly `n`.
    pub fn is_doubly_stochastic(&self) -> bool {
        self.column_sums().iter().all(|&s| s == self.n)
    }

    /// Period of the positive-support graph, from the breadth-first levels
    /// of state 0: `gcd(level(u) + 1 - level(v))` over all arcs `u -> v`.
    ///
    /// Fails unless the support graph is strongly connected.
    pub fn period_and_primitivity(&self) -> Result<Periodicity> {
        let size = self.states();
        let mut level = vec![u64::MAX; size];
        let mut queue = VecDeque::from([0usize]);
        level[0] = 0;
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &self.rows[u] {
                if level[v as usize] == u64::MAX {
                    level[v as usize] = level[u] + 1;
                    queue.push_back(v as usize);
                }
            }
        }
        if level.contains(&u64::MAX) || !self.all_reach_zero() {
            return Err(Error::NotStronglyConnected);
        }
        let mut period = 0u64;
        for (u, row) in self.rows.iter().enumerate() {
            for &(v, _) in row {
                let diff = (level[u] + 1).abs_diff(level[v as usize]);
                period = gcd(period, diff);
            }
        }
        Ok(Periodicity { period, primitive: period == 1 })
    }

    fn all_reach_zero(&self) -> bool {
        let size = self.states();
        let mut reverse: Vec<Vec<u32>> = vec![Vec::new(); size];
        for (u, row) in self.rows.iter().enumerate() {
            for &(v, _) in row {
                reverse[v as usize].push(u as u32);
            }
        }
        let mut seen = vec![false; size];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &u in &reverse[v] {
                if !seen[u as usize] {
                    seen[u as usize] = true;
                    stack.push(u as usize);
                }
            }
        }
        seen.iter().all(|&s| s)
    }

    /// One step `pi M`. Summation order is fixed (source ascending, then
    /// target ascending) so results are reproducible bit for bit.
    fn step(&self, pi: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        let n = self.n as f64;
        for (j, row) in self.rows.iter().enumerate() {
            let mass = pi[j];
            if mass == 0.0 {
                continue;
            }
            for &(i, c) in row {
                out[i as usize] += mass * (c as f64) / n;
            }
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// A probability vector over the `2^n` configurations.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionVector {
    n: usize,
    probabilities: Vec<f64>,
}

impl DistributionVector {
    pub fn new(n: usize, probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.len() != 1 << n {
            return Err(Error::LengthMismatch { expected: 1 << n, actual: probabilities.len() });
        }
        if probabilities.iter().any(|&p| p.is_nan() || p < 0.0) {
            return Err(Error::InvalidParameter("probabilities must be non-negative".into()));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self { n, probabilities })
    }

    pub fn uniform(n: usize) -> Self {
        let size = 1usize << n;
        Self { n, probabilities: vec![1.0 / size as f64; size] }
    }

    pub fn point_mass(n: usize, state: usize) -> Result<Self> {
        let size = 1usize << n;
        if state >= size {
            return Err(Error::ValueOutOfRange { value: state as u64, bits: n });
        }
        let mut probabilities = vec![0.0; size];
        probabilities[state] = 1.0;
        Ok(Self { n, probabilities })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn total_variation(&self, other: &Self) -> f64 {
        total_variation(&self.probabilities, &other.probabilities)
    }

    pub fn distance_to_uniform(&self) -> f64 {
        distance_to_uniform(&self.probabilities)
    }
}

/// `(1/2) sum |a_i - b_i|`.
pub fn total_variation(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

fn distance_to_uniform(p: &[f64]) -> f64 {
    let u = 1.0 / p.len() as f64;
    0.5 * p.iter().map(|x| (x - u).abs()).sum::<f64>()
}

/// `pi0 M^t`.
pub fn evolve(pi0: &DistributionVector, m: &MarkovMatrix, t: u64) -> Result<DistributionVector> {
    if pi0.n != m.n {
        return Err(Error::LengthMismatch { expected: m.states(), actual: pi0.probabilities.len() });
    }
    let mut current = pi0.probabilities.clone();
    let mut next = vec![0.0; current.len()];
    for _ in 0..t {
        m.step(&current, &mut next);
        std::mem::swap(&mut current, &mut next);
    }
    Ok(DistributionVector { n: m.n, probabilities: current })
}

/// Result of [`mixing_time`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mixing {
    /// Least `q` reaching the target distance, if any within the budget.
    pub q: Option<u64>,
    /// Distance at `q`, or at `t_max` when `q` is `None`.
    pub final_tv: f64,
}

/// Default step budget, `4^n`.
pub fn default_t_max(n: usize) -> u64 {
    1u64.checked_shl(2 * n as u32).unwrap_or(u64::MAX)
}

/// Least `q <= t_max` with `TV(e_0 M^q, uniform) < epsilon`.
pub fn mixing_time(m: &MarkovMatrix, epsilon: f64, t_max: u64) -> Result<Mixing> {
    mixing_time_from(m, 0, epsilon, t_max)
}

// How many past iterates are kept to detect an exactly repeating sequence.
const CYCLE_WINDOW: usize = 8;

/// [`mixing_time`] started from the point mass at `start`.
///
/// The floating-point iteration is deterministic, so once an iterate equals
/// one of the previous few bit for bit the rest of the run is periodic and
/// the distance at `t_max` is read off the cycle instead of simulated.
pub fn mixing_time_from(m: &MarkovMatrix, start: usize, epsilon: f64, t_max: u64) -> Result<Mixing> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    let mut current = DistributionVector::point_mass(m.n, start)?.probabilities;
    let mut next = vec![0.0; current.len()];
    // (t, distribution, tv) for the last few steps
    let mut history: VecDeque<(u64, Vec<f64>, f64)> = VecDeque::with_capacity(CYCLE_WINDOW + 1);

    let mut tv = distance_to_uniform(&current);
    if tv < epsilon {
        return Ok(Mixing { q: Some(0), final_tv: tv });
    }
    history.push_back((0, current.clone(), tv));

    for t in 1..=t_max {
        m.step(&current, &mut next);
        std::mem::swap(&mut current, &mut next);
        tv = distance_to_uniform(&current);
        if tv < epsilon {
            return Ok(Mixing { q: Some(t), final_tv: tv });
        }
        if let Some((t0, _, _)) = history.iter().rev().find(|(_, p, _)| *p == current) {
            // iterates from t0 on repeat with period t - t0
            let cycle = t - t0;
            let offset = (t_max - t0) % cycle;
            let at = t0 + offset;
            let final_tv = history
                .iter()
                .find(|(s, _, _)| *s == at)
                .map(|&(_, _, d)| d)
                .unwrap_or(tv);
            return Ok(Mixing { q: None, final_tv });
        }
        if history.len() == CYCLE_WINDOW {
            history.pop_front();
        }
        history.push_back((t, current.clone(), tv));
    }
    Ok(Mixing { q: None, final_tv: tv })
}
