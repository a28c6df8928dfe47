//! Labeler assignment for a fixed query set.
//!
//! Given queries sorted by entropy (descending) and a panel sorted by
//! accuracy (descending), the min-max-noise assignment has a closed form:
//! hand the highest-entropy queries to the most accurate labeler until its
//! capacity is used, then continue down the panel. [`brute_force_minmax`]
//! enumerates every feasible assignment and exists purely as a test oracle
//! for that closed form. [`random_assignment`] is the RLA baseline.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::domain::LabelerPanel;
use crate::noise::NoiseSpec;
use crate::{Error, Result};

/// An assignment of query positions to labelers.
///
/// `pairs[j]` is the panel index labeling the query at position `j` (queries
/// are positioned in descending entropy order). Every position is assigned
/// exactly once and no labeler exceeds its capacity.
#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentPlan {
    pub pairs: Vec<usize>,
    pub per_pair_noise: Vec<f64>,
    pub max_noise: f64,
}

fn check_sorted_desc(entropies: &[f64]) -> Result<()> {
    for (i, w) in entropies.windows(2).enumerate() {
        if w[1] > w[0] {
            return Err(Error::invalid(format!(
                "entropies must be sorted non-increasing (violated at index {i})"
            )));
        }
    }
    Ok(())
}

/// Min-max-noise assignment of sorted queries to the sorted panel.
///
/// Position `j` (0-based) goes to the first labeler whose cumulative
/// capacity exceeds `j`. The pair structure depends only on capacities and
/// the query count; the noise function affects only the reported noise
/// values.
pub fn optimal_assignment(
    entropies: &[f64],
    panel: &LabelerPanel,
    noise: &NoiseSpec,
) -> Result<AssignmentPlan> {
    check_sorted_desc(entropies)?;
    let n = entropies.len();
    if n > panel.total_capacity() {
        return Err(Error::invalid(format!(
            "{n} queries exceed total capacity {}",
            panel.total_capacity()
        )));
    }
    let mut pairs = Vec::with_capacity(n);
    let mut per_pair_noise = Vec::with_capacity(n);
    let mut labeler = 0usize;
    let mut used = 0usize;
    for &e in entropies {
        while used >= panel.capacity(labeler) {
            labeler += 1;
            used = 0;
        }
        pairs.push(labeler);
        per_pair_noise.push(noise.eval(panel.accuracy(labeler), e)?);
        used += 1;
    }
    let max_noise = per_pair_noise.iter().cloned().fold(0.0, f64::max);
    Ok(AssignmentPlan {
        pairs,
        per_pair_noise,
        max_noise,
    })
}

/// Enumeration guard for the brute-force oracles.
pub const MAX_BRUTE_QUERIES: usize = 8;
pub const MAX_BRUTE_LABELERS: usize = 3;

/// Exhaustive minimum of the maximum pair noise over every feasible
/// assignment. Test oracle only; guarded to small instances.
pub fn brute_force_minmax(
    entropies: &[f64],
    panel: &LabelerPanel,
    noise: &NoiseSpec,
) -> Result<(f64, Vec<usize>)> {
    check_sorted_desc(entropies)?;
    let n = entropies.len();
    let m = panel.len();
    if n > MAX_BRUTE_QUERIES || m > MAX_BRUTE_LABELERS {
        return Err(Error::TooLarge(format!(
            "{n} queries x {m} labelers (limits {MAX_BRUTE_QUERIES} x {MAX_BRUTE_LABELERS})"
        )));
    }
    if n > panel.total_capacity() {
        return Err(Error::invalid(format!(
            "{n} queries exceed total capacity {}",
            panel.total_capacity()
        )));
    }
    // eps values per (labeler, position)
    let mut eps = vec![vec![0.0; n]; m];
    for (i, row) in eps.iter_mut().enumerate() {
        for (j, &e) in entropies.iter().enumerate() {
            row[j] = noise.eval(panel.accuracy(i), e)?;
        }
    }
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut assignment = vec![0usize; n];
    let mut remaining: Vec<usize> = (0..m).map(|i| panel.capacity(i)).collect();
    fn recurse(
        j: usize,
        n: usize,
        m: usize,
        eps: &[Vec<f64>],
        assignment: &mut Vec<usize>,
        remaining: &mut Vec<usize>,
        current_max: f64,
        best: &mut Option<(f64, Vec<usize>)>,
    ) {
        if j == n {
            match best {
                Some((v, _)) if *v <= current_max => {}
                _ => *best = Some((current_max, assignment.clone())),
            }
            return;
        }
        for i in 0..m {
            if remaining[i] == 0 {
                continue;
            }
            remaining[i] -= 1;
            assignment[j] = i;
            recurse(
                j + 1,
                n,
                m,
                eps,
                assignment,
                remaining,
                current_max.max(eps[i][j]),
                best,
            );
            remaining[i] += 1;
        }
    }
    recurse(
        0,
        n,
        m,
        &eps,
        &mut assignment,
        &mut remaining,
        0.0,
        &mut best,
    );
    best.ok_or_else(|| Error::invalid("no feasible assignment"))
}

/// Uniform random feasible assignment (the RLA baseline): shuffle a multiset
/// with labeler `i` repeated `c_i` times, truncate to the query count, and
/// pair positionally.
pub fn random_assignment<R: Rng + ?Sized>(
    num_queries: usize,
    panel: &LabelerPanel,
    rng: &mut R,
) -> Result<Vec<usize>> {
    if num_queries > panel.total_capacity() {
        return Err(Error::invalid(format!(
            "{num_queries} queries exceed total capacity {}",
            panel.total_capacity()
        )));
    }
    let mut slots: Vec<usize> = Vec::with_capacity(panel.total_capacity());
    for i in 0..panel.len() {
        slots.extend(std::iter::repeat(i).take(panel.capacity(i)));
    }
    slots.shuffle(rng);
    slots.truncate(num_queries);
    Ok(slots)
}
