//! Query-selection strategies.
//!
//! Three selection routes feed the AL engine: plain random sampling, entropy
//! sampling (take the highest-entropy points up to the budget), and the joint
//! noise-bounded selection-and-assignment solver [`olas_select`]. The joint
//! solver maximizes the summed entropy of the selected points subject to
//! labeler capacities, a per-pair noise bound `eps(a_i, e_j) <= beta`, and
//! the min-max assignment policy (better labelers take higher-entropy
//! points; a labeler with unused capacity starves all less accurate ones).
//! [`brute_force_model4`] enumerates the full feasible set as a test oracle.

use rand::Rng;

use crate::domain::{EntropyTable, LabelerPanel, SampleId};
use crate::noise::NoiseSpec;
use crate::{Error, Result};

/// One selected query: which sample, its rank in the entropy table, and the
/// labeler it is assigned to.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryAssignment {
    pub sample_id: SampleId,
    pub rank: usize,
    pub entropy: f64,
    pub labeler: usize,
}

/// Solution of the joint selection-and-assignment problem for one cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryPlan {
    /// Selected queries in ascending rank order (descending entropy).
    pub assignments: Vec<QueryAssignment>,
    /// Per labeler: the first rank it labels, if it labels anything.
    pub thresholds: Vec<Option<usize>>,
    /// Per labeler: whether capacity was left unused.
    pub slack: Vec<bool>,
    /// Sum of the selected entropies.
    pub objective: f64,
}

impl QueryPlan {
    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn selected_ids(&self) -> Vec<SampleId> {
        self.assignments.iter().map(|a| a.sample_id).collect()
    }
}

/// Top-`budget` entries of the entropy table (ties already resolved by the
/// table's ordering).
pub fn entropy_sampling(table: &EntropyTable, budget: usize) -> Result<Vec<SampleId>> {
    if table.is_empty() {
        return Err(Error::invalid("entropy sampling on an empty table"));
    }
    if budget == 0 {
        return Err(Error::invalid("budget must be at least 1"));
    }
    Ok(table
        .entries()
        .iter()
        .take(budget)
        .map(|(id, _)| *id)
        .collect())
}

/// Uniform sample without replacement of size `min(budget, pool size)`.
pub fn random_sampling<R: Rng + ?Sized>(
    pool: &[SampleId],
    budget: usize,
    rng: &mut R,
) -> Result<Vec<SampleId>> {
    if pool.is_empty() {
        return Err(Error::invalid("random sampling from an empty pool"));
    }
    if budget == 0 {
        return Err(Error::invalid("budget must be at least 1"));
    }
    let amount = budget.min(pool.len());
    let picks = rand::seq::index::sample(rng, pool.len(), amount);
    Ok(picks.into_iter().map(|i| pool[i]).collect())
}

/// Closed-form solution of the joint selection-and-assignment problem.
///
/// Working down the panel, labeler `i` starts at rank
/// `r_i = max(r_{i-1} + c_{i-1}, first rank with eps(a_i, e_r) <= beta)` and
/// takes the next `c_i` ranks (clipped to the table). If no admissible rank
/// remains, this labeler and every less accurate one receive nothing. The
/// noise bound can leave the plan smaller than the total capacity, including
/// empty.
pub fn olas_select(
    table: &EntropyTable,
    panel: &LabelerPanel,
    noise: &NoiseSpec,
    beta: f64,
) -> Result<QueryPlan> {
    if !(0.0..=1.0).contains(&beta) || !beta.is_finite() {
        return Err(Error::invalid(format!("beta {beta} outside [0, 1]")));
    }
    let entries = table.entries();
    let u = entries.len();
    let m = panel.len();
    let mut assignments = Vec::new();
    let mut thresholds = vec![None; m];
    let mut counts = vec![0usize; m];
    let mut lower = 0usize; // r_{i-1} + c_{i-1}, 0-based
    let mut scan = 0usize;
    for i in 0..m {
        let a = panel.accuracy(i);
        // first admissible rank for this labeler; monotone in i, so the
        // cursor never moves backwards
        while scan < u && noise.eval(a, entries[scan].1)? > beta {
            scan += 1;
        }
        if scan >= u {
            break;
        }
        let start = lower.max(scan);
        if start >= u {
            break;
        }
        let take = panel.capacity(i).min(u - start);
        for rank in start..start + take {
            let (sample_id, entropy) = entries[rank];
            debug_assert!(noise.eval(a, entropy)? <= beta);
            assignments.push(QueryAssignment {
                sample_id,
                rank,
                entropy,
                labeler: i,
            });
        }
        thresholds[i] = Some(start);
        counts[i] = take;
        lower = start + panel.capacity(i);
    }
    let slack: Vec<bool> = (0..m).map(|i| counts[i] < panel.capacity(i)).collect();
    let objective = assignments.iter().map(|a| a.entropy).sum();
    Ok(QueryPlan {
        assignments,
        thresholds,
        slack,
        objective,
    })
}

/// Verify a query plan against the joint model's constraints: each sample
/// selected at most once, capacities respected, every pair within the noise
/// bound, labeler index non-decreasing in rank, and no assignments below a
/// labeler left with slack.
pub fn check_query_plan(
    plan: &QueryPlan,
    panel: &LabelerPanel,
    noise: &NoiseSpec,
    beta: f64,
) -> Result<()> {
    let m = panel.len();
    let mut counts = vec![0usize; m];
    let mut last_rank: Option<usize> = None;
    let mut last_labeler = 0usize;
    for a in &plan.assignments {
        if a.labeler >= m {
            return Err(Error::invalid(format!("labeler {} out of range", a.labeler)));
        }
        counts[a.labeler] += 1;
        let eps = noise.eval(panel.accuracy(a.labeler), a.entropy)?;
        if eps > beta + 1e-12 {
            return Err(Error::invalid(format!(
                "pair (labeler {}, rank {}) has noise {eps} > beta {beta}",
                a.labeler, a.rank
            )));
        }
        if let Some(prev) = last_rank {
            if a.rank <= prev {
                return Err(Error::invalid("ranks must be strictly increasing"));
            }
            if a.labeler < last_labeler {
                return Err(Error::invalid(format!(
                    "labeler index decreases at rank {} ({} after {})",
                    a.rank, a.labeler, last_labeler
                )));
            }
        }
        last_rank = Some(a.rank);
        last_labeler = a.labeler;
    }
    for i in 0..m {
        if counts[i] > panel.capacity(i) {
            return Err(Error::invalid(format!(
                "labeler {i} over capacity: {} > {}",
                counts[i],
                panel.capacity(i)
            )));
        }
        if counts[i] < panel.capacity(i) {
            // slack: everything below must be empty
            if counts[i + 1..].iter().any(|&c| c > 0) {
                return Err(Error::invalid(format!(
                    "labeler {i} has slack but a less accurate labeler is used"
                )));
            }
        }
    }
    Ok(())
}

/// Exhaustive maximizer of the joint model over the full constraint set.
/// Test oracle only; guarded to small instances.
///
/// Returns the optimal objective and one optimal selection
/// (`y[rank] = Some(labeler)` or `None` for unselected).
pub fn brute_force_model4(
    entropies: &[f64],
    panel: &LabelerPanel,
    noise: &NoiseSpec,
    beta: f64,
) -> Result<(f64, Vec<Option<usize>>)> {
    if !(0.0..=1.0).contains(&beta) || !beta.is_finite() {
        return Err(Error::invalid(format!("beta {beta} outside [0, 1]")));
    }
    for w in entropies.windows(2) {
        if w[1] > w[0] {
            return Err(Error::invalid("entropies must be sorted non-increasing"));
        }
    }
    let u = entropies.len();
    let m = panel.len();
    if u > 8 || m > 3 {
        return Err(Error::TooLarge(format!(
            "{u} points x {m} labelers (limits 8 x 3)"
        )));
    }
    // admissibility per (labeler, rank)
    let mut ok = vec![vec![false; u]; m];
    for (i, row) in ok.iter_mut().enumerate() {
        for (j, &e) in entropies.iter().enumerate() {
            row[j] = noise.eval(panel.accuracy(i), e)? <= beta;
        }
    }
    let caps: Vec<usize> = (0..m).map(|i| panel.capacity(i)).collect();

    let mut best_obj = 0.0;
    let mut best_y: Vec<Option<usize>> = vec![None; u];
    let mut digits = vec![0usize; u]; // 0 = unselected, i+1 = labeler i
    loop {
        // feasibility of the current candidate
        let mut used = vec![0usize; m];
        let mut feasible = true;
        let mut prev_labeler = 0usize;
        let mut obj = 0.0;
        for (j, &d) in digits.iter().enumerate() {
            if d == 0 {
                continue;
            }
            let i = d - 1;
            if !ok[i][j] || i < prev_labeler {
                feasible = false;
                break;
            }
            used[i] += 1;
            if used[i] > caps[i] {
                feasible = false;
                break;
            }
            prev_labeler = i;
            obj += entropies[j];
        }
        if feasible {
            // a labeler with slack forbids assignments to all later ones
            'slack: for i in 0..m {
                if used[i] < caps[i] && used[i + 1..].iter().any(|&c| c > 0) {
                    feasible = false;
                    break 'slack;
                }
            }
        }
        if feasible && obj > best_obj {
            best_obj = obj;
            for (j, &d) in digits.iter().enumerate() {
                best_y[j] = if d == 0 { None } else { Some(d - 1) };
            }
        }
        // next candidate in base (m+1)
        let mut k = 0;
        loop {
            if k == u {
                return Ok((best_obj, best_y));
            }
            digits[k] += 1;
            if digits[k] <= m {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
    }
}
