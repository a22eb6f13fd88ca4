//! Exact planners: min-max dynamic programming over contiguous groupings and
//! exhaustive search over free assignments.

use super::{check_feasible, SequentialPlan, VerticalPlan};
use crate::energy::{max_total, CostTable};
use crate::error::{Error, Result};
use crate::model::NetworkModel;
use crate::profile::DeviceProfile;

/// Largest number of assignments [`exhaustive_vertical`] will enumerate.
pub const EXHAUSTIVE_LIMIT: u64 = 10_000_000;

/// Contiguous grouping minimizing the largest partition energy.
///
/// Among optimal plans, returns the one with the lexicographically smallest
/// cut vector.
pub fn plan_sequential_dp(model: &NetworkModel, profile: &DeviceProfile, partitions: usize) -> Result<SequentialPlan> {
    check_feasible(model, partitions)?;
    let costs = CostTable::new(model, profile)?;
    let n = model.len();

    // group[s][e]: total energy of layers s..=e as one partition.
    let group: Vec<Vec<f64>> = (0..n)
        .map(|s| (0..n).map(|e| if e >= s { costs.group(0, s, e).total } else { f64::NAN }).collect())
        .collect();

    // best[k][s]: optimal max energy covering layers s..n with k groups.
    let mut best = vec![vec![f64::INFINITY; n + 1]; partitions + 1];
    for s in 0..n {
        best[1][s] = group[s][n - 1];
    }
    for k in 2..=partitions {
        for s in 0..=n - k {
            best[k][s] = (s..=n - k).map(|e| group[s][e].max(best[k - 1][e + 1])).fold(f64::INFINITY, f64::min);
        }
    }

    let target = best[partitions][0];
    let mut cuts = Vec::with_capacity(partitions - 1);
    let mut s = 0;
    for k in (2..=partitions).rev() {
        let e = (s..=n - k)
            .find(|&e| group[s][e].max(best[k - 1][e + 1]) <= target)
            .expect("an optimal continuation always exists");
        cuts.push(e + 1);
        s = e + 1;
    }
    Ok(SequentialPlan::from_cuts(n, &cuts))
}

/// Globally optimal free assignment by enumerating every surjective mapping
/// of layers to partitions in lexicographic order; the first optimum wins.
pub fn exhaustive_vertical(model: &NetworkModel, profile: &DeviceProfile, partitions: usize) -> Result<VerticalPlan> {
    check_feasible(model, partitions)?;
    let n = model.len();
    let size = (partitions as u64).checked_pow(n as u32);
    match size {
        Some(s) if s <= EXHAUSTIVE_LIMIT => {}
        _ => {
            return Err(Error::SearchSpace { size: format!("{partitions}^{n}"), limit: EXHAUSTIVE_LIMIT });
        }
    }
    let costs = CostTable::new(model, profile)?;

    let mut assignment = vec![0usize; n];
    let mut counts = vec![0usize; partitions];
    counts[0] = n;
    let mut best: Option<(f64, Vec<usize>)> = None;
    loop {
        if counts.iter().all(|&c| c > 0) {
            let score = max_total(&costs.vertical(&assignment, partitions));
            if best.as_ref().is_none_or(|(b, _)| score < *b) {
                best = Some((score, assignment.clone()));
            }
        }
        // Odometer increment, last layer fastest.
        let mut k = n;
        loop {
            if k == 0 {
                let (_, a) = best.expect("at least one surjective assignment exists when M <= L");
                return Ok(VerticalPlan { partitions, assignment: a.into_iter().map(|p| p + 1).collect() });
            }
            k -= 1;
            counts[assignment[k]] -= 1;
            if assignment[k] + 1 < partitions {
                assignment[k] += 1;
                counts[assignment[k]] += 1;
                break;
            }
            assignment[k] = 0;
            counts[0] += 1;
        }
    }
}
