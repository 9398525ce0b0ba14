//! Overlap between two successive solutions and a crossing-minimizing
//! order for the new clusters.
//!
//! New clusters are assigned to the `n` display slots of the new column.
//! Placing new cluster `u` at slot `v` costs `Σ_i M[i][u]·|p_a[i] − v|`,
//! and the best order is a minimum-cost perfect matching of clusters to
//! slots. There are exactly `n` clusters and `n` slots, so the bipartite
//! graph is already square and no dummy vertices are needed even when the
//! old side has a different size.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{avg_value, coverage, Dataset, Solution};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OverlapMatrix {
    pub m_old: usize,
    pub n_new: usize,
    /// `counts[i][j]` = rows covered by both old cluster `i` and new cluster `j`.
    pub counts: Vec<Vec<u64>>,
    /// Display slot of each old cluster.
    pub p_a: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Placement {
    /// Display slot of each new cluster.
    pub p_b: Vec<usize>,
    pub total_cost: i64,
}

/// Display slots for a solution's clusters: cluster average descending,
/// ties by creation order.
pub fn default_order(sol: &Solution, ds: &Dataset) -> Vec<usize> {
    let avgs: Vec<f64> = sol
        .clusters
        .iter()
        .map(|c| avg_value(&coverage(c, ds), ds).unwrap_or(f64::NEG_INFINITY))
        .collect();
    let mut order: Vec<usize> = (0..avgs.len()).collect();
    order.sort_by(|&a, &b| avgs[b].total_cmp(&avgs[a]).then(a.cmp(&b)));
    let mut slot = vec![0; order.len()];
    for (pos, &c) in order.iter().enumerate() {
        slot[c] = pos;
    }
    slot
}

/// Shared-row counts of `old` × `new`, with `old` in its default display order.
pub fn overlap_matrix(old: &Solution, new: &Solution, ds: &Dataset) -> OverlapMatrix {
    let mut member_of_new: Vec<Vec<usize>> = vec![Vec::new(); ds.n()];
    for (j, c) in new.clusters.iter().enumerate() {
        for r in coverage(c, ds) {
            member_of_new[r].push(j);
        }
    }
    let counts = old
        .clusters
        .iter()
        .map(|c| {
            let mut row = vec![0u64; new.clusters.len()];
            for r in coverage(c, ds) {
                for &j in &member_of_new[r] {
                    row[j] += 1;
                }
            }
            row
        })
        .collect();
    OverlapMatrix {
        m_old: old.clusters.len(),
        n_new: new.clusters.len(),
        counts,
        p_a: default_order(old, ds),
    }
}

fn slot_costs(om: &OverlapMatrix) -> Vec<Vec<i64>> {
    let n = om.n_new;
    (0..n)
        .map(|u| {
            (0..n)
                .map(|v| {
                    om.counts
                        .iter()
                        .zip(&om.p_a)
                        .map(|(row, &pa)| row[u] as i64 * (pa as i64 - v as i64).abs())
                        .sum()
                })
                .collect()
        })
        .collect()
}

/// `Σ_ij M[i][j]·|p_a[i] − p_b[j]|`. Errors if `p_b` is not a permutation of `0..n`.
pub fn crossing_cost(om: &OverlapMatrix, p_b: &[usize]) -> Result<i64> {
    let mut seen = vec![false; om.n_new];
    if p_b.len() != om.n_new {
        return Err(Error::Parameter(format!("p_b has {} entries, expected {}", p_b.len(), om.n_new)));
    }
    for &v in p_b {
        if v >= om.n_new || std::mem::replace(&mut seen[v], true) {
            return Err(Error::Parameter(format!("p_b {p_b:?} is not a permutation")));
        }
    }
    Ok(om
        .counts
        .iter()
        .zip(&om.p_a)
        .map(|(row, &pa)| {
            row.iter().zip(p_b).map(|(&c, &pb)| c as i64 * (pa as i64 - pb as i64).abs()).sum::<i64>()
        })
        .sum())
}

/// Minimum-cost assignment of an `n × n` cost matrix. Returns the column of
/// each row and dual potentials `(u, v)` with `cost[i][j] ≥ u[i] + v[j]`,
/// equality on every edge of every optimal assignment.
fn hungarian(cost: &[Vec<i64>]) -> (Vec<usize>, Vec<i64>, Vec<i64>) {
    let n = cost.len();
    // 1-based with a virtual row/column 0
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![i64::MAX; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = i64::MAX;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut col_of = vec![0; n];
    for j in 1..=n {
        col_of[p[j] - 1] = j - 1;
    }
    (col_of, u[1..].to_vec(), v[1..].to_vec())
}

/// Exact crossing-minimizing order of the new clusters; among optimal
/// orders the lexicographically smallest `p_b` is returned.
pub fn optimal_order(om: &OverlapMatrix) -> Placement {
    let n = om.n_new;
    if n == 0 {
        return Placement { p_b: Vec::new(), total_cost: 0 };
    }
    let cost = slot_costs(om);
    let (mut slot_of, u, v) = hungarian(&cost);
    // Optimal assignments are exactly the perfect matchings on tight edges.
    let tight: Vec<Vec<bool>> =
        (0..n).map(|i| (0..n).map(|j| cost[i][j] == u[i] + v[j]).collect()).collect();
    let mut row_of = vec![0; n];
    for (i, &j) in slot_of.iter().enumerate() {
        row_of[j] = i;
    }
    let mut slot_fixed = vec![false; n];
    for i in 0..n {
        for j in 0..n {
            if !tight[i][j] || slot_fixed[j] {
                continue;
            }
            if slot_of[i] == j {
                break;
            }
            // give j to i; its holder must reach i's old slot by an alternating path
            let freed = slot_of[i];
            let holder = row_of[j];
            let mut visited = vec![false; n];
            visited[j] = true;
            let mut trial_slot = slot_of.clone();
            let mut trial_row = row_of.clone();
            trial_row[freed] = usize::MAX;
            if reassign(holder, i, &tight, &slot_fixed, &mut visited, &mut trial_slot, &mut trial_row) {
                trial_slot[i] = j;
                trial_row[j] = i;
                slot_of = trial_slot;
                row_of = trial_row;
                break;
            }
        }
        slot_fixed[slot_of[i]] = true;
    }
    let total_cost = slot_of.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
    Placement { p_b: slot_of, total_cost }
}

/// Kuhn-style augmenting search: move `row` to some unfixed tight slot,
/// displacing holders recursively until a free slot is reached. `skip` is
/// the row being fixed, which may not be displaced.
fn reassign(
    row: usize,
    skip: usize,
    tight: &[Vec<bool>],
    fixed: &[bool],
    visited: &mut [bool],
    slot_of: &mut [usize],
    row_of: &mut [usize],
) -> bool {
    for j in 0..tight.len() {
        if !tight[row][j] || fixed[j] || visited[j] {
            continue;
        }
        visited[j] = true;
        let holder = row_of[j];
        if holder != skip
            && (holder == usize::MAX || reassign(holder, skip, tight, fixed, visited, slot_of, row_of))
        {
            slot_of[row] = j;
            row_of[j] = row;
            return true;
        }
    }
    false
}
