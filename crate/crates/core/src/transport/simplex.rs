//! Exact solver for the balanced transportation problem.
//!
//! Primal network simplex specialized to the bipartite transportation
//! polytope: the basis is a spanning tree of the supply/demand graph and
//! the initial feasible tree comes from the northwest-corner rule.
//!
//! Pivot selection uses block search (scan a block of arcs from where the
//! previous scan stopped, take the most negative reduced cost found),
//! which is the fast rule in practice. Termination is still guaranteed by
//! Bland's anti-cycling rule: a long run of consecutive degenerate pivots
//! switches the solver permanently to Bland selection (lowest row-major
//! index enters, lowest index leaves among the blocking arcs), and under
//! Bland no basis can repeat. Duals are maintained on the tree, so the
//! returned potentials certify optimality by complementary slackness.

use ndarray::Array2;

use crate::error::{Error, Result};

pub(crate) struct TransportSolution {
    pub flow: Array2<f64>,
    pub row_potentials: Vec<f64>,
    pub col_potentials: Vec<f64>,
    pub cost: f64,
    #[allow(dead_code)]
    pub pivots: usize,
}

/// Solves min <cost, x> over x >= 0 with row sums `supply` and column sums
/// `demand`. Supplies and demands must be strictly positive and balanced
/// (both summing to the same total up to rounding); callers filter zeros.
pub(crate) fn solve_transportation(
    supply: &[f64],
    demand: &[f64],
    cost: &Array2<f64>,
) -> Result<TransportSolution> {
    let n = supply.len();
    let m = demand.len();
    debug_assert_eq!(cost.nrows(), n);
    debug_assert_eq!(cost.ncols(), m);
    if n == 0 || m == 0 {
        return Err(Error::SolverFailure { detail: "empty marginal".into() });
    }

    let cost_scale = cost.iter().fold(0.0f64, |a, &c| a.max(c.abs()));
    let enter_eps = 1e-12 * (1.0 + cost_scale);

    // Northwest-corner initial basic feasible tree: n + m - 1 cells.
    let mut flow = Array2::<f64>::zeros((n, m));
    let mut basis: Vec<(usize, usize)> = Vec::with_capacity(n + m - 1);
    let mut in_basis = vec![false; n * m];
    {
        let mut rem_s = supply.to_vec();
        let mut rem_d = demand.to_vec();
        let (mut i, mut j) = (0usize, 0usize);
        loop {
            let x = rem_s[i].min(rem_d[j]).max(0.0);
            flow[[i, j]] = x;
            basis.push((i, j));
            in_basis[i * m + j] = true;
            rem_s[i] -= x;
            rem_d[j] -= x;
            if i == n - 1 && j == m - 1 {
                break;
            }
            if (rem_s[i] <= rem_d[j] && i < n - 1) || j == m - 1 {
                i += 1;
            } else {
                j += 1;
            }
        }
    }
    debug_assert_eq!(basis.len(), n + m - 1);

    let max_pivots = 1000 + 100 * (n + m) * (n + m);
    let total_cells = n * m;
    let block_size = (total_cells as f64).sqrt().ceil() as usize + 1;
    let mut scan_from = 0usize;
    let mut degenerate_run = 0usize;
    let mut bland = false;
    let mut pivots = 0usize;
    loop {
        let adjacency = build_adjacency(n, m, &basis);
        let (u, v) = potentials(n, m, &basis, &adjacency, cost)?;

        let entering = if bland {
            // First nonbasic cell (row-major) with negative reduced cost.
            let mut found = None;
            'scan: for r in 0..n {
                for c in 0..m {
                    if !in_basis[r * m + c] && cost[[r, c]] - u[r] - v[c] < -enter_eps {
                        found = Some((r, c));
                        break 'scan;
                    }
                }
            }
            found
        } else {
            // Block search: resume where the last scan stopped, return the
            // most negative reduced cost of the first block containing one.
            let mut best: Option<((usize, usize), f64)> = None;
            let mut idx = scan_from;
            let mut scanned = 0usize;
            while scanned < total_cells {
                let block_end = (scanned + block_size).min(total_cells);
                while scanned < block_end {
                    if !in_basis[idx] {
                        let (r, c) = (idx / m, idx % m);
                        let reduced = cost[[r, c]] - u[r] - v[c];
                        if reduced < -enter_eps
                            && best.is_none_or(|(_, b)| reduced < b)
                        {
                            best = Some(((r, c), reduced));
                        }
                    }
                    idx = (idx + 1) % total_cells;
                    scanned += 1;
                }
                if best.is_some() {
                    break;
                }
            }
            scan_from = idx;
            best.map(|(cell, _)| cell)
        };
        let Some((er, ec)) = entering else {
            let total: f64 = basis.iter().map(|&(r, c)| flow[[r, c]] * cost[[r, c]]).sum();
            return Ok(TransportSolution {
                flow,
                row_potentials: u,
                col_potentials: v,
                cost: total,
                pivots,
            });
        };

        pivots += 1;
        if pivots > max_pivots {
            return Err(Error::SolverFailure {
                detail: format!("pivot limit {max_pivots} exceeded on a {n}x{m} instance"),
            });
        }

        // Unique tree path from row node `er` to column node `ec`; the
        // entering arc closes the cycle. Path edges at even walk positions
        // lose flow, odd positions gain it.
        let path = tree_path(&basis, &adjacency, er, n + ec)?;
        let mut theta = f64::INFINITY;
        let mut leave_pos = usize::MAX;
        for (t, &(r, c)) in path.iter().enumerate() {
            if t % 2 != 0 {
                continue;
            }
            let f = flow[[r, c]];
            let better = f < theta
                || (f == theta
                    && leave_pos != usize::MAX
                    && (r, c) < path[leave_pos]);
            if better {
                theta = f;
                leave_pos = t;
            }
        }
        let theta = theta.max(0.0);
        flow[[er, ec]] += theta;
        for (t, &(r, c)) in path.iter().enumerate() {
            if t % 2 == 0 {
                flow[[r, c]] -= theta;
            } else {
                flow[[r, c]] += theta;
            }
        }
        let (lr, lc) = path[leave_pos];
        flow[[lr, lc]] = 0.0;
        in_basis[lr * m + lc] = false;
        in_basis[er * m + ec] = true;
        let k = basis
            .iter()
            .position(|&cell| cell == (lr, lc))
            .expect("leaving cell is basic");
        basis[k] = (er, ec);

        // A long degenerate stretch risks cycling under block search; from
        // then on Bland's rule alone guarantees termination.
        if theta <= 1e-16 {
            degenerate_run += 1;
            if degenerate_run > 4 * (n + m) {
                bland = true;
            }
        } else {
            degenerate_run = 0;
        }

        // Clamp rounding residue left on the cycle.
        for &(r, c) in &path {
            if flow[[r, c]] < 0.0 {
                flow[[r, c]] = 0.0;
            }
        }
    }
}

/// Tree adjacency of the basis: nodes 0..n are rows, n..n+m columns;
/// entries are (neighbor node, basis index).
fn build_adjacency(n: usize, m: usize, basis: &[(usize, usize)]) -> Vec<Vec<(usize, usize)>> {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n + m];
    for (k, &(r, c)) in basis.iter().enumerate() {
        adj[r].push((n + c, k));
        adj[n + c].push((r, k));
    }
    adj
}

/// Dual potentials on the spanning tree: u[0] = 0, u_r + v_c = cost[r, c]
/// on every basic cell.
fn potentials(
    n: usize,
    m: usize,
    basis: &[(usize, usize)],
    adj: &[Vec<(usize, usize)>],
    cost: &Array2<f64>,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let nodes = n + m;
    let mut u = vec![f64::NAN; n];
    let mut v = vec![f64::NAN; m];
    let mut seen = vec![false; nodes];
    let mut stack = vec![0usize];
    u[0] = 0.0;
    seen[0] = true;
    while let Some(node) = stack.pop() {
        for &(next, k) in &adj[node] {
            if seen[next] {
                continue;
            }
            seen[next] = true;
            let (r, c) = basis[k];
            if next >= n {
                v[next - n] = cost[[r, c]] - u[r];
            } else {
                u[next] = cost[[r, c]] - v[c];
            }
            stack.push(next);
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::SolverFailure { detail: "basis is not a spanning tree".into() });
    }
    Ok((u, v))
}

/// Cells along the unique tree path between two nodes.
fn tree_path(
    basis: &[(usize, usize)],
    adj: &[Vec<(usize, usize)>],
    from: usize,
    to: usize,
) -> Result<Vec<(usize, usize)>> {
    let nodes = adj.len();
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; nodes]; // (node, basis idx)
    let mut seen = vec![false; nodes];
    let mut queue = std::collections::VecDeque::from([from]);
    seen[from] = true;
    while let Some(node) = queue.pop_front() {
        if node == to {
            break;
        }
        for &(next, k) in &adj[node] {
            if !seen[next] {
                seen[next] = true;
                parent[next] = Some((node, k));
                queue.push_back(next);
            }
        }
    }
    if !seen[to] {
        return Err(Error::SolverFailure { detail: "tree path not found".into() });
    }
    let mut cells = Vec::new();
    let mut node = to;
    while let Some((prev, k)) = parent[node] {
        cells.push(basis[k]);
        node = prev;
    }
    cells.reverse();
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    #[test]
    fn solves_two_by_two_counterexample_marginals() {
        // Atoms 0 and 1 on the line for both marginals; unit move cost.
        let cost = array![[0.0, 1.0], [1.0, 0.0]];
        let sol = solve_transportation(&[0.25, 0.75], &[0.75, 0.25], &cost).unwrap();
        assert_abs_diff_eq!(sol.cost, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.flow[[0, 0]], 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.flow[[1, 0]], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(sol.flow[[1, 1]], 0.25, epsilon = 1e-12);
    }

    #[test]
    fn feasibility_and_duality_gap_on_random_instance() {
        let n = 6;
        let m = 9;
        let mut cost = Array2::<f64>::zeros((n, m));
        // Deterministic pseudo-random costs.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for i in 0..n {
            for j in 0..m {
                cost[[i, j]] = next() * 10.0;
            }
        }
        let supply: Vec<f64> = (0..n).map(|i| (i + 1) as f64).collect();
        let total_s: f64 = supply.iter().sum();
        let supply: Vec<f64> = supply.iter().map(|s| s / total_s).collect();
        let demand: Vec<f64> = (0..m).map(|j| (2 * j + 1) as f64).collect();
        let total_d: f64 = demand.iter().sum();
        let demand: Vec<f64> = demand.iter().map(|d| d / total_d).collect();

        let sol = solve_transportation(&supply, &demand, &cost).unwrap();
        for i in 0..n {
            let row: f64 = (0..m).map(|j| sol.flow[[i, j]]).sum();
            assert_abs_diff_eq!(row, supply[i], epsilon = 1e-12);
        }
        for j in 0..m {
            let col: f64 = (0..n).map(|i| sol.flow[[i, j]]).sum();
            assert_abs_diff_eq!(col, demand[j], epsilon = 1e-12);
        }
        // Dual feasibility and zero gap.
        for i in 0..n {
            for j in 0..m {
                assert!(cost[[i, j]] - sol.row_potentials[i] - sol.col_potentials[j] >= -1e-9);
            }
        }
        let dual: f64 = sol
            .row_potentials
            .iter()
            .zip(&supply)
            .map(|(u, s)| u * s)
            .sum::<f64>()
            + sol
                .col_potentials
                .iter()
                .zip(&demand)
                .map(|(v, d)| v * d)
                .sum::<f64>();
        assert_abs_diff_eq!(sol.cost, dual, epsilon = 1e-10);
    }

    #[test]
    fn single_row_and_column() {
        let cost = array![[3.0, 4.0]];
        let sol = solve_transportation(&[1.0], &[0.5, 0.5], &cost).unwrap();
        assert_abs_diff_eq!(sol.cost, 3.5, epsilon = 1e-15);

        let cost = array![[2.0], [5.0]];
        let sol = solve_transportation(&[0.5, 0.5], &[1.0], &cost).unwrap();
        assert_abs_diff_eq!(sol.cost, 3.5, epsilon = 1e-15);
    }

    #[test]
    fn degenerate_ties_terminate() {
        // All-equal costs everywhere: heavily degenerate, must not cycle.
        let cost = Array2::<f64>::ones((5, 5));
        let w = vec![0.2; 5];
        let sol = solve_transportation(&w, &w, &cost).unwrap();
        assert_abs_diff_eq!(sol.cost, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn moderate_instance_stays_feasible_and_certified() {
        let n = 120;
        let mut state = 0x2545f4914f6cdd1du64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let mut cost = Array2::<f64>::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                cost[[i, j]] = next() * 5.0;
            }
        }
        let supply = vec![1.0 / n as f64; n];
        let sol = solve_transportation(&supply, &supply, &cost).unwrap();
        for i in 0..n {
            let row: f64 = (0..n).map(|j| sol.flow[[i, j]]).sum();
            assert_abs_diff_eq!(row, supply[i], epsilon = 1e-12);
        }
        for i in 0..n {
            for j in 0..n {
                assert!(cost[[i, j]] - sol.row_potentials[i] - sol.col_potentials[j] >= -1e-9);
            }
        }
        let dual: f64 = sol.row_potentials.iter().map(|u| u / n as f64).sum::<f64>()
            + sol.col_potentials.iter().map(|v| v / n as f64).sum::<f64>();
        assert_abs_diff_eq!(sol.cost, dual, epsilon = 1e-9);
    }
}
