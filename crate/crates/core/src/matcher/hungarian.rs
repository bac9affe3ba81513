//! Optimal one-to-one assignment (Hungarian method with potentials,
//! O(n³)).

/// Minimum-cost assignment for a rectangular cost matrix with
/// `rows ≤ cols`. Returns the column assigned to each row.
pub fn min_cost_assignment(costs: &[Vec<f64>]) -> Vec<usize> {
    let n = costs.len();
    if n == 0 {
        return Vec::new();
    }
    let m = costs[0].len();
    assert!(n <= m, "min_cost_assignment needs rows ≤ cols");
    assert!(costs.iter().all(|r| r.len() == m), "ragged cost matrix");

    // 1-based potentials; column 0 is a virtual start
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; m + 1];
    let mut owner = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];

    for row in 1..=n {
        owner[0] = row;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = costs[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![usize::MAX; n];
    for j in 1..=m {
        if owner[j] != 0 {
            assignment[owner[j] - 1] = j - 1;
        }
    }
    assignment
}

/// Maximum-total-weight one-to-one matching on a rectangular matrix,
/// covering `min(rows, cols)` pairs. Returned as `(row, col)` sorted by row.
pub fn max_weight_assignment(weights: &[Vec<f64>]) -> Vec<(usize, usize)> {
    let rows = weights.len();
    let cols = weights.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return Vec::new();
    }
    // pad to square with zero weight; dummy pairs are dropped afterwards
    let n = rows.max(cols);
    let costs: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i < rows && j < cols { -weights[i][j] } else { 0.0 })
                .collect()
        })
        .collect();
    min_cost_assignment(&costs)
        .into_iter()
        .enumerate()
        .filter(|&(i, j)| i < rows && j < cols)
        .collect()
}
