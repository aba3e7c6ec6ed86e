use crate::error::{Error, Result};

/// Optimal row-to-column assignment: row `i` is matched to `permutation[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub permutation: Vec<usize>,
    pub cost: f64,
}

/// Minimum-cost perfect assignment on a square matrix (Hungarian method with
/// row/column potentials, O(n^3)).
pub fn min_cost_assignment(cost: &[Vec<f64>]) -> Result<Assignment> {
    let n = cost.len();
    if let Some(r) = cost.iter().find(|r| r.len() != n) {
        return Err(Error::Shape(format!("cost matrix must be square: {n} rows but a row of length {}", r.len())));
    }
    if cost.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("cost matrix"));
    }
    if n == 0 {
        return Ok(Assignment { permutation: Vec::new(), cost: 0.0 });
    }

    // 1-based arrays; index 0 is the virtual column used while augmenting.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut matched_row = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        matched_row[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = matched_row[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
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
            for j in 0..=n {
                if used[j] {
                    u[matched_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if matched_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            matched_row[j0] = matched_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut permutation = vec![0; n];
    for j in 1..=n {
        permutation[matched_row[j] - 1] = j - 1;
    }
    let total = permutation.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
    Ok(Assignment { permutation, cost: total })
}
