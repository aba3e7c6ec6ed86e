//! Half-L1 distance between PSDs on a shared uniform frequency grid.

use crate::error::{invalid, Error, Result};
use crate::exec::Execution;
use crate::spectra::PsdEstimate;

/// `(1/2) ∫ |s1(f) - s2(f)| df`, approximated by the grid mean.
pub fn l1_distance(s1: &PsdEstimate, s2: &PsdEstimate) -> Result<f64> {
    if s1.grid_size() != s2.grid_size() {
        return Err(Error::Shape(format!("PSD grids differ: {} vs {}", s1.grid_size(), s2.grid_size())));
    }
    Ok(half_l1(s1.values(), s2.values()))
}

pub(crate) fn half_l1(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / a.len() as f64
}

/// Symmetric, zero-diagonal, nonnegative matrix of pairwise distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    order: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    /// Builds from `f(i, j)` for `i < j`, mirroring into the lower triangle.
    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = vec![0.0; order * order];
        for i in 0..order {
            for j in i + 1..order {
                let d = f(i, j);
                if !(d.is_finite() && d >= 0.0) {
                    return invalid(format!("distance ({i}, {j}) = {d} is not a finite nonnegative value"));
                }
                data[i * order + j] = d;
                data[j * order + i] = d;
            }
        }
        Ok(Self { order, data })
    }

    /// Builds from full rows; the rows must already be symmetric with a zero
    /// diagonal.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Shape("distance matrix must be square".into()));
        }
        for (i, row) in rows.iter().enumerate() {
            if row[i] != 0.0 {
                return invalid(format!("nonzero diagonal entry at {i}"));
            }
            for (j, other) in rows.iter().enumerate().take(i) {
                if row[j] != other[i] {
                    return invalid(format!("asymmetric entries at ({i}, {j})"));
                }
            }
        }
        Self::from_fn(n, |i, j| rows[i][j])
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.order + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.order..(i + 1) * self.order]
    }

    /// Reorders rows and columns: entry `(i, j)` of the result is entry
    /// `(perm[i], perm[j])` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.order;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = self.get(perm[i], perm[j]);
            }
        }
        Self { order: n, data }
    }
}

/// All pairwise distances of a PSD batch sharing one grid.
pub fn distance_matrix(psds: &[PsdEstimate], exec: Execution) -> Result<DistanceMatrix> {
    let Some(first) = psds.first() else {
        return invalid("distance matrix of an empty PSD list");
    };
    if let Some(bad) = psds.iter().position(|p| p.grid_size() != first.grid_size()) {
        return Err(Error::Shape(format!(
            "PSD {bad} has grid size {} but PSD 0 has {}",
            psds[bad].grid_size(),
            first.grid_size()
        )));
    }
    let n = psds.len();
    let upper = exec.map(n, |i| (i + 1..n).map(|j| half_l1(psds[i].values(), psds[j].values())).collect::<Vec<_>>());
    DistanceMatrix::from_fn(n, |i, j| upper[i][j - i - 1])
}
