//! Clustering error under optimal label matching and the normalized
//! confusion-matrix entropy.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::min_cost_assignment;

/// Square confusion matrix after optimally matching predicted clusters to
/// true clusters. Rows are true clusters (in order of first appearance),
/// columns the matched predicted clusters; unmatched slots are zero padding.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Confusion {
    pub counts: Vec<Vec<usize>>,
    pub total: usize,
}

impl Confusion {
    pub fn new(predicted: &[usize], truth: &[usize]) -> Result<Self> {
        if predicted.len() != truth.len() {
            return Err(Error::Shape(format!("{} predicted labels vs {} true labels", predicted.len(), truth.len())));
        }
        let p = dense(predicted);
        let t = dense(truth);
        let size = p.iter().chain(&t).map(|&l| l + 1).max().unwrap_or(0);
        let mut raw = vec![vec![0usize; size]; size];
        for (&pi, &ti) in p.iter().zip(&t) {
            raw[ti][pi] += 1;
        }
        let cost: Vec<Vec<f64>> = raw.iter().map(|r| r.iter().map(|&c| -(c as f64)).collect()).collect();
        let matching = min_cost_assignment(&cost)?;
        let counts = (0..size).map(|row| (0..size).map(|col| raw[row][matching.permutation[col]]).collect()).collect();
        Ok(Self { counts, total: truth.len() })
    }

    pub fn size(&self) -> usize {
        self.counts.len()
    }

    /// Observations on the diagonal.
    pub fn matched(&self) -> usize {
        (0..self.size()).map(|i| self.counts[i][i]).sum()
    }
}

fn dense(labels: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    labels
        .iter()
        .map(|l| {
            let next = map.len();
            *map.entry(*l).or_insert(next)
        })
        .collect()
}

/// Fraction of observations misclustered under the best bijection between
/// predicted and true labels.
pub fn clustering_error(predicted: &[usize], truth: &[usize]) -> Result<f64> {
    let c = Confusion::new(predicted, truth)?;
    if c.total == 0 {
        return Ok(0.0);
    }
    Ok((c.total - c.matched()) as f64 / c.total as f64)
}

/// `S = Σ_l (n_l / N) H(p_l) / ln L`, where `p_l` is row `l` of the
/// matched confusion matrix normalized to a distribution and `L` is the
/// confusion matrix size. Zero when `L == 1`.
pub fn confusion_entropy(predicted: &[usize], truth: &[usize]) -> Result<f64> {
    let c = Confusion::new(predicted, truth)?;
    let size = c.size();
    if size <= 1 || c.total == 0 {
        return Ok(0.0);
    }
    let norm = (size as f64).ln();
    let s = c
        .counts
        .iter()
        .map(|row| {
            let n_l: usize = row.iter().sum();
            if n_l == 0 {
                return 0.0;
            }
            let h: f64 = row
                .iter()
                .filter(|&&x| x > 0)
                .map(|&x| {
                    let p = x as f64 / n_l as f64;
                    -p * p.ln()
                })
                .sum();
            n_l as f64 / c.total as f64 * h / norm
        })
        .sum();
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClusteringScores {
    pub clustering_error: f64,
    pub entropy: f64,
}

pub fn score(predicted: &[usize], truth: &[usize]) -> Result<ClusteringScores> {
    Ok(ClusteringScores {
        clustering_error: clustering_error(predicted, truth)?,
        entropy: confusion_entropy(predicted, truth)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_and_swapped() {
        let t = [0, 0, 1, 1, 2];
        assert_eq!(clustering_error(&t, &t).unwrap(), 0.0);
        assert_eq!(confusion_entropy(&t, &t).unwrap(), 0.0);
        assert_eq!(clustering_error(&[1, 1, 2, 2, 0], &t).unwrap(), 0.0);
        assert_eq!(confusion_entropy(&[1, 1, 2, 2, 0], &t).unwrap(), 0.0);
    }

    #[test]
    fn four_point_example() {
        let truth = [1, 1, 2, 2];
        let pred = [1, 2, 2, 2];
        assert_eq!(clustering_error(&pred, &truth).unwrap(), 0.25);
        assert!((confusion_entropy(&pred, &truth).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn single_cluster_entropy_is_zero() {
        assert_eq!(confusion_entropy(&[0, 0, 0], &[4, 4, 4]).unwrap(), 0.0);
    }

    #[test]
    fn uniform_rows_have_unit_entropy() {
        let truth: Vec<usize> = (0..400).map(|i| i / 200).collect();
        let pred: Vec<usize> = (0..400).map(|i| i % 2).collect();
        assert!((confusion_entropy(&pred, &truth).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(clustering_error(&pred, &truth).unwrap(), 0.5);
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(clustering_error(&[0], &[0, 1]), Err(Error::Shape(_))));
        assert!(confusion_entropy(&[0], &[0, 1]).is_err());
    }

    #[test]
    fn more_predicted_than_true_clusters() {
        // Extra predicted cluster is unmatched and counts as errors.
        assert_eq!(clustering_error(&[0, 1, 2, 2], &[0, 0, 1, 1]).unwrap(), 0.25);
    }
}
