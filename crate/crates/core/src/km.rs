//! Single-pass k-means with farthest-point initialization over the PSD
//! distance. Fully deterministic.

use crate::distances::{distance_matrix, DistanceMatrix};
use crate::error::{invalid, Result};
use crate::exec::Execution;
use crate::labeling::Labeling;
use crate::spectra::{estimate_psds, Observation, PsdConfig};

/// Greedy farthest-point centers starting from observation 0.
///
/// `c_p = argmax_i min_{l < p} d(i, c_l)`, ties to the lowest index. Points
/// that are already centers are skipped, which only matters when every
/// remaining distance is zero.
pub fn farthest_point_centers(d: &DistanceMatrix, n_clusters: usize) -> Result<Vec<usize>> {
    let n = d.order();
    if n_clusters == 0 || n_clusters > n {
        return invalid(format!("number of clusters must be in 1..={n}, got {n_clusters}"));
    }
    let mut centers = vec![0];
    let mut nearest: Vec<f64> = d.row(0).to_vec();
    let mut is_center = vec![false; n];
    is_center[0] = true;
    while centers.len() < n_clusters {
        let mut best = usize::MAX;
        for i in 0..n {
            if !is_center[i] && (best == usize::MAX || nearest[i] > nearest[best]) {
                best = i;
            }
        }
        is_center[best] = true;
        centers.push(best);
        for (i, v) in nearest.iter_mut().enumerate() {
            *v = v.min(d.get(i, best));
        }
    }
    Ok(centers)
}

/// Labels each observation with the position of its nearest center; ties go
/// to the earlier center.
pub fn assign_to_centers(d: &DistanceMatrix, centers: &[usize]) -> Result<Labeling> {
    let n = d.order();
    if centers.is_empty() {
        return invalid("no centers");
    }
    if let Some(&c) = centers.iter().find(|&&c| c >= n) {
        return invalid(format!("center index {c} out of range for {n} observations"));
    }
    let labels = (0..n)
        .map(|i| {
            let mut best = 0;
            for (l, &c) in centers.iter().enumerate() {
                if d.get(i, c) < d.get(i, centers[best]) {
                    best = l;
                }
            }
            best
        })
        .collect();
    Ok(Labeling::new(labels, centers.len()))
}

pub fn km_from_distances(d: &DistanceMatrix, n_clusters: usize) -> Result<Labeling> {
    let centers = farthest_point_centers(d, n_clusters)?;
    assign_to_centers(d, &centers)
}

/// End-to-end KM on raw observations.
pub fn km_cluster(
    observations: &[Observation],
    psd: &PsdConfig,
    n_clusters: usize,
    exec: Execution,
) -> Result<Labeling> {
    let psds = estimate_psds(observations, psd, exec)?;
    km_from_distances(&distance_matrix(&psds, exec)?, n_clusters)
}
