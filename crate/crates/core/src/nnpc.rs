//! Nearest neighbor process clustering: q-nearest-neighbor graph over PSD
//! distances with edge weights `exp(-2 d)`, partitioned by normalized
//! spectral clustering.

use serde::{Deserialize, Serialize};

use crate::distances::{distance_matrix, DistanceMatrix};
use crate::error::{invalid, Error, Result};
use crate::exec::Execution;
use crate::labeling::Labeling;
use crate::numerics::{eig_symmetric, kmeans, RngStream, SymmetricMatrix};
use crate::spectra::{estimate_psds, Observation, PsdConfig};

/// k-means restarts used on the spectral embedding.
pub const DEFAULT_KMEANS_RESTARTS: usize = 10;

/// For each observation `i`, the `q` indices closest to it (excluding `i`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborSets {
    q: usize,
    sets: Vec<Vec<usize>>,
}

impl NeighborSets {
    pub fn q(&self) -> usize {
        self.q
    }

    pub fn get(&self, i: usize) -> &[usize] {
        &self.sets[i]
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.sets[i].contains(&j)
    }
}

/// Selects the `q` nearest neighbors of every observation; ties go to the
/// lower index. Each set is returned in ascending distance order.
pub fn nearest_neighbor_sets(d: &DistanceMatrix, q: usize) -> Result<NeighborSets> {
    let n = d.order();
    if q == 0 || q >= n {
        return invalid(format!("q must satisfy 1 <= q <= N - 1 = {}, got {q}", n.saturating_sub(1)));
    }
    let sets = (0..n)
        .map(|i| {
            let row = d.row(i);
            let mut others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
            others.sort_by(|&a, &b| row[a].total_cmp(&row[b]).then(a.cmp(&b)));
            others.truncate(q);
            others
        })
        .collect();
    Ok(NeighborSets { q, sets })
}

/// `A = Z + Zᵀ` where column `j` of `Z` holds `exp(-2 d(i, j))` at row `i`
/// whenever `j` is one of the neighbors of `i`.
pub fn build_adjacency(d: &DistanceMatrix, neighbors: &NeighborSets) -> Result<SymmetricMatrix> {
    let n = d.order();
    if neighbors.len() != n {
        return Err(Error::Shape(format!("{} neighbor sets for a distance matrix of order {n}", neighbors.len())));
    }
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        for &j in neighbors.get(i) {
            z[i * n + j] = (-2.0 * d.get(i, j)).exp();
        }
    }
    SymmetricMatrix::from_fn(n, |i, j| z[i * n + j] + z[j * n + i])
}

/// `I - D^{-1/2} A D^{-1/2}`. Isolated nodes (zero degree) get an all-zero
/// row and column so that each counts as its own connected component.
pub fn normalized_laplacian(a: &SymmetricMatrix) -> Result<SymmetricMatrix> {
    let deg = a.degrees();
    if a.as_slice().iter().any(|&v| v < 0.0) {
        return invalid("adjacency weights must be nonnegative");
    }
    let inv_sqrt: Vec<f64> = deg.iter().map(|&d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 }).collect();
    SymmetricMatrix::from_fn(a.order(), |i, j| {
        let off = -inv_sqrt[i] * a.get(i, j) * inv_sqrt[j];
        if i == j && deg[i] > 0.0 {
            1.0 + off
        } else {
            off
        }
    })
}

/// Spectral clustering result; `isolated` lists zero-degree nodes that
/// were handled by the fallback policy.
#[derive(Debug, Clone)]
pub struct SpectralClustering {
    pub labeling: Labeling,
    pub isolated: Vec<usize>,
}

/// Normalized (symmetric Laplacian) spectral clustering of `a` into
/// `n_clusters` groups.
///
/// Zero-degree nodes are removed before the embedding. Each receives its own
/// label while the cluster budget allows (one label stays reserved for the
/// connected part); any remaining isolated node joins the cluster of its
/// nearest labeled node under `fallback`, or cluster 0 without one.
pub fn spectral_cluster(
    a: &SymmetricMatrix,
    n_clusters: usize,
    rng: &RngStream,
    fallback: Option<&DistanceMatrix>,
) -> Result<SpectralClustering> {
    spectral_cluster_with_restarts(a, n_clusters, rng, fallback, DEFAULT_KMEANS_RESTARTS)
}

pub fn spectral_cluster_with_restarts(
    a: &SymmetricMatrix,
    n_clusters: usize,
    rng: &RngStream,
    fallback: Option<&DistanceMatrix>,
    restarts: usize,
) -> Result<SpectralClustering> {
    let n = a.order();
    if n_clusters == 0 || n_clusters > n {
        return invalid(format!("number of clusters must be in 1..={n}, got {n_clusters}"));
    }
    if let Some(d) = fallback {
        if d.order() != n {
            return Err(Error::Shape("fallback distance matrix order differs from adjacency".into()));
        }
    }
    let deg = a.degrees();
    let (isolated, connected): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| deg[i] <= 0.0);

    let reserve = usize::from(!connected.is_empty());
    let own = isolated.len().min(n_clusters - reserve);
    let k_connected = if connected.is_empty() { 0 } else { n_clusters - own };

    let mut labels = vec![usize::MAX; n];
    if k_connected > 0 {
        let sub = SymmetricMatrix::from_fn(connected.len(), |i, j| a.get(connected[i], connected[j]))?;
        let sub_labels = embed_and_cluster(&sub, k_connected, rng, restarts)?;
        for (&node, l) in connected.iter().zip(sub_labels) {
            labels[node] = l;
        }
    }
    for (offset, &node) in isolated.iter().take(own).enumerate() {
        labels[node] = k_connected + offset;
    }
    let leftover = &isolated[own..];
    if !isolated.is_empty() {
        log::warn!(
            "{} isolated node(s) in the neighbor graph; {} given their own cluster, {} attached to a neighbor",
            isolated.len(),
            own,
            leftover.len()
        );
    }
    for &node in leftover {
        let target = match fallback {
            Some(d) => (0..n)
                .filter(|&j| j != node && labels[j] != usize::MAX)
                .min_by(|&x, &y| d.get(node, x).total_cmp(&d.get(node, y)).then(x.cmp(&y)))
                .map(|j| labels[j])
                .unwrap_or(0),
            None => 0,
        };
        labels[node] = target;
    }
    Ok(SpectralClustering { labeling: Labeling::canonical(&labels, n_clusters), isolated })
}

fn embed_and_cluster(a: &SymmetricMatrix, k: usize, rng: &RngStream, restarts: usize) -> Result<Vec<usize>> {
    let n = a.order();
    if k == 1 {
        return Ok(vec![0; n]);
    }
    let eig = eig_symmetric(&normalized_laplacian(a)?)?;
    let points: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let row: Vec<f64> = (0..k).map(|c| eig.component(i, c)).collect();
            let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                row.iter().map(|v| v / norm).collect()
            } else {
                row
            }
        })
        .collect();
    Ok(kmeans(&points, k, restarts, rng)?.labels)
}

/// Eigengap estimate of the number of clusters together with the ascending
/// Laplacian spectrum it was read from.
#[derive(Debug, Clone, Serialize)]
pub struct EigengapEstimate {
    pub estimate: usize,
    pub eigenvalues: Vec<f64>,
}

/// `argmax_{1 <= k <= l_max} (λ_{k+1} - λ_k)` over the ascending eigenvalues
/// of the normalized Laplacian; ties go to the smaller `k`.
pub fn eigengap_estimate(a: &SymmetricMatrix, l_max: usize) -> Result<EigengapEstimate> {
    let n = a.order();
    if l_max == 0 || l_max > n {
        return invalid(format!("L_max must be in 1..={n}, got {l_max}"));
    }
    let eigenvalues = eig_symmetric(&normalized_laplacian(a)?)?.values;
    let mut estimate = 1;
    let mut best_gap = f64::NEG_INFINITY;
    for k in 1..=l_max.min(n - 1) {
        let gap = eigenvalues[k] - eigenvalues[k - 1];
        if gap > best_gap {
            best_gap = gap;
            estimate = k;
        }
    }
    Ok(EigengapEstimate { estimate, eigenvalues })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClusterCount {
    Known(usize),
    /// Eigengap estimate bounded by `max`.
    Auto {
        max: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NnpcConfig {
    pub q: usize,
    pub clusters: ClusterCount,
    pub kmeans_restarts: usize,
}

impl NnpcConfig {
    pub fn new(q: usize, clusters: ClusterCount) -> Self {
        Self { q, clusters, kmeans_restarts: DEFAULT_KMEANS_RESTARTS }
    }
}

#[derive(Debug, Clone)]
pub struct NnpcOutcome {
    pub labeling: Labeling,
    pub adjacency: SymmetricMatrix,
    /// Present when the cluster count was estimated.
    pub eigengap: Option<EigengapEstimate>,
    pub isolated: Vec<usize>,
}

/// Steps after PSD estimation: neighbor selection, adjacency, optional
/// eigengap estimate, spectral clustering.
pub fn nnpc_from_distances(d: &DistanceMatrix, config: &NnpcConfig, rng: &RngStream) -> Result<NnpcOutcome> {
    let n = d.order();
    if n == 0 {
        return invalid("empty data set");
    }
    if n == 1 {
        // No neighbors exist; a single observation is a single cluster.
        let k = match config.clusters {
            ClusterCount::Known(k) if k != 1 => {
                return invalid(format!("cannot split 1 observation into {k} clusters"))
            }
            _ => 1,
        };
        return Ok(NnpcOutcome {
            labeling: Labeling::new(vec![0], k),
            adjacency: SymmetricMatrix::zeros(1),
            eigengap: matches!(config.clusters, ClusterCount::Auto { .. })
                .then(|| EigengapEstimate { estimate: 1, eigenvalues: vec![0.0] }),
            isolated: Vec::new(),
        });
    }
    let neighbors = nearest_neighbor_sets(d, config.q)?;
    let adjacency = build_adjacency(d, &neighbors)?;
    let (k, eigengap) = match config.clusters {
        ClusterCount::Known(k) => (k, None),
        ClusterCount::Auto { max } => {
            let est = eigengap_estimate(&adjacency, max.clamp(1, n))?;
            (est.estimate, Some(est))
        }
    };
    let sc = spectral_cluster_with_restarts(&adjacency, k, rng, Some(d), config.kmeans_restarts)?;
    Ok(NnpcOutcome { labeling: sc.labeling, adjacency, eigengap, isolated: sc.isolated })
}

/// End-to-end NNPC on raw observations.
pub fn nnpc_cluster(
    observations: &[Observation],
    psd: &PsdConfig,
    config: &NnpcConfig,
    rng: &RngStream,
    exec: Execution,
) -> Result<NnpcOutcome> {
    let psds = estimate_psds(observations, psd, exec)?;
    let d = distance_matrix(&psds, exec)?;
    nnpc_from_distances(&d, config, rng)
}
