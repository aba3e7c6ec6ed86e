use rand::Rng;

use super::RngStream;
use crate::error::{invalid, Result};

pub const MAX_LLOYD_ITERATIONS: usize = 300;

/// Outcome of the best k-means restart.
#[derive(Debug, Clone)]
pub struct KMeans {
    pub labels: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    /// Within-cluster sum of squared distances.
    pub wcss: f64,
    pub iterations: usize,
    /// WCSS after every assignment step of the winning restart.
    pub objective_trace: Vec<f64>,
}

/// Lloyd's algorithm with k-means++ seeding, keeping the restart with the
/// lowest WCSS (earliest restart on ties).
pub fn kmeans(points: &[Vec<f64>], k: usize, restarts: usize, rng: &RngStream) -> Result<KMeans> {
    if k == 0 {
        return invalid("k must be positive");
    }
    if k > points.len() {
        return invalid(format!("k = {k} exceeds the number of points ({})", points.len()));
    }
    if restarts == 0 {
        return invalid("restarts must be positive");
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return invalid("all points must have the same dimension");
    }
    if points.iter().flatten().any(|v| !v.is_finite()) {
        return Err(crate::Error::NonFinite("k-means input"));
    }

    let mut gen = rng.rng();
    let mut best: Option<KMeans> = None;
    for _ in 0..restarts {
        let seeds = plus_plus_seeds(points, k, &mut gen);
        let run = lloyd(points, seeds);
        if best.as_ref().is_none_or(|b| run.wcss < b.wcss) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn plus_plus_seeds<R: Rng>(points: &[Vec<f64>], k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut chosen = vec![false; n];
    let first = rng.random_range(0..n);
    chosen[first] = true;
    let mut centers = vec![points[first].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &points[first])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = None;
            for (i, &w) in d2.iter().enumerate() {
                if w <= 0.0 {
                    continue;
                }
                pick = Some(i);
                if target < w {
                    break;
                }
                target -= w;
            }
            pick.expect("positive total weight")
        } else {
            // All remaining points coincide with a center.
            let free: Vec<usize> = (0..n).filter(|&i| !chosen[i]).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen[pick] = true;
        centers.push(points[pick].clone());
        for (i, p) in points.iter().enumerate() {
            d2[i] = d2[i].min(sq_dist(p, &points[pick]));
        }
    }
    centers
}

fn lloyd(points: &[Vec<f64>], mut centroids: Vec<Vec<f64>>) -> KMeans {
    let k = centroids.len();
    let dim = points[0].len();
    let mut labels = vec![usize::MAX; points.len()];
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut wcss;
    loop {
        iterations += 1;
        let mut changed = false;
        wcss = 0.0;
        for (i, p) in points.iter().enumerate() {
            let (best, dist) = centroids
                .iter()
                .enumerate()
                .map(|(c, centre)| (c, sq_dist(p, centre)))
                .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
            wcss += dist;
            if labels[i] != best {
                labels[i] = best;
                changed = true;
            }
        }
        trace.push(wcss);
        if !changed || iterations >= MAX_LLOYD_ITERATIONS {
            break;
        }
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &l) in points.iter().zip(&labels) {
            counts[l] += 1;
            for (s, v) in sums[l].iter_mut().zip(p) {
                *s += v;
            }
        }
        for c in 0..k {
            // Empty clusters keep their previous centroid.
            if counts[c] > 0 {
                centroids[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }
    }
    KMeans { labels, centroids, wcss, iterations, objective_trace: trace }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[f64]) -> Vec<Vec<f64>> {
        v.iter().map(|&x| vec![x]).collect()
    }

    #[test]
    fn two_groups_on_a_line() {
        let r = kmeans(&pts(&[0.0, 0.1, 10.0, 10.1]), 2, 10, &RngStream::new(1, 0)).unwrap();
        assert_eq!(r.labels[0], r.labels[1]);
        assert_eq!(r.labels[2], r.labels[3]);
        assert_ne!(r.labels[0], r.labels[2]);
        // Brute force over all 2-partitions: best is {0,1} | {2,3}.
        assert!((r.wcss - 0.01).abs() < 1e-12);
    }

    #[test]
    fn k_equals_n_is_exact() {
        let r = kmeans(&pts(&[3.0, -1.0, 7.5, 2.0]), 4, 3, &RngStream::new(5, 0)).unwrap();
        let mut l = r.labels.clone();
        l.sort();
        l.dedup();
        assert_eq!(l.len(), 4);
        assert_eq!(r.wcss, 0.0);
    }

    #[test]
    fn k_one_is_single_cluster() {
        let r = kmeans(&pts(&[3.0, -1.0, 7.5]), 1, 2, &RngStream::new(5, 0)).unwrap();
        assert_eq!(r.labels, vec![0, 0, 0]);
    }

    #[test]
    fn parameter_errors() {
        let p = pts(&[1.0, 2.0]);
        assert!(kmeans(&p, 3, 1, &RngStream::new(0, 0)).is_err());
        assert!(kmeans(&p, 0, 1, &RngStream::new(0, 0)).is_err());
        assert!(kmeans(&[vec![1.0], vec![1.0, 2.0]], 1, 1, &RngStream::new(0, 0)).is_err());
    }

    #[test]
    fn duplicate_points() {
        let r = kmeans(&pts(&[1.0, 1.0, 1.0]), 2, 4, &RngStream::new(9, 2)).unwrap();
        assert_eq!(r.wcss, 0.0);
    }
}
