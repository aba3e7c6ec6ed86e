//! Seeded Monte Carlo sweeps over observation length and noise variance.
//!
//! Every trial owns the stream `(seed, point << 32 | trial)`, so results
//! are identical whether trials run sequentially or in parallel.

use serde::{Deserialize, Serialize};

use crate::distances::distance_matrix;
use crate::error::{invalid, Result};
use crate::exec::Execution;
use crate::generators::{make_benchmark_dataset, GenerativeModel, NoiseSpec};
use crate::km::km_from_distances;
use crate::metrics::clustering_error;
use crate::nnpc::{nnpc_from_distances, ClusterCount, NnpcConfig};
use crate::numerics::RngStream;
use crate::spectra::{estimate_psds, PsdConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Nnpc,
    Km,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Nnpc => "nnpc",
            Algorithm::Km => "km",
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub models: Vec<GenerativeModel>,
    pub lens: Vec<usize>,
    pub sigma2s: Vec<f64>,
    pub trials: usize,
    pub n_per_model: usize,
    pub q: usize,
    pub psd: PsdConfig,
    pub seed: u64,
}

impl BenchConfig {
    /// Sweep defaults: gaussian window (std 50), `q = 10`, 25 observations
    /// per model.
    pub fn new(models: Vec<GenerativeModel>, lens: Vec<usize>, sigma2s: Vec<f64>, trials: usize, seed: u64) -> Self {
        Self { models, lens, sigma2s, trials, n_per_model: 25, q: 10, psd: PsdConfig::default(), seed }
    }

    fn validate(&self) -> Result<()> {
        if self.models.is_empty() {
            return invalid("no generative models");
        }
        if self.lens.is_empty() || self.sigma2s.is_empty() {
            return invalid("M_list and sigma2_list must be nonempty");
        }
        if self.trials == 0 || self.n_per_model == 0 {
            return invalid("trials and n_per_model must be positive");
        }
        let n = self.models.len() * self.n_per_model;
        if self.q == 0 || self.q >= n {
            return invalid(format!("q must be in 1..{n}, got {}", self.q));
        }
        if let Some(&m) = self.lens.iter().find(|&&m| m < 2) {
            return invalid(format!("observation length {m} < 2"));
        }
        for &s in &self.sigma2s {
            NoiseSpec::new(s)?;
        }
        Ok(())
    }
}

/// Clustering errors of both algorithms on one simulated data set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub nnpc: f64,
    pub km: f64,
}

pub fn trial_stream(seed: u64, point: usize, trial: usize) -> RngStream {
    RngStream::new(seed, ((point as u64) << 32) | trial as u64)
}

/// Simulates one data set and clusters it with NNPC (known `L`) and KM.
pub fn run_trial(config: &BenchConfig, len: usize, sigma2: f64, stream: &RngStream) -> Result<TrialOutcome> {
    let counts = vec![config.n_per_model; config.models.len()];
    let data = make_benchmark_dataset(&config.models, &counts, len, NoiseSpec::new(sigma2)?, stream)?;
    let psds = estimate_psds(&data.observations, &config.psd, Execution::Sequential)?;
    let d = distance_matrix(&psds, Execution::Sequential)?;
    let l = config.models.len();
    let nnpc = nnpc_from_distances(&d, &NnpcConfig::new(config.q, ClusterCount::Known(l)), &stream.fork(1))?;
    let km = km_from_distances(&d, l)?;
    Ok(TrialOutcome {
        nnpc: clustering_error(nnpc.labeling.labels(), &data.labels)?,
        km: clustering_error(km.labels(), &data.labels)?,
    })
}

/// One plot-ready row: mean and sample standard deviation of the CE.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    #[serde(rename = "M")]
    pub len: usize,
    pub sigma2: f64,
    pub algorithm: Algorithm,
    pub mean_ce: f64,
    pub std_ce: f64,
    pub trials: usize,
}

/// Runs every `(M, σ²)` point and returns rows sorted by
/// `(M, σ², algorithm)` in configuration order.
pub fn run_bench(config: &BenchConfig, exec: Execution) -> Result<Vec<BenchRow>> {
    config.validate()?;
    let points: Vec<(usize, f64)> =
        config.lens.iter().flat_map(|&m| config.sigma2s.iter().map(move |&s| (m, s))).collect();
    let jobs = points.len() * config.trials;
    let outcomes = exec.try_map(jobs, |job| {
        let (point, trial) = (job / config.trials, job % config.trials);
        let (len, sigma2) = points[point];
        run_trial(config, len, sigma2, &trial_stream(config.seed, point, trial))
    })?;

    let mut rows = Vec::with_capacity(points.len() * 2);
    for (point, &(len, sigma2)) in points.iter().enumerate() {
        let chunk = &outcomes[point * config.trials..(point + 1) * config.trials];
        for algorithm in [Algorithm::Nnpc, Algorithm::Km] {
            let ces: Vec<f64> = chunk
                .iter()
                .map(|o| match algorithm {
                    Algorithm::Nnpc => o.nnpc,
                    Algorithm::Km => o.km,
                })
                .collect();
            let (mean_ce, std_ce) = mean_std(&ces);
            rows.push(BenchRow { len, sigma2, algorithm, mean_ce, std_ce, trials: config.trials });
        }
    }
    Ok(rows)
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::overlapping_arma_models;

    fn small() -> BenchConfig {
        let mut c = BenchConfig::new(overlapping_arma_models(), vec![128], vec![0.0, 0.25], 3, 17);
        c.n_per_model = 6;
        c.q = 3;
        c
    }

    #[test]
    fn deterministic_across_execution_policies() {
        let c = small();
        let a = run_bench(&c, Execution::Sequential).unwrap();
        let b = run_bench(&c, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 4);
        assert!(a.iter().all(|r| (0.0..=1.0).contains(&r.mean_ce)));
        assert_eq!(a[0].algorithm, Algorithm::Nnpc);
        assert_eq!(a[1].algorithm, Algorithm::Km);
        assert_eq!(a[2].sigma2, 0.25);
    }

    #[test]
    fn invalid_configs() {
        let mut c = small();
        c.q = 18;
        assert!(run_bench(&c, Execution::Sequential).is_err());
        let mut c = small();
        c.lens.clear();
        assert!(run_bench(&c, Execution::Sequential).is_err());
        let mut c = small();
        c.sigma2s = vec![-0.1];
        assert!(run_bench(&c, Execution::Sequential).is_err());
    }

    #[test]
    fn mean_std_values() {
        assert_eq!(mean_std(&[0.5]), (0.5, 0.0));
        let (m, s) = mean_std(&[0.0, 1.0]);
        assert_eq!(m, 0.5);
        assert!((s - 0.5f64.sqrt()).abs() < 1e-15);
    }
}
