//! Experiment configuration files.

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use nnpc::experiment::BenchConfig;
use nnpc::generators::{normalize_model, preset, GenerativeModel};
use nnpc::spectra::{PsdConfig, WindowKind};

const DEFAULT_PRESET: &str = "paper-fig1";

/// One ARMA model given by its coefficient vectors.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    #[serde(default = "unit")]
    pub a: Vec<f64>,
    #[serde(default = "unit")]
    pub b: Vec<f64>,
    /// Rescale to unit power (the presets are normalized).
    #[serde(default = "yes")]
    pub normalize: bool,
}

fn unit() -> Vec<f64> {
    vec![1.0]
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub models: Option<Vec<ModelSpec>>,
    #[serde(rename = "M_list", default)]
    pub m_list: Vec<usize>,
    #[serde(default = "zero_noise")]
    pub sigma2_list: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_n_per_model")]
    pub n_per_model: usize,
    #[serde(default = "default_q")]
    pub q: usize,
    #[serde(default)]
    pub window: WindowKind,
    #[serde(default = "default_grid_factor")]
    pub grid_factor: usize,
    #[serde(default)]
    pub seed: u64,
    /// Single-point fields read by `check-condition`.
    #[serde(rename = "M", default)]
    pub m: Option<usize>,
    #[serde(rename = "N", default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub sigma2: Option<f64>,
}

fn zero_noise() -> Vec<f64> {
    vec![0.0]
}

fn default_trials() -> usize {
    50
}

fn default_n_per_model() -> usize {
    25
}

fn default_q() -> usize {
    10
}

fn default_grid_factor() -> usize {
    4
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("invalid configuration")
    }

    pub fn resolve_models(&self) -> Result<Vec<GenerativeModel>> {
        match (&self.preset, &self.models) {
            (Some(_), Some(_)) => bail!("configuration sets both `preset` and `models`"),
            (None, Some(specs)) => {
                if specs.is_empty() {
                    bail!("`models` is empty");
                }
                specs
                    .iter()
                    .enumerate()
                    .map(|(i, s)| {
                        let model =
                            GenerativeModel::new(s.a.clone(), s.b.clone()).with_context(|| format!("model {i}"))?;
                        if s.normalize {
                            Ok(normalize_model(&model).with_context(|| format!("model {i}"))?)
                        } else {
                            Ok(model)
                        }
                    })
                    .collect()
            }
            (name, None) => Ok(preset(name.as_deref().unwrap_or(DEFAULT_PRESET))?),
        }
    }

    pub fn psd_config(&self) -> Result<PsdConfig> {
        if self.grid_factor < 2 {
            bail!("grid_factor must be at least 2, got {}", self.grid_factor);
        }
        Ok(PsdConfig { window: self.window, grid_factor: self.grid_factor, unit_power: false })
    }

    pub fn bench_config(&self) -> Result<BenchConfig> {
        if self.m_list.is_empty() {
            bail!("`M_list` is required");
        }
        let mut config = BenchConfig::new(
            self.resolve_models()?,
            self.m_list.clone(),
            self.sigma2_list.clone(),
            self.trials,
            self.seed,
        );
        config.n_per_model = self.n_per_model;
        config.q = self.q;
        config.psd = self.psd_config()?;
        Ok(config)
    }

    /// `(M, N, σ²)` for a single condition check: explicit fields win, then
    /// one-element lists, then `N = n_per_model · L` and `σ² = 0`.
    pub fn condition_point(&self, n_models: usize) -> Result<(usize, usize, f64)> {
        let m = match (self.m, self.m_list.as_slice()) {
            (Some(m), _) => m,
            (None, [m]) => *m,
            (None, []) => bail!("`M` is required"),
            (None, _) => bail!("`M_list` has several entries; set `M` or pass --m"),
        };
        let sigma2 = match (self.sigma2, self.sigma2_list.as_slice()) {
            (Some(s), _) => s,
            (None, [s]) => *s,
            (None, _) => bail!("`sigma2_list` has several entries; set `sigma2` or pass --sigma2"),
        };
        let n = self.n.unwrap_or(self.n_per_model * n_models);
        Ok((m, n, sigma2))
    }
}
