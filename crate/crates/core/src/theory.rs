//! Quantities of the clustering condition and empirical predicates for the
//! guarantees it implies: distance separation, no false connections and
//! exact KM recovery.
//!
//! The condition reads
//!
//! ```text
//! min_{k≠l} d(X_k, X_l) > 8 A (B + σ²) sqrt(2 ln M / M) + 2 μ_max
//! ```
//!
//! and, when it holds, NNPC has no false connections and KM recovers the
//! true partition with probability at least `1 - 2N/M²`.

use serde::Serialize;

use crate::distances::{half_l1, DistanceMatrix};
use crate::error::{invalid, Error, Result};
use crate::generators::{true_acf, GenerativeModel, FINE_GRID};
use crate::numerics::SymmetricMatrix;
use crate::spectra::{make_window, WindowKind, WindowSpec};

/// Target for the neglected ACF tail mass in `μ`.
pub const ACF_TAIL_TOLERANCE: f64 = 1e-9;

/// `h[m] = 1 - g[m] (1 - |m|/M)` for `|m| < M`, and 1 beyond.
pub fn h_sequence(window: &WindowSpec, max_lag: usize) -> Result<Vec<f64>> {
    require_admissible(window)?;
    let m = window.len();
    Ok((0..=max_lag)
        .map(|lag| if lag < m { 1.0 - window.values()[lag] * (1.0 - lag as f64 / m as f64) } else { 1.0 })
        .collect())
}

fn require_admissible(window: &WindowSpec) -> Result<()> {
    if window.theory_valid {
        Ok(())
    } else {
        Err(Error::InadmissibleWindow(format!(
            "{:?} window of length {} has a transform dipping to {:.3e}",
            window.kind,
            window.len(),
            window.spectral_min
        )))
    }
}

/// Lag beyond which the ACF tail mass is below [`ACF_TAIL_TOLERANCE`],
/// using the geometric envelope `r[0] ρ^m` of the AR pole radius `ρ`.
pub fn acf_truncation_lag(model: &GenerativeModel) -> usize {
    let max = FINE_GRID / 2 - 1;
    let order = model.ar().len() + model.ma().len();
    let rho = model.pole_radius();
    if rho <= 0.0 {
        return (model.ma().len() - 1).min(max);
    }
    let r0 = model.power().max(f64::MIN_POSITIVE);
    // r0 ρ^T / (1 - ρ) < tol
    let t = ((ACF_TAIL_TOLERANCE * (1.0 - rho) / r0).ln() / rho.ln()).ceil();
    let t = if t.is_finite() && t > 0.0 { t as usize } else { 0 };
    (t + order).min(max)
}

/// `μ = Σ_m |h[m]| |r[m]|` over all lags for one model.
pub fn acf_moment(model: &GenerativeModel, window: &WindowSpec) -> Result<f64> {
    let lag = acf_truncation_lag(model);
    let h = h_sequence(window, lag)?;
    let r = true_acf(model, lag)?;
    let tail: f64 = h.iter().zip(&r).skip(1).map(|(h, r)| h.abs() * r.abs()).sum();
    Ok(h[0].abs() * r[0].abs() + 2.0 * tail)
}

/// `μ_max = max_l μ_l` for a window of kind `kind` at observation length `len`.
pub fn mu_max(models: &[GenerativeModel], window: &WindowSpec) -> Result<f64> {
    if models.is_empty() {
        return invalid("no models");
    }
    models.iter().map(|m| acf_moment(m, window)).try_fold(0.0f64, |acc, mu| mu.map(|mu| acc.max(mu)))
}

/// Half-L1 distance between two true model PSDs on the fine grid.
pub fn true_model_distance(m1: &GenerativeModel, m2: &GenerativeModel) -> Result<f64> {
    let (s1, s2) = (m1.fine_grid_psd(), m2.fine_grid_psd());
    if s1.len() != s2.len() {
        return Err(Error::Shape("model PSD grids differ".into()));
    }
    Ok(half_l1(s1, s2))
}

/// `8 A (B + σ²) sqrt(2 ln M / M)`.
pub fn noise_term(a_bound: f64, b_bound: f64, sigma2: f64, len: usize) -> f64 {
    let m = len as f64;
    8.0 * a_bound * (b_bound + sigma2) * (2.0 * m.ln() / m).sqrt()
}

/// `1 - 2N / M²`.
pub fn success_probability_bound(n: usize, len: usize) -> f64 {
    let m = len as f64;
    1.0 - 2.0 * n as f64 / (m * m)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    /// Minimum pairwise true-model distance.
    pub lhs: f64,
    pub noise_term: f64,
    pub bias_term: f64,
    pub satisfied: bool,
    pub prob_bound: f64,
    #[serde(rename = "A")]
    pub a_bound: f64,
    #[serde(rename = "B")]
    pub b_bound: f64,
    pub mu_max: f64,
    #[serde(rename = "M")]
    pub len: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub sigma2: f64,
}

/// Evaluates every term of the clustering condition.
pub fn check_condition(
    models: &[GenerativeModel],
    window: WindowKind,
    len: usize,
    n: usize,
    sigma2: f64,
) -> Result<ConditionReport> {
    if models.len() < 2 {
        return invalid("the clustering condition needs at least two models");
    }
    if len < 2 {
        return invalid(format!("observation length must be at least 2, got {len}"));
    }
    if !(sigma2.is_finite() && sigma2 >= 0.0) {
        return invalid(format!("noise variance must be nonnegative, got {sigma2}"));
    }
    let window = make_window(window, len)?;
    require_admissible(&window)?;

    let mut lhs = f64::INFINITY;
    for i in 0..models.len() {
        for j in i + 1..models.len() {
            lhs = lhs.min(true_model_distance(&models[i], &models[j])?);
        }
    }
    let b_bound = models.iter().map(GenerativeModel::peak).fold(f64::NEG_INFINITY, f64::max);
    let mu = mu_max(models, &window)?;
    let noise = noise_term(window.spectral_bound, b_bound, sigma2, len);
    let bias = 2.0 * mu;
    Ok(ConditionReport {
        lhs,
        noise_term: noise,
        bias_term: bias,
        satisfied: lhs > noise + bias,
        prob_bound: success_probability_bound(n, len),
        a_bound: window.spectral_bound,
        b_bound,
        mu_max: mu,
        len,
        n,
        sigma2,
    })
}

/// Whether every inter-label distance exceeds every intra-label distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Separation {
    pub holds: bool,
    /// `min_inter - max_intra`; infinite when either side is vacuous.
    pub margin: f64,
    pub min_inter: f64,
    /// `-inf` when every class is a singleton.
    pub max_intra: f64,
}

/// Compares the smallest distance across labels with the largest distance
/// within a label. Singleton classes contribute no intra-label pairs.
pub fn check_separation(d: &DistanceMatrix, labels: &[usize]) -> Result<Separation> {
    let n = d.order();
    if labels.len() != n {
        return Err(Error::Shape(format!("{} labels for {n} observations", labels.len())));
    }
    let mut min_inter = f64::INFINITY;
    let mut max_intra = f64::NEG_INFINITY;
    for i in 0..n {
        for j in i + 1..n {
            let v = d.get(i, j);
            if labels[i] == labels[j] {
                max_intra = max_intra.max(v);
            } else {
                min_inter = min_inter.min(v);
            }
        }
    }
    Ok(Separation { holds: min_inter > max_intra, margin: min_inter - max_intra, min_inter, max_intra })
}

/// True iff every edge of `a` joins two nodes with the same label.
pub fn check_nfc(a: &SymmetricMatrix, labels: &[usize]) -> Result<bool> {
    let n = a.order();
    if labels.len() != n {
        return Err(Error::Shape(format!("{} labels for {n} nodes", labels.len())));
    }
    Ok((0..n).all(|i| (i + 1..n).all(|j| a.get(i, j) == 0.0 || labels[i] == labels[j])))
}
