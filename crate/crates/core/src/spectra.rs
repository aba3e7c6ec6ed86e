//! Blackman–Tukey PSD estimation: biased ACF estimate, lag windows and
//! evaluation of the windowed ACF transform on a uniform frequency grid.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exec::Execution;
use crate::numerics::{is_power_of_two, next_power_of_two, FftPlan};

/// Minimum number of frequency samples used to bound the window transform.
pub const WINDOW_GRID: usize = 4096;

/// One finite-length real observation.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub id: usize,
    samples: Vec<f64>,
}

impl Observation {
    pub fn new(id: usize, samples: Vec<f64>) -> Result<Self> {
        if samples.len() < 2 {
            return invalid(format!("observation {id} has {} samples; need at least 2", samples.len()));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("observation samples"));
        }
        Ok(Self { id, samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Appends zeros up to `len` samples.
    pub fn zero_padded(&self, len: usize) -> Self {
        let mut samples = self.samples.clone();
        if samples.len() < len {
            samples.resize(len, 0.0);
        }
        Self { id: self.id, samples }
    }

    /// Subtracts the sample mean.
    pub fn demeaned(&self) -> Self {
        let mean = self.samples.iter().sum::<f64>() / self.samples.len() as f64;
        Self { id: self.id, samples: self.samples.iter().map(|v| v - mean).collect() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum WindowKind {
    Gaussian { std: f64 },
    Bartlett,
    Rectangular,
}

impl Default for WindowKind {
    fn default() -> Self {
        WindowKind::Gaussian { std: 50.0 }
    }
}

/// Lag window `g[m]`, `0 <= m < M`, with its transform bound.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowSpec {
    pub kind: WindowKind,
    values: Vec<f64>,
    /// `A = sup_f g(f)`, maximised over a dense frequency grid.
    pub spectral_bound: f64,
    /// Smallest value of `g(f)` on the same grid.
    pub spectral_min: f64,
    /// True iff the transform is nonnegative (to `-1e-6`).
    pub theory_valid: bool,
}

impl WindowSpec {
    /// Observation length `M` the window was built for.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `g[m]` for `0 <= m < M`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `g[m]` for any integer lag; zero outside `|m| < M`.
    pub fn at(&self, lag: i64) -> f64 {
        self.values.get(lag.unsigned_abs() as usize).copied().unwrap_or(0.0)
    }
}

pub fn make_window(kind: WindowKind, len: usize) -> Result<WindowSpec> {
    if len < 2 {
        return invalid(format!("window length must be at least 2, got {len}"));
    }
    let values: Vec<f64> = match kind {
        WindowKind::Gaussian { std } => {
            if !(std.is_finite() && std > 0.0) {
                return invalid(format!("gaussian window std must be positive, got {std}"));
            }
            (0..len).map(|m| (-((m * m) as f64) / (2.0 * std * std)).exp()).collect()
        }
        WindowKind::Bartlett => (0..len).map(|m| 1.0 - m as f64 / len as f64).collect(),
        WindowKind::Rectangular => vec![1.0; len],
    };

    let grid = WINDOW_GRID.max(next_power_of_two(2 * len));
    let plan = FftPlan::new(grid)?;
    let transform = plan.forward_real(&even_extension(&values, grid));
    let (lo, hi) =
        transform.iter().map(|c| c.re).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    Ok(WindowSpec { kind, values, spectral_bound: hi, spectral_min: lo, theory_valid: lo >= -1e-6 })
}

/// Lays out `seq[0..len]` as an even sequence on a circular buffer of size
/// `grid`: `out[m] = out[grid - m] = seq[m]`. Requires `grid >= 2 * len`.
fn even_extension(seq: &[f64], grid: usize) -> Vec<f64> {
    debug_assert!(grid >= 2 * seq.len());
    let mut out = vec![0.0; grid];
    out[0] = seq[0];
    for (m, &v) in seq.iter().enumerate().skip(1) {
        out[m] = v;
        out[grid - m] = v;
    }
    out
}

/// PSD samples `values[j] ≈ ŝ(j / F)` on a uniform grid over `[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdEstimate {
    values: Vec<f64>,
    /// `r̂[0]` of the source observation (its empirical power).
    pub source_acf_zero: f64,
}

impl PsdEstimate {
    pub fn from_values(values: Vec<f64>, source_acf_zero: f64) -> Self {
        Self { values, source_acf_zero }
    }

    pub fn grid_size(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Integral of the PSD over `[0, 1)` (grid mean).
    pub fn power(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

/// Default grid: the smallest power of two `>= 4M`.
pub fn default_grid_size(len: usize) -> usize {
    next_power_of_two(4 * len)
}

/// Biased ACF estimate `r̂[m] = (1/M) Σ_n x[n+m] x[n]` for `0 <= m < M`.
pub fn estimate_acf(obs: &Observation) -> Vec<f64> {
    let plan = FftPlan::new(next_power_of_two(2 * obs.len())).expect("power of two");
    acf_with_plan(obs.samples(), &plan)
}

fn acf_with_plan(x: &[f64], plan: &FftPlan) -> Vec<f64> {
    let m = x.len();
    let mut buf = vec![Complex64::new(0.0, 0.0); plan.len()];
    for (b, &v) in buf.iter_mut().zip(x) {
        b.re = v;
    }
    plan.forward(&mut buf);
    for b in buf.iter_mut() {
        *b = Complex64::new(b.norm_sqr(), 0.0);
    }
    plan.inverse(&mut buf);
    buf[..m].iter().map(|c| c.re / m as f64).collect()
}

/// Blackman–Tukey estimate of one observation on a grid of size `grid`.
pub fn bt_psd(obs: &Observation, window: &WindowSpec, grid: usize) -> Result<PsdEstimate> {
    let m = obs.len();
    if window.len() != m {
        return Err(Error::Shape(format!(
            "window built for length {} applied to observation {} of length {m}",
            window.len(),
            obs.id
        )));
    }
    if !is_power_of_two(grid) {
        return Err(Error::NotPowerOfTwo(grid));
    }
    if grid < 2 * m {
        return Err(Error::GridTooSmall { grid, len: m, min: 2 * m });
    }
    let plan = FftPlan::new(grid)?;
    let acf = acf_with_plan(obs.samples(), &plan);
    let windowed: Vec<f64> = acf.iter().zip(window.values()).map(|(r, g)| r * g).collect();
    let spectrum = plan.forward_real(&even_extension(&windowed, grid));
    let values: Vec<f64> = spectrum.iter().map(|c| c.re).collect();
    debug_assert!({
        let peak = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        spectrum.iter().all(|c| c.im.abs() <= 1e-9 * peak.max(f64::MIN_POSITIVE))
    });
    Ok(PsdEstimate { values, source_acf_zero: acf[0] })
}

/// Rescales a PSD so that its grid mean is one.
pub fn normalize_unit_power(psd: &PsdEstimate) -> Result<PsdEstimate> {
    let power = psd.power();
    if !(power > 0.0 && power.is_finite()) {
        return Err(Error::Degenerate(format!("PSD has nonpositive power {power}")));
    }
    Ok(PsdEstimate { values: psd.values.iter().map(|v| v / power).collect(), source_acf_zero: psd.source_acf_zero })
}

/// How to turn a batch of observations into comparable PSD estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsdConfig {
    pub window: WindowKind,
    /// Grid size as a multiple of `M`, rounded up to a power of two.
    pub grid_factor: usize,
    pub unit_power: bool,
}

impl Default for PsdConfig {
    fn default() -> Self {
        Self { window: WindowKind::default(), grid_factor: 4, unit_power: false }
    }
}

impl PsdConfig {
    pub fn grid_size(&self, len: usize) -> usize {
        next_power_of_two(self.grid_factor.max(2) * len)
    }
}

/// Estimates the PSD of every observation; all must share one length.
pub fn estimate_psds(observations: &[Observation], config: &PsdConfig, exec: Execution) -> Result<Vec<PsdEstimate>> {
    let Some(first) = observations.first() else {
        return invalid("no observations");
    };
    let m = first.len();
    if let Some(o) = observations.iter().find(|o| o.len() != m) {
        return Err(Error::Shape(format!(
            "observation {} has length {} but observation {} has length {m}; zero-pad first",
            o.id,
            o.len(),
            first.id
        )));
    }
    let window = make_window(config.window, m)?;
    let grid = config.grid_size(m);
    exec.try_map(observations.len(), |i| {
        let psd = bt_psd(&observations[i], &window, grid)?;
        if config.unit_power {
            normalize_unit_power(&psd)
                .map_err(|_| Error::Degenerate(format!("observation {} has zero power", observations[i].id)))
        } else {
            Ok(psd)
        }
    })
}
