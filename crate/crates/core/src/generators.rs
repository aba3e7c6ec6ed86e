//! Synthetic data: Gaussian ARMA processes with exact PSD/ACF, additive
//! white Gaussian noise, and labeled benchmark data sets.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numerics::{is_power_of_two, FftPlan, RngStream};
use crate::spectra::Observation;

/// Grid used for every truth-side computation (PSD, ACF, power).
pub const FINE_GRID: usize = 1 << 16;

/// ARMA model with PSD `|B(f)|² / |A(f)|²` driven by unit-variance white
/// Gaussian innovations. `a[0]` multiplies the current output sample.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerativeModel {
    a: Vec<f64>,
    b: Vec<f64>,
    normalized: bool,
    fine_grid_psd: Vec<f64>,
}

impl GenerativeModel {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.is_empty() || b.is_empty() {
            return invalid("ARMA coefficient vectors must be nonempty");
        }
        if a.iter().chain(&b).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("ARMA coefficients"));
        }
        if a[0] == 0.0 {
            return invalid("leading AR coefficient must be nonzero");
        }
        if !is_stable(&a) {
            return Err(Error::Unstable(max_root_modulus(&a)));
        }
        let fine_grid_psd = arma_psd(&a, &b, FINE_GRID)?;
        Ok(Self { a, b, normalized: false, fine_grid_psd })
    }

    pub fn ar(&self) -> &[f64] {
        &self.a
    }

    pub fn ma(&self) -> &[f64] {
        &self.b
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// True PSD sampled on [`FINE_GRID`] points over `[0, 1)`.
    pub fn fine_grid_psd(&self) -> &[f64] {
        &self.fine_grid_psd
    }

    /// `∫ s(f) df`, i.e. the process variance.
    pub fn power(&self) -> f64 {
        self.fine_grid_psd.iter().sum::<f64>() / FINE_GRID as f64
    }

    /// `sup_f s(f)` estimated by the fine-grid maximum.
    pub fn peak(&self) -> f64 {
        self.fine_grid_psd.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest modulus among the AR poles (0 for pure MA models).
    pub fn pole_radius(&self) -> f64 {
        max_root_modulus(&self.a)
    }
}

/// Evaluates `|Σ_u b_u e^{-i2πuf}|² / |Σ_v a_v e^{-i2πvf}|²` at `f = j / grid`.
pub fn arma_psd(a: &[f64], b: &[f64], grid: usize) -> Result<Vec<f64>> {
    if !is_power_of_two(grid) {
        return Err(Error::NotPowerOfTwo(grid));
    }
    if a.len() > grid || b.len() > grid {
        return invalid(format!("grid of size {grid} is shorter than the coefficient vectors"));
    }
    if a.first().is_none_or(|&v| v == 0.0) {
        return invalid("leading AR coefficient must be nonzero");
    }
    if !is_stable(a) {
        return Err(Error::Unstable(max_root_modulus(a)));
    }
    let plan = FftPlan::new(grid)?;
    let padded = |c: &[f64]| {
        let mut v = vec![0.0; grid];
        v[..c.len()].copy_from_slice(c);
        plan.forward_real(&v)
    };
    let num = padded(b);
    let den = padded(a);
    Ok(num.iter().zip(&den).map(|(n, d)| n.norm_sqr() / d.norm_sqr()).collect())
}

/// Schur–Cohn (step-down) test: all roots of `a[0] z^n + ... + a[n]`
/// strictly inside the unit circle.
pub fn is_stable(a: &[f64]) -> bool {
    let mut p: Vec<f64> = a.iter().map(|v| v / a[0]).collect();
    while p.len() > 1 {
        let n = p.len() - 1;
        let k = p[n];
        if k.is_nan() || k.abs() >= 1.0 {
            return false;
        }
        let denom = 1.0 - k * k;
        p = (0..n).map(|i| (p[i] - k * p[n - i]) / denom).collect();
    }
    true
}

/// Largest root modulus of `a[0] z^n + ... + a[n]` (Durand–Kerner).
pub fn max_root_modulus(a: &[f64]) -> f64 {
    let n = a.len().saturating_sub(1);
    if n == 0 {
        return 0.0;
    }
    let c: Vec<Complex64> = a.iter().map(|v| Complex64::new(v / a[0], 0.0)).collect();
    let eval = |z: Complex64| c.iter().fold(Complex64::new(0.0, 0.0), |acc, &ci| acc * z + ci);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32)).collect();
    for _ in 0..1000 {
        let mut delta: f64 = 0.0;
        for i in 0..n {
            let denom = (0..n).filter(|&j| j != i).fold(Complex64::new(1.0, 0.0), |acc, j| acc * (roots[i] - roots[j]));
            if denom.norm() == 0.0 {
                continue;
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-14 {
            break;
        }
    }
    roots.iter().map(|r| r.norm()).fold(0.0, f64::max)
}

/// Rescales `b` so that the process has unit power.
pub fn normalize_model(model: &GenerativeModel) -> Result<GenerativeModel> {
    let power = model.power();
    if power.is_nan() || power <= 0.0 {
        return Err(Error::Degenerate("model has zero power".into()));
    }
    let scale = power.sqrt().recip();
    Ok(GenerativeModel {
        a: model.a.clone(),
        b: model.b.iter().map(|v| v * scale).collect(),
        normalized: true,
        fine_grid_psd: model.fine_grid_psd.iter().map(|v| v / power).collect(),
    })
}

/// `r[m] = ∫ s(f) e^{i2πfm} df` for `0 <= m <= max_lag`, by inverse FFT of
/// the fine-grid PSD.
pub fn true_acf(model: &GenerativeModel, max_lag: usize) -> Result<Vec<f64>> {
    if max_lag >= FINE_GRID / 2 {
        return invalid(format!("max_lag must be below {}, got {max_lag}", FINE_GRID / 2));
    }
    let plan = FftPlan::new(FINE_GRID)?;
    let mut buf: Vec<Complex64> = model.fine_grid_psd.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    plan.inverse(&mut buf);
    Ok(buf[..=max_lag].iter().map(|c| c.re).collect())
}

/// Additive white Gaussian noise of variance `sigma2`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub sigma2: f64,
}

impl NoiseSpec {
    pub fn new(sigma2: f64) -> Result<Self> {
        if !(sigma2.is_finite() && sigma2 >= 0.0) {
            return invalid(format!("noise variance must be finite and nonnegative, got {sigma2}"));
        }
        Ok(Self { sigma2 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObservationMode {
    /// A fresh realization per observation.
    Independent,
    /// Length-`M` windows of one realization, starting `stride` apart.
    Segments { stride: usize },
}

/// Number of initial ARMA output samples discarded before recording.
pub fn burn_in(model: &GenerativeModel) -> usize {
    1000.max(50 * (model.a.len() + model.b.len()))
}

/// Draws `count` noisy length-`len` observations of `model`.
pub fn simulate(
    model: &GenerativeModel,
    noise: NoiseSpec,
    len: usize,
    count: usize,
    mode: ObservationMode,
    rng: &RngStream,
) -> Result<Vec<Observation>> {
    if len < 2 {
        return invalid(format!("observation length must be at least 2, got {len}"));
    }
    NoiseSpec::new(noise.sigma2)?;
    let mut gen = rng.rng();
    let noise_std = noise.sigma2.sqrt();
    match mode {
        ObservationMode::Independent => {
            (0..count).map(|id| Observation::new(id, realization(model, noise_std, len, &mut gen))).collect()
        }
        ObservationMode::Segments { stride } => {
            if stride == 0 {
                return invalid("segment stride must be at least 1");
            }
            if count == 0 {
                return Ok(Vec::new());
            }
            let total = len + (count - 1) * stride;
            let series = realization(model, noise_std, total, &mut gen);
            (0..count).map(|id| Observation::new(id, series[id * stride..id * stride + len].to_vec())).collect()
        }
    }
}

fn realization<R: Rng>(model: &GenerativeModel, noise_std: f64, len: usize, rng: &mut R) -> Vec<f64> {
    let burn = burn_in(model);
    let total = burn + len;
    let (a, b) = (&model.a, &model.b);
    let innovations: Vec<f64> = (0..total).map(|_| rng.sample(StandardNormal)).collect();
    let mut y = vec![0.0; total];
    for n in 0..total {
        let mut acc = 0.0;
        for (u, &bu) in b.iter().enumerate().take(n + 1) {
            acc += bu * innovations[n - u];
        }
        for (v, &av) in a.iter().enumerate().skip(1).take(n) {
            acc -= av * y[n - v];
        }
        y[n] = acc / a[0];
    }
    y.drain(..burn);
    if noise_std > 0.0 {
        for v in y.iter_mut() {
            *v += noise_std * rng.sample::<f64, _>(StandardNormal);
        }
    }
    y
}

/// Observations with their generating model index.
#[derive(Debug, Clone)]
pub struct LabeledDataset {
    pub observations: Vec<Observation>,
    pub labels: Vec<usize>,
    pub n_per_model: Vec<usize>,
    pub len: usize,
}

impl LabeledDataset {
    pub fn n_models(&self) -> usize {
        self.n_per_model.len()
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }
}

/// Simulates `n_per_model[l]` independent observations of every model and
/// shuffles them; observation ids are their final positions.
pub fn make_benchmark_dataset(
    models: &[GenerativeModel],
    n_per_model: &[usize],
    len: usize,
    noise: NoiseSpec,
    rng: &RngStream,
) -> Result<LabeledDataset> {
    if models.len() != n_per_model.len() {
        return Err(Error::Shape(format!("{} models but {} per-model counts", models.len(), n_per_model.len())));
    }
    let mut pool = Vec::new();
    for (l, (model, &count)) in models.iter().zip(n_per_model).enumerate() {
        let obs = simulate(model, noise, len, count, ObservationMode::Independent, &rng.fork(l as u64))?;
        pool.extend(obs.into_iter().map(|o| (l, o)));
    }
    pool.shuffle(&mut rng.fork(u64::MAX).rng());
    let (labels, observations) = pool
        .into_iter()
        .enumerate()
        .map(|(id, (l, o))| (l, Observation::new(id, o.samples().to_vec()).expect("validated")))
        .unzip();
    Ok(LabeledDataset { observations, labels, n_per_model: n_per_model.to_vec(), len })
}

/// The three overlapping ARMA models of the synthetic benchmark, normalized
/// to unit power.
pub fn overlapping_arma_models() -> Vec<GenerativeModel> {
    let specs: [(Vec<f64>, Vec<f64>); 3] = [
        (vec![1.0], vec![0.75, 1.0, -1.75, 0.5]),
        (vec![1.0], vec![0.5, 1.25, -1.5, 0.75]),
        (vec![1.0, -0.2, 0.4, 0.1], vec![1.0]),
    ];
    specs
        .into_iter()
        .map(|(a, b)| normalize_model(&GenerativeModel::new(a, b).expect("preset is stable")).expect("nonzero power"))
        .collect()
}

/// Unit-power AR(2) resonator peaking near `center` (cycles/sample) with
/// pole radius `radius`.
pub fn resonator(center: f64, radius: f64) -> Result<GenerativeModel> {
    if !(0.0..=0.5).contains(&center) {
        return invalid(format!("resonator center must lie in [0, 0.5], got {center}"));
    }
    let a = vec![1.0, -2.0 * radius * (2.0 * std::f64::consts::PI * center).cos(), radius * radius];
    normalize_model(&GenerativeModel::new(a, vec![1.0])?)
}

/// `count` narrowband resonators with evenly spaced, well separated peaks.
pub fn well_separated_models(count: usize) -> Result<Vec<GenerativeModel>> {
    (0..count).map(|k| resonator((k as f64 + 0.5) / (2.0 * count as f64), 0.98)).collect()
}

/// Named model presets accepted by the CLI.
pub fn preset(name: &str) -> Result<Vec<GenerativeModel>> {
    match name {
        "paper-fig1" => Ok(overlapping_arma_models()),
        "narrowband-2" => well_separated_models(2),
        "narrowband-3" => well_separated_models(3),
        "white" => Ok(vec![normalize_model(&GenerativeModel::new(vec![1.0], vec![1.0])?)?]),
        other => invalid(format!("unknown model preset {other:?}")),
    }
}
