//! Direction-of-arrival study on a uniform linear array.
//!
//! Simulates snapshots of far-field sources on a half-wavelength-spaced
//! array, corrupts one snapshot with a jammer, builds K-component L2 and
//! L1 subspaces of the realified data, and scans MUSIC pseudo-spectra
//! for the source directions.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::l2_subspace;
use crate::error::{Error, Result};
use crate::multi::{l1_multi_optimal_with_cap, SubspaceBasis, DEFAULT_MULTI_CAP};
use crate::numlin::{default_rel_tol, effective_rank};
use crate::rng::substream;

/// Peak-to-truth tolerance used for the success criterion, in degrees.
pub const PEAK_TOLERANCE_DEG: f64 = 3.0;
/// Minimum separation between reported peaks, in degrees.
pub const PEAK_MIN_SEPARATION_DEG: f64 = 5.0;

/// Configuration of the direction-of-arrival study.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct DoaConfig {
    /// Array elements D (half-wavelength spacing, phase reference at
    /// element 0).
    pub n_elements: usize,
    /// Snapshots N per trial.
    pub n_snapshots: usize,
    /// Source angles in degrees, inside (-90, 90).
    pub thetas: Vec<f64>,
    /// Per-source SNR in dB relative to the noise power.
    pub snrs_db: Vec<f64>,
    /// Jammer angle in degrees.
    pub jammer_theta: f64,
    /// Jammer SNR in dB (same reference as the sources); `None` disables
    /// the jammer entirely.
    pub jammer_snr_db: Option<f64>,
    /// Snapshot hit by the jammer (0-based). `None` draws it uniformly
    /// per trial from the seed stream.
    pub corrupt_index: Option<usize>,
    /// Complex noise power sigma^2. Amplitudes are referenced to unit
    /// noise power when this is zero, keeping noise-free runs meaningful.
    pub noise_var: f64,
    /// Spectrum grid step in degrees.
    pub grid_step: f64,
    /// Master seed; trials derive independent substreams from it.
    pub seed: u64,
    /// Draw a uniform random phase per source per snapshot instead of
    /// the fixed real amplitudes of the snapshot model.
    pub random_phase: bool,
    /// Subspace order for both estimators; `None` uses the source count.
    /// Always clamped to the effective rank of the realified snapshots.
    pub subspace_k: Option<usize>,
}

impl Default for DoaConfig {
    fn default() -> Self {
        Self {
            n_elements: 5,
            n_snapshots: 10,
            thetas: vec![-30.0, 50.0],
            snrs_db: vec![2.0, 3.0],
            jammer_theta: 20.0,
            jammer_snr_db: Some(3.0),
            corrupt_index: None,
            noise_var: 1.0,
            grid_step: 0.1,
            seed: 0,
            random_phase: false,
            subspace_k: None,
        }
    }
}

impl DoaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_elements < 2 || self.n_snapshots < 1 {
            return Err(Error::DimensionMismatch {
                context: "need D >= 2 elements and N >= 1 snapshots".to_string(),
            });
        }
        if self.thetas.len() != self.snrs_db.len() || self.thetas.is_empty() {
            return Err(Error::DimensionMismatch {
                context: "thetas and snrs_db must be nonempty and equal-length".to_string(),
            });
        }
        if self
            .thetas
            .iter()
            .chain(std::iter::once(&self.jammer_theta))
            .any(|t| !t.is_finite() || t.abs() >= 90.0)
        {
            return Err(Error::DimensionMismatch {
                context: "angles must lie inside (-90, 90) degrees".to_string(),
            });
        }
        if !self.noise_var.is_finite()
            || self.noise_var < 0.0
            || !self.grid_step.is_finite()
            || self.grid_step <= 0.0
        {
            return Err(Error::DimensionMismatch {
                context: "noise_var must be >= 0 and grid_step > 0".to_string(),
            });
        }
        if let Some(i) = self.corrupt_index {
            if i >= self.n_snapshots {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    len: self.n_snapshots,
                });
            }
        }
        Ok(())
    }

    /// Amplitude for an SNR in dB: `sigma * 10^(snr/20)`, with unit
    /// reference when the configured noise power is zero.
    fn amplitude(&self, snr_db: f64) -> f64 {
        let sigma = if self.noise_var > 0.0 { self.noise_var.sqrt() } else { 1.0 };
        sigma * 10f64.powf(snr_db / 20.0)
    }
}

/// Array response of a half-wavelength ULA: `s[k] = exp(i pi k sin t)`.
pub fn steering_vector(theta_deg: f64, d: usize) -> DVector<Complex64> {
    let phase = std::f64::consts::PI * theta_deg.to_radians().sin();
    DVector::from_fn(d, |k, _| Complex64::from_polar(1.0, phase * k as f64))
}

fn snapshots_for_trial(cfg: &DoaConfig, trial: u64) -> Result<DMatrix<Complex64>> {
    cfg.validate()?;
    let d = cfg.n_elements;
    let n = cfg.n_snapshots;
    let mut noise_rng = substream(cfg.seed, "doa.noise", trial);
    let mut phase_rng = substream(cfg.seed, "doa.phase", trial);
    let steer: Vec<DVector<Complex64>> = cfg.thetas.iter().map(|&t| steering_vector(t, d)).collect();
    let amps: Vec<f64> = cfg.snrs_db.iter().map(|&s| cfg.amplitude(s)).collect();
    let noise_scale = (cfg.noise_var / 2.0).sqrt();

    let mut x = DMatrix::from_element(d, n, Complex64::new(0.0, 0.0));
    for j in 0..n {
        for (m, s) in steer.iter().enumerate() {
            let gain = if cfg.random_phase {
                Complex64::from_polar(amps[m], phase_rng.random_range(0.0..std::f64::consts::TAU))
            } else {
                Complex64::new(amps[m], 0.0)
            };
            for i in 0..d {
                x[(i, j)] += gain * s[i];
            }
        }
        for i in 0..d {
            let re: f64 = noise_rng.sample(StandardNormal);
            let im: f64 = noise_rng.sample(StandardNormal);
            x[(i, j)] += Complex64::new(re * noise_scale, im * noise_scale);
        }
    }
    Ok(x)
}

/// Simulated snapshot matrix (D x N complex) for the config's seed.
pub fn gen_doa_snapshots(cfg: &DoaConfig) -> Result<DMatrix<Complex64>> {
    snapshots_for_trial(cfg, 0)
}

fn inject_jammer_at(xc: &DMatrix<Complex64>, cfg: &DoaConfig, column: usize) -> Result<DMatrix<Complex64>> {
    if column >= xc.ncols() {
        return Err(Error::IndexOutOfRange {
            index: column,
            len: xc.ncols(),
        });
    }
    let Some(snr_db) = cfg.jammer_snr_db else {
        return Ok(xc.clone());
    };
    let s = steering_vector(cfg.jammer_theta, xc.nrows());
    let amp = cfg.amplitude(snr_db);
    let mut out = xc.clone();
    for i in 0..xc.nrows() {
        out[(i, column)] += amp * s[i];
    }
    Ok(out)
}

/// Adds the jammer's response to exactly one snapshot. The column comes
/// from `corrupt_index`, or uniformly from the seed stream when unset.
pub fn inject_jammer(xc: &DMatrix<Complex64>, cfg: &DoaConfig) -> Result<DMatrix<Complex64>> {
    cfg.validate()?;
    let column = cfg
        .corrupt_index
        .unwrap_or_else(|| substream(cfg.seed, "doa.jammer", 0).random_range(0..xc.ncols()));
    inject_jammer_at(xc, cfg, column)
}

/// Stacks real parts over imaginary parts: `D x N` complex becomes
/// `2D x N` real, preserving column norms and real inner products.
pub fn realify(xc: &DMatrix<Complex64>) -> DMatrix<f64> {
    let d = xc.nrows();
    DMatrix::from_fn(2 * d, xc.ncols(), |i, j| {
        if i < d {
            xc[(i, j)].re
        } else {
            xc[(i - d, j)].im
        }
    })
}

/// MUSIC pseudo-spectrum over an angle grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Spectrum {
    pub angles: Vec<f64>,
    pub power: Vec<f64>,
}

impl Spectrum {
    /// Mean power over grid points within `half_width` of `center`.
    pub fn mean_power_near(&self, center: f64, half_width: f64) -> f64 {
        let mut acc = 0.0;
        let mut count = 0usize;
        for (a, p) in self.angles.iter().zip(&self.power) {
            if (a - center).abs() <= half_width {
                acc += p;
                count += 1;
            }
        }
        if count == 0 {
            0.0
        } else {
            acc / count as f64
        }
    }
}

/// Pseudo-power `P(t) = 1 / ||(I - R R^T) s~_t||^2` on the open grid
/// `(-90, 90)` with the config's step. Denominators clamp at 1e-12.
pub fn music_spectrum(basis: &SubspaceBasis, cfg: &DoaConfig) -> Spectrum {
    let d = cfg.n_elements;
    debug_assert_eq!(basis.dim(), 2 * d, "basis must act on realified snapshots");
    let r = basis.matrix();
    let mut angles = Vec::new();
    let mut power = Vec::new();
    let mut i = 1usize;
    loop {
        let theta = -90.0 + cfg.grid_step * i as f64;
        if theta >= 90.0 - 1e-9 {
            break;
        }
        let s = realify_vector(&steering_vector(theta, d));
        let coeffs = r.transpose() * &s;
        let residual = &s - r * coeffs;
        let denom = residual.norm_squared().max(1e-12);
        angles.push(theta);
        power.push(1.0 / denom);
        i += 1;
    }
    Spectrum { angles, power }
}

fn realify_vector(v: &DVector<Complex64>) -> DVector<f64> {
    let d = v.len();
    DVector::from_fn(2 * d, |i, _| if i < d { v[i].re } else { v[i - d].im })
}

/// Local maxima sorted by power, greedily accepted subject to pairwise
/// separation of at least `min_separation` degrees; at most `k` angles.
pub fn top_peaks(sp: &Spectrum, k: usize, min_separation: f64) -> Vec<f64> {
    let n = sp.power.len();
    let mut peaks: Vec<(f64, f64)> = Vec::new(); // (power, angle)
    for i in 0..n {
        let left_ok = i == 0 || sp.power[i] > sp.power[i - 1];
        let right_ok = i + 1 == n || sp.power[i] > sp.power[i + 1];
        if left_ok && right_ok {
            peaks.push((sp.power[i], sp.angles[i]));
        }
    }
    peaks.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.partial_cmp(&b.1).unwrap()));
    let mut accepted: Vec<f64> = Vec::new();
    for (_, angle) in peaks {
        if accepted.len() == k {
            break;
        }
        if accepted.iter().all(|a| (a - angle).abs() >= min_separation) {
            accepted.push(angle);
        }
    }
    accepted
}

/// Per-trial spectra, peaks, and success flags.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DoaTrialResult {
    /// Column the jammer hit; `None` when the jammer is disabled.
    pub jammer_column: Option<usize>,
    pub spectrum_l2: Spectrum,
    pub spectrum_l1: Spectrum,
    pub peaks_l2: Vec<f64>,
    pub peaks_l1: Vec<f64>,
    pub success_l2: bool,
    pub success_l1: bool,
}

/// Success rates and jammer-band spectral mass over the trials.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DoaAggregate {
    pub trials: usize,
    pub success_rate_l2: f64,
    pub success_rate_l1: f64,
    /// Mean spectrum value within 1 degree of the jammer angle.
    pub mean_power_at_jammer_l2: f64,
    pub mean_power_at_jammer_l1: f64,
}

/// Full study output: one record per trial plus the aggregate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DoaOutcome {
    pub config: DoaConfig,
    pub trials: Vec<DoaTrialResult>,
    pub aggregate: DoaAggregate,
}

fn peaks_cover_sources(peaks: &[f64], thetas: &[f64]) -> bool {
    thetas
        .iter()
        .all(|t| peaks.iter().any(|p| (p - t).abs() <= PEAK_TOLERANCE_DEG))
}

fn run_doa_trial(cfg: &DoaConfig, trial: u64) -> Result<DoaTrialResult> {
    let clean = snapshots_for_trial(cfg, trial)?;
    let jammer_column = cfg.jammer_snr_db.map(|_| {
        cfg.corrupt_index
            .unwrap_or_else(|| substream(cfg.seed, "doa.jammer", trial).random_range(0..clean.ncols()))
    });
    let corrupted = match jammer_column {
        Some(col) => inject_jammer_at(&clean, cfg, col)?,
        None => clean,
    };
    let xr = realify(&corrupted);

    // Fixed-amplitude snapshots without noise are rank-deficient (the
    // signal part repeats one column), so the subspace order clamps to
    // the data rank.
    let rank = effective_rank(&xr, default_rel_tol(xr.nrows(), xr.ncols()))?;
    let k = cfg.subspace_k.unwrap_or(cfg.thetas.len()).min(rank).max(1);
    let basis_l2 = l2_subspace(&xr, k)?;
    let basis_l1 = l1_multi_optimal_with_cap(&xr, k, DEFAULT_MULTI_CAP)?.basis;

    let n_peaks = cfg.thetas.len();
    let spectrum_l2 = music_spectrum(&basis_l2, cfg);
    let spectrum_l1 = music_spectrum(&basis_l1, cfg);
    let peaks_l2 = top_peaks(&spectrum_l2, n_peaks, PEAK_MIN_SEPARATION_DEG);
    let peaks_l1 = top_peaks(&spectrum_l1, n_peaks, PEAK_MIN_SEPARATION_DEG);

    Ok(DoaTrialResult {
        jammer_column,
        success_l2: peaks_cover_sources(&peaks_l2, &cfg.thetas),
        success_l1: peaks_cover_sources(&peaks_l1, &cfg.thetas),
        spectrum_l2,
        spectrum_l1,
        peaks_l2,
        peaks_l1,
    })
}

/// Runs `n_trials` independent trials concurrently and aggregates.
pub fn run_doa_experiment(cfg: &DoaConfig, n_trials: usize) -> Result<DoaOutcome> {
    cfg.validate()?;
    if n_trials == 0 {
        return Err(Error::DimensionMismatch {
            context: "need at least one trial".to_string(),
        });
    }
    let trials: Vec<DoaTrialResult> = (0..n_trials as u64)
        .into_par_iter()
        .map(|t| run_doa_trial(cfg, t))
        .collect::<Result<_>>()?;

    let n = trials.len() as f64;
    let aggregate = DoaAggregate {
        trials: trials.len(),
        success_rate_l2: trials.iter().filter(|t| t.success_l2).count() as f64 / n,
        success_rate_l1: trials.iter().filter(|t| t.success_l1).count() as f64 / n,
        mean_power_at_jammer_l2: trials
            .iter()
            .map(|t| t.spectrum_l2.mean_power_near(cfg.jammer_theta, 1.0))
            .sum::<f64>()
            / n,
        mean_power_at_jammer_l1: trials
            .iter()
            .map(|t| t.spectrum_l1.mean_power_near(cfg.jammer_theta, 1.0))
            .sum::<f64>()
            / n,
    };
    Ok(DoaOutcome {
        config: cfg.clone(),
        trials,
        aggregate,
    })
}
