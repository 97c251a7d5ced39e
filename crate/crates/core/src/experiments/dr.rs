//! Outlier-robust dimensionality reduction study.
//!
//! Draws a 2-D Gaussian training cloud, corrupts a copy with a few fixed
//! outlier points, fits single components under both criteria on the
//! clean and corrupted sets, and scores all four directions by mean
//! square fit error on an independent evaluation cloud.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::l2_subspace;
use crate::error::{Error, Result};
use crate::numlin::{default_rel_tol, ensure_finite};
use crate::rng::substream;
use crate::single::l1pc_optimal;

/// Configuration of the dimensionality-reduction study.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct DrConfig {
    /// Training samples per trial.
    pub n_train: usize,
    /// Mean of the nominal Gaussian.
    pub mean: [f64; 2],
    /// Covariance of the nominal Gaussian (symmetric positive definite).
    pub cov: [[f64; 2]; 2],
    /// Outlier points appended to the corrupted training copy.
    pub outliers: Vec<[f64; 2]>,
    /// Evaluation samples per trial.
    pub n_eval: usize,
    /// Master seed; trials derive independent substreams from it.
    pub seed: u64,
}

impl Default for DrConfig {
    fn default() -> Self {
        Self {
            n_train: 50,
            mean: [0.0, 0.0],
            cov: [[15.0, 13.0], [13.0, 26.0]],
            // Well below and to the right of the nominal cloud, far
            // enough that the squared-error criterion reliably swings
            // toward them while the absolute-projection one resists.
            outliers: vec![[18.0, -18.0], [19.5, -16.5], [21.0, -19.5]],
            n_eval: 1000,
            seed: 0,
        }
    }
}

impl DrConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_train == 0 || self.n_eval == 0 {
            return Err(Error::DimensionMismatch {
                context: "n_train and n_eval must be positive".to_string(),
            });
        }
        let c = &self.cov;
        let scale = c.iter().flatten().fold(0.0_f64, |a, &v| a.max(v.abs()));
        if !c.iter().flatten().all(|v| v.is_finite())
            || (c[0][1] - c[1][0]).abs() > 1e-9 * scale.max(1.0)
            || c[0][0] <= 0.0
            || c[0][0] * c[1][1] - c[0][1] * c[1][0] <= 0.0
        {
            return Err(Error::NonSpdCovariance);
        }
        Ok(())
    }

    /// Lower Cholesky factor of the covariance.
    fn chol(&self) -> [[f64; 2]; 2] {
        let c = &self.cov;
        let l11 = c[0][0].sqrt();
        let l21 = c[1][0] / l11;
        let l22 = (c[1][1] - l21 * l21).sqrt();
        [[l11, 0.0], [l21, l22]]
    }
}

fn sample_cloud(cfg: &DrConfig, n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let l = cfg.chol();
    let mut x = DMatrix::zeros(2, n);
    for j in 0..n {
        let z0: f64 = rng.sample(StandardNormal);
        let z1: f64 = rng.sample(StandardNormal);
        x[(0, j)] = cfg.mean[0] + l[0][0] * z0;
        x[(1, j)] = cfg.mean[1] + l[1][0] * z0 + l[1][1] * z1;
    }
    x
}

fn gen_gaussian_for_trial(cfg: &DrConfig, trial: u64) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    cfg.validate()?;
    let mut train_rng = substream(cfg.seed, "dr.train", trial);
    let mut eval_rng = substream(cfg.seed, "dr.eval", trial);
    Ok((
        sample_cloud(cfg, cfg.n_train, &mut train_rng),
        sample_cloud(cfg, cfg.n_eval, &mut eval_rng),
    ))
}

/// Draws the training and evaluation clouds for the config's seed.
pub fn gen_gaussian(cfg: &DrConfig) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    gen_gaussian_for_trial(cfg, 0)
}

/// Returns `[x, o_1, ..., o_m]` with the outliers column-appended.
pub fn inject_outliers(x: &DMatrix<f64>, outliers: &[[f64; 2]]) -> Result<DMatrix<f64>> {
    if x.nrows() != 2 {
        return Err(Error::DimensionMismatch {
            context: format!("outliers are 2-vectors but data has dimension {}", x.nrows()),
        });
    }
    let mut out = DMatrix::zeros(2, x.ncols() + outliers.len());
    out.view_mut((0, 0), (2, x.ncols())).copy_from(x);
    for (j, o) in outliers.iter().enumerate() {
        out[(0, x.ncols() + j)] = o[0];
        out[(1, x.ncols() + j)] = o[1];
    }
    Ok(out)
}

/// Mean squared residual of the columns of `x_eval` outside the line
/// spanned by the unit vector `r`.
pub fn mean_square_fit_error(x_eval: &DMatrix<f64>, r: &DVector<f64>) -> Result<f64> {
    ensure_finite(x_eval)?;
    if r.len() != x_eval.nrows() {
        return Err(Error::DimensionMismatch {
            context: format!("direction length {} != data dimension {}", r.len(), x_eval.nrows()),
        });
    }
    let norm = r.norm();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(Error::NonUnitVector { norm });
    }
    let n = x_eval.ncols();
    let mut acc = 0.0;
    for j in 0..n {
        let col = x_eval.column(j);
        let proj = r.dot(&col.into_owned());
        let mut res = 0.0;
        for i in 0..r.len() {
            let e = col[i] - proj * r[i];
            res += e * e;
        }
        acc += res;
    }
    Ok(acc / n as f64)
}

/// Per-trial evaluation errors of the four trained directions.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DrTrialResult {
    pub e_l2_clean: f64,
    pub e_l1_clean: f64,
    pub e_l2_corrupted: f64,
    pub e_l1_corrupted: f64,
}

/// Means, standard errors, and the L1-beats-L2 frequency on the
/// corrupted design.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DrAggregate {
    pub trials: usize,
    pub mean_e_l2_clean: f64,
    pub mean_e_l1_clean: f64,
    pub mean_e_l2_corrupted: f64,
    pub mean_e_l1_corrupted: f64,
    pub se_e_l2_clean: f64,
    pub se_e_l1_clean: f64,
    pub se_e_l2_corrupted: f64,
    pub se_e_l1_corrupted: f64,
    pub frac_l1_better_corrupted: f64,
}

/// Full study output: one record per trial plus the aggregate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DrOutcome {
    pub config: DrConfig,
    pub trials: Vec<DrTrialResult>,
    pub aggregate: DrAggregate,
}

fn run_dr_trial(cfg: &DrConfig, trial: u64) -> Result<DrTrialResult> {
    let (train, eval) = gen_gaussian_for_trial(cfg, trial)?;
    let corrupted = inject_outliers(&train, &cfg.outliers)?;
    let rel_tol = default_rel_tol(2, train.ncols());

    let r_l1_clean = l1pc_optimal(&train, rel_tol)?.component;
    let r_l1_crpt = l1pc_optimal(&corrupted, rel_tol)?.component;
    let r_l2_clean = l2_subspace(&train, 1)?.matrix().column(0).into_owned();
    let r_l2_crpt = l2_subspace(&corrupted, 1)?.matrix().column(0).into_owned();

    Ok(DrTrialResult {
        e_l2_clean: mean_square_fit_error(&eval, &r_l2_clean)?,
        e_l1_clean: mean_square_fit_error(&eval, &r_l1_clean)?,
        e_l2_corrupted: mean_square_fit_error(&eval, &r_l2_crpt)?,
        e_l1_corrupted: mean_square_fit_error(&eval, &r_l1_crpt)?,
    })
}

fn mean_and_se(values: impl Iterator<Item = f64> + Clone, n: usize) -> (f64, f64) {
    let mean = values.clone().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Runs `n_trials` independent trials concurrently and aggregates.
pub fn run_dr_experiment(cfg: &DrConfig, n_trials: usize) -> Result<DrOutcome> {
    cfg.validate()?;
    if n_trials == 0 {
        return Err(Error::DimensionMismatch {
            context: "need at least one trial".to_string(),
        });
    }
    let trials: Vec<DrTrialResult> = (0..n_trials as u64)
        .into_par_iter()
        .map(|t| run_dr_trial(cfg, t))
        .collect::<Result<_>>()?;

    let n = trials.len();
    let (mean_e_l2_clean, se_e_l2_clean) = mean_and_se(trials.iter().map(|t| t.e_l2_clean), n);
    let (mean_e_l1_clean, se_e_l1_clean) = mean_and_se(trials.iter().map(|t| t.e_l1_clean), n);
    let (mean_e_l2_corrupted, se_e_l2_corrupted) =
        mean_and_se(trials.iter().map(|t| t.e_l2_corrupted), n);
    let (mean_e_l1_corrupted, se_e_l1_corrupted) =
        mean_and_se(trials.iter().map(|t| t.e_l1_corrupted), n);
    let frac_l1_better_corrupted =
        trials.iter().filter(|t| t.e_l1_corrupted < t.e_l2_corrupted).count() as f64 / n as f64;

    Ok(DrOutcome {
        config: cfg.clone(),
        trials,
        aggregate: DrAggregate {
            trials: n,
            mean_e_l2_clean,
            mean_e_l1_clean,
            mean_e_l2_corrupted,
            mean_e_l1_corrupted,
            se_e_l2_clean,
            se_e_l1_clean,
            se_e_l2_corrupted,
            se_e_l1_corrupted,
            frac_l1_better_corrupted,
        },
    })
}
