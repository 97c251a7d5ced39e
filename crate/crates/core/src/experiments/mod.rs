//! Seeded synthetic-data studies.
//!
//! Two harnesses: [`dr`] trains single components on clean and
//! outlier-corrupted Gaussian clouds and scores them on fresh evaluation
//! data; [`doa`] drives a uniform-linear-array direction-of-arrival
//! simulation and compares MUSIC spectra built from L2 and L1 subspaces.
//!
//! Every run is a pure function of its config: randomness flows through
//! named substreams of the config seed, and Monte-Carlo trials use
//! per-trial indices so they can execute concurrently.

pub mod doa;
pub mod dr;

pub use doa::{
    gen_doa_snapshots, inject_jammer, music_spectrum, realify, run_doa_experiment, steering_vector,
    top_peaks, DoaAggregate, DoaConfig, DoaOutcome, DoaTrialResult, Spectrum,
};
pub use dr::{
    gen_gaussian, inject_outliers, mean_square_fit_error, run_dr_experiment, DrAggregate, DrConfig,
    DrOutcome, DrTrialResult,
};
