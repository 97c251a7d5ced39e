//! Implementations of the four subcommands.

use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use serde_json::json;

use l1pca::experiments::{run_doa_experiment, run_dr_experiment, DoaConfig, DoaOutcome, DrConfig};
use l1pca::{
    default_rel_tol, fixed_point_multistart, greedy_deflation_l1, l1_multi_optimal_with_cap,
    l1pc_optimal_with_cap, l2_subspace, solve_exhaustive_multi_with_cap, solve_exhaustive_with_cap,
    SignVector, SubspaceBasis,
};

use crate::io::{matrix_csv, read_matrix_csv, spectrum_csv, write_atomic};
use crate::report::{ComponentResults, OracleResults, RunReport, VERSION};
use crate::{CliError, ExpArgs, Format, L1pcaArgs, Method, OracleArgs};

fn l1_l2_objectives(x: &DMatrix<f64>, basis: &DMatrix<f64>) -> (f64, f64) {
    let proj = basis.transpose() * x;
    (proj.iter().map(|v| v.abs()).sum(), proj.norm())
}

fn columns_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.ncols()).map(|j| m.column(j).iter().copied().collect()).collect()
}

fn emit<C: Serialize, R: Serialize>(
    report: &RunReport<C, R>,
    out: Option<&Path>,
    extra_files: &[(String, String)],
) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(report)
        .map_err(|e| CliError::Io(format!("report serialization failed: {e}")))?;
    match out {
        Some(dir) => {
            write_atomic(&dir.join("report.json"), text.as_bytes())?;
            for (name, content) in extra_files {
                write_atomic(&dir.join(name), content.as_bytes())?;
            }
            println!("wrote {}", dir.join("report.json").display());
            for (name, _) in extra_files {
                println!("wrote {}", dir.join(name).display());
            }
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn unit_component(x: &DMatrix<f64>, b: &SignVector) -> Result<DVector<f64>, CliError> {
    let proj = x * b.to_dvector();
    let norm = proj.norm();
    if norm == 0.0 {
        return Err(CliError::Solver("sign projection vanished".to_string()));
    }
    Ok(proj / norm)
}

pub fn cmd_l1pca(args: &L1pcaArgs) -> Result<(), CliError> {
    let start = std::time::Instant::now();
    let x = read_matrix_csv(&args.input)?;
    let (d, _n) = (x.nrows(), x.ncols());
    if args.k == 0 || args.k > d {
        return Err(CliError::Parse(format!(
            "k must satisfy 1 <= k <= {d} for this input, got {}",
            args.k
        )));
    }
    let rel_tol = args.rel_tol.unwrap_or_else(|| default_rel_tol(x.nrows(), x.ncols()));

    let results = match args.method {
        Method::Optimal => {
            if args.k == 1 {
                let res = l1pc_optimal_with_cap(&x, rel_tol, args.exhaustive_cap)?;
                let basis = DMatrix::from_column_slice(d, 1, res.component.as_slice());
                let (objective_l1, objective_l2) = l1_l2_objectives(&x, &basis);
                ComponentResults {
                    objective_l1,
                    objective_l2,
                    components: columns_of(&basis),
                    algorithm: Some(format!("{:?}", res.algorithm).to_lowercase()),
                    sign_vector: Some(res.sign_vector),
                    sign_matrix: None,
                    rank_deficient: None,
                }
            } else {
                let res = l1_multi_optimal_with_cap(&x, args.k, args.multi_cap)?;
                let (objective_l1, objective_l2) = l1_l2_objectives(&x, res.basis.matrix());
                ComponentResults {
                    objective_l1,
                    objective_l2,
                    components: columns_of(res.basis.matrix()),
                    algorithm: Some("nuclear".to_string()),
                    sign_vector: None,
                    sign_matrix: Some(res.sign_matrix.columns().to_vec()),
                    rank_deficient: Some(res.rank_deficient),
                }
            }
        }
        Method::Greedy => {
            let basis = greedy_deflation_l1(&x, args.k)?;
            component_results(&x, &basis)
        }
        Method::Fixedpoint => {
            if args.k != 1 {
                return Err(CliError::Parse(
                    "method fixedpoint computes a single component; use k = 1".to_string(),
                ));
            }
            let (b, _) = fixed_point_multistart(&x, args.restarts, args.max_iter, args.seed)?;
            let r = unit_component(&x, &b)?;
            let basis = DMatrix::from_column_slice(d, 1, r.as_slice());
            let (objective_l1, objective_l2) = l1_l2_objectives(&x, &basis);
            ComponentResults {
                objective_l1,
                objective_l2,
                components: columns_of(&basis),
                algorithm: Some("fixedpoint".to_string()),
                sign_vector: Some(b),
                sign_matrix: None,
                rank_deficient: None,
            }
        }
        Method::L2 => {
            let basis = l2_subspace(&x, args.k)?;
            component_results(&x, &basis)
        }
    };

    let report = RunReport {
        command: "l1pca",
        version: VERSION,
        seed: args.seed,
        config: json!({
            "input": args.input.display().to_string(),
            "k": args.k,
            "method": format!("{:?}", args.method).to_lowercase(),
            "rel_tol": rel_tol,
            "exhaustive_cap": args.exhaustive_cap,
            "multi_cap": args.multi_cap,
            "restarts": args.restarts,
            "max_iter": args.max_iter,
        }),
        results,
        elapsed_s: start.elapsed().as_secs_f64(),
    };

    let mut extra = Vec::new();
    if matches!(args.format, Format::Csv) {
        // One row per component, D values each.
        let basis = DMatrix::from_fn(d, args.k, |i, j| report.results.components[j][i]);
        extra.push(("components.csv".to_string(), matrix_csv(&basis)));
    }
    emit(&report, args.out.as_deref(), &extra)
}

fn component_results(x: &DMatrix<f64>, basis: &SubspaceBasis) -> ComponentResults {
    let (objective_l1, objective_l2) = l1_l2_objectives(x, basis.matrix());
    ComponentResults {
        objective_l1,
        objective_l2,
        components: columns_of(basis.matrix()),
        algorithm: None,
        sign_vector: None,
        sign_matrix: None,
        rank_deficient: None,
    }
}

pub fn cmd_oracle(args: &OracleArgs) -> Result<(), CliError> {
    let start = std::time::Instant::now();
    let x = read_matrix_csv(&args.input)?;
    if args.k == 0 || args.k > x.nrows() {
        return Err(CliError::Parse(format!(
            "k must satisfy 1 <= k <= {} for this input, got {}",
            x.nrows(),
            args.k
        )));
    }
    let results = if args.k == 1 {
        let (b, objective) = solve_exhaustive_with_cap(&x, args.exhaustive_cap)?;
        OracleResults {
            objective,
            sign_vector: Some(b),
            sign_matrix: None,
        }
    } else {
        let (b, objective) = solve_exhaustive_multi_with_cap(&x, args.k, args.multi_cap)?;
        OracleResults {
            objective,
            sign_vector: None,
            sign_matrix: Some(b.columns().to_vec()),
        }
    };
    let report = RunReport {
        command: "oracle",
        version: VERSION,
        seed: 0,
        config: json!({
            "input": args.input.display().to_string(),
            "k": args.k,
            "exhaustive_cap": args.exhaustive_cap,
            "multi_cap": args.multi_cap,
        }),
        results,
        elapsed_s: start.elapsed().as_secs_f64(),
    };
    emit(&report, args.out.as_deref(), &[])
}

/// Flat `key,value` rendering of an aggregate block for CSV consumers.
fn aggregate_csv(aggregate: &impl Serialize) -> Result<String, CliError> {
    let value = serde_json::to_value(aggregate)
        .map_err(|e| CliError::Io(format!("aggregate serialization failed: {e}")))?;
    let map = value.as_object().ok_or_else(|| CliError::Io("aggregate is not a map".to_string()))?;
    let mut out = String::from("key,value\n");
    for (k, v) in map {
        out.push_str(&format!("{k},{v}\n"));
    }
    Ok(out)
}

fn load_config<T: serde::de::DeserializeOwned + Default>(path: Option<&PathBuf>) -> Result<T, CliError> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", p.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Parse(format!("{}: invalid config: {e}", p.display())))
        }
    }
}

pub fn cmd_exp_dr(args: &ExpArgs) -> Result<(), CliError> {
    let start = std::time::Instant::now();
    let mut cfg: DrConfig = load_config(args.config.as_ref())?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    cfg.validate().map_err(|e| CliError::Parse(e.to_string()))?;
    let outcome = run_dr_experiment(&cfg, args.trials)?;

    let mut extra = Vec::new();
    if args.out.is_some() {
        let mut table = String::from("trial,e_l2_clean,e_l1_clean,e_l2_corrupted,e_l1_corrupted\n");
        for (i, t) in outcome.trials.iter().enumerate() {
            table.push_str(&format!(
                "{i},{:.12e},{:.12e},{:.12e},{:.12e}\n",
                t.e_l2_clean, t.e_l1_clean, t.e_l2_corrupted, t.e_l1_corrupted
            ));
        }
        extra.push(("trials.csv".to_string(), table));
    }
    if matches!(args.format, Format::Csv) {
        extra.push(("aggregate.csv".to_string(), aggregate_csv(&outcome.aggregate)?));
    }

    let report = RunReport {
        command: "exp-dr",
        version: VERSION,
        seed: cfg.seed,
        config: json!({ "dr": &cfg, "trials": args.trials }),
        results: json!({ "trials": &outcome.trials, "aggregate": &outcome.aggregate }),
        elapsed_s: start.elapsed().as_secs_f64(),
    };
    emit(&report, args.out.as_deref(), &extra)
}

/// Spectra are bulky, so the JSON report carries peaks and flags per
/// trial while full spectra go to per-trial CSV files under --out.
#[derive(Debug, Serialize)]
struct DoaTrialSummary {
    jammer_column: Option<usize>,
    peaks_l2: Vec<f64>,
    peaks_l1: Vec<f64>,
    success_l2: bool,
    success_l1: bool,
}

pub fn cmd_exp_doa(args: &ExpArgs) -> Result<(), CliError> {
    let start = std::time::Instant::now();
    let mut cfg: DoaConfig = load_config(args.config.as_ref())?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    cfg.validate().map_err(|e| CliError::Parse(e.to_string()))?;
    let outcome: DoaOutcome = run_doa_experiment(&cfg, args.trials)?;

    let mut extra = Vec::new();
    if args.out.is_some() {
        for (i, t) in outcome.trials.iter().enumerate() {
            extra.push((
                format!("spectrum_l2_trial{i:03}.csv"),
                spectrum_csv(&t.spectrum_l2.angles, &t.spectrum_l2.power),
            ));
            extra.push((
                format!("spectrum_l1_trial{i:03}.csv"),
                spectrum_csv(&t.spectrum_l1.angles, &t.spectrum_l1.power),
            ));
        }
    }
    if matches!(args.format, Format::Csv) {
        extra.push(("aggregate.csv".to_string(), aggregate_csv(&outcome.aggregate)?));
    }

    let summaries: Vec<DoaTrialSummary> = outcome
        .trials
        .iter()
        .map(|t| DoaTrialSummary {
            jammer_column: t.jammer_column,
            peaks_l2: t.peaks_l2.clone(),
            peaks_l1: t.peaks_l1.clone(),
            success_l2: t.success_l2,
            success_l1: t.success_l1,
        })
        .collect();

    let report = RunReport {
        command: "exp-doa",
        version: VERSION,
        seed: cfg.seed,
        config: json!({ "doa": &cfg, "trials": args.trials }),
        results: json!({ "trials": summaries, "aggregate": &outcome.aggregate }),
        elapsed_s: start.elapsed().as_secs_f64(),
    };
    emit(&report, args.out.as_deref(), &extra)
}
