//! Acceptance suite: one test per criterion, each ending in a single
//! `[PASS]`/`[FAIL]` line (visible with `-- --nocapture`).

mod common;

use std::time::Instant;

use common::{brute_force_multi_value, gauss_matrix, ls_slope};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use l1pca::experiments::{
    mean_square_fit_error, run_doa_experiment, run_dr_experiment, DoaConfig, DrConfig,
};
use l1pca::{
    candidate_count_estimate, compute_candidates, default_rel_tol, fixed_point_multistart,
    gram_factor, greedy_deflation_l1, l1_multi_optimal, l1pc_optimal, l2_subspace, nuclear_norm,
    sign_quantize, solve_exhaustive,
};

const REL_TOL: f64 = 1e-9;

fn verdict(criterion: &str, failures: &[String], evidence: String) {
    if failures.is_empty() {
        println!("[PASS] {criterion}: {evidence}");
    } else {
        println!("[FAIL] {criterion}: {} violation(s); first: {}", failures.len(), failures[0]);
        panic!("{criterion} failed: {failures:#?}");
    }
}

fn single_instances() -> Vec<DMatrix<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    (0..220)
        .map(|_| {
            let d = rng.random_range(2..=5);
            let n = rng.random_range(5..=12);
            gauss_matrix(&mut rng, d, n)
        })
        .collect()
}

fn multi_instances() -> Vec<DMatrix<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    (0..50)
        .map(|_| {
            let d = rng.random_range(3..=4);
            let n = rng.random_range(5..=8);
            gauss_matrix(&mut rng, d, n)
        })
        .collect()
}

#[test]
fn criterion_1_single_component_oracle_equivalence() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    let instances = single_instances();
    for (i, x) in instances.iter().enumerate() {
        let res = l1pc_optimal(x, default_rel_tol(x.nrows(), x.ncols())).expect("solver");
        let (_, reference) = solve_exhaustive(x).expect("oracle");
        let rel = (res.objective - reference).abs() / reference;
        worst = worst.max(rel);
        if rel > REL_TOL {
            failures.push(format!("instance {i}: rel gap {rel:.3e}"));
        }
    }
    verdict(
        "criterion 1 (single-component oracle equivalence)",
        &failures,
        format!(
            "{} instances, worst rel gap {:.2e}, {:.1}s",
            instances.len(),
            worst,
            start.elapsed().as_secs_f64()
        ),
    );
}

#[test]
fn criterion_2_multi_component_oracle_equivalence() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    let instances = multi_instances();
    for (i, x) in instances.iter().enumerate() {
        let res = l1_multi_optimal(x, 2).expect("solver");
        let reference = brute_force_multi_value(x, 2);
        let rel = (res.objective - reference).abs() / reference;
        worst = worst.max(rel);
        if rel > REL_TOL {
            failures.push(format!("instance {i}: rel gap {rel:.3e}"));
        }
    }
    verdict(
        "criterion 2 (multi-component oracle equivalence)",
        &failures,
        format!(
            "{} instances (K=2), worst rel gap {:.2e}, {:.1}s",
            instances.len(),
            worst,
            start.elapsed().as_secs_f64()
        ),
    );
}

#[test]
fn criterion_3_projection_identities() {
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for (i, x) in single_instances().iter().enumerate() {
        let res = l1pc_optimal(x, default_rel_tol(x.nrows(), x.ncols())).expect("solver");
        let l1_of_component: f64 = (x.transpose() * &res.component).iter().map(|v| v.abs()).sum();
        let norm_of_signs = (x * res.sign_vector.to_dvector()).norm();
        let rel = (l1_of_component - norm_of_signs).abs() / norm_of_signs;
        worst = worst.max(rel);
        if rel > REL_TOL {
            failures.push(format!("single instance {i}: identity gap {rel:.3e}"));
        }
    }
    for (i, x) in multi_instances().iter().enumerate() {
        let res = l1_multi_optimal(x, 2).expect("solver");
        let nuclear = nuclear_norm(&(x * res.sign_matrix.to_dmatrix()));
        let rel = (res.objective - nuclear).abs() / nuclear;
        worst = worst.max(rel);
        if rel > REL_TOL {
            failures.push(format!("multi instance {i}: identity gap {rel:.3e}"));
        }
    }
    verdict(
        "criterion 3 (projection identities)",
        &failures,
        format!("270 instances, worst rel gap {worst:.2e}"),
    );
}

#[test]
fn criterion_4_candidate_cardinality_and_coverage() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let mut failures = Vec::new();
    let mut checked = 0usize;
    for i in 0..100 {
        let d = rng.random_range(2..=4);
        let n = rng.random_range(6..=15);
        let x = gauss_matrix(&mut rng, d, n);
        let q = gram_factor(&x, default_rel_tol(d, n)).expect("factor");
        if q.ncols() != d {
            continue; // off general position; probability zero
        }
        let set = compute_candidates(&q).expect("candidates");
        let expected = candidate_count_estimate(n, d);
        if set.len() as u128 != expected {
            failures.push(format!("instance {i}: |S| = {} expected {expected}", set.len()));
            continue;
        }
        for _ in 0..1000 {
            let mut c = DVector::from_fn(d, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
            if c[d - 1] < 0.0 {
                c.neg_mut();
            }
            let v = &q * &c;
            if v.iter().any(|&t| t == 0.0) {
                continue;
            }
            if !set.contains(&sign_quantize(&v)) {
                failures.push(format!("instance {i}: coverage miss (d={d}, n={n})"));
                break;
            }
        }
        checked += 1;
    }
    verdict(
        "criterion 4 (candidate cardinality and hypersphere coverage)",
        &failures,
        format!("{checked} instances, 1000 probes each"),
    );
}

#[test]
fn criterion_5_complexity_sanity() {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let mut failures = Vec::new();
    let grid = [10usize, 14, 20, 28, 40, 50];
    let mut slopes = Vec::new();
    for d in [2usize, 3] {
        let mut lns = Vec::new();
        let mut lnc = Vec::new();
        for &n in &grid {
            let mut mean = 0.0;
            for _ in 0..3 {
                let x = gauss_matrix(&mut rng, d, n);
                let q = gram_factor(&x, default_rel_tol(d, n)).expect("factor");
                let set = compute_candidates(&q).expect("candidates");
                mean += set.len() as f64 / 3.0;
            }
            lns.push((n as f64).ln());
            lnc.push(mean.ln());
        }
        let slope = ls_slope(&lns, &lnc);
        slopes.push((d, slope));
        if (slope - (d as f64 - 1.0)).abs() > 0.15 {
            failures.push(format!("d={d}: slope {slope:.3} not within 0.15 of {}", d - 1));
        }
    }

    let x = gauss_matrix(&mut rng, 2, 50);
    let mut best = f64::INFINITY;
    for _ in 0..3 {
        let res = l1pc_optimal(&x, default_rel_tol(2, 50)).expect("solver");
        best = best.min(res.elapsed);
    }
    if best >= 0.050 {
        failures.push(format!("d=2, N=50 solve took {:.1} ms", best * 1e3));
    }
    verdict(
        "criterion 5 (complexity sanity)",
        &failures,
        format!(
            "slopes {:?}, d=2 N=50 solve {:.2} ms",
            slopes
                .iter()
                .map(|(d, s)| format!("d={d}: {s:.3}"))
                .collect::<Vec<_>>(),
            best * 1e3
        ),
    );
}

#[test]
fn criterion_6_dimensionality_reduction_study() {
    let start = Instant::now();
    let cfg = DrConfig::default();
    let out = run_dr_experiment(&cfg, 100).expect("experiment");
    let a = &out.aggregate;
    let mut failures = Vec::new();
    if a.frac_l1_better_corrupted < 0.9 {
        failures.push(format!("corrupted-design win rate {:.2} < 0.90", a.frac_l1_better_corrupted));
    }
    if a.mean_e_l1_corrupted >= a.mean_e_l2_corrupted {
        failures.push(format!(
            "corrupted means not ordered: l1 {:.3} vs l2 {:.3}",
            a.mean_e_l1_corrupted, a.mean_e_l2_corrupted
        ));
    }
    let clean_gap = (a.mean_e_l1_clean - a.mean_e_l2_clean).abs() / a.mean_e_l2_clean;
    if clean_gap >= 0.05 {
        failures.push(format!("clean-design relative gap {clean_gap:.3} >= 0.05"));
    }
    verdict(
        "criterion 6 (dimensionality-reduction study)",
        &failures,
        format!(
            "100 trials: win rate {:.2}, corrupted means l1 {:.2} < l2 {:.2}, clean gap {:.1}%, {:.1}s",
            a.frac_l1_better_corrupted,
            a.mean_e_l1_corrupted,
            a.mean_e_l2_corrupted,
            100.0 * clean_gap,
            start.elapsed().as_secs_f64()
        ),
    );
}

#[test]
fn criterion_7_direction_of_arrival_study() {
    let start = Instant::now();
    let cfg = DoaConfig::default();
    let out = run_doa_experiment(&cfg, 300).expect("experiment");
    let a = &out.aggregate;
    let mut failures = Vec::new();
    if a.success_rate_l1 <= a.success_rate_l2 {
        failures.push(format!(
            "success rates not ordered: l1 {:.3} vs l2 {:.3}",
            a.success_rate_l1, a.success_rate_l2
        ));
    }
    if a.mean_power_at_jammer_l1 >= a.mean_power_at_jammer_l2 {
        failures.push(format!(
            "jammer-band power not ordered: l1 {:.3} vs l2 {:.3}",
            a.mean_power_at_jammer_l1, a.mean_power_at_jammer_l2
        ));
    }
    verdict(
        "criterion 7 (direction-of-arrival study)",
        &failures,
        format!(
            "300 trials: success l1 {:.3} > l2 {:.3}; jammer band l1 {:.3} < l2 {:.3}; {:.1}s",
            a.success_rate_l1,
            a.success_rate_l2,
            a.mean_power_at_jammer_l1,
            a.mean_power_at_jammer_l2,
            start.elapsed().as_secs_f64()
        ),
    );
}

#[test]
fn criterion_8_dominance_over_baselines() {
    let mut failures = Vec::new();
    let mut fp_equal = 0usize;
    let instances = single_instances();
    for (i, x) in instances.iter().enumerate() {
        let opt = l1pc_optimal(x, default_rel_tol(x.nrows(), x.ncols())).expect("solver");
        let slack = REL_TOL * opt.objective;

        let (b_fp, _) = fixed_point_multistart(x, 8, 200, 808).expect("fixed point");
        let proj = x * b_fp.to_dvector();
        let r_fp = &proj / proj.norm();
        let fp_obj: f64 = (x.transpose() * r_fp).iter().map(|v| v.abs()).sum();
        if fp_obj > opt.objective + slack {
            failures.push(format!("instance {i}: fixed point beat optimal"));
        }
        if (fp_obj - opt.objective).abs() <= slack {
            fp_equal += 1;
        }

        let greedy_obj = greedy_deflation_l1(x, 1).expect("greedy").l1_objective(x);
        if greedy_obj > opt.objective + slack {
            failures.push(format!("instance {i}: greedy beat optimal"));
        }

        let l2_obj = l2_subspace(x, 1).expect("l2").l1_objective(x);
        if l2_obj > opt.objective + slack {
            failures.push(format!("instance {i}: l2 component beat optimal"));
        }
    }
    verdict(
        "criterion 8 (dominance over baselines)",
        &failures,
        format!(
            "{} instances; fixed-point best-of-8 matched the optimum in {:.0}% of them",
            instances.len(),
            100.0 * fp_equal as f64 / instances.len() as f64
        ),
    );
}

fn matrix_strategy(
    dims: std::ops::RangeInclusive<usize>,
    cols: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = DMatrix<f64>> {
    (dims, cols).prop_flat_map(|(d, n)| {
        prop::collection::vec(-10.0f64..10.0, d * n)
            .prop_map(move |v| DMatrix::from_vec(d, n, v))
            .prop_filter("nonzero", |m| m.iter().any(|&v| v != 0.0))
    })
}

#[test]
fn criterion_9_invariant_suite() {
    let cases_per_property = 300;
    let mut failures = Vec::new();

    // Orthonormality of every returned basis.
    let mut runner = TestRunner::new(Config { cases: cases_per_property, ..Config::default() });
    let ortho = runner.run(
        &(matrix_strategy(2..=4, 4..=7), 1..=2usize),
        |(x, k_raw)| {
            let rank = l1pca::effective_rank(&x, default_rel_tol(x.nrows(), x.ncols())).unwrap();
            let k = k_raw.min(rank).min(x.nrows());
            let id = DMatrix::identity(k, k);
            for basis in [
                l2_subspace(&x, k).unwrap(),
                greedy_deflation_l1(&x, k).unwrap(),
                l1_multi_optimal(&x, k).unwrap().basis,
            ] {
                let dev = (basis.matrix().transpose() * basis.matrix() - &id).amax();
                prop_assert!(dev <= 1e-10, "orthonormality deviation {dev:.3e}");
            }
            Ok(())
        },
    );
    if let Err(e) = ortho {
        failures.push(format!("orthonormality: {e}"));
    }

    // Scaling equivariance of the exact solver.
    let mut runner = TestRunner::new(Config { cases: cases_per_property, ..Config::default() });
    let scaling = runner.run(
        &(matrix_strategy(2..=4, 4..=8), 0.1f64..10.0),
        |(x, alpha)| {
            let tol = default_rel_tol(x.nrows(), x.ncols());
            let base = l1pc_optimal(&x, tol).unwrap();
            let scaled = l1pc_optimal(&(&x * alpha), tol).unwrap();
            prop_assert_eq!(&base.sign_vector, &scaled.sign_vector);
            prop_assert!((&base.component - &scaled.component).amax() <= 1e-10);
            let rel = (scaled.objective - alpha * base.objective).abs() / (alpha * base.objective);
            prop_assert!(rel <= 1e-9, "objective scaling off by {rel:.3e}");
            Ok(())
        },
    );
    if let Err(e) = scaling {
        failures.push(format!("scaling equivariance: {e}"));
    }

    // Canonical signs and bitwise determinism.
    let mut runner = TestRunner::new(Config { cases: cases_per_property, ..Config::default() });
    let canon = runner.run(&matrix_strategy(2..=4, 4..=8), |x| {
        let tol = default_rel_tol(x.nrows(), x.ncols());
        let a = l1pc_optimal(&x, tol).unwrap();
        let b = l1pc_optimal(&x, tol).unwrap();
        prop_assert!(a.sign_vector.is_canonical());
        prop_assert_eq!(&a.sign_vector, &b.sign_vector);
        prop_assert_eq!(a.objective.to_bits(), b.objective.to_bits());
        prop_assert_eq!(a.component.as_slice(), b.component.as_slice());
        Ok(())
    });
    if let Err(e) = canon {
        failures.push(format!("canonical determinism: {e}"));
    }

    // Pythagoras split of the mean square fit error.
    let mut runner = TestRunner::new(Config { cases: cases_per_property, ..Config::default() });
    let pyth = runner.run(
        &(matrix_strategy(2..=4, 5..=40), prop::collection::vec(-1.0f64..1.0, 4)),
        |(x, dir)| {
            let d = x.nrows();
            let mut r = DVector::from_fn(d, |i, _| dir[i] + 0.05);
            let norm = r.norm();
            prop_assume!(norm > 1e-6);
            r /= norm;
            let err = mean_square_fit_error(&x, &r).unwrap();
            let n = x.ncols() as f64;
            let projected = (x.transpose() * &r).norm_squared() / n;
            let total = x.norm_squared() / n;
            let rel = (err + projected - total).abs() / total;
            prop_assert!(rel <= 1e-9, "energy split off by {rel:.3e}");
            Ok(())
        },
    );
    if let Err(e) = pyth {
        failures.push(format!("fit-error energy split: {e}"));
    }

    verdict(
        "criterion 9 (invariant suite)",
        &failures,
        format!("4 properties x {cases_per_property} generated cases"),
    );
}
