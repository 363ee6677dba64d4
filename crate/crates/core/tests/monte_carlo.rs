//! Monte Carlo checks against known data-generating processes.

use mdp_core::adl::{adl_fit, ecm_cointegration_test, long_run_solution, long_run_solution_with_step};
use mdp_core::johansen::{max_eigen_test, restriction_test, trace_test, vecm_fit, VecmDeterministic};
use mdp_core::linalg::Matrix;
use mdp_core::simulate::{ar1_path, random_walk, random_walk_with_drift, rng, var2_levels, white_noise, AdlProcess, CointegratedPair};
use mdp_core::stats::{adf, ar1, hac_covariance, median, ols, select_var_lag, Deterministic, HacKernel};
use rand::seq::IndexedRandom;
use rayon::prelude::*;

const CIV: VecmDeterministic = VecmDeterministic::ConstantInRelation;

fn share(reps: u64, f: impl Fn(u64) -> bool + Sync) -> f64 {
    (0..reps).into_par_iter().filter(|&i| f(i)).count() as f64 / reps as f64
}

#[test]
fn hac_matches_ols_under_iid_errors() {
    let close = share(1000, |i| {
        let mut g = rng(100, i);
        let x = white_noise(&mut g, 2000, 1.0);
        let e = white_noise(&mut g, 2000, 1.0);
        let y: Vec<f64> = x.iter().zip(&e).map(|(x, e)| 1.0 + 0.1 * x + e).collect();
        let xm = Matrix::from_columns(&[&x]).unwrap();
        let fit = ols(&y, &xm, true).unwrap();
        let t_ols = fit.coefficients[1] / fit.homoskedastic_covariance()[(1, 1)].sqrt();
        let hac = hac_covariance(&fit, &xm, HacKernel::NeweyWest, 5).unwrap();
        let t_hac = hac.t_stats(&fit.coefficients)[1];
        (t_hac / t_ols - 1.0).abs() < 0.10
    });
    assert!(close >= 0.95, "share within 10%: {close}");
}

#[test]
fn ar1_of_white_noise_is_near_zero() {
    let x = white_noise(&mut rng(101, 0), 10_000, 1.0);
    let fit = ar1(&x).unwrap();
    assert!(fit.phi.abs() < 0.05, "phi = {}", fit.phi);
}

#[test]
fn adf_size_on_random_walks() {
    let rejected = share(500, |i| {
        adf(&random_walk(&mut rng(102, i), 500, 1.0), 0, Deterministic::Constant).unwrap().rejects_at_5pct()
    });
    assert!(1.0 - rejected >= 0.90);
    assert!((0.03..=0.08).contains(&rejected), "size {rejected}");
}

#[test]
fn adf_power_on_stationary_ar1() {
    let rejected = share(500, |i| {
        adf(&ar1_path(&mut rng(103, i), 500, 0.5, 1.0), 0, Deterministic::Constant).unwrap().rejects_at_5pct()
    });
    assert!(rejected >= 0.95, "power {rejected}");
}

#[test]
fn hannan_quinn_recovers_var2() {
    let hits = share(200, |i| select_var_lag(&var2_levels(&mut rng(104, i), 2000), 12).unwrap() == 2);
    assert!(hits >= 0.80, "selected 2 in {hits}");
}

#[test]
fn johansen_recovers_beta() {
    let dgp = CointegratedPair::default();
    let errors: Vec<f64> = (0..200u64)
        .into_par_iter()
        .map(|i| (vecm_fit(&dgp.levels(&mut rng(105, i), 2000), 1, CIV).unwrap().beta() - 0.5).abs())
        .collect();
    assert!(median(&errors) < 0.02, "median error {}", median(&errors));
}

// The critical values assume trending levels, so the null walks carry a drift.
#[test]
fn johansen_trace_size_on_independent_walks() {
    let accepted = share(500, |i| {
        let mut g = rng(106, i);
        let d = random_walk_with_drift(&mut g, 500, 0.1, 1.0);
        let p = random_walk_with_drift(&mut g, 500, 0.1, 1.0);
        let fit = vecm_fit(&Matrix::from_columns(&[&d, &p]).unwrap(), 1, CIV).unwrap();
        trace_test(&fit).hypotheses[0].statistic < 15.49
    });
    assert!(accepted >= 0.90, "non-rejection share {accepted}");
}

#[test]
fn johansen_power_and_rank_recovery() {
    let dgp = CointegratedPair::default();
    let outcomes: Vec<(bool, usize)> = (0..200u64)
        .into_par_iter()
        .map(|i| {
            let fit = vecm_fit(&dgp.levels(&mut rng(107, i), 2000), 1, CIV).unwrap();
            (trace_test(&fit).hypotheses[0].rejects_at_5pct(), max_eigen_test(&fit).selected_rank())
        })
        .collect();
    let power = outcomes.iter().filter(|o| o.0).count() as f64 / 200.0;
    let rank_one = outcomes.iter().filter(|o| o.1 == 1).count() as f64 / 200.0;
    assert!(power >= 0.90, "trace power {power}");
    assert!(rank_one >= 0.90, "max-eigen rank one in {rank_one}");
}

#[test]
fn johansen_restriction_size() {
    let dgp = CointegratedPair { beta: 1.0, ..CointegratedPair::default() };
    let rejected = share(500, |i| {
        let fit = vecm_fit(&dgp.levels(&mut rng(108, i), 1000), 1, CIV).unwrap();
        restriction_test(&fit, &[1.0, -1.0]).unwrap().rejects_at_5pct()
    });
    assert!((0.02..=0.09).contains(&rejected), "restriction size {rejected}");
}

#[test]
fn johansen_is_super_consistent() {
    let dgp = CointegratedPair::default();
    let med = |n: usize| {
        let errs: Vec<f64> = (0..200u64)
            .into_par_iter()
            .map(|i| (vecm_fit(&dgp.levels(&mut rng(109, i), n), 1, CIV).unwrap().beta() - 0.5).abs())
            .collect();
        median(&errs)
    };
    let (a, b, c) = (med(250), med(1000), med(4000));
    assert!(a > b && b > c, "median errors {a} {b} {c}");
    // n-rate: quadrupling n should cut the error by far more than the root-n factor of two
    assert!(a / c > 6.0, "ratio {}", a / c);
}

#[test]
fn johansen_shift_only_moves_c0() {
    let w = CointegratedPair::default().levels(&mut rng(110, 0), 800);
    let shifted = Matrix::from_fn(w.rows(), 2, |i, j| w[(i, j)] + 3.0);
    let a = vecm_fit(&w, 2, CIV).unwrap();
    let b = vecm_fit(&shifted, 2, CIV).unwrap();
    assert!((a.beta() - b.beta()).abs() < 1e-9);
    // bᵀ(w + 3·1) = bᵀw + 3(1 - β)
    let expected = a.c0 - 3.0 * (1.0 - a.beta());
    assert!((b.c0 - expected).abs() < 1e-8, "{} vs {}", b.c0, expected);
    for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
        assert!((x - y).abs() < 1e-10);
    }
}

#[test]
fn johansen_eigen_residuals_are_small() {
    let w = CointegratedPair::default().levels(&mut rng(111, 0), 1500);
    for q in [0, 1, 6] {
        let fit = vecm_fit(&w, q, CIV).unwrap();
        for r in fit.eigen_residual_norms().unwrap() {
            assert!(r < 1e-8);
        }
    }
}

#[test]
fn adl_recovers_long_run_beta() {
    let dgp = AdlProcess::with_long_run(0.5, 0.5);
    let errors: Vec<f64> = (0..200u64)
        .into_par_iter()
        .map(|i| {
            let (d, p) = dgp.simulate(&mut rng(112, i), 2000);
            (long_run_solution(&adl_fit(&d, &p, 3, 3).unwrap()).unwrap().beta - 0.5).abs()
        })
        .collect();
    assert!(median(&errors) < 0.03, "median error {}", median(&errors));
}

#[test]
fn adl_delta_se_matches_residual_bootstrap() {
    let dgp = AdlProcess::with_long_run(0.5, 0.5);
    let (d, p) = dgp.simulate(&mut rng(113, 0), 400);
    let fit = adl_fit(&d, &p, 3, 3).unwrap();
    let delta_se = long_run_solution(&fit).unwrap().se_beta;
    let theta = fit.parameters();
    let start = 3;
    let draws: Vec<f64> = (0..500u64)
        .into_par_iter()
        .map(|b| {
            let mut g = rng(114, b);
            let mut db = d[..start].to_vec();
            for t in start..d.len() {
                let e = *fit.residuals.choose(&mut g).unwrap();
                let mut v = theta[0] + e;
                for i in 1..=3 {
                    v += theta[i] * db[t - i];
                }
                for j in 0..=3 {
                    v += theta[4 + j] * p[t - j];
                }
                db.push(v);
            }
            long_run_solution(&adl_fit(&db, &p, 3, 3).unwrap()).unwrap().beta
        })
        .collect();
    let m = draws.iter().sum::<f64>() / draws.len() as f64;
    let boot_se = (draws.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (draws.len() - 1) as f64).sqrt();
    let ratio = delta_se / boot_se;
    assert!((0.8..=1.2).contains(&ratio), "delta {delta_se} bootstrap {boot_se}");
}

#[test]
fn adl_delta_gradient_matches_analytic() {
    let (d, p) = AdlProcess::with_long_run(0.6, 0.8).simulate(&mut rng(115, 0), 600);
    let fit = adl_fit(&d, &p, 3, 3).unwrap();
    let lr = long_run_solution(&fit).unwrap();
    // ∂β/∂a_i = β/(1 - Σa), ∂β/∂b_j = 1/(1 - Σa), ∂β/∂a0 = 0
    let gap = 1.0 - fit.own_lag_sum();
    let mut grad = vec![0.0];
    grad.extend(std::iter::repeat(lr.beta / gap).take(3));
    grad.extend(std::iter::repeat(1.0 / gap).take(4));
    let se = fit.covariance.quad_form(&grad).sqrt();
    assert!((se - lr.se_beta).abs() / se < 1e-6);
}

#[test]
fn adl_gradient_step_halving_is_stable() {
    let (d, p) = AdlProcess::with_long_run(0.5, 0.5).simulate(&mut rng(116, 0), 500);
    let fit = adl_fit(&d, &p, 3, 3).unwrap();
    let a = long_run_solution_with_step(&fit, 1e-5).unwrap().se_beta;
    let b = long_run_solution_with_step(&fit, 5e-6).unwrap().se_beta;
    assert!((a - b).abs() / a < 1e-4);
}

#[test]
fn adl_long_run_is_invariant_to_price_shift() {
    let (d, p) = AdlProcess::with_long_run(0.5, 0.5).simulate(&mut rng(117, 0), 500);
    let shifted: Vec<f64> = p.iter().map(|x| x + 2.0).collect();
    let a = long_run_solution(&adl_fit(&d, &p, 3, 3).unwrap()).unwrap();
    let b = long_run_solution(&adl_fit(&d, &shifted, 3, 3).unwrap()).unwrap();
    assert!((a.beta - b.beta).abs() < 1e-9);
    assert!((b.alpha - (a.alpha - 2.0 * a.beta)).abs() < 1e-8);
}

#[test]
fn ecm_test_size_on_independent_walks() {
    let rejected = share(1000, |i| {
        let mut g = rng(118, i);
        let d = random_walk(&mut g, 300, 1.0);
        let p = random_walk(&mut g, 300, 1.0);
        ecm_cointegration_test(&adl_fit(&d, &p, 3, 3).unwrap()).rejects_at_5pct()
    });
    assert!((0.03..=0.075).contains(&rejected), "size {rejected}");
}

#[test]
fn ecm_test_power_with_strong_correction() {
    let dgp = AdlProcess::with_long_run(0.3, 0.5);
    let rejected = share(500, |i| {
        let (d, p) = dgp.simulate(&mut rng(119, i), 300);
        ecm_cointegration_test(&adl_fit(&d, &p, 3, 3).unwrap()).rejects_at_5pct()
    });
    assert!(rejected >= 0.95, "power {rejected}");
}
