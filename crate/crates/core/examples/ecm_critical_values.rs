//! Simulates null quantiles of the ADL(3,3) error-correction t-test and fits
//! the response surface `θ∞ + θ1/T + θ2/T²` to the 5% points.
//!
//! cargo run --release -p mdp-core --example ecm_critical_values -- [reps] [seed]

use mdp_core::adl::{adl_fit, ecm_cointegration_test};
use mdp_core::simulate::{random_walk, rng};
use mdp_core::stats::ols;
use mdp_core::Matrix;
use rayon::prelude::*;

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[(lo + 1).min(sorted.len() - 1)] - sorted[lo])
}

fn main() {
    let mut args = std::env::args().skip(1);
    let reps: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(40_000);
    let seed: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(2002);
    let sizes = [40usize, 60, 100, 150, 250, 400, 700, 1000];

    let mut points = Vec::new();
    for (k, &t) in sizes.iter().enumerate() {
        let n = t + 3;
        let mut stats: Vec<f64> = (0..reps)
            .into_par_iter()
            .map(|i| {
                let mut g = rng(seed + k as u64, i);
                let d = random_walk(&mut g, n, 1.0);
                let p = random_walk(&mut g, n, 1.0);
                let fit = adl_fit(&d, &p, 3, 3).expect("random walks give a full-rank design");
                ecm_cointegration_test(&fit).statistic
            })
            .collect();
        stats.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let q = [0.01, 0.05, 0.10].map(|q| quantile(&stats, q));
        println!("T = {t:5}  1%: {:.4}  5%: {:.4}  10%: {:.4}", q[0], q[1], q[2]);
        points.push((t as f64, q[1]));
    }

    let y: Vec<f64> = points.iter().map(|p| p.1).collect();
    let inv: Vec<f64> = points.iter().map(|p| 1.0 / p.0).collect();
    let inv2: Vec<f64> = inv.iter().map(|x| x * x).collect();
    let x = Matrix::from_columns(&[&inv, &inv2]).unwrap();
    let fit = ols(&y, &x, true).unwrap();
    println!(
        "5% surface: [{:.4}, {:.3}, {:.2}]",
        fit.coefficients[0], fit.coefficients[1], fit.coefficients[2]
    );
}
