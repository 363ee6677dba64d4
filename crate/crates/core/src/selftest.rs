//! Monte Carlo property suites with fixed seeds.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adl::{adl_fit, long_run_solution};
use crate::johansen::{vecm_fit, VecmDeterministic};
use crate::oos::{forecast_at, BetaMode, OosScheme};
use crate::predictability::{Predictor, SampleWindow, Target};
use crate::ratios::Engine;
use crate::scalar::median;
use crate::series::{build_annual_panel, ReinvestmentRate};
use crate::simulate::{ar1_path, random_walk, rng, AdlProcess, CointegratedPair, SyntheticMarket};
use crate::stats::{adf, Deterministic};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub statistic: f64,
    /// Human-readable acceptance region.
    pub criterion: String,
    pub replications: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub suites: Vec<SuiteResult>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }
}

fn rejection_rate(reps: usize, draw: impl Fn(u64) -> Vec<f64> + Sync) -> f64 {
    let hits: usize = (0..reps as u64)
        .into_par_iter()
        .map(|i| {
            let x = draw(i);
            usize::from(adf(&x, 0, Deterministic::Constant).map(|r| r.rejects_at_5pct()).unwrap_or(false))
        })
        .sum();
    hits as f64 / reps as f64
}

/// Share of random walks (n = 500) rejected at 5%.
pub fn adf_size(seed: u64, reps: usize) -> SuiteResult {
    let rate = rejection_rate(reps, |i| random_walk(&mut rng(seed, i), 500, 1.0));
    SuiteResult {
        name: "adf_size".into(),
        statistic: rate,
        criterion: "rejection rate in [0.03, 0.08]".into(),
        replications: reps,
        passed: (0.03..=0.08).contains(&rate),
    }
}

/// Share of AR(1) paths with φ = 0.5 (n = 500) rejected at 5%.
pub fn adf_power(seed: u64, reps: usize) -> SuiteResult {
    let rate = rejection_rate(reps, |i| ar1_path(&mut rng(seed, i), 500, 0.5, 1.0));
    SuiteResult {
        name: "adf_power".into(),
        statistic: rate,
        criterion: "rejection rate >= 0.95".into(),
        replications: reps,
        passed: rate >= 0.95,
    }
}

/// Median `|β̂ - 0.5|` of the VECM on the cointegrated pair, n = 2000.
pub fn johansen_recovery(seed: u64, reps: usize) -> SuiteResult {
    let dgp = CointegratedPair::default();
    let errors: Vec<f64> = (0..reps as u64)
        .into_par_iter()
        .map(|i| {
            let w = dgp.levels(&mut rng(seed, i), 2000);
            vecm_fit(&w, 1, VecmDeterministic::ConstantInRelation).map_or(f64::INFINITY, |f| (f.beta() - dgp.beta).abs())
        })
        .collect();
    let med = median(&errors);
    SuiteResult {
        name: "johansen_recovery".into(),
        statistic: med,
        criterion: "median |beta - 0.5| < 0.02 at n = 2000".into(),
        replications: reps,
        passed: med < 0.02,
    }
}

/// Median `|β̂ - 0.5|` of the ADL(3,3) long-run solution, n = 2000.
pub fn adl_recovery(seed: u64, reps: usize) -> SuiteResult {
    let dgp = AdlProcess::with_long_run(0.5, 0.5);
    let errors: Vec<f64> = (0..reps as u64)
        .into_par_iter()
        .map(|i| {
            let (d, p) = dgp.simulate(&mut rng(seed, i), 2000);
            adl_fit(&d, &p, 3, 3)
                .and_then(|f| long_run_solution(&f))
                .map_or(f64::INFINITY, |s| (s.beta - dgp.long_run_beta()).abs())
        })
        .collect();
    let med = median(&errors);
    SuiteResult {
        name: "adl_recovery".into(),
        statistic: med,
        criterion: "median |beta - 0.5| < 0.03 at n = 2000".into(),
        replications: reps,
        passed: med < 0.03,
    }
}

/// Largest change in recursive-β forecasts after perturbing every row dated after the origin.
pub fn oos_lookahead(seed: u64) -> SuiteResult {
    let market = SyntheticMarket { months: 32 * 12, ..SyntheticMarket::default() };
    let outcome = (|| -> crate::Result<f64> {
        let series = market.series(&mut rng(seed, 0))?;
        let panel = build_annual_panel(&series, ReinvestmentRate::TotalReturn)?;
        let scheme = OosScheme {
            predictor: Predictor::Mdp,
            beta_mode: BetaMode::Recursive,
            engine: Engine::Johansen { lags: 2 },
            target: Target::R,
            horizon: 3,
            window: SampleWindow::full(),
            init_years: 15,
        };
        let mut worst: f64 = 0.0;
        for t in [180usize, 220, 260, panel.len() - 1] {
            let base = forecast_at(&scheme, &panel, t)?;
            let mut perturbed = panel.clone();
            for s in t + 1..perturbed.len() {
                let bump = 0.1 * (s as f64).sin();
                perturbed.d[s] += bump;
                perturbed.p[s] -= bump;
                perturbed.r[s] += bump;
                perturbed.re[s] += bump;
            }
            let moved = forecast_at(&scheme, &perturbed, t)?;
            worst = worst.max((base.forecast - moved.forecast).abs()).max((base.benchmark - moved.benchmark).abs());
        }
        Ok(worst)
    })();
    let statistic = outcome.unwrap_or(f64::INFINITY);
    SuiteResult {
        name: "oos_lookahead".into(),
        statistic,
        criterion: "forecast change after future perturbation == 0".into(),
        replications: 4,
        passed: statistic == 0.0,
    }
}

pub const DEFAULT_REPLICATIONS: usize = 500;

/// Runs every suite; ADF suites use `reps` draws, the estimator suites `reps / 2.5`.
pub fn run_selftest(seed: u64, reps: usize) -> SelftestReport {
    let fit_reps = (reps * 2 / 5).max(1);
    SelftestReport {
        seed,
        suites: vec![
            adf_size(seed, reps),
            adf_power(seed.wrapping_add(1), reps),
            johansen_recovery(seed.wrapping_add(2), fit_reps),
            adl_recovery(seed.wrapping_add(3), fit_reps),
            oos_lookahead(seed.wrapping_add(4)),
        ],
    }
}
