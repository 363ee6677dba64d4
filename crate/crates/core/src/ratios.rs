//! Classical and cointegration-modified dividend-price ratios.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adl::{adl_fit, long_run_solution};
use crate::error::{Error, Result};
use crate::johansen::{trace_test, vecm_fit, VecmDeterministic};
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::series::{AnnualPanel, YearMonth, MONTHS_PER_YEAR};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaProvenance {
    Population,
    Recursive,
    Fixed,
}

#[derive(Debug, Clone)]
pub struct RatioPanel<T> {
    pub dates: Vec<YearMonth>,
    pub dp: Vec<T>,
    pub dstar_p: Vec<T>,
    /// `d - β p` with the VECM coefficient
    pub mdp: Vec<T>,
    /// `d - β' p` with the ADL coefficient
    pub mdp_prime: Vec<T>,
    pub beta_mdp: T,
    pub beta_mdp_prime: T,
    pub provenance: BetaProvenance,
}

/// Builds all four ratios over the panel span; the provenance is `Fixed` until overridden.
pub fn build_ratios<T: Scalar>(panel: &AnnualPanel<T>, beta_mdp: T, beta_mdp_prime: T) -> Result<RatioPanel<T>> {
    if !beta_mdp.is_finite() || !beta_mdp_prime.is_finite() {
        return Err(Error::InvalidArgument("cointegration coefficients must be finite".into()));
    }
    let modified = |beta: T| -> Vec<T> { panel.d.iter().zip(&panel.p).map(|(&d, &p)| d - beta * p).collect() };
    Ok(RatioPanel {
        dates: panel.dates.clone(),
        dp: panel.dp(),
        dstar_p: panel.dstar_p(),
        mdp: modified(beta_mdp),
        mdp_prime: modified(beta_mdp_prime),
        beta_mdp,
        beta_mdp_prime,
        provenance: BetaProvenance::Fixed,
    })
}

impl<T: Scalar> RatioPanel<T> {
    pub fn with_provenance(mut self, provenance: BetaProvenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }
}

/// Estimator behind a cointegration coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Engine {
    /// VECM with `lags` lagged differences.
    Johansen { lags: usize },
    /// ADL(own_lags, price_lags) long-run solution.
    Adl { own_lags: usize, price_lags: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaEstimate<T> {
    pub beta: T,
    /// VECM trace test did not reject rank zero at 5%.
    pub rank_zero: bool,
}

/// Estimates β on panel rows `rows`.
pub fn estimate_beta<T: Scalar>(
    panel: &AnnualPanel<T>,
    rows: std::ops::Range<usize>,
    engine: Engine,
) -> Result<BetaEstimate<T>> {
    let d = &panel.d[rows.clone()];
    let p = &panel.p[rows];
    match engine {
        Engine::Johansen { lags } => {
            let w = Matrix::from_columns(&[d, p])?;
            let fit = vecm_fit(&w, lags, VecmDeterministic::ConstantInRelation)?;
            let rank_zero = !trace_test(&fit).hypotheses[0].rejects_at_5pct();
            Ok(BetaEstimate { beta: fit.beta(), rank_zero })
        }
        Engine::Adl { own_lags, price_lags } => {
            let fit = adl_fit(d, p, own_lags, price_lags)?;
            Ok(BetaEstimate { beta: long_run_solution(&fit)?.beta, rank_zero: false })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaPoint<T> {
    pub date: YearMonth,
    /// Estimation window `[start, date]`.
    pub window_start: YearMonth,
    /// `None` only before the first successful fit.
    pub beta: Option<T>,
    /// The fit failed and the previous value was carried forward.
    pub carried_forward: bool,
    pub rank_zero: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaPath<T> {
    pub engine: Engine,
    /// Panel row of the first point.
    pub first_row: usize,
    pub points: Vec<BetaPoint<T>>,
}

impl<T: Scalar> BetaPath<T> {
    pub fn failures(&self) -> usize {
        self.points.iter().filter(|p| p.carried_forward || p.beta.is_none()).count()
    }

    pub fn last_beta(&self) -> Option<T> {
        self.points.last().and_then(|p| p.beta)
    }
}

/// β_t re-estimated each month on panel rows `0..=t` once `min_years` of rows exist.
pub fn recursive_beta_path<T: Scalar>(
    panel: &AnnualPanel<T>,
    min_years: usize,
    engine: Engine,
) -> Result<BetaPath<T>> {
    recursive_beta_path_from(panel, 0, min_years, engine)
}

/// Recursive path with every window starting at panel row `start`.
pub fn recursive_beta_path_from<T: Scalar>(
    panel: &AnnualPanel<T>,
    start: usize,
    min_years: usize,
    engine: Engine,
) -> Result<BetaPath<T>> {
    let burn_in = MONTHS_PER_YEAR * min_years;
    if start + burn_in >= panel.len() {
        return Err(Error::InsufficientData {
            needed: start + burn_in + 1,
            got: panel.len(),
            context: "recursive beta burn-in".into(),
        });
    }
    let first_row = start + burn_in;
    let raw: Vec<Result<BetaEstimate<T>>> = (first_row..panel.len())
        .into_par_iter()
        .map(|t| estimate_beta(panel, start..t + 1, engine))
        .collect();
    let mut points = Vec::with_capacity(raw.len());
    let mut last: Option<T> = None;
    for (i, est) in raw.into_iter().enumerate() {
        let date = panel.dates[first_row + i];
        let window_start = panel.dates[start];
        let point = match est {
            Ok(e) if e.beta.is_finite() => {
                last = Some(e.beta);
                BetaPoint { date, window_start, beta: Some(e.beta), carried_forward: false, rank_zero: e.rank_zero }
            }
            Ok(_) => BetaPoint { date, window_start, beta: last, carried_forward: last.is_some(), rank_zero: false },
            Err(e) if e.is_numerical() => {
                BetaPoint { date, window_start, beta: last, carried_forward: last.is_some(), rank_zero: false }
            }
            Err(e) => return Err(e),
        };
        points.push(point);
    }
    Ok(BetaPath { engine, first_row, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{PriceSource, ReinvestmentRate};
    use crate::simulate::{random_walk, rng, white_noise};

    fn toy_panel(n: usize) -> AnnualPanel<f64> {
        let start = YearMonth::new(1950, 1).unwrap();
        let mut dates = Vec::new();
        let mut date = start;
        let mut rng = rng(5, 0);
        let p: Vec<f64> = random_walk(&mut rng, n, 0.05).iter().map(|x| 3.0 + x).collect();
        let noise = white_noise(&mut rng, n, 1e-4);
        let d: Vec<f64> = p.iter().zip(&noise).map(|(p, e)| 0.5 * p + e).collect();
        for _ in 0..n {
            dates.push(date);
            date = date.next();
        }
        AnnualPanel {
            dates,
            dstar: d.iter().map(|x| x + 0.01).collect(),
            d,
            p,
            r: vec![0.0; n],
            re: vec![0.0; n],
            rf: vec![0.0; n],
            growth_d: vec![None; n],
            growth_dstar: vec![None; n],
            reinvestment: ReinvestmentRate::TotalReturn,
            price_source: PriceSource::Supplied,
        }
    }

    #[test]
    fn unit_beta_reproduces_dp() {
        let panel = toy_panel(50);
        let ratios = build_ratios(&panel, 1.0, 0.8).unwrap();
        assert_eq!(ratios.mdp, ratios.dp);
        for t in 0..panel.len() {
            assert_eq!(ratios.mdp[t], panel.d[t] - 1.0 * panel.p[t]);
        }
        assert!(build_ratios(&panel, f64::NAN, 0.8).is_err());
    }

    #[test]
    fn adl_path_on_near_exact_relation() {
        let panel = toy_panel(24 * 12);
        let path = recursive_beta_path(&panel, 15, Engine::Adl { own_lags: 3, price_lags: 3 }).unwrap();
        assert_eq!(path.points.len(), panel.len() - 180);
        for pt in &path.points {
            assert!((pt.beta.unwrap() - 0.5).abs() < 1e-2);
        }
        let full = estimate_beta(&panel, 0..panel.len(), path.engine).unwrap();
        assert_eq!(path.last_beta().unwrap(), full.beta);
    }

    #[test]
    fn burn_in_longer_than_sample() {
        let panel = toy_panel(100);
        assert!(matches!(
            recursive_beta_path(&panel, 15, Engine::Johansen { lags: 1 }),
            Err(Error::InsufficientData { .. })
        ));
    }
}
