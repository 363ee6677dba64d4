//! Walk-forward out-of-sample evaluation against the historical-mean benchmark.
//!
//! At each monthly origin `t` the forecasting slope is fitted on all pairs
//! `(x_s, r_s(h))` with `s + 12h ≤ t`, so only returns realised by `t` are used.
//! The benchmark is the mean of those same realised `h`-year returns.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::predictability::{Predictor, SampleWindow, Target};
use crate::ratios::{estimate_beta, Engine};
use crate::scalar::{mean, Scalar};
use crate::series::{forward_sum, AnnualPanel, YearMonth, MONTHS_PER_YEAR};
use crate::stats::ols;

/// Minimal slope-estimation period in years.
pub const DEFAULT_INIT_YEARS: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaMode {
    /// Classical ratio, no cointegration coefficient.
    NotApplicable,
    /// β re-estimated on the window up to each origin.
    Recursive,
    /// β fitted once on the whole window.
    Population,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OosScheme {
    pub predictor: Predictor,
    pub beta_mode: BetaMode,
    /// Estimator for modified ratios; ignored for classical ones.
    pub engine: Engine,
    /// `R` or `Re`.
    pub target: Target,
    pub horizon: usize,
    pub window: SampleWindow,
    pub init_years: usize,
}

impl OosScheme {
    fn validate(&self) -> Result<()> {
        if self.predictor.is_modified() == (self.beta_mode == BetaMode::NotApplicable) {
            return Err(Error::InvalidArgument(format!(
                "beta mode {:?} does not fit predictor {}",
                self.beta_mode, self.predictor
            )));
        }
        if !matches!(self.target, Target::R | Target::Re) {
            return Err(Error::InvalidArgument(format!("out-of-sample target must be r or re, got {}", self.target)));
        }
        if self.horizon == 0 {
            return Err(Error::InvalidArgument("horizon must be at least one year".into()));
        }
        if self.init_years * MONTHS_PER_YEAR <= self.horizon * MONTHS_PER_YEAR + 2 {
            return Err(Error::InvalidArgument("initial window shorter than the forecast horizon".into()));
        }
        Ok(())
    }

    fn target_series<'a, T>(&self, panel: &'a AnnualPanel<T>) -> &'a [T] {
        match self.target {
            Target::Re => &panel.re,
            _ => &panel.r,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OosForecast<T> {
    pub date: YearMonth,
    pub forecast: T,
    pub benchmark: T,
    /// `None` when the horizon runs past the panel.
    pub realized: Option<T>,
    pub beta: Option<T>,
    pub beta_carried_forward: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OosReport<T> {
    pub scheme: OosScheme,
    pub r2_os: T,
    pub forecasts: Vec<OosForecast<T>>,
    pub population_beta: Option<T>,
    pub first_origin: YearMonth,
    pub last_origin: YearMonth,
}

impl<T: Scalar> OosReport<T> {
    pub fn count(&self) -> usize {
        self.forecasts.len()
    }
}

/// `1 - Σ(r - r̂)² / Σ(r - r̄)²`
pub fn r2_os<T: Scalar>(forecast: &[T], benchmark: &[T], realized: &[T]) -> Result<T> {
    if forecast.len() != realized.len() || benchmark.len() != realized.len() {
        return Err(Error::DimensionMismatch("forecast, benchmark and realised lengths differ".into()));
    }
    if realized.is_empty() {
        return Err(Error::EmptySample("no completed forecasts".into()));
    }
    let sq = |a: T, b: T| (a - b) * (a - b);
    let sse_model: T = forecast.iter().zip(realized).map(|(&f, &r)| sq(r, f)).sum();
    let sse_bench: T = benchmark.iter().zip(realized).map(|(&b, &r)| sq(r, b)).sum();
    if !(sse_bench > T::zero()) {
        return Err(Error::Degenerate("benchmark errors are all zero".into()));
    }
    Ok(T::one() - sse_model / sse_bench)
}

struct Layout {
    /// First window row.
    s0: usize,
    /// First origin.
    t0: usize,
    /// Last origin whose forecast is realised inside the window.
    t_last: usize,
}

fn layout<T: Scalar>(scheme: &OosScheme, panel: &AnnualPanel<T>) -> Result<Layout> {
    scheme.validate()?;
    let (s0, end) = scheme
        .window
        .rows(&panel.dates)
        .ok_or_else(|| Error::EmptySample("evaluation window outside the panel".into()))?;
    let t0 = s0 + MONTHS_PER_YEAR * scheme.init_years;
    let span = MONTHS_PER_YEAR * scheme.horizon;
    if end < span || t0 > end - span {
        return Err(Error::InsufficientData {
            needed: t0 + span + 1 - s0,
            got: end + 1 - s0,
            context: "out-of-sample window".into(),
        });
    }
    Ok(Layout { s0, t0, t_last: end - span })
}

fn predictor_value<T: Scalar>(predictor: Predictor, panel: &AnnualPanel<T>, s: usize, beta: Option<T>) -> T {
    match predictor {
        Predictor::Dp => panel.d[s] - panel.p[s],
        Predictor::DStarP => panel.dstar[s] - panel.p[s],
        Predictor::Mdp | Predictor::MdpPrime => panel.d[s] - beta.expect("modified ratio needs beta") * panel.p[s],
    }
}

/// Forecast and benchmark issued at origin `t` given the β in force there.
fn forecast_with_beta<T: Scalar>(
    scheme: &OosScheme,
    panel: &AnnualPanel<T>,
    s0: usize,
    t: usize,
    beta: Option<T>,
) -> Result<(T, T)> {
    let span = MONTHS_PER_YEAR * scheme.horizon;
    let returns = scheme.target_series(panel);
    let train: Vec<usize> = (s0..=t - span).collect();
    let y: Vec<T> = train
        .iter()
        .map(|&s| {
            let mut total = T::zero();
            for j in 1..=scheme.horizon {
                total = total + returns[s + MONTHS_PER_YEAR * j];
            }
            total
        })
        .collect();
    let x = Matrix::from_fn(train.len(), 1, |i, _| predictor_value(scheme.predictor, panel, train[i], beta));
    let fit = ols(&y, &x, true)?;
    let xt = predictor_value(scheme.predictor, panel, t, beta);
    Ok((fit.coefficients[0] + fit.coefficients[1] * xt, mean(&y)))
}

fn population_beta<T: Scalar>(scheme: &OosScheme, panel: &AnnualPanel<T>) -> Result<Option<T>> {
    if scheme.beta_mode != BetaMode::Population {
        return Ok(None);
    }
    let (s0, end) = scheme
        .window
        .rows(&panel.dates)
        .ok_or_else(|| Error::EmptySample("evaluation window outside the panel".into()))?;
    Ok(Some(estimate_beta(panel, s0..end + 1, scheme.engine)?.beta))
}

/// Forecast issued at panel row `t`; realised value included when available.
///
/// In recursive and classical modes the result depends only on rows up to `t`.
pub fn forecast_at<T: Scalar>(scheme: &OosScheme, panel: &AnnualPanel<T>, t: usize) -> Result<OosForecast<T>> {
    let lay = layout(scheme, panel)?;
    if t < lay.t0 || t >= panel.len() {
        return Err(Error::InvalidArgument(format!("origin row {t} outside [{}, {})", lay.t0, panel.len())));
    }
    let beta = match scheme.beta_mode {
        BetaMode::NotApplicable => None,
        BetaMode::Population => population_beta(scheme, panel)?,
        BetaMode::Recursive => Some(estimate_beta(panel, lay.s0..t + 1, scheme.engine)?.beta),
    };
    let (forecast, benchmark) = forecast_with_beta(scheme, panel, lay.s0, t, beta)?;
    Ok(OosForecast {
        date: panel.dates[t],
        forecast,
        benchmark,
        realized: forward_sum(scheme.target_series(panel), t, scheme.horizon, None),
        beta,
        beta_carried_forward: false,
    })
}

/// Runs the walk-forward evaluation over every monthly origin in the window.
pub fn evaluate<T: Scalar>(scheme: &OosScheme, panel: &AnnualPanel<T>) -> Result<OosReport<T>> {
    let lay = layout(scheme, panel)?;
    let origins: Vec<usize> = (lay.t0..=lay.t_last).collect();
    let pop = population_beta(scheme, panel)?;

    let betas: Vec<(Option<T>, bool)> = match scheme.beta_mode {
        BetaMode::NotApplicable => vec![(None, false); origins.len()],
        BetaMode::Population => vec![(pop, false); origins.len()],
        BetaMode::Recursive => {
            let raw: Vec<Result<T>> = origins
                .par_iter()
                .map(|&t| estimate_beta(panel, lay.s0..t + 1, scheme.engine).map(|e| e.beta))
                .collect();
            let mut last = None;
            let mut out = Vec::with_capacity(raw.len());
            for r in raw {
                match r {
                    Ok(b) if b.is_finite() => {
                        last = Some(b);
                        out.push((last, false));
                    }
                    Ok(_) => out.push((last, true)),
                    Err(e) if e.is_numerical() => out.push((last, true)),
                    Err(e) => return Err(e),
                }
            }
            out
        }
    };

    let issued: Vec<Result<Option<OosForecast<T>>>> = origins
        .par_iter()
        .zip(betas.par_iter())
        .map(|(&t, &(beta, carried))| {
            if scheme.predictor.is_modified() && beta.is_none() {
                return Ok(None);
            }
            let (forecast, benchmark) = forecast_with_beta(scheme, panel, lay.s0, t, beta)?;
            Ok(Some(OosForecast {
                date: panel.dates[t],
                forecast,
                benchmark,
                realized: forward_sum(scheme.target_series(panel), t, scheme.horizon, None),
                beta,
                beta_carried_forward: carried,
            }))
        })
        .collect();
    let mut forecasts = Vec::with_capacity(issued.len());
    for f in issued {
        if let Some(f) = f? {
            forecasts.push(f);
        }
    }
    if forecasts.is_empty() {
        return Err(Error::EmptySample("no completed forecasts".into()));
    }
    let fc: Vec<T> = forecasts.iter().map(|f| f.forecast).collect();
    let bm: Vec<T> = forecasts.iter().map(|f| f.benchmark).collect();
    let re: Vec<T> = forecasts.iter().map(|f| f.realized.expect("origin inside window")).collect();
    Ok(OosReport {
        scheme: scheme.clone(),
        r2_os: r2_os(&fc, &bm, &re)?,
        first_origin: forecasts[0].date,
        last_origin: forecasts[forecasts.len() - 1].date,
        forecasts,
        population_beta: pop,
    })
}
