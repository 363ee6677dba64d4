//! Long-horizon forecasting regressions and the Campbell-Shiller decomposition.
//!
//! Targets are `h`-year forward sums on the overlapping monthly panel. With
//! [`Sampling::Annual`] only December forecast dates enter the regression.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::ratios::RatioPanel;
use crate::scalar::{mean, median, std_dev, Scalar};
use crate::series::{forward_sum, AnnualPanel, YearMonth, MONTHS_PER_YEAR};
use crate::stats::{hac_covariance, ols, HacKernel};

/// Discount weight read off the auto-term column headers.
pub const DEFAULT_RHO: f64 = 0.96;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    R,
    Re,
    Rf,
    GrowthD,
    /// `Σ ρ^{j-1} r_{t+j}`
    WeightedR,
    /// `Σ ρ^{j-1} Δd*_{t+j}`
    WeightedG,
    WeightedRe,
    WeightedRf,
    /// `ρ^h d*p_{t+h}`
    AutoTerm,
}

impl Target {
    pub fn needs_rho(self) -> bool {
        matches!(
            self,
            Target::WeightedR | Target::WeightedG | Target::WeightedRe | Target::WeightedRf | Target::AutoTerm
        )
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::R => "r",
            Target::Re => "re",
            Target::Rf => "rf",
            Target::GrowthD => "dd",
            Target::WeightedR => "wr",
            Target::WeightedG => "wg",
            Target::WeightedRe => "wre",
            Target::WeightedRf => "wrf",
            Target::AutoTerm => "auto",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Predictor {
    Dp,
    DStarP,
    Mdp,
    MdpPrime,
}

impl Predictor {
    pub fn series<'a, T>(self, ratios: &'a RatioPanel<T>) -> &'a [T] {
        match self {
            Predictor::Dp => &ratios.dp,
            Predictor::DStarP => &ratios.dstar_p,
            Predictor::Mdp => &ratios.mdp,
            Predictor::MdpPrime => &ratios.mdp_prime,
        }
    }

    pub fn is_modified(self) -> bool {
        matches!(self, Predictor::Mdp | Predictor::MdpPrime)
    }
}

impl fmt::Display for Predictor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Predictor::Dp => "dp",
            Predictor::DStarP => "d*p",
            Predictor::Mdp => "mdp",
            Predictor::MdpPrime => "mdp'",
        })
    }
}

/// Forecast dates `t` with `start ≤ t` and `t + 12h ≤ end`; open ends follow the panel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SampleWindow {
    pub start: Option<YearMonth>,
    pub end: Option<YearMonth>,
}

impl SampleWindow {
    pub fn full() -> Self {
        Self::default()
    }

    pub fn post_1965() -> Self {
        Self {
            start: Some(YearMonth { year: 1965, month: 1 }),
            end: Some(YearMonth { year: 2012, month: 12 }),
        }
    }

    /// Panel rows `[first, last]` inside the window, if any.
    pub fn rows(&self, dates: &[YearMonth]) -> Option<(usize, usize)> {
        let first = match self.start {
            Some(s) => dates.iter().position(|&d| d >= s)?,
            None => 0,
        };
        let last = match self.end {
            Some(e) => dates.iter().rposition(|&d| d <= e)?,
            None => dates.len().checked_sub(1)?,
        };
        (first <= last).then_some((first, last))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    #[default]
    Overlapping,
    /// December observations only.
    Annual,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "rule", content = "lag")]
pub enum LagRule {
    /// MA order of the overlapping sum: `12h - 1` monthly, `h - 1` annual.
    #[default]
    Overlap,
    Fixed(usize),
}

impl LagRule {
    pub fn lag(self, horizon: usize, sampling: Sampling) -> usize {
        match (self, sampling) {
            (LagRule::Fixed(l), _) => l,
            (LagRule::Overlap, Sampling::Overlapping) => MONTHS_PER_YEAR * horizon - 1,
            (LagRule::Overlap, Sampling::Annual) => horizon.saturating_sub(1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HacConfig {
    pub kernel: HacKernel,
    pub lag_rule: LagRule,
}

impl Default for HacConfig {
    fn default() -> Self {
        Self { kernel: HacKernel::HansenHodrick, lag_rule: LagRule::Overlap }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionSpec<T> {
    pub target: Target,
    pub horizon: usize,
    pub predictors: Vec<Predictor>,
    pub window: SampleWindow,
    pub rho: Option<T>,
    pub sampling: Sampling,
    pub hac: HacConfig,
}

impl<T: Scalar> RegressionSpec<T> {
    pub fn new(target: Target, horizon: usize, predictors: &[Predictor]) -> Self {
        Self {
            target,
            horizon,
            predictors: predictors.to_vec(),
            window: SampleWindow::full(),
            rho: None,
            sampling: Sampling::Overlapping,
            hac: HacConfig::default(),
        }
    }

    pub fn window(mut self, window: SampleWindow) -> Self {
        self.window = window;
        self
    }

    pub fn rho(mut self, rho: T) -> Self {
        self.rho = Some(rho);
        self
    }

    pub fn sampling(mut self, sampling: Sampling) -> Self {
        self.sampling = sampling;
        self
    }

    pub fn hac(mut self, hac: HacConfig) -> Self {
        self.hac = hac;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::InvalidArgument("horizon must be at least one year".into()));
        }
        if self.predictors.is_empty() {
            return Err(Error::InvalidArgument("no predictors given".into()));
        }
        if self.target.needs_rho() && self.rho.is_none() {
            return Err(Error::InvalidArgument(format!("target {} needs a discount weight", self.target)));
        }
        Ok(())
    }
}

/// Panel plus aligned ratios.
#[derive(Debug, Clone, Copy)]
pub struct PredictabilityData<'a, T> {
    pub panel: &'a AnnualPanel<T>,
    pub ratios: &'a RatioPanel<T>,
}

impl<'a, T: Scalar> PredictabilityData<'a, T> {
    pub fn new(panel: &'a AnnualPanel<T>, ratios: &'a RatioPanel<T>) -> Result<Self> {
        if panel.dates != ratios.dates {
            return Err(Error::DimensionMismatch("ratio panel dates differ from the annual panel".into()));
        }
        Ok(Self { panel, ratios })
    }

    /// Target value at forecast row `t`, `None` when the horizon runs past the panel.
    pub fn target_value(&self, target: Target, t: usize, h: usize, rho: Option<T>) -> Option<T> {
        let p = self.panel;
        match target {
            Target::R => forward_sum(&p.r, t, h, None),
            Target::Re => forward_sum(&p.re, t, h, None),
            Target::Rf => forward_sum(&p.rf, t, h, None),
            Target::GrowthD => optional_forward_sum(&p.growth_d, t, h, None),
            Target::WeightedR => forward_sum(&p.r, t, h, rho),
            Target::WeightedG => optional_forward_sum(&p.growth_dstar, t, h, rho),
            Target::WeightedRe => forward_sum(&p.re, t, h, rho),
            Target::WeightedRf => forward_sum(&p.rf, t, h, rho),
            Target::AutoTerm => {
                let idx = t + MONTHS_PER_YEAR * h;
                let x = *self.ratios.dstar_p.get(idx)?;
                Some(rho?.powi(h as i32) * x)
            }
        }
    }
}

fn optional_forward_sum<T: Scalar>(values: &[Option<T>], t: usize, h: usize, rho: Option<T>) -> Option<T> {
    if h == 0 || t + MONTHS_PER_YEAR * h >= values.len() {
        return None;
    }
    let mut weight = T::one();
    let mut total = T::zero();
    for j in 1..=h {
        total = total + weight * values[t + MONTHS_PER_YEAR * j]?;
        if let Some(rho) = rho {
            weight = weight * rho;
        }
    }
    Some(total)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictorEstimate<T> {
    pub predictor: Predictor,
    pub slope: T,
    pub se: T,
    pub t_stat: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult<T> {
    pub spec: RegressionSpec<T>,
    pub intercept: T,
    pub estimates: Vec<PredictorEstimate<T>>,
    pub r_squared: T,
    pub n_obs: usize,
    pub hac_lag: usize,
    /// Kernel actually used.
    pub hac_kernel: HacKernel,
    pub hac_fallback: bool,
    pub first_date: YearMonth,
    pub last_date: YearMonth,
}

impl<T: Scalar> RegressionResult<T> {
    pub fn estimate(&self, predictor: Predictor) -> Option<&PredictorEstimate<T>> {
        self.estimates.iter().find(|e| e.predictor == predictor)
    }

    pub fn slope(&self, predictor: Predictor) -> Option<T> {
        self.estimate(predictor).map(|e| e.slope)
    }
}

/// Forecast rows used by `spec`.
pub fn sample_rows<T: Scalar>(data: &PredictabilityData<'_, T>, spec: &RegressionSpec<T>) -> Vec<usize> {
    let dates = &data.panel.dates;
    let Some((first, last)) = spec.window.rows(dates) else {
        return Vec::new();
    };
    let span = MONTHS_PER_YEAR * spec.horizon;
    if last < first + span {
        return Vec::new();
    }
    (first..=last - span)
        .filter(|&t| spec.sampling == Sampling::Overlapping || dates[t].month == 12)
        .filter(|&t| data.target_value(spec.target, t, spec.horizon, spec.rho).is_some())
        .collect()
}

/// Forecasting regression of the `h`-year target on the spec's predictors with HAC t-statistics.
pub fn run_regression<T: Scalar>(spec: &RegressionSpec<T>, data: &PredictabilityData<'_, T>) -> Result<RegressionResult<T>> {
    spec.validate()?;
    let rows = sample_rows(data, spec);
    let k = spec.predictors.len();
    if rows.len() <= k + 1 {
        return Err(Error::EmptySample(format!(
            "{}({}) on {:?}: {} usable rows",
            spec.target,
            spec.horizon,
            spec.predictors,
            rows.len()
        )));
    }
    let y: Vec<T> = rows
        .iter()
        .map(|&t| data.target_value(spec.target, t, spec.horizon, spec.rho).expect("filtered rows"))
        .collect();
    let columns: Vec<&[T]> = spec.predictors.iter().map(|p| p.series(data.ratios)).collect();
    let x = Matrix::from_fn(rows.len(), k, |i, j| columns[j][rows[i]]);
    let fit = ols(&y, &x, true)?;
    let lag = spec.hac.lag_rule.lag(spec.horizon, spec.sampling);
    let hac = hac_covariance(&fit, &x, spec.hac.kernel, lag)?;
    let se = hac.standard_errors();
    let estimates = spec
        .predictors
        .iter()
        .enumerate()
        .map(|(j, &predictor)| PredictorEstimate {
            predictor,
            slope: fit.coefficients[j + 1],
            se: se[j + 1],
            t_stat: fit.coefficients[j + 1] / se[j + 1],
        })
        .collect();
    Ok(RegressionResult {
        spec: spec.clone(),
        intercept: fit.coefficients[0],
        estimates,
        r_squared: fit.r_squared,
        n_obs: fit.n_obs,
        hac_lag: lag,
        hac_kernel: hac.kernel,
        hac_fallback: hac.fallback,
        first_date: data.panel.dates[rows[0]],
        last_date: data.panel.dates[*rows.last().expect("non-empty")],
    })
}

/// [`run_regression`] for two or more predictors.
pub fn run_multivariate<T: Scalar>(spec: &RegressionSpec<T>, data: &PredictabilityData<'_, T>) -> Result<RegressionResult<T>> {
    if spec.predictors.len() < 2 {
        return Err(Error::InvalidArgument("multivariate regression needs at least two predictors".into()));
    }
    run_regression(spec, data)
}

/// Template for the decomposition regressions; target and horizon are overwritten.
#[derive(Debug, Clone, PartialEq)]
pub struct CsSettings<T> {
    pub rho: T,
    pub predictors: Vec<Predictor>,
    pub window: SampleWindow,
    pub sampling: Sampling,
    pub hac: HacConfig,
}

impl<T: Scalar> CsSettings<T> {
    fn spec(&self, target: Target, h: usize) -> RegressionSpec<T> {
        RegressionSpec {
            target,
            horizon: h,
            predictors: self.predictors.clone(),
            window: self.window,
            rho: Some(self.rho),
            sampling: self.sampling,
            hac: self.hac,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeSum<T> {
    pub predictor: Predictor,
    /// `b_r - b_g + b_u`
    pub sum: T,
    /// One for `d*p`, which the identity loads on, zero otherwise.
    pub expected: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsDecomposition<T> {
    pub horizon: usize,
    pub rho: T,
    pub wr: RegressionResult<T>,
    pub wg: RegressionResult<T>,
    pub auto: RegressionResult<T>,
    pub slope_sums: Vec<SlopeSum<T>>,
}

/// Regressions of `wr`, `wg` and the auto term on the same predictors, plus slope sums.
pub fn cs_decomposition<T: Scalar>(
    data: &PredictabilityData<'_, T>,
    h: usize,
    settings: &CsSettings<T>,
) -> Result<CsDecomposition<T>> {
    let wr = run_regression(&settings.spec(Target::WeightedR, h), data)?;
    let wg = run_regression(&settings.spec(Target::WeightedG, h), data)?;
    let auto = run_regression(&settings.spec(Target::AutoTerm, h), data)?;
    let slope_sums = settings
        .predictors
        .iter()
        .enumerate()
        .map(|(j, &predictor)| SlopeSum {
            predictor,
            sum: wr.estimates[j].slope - wg.estimates[j].slope + auto.estimates[j].slope,
            expected: if predictor == Predictor::DStarP { T::one() } else { T::zero() },
        })
        .collect();
    Ok(CsDecomposition { horizon: h, rho: settings.rho, wr, wg, auto, slope_sums })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsBreakdown<T> {
    pub horizon: usize,
    pub wre: RegressionResult<T>,
    pub wrf: RegressionResult<T>,
}

/// Splits the weighted-return slopes into equity-premium and risk-free parts.
pub fn cs_breakdown<T: Scalar>(data: &PredictabilityData<'_, T>, h: usize, settings: &CsSettings<T>) -> Result<CsBreakdown<T>> {
    Ok(CsBreakdown {
        horizon: h,
        wre: run_regression(&settings.spec(Target::WeightedRe, h), data)?,
        wrf: run_regression(&settings.spec(Target::WeightedRf, h), data)?,
    })
}

/// `d*p_t - (wr_t(h) - wg_t(h) + ρ^h d*p_{t+h})`, net of its sample mean.
///
/// The mean is the linearisation constant, which the ex-post identity leaves out.
pub fn cs_identity_residuals<T: Scalar>(data: &PredictabilityData<'_, T>, h: usize, rho: T) -> Vec<T> {
    let dsp = &data.ratios.dstar_p;
    let raw: Vec<T> = (0..dsp.len())
        .filter_map(|t| {
            let wr = data.target_value(Target::WeightedR, t, h, Some(rho))?;
            let wg = data.target_value(Target::WeightedG, t, h, Some(rho))?;
            let auto = data.target_value(Target::AutoTerm, t, h, Some(rho))?;
            Some(dsp[t] - (wr - wg + auto))
        })
        .collect();
    let m = mean(&raw);
    raw.into_iter().map(|x| x - m).collect()
}

/// Median of `|residual| / std(d*p)` over the identity residuals.
pub fn cs_identity_relative_error<T: Scalar>(data: &PredictabilityData<'_, T>, h: usize, rho: T) -> T {
    let resid = cs_identity_residuals(data, h, rho);
    let scale = std_dev(&data.ratios.dstar_p);
    let rel: Vec<T> = resid.iter().map(|r| r.abs() / scale).collect();
    median(&rel)
}

/// `ρ = 1 / (1 + exp(mean dp))`
pub fn conventional_rho<T: Scalar>(dp: &[T]) -> T {
    T::one() / (T::one() + mean(dp).exp())
}
