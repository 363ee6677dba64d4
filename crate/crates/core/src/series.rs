//! Monthly return ingestion and the overlapping annual panel built from it.
//!
//! A monthly row carries the gross total return `R(t)`, the gross price-only
//! return `X(t)`, the index level `P_t` and the gross risk-free return. The
//! implied dividend paid in month `t` is `D(t) = (R(t)/X(t) - 1) P_t`, and
//! every month with twelve months of history yields one overlapping annual
//! observation.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Months between consecutive annual observations.
pub const MONTHS_PER_YEAR: usize = 12;

/// Relative tolerance for `P_t = P_{t-1} X(t)` when both are supplied.
pub const PRICE_CHAIN_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct YearMonth {
    pub year: i32,
    /// 1..=12
    pub month: u32,
}

impl YearMonth {
    pub fn new(year: i32, month: u32) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::InvalidArgument(format!("month {month} out of range")));
        }
        Ok(Self { year, month })
    }

    pub fn next(self) -> Self {
        if self.month == 12 {
            Self { year: self.year + 1, month: 1 }
        } else {
            Self { year: self.year, month: self.month + 1 }
        }
    }

    /// Signed number of months from `other` to `self`.
    pub fn months_since(self, other: Self) -> i64 {
        (self.year as i64 - other.year as i64) * 12 + self.month as i64 - other.month as i64
    }

    pub fn plus_months(self, n: i64) -> Self {
        let idx = self.year as i64 * 12 + (self.month as i64 - 1) + n;
        Self { year: idx.div_euclid(12) as i32, month: (idx.rem_euclid(12) + 1) as u32 }
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for YearMonth {
    type Err = Error;

    /// Accepts `YYYYMM`, `YYYY-MM` and `YYYY-MM-DD`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidArgument(format!("unrecognised date `{s}`"));
        let (y, m) = if s.len() == 6 && s.bytes().all(|b| b.is_ascii_digit()) {
            (&s[..4], &s[4..])
        } else if s.len() >= 7 && s.as_bytes()[4] == b'-' {
            (&s[..4], &s[5..7])
        } else {
            return Err(bad());
        };
        let year: i32 = y.parse().map_err(|_| bad())?;
        let month: u32 = m.parse().map_err(|_| bad())?;
        Self::new(year, month).map_err(|_| bad())
    }
}

impl TryFrom<String> for YearMonth {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<YearMonth> for String {
    fn from(ym: YearMonth) -> String {
        ym.to_string()
    }
}

/// Where the index levels of a series came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PriceSource {
    Supplied,
    /// Chained from ex-dividend returns through one anchor row.
    Reconstructed { anchor_row: usize, anchor_level: f64 },
}

/// Rate at which intra-year dividends are reinvested when forming `D*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReinvestmentRate {
    /// Gross total market return `R(k)`.
    #[default]
    TotalReturn,
    /// Gross price-only return `X(k)`.
    PriceReturn,
}

/// Column names and conventions of a monthly input file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ColumnSchema {
    pub date: String,
    pub total_return: String,
    pub exdiv_return: String,
    /// Optional index level column; levels are rebuilt from ex-dividend returns when absent.
    pub price_level: Option<String>,
    pub risk_free: String,
    /// Returns are stored net (`0.01`) rather than gross (`1.01`).
    pub net_returns: bool,
    /// Use only the first supplied level and chain the rest from ex-dividend returns.
    pub price_anchor_only: bool,
}

impl Default for ColumnSchema {
    fn default() -> Self {
        Self::simple()
    }
}

impl ColumnSchema {
    /// `date, R, X, P, rf` with gross returns.
    pub fn simple() -> Self {
        Self {
            date: "date".into(),
            total_return: "R".into(),
            exdiv_return: "X".into(),
            price_level: Some("P".into()),
            risk_free: "rf".into(),
            net_returns: false,
            price_anchor_only: false,
        }
    }

    /// Layout of the Goyal-Welch monthly predictor file (net CRSP value-weighted returns).
    pub fn goyal_welch() -> Self {
        Self {
            date: "yyyymm".into(),
            total_return: "CRSP_SPvw".into(),
            exdiv_return: "CRSP_SPvwx".into(),
            price_level: None,
            risk_free: "Rfree".into(),
            net_returns: true,
            price_anchor_only: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonthlyRecord<T> {
    pub date: YearMonth,
    /// Gross total return `R(t)`.
    pub total_return: T,
    /// Gross price-only return `X(t)`.
    pub exdiv_return: T,
    /// Index level `P_t`.
    pub price_level: T,
    /// Gross monthly risk-free return.
    pub risk_free: T,
}

impl<T: Scalar> MonthlyRecord<T> {
    pub fn implied_dividend(&self) -> Result<T> {
        implied_monthly_dividend(self)
    }
}

/// `D(t) = (R(t)/X(t) - 1) P_t`.
pub fn implied_monthly_dividend<T: Scalar>(record: &MonthlyRecord<T>) -> Result<T> {
    if !(record.exdiv_return > T::zero()) || !(record.price_level > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "{}: ex-dividend return and price level must be positive",
            record.date
        )));
    }
    if record.total_return < record.exdiv_return {
        return Err(Error::NegativeDividend {
            row: 0,
            total: record.total_return.as_f64(),
            exdiv: record.exdiv_return.as_f64(),
        });
    }
    Ok((record.total_return / record.exdiv_return - T::one()) * record.price_level)
}

/// Contiguous, time-ordered monthly records.
#[derive(Debug, Clone)]
pub struct MonthlySeries<T> {
    records: Vec<MonthlyRecord<T>>,
    price_source: PriceSource,
}

impl<T: Scalar> MonthlySeries<T> {
    /// Validates contiguity, positivity and non-negative dividends.
    pub fn new(records: Vec<MonthlyRecord<T>>, price_source: PriceSource) -> Result<Self> {
        for (row, pair) in records.windows(2).enumerate() {
            let (prev, cur) = (pair[0].date, pair[1].date);
            if cur <= prev {
                return Err(Error::NonMonotoneDate { row: row + 1, date: cur.to_string() });
            }
            if cur != prev.next() {
                return Err(Error::DateGap {
                    row: row + 1,
                    expected: prev.next().to_string(),
                    found: cur.to_string(),
                });
            }
        }
        for (row, rec) in records.iter().enumerate() {
            for (column, value) in [
                ("total_return", rec.total_return),
                ("exdiv_return", rec.exdiv_return),
                ("price_level", rec.price_level),
                ("risk_free", rec.risk_free),
            ] {
                if !(value > T::zero()) || !value.is_finite() {
                    return Err(Error::NonPositive {
                        row,
                        column: column.into(),
                        value: value.as_f64(),
                    });
                }
            }
            if rec.total_return < rec.exdiv_return {
                return Err(Error::NegativeDividend {
                    row,
                    total: rec.total_return.as_f64(),
                    exdiv: rec.exdiv_return.as_f64(),
                });
            }
        }
        Ok(Self { records, price_source })
    }

    /// Builds a series whose levels are chained from ex-dividend returns, anchored at `anchor`.
    pub fn from_returns(
        start: YearMonth,
        total: &[T],
        exdiv: &[T],
        risk_free: &[T],
        anchor: T,
    ) -> Result<Self> {
        if total.len() != exdiv.len() || total.len() != risk_free.len() {
            return Err(Error::DimensionMismatch("return columns of unequal length".into()));
        }
        let mut date = start;
        let mut level = anchor;
        let mut records = Vec::with_capacity(total.len());
        for i in 0..total.len() {
            if i > 0 {
                level = level * exdiv[i];
                date = date.next();
            }
            records.push(MonthlyRecord {
                date,
                total_return: total[i],
                exdiv_return: exdiv[i],
                price_level: level,
                risk_free: risk_free[i],
            });
        }
        Self::new(records, PriceSource::Reconstructed { anchor_row: 0, anchor_level: anchor.as_f64() })
    }

    pub fn records(&self) -> &[MonthlyRecord<T>] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn span(&self) -> Option<(YearMonth, YearMonth)> {
        Some((self.records.first()?.date, self.records.last()?.date))
    }

    pub fn price_source(&self) -> PriceSource {
        self.price_source
    }

    pub fn dividends(&self) -> Vec<T> {
        self.records
            .iter()
            .map(|r| (r.total_return / r.exdiv_return - T::one()) * r.price_level)
            .collect()
    }

    fn check_history(&self, t: usize) -> Result<()> {
        if t + 1 < MONTHS_PER_YEAR || t >= self.records.len() {
            return Err(Error::InsufficientData {
                needed: MONTHS_PER_YEAR,
                got: (t + 1).min(self.records.len()),
                context: "annual dividend window".into(),
            });
        }
        Ok(())
    }
}

/// Twelve-month summed dividend `D_t = Σ_{i=0..11} D(t-i)`, `t` a row index.
pub fn annual_dividend_summed<T: Scalar>(series: &MonthlySeries<T>, t: usize) -> Result<T> {
    series.check_history(t)?;
    let mut total = T::zero();
    for rec in &series.records[t + 1 - MONTHS_PER_YEAR..=t] {
        total = total + implied_monthly_dividend(rec)?;
    }
    Ok(total)
}

/// Twelve-month dividend with each payment compounded to month `t`:
/// `D*_t = Σ_{i=0..11} D(t-i) Π_{k=t-i+1..t} g(k)` with `g` the reinvestment return.
pub fn annual_dividend_reinvested<T: Scalar>(
    series: &MonthlySeries<T>,
    t: usize,
    rate: ReinvestmentRate,
) -> Result<T> {
    series.check_history(t)?;
    let mut acc = T::zero();
    for rec in &series.records[t + 1 - MONTHS_PER_YEAR..=t] {
        let growth = match rate {
            ReinvestmentRate::TotalReturn => rec.total_return,
            ReinvestmentRate::PriceReturn => rec.exdiv_return,
        };
        acc = acc * growth + implied_monthly_dividend(rec)?;
    }
    Ok(acc)
}

/// Named columns of an [`AnnualPanel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PanelField {
    D,
    DStar,
    P,
    R,
    Re,
    Rf,
    GrowthD,
    GrowthDStar,
}

/// Overlapping annual log series, one row per month with twelve months of history.
#[derive(Debug, Clone)]
pub struct AnnualPanel<T> {
    pub dates: Vec<YearMonth>,
    /// log summed annual dividend
    pub d: Vec<T>,
    /// log reinvested annual dividend
    pub dstar: Vec<T>,
    /// log price
    pub p: Vec<T>,
    /// annual log total return
    pub r: Vec<T>,
    /// annual log equity premium
    pub re: Vec<T>,
    /// annual log risk-free return
    pub rf: Vec<T>,
    /// `d_t - d_{t-12}`; absent for the first year of the panel
    pub growth_d: Vec<Option<T>>,
    pub growth_dstar: Vec<Option<T>>,
    pub reinvestment: ReinvestmentRate,
    pub price_source: PriceSource,
}

impl<T: Scalar> AnnualPanel<T> {
    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn index_of(&self, date: YearMonth) -> Option<usize> {
        let first = *self.dates.first()?;
        let idx = date.months_since(first);
        (idx >= 0 && (idx as usize) < self.len()).then_some(idx as usize)
    }

    pub fn value(&self, field: PanelField, t: usize) -> Option<T> {
        match field {
            PanelField::D => self.d.get(t).copied(),
            PanelField::DStar => self.dstar.get(t).copied(),
            PanelField::P => self.p.get(t).copied(),
            PanelField::R => self.r.get(t).copied(),
            PanelField::Re => self.re.get(t).copied(),
            PanelField::Rf => self.rf.get(t).copied(),
            PanelField::GrowthD => self.growth_d.get(t).copied().flatten(),
            PanelField::GrowthDStar => self.growth_dstar.get(t).copied().flatten(),
        }
    }

    /// `d_t - p_t`
    pub fn dp(&self) -> Vec<T> {
        self.d.iter().zip(&self.p).map(|(&d, &p)| d - p).collect()
    }

    /// `d*_t - p_t`
    pub fn dstar_p(&self) -> Vec<T> {
        self.dstar.iter().zip(&self.p).map(|(&d, &p)| d - p).collect()
    }

    /// Copy of rows `range` (dates stay attached).
    pub fn slice(&self, range: std::ops::Range<usize>) -> Self {
        let growth = |v: &Vec<Option<T>>| v[range.clone()].to_vec();
        Self {
            dates: self.dates[range.clone()].to_vec(),
            d: self.d[range.clone()].to_vec(),
            dstar: self.dstar[range.clone()].to_vec(),
            p: self.p[range.clone()].to_vec(),
            r: self.r[range.clone()].to_vec(),
            re: self.re[range.clone()].to_vec(),
            rf: self.rf[range.clone()].to_vec(),
            growth_d: growth(&self.growth_d),
            growth_dstar: growth(&self.growth_dstar),
            reinvestment: self.reinvestment,
            price_source: self.price_source,
        }
    }
}

/// Builds the overlapping annual panel; needs at least 24 months.
pub fn build_annual_panel<T: Scalar>(
    series: &MonthlySeries<T>,
    rate: ReinvestmentRate,
) -> Result<AnnualPanel<T>> {
    let n = series.len();
    if n < 2 * MONTHS_PER_YEAR {
        return Err(Error::InsufficientData {
            needed: 2 * MONTHS_PER_YEAR,
            got: n,
            context: "annual panel".into(),
        });
    }
    let recs = series.records();
    let rows = n + 1 - MONTHS_PER_YEAR;
    let mut panel = AnnualPanel {
        dates: Vec::with_capacity(rows),
        d: Vec::with_capacity(rows),
        dstar: Vec::with_capacity(rows),
        p: Vec::with_capacity(rows),
        r: Vec::with_capacity(rows),
        re: Vec::with_capacity(rows),
        rf: Vec::with_capacity(rows),
        growth_d: Vec::with_capacity(rows),
        growth_dstar: Vec::with_capacity(rows),
        reinvestment: rate,
        price_source: series.price_source(),
    };
    for t in MONTHS_PER_YEAR - 1..n {
        let summed = annual_dividend_summed(series, t)?;
        let reinvested = annual_dividend_reinvested(series, t, rate)?;
        if !(summed > T::zero()) || !(reinvested > T::zero()) {
            return Err(Error::Degenerate(format!(
                "zero annual dividend in the year ending {}",
                recs[t].date
            )));
        }
        let window = &recs[t + 1 - MONTHS_PER_YEAR..=t];
        let r_sum: T = window.iter().map(|x| x.total_return.ln()).sum();
        let rf_sum: T = window.iter().map(|x| x.risk_free.ln()).sum();
        let re = r_sum - rf_sum;
        panel.dates.push(recs[t].date);
        panel.d.push(summed.ln());
        panel.dstar.push(reinvested.ln());
        panel.p.push(recs[t].price_level.ln());
        // r is rebuilt from its parts so that r = re + rf holds exactly.
        panel.r.push(re + rf_sum);
        panel.re.push(re);
        panel.rf.push(rf_sum);
    }
    for j in 0..rows {
        if j >= MONTHS_PER_YEAR {
            panel.growth_d.push(Some(panel.d[j] - panel.d[j - MONTHS_PER_YEAR]));
            panel.growth_dstar.push(Some(panel.dstar[j] - panel.dstar[j - MONTHS_PER_YEAR]));
        } else {
            panel.growth_d.push(None);
            panel.growth_dstar.push(None);
        }
    }
    Ok(panel)
}

/// `Σ_{j=1..h} ρ^{j-1} x_{t+12j}`; `rho = None` is the plain sum.
pub fn forward_sum<T: Scalar>(values: &[T], t: usize, h: usize, rho: Option<T>) -> Option<T> {
    if h == 0 || t + MONTHS_PER_YEAR * h >= values.len() {
        return None;
    }
    let mut weight = T::one();
    let mut total = T::zero();
    for j in 1..=h {
        total = total + weight * values[t + MONTHS_PER_YEAR * j];
        if let Some(rho) = rho {
            weight = weight * rho;
        }
    }
    Some(total)
}

/// Unweighted or discount-weighted `h`-year forward sum of a panel column from row `t`.
pub fn horizon_aggregate<T: Scalar>(
    panel: &AnnualPanel<T>,
    field: PanelField,
    t: usize,
    h: usize,
    rho: Option<T>,
) -> Result<T> {
    if h == 0 {
        return Err(Error::InvalidArgument("horizon must be at least one year".into()));
    }
    if t + MONTHS_PER_YEAR * h >= panel.len() {
        return Err(Error::HorizonExceedsSample { index: t, horizon: h, len: panel.len() });
    }
    let mut weight = T::one();
    let mut total = T::zero();
    for j in 1..=h {
        let idx = t + MONTHS_PER_YEAR * j;
        let x = panel.value(field, idx).ok_or_else(|| {
            Error::EmptySample(format!("{field:?} undefined at {}", panel.dates[idx]))
        })?;
        total = total + weight * x;
        if let Some(rho) = rho {
            weight = weight * rho;
        }
    }
    Ok(total)
}

/// Reads a monthly CSV file.
pub fn load_monthly_csv<T: Scalar>(path: &Path, schema: &ColumnSchema) -> Result<MonthlySeries<T>> {
    load_monthly_csv_between(path, schema, None, None)
}

/// Reads a monthly CSV file keeping only rows dated within `[start, end]`.
pub fn load_monthly_csv_between<T: Scalar>(
    path: &Path,
    schema: &ColumnSchema,
    start: Option<YearMonth>,
    end: Option<YearMonth>,
) -> Result<MonthlySeries<T>> {
    let file = std::fs::File::open(path)
        .map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    read_monthly_csv(file, schema, start, end)
}

/// Reader-based variant of [`load_monthly_csv_between`]; row numbers in errors
/// count data rows from zero after the window filter.
pub fn read_monthly_csv<T: Scalar, R: std::io::Read>(
    reader: R,
    schema: &ColumnSchema,
    start: Option<YearMonth>,
    end: Option<YearMonth>,
) -> Result<MonthlySeries<T>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let date_col = col(&schema.date)?;
    let total_col = col(&schema.total_return)?;
    let exdiv_col = col(&schema.exdiv_return)?;
    let rf_col = col(&schema.risk_free)?;
    let price_col = schema.price_level.as_deref().map(col).transpose()?;
    let offset = if schema.net_returns { 1.0 } else { 0.0 };

    struct Raw {
        date: YearMonth,
        total: f64,
        exdiv: f64,
        rf: f64,
        price: Option<f64>,
    }
    let mut raw = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let row = raw.len();
        let cell = |i: usize| rec.get(i).unwrap_or("");
        let date: YearMonth = cell(date_col).parse().map_err(|_| Error::Parse {
            row,
            column: schema.date.clone(),
            value: cell(date_col).to_string(),
        })?;
        if start.is_some_and(|s| date < s) || end.is_some_and(|e| date > e) {
            continue;
        }
        let number = |i: usize, name: &str| -> Result<f64> {
            cell(i)
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Parse {
                    row,
                    column: name.to_string(),
                    value: cell(i).to_string(),
                })
        };
        let price = match price_col {
            Some(i) => cell(i).parse::<f64>().ok().filter(|v| v.is_finite()),
            None => None,
        };
        raw.push(Raw {
            date,
            total: number(total_col, &schema.total_return)? + offset,
            exdiv: number(exdiv_col, &schema.exdiv_return)? + offset,
            rf: number(rf_col, &schema.risk_free)? + offset,
            price,
        });
    }
    if raw.len() < 2 * MONTHS_PER_YEAR {
        return Err(Error::InsufficientData {
            needed: 2 * MONTHS_PER_YEAR,
            got: raw.len(),
            context: "monthly rows".into(),
        });
    }
    for (row, r) in raw.iter().enumerate() {
        for (column, value) in [
            (&schema.total_return, r.total),
            (&schema.exdiv_return, r.exdiv),
            (&schema.risk_free, r.rf),
        ] {
            if value <= 0.0 {
                return Err(Error::NonPositive { row, column: column.clone(), value });
            }
        }
        if let Some(p) = r.price {
            if p <= 0.0 {
                let column = schema.price_level.clone().unwrap_or_default();
                return Err(Error::NonPositive { row, column, value: p });
            }
        }
    }

    let all_supplied = raw.iter().all(|r| r.price.is_some());
    let (levels, source) = if all_supplied && !schema.price_anchor_only {
        for row in 1..raw.len() {
            let (prev, cur) = (raw[row - 1].price.unwrap(), raw[row].price.unwrap());
            let rel = (cur / (prev * raw[row].exdiv) - 1.0).abs();
            if rel > PRICE_CHAIN_TOLERANCE {
                return Err(Error::InconsistentPrice { row, rel_error: rel });
            }
        }
        (raw.iter().map(|r| r.price.unwrap()).collect::<Vec<_>>(), PriceSource::Supplied)
    } else {
        let (anchor_row, anchor_level) = raw
            .iter()
            .enumerate()
            .find_map(|(i, r)| r.price.map(|p| (i, p)))
            .unwrap_or((0, 1.0));
        let mut levels = vec![0.0; raw.len()];
        levels[anchor_row] = anchor_level;
        for i in anchor_row + 1..raw.len() {
            levels[i] = levels[i - 1] * raw[i].exdiv;
        }
        for i in (0..anchor_row).rev() {
            levels[i] = levels[i + 1] / raw[i + 1].exdiv;
        }
        (levels, PriceSource::Reconstructed { anchor_row, anchor_level })
    };

    let records = raw
        .iter()
        .zip(levels)
        .map(|(r, level)| MonthlyRecord {
            date: r.date,
            total_return: T::of(r.total),
            exdiv_return: T::of(r.exdiv),
            price_level: T::of(level),
            risk_free: T::of(r.rf),
        })
        .collect();
    MonthlySeries::new(records, source)
}
