//! Data loading and the per-panel cointegration coefficients shared by all tables.

use mdp_core::johansen::{vecm_fit, VecmDeterministic};
use mdp_core::linalg::Matrix;
use mdp_core::predictability::SampleWindow;
use mdp_core::ratios::{build_ratios, estimate_beta, BetaProvenance, Engine};
use mdp_core::series::{build_annual_panel, load_monthly_csv_between, PriceSource};
use mdp_core::simulate::{rng, SyntheticMarket};
use mdp_core::stats::select_var_lag;
use mdp_core::{AnnualPanel, MonthlySeries, RatioPanel, VecmFit};

use crate::config::{PanelId, RunConfig};
use crate::error::{CliError, Context};

/// Largest VAR order tried by Hannan-Quinn.
pub const MAX_VAR_ORDER: usize = 12;

/// RNG stream for the synthetic market, kept apart from the selftest streams.
const SYNTHETIC_STREAM: u64 = 7;

#[derive(Debug, Clone)]
pub struct PanelContext {
    pub id: PanelId,
    pub window: SampleWindow,
    /// Panel rows `[first, last]` of the window.
    pub rows: (usize, usize),
    pub vecm: VecmFit,
    pub ratios: RatioPanel,
}

impl PanelContext {
    pub fn label(&self) -> String {
        let (a, b) = self.rows;
        format!("Panel {}", self.id)
            + &format!(" ({}..{})", self.ratios.dates[a], self.ratios.dates[b])
    }
}

#[derive(Debug, Clone)]
pub struct Analysis {
    /// Human-readable description of the input.
    pub source: String,
    pub series: MonthlySeries,
    pub panel: AnnualPanel,
    /// Hannan-Quinn VAR order on the full panel, `None` when the lag count was given.
    pub var_order: Option<usize>,
    pub vecm_lags: usize,
    pub adl: Engine,
    pub panels: Vec<PanelContext>,
}

pub fn window_of(id: PanelId) -> SampleWindow {
    match id {
        PanelId::A => SampleWindow::full(),
        PanelId::B => SampleWindow::post_1965(),
    }
}

fn load_series(cfg: &RunConfig) -> Result<(MonthlySeries, String), CliError> {
    if cfg.synthetic {
        let months = cfg.end.months_since(cfg.start) + 1;
        let market = SyntheticMarket { start: cfg.start, months: months as usize, ..SyntheticMarket::default() };
        let series = market.series(&mut rng(cfg.seed, SYNTHETIC_STREAM)).context(|| "synthetic market".into())?;
        return Ok((series, format!("synthetic market, seed {}", cfg.seed)));
    }
    if !cfg.data.is_file() {
        return Err(CliError::MissingData(cfg.data.display().to_string()));
    }
    let schema = cfg.schema.resolve()?;
    let series = load_monthly_csv_between(&cfg.data, &schema, Some(cfg.start), Some(cfg.end))
        .context(|| format!("loading {}", cfg.data.display()))?;
    Ok((series, cfg.data.display().to_string()))
}

impl Analysis {
    pub fn load(cfg: &RunConfig) -> Result<Self, CliError> {
        let (series, source) = load_series(cfg)?;
        let panel = build_annual_panel(&series, cfg.reinvestment).context(|| "building the annual panel".into())?;
        let (var_order, vecm_lags) = match cfg.vecm_lags {
            Some(q) => (None, q),
            None => {
                let levels = Matrix::from_columns(&[&panel.d, &panel.p]).context(|| "VAR levels".into())?;
                let p = select_var_lag(&levels, MAX_VAR_ORDER).context(|| "Hannan-Quinn lag selection".into())?;
                (Some(p), p - 1)
            }
        };
        let adl = Engine::Adl { own_lags: cfg.adl_own_lags, price_lags: cfg.adl_price_lags };
        let panels = cfg
            .panels
            .iter()
            .map(|&id| panel_context(&panel, id, vecm_lags, adl))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { source, series, panel, var_order, vecm_lags, adl, panels })
    }

    pub fn johansen(&self) -> Engine {
        Engine::Johansen { lags: self.vecm_lags }
    }

    pub fn panel(&self, id: PanelId) -> Option<&PanelContext> {
        self.panels.iter().find(|p| p.id == id)
    }

    pub fn anchor_note(&self) -> String {
        match self.series.price_source() {
            PriceSource::Supplied => "supplied".into(),
            PriceSource::Reconstructed { anchor_row, anchor_level } => {
                format!("reconstructed from ex-dividend returns, level {anchor_level} at row {anchor_row}")
            }
        }
    }
}

fn panel_context(panel: &AnnualPanel, id: PanelId, lags: usize, adl: Engine) -> Result<PanelContext, CliError> {
    let window = window_of(id);
    let rows = window
        .rows(&panel.dates)
        .ok_or_else(|| CliError::Config(format!("panel {id} lies outside the data span")))?;
    let range = rows.0..rows.1 + 1;
    let w = Matrix::from_columns(&[&panel.d[range.clone()], &panel.p[range.clone()]])
        .context(|| format!("panel {id} levels"))?;
    let vecm = vecm_fit(&w, lags, VecmDeterministic::ConstantInRelation).context(|| format!("panel {id} VECM"))?;
    let beta_prime = estimate_beta(panel, range, adl).context(|| format!("panel {id} ADL long-run solution"))?;
    let ratios = build_ratios(panel, vecm.beta(), beta_prime.beta)
        .context(|| format!("panel {id} ratios"))?
        .with_provenance(BetaProvenance::Population);
    Ok(PanelContext { id, window, rows, vecm, ratios })
}
