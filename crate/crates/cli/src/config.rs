//! Command line, environment and file configuration, merged into one [`RunConfig`].

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use mdp_core::predictability::{LagRule, Sampling, DEFAULT_RHO};
use mdp_core::series::{ColumnSchema, ReinvestmentRate, YearMonth};
use mdp_core::stats::HacKernel;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_DATA_PATH: &str = "data/goyal_welch_monthly.csv";

#[derive(Debug, Parser)]
#[command(name = "mdp", version, about = "Dividend-price ratio cointegration and return predictability tables")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub args: ConfigArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Tables and figures selected by --tables and --figures.
    Run,
    /// Tables only.
    Tables,
    /// Figure data only.
    Figures,
    /// Monte Carlo property suites.
    Selftest,
    /// Print the resolved configuration as TOML.
    Config,
}

/// Every flag is optional so that unset flags fall through to the config file and defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// TOML file with any subset of the run configuration.
    #[arg(long, global = true, env = "MDP_CONFIG")]
    pub config: Option<PathBuf>,
    /// Monthly input CSV.
    #[arg(long, global = true, env = "MDP_DATA")]
    pub data: Option<PathBuf>,
    /// Use a seeded synthetic market instead of a data file.
    #[arg(long, global = true, env = "MDP_SYNTHETIC")]
    pub synthetic: bool,
    /// Column layout: `goyal-welch`, `simple`, or a TOML file.
    #[arg(long, global = true, env = "MDP_SCHEMA")]
    pub schema: Option<String>,
    /// First month kept from the input (YYYY-MM).
    #[arg(long, global = true, env = "MDP_START")]
    pub start: Option<YearMonth>,
    /// Last month kept from the input (YYYY-MM).
    #[arg(long, global = true, env = "MDP_END")]
    pub end: Option<YearMonth>,
    /// Comma-separated tables (1a,1b,2a,2b,2c,3,4,4b,5), `all` or `none`.
    #[arg(long, global = true, env = "MDP_TABLES")]
    pub tables: Option<String>,
    /// Comma-separated figures (1,2), `all` or `none`.
    #[arg(long, global = true, env = "MDP_FIGURES")]
    pub figures: Option<String>,
    /// Sample panels: A (full sample), B (1965-2012), or both.
    #[arg(long, global = true, env = "MDP_PANEL", value_delimiter = ',')]
    pub panel: Option<Vec<PanelId>>,
    /// Discount weight of the log-linear decomposition.
    #[arg(long, global = true, env = "MDP_RHO")]
    pub rho: Option<f64>,
    /// HAC kernel: hh (Hansen-Hodrick) or nw (Newey-West).
    #[arg(long, global = true, env = "MDP_HAC")]
    pub hac: Option<KernelArg>,
    /// HAC lag: `overlap` (12h-1 monthly, h-1 annual) or a fixed number.
    #[arg(long, global = true, env = "MDP_HAC_LAG_RULE")]
    pub hac_lag_rule: Option<LagRuleArg>,
    /// Force one sampling mode on every regression table: overlap or annual.
    #[arg(long, global = true, env = "MDP_SAMPLING")]
    pub sampling: Option<SamplingArg>,
    /// Output directory.
    #[arg(long, global = true, env = "MDP_OUT")]
    pub out: Option<PathBuf>,
    /// Seed for the Monte Carlo suites and the synthetic market.
    #[arg(long, global = true, env = "MDP_SEED")]
    pub seed: Option<u64>,
    /// Monte Carlo replications per selftest suite.
    #[arg(long, global = true, env = "MDP_REPLICATIONS")]
    pub replications: Option<usize>,
    /// VECM lagged differences; chosen by Hannan-Quinn when unset.
    #[arg(long, global = true, env = "MDP_VECM_LAGS")]
    pub vecm_lags: Option<usize>,
    /// ADL own-lag count.
    #[arg(long, global = true, env = "MDP_ADL_OWN_LAGS")]
    pub adl_own_lags: Option<usize>,
    /// ADL price-lag count.
    #[arg(long, global = true, env = "MDP_ADL_PRICE_LAGS")]
    pub adl_price_lags: Option<usize>,
    /// Initial slope-estimation years for out-of-sample forecasts.
    #[arg(long, global = true, env = "MDP_INIT_YEARS")]
    pub init_years: Option<usize>,
    /// Burn-in years of the recursive beta path in figure 2.
    #[arg(long, global = true, env = "MDP_BURN_IN_YEARS")]
    pub burn_in_years: Option<usize>,
    /// Reinvestment rate for d*: total or price.
    #[arg(long, global = true, env = "MDP_REINVEST")]
    pub reinvest: Option<ReinvestArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TableId {
    #[serde(rename = "1a")]
    T1a,
    #[serde(rename = "1b")]
    T1b,
    #[serde(rename = "2a")]
    T2a,
    #[serde(rename = "2b")]
    T2b,
    #[serde(rename = "2c")]
    T2c,
    #[serde(rename = "3")]
    T3,
    #[serde(rename = "4")]
    T4,
    #[serde(rename = "4b")]
    T4b,
    #[serde(rename = "5")]
    T5,
}

impl TableId {
    pub const ALL: [TableId; 9] = [
        TableId::T1a,
        TableId::T1b,
        TableId::T2a,
        TableId::T2b,
        TableId::T2c,
        TableId::T3,
        TableId::T4,
        TableId::T4b,
        TableId::T5,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TableId::T1a => "1a",
            TableId::T1b => "1b",
            TableId::T2a => "2a",
            TableId::T2b => "2b",
            TableId::T2c => "2c",
            TableId::T3 => "3",
            TableId::T4 => "4",
            TableId::T4b => "4b",
            TableId::T5 => "5",
        }
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TableId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim().trim_start_matches("table").to_ascii_lowercase();
        TableId::ALL.into_iter().find(|t| t.name() == s).ok_or_else(|| format!("unknown table `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum FigureId {
    #[serde(rename = "1")]
    F1,
    #[serde(rename = "2")]
    F2,
}

impl FigureId {
    pub const ALL: [FigureId; 2] = [FigureId::F1, FigureId::F2];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::F1 => "1",
            FigureId::F2 => "2",
        }
    }
}

impl FromStr for FigureId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim().trim_start_matches("figure").to_ascii_lowercase();
        FigureId::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| format!("unknown figure `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PanelId {
    A,
    B,
}

impl FromStr for PanelId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "A" | "a" => Ok(PanelId::A),
            "B" | "b" => Ok(PanelId::B),
            other => Err(format!("unknown panel `{other}` (expected A or B)")),
        }
    }
}

impl fmt::Display for PanelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PanelId::A => "A",
            PanelId::B => "B",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelArg(pub HacKernel);

impl FromStr for KernelArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "hh" | "hansen-hodrick" => Ok(KernelArg(HacKernel::HansenHodrick)),
            "nw" | "newey-west" => Ok(KernelArg(HacKernel::NeweyWest)),
            other => Err(format!("unknown HAC kernel `{other}` (expected hh or nw)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LagRuleArg(pub LagRule);

impl FromStr for LagRuleArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "overlap" => Ok(LagRuleArg(LagRule::Overlap)),
            n => n
                .parse()
                .map(|l| LagRuleArg(LagRule::Fixed(l)))
                .map_err(|_| format!("HAC lag rule must be `overlap` or a number, got `{n}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplingArg(pub Sampling);

impl FromStr for SamplingArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "overlap" | "overlapping" => Ok(SamplingArg(Sampling::Overlapping)),
            "annual" => Ok(SamplingArg(Sampling::Annual)),
            other => Err(format!("unknown sampling `{other}` (expected overlap or annual)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReinvestArg(pub ReinvestmentRate);

impl FromStr for ReinvestArg {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "total" => Ok(ReinvestArg(ReinvestmentRate::TotalReturn)),
            "price" => Ok(ReinvestArg(ReinvestmentRate::PriceReturn)),
            other => Err(format!("unknown reinvestment rate `{other}` (expected total or price)")),
        }
    }
}

/// Column layout: a preset name or an explicit schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SchemaChoice {
    Preset(String),
    Columns(ColumnSchema),
}

impl SchemaChoice {
    pub fn resolve(&self) -> Result<ColumnSchema, CliError> {
        match self {
            SchemaChoice::Columns(c) => Ok(c.clone()),
            SchemaChoice::Preset(name) => match name.as_str() {
                "goyal-welch" => Ok(ColumnSchema::goyal_welch()),
                "simple" => Ok(ColumnSchema::simple()),
                other => Err(CliError::Config(format!("unknown schema preset `{other}`"))),
            },
        }
    }
}

/// Fully resolved settings of one run; echoed into every output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub data: PathBuf,
    pub synthetic: bool,
    pub schema: SchemaChoice,
    pub start: YearMonth,
    pub end: YearMonth,
    pub tables: Vec<TableId>,
    pub figures: Vec<FigureId>,
    pub panels: Vec<PanelId>,
    pub rho: f64,
    pub hac: HacKernel,
    pub hac_lag_rule: LagRule,
    /// Overrides the sampling mode each table otherwise pins.
    pub sampling: Option<Sampling>,
    pub out: PathBuf,
    pub seed: u64,
    pub replications: usize,
    pub vecm_lags: Option<usize>,
    pub adl_own_lags: usize,
    pub adl_price_lags: usize,
    pub init_years: usize,
    pub burn_in_years: usize,
    pub reinvestment: ReinvestmentRate,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            data: PathBuf::from(DEFAULT_DATA_PATH),
            synthetic: false,
            schema: SchemaChoice::Preset("goyal-welch".into()),
            start: YearMonth { year: 1926, month: 1 },
            end: YearMonth { year: 2012, month: 12 },
            tables: TableId::ALL.to_vec(),
            figures: FigureId::ALL.to_vec(),
            panels: vec![PanelId::A, PanelId::B],
            rho: DEFAULT_RHO,
            hac: HacKernel::HansenHodrick,
            hac_lag_rule: LagRule::Overlap,
            sampling: None,
            out: PathBuf::from("out"),
            seed: 20140101,
            replications: mdp_core::selftest::DEFAULT_REPLICATIONS,
            vecm_lags: None,
            adl_own_lags: 3,
            adl_price_lags: 3,
            init_years: mdp_core::oos::DEFAULT_INIT_YEARS,
            burn_in_years: 15,
            reinvestment: ReinvestmentRate::TotalReturn,
        }
    }
}

fn parse_list<T: FromStr<Err = String> + Ord>(raw: &str, all: &[T]) -> Result<Vec<T>, CliError>
where
    T: Copy,
{
    let raw = raw.trim();
    match raw {
        "all" => return Ok(all.to_vec()),
        "" | "none" => return Ok(Vec::new()),
        _ => {}
    }
    let mut out = raw.split(',').map(|s| s.parse::<T>()).collect::<Result<Vec<T>, String>>().map_err(CliError::Config)?;
    out.sort();
    out.dedup();
    Ok(out)
}

fn read_toml<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {what} {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("invalid {what} {}: {e}", path.display())))
}

impl RunConfig {
    /// Defaults, then the config file, then flags and environment.
    pub fn resolve(command: Command, args: &ConfigArgs) -> Result<Self, CliError> {
        let mut cfg = match &args.config {
            Some(path) => read_toml::<RunConfig>(path, "config file")?,
            None => RunConfig::default(),
        };
        if let Some(v) = &args.data {
            cfg.data = v.clone();
        }
        if args.synthetic {
            cfg.synthetic = true;
        }
        if let Some(s) = &args.schema {
            cfg.schema = if s.ends_with(".toml") {
                SchemaChoice::Columns(read_toml(Path::new(s), "schema file")?)
            } else {
                SchemaChoice::Preset(s.clone())
            };
        }
        if let Some(v) = args.start {
            cfg.start = v;
        }
        if let Some(v) = args.end {
            cfg.end = v;
        }
        if let Some(v) = &args.tables {
            cfg.tables = parse_list(v, &TableId::ALL)?;
        }
        if let Some(v) = &args.figures {
            cfg.figures = parse_list(v, &FigureId::ALL)?;
        }
        if let Some(v) = &args.panel {
            let mut panels = v.clone();
            panels.sort();
            panels.dedup();
            cfg.panels = panels;
        }
        if let Some(v) = args.rho {
            cfg.rho = v;
        }
        if let Some(v) = args.hac {
            cfg.hac = v.0;
        }
        if let Some(v) = args.hac_lag_rule {
            cfg.hac_lag_rule = v.0;
        }
        if let Some(v) = args.sampling {
            cfg.sampling = Some(v.0);
        }
        if let Some(v) = &args.out {
            cfg.out = v.clone();
        }
        if let Some(v) = args.seed {
            cfg.seed = v;
        }
        if let Some(v) = args.replications {
            cfg.replications = v;
        }
        if args.vecm_lags.is_some() {
            cfg.vecm_lags = args.vecm_lags;
        }
        if let Some(v) = args.adl_own_lags {
            cfg.adl_own_lags = v;
        }
        if let Some(v) = args.adl_price_lags {
            cfg.adl_price_lags = v;
        }
        if let Some(v) = args.init_years {
            cfg.init_years = v;
        }
        if let Some(v) = args.burn_in_years {
            cfg.burn_in_years = v;
        }
        if let Some(v) = args.reinvest {
            cfg.reinvestment = v.0;
        }
        match command {
            Command::Tables => cfg.figures.clear(),
            Command::Figures => cfg.tables.clear(),
            _ => {}
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let fail = |msg: String| Err(CliError::Config(msg));
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return fail(format!("rho must lie in (0, 1], got {}", self.rho));
        }
        if self.start >= self.end {
            return fail(format!("start {} is not before end {}", self.start, self.end));
        }
        if self.panels.is_empty() {
            return fail("no sample panel selected".into());
        }
        if self.out.as_os_str().is_empty() {
            return fail("output directory is empty".into());
        }
        if self.replications == 0 {
            return fail("replications must be positive".into());
        }
        if self.adl_own_lags == 0 {
            return fail("the ADL model needs at least one own lag".into());
        }
        if self.init_years < 2 || self.burn_in_years < 2 {
            return fail("initial and burn-in windows must cover at least two years".into());
        }
        if !self.synthetic {
            self.schema.resolve()?;
        }
        Ok(())
    }

    /// One-line JSON rendering used in file headers.
    pub fn echo(&self) -> String {
        serde_json::to_string(self).expect("config serialises")
    }

    pub fn effective_sampling(&self, preset: Sampling) -> Sampling {
        self.sampling.unwrap_or(preset)
    }

    pub fn hac_config(&self) -> mdp_core::HacConfig {
        mdp_core::HacConfig { kernel: self.hac, lag_rule: self.hac_lag_rule }
    }
}
