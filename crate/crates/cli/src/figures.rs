//! Plot-ready long-format figure data.

use mdp_core::ratios::recursive_beta_path_from;
use mdp_core::series::{forward_sum, YearMonth};
use mdp_core::stats::{mean, std_dev};

use crate::analysis::{Analysis, PanelContext};
use crate::config::{FigureId, RunConfig};
use crate::error::{CliError, Context};
use crate::table::{Cell, Section, Table};

const FIGURE1_HORIZON: usize = 5;

pub fn build(id: FigureId, a: &Analysis, cfg: &RunConfig) -> Result<Table, CliError> {
    let p = a.panels.first().ok_or_else(|| CliError::Config("no panel selected".into()))?;
    match id {
        FigureId::F1 => figure_1(a, p),
        FigureId::F2 => figure_2(a, cfg, p),
    }
}

/// Lowest standardised value inside `[from, to]`.
fn standardized_min(dates: &[YearMonth], x: &[f64], from: YearMonth, to: YearMonth) -> Option<f64> {
    let (m, s) = (mean(x), std_dev(x));
    dates
        .iter()
        .zip(x)
        .filter(|(d, _)| **d >= from && **d <= to)
        .map(|(_, v)| (v - m) / s)
        .reduce(f64::min)
}

fn figure_1(a: &Analysis, p: &PanelContext) -> Result<Table, CliError> {
    let mut t = Table::new("figure1", "dp and mdp against forward 5-year returns", &["date", "dp", "mdp", "r5"]);
    let (first, last) = p.rows;
    let mut s = Section::new(format!("Panel {}", p.id));
    let span = 12 * FIGURE1_HORIZON;
    for i in first..=last.saturating_sub(span) {
        let r5 = forward_sum(&a.panel.r, i, FIGURE1_HORIZON, None);
        s.rows.push(vec![
            Cell::text(a.panel.dates[i].to_string()),
            Cell::num(p.ratios.dp[i]),
            Cell::num(p.ratios.mdp[i]),
            Cell::opt(r5),
        ]);
    }
    let range = first..last + 1;
    let dates = &a.panel.dates[range.clone()];
    let (from, to) = (YearMonth { year: 1995, month: 1 }, YearMonth { year: 2005, month: 12 });
    if let (Some(dp), Some(mdp)) = (
        standardized_min(dates, &p.ratios.dp[range.clone()], from, to),
        standardized_min(dates, &p.ratios.mdp[range], from, to),
    ) {
        s.note("lowest standardised print 1995-2005", format!("dp {dp:.3}, mdp {mdp:.3}"));
    }
    t.note("beta", format!("{:.6}", p.ratios.beta_mdp));
    t.sections.push(s);
    Ok(t)
}

fn figure_2(a: &Analysis, cfg: &RunConfig, p: &PanelContext) -> Result<Table, CliError> {
    let mut t = Table::new(
        "figure2",
        "Recursively estimated cointegration coefficient",
        &["date", "beta", "population_beta", "carried_forward", "rank_zero"],
    );
    let engine = a.johansen();
    let path = recursive_beta_path_from(&a.panel.slice(0..p.rows.1 + 1), p.rows.0, cfg.burn_in_years, engine)
        .context(|| format!("figure 2 panel {} recursive beta", p.id))?;
    let population = p.vecm.beta();
    let mut s = Section::new(format!("Panel {}", p.id));
    for pt in &path.points {
        s.rows.push(vec![
            Cell::text(pt.date.to_string()),
            Cell::opt(pt.beta),
            Cell::num(population),
            Cell::text(pt.carried_forward.to_string()),
            Cell::text(pt.rank_zero.to_string()),
        ]);
    }
    t.note("burn-in years", cfg.burn_in_years);
    t.note("engine", format!("{engine:?}"));
    s.note("carried forward", path.failures());
    s.note("rank zero", path.points.iter().filter(|x| x.rank_zero).count());
    t.sections.push(s);
    Ok(t)
}
