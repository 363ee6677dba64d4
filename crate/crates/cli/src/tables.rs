//! One builder per reproduced table.

use mdp_core::adl::{adl_fit, ecm_cointegration_test, long_run_solution};
use mdp_core::johansen::{max_eigen_test, restriction_test, trace_test, CHI2_1_CRITICAL_1PCT, CHI2_1_CRITICAL_5PCT};
use mdp_core::oos::{evaluate, BetaMode, OosScheme};
use mdp_core::predictability::{
    conventional_rho, cs_breakdown, cs_decomposition, run_regression, CsSettings, PredictabilityData, Predictor,
    RegressionSpec, Sampling, Target,
};
use mdp_core::ratios::Engine;
use mdp_core::stats::{ar1, correlation, mean, std_dev};
use mdp_core::{OosReport, RegressionResult};
use rayon::prelude::*;

use crate::analysis::{Analysis, PanelContext};
use crate::config::{RunConfig, TableId};
use crate::error::{CliError, Context};
use crate::table::{Cell, Section, Table};

const HORIZONS: [usize; 4] = [1, 3, 5, 7];
const CS_HORIZONS: [usize; 2] = [5, 7];
const OOS_HORIZONS: [usize; 3] = [3, 5, 7];
const ALL_RATIOS: [Predictor; 4] = [Predictor::DStarP, Predictor::Dp, Predictor::Mdp, Predictor::MdpPrime];

pub fn build(id: TableId, a: &Analysis, cfg: &RunConfig) -> Result<Table, CliError> {
    let mut table = match id {
        TableId::T1a => table_1a(a, cfg),
        TableId::T1b => table_1b(a),
        TableId::T2a => table_2a(a, cfg),
        TableId::T2b => table_2b(a, cfg),
        TableId::T2c => table_2c(a, cfg),
        TableId::T3 => table_3(a, cfg),
        TableId::T4 => table_4(a, cfg),
        TableId::T4b => table_4b(a, cfg),
        TableId::T5 => table_5(a, cfg),
    }?;
    table.note("data", &a.source);
    table.note("price levels", a.anchor_note());
    let order = a.var_order.map_or("given".to_string(), |p| format!("Hannan-Quinn VAR order {p}"));
    table.note("vecm lags", format!("{} ({order})", a.vecm_lags));
    if let Engine::Adl { own_lags, price_lags } = a.adl {
        table.note("adl lags", format!("ADL({own_lags},{price_lags})"));
    }
    for p in &a.panels {
        table.note(&format!("beta panel {}", p.id), format!("mdp {:.6}, mdp' {:.6}", p.ratios.beta_mdp, p.ratios.beta_mdp_prime));
    }
    Ok(table)
}

fn sampling_label(s: Sampling) -> &'static str {
    match s {
        Sampling::Overlapping => "overlapping monthly",
        Sampling::Annual => "annual (December rows)",
    }
}

fn hac_notes(table: &mut Table, cfg: &RunConfig, sampling: Sampling) {
    table.note("sampling", sampling_label(sampling));
    table.note("hac kernel", format!("{:?}", cfg.hac));
    table.note("hac lag rule", format!("{:?}", cfg.hac_lag_rule));
}

fn data<'a>(a: &'a Analysis, p: &'a PanelContext) -> Result<PredictabilityData<'a, f64>, CliError> {
    PredictabilityData::new(&a.panel, &p.ratios).context(|| format!("panel {} data", p.id))
}

fn spec(p: &PanelContext, cfg: &RunConfig, target: Target, h: usize, preds: &[Predictor], sampling: Sampling) -> RegressionSpec<f64> {
    let s = RegressionSpec::new(target, h, preds).window(p.window).sampling(sampling).hac(cfg.hac_config());
    if target.needs_rho() { s.rho(cfg.rho) } else { s }
}

fn regress(
    a: &Analysis,
    p: &PanelContext,
    spec: &RegressionSpec<f64>,
    table: &str,
) -> Result<RegressionResult, CliError> {
    let preds: Vec<String> = spec.predictors.iter().map(|x| x.to_string()).collect();
    run_regression(spec, &data(a, p)?).context(|| {
        format!("table {table} panel {} {}({}) on {}", p.id, spec.target, spec.horizon, preds.join("+"))
    })
}

fn fallback_note(section: &mut Section, results: &[&RegressionResult]) {
    let n = results.iter().filter(|r| r.hac_fallback).count();
    if n > 0 {
        section.note("hac fallback", format!("{n} regressions fell back to Newey-West"));
    }
}

fn table_1a(a: &Analysis, cfg: &RunConfig) -> Result<Table, CliError> {
    let names = ["r", "re", "rf", "dp", "d*p", "mdp", "mdp'"];
    let mut cols = vec!["series"];
    cols.extend(names);
    cols.extend(["mean", "std", "ar1", "n_obs"]);
    let mut table = Table::new("1a", "Summary statistics", &cols);
    let sampling = cfg.effective_sampling(Sampling::Annual);
    table.note("sampling", sampling_label(sampling));
    for p in &a.panels {
        let (first, last) = p.rows;
        let rows: Vec<usize> =
            (first..=last).filter(|&t| sampling == Sampling::Overlapping || a.panel.dates[t].month == 12).collect();
        let r = &p.ratios;
        let full: [&[f64]; 7] = [&a.panel.r, &a.panel.re, &a.panel.rf, &r.dp, &r.dstar_p, &r.mdp, &r.mdp_prime];
        let series: Vec<Vec<f64>> = full.iter().map(|s| rows.iter().map(|&t| s[t]).collect()).collect();
        let mut section = Section::new(format!("Panel {}", p.id));
        section.note("span", format!("{}..{}", a.panel.dates[rows[0]], a.panel.dates[*rows.last().unwrap()]));
        for (i, name) in names.iter().enumerate() {
            let mut row = vec![Cell::text(*name)];
            for j in 0..names.len() {
                row.push(if j < i {
                    Cell::num(correlation(&series[i], &series[j]))
                } else if j == i {
                    Cell::num(1.0)
                } else {
                    Cell::Empty
                });
            }
            let phi = ar1(&series[i]).context(|| format!("table 1a AR(1) of {name}"))?.phi;
            row.extend([
                Cell::num(mean(&series[i])),
                Cell::num(std_dev(&series[i])),
                Cell::num(phi),
                Cell::Int(series[i].len()),
            ]);
            section.rows.push(row);
        }
        table.sections.push(section);
    }
    Ok(table)
}

fn stars(five: bool, one: bool) -> Cell {
    Cell::text(if one { "**" } else if five { "*" } else { "" })
}

fn table_1b(a: &Analysis) -> Result<Table, CliError> {
    let mut table = Table::new(
        "1b",
        "Cointegration tests and the [1, -1] restriction",
        &["test", "hypothesis", "statistic", "crit_5pct", "crit_1pct", "decision"],
    );
    table.note("sampling", sampling_label(Sampling::Overlapping));
    table.note("deterministic terms", "unrestricted constant, trending levels");
    for p in &a.panels {
        let mut s = Section::new(format!("Panel {}", p.id));
        let trace = trace_test(&p.vecm);
        let maxeig = max_eigen_test(&p.vecm);
        for (name, report) in [("trace", &trace), ("max-eigen", &maxeig)] {
            for h in &report.hypotheses {
                let hyp = if h.null_rank == 0 { "r = 0" } else { "r <= 1" };
                s.rows.push(vec![
                    Cell::text(name),
                    Cell::text(hyp),
                    Cell::num(h.statistic),
                    Cell::num(h.critical_values[1]),
                    Cell::num(h.critical_values[2]),
                    stars(h.rejects_at_5pct(), h.rejects_at_1pct()),
                ]);
            }
        }
        let restriction = restriction_test(&p.vecm, &[1.0, -1.0]).context(|| format!("table 1b panel {} restriction", p.id))?;
        s.rows.push(vec![
            Cell::text("chi2"),
            Cell::text("[1 -1]"),
            Cell::num(restriction.statistic),
            Cell::num(CHI2_1_CRITICAL_5PCT),
            Cell::num(CHI2_1_CRITICAL_1PCT),
            stars(restriction.rejects_at_5pct(), restriction.rejects_at_1pct()),
        ]);
        let range = p.rows.0..p.rows.1 + 1;
        let (own, price) = match a.adl {
            Engine::Adl { own_lags, price_lags } => (own_lags, price_lags),
            Engine::Johansen { .. } => unreachable!("ADL engine"),
        };
        let fit = adl_fit(&a.panel.d[range.clone()], &a.panel.p[range], own, price)
            .context(|| format!("table 1b panel {} ADL", p.id))?;
        let lr = long_run_solution(&fit).context(|| format!("table 1b panel {} ADL long run", p.id))?;
        let ecm = ecm_cointegration_test(&fit);
        s.rows.push(vec![
            Cell::text("ecm t"),
            Cell::text("no cointegration"),
            Cell::num(ecm.statistic),
            Cell::num(ecm.critical_5pct),
            Cell::Empty,
            stars(ecm.rejects_at_5pct(), false),
        ]);
        let coef = |name: &str, x: f64| vec![Cell::text(name), Cell::Empty, Cell::num(x), Cell::Empty, Cell::Empty, Cell::Empty];
        s.rows.push(coef("johansen beta", p.vecm.beta()));
        s.rows.push(coef("johansen c0", p.vecm.c0));
        s.rows.push(coef("adl beta", lr.beta));
        s.rows.push(coef("adl beta se", lr.se_beta));
        s.rows.push(coef("adl alpha", lr.alpha));
        s.note("observations", p.vecm.n_obs);
        s.note("eigenvalues", format!("{:.6}, {:.6}", p.vecm.eigenvalues[0], p.vecm.eigenvalues[1]));
        table.sections.push(s);
    }
    Ok(table)
}

fn slope_row(keys: Vec<Cell>, res: &RegressionResult, pred: Predictor) -> Vec<Cell> {
    let e = res.estimate(pred).expect("predictor in spec");
    let mut row = keys;
    row.extend([
        Cell::text(pred.to_string()),
        Cell::num(e.slope),
        Cell::num(e.t_stat),
        Cell::num(res.r_squared),
        Cell::Int(res.n_obs),
        Cell::Int(res.hac_lag),
    ]);
    row
}

fn univariate_grid(
    a: &Analysis,
    cfg: &RunConfig,
    table: &mut Table,
    targets: &[Target],
    preds: &[Predictor],
) -> Result<(), CliError> {
    let sampling = cfg.effective_sampling(Sampling::Overlapping);
    hac_notes(table, cfg, sampling);
    let id = table.id.clone();
    for p in &a.panels {
        let jobs: Vec<(Target, usize, Predictor)> = targets
            .iter()
            .flat_map(|&t| HORIZONS.iter().flat_map(move |&h| preds.iter().map(move |&x| (t, h, x))))
            .collect();
        let results = jobs
            .par_iter()
            .map(|&(t, h, x)| regress(a, p, &spec(p, cfg, t, h, &[x], sampling), &id))
            .collect::<Result<Vec<_>, _>>()?;
        let mut s = Section::new(format!("Panel {}", p.id));
        for (&(t, h, x), res) in jobs.iter().zip(&results) {
            s.rows.push(slope_row(vec![Cell::text(t.to_string()), Cell::Int(h)], res, x));
        }
        fallback_note(&mut s, &results.iter().collect::<Vec<_>>());
        table.sections.push(s);
    }
    Ok(())
}

const UNIVARIATE_COLUMNS: [&str; 8] = ["target", "h", "predictor", "b", "t(b)", "R2", "n_obs", "hac_lag"];

fn table_2a(a: &Analysis, cfg: &RunConfig) -> Result<Table, CliError> {
    let mut t = Table::new("2a", "Predictability of returns, equity premia and dividend growth", &UNIVARIATE_COLUMNS);
    univariate_grid(a, cfg, &mut t, &[Target::R, Target::Re, Target::GrowthD], &ALL_RATIOS)?;
    Ok(t)
}

fn table_2b(a: &Analysis, cfg: &RunConfig) -> Result<Table, CliError> {
    let mut t = Table::new("2b", "Univariate forecasting of long-run risk-free rates", &UNIVARIATE_COLUMNS);
    univariate_grid(a, cfg, &mut t, &[Target::Rf], &[Predictor::DStarP, Predictor::Mdp])?;
    Ok(t)
}

fn table_2c(a: &Analysis, cfg: &RunConfig) -> Result<Table, CliError> {
    let mut table = Table::new(
        "2c",
        "Multivariate predictability of realized returns",
        &["target", "h", "b(dp)", "t(dp)", "c(mdp)", "t(mdp)", "R2", "n_obs", "hac_lag"],
    );
    let sampling = cfg.effective_sampling(Sampling::Overlapping);
    hac_notes(&mut table, cfg, sampling);
    let preds = [Predictor::Dp, Predictor::Mdp];
    for p in &a.panels {
        let jobs: Vec<(Target, usize)> =
            [Target::R, Target::Re].iter().flat_map(|&t| OOS_HORIZONS.iter().map(move |&h| (t, h))).collect();
        let results = jobs
            .par_iter()
            .map(|&(t, h)| regress(a, p, &spec(p, cfg, t, h, &preds, sampling), "2c"))
            .collect::<Result<Vec<_>, _>>()?;
        let mut s = Section::new(format!("Panel {}", p.id));
        for (&(t, h), res) in jobs.iter().zip(&results) {
            let (b, c) = (&res.estimates[0], &res.estimates[1]);
            s.rows.push(vec![
                Cell::text(t.to_string()),
                Cell::Int(h),
                Cell::num(b.slope),
                Cell::num(b.t_stat),
                Cell::num(c.slope),
                Cell::num(c.t_stat),
                Cell::num(res.r_squared),
                Cell::Int(res.n_obs),
                Cell::Int(res.hac_lag),
            ]);
        }
        fallback_note(&mut s, &results.iter().collect::<Vec<_>>());
        table.sections.push(s);
    }
    Ok(table)
}

fn cs_settings(p: &PanelContext, cfg: &RunConfig, preds: &[Predictor]) -> CsSettings<f64> {
    CsSettings {
        rho: cfg.rho,
        predictors: preds.to_vec(),
        window: p.window,
        sampling: cfg.effective_sampling(Sampling::Annual),
        hac: cfg.hac_config(),
    }
}

fn cs_notes(table: &mut Table, a: &Analysis, cfg: &RunConfig) {
    hac_notes(table, cfg, cfg.effective_sampling(Sampling::Annual));
    table.note("rho", cfg.rho);
    table.note("conventional rho", format!("{:.4}", conventional_rho(&a.panel.dp())));
}

fn table_3(a: &Analysis, cfg: &RunConfig) -> Result<Table, CliError> {
    let mut table = Table::new(
        "3",
        "Univariate analysis based on the log-linear decomposition",
        &["target", "h", "predictor", "b", "t(b)", "R2", "n_obs", "hac_lag"],
    );
    cs_notes(&mut table, a, cfg);
    let preds = [Predictor::DStarP];
    for p in &a.panels {
        let d = data(a, p)?;
        let settings = cs_settings(p, cfg, &preds);
        let mut s = Section::new(format!("Panel {}", p.id));
        for h in CS_HORIZONS {
            let cs = cs_decomposition(&d, h, &settings).context(|| format!("table 3 panel {} h={h}", p.id))?;
            for (name, res) in [("wr", &cs.wr), ("wg", &cs.wg), ("auto", &cs.auto)] {
                s.rows.push(slope_row(vec![Cell::text(name), Cell::Int(h)], res, Predictor::DStarP));
            }
            let sum = &cs.slope_sums[0];
            s.rows.push(vec![
                Cell::text("sum"),
                Cell::Int(h),
                Cell::text(sum.predictor.to_string()),
                Cell::num(sum.sum),
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
            ]);
            fallback_note(&mut s, &[&cs.wr, &cs.wg, &cs.auto]);
        }
        table.sections.push(s);
    }
    Ok(table)
}

const MODELS: [(&str, Predictor); 2] = [("mdp", Predictor::Mdp), ("mdp'", Predictor::MdpPrime)];

fn table_4(a: &Analysis, cfg: &RunConfig) -> Result<Table, CliError> {
    let mut table = Table::new(
        "4",
        "Multivariate analysis based on the log-linear decomposition",
        &["h", "model", "target", "predictor", "slope", "t", "R2", "n_obs", "hac_lag"],
    );
    cs_notes(&mut table, a, cfg);
    for p in &a.panels {
        let d = data(a, p)?;
        let mut s = Section::new(format!("Panel {}", p.id));
        for h in CS_HORIZONS {
            for (model, m) in MODELS {
                let preds = [Predictor::DStarP, m];
                let cs = cs_decomposition(&d, h, &cs_settings(p, cfg, &preds))
                    .context(|| format!("table 4 panel {} h={h} {model}", p.id))?;
                for (name, res) in [("wr", &cs.wr), ("wg", &cs.wg), ("auto", &cs.auto)] {
                    for x in preds {
                        s.rows.push(slope_row(vec![Cell::Int(h), Cell::text(model), Cell::text(name)], res, x));
                    }
                }
                for sum in &cs.slope_sums {
                    s.rows.push(vec![
                        Cell::Int(h),
                        Cell::text(model),
                        Cell::text("sum"),
                        Cell::text(sum.predictor.to_string()),
                        Cell::num(sum.sum),
                        Cell::Empty,
                        Cell::Empty,
                        Cell::Empty,
                        Cell::Empty,
                    ]);
                }
                fallback_note(&mut s, &[&cs.wr, &cs.wg, &cs.auto]);
            }
        }
        table.sections.push(s);
    }
    Ok(table)
}

fn table_4b(a: &Analysis, cfg: &RunConfig) -> Result<Table, CliError> {
    let mut table = Table::new(
        "4b",
        "Multivariate slope breakdown into equity premia and risk-free rates",
        &["h", "model", "target", "predictor", "slope", "t", "R2", "n_obs", "hac_lag"],
    );
    cs_notes(&mut table, a, cfg);
    for p in &a.panels {
        let d = data(a, p)?;
        let mut s = Section::new(format!("Panel {}", p.id));
        for h in CS_HORIZONS {
            for (model, m) in MODELS {
                let preds = [Predictor::DStarP, m];
                let split = cs_breakdown(&d, h, &cs_settings(p, cfg, &preds))
                    .context(|| format!("table 4b panel {} h={h} {model}", p.id))?;
                for (name, res) in [("wre", &split.wre), ("wrf", &split.wrf)] {
                    for x in preds {
                        s.rows.push(slope_row(vec![Cell::Int(h), Cell::text(model), Cell::text(name)], res, x));
                    }
                }
            }
        }
        table.sections.push(s);
    }
    Ok(table)
}

/// Row label and scheme template of the out-of-sample table.
fn oos_rows(a: &Analysis) -> [(&'static str, Predictor, BetaMode, Engine); 5] {
    let j = a.johansen();
    [
        ("dp", Predictor::Dp, BetaMode::NotApplicable, j),
        ("d*p", Predictor::DStarP, BetaMode::NotApplicable, j),
        ("mdp (P)", Predictor::Mdp, BetaMode::Population, j),
        ("mdp' (P)", Predictor::MdpPrime, BetaMode::Population, a.adl),
        ("mdp (R)", Predictor::Mdp, BetaMode::Recursive, j),
    ]
}

pub fn oos_reports(a: &Analysis, cfg: &RunConfig, p: &PanelContext) -> Result<Vec<(Target, &'static str, usize, OosReport)>, CliError> {
    let jobs: Vec<(Target, &'static str, OosScheme)> = [Target::R, Target::Re]
        .iter()
        .flat_map(|&target| {
            oos_rows(a).into_iter().flat_map(move |(label, predictor, beta_mode, engine)| {
                OOS_HORIZONS.iter().map(move |&horizon| {
                    (
                        target,
                        label,
                        OosScheme {
                            predictor,
                            beta_mode,
                            engine,
                            target,
                            horizon,
                            window: p.window,
                            init_years: cfg.init_years,
                        },
                    )
                })
            })
        })
        .collect();
    jobs.par_iter()
        .map(|(target, label, scheme)| {
            evaluate(scheme, &a.panel)
                .context(|| format!("table 5 panel {} {label} {target}({})", p.id, scheme.horizon))
                .map(|rep| (*target, *label, scheme.horizon, rep))
        })
        .collect()
}

fn table_5(a: &Analysis, cfg: &RunConfig) -> Result<Table, CliError> {
    let mut table = Table::new("5", "Out-of-sample evaluation", &["target", "scheme", "h3", "h5", "h7"]);
    table.note("statistic", "R2_OS against the mean of realised past returns");
    table.note("forecast grid", "monthly origins, overlapping annual targets");
    table.note("initial window years", cfg.init_years);
    for p in &a.panels {
        let reports = oos_reports(a, cfg, p)?;
        let mut s = Section::new(format!("Panel {}", p.id));
        for target in [Target::R, Target::Re] {
            for (label, ..) in oos_rows(a) {
                let mut row = vec![Cell::text(target.to_string()), Cell::text(label)];
                for h in OOS_HORIZONS {
                    let rep = reports.iter().find(|(t, l, hh, _)| *t == target && *l == label && *hh == h);
                    row.push(Cell::opt(rep.map(|r| r.3.r2_os)));
                }
                s.rows.push(row);
            }
        }
        for h in OOS_HORIZONS {
            if let Some((.., rep)) = reports.iter().find(|(_, _, hh, _)| *hh == h) {
                let first = rep.forecasts.first().map(|f| f.date.to_string()).unwrap_or_default();
                let last = rep.forecasts.last().map(|f| f.date.to_string()).unwrap_or_default();
                s.note(&format!("forecasts h={h}"), format!("{} ({first}..{last})", rep.count()));
            }
        }
        let carried: usize = reports
            .iter()
            .map(|(.., r)| r.forecasts.iter().filter(|f| f.beta_carried_forward).count())
            .sum();
        if carried > 0 {
            s.note("recursive beta carried forward", carried);
        }
        table.sections.push(s);
    }
    Ok(table)
}
