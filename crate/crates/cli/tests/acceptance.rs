//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Criteria 1-8 need the Goyal-Welch monthly file (`MDP_DATA` or
//! `data/goyal_welch_monthly.csv` at the workspace root). Without it they are
//! reported as FAIL with the reason; the process only exits non-zero for those
//! when `MDP_ACCEPTANCE_STRICT=1`. Criteria 9 and 10 always run.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::Command;

use mdp_cli::analysis::Analysis;
use mdp_cli::config::{RunConfig, TableId};
use mdp_cli::table::Table;
use mdp_cli::tables;
use mdp_core::linalg::Matrix;
use mdp_core::predictability::{
    cs_breakdown, cs_decomposition, cs_identity_relative_error, CsSettings, HacConfig, PredictabilityData, Predictor,
    SampleWindow, Sampling,
};
use mdp_core::ratios::{build_ratios, estimate_beta, Engine};
use mdp_core::selftest::{adf_size, johansen_recovery, oos_lookahead};
use mdp_core::series::{build_annual_panel, ReinvestmentRate};
use mdp_core::simulate::{rng, white_noise, SyntheticMarket};
use mdp_core::stats::{hac_covariance, ols, robust_covariance, HacKernel};

enum Verdict {
    Pass(String),
    Fail(String),
    NoData(String),
}

fn within(x: Option<f64>, target: f64, tol: f64) -> bool {
    x.is_some_and(|v| (v - target).abs() <= tol)
}

fn fmt(x: Option<f64>) -> String {
    x.map_or("missing".into(), |v| format!("{v:.3}"))
}

/// Collects named checks and their observed values into one verdict.
struct Checks(Vec<(String, bool)>);

impl Checks {
    fn new() -> Self {
        Checks(Vec::new())
    }

    fn add(&mut self, label: String, ok: bool) {
        self.0.push((label, ok));
    }

    fn verdict(self) -> Verdict {
        let ok = self.0.iter().all(|c| c.1);
        let text = self
            .0
            .iter()
            .map(|(l, ok)| if *ok { l.clone() } else { format!("{l} [out of tolerance]") })
            .collect::<Vec<_>>()
            .join("; ");
        if ok { Verdict::Pass(text) } else { Verdict::Fail(text) }
    }
}

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn data_path() -> PathBuf {
    std::env::var_os("MDP_DATA")
        .map(PathBuf::from)
        .unwrap_or_else(|| workspace_root().join(mdp_cli::config::DEFAULT_DATA_PATH))
}

fn data_tables() -> Result<BTreeMap<TableId, Table>, String> {
    let path = data_path();
    if !path.is_file() {
        return Err(format!("data file missing: {}", path.display()));
    }
    let cfg = RunConfig {
        data: path,
        tables: vec![TableId::T1a, TableId::T1b, TableId::T2a, TableId::T2b, TableId::T3, TableId::T4, TableId::T5],
        figures: Vec::new(),
        ..RunConfig::default()
    };
    let analysis = Analysis::load(&cfg).map_err(|e| e.to_string())?;
    cfg.tables
        .iter()
        .map(|&id| tables::build(id, &analysis, &cfg).map(|t| (id, t)).map_err(|e| e.to_string()))
        .collect()
}

fn criterion_1(t: &BTreeMap<TableId, Table>) -> Verdict {
    let tb = &t[&TableId::T1b];
    let j = tb.lookup("Panel A", &["johansen beta"], "statistic");
    let a = tb.lookup("Panel A", &["adl beta"], "statistic");
    let mut c = Checks::new();
    c.add(format!("Johansen beta {} (0.80 +- 0.02)", fmt(j)), within(j, 0.80, 0.02));
    c.add(format!("ADL beta {} (0.85 +- 0.02)", fmt(a)), within(a, 0.85, 0.02));
    c.verdict()
}

fn criterion_2(t: &BTreeMap<TableId, Table>) -> Verdict {
    let tb = &t[&TableId::T1b];
    let r0 = tb.lookup("Panel A", &["trace", "r = 0"], "statistic");
    let r0c = tb.lookup("Panel A", &["trace", "r = 0"], "crit_5pct");
    let r1 = tb.lookup("Panel A", &["trace", "r <= 1"], "statistic");
    let chi = tb.lookup("Panel A", &["chi2"], "statistic");
    let chic = tb.lookup("Panel A", &["chi2"], "crit_1pct");
    let mut c = Checks::new();
    c.add(format!("trace r=0 {} (19.35 +- 1.5)", fmt(r0)), within(r0, 19.35, 1.5));
    c.add("trace r=0 rejects at 5%".into(), matches!((r0, r0c), (Some(s), Some(cv)) if s > cv));
    c.add(format!("trace r<=1 {} (< 3.84)", fmt(r1)), r1.is_some_and(|v| v < 3.84));
    c.add(format!("chi2 {} (10.42 +- 2)", fmt(chi)), within(chi, 10.42, 2.0));
    c.add("chi2 rejects at 1%".into(), matches!((chi, chic), (Some(s), Some(cv)) if s > cv));
    c.verdict()
}

fn criterion_3(t: &BTreeMap<TableId, Table>) -> Verdict {
    let ta = &t[&TableId::T1a];
    let mut c = Checks::new();
    for (name, phi, mean) in [("dp", 0.87, -3.35), ("d*p", 0.93, -3.30), ("mdp", 0.70, -2.05)] {
        let a = ta.lookup("Panel A", &[name], "ar1");
        let m = ta.lookup("Panel A", &[name], "mean");
        c.add(format!("AR(1) {name} {} ({phi} +- 0.03)", fmt(a)), within(a, phi, 0.03));
        c.add(format!("mean {name} {} ({mean} +- 0.05)", fmt(m)), within(m, mean, 0.05));
    }
    c.verdict()
}

fn criterion_4(t: &BTreeMap<TableId, Table>) -> Verdict {
    let t2 = &t[&TableId::T2a];
    let mut c = Checks::new();
    let b = t2.lookup("Panel A", &["r", "5", "mdp"], "b");
    c.add(format!("A r(5) mdp b {} (1.04 +- 0.05)", fmt(b)), within(b, 1.04, 0.05));
    for (panel, h, pred, r2, tol) in
        [("Panel A", "5", "mdp", 0.41, 0.03), ("Panel A", "7", "mdp", 0.49, 0.03), ("Panel A", "5", "dp", 0.19, 0.03), ("Panel B", "7", "mdp", 0.72, 0.04)]
    {
        let v = t2.lookup(panel, &["r", h, pred], "R2");
        c.add(format!("{panel} r({h}) {pred} R2 {} ({r2} +- {tol})", fmt(v)), within(v, r2, tol));
    }
    c.verdict()
}

fn criterion_5(t: &BTreeMap<TableId, Table>) -> Verdict {
    let t2 = &t[&TableId::T2b];
    let dsp = t2.lookup("Panel B", &["rf", "5", "d*p"], "R2");
    let mdp = t2.lookup("Panel B", &["rf", "5", "mdp"], "R2");
    let mut c = Checks::new();
    c.add(format!("B rf(5) d*p R2 {} (0.73 +- 0.04)", fmt(dsp)), within(dsp, 0.73, 0.04));
    c.add(format!("B rf(5) mdp R2 {} (0.53 +- 0.04)", fmt(mdp)), within(mdp, 0.53, 0.04));
    c.add("d*p beats mdp".into(), matches!((dsp, mdp), (Some(a), Some(b)) if a > b));
    c.verdict()
}

fn criterion_6(t: &BTreeMap<TableId, Table>) -> Verdict {
    let t3 = &t[&TableId::T3];
    let mut c = Checks::new();
    for (h, lo, hi) in [("5", 0.93, 1.03), ("7", 0.91, 1.01)] {
        let s = t3.lookup("Panel A", &["sum", h], "b");
        c.add(format!("slope sum h={h} {} in [{lo}, {hi}]", fmt(s)), s.is_some_and(|v| (lo..=hi).contains(&v)));
    }
    c.verdict()
}

fn criterion_7(t: &BTreeMap<TableId, Table>) -> Verdict {
    let t4 = &t[&TableId::T4];
    let mut c = Checks::new();
    for h in ["5", "7"] {
        let s = t4.lookup("Panel A", &[h, "mdp", "sum", "mdp"], "slope");
        c.add(format!("h={h} mdp slope sum {} in [-0.05, 0.05]", fmt(s)), within(s, 0.0, 0.05));
        let tb = t4.lookup("Panel A", &[h, "mdp", "wr", "d*p"], "t");
        let tc = t4.lookup("Panel A", &[h, "mdp", "wr", "mdp"], "t");
        c.add(format!("h={h} t(b_r) {} (|t| < 1)", fmt(tb)), tb.is_some_and(|v| v.abs() < 1.0));
        c.add(format!("h={h} t(c_r) {} (> 3)", fmt(tc)), tc.is_some_and(|v| v > 3.0));
    }
    c.verdict()
}

fn criterion_8(t: &BTreeMap<TableId, Table>) -> Verdict {
    let t5 = &t[&TableId::T5];
    let mut c = Checks::new();
    for (col, p, r) in [("h3", 0.34, 0.07), ("h5", 0.49, 0.26), ("h7", 0.49, 0.31)] {
        let vp = t5.lookup("Panel A", &["r", "mdp (P)"], col);
        let vr = t5.lookup("Panel A", &["r", "mdp (R)"], col);
        c.add(format!("mdp(P) {col} {} ({p} +- 0.06)", fmt(vp)), within(vp, p, 0.06));
        c.add(format!("mdp(R) {col} {} ({r} +- 0.06)", fmt(vr)), within(vr, r, 0.06));
    }
    for col in ["h3", "h5"] {
        let v = t5.lookup("Panel A", &["r", "dp"], col);
        c.add(format!("dp {col} {} (<= 0.02)", fmt(v)), v.is_some_and(|x| x <= 0.02));
    }
    c.verdict()
}

fn criterion_9() -> Verdict {
    let mut c = Checks::new();

    let j = johansen_recovery(9001, 200);
    c.add(format!("Johansen median |beta error| {:.4} (< 0.02)", j.statistic), j.passed);

    let a = adf_size(9002, 1000);
    c.add(format!("ADF size {:.3} (in [0.03, 0.08])", a.statistic), a.passed);

    let mut g = rng(9003, 0);
    let x1 = white_noise(&mut g, 300, 1.0);
    let x2 = white_noise(&mut g, 300, 1.0);
    let y: Vec<f64> = white_noise(&mut g, 300, 1.0).iter().zip(&x1).map(|(e, x)| e * (1.0 + x.abs()) + 0.2 * x).collect();
    let x = Matrix::from_columns(&[&x1, &x2]).unwrap();
    let fit = ols(&y, &x, true).unwrap();
    let white = robust_covariance(&fit, &x).unwrap();
    let zero = hac_covariance(&fit, &x, HacKernel::HansenHodrick, 0).unwrap().matrix;
    let mut gap: f64 = 0.0;
    for i in 0..3 {
        for k in 0..3 {
            gap = gap.max((white[(i, k)] - zero[(i, k)]).abs());
        }
    }
    c.add(format!("HAC(L=0) vs robust max gap {gap:.1e} (<= 1e-10)"), gap <= 1e-10);

    let series = SyntheticMarket::default().series(&mut rng(9004, 0)).unwrap();
    let panel = build_annual_panel(&series, ReinvestmentRate::TotalReturn).unwrap();
    let all = 0..panel.len();
    let b = estimate_beta(&panel, all.clone(), Engine::Johansen { lags: 2 }).unwrap().beta;
    let b2 = estimate_beta(&panel, all, Engine::Adl { own_lags: 3, price_lags: 3 }).unwrap().beta;
    let ratios = build_ratios(&panel, b, b2).unwrap();
    let data = PredictabilityData::new(&panel, &ratios).unwrap();
    let settings = CsSettings {
        rho: 0.96,
        predictors: vec![Predictor::DStarP, Predictor::Mdp],
        window: SampleWindow::full(),
        sampling: Sampling::Annual,
        hac: HacConfig::default(),
    };
    let mut add_gap: f64 = 0.0;
    for h in [5, 7] {
        let cs = cs_decomposition(&data, h, &settings).unwrap();
        let split = cs_breakdown(&data, h, &settings).unwrap();
        for k in 0..2 {
            add_gap = add_gap.max((split.wre.estimates[k].slope + split.wrf.estimates[k].slope - cs.wr.estimates[k].slope).abs());
        }
    }
    c.add(format!("wre + wrf - wr slope gap {add_gap:.1e} (<= 1e-8)"), add_gap <= 1e-8);

    let look = oos_lookahead(9005);
    c.add(format!("look-ahead forecast change {:.1e} (== 0)", look.statistic), look.passed);

    let cs_err = cs_identity_relative_error(&data, 5, 0.96);
    c.add(format!("identity median relative residual {cs_err:.4} (< 0.10)"), cs_err < 0.10);
    c.verdict()
}

fn run_cli(out: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_mdp"))
        .args(["run", "--synthetic", "--seed", "4242", "--out"])
        .arg(out)
        .env_remove("MDP_DATA")
        .output()
        .map_err(|e| e.to_string())?;
    if !status.status.success() {
        return Err(String::from_utf8_lossy(&status.stderr).into_owned());
    }
    let mut files = BTreeMap::new();
    for entry in std::fs::read_dir(out).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        let bytes = std::fs::read(&path).map_err(|e| e.to_string())?;
        files.insert(path.file_name().unwrap().to_string_lossy().into_owned(), bytes);
    }
    Ok(files)
}

fn criterion_10() -> Verdict {
    let dir = tempfile::tempdir().expect("temp dir");
    let out = dir.path().join("out");
    let first = match run_cli(&out) {
        Ok(f) => f,
        Err(e) => return Verdict::Fail(format!("first run failed: {e}")),
    };
    std::fs::remove_dir_all(&out).expect("clear output");
    let second = match run_cli(&out) {
        Ok(f) => f,
        Err(e) => return Verdict::Fail(format!("second run failed: {e}")),
    };
    let differing: Vec<&String> = first.iter().filter(|(k, v)| second.get(*k) != Some(v)).map(|(k, _)| k).collect();
    if first.is_empty() || first.len() != second.len() || !differing.is_empty() {
        Verdict::Fail(format!("{} files, differing: {differing:?}", first.len()))
    } else {
        Verdict::Pass(format!("{} files byte-identical across two synthetic runs", first.len()))
    }
}

fn main() {
    let strict = std::env::var("MDP_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let mut results: Vec<(u8, &str, Verdict)> = Vec::new();
    let data_criteria: [(u8, &str, fn(&BTreeMap<TableId, Table>) -> Verdict); 8] = [
        (1, "cointegration coefficients", criterion_1),
        (2, "table 1b rank and restriction tests", criterion_2),
        (3, "table 1a persistence and means", criterion_3),
        (4, "table 2a spot cells", criterion_4),
        (5, "table 2b risk-free rates post-1965", criterion_5),
        (6, "table 3 slope sums", criterion_6),
        (7, "table 4 modified slope sum and significance", criterion_7),
        (8, "table 5 out-of-sample R2", criterion_8),
    ];
    match data_tables() {
        Ok(t) => {
            for (n, name, f) in data_criteria {
                results.push((n, name, f(&t)));
            }
        }
        Err(reason) => {
            for (n, name, _) in data_criteria {
                let v = if reason.starts_with("data file missing") {
                    Verdict::NoData(reason.clone())
                } else {
                    Verdict::Fail(reason.clone())
                };
                results.push((n, name, v));
            }
        }
    }
    results.push((9, "property suites", criterion_9()));
    results.push((10, "determinism", criterion_10()));

    let mut hard_failures = 0;
    let mut no_data = 0;
    for (n, name, v) in &results {
        match v {
            Verdict::Pass(d) => println!("PASS criterion {n:>2} ({name}): {d}"),
            Verdict::Fail(d) => {
                hard_failures += 1;
                println!("FAIL criterion {n:>2} ({name}): {d}");
            }
            Verdict::NoData(d) => {
                no_data += 1;
                println!("FAIL criterion {n:>2} ({name}): {d}");
            }
        }
    }
    let passed = results.len() - hard_failures - no_data;
    println!("acceptance: {passed} passed, {} failed ({no_data} for lack of data)", hard_failures + no_data);
    if hard_failures > 0 || (strict && no_data > 0) {
        std::process::exit(1);
    }
}
