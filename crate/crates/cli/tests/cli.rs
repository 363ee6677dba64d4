use std::fmt::Write as _;
use std::path::Path;
use std::process::{Command, Output};

use mdp_core::simulate::{rng, SyntheticMarket};

fn mdp(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mdp"));
    cmd.args(args);
    for (k, _) in std::env::vars().filter(|(k, _)| k.starts_with("MDP_")) {
        cmd.env_remove(k);
    }
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("run mdp")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Goyal-Welch style file with net returns and no price column.
fn write_goyal_welch(path: &Path, seed: u64) {
    let market = SyntheticMarket::default();
    let (total, exdiv, rf) = market.returns(&mut rng(seed, 0));
    let mut text = String::from("yyyymm,Index,Rfree,CRSP_SPvw,CRSP_SPvwx\n");
    let mut date = market.start;
    for i in 0..total.len() {
        let _ = writeln!(
            text,
            "{}{:02},{},{},{},{}",
            date.year,
            date.month,
            100.0 + i as f64,
            rf[i] - 1.0,
            total[i] - 1.0,
            exdiv[i] - 1.0
        );
        date = date.next();
    }
    std::fs::write(path, text).unwrap();
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn missing_data_file_exits_with_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = mdp(&["tables", "--data", "/nonexistent/gw.csv", "--out", out.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("data file missing"), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn empty_selection_is_a_noop() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = mdp(&["run", "--tables", "none", "--out", out.to_str().unwrap()], &[("MDP_FIGURES", "none")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("nothing selected"));
    assert!(!out.exists());
}

#[test]
fn invalid_configuration_is_rejected() {
    let o = mdp(&["tables", "--synthetic", "--rho", "1.5"], &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("rho"));
    let o = mdp(&["tables", "--synthetic", "--tables", "2a,9"], &[]);
    assert_eq!(o.status.code(), Some(1));
    let o = mdp(&["tables", "--synthetic", "--hac", "bartlett"], &[]);
    assert_eq!(o.status.code(), Some(2), "clap usage errors exit with 2");
}

#[test]
fn config_file_and_environment_are_merged() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("run.toml");
    std::fs::write(&file, "rho = 0.9\nadl_own_lags = 2\n").unwrap();
    let o = mdp(&["config", "--config", file.to_str().unwrap()], &[("MDP_SEED", "11"), ("MDP_PANEL", "B")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("rho = 0.9"));
    assert!(text.contains("adl_own_lags = 2"));
    assert!(text.contains("seed = 11"));
    assert!(text.contains("panels = [\"B\"]"));
}

#[test]
fn goyal_welch_file_produces_tables_and_figures() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("gw.csv");
    write_goyal_welch(&data, 31);
    let out = dir.path().join("out");
    let o = mdp(
        &["run", "--data", data.to_str().unwrap(), "--tables", "1b,2b", "--vecm-lags", "2", "--out", out.to_str().unwrap()],
        &[],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    let parse = |s: &str| serde_json::from_str::<serde_json::Value>(s).unwrap();
    for name in ["table1b.csv", "table2b.csv", "figure1.csv", "figure2.csv"] {
        let text = std::fs::read_to_string(out.join(name)).unwrap();
        let line = text.lines().nth(1).unwrap();
        let echo = line.strip_prefix("# config: ").unwrap_or_else(|| panic!("{name}: {line}"));
        assert_eq!(parse(echo), summary["config"], "{name}");
    }
    for name in ["table1b.md", "table2b.md"] {
        let text = std::fs::read_to_string(out.join(name)).unwrap();
        let line = text.lines().next().unwrap();
        let echo = line.strip_prefix("<!-- config: ").and_then(|l| l.strip_suffix(" -->")).unwrap();
        assert_eq!(parse(echo), summary["config"], "{name}");
    }

    // 1044 months give 1033 annual rows; figure 1 drops the last five years
    let fig1 = data_rows(&std::fs::read_to_string(out.join("figure1.csv")).unwrap());
    let panel_a = fig1.iter().filter(|r| r[0] == "Panel A").count();
    assert_eq!(panel_a, 1033 - 60);

    let fig2 = data_rows(&std::fs::read_to_string(out.join("figure2.csv")).unwrap());
    let last = fig2.last().unwrap();
    assert_eq!(last[2], last[3], "last recursive beta equals the population beta");
    assert_eq!(last[1], "2012-12");

    let beta = summary["panels"][0]["beta_mdp"].as_f64().unwrap();
    assert_eq!(format!("{beta:.6}"), last[3]);
}

#[test]
fn schema_file_selects_columns() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("simple.csv");
    let series = SyntheticMarket { months: 40 * 12, ..SyntheticMarket::default() }.series(&mut rng(3, 0)).unwrap();
    let mut text = String::from("month,total,exdiv,level,bill\n");
    for r in series.records() {
        let _ = writeln!(text, "{},{},{},{},{}", r.date, r.total_return, r.exdiv_return, r.price_level, r.risk_free);
    }
    std::fs::write(&data, text).unwrap();
    let schema = dir.path().join("schema.toml");
    std::fs::write(
        &schema,
        "date = \"month\"\ntotal_return = \"total\"\nexdiv_return = \"exdiv\"\nprice_level = \"level\"\nrisk_free = \"bill\"\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    let o = mdp(
        &[
            "tables",
            "--data",
            data.to_str().unwrap(),
            "--schema",
            schema.to_str().unwrap(),
            "--start",
            "1926-01",
            "--end",
            "1965-12",
            "--panel",
            "A",
            "--tables",
            "2c",
            "--hac",
            "nw",
            "--hac-lag-rule",
            "6",
            "--out",
            out.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = data_rows(&std::fs::read_to_string(out.join("table2c.csv")).unwrap());
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r.last().unwrap() == "6"));
    assert!(!out.join("figure1.csv").exists());
}

#[test]
fn selftest_is_repeatable() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let args = ["selftest", "--seed", "5", "--replications", "60", "--out", out.to_str().unwrap()];
    let a = mdp(&args, &[]);
    let first = std::fs::read(out.join("selftest.csv")).unwrap();
    let b = mdp(&args, &[]);
    assert_eq!(a.status.code(), b.status.code());
    assert!(matches!(a.status.code(), Some(0) | Some(3)));
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(first, std::fs::read(out.join("selftest.csv")).unwrap());
    assert!(stdout(&a).contains("johansen_recovery"));
}
