//! Batch front end: configuration, table and figure builders, and file output.

pub mod analysis;
pub mod config;
pub mod error;
pub mod figures;
pub mod table;
pub mod tables;

use std::path::{Path, PathBuf};

use mdp_core::selftest::{run_selftest, SelftestReport};
use rayon::prelude::*;
use serde_json::json;

use crate::analysis::Analysis;
use crate::config::{Cli, Command, RunConfig};
use crate::error::{CliError, EXIT_OK};
use crate::table::{Cell, Section, Table};

pub const NOTHING_SELECTED: &str = "nothing selected: no tables or figures requested";

#[derive(Debug, Default)]
pub struct Outcome {
    pub written: Vec<PathBuf>,
    pub notice: Option<String>,
}

/// Parses nothing itself; runs an already parsed command line and returns the exit code.
pub fn run(cli: Cli) -> i32 {
    let result = RunConfig::resolve(cli.command, &cli.args).and_then(|cfg| execute(cli.command, &cfg));
    match result {
        Ok(outcome) => {
            if let Some(n) = outcome.notice {
                println!("{n}");
            }
            for p in &outcome.written {
                println!("wrote {}", p.display());
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    match command {
        Command::Config => {
            print!("{}", toml::to_string(cfg).map_err(|e| CliError::Config(e.to_string()))?);
            Ok(Outcome::default())
        }
        Command::Selftest => selftest(cfg),
        Command::Run | Command::Tables | Command::Figures => produce(cfg),
    }
}

fn write(path: PathBuf, contents: &str, written: &mut Vec<PathBuf>) -> Result<(), CliError> {
    std::fs::write(&path, contents).map_err(|source| CliError::Write { path: path.display().to_string(), source })?;
    written.push(path);
    Ok(())
}

fn prepare_out(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Write { path: dir.display().to_string(), source })
}

/// Builds every selected table and figure; nothing is written unless all succeed.
pub fn build_outputs(cfg: &RunConfig, a: &Analysis) -> Result<(Vec<Table>, Vec<Table>), CliError> {
    let (tables, figures) = rayon::join(
        || cfg.tables.par_iter().map(|&id| tables::build(id, a, cfg)).collect::<Result<Vec<_>, _>>(),
        || cfg.figures.par_iter().map(|&id| figures::build(id, a, cfg)).collect::<Result<Vec<_>, _>>(),
    );
    Ok((tables?, figures?))
}

fn produce(cfg: &RunConfig) -> Result<Outcome, CliError> {
    if cfg.tables.is_empty() && cfg.figures.is_empty() {
        return Ok(Outcome { written: Vec::new(), notice: Some(NOTHING_SELECTED.into()) });
    }
    let analysis = Analysis::load(cfg)?;
    let (tables, figures) = build_outputs(cfg, &analysis)?;
    let echo = cfg.echo();
    prepare_out(&cfg.out)?;
    let mut written = Vec::new();
    for t in &tables {
        write(cfg.out.join(format!("table{}.csv", t.id)), &t.to_csv(&echo), &mut written)?;
        write(cfg.out.join(format!("table{}.md", t.id)), &t.to_markdown(&echo), &mut written)?;
    }
    for f in &figures {
        write(cfg.out.join(format!("{}.csv", f.id)), &f.to_csv(&echo), &mut written)?;
    }
    let summary = json!({
        "config": cfg,
        "data": analysis.source,
        "var_order": analysis.var_order,
        "vecm_lags": analysis.vecm_lags,
        "panels": analysis.panels.iter().map(|p| json!({
            "panel": p.id,
            "first": analysis.panel.dates[p.rows.0],
            "last": analysis.panel.dates[p.rows.1],
            "beta_mdp": p.ratios.beta_mdp,
            "beta_mdp_prime": p.ratios.beta_mdp_prime,
        })).collect::<Vec<_>>(),
        "tables": tables,
        "figures": figures.iter().map(|f| json!({"id": f.id, "rows": f.row_count(), "meta": f.meta})).collect::<Vec<_>>(),
    });
    let text = serde_json::to_string_pretty(&summary).expect("summary serialises") + "\n";
    write(cfg.out.join("summary.json"), &text, &mut written)?;
    Ok(Outcome { written, notice: None })
}

pub fn selftest_table(report: &SelftestReport) -> Table {
    let mut t = Table::new("selftest", "Monte Carlo property suites", &["suite", "statistic", "criterion", "replications", "result"]);
    t.note("seed", report.seed);
    let mut s = Section::new("suites");
    for r in &report.suites {
        s.rows.push(vec![
            Cell::text(&r.name),
            Cell::num(r.statistic),
            Cell::text(&r.criterion),
            Cell::Int(r.replications),
            Cell::text(if r.passed { "pass" } else { "FAIL" }),
        ]);
    }
    t.sections.push(s);
    t
}

fn selftest(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let report = run_selftest(cfg.seed, cfg.replications);
    let table = selftest_table(&report);
    let echo = cfg.echo();
    prepare_out(&cfg.out)?;
    let mut written = Vec::new();
    write(cfg.out.join("selftest.csv"), &table.to_csv(&echo), &mut written)?;
    write(cfg.out.join("selftest.md"), &table.to_markdown(&echo), &mut written)?;
    for r in &report.suites {
        println!("{:<16} {:>10.4}  {:<4}  {}", r.name, r.statistic, if r.passed { "pass" } else { "FAIL" }, r.criterion);
    }
    if report.passed() {
        Ok(Outcome { written, notice: None })
    } else {
        let failed: Vec<String> = report
            .suites
            .iter()
            .filter(|r| !r.passed)
            .map(|r| format!("{} (statistic {:.4}, wanted {})", r.name, r.statistic, r.criterion))
            .collect();
        Err(CliError::Selftest(failed.join("; ")))
    }
}
