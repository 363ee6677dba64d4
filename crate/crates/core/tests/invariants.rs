//! Property tests for the algebraic identities and an independent OLS oracle.

use mdp_core::linalg::Matrix;
use mdp_core::series::{
    annual_dividend_reinvested, annual_dividend_summed, build_annual_panel, horizon_aggregate, implied_monthly_dividend,
    MonthlyRecord, MonthlySeries, PanelField, PriceSource, ReinvestmentRate, YearMonth,
};
use mdp_core::simulate::{rng, white_noise};
use mdp_core::stats::{hac_covariance, ols, robust_covariance, HacKernel};
use proptest::prelude::*;

/// Gaussian elimination with partial pivoting on the normal equations.
fn normal_equations(x: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let k = x[0].len();
    let mut a = vec![vec![0.0; k + 1]; k];
    for (row, &yi) in x.iter().zip(y) {
        for i in 0..k {
            for j in 0..k {
                a[i][j] += row[i] * row[j];
            }
            a[i][k] += row[i] * yi;
        }
    }
    for c in 0..k {
        let piv = (c..k).max_by(|&i, &j| a[i][c].abs().partial_cmp(&a[j][c].abs()).unwrap()).unwrap();
        a.swap(c, piv);
        for r in 0..k {
            if r != c {
                let f = a[r][c] / a[c][c];
                for j in c..=k {
                    a[r][j] -= f * a[c][j];
                }
            }
        }
    }
    (0..k).map(|i| a[i][k] / a[i][i]).collect()
}

#[test]
fn ols_matches_normal_equations() {
    let mut g = rng(200, 0);
    let cols: Vec<Vec<f64>> = (0..3).map(|_| white_noise(&mut g, 20, 1.0)).collect();
    let y = white_noise(&mut g, 20, 1.0);
    let rows: Vec<Vec<f64>> = (0..20).map(|i| vec![1.0, cols[0][i], cols[1][i], cols[2][i]]).collect();
    let oracle = normal_equations(&rows, &y);
    let refs: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
    let fit = ols(&y, &Matrix::from_columns(&refs).unwrap(), true).unwrap();
    for (a, b) in fit.coefficients.iter().zip(&oracle) {
        assert!((a - b).abs() < 1e-10, "{a} vs {b}");
    }
}

fn series_from(levels: &[f64], dividends: &[f64], rf: f64) -> MonthlySeries<f64> {
    let start = YearMonth::new(1990, 1).unwrap();
    let records = (0..levels.len())
        .map(|t| {
            let prev = if t == 0 { levels[0] } else { levels[t - 1] };
            MonthlyRecord {
                date: start.plus_months(t as i64),
                total_return: (levels[t] + dividends[t]) / prev,
                exdiv_return: levels[t] / prev,
                price_level: levels[t],
                risk_free: rf,
            }
        })
        .collect();
    MonthlySeries::new(records, PriceSource::Supplied).unwrap()
}

fn path(n: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (
        prop::collection::vec(-0.08f64..0.08, n),
        prop::collection::vec(0.0f64..0.01, n),
    )
        .prop_map(|(steps, yields)| {
            let mut level = 100.0;
            let levels: Vec<f64> = steps
                .iter()
                .map(|s| {
                    level *= 1.0 + s;
                    level
                })
                .collect();
            let dividends = levels.iter().zip(&yields).map(|(p, y)| p * y).collect();
            (levels, dividends)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dividends_are_recovered((levels, dividends) in path(36)) {
        let s = series_from(&levels, &dividends, 1.003);
        for (rec, &d) in s.records().iter().zip(&dividends).skip(1) {
            let got = implied_monthly_dividend(rec).unwrap();
            prop_assert!((got - d).abs() <= 1e-10 * d.max(1e-12) + 1e-12);
        }
    }

    #[test]
    fn panel_identities((levels, dividends) in path(48), rf in 1.0f64..1.01) {
        let s = series_from(&levels, &dividends, rf);
        let panel = build_annual_panel(&s, ReinvestmentRate::TotalReturn).unwrap();
        for t in 0..panel.len() {
            prop_assert_eq!(panel.r[t], panel.re[t] + panel.rf[t]);
            // sum of the twelve implied dividends, computed here by hand
            let row = t + 11;
            let manual: f64 = (row - 11..=row).map(|i| dividends[i]).sum();
            let summed = annual_dividend_summed(&s, row).unwrap();
            prop_assert!((summed - manual).abs() <= 1e-9 * manual.max(1.0));
        }
    }

    #[test]
    fn reinvestment_never_lowers_dividends_in_rising_markets(steps in prop::collection::vec(0.0f64..0.05, 30), y in 0.001f64..0.01) {
        let mut level = 50.0;
        let levels: Vec<f64> = steps.iter().map(|s| { level *= 1.0 + s; level }).collect();
        let dividends: Vec<f64> = levels.iter().map(|p| p * y).collect();
        let s = series_from(&levels, &dividends, 1.0);
        let panel = build_annual_panel(&s, ReinvestmentRate::TotalReturn).unwrap();
        for t in 0..panel.len() {
            prop_assert!(panel.d[t] - panel.dstar[t] <= 1e-12);
        }
    }

    #[test]
    fn unit_rho_is_the_plain_sum((levels, dividends) in path(120), h in 1usize..6) {
        let s = series_from(&levels, &dividends, 1.002);
        let panel = build_annual_panel(&s, ReinvestmentRate::TotalReturn).unwrap();
        let t = 3;
        if t + 12 * h < panel.len() {
            let a = horizon_aggregate(&panel, PanelField::R, t, h, Some(1.0)).unwrap();
            let b = horizon_aggregate(&panel, PanelField::R, t, h, None).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn ols_residuals_are_orthogonal(seed in 0u64..1000) {
        let mut g = rng(seed, 1);
        let x1 = white_noise(&mut g, 40, 1.0);
        let x2 = white_noise(&mut g, 40, 3.0);
        let y = white_noise(&mut g, 40, 2.0);
        let x = Matrix::from_columns(&[&x1, &x2]).unwrap();
        let fit = ols(&y, &x, true).unwrap();
        prop_assert!((0.0..=1.0).contains(&fit.r_squared));
        let scale: f64 = y.iter().map(|v| v.abs()).sum();
        for col in [vec![1.0; 40], x1.clone(), x2.clone()] {
            let dot: f64 = col.iter().zip(&fit.residuals).map(|(a, b)| a * b).sum();
            let norm: f64 = col.iter().map(|v| v.abs()).sum();
            prop_assert!(dot.abs() <= 1e-8 * norm * scale);
        }
    }

    #[test]
    fn hac_zero_lag_and_reordering(seed in 0u64..1000, lag in 0usize..8) {
        let mut g = rng(seed, 2);
        let x1 = white_noise(&mut g, 60, 1.0);
        let x2 = white_noise(&mut g, 60, 1.0);
        let y: Vec<f64> = white_noise(&mut g, 60, 1.0).iter().zip(&x1).map(|(e, x)| e + 0.3 * x).collect();
        let xa = Matrix::from_columns(&[&x1, &x2]).unwrap();
        let xb = Matrix::from_columns(&[&x2, &x1]).unwrap();
        let fa = ols(&y, &xa, true).unwrap();
        let fb = ols(&y, &xb, true).unwrap();

        let white = robust_covariance(&fa, &xa).unwrap();
        let zero = hac_covariance(&fa, &xa, HacKernel::HansenHodrick, 0).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                prop_assert!((white[(i, j)] - zero.matrix[(i, j)]).abs() <= 1e-10);
            }
        }
        let ha = hac_covariance(&fa, &xa, HacKernel::NeweyWest, lag).unwrap().standard_errors();
        let hb = hac_covariance(&fb, &xb, HacKernel::NeweyWest, lag).unwrap().standard_errors();
        prop_assert!((ha[1] - hb[2]).abs() <= 1e-10 * ha[1]);
        prop_assert!((ha[2] - hb[1]).abs() <= 1e-10 * ha[2]);
    }
}

#[test]
fn single_dividend_compounds_geometrically() {
    let start = YearMonth::new(2000, 1).unwrap();
    let records: Vec<MonthlyRecord<f64>> = (0..12)
        .map(|t| MonthlyRecord {
            date: start.plus_months(t),
            total_return: if t == 0 { 1.01 * 1.01 } else { 1.01 },
            exdiv_return: 1.01,
            price_level: 100.0 * 1.01f64.powi(t as i32),
            risk_free: 1.0,
        })
        .collect();
    let s = MonthlySeries::new(records, PriceSource::Supplied).unwrap();
    let d0 = implied_monthly_dividend(&s.records()[0]).unwrap();
    let reinvested = annual_dividend_reinvested(&s, 11, ReinvestmentRate::PriceReturn).unwrap();
    assert!((reinvested - d0 * 1.01f64.powi(11)).abs() < 1e-10);
}
