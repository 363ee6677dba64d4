//! Seeded data-generating processes for Monte Carlo checks and synthetic runs.
//!
//! Every generator draws from a ChaCha8 stream selected by `(seed, stream)`,
//! so replication `i` of a study is reproducible on its own.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::linalg::Matrix;
use crate::series::{MonthlySeries, YearMonth};

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn white_noise(rng: &mut ChaCha8Rng, n: usize, sigma: f64) -> Vec<f64> {
    (0..n).map(|_| sigma * normal(rng)).collect()
}

/// Driftless random walk started at zero.
pub fn random_walk(rng: &mut ChaCha8Rng, n: usize, sigma: f64) -> Vec<f64> {
    random_walk_with_drift(rng, n, 0.0, sigma)
}

pub fn random_walk_with_drift(rng: &mut ChaCha8Rng, n: usize, drift: f64, sigma: f64) -> Vec<f64> {
    let mut level = 0.0;
    (0..n)
        .map(|_| {
            level += drift + sigma * normal(rng);
            level
        })
        .collect()
}

/// `x_t = φ x_{t-1} + σ ε_t`, started from the stationary distribution when `|φ| < 1`.
pub fn ar1_path(rng: &mut ChaCha8Rng, n: usize, phi: f64, sigma: f64) -> Vec<f64> {
    let mut x = if phi.abs() < 1.0 { sigma / (1.0 - phi * phi).sqrt() * normal(rng) } else { 0.0 };
    (0..n)
        .map(|_| {
            x = phi * x + sigma * normal(rng);
            x
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CointegratedPair {
    pub beta: f64,
    pub constant: f64,
    /// Persistence of the equilibrium error.
    pub error_phi: f64,
    pub error_sigma: f64,
    pub price_drift: f64,
    pub price_sigma: f64,
}

impl Default for CointegratedPair {
    fn default() -> Self {
        Self { beta: 0.5, constant: 0.0, error_phi: 0.5, error_sigma: 0.1, price_drift: 0.01, price_sigma: 0.1 }
    }
}

impl CointegratedPair {
    /// `n x 2` levels `[d p]` with `p` a random walk and `d = c + β p + e`.
    pub fn levels(&self, rng: &mut ChaCha8Rng, n: usize) -> Matrix<f64> {
        let mut p = 0.0;
        let mut e = 0.0;
        let mut data = Vec::with_capacity(2 * n);
        for _ in 0..n {
            p += self.price_drift + self.price_sigma * normal(rng);
            e = self.error_phi * e + self.error_sigma * normal(rng);
            data.push(self.constant + self.beta * p + e);
            data.push(p);
        }
        Matrix::from_vec(n, 2, data).expect("2n entries")
    }
}

/// Stationary bivariate VAR(2) whose Hannan-Quinn order is two.
pub const VAR2_A1: [[f64; 2]; 2] = [[0.5, 0.1], [0.0, 0.4]];
pub const VAR2_A2: [[f64; 2]; 2] = [[0.3, 0.0], [0.1, 0.3]];

pub fn var2_levels(rng: &mut ChaCha8Rng, n: usize) -> Matrix<f64> {
    let burn = 200;
    let mut prev = [0.0; 2];
    let mut prev2 = [0.0; 2];
    let mut data = Vec::with_capacity(2 * n);
    for t in 0..n + burn {
        let mut cur = [0.0; 2];
        for (i, c) in cur.iter_mut().enumerate() {
            *c = VAR2_A1[i][0] * prev[0] + VAR2_A1[i][1] * prev[1] + VAR2_A2[i][0] * prev2[0] + VAR2_A2[i][1] * prev2[1]
                + normal(rng);
        }
        if t >= burn {
            data.extend_from_slice(&cur);
        }
        prev2 = prev;
        prev = cur;
    }
    Matrix::from_vec(n, 2, data).expect("2n entries")
}

/// ADL(1,1) error-correcting pair: `d_t = a d_{t-1} + b0 p_t + b1 p_{t-1} + σ ε_t`, `p` a random walk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdlProcess {
    pub own: f64,
    pub b0: f64,
    pub b1: f64,
    pub sigma: f64,
    pub price_sigma: f64,
}

impl AdlProcess {
    /// Own-lag sum `own` and long-run coefficient `beta`, split evenly across `b0` and `b1`.
    pub fn with_long_run(own: f64, beta: f64) -> Self {
        let total = beta * (1.0 - own);
        Self { own, b0: total / 2.0, b1: total / 2.0, sigma: 0.1, price_sigma: 0.1 }
    }

    pub fn long_run_beta(&self) -> f64 {
        (self.b0 + self.b1) / (1.0 - self.own)
    }

    pub fn simulate(&self, rng: &mut ChaCha8Rng, n: usize) -> (Vec<f64>, Vec<f64>) {
        let mut d = Vec::with_capacity(n);
        let mut p = Vec::with_capacity(n);
        let (mut dl, mut pl) = (0.0, 0.0);
        for _ in 0..n {
            let pt = pl + self.price_sigma * normal(rng);
            let dt = self.own * dl + self.b0 * pt + self.b1 * pl + self.sigma * normal(rng);
            d.push(dt);
            p.push(pt);
            dl = dt;
            pl = pt;
        }
        (d, p)
    }
}

/// Monthly market whose log dividends cointegrate with log prices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticMarket {
    pub start: YearMonth,
    pub months: usize,
    pub beta: f64,
    /// Mean log annual dividend yield at `p = 0`.
    pub constant: f64,
    pub error_phi: f64,
    pub error_sigma: f64,
    pub price_drift: f64,
    pub price_sigma: f64,
    /// Mean monthly log risk-free return.
    pub rf_mean: f64,
    pub rf_phi: f64,
    pub rf_sigma: f64,
    pub anchor: f64,
}

impl Default for SyntheticMarket {
    fn default() -> Self {
        Self {
            start: YearMonth { year: 1926, month: 1 },
            months: 1044,
            beta: 0.8,
            constant: -3.3,
            error_phi: 0.98,
            error_sigma: 0.02,
            price_drift: 0.004,
            price_sigma: 0.05,
            rf_mean: 0.003,
            rf_phi: 0.97,
            rf_sigma: 0.0005,
            anchor: 1.0,
        }
    }
}

impl SyntheticMarket {
    /// Gross monthly `(R, X, rf)` columns.
    pub fn returns(&self, rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let n = self.months;
        let mut total = Vec::with_capacity(n);
        let mut exdiv = Vec::with_capacity(n);
        let mut rf = Vec::with_capacity(n);
        let mut logp = self.anchor.ln();
        let mut e = 0.0;
        let mut rf_dev = 0.0;
        for _ in 0..n {
            let step = self.price_drift + self.price_sigma * normal(rng);
            e = self.error_phi * e + self.error_sigma * normal(rng);
            rf_dev = self.rf_phi * rf_dev + self.rf_sigma * normal(rng);
            let new_logp = logp + step;
            // monthly dividend over price, with annual log yield c + (β - 1) p + e
            let yield_monthly = (self.constant + (self.beta - 1.0) * new_logp + e).exp() / 12.0;
            let x = step.exp();
            exdiv.push(x);
            total.push(x * (1.0 + yield_monthly));
            rf.push((self.rf_mean + rf_dev).exp());
            logp = new_logp;
        }
        (total, exdiv, rf)
    }

    pub fn series(&self, rng: &mut ChaCha8Rng) -> Result<MonthlySeries<f64>> {
        let (total, exdiv, rf) = self.returns(rng);
        MonthlySeries::from_returns(self.start, &total, &exdiv, &rf, self.anchor)
    }
}
