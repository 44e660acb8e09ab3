//! Regression harness: the nine reference sea-state rows under nominal
//! geometry, band checks on the rows that have them, a tower-height
//! sensitivity table and the monotonicity suite.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::los_engine::{los_timeline, run_monte_carlo, LinkGeometry, MonteCarloConfig, SweepAxis};
use crate::sea_state::SeaStateParams;

/// Reference figures for one row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceRow {
    pub h_s: f64,
    pub t_p: f64,
    pub h_a: f64,
    pub p_los: f64,
    pub mu_clos_s: f64,
    pub sigma_clos_s: f64,
    pub gamma_clos_s: f64,
}

const fn row(h_s: f64, t_p: f64, h_a: f64, p_los: f64, mu: f64, sigma: f64, gamma: f64) -> ReferenceRow {
    ReferenceRow { h_s, t_p, h_a, p_los, mu_clos_s: mu, sigma_clos_s: sigma, gamma_clos_s: gamma }
}

pub const REFERENCE_ROWS: [ReferenceRow; 9] = [
    row(0.12, 2.0, 0.0, 0.98595, 12.98, 13.07, 1.1),
    row(0.12, 1.0, 0.0, 0.98591, 9.61, 10.78, 0.8),
    row(0.12, 1.0, 0.1, 0.99999, 59.88, 2.25, 60.0),
    row(0.24, 2.0, 0.0, 0.8140, 1.742, 1.626, 0.9),
    row(0.67, 2.8, 0.4, 0.9548, 7.87, 9.16, 0.1),
    row(0.67, 2.8, 0.8, 0.9992, 51.37, 17.09, 60.0),
    row(2.0, 9.0, 1.0, 0.9924, 41.21, 21.07, 60.0),
    row(4.0, 10.0, 1.0, 0.8422, 8.78, 7.88, 4.6),
    row(6.0, 14.0, 1.0, 0.8346, 10.55, 8.94, 6.1),
];

/// A pass/fail condition on a row's statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BandCheck {
    PLosWithin { lo: f64, hi: f64 },
    PLosAtLeast { min: f64 },
    GammaEquals { value: f64 },
    MuWithin { lo: f64, hi: f64 },
}

impl BandCheck {
    fn evaluate(&self, s: &RowSummary) -> bool {
        const EPS: f64 = 1e-9;
        match *self {
            BandCheck::PLosWithin { lo, hi } => s.p_los >= lo && s.p_los <= hi,
            BandCheck::PLosAtLeast { min } => s.p_los >= min,
            BandCheck::GammaEquals { value } => s.gamma_clos_s.is_some_and(|g| (g - value).abs() < EPS),
            BandCheck::MuWithin { lo, hi } => s.mu_clos_s.is_some_and(|m| m >= lo && m <= hi),
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            BandCheck::PLosWithin { lo, hi } => format!("P_LoS in [{lo}, {hi}]"),
            BandCheck::PLosAtLeast { min } => format!("P_LoS >= {min}"),
            BandCheck::GammaEquals { value } => format!("gamma = {value} s"),
            BandCheck::MuWithin { lo, hi } => format!("mu in [{lo}, {hi}] s"),
        }
    }
}

/// Band checks for row `index` of [`REFERENCE_ROWS`]; empty for report-only rows.
pub fn band_checks(index: usize) -> Vec<BandCheck> {
    match index {
        0 => vec![BandCheck::PLosWithin { lo: 0.96, hi: 1.0 }],
        2 => vec![BandCheck::PLosAtLeast { min: 0.999 }, BandCheck::GammaEquals { value: 60.0 }],
        3 => vec![BandCheck::PLosWithin { lo: 0.70, hi: 0.92 }],
        5 => vec![BandCheck::PLosAtLeast { min: 0.99 }, BandCheck::MuWithin { lo: 40.0, hi: 58.0 }],
        7 => vec![BandCheck::PLosWithin { lo: 0.74, hi: 0.94 }],
        _ => Vec::new(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RowSummary {
    pub p_los: f64,
    pub mu_clos_s: Option<f64>,
    pub sigma_clos_s: Option<f64>,
    pub gamma_clos_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub check: BandCheck,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowResult {
    pub index: usize,
    pub reference: ReferenceRow,
    pub simulated: RowSummary,
    pub checks: Vec<CheckOutcome>,
}

impl RowResult {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityPoint {
    pub index: usize,
    pub tower_height_m: f64,
    pub p_los: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarnessOptions {
    pub n_realizations: usize,
    pub master_seed: u64,
    /// Rows to run; all nine by default.
    pub rows: Vec<usize>,
    pub tower_heights_m: Vec<f64>,
    pub sensitivity_realizations: usize,
    pub monotonicity_realizations: usize,
}

impl Default for HarnessOptions {
    fn default() -> Self {
        Self {
            n_realizations: 1000,
            master_seed: 0,
            rows: (0..REFERENCE_ROWS.len()).collect(),
            tower_heights_m: vec![10.0, 20.0, 30.0, 50.0],
            sensitivity_realizations: 200,
            monotonicity_realizations: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionReport {
    pub options: HarnessOptions,
    pub rows: Vec<RowResult>,
    pub sensitivity: Vec<SensitivityPoint>,
    pub monotonicity: Vec<MonotonicityOutcome>,
}

impl RegressionReport {
    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(RowResult::passed) && self.monotonicity.iter().all(|m| m.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let fmt_opt = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.2}"));
        let _ = writeln!(
            out,
            "rows: d = 1000 m, h_twr = 30 m, {} realizations, seed {}",
            self.options.n_realizations, self.options.master_seed
        );
        let _ = writeln!(
            out,
            "{:>5} {:>5} {:>4}  {:>8} {:>8}  {:>6} {:>6}  {:>6} {:>6}  {:>5} {:>5}  verdict",
            "H_s", "T_p", "h_a", "P_LoS", "ref", "mu", "ref", "sigma", "ref", "gamma", "ref"
        );
        for r in &self.rows {
            let c = &r.reference;
            let s = &r.simulated;
            let verdict = if r.checks.is_empty() {
                "report".to_string()
            } else {
                r.checks
                    .iter()
                    .map(|o| format!("{}: {}", o.check.describe(), if o.passed { "pass" } else { "FAIL" }))
                    .collect::<Vec<_>>()
                    .join("; ")
            };
            let _ = writeln!(
                out,
                "{:>5} {:>5} {:>4}  {:>8.5} {:>8.5}  {:>6} {:>6.2}  {:>6} {:>6.2}  {:>5} {:>5.1}  {verdict}",
                c.h_s,
                c.t_p,
                c.h_a,
                s.p_los,
                c.p_los,
                fmt_opt(s.mu_clos_s),
                c.mu_clos_s,
                fmt_opt(s.sigma_clos_s),
                c.sigma_clos_s,
                fmt_opt(s.gamma_clos_s),
                c.gamma_clos_s,
            );
        }
        if !self.sensitivity.is_empty() {
            let _ = writeln!(out, "\nP_LoS vs tower height ({} realizations)", self.options.sensitivity_realizations);
            for &i in &self.options.rows {
                let c = &REFERENCE_ROWS[i];
                let cells: Vec<String> = self
                    .sensitivity
                    .iter()
                    .filter(|p| p.index == i)
                    .map(|p| format!("{}m {:.4}", p.tower_height_m, p.p_los))
                    .collect();
                let _ = writeln!(out, "  ({}, {}, {})  ref {:.4}  {}", c.h_s, c.t_p, c.h_a, c.p_los, cells.join("  "));
            }
        }
        if !self.monotonicity.is_empty() {
            let _ = writeln!(out, "\nmonotonicity");
            for m in &self.monotonicity {
                let _ = writeln!(out, "  {}: {} ({})", m.name, if m.passed { "pass" } else { "FAIL" }, m.detail);
            }
        }
        out
    }
}

fn row_config(r: &ReferenceRow, tower_height_m: f64, n: usize, seed: u64) -> MonteCarloConfig {
    let geom = LinkGeometry::new(1000.0, tower_height_m, r.h_a);
    MonteCarloConfig::new(SeaStateParams::new(r.h_s, r.t_p), geom).with_realizations(n).with_seed(seed)
}

pub fn run_row(index: usize, n_realizations: usize, master_seed: u64) -> Result<RowResult> {
    let reference = REFERENCE_ROWS[index];
    let stats = run_monte_carlo(&row_config(&reference, 30.0, n_realizations, master_seed))?;
    let simulated = RowSummary {
        p_los: stats.p_los,
        mu_clos_s: stats.mu_clos_s,
        sigma_clos_s: stats.sigma_clos_s,
        gamma_clos_s: stats.gamma_clos_s,
    };
    let checks = band_checks(index)
        .into_iter()
        .map(|check| CheckOutcome { check, passed: check.evaluate(&simulated) })
        .collect();
    Ok(RowResult { index, reference, simulated, checks })
}

pub fn tower_height_sensitivity(rows: &[usize], heights: &[f64], n: usize, seed: u64) -> Result<Vec<SensitivityPoint>> {
    let mut out = Vec::new();
    for &index in rows {
        for &h in heights {
            let stats = run_monte_carlo(&row_config(&REFERENCE_ROWS[index], h, n, seed))?;
            out.push(SensitivityPoint { index, tower_height_m: h, p_los: stats.p_los });
        }
    }
    Ok(out)
}

/// Raising the antenna must never turn a clear sample into a blocked one,
/// realization by realization.
pub fn antenna_height_check(n: usize, seed: u64) -> Result<MonotonicityOutcome> {
    let low = MonteCarloConfig::new(SeaStateParams::new(0.5, 2.0), LinkGeometry::nominal(0.0))
        .with_realizations(n)
        .with_seed(seed);
    let grid = low.prepare()?;
    let high_geom = LinkGeometry::nominal(1.0);
    let mut flips = 0usize;
    let mut gained = 0usize;
    for i in 0..n {
        let real = low.realization(&grid, i);
        let a = los_timeline(&real, &low.geom, low.window_s, low.dt_s, false)?;
        let b = los_timeline(&real, &high_geom, low.window_s, low.dt_s, false)?;
        for (&x, &y) in a.flags.iter().zip(&b.flags) {
            flips += usize::from(x && !y);
            gained += usize::from(!x && y);
        }
    }
    Ok(MonotonicityOutcome {
        name: "h_a 0 -> 1 m never blocks a clear sample (0.5 m, 2 s)".into(),
        passed: flips == 0,
        detail: format!("{flips} LoS->blocked flips, {gained} samples cleared, {n} realizations"),
    })
}

fn sweep_check(
    name: &str,
    axis: SweepAxis,
    values: &[f64],
    base: &MonteCarloConfig,
    nondecreasing: bool,
) -> Result<MonotonicityOutcome> {
    let points = crate::los_engine::sweep(axis, values, base)?;
    let p: Vec<f64> = points.iter().map(|pt| pt.stats.p_los).collect();
    let passed = p.windows(2).all(|w| if nondecreasing { w[1] >= w[0] } else { w[1] <= w[0] });
    let detail =
        values.iter().zip(&p).map(|(v, p)| format!("{}={v}: {p:.4}", axis.label())).collect::<Vec<_>>().join(", ");
    Ok(MonotonicityOutcome { name: name.into(), passed, detail })
}

pub fn peak_period_check(n: usize, seed: u64) -> Result<MonotonicityOutcome> {
    let base = MonteCarloConfig::new(SeaStateParams::new(4.0, 10.0), LinkGeometry::nominal(1.0))
        .with_realizations(n)
        .with_seed(seed);
    sweep_check(
        "P_LoS nondecreasing in T_p (4 m, h_a 1 m)",
        SweepAxis::PeakPeriod,
        &[10.0, 12.0, 14.0, 16.0],
        &base,
        true,
    )
}

pub fn distance_check(n: usize, seed: u64) -> Result<MonotonicityOutcome> {
    let base = MonteCarloConfig::new(SeaStateParams::new(0.5, 2.0), LinkGeometry::nominal(0.0))
        .with_realizations(n)
        .with_seed(seed);
    sweep_check(
        "P_LoS nonincreasing in d (0.5 m, 2 s, h_a 0)",
        SweepAxis::Distance,
        &[250.0, 500.0, 1000.0, 2000.0],
        &base,
        false,
    )
}

pub fn monotonicity_suite(n: usize, seed: u64) -> Result<Vec<MonotonicityOutcome>> {
    Ok(vec![antenna_height_check(n, seed)?, peak_period_check(n, seed)?, distance_check(n, seed)?])
}

pub fn regression_harness(options: &HarnessOptions) -> Result<RegressionReport> {
    let rows = options
        .rows
        .iter()
        .map(|&i| run_row(i, options.n_realizations, options.master_seed))
        .collect::<Result<Vec<_>>>()?;
    let sensitivity = if options.sensitivity_realizations > 0 {
        tower_height_sensitivity(
            &options.rows,
            &options.tower_heights_m,
            options.sensitivity_realizations,
            options.master_seed,
        )?
    } else {
        Vec::new()
    };
    let monotonicity = if options.monotonicity_realizations > 0 {
        monotonicity_suite(options.monotonicity_realizations, options.master_seed)?
    } else {
        Vec::new()
    };
    Ok(RegressionReport { options: options.clone(), rows, sensitivity, monotonicity })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_banded_row_is_accepted_by_the_wave_model() {
        for (i, r) in REFERENCE_ROWS.iter().enumerate() {
            let cfg = row_config(r, 30.0, 1, 0);
            assert!(cfg.prepare().is_ok(), "row {i}");
        }
        assert_eq!((0..9).filter(|&i| !band_checks(i).is_empty()).count(), 5);
    }

    #[test]
    fn checks_evaluate() {
        let s = RowSummary { p_los: 0.95, mu_clos_s: Some(50.0), sigma_clos_s: None, gamma_clos_s: Some(60.0) };
        assert!(BandCheck::PLosWithin { lo: 0.9, hi: 1.0 }.evaluate(&s));
        assert!(!BandCheck::PLosAtLeast { min: 0.99 }.evaluate(&s));
        assert!(BandCheck::GammaEquals { value: 60.0 }.evaluate(&s));
        assert!(!BandCheck::MuWithin { lo: 51.0, hi: 58.0 }.evaluate(&s));
    }

    #[test]
    fn small_report_renders() {
        let opts = HarnessOptions {
            n_realizations: 2,
            rows: vec![2],
            tower_heights_m: vec![30.0],
            sensitivity_realizations: 1,
            monotonicity_realizations: 0,
            ..Default::default()
        };
        let report = regression_harness(&opts).unwrap();
        assert_eq!(report.rows.len(), 1);
        assert_eq!(report.sensitivity.len(), 1);
        let text = report.render();
        assert!(text.contains("0.12"));
    }
}
