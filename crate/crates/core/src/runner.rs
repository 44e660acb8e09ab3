//! Subcommand bodies: each validates its inputs, checks the output directory,
//! computes, then writes its files and a manifest.

use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::antenna::{gain_excursion, max_abs_tilt, required_length, tilt_series, ElevationPattern};
use crate::dielectric::{complex_permittivity, penetration_depth, MediumSpec, DB_PER_NEPER};
use crate::error::{Error, Result};
use crate::harness::{regression_harness, HarnessOptions, RegressionReport};
use crate::los_engine::{
    aggregate, outage_probability, segment_timeline, sweep, LosStatistics, LosTimeline, SweepAxis,
};
use crate::output::{Csv, Manifest, Opt, OutputDir};
use crate::power_budget::{eirp_dbm, pa_dc_power_mw, PaAssumptions};
use crate::scenario::Scenario;
use crate::sea_state::{realized_significant_height, AmplitudeConvention, GridSettings, SeaStateParams};

/// Files written by a run, manifest last.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub files: Vec<PathBuf>,
    pub manifest: PathBuf,
}

fn finish(dir: &OutputDir, manifest: Manifest, files: Vec<PathBuf>, started: Instant) -> Result<RunOutput> {
    let manifest = manifest.finish(dir, &files, started)?;
    Ok(RunOutput { files, manifest })
}

fn scenario_json(s: &Scenario) -> Result<serde_json::Value> {
    let mut doc = s.to_doc();
    doc.outputs = None;
    Ok(serde_json::to_value(doc)?)
}

pub fn histogram_csv(stats: &LosStatistics) -> Csv {
    let mut csv = Csv::new(&["t_k_s", "h_k", "p_t_k", "ccdf"]);
    for k in 1..=stats.n_bins() {
        let share = stats.time_share.get(k - 1).copied();
        let ccdf = stats.ccdf.get(k - 1).copied();
        csv.row(&[&stats.bin_time(k), &stats.histogram[k - 1], &Opt(share), &Opt(ccdf)]);
    }
    csv
}

pub fn outage_csv(stats: &LosStatistics) -> Result<Csv> {
    let mut csv = Csv::new(&["t_h_s", "p_out"]);
    for k in 1..=stats.n_bins() {
        let t = stats.bin_time(k);
        csv.row(&[&t, &outage_probability(stats, t)?]);
    }
    Ok(csv)
}

fn timeline_csv(timelines: &[LosTimeline]) -> Csv {
    let mut csv = Csv::new(&["realization", "t_s", "los", "x_blk_m", "eta_blk_m"]);
    for (r, tl) in timelines.iter().enumerate() {
        let mut log = tl.blocker_log.iter().flatten().peekable();
        for (j, &flag) in tl.flags.iter().enumerate() {
            let blk = match log.peek() {
                Some(b) if b.t_index == j => log.next(),
                _ => None,
            };
            csv.row(&[
                &r,
                &(j as f64 * tl.dt_s),
                &u8::from(flag),
                &Opt(blk.map(|b| b.x_blk_m)),
                &Opt(blk.map(|b| b.eta_blk_m)),
            ]);
        }
    }
    csv
}

/// `los`: stats.json, histogram.csv, outage.csv, optionally timeline.csv.
pub fn run_los(scenario: &Scenario, dir: &OutputDir, with_timelines: bool) -> Result<(LosStatistics, RunOutput)> {
    let started = Instant::now();
    let cfg = scenario.monte_carlo();
    let grid = cfg.prepare()?;
    let timelines: Vec<LosTimeline> = (0..cfg.n_realizations)
        .into_par_iter()
        .map(|i| cfg.timeline(&grid, i, with_timelines))
        .collect::<Result<_>>()?;
    let sets: Vec<_> = timelines.iter().map(segment_timeline).collect();
    let stats = aggregate(&sets, cfg.dt_s, cfg.window_s)?;

    let mut files = vec![
        dir.write_json("stats.json", &stats)?,
        dir.write("histogram.csv", &histogram_csv(&stats).into_bytes())?,
        dir.write("outage.csv", &outage_csv(&stats)?.into_bytes())?,
    ];
    if with_timelines {
        files.push(dir.write("timeline.csv", &timeline_csv(&timelines).into_bytes())?);
    }
    let manifest = Manifest::new("los", Some(cfg.master_seed), scenario_json(scenario)?);
    let out = finish(dir, manifest, files, started)?;
    Ok((stats, out))
}

/// `sweep`: one Monte Carlo run per value of `axis`, summarised in sweep.csv.
pub fn run_sweep(scenario: &Scenario, axis: SweepAxis, values: &[f64], dir: &OutputDir) -> Result<RunOutput> {
    let started = Instant::now();
    let points = sweep(axis, values, &scenario.monte_carlo())?;
    let mut csv =
        Csv::new(&[axis.label(), "p_los", "p_blos", "mu_clos_s", "sigma_clos_s", "gamma_clos_s", "n_clos_segments"]);
    for p in &points {
        let s = &p.stats;
        csv.row(&[
            &p.value,
            &s.p_los,
            &s.p_blos,
            &Opt(s.mu_clos_s),
            &Opt(s.sigma_clos_s),
            &Opt(s.gamma_clos_s),
            &s.n_clos_segments,
        ]);
    }
    let files = vec![dir.write("sweep.csv", &csv.into_bytes())?];
    let config = json!({ "scenario": scenario_json(scenario)?, "axis": axis, "values": values });
    finish(dir, Manifest::new("sweep", Some(scenario.master_seed), config), files, started)
}

#[derive(Debug, Clone, Serialize)]
pub struct WaveOptions {
    pub sea: SeaStateParams,
    pub grid: GridSettings,
    pub convention: AmplitudeConvention,
    pub master_seed: u64,
    pub n_realizations: usize,
    pub window_s: f64,
    pub dt_s: f64,
    pub positions_m: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct WaveSummary {
    pub h_s_target_m: f64,
    pub m0_target_m2: f64,
    pub m0_discrete_m2: f64,
    pub n_components: usize,
    pub f_max_hz: f64,
    pub realized_swh_m: Vec<f64>,
    pub mean_realized_swh_m: f64,
}

/// `wave`: elevation traces `wave_<r>.csv` plus wave_summary.json.
pub fn run_wave(opts: &WaveOptions, dir: &OutputDir) -> Result<(WaveSummary, RunOutput)> {
    let started = Instant::now();
    if opts.n_realizations == 0 || opts.positions_m.is_empty() {
        return Err(Error::Config("wave needs at least one realization and one position".into()));
    }
    let mut cfg = crate::los_engine::MonteCarloConfig::new(opts.sea, crate::los_engine::LinkGeometry::nominal(0.0));
    cfg.grid = opts.grid;
    cfg.convention = opts.convention;
    cfg.master_seed = opts.master_seed;
    cfg.n_realizations = opts.n_realizations;
    cfg.window_s = opts.window_s;
    cfg.dt_s = opts.dt_s;
    let grid = cfg.prepare()?;
    let nt = crate::los_engine::window_samples(opts.window_s, opts.dt_s)?;

    let mut files = Vec::new();
    let mut swh = Vec::with_capacity(opts.n_realizations);
    for r in 0..opts.n_realizations {
        let real = cfg.realization(&grid, r);
        swh.push(realized_significant_height(&real, opts.window_s, opts.dt_s)?);
        let mut csv = Csv::new(&["t_s", "x_m", "eta_m"]);
        let traces: Vec<Vec<f64>> =
            opts.positions_m.iter().map(|&x| real.elevation_lattice(x, 0.0, 1, 0.0, opts.dt_s, nt)).collect();
        for j in 0..nt {
            for (x, trace) in opts.positions_m.iter().zip(&traces) {
                csv.row(&[&(j as f64 * opts.dt_s), x, &trace[j]]);
            }
        }
        files.push(dir.write(&format!("wave_{r:04}.csv"), &csv.into_bytes())?);
    }
    let summary = WaveSummary {
        h_s_target_m: opts.sea.h_s,
        m0_target_m2: opts.sea.variance(),
        m0_discrete_m2: grid.discrete_variance(),
        n_components: grid.n_components,
        f_max_hz: grid.max_frequency_hz(),
        mean_realized_swh_m: swh.iter().sum::<f64>() / swh.len() as f64,
        realized_swh_m: swh,
    };
    files.push(dir.write_json("wave_summary.json", &summary)?);
    let out = finish(dir, Manifest::new("wave", Some(opts.master_seed), serde_json::to_value(opts)?), files, started)?;
    Ok((summary, out))
}

#[derive(Debug, Clone, Serialize)]
pub struct AntennaOptions {
    pub sea: SeaStateParams,
    pub grid: GridSettings,
    pub convention: AmplitudeConvention,
    pub master_seed: u64,
    pub realization: usize,
    pub window_s: f64,
    pub dt_s: f64,
    pub position_m: f64,
    pub antenna_height_m: f64,
    pub pattern: ElevationPattern,
    pub gain_step_deg: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AntennaSummary {
    pub max_abs_tilt_deg: f64,
    pub required_length_m: f64,
    pub min_dbi: f64,
    pub max_dbi: f64,
}

/// `antenna`: tilt.csv, gain.csv and antenna_summary.json for one realization.
pub fn run_antenna(opts: &AntennaOptions, dir: &OutputDir) -> Result<(AntennaSummary, RunOutput)> {
    let started = Instant::now();
    if !(opts.gain_step_deg > 0.0) {
        return Err(Error::Config("gain step must be > 0".into()));
    }
    let mut cfg = crate::los_engine::MonteCarloConfig::new(opts.sea, crate::los_engine::LinkGeometry::nominal(0.0));
    cfg.grid = opts.grid;
    cfg.convention = opts.convention;
    cfg.master_seed = opts.master_seed;
    cfg.window_s = opts.window_s;
    cfg.dt_s = opts.dt_s;
    let grid = cfg.prepare()?;
    let real = cfg.realization(&grid, opts.realization);
    let tilts = tilt_series(&real, opts.position_m, opts.window_s, opts.dt_s)?;
    let theta_max = max_abs_tilt(&tilts);
    let (min_dbi, max_dbi) = gain_excursion(&opts.pattern, &tilts)?;

    let mut tilt_csv = Csv::new(&["t_s", "theta_deg", "normalized_length"]);
    for s in &tilts {
        tilt_csv.row(&[&s.t_s, &s.theta_a_deg, &required_length(1.0, s.theta_a_deg)?]);
    }
    let mut gain_csv = Csv::new(&["theta_deg", "dbi"]);
    let steps = (theta_max / opts.gain_step_deg).ceil() as usize;
    for i in 0..=steps {
        let theta = (i as f64 * opts.gain_step_deg).min(theta_max);
        gain_csv.row(&[&theta, &opts.pattern.directivity(theta)?]);
    }
    let summary = AntennaSummary {
        max_abs_tilt_deg: theta_max,
        required_length_m: required_length(opts.antenna_height_m, theta_max)?,
        min_dbi,
        max_dbi,
    };
    let files = vec![
        dir.write("tilt.csv", &tilt_csv.into_bytes())?,
        dir.write("gain.csv", &gain_csv.into_bytes())?,
        dir.write_json("antenna_summary.json", &summary)?,
    ];
    let out =
        finish(dir, Manifest::new("antenna", Some(opts.master_seed), serde_json::to_value(opts)?), files, started)?;
    Ok((summary, out))
}

/// Dielectric table as CSV text.
pub fn dielectric_csv(medium: MediumSpec, frequencies_ghz: &[f64]) -> Result<Csv> {
    if frequencies_ghz.is_empty() {
        return Err(Error::Config("no frequencies given".into()));
    }
    let mut csv = Csv::new(&["f_ghz", "eps_real", "eps_imag", "delta_m", "att_db_per_m"]);
    for &f in frequencies_ghz {
        let s = complex_permittivity(medium, f)?;
        let delta = penetration_depth(&s);
        csv.row(&[&f, &s.eps_real, &s.eps_imag, &delta, &(DB_PER_NEPER / delta)]);
    }
    Ok(csv)
}

/// `dielectric`: dielectric.csv.
pub fn run_dielectric(medium: MediumSpec, frequencies_ghz: &[f64], dir: &OutputDir) -> Result<RunOutput> {
    let started = Instant::now();
    let csv = dielectric_csv(medium, frequencies_ghz)?;
    let files = vec![dir.write("dielectric.csv", &csv.into_bytes())?];
    let config = json!({ "medium": medium, "frequencies_ghz": frequencies_ghz });
    finish(dir, Manifest::new("dielectric", None, config), files, started)
}

/// What the `power` command was asked for.
#[derive(Debug, Clone, Copy)]
pub enum PowerQuery {
    DcForEirp { eirp_dbm: f64 },
    EirpForDc { pa_dc_mw: f64 },
}

/// `power`: one-line JSON answer.
pub fn power_json(query: PowerQuery, a: &PaAssumptions) -> Result<String> {
    let (eirp, dc) = match query {
        PowerQuery::DcForEirp { eirp_dbm } => (eirp_dbm, pa_dc_power_mw(eirp_dbm, a)?),
        PowerQuery::EirpForDc { pa_dc_mw } => (eirp_dbm(pa_dc_mw, a)?, pa_dc_mw),
    };
    Ok(json!({ "eirp_dbm": eirp, "pa_dc_mw": dc, "assumptions": a }).to_string())
}

/// `regress`: regress.json and regress.txt.
pub fn run_regress(opts: &HarnessOptions, dir: &OutputDir) -> Result<(RegressionReport, RunOutput)> {
    let started = Instant::now();
    let report = regression_harness(opts)?;
    let files = vec![dir.write_json("regress.json", &report)?, dir.write("regress.txt", report.render().as_bytes())?];
    let out =
        finish(dir, Manifest::new("regress", Some(opts.master_seed), serde_json::to_value(opts)?), files, started)?;
    Ok((report, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::parse_scenario;

    #[test]
    fn los_writes_declared_files() {
        let tmp = tempfile::tempdir().unwrap();
        let dir = OutputDir::prepare(tmp.path()).unwrap();
        let s =
            parse_scenario("hs_m = 0.24\ntp_s = 2\nha_m = 0\nhtwr_m = 30\nd_m = 200\nn_realizations = 3\n").unwrap();
        let (stats, out) = run_los(&s, &dir, true).unwrap();
        for f in ["stats.json", "histogram.csv", "outage.csv", "timeline.csv", "manifest.json"] {
            assert!(dir.join(f).exists(), "{f}");
        }
        assert_eq!(out.files.len(), 4);
        let hist = std::fs::read_to_string(dir.join("histogram.csv")).unwrap();
        assert_eq!(hist.lines().count(), 601);
        let timeline = std::fs::read_to_string(dir.join("timeline.csv")).unwrap();
        assert_eq!(timeline.lines().count(), 1 + 3 * 600);
        let blocked_rows = timeline.lines().skip(1).filter(|l| l.split(',').nth(2) == Some("0")).count() as f64;
        assert!((blocked_rows / 1800.0 - stats.p_blos).abs() < 1e-12);
    }

    #[test]
    fn power_line_is_json() {
        let line = power_json(PowerQuery::DcForEirp { eirp_dbm: 20.0 }, &PaAssumptions::reference()).unwrap();
        let v: serde_json::Value = serde_json::from_str(&line).unwrap();
        assert!((v["pa_dc_mw"].as_f64().unwrap() - 1250.47).abs() < 0.01);
        assert!(!line.contains('\n'));
    }

    #[test]
    fn dielectric_table() {
        let csv = dielectric_csv(MediumSpec::sea_water(20.0, 35.0), &[1.0, 2.0]).unwrap();
        assert_eq!(csv.as_str().lines().count(), 3);
        assert!(dielectric_csv(MediumSpec::ice(-5.0), &[]).is_err());
    }
}
