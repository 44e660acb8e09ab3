use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    aggregate, check_time_step, los_timeline, segment_timeline, LinkGeometry, LosStatistics, LosTimeline, SegmentSet,
};
use crate::error::{Error, Result};
use crate::sea_state::{
    realization_seed, sample_realization, AmplitudeConvention, GridSettings, SeaStateParams, SpectrumGrid,
    WaveRealization,
};

/// Everything a Monte Carlo LoS run depends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloConfig {
    pub sea: SeaStateParams,
    pub grid: GridSettings,
    pub geom: LinkGeometry,
    pub window_s: f64,
    pub dt_s: f64,
    pub n_realizations: usize,
    pub master_seed: u64,
    pub convention: AmplitudeConvention,
}

impl MonteCarloConfig {
    /// 60 s windows sampled every 0.1 s, 1000 realizations.
    pub fn new(sea: SeaStateParams, geom: LinkGeometry) -> Self {
        Self {
            sea,
            grid: GridSettings::default(),
            geom,
            window_s: 60.0,
            dt_s: 0.1,
            n_realizations: 1000,
            master_seed: 0,
            convention: AmplitudeConvention::default(),
        }
    }

    pub fn with_realizations(mut self, n: usize) -> Self {
        self.n_realizations = n;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    /// Builds the spectral grid and checks every run constraint.
    pub fn prepare(&self) -> Result<SpectrumGrid> {
        if self.n_realizations == 0 {
            return Err(Error::Config("n_realizations must be >= 1".into()));
        }
        self.geom.validate()?;
        super::window_samples(self.window_s, self.dt_s)?;
        let grid = self.grid.build(&self.sea)?;
        check_time_step(self.dt_s, grid.max_frequency_hz())?;
        Ok(grid)
    }

    pub fn realization(&self, grid: &SpectrumGrid, index: usize) -> WaveRealization {
        sample_realization(grid, realization_seed(self.master_seed, index as u64), self.convention)
    }

    pub fn timeline(&self, grid: &SpectrumGrid, index: usize, log_blockers: bool) -> Result<LosTimeline> {
        los_timeline(&self.realization(grid, index), &self.geom, self.window_s, self.dt_s, log_blockers)
    }
}

/// Segments of every realization, in realization order.
pub fn simulate_segments(cfg: &MonteCarloConfig) -> Result<Vec<SegmentSet>> {
    let grid = cfg.prepare()?;
    (0..cfg.n_realizations)
        .into_par_iter()
        .map(|i| cfg.timeline(&grid, i, false).map(|tl| segment_timeline(&tl)))
        .collect()
}

/// Runs `n_realizations` independent windows and pools their statistics.
///
/// Each realization is seeded from `(master_seed, index)` and results are
/// reduced in index order, so the output does not depend on the thread count.
pub fn run_monte_carlo(cfg: &MonteCarloConfig) -> Result<LosStatistics> {
    let sets = simulate_segments(cfg)?;
    aggregate(&sets, cfg.dt_s, cfg.window_s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    PeakPeriod,
    Distance,
    AntennaHeight,
}

impl SweepAxis {
    pub fn apply(self, base: &MonteCarloConfig, value: f64) -> MonteCarloConfig {
        let mut cfg = base.clone();
        match self {
            SweepAxis::PeakPeriod => cfg.sea.t_p = value,
            SweepAxis::Distance => cfg.geom.distance_m = value,
            SweepAxis::AntennaHeight => cfg.geom.antenna_height_m = value,
        }
        cfg
    }

    pub fn label(self) -> &'static str {
        match self {
            SweepAxis::PeakPeriod => "tp_s",
            SweepAxis::Distance => "d_m",
            SweepAxis::AntennaHeight => "ha_m",
        }
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tp" | "peak_period" | "tp_s" => Ok(Self::PeakPeriod),
            "d" | "distance" | "d_m" => Ok(Self::Distance),
            "ha" | "antenna_height" | "ha_m" => Ok(Self::AntennaHeight),
            other => Err(Error::Config(format!("unknown sweep axis {other:?} (tp, distance, ha)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    pub stats: LosStatistics,
}

/// One Monte Carlo run per value, all with the base configuration's master seed.
pub fn sweep(axis: SweepAxis, values: &[f64], base: &MonteCarloConfig) -> Result<Vec<SweepPoint>> {
    if values.is_empty() {
        return Err(Error::Config("sweep needs at least one value".into()));
    }
    // validate everything before spending time on any point
    let cfgs: Vec<MonteCarloConfig> = values.iter().map(|&v| axis.apply(base, v)).collect();
    for cfg in &cfgs {
        cfg.prepare()?;
    }
    cfgs.iter().zip(values).map(|(cfg, &value)| Ok(SweepPoint { value, stats: run_monte_carlo(cfg)? })).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_value_sweep_matches_direct_run() {
        let base = MonteCarloConfig::new(SeaStateParams::new(0.5, 2.0), LinkGeometry::nominal(0.0))
            .with_realizations(8)
            .with_seed(3);
        let direct = run_monte_carlo(&base).unwrap();
        let swept = sweep(SweepAxis::PeakPeriod, &[2.0], &base).unwrap();
        assert_eq!(swept.len(), 1);
        assert_eq!(swept[0].stats, direct);
    }

    #[test]
    fn sweep_rejects_breaking_values_up_front() {
        let base =
            MonteCarloConfig::new(SeaStateParams::new(4.0, 10.0), LinkGeometry::nominal(1.0)).with_realizations(2);
        assert!(sweep(SweepAxis::PeakPeriod, &[10.0, 3.0], &base).is_err());
        assert!(sweep(SweepAxis::PeakPeriod, &[], &base).is_err());
    }

    #[test]
    fn repeatable_and_partitioned() {
        let cfg = MonteCarloConfig::new(SeaStateParams::new(0.24, 2.0), LinkGeometry::nominal(0.0))
            .with_realizations(6)
            .with_seed(11);
        let a = run_monte_carlo(&cfg).unwrap();
        let b = run_monte_carlo(&cfg).unwrap();
        assert_eq!(a, b);
        for s in simulate_segments(&cfg).unwrap() {
            assert_eq!(s.total_samples(), 600);
        }
        assert!((a.p_los + a.p_blos - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_realizations_rejected() {
        let cfg = MonteCarloConfig::new(SeaStateParams::new(0.5, 2.0), LinkGeometry::nominal(0.0)).with_realizations(0);
        assert!(run_monte_carlo(&cfg).is_err());
    }
}
