//! Wave-blocking search along the buoy–tower transect and the LoS timeline.
//!
//! The ray from the buoy antenna (height `η(0,t) + h_a`) to the tower top
//! (height `h_twr` at `x = d`) is blocked at `x` when
//!
//! ```text
//! (h_twr − (η(0,t) + h_a)) / d  >  (h_twr − η(x,t)) / (d − x)
//! ```
//!
//! i.e. the surface at `x` pokes above the ray.

mod monte_carlo;
mod stats;

pub use monte_carlo::{run_monte_carlo, simulate_segments, sweep, MonteCarloConfig, SweepAxis, SweepPoint};
pub use stats::{
    aggregate, clos_ccdf, clos_time_share, outage_probability, segment_timeline, LosStatistics, SegmentSet,
};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::sea_state::{Phasors, WaveRealization};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkGeometry {
    pub distance_m: f64,
    pub tower_height_m: f64,
    /// Antenna tip above the local sea surface.
    pub antenna_height_m: f64,
    pub search_step_m: f64,
}

impl LinkGeometry {
    pub fn new(distance_m: f64, tower_height_m: f64, antenna_height_m: f64) -> Self {
        Self { distance_m, tower_height_m, antenna_height_m, search_step_m: 1.0 }
    }

    /// 1 km transect to a 30 m tower.
    pub fn nominal(antenna_height_m: f64) -> Self {
        Self::new(1000.0, 30.0, antenna_height_m)
    }

    pub fn validate(&self) -> Result<()> {
        let Self { distance_m: d, tower_height_m: h, antenna_height_m: ha, search_step_m: dx } = *self;
        if !(d > 0.0 && d.is_finite()) {
            return Err(domain(format!("distance must be > 0 m, got {d}")));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(domain(format!("tower height must be > 0 m, got {h}")));
        }
        if !(ha >= 0.0) {
            return Err(domain(format!("antenna height must be >= 0 m, got {ha}")));
        }
        if ha >= h {
            return Err(domain(format!("antenna height {ha} m must be below the tower height {h} m")));
        }
        if !(dx > 0.0) || dx > d / 10.0 {
            return Err(domain(format!("search step must lie in (0, d/10] = (0, {}] m, got {dx}", d / 10.0)));
        }
        Ok(())
    }

    /// Number of lattice points `x_n = n·Δx` strictly inside (0, d).
    pub fn n_search_points(&self) -> usize {
        let n = (self.distance_m / self.search_step_m).ceil() as usize;
        if n as f64 * self.search_step_m >= self.distance_m {
            n.saturating_sub(1)
        } else {
            n
        }
    }

    /// Left side of the blocking inequality: slope of the buoy-to-tower ray.
    #[inline]
    fn ray_slope(&self, eta_buoy: f64) -> f64 {
        (self.tower_height_m - (eta_buoy + self.antenna_height_m)) / self.distance_m
    }

    #[inline]
    fn blocks(&self, ray_slope: f64, x: f64, eta_x: f64) -> bool {
        ray_slope > (self.tower_height_m - eta_x) / (self.distance_m - x)
    }
}

/// Direct evaluation of the blocking criterion at one point.
pub fn is_blocked(real: &WaveRealization, geom: &LinkGeometry, t: f64, x: f64) -> Result<bool> {
    if !(x > 0.0 && x < geom.distance_m) {
        return Err(domain(format!("x = {x} m outside (0, {}) m", geom.distance_m)));
    }
    let slope = geom.ray_slope(real.elevation(0.0, t));
    Ok(geom.blocks(slope, x, real.elevation(x, t)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Blocker {
    pub x_m: f64,
    pub eta_m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockerRecord {
    pub t_index: usize,
    pub x_blk_m: f64,
    pub eta_blk_m: f64,
}

/// Reusable scanner for one (realization, geometry) pair.
///
/// Elevations along the lattice come from per-component phase rotations.
/// The scan stops as soon as the ray has climbed above the crest bound
/// `Σ a_i`, past which no surface point can reach it.
pub(crate) struct BlockerSearch<'a> {
    real: &'a WaveRealization,
    geom: LinkGeometry,
    rotation: Phasors,
    crest_cap: f64,
    n_points: usize,
}

impl<'a> BlockerSearch<'a> {
    pub fn new(real: &'a WaveRealization, geom: &LinkGeometry) -> Self {
        let crest = real.crest_bound();
        Self {
            real,
            geom: *geom,
            rotation: real.spatial_rotation(geom.search_step_m),
            crest_cap: crest + 1e-9 * (1.0 + crest),
            n_points: geom.n_search_points(),
        }
    }

    pub fn first_blocker(&self, t: f64) -> Option<Blocker> {
        let geom = &self.geom;
        let mut ph = self.real.phasors_at(0.0, t);
        let slope = geom.ray_slope(ph.sum_re());
        let d = geom.distance_m;
        for n in 1..=self.n_points {
            let x = n as f64 * geom.search_step_m;
            if slope > 0.0 && geom.tower_height_m - slope * (d - x) >= self.crest_cap {
                return None;
            }
            ph.rotate(&self.rotation);
            let eta = ph.sum_re();
            if geom.blocks(slope, x, eta) {
                return Some(Blocker { x_m: x, eta_m: eta });
            }
        }
        None
    }
}

/// Scans `x = Δx, 2Δx, … < d` and returns the nearest point that blocks the ray.
pub fn find_first_blocker(real: &WaveRealization, geom: &LinkGeometry, t: f64) -> Option<Blocker> {
    BlockerSearch::new(real, geom).first_blocker(t)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LosTimeline {
    pub dt_s: f64,
    /// `true` where the link has line of sight.
    pub flags: Vec<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocker_log: Option<Vec<BlockerRecord>>,
}

impl LosTimeline {
    pub fn len(&self) -> usize {
        self.flags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flags.is_empty()
    }

    pub fn window_s(&self) -> f64 {
        self.flags.len() as f64 * self.dt_s
    }
}

/// Number of samples in a window, checking that `dt` divides it.
pub fn window_samples(window_s: f64, dt_s: f64) -> Result<usize> {
    if !(dt_s > 0.0) || !(window_s > 0.0) {
        return Err(Error::Config(format!("window ({window_s} s) and dt ({dt_s} s) must be > 0")));
    }
    let n = (window_s / dt_s).round();
    if n < 1.0 || (n * dt_s - window_s).abs() > 1e-9 {
        return Err(Error::Config(format!("dt {dt_s} s does not divide the window {window_s} s")));
    }
    Ok(n as usize)
}

/// Rejects time steps that cannot resolve the highest wave frequency.
pub fn check_time_step(dt_s: f64, max_frequency_hz: f64) -> Result<()> {
    if dt_s >= 1.0 / max_frequency_hz {
        return Err(Error::Config(format!(
            "dt = {dt_s} s must be smaller than 1/f_N = {:.4} s (highest wave frequency {max_frequency_hz:.3} Hz)",
            1.0 / max_frequency_hz
        )));
    }
    Ok(())
}

/// Evaluates the link at `t = j·dt`, `j = 0..window/dt`.
pub fn los_timeline(
    real: &WaveRealization,
    geom: &LinkGeometry,
    window_s: f64,
    dt_s: f64,
    log_blockers: bool,
) -> Result<LosTimeline> {
    geom.validate()?;
    let n = window_samples(window_s, dt_s)?;
    let f_max = real.omegas.iter().fold(0.0f64, |m, w| m.max(w.abs())) / (2.0 * std::f64::consts::PI);
    if f_max > 0.0 {
        check_time_step(dt_s, f_max)?;
    }
    let search = BlockerSearch::new(real, geom);
    let mut flags = Vec::with_capacity(n);
    let mut log = log_blockers.then(Vec::new);
    for j in 0..n {
        match search.first_blocker(j as f64 * dt_s) {
            None => flags.push(true),
            Some(b) => {
                flags.push(false);
                if let Some(log) = log.as_mut() {
                    log.push(BlockerRecord { t_index: j, x_blk_m: b.x_m, eta_blk_m: b.eta_m });
                }
            }
        }
    }
    Ok(LosTimeline { dt_s, flags, blocker_log: log })
}
