//! Bretschneider sea states: spectrum, spectral grid and random-phase /
//! Rayleigh-amplitude wave realizations.
//!
//! Waves travel along +x (buoy at x = 0, tower at x = d) and elevation is
//! `η(x, t) = Σ a_i cos(ω_i t + k_i x + α_i)` with deep-water wavenumbers
//! `k_i = ω_i² / g`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Standard gravity (m/s²).
pub const GRAVITY: f64 = 9.80665;

/// Highest frequency the default grid always covers (Hz).
pub const DEFAULT_MAX_FREQUENCY_HZ: f64 = 1.5;
pub const DEFAULT_MIN_FREQUENCY_HZ: f64 = 0.01;
pub const DEFAULT_COMPONENTS: usize = 256;
/// The default upper cutoff is never placed below this multiple of ω_p.
pub const MIN_CUTOFF_OVER_PEAK: f64 = 3.0;

const BREAKING_RATIO: f64 = 0.8;
const CAPTURE_TOLERANCE: f64 = 0.03;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeaStateParams {
    /// Significant wave height (m).
    pub h_s: f64,
    /// Peak period (s).
    pub t_p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub water_depth_m: Option<f64>,
}

impl SeaStateParams {
    pub fn new(h_s: f64, t_p: f64) -> Self {
        Self { h_s, t_p, water_depth_m: None }
    }

    pub fn peak_omega(&self) -> f64 {
        2.0 * PI / self.t_p
    }

    /// Zeroth spectral moment, H_s² / 16.
    pub fn variance(&self) -> f64 {
        self.h_s * self.h_s / 16.0
    }

    pub fn peak_wavelength(&self) -> f64 {
        GRAVITY * self.t_p * self.t_p / (2.0 * PI)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Validation {
    Accept { deep_water_warning: bool },
    Reject(String),
}

impl Validation {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Validation::Accept { .. })
    }
}

/// Applies the wave-breaking rule `H_s ≤ 0.8·T_p` and the deep-water check.
pub fn validate_sea_state(params: &SeaStateParams) -> Result<Validation> {
    if !(params.h_s > 0.0 && params.h_s.is_finite()) || !(params.t_p > 0.0 && params.t_p.is_finite()) {
        return Err(domain(format!("sea state needs h_s > 0 and t_p > 0, got ({}, {})", params.h_s, params.t_p)));
    }
    if params.h_s > BREAKING_RATIO * params.t_p {
        return Ok(Validation::Reject(format!(
            "breaking waves: h_s = {} m exceeds 0.8·t_p = {} m",
            params.h_s,
            BREAKING_RATIO * params.t_p
        )));
    }
    let deep_water_warning = match params.water_depth_m {
        Some(h) => h <= 0.3 * params.peak_wavelength(),
        None => false,
    };
    Ok(Validation::Accept { deep_water_warning })
}

fn ensure_accepted(params: &SeaStateParams) -> Result<()> {
    match validate_sea_state(params)? {
        Validation::Accept { .. } => Ok(()),
        Validation::Reject(reason) => Err(Error::Config(reason)),
    }
}

fn density_unchecked(params: &SeaStateParams, omega: f64) -> f64 {
    let wp = params.peak_omega();
    let r = wp / omega;
    let r4 = r * r * r * r;
    5.0 / 16.0 * params.h_s * params.h_s * r4 / omega * (-1.25 * r4).exp()
}

/// Bretschneider spectral density S_η(ω) in m²/(rad/s).
pub fn spectrum_density(params: &SeaStateParams, omega: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(domain(format!("omega must be > 0, got {omega}")));
    }
    Ok(density_unchecked(params, omega))
}

/// Fraction of the total variance lying below `omega` (closed-form CDF).
pub fn cumulative_fraction(params: &SeaStateParams, omega: f64) -> f64 {
    if omega <= 0.0 {
        return 0.0;
    }
    let r = params.peak_omega() / omega;
    (-1.25 * r.powi(4)).exp()
}

/// Upper grid cutoff used when none is configured: 1.5 Hz, raised to 3·ω_p
/// for short-period seas.
pub fn default_omega_max(params: &SeaStateParams) -> f64 {
    (2.0 * PI * DEFAULT_MAX_FREQUENCY_HZ).max(MIN_CUTOFF_OVER_PEAK * params.peak_omega())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSettings {
    pub n_components: usize,
    pub omega_min: f64,
    /// `None` selects [`default_omega_max`].
    pub omega_max: Option<f64>,
}

impl Default for GridSettings {
    fn default() -> Self {
        Self { n_components: DEFAULT_COMPONENTS, omega_min: 2.0 * PI * DEFAULT_MIN_FREQUENCY_HZ, omega_max: None }
    }
}

impl GridSettings {
    pub fn build(&self, params: &SeaStateParams) -> Result<SpectrumGrid> {
        let omega_max = self.omega_max.unwrap_or_else(|| default_omega_max(params));
        build_spectrum_grid(params, self.n_components, self.omega_min, omega_max)
    }
}

/// Uniformly discretized spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumGrid {
    pub omegas: Vec<f64>,
    pub wavenumbers: Vec<f64>,
    /// μ_i = sqrt(2·S_η(ω_i)·Δω).
    pub expected_amplitudes: Vec<f64>,
    pub densities: Vec<f64>,
    pub delta_omega: f64,
    pub n_components: usize,
}

impl SpectrumGrid {
    /// Riemann sum Σ S_η(ω_i)·Δω.
    pub fn discrete_variance(&self) -> f64 {
        self.densities.iter().sum::<f64>() * self.delta_omega
    }

    pub fn max_omega(&self) -> f64 {
        *self.omegas.last().expect("grid is never empty")
    }

    pub fn max_frequency_hz(&self) -> f64 {
        self.max_omega() / (2.0 * PI)
    }
}

pub fn build_spectrum_grid(
    params: &SeaStateParams,
    n_components: usize,
    omega_min: f64,
    omega_max: f64,
) -> Result<SpectrumGrid> {
    ensure_accepted(params)?;
    if n_components < 2 {
        return Err(domain(format!("need at least 2 spectral components, got {n_components}")));
    }
    if !(omega_min > 0.0 && omega_max > omega_min && omega_max.is_finite()) {
        return Err(domain(format!(
            "grid bounds must satisfy 0 < omega_min < omega_max, got [{omega_min}, {omega_max}]"
        )));
    }
    let delta_omega = (omega_max - omega_min) / (n_components - 1) as f64;
    let omegas: Vec<f64> = (0..n_components).map(|i| omega_min + i as f64 * delta_omega).collect();
    let wavenumbers = omegas.iter().map(|w| w * w / GRAVITY).collect();
    let densities: Vec<f64> = omegas.iter().map(|&w| density_unchecked(params, w)).collect();
    let expected_amplitudes = densities.iter().map(|s| (2.0 * s * delta_omega).sqrt()).collect();
    let grid = SpectrumGrid { omegas, wavenumbers, expected_amplitudes, densities, delta_omega, n_components };
    let captured = grid.discrete_variance() / params.variance();
    if (captured - 1.0).abs() > CAPTURE_TOLERANCE {
        return Err(Error::Refinement { captured_pct: 100.0 * captured });
    }
    Ok(grid)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmplitudeConvention {
    /// Rayleigh scale sqrt(S·Δω): E[a²] = 2·S·Δω, so the realized variance is m0.
    #[default]
    EnergyConserving,
    /// Rayleigh with mean μ_i = sqrt(2·S·Δω); realized variance is (4/π)·m0.
    PaperLiteral,
}

impl AmplitudeConvention {
    /// Rayleigh scale σ for a component of expected amplitude `mu`.
    pub fn rayleigh_scale(self, mu: f64) -> f64 {
        match self {
            AmplitudeConvention::EnergyConserving => mu / std::f64::consts::SQRT_2,
            AmplitudeConvention::PaperLiteral => mu * (2.0 / PI).sqrt(),
        }
    }
}

impl std::str::FromStr for AmplitudeConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "energy_conserving" => Ok(Self::EnergyConserving),
            "paper_literal" => Ok(Self::PaperLiteral),
            other => Err(Error::Config(format!(
                "unknown amplitude convention {other:?} (expected energy_conserving or paper_literal)"
            ))),
        }
    }
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of realization `index` under `master_seed`; independent of execution order.
pub fn realization_seed(master_seed: u64, index: u64) -> u64 {
    mix64(mix64(master_seed).wrapping_add(index.wrapping_mul(0x9e37_79b9_7f4a_7c15)))
}

/// One draw of component amplitudes and phases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveRealization {
    pub omegas: Vec<f64>,
    pub wavenumbers: Vec<f64>,
    pub amplitudes: Vec<f64>,
    pub phases: Vec<f64>,
    pub seed: u64,
}

/// Draws Rayleigh amplitudes and uniform phases for every grid component.
pub fn sample_realization(grid: &SpectrumGrid, seed: u64, convention: AmplitudeConvention) -> WaveRealization {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = grid.n_components;
    let mut amplitudes = Vec::with_capacity(n);
    let mut phases = Vec::with_capacity(n);
    for &mu in &grid.expected_amplitudes {
        phases.push(2.0 * PI * rng.random::<f64>());
        // inverse CDF on (0, 1]
        let u = 1.0 - rng.random::<f64>();
        amplitudes.push(convention.rayleigh_scale(mu) * (-2.0 * u.ln()).sqrt());
    }
    WaveRealization { omegas: grid.omegas.clone(), wavenumbers: grid.wavenumbers.clone(), amplitudes, phases, seed }
}

/// Per-component phasors a_i·e^{jθ_i}, stored as separate real/imag lanes.
#[derive(Debug, Clone)]
pub(crate) struct Phasors {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl Phasors {
    pub fn sum_re(&self) -> f64 {
        self.re.iter().sum()
    }

    /// Multiplies every phasor by the matching unit rotation.
    #[inline]
    pub fn rotate(&mut self, rot: &Phasors) {
        for (((re, im), cr), ci) in self.re.iter_mut().zip(self.im.iter_mut()).zip(&rot.re).zip(&rot.im) {
            let r = *re * cr - *im * ci;
            *im = *re * ci + *im * cr;
            *re = r;
        }
    }
}

impl WaveRealization {
    /// Builds a realization from explicit components (all slices equal length).
    pub fn from_components(
        omegas: Vec<f64>,
        wavenumbers: Vec<f64>,
        amplitudes: Vec<f64>,
        phases: Vec<f64>,
    ) -> Result<Self> {
        let n = omegas.len();
        if wavenumbers.len() != n || amplitudes.len() != n || phases.len() != n {
            return Err(domain("component arrays must have equal length"));
        }
        if amplitudes.iter().any(|a| !(*a >= 0.0)) {
            return Err(domain("amplitudes must be >= 0"));
        }
        Ok(Self { omegas, wavenumbers, amplitudes, phases, seed: 0 })
    }

    pub fn n_components(&self) -> usize {
        self.amplitudes.len()
    }

    /// Σ a_i, an upper bound on |η| everywhere.
    pub fn crest_bound(&self) -> f64 {
        self.amplitudes.iter().sum()
    }

    /// Same phases, amplitudes multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.amplitudes.iter_mut().for_each(|a| *a *= factor);
        out
    }

    pub fn elevation(&self, x: f64, t: f64) -> f64 {
        self.amplitudes
            .iter()
            .zip(&self.omegas)
            .zip(&self.wavenumbers)
            .zip(&self.phases)
            .map(|(((a, w), k), p)| a * (w * t + k * x + p).cos())
            .sum()
    }

    pub(crate) fn phasors_at(&self, x: f64, t: f64) -> Phasors {
        let n = self.n_components();
        let mut re = Vec::with_capacity(n);
        let mut im = Vec::with_capacity(n);
        for i in 0..n {
            let (s, c) = (self.omegas[i] * t + self.wavenumbers[i] * x + self.phases[i]).sin_cos();
            re.push(self.amplitudes[i] * c);
            im.push(self.amplitudes[i] * s);
        }
        Phasors { re, im }
    }

    /// Unit rotations e^{j k_i dx}.
    pub(crate) fn spatial_rotation(&self, dx: f64) -> Phasors {
        let (im, re) = self.wavenumbers.iter().map(|k| (k * dx).sin_cos()).unzip();
        Phasors { re, im }
    }

    /// Elevation on the lattice `x = x0 + i·dx` (i < nx), `t = t0 + j·dt` (j < nt),
    /// returned row-major by time: `out[j * nx + i]`.
    pub fn elevation_lattice(&self, x0: f64, dx: f64, nx: usize, t0: f64, dt: f64, nt: usize) -> Vec<f64> {
        let mut out = vec![0.0; nx * nt];
        if nx == 0 {
            return out;
        }
        let rot = self.spatial_rotation(dx);
        out.par_chunks_mut(nx).enumerate().for_each(|(j, row)| {
            let mut ph = self.phasors_at(x0, t0 + j as f64 * dt);
            for (i, cell) in row.iter_mut().enumerate() {
                if i > 0 {
                    ph.rotate(&rot);
                }
                *cell = ph.sum_re();
            }
        });
        out
    }
}

pub fn surface_elevation(realization: &WaveRealization, x: f64, t: f64) -> f64 {
    realization.elevation(x, t)
}

/// 4·sqrt(variance of η(0, t)) sampled on `[0, duration_s)` every `dt_s`.
pub fn realized_significant_height(realization: &WaveRealization, duration_s: f64, dt_s: f64) -> Result<f64> {
    if !(dt_s > 0.0) {
        return Err(domain(format!("dt must be > 0, got {dt_s}")));
    }
    let n = (duration_s / dt_s).round() as usize;
    if n < 2 {
        return Err(domain("duration must cover at least two samples"));
    }
    let series: Vec<f64> = (0..n).map(|j| realization.elevation(0.0, j as f64 * dt_s)).collect();
    let mean = series.iter().sum::<f64>() / n as f64;
    let var = series.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / (n - 1) as f64;
    Ok(4.0 * var.sqrt())
}
