//! Buoy antenna tilt from the local surface slope, the antenna length needed
//! to keep a given effective height, and directivity along a tilt trajectory.

use std::f64::consts::FRAC_PI_2;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::sea_state::WaveRealization;

/// Peak directivity of a half-wave dipole (linear).
const DIPOLE_PEAK: f64 = 1.643;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TiltSample {
    pub t_s: f64,
    pub theta_a_deg: f64,
}

/// Antenna tilt `atan((η(x+h) − η(x−h)) / 2h)` every `dt_s` over the window.
///
/// `half_width_m` is the stencil half-width; 1 m is the reference definition.
pub fn tilt_series_with_stencil(
    real: &WaveRealization,
    x: f64,
    window_s: f64,
    dt_s: f64,
    half_width_m: f64,
) -> Result<Vec<TiltSample>> {
    if !(half_width_m > 0.0) {
        return Err(domain(format!("stencil half-width must be > 0, got {half_width_m}")));
    }
    let n = crate::los_engine::window_samples(window_s, dt_s)?;
    Ok((0..n)
        .map(|j| {
            let t = j as f64 * dt_s;
            let slope =
                (real.elevation(x + half_width_m, t) - real.elevation(x - half_width_m, t)) / (2.0 * half_width_m);
            TiltSample { t_s: t, theta_a_deg: slope.atan().to_degrees() }
        })
        .collect())
}

pub fn tilt_series(real: &WaveRealization, x: f64, window_s: f64, dt_s: f64) -> Result<Vec<TiltSample>> {
    tilt_series_with_stencil(real, x, window_s, dt_s, 1.0)
}

pub fn max_abs_tilt(tilts: &[TiltSample]) -> f64 {
    tilts.iter().fold(0.0, |m, s| m.max(s.theta_a_deg.abs()))
}

/// Physical length `h_a / cos θ` that keeps the tip `h_a` above the surface.
pub fn required_length(h_a: f64, theta_a_deg: f64) -> Result<f64> {
    if !(theta_a_deg.abs() < 90.0) {
        return Err(domain(format!("tilt must satisfy |θ| < 90°, got {theta_a_deg}°")));
    }
    Ok(h_a / theta_a_deg.to_radians().cos())
}

/// Half-wave dipole directivity (dBi) at `angle_from_broadside_deg`; `−∞` at the nulls.
pub fn dipole_directivity(angle_from_broadside_deg: f64) -> f64 {
    if angle_from_broadside_deg.abs() >= 90.0 {
        return f64::NEG_INFINITY;
    }
    let psi = angle_from_broadside_deg.to_radians();
    let field = (FRAC_PI_2 * psi.sin()).cos() / psi.cos();
    10.0 * (DIPOLE_PEAK * field * field).log10()
}

/// Elevation directivity sampled at increasing angles, interpolated linearly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PatternTable {
    pub angles_deg: Vec<f64>,
    pub dbi: Vec<f64>,
    /// Mirror negative angles onto the table (tables then only need `[0, 90]`).
    pub symmetric: bool,
}

impl PatternTable {
    pub fn new(angles_deg: Vec<f64>, dbi: Vec<f64>, symmetric: bool) -> Result<Self> {
        if angles_deg.len() != dbi.len() || angles_deg.len() < 2 {
            return Err(domain("pattern table needs at least two (angle, dBi) rows"));
        }
        if angles_deg.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(domain("pattern angles must be strictly increasing"));
        }
        Ok(Self { angles_deg, dbi, symmetric })
    }

    /// Parses `angle_deg, dbi` rows; a non-numeric first line is taken as a header
    /// and `#` starts a comment.
    pub fn from_csv(text: &str, symmetric: bool) -> Result<Self> {
        let mut angles = Vec::new();
        let mut values = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut cols = line.split(',').map(str::trim);
            let (a, d) = (cols.next().unwrap_or(""), cols.next().unwrap_or(""));
            match (a.parse::<f64>(), d.parse::<f64>()) {
                (Ok(a), Ok(d)) => {
                    angles.push(a);
                    values.push(d);
                }
                _ if angles.is_empty() => continue,
                _ => return Err(Error::Parse(format!("pattern line {}: {raw:?}", lineno + 1))),
            }
        }
        Self::new(angles, values, symmetric)
    }

    pub fn from_csv_file(path: &Path, symmetric: bool) -> Result<Self> {
        Self::from_csv(&std::fs::read_to_string(path)?, symmetric)
    }

    pub fn evaluate(&self, angle_deg: f64) -> Result<f64> {
        let a = if self.symmetric { angle_deg.abs() } else { angle_deg };
        let (lo, hi) = (self.angles_deg[0], *self.angles_deg.last().unwrap());
        if !(a >= lo - 1e-12 && a <= hi + 1e-12) {
            return Err(domain(format!("angle {angle_deg}° outside tabulated range [{lo}, {hi}]°")));
        }
        let a = a.clamp(lo, hi);
        let i = self.angles_deg.partition_point(|&x| x <= a).clamp(1, self.angles_deg.len() - 1);
        let (x0, x1) = (self.angles_deg[i - 1], self.angles_deg[i]);
        let (y0, y1) = (self.dbi[i - 1], self.dbi[i]);
        Ok(y0 + (y1 - y0) * (a - x0) / (x1 - x0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ElevationPattern {
    AnalyticHalfWaveDipole,
    Tabulated(PatternTable),
}

impl ElevationPattern {
    pub fn directivity(&self, angle_from_broadside_deg: f64) -> Result<f64> {
        match self {
            ElevationPattern::AnalyticHalfWaveDipole => Ok(dipole_directivity(angle_from_broadside_deg)),
            ElevationPattern::Tabulated(t) => t.evaluate(angle_from_broadside_deg),
        }
    }
}

/// Smallest and largest directivity seen along a tilt trajectory.
pub fn gain_excursion(pattern: &ElevationPattern, tilts: &[TiltSample]) -> Result<(f64, f64)> {
    if tilts.is_empty() {
        return Err(domain("tilt series is empty"));
    }
    tilts.iter().try_fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
        let g = pattern.directivity(s.theta_a_deg)?;
        Ok((lo.min(g), hi.max(g)))
    })
}

/// Two-point reference tables (0° and 17.66° tilt) for the antennas compared
/// against the dipole. These are endpoint values, not measured patterns.
pub fn reference_tables() -> Vec<(&'static str, PatternTable)> {
    let two_point = |at_zero: f64, at_max: f64| PatternTable {
        angles_deg: vec![0.0, 17.66],
        dbi: vec![at_zero, at_max],
        symmetric: true,
    };
    vec![
        ("dipole", two_point(2.1, 1.45)),
        ("monopole", two_point(0.89, 1.18)),
        ("bowtie", two_point(1.43, 1.94)),
        ("bicone", two_point(0.56, 0.66)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn flat_sea_has_no_tilt() {
        let r = WaveRealization::from_components(vec![1.0], vec![0.1], vec![0.0], vec![0.0]).unwrap();
        let tilts = tilt_series(&r, 0.0, 10.0, 0.1).unwrap();
        assert_eq!(tilts.len(), 100);
        assert!(tilts.iter().all(|s| s.theta_a_deg == 0.0));
    }

    #[test]
    fn tilt_from_frozen_ramp() {
        // η(x) = 0.1·sin(x·π/2) gives η(±1) = ±0.1 at x = 0
        let r = WaveRealization::from_components(
            vec![0.0],
            vec![std::f64::consts::FRAC_PI_2],
            vec![0.1],
            vec![-std::f64::consts::FRAC_PI_2],
        )
        .unwrap();
        let tilts = tilt_series(&r, 0.0, 1.0, 0.5).unwrap();
        assert!((tilts[0].theta_a_deg - 5.711).abs() < 1e-3);
        assert!(tilt_series_with_stencil(&r, 0.0, 1.0, 0.5, 0.0).is_err());
    }

    #[test]
    fn required_length_values() {
        assert_eq!(required_length(1.0, 0.0).unwrap(), 1.0);
        assert!((required_length(1.0, 17.66).unwrap() - 1.0494).abs() < 1e-3);
        assert!((required_length(1.0, 9.338).unwrap() - 1.0134).abs() < 1e-3);
        assert!(required_length(1.0, 90.0).is_err());
        assert!(required_length(1.0, -95.0).is_err());
    }

    #[test]
    fn dipole_values() {
        assert!((dipole_directivity(0.0) - 2.156).abs() < 0.01);
        let d = dipole_directivity(17.66);
        assert!((1.2..=1.8).contains(&d), "{d}");
        assert_eq!(dipole_directivity(33.0), dipole_directivity(-33.0));
        assert_eq!(dipole_directivity(90.0), f64::NEG_INFINITY);
    }

    #[test]
    fn excursion_with_dipole() {
        let flat: Vec<_> = (0..5).map(|i| TiltSample { t_s: i as f64, theta_a_deg: 0.0 }).collect();
        let (lo, hi) = gain_excursion(&ElevationPattern::AnalyticHalfWaveDipole, &flat).unwrap();
        assert_eq!(lo, hi);
        assert_relative_eq!(hi, 10.0 * 1.643f64.log10(), epsilon = 1e-12);

        let sweep: Vec<_> = (-10..=10).map(|i| TiltSample { t_s: 0.0, theta_a_deg: 1.766 * i as f64 }).collect();
        let (lo, hi) = gain_excursion(&ElevationPattern::AnalyticHalfWaveDipole, &sweep).unwrap();
        assert!((hi - 2.156).abs() < 0.01);
        assert!((lo - 1.549).abs() < 0.01, "{lo}");
        assert!(gain_excursion(&ElevationPattern::AnalyticHalfWaveDipole, &[]).is_err());
    }

    #[test]
    fn bicone_is_flattest_reference() {
        let tilts: Vec<_> = (-4..=4).map(|i| TiltSample { t_s: 0.0, theta_a_deg: 4.415 * i as f64 }).collect();
        let spans: Vec<(&str, f64)> = reference_tables()
            .into_iter()
            .map(|(name, t)| {
                let (lo, hi) = gain_excursion(&ElevationPattern::Tabulated(t), &tilts).unwrap();
                (name, hi - lo)
            })
            .collect();
        let flattest = spans.iter().min_by(|a, b| a.1.partial_cmp(&b.1).unwrap()).unwrap();
        assert_eq!(flattest.0, "bicone");
        let bicone = reference_tables().pop().unwrap().1;
        let (lo, hi) = gain_excursion(&ElevationPattern::Tabulated(bicone), &tilts).unwrap();
        assert_relative_eq!(lo, 0.56, epsilon = 1e-12);
        assert_relative_eq!(hi, 0.66, epsilon = 1e-12);
    }

    #[test]
    fn table_interpolation_and_coverage() {
        let t = PatternTable::from_csv("angle_deg,dbi\n0,2\n10,1\n# tail\n90,-9\n", true).unwrap();
        assert_relative_eq!(t.evaluate(5.0).unwrap(), 1.5);
        assert_relative_eq!(t.evaluate(-5.0).unwrap(), 1.5);
        assert_relative_eq!(t.evaluate(90.0).unwrap(), -9.0);
        assert_relative_eq!(t.evaluate(50.0).unwrap(), -4.0);
        let one_sided = PatternTable::new(vec![0.0, 10.0], vec![1.0, 0.0], false).unwrap();
        assert!(one_sided.evaluate(-1.0).is_err());
        let tilts = [TiltSample { t_s: 0.0, theta_a_deg: 12.0 }];
        assert!(gain_excursion(&ElevationPattern::Tabulated(one_sided), &tilts).is_err());
        assert!(PatternTable::new(vec![0.0, 0.0], vec![1.0, 1.0], true).is_err());
        assert!(PatternTable::from_csv("0,1\nbad,row\n", true).is_err());
    }
}
