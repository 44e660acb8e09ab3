//! Complex relative permittivity of pure water, sea water and ice (ITU-R
//! P.527 surface model), with penetration depth and slab attenuation.
//!
//! All routines are pure functions of their inputs.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Speed of light over 1e9, so that `C_OVER_GHZ / f_ghz` is a wavelength in metres.
const C_OVER_GHZ: f64 = 0.299_792_458;

/// 20·log10(e): dB per neper of field amplitude.
pub const DB_PER_NEPER: f64 = 8.685_889_638_065_035;

pub const MIN_FREQUENCY_GHZ: f64 = 0.1;
pub const MAX_FREQUENCY_GHZ: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MediumKind {
    PureWater,
    SeaWater,
    Ice,
}

/// A surface medium at a given temperature (°C) and salinity (g/kg).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumSpec {
    pub kind: MediumKind,
    pub temperature_celsius: f64,
    /// Only read for [`MediumKind::SeaWater`].
    pub salinity_ppt: f64,
}

impl MediumSpec {
    pub fn pure_water(temperature_celsius: f64) -> Self {
        Self { kind: MediumKind::PureWater, temperature_celsius, salinity_ppt: 0.0 }
    }

    pub fn sea_water(temperature_celsius: f64, salinity_ppt: f64) -> Self {
        Self { kind: MediumKind::SeaWater, temperature_celsius, salinity_ppt }
    }

    pub fn ice(temperature_celsius: f64) -> Self {
        Self { kind: MediumKind::Ice, temperature_celsius, salinity_ppt: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        let t = self.temperature_celsius;
        if !t.is_finite() || t <= -273.15 {
            return Err(domain(format!("temperature {t} °C is not a physical temperature")));
        }
        match self.kind {
            MediumKind::Ice if t > 0.0 => Err(domain(format!("ice requires temperature <= 0 °C, got {t} °C"))),
            MediumKind::SeaWater if !(self.salinity_ppt >= 0.0) || !self.salinity_ppt.is_finite() => {
                Err(domain(format!("salinity must be >= 0 g/kg, got {}", self.salinity_ppt)))
            }
            _ => Ok(()),
        }
    }
}

/// Complex relative permittivity ε′ − jε″ at one frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumSample {
    pub eps_real: f64,
    pub eps_imag: f64,
    pub frequency_ghz: f64,
}

impl MediumSample {
    pub fn wavelength_m(&self) -> f64 {
        C_OVER_GHZ / self.frequency_ghz
    }
}

/// Relaxation parameters of pure water at temperature `t` (°C).
struct Debye {
    eps_s: f64,
    eps_1: f64,
    eps_inf: f64,
    f1: f64,
    f2: f64,
}

fn theta(t: f64) -> f64 {
    300.0 / (t + 273.15) - 1.0
}

fn pure_water_debye(t: f64) -> Debye {
    let th = theta(t);
    let eps_s = 77.6 + 103.3 * th;
    let f1 = 20.20 - 146.4 * th + 316.0 * th * th;
    Debye { eps_s, eps_1: 0.0671 * eps_s, eps_inf: 3.52 - 7.52 * th, f1, f2: 39.8 * f1 }
}

/// Double-Debye response plus an optional ionic conductivity term.
fn double_debye(d: &Debye, f: f64, sigma: f64) -> (f64, f64) {
    let r1 = f / d.f1;
    let r2 = f / d.f2;
    let den1 = 1.0 + r1 * r1;
    let den2 = 1.0 + r2 * r2;
    let re = (d.eps_s - d.eps_1) / den1 + (d.eps_1 - d.eps_inf) / den2 + d.eps_inf;
    let mut im = r1 * (d.eps_s - d.eps_1) / den1 + r2 * (d.eps_1 - d.eps_inf) / den2;
    if sigma != 0.0 {
        im += 18.0 * sigma / f;
    }
    (re, im)
}

/// Ionic conductivity of sea water (S/m).
fn sea_water_conductivity(t: f64, s: f64) -> f64 {
    let sigma_35 = 2.903602 + 8.607e-2 * t + 4.738817e-4 * t * t - 2.991e-6 * t.powi(3) + 4.3047e-9 * t.powi(4);
    let r_15 = s * (37.5109 + 5.45216 * s + 1.4409e-2 * s * s) / (1004.75 + 182.283 * s + s * s);
    let alpha_0 = (6.9431 + 3.2841 * s - 9.9486e-2 * s * s) / (84.850 + 69.024 * s + s * s);
    let alpha_1 = 49.843 - 0.2276 * s + 0.198e-2 * s * s;
    let r_t15 = 1.0 + alpha_0 * (t - 15.0) / (alpha_1 + t);
    sigma_35 * r_15 * r_t15
}

fn sea_water_debye(t: f64, s: f64) -> Debye {
    let pw = pure_water_debye(t);
    Debye {
        eps_s: pw.eps_s * (-3.56417e-3 * s + 4.74868e-6 * s * s + 1.15574e-5 * t * s).exp(),
        eps_1: pw.eps_1 * (-6.28908e-3 * s + 1.76032e-4 * s * s - 9.22144e-5 * t * s).exp(),
        eps_inf: pw.eps_inf * (1.0 + s * (-2.04265e-3 + 1.57883e-4 * t)),
        f1: pw.f1 * (1.0 + s * (2.39357e-3 - 3.13530e-5 * t + 2.52477e-7 * t * t)),
        f2: pw.f2 * (1.0 + s * (-1.99723e-2 + 1.81176e-4 * t)),
    }
}

fn ice_permittivity(t: f64, f: f64) -> (f64, f64) {
    let th = theta(t);
    let tk = t + 273.15;
    let a = (0.00504 + 0.0062 * th) * (-22.1 * th).exp();
    let tau = 335.0 / tk;
    let e = (-tau).exp();
    let b = 0.0207 / tk * e / ((e - 1.0) * (e - 1.0)) + 1.16e-11 * f * f + (-9.963 + 0.0372 * t).exp();
    (3.1884 + 0.00091 * t, a / f + b * f)
}

/// Complex relative permittivity of `medium` at `frequency_ghz` ∈ [0.1, 100] GHz.
pub fn complex_permittivity(medium: MediumSpec, frequency_ghz: f64) -> Result<MediumSample> {
    if !(MIN_FREQUENCY_GHZ..=MAX_FREQUENCY_GHZ).contains(&frequency_ghz) {
        return Err(domain(format!(
            "frequency {frequency_ghz} GHz outside supported range \
             [{MIN_FREQUENCY_GHZ}, {MAX_FREQUENCY_GHZ}] GHz"
        )));
    }
    medium.validate()?;
    let t = medium.temperature_celsius;
    let f = frequency_ghz;
    let (eps_real, eps_imag) = match medium.kind {
        MediumKind::PureWater => double_debye(&pure_water_debye(t), f, 0.0),
        MediumKind::SeaWater => {
            let s = medium.salinity_ppt;
            double_debye(&sea_water_debye(t, s), f, sea_water_conductivity(t, s))
        }
        MediumKind::Ice => ice_permittivity(t, f),
    };
    Ok(MediumSample { eps_real, eps_imag, frequency_ghz })
}

/// Depth (m) at which the field amplitude falls to 1/e. Lossless media give `+∞`.
pub fn penetration_depth(sample: &MediumSample) -> f64 {
    let (re, im) = (sample.eps_real, sample.eps_imag);
    if im == 0.0 {
        return f64::INFINITY;
    }
    // |ε| − ε′ rewritten to avoid cancellation when ε″ ≪ ε′.
    let modulus = re.hypot(im);
    let gap = if re > 0.0 { im * im / (modulus + re) } else { modulus - re };
    sample.wavelength_m() / (2.0 * std::f64::consts::PI) * (2.0 / gap).sqrt()
}

/// Amplitude attenuation in dB through `thickness_m` of a medium with the given
/// penetration depth.
pub fn attenuation_from_depth(penetration_depth_m: f64, thickness_m: f64) -> Result<f64> {
    if !(thickness_m >= 0.0) {
        return Err(domain(format!("thickness must be >= 0 m, got {thickness_m}")));
    }
    if thickness_m == 0.0 {
        return Ok(0.0);
    }
    Ok(DB_PER_NEPER * thickness_m / penetration_depth_m)
}

pub fn attenuation_db(medium: MediumSpec, frequency_ghz: f64, thickness_m: f64) -> Result<f64> {
    if !(thickness_m >= 0.0) {
        return Err(domain(format!("thickness must be >= 0 m, got {thickness_m}")));
    }
    let sample = complex_permittivity(medium, frequency_ghz)?;
    attenuation_from_depth(penetration_depth(&sample), thickness_m)
}

/// `n` log-spaced frequencies from `f_min` to `f_max` inclusive.
pub fn log_spaced(f_min: f64, f_max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![f_min],
        _ => {
            let (a, b) = (f_min.log10(), f_max.log10());
            (0..n).map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64)).collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn static_permittivity_at_20c() {
        let d = pure_water_debye(20.0);
        assert!((d.eps_s - 80.01).abs() < 1e-2, "eps_s = {}", d.eps_s);
        // far below the relaxation frequency ε′ approaches ε_s
        let s = complex_permittivity(MediumSpec::pure_water(20.0), 0.1).unwrap();
        assert!((s.eps_real - d.eps_s).abs() < 0.05);
    }

    #[test]
    fn zero_salinity_matches_pure_water() {
        let a = complex_permittivity(MediumSpec::sea_water(10.0, 0.0), 1.0).unwrap();
        let b = complex_permittivity(MediumSpec::pure_water(10.0), 1.0).unwrap();
        assert_relative_eq!(a.eps_real, b.eps_real, max_relative = 1e-9);
        assert_relative_eq!(a.eps_imag, b.eps_imag, max_relative = 1e-9);
    }

    #[test]
    fn ice_real_part_is_frequency_independent() {
        for f in [0.1, 1.0, 10.0, 100.0] {
            let s = complex_permittivity(MediumSpec::ice(-10.0), f).unwrap();
            assert_relative_eq!(s.eps_real, 3.1793, epsilon = 1e-12);
        }
    }

    #[test]
    fn penetration_depth_anchors() {
        let sea = complex_permittivity(MediumSpec::sea_water(20.0, 35.0), 1.0).unwrap();
        let d = penetration_depth(&sea);
        assert!((0.005..=0.02).contains(&d), "sea water depth {d}");
        let ice = complex_permittivity(MediumSpec::ice(-20.0), 1.0).unwrap();
        let d = penetration_depth(&ice);
        assert!((300.0..=3000.0).contains(&d), "ice depth {d}");
    }

    #[test]
    fn lossless_is_infinite() {
        let s = MediumSample { eps_real: 4.0, eps_imag: 0.0, frequency_ghz: 1.0 };
        assert_eq!(penetration_depth(&s), f64::INFINITY);
        assert_eq!(attenuation_from_depth(f64::INFINITY, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn depth_falls_as_loss_rises() {
        let mut prev = f64::INFINITY;
        for im in [0.01, 0.1, 1.0, 10.0, 100.0] {
            let d = penetration_depth(&MediumSample { eps_real: 10.0, eps_imag: im, frequency_ghz: 2.0 });
            assert!(d < prev);
            prev = d;
        }
    }

    #[test]
    fn attenuation_examples() {
        assert_eq!(attenuation_db(MediumSpec::sea_water(20.0, 35.0), 1.0, 0.0).unwrap(), 0.0);
        assert!((attenuation_from_depth(0.01, 0.1).unwrap() - 86.86).abs() < 0.01);
        let sea = MediumSpec::sea_water(20.0, 35.0);
        let a1 = attenuation_db(sea, 1.0, 0.1).unwrap();
        let a2 = attenuation_db(sea, 2.0, 0.1).unwrap();
        assert!(a2 > a1);
        let x = attenuation_db(sea, 2.0, 0.05).unwrap();
        assert_relative_eq!(a2, 2.0 * x, max_relative = 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(complex_permittivity(MediumSpec::ice(1.0), 1.0).is_err());
        assert!(complex_permittivity(MediumSpec::pure_water(20.0), 0.05).is_err());
        assert!(complex_permittivity(MediumSpec::pure_water(20.0), 101.0).is_err());
        assert!(complex_permittivity(MediumSpec::sea_water(20.0, -1.0), 1.0).is_err());
        assert!(attenuation_db(MediumSpec::pure_water(20.0), 1.0, -0.1).is_err());
    }

    #[test]
    fn log_spacing_hits_endpoints() {
        let f = log_spaced(0.1, 100.0, 4);
        assert_eq!(f.len(), 4);
        assert_relative_eq!(f[0], 0.1, max_relative = 1e-12);
        assert_relative_eq!(f[1], 1.0, max_relative = 1e-12);
        assert_relative_eq!(f[3], 100.0, max_relative = 1e-12);
    }
}
