//! UE transmit chain: PA DC consumption versus EIRP.
//!
//! PA RF output (mW) = P_DC · PAE + drive, then
//! `EIRP = 10·log10(output) − IL + G − PBO`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// How the RF input drive enters the PA output power.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriveAccounting {
    /// Power-added efficiency: output = DC·PAE + input.
    #[default]
    PowerAdded,
    /// Output = DC·PAE; the input drive is dropped. This is the arithmetic
    /// behind the commonly quoted 1253 mW / 2500 mW figures.
    Neglected,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PaAssumptions {
    pub pae_fraction: f64,
    pub pa_input_dbm: f64,
    pub switch_loss_db: f64,
    pub antenna_gain_dbi: f64,
    pub backoff_db: f64,
    #[serde(default)]
    pub drive: DriveAccounting,
}

impl PaAssumptions {
    /// PAE 40 %, 0 dBm drive, 1 dB switch loss, 0 dBi antenna, 6 dB back-off.
    pub fn reference() -> Self {
        Self {
            pae_fraction: 0.4,
            pa_input_dbm: 0.0,
            switch_loss_db: 1.0,
            antenna_gain_dbi: 0.0,
            backoff_db: 6.0,
            drive: DriveAccounting::PowerAdded,
        }
    }

    pub fn with_drive(mut self, drive: DriveAccounting) -> Self {
        self.drive = drive;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.pae_fraction > 0.0 && self.pae_fraction <= 1.0) {
            return Err(domain(format!("PAE must lie in (0, 1], got {}", self.pae_fraction)));
        }
        if !(self.switch_loss_db >= 0.0) || !(self.backoff_db >= 0.0) {
            return Err(domain("switch loss and back-off must be >= 0 dB"));
        }
        Ok(())
    }

    fn drive_mw(&self) -> f64 {
        match self.drive {
            DriveAccounting::PowerAdded => dbm_to_mw(self.pa_input_dbm),
            DriveAccounting::Neglected => 0.0,
        }
    }

    /// Net dB added after the PA output.
    fn post_pa_db(&self) -> f64 {
        -self.switch_loss_db + self.antenna_gain_dbi - self.backoff_db
    }
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

pub fn eirp_dbm(pa_dc_mw: f64, a: &PaAssumptions) -> Result<f64> {
    a.validate()?;
    if !(pa_dc_mw > 0.0) {
        return Err(domain(format!("PA DC power must be > 0 mW, got {pa_dc_mw}")));
    }
    Ok(mw_to_dbm(pa_dc_mw * a.pae_fraction + a.drive_mw()) + a.post_pa_db())
}

/// DC power the PA must draw to reach `target_eirp_dbm`; inverse of [`eirp_dbm`].
pub fn pa_dc_power_mw(target_eirp_dbm: f64, a: &PaAssumptions) -> Result<f64> {
    a.validate()?;
    let pa_out_mw = dbm_to_mw(target_eirp_dbm - a.post_pa_db());
    let dc = (pa_out_mw - a.drive_mw()) / a.pae_fraction;
    if !(dc > 0.0) {
        return Err(domain(format!(
            "{target_eirp_dbm} dBm EIRP is reachable from the input drive alone; no DC power needed"
        )));
    }
    Ok(dc)
}
