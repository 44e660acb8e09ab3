//! Line-of-sight availability of buoy-to-shore radio links in random seas.
//!
//! The pieces, roughly in pipeline order:
//!
//! * [`dielectric`]: permittivity and penetration depth of water and ice.
//! * [`sea_state`]: Bretschneider spectrum, spectral grid, random realizations.
//! * [`los_engine`]: per-timestep blocker search and the pooled LoS statistics.
//! * [`antenna`]: tilt from surface slope, required length, directivity.
//! * [`power_budget`]: PA DC power against EIRP.
//! * [`scenario`], [`runner`], [`output`], [`harness`]: configuration, the
//!   command-line runs and the regression report.

// `!(x > 0.0)` also rejects NaN, which is the point
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod antenna;
pub mod dielectric;
pub mod error;
pub mod harness;
pub mod los_engine;
pub mod output;
pub mod power_budget;
pub mod runner;
pub mod scenario;
pub mod sea_state;

pub use error::{Error, Result};
