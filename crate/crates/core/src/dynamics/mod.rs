//! Time-domain response of Bouc-Wen oscillators and shear chains under base
//! excitation, integrated with classical fourth-order Runge-Kutta.
//!
//! The base acceleration is read through [`Excitation`]; recorded motions
//! are linearly interpolated at the RK4 half steps.

mod chain;
mod cr;
mod damage;
mod history;
mod sdof;

pub use chain::{simulate_chain, ChainSystem, Story};
pub use cr::{cr_spectrum, CrConfig, CrPoint};
pub use damage::{nrmse_percent, park_ang_index, DamageAssessment, DamageConfig, DamageState};
pub use history::ResponseHistory;
pub use sdof::simulate_sdof;

pub(crate) use chain::{absolute_accelerations, rk4_chain_step, ChainWorkspace, StoryCoefficients};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A base acceleration history `ü_b(t)` in m/s².
pub trait Excitation: Sync {
    fn accel(&self, t: f64) -> f64;

    /// Length of the record in seconds.
    fn duration(&self) -> f64;
}

/// `amplitude · sin(omega · t)` on `[0, duration]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sinusoid {
    pub amplitude: f64,
    pub omega: f64,
    pub duration: f64,
}

impl Excitation for Sinusoid {
    fn accel(&self, t: f64) -> f64 {
        self.amplitude * (self.omega * t).sin()
    }

    fn duration(&self) -> f64 {
        self.duration
    }
}

/// Number of steps of size `dt` covering `duration`.
pub(crate) fn step_count(duration: f64, dt: f64) -> Result<usize> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::domain(format!("time step must be > 0, got {dt}")));
    }
    if !(duration.is_finite() && duration >= 0.0) {
        return Err(Error::domain(format!(
            "excitation duration must be >= 0, got {duration}"
        )));
    }
    Ok((duration / dt + 1e-9).floor() as usize)
}
