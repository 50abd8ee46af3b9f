//! Bouc-Wen hysteresis laboratory.
//!
//! * [`hysteresis`]: the evolution law, branch slopes and the oscillator
//!   parameter set.
//! * [`insensitivity`]: deviation metrics between parameter sets and
//!   contour sweeps over perturbation grids.
//! * [`dynamics`]: SDOF and shear-chain time integration, NRMSE, Park-Ang
//!   damage and constant-R spectra.
//! * [`ground_motion`]: evolutionary-spectrum synthesis and accelerogram I/O.
//! * [`estimation`]: constrained (truncated) UKF joint state/parameter
//!   identification and Monte Carlo campaigns.

// `!(x > 0.0)` is used on purpose so that NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod app;
pub mod dynamics;
pub mod error;
pub mod estimation;
pub mod ground_motion;
pub mod hysteresis;
pub mod insensitivity;
pub mod io;
pub mod quadrature;

pub use error::{Error, Result};
pub use hysteresis::{BoucWenParams, Branch, OscillatorParams};
