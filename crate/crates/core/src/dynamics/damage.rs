use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::ResponseHistory;

/// Normalized root-mean-square error in percent of `test` against
/// `reference`:
///
/// ```text
/// (1/L) · sqrt(Σ (test_k − ref_k)²) / (max ref − min ref) · 100
/// ```
///
/// The `1/L` factor sits outside the square root and the normaliser is the
/// range of `reference`, so the measure is not symmetric in its arguments.
pub fn nrmse_percent(reference: &[f64], test: &[f64]) -> Result<f64> {
    if reference.len() != test.len() {
        return Err(Error::domain(format!(
            "series lengths differ ({} vs {})",
            reference.len(),
            test.len()
        )));
    }
    if reference.len() < 2 {
        return Err(Error::domain("NRMSE needs at least two samples"));
    }
    let (lo, hi) = reference
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let range = hi - lo;
    if !(range > 0.0 && range.is_finite()) {
        return Err(Error::domain("reference series has zero range; NRMSE is undefined"));
    }
    let ss: f64 = reference.iter().zip(test).map(|(x, xb)| (xb - x) * (xb - x)).sum();
    Ok(ss.sqrt() / reference.len() as f64 / range * 100.0)
}

/// Park-Ang inputs for one element.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DamageConfig {
    /// Ultimate deformation [m].
    pub y_ult: f64,
    /// Energy weighting factor.
    pub delta_e: f64,
    /// Yield strength `k D_y` [N].
    pub f_y: f64,
}

impl DamageConfig {
    pub fn new(y_ult: f64, delta_e: f64, f_y: f64) -> Result<Self> {
        let cfg = Self { y_ult, delta_e, f_y };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `y_ult = 6 D_y`, `δ_E = 0.10`, `F_y = k D_y`.
    pub fn conventional(k: f64, d_y: f64) -> Result<Self> {
        Self::new(6.0 * d_y, 0.10, k * d_y)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.y_ult.is_finite() && self.y_ult > 0.0) {
            return Err(Error::config(format!("y_ult must be > 0, got {}", self.y_ult)));
        }
        if !(self.delta_e.is_finite() && self.delta_e >= 0.0) {
            return Err(Error::config(format!("delta_e must be >= 0, got {}", self.delta_e)));
        }
        if !(self.f_y.is_finite() && self.f_y > 0.0) {
            return Err(Error::config(format!("f_y must be > 0, got {}", self.f_y)));
        }
        Ok(())
    }

    /// `y_max / y_ult + δ_E / (F_y y_ult) · E_h`.
    pub fn index(&self, y_max: f64, e_h: f64) -> f64 {
        y_max / self.y_ult + self.delta_e / (self.f_y * self.y_ult) * e_h
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DamageState {
    Slight,
    Moderate,
    Severe,
    Collapse,
}

impl DamageState {
    /// Bands at 0.2, 0.5 and 1; a value on a boundary falls in the higher band.
    pub fn from_index(di: f64) -> Self {
        if di < 0.2 {
            DamageState::Slight
        } else if di < 0.5 {
            DamageState::Moderate
        } else if di < 1.0 {
            DamageState::Severe
        } else {
            DamageState::Collapse
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DamageAssessment {
    pub index: f64,
    pub state: DamageState,
    pub peak_deformation: f64,
    pub hysteretic_energy: f64,
}

/// Park-Ang index of element `j`, using its peak drift (the displacement
/// itself for a single DOF) and its total hysteretic energy.
pub fn park_ang_index(history: &ResponseHistory, j: usize, cfg: &DamageConfig) -> Result<DamageAssessment> {
    cfg.validate()?;
    if history.is_empty() {
        return Err(Error::domain("empty response history"));
    }
    if j >= history.n_dof() {
        return Err(Error::domain(format!(
            "element {j} out of range for {} DOFs",
            history.n_dof()
        )));
    }
    let y_max = history.peak_drift(j);
    let e_h = history.total_hysteretic_energy(j);
    let index = cfg.index(y_max, e_h);
    Ok(DamageAssessment {
        index,
        state: DamageState::from_index(index),
        peak_deformation: y_max,
        hysteretic_energy: e_h,
    })
}
