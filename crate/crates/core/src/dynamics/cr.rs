use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hysteresis::{BoucWenParams, OscillatorParams};

use super::{simulate_sdof, Excitation};

/// Settings for an inelastic displacement ratio spectrum. The post-yield
/// ratio has no default on purpose.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrConfig {
    /// Strength reduction factor `R ≥ 1`.
    pub r_factor: f64,
    pub damping_ratio: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub n: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
}

fn default_dt() -> f64 {
    0.001
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrPoint {
    pub period: f64,
    pub elastic_peak: f64,
    pub inelastic_peak: f64,
    pub d_y: f64,
    pub ratio: f64,
}

impl CrConfig {
    fn validate(&self) -> Result<()> {
        if !(self.r_factor.is_finite() && self.r_factor >= 1.0) {
            return Err(Error::config(format!("R must be >= 1, got {}", self.r_factor)));
        }
        if !(self.damping_ratio.is_finite() && self.damping_ratio >= 0.0) {
            return Err(Error::config(format!(
                "damping ratio must be >= 0, got {}",
                self.damping_ratio
            )));
        }
        // shape check with a placeholder yield displacement
        BoucWenParams::new(self.beta, self.gamma, self.n, 1.0)?;
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::config(format!("alpha must lie in [0, 1], got {}", self.alpha)));
        }
        Ok(())
    }
}

/// One spectral ordinate: unit mass, `k = (2π/T)²`, `c = 2ζ√k`.
pub fn cr_point(motion: &dyn Excitation, period: f64, cfg: &CrConfig) -> Result<CrPoint> {
    if !(period.is_finite() && period > 0.0) {
        return Err(Error::domain(format!("period must be > 0, got {period}")));
    }
    let k = (2.0 * std::f64::consts::PI / period).powi(2);
    let c = 2.0 * cfg.damping_ratio * k.sqrt();
    let shape = BoucWenParams::new(cfg.beta, cfg.gamma, cfg.n, 1.0)?;
    let linear = OscillatorParams::new(1.0, c, k, 1.0, shape)?;
    let elastic_peak = simulate_sdof(&linear, motion, cfg.dt)?.peak_displacement(0);
    if !(elastic_peak > 0.0) {
        return Err(Error::domain(format!(
            "elastic peak displacement is zero at T = {period} s"
        )));
    }
    let d_y = elastic_peak / cfg.r_factor;
    let inelastic = OscillatorParams::new(1.0, c, k, cfg.alpha, shape.with_d_y(d_y)?)?;
    let inelastic_peak = simulate_sdof(&inelastic, motion, cfg.dt)?.peak_displacement(0);
    Ok(CrPoint {
        period,
        elastic_peak,
        inelastic_peak,
        d_y,
        ratio: inelastic_peak / elastic_peak,
    })
}

/// `C_R(T)` for every period, evaluated in parallel; output follows the
/// order of `periods`.
pub fn cr_spectrum(motion: &dyn Excitation, periods: &[f64], cfg: &CrConfig) -> Result<Vec<CrPoint>> {
    cfg.validate()?;
    periods.par_iter().map(|&t| cr_point(motion, t, cfg)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Sinusoid;

    fn cfg(alpha: f64) -> CrConfig {
        CrConfig {
            r_factor: 2.0,
            damping_ratio: 0.02,
            alpha,
            beta: 2.0,
            gamma: 1.0,
            n: 2.0,
            dt: 0.002,
        }
    }

    #[test]
    fn linear_limit_is_exactly_one() {
        let exc = Sinusoid {
            amplitude: 3.0,
            omega: 5.0,
            duration: 4.0,
        };
        for p in cr_spectrum(&exc, &[0.2, 0.7, 1.5], &cfg(1.0)).unwrap() {
            assert_eq!(p.ratio, 1.0);
        }
    }

    #[test]
    fn inelastic_ratio_exceeds_one_at_short_period() {
        let exc = Sinusoid {
            amplitude: 3.0,
            omega: 5.0,
            duration: 6.0,
        };
        let p = cr_point(&exc, 0.1, &cfg(0.1)).unwrap();
        assert!(p.ratio > 1.0, "{p:?}");
        assert_eq!(p.d_y, p.elastic_peak / 2.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        let exc = Sinusoid {
            amplitude: 0.0,
            omega: 5.0,
            duration: 1.0,
        };
        assert!(cr_spectrum(&exc, &[0.5], &cfg(0.1)).is_err());
        let mut bad = cfg(0.1);
        bad.r_factor = 0.5;
        assert!(cr_spectrum(&exc, &[0.5], &bad).is_err());
        assert!(cr_point(&exc, -1.0, &cfg(0.1)).is_err());
    }
}
