//! Bouc-Wen constitutive law with the scale parameter `A` fixed at one.
//!
//! The evolution law is
//!
//! ```text
//! dr/dt = (ẏ − β|ẏ||r|^(n−1) r − γ ẏ |r|^n) / D_y
//! ```
//!
//! and the element develops the hysteretic force `f_r = (1 − α) D_y k r`.
//! Only the thermodynamically admissible class `−β ≤ γ ≤ β`, `n > 1` is
//! accepted by [`BoucWenParams::new`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape parameters of one Bouc-Wen element.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBoucWen", into = "RawBoucWen")]
pub struct BoucWenParams {
    beta: f64,
    gamma: f64,
    n: f64,
    d_y: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBoucWen {
    beta: f64,
    gamma: f64,
    n: f64,
    d_y: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a: Option<f64>,
}

impl TryFrom<RawBoucWen> for BoucWenParams {
    type Error = Error;

    fn try_from(raw: RawBoucWen) -> Result<Self> {
        BoucWenParams::with_scale(raw.a.unwrap_or(1.0), raw.beta, raw.gamma, raw.n, raw.d_y)
    }
}

impl From<BoucWenParams> for RawBoucWen {
    fn from(p: BoucWenParams) -> Self {
        RawBoucWen {
            beta: p.beta,
            gamma: p.gamma,
            n: p.n,
            d_y: p.d_y,
            a: None,
        }
    }
}

impl BoucWenParams {
    pub fn new(beta: f64, gamma: f64, n: f64, d_y: f64) -> Result<Self> {
        for (name, v) in [("beta", beta), ("gamma", gamma), ("n", n), ("d_y", d_y)] {
            if !v.is_finite() {
                return Err(Error::domain(format!("{name} must be finite, got {v}")));
            }
        }
        if beta < 0.0 {
            return Err(Error::domain(format!("beta must be >= 0, got {beta}")));
        }
        if gamma < -beta || gamma > beta {
            return Err(Error::domain(format!(
                "gamma = {gamma} outside the admissible range [-beta, beta] = [{}, {beta}]",
                -beta
            )));
        }
        if n <= 1.0 {
            return Err(Error::domain(format!("n must be > 1, got {n}")));
        }
        if d_y <= 0.0 {
            return Err(Error::domain(format!("d_y must be > 0, got {d_y}")));
        }
        Ok(Self { beta, gamma, n, d_y })
    }

    /// Like [`new`](Self::new) but takes the scale parameter explicitly.
    /// Anything other than `a == 1` is rejected; the redundancy between `A`
    /// and the stiffness parameters is removed by pinning it.
    pub fn with_scale(a: f64, beta: f64, gamma: f64, n: f64, d_y: f64) -> Result<Self> {
        if a != 1.0 {
            return Err(Error::domain(format!("the scale parameter A is fixed at 1, got {a}")));
        }
        Self::new(beta, gamma, n, d_y)
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn n(&self) -> f64 {
        self.n
    }

    pub fn d_y(&self) -> f64 {
        self.d_y
    }

    pub fn a(&self) -> f64 {
        1.0
    }

    /// Same shape, different yield displacement. No rescaling of β and γ.
    pub fn with_d_y(&self, d_y: f64) -> Result<Self> {
        Self::new(self.beta, self.gamma, self.n, d_y)
    }

    /// `(β+γ)/(β−γ)`; infinite when `β == γ`.
    pub fn kappa(&self) -> f64 {
        (self.beta + self.gamma) / (self.beta - self.gamma)
    }

    /// Saturation bound `(β+γ)^(−1/n)` of the hysteretic deformation.
    pub fn r_max(&self) -> Result<f64> {
        let s = self.beta + self.gamma;
        if s <= 0.0 {
            return Err(Error::domain(
                "beta + gamma <= 0: the hysteretic deformation is unbounded",
            ));
        }
        Ok(s.powf(-1.0 / self.n))
    }

    /// Time derivative of `r`.
    pub fn r_dot(&self, y_dot: f64, r: f64) -> Result<f64> {
        if !y_dot.is_finite() || !r.is_finite() {
            return Err(Error::domain(format!(
                "non-finite input to the evolution law (y_dot = {y_dot}, r = {r})"
            )));
        }
        Ok(evolution_rate(self.beta, self.gamma, self.n, self.d_y, y_dot, r))
    }

    /// Scaled slope `D_y dr/dy` of the requested branch.
    pub fn r_prime_d(&self, r: f64, branch: Branch) -> f64 {
        let rn = abs_pow(r, self.n);
        match branch {
            Branch::I => 1.0 - (self.beta + self.gamma) * rn,
            Branch::II => 1.0 + (self.beta - self.gamma) * rn,
        }
    }
}

/// Unchecked evolution law used by the integrators. Parameters are taken
/// raw so that filter sigma points outside the admissible class can still be
/// propagated.
#[inline]
pub fn evolution_rate(beta: f64, gamma: f64, n: f64, d_y: f64, y_dot: f64, r: f64) -> f64 {
    if r == 0.0 {
        return y_dot / d_y;
    }
    let ar = r.abs();
    let ar_nm1 = ar.powf(n - 1.0);
    let ar_n = ar_nm1 * ar;
    (y_dot - beta * y_dot.abs() * ar_nm1 * r - gamma * y_dot * ar_n) / d_y
}

/// `|r|^n` with the `r == 0` case pinned to zero.
#[inline]
pub(crate) fn abs_pow(r: f64, n: f64) -> f64 {
    if r == 0.0 {
        0.0
    } else {
        r.abs().powf(n)
    }
}

/// Loading regime of the element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    /// Velocity and deformation share a sign (loading towards saturation).
    I,
    /// Velocity opposes the deformation (unloading).
    II,
}

/// Classify `(ẏ, r)`. Ties at `ẏ == 0` or `r == 0` resolve to branch I,
/// where both branch formulas give the same rate.
pub fn branch_of(y_dot: f64, r: f64) -> Branch {
    if y_dot == 0.0 || r == 0.0 || (y_dot > 0.0) == (r > 0.0) {
        Branch::I
    } else {
        Branch::II
    }
}

/// Single-degree-of-freedom oscillator carrying one Bouc-Wen element.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawOscillator", into = "RawOscillator")]
pub struct OscillatorParams {
    m: f64,
    c: f64,
    k: f64,
    alpha: f64,
    bw: BoucWenParams,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOscillator {
    m: f64,
    c: f64,
    k: f64,
    alpha: f64,
    bw: BoucWenParams,
}

impl TryFrom<RawOscillator> for OscillatorParams {
    type Error = Error;

    fn try_from(raw: RawOscillator) -> Result<Self> {
        OscillatorParams::new(raw.m, raw.c, raw.k, raw.alpha, raw.bw)
    }
}

impl From<OscillatorParams> for RawOscillator {
    fn from(o: OscillatorParams) -> Self {
        RawOscillator {
            m: o.m,
            c: o.c,
            k: o.k,
            alpha: o.alpha,
            bw: o.bw,
        }
    }
}

impl OscillatorParams {
    pub fn new(m: f64, c: f64, k: f64, alpha: f64, bw: BoucWenParams) -> Result<Self> {
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::domain(format!("mass must be > 0, got {m}")));
        }
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::domain(format!("damping must be >= 0, got {c}")));
        }
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::domain(format!("stiffness must be > 0, got {k}")));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::domain(format!("alpha must lie in [0, 1], got {alpha}")));
        }
        Ok(Self { m, c, k, alpha, bw })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn bw(&self) -> &BoucWenParams {
        &self.bw
    }

    pub fn with_bw(&self, bw: BoucWenParams) -> Self {
        Self { bw, ..*self }
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.m, self.c, self.k, alpha, self.bw)
    }

    /// Yield strength `k D_y`.
    pub fn yield_force(&self) -> f64 {
        self.k * self.bw.d_y
    }
}

/// `(1 − α) D_y k r`.
pub fn hysteretic_force(osc: &OscillatorParams, r: f64) -> f64 {
    (1.0 - osc.alpha) * osc.bw.d_y * osc.k * r
}

/// Cumulative trapezoid of `force · velocity` on a uniform grid, starting
/// from zero.
pub fn cumulative_work(force: &[f64], velocity: &[f64], dt: f64) -> Result<Vec<f64>> {
    if force.is_empty() {
        return Err(Error::domain("cannot integrate an empty history"));
    }
    if force.len() != velocity.len() {
        return Err(Error::domain(format!(
            "force and velocity lengths differ ({} vs {})",
            force.len(),
            velocity.len()
        )));
    }
    let mut out = Vec::with_capacity(force.len());
    let mut acc = 0.0;
    out.push(0.0);
    let mut prev = force[0] * velocity[0];
    for (f, v) in force.iter().zip(velocity).skip(1) {
        let p = f * v;
        acc += 0.5 * (prev + p) * dt;
        out.push(acc);
        prev = p;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn bw(beta: f64, gamma: f64, n: f64) -> BoucWenParams {
        BoucWenParams::new(beta, gamma, n, 1.0).unwrap()
    }

    #[test]
    fn r_dot_examples() {
        let p = bw(2.0, 1.0, 2.0);
        let rm = 3f64.powf(-0.5);
        assert_eq!(p.r_dot(1.0, 0.0).unwrap(), 1.0);
        assert!(p.r_dot(1.0, rm).unwrap().abs() < 1e-15);
        assert_relative_eq!(p.r_dot(-1.0, rm).unwrap(), -4.0 / 3.0, epsilon = 1e-14);
        assert!(p.r_dot(f64::NAN, 0.1).is_err());
        assert!(p.r_dot(1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn branch_examples() {
        assert_eq!(branch_of(1.0, 0.5), Branch::I);
        assert_eq!(branch_of(-1.0, 0.5), Branch::II);
        assert_eq!(branch_of(-1.0, -0.5), Branch::I);
        assert_eq!(branch_of(1.0, -0.5), Branch::II);
        assert_eq!(branch_of(1.0, 0.0), Branch::I);
        assert_eq!(branch_of(0.0, -0.3), Branch::I);
    }

    #[test]
    fn r_prime_d_examples() {
        let p = bw(2.0, 1.0, 2.0);
        let rm = 3f64.powf(-0.5);
        assert_eq!(p.r_prime_d(0.0, Branch::I), 1.0);
        assert!(p.r_prime_d(rm, Branch::I).abs() < 1e-15);
        assert!(p.r_prime_d(-rm, Branch::I).abs() < 1e-15);
        assert_relative_eq!(p.r_prime_d(rm, Branch::II), 4.0 / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn r_max_examples() {
        assert_relative_eq!(bw(2.0, 1.0, 2.0).r_max().unwrap(), 0.5773502691896258, epsilon = 1e-15);
        assert_eq!(bw(0.5, 0.5, 2.0).r_max().unwrap(), 1.0);
        assert_relative_eq!(bw(20.0, 10.0, 2.0).r_max().unwrap(), 30f64.powf(-0.5), epsilon = 1e-15);
        assert!(bw(1.0, -1.0, 2.0).r_max().is_err());
    }

    #[test]
    fn construction_rejects_inadmissible() {
        assert!(BoucWenParams::new(1.0, 2.0, 2.0, 1.0).is_err());
        assert!(BoucWenParams::new(1.0, -1.5, 2.0, 1.0).is_err());
        assert!(BoucWenParams::new(1.0, 0.5, 1.0, 1.0).is_err());
        assert!(BoucWenParams::new(1.0, 0.5, 2.0, 0.0).is_err());
        assert!(BoucWenParams::new(-0.1, 0.0, 2.0, 1.0).is_err());
        assert!(BoucWenParams::with_scale(2.0, 1.0, 0.5, 2.0, 1.0).is_err());
        assert!(BoucWenParams::with_scale(1.0, 1.0, 0.5, 2.0, 1.0).is_ok());
        let err = serde_json::from_str::<BoucWenParams>(r#"{"beta":1,"gamma":0.5,"n":2,"d_y":1,"a":1.5}"#);
        assert!(err.is_err());
    }

    #[test]
    fn force_examples() {
        let osc =
            OscillatorParams::new(1.0, 0.5, 100.0, 0.1, BoucWenParams::new(2.0, 1.0, 2.0, 0.0365).unwrap()).unwrap();
        assert_eq!(hysteretic_force(&osc, 0.0), 0.0);
        assert_relative_eq!(hysteretic_force(&osc, 0.5), 1.6425, epsilon = 1e-12);
        let lin = osc.with_alpha(1.0).unwrap();
        assert_eq!(hysteretic_force(&lin, 0.37), 0.0);
    }

    #[test]
    fn work_of_zero_motion_is_zero() {
        let e = cumulative_work(&[0.0; 10], &[0.0; 10], 0.01).unwrap();
        assert!(e.iter().all(|&x| x == 0.0));
        assert!(cumulative_work(&[], &[], 0.01).is_err());
    }

    proptest! {
        #[test]
        fn odd_symmetry(beta in 0.0f64..10.0, g in -1.0f64..1.0, n in 1.01f64..5.0,
                        v in -5.0f64..5.0, r in -1.0f64..1.0) {
            let p = bw(beta, g * beta, n);
            let a = p.r_dot(v, r).unwrap();
            let b = p.r_dot(-v, -r).unwrap();
            prop_assert!((a + b).abs() <= 1e-12 * a.abs().max(1.0));
        }

        #[test]
        fn chain_rule_matches_branch_slope(beta in 0.01f64..10.0, g in -1.0f64..1.0, n in 1.01f64..5.0,
                                           v in prop_oneof![-5.0f64..-0.01, 0.01f64..5.0], u in -1.0f64..1.0) {
            let p = BoucWenParams::new(beta, g * beta, n, 0.37).unwrap();
            let r = u * p.r_max().unwrap();
            let slope = p.d_y() * p.r_dot(v, r).unwrap() / v;
            let expected = p.r_prime_d(r, branch_of(v, r));
            prop_assert!((slope - expected).abs() <= 1e-12 * expected.abs().max(1.0));
        }

        #[test]
        fn branch_slope_ranges(beta in 0.01f64..10.0, g in -1.0f64..1.0, n in 1.01f64..5.0, u in -1.0f64..1.0) {
            let p = bw(beta, g * beta, n);
            let r = u * p.r_max().unwrap();
            let s1 = p.r_prime_d(r, Branch::I);
            prop_assert!((-1e-12..=1.0).contains(&s1));
            prop_assert!(p.r_prime_d(r, Branch::II) >= 1.0);
        }
    }
}
