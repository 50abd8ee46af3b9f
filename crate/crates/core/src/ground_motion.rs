//! Uniformly modulated ground-motion synthesis and accelerogram files.
//!
//! The target is the evolutionary spectrum `S(ω, t) = S_KT(ω) S_C(ω) A(t)²`
//! with a Kanai-Tajimi soil filter, a second (low-frequency) filter
//! `S_C = x/((1−x)² + 4ζ_f² x)`, `x = (ω/ω_f)²`, and `A(t)² = t e^(−bt)`.
//! Realizations are cosine series with random phases.

use std::f64::consts::PI;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::Excitation;
use crate::error::{Error, Result};
use crate::io::{atomic_write, fmt_f64};

pub const STANDARD_GRAVITY: f64 = 9.80665;

/// Unit of acceleration values in a record file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    /// m/s².
    #[default]
    Si,
    /// Multiples of standard gravity.
    G,
}

impl Units {
    pub fn to_si(&self) -> f64 {
        match self {
            Units::Si => 1.0,
            Units::G => STANDARD_GRAVITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumParams {
    /// Spectral intensity [(m/s²)²·s].
    pub s0: f64,
    pub omega_g: f64,
    pub zeta_g: f64,
    pub omega_f: f64,
    pub zeta_f: f64,
    /// Modulation decay [1/s].
    pub b: f64,
}

impl SpectrumParams {
    /// Medium-stiffness soil (`ω_g = 10`, `ζ_g = 0.4`, `ω_f = 1`, `ζ_f = 0.6`,
    /// `b = 0.2`) with an intensity of `1/f_s` in g²·s.
    pub fn medium_soil(sample_rate: f64) -> Self {
        Self {
            s0: STANDARD_GRAVITY * STANDARD_GRAVITY / sample_rate,
            omega_g: 10.0,
            zeta_g: 0.4,
            omega_f: 1.0,
            zeta_f: 0.6,
            b: 0.2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s0.is_finite() && self.s0 >= 0.0) {
            return Err(Error::config(format!("s0 must be >= 0, got {}", self.s0)));
        }
        for (name, v) in [("omega_g", self.omega_g), ("omega_f", self.omega_f), ("b", self.b)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(format!("{name} must be > 0, got {v}")));
            }
        }
        for (name, v) in [("zeta_g", self.zeta_g), ("zeta_f", self.zeta_f)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::config(format!("{name} must lie in (0, 1], got {v}")));
            }
        }
        Ok(())
    }

    pub fn kanai_tajimi(&self, omega: f64) -> f64 {
        let x = (omega / self.omega_g).powi(2);
        let z = 4.0 * self.zeta_g * self.zeta_g * x;
        self.s0 * (1.0 + z) / ((1.0 - x).powi(2) + z)
    }

    pub fn low_frequency_filter(&self, omega: f64) -> f64 {
        let x = (omega / self.omega_f).powi(2);
        x / ((1.0 - x).powi(2) + 4.0 * self.zeta_f * self.zeta_f * x)
    }

    /// `A(t)² = t e^(−bt)`, zero before the origin.
    pub fn modulation_sq(&self, t: f64) -> f64 {
        if t <= 0.0 {
            0.0
        } else {
            t * (-self.b * t).exp()
        }
    }

    /// Stationary part `S_KT(ω) S_C(ω)`.
    pub fn stationary_psd(&self, omega: f64) -> f64 {
        self.kanai_tajimi(omega) * self.low_frequency_filter(omega)
    }
}

/// `S_KT(ω) S_C(ω) A(t)²`.
pub fn evolutionary_psd(p: &SpectrumParams, omega: f64, t: f64) -> f64 {
    p.stationary_psd(omega) * p.modulation_sq(t)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthesisConfig {
    #[serde(default = "defaults::sample_rate")]
    pub sample_rate: f64,
    #[serde(default = "defaults::duration")]
    pub duration: f64,
    /// Upper cutoff `ω_u` [rad/s].
    #[serde(default = "defaults::omega_u")]
    pub omega_u: f64,
    #[serde(default = "defaults::n_omega")]
    pub n_omega: usize,
    #[serde(default)]
    pub seed: u64,
    /// Realizations with a larger peak are rejected [m/s²]; `None` accepts all.
    #[serde(default = "defaults::pga_cap")]
    pub pga_cap: Option<f64>,
    #[serde(default = "defaults::max_retries")]
    pub max_retries: u32,
}

mod defaults {
    pub fn sample_rate() -> f64 {
        100.0
    }
    pub fn duration() -> f64 {
        30.0
    }
    pub fn omega_u() -> f64 {
        40.0 * std::f64::consts::PI
    }
    pub fn n_omega() -> usize {
        2000
    }
    pub fn pga_cap() -> Option<f64> {
        Some(0.4 * super::STANDARD_GRAVITY)
    }
    pub fn max_retries() -> u32 {
        100
    }
}

impl Default for SynthesisConfig {
    fn default() -> Self {
        Self {
            sample_rate: defaults::sample_rate(),
            duration: defaults::duration(),
            omega_u: defaults::omega_u(),
            n_omega: defaults::n_omega(),
            seed: 0,
            pga_cap: defaults::pga_cap(),
            max_retries: defaults::max_retries(),
        }
    }
}

impl SynthesisConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sample_rate.is_finite() && self.sample_rate > 0.0) {
            return Err(Error::config(format!(
                "sample_rate must be > 0, got {}",
                self.sample_rate
            )));
        }
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(Error::config(format!("duration must be > 0, got {}", self.duration)));
        }
        if !(self.omega_u > 0.0 && self.omega_u <= PI * self.sample_rate) {
            return Err(Error::config(format!(
                "omega_u must lie in (0, pi*f_s] = (0, {}], got {}",
                PI * self.sample_rate,
                self.omega_u
            )));
        }
        if self.n_omega == 0 {
            return Err(Error::config("n_omega must be >= 1"));
        }
        if let Some(cap) = self.pga_cap {
            if !(cap > 0.0) {
                return Err(Error::config(format!("pga_cap must be > 0, got {cap}")));
            }
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.sample_rate
    }
}

/// A uniformly sampled base acceleration in m/s², starting at `t = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundMotion {
    pub dt: f64,
    pub accel: Vec<f64>,
}

impl GroundMotion {
    pub fn new(dt: f64, accel: Vec<f64>) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::domain(format!("sample interval must be > 0, got {dt}")));
        }
        if accel.is_empty() {
            return Err(Error::domain("ground motion has no samples"));
        }
        if let Some(i) = accel.iter().position(|a| !a.is_finite()) {
            return Err(Error::domain(format!("sample {i} is not finite")));
        }
        Ok(Self { dt, accel })
    }

    pub fn len(&self) -> usize {
        self.accel.len()
    }

    pub fn is_empty(&self) -> bool {
        self.accel.is_empty()
    }

    pub fn pga(&self) -> f64 {
        self.accel.iter().fold(0.0, |m, a| m.max(a.abs()))
    }

    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.dt
    }

    /// Truncate to the first `duration` seconds.
    pub fn truncated(&self, duration: f64) -> Self {
        let n = ((duration / self.dt + 1e-9).floor() as usize + 1).min(self.len());
        Self {
            dt: self.dt,
            accel: self.accel[..n].to_vec(),
        }
    }

    /// Multiply every sample by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            dt: self.dt,
            accel: self.accel.iter().map(|a| a * factor).collect(),
        }
    }
}

impl Excitation for GroundMotion {
    /// Linear interpolation; the end values are held outside the record.
    fn accel(&self, t: f64) -> f64 {
        let last = self.accel.len() - 1;
        if t <= 0.0 {
            return self.accel[0];
        }
        let s = t / self.dt;
        let i = s.floor() as usize;
        if i >= last {
            return self.accel[last];
        }
        let f = s - i as f64;
        self.accel[i] + f * (self.accel[i + 1] - self.accel[i])
    }

    fn duration(&self) -> f64 {
        (self.accel.len() - 1) as f64 * self.dt
    }
}

/// Provenance of a synthesized motion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisMetadata {
    pub requested_seed: u64,
    /// Seed of the accepted realization (`requested_seed + retries`).
    pub seed: u64,
    pub retries: u32,
    pub pga: f64,
    pub params: SpectrumParams,
    pub config: SynthesisConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesizedMotion {
    pub motion: GroundMotion,
    pub metadata: SynthesisMetadata,
}

/// One realization for a given phase seed, ignoring the PGA cap.
pub fn realize(p: &SpectrumParams, cfg: &SynthesisConfig, seed: u64) -> Result<GroundMotion> {
    p.validate()?;
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d_omega = cfg.omega_u / cfg.n_omega as f64;
    let comps: Vec<(f64, f64, f64)> = (0..cfg.n_omega)
        .map(|k| {
            let w = (k as f64 + 0.5) * d_omega;
            let phi = rng.random::<f64>() * 2.0 * PI;
            (w, (2.0 * p.stationary_psd(w) * d_omega).sqrt(), phi)
        })
        .collect();
    let dt = cfg.dt();
    let n = (cfg.duration / dt + 1e-9).floor() as usize + 1;
    // Each component is advanced by a unit phasor rotation instead of a
    // fresh cosine per sample.
    let mut sum = vec![0.0; n];
    for &(w, amp, phi) in &comps {
        if amp == 0.0 {
            continue;
        }
        let (s1, c1) = (w * dt).sin_cos();
        let (mut s, mut c) = phi.sin_cos();
        for v in sum.iter_mut() {
            *v += amp * c;
            let cn = c * c1 - s * s1;
            s = s * c1 + c * s1;
            c = cn;
        }
    }
    let accel = sum
        .iter()
        .enumerate()
        .map(|(i, v)| p.modulation_sq(i as f64 * dt).sqrt() * v)
        .collect();
    GroundMotion::new(dt, accel)
}

/// Draw realizations with seeds `cfg.seed, cfg.seed + 1, …` until one meets
/// the PGA cap.
pub fn synthesize(p: &SpectrumParams, cfg: &SynthesisConfig) -> Result<SynthesizedMotion> {
    for retries in 0..=cfg.max_retries {
        let seed = cfg.seed.wrapping_add(retries as u64);
        let motion = realize(p, cfg, seed)?;
        let pga = motion.pga();
        if cfg.pga_cap.is_none_or(|cap| pga <= cap) {
            return Ok(SynthesizedMotion {
                motion,
                metadata: SynthesisMetadata {
                    requested_seed: cfg.seed,
                    seed,
                    retries,
                    pga,
                    params: *p,
                    config: *cfg,
                },
            });
        }
    }
    Err(Error::RetryBudget {
        retries: cfg.max_retries,
        cap: cfg.pga_cap.unwrap_or(f64::INFINITY),
    })
}

/// A batch of accepted motions; motion `i` starts its search at seed
/// `base_seed + i · stride`. `stride` should exceed the retry budget so the
/// searches never overlap.
pub fn synthesize_ensemble(
    p: &SpectrumParams,
    cfg: &SynthesisConfig,
    count: usize,
    stride: u64,
) -> Result<Vec<SynthesizedMotion>> {
    (0..count)
        .into_par_iter()
        .map(|i| {
            let c = SynthesisConfig {
                seed: cfg.seed.wrapping_add(i as u64 * stride),
                ..*cfg
            };
            synthesize(p, &c)
        })
        .collect()
}

/// Data taper for [`ensemble_periodogram`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Taper {
    Hann,
    /// The first `k` orthogonal sine tapers `sin(π j u)`, `j = 1..=k`.
    Sine(usize),
}

impl Taper {
    fn shapes(&self) -> Vec<usize> {
        match *self {
            Taper::Hann => vec![0],
            Taper::Sine(k) => (1..=k.max(1)).collect(),
        }
    }

    fn value(order: usize, u: f64) -> f64 {
        if order == 0 {
            (PI * u).sin().powi(2)
        } else {
            (PI * order as f64 * u).sin()
        }
    }
}

/// Windowed estimate of the evolutionary spectrum around `t_ref`.
///
/// Each record is first-differenced (which flattens the steep low-frequency
/// part of the target and keeps leakage small), tapered over windows of
/// length `window` centred at `centers`, and every periodogram is divided by
/// the difference filter `2 − 2cos(ω dt)` and by the taper's
/// envelope-weighted energy `π Σ w² A²(t) dt / A²(t_ref)`. Averaging over
/// records, windows and tapers then estimates `S(ω, t_ref)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodogramSettings {
    pub window: f64,
    pub centers: Vec<f64>,
    pub taper: Taper,
    pub t_ref: f64,
}

impl Default for PeriodogramSettings {
    fn default() -> Self {
        Self {
            window: 10.0,
            centers: vec![5.0],
            taper: Taper::Sine(3),
            t_ref: 5.0,
        }
    }
}

pub fn ensemble_periodogram(
    motions: &[GroundMotion],
    p: &SpectrumParams,
    omegas: &[f64],
    s: &PeriodogramSettings,
) -> Result<Vec<f64>> {
    let first = motions.first().ok_or_else(|| Error::domain("empty ensemble"))?;
    let dt = first.dt;
    if motions.iter().any(|m| m.dt != dt || m.len() != first.len()) {
        return Err(Error::domain("ensemble members must share dt and length"));
    }
    let a_ref = p.modulation_sq(s.t_ref);
    if !(a_ref > 0.0) {
        return Err(Error::domain("modulation vanishes at the reference time"));
    }
    struct Win {
        i0: usize,
        w: Vec<f64>,
        norm: f64,
    }
    let mut wins = Vec::new();
    for &c in &s.centers {
        let start = c - 0.5 * s.window;
        let i0 = ((start / dt).round() as isize).max(1) as usize;
        let i1 = ((c + 0.5 * s.window) / dt).round() as usize;
        if i1 >= first.len() || i1 <= i0 {
            return Err(Error::domain(format!(
                "window centred at {c} s does not fit the records"
            )));
        }
        for order in s.taper.shapes() {
            let w: Vec<f64> = (i0..=i1)
                .map(|i| Taper::value(order, (i as f64 * dt - start) / s.window))
                .collect();
            let energy: f64 = w
                .iter()
                .enumerate()
                .map(|(k, wk)| wk * wk * p.modulation_sq((i0 + k) as f64 * dt))
                .sum();
            wins.push(Win {
                i0,
                w,
                norm: PI * energy * dt / a_ref,
            });
        }
    }
    let mut out = vec![0.0; omegas.len()];
    for m in motions {
        for (o, &om) in out.iter_mut().zip(omegas) {
            let h2 = 2.0 - 2.0 * (om * dt).cos();
            let mut acc = 0.0;
            for win in &wins {
                let (mut re, mut im) = (0.0, 0.0);
                for (k, wk) in win.w.iter().enumerate() {
                    let i = win.i0 + k;
                    let d = (m.accel[i] - m.accel[i - 1]) * wk;
                    let (sn, cs) = (om * i as f64 * dt).sin_cos();
                    re += d * cs;
                    im -= d * sn;
                }
                acc += (re * re + im * im) * dt * dt / win.norm;
            }
            *o += acc / (h2 * wins.len() as f64);
        }
    }
    for o in &mut out {
        *o /= motions.len() as f64;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// files

/// Read a record. Accepted layouts, with `#` comment lines allowed anywhere:
///
/// * two columns `t, accel`, with or without a header row;
/// * one column of accelerations preceded by a `# dt = <seconds>` comment.
///
/// Samples must be uniformly spaced to within 1e-9 s; times are re-based to
/// start at zero.
pub fn load_accelerogram(path: &Path, units: Units) -> Result<GroundMotion> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_accelerogram(&text, path, units)
}

pub fn parse_accelerogram(text: &str, path: &Path, units: Units) -> Result<GroundMotion> {
    let err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut declared_dt = None;
    let mut times = Vec::new();
    let mut accel = Vec::new();
    let mut columns = None;
    let mut seen_data = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(c) = trimmed.strip_prefix('#') {
            let c = c.trim();
            if let Some(v) = c
                .strip_prefix("dt")
                .map(str::trim_start)
                .and_then(|v| v.strip_prefix('='))
            {
                let dt: f64 = v
                    .trim()
                    .parse()
                    .map_err(|_| err(line, format!("cannot parse dt from '{}'", v.trim())))?;
                declared_dt = Some(dt);
            }
            continue;
        }
        let fields: Vec<&str> = trimmed.split([',', ';', '\t', ' ']).filter(|f| !f.is_empty()).collect();
        let parsed: std::result::Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        let values = match parsed {
            Ok(v) => v,
            Err(_) if !seen_data && columns.is_none() => {
                columns = Some(fields.len());
                continue;
            }
            Err(_) => return Err(err(line, format!("non-numeric field in '{trimmed}'"))),
        };
        let ncol = *columns.get_or_insert(values.len());
        if values.len() != ncol {
            return Err(err(line, format!("expected {ncol} columns, found {}", values.len())));
        }
        seen_data = true;
        match ncol {
            1 => accel.push(values[0]),
            2 => {
                times.push((line, values[0]));
                accel.push(values[1]);
            }
            n => return Err(err(line, format!("expected 1 or 2 columns, found {n}"))),
        }
        if !accel.last().unwrap().is_finite() {
            return Err(err(line, "acceleration is not finite".into()));
        }
    }
    if accel.is_empty() {
        return Err(err(0, "no samples found".into()));
    }
    let dt = if times.is_empty() {
        declared_dt.ok_or_else(|| err(0, "single-column record needs a '# dt = ...' line".into()))?
    } else {
        if times.len() < 2 {
            return Err(err(times[0].0, "need at least two samples to infer dt".into()));
        }
        let dt = times[1].1 - times[0].1;
        if !(dt > 0.0) {
            return Err(err(times[1].0, format!("time must increase, got step {dt}")));
        }
        for w in times.windows(2) {
            let step = w[1].1 - w[0].1;
            if (step - dt).abs() > 1e-9 {
                return Err(err(w[1].0, format!("non-uniform time step {step} (expected {dt})")));
            }
        }
        dt
    };
    let scale = units.to_si();
    let accel = if scale == 1.0 {
        accel
    } else {
        accel.into_iter().map(|a| a * scale).collect()
    };
    GroundMotion::new(dt, accel).map_err(|e| err(0, e.to_string()))
}

/// Two-column `t_seconds,accel` CSV in m/s², written atomically.
pub fn write_accelerogram(path: &Path, motion: &GroundMotion) -> Result<()> {
    atomic_write(path, render_accelerogram(motion).as_bytes())
}

pub fn render_accelerogram(motion: &GroundMotion) -> String {
    let mut s = String::with_capacity(motion.len() * 24 + 16);
    s.push_str("t_seconds,accel\n");
    for (i, a) in motion.accel.iter().enumerate() {
        s.push_str(&fmt_f64(motion.time(i)));
        s.push(',');
        s.push_str(&fmt_f64(*a));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn short_cfg(seed: u64) -> SynthesisConfig {
        SynthesisConfig {
            duration: 10.0,
            n_omega: 400,
            seed,
            ..Default::default()
        }
    }

    #[test]
    fn spectrum_examples() {
        let p = SpectrumParams::medium_soil(100.0);
        assert_eq!(evolutionary_psd(&p, 0.0, 5.0), 0.0);
        assert_eq!(p.kanai_tajimi(0.0), p.s0);
        // t e^{-bt} peaks at 1/b
        let peak = p.modulation_sq(5.0);
        assert!(p.modulation_sq(4.99) < peak && p.modulation_sq(5.01) < peak);
        assert!(evolutionary_psd(&p, 7.0, 3.0) > 0.0);
    }

    #[test]
    fn zero_intensity_gives_zero_motion() {
        let p = SpectrumParams {
            s0: 0.0,
            ..SpectrumParams::medium_soil(100.0)
        };
        let m = synthesize(&p, &short_cfg(3)).unwrap();
        assert!(m.motion.accel.iter().all(|&a| a == 0.0));
    }

    #[test]
    fn same_seed_same_motion() {
        let p = SpectrumParams::medium_soil(100.0);
        let a = synthesize(&p, &short_cfg(11)).unwrap();
        let b = synthesize(&p, &short_cfg(11)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.motion.accel[0], 0.0);
        assert_eq!(a.motion.len(), 1001);
    }

    #[test]
    fn cap_is_honoured_or_budget_error() {
        let p = SpectrumParams::medium_soil(100.0);
        let m = synthesize(&p, &short_cfg(5)).unwrap();
        assert!(m.metadata.pga <= 0.4 * STANDARD_GRAVITY);
        assert_eq!(m.metadata.seed, 5 + m.metadata.retries as u64);
        let tight = SynthesisConfig {
            pga_cap: Some(1e-6),
            max_retries: 3,
            ..short_cfg(5)
        };
        assert!(matches!(
            synthesize(&p, &tight),
            Err(Error::RetryBudget { retries: 3, .. })
        ));
    }

    #[test]
    fn config_validation() {
        let c = SynthesisConfig {
            omega_u: 400.0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        let p = SpectrumParams {
            zeta_g: 0.0,
            ..SpectrumParams::medium_soil(100.0)
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn interpolation() {
        let m = GroundMotion::new(0.5, vec![0.0, 1.0, -1.0]).unwrap();
        assert_eq!(m.accel(0.25), 0.5);
        assert_eq!(m.accel(0.75), 0.0);
        assert_eq!(m.accel(1.0), -1.0);
        assert_eq!(m.duration(), 1.0);
    }

    #[test]
    fn parse_layouts() {
        let p = Path::new("mem.csv");
        let two = "t_seconds,accel\n0,0.1\n0.02,-0.3\n0.04,0.2\n";
        let m = parse_accelerogram(two, p, Units::Si).unwrap();
        assert_eq!(m.dt, 0.02);
        assert_eq!(m.pga(), 0.3);
        let g = parse_accelerogram(two, p, Units::G).unwrap();
        assert_relative_eq!(g.accel[1], -0.3 * 9.80665, epsilon = 1e-15);
        let one = "# dt = 0.01\n0.5\n-0.25\n";
        let m = parse_accelerogram(one, p, Units::Si).unwrap();
        assert_eq!((m.dt, m.len()), (0.01, 2));
        let headless = "0 1\n0.1 2\n";
        assert_eq!(parse_accelerogram(headless, p, Units::Si).unwrap().len(), 2);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let p = Path::new("bad.csv");
        let cases = [
            ("t,a\n0,1\n0.02,x\n", 3),
            ("t,a\n0,1\n0.02,1\n0.05,1\n", 4),
            ("t,a\n0,1\n0.02,1,3\n", 3),
        ];
        for (text, want) in cases {
            match parse_accelerogram(text, p, Units::Si) {
                Err(Error::Parse { line, .. }) => assert_eq!(line, want, "{text:?}"),
                other => panic!("expected parse error for {text:?}, got {other:?}"),
            }
        }
        assert!(parse_accelerogram("", p, Units::Si).is_err());
        assert!(parse_accelerogram("0.1\n0.2\n", p, Units::Si).is_err());
    }

    #[test]
    fn render_then_parse_is_exact() {
        let p = SpectrumParams::medium_soil(100.0);
        let m = synthesize(&p, &short_cfg(2)).unwrap().motion;
        let back = parse_accelerogram(&render_accelerogram(&m), Path::new("x"), Units::Si).unwrap();
        assert_eq!(back, m);
    }
}
