//! Joint state and parameter estimation of a shear chain from noisy
//! absolute accelerations with a truncated unscented Kalman filter, and
//! the Monte-Carlo campaign built on it.

mod model;
mod ukf;

pub use model::{
    constraint_set, measurement_model, parameter_names, parameter_vector, process_model, project_parameters,
    KnownQuantities, Layout, ModelWorkspace,
};
pub use ukf::{
    inverse_mills, predict, robust_cholesky, sigma_points, symmetrize, truncate, update, Gaussian, LinearConstraint,
    SigmaParams, SigmaWeights,
};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{nrmse_percent, simulate_chain, ChainSystem, DamageConfig};
use crate::error::{Error, Result};
use crate::ground_motion::{synthesize, GroundMotion, SpectrumParams, SynthesisConfig};
use crate::hysteresis::{cumulative_work, BoucWenParams};

/// Filter tuning. Every field has a default and can be overridden from a
/// config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FilterConfig {
    pub sigma: SigmaParams,
    /// Initial parameter mean as a multiple of the true parameters.
    pub initial_param_factor: f64,
    /// Initial parameter standard deviation relative to the initial mean.
    pub initial_param_rel_std: f64,
    pub initial_state_var: f64,
    pub process_noise_state: f64,
    pub process_noise_param: f64,
    /// Noise σ as a fraction of each channel's RMS.
    pub measurement_noise_rms: f64,
    /// Corrupt the base acceleration seen by the filter as well.
    pub input_noise: bool,
    /// RK4 steps per measurement interval, for both the truth run and the
    /// filter's process model.
    pub substeps: usize,
    /// Sweeps of sequential truncation per update.
    pub truncation_passes: usize,
    /// A run whose state NRMSE (percent) exceeds this is flagged diverged.
    pub divergence_nrmse: f64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            sigma: SigmaParams::default(),
            initial_param_factor: 1.5,
            initial_param_rel_std: 0.5,
            initial_state_var: 1e-6,
            process_noise_state: 1e-8,
            process_noise_param: 1e-10,
            measurement_noise_rms: 0.1,
            input_noise: true,
            substeps: 10,
            truncation_passes: 5,
            divergence_nrmse: 50.0,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<()> {
        let pos = [
            ("sigma.alpha", self.sigma.alpha),
            ("initial_param_factor", self.initial_param_factor),
            ("initial_param_rel_std", self.initial_param_rel_std),
            ("initial_state_var", self.initial_state_var),
            ("divergence_nrmse", self.divergence_nrmse),
        ];
        for (name, v) in pos {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(format!("filter.{name} must be finite and > 0")));
            }
        }
        let nonneg = [
            ("process_noise_state", self.process_noise_state),
            ("process_noise_param", self.process_noise_param),
            ("measurement_noise_rms", self.measurement_noise_rms),
        ];
        for (name, v) in nonneg {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::config(format!("filter.{name} must be finite and >= 0")));
            }
        }
        if !self.sigma.beta.is_finite() || !self.sigma.kappa.is_finite() {
            return Err(Error::config("filter.sigma.beta and kappa must be finite"));
        }
        if self.substeps == 0 || self.truncation_passes == 0 {
            return Err(Error::config("filter.substeps and truncation_passes must be >= 1"));
        }
        Ok(())
    }
}

/// `signal + η` with `η ~ N(0, (rms_fraction·RMS(signal))²)` iid.
pub fn add_measurement_noise<R: Rng + ?Sized>(signal: &[f64], rms_fraction: f64, rng: &mut R) -> Vec<f64> {
    if signal.is_empty() || rms_fraction == 0.0 {
        return signal.to_vec();
    }
    let rms = (signal.iter().map(|v| v * v).sum::<f64>() / signal.len() as f64).sqrt();
    let sigma = rms_fraction * rms;
    signal
        .iter()
        .map(|v| {
            let e: f64 = rng.sample(StandardNormal);
            v + sigma * e
        })
        .collect()
}

/// Everything a filter step needs besides the prior.
pub struct FilterContext {
    pub known: KnownQuantities,
    pub weights: SigmaWeights,
    pub q: DMatrix<f64>,
    pub r: DMatrix<f64>,
    pub constraints: Vec<LinearConstraint>,
    pub dt: f64,
    pub substeps: usize,
    pub truncation_passes: usize,
}

impl FilterContext {
    pub fn new(known: KnownQuantities, cfg: &FilterConfig, dt: f64, meas_var: &[f64]) -> Result<Self> {
        known.validate()?;
        cfg.validate()?;
        let n = known.n_dof();
        if meas_var.len() != n || meas_var.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::config(
                "one positive measurement variance per channel is required",
            ));
        }
        let l = Layout { n };
        let mut q = DMatrix::zeros(l.dim(), l.dim());
        for i in 0..l.dim() {
            q[(i, i)] = if i < l.theta() {
                cfg.process_noise_state
            } else {
                cfg.process_noise_param
            };
        }
        Ok(Self {
            weights: cfg.sigma.weights(l.dim())?,
            q,
            r: DMatrix::from_diagonal(&DVector::from_column_slice(meas_var)),
            constraints: constraint_set(n),
            dt,
            substeps: cfg.substeps,
            truncation_passes: cfg.truncation_passes,
            known,
        })
    }
}

/// One predict/update/truncate cycle from `t_k` to `t_{k+1}` with base
/// accelerations `u0`, `u1` at the two ends and measurement `z` at `t_{k+1}`.
pub fn tukf_step(prior: &Gaussian, z: &[f64], u0: f64, u1: f64, ctx: &FilterContext) -> Result<Gaussian> {
    let n = ctx.known.n_dof();
    let mut ws = ModelWorkspace::new(n);
    let project = |x: &mut [f64]| project_parameters(n, x);
    let pred = predict(prior, &ctx.weights, &ctx.q, project, |x| {
        process_model(&ctx.known, x, u0, u1, ctx.dt, ctx.substeps, &mut ws).is_ok()
    })?;
    let mut post = update(
        &pred,
        &ctx.weights,
        &DVector::from_column_slice(z),
        &ctx.r,
        project,
        |x, out| measurement_model(&ctx.known, x, out),
    )?;
    truncate(&mut post, &ctx.constraints, ctx.truncation_passes);
    if !post.mean.iter().all(|v| v.is_finite()) {
        return Err(Error::Numerical("filter estimate became non-finite".into()));
    }
    Ok(post)
}

/// Filtered means and covariance diagonals, one row per measurement time
/// starting with the initial estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterTrajectory {
    pub dt: f64,
    pub mean: Vec<Vec<f64>>,
    pub var: Vec<Vec<f64>>,
}

/// Run the filter over `inputs` (length `L`) and `measurements`
/// (`measurements[k]` observed at `t = k·dt`, same length). The first
/// measurement is not assimilated since the initial estimate refers to it.
pub fn run_filter(
    ctx: &FilterContext,
    initial: Gaussian,
    inputs: &[f64],
    measurements: &[Vec<f64>],
) -> Result<FilterTrajectory> {
    if inputs.len() != measurements.len() || inputs.len() < 2 {
        return Err(Error::config("inputs and measurements must have equal length >= 2"));
    }
    let mut g = initial;
    let mut out = FilterTrajectory {
        dt: ctx.dt,
        mean: Vec::with_capacity(inputs.len()),
        var: Vec::with_capacity(inputs.len()),
    };
    let push = |out: &mut FilterTrajectory, g: &Gaussian| {
        out.mean.push(g.mean.as_slice().to_vec());
        out.var.push(g.cov.diagonal().as_slice().to_vec());
    };
    push(&mut out, &g);
    for k in 0..inputs.len() - 1 {
        g = tukf_step(&g, &measurements[k + 1], inputs[k], inputs[k + 1], ctx)?;
        push(&mut out, &g);
    }
    Ok(out)
}

/// Per-story NRMSE (percent) of filtered states against the truth run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateNrmse {
    pub y: Vec<f64>,
    pub y_dot: Vec<f64>,
    pub r: Vec<f64>,
}

impl StateNrmse {
    pub fn max(&self) -> f64 {
        self.y
            .iter()
            .chain(&self.y_dot)
            .chain(&self.r)
            .fold(f64::NEG_INFINITY, |a, &b| a.max(b))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationRun {
    pub seed: u64,
    pub diverged: bool,
    /// Final-step parameter estimate in [`parameter_names`] order.
    pub theta_hat: Vec<f64>,
    /// `theta_hat` divided by the true parameters.
    pub normalized: Vec<f64>,
    pub state_nrmse: StateNrmse,
    pub max_state_nrmse: f64,
    pub di_estimate: Vec<f64>,
    pub di_truth: Vec<f64>,
    /// NRMSE (percent) of each story's hysteretic force when the truth
    /// chain is re-run with the estimated `β, γ, n`. `None` if that
    /// parameter set is not admissible for the forward model.
    pub alternate_fr_nrmse: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trajectory: Option<FilterTrajectory>,
}

fn column(rows: &[Vec<f64>], i: usize) -> Vec<f64> {
    rows.iter().map(|r| r[i]).collect()
}

fn story_drift(rows: &[Vec<f64>], base: usize, j: usize) -> Vec<f64> {
    rows.iter()
        .map(|r| if j == 0 { r[base] } else { r[base + j] - r[base + j - 1] })
        .collect()
}

/// Identify `truth` from its simulated response to `motion` (sampled at the
/// measurement rate) with noise drawn from `seed`.
pub fn joint_estimate(
    truth: &ChainSystem,
    motion: &GroundMotion,
    cfg: &FilterConfig,
    seed: u64,
) -> Result<EstimationRun> {
    cfg.validate()?;
    let n = truth.n_dof();
    let l = Layout { n };
    let dt = motion.dt;
    let hist = simulate_chain(truth, motion, dt / cfg.substeps as f64)?;
    let samples = motion.len();
    let at = |series: &Vec<f64>| -> Vec<f64> { (0..samples).map(|k| series[k * cfg.substeps]).collect() };
    let clean: Vec<Vec<f64>> = hist.y_ddot_abs.iter().map(at).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noisy: Vec<Vec<f64>> = clean
        .iter()
        .map(|c| add_measurement_noise(c, cfg.measurement_noise_rms, &mut rng))
        .collect();
    let inputs = if cfg.input_noise {
        add_measurement_noise(&motion.accel, cfg.measurement_noise_rms, &mut rng)
    } else {
        motion.accel.clone()
    };
    let meas_var: Vec<f64> = clean
        .iter()
        .map(|c| {
            let ms = c.iter().map(|v| v * v).sum::<f64>() / c.len() as f64;
            (cfg.measurement_noise_rms * cfg.measurement_noise_rms * ms).max(1e-12)
        })
        .collect();
    let measurements: Vec<Vec<f64>> = (0..samples).map(|k| noisy.iter().map(|c| c[k]).collect()).collect();

    let theta = parameter_vector(truth);
    let ctx = FilterContext::new(KnownQuantities::from_system(truth), cfg, dt, &meas_var)?;
    let initial = initial_estimate(&theta, n, cfg);
    let traj = run_filter(&ctx, initial, &inputs, &measurements)?;

    let last = traj.mean.last().expect("non-empty trajectory");
    let theta_hat = last[l.theta()..].to_vec();
    let normalized = theta_hat.iter().zip(&theta).map(|(a, b)| a / b).collect();

    let mut nrmse = StateNrmse {
        y: Vec::with_capacity(n),
        y_dot: Vec::with_capacity(n),
        r: Vec::with_capacity(n),
    };
    for j in 0..n {
        nrmse
            .y
            .push(nrmse_percent(&at(&hist.y[j]), &column(&traj.mean, l.y(j)))?);
        nrmse
            .y_dot
            .push(nrmse_percent(&at(&hist.y_dot[j]), &column(&traj.mean, l.v(j)))?);
        nrmse
            .r
            .push(nrmse_percent(&at(&hist.r[j]), &column(&traj.mean, l.r(j)))?);
    }
    let max_state_nrmse = nrmse.max();
    let diverged = !(max_state_nrmse <= cfg.divergence_nrmse);

    let mut di_estimate = Vec::with_capacity(n);
    let mut di_truth = Vec::with_capacity(n);
    for (j, story) in truth.stories().iter().enumerate() {
        let d_y = story.bw().d_y();
        let truth_cfg = DamageConfig::conventional(story.k(), d_y)?;
        let peak_truth = hist.drift(j).iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        di_truth.push(truth_cfg.index(peak_truth, *hist.e_h[j].last().unwrap_or(&0.0)));

        let drift = story_drift(&traj.mean, l.y(0), j);
        let drift_vel = story_drift(&traj.mean, l.v(0), j);
        let f_r: Vec<f64> = traj
            .mean
            .iter()
            .map(|x| (1.0 - truth.alpha()) * d_y * x[l.k(j)] * x[l.r(j)])
            .collect();
        let e_h = cumulative_work(&f_r, &drift_vel, dt)?;
        let peak = drift.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        let k_hat = theta_hat[j].max(f64::MIN_POSITIVE);
        let est_cfg = DamageConfig::conventional(k_hat, d_y)?;
        di_estimate.push(est_cfg.index(peak, *e_h.last().unwrap_or(&0.0)));
    }

    let alternate_fr_nrmse = alternate_force_check(truth, &theta_hat, motion, dt / cfg.substeps as f64, &hist.f_r)?;

    Ok(EstimationRun {
        seed,
        diverged,
        theta_hat,
        normalized,
        state_nrmse: nrmse,
        max_state_nrmse,
        di_estimate,
        di_truth,
        alternate_fr_nrmse,
        trajectory: Some(traj),
    })
}

/// Parameters at `factor ×` truth with the configured relative spread;
/// states at rest.
pub fn initial_estimate(theta: &[f64], n: usize, cfg: &FilterConfig) -> Gaussian {
    let l = Layout { n };
    let mut mean = DVector::zeros(l.dim());
    let mut var = DVector::from_element(l.dim(), cfg.initial_state_var);
    for (i, t) in theta.iter().enumerate() {
        let m = cfg.initial_param_factor * t;
        mean[l.theta() + i] = m;
        var[l.theta() + i] = (cfg.initial_param_rel_std * m).powi(2).max(cfg.initial_state_var);
    }
    let mut g = Gaussian {
        mean,
        cov: DMatrix::from_diagonal(&var),
    };
    truncate(&mut g, &constraint_set(n), cfg.truncation_passes);
    g
}

fn alternate_force_check(
    truth: &ChainSystem,
    theta_hat: &[f64],
    motion: &GroundMotion,
    sim_dt: f64,
    reference: &[Vec<f64>],
) -> Result<Option<Vec<f64>>> {
    let n = truth.n_dof();
    let l = Layout { n };
    let off = l.theta();
    let bw: Result<Vec<BoucWenParams>> = truth
        .stories()
        .iter()
        .enumerate()
        .map(|(j, s)| {
            BoucWenParams::new(
                theta_hat[l.beta(j) - off],
                theta_hat[l.gamma(j) - off],
                theta_hat[l.exponent(j) - off],
                s.bw().d_y(),
            )
        })
        .collect();
    let Ok(bw) = bw else { return Ok(None) };
    let Ok(alt) = truth.with_bw(&bw) else { return Ok(None) };
    let Ok(h) = simulate_chain(&alt, motion, sim_dt) else {
        return Ok(None);
    };
    let out = (0..n)
        .map(|j| nrmse_percent(&reference[j], &h.f_r[j]))
        .collect::<Result<Vec<_>>>()?;
    Ok(Some(out))
}

/// Monte-Carlo campaign definition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CampaignConfig {
    pub system: ChainSystem,
    pub spectrum: SpectrumParams,
    pub synthesis: SynthesisConfig,
    pub filter: FilterConfig,
    pub n_runs: usize,
    pub base_seed: u64,
    pub keep_trajectories: bool,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        let synthesis = SynthesisConfig::default();
        Self {
            system: ChainSystem::four_story_benchmark(),
            spectrum: SpectrumParams::medium_soil(synthesis.sample_rate),
            synthesis,
            filter: FilterConfig::default(),
            n_runs: 20,
            base_seed: 0,
            keep_trajectories: false,
        }
    }
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_runs == 0 {
            return Err(Error::config("n_runs must be >= 1"));
        }
        self.spectrum.validate()?;
        self.synthesis.validate()?;
        self.filter.validate()
    }

    /// Seed of run `k`.
    pub fn run_seed(&self, k: usize) -> u64 {
        self.base_seed.wrapping_add(k as u64)
    }

    /// Phase seed handed to the synthesizer for run `k`; spaced so that
    /// rejection retries of neighbouring runs never overlap.
    pub fn motion_seed(&self, k: usize) -> u64 {
        self.run_seed(k).wrapping_mul(1 << 20)
    }
}

/// Single campaign run: synthesize a motion, then identify.
pub fn campaign_run(cfg: &CampaignConfig, k: usize) -> Result<(EstimationRun, f64)> {
    let synth = SynthesisConfig {
        seed: cfg.motion_seed(k),
        ..cfg.synthesis
    };
    let m = synthesize(&cfg.spectrum, &synth)?;
    let mut run = joint_estimate(&cfg.system, &m.motion, &cfg.filter, cfg.run_seed(k))?;
    if !cfg.keep_trajectories {
        run.trajectory = None;
    }
    Ok((run, m.metadata.pga))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterStats {
    pub name: String,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub n_runs: usize,
    pub n_diverged: usize,
    /// Statistics of the normalized estimates over non-diverged runs.
    pub normalized: Vec<ParameterStats>,
    pub max_state_nrmse: f64,
    /// `di_estimate / di_truth` over all stories of non-diverged runs.
    pub di_ratio_min: f64,
    pub di_ratio_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Campaign {
    pub config: CampaignConfig,
    pub runs: Vec<EstimationRun>,
    pub pga: Vec<f64>,
    pub summary: CampaignSummary,
}

fn sample_stats(name: String, v: &[f64]) -> ParameterStats {
    let k = v.len() as f64;
    let mean = v.iter().sum::<f64>() / k;
    let std = if v.len() > 1 {
        (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt()
    } else {
        0.0
    };
    ParameterStats {
        name,
        mean,
        std,
        min: v.iter().copied().fold(f64::INFINITY, f64::min),
        max: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}

pub fn summarize(runs: &[EstimationRun]) -> CampaignSummary {
    let ok: Vec<&EstimationRun> = runs.iter().filter(|r| !r.diverged).collect();
    let n_par = runs.first().map_or(0, |r| r.normalized.len());
    let names = parameter_names(n_par / 5);
    let normalized = if ok.is_empty() {
        Vec::new()
    } else {
        (0..n_par)
            .map(|i| {
                sample_stats(
                    names[i].clone(),
                    &ok.iter().map(|r| r.normalized[i]).collect::<Vec<_>>(),
                )
            })
            .collect()
    };
    let ratios: Vec<f64> = ok
        .iter()
        .flat_map(|r| r.di_estimate.iter().zip(&r.di_truth).map(|(a, b)| a / b))
        .collect();
    CampaignSummary {
        n_runs: runs.len(),
        n_diverged: runs.len() - ok.len(),
        normalized,
        max_state_nrmse: ok.iter().map(|r| r.max_state_nrmse).fold(f64::NEG_INFINITY, f64::max),
        di_ratio_min: ratios.iter().copied().fold(f64::INFINITY, f64::min),
        di_ratio_max: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}

/// Runs execute in parallel on the current rayon pool; results are merged
/// by run index so the summary does not depend on scheduling.
pub fn monte_carlo(cfg: &CampaignConfig) -> Result<Campaign> {
    cfg.validate()?;
    let results: Vec<(EstimationRun, f64)> = (0..cfg.n_runs)
        .into_par_iter()
        .map(|k| campaign_run(cfg, k))
        .collect::<Result<_>>()?;
    let (runs, pga): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    let summary = summarize(&runs);
    Ok(Campaign {
        config: cfg.clone(),
        runs,
        pga,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn noise_statistics_and_determinism() {
        let signal: Vec<f64> = (0..100_000).map(|i| (0.01 * i as f64).sin()).collect();
        let mut a = ChaCha8Rng::seed_from_u64(9);
        let noisy = add_measurement_noise(&signal, 0.1, &mut a);
        let rms = (0.5_f64).sqrt();
        let eta: Vec<f64> = noisy.iter().zip(&signal).map(|(n, s)| n - s).collect();
        let sd = (eta.iter().map(|e| e * e).sum::<f64>() / eta.len() as f64).sqrt();
        assert!((sd / (0.1 * rms) - 1.0).abs() < 0.02, "{sd}");
        let mut b = ChaCha8Rng::seed_from_u64(9);
        assert_eq!(noisy, add_measurement_noise(&signal, 0.1, &mut b));
        assert_eq!(add_measurement_noise(&signal[..10], 0.0, &mut b), signal[..10].to_vec());
    }

    /// Unscented filtering of a linear-Gaussian model reproduces the
    /// Kalman filter.
    #[test]
    fn linear_model_matches_kalman_filter() {
        let f = DMatrix::from_row_slice(3, 3, &[1.0, 0.1, 0.0, -0.2, 0.95, 0.05, 0.0, 0.0, 1.0]);
        let h = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.5, 0.0, 1.0, 0.0]);
        let q = DMatrix::from_diagonal(&DVector::from_vec(vec![1e-3, 2e-3, 1e-4]));
        let r = DMatrix::from_diagonal(&DVector::from_vec(vec![0.05, 0.02]));
        let w = SigmaParams::default().weights(3).unwrap();
        let mut g = Gaussian {
            mean: DVector::from_vec(vec![0.3, -0.1, 1.0]),
            cov: DMatrix::from_row_slice(3, 3, &[0.5, 0.1, 0.0, 0.1, 0.4, 0.05, 0.0, 0.05, 0.3]),
        };
        let mut kf = g.clone();
        for k in 0..50 {
            let z = DVector::from_vec(vec![(0.3 * k as f64).sin(), (0.2 * k as f64).cos()]);
            g = predict(
                &g,
                &w,
                &q,
                |_| {},
                |x| {
                    let y = &f * DVector::from_column_slice(x);
                    x.copy_from_slice(y.as_slice());
                    true
                },
            )
            .unwrap();
            g = update(
                &g,
                &w,
                &z,
                &r,
                |_| {},
                |x, out| out.copy_from_slice((&h * DVector::from_column_slice(x)).as_slice()),
            )
            .unwrap();

            let m = &f * &kf.mean;
            let p = &f * &kf.cov * f.transpose() + &q;
            let s = &h * &p * h.transpose() + &r;
            let gain = &p * h.transpose() * s.try_inverse().unwrap();
            kf.mean = &m + &gain * (&z - &h * &m);
            kf.cov = &p - &gain * &h * &p;

            assert!((&g.mean - &kf.mean).abs().max() < 1e-8, "step {k}");
            assert!((&g.cov - &kf.cov).abs().max() < 1e-8, "step {k}");
            assert!((&g.cov - g.cov.transpose()).abs().max() <= 1e-10);
        }
    }

    #[test]
    fn noiseless_truth_initialized_filter_stays_at_truth() {
        let sys = ChainSystem::four_story_benchmark();
        let accel: Vec<f64> = (0..301).map(|i| 2.0 * (0.08 * i as f64).sin()).collect();
        let motion = GroundMotion::new(0.01, accel).unwrap();
        let cfg = FilterConfig {
            initial_param_factor: 1.0,
            initial_param_rel_std: 1e-6,
            measurement_noise_rms: 0.0,
            process_noise_param: 0.0,
            ..FilterConfig::default()
        };
        let run = joint_estimate(&sys, &motion, &cfg, 1).unwrap();
        for v in &run.normalized {
            assert_relative_eq!(*v, 1.0, epsilon = 1e-4);
        }
        assert!(!run.diverged);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn truncated_posterior_is_feasible(
            means in prop::collection::vec(-3.0f64..3.0, 10),
            scale in 0.01f64..4.0,
            corr in -0.9f64..0.9,
        ) {
            let n = 2;
            let l = Layout { n };
            let mut mean = DVector::zeros(l.dim());
            for (i, m) in means.iter().enumerate() {
                mean[l.theta() + i] = *m;
            }
            let mut cov = DMatrix::identity(l.dim(), l.dim()) * scale;
            for j in 0..n {
                let (b, g) = (l.beta(j), l.gamma(j));
                cov[(b, g)] = corr * scale;
                cov[(g, b)] = corr * scale;
            }
            let mut gauss = Gaussian { mean, cov };
            let cons = constraint_set(n);
            truncate(&mut gauss, &cons, 5);
            for c in &cons {
                prop_assert!(c.value(gauss.mean.as_slice()) >= c.bound - 1e-12);
            }
            prop_assert!((&gauss.cov - gauss.cov.transpose()).abs().max() <= 1e-10);
            prop_assert!(gauss.cov.diagonal().iter().all(|v| *v >= -1e-12));
        }
    }
}
