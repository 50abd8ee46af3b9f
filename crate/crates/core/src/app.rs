//! Batch front end: configuration files, subcommand dispatch and artifact
//! emission. Every command computes all of its outputs in memory first and
//! only then writes them, each through a temp file and rename, so a failing
//! run leaves nothing behind.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::dynamics::{
    cr_spectrum, nrmse_percent, park_ang_index, simulate_chain, simulate_sdof, ChainSystem, CrConfig, DamageAssessment,
    DamageConfig, Excitation, ResponseHistory, Sinusoid,
};
use crate::error::{Error, Result};
use crate::estimation::{campaign_run, parameter_names, summarize, CampaignConfig, EstimationRun, Layout};
use crate::ground_motion::{
    load_accelerogram, render_accelerogram, synthesize_ensemble, GroundMotion, SpectrumParams, SynthesisConfig, Units,
};
use crate::hysteresis::{BoucWenParams, OscillatorParams};
use crate::insensitivity::{alternate_params, sweep, ContourSpec, Delta2Rule, Interval};
use crate::io::{atomic_write, csv_bytes, fmt_f64, render_contour_csv, render_response_csv};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Sweep,
    GroundMotion,
    Cr,
    Identify,
    MonteCarlo,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Sweep => "sweep",
            Command::GroundMotion => "groundmotion",
            Command::Cr => "cr",
            Command::Identify => "identify",
            Command::MonteCarlo => "montecarlo",
        }
    }
}

/// Flags shared by all subcommands. `seed` overrides the seed in the config
/// file where the command has one; `units` applies to record files.
#[derive(Debug, Clone, Default)]
pub struct Options {
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub out_dir: PathBuf,
    pub units: Units,
}

/// An output file held in memory until the command has succeeded.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    fn json<T: Serialize>(name: &str, value: &T) -> Result<Self> {
        let mut bytes =
            serde_json::to_vec_pretty(value).map_err(|e| Error::Numerical(format!("serializing {name}: {e}")))?;
        bytes.push(b'\n');
        Ok(Self {
            name: name.into(),
            bytes,
        })
    }

    fn table(name: &str, header: &[String], rows: &[Vec<f64>]) -> Result<Self> {
        Ok(Self {
            name: name.into(),
            bytes: csv_bytes(header, rows.iter().map(|r| r.iter().map(|v| fmt_f64(*v)).collect()))?,
        })
    }
}

/// Base acceleration source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExcitationSpec {
    Sinusoid {
        amplitude: f64,
        omega: f64,
        duration: f64,
    },
    /// Accelerogram file; relative paths are taken from the config file's
    /// directory. `scale` multiplies the record after unit conversion.
    Record {
        path: PathBuf,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scale: Option<f64>,
    },
}

impl Default for ExcitationSpec {
    fn default() -> Self {
        ExcitationSpec::Sinusoid {
            amplitude: -2.5,
            omega: std::f64::consts::PI,
            duration: 10.0,
        }
    }
}

enum LoadedExcitation {
    Sine(Sinusoid),
    Record(GroundMotion),
}

impl LoadedExcitation {
    fn as_dyn(&self) -> &dyn Excitation {
        match self {
            LoadedExcitation::Sine(s) => s,
            LoadedExcitation::Record(m) => m,
        }
    }
}

fn resolve(path: &Path, base: Option<&Path>) -> PathBuf {
    match base {
        Some(b) if path.is_relative() => b.join(path),
        _ => path.to_path_buf(),
    }
}

fn config_dir(opts: &Options) -> Option<&Path> {
    opts.config.as_deref().and_then(Path::parent)
}

impl ExcitationSpec {
    fn load(&self, opts: &Options) -> Result<LoadedExcitation> {
        match self {
            ExcitationSpec::Sinusoid {
                amplitude,
                omega,
                duration,
            } => {
                if ![*amplitude, *omega, *duration].iter().all(|v| v.is_finite()) || *duration < 0.0 {
                    return Err(Error::config(
                        "sinusoid needs finite amplitude and omega and duration >= 0",
                    ));
                }
                Ok(LoadedExcitation::Sine(Sinusoid {
                    amplitude: *amplitude,
                    omega: *omega,
                    duration: *duration,
                }))
            }
            ExcitationSpec::Record { path, scale } => {
                let m = load_accelerogram(&resolve(path, config_dir(opts)), opts.units)?;
                Ok(LoadedExcitation::Record(match scale {
                    Some(s) if !s.is_finite() => return Err(Error::config("record scale must be finite")),
                    Some(s) => m.scaled(*s),
                    None => m,
                }))
            }
        }
    }
}

/// Single oscillator or shear chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum SystemSpec {
    Sdof(OscillatorParams),
    Chain(ChainSystem),
}

/// The El Centro study oscillator.
pub fn reference_oscillator() -> OscillatorParams {
    let bw = BoucWenParams::new(2.0, 1.0, 2.0, 0.0365).expect("valid constants");
    OscillatorParams::new(1.0, 0.5, 100.0, 0.1, bw).expect("valid constants")
}

impl Default for SystemSpec {
    fn default() -> Self {
        SystemSpec::Sdof(reference_oscillator())
    }
}

/// Park-Ang settings with `y_ult = y_ult_factor · D_y` and `F_y = k D_y`
/// per element.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DamageSpec {
    pub y_ult_factor: f64,
    pub delta_e: f64,
}

impl Default for DamageSpec {
    fn default() -> Self {
        Self {
            y_ult_factor: 6.0,
            delta_e: 0.1,
        }
    }
}

impl DamageSpec {
    fn config(&self, k: f64, d_y: f64) -> Result<DamageConfig> {
        DamageConfig::new(self.y_ult_factor * d_y, self.delta_e, k * d_y)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulateConfig {
    pub system: SystemSpec,
    pub excitation: ExcitationSpec,
    pub dt: f64,
    pub damage: Option<DamageSpec>,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            system: SystemSpec::default(),
            excitation: ExcitationSpec::default(),
            dt: 0.001,
            damage: Some(DamageSpec::default()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseSummary {
    pub peak_drift: Vec<f64>,
    pub peak_displacement: Vec<f64>,
    pub total_hysteretic_energy: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub damage: Option<Vec<DamageAssessment>>,
}

fn element_stiffness(sys: &SystemSpec) -> Vec<(f64, f64)> {
    match sys {
        SystemSpec::Sdof(o) => vec![(o.k(), o.bw().d_y())],
        SystemSpec::Chain(c) => c.stories().iter().map(|s| (s.k(), s.bw().d_y())).collect(),
    }
}

fn summarize_response(h: &ResponseHistory, sys: &SystemSpec, damage: Option<&DamageSpec>) -> Result<ResponseSummary> {
    let n = h.n_dof();
    let damage = match damage {
        None => None,
        Some(d) => Some(
            element_stiffness(sys)
                .iter()
                .enumerate()
                .map(|(j, &(k, d_y))| park_ang_index(h, j, &d.config(k, d_y)?))
                .collect::<Result<Vec<_>>>()?,
        ),
    };
    Ok(ResponseSummary {
        peak_drift: (0..n)
            .map(|j| h.drift(j).iter().fold(0.0, |a: f64, v| a.max(v.abs())))
            .collect(),
        peak_displacement: (0..n)
            .map(|j| h.y[j].iter().fold(0.0, |a: f64, v| a.max(v.abs())))
            .collect(),
        total_hysteretic_energy: h.e_h.iter().map(|e| *e.last().unwrap_or(&0.0)).collect(),
        damage,
    })
}

fn simulate_system(sys: &SystemSpec, exc: &dyn Excitation, dt: f64) -> Result<ResponseHistory> {
    match sys {
        SystemSpec::Sdof(o) => simulate_sdof(o, exc, dt),
        SystemSpec::Chain(c) => simulate_chain(c, exc, dt),
    }
}

pub fn cmd_simulate(cfg: &SimulateConfig, opts: &Options) -> Result<Vec<Artifact>> {
    let exc = cfg.excitation.load(opts)?;
    if let Some(d) = &cfg.damage {
        for (k, d_y) in element_stiffness(&cfg.system) {
            d.config(k, d_y)?;
        }
    }
    let h = simulate_system(&cfg.system, exc.as_dyn(), cfg.dt)?;
    let summary = summarize_response(&h, &cfg.system, cfg.damage.as_ref())?;
    Ok(vec![
        Artifact {
            name: "response.csv".into(),
            bytes: render_response_csv(&h)?,
        },
        Artifact::json(
            "summary.json",
            &json!({ "config": cfg, "seed": Value::Null, "summary": summary }),
        )?,
    ])
}

/// Response comparison over the contour grid: each feasible cell's
/// alternate shape replaces the oscillator's and the run is compared with
/// the unperturbed one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResponseSweep {
    pub oscillator: OscillatorParams,
    #[serde(default)]
    pub excitation: ExcitationSpec,
    #[serde(default = "default_dt")]
    pub dt: f64,
}

fn default_dt() -> f64 {
    0.001
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub contour: ContourSpec,
    pub response: Option<ResponseSweep>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            contour: ContourSpec {
                base: BoucWenParams::new(2.0, 1.0, 2.0, 1.0).expect("valid constants"),
                delta_n: Interval::closed(-0.5, 1.0, 61),
                delta_1: Interval::closed(-0.5, 1.0, 61),
                delta_2: Delta2Rule::Scaled(1.0),
            },
            response: None,
        }
    }
}

pub fn cmd_sweep(cfg: &SweepConfig, opts: &Options) -> Result<Vec<Artifact>> {
    let exc = cfg.response.as_ref().map(|r| r.excitation.load(opts)).transpose()?;
    let grid = sweep(&cfg.contour)?;
    let mut out = vec![Artifact {
        name: "contour.csv".into(),
        bytes: render_contour_csv(&grid)?,
    }];
    if let (Some(rs), Some(exc)) = (&cfg.response, exc) {
        let base = simulate_sdof(&rs.oscillator, exc.as_dyn(), rs.dt)?;
        let shape = rs.oscillator.bw();
        let rows: Vec<Vec<f64>> = grid
            .cells
            .par_iter()
            .map(|cell| -> Result<Vec<f64>> {
                let p = cell.perturbation;
                let mut row = vec![p.delta_n, p.delta_1, p.delta_2];
                match alternate_params(shape, &p) {
                    Ok(a) => {
                        let h = simulate_sdof(&rs.oscillator.with_bw(a), exc.as_dyn(), rs.dt)?;
                        row.extend([1.0, a.beta(), a.gamma(), a.n()]);
                        row.push(nrmse_percent(&base.f_r[0], &h.f_r[0])?);
                        row.push(nrmse_percent(&base.y[0], &h.y[0])?);
                        row.push(nrmse_percent(&base.y_ddot_abs[0], &h.y_ddot_abs[0])?);
                    }
                    Err(_) => row.extend([0.0, f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN]),
                }
                Ok(row)
            })
            .collect::<Result<_>>()?;
        let header: Vec<String> = [
            "delta_n",
            "delta_1",
            "delta_2",
            "feasible",
            "beta",
            "gamma",
            "n",
            "nrmse_fr",
            "nrmse_y",
            "nrmse_yabs",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        out.push(Artifact::table("nrmse.csv", &header, &rows)?);
    }
    out.push(Artifact::json(
        "summary.json",
        &json!({ "config": cfg, "seed": Value::Null, "cells": grid.cells.len() }),
    )?);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GroundMotionCommandConfig {
    pub spectrum: SpectrumParams,
    pub synthesis: SynthesisConfig,
    pub count: usize,
}

impl Default for GroundMotionCommandConfig {
    fn default() -> Self {
        let synthesis = SynthesisConfig::default();
        Self {
            spectrum: SpectrumParams::medium_soil(synthesis.sample_rate),
            synthesis,
            count: 1,
        }
    }
}

/// Seed spacing between ensemble members.
pub const ENSEMBLE_STRIDE: u64 = 1 << 20;

pub fn cmd_groundmotion(cfg: &GroundMotionCommandConfig) -> Result<Vec<Artifact>> {
    if cfg.count == 0 {
        return Err(Error::config("count must be >= 1"));
    }
    cfg.spectrum.validate()?;
    cfg.synthesis.validate()?;
    let motions = synthesize_ensemble(&cfg.spectrum, &cfg.synthesis, cfg.count, ENSEMBLE_STRIDE)?;
    let mut out: Vec<Artifact> = motions
        .iter()
        .enumerate()
        .map(|(i, m)| Artifact {
            name: format!("motion_{i:03}.csv"),
            bytes: render_accelerogram(&m.motion).into_bytes(),
        })
        .collect();
    let meta: Vec<_> = motions.iter().map(|m| &m.metadata).collect();
    out.push(Artifact::json(
        "summary.json",
        &json!({ "config": cfg, "seed": cfg.synthesis.seed, "motions": meta }),
    )?);
    Ok(out)
}

/// Linearly spaced periods.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Default for PeriodGrid {
    fn default() -> Self {
        Self {
            start: 0.1,
            stop: 3.0,
            count: 50,
        }
    }
}

impl PeriodGrid {
    pub fn periods(&self) -> Result<Vec<f64>> {
        if !(self.start > 0.0 && self.stop >= self.start) || self.count == 0 {
            return Err(Error::config("periods need 0 < start <= stop and count >= 1"));
        }
        Interval::closed(self.start, self.stop, self.count).samples()
    }
}

/// Alternative hysteresis shape to evaluate next to the base one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedShape {
    pub name: String,
    pub beta: f64,
    pub gamma: f64,
    pub n: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrCommandConfig {
    pub records: Vec<PathBuf>,
    pub cr: CrConfig,
    #[serde(default)]
    pub periods: PeriodGrid,
    #[serde(default)]
    pub alternates: Vec<NamedShape>,
}

pub fn cmd_cr(cfg: &CrCommandConfig, opts: &Options) -> Result<Vec<Artifact>> {
    if cfg.records.is_empty() {
        return Err(Error::config("cr needs at least one record"));
    }
    let periods = cfg.periods.periods()?;
    let motions = cfg
        .records
        .iter()
        .map(|p| load_accelerogram(&resolve(p, config_dir(opts)), opts.units))
        .collect::<Result<Vec<_>>>()?;
    let mut shapes = vec![("base".to_string(), cfg.cr)];
    for s in &cfg.alternates {
        shapes.push((
            s.name.clone(),
            CrConfig {
                beta: s.beta,
                gamma: s.gamma,
                n: s.n,
                ..cfg.cr
            },
        ));
    }
    let mut rows = Vec::new();
    let mut names = Vec::new();
    for (ri, m) in motions.iter().enumerate() {
        for (si, (name, c)) in shapes.iter().enumerate() {
            for p in cr_spectrum(m, &periods, c)? {
                rows.push(vec![
                    ri as f64,
                    si as f64,
                    p.period,
                    p.elastic_peak,
                    p.inelastic_peak,
                    p.d_y,
                    p.ratio,
                ]);
            }
            if ri == 0 {
                names.push(name.clone());
            }
        }
    }
    let header: Vec<String> = [
        "record",
        "shape",
        "period",
        "elastic_peak",
        "inelastic_peak",
        "d_y",
        "c_r",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    Ok(vec![
        Artifact::table("cr.csv", &header, &rows)?,
        Artifact::json(
            "summary.json",
            &json!({ "config": cfg, "seed": Value::Null, "shapes": names }),
        )?,
    ])
}

fn campaign_artifacts(cfg: &CampaignConfig, runs: &[EstimationRun], pga: &[f64]) -> Result<Vec<Artifact>> {
    let n = cfg.system.n_dof();
    let names = parameter_names(n);
    let mut h_est: Vec<String> = vec!["run".into(), "seed".into(), "diverged".into()];
    h_est.extend(names.iter().cloned());
    let mut h_nrmse: Vec<String> = vec!["run".into()];
    for block in ["y", "ydot", "r"] {
        h_nrmse.extend((1..=n).map(|j| format!("{block}{j}")));
    }
    let mut h_di: Vec<String> = vec!["run".into()];
    h_di.extend((1..=n).map(|j| format!("di_est{j}")));
    h_di.extend((1..=n).map(|j| format!("di_true{j}")));
    h_di.extend((1..=n).map(|j| format!("fr_nrmse{j}")));

    let mut est = Vec::new();
    let mut nrm = Vec::new();
    let mut di = Vec::new();
    for (k, r) in runs.iter().enumerate() {
        let mut row = vec![k as f64, r.seed as f64, if r.diverged { 1.0 } else { 0.0 }];
        row.extend(&r.normalized);
        est.push(row);
        let mut row = vec![k as f64];
        row.extend(
            r.state_nrmse
                .y
                .iter()
                .chain(&r.state_nrmse.y_dot)
                .chain(&r.state_nrmse.r),
        );
        nrm.push(row);
        let mut row = vec![k as f64];
        row.extend(r.di_estimate.iter().chain(&r.di_truth));
        match &r.alternate_fr_nrmse {
            Some(v) => row.extend(v),
            None => row.extend(std::iter::repeat_n(f64::NAN, n)),
        }
        di.push(row);
    }
    let stripped: Vec<EstimationRun> = runs
        .iter()
        .map(|r| EstimationRun {
            trajectory: None,
            ..r.clone()
        })
        .collect();
    Ok(vec![
        Artifact::table("normalized_estimates.csv", &h_est, &est)?,
        Artifact::table("state_nrmse.csv", &h_nrmse, &nrm)?,
        Artifact::table("damage_index.csv", &h_di, &di)?,
        Artifact::json(
            "summary.json",
            &json!({
                "config": cfg,
                "seed": cfg.base_seed,
                "summary": summarize(runs),
                "pga": pga,
                "runs": stripped,
            }),
        )?,
    ])
}

pub fn cmd_montecarlo(cfg: &CampaignConfig) -> Result<Vec<Artifact>> {
    let c = crate::estimation::monte_carlo(cfg)?;
    campaign_artifacts(cfg, &c.runs, &c.pga)
}

/// A single campaign run (`n_runs` is forced to 1) plus the filtered
/// trajectory.
pub fn cmd_identify(cfg: &CampaignConfig) -> Result<Vec<Artifact>> {
    let cfg = CampaignConfig {
        n_runs: 1,
        ..cfg.clone()
    };
    cfg.validate()?;
    let work = CampaignConfig {
        keep_trajectories: true,
        ..cfg.clone()
    };
    let (run, pga) = campaign_run(&work, 0)?;
    let mut out = campaign_artifacts(&cfg, std::slice::from_ref(&run), &[pga])?;
    let traj = run.trajectory.as_ref().expect("trajectory kept");
    let l = Layout { n: cfg.system.n_dof() };
    let mut names: Vec<String> = Vec::with_capacity(l.dim());
    for block in ["y", "ydot", "r"] {
        names.extend((1..=l.n).map(|j| format!("{block}{j}")));
    }
    names.extend(parameter_names(l.n));
    let mut header = vec!["t".to_string()];
    header.extend(names.iter().cloned());
    header.extend(names.iter().map(|s| format!("sd_{s}")));
    let rows: Vec<Vec<f64>> = traj
        .mean
        .iter()
        .zip(&traj.var)
        .enumerate()
        .map(|(k, (m, v))| {
            let mut row = vec![k as f64 * traj.dt];
            row.extend(m);
            row.extend(v.iter().map(|x| x.max(0.0).sqrt()));
            row
        })
        .collect();
    out.push(Artifact::table("trajectory.csv", &header, &rows)?);
    Ok(out)
}

/// Parse a config file, rejecting unknown keys.
pub fn load_config<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        message: e.to_string(),
    })
}

fn config_or_default<T: DeserializeOwned + Default>(opts: &Options) -> Result<T> {
    match &opts.config {
        Some(p) => load_config(p),
        None => Ok(T::default()),
    }
}

/// Run a subcommand and write its artifacts plus a `manifest.json` into
/// `opts.out_dir`. Returns the written paths.
pub fn run(cmd: Command, opts: &Options) -> Result<Vec<PathBuf>> {
    let (artifacts, seed, config): (Vec<Artifact>, Option<u64>, Value) = match cmd {
        Command::Simulate => {
            let cfg: SimulateConfig = config_or_default(opts)?;
            (cmd_simulate(&cfg, opts)?, None, to_value(&cfg)?)
        }
        Command::Sweep => {
            let cfg: SweepConfig = config_or_default(opts)?;
            (cmd_sweep(&cfg, opts)?, None, to_value(&cfg)?)
        }
        Command::GroundMotion => {
            let mut cfg: GroundMotionCommandConfig = config_or_default(opts)?;
            if let Some(s) = opts.seed {
                cfg.synthesis.seed = s;
            }
            (cmd_groundmotion(&cfg)?, Some(cfg.synthesis.seed), to_value(&cfg)?)
        }
        Command::Cr => {
            let path = opts.config.as_deref().ok_or_else(|| {
                Error::config("cr needs --config with records and the cr block (alpha has no default)")
            })?;
            let cfg: CrCommandConfig = load_config(path)?;
            (cmd_cr(&cfg, opts)?, None, to_value(&cfg)?)
        }
        Command::Identify | Command::MonteCarlo => {
            let mut cfg: CampaignConfig = config_or_default(opts)?;
            if let Some(s) = opts.seed {
                cfg.base_seed = s;
            }
            let a = if cmd == Command::Identify {
                cfg.n_runs = 1;
                cmd_identify(&cfg)?
            } else {
                cmd_montecarlo(&cfg)?
            };
            (a, Some(cfg.base_seed), to_value(&cfg)?)
        }
    };
    std::fs::create_dir_all(&opts.out_dir).map_err(|e| Error::io(&opts.out_dir, e))?;
    let manifest = Artifact::json(
        "manifest.json",
        &json!({
            "command": cmd.name(),
            "version": env!("CARGO_PKG_VERSION"),
            "seed": seed,
            "config": config,
            "outputs": artifacts.iter().map(|a| a.name.as_str()).collect::<Vec<_>>(),
        }),
    )?;
    let mut written = Vec::with_capacity(artifacts.len() + 1);
    for a in artifacts.iter().chain(std::iter::once(&manifest)) {
        let p = opts.out_dir.join(&a.name);
        atomic_write(&p, &a.bytes)?;
        written.push(p);
    }
    Ok(written)
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Numerical(format!("serializing config: {e}")))
}
