//! Deviation of the branch slopes `r'_D` between a reference Bouc-Wen set
//! `{β, γ, n}` and an alternate set `{β̄, γ̄, n̄}`.
//!
//! The alternate set is described relative to the reference by three
//! normalized offsets:
//!
//! * `Δₙ = Δn / n`
//! * `Δ₁ = (Δβ + Δγ) / (β + γ)`
//! * `Δ₂ = (Δβ − Δγ) / (β − γ)`
//!
//! Linearizing `log(1 − ε/f)` gives first-order deviation curves
//!
//! ```text
//! ε₁(r) ≈ −(β+γ)|r|^n (Δn log|r| + log(1+Δ₁))     branch I
//! ε₂(r) ≈ +(β−γ)|r|^n (Δn log|r| + log(1+Δ₂))     branch II
//! ```
//!
//! which are summarized on `[0, r_max]` by six normalized numbers: the value
//! at `r_max`, the value at the interior stationary point, and the
//! integrated absolute deviation, for each branch. Normalization uses the
//! mean branch-I slope `n/(n+1)` and the branch-I area `n/((β+γ)^(1/n)(n+1))`.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hysteresis::{abs_pow, BoucWenParams, Branch};
use crate::quadrature::adaptive_simpson;

/// Offsets `{Δₙ, Δ₁, Δ₂}` of an alternate parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamPerturbation {
    pub delta_n: f64,
    pub delta_1: f64,
    pub delta_2: f64,
}

impl ParamPerturbation {
    pub fn new(delta_n: f64, delta_1: f64, delta_2: f64) -> Self {
        Self {
            delta_n,
            delta_1,
            delta_2,
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// Offsets that map `base` onto `alt` (yield displacement ignored).
    pub fn between(base: &BoucWenParams, alt: &BoucWenParams) -> Self {
        let sum = base.beta() + base.gamma();
        let diff = base.beta() - base.gamma();
        let delta_2 = if diff == 0.0 {
            0.0
        } else {
            (alt.beta() - alt.gamma()) / diff - 1.0
        };
        Self {
            delta_n: alt.n() / base.n() - 1.0,
            delta_1: (alt.beta() + alt.gamma()) / sum - 1.0,
            delta_2,
        }
    }
}

/// Which admissibility condition an alternate set violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Infeasibility {
    /// `1 + Δ₁ ≤ 0`, equivalently `γ̄ ≤ −β̄`.
    SumNotPositive,
    /// `1 + Δ₂ ≤ 0`, equivalently `γ̄ ≥ β̄`.
    DifferenceNotPositive,
    /// `β̄ ≤ 0`.
    BetaNotPositive,
    /// `γ̄` outside `[−β̄, β̄]`.
    GammaOutOfRange,
    /// `n̄ ≤ 1`.
    ExponentNotAboveOne,
}

impl Infeasibility {
    pub fn code(&self) -> &'static str {
        match self {
            Infeasibility::SumNotPositive => "sum_not_positive",
            Infeasibility::DifferenceNotPositive => "difference_not_positive",
            Infeasibility::BetaNotPositive => "beta_not_positive",
            Infeasibility::GammaOutOfRange => "gamma_out_of_range",
            Infeasibility::ExponentNotAboveOne => "exponent_not_above_one",
        }
    }
}

impl fmt::Display for Infeasibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Infeasibility::SumNotPositive => "1 + delta_1 must be > 0 (beta+gamma of the alternate set)",
            Infeasibility::DifferenceNotPositive => "1 + delta_2 must be > 0 (beta-gamma of the alternate set)",
            Infeasibility::BetaNotPositive => "alternate beta must be > 0",
            Infeasibility::GammaOutOfRange => "alternate gamma must satisfy -beta <= gamma <= beta",
            Infeasibility::ExponentNotAboveOne => "alternate n must be > 1",
        };
        f.write_str(s)
    }
}

fn has_branch_two(base: &BoucWenParams) -> bool {
    base.beta() - base.gamma() != 0.0
}

/// Raw alternate shape `(β̄, γ̄, n̄)` without any admissibility check.
fn alternate_raw(base: &BoucWenParams, p: &ParamPerturbation) -> (f64, f64, f64) {
    let sum = (base.beta() + base.gamma()) * (1.0 + p.delta_1);
    let diff = (base.beta() - base.gamma()) * (1.0 + p.delta_2);
    (0.5 * (sum + diff), 0.5 * (sum - diff), base.n() * (1.0 + p.delta_n))
}

/// Checks the log-domain conditions and the admissibility of the induced set.
pub fn check_feasibility(base: &BoucWenParams, p: &ParamPerturbation) -> Result<(), Infeasibility> {
    if !(1.0 + p.delta_1 > 0.0) {
        return Err(Infeasibility::SumNotPositive);
    }
    if has_branch_two(base) && !(1.0 + p.delta_2 > 0.0) {
        return Err(Infeasibility::DifferenceNotPositive);
    }
    let (beta, gamma, n) = alternate_raw(base, p);
    if !(beta > 0.0) {
        return Err(Infeasibility::BetaNotPositive);
    }
    if gamma < -beta || gamma > beta {
        return Err(Infeasibility::GammaOutOfRange);
    }
    if !(n > 1.0) {
        return Err(Infeasibility::ExponentNotAboveOne);
    }
    Ok(())
}

/// `{β̄, γ̄, n̄}` with `D_y` carried over from `base`.
pub fn alternate_params(base: &BoucWenParams, p: &ParamPerturbation) -> Result<BoucWenParams> {
    check_feasibility(base, p).map_err(Error::Infeasible)?;
    let (beta, gamma, n) = alternate_raw(base, p);
    BoucWenParams::new(beta, gamma, n, base.d_y())
}

#[inline]
fn log_factor(delta_abs_n: f64, log1p_delta: f64, r: f64) -> f64 {
    delta_abs_n * r.abs().ln() + log1p_delta
}

/// First-order branch-I deviation `r̄'_D(I) − r'_D(I)`. Even in `r`; zero at
/// `r = 0`.
pub fn epsilon_1(base: &BoucWenParams, p: &ParamPerturbation, r: f64) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    let dn = p.delta_n * base.n();
    -(base.beta() + base.gamma()) * abs_pow(r, base.n()) * log_factor(dn, p.delta_1.ln_1p(), r)
}

/// First-order branch-II deviation `r̄'_D(II) − r'_D(II)`.
pub fn epsilon_2(base: &BoucWenParams, p: &ParamPerturbation, r: f64) -> f64 {
    if r == 0.0 || !has_branch_two(base) {
        return 0.0;
    }
    let dn = p.delta_n * base.n();
    (base.beta() - base.gamma()) * abs_pow(r, base.n()) * log_factor(dn, p.delta_2.ln_1p(), r)
}

/// Exact slope difference `r̄'_D − r'_D` on the given branch.
pub fn exact_deviation(base: &BoucWenParams, alt: &BoucWenParams, r: f64, branch: Branch) -> f64 {
    alt.r_prime_d(r, branch) - base.r_prime_d(r, branch)
}

fn branch_delta(p: &ParamPerturbation, branch: Branch) -> f64 {
    match branch {
        Branch::I => p.delta_1,
        Branch::II => p.delta_2,
    }
}

/// Nonzero stationary point `exp(−(1/n + log(1+Δ)/Δn))` of the deviation
/// curve of `branch`.
pub fn stationary_point(base: &BoucWenParams, p: &ParamPerturbation, branch: Branch) -> Result<f64> {
    let dn = p.delta_n * base.n();
    if dn == 0.0 {
        return Err(Error::NoStationaryPoint);
    }
    let d = branch_delta(p, branch);
    if !(1.0 + d > 0.0) {
        return Err(Error::Infeasible(match branch {
            Branch::I => Infeasibility::SumNotPositive,
            Branch::II => Infeasibility::DifferenceNotPositive,
        }));
    }
    Ok((-(1.0 / base.n() + d.ln_1p() / dn)).exp())
}

/// Whether the deviation curve has an interior extremum in `(0, r_max)`
/// (type 1) or is extreme only at `r_max` (type 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CurveType {
    Type1,
    Type2,
}

impl CurveType {
    pub fn label(&self) -> &'static str {
        match self {
            CurveType::Type1 => "1",
            CurveType::Type2 => "2",
        }
    }
}

/// The six normalized deviation metrics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviationMetrics {
    pub eps_1: f64,
    /// `None` when `Δₙ = 0` (no interior stationary point).
    pub eps_star_1: Option<f64>,
    pub area_eps_1: f64,
    pub eps_2: f64,
    pub eps_star_2: Option<f64>,
    pub area_eps_2: f64,
    pub kappa: f64,
    pub curve_type_1: CurveType,
    pub curve_type_2: CurveType,
}

/// Mean branch-I slope over `[0, r_max]`: `n/(n+1)`.
pub fn mean_branch_one_slope(n: f64) -> f64 {
    n / (n + 1.0)
}

/// Area under the branch-I slope over `[0, r_max]`.
pub fn branch_one_area(base: &BoucWenParams) -> Result<f64> {
    let n = base.n();
    let s = base.beta() + base.gamma();
    if s <= 0.0 {
        return Err(Error::domain("beta + gamma <= 0"));
    }
    Ok(n / (s.powf(1.0 / n) * (n + 1.0)))
}

/// `∫₀^{r_max} |f|` where `f` changes sign at most at `root`.
fn abs_area<F: Fn(f64) -> f64>(f: F, root: Option<f64>, r_max: f64) -> f64 {
    let g = |r: f64| f(r).abs();
    let tol = 1e-14 * r_max;
    match root {
        Some(z) if z > 0.0 && z < r_max => adaptive_simpson(&g, 0.0, z, tol) + adaptive_simpson(&g, z, r_max, tol),
        _ => adaptive_simpson(&g, 0.0, r_max, tol),
    }
}

/// Positive zero `(1+Δ)^(−1/Δn)` of `Δn log r + log(1+Δ)`.
fn sign_change(dn: f64, delta: f64) -> Option<f64> {
    if dn == 0.0 {
        None
    } else {
        Some((-delta.ln_1p() / dn).exp())
    }
}

fn curve_type(star: Option<f64>, r_max: f64) -> CurveType {
    match star {
        Some(r) if r > 0.0 && r < r_max => CurveType::Type1,
        _ => CurveType::Type2,
    }
}

/// All six metrics for one perturbation of `base`.
pub fn metrics(base: &BoucWenParams, p: &ParamPerturbation) -> Result<DeviationMetrics> {
    check_feasibility(base, p).map_err(Error::Infeasible)?;
    let r_max = base.r_max()?;
    let avg = mean_branch_one_slope(base.n());
    let area_ref = branch_one_area(base)?;
    let dn = p.delta_n * base.n();

    let star_1 = stationary_point(base, p, Branch::I).ok();
    let eps_1 = epsilon_1(base, p, r_max) / avg;
    let eps_star_1 = star_1.map(|r| epsilon_1(base, p, r) / avg);
    let area_eps_1 = abs_area(|r| epsilon_1(base, p, r), sign_change(dn, p.delta_1), r_max) / area_ref;

    let (eps_2, eps_star_2, area_eps_2, star_2) = if has_branch_two(base) {
        let star_2 = stationary_point(base, p, Branch::II).ok();
        (
            epsilon_2(base, p, r_max) / avg,
            star_2.map(|r| epsilon_2(base, p, r) / avg),
            abs_area(|r| epsilon_2(base, p, r), sign_change(dn, p.delta_2), r_max) / area_ref,
            star_2,
        )
    } else {
        (0.0, (dn != 0.0).then_some(0.0), 0.0, None)
    };

    Ok(DeviationMetrics {
        eps_1,
        eps_star_1,
        area_eps_1,
        eps_2,
        eps_star_2,
        area_eps_2,
        kappa: base.kappa(),
        curve_type_1: curve_type(star_1, r_max),
        curve_type_2: curve_type(star_2, r_max),
    })
}

/// `Δ₁` that pins the normalized branch-I end deviation at `eps_1_target`
/// for a given `Δₙ`: `1+Δ₁ = (β+γ)^Δₙ exp(−n ε₁/(n+1))`.
pub fn fixed_eps1_relation(base: &BoucWenParams, eps_1_target: f64, delta_n: f64) -> f64 {
    let n = base.n();
    let s = base.beta() + base.gamma();
    s.powf(delta_n) * (-n * eps_1_target / (n + 1.0)).exp() - 1.0
}

/// Normalized stationary deviation implied by a fixed `ε₁`; depends only on
/// `(Δₙ, ε₁, n)`.
pub fn eps_star_1_for_fixed_eps1(eps_1: f64, delta_n: f64, n: f64) -> f64 {
    delta_n * (n + 1.0) / n * (n * eps_1 / (delta_n * (n + 1.0)) - 1.0).exp()
}

/// `(Δ₂, ε*₂)` that pin the normalized branch-II end deviation at
/// `eps_2_target` for a given `Δₙ`.
pub fn fixed_eps2_relation(base: &BoucWenParams, eps_2_target: f64, delta_n: f64) -> (f64, f64) {
    let n = base.n();
    let s = base.beta() + base.gamma();
    let kappa = base.kappa();
    let delta_2 = s.powf(delta_n) * (n * kappa * eps_2_target / (n + 1.0)).exp() - 1.0;
    let eps_star_2 =
        -(n + 1.0) * delta_n / (n * kappa) * (-(1.0 + n * kappa * eps_2_target / ((n + 1.0) * delta_n))).exp();
    (delta_2, eps_star_2)
}

/// Re-express `source` with yield displacement `target_d_y` so that the
/// force-deformation law is unchanged: `n` kept, β and γ scaled by
/// `(target_d_y / source_d_y)^n`.
pub fn equivalent_params(target_d_y: f64, source: &BoucWenParams) -> Result<BoucWenParams> {
    if !(target_d_y.is_finite() && target_d_y > 0.0) {
        return Err(Error::domain(format!(
            "target yield displacement must be > 0, got {target_d_y}"
        )));
    }
    if target_d_y == source.d_y() {
        return Ok(*source);
    }
    let scale = (target_d_y / source.d_y()).powf(source.n());
    BoucWenParams::new(source.beta() * scale, source.gamma() * scale, source.n(), target_d_y)
}

/// `|r̄_max − r_max|`; zero when the alternate set saturates at the same
/// hysteretic deformation.
pub fn rmax_preserving_check(base: &BoucWenParams, alt: &BoucWenParams) -> Result<f64> {
    Ok((alt.r_max()? - base.r_max()?).abs())
}

/// Exponent `n̄` for which an alternate `β̄+γ̄` keeps `r_max` unchanged.
pub fn rmax_preserving_exponent(base: &BoucWenParams, alt_sum: f64) -> Result<f64> {
    let s = base.beta() + base.gamma();
    if s <= 0.0 || alt_sum <= 0.0 || s == 1.0 {
        return Err(Error::domain("r_max-preserving exponent undefined for these sums"));
    }
    Ok(base.n() * alt_sum.ln() / s.ln())
}

// ---------------------------------------------------------------------------
// contour sweeps

/// Sampling of one grid axis. Open endpoints are excluded by stepping in
/// from them, so `(−0.5, 0.5]` with 10 points gives −0.4, −0.3, …, 0.5.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    #[serde(default)]
    pub lo_open: bool,
    #[serde(default)]
    pub hi_open: bool,
}

impl Interval {
    pub fn closed(lo: f64, hi: f64, points: usize) -> Self {
        Self {
            lo,
            hi,
            points,
            lo_open: false,
            hi_open: false,
        }
    }

    /// `(lo, hi]`.
    pub fn left_open(lo: f64, hi: f64, points: usize) -> Self {
        Self {
            lo,
            hi,
            points,
            lo_open: true,
            hi_open: false,
        }
    }

    pub fn samples(&self) -> Result<Vec<f64>> {
        if self.points == 0 {
            return Err(Error::config("axis has no points"));
        }
        if !(self.lo.is_finite() && self.hi.is_finite()) || self.hi < self.lo {
            return Err(Error::config(format!("invalid axis range [{}, {}]", self.lo, self.hi)));
        }
        if (self.lo_open || self.hi_open) && self.hi == self.lo {
            return Err(Error::config("open axis with zero width is empty"));
        }
        let n = self.points;
        let span = self.hi - self.lo;
        let v = match (self.lo_open, self.hi_open) {
            (false, false) if n == 1 => vec![self.lo],
            (false, false) => (0..n).map(|i| self.lo + span * i as f64 / (n - 1) as f64).collect(),
            (true, false) => (1..=n).map(|i| self.lo + span * i as f64 / n as f64).collect(),
            (false, true) => (0..n).map(|i| self.lo + span * i as f64 / n as f64).collect(),
            (true, true) => (1..=n).map(|i| self.lo + span * i as f64 / (n + 1) as f64).collect(),
        };
        Ok(v)
    }
}

/// How `Δ₂` is set for each `(Δₙ, Δ₁)` cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "rule", content = "value")]
pub enum Delta2Rule {
    /// `Δ₂ = c · Δ₁`.
    Scaled(f64),
    /// `Δ₂` constant over the grid.
    Fixed(f64),
}

impl Delta2Rule {
    pub fn apply(&self, delta_1: f64) -> f64 {
        match *self {
            Delta2Rule::Scaled(c) => c * delta_1,
            Delta2Rule::Fixed(v) => v,
        }
    }
}

impl Default for Delta2Rule {
    fn default() -> Self {
        Delta2Rule::Scaled(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContourSpec {
    pub base: BoucWenParams,
    pub delta_n: Interval,
    pub delta_1: Interval,
    #[serde(default)]
    pub delta_2: Delta2Rule,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContourCell {
    pub index: usize,
    pub perturbation: ParamPerturbation,
    pub outcome: Result<DeviationMetrics, Infeasibility>,
}

impl ContourCell {
    pub fn feasible(&self) -> bool {
        self.outcome.is_ok()
    }

    pub fn metrics(&self) -> Option<&DeviationMetrics> {
        self.outcome.as_ref().ok()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContourGrid {
    pub spec: ContourSpec,
    pub delta_n_values: Vec<f64>,
    pub delta_1_values: Vec<f64>,
    /// Row-major: `Δₙ` outer, `Δ₁` inner.
    pub cells: Vec<ContourCell>,
}

/// Upper bounds on metric magnitudes for the intersection query.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricThresholds {
    pub eps_1: f64,
    pub eps_star_1: f64,
    pub area_eps_1: f64,
    pub eps_2: f64,
    pub eps_star_2: f64,
    pub area_eps_2: f64,
}

impl MetricThresholds {
    pub fn admits(&self, m: &DeviationMetrics) -> bool {
        // ε* only counts where the stationary point is inside the range.
        let star_ok = |star: Option<f64>, ty: CurveType, lim: f64| match (ty, star) {
            (CurveType::Type1, Some(v)) => v.abs() <= lim,
            _ => true,
        };
        m.eps_1.abs() <= self.eps_1
            && star_ok(m.eps_star_1, m.curve_type_1, self.eps_star_1)
            && m.area_eps_1 <= self.area_eps_1
            && m.eps_2.abs() <= self.eps_2
            && star_ok(m.eps_star_2, m.curve_type_2, self.eps_star_2)
            && m.area_eps_2 <= self.area_eps_2
    }
}

impl ContourGrid {
    pub fn cell(&self, i_n: usize, i_1: usize) -> &ContourCell {
        &self.cells[i_n * self.delta_1_values.len() + i_1]
    }

    /// Feasible cells whose six metrics all sit under `thresholds`.
    pub fn within<'a>(&'a self, thresholds: &'a MetricThresholds) -> impl Iterator<Item = &'a ContourCell> + 'a {
        self.cells
            .iter()
            .filter(move |c| c.metrics().is_some_and(|m| thresholds.admits(m)))
    }
}

/// Evaluate the metrics over a `(Δₙ, Δ₁)` grid. Cells are computed in
/// parallel on the current rayon pool; output order is by cell index.
pub fn sweep(spec: &ContourSpec) -> Result<ContourGrid> {
    let dn = spec.delta_n.samples()?;
    let d1 = spec.delta_1.samples()?;
    spec.base.r_max()?;
    let n1 = d1.len();
    let cells = (0..dn.len() * n1)
        .into_par_iter()
        .map(|index| {
            let delta_1 = d1[index % n1];
            let p = ParamPerturbation::new(dn[index / n1], delta_1, spec.delta_2.apply(delta_1));
            let outcome = match check_feasibility(&spec.base, &p) {
                Ok(()) => match metrics(&spec.base, &p) {
                    Ok(m) => Ok(m),
                    Err(Error::Infeasible(why)) => Err(why),
                    Err(e) => unreachable!("metrics failed on a feasible cell: {e}"),
                },
                Err(why) => Err(why),
            };
            ContourCell {
                index,
                perturbation: p,
                outcome,
            }
        })
        .collect();
    Ok(ContourGrid {
        spec: *spec,
        delta_n_values: dn,
        delta_1_values: d1,
        cells,
    })
}
