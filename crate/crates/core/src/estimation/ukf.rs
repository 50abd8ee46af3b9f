//! Unscented Kalman filter building blocks with linear inequality
//! constraints handled by truncating the posterior Gaussian.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scaled sigma-point parameters (spread, prior-distribution weight,
/// secondary scaling).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SigmaParams {
    pub alpha: f64,
    pub beta: f64,
    pub kappa: f64,
}

impl Default for SigmaParams {
    fn default() -> Self {
        Self {
            alpha: 1e-3,
            beta: 2.0,
            kappa: 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SigmaWeights {
    /// `sqrt(L + λ)`.
    pub spread: f64,
    pub wm: Vec<f64>,
    pub wc: Vec<f64>,
}

impl SigmaParams {
    pub fn weights(&self, dim: usize) -> Result<SigmaWeights> {
        let l = dim as f64;
        let lambda = self.alpha * self.alpha * (l + self.kappa) - l;
        let c = l + lambda;
        if !(c > 0.0) {
            return Err(Error::config("sigma-point spread L + lambda must be > 0"));
        }
        let wi = 0.5 / c;
        let mut wm = vec![wi; 2 * dim + 1];
        let mut wc = wm.clone();
        wm[0] = lambda / c;
        wc[0] = lambda / c + (1.0 - self.alpha * self.alpha + self.beta);
        Ok(SigmaWeights {
            spread: c.sqrt(),
            wm,
            wc,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gaussian {
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
}

/// Lower Cholesky factor, retrying with growing diagonal jitter when the
/// matrix is not numerically positive definite.
pub fn robust_cholesky(p: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if let Some(c) = p.clone().cholesky() {
        return Ok(c.l());
    }
    let n = p.nrows();
    let scale = (p.trace() / n as f64).abs().max(f64::MIN_POSITIVE);
    let mut eps = 1e-12;
    while eps <= 1e-3 {
        let mut q = p.clone();
        for i in 0..n {
            q[(i, i)] += eps * scale;
        }
        if let Some(c) = q.cholesky() {
            return Ok(c.l());
        }
        eps *= 10.0;
    }
    Err(Error::Numerical(
        "covariance is not positive definite even after jitter".into(),
    ))
}

pub fn symmetrize(p: &mut DMatrix<f64>) {
    let n = p.nrows();
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (p[(i, j)] + p[(j, i)]);
            p[(i, j)] = v;
            p[(j, i)] = v;
        }
    }
}

/// Columns `x`, `x + s·L_i`, `x − s·L_i`.
pub fn sigma_points(g: &Gaussian, w: &SigmaWeights) -> Result<DMatrix<f64>> {
    let n = g.mean.len();
    let l = robust_cholesky(&g.cov)?;
    let mut pts = DMatrix::zeros(n, 2 * n + 1);
    pts.set_column(0, &g.mean);
    for i in 0..n {
        let d = l.column(i) * w.spread;
        pts.set_column(1 + i, &(&g.mean + &d));
        pts.set_column(1 + n + i, &(&g.mean - &d));
    }
    Ok(pts)
}

/// Weighted mean written as a correction to the centre point, which avoids
/// the cancellation of the large centre weight.
pub fn weighted_mean(pts: &DMatrix<f64>, w: &SigmaWeights) -> DVector<f64> {
    let c0 = pts.column(0).into_owned();
    let mut acc = DVector::zeros(pts.nrows());
    for i in 1..pts.ncols() {
        acc.axpy(w.wm[i], &(pts.column(i) - &c0), 1.0);
    }
    c0 + acc
}

pub fn weighted_cross(
    a: &DMatrix<f64>,
    a_mean: &DVector<f64>,
    b: &DMatrix<f64>,
    b_mean: &DVector<f64>,
    w: &SigmaWeights,
) -> DMatrix<f64> {
    let mut da = a.clone();
    for mut c in da.column_iter_mut() {
        c -= a_mean;
    }
    let mut db = b.clone();
    for (i, mut c) in db.column_iter_mut().enumerate() {
        c -= b_mean;
        c *= w.wc[i];
    }
    da * db.transpose()
}

/// Time update. `project` is applied to each sigma point before `f`; `f`
/// advances one point in place and returns `false` if it became
/// non-finite, in which case that point is replaced by the propagated
/// centre point.
pub fn predict<P, F>(prior: &Gaussian, w: &SigmaWeights, q: &DMatrix<f64>, project: P, mut f: F) -> Result<Gaussian>
where
    P: Fn(&mut [f64]),
    F: FnMut(&mut [f64]) -> bool,
{
    let mut pts = sigma_points(prior, w)?;
    let mut ok = vec![true; pts.ncols()];
    for (i, mut col) in pts.column_iter_mut().enumerate() {
        let s = col.as_mut_slice();
        project(s);
        ok[i] = f(s) && s.iter().all(|v| v.is_finite());
    }
    if !ok[0] {
        return Err(Error::Numerical(
            "propagation of the mean sigma point is not finite".into(),
        ));
    }
    let centre = pts.column(0).into_owned();
    for (i, good) in ok.iter().enumerate() {
        if !good {
            pts.set_column(i, &centre);
        }
    }
    let mean = weighted_mean(&pts, w);
    let mut cov = weighted_cross(&pts, &mean, &pts, &mean, w) + q;
    symmetrize(&mut cov);
    Ok(Gaussian { mean, cov })
}

/// Measurement update with additive noise covariance `r`.
pub fn update<P, H>(
    pred: &Gaussian,
    w: &SigmaWeights,
    z: &DVector<f64>,
    r: &DMatrix<f64>,
    project: P,
    h: H,
) -> Result<Gaussian>
where
    P: Fn(&mut [f64]),
    H: Fn(&[f64], &mut [f64]),
{
    let mut pts = sigma_points(pred, w)?;
    let m = z.len();
    let mut zp = DMatrix::zeros(m, pts.ncols());
    for (i, mut col) in pts.column_iter_mut().enumerate() {
        project(col.as_mut_slice());
        let mut out = vec![0.0; m];
        h(col.as_slice(), &mut out);
        zp.set_column(i, &DVector::from_vec(out));
    }
    let z_mean = weighted_mean(&zp, w);
    let mut pzz = weighted_cross(&zp, &z_mean, &zp, &z_mean, w) + r;
    symmetrize(&mut pzz);
    let x_mean = weighted_mean(&pts, w);
    let pxz = weighted_cross(&pts, &x_mean, &zp, &z_mean, w);
    let chol = pzz
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Numerical("innovation covariance is not positive definite".into()))?;
    // K = Pxz Pzz⁻¹  ⇔  Pzz Kᵀ = Pxzᵀ
    let gain = chol.solve(&pxz.transpose()).transpose();
    let mean = &pred.mean + &gain * (z - z_mean);
    let mut cov = &pred.cov - &gain * pzz * gain.transpose();
    symmetrize(&mut cov);
    Ok(Gaussian { mean, cov })
}

/// `aᵀx ≥ b` with a sparse `a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearConstraint {
    pub terms: Vec<(usize, f64)>,
    pub bound: f64,
}

impl LinearConstraint {
    pub fn value(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|&(i, a)| a * x[i]).sum()
    }

    pub fn satisfied(&self, x: &[f64]) -> bool {
        self.value(x) >= self.bound
    }
}

/// `φ(d) / (1 − Φ(d))`.
pub fn inverse_mills(d: f64) -> f64 {
    if d < 5.0 {
        let phi = (-0.5 * d * d).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let tail = 0.5 * libm::erfc(d / std::f64::consts::SQRT_2);
        phi / tail
    } else {
        d + mills_tail(d)
    }
}

/// `λ(d) − d` by the Laplace continued fraction, accurate for large `d`.
fn mills_tail(d: f64) -> f64 {
    let mut f = d;
    for k in (2..=60).rev() {
        f = d + k as f64 / f;
    }
    1.0 / f
}

/// Replace the Gaussian by the moment-matched Gaussian of its restriction
/// to `aᵀx ≥ b`, for every constraint whose mean is violated, sweeping the
/// list until all hold (at most `passes` sweeps). A mean still outside
/// afterwards is moved onto the boundary.
pub fn truncate(g: &mut Gaussian, constraints: &[LinearConstraint], passes: usize) {
    for _ in 0..passes {
        let mut any = false;
        for c in constraints {
            let mu = c.value(g.mean.as_slice());
            if mu >= c.bound {
                continue;
            }
            any = true;
            let n = g.mean.len();
            let mut pa = DVector::zeros(n);
            for &(i, a) in &c.terms {
                pa.axpy(a, &g.cov.column(i), 1.0);
            }
            let var: f64 = c.terms.iter().map(|&(i, a)| a * pa[i]).sum();
            if !(var > 0.0) {
                continue;
            }
            let sd = var.sqrt();
            let d = (c.bound - mu) / sd;
            let (lam, rho) = if d < 5.0 {
                let lam = inverse_mills(d);
                (lam, 1.0 + d * lam - lam * lam)
            } else {
                let t = mills_tail(d);
                (d + t, 1.0 - (d + t) * t)
            };
            let rho = rho.clamp(1e-12, 1.0);
            let shift = sd * lam;
            g.mean.axpy(shift / var, &pa, 1.0);
            g.cov -= (&pa * pa.transpose()) * ((1.0 - rho) / var);
            symmetrize(&mut g.cov);
        }
        if !any {
            return;
        }
    }
    for c in constraints {
        let v = c.value(g.mean.as_slice());
        if v < c.bound {
            let norm2: f64 = c.terms.iter().map(|&(_, a)| a * a).sum();
            let step = (c.bound - v) / norm2;
            for &(i, a) in &c.terms {
                g.mean[i] += step * a;
            }
        }
    }
}
