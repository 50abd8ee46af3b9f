//! Augmented-state chain model: `[y, ẏ, r, K, c, β, γ, n]`, each block of
//! length `N`.

use serde::{Deserialize, Serialize};

use super::ukf::LinearConstraint;
use crate::dynamics::{absolute_accelerations, rk4_chain_step, ChainSystem, ChainWorkspace, StoryCoefficients};
use crate::error::{Error, Result};

/// Quantities the filter treats as known: masses, yield displacements and
/// the post-yield ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnownQuantities {
    pub masses: Vec<f64>,
    pub d_y: Vec<f64>,
    pub alpha: f64,
}

impl KnownQuantities {
    pub fn from_system(sys: &ChainSystem) -> Self {
        Self {
            masses: sys.stories().iter().map(|s| s.m()).collect(),
            d_y: sys.stories().iter().map(|s| s.bw().d_y()).collect(),
            alpha: sys.alpha(),
        }
    }

    pub fn n_dof(&self) -> usize {
        self.masses.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.masses.is_empty() || self.masses.len() != self.d_y.len() {
            return Err(Error::config(
                "known masses and yield displacements must be non-empty and equally long",
            ));
        }
        if self
            .masses
            .iter()
            .chain(&self.d_y)
            .any(|v| !(v.is_finite() && *v > 0.0))
        {
            return Err(Error::config(
                "known masses and yield displacements must be finite and > 0",
            ));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::config("alpha must lie in [0, 1]"));
        }
        Ok(())
    }
}

/// Index arithmetic for the augmented state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub n: usize,
}

impl Layout {
    pub fn dim(self) -> usize {
        8 * self.n
    }
    pub fn y(self, j: usize) -> usize {
        j
    }
    pub fn v(self, j: usize) -> usize {
        self.n + j
    }
    pub fn r(self, j: usize) -> usize {
        2 * self.n + j
    }
    pub fn k(self, j: usize) -> usize {
        3 * self.n + j
    }
    pub fn c(self, j: usize) -> usize {
        4 * self.n + j
    }
    pub fn beta(self, j: usize) -> usize {
        5 * self.n + j
    }
    pub fn gamma(self, j: usize) -> usize {
        6 * self.n + j
    }
    pub fn exponent(self, j: usize) -> usize {
        7 * self.n + j
    }
    /// Start of the parameter block.
    pub fn theta(self) -> usize {
        3 * self.n
    }
}

/// Parameter block of a chain in state order `K, c, β, γ, n`.
pub fn parameter_vector(sys: &ChainSystem) -> Vec<f64> {
    let s = sys.stories();
    let mut out = Vec::with_capacity(5 * s.len());
    out.extend(s.iter().map(|s| s.k()));
    out.extend(s.iter().map(|s| s.c()));
    out.extend(s.iter().map(|s| s.bw().beta()));
    out.extend(s.iter().map(|s| s.bw().gamma()));
    out.extend(s.iter().map(|s| s.bw().n()));
    out
}

/// Names matching [`parameter_vector`], e.g. `K1`, `beta3`.
pub fn parameter_names(n: usize) -> Vec<String> {
    ["K", "c", "beta", "gamma", "n"]
        .iter()
        .flat_map(|p| (1..=n).map(move |j| format!("{p}{j}")))
        .collect()
}

pub(crate) fn fill_coefficients(known: &KnownQuantities, x: &[f64], st: &mut Vec<StoryCoefficients>) {
    let l = Layout { n: known.n_dof() };
    st.clear();
    st.extend((0..l.n).map(|j| StoryCoefficients {
        m: known.masses[j],
        c: x[l.c(j)],
        k: x[l.k(j)],
        beta: x[l.beta(j)],
        gamma: x[l.gamma(j)],
        n: x[l.exponent(j)],
        d_y: known.d_y[j],
    }));
}

/// Reusable buffers for [`process_model`].
pub struct ModelWorkspace {
    st: Vec<StoryCoefficients>,
    rk: ChainWorkspace,
}

impl ModelWorkspace {
    pub fn new(n_dof: usize) -> Self {
        Self {
            st: Vec::with_capacity(n_dof),
            rk: ChainWorkspace::new(n_dof),
        }
    }
}

/// Advance the dynamic block by `dt` in `substeps` RK4 steps, with the base
/// acceleration interpolated linearly from `u0` to `u1`. The parameter
/// block is untouched.
#[allow(clippy::too_many_arguments)]
pub fn process_model(
    known: &KnownQuantities,
    x: &mut [f64],
    u0: f64,
    u1: f64,
    dt: f64,
    substeps: usize,
    ws: &mut ModelWorkspace,
) -> Result<()> {
    if !(dt > 0.0) || substeps == 0 {
        return Err(Error::domain("process model needs dt > 0 and at least one substep"));
    }
    let n = known.n_dof();
    fill_coefficients(known, x, &mut ws.st);
    let h = dt / substeps as f64;
    let s = substeps as f64;
    let du = u1 - u0;
    for i in 0..substeps {
        let a = u0 + du * (i as f64 / s);
        let m = u0 + du * ((i as f64 + 0.5) / s);
        let b = u0 + du * ((i + 1) as f64 / s);
        rk4_chain_step(&ws.st, known.alpha, &mut x[..3 * n], a, m, b, h, &mut ws.rk);
    }
    Ok(())
}

/// Absolute accelerations implied by the state; the base input cancels.
pub fn measurement_model(known: &KnownQuantities, x: &[f64], out: &mut [f64]) {
    let mut st = Vec::with_capacity(known.n_dof());
    fill_coefficients(known, x, &mut st);
    absolute_accelerations(&st, known.alpha, &x[..3 * known.n_dof()], out);
}

/// `K_j ≥ 0, c_j ≥ 0, β_j + γ_j ≥ 0, β_j − γ_j ≥ 0, n_j ≥ 1`.
pub fn constraint_set(n: usize) -> Vec<LinearConstraint> {
    let l = Layout { n };
    let mut out = Vec::with_capacity(5 * n);
    for j in 0..n {
        out.push(LinearConstraint {
            terms: vec![(l.k(j), 1.0)],
            bound: 0.0,
        });
        out.push(LinearConstraint {
            terms: vec![(l.c(j), 1.0)],
            bound: 0.0,
        });
        out.push(LinearConstraint {
            terms: vec![(l.beta(j), 1.0), (l.gamma(j), 1.0)],
            bound: 0.0,
        });
        out.push(LinearConstraint {
            terms: vec![(l.beta(j), 1.0), (l.gamma(j), -1.0)],
            bound: 0.0,
        });
        out.push(LinearConstraint {
            terms: vec![(l.exponent(j), 1.0)],
            bound: 1.0,
        });
    }
    out
}

/// Euclidean projection of a sigma point's parameter block onto the
/// feasible set.
pub fn project_parameters(n: usize, x: &mut [f64]) {
    let l = Layout { n };
    for j in 0..n {
        x[l.k(j)] = x[l.k(j)].max(0.0);
        x[l.c(j)] = x[l.c(j)].max(0.0);
        x[l.exponent(j)] = x[l.exponent(j)].max(1.0);
        let (b, g) = (x[l.beta(j)], x[l.gamma(j)]);
        if b < g.abs() {
            // cone β ≥ |γ|
            let t = 0.5 * (b + g.abs()).max(0.0);
            x[l.beta(j)] = t;
            x[l.gamma(j)] = t.copysign(g);
        }
    }
}
