use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hysteresis::{cumulative_work, evolution_rate, BoucWenParams};

use super::{step_count, Excitation, ResponseHistory};

/// One story of a shear chain: the lumped mass above it and the element
/// (spring, dashpot, Bouc-Wen) connecting it to the level below.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStory", into = "RawStory")]
pub struct Story {
    m: f64,
    c: f64,
    k: f64,
    bw: BoucWenParams,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStory {
    m: f64,
    c: f64,
    k: f64,
    bw: BoucWenParams,
}

impl TryFrom<RawStory> for Story {
    type Error = Error;

    fn try_from(raw: RawStory) -> Result<Self> {
        Story::new(raw.m, raw.c, raw.k, raw.bw)
    }
}

impl From<Story> for RawStory {
    fn from(s: Story) -> Self {
        RawStory {
            m: s.m,
            c: s.c,
            k: s.k,
            bw: s.bw,
        }
    }
}

impl Story {
    pub fn new(m: f64, c: f64, k: f64, bw: BoucWenParams) -> Result<Self> {
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::domain(format!("story mass must be > 0, got {m}")));
        }
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::domain(format!("story damping must be >= 0, got {c}")));
        }
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::domain(format!("story stiffness must be > 0, got {k}")));
        }
        Ok(Self { m, c, k, bw })
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

    pub fn bw(&self) -> &BoucWenParams {
        &self.bw
    }

    fn coefficients(&self) -> StoryCoefficients {
        StoryCoefficients {
            m: self.m,
            c: self.c,
            k: self.k,
            beta: self.bw.beta(),
            gamma: self.bw.gamma(),
            n: self.bw.n(),
            d_y: self.bw.d_y(),
        }
    }
}

/// Shear chain of `N ≥ 1` stories with a common post-yield ratio `α`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChain", into = "RawChain")]
pub struct ChainSystem {
    alpha: f64,
    stories: Vec<Story>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChain {
    alpha: f64,
    stories: Vec<Story>,
}

impl TryFrom<RawChain> for ChainSystem {
    type Error = Error;

    fn try_from(raw: RawChain) -> Result<Self> {
        ChainSystem::new(raw.stories, raw.alpha)
    }
}

impl From<ChainSystem> for RawChain {
    fn from(s: ChainSystem) -> Self {
        RawChain {
            alpha: s.alpha,
            stories: s.stories,
        }
    }
}

impl ChainSystem {
    pub fn new(stories: Vec<Story>, alpha: f64) -> Result<Self> {
        if stories.is_empty() {
            return Err(Error::domain("a chain needs at least one story"));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::domain(format!("alpha must lie in [0, 1], got {alpha}")));
        }
        Ok(Self { alpha, stories })
    }

    /// Four-story benchmark: unit masses, `K = (240, 200, 160, 90)` N/m,
    /// `c = 1.5` N·s/m, `D = 0.06` m, `β = (2.5, 3, 4, 5)`, `γ = (1, 1.5, 2, 3)`,
    /// `n = 2`, `α = 0.1`.
    pub fn four_story_benchmark() -> Self {
        let k = [240.0, 200.0, 160.0, 90.0];
        let beta = [2.5, 3.0, 4.0, 5.0];
        let gamma = [1.0, 1.5, 2.0, 3.0];
        let stories = (0..4)
            .map(|j| {
                let bw = BoucWenParams::new(beta[j], gamma[j], 2.0, 0.06).expect("benchmark shape is admissible");
                Story::new(1.0, 1.5, k[j], bw).expect("benchmark story is admissible")
            })
            .collect();
        Self::new(stories, 0.1).expect("benchmark chain is admissible")
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn stories(&self) -> &[Story] {
        &self.stories
    }

    pub fn n_dof(&self) -> usize {
        self.stories.len()
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.stories.clone(), alpha)
    }

    /// Same masses, springs and dashpots with new Bouc-Wen elements.
    pub fn with_bw(&self, bw: &[BoucWenParams]) -> Result<Self> {
        if bw.len() != self.stories.len() {
            return Err(Error::domain(format!(
                "expected {} Bouc-Wen sets, got {}",
                self.stories.len(),
                bw.len()
            )));
        }
        let stories = self
            .stories
            .iter()
            .zip(bw)
            .map(|(s, b)| Story { bw: *b, ..*s })
            .collect();
        Self::new(stories, self.alpha)
    }

    pub fn mass_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_iterator(self.n_dof(), self.stories.iter().map(|s| s.m)))
    }

    fn chain_matrix(&self, f: impl Fn(&Story) -> f64) -> DMatrix<f64> {
        let n = self.n_dof();
        let mut out = DMatrix::zeros(n, n);
        for j in 0..n {
            let v = f(&self.stories[j]);
            out[(j, j)] += v;
            if j > 0 {
                out[(j - 1, j - 1)] += v;
                out[(j - 1, j)] -= v;
                out[(j, j - 1)] -= v;
            }
        }
        out
    }

    pub fn damping_matrix(&self) -> DMatrix<f64> {
        self.chain_matrix(|s| s.c)
    }

    pub fn linear_stiffness_matrix(&self) -> DMatrix<f64> {
        self.chain_matrix(|s| s.k)
    }

    /// Upper-bidiagonal coupling of the hysteretic variables: `D_j K_j` on
    /// the diagonal and `−D_{j+1} K_{j+1}` above it.
    pub fn hysteretic_coupling_matrix(&self) -> DMatrix<f64> {
        let n = self.n_dof();
        let mut out = DMatrix::zeros(n, n);
        for j in 0..n {
            let s = &self.stories[j];
            out[(j, j)] = s.bw.d_y() * s.k;
            if j > 0 {
                out[(j - 1, j)] = -s.bw.d_y() * s.k;
            }
        }
        out
    }

    pub fn influence_vector(&self) -> DVector<f64> {
        DVector::from_element(self.n_dof(), 1.0)
    }

    pub(crate) fn coefficients(&self) -> Vec<StoryCoefficients> {
        self.stories.iter().map(Story::coefficients).collect()
    }
}

/// Unvalidated per-story numbers used inside the integrators, so filter
/// sigma points can be propagated without constructing checked types.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct StoryCoefficients {
    pub m: f64,
    pub c: f64,
    pub k: f64,
    pub beta: f64,
    pub gamma: f64,
    pub n: f64,
    pub d_y: f64,
}

/// Shear carried by element `j` for state `x = [y, ẏ, r]`.
#[inline]
pub(crate) fn story_shear(st: &[StoryCoefficients], alpha: f64, x: &[f64], j: usize) -> f64 {
    let n = st.len();
    let (d, vd) = if j == 0 {
        (x[0], x[n])
    } else {
        (x[j] - x[j - 1], x[n + j] - x[n + j - 1])
    };
    let s = &st[j];
    s.c * vd + alpha * s.k * d + (1.0 - alpha) * s.d_y * s.k * x[2 * n + j]
}

/// Absolute acceleration of every mass, `−(s_i − s_{i+1}) / m_i`.
pub(crate) fn absolute_accelerations(st: &[StoryCoefficients], alpha: f64, x: &[f64], out: &mut [f64]) {
    let n = st.len();
    let mut s = story_shear(st, alpha, x, 0);
    for i in 0..n {
        let above = if i + 1 < n {
            story_shear(st, alpha, x, i + 1)
        } else {
            0.0
        };
        out[i] = -(s - above) / st[i].m;
        s = above;
    }
}

pub(crate) fn chain_rhs(st: &[StoryCoefficients], alpha: f64, x: &[f64], ug: f64, dx: &mut [f64]) {
    let n = st.len();
    let mut s = story_shear(st, alpha, x, 0);
    for i in 0..n {
        let above = if i + 1 < n {
            story_shear(st, alpha, x, i + 1)
        } else {
            0.0
        };
        let vd = if i == 0 { x[n] } else { x[n + i] - x[n + i - 1] };
        let p = &st[i];
        dx[i] = x[n + i];
        dx[n + i] = -(s - above) / p.m - ug;
        dx[2 * n + i] = evolution_rate(p.beta, p.gamma, p.n, p.d_y, vd, x[2 * n + i]);
        s = above;
    }
}

/// Scratch buffers for [`rk4_chain_step`].
pub(crate) struct ChainWorkspace {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    tmp: Vec<f64>,
}

impl ChainWorkspace {
    pub fn new(n_dof: usize) -> Self {
        let z = vec![0.0; 3 * n_dof];
        Self {
            k1: z.clone(),
            k2: z.clone(),
            k3: z.clone(),
            k4: z.clone(),
            tmp: z,
        }
    }
}

/// One classical RK4 step in place. `ugm` is the base acceleration at the
/// half step.
#[allow(clippy::too_many_arguments)]
pub(crate) fn rk4_chain_step(
    st: &[StoryCoefficients],
    alpha: f64,
    x: &mut [f64],
    ug0: f64,
    ugm: f64,
    ug1: f64,
    h: f64,
    ws: &mut ChainWorkspace,
) {
    let m = x.len();
    chain_rhs(st, alpha, x, ug0, &mut ws.k1);
    for i in 0..m {
        ws.tmp[i] = x[i] + 0.5 * h * ws.k1[i];
    }
    chain_rhs(st, alpha, &ws.tmp, ugm, &mut ws.k2);
    for i in 0..m {
        ws.tmp[i] = x[i] + 0.5 * h * ws.k2[i];
    }
    chain_rhs(st, alpha, &ws.tmp, ugm, &mut ws.k3);
    for i in 0..m {
        ws.tmp[i] = x[i] + h * ws.k3[i];
    }
    chain_rhs(st, alpha, &ws.tmp, ug1, &mut ws.k4);
    for i in 0..m {
        x[i] += h / 6.0 * (ws.k1[i] + 2.0 * ws.k2[i] + 2.0 * ws.k3[i] + ws.k4[i]);
    }
}

/// Integrate `M ÿ + C ẏ + α K_lin y + (1−α) K r = −M 1 ü_b` with the story
/// evolution laws driven by the drift velocities, from rest.
pub fn simulate_chain(sys: &ChainSystem, excitation: &dyn Excitation, dt: f64) -> Result<ResponseHistory> {
    let steps = step_count(excitation.duration(), dt)?;
    let st = sys.coefficients();
    let n = st.len();
    let alpha = sys.alpha;
    let mut h = ResponseHistory::with_capacity(n, steps + 1, dt);
    let mut x = vec![0.0; 3 * n];
    let mut acc = vec![0.0; n];
    let mut ws = ChainWorkspace::new(n);
    let mut ug = excitation.accel(0.0);
    for k in 0..=steps {
        let t = k as f64 * dt;
        absolute_accelerations(&st, alpha, &x, &mut acc);
        h.time.push(t);
        h.ground.push(ug);
        for j in 0..n {
            h.y[j].push(x[j]);
            h.y_dot[j].push(x[n + j]);
            h.r[j].push(x[2 * n + j]);
            h.f_r[j].push((1.0 - alpha) * st[j].d_y * st[j].k * x[2 * n + j]);
            h.y_ddot_abs[j].push(acc[j]);
        }
        if k == steps {
            break;
        }
        let ug1 = excitation.accel((k + 1) as f64 * dt);
        rk4_chain_step(&st, alpha, &mut x, ug, excitation.accel(t + 0.5 * dt), ug1, dt, &mut ws);
        if !x.iter().all(|v| v.is_finite()) {
            return Err(Error::Unstable {
                time: (k + 1) as f64 * dt,
            });
        }
        ug = ug1;
    }
    h.e_h = (0..n)
        .map(|j| cumulative_work(&h.f_r[j], &h.drift_velocity(j), dt))
        .collect::<Result<_>>()?;
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn benchmark_matrices_have_chain_structure() {
        let sys = ChainSystem::four_story_benchmark();
        let k = sys.linear_stiffness_matrix();
        assert_eq!(k[(0, 0)], 440.0);
        assert_eq!(k[(3, 3)], 90.0);
        assert_eq!(k[(1, 2)], -160.0);
        assert_eq!(k[(0, 2)], 0.0);
        assert_eq!(k, k.transpose());
        let c = sys.damping_matrix();
        assert_eq!(c[(0, 0)], 3.0);
        assert_eq!(c[(3, 3)], 1.5);
        assert_eq!(c, c.transpose());
        let kh = sys.hysteretic_coupling_matrix();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j {
                    0.06 * [240.0, 200.0, 160.0, 90.0][i]
                } else if j == i + 1 {
                    -0.06 * [240.0, 200.0, 160.0, 90.0][j]
                } else {
                    0.0
                };
                assert_eq!(kh[(i, j)], expect, "({i},{j})");
            }
        }
        assert_eq!(sys.mass_matrix(), DMatrix::identity(4, 4));
        assert_eq!(sys.influence_vector().sum(), 4.0);
    }

    #[test]
    fn rhs_matches_matrix_form() {
        let sys = ChainSystem::four_story_benchmark();
        let st = sys.coefficients();
        let x: Vec<f64> = (0..12).map(|i| ((i * 7 % 5) as f64 - 2.0) * 0.01).collect();
        let ug = 0.7;
        let mut dx = vec![0.0; 12];
        chain_rhs(&st, 0.1, &x, ug, &mut dx);
        let y = DVector::from_column_slice(&x[0..4]);
        let v = DVector::from_column_slice(&x[4..8]);
        let r = DVector::from_column_slice(&x[8..12]);
        let force = sys.damping_matrix() * &v
            + sys.linear_stiffness_matrix() * &y * 0.1
            + sys.hysteretic_coupling_matrix() * &r * 0.9;
        for i in 0..4 {
            let expect = -force[i] - ug;
            assert!((dx[4 + i] - expect).abs() < 1e-12, "{i}: {} vs {expect}", dx[4 + i]);
        }
    }

    #[test]
    fn shears_at_rest_balance() {
        let sys = ChainSystem::four_story_benchmark();
        let st = sys.coefficients();
        let x = vec![0.0; 12];
        let total: f64 = (0..4).map(|j| story_shear(&st, 0.1, &x, j)).sum();
        assert_eq!(total, 0.0);
    }

    #[test]
    fn rejects_empty_chain() {
        assert!(ChainSystem::new(vec![], 0.1).is_err());
        let sys = ChainSystem::four_story_benchmark();
        assert!(sys.with_alpha(1.5).is_err());
        assert!(sys.with_bw(&[*sys.stories()[0].bw()]).is_err());
    }
}
