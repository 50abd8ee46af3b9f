use serde::Serialize;

/// Sampled response of an `N`-DOF system. Element `j` sits between DOF
/// `j − 1` and DOF `j` (DOF `−1` is the ground), so for one DOF the drift is
/// the displacement itself.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResponseHistory {
    pub dt: f64,
    pub time: Vec<f64>,
    /// Base acceleration on the grid.
    pub ground: Vec<f64>,
    pub y: Vec<Vec<f64>>,
    pub y_dot: Vec<Vec<f64>>,
    pub y_ddot_abs: Vec<Vec<f64>>,
    pub r: Vec<Vec<f64>>,
    pub f_r: Vec<Vec<f64>>,
    /// Cumulative hysteretic energy per element.
    pub e_h: Vec<Vec<f64>>,
}

impl ResponseHistory {
    pub(crate) fn with_capacity(n_dof: usize, len: usize, dt: f64) -> Self {
        let block = || vec![Vec::with_capacity(len); n_dof];
        Self {
            dt,
            time: Vec::with_capacity(len),
            ground: Vec::with_capacity(len),
            y: block(),
            y_dot: block(),
            y_ddot_abs: block(),
            r: block(),
            f_r: block(),
            e_h: Vec::new(),
        }
    }

    pub fn n_dof(&self) -> usize {
        self.y.len()
    }

    pub fn len(&self) -> usize {
        self.time.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time.is_empty()
    }

    fn relative(series: &[Vec<f64>], j: usize) -> Vec<f64> {
        if j == 0 {
            series[0].clone()
        } else {
            series[j].iter().zip(&series[j - 1]).map(|(a, b)| a - b).collect()
        }
    }

    /// `y_j − y_{j−1}`.
    pub fn drift(&self, j: usize) -> Vec<f64> {
        Self::relative(&self.y, j)
    }

    pub fn drift_velocity(&self, j: usize) -> Vec<f64> {
        Self::relative(&self.y_dot, j)
    }

    /// Largest `|y_j − y_{j−1}|` on the grid.
    pub fn peak_drift(&self, j: usize) -> f64 {
        self.drift(j).iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn peak_displacement(&self, j: usize) -> f64 {
        self.y[j].iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Hysteretic energy dissipated by element `j` over the whole record.
    pub fn total_hysteretic_energy(&self, j: usize) -> f64 {
        self.e_h[j].last().copied().unwrap_or(0.0)
    }
}
