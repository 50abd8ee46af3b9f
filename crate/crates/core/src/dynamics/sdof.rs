use crate::error::{Error, Result};
use crate::hysteresis::{cumulative_work, evolution_rate, OscillatorParams};

use super::{step_count, Excitation, ResponseHistory};

#[derive(Clone, Copy)]
struct Coeffs {
    m: f64,
    c: f64,
    k: f64,
    alpha: f64,
    beta: f64,
    gamma: f64,
    n: f64,
    d_y: f64,
}

impl Coeffs {
    fn shear(&self, y: f64, v: f64, r: f64) -> f64 {
        self.c * v + self.alpha * self.k * y + (1.0 - self.alpha) * self.d_y * self.k * r
    }

    fn rhs(&self, x: [f64; 3], ug: f64) -> [f64; 3] {
        let s = self.shear(x[0], x[1], x[2]);
        [
            x[1],
            -s / self.m - ug,
            evolution_rate(self.beta, self.gamma, self.n, self.d_y, x[1], x[2]),
        ]
    }
}

fn axpy(x: [f64; 3], a: f64, k: [f64; 3]) -> [f64; 3] {
    [x[0] + a * k[0], x[1] + a * k[1], x[2] + a * k[2]]
}

fn rk4(p: &Coeffs, x: [f64; 3], ug0: f64, ugm: f64, ug1: f64, h: f64) -> [f64; 3] {
    let k1 = p.rhs(x, ug0);
    let k2 = p.rhs(axpy(x, 0.5 * h, k1), ugm);
    let k3 = p.rhs(axpy(x, 0.5 * h, k2), ugm);
    let k4 = p.rhs(axpy(x, h, k3), ug1);
    let mut out = [0.0; 3];
    for i in 0..3 {
        out[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Integrate `m ÿ + c ẏ + α k y + (1−α) k D_y r = −m ü_b` together with the
/// evolution law from rest, with step `dt` over the excitation's duration.
pub fn simulate_sdof(osc: &OscillatorParams, excitation: &dyn Excitation, dt: f64) -> Result<ResponseHistory> {
    let steps = step_count(excitation.duration(), dt)?;
    let bw = osc.bw();
    let p = Coeffs {
        m: osc.m(),
        c: osc.c(),
        k: osc.k(),
        alpha: osc.alpha(),
        beta: bw.beta(),
        gamma: bw.gamma(),
        n: bw.n(),
        d_y: bw.d_y(),
    };
    let mut h = ResponseHistory::with_capacity(1, steps + 1, dt);
    let mut x = [0.0; 3];
    let mut ug = excitation.accel(0.0);
    for k in 0..=steps {
        let t = k as f64 * dt;
        let s = p.shear(x[0], x[1], x[2]);
        h.time.push(t);
        h.ground.push(ug);
        h.y[0].push(x[0]);
        h.y_dot[0].push(x[1]);
        h.r[0].push(x[2]);
        h.f_r[0].push((1.0 - p.alpha) * p.d_y * p.k * x[2]);
        h.y_ddot_abs[0].push(-s / p.m);
        if k == steps {
            break;
        }
        let ug1 = excitation.accel((k + 1) as f64 * dt);
        x = rk4(&p, x, ug, excitation.accel(t + 0.5 * dt), ug1, dt);
        if !x.iter().all(|v| v.is_finite()) {
            return Err(Error::Unstable {
                time: (k + 1) as f64 * dt,
            });
        }
        ug = ug1;
    }
    h.e_h = vec![cumulative_work(&h.f_r[0], &h.y_dot[0], dt)?];
    Ok(h)
}
