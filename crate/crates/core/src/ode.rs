//! Adaptive Dormand–Prince 5(4) integrator for small fixed-size systems.

use crate::error::{Error, Result};

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// Fifth-order solution minus embedded fourth-order solution.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Step-size controller settings.
#[derive(Debug, Clone, Copy)]
pub struct Dopri5<const N: usize> {
    pub rtol: f64,
    pub atol: [f64; N],
    pub h_max: f64,
    pub max_steps: usize,
}

impl<const N: usize> Dopri5<N> {
    /// Integrates `y' = rhs(x, y)` from `x0` to `x1 > x0`, calling
    /// `on_step` after every accepted step. Returns the state at `x1` and
    /// the last step size tried, which callers can reuse on the next segment.
    pub fn integrate<F, S>(
        &self,
        mut rhs: F,
        x0: f64,
        y0: [f64; N],
        x1: f64,
        h_init: f64,
        mut on_step: S,
    ) -> Result<([f64; N], f64)>
    where
        F: FnMut(f64, &[f64; N]) -> [f64; N],
        S: FnMut(f64, &[f64; N]),
    {
        let span = x1 - x0;
        if span <= 0.0 {
            return Ok((y0, h_init));
        }
        let h_min = 1e-14 * (x0.abs().max(x1.abs()) + span);
        let mut h = h_init.min(self.h_max).min(span).max(h_min);
        let mut x = x0;
        let mut y = y0;
        let mut k = [[0.0; N]; 7];
        k[0] = rhs(x, &y);
        let mut steps = 0usize;

        while x < x1 {
            if steps >= self.max_steps {
                return Err(Error::Stiffness { x });
            }
            steps += 1;
            let last = x + h >= x1;
            let h_step = if last { x1 - x } else { h };

            for s in 1..7 {
                let mut ys = y;
                for i in 0..N {
                    let mut acc = 0.0;
                    for (j, kj) in k.iter().enumerate().take(s) {
                        acc += A[s][j] * kj[i];
                    }
                    ys[i] += h_step * acc;
                }
                k[s] = rhs(x + C[s] * h_step, &ys);
            }
            // Stage 7 is evaluated at y_new (FSAL), so row 6 of A gives the solution.
            let mut y_new = y;
            for i in 0..N {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(6) {
                    acc += A[6][j] * kj[i];
                }
                y_new[i] += h_step * acc;
            }
            let k7 = rhs(x + h_step, &y_new);
            k[6] = k7;

            let mut err = 0.0;
            for i in 0..N {
                let mut e = 0.0;
                for (j, kj) in k.iter().enumerate() {
                    e += E[j] * kj[i];
                }
                let sc = self.atol[i] + self.rtol * y[i].abs().max(y_new[i].abs());
                let r = h_step * e / sc;
                err += r * r;
            }
            let mut err = (err / N as f64).sqrt();
            if !err.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
                err = f64::INFINITY;
            }

            if err <= 1.0 {
                x = if last { x1 } else { x + h_step };
                y = y_new;
                k[0] = k7;
                on_step(x, &y);
                let factor = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                };
                if !last {
                    h = (h_step * factor).min(self.h_max);
                } else {
                    h = h.max(h_step * factor).min(self.h_max);
                }
            } else {
                let factor = if err.is_finite() {
                    (0.9 * err.powf(-0.2)).clamp(0.1, 0.9)
                } else {
                    0.1
                };
                h = h_step * factor;
                if h < h_min {
                    return Err(Error::Stiffness { x });
                }
            }
        }
        Ok((y, h))
    }
}
