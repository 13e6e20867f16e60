//! Adaptive Dormand-Prince 5(4) integration for small first-order systems.
//!
//! The shooting solver needs an explicit integrator with error control, a
//! hard cap on the step size, and a way to stop mid-trajectory when the
//! state leaves the region of interest. Nothing here is specific to the
//! Yamabe equation.

use crate::error::{Error, Result};

/// Right-hand side of an autonomous-or-not first-order system of fixed size.
pub trait OdeSystem<const N: usize> {
    fn rhs(&self, t: f64, y: &[f64; N], dy: &mut [f64; N]);
}

impl<const N: usize, F: Fn(f64, &[f64; N], &mut [f64; N])> OdeSystem<N> for F {
    fn rhs(&self, t: f64, y: &[f64; N], dy: &mut [f64; N]) {
        self(t, y, dy)
    }
}

/// Why the integration stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    /// The requested end time was reached.
    Reached,
    /// The monitor asked to stop.
    Halted,
}

/// Result of one integration run. `samples` holds the accepted steps,
/// starting with the initial state and ending with the final one.
#[derive(Clone, Debug)]
pub struct Integration<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub termination: Termination,
    pub steps: usize,
    pub samples: Vec<(f64, [f64; N])>,
}

/// Dormand-Prince 5(4) with standard PI-free step control.
#[derive(Clone, Copy, Debug)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Dopri5 {
            rtol: 1e-10,
            atol: 1e-12,
            max_step: f64::INFINITY,
            max_steps: 1_000_000,
        }
    }
}

// Butcher tableau (nodes, stage coefficients, 5th-order weights, and the
// embedded 4th-order weights). The last stage equals the 5th-order result,
// so its derivative seeds the next step (FSAL).
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
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
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

impl Dopri5 {
    /// Integrate from (t0, y0) to t_end (t_end > t0). The monitor sees each
    /// accepted state and returns false to halt early.
    pub fn integrate<const N: usize>(
        &self,
        system: &impl OdeSystem<N>,
        t0: f64,
        y0: [f64; N],
        t_end: f64,
        mut monitor: impl FnMut(f64, &[f64; N]) -> bool,
    ) -> Result<Integration<N>> {
        if !(t_end > t0) {
            return Err(Error::domain("t_end", t_end, "t_end > t0"));
        }
        let mut t = t0;
        let mut y = y0;
        let mut k = [[0.0f64; N]; 7];
        system.rhs(t, &y, &mut k[0]);
        if k[0].iter().any(|v| !v.is_finite()) {
            return Err(Error::Integration {
                t,
                reason: "non-finite derivative at start",
            });
        }

        let mut h = ((t_end - t0) / 100.0).min(self.max_step);
        let mut samples = vec![(t, y)];
        let mut steps = 0usize;

        while t < t_end {
            if steps >= self.max_steps {
                return Err(Error::Integration {
                    t,
                    reason: "step budget exhausted",
                });
            }
            if h < 1e3 * f64::EPSILON * t.abs().max(1.0) {
                return Err(Error::Integration {
                    t,
                    reason: "step size underflow",
                });
            }
            h = h.min(t_end - t);

            let mut y_new = [0.0f64; N];
            for stage in 1..7 {
                let mut ys = y;
                for (j, kj) in k.iter().enumerate().take(stage) {
                    let a = A[stage - 1][j];
                    if a != 0.0 {
                        for i in 0..N {
                            ys[i] += h * a * kj[i];
                        }
                    }
                }
                let ts = t + C[stage] * h;
                let (head, tail) = k.split_at_mut(stage);
                let _ = head;
                system.rhs(ts, &ys, &mut tail[0]);
                if stage == 6 {
                    y_new = ys;
                }
            }

            if y_new.iter().any(|v| !v.is_finite()) {
                return Err(Error::Integration {
                    t,
                    reason: "non-finite state",
                });
            }

            // Scaled RMS of the difference between the 5th- and 4th-order
            // results.
            let mut err_sq = 0.0;
            for i in 0..N {
                let mut diff = 0.0;
                for stage in 0..7 {
                    diff += (B5[stage] - B4[stage]) * k[stage][i];
                }
                diff *= h;
                let scale = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                err_sq += (diff / scale) * (diff / scale);
            }
            let err = (err_sq / N as f64).sqrt();

            steps += 1;
            if err <= 1.0 {
                t += h;
                y = y_new;
                k[0] = k[6];
                samples.push((t, y));
                if !monitor(t, &y) {
                    return Ok(Integration {
                        t,
                        y,
                        termination: Termination::Halted,
                        steps,
                        samples,
                    });
                }
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h = (h * factor).min(self.max_step);
        }

        Ok(Integration {
            t,
            y,
            termination: Termination::Reached,
            steps,
            samples,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let sys = |_t: f64, y: &[f64; 1], dy: &mut [f64; 1]| dy[0] = -y[0];
        let out = Dopri5::default()
            .integrate(&sys, 0.0, [1.0], 1.0, |_, _| true)
            .unwrap();
        assert_eq!(out.termination, Termination::Reached);
        assert!((out.y[0] - (-1.0f64).exp()).abs() < 1e-10);
        assert_eq!(out.samples.last().unwrap().0, out.t);
    }

    #[test]
    fn harmonic_oscillator_round_trip() {
        let sys = |_t: f64, y: &[f64; 2], dy: &mut [f64; 2]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        };
        let out = Dopri5::default()
            .integrate(&sys, 0.0, [1.0, 0.0], 2.0 * std::f64::consts::PI, |_, _| {
                true
            })
            .unwrap();
        assert!((out.y[0] - 1.0).abs() < 1e-8, "{:?}", out.y);
        assert!(out.y[1].abs() < 1e-8);
        // Energy along the way.
        for (_, y) in &out.samples {
            let e = y[0] * y[0] + y[1] * y[1];
            assert!((e - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn nonautonomous_quadrature() {
        let sys = |t: f64, _y: &[f64; 1], dy: &mut [f64; 1]| dy[0] = t.cos();
        let out = Dopri5::default()
            .integrate(&sys, 0.0, [0.0], 2.5, |_, _| true)
            .unwrap();
        assert!((out.y[0] - 2.5f64.sin()).abs() < 1e-9);
    }

    #[test]
    fn monitor_halts_at_threshold() {
        let sys = |_t: f64, y: &[f64; 1], dy: &mut [f64; 1]| dy[0] = -y[0];
        let solver = Dopri5 {
            max_step: 1e-3,
            ..Dopri5::default()
        };
        let out = solver
            .integrate(&sys, 0.0, [1.0], 5.0, |_, y| y[0] > 0.5)
            .unwrap();
        assert_eq!(out.termination, Termination::Halted);
        // Stops within one max_step of ln 2.
        assert!(
            (out.t - std::f64::consts::LN_2).abs() < 2e-3,
            "t = {}",
            out.t
        );
    }

    #[test]
    fn tighter_tolerance_reduces_error() {
        let sys = |_t: f64, y: &[f64; 2], dy: &mut [f64; 2]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        };
        let run = |rtol: f64| {
            let solver = Dopri5 {
                rtol,
                atol: rtol * 1e-2,
                ..Dopri5::default()
            };
            let out = solver
                .integrate(&sys, 0.0, [1.0, 0.0], 20.0, |_, _| true)
                .unwrap();
            (out.y[0] - 20.0f64.cos()).abs() + (out.y[1] + 20.0f64.sin()).abs()
        };
        let coarse = run(1e-6);
        let fine = run(1e-12);
        assert!(fine < coarse / 10.0, "coarse {coarse}, fine {fine}");
        assert!(fine < 1e-10);
    }

    #[test]
    fn max_step_is_respected() {
        let sys = |_t: f64, _y: &[f64; 1], dy: &mut [f64; 1]| dy[0] = 1.0;
        let solver = Dopri5 {
            max_step: 0.01,
            ..Dopri5::default()
        };
        let out = solver
            .integrate(&sys, 0.0, [0.0], 1.0, |_, _| true)
            .unwrap();
        for w in out.samples.windows(2) {
            assert!(w[1].0 - w[0].0 <= 0.01 + 1e-12);
        }
    }

    #[test]
    fn budget_and_domain_errors() {
        let sys = |_t: f64, y: &[f64; 1], dy: &mut [f64; 1]| dy[0] = -y[0];
        let solver = Dopri5 {
            max_steps: 3,
            max_step: 1e-6,
            ..Dopri5::default()
        };
        assert!(matches!(
            solver.integrate(&sys, 0.0, [1.0], 1.0, |_, _| true),
            Err(Error::Integration { .. })
        ));
        assert!(Dopri5::default()
            .integrate(&sys, 1.0, [1.0], 0.5, |_, _| true)
            .is_err());
    }

    #[test]
    fn blowup_is_reported_not_panicked() {
        // y' = y^2 from y(0) = 1 blows up at t = 1.
        let sys = |_t: f64, y: &[f64; 1], dy: &mut [f64; 1]| dy[0] = y[0] * y[0];
        let solver = Dopri5 {
            max_steps: 100_000,
            ..Dopri5::default()
        };
        let res = solver.integrate(&sys, 0.0, [1.0], 2.0, |_, _| true);
        assert!(res.is_err());
    }
}
