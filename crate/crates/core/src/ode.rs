//! Adaptive classical Runge-Kutta (RK4) with step doubling for scalar ODEs.

/// Why an integration stopped early, together with the last accepted point.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeFailure {
    pub steps: usize,
    pub x: f64,
    pub y: f64,
    pub reason: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rk4Doubling {
    /// Local relative tolerance per accepted step.
    pub rel_tol: f64,
    pub max_steps: usize,
}

impl Default for Rk4Doubling {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            max_steps: 10_000_000,
        }
    }
}

fn rk4_step<F: Fn(f64, f64) -> f64>(f: &F, x: f64, y: f64, h: f64) -> f64 {
    let k1 = f(x, y);
    let k2 = f(x + 0.5 * h, y + 0.5 * h * k1);
    let k3 = f(x + 0.5 * h, y + 0.5 * h * k2);
    let k4 = f(x + h, y + h * k3);
    y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

impl Rk4Doubling {
    /// Integrates `dy/dx = f(x, y)` from `(x0, y0)` through every point of
    /// `targets`, which must be monotone and all on the same side of `x0`.
    /// Returns `y` at each target.
    pub fn integrate<F>(&self, f: F, x0: f64, y0: f64, targets: &[f64]) -> Result<Vec<f64>, OdeFailure>
    where
        F: Fn(f64, f64) -> f64,
    {
        let mut out = Vec::with_capacity(targets.len());
        let Some(&last) = targets.last() else {
            return Ok(out);
        };
        let span = last - x0;
        let dir = if span >= 0.0 { 1.0 } else { -1.0 };

        let mut x = x0;
        let mut y = y0;
        let mut h = span.abs() * 1e-3;
        let mut steps = 0usize;

        for &target in targets {
            if (target - x) * dir < 0.0 {
                return Err(OdeFailure {
                    steps,
                    x,
                    y,
                    reason: format!("target {target:e} is not monotone in the integration direction"),
                });
            }
            if h == 0.0 {
                h = (target - x).abs() * 1e-3;
            }
            while x != target {
                if steps >= self.max_steps {
                    return Err(OdeFailure {
                        steps,
                        x,
                        y,
                        reason: "maximum step count exceeded".into(),
                    });
                }
                steps += 1;

                let remaining = (target - x).abs();
                let last_step = h >= remaining;
                let step = if last_step { remaining } else { h };
                let signed = dir * step;

                let full = rk4_step(&f, x, y, signed);
                let half = rk4_step(&f, x, y, 0.5 * signed);
                let two_half = rk4_step(&f, x + 0.5 * signed, half, 0.5 * signed);

                let diff = two_half - full;
                let err = diff.abs() / 15.0;
                let scale = y.abs().max(two_half.abs()).max((two_half - y).abs()).max(f64::MIN_POSITIVE);
                let ratio = err / (self.rel_tol * scale);

                if !ratio.is_finite() || !two_half.is_finite() {
                    return Err(OdeFailure {
                        steps,
                        x,
                        y,
                        reason: "non-finite derivative".into(),
                    });
                }

                if ratio <= 1.0 {
                    x = if last_step { target } else { x + signed };
                    y = two_half + diff / 15.0;
                }
                let factor = if ratio == 0.0 {
                    5.0
                } else {
                    (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0)
                };
                // keep the pre-clamp step size when the final step was shortened
                if !(ratio <= 1.0 && last_step) {
                    h = step * factor;
                }
                if h <= f64::EPSILON * x.abs().max(1.0) {
                    return Err(OdeFailure {
                        steps,
                        x,
                        y,
                        reason: "step size underflow".into(),
                    });
                }
            }
            out.push(y);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let solver = Rk4Doubling::default();
        let ys = solver.integrate(|_, y| y, 0.0, 1.0, &[0.5, 1.0, 2.0]).unwrap();
        for (y, x) in ys.iter().zip([0.5f64, 1.0, 2.0]) {
            assert!(((y - x.exp()) / x.exp()).abs() < 1e-8, "{y}");
        }
    }

    #[test]
    fn backwards_integration() {
        let solver = Rk4Doubling::default();
        let ys = solver.integrate(|x, _| 1.0 / x, 1.0, 0.0, &[0.5, 0.1]).unwrap();
        assert!((ys[0] - 0.5f64.ln()).abs() < 1e-9);
        assert!((ys[1] - 0.1f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn step_cap_reports_last_state() {
        let solver = Rk4Doubling {
            rel_tol: 1e-10,
            max_steps: 3,
        };
        let err = solver.integrate(|_, y| y, 0.0, 1.0, &[10.0]).unwrap_err();
        assert_eq!(err.steps, 3);
        assert!(err.x > 0.0 && err.y > 1.0);
    }

    #[test]
    fn non_monotone_targets_rejected() {
        let solver = Rk4Doubling::default();
        assert!(solver.integrate(|_, _| 1.0, 0.0, 0.0, &[1.0, 0.5]).is_err());
    }
}
