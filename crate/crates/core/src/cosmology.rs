//! Flat FRW background with a vacuum that decays into dark matter.
//!
//! Dark matter dilutes as `a^-(3-δ)` instead of `a^-3`; the vacuum density
//! makes up the difference so that the continuity equation for the sum holds.
//! Ordinary matter dilutes as exactly `a^-3`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::ode::Rk4Doubling;
use crate::units::{newton_g, Quantity, HUBBLE_NOW_GEV};

const FLATNESS_TOL: f64 = 1e-12;

/// Model configuration for the background cosmology.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosmoParams {
    pub h0: Quantity,
    pub omega_d0: f64,
    pub omega_b0: f64,
    pub omega_vac0: f64,
    pub delta: f64,
    pub a0: f64,
}

impl Default for CosmoParams {
    fn default() -> Self {
        Self {
            h0: Quantity::gev(HUBBLE_NOW_GEV).expect("finite constant"),
            omega_d0: 0.27,
            omega_b0: 0.03,
            omega_vac0: 0.70,
            delta: 0.06,
            a0: 1.0,
        }
    }
}

impl CosmoParams {
    pub fn new(h0: Quantity, omega_d0: f64, omega_b0: f64, omega_vac0: f64, delta: f64) -> Result<Self> {
        let p = Self {
            h0,
            omega_d0,
            omega_b0,
            omega_vac0,
            delta,
            a0: 1.0,
        };
        p.validate()?;
        Ok(p)
    }

    /// Default fractions with the given deviation exponent.
    pub fn with_delta(delta: f64) -> Result<Self> {
        let p = Self {
            delta,
            ..Self::default()
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        self.h0.expect_dim(1)?;
        if !(self.h0.value() > 0.0) {
            return Err(Error::Domain(format!("H0 must be positive, got {:e}", self.h0.value())));
        }
        for (name, v) in [
            ("omega_d0", self.omega_d0),
            ("omega_b0", self.omega_b0),
            ("omega_vac0", self.omega_vac0),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Domain(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        let total = self.omega_d0 + self.omega_b0 + self.omega_vac0;
        if (total - 1.0).abs() > FLATNESS_TOL {
            return Err(Error::Domain(format!("density fractions must sum to 1, got {total}")));
        }
        if !(self.delta >= 0.0 && self.delta < 3.0) {
            return Err(Error::Domain(format!("delta must lie in [0, 3), got {}", self.delta)));
        }
        if !(self.a0 > 0.0 && self.a0.is_finite()) {
            return Err(Error::Domain(format!("a0 must be positive, got {}", self.a0)));
        }
        Ok(())
    }

    /// `δ = 0`: the vacuum is a true constant and dark matter dilutes as `a^-3`.
    pub fn is_no_decay(&self) -> bool {
        self.delta == 0.0
    }

    pub fn critical_density_now(&self) -> Quantity {
        critical_density(self.h0).expect("validated H0")
    }

    pub fn eps_d0(&self) -> Quantity {
        self.critical_density_now() * self.omega_d0
    }

    pub fn eps_b0(&self) -> Quantity {
        self.critical_density_now() * self.omega_b0
    }

    /// The constant part ε̃_vac of the vacuum density, fixed so that the
    /// vacuum density at `a0` equals `omega_vac0` of the critical density.
    pub fn eps_vac_floor(&self) -> Quantity {
        let eps_crit = self.critical_density_now();
        let decaying = self.eps_d0() * (self.delta / (3.0 - self.delta));
        (eps_crit * self.omega_vac0)
            .try_sub(decaying)
            .expect("both terms are energy densities")
    }

    fn dilution(&self, a: f64) -> f64 {
        (self.a0 / a).powf(3.0 - self.delta)
    }
}

fn check_scale_factor(a: f64) -> Result<()> {
    if a > 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("scale factor must be positive, got {a}")))
    }
}

/// `3H²/(8πG)`.
pub fn critical_density(h: Quantity) -> Result<Quantity> {
    h.expect_dim(1)?;
    if !(h.value() > 0.0) {
        return Err(Error::Domain(format!("Hubble rate must be positive, got {:e}", h.value())));
    }
    h.powi(2)?.scale(3.0 / (8.0 * PI))?.try_div(newton_g())
}

/// Dark-matter energy density `ε_d0 (a0/a)^(3-δ)`.
pub fn eps_d(a: f64, p: &CosmoParams) -> Result<Quantity> {
    check_scale_factor(a)?;
    p.eps_d0().scale(p.dilution(a))
}

/// Ordinary-matter energy density `ε_b0 (a0/a)³`.
pub fn eps_b(a: f64, p: &CosmoParams) -> Result<Quantity> {
    check_scale_factor(a)?;
    p.eps_b0().scale((p.a0 / a).powi(3))
}

/// Vacuum energy density `ε̃_vac + δ/(3-δ) ε_d0 (a0/a)^(3-δ)`.
pub fn eps_vac(a: f64, p: &CosmoParams) -> Result<Quantity> {
    check_scale_factor(a)?;
    if !(p.delta < 3.0) {
        return Err(Error::Domain(format!("delta must be below 3, got {}", p.delta)));
    }
    let decaying = p.eps_d0().scale(p.delta / (3.0 - p.delta) * p.dilution(a))?;
    p.eps_vac_floor().try_add(decaying)
}

/// Time derivative of the vacuum density, `-δ ε_d0 H (a0/a)^(3-δ)`, dimension +5.
pub fn eps_vac_rate(a: f64, h: Quantity, p: &CosmoParams) -> Result<Quantity> {
    check_scale_factor(a)?;
    h.expect_dim(1)?;
    if !(h.value() > 0.0) {
        return Err(Error::Domain(format!("Hubble rate must be positive, got {:e}", h.value())));
    }
    (-p.eps_d0()).try_mul(h)?.scale(p.delta * p.dilution(a))
}

/// Flat Friedmann closure `H = sqrt(8πG/3 · (ε_b + ε_d + ε_vac))`.
pub fn hubble(a: f64, p: &CosmoParams) -> Result<Quantity> {
    let total = eps_b(a, p)?.try_add(eps_d(a, p)?)?.try_add(eps_vac(a, p)?)?;
    if !(total.value() > 0.0) {
        return Err(Error::Domain(format!(
            "total energy density non-positive at a = {a}; only expanding solutions are supported"
        )));
    }
    newton_g().scale(8.0 * PI / 3.0)?.try_mul(total)?.sqrt()
}

/// One sample of the integrated cosmic history.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BackgroundState {
    /// Cosmic time relative to the epoch where `a = a0`.
    pub t: Quantity,
    pub a: f64,
    pub eps_d: Quantity,
    pub eps_vac: Quantity,
    pub h: Quantity,
}

impl BackgroundState {
    pub fn at(a: f64, t: Quantity, p: &CosmoParams) -> Result<Self> {
        t.expect_dim(-1)?;
        Ok(Self {
            t,
            a,
            eps_d: eps_d(a, p)?,
            eps_vac: eps_vac(a, p)?,
            h: hubble(a, p)?,
        })
    }

    /// Relative Friedmann residual `|H² - 8πG/3 Σε| / H²`.
    pub fn flatness_residual(&self, p: &CosmoParams) -> Result<f64> {
        let total = eps_b(self.a, p)?.try_add(self.eps_d)?.try_add(self.eps_vac)?;
        let rhs = newton_g().scale(8.0 * PI / 3.0)?.try_mul(total)?;
        let lhs = self.h.powi(2)?;
        Ok((lhs.try_sub(rhs)?.value() / lhs.value()).abs())
    }
}

/// `n` log-spaced scale factors from `a_start` to `a_end` inclusive.
pub fn log_grid(a_start: f64, a_end: f64, n: usize) -> Vec<f64> {
    let ratio = a_end / a_start;
    (0..n)
        .map(|i| {
            if i == 0 {
                a_start
            } else if i + 1 == n {
                a_end
            } else {
                a_start * ratio.powf(i as f64 / (n - 1) as f64)
            }
        })
        .collect()
}

/// Integrates `dt/da = 1/(a H(a))` and samples the background at
/// `n_samples` log-spaced scale factors in `[a_start, a_end]`.
pub fn evolve_background(p: &CosmoParams, a_start: f64, a_end: f64, n_samples: usize) -> Result<Vec<BackgroundState>> {
    evolve_background_with(p, a_start, a_end, n_samples, &Rk4Doubling::default())
}

pub fn evolve_background_with(
    p: &CosmoParams,
    a_start: f64,
    a_end: f64,
    n_samples: usize,
    solver: &Rk4Doubling,
) -> Result<Vec<BackgroundState>> {
    p.validate()?;
    check_scale_factor(a_start)?;
    check_scale_factor(a_end)?;
    if !(a_start < a_end) {
        return Err(Error::Domain(format!("need a_start < a_end, got {a_start} and {a_end}")));
    }
    if n_samples < 2 {
        return Err(Error::Domain(format!("need at least 2 samples, got {n_samples}")));
    }
    let grid = log_grid(a_start, a_end, n_samples);
    let times = integrate_times(p, &grid, solver)?;
    grid.iter()
        .zip(times)
        .map(|(&a, t)| BackgroundState::at(a, Quantity::new(t, -1)?, p))
        .collect()
}

/// Cosmic time (GeV⁻¹, zero at `a0`) at each scale factor of an increasing grid.
fn integrate_times(p: &CosmoParams, grid: &[f64], solver: &Rk4Doubling) -> Result<Vec<f64>> {
    let h0 = p.h0.value();
    // Integrate in units of 1/H0 to keep the solver's numbers of order one.
    let rhs = |a: f64, _t: f64| -> f64 {
        match hubble(a, p) {
            Ok(h) => h0 / (a * h.value()),
            Err(_) => f64::NAN,
        }
    };
    let split = grid.partition_point(|&a| a < p.a0);
    let below: Vec<f64> = grid[..split].iter().rev().copied().collect();
    let above = &grid[split..];

    let fail = |e: crate::ode::OdeFailure| Error::IntegrationFailure {
        steps: e.steps,
        last_a: e.x,
        last_t: e.y / h0,
        reason: e.reason,
    };
    let mut t_below = solver.integrate(rhs, p.a0, 0.0, &below).map_err(fail)?;
    let t_above = solver.integrate(rhs, p.a0, 0.0, above).map_err(fail)?;
    t_below.reverse();
    t_below.extend(t_above);
    Ok(t_below.into_iter().map(|t| t / h0).collect())
}

/// Relative residual of the continuity relation
/// `ε̇_d + 3 H ε_d ≈ -ε̇_vac`, normalised by `H ε_d`.
pub fn continuity_residual(s: &BackgroundState, p: &CosmoParams) -> Result<f64> {
    let h_eps = s.h.try_mul(s.eps_d)?;
    let eps_d_rate = h_eps.scale(-(3.0 - p.delta))?;
    let vac_rate = eps_vac_rate(s.a, s.h, p)?;
    let lhs = eps_d_rate.try_add(h_eps.scale(3.0)?)?.try_add(vac_rate)?;
    Ok((lhs.value() / h_eps.value()).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn critical_density_examples() {
        let p = CosmoParams::default();
        let eps = critical_density(p.h0).unwrap();
        assert_eq!(eps.dim(), 4);
        // 3 H0² M_Pl² / (8π)
        assert!(rel(eps.value(), 1.0506395276066176e-47) < 1e-12);
        let doubled = critical_density(p.h0 * 2.0).unwrap();
        assert!(rel(doubled.value(), 4.0 * eps.value()) < 1e-15);
        assert!(critical_density(Quantity::gev(0.0).unwrap()).is_err());
        assert!(critical_density(Quantity::new(1.0, 2).unwrap()).is_err());
    }

    #[test]
    fn dark_matter_density() {
        let p = CosmoParams::default();
        let now = eps_d(1.0, &p).unwrap();
        assert!(rel(now.value(), 2.836726724537868e-48) < 1e-12);
        let no_decay = CosmoParams::with_delta(0.0).unwrap();
        assert_eq!(eps_d(1.0, &no_decay).unwrap(), now);
        assert!(rel(eps_d(2.0, &no_decay).unwrap().value(), now.value() / 8.0) < 1e-15);
        assert!(eps_d(0.0, &p).is_err());
        assert!(eps_d(-1.0, &p).is_err());
    }

    #[test]
    fn vacuum_density() {
        let p = CosmoParams::default();
        let eps_crit = p.critical_density_now().value();
        assert!(rel(eps_vac(1.0, &p).unwrap().value(), 0.70 * eps_crit) < 1e-14);
        let varying = eps_vac(1.0, &p).unwrap().value() - p.eps_vac_floor().value();
        assert!(rel(varying, 5.789238213342587e-50) < 1e-9);
        let far = eps_vac(1e12, &p).unwrap().value();
        assert!(rel(far, p.eps_vac_floor().value()) < 1e-15);
        assert!(eps_vac(0.0, &p).is_err());
        let mut bad = p;
        bad.delta = 3.0;
        assert!(eps_vac(1.0, &bad).is_err());
    }

    #[test]
    fn vacuum_rate() {
        let p = CosmoParams::default();
        let rate = eps_vac_rate(1.0, p.h0, &p).unwrap();
        assert_eq!(rate.dim(), 5);
        assert!(rel(rate.value(), -1.3088657107017724e-91) < 1e-12);
        let no_decay = CosmoParams::with_delta(0.0).unwrap();
        assert_eq!(eps_vac_rate(1.0, p.h0, &no_decay).unwrap().value(), 0.0);
        assert!(eps_vac_rate(1.0, Quantity::gev(0.0).unwrap(), &p).is_err());
    }

    #[test]
    fn hubble_closure() {
        let p = CosmoParams::default();
        assert!(rel(hubble(1.0, &p).unwrap().value(), p.h0.value()) < 1e-12);

        let floor = newton_g().scale(8.0 * PI / 3.0).unwrap() * p.eps_vac_floor();
        let de_sitter = floor.value().sqrt();
        assert!(rel(hubble(1e8, &p).unwrap().value(), de_sitter) < 1e-12);

        let no_decay = CosmoParams::with_delta(0.0).unwrap();
        let expected = p.h0.value() * (0.30f64 * 8.0 + 0.70).sqrt();
        assert!(rel(hubble(0.5, &no_decay).unwrap().value(), expected) < 1e-12);
        assert!(hubble(0.0, &p).is_err());
    }

    #[test]
    fn params_validation() {
        let h0 = Quantity::gev(HUBBLE_NOW_GEV).unwrap();
        assert!(CosmoParams::new(h0, 0.27, 0.03, 0.70, 0.06).is_ok());
        assert!(CosmoParams::new(h0, 0.27, 0.03, 0.71, 0.06).is_err());
        assert!(CosmoParams::new(h0, 0.27, 0.03, 0.70, -0.01).is_err());
        assert!(CosmoParams::new(h0, 0.27, 0.03, 0.70, 3.0).is_err());
        assert!(CosmoParams::new(Quantity::gev(-1.0).unwrap(), 0.27, 0.03, 0.70, 0.06).is_err());
        assert!(CosmoParams::new(Quantity::new(1e-42, -1).unwrap(), 0.27, 0.03, 0.70, 0.06).is_err());
        let p = CosmoParams::new(h0, 0.27, 0.03, 0.70, 0.0).unwrap();
        assert!(p.is_no_decay());
    }

    #[test]
    fn evolve_rejects_bad_ranges() {
        let p = CosmoParams::default();
        assert!(evolve_background(&p, 1.0, 1.0, 10).is_err());
        assert!(evolve_background(&p, 2.0, 1.0, 10).is_err());
        assert!(evolve_background(&p, 0.5, 2.0, 1).is_err());
        assert!(evolve_background(&p, 0.0, 2.0, 10).is_err());
    }

    #[test]
    fn evolve_anchor_and_monotonicity() {
        let p = CosmoParams::default();
        let traj = evolve_background(&p, 0.5, 2.0, 201).unwrap();
        let anchor = &traj[100];
        assert_eq!(anchor.a, 1.0);
        assert!(anchor.t.value().abs() < 1e-30);
        for w in traj.windows(2) {
            assert!(w[1].a > w[0].a);
            assert!(w[1].t.value() > w[0].t.value());
        }
    }

    #[test]
    fn integration_failure_carries_state() {
        let p = CosmoParams::default();
        let solver = Rk4Doubling {
            rel_tol: 1e-10,
            max_steps: 5,
        };
        match evolve_background_with(&p, 0.1, 10.0, 10, &solver) {
            Err(Error::IntegrationFailure { steps, last_a, .. }) => {
                assert_eq!(steps, 5);
                assert!(last_a > 0.0);
            }
            other => panic!("expected integration failure, got {other:?}"),
        }
    }

    #[test]
    fn continuity_examples() {
        for delta in [0.0, 0.06, 0.16] {
            let p = CosmoParams::with_delta(delta).unwrap();
            for s in evolve_background(&p, 0.2, 5.0, 20).unwrap() {
                assert!(continuity_residual(&s, &p).unwrap() < 1e-12);
            }
        }
    }
}
