//! Characteristic volume and length of dynamical reduction from the balance
//! between the kinetic-energy gain of a particle and the decay of the vacuum.
//!
//! A particle of mass `m` driven by a delta-correlated acceleration field
//! gains energy at the rate `mG/(2V_c)`. Requiring that this is paid for by
//! the vacuum energy inside the volume `V_c` gives
//! `mG/(2V_c) = -V_c ε̇_vac`, hence `V_c = sqrt(-mG/(2ε̇_vac))` and
//! `R_c = V_c^(1/3)`.

use std::f64::consts::PI;

use crate::cosmology::{eps_vac_rate, BackgroundState, CosmoParams};
use crate::error::{Error, Result};
use crate::units::{newton_g, Quantity};

/// Relations written with `~` (decoherence time, the acceleration
/// correlator) are evaluated with coefficient 1; outputs carry this flag.
pub const ORDER_OF_MAGNITUDE: bool = true;

/// Maximum relative disagreement tolerated between the closed-form present
/// length and the composed pipeline.
pub const CROSS_CHECK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReductionResult {
    pub m: Quantity,
    /// Characteristic volume, dimension −3.
    pub v_c: Quantity,
    /// Characteristic length, dimension −1.
    pub r_c: Quantity,
    /// Energy gain rate, dimension +2.
    pub de_dt: Quantity,
    /// Decoherence time, dimension −1.
    pub t_dec: Quantity,
}

impl ReductionResult {
    /// Derives every field from the mass and characteristic volume.
    pub fn from_volume(m: Quantity, v_c: Quantity) -> Result<Self> {
        let r_c = v_c.cbrt()?;
        Ok(Self {
            m,
            v_c,
            r_c,
            de_dt: energy_gain_rate(m, v_c)?,
            t_dec: decoherence_time(m, r_c)?,
        })
    }
}

fn check_mass(m: Quantity) -> Result<()> {
    m.expect_dim(1)?;
    if m.value() > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("particle mass must be positive, got {:e}", m.value())))
    }
}

fn check_decay(p: &CosmoParams) -> Result<()> {
    if p.delta > 0.0 {
        Ok(())
    } else {
        Err(Error::NoDecay(format!("delta = {}", p.delta)))
    }
}

/// `V_c = sqrt(-mG / (2 ε̇_vac))`, dimension −3.
pub fn characteristic_volume(m: Quantity, vac_rate: Quantity) -> Result<Quantity> {
    check_mass(m)?;
    vac_rate.expect_dim(5)?;
    if !(vac_rate.value() < 0.0) {
        return Err(Error::NoDecay(format!("vacuum energy rate = {:e}", vac_rate.value())));
    }
    m.try_mul(newton_g())?.try_div(vac_rate.scale(-2.0)?)?.sqrt()
}

/// `dE/dt = mG / (2 V_c)`, dimension +2.
pub fn energy_gain_rate(m: Quantity, v_c: Quantity) -> Result<Quantity> {
    check_mass(m)?;
    v_c.expect_dim(-3)?;
    if !(v_c.value() > 0.0) {
        return Err(Error::Domain(format!("characteristic volume must be positive, got {:e}", v_c.value())));
    }
    m.try_mul(newton_g())?.try_div(v_c.scale(2.0)?)
}

/// Order-of-magnitude decoherence time `R_c / (G m²)`, dimension −1.
pub fn decoherence_time(m: Quantity, r_c: Quantity) -> Result<Quantity> {
    check_mass(m)?;
    r_c.expect_dim(-1)?;
    if !(r_c.value() > 0.0) {
        return Err(Error::Domain(format!("characteristic length must be positive, got {:e}", r_c.value())));
    }
    r_c.try_div(newton_g().try_mul(m.powi(2)?)?)
}

/// Present characteristic length from the closed form
/// `(8π m G² / (6 Ω_d δ H0³))^(1/6)`.
pub fn closed_form_length_now(p: &CosmoParams, m: Quantity) -> Result<Quantity> {
    check_decay(p)?;
    check_mass(m)?;
    let g = newton_g();
    let numerator = m.try_mul(g.powi(2)?)?.scale(8.0 * PI)?;
    let denominator = p.h0.powi(3)?.scale(6.0 * p.omega_d0 * p.delta)?;
    numerator.try_div(denominator)?.pow_ratio(1, 6)
}

/// Present-epoch result via the composed pipeline: vacuum rate at `a0`,
/// characteristic volume, cube root.
pub fn pipeline_now(p: &CosmoParams, m: Quantity) -> Result<ReductionResult> {
    check_decay(p)?;
    let rate = eps_vac_rate(p.a0, p.h0, p)?;
    ReductionResult::from_volume(m, characteristic_volume(m, rate)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LengthNow {
    pub result: ReductionResult,
    pub closed_form_r_c: Quantity,
    /// `|R_pipeline - R_closed| / R_closed`.
    pub cross_check: f64,
}

/// Present-epoch reduction scales, cross-checked against the closed form.
pub fn characteristic_length_now(p: &CosmoParams, m: Quantity) -> Result<LengthNow> {
    let result = pipeline_now(p, m)?;
    let closed = closed_form_length_now(p, m)?;
    let cross_check = ((result.r_c.value() - closed.value()) / closed.value()).abs();
    if !(cross_check <= CROSS_CHECK_TOL) {
        return Err(Error::InternalConsistency(format!(
            "closed-form and pipeline R_c disagree by {cross_check:e}"
        )));
    }
    Ok(LengthNow {
        result,
        closed_form_r_c: closed,
        cross_check,
    })
}

/// Reduction scales along an integrated background, one entry per state.
pub fn rc_history(traj: &[BackgroundState], p: &CosmoParams, m: Quantity) -> Result<Vec<(Quantity, ReductionResult)>> {
    check_decay(p)?;
    if traj.is_empty() {
        return Err(Error::Domain("empty trajectory".into()));
    }
    traj.iter()
        .map(|s| {
            let rate = eps_vac_rate(s.a, s.h, p)?;
            Ok((s.t, ReductionResult::from_volume(m, characteristic_volume(m, rate)?)?))
        })
        .collect()
}

/// Fraction of space covered by one characteristic volume per ordinary and
/// dark-matter particle at the present epoch. Values far below one mean the
/// energy drained into particle motion does not feed back on the vacuum
/// evolution.
pub fn vacuum_budget_check(p: &CosmoParams, m_ordinary: Quantity, m_dark: Quantity) -> Result<f64> {
    check_decay(p)?;
    check_mass(m_ordinary)?;
    check_mass(m_dark)?;
    let n_b = p.eps_b0().try_div(m_ordinary)?;
    let n_d = p.eps_d0().try_div(m_dark)?;
    let v_c = characteristic_volume(m_ordinary, eps_vac_rate(p.a0, p.h0, p)?)?;
    let fraction = n_b.try_add(n_d)?.try_mul(v_c)?;
    fraction.expect_dim(0)?;
    Ok(fraction.value())
}
