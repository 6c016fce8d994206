use vacrc::cosmology::{continuity_residual, evolve_background, eps_vac_rate, BackgroundState, CosmoParams};
use vacrc::reduction::{characteristic_length_now, rc_history, vacuum_budget_check, ReductionResult};
use vacrc::stochastic::{
    simulate_ensemble_with_threads, verify_energy_growth, NoiseConfig, VcProfile, RNG_ALGORITHM_ID,
};
use vacrc::units::{length_to_cm, newton_g, time_to_seconds, Quantity};

use crate::config::{ProfileSource, RunConfig, SweepAxis};
use crate::error::CliError;
use crate::output::{Cell, OutputRecord};

/// z threshold for per-step Monte Carlo checks.
pub const Z_THRESHOLD: f64 = 3.0;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub record: OutputRecord,
    /// Verification or consistency verdict; `true` for plain computations.
    pub passed: bool,
    pub summary: String,
}

pub fn params(cfg: &RunConfig) -> Result<CosmoParams, CliError> {
    Ok(CosmoParams::new(
        Quantity::gev(cfg.h0_gev)?,
        cfg.omega_d0,
        cfg.omega_b0,
        cfg.omega_vac0,
        cfg.delta,
    )?)
}

fn mass(cfg: &RunConfig) -> Result<Quantity, CliError> {
    Ok(Quantity::gev(cfg.mass_gev)?)
}

const RESULT_COLUMNS: [&str; 8] = [
    "mass_gev",
    "v_c_gev_m3",
    "r_c_gev_inv",
    "r_c_cm",
    "de_dt_gev2",
    "t_dec_gev_inv",
    "t_dec_s",
    "v_c_cm3",
];

fn result_cells(r: &ReductionResult) -> Result<Vec<Cell>, CliError> {
    let r_cm = length_to_cm(r.r_c)?;
    Ok(vec![
        r.m.value().into(),
        r.v_c.value().into(),
        r.r_c.value().into(),
        r_cm.into(),
        r.de_dt.value().into(),
        r.t_dec.value().into(),
        time_to_seconds(r.t_dec)?.into(),
        (r_cm * r_cm * r_cm).into(),
    ])
}

pub fn cmd_rc_now(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = params(cfg)?;
    let now = characteristic_length_now(&p, mass(cfg)?)?;

    let mut columns = RESULT_COLUMNS.to_vec();
    columns.extend(["r_c_closed_form_gev_inv", "cross_check_rel"]);
    let mut rec = OutputRecord::new("rc-now", cfg, &columns);
    rec.order_of_magnitude = vec!["t_dec"];
    let mut row = result_cells(&now.result)?;
    row.push(now.closed_form_r_c.value().into());
    row.push(now.cross_check.into());
    rec.push_row(row);
    rec.push_meta("cross_check_rel", now.cross_check);

    let summary = format!(
        "R_c(t0) = {:.4e} cm ({:.6e} GeV^-1), V_c = {:.4e} GeV^-3, t_dec ~ {:.4e} s, closed-form agreement {:.1e}",
        length_to_cm(now.result.r_c)?,
        now.result.r_c.value(),
        now.result.v_c.value(),
        time_to_seconds(now.result.t_dec)?,
        now.cross_check
    );
    Ok(Outcome {
        record: rec,
        passed: true,
        summary,
    })
}

struct History {
    states: Vec<BackgroundState>,
    results: Vec<ReductionResult>,
    max_continuity: f64,
    max_flatness: f64,
}

fn history(cfg: &RunConfig, p: &CosmoParams) -> Result<History, CliError> {
    let states = evolve_background(p, cfg.a_start, cfg.a_end, cfg.n_samples)?;
    let results = rc_history(&states, p, mass(cfg)?)?.into_iter().map(|(_, r)| r).collect();
    let mut max_continuity = 0.0f64;
    let mut max_flatness = 0.0f64;
    for s in &states {
        max_continuity = max_continuity.max(continuity_residual(s, p)?);
        max_flatness = max_flatness.max(s.flatness_residual(p)?);
    }
    Ok(History {
        states,
        results,
        max_continuity,
        max_flatness,
    })
}

pub fn cmd_evolve(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = params(cfg)?;
    let h = history(cfg, &p)?;

    let columns = [
        "t_gev_inv",
        "t_s",
        "a",
        "h_gev",
        "eps_d_gev4",
        "eps_vac_gev4",
        "eps_vac_rate_gev5",
        "v_c_gev_m3",
        "r_c_gev_inv",
        "r_c_cm",
        "de_dt_gev2",
        "t_dec_gev_inv",
    ];
    let mut rec = OutputRecord::new("evolve", cfg, &columns);
    rec.order_of_magnitude = vec!["t_dec"];
    for (s, r) in h.states.iter().zip(&h.results) {
        rec.push_row(vec![
            s.t.value().into(),
            time_to_seconds(s.t)?.into(),
            s.a.into(),
            s.h.value().into(),
            s.eps_d.value().into(),
            s.eps_vac.value().into(),
            eps_vac_rate(s.a, s.h, &p)?.value().into(),
            r.v_c.value().into(),
            r.r_c.value().into(),
            length_to_cm(r.r_c)?.into(),
            r.de_dt.value().into(),
            r.t_dec.value().into(),
        ]);
    }
    let monotone = h.results.windows(2).all(|w| w[1].v_c.value() > w[0].v_c.value());
    rec.push_meta("max_continuity_residual", h.max_continuity);
    rec.push_meta("max_flatness_residual", h.max_flatness);
    rec.push_meta("v_c_strictly_increasing", monotone);

    let first = h.results.first().expect("n_samples >= 2");
    let last = h.results.last().expect("n_samples >= 2");
    let summary = format!(
        "{} samples over a in [{}, {}]: R_c {:.4e} -> {:.4e} cm, V_c increasing: {monotone}, max continuity residual {:.2e}",
        h.states.len(),
        cfg.a_start,
        cfg.a_end,
        length_to_cm(first.r_c)?,
        length_to_cm(last.r_c)?,
        h.max_continuity
    );
    Ok(Outcome {
        record: rec,
        passed: true,
        summary,
    })
}

/// Conversion between the scaled Monte Carlo units and natural units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaling {
    /// One scaled time unit in GeV⁻¹.
    pub time_unit_gev_inv: f64,
    /// One scaled volume unit in GeV⁻³.
    pub volume_unit_gev_m3: f64,
}

impl Scaling {
    /// Physical `<v²>` (c = 1) per scaled unit: `G T / V`.
    pub fn msv_unit(&self) -> f64 {
        newton_g().value() * self.time_unit_gev_inv / self.volume_unit_gev_m3
    }
}

/// Scaled `V_c(t)` profile spanning the Monte Carlo window, built from the
/// cosmic history between `a_start` and `a_end`.
pub fn profile_from_evolve(cfg: &RunConfig) -> Result<(VcProfile, Scaling), CliError> {
    let p = params(cfg)?;
    let h = history(cfg, &p)?;
    let t0 = h.states[0].t.value();
    let span = h.states.last().expect("n_samples >= 2").t.value() - t0;
    let window = cfg.n_steps as f64 * cfg.dt;
    let v0 = h.results[0].v_c.value();
    let n = h.states.len();
    let times: Vec<f64> = h
        .states
        .iter()
        .enumerate()
        .map(|(i, s)| {
            if i + 1 == n {
                window
            } else {
                (s.t.value() - t0) / span * window
            }
        })
        .collect();
    let values = h.results.iter().map(|r| r.v_c.value() / v0).collect();
    let profile = VcProfile::sampled(times, values)?;
    Ok((
        profile,
        Scaling {
            time_unit_gev_inv: span / window,
            volume_unit_gev_m3: v0,
        },
    ))
}

pub fn noise_config(cfg: &RunConfig) -> Result<(NoiseConfig, Option<Scaling>), CliError> {
    let (profile, scaling) = match cfg.vc_profile {
        ProfileSource::Constant => (VcProfile::Constant(cfg.vc_scaled), None),
        ProfileSource::FromEvolve => {
            let (p, s) = profile_from_evolve(cfg)?;
            (p, Some(s))
        }
    };
    Ok((NoiseConfig::new(cfg.n_traj, cfg.n_steps, cfg.dt, profile, cfg.seed), scaling))
}

pub fn cmd_mc_verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (noise, scaling) = noise_config(cfg)?;
    let stats = simulate_ensemble_with_threads(&noise, cfg.threads)?;
    let report = verify_energy_growth(&stats, &noise.profile, Z_THRESHOLD)?;

    let columns = ["t", "msv", "stderr", "analytic", "z", "msv_x", "msv_y", "msv_z"];
    let mut rec = OutputRecord::new("mc-verify", cfg, &columns);
    rec.rng_algorithm = Some(RNG_ALGORITHM_ID.to_string());
    rec.order_of_magnitude = vec!["acceleration_correlator"];
    for k in 0..stats.t.len() {
        let c = stats.component_msv[k];
        rec.push_row(vec![
            stats.t[k].into(),
            stats.msv[k].into(),
            stats.stderr[k].into(),
            report.analytic[k].into(),
            report.z[k].into(),
            c[0].into(),
            c[1].into(),
            c[2].into(),
        ]);
    }
    rec.push_meta("slope", report.slope);
    rec.push_meta("slope_stderr", report.slope_stderr);
    rec.push_meta("intercept", report.intercept);
    rec.push_meta("z_threshold", report.z_threshold);
    rec.push_meta("exceed_fraction", report.exceed_fraction);
    rec.push_meta("max_abs_z", report.max_abs_z);
    rec.push_meta("insufficient_statistics", report.insufficient_statistics);
    rec.push_meta("passed", report.passed);
    if let Some(s) = scaling {
        rec.push_meta("time_unit_gev_inv", s.time_unit_gev_inv);
        rec.push_meta("volume_unit_gev_m3", s.volume_unit_gev_m3);
        rec.push_meta("msv_unit", s.msv_unit());
    }

    let verdict = if report.passed { "PASS" } else { "FAIL" };
    let summary = format!(
        "{verdict}: slope {:.5} +/- {:.5}, {:.2}% of steps beyond |z| = {}, {} trajectories x {} steps",
        report.slope,
        report.slope_stderr,
        100.0 * report.exceed_fraction,
        Z_THRESHOLD,
        cfg.n_traj,
        cfg.n_steps
    );
    Ok(Outcome {
        record: rec,
        passed: report.passed,
        summary,
    })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let axis = cfg
        .axis
        .ok_or_else(|| CliError::config("sweep requires an axis (delta|mass|h0)"))?;
    let grid = cfg.grid.clone().unwrap_or_else(|| axis.default_grid());
    if grid.len() < 2 {
        return Err(CliError::config("sweep grid needs at least 2 points"));
    }
    if grid.iter().any(|v| !(*v > 0.0)) {
        return Err(CliError::config("sweep grid points must be positive"));
    }
    let mut sorted = grid.clone();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(CliError::config("sweep grid points must be distinct"));
    }

    let mut columns = vec!["axis_value", "delta", "h0_gev"];
    columns.extend(RESULT_COLUMNS);
    let mut rec = OutputRecord::new("sweep", cfg, &columns);
    rec.order_of_magnitude = vec!["t_dec"];
    let mut r_c = Vec::with_capacity(grid.len());
    let mut t_dec = Vec::with_capacity(grid.len());
    let mut v_c = Vec::with_capacity(grid.len());
    for &x in &grid {
        let mut point = cfg.clone();
        match axis {
            SweepAxis::Delta => point.delta = x,
            SweepAxis::Mass => point.mass_gev = x,
            SweepAxis::H0 => point.h0_gev = x,
        }
        let now = characteristic_length_now(&params(&point)?, mass(&point)?)?;
        let mut row = vec![x.into(), point.delta.into(), point.h0_gev.into()];
        row.extend(result_cells(&now.result)?);
        rec.push_row(row);
        r_c.push(now.result.r_c.value());
        t_dec.push(now.result.t_dec.value());
        v_c.push(now.result.v_c.value());
    }
    let slope_r = loglog_slope(&grid, &r_c);
    let slope_t = loglog_slope(&grid, &t_dec);
    let slope_v = loglog_slope(&grid, &v_c);
    rec.push_meta("axis", axis.to_string().as_str());
    rec.push_meta("loglog_slope_r_c", slope_r);
    rec.push_meta("loglog_slope_t_dec", slope_t);
    rec.push_meta("loglog_slope_v_c", slope_v);

    let summary = format!(
        "sweep over {axis} ({} points): d ln R_c / d ln {axis} = {slope_r:.12}, d ln t_dec / d ln {axis} = {slope_t:.12}",
        grid.len()
    );
    Ok(Outcome {
        record: rec,
        passed: true,
        summary,
    })
}

pub fn cmd_consistency(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = params(cfg)?;
    let m_ordinary = mass(cfg)?;
    let m_dark = Quantity::gev(cfg.m_dark_gev)?;
    let fraction = vacuum_budget_check(&p, m_ordinary, m_dark)?;
    let h = history(cfg, &p)?;
    let now = characteristic_length_now(&p, m_ordinary)?;

    let n_b = p.eps_b0().value() / m_ordinary.value();
    let n_d = p.eps_d0().value() / m_dark.value();
    let consistent = fraction < 1.0;

    let columns = [
        "m_ordinary_gev",
        "m_dark_gev",
        "n_ordinary_gev3",
        "n_dark_gev3",
        "v_c_gev_m3",
        "filling_fraction",
        "max_continuity_residual",
        "consistent",
    ];
    let mut rec = OutputRecord::new("consistency", cfg, &columns);
    rec.push_row(vec![
        m_ordinary.value().into(),
        m_dark.value().into(),
        n_b.into(),
        n_d.into(),
        now.result.v_c.value().into(),
        fraction.into(),
        h.max_continuity.into(),
        consistent.into(),
    ]);
    rec.push_meta("filling_fraction", fraction);
    rec.push_meta("max_continuity_residual", h.max_continuity);
    rec.push_meta("consistent", consistent);

    let verdict = if consistent { "CONSISTENT" } else { "INCONSISTENT" };
    let summary = format!(
        "{verdict}: characteristic volumes fill a fraction {fraction:.4e} of space; max continuity residual {:.2e}",
        h.max_continuity
    );
    Ok(Outcome {
        record: rec,
        passed: consistent,
        summary,
    })
}
