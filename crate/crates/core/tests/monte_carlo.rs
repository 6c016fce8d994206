use vacrc::cosmology::{evolve_background, CosmoParams};
use vacrc::reduction::rc_history;
use vacrc::stochastic::{analytic_msv, simulate_ensemble, verify_energy_growth, NoiseConfig, VcProfile};
use vacrc::units::{Quantity, PROTON_MASS_GEV};

#[test]
fn constant_profile_growth() {
    let cfg = NoiseConfig::new(10_000, 1_000, 1e-2, VcProfile::Constant(1.0), 1);
    let stats = simulate_ensemble(&cfg).unwrap();
    let end = *stats.msv.last().unwrap();
    assert!((end - 10.0).abs() < 0.5, "msv(10) = {end}");
    let report = verify_energy_growth(&stats, &cfg.profile, 3.0).unwrap();
    assert!(report.passed, "{:?}", (report.slope, report.slope_stderr, report.exceed_fraction));
}

#[test]
fn doubled_volume_halves_growth() {
    let base = NoiseConfig::new(4_000, 200, 0.05, VcProfile::Constant(1.0), 2);
    let doubled = NoiseConfig {
        profile: VcProfile::Constant(2.0),
        ..base.clone()
    };
    let a = simulate_ensemble(&base).unwrap();
    let b = simulate_ensemble(&doubled).unwrap();
    // Same seed: identical normals scaled by 1/sqrt(2), so the halving is exact up to rounding.
    let k = a.msv.len() - 1;
    assert!((b.msv[k] / a.msv[k] - 0.5).abs() < 1e-12);

    // And with an independent seed it holds statistically.
    let c = simulate_ensemble(&NoiseConfig {
        master_seed: 77,
        ..doubled
    })
    .unwrap();
    let expected = analytic_msv(base.dt * base.n_steps as f64, &VcProfile::Constant(2.0)).unwrap();
    assert!((c.msv[k] - expected).abs() < 3.0 * c.stderr[k]);
}

#[test]
fn isotropic_components() {
    let cfg = NoiseConfig::new(10_000, 100, 0.1, VcProfile::Constant(1.0), 3);
    let stats = simulate_ensemble(&cfg).unwrap();
    let k = stats.t.len() - 1;
    for c in 0..3 {
        let diff = stats.component_msv[k][c] - stats.msv[k] / 3.0;
        assert!(diff.abs() < 3.0 * stats.component_stderr[k][c], "component {c}: {diff}");
    }
}

#[test]
fn intercept_consistent_with_zero() {
    // Regress msv on t for independent ensembles; the spread of fitted
    // intercepts gives the standard error of their mean.
    let runs = 20;
    let intercepts: Vec<f64> = (0..runs)
        .map(|seed| {
            let cfg = NoiseConfig::new(1_000, 200, 0.05, VcProfile::Constant(1.0), 100 + seed);
            let s = simulate_ensemble(&cfg).unwrap();
            let n = s.t.len() as f64;
            let mt = s.t.iter().sum::<f64>() / n;
            let mm = s.msv.iter().sum::<f64>() / n;
            let sxy: f64 = s.t.iter().zip(&s.msv).map(|(t, m)| (t - mt) * (m - mm)).sum();
            let sxx: f64 = s.t.iter().map(|t| (t - mt).powi(2)).sum();
            mm - sxy / sxx * mt
        })
        .collect();
    let mean = intercepts.iter().sum::<f64>() / runs as f64;
    let var = intercepts.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (runs as f64 - 1.0);
    let se = (var / runs as f64).sqrt();
    assert!(mean.abs() < 3.0 * se, "intercept {mean} ± {se}");
}

#[test]
fn cosmological_profile_passes() {
    let p = CosmoParams::default();
    let m = Quantity::gev(PROTON_MASS_GEV).unwrap();
    let traj = evolve_background(&p, 0.5, 2.0, 201).unwrap();
    let hist = rc_history(&traj, &p, m).unwrap();
    let window = 10.0;
    let t0 = hist[0].0.value();
    let span = hist.last().unwrap().0.value() - t0;
    let v0 = hist[0].1.v_c.value();
    let mut times: Vec<f64> = hist.iter().map(|(t, _)| (t.value() - t0) / span * window).collect();
    *times.last_mut().unwrap() = window;
    let values = hist.iter().map(|(_, r)| r.v_c.value() / v0).collect();
    let profile = VcProfile::sampled(times, values).unwrap();

    let cfg = NoiseConfig::new(10_000, 1_000, 1e-2, profile.clone(), 4);
    let stats = simulate_ensemble(&cfg).unwrap();
    let report = verify_energy_growth(&stats, &profile, 3.0).unwrap();
    assert!(report.passed, "{:?}", (report.slope, report.slope_stderr, report.exceed_fraction));
    // growth is sub-linear because V_c increases along the window
    assert!(analytic_msv(window, &profile).unwrap() < window);
}
