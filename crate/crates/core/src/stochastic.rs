//! Monte Carlo check of the energy gain law for a particle driven by a
//! delta-correlated stochastic acceleration.
//!
//! With `<g(t') g(t'')> = (G/V_c) δ(t' - t'')` and `v(t_i) = 0`, the mean
//! square velocity grows as `<v²>(t) = G ∫ dt'/V_c(t')`. The simulator works
//! in scaled units with `G = 1` and `V_c` of order one; the equation is
//! homogeneous, so the caller can rescale results exactly.
//!
//! # Random streams
//!
//! Trajectory `i` draws from a ChaCha8 generator seeded with
//! `seed_from_u64(master_seed)` and switched to stream `i`. Each step draws
//! three standard normals (x, y, z) in that order. Trajectories are grouped
//! into fixed blocks of [`BLOCK_SIZE`] by index and the block sums are
//! combined in index order, so the output does not depend on how many
//! worker threads ran the blocks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Identifier of the random stream derivation, serialised into outputs.
pub const RNG_ALGORITHM_ID: &str =
    "chacha8/seed_from_u64(master_seed)/stream=trajectory_index/standard_normal(rand_distr-0.4)/xyz-per-step/v1";

/// Default cap on `n_traj * n_steps`.
pub const DEFAULT_MAX_KICKS: u128 = 1_000_000_000;

/// Trajectories per deterministic reduction block.
pub const BLOCK_SIZE: usize = 256;

/// Blocks processed per parallel round; bounds peak memory.
const BLOCKS_PER_ROUND: usize = 64;

/// Scaled characteristic volume as a function of scaled time since `t_i = 0`.
#[derive(Debug, Clone, PartialEq)]
pub enum VcProfile {
    Constant(f64),
    /// Piecewise-linear samples; `times` starts at 0 and strictly increases.
    Sampled { times: Vec<f64>, values: Vec<f64> },
}

impl VcProfile {
    pub fn sampled(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let p = Self::Sampled { times, values };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Constant(v) => {
                if !(*v > 0.0 && v.is_finite()) {
                    return Err(Error::Config(format!("constant V_c must be positive and finite, got {v}")));
                }
            }
            Self::Sampled { times, values } => {
                if times.len() != values.len() || times.len() < 2 {
                    return Err(Error::Config(format!(
                        "sampled V_c profile needs matching time/value arrays of length >= 2, got {} and {}",
                        times.len(),
                        values.len()
                    )));
                }
                if times[0] != 0.0 {
                    return Err(Error::Config(format!("sampled V_c profile must start at t = 0, got {}", times[0])));
                }
                if times.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
                    return Err(Error::Config("sampled V_c profile times must strictly increase".into()));
                }
                if values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                    return Err(Error::Config("sampled V_c profile values must be positive and finite".into()));
                }
            }
        }
        Ok(())
    }

    /// Last time covered by the profile.
    pub fn end(&self) -> f64 {
        match self {
            Self::Constant(_) => f64::INFINITY,
            Self::Sampled { times, .. } => *times.last().expect("validated"),
        }
    }

    pub fn value_at(&self, t: f64) -> Result<f64> {
        self.check_domain(t)?;
        Ok(match self {
            Self::Constant(v) => *v,
            Self::Sampled { times, values } => {
                let (j, frac) = locate(times, t);
                if frac == 0.0 {
                    values[j]
                } else {
                    values[j] + frac * (values[j + 1] - values[j])
                }
            }
        })
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        let end = self.end();
        // admit endpoint overshoot from accumulated k*dt rounding
        if t >= 0.0 && t <= end * (1.0 + 1e-12) {
            Ok(())
        } else {
            Err(Error::Domain(format!("t = {t} outside the profile domain [0, {end}]")))
        }
    }
}

/// Interval index and fractional offset of `t` on a sorted grid.
fn locate(times: &[f64], t: f64) -> (usize, f64) {
    let last = times.len() - 1;
    if t >= times[last] {
        return (last, 0.0);
    }
    let j = times.partition_point(|&x| x <= t) - 1;
    (j, (t - times[j]) / (times[j + 1] - times[j]))
}

/// Analytic mean square velocity `∫_0^t dt'/V_c(t')` in scaled units.
/// Exact for constant profiles; trapezoidal rule on the profile nodes
/// otherwise.
pub fn analytic_msv(t: f64, profile: &VcProfile) -> Result<f64> {
    profile.check_domain(t)?;
    match profile {
        VcProfile::Constant(v) => Ok(t / v),
        VcProfile::Sampled { times, values } => {
            let mut acc = 0.0;
            let (j, _) = locate(times, t);
            for k in 0..j {
                acc += 0.5 * (times[k + 1] - times[k]) * (1.0 / values[k] + 1.0 / values[k + 1]);
            }
            let tail = t.min(times[times.len() - 1]) - times[j];
            if tail > 0.0 {
                let v_t = profile.value_at(t)?;
                acc += 0.5 * tail * (1.0 / values[j] + 1.0 / v_t);
            }
            Ok(acc)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoiseConfig {
    pub n_traj: usize,
    pub n_steps: usize,
    pub dt: f64,
    pub profile: VcProfile,
    pub master_seed: u64,
    pub max_kicks: u128,
}

impl NoiseConfig {
    pub fn new(n_traj: usize, n_steps: usize, dt: f64, profile: VcProfile, master_seed: u64) -> Self {
        Self {
            n_traj,
            n_steps,
            dt,
            profile,
            master_seed,
            max_kicks: DEFAULT_MAX_KICKS,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_traj == 0 || self.n_steps == 0 {
            return Err(Error::Config("n_traj and n_steps must be at least 1".into()));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        self.profile.validate()?;
        let requested = self.n_traj as u128 * self.n_steps as u128;
        if requested > self.max_kicks {
            return Err(Error::ResourceLimit {
                requested,
                cap: self.max_kicks,
            });
        }
        let window = self.dt * self.n_steps as f64;
        if window > self.profile.end() * (1.0 + 1e-12) {
            return Err(Error::Config(format!(
                "simulation window {window} exceeds the V_c profile domain {}",
                self.profile.end()
            )));
        }
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        (0..=self.n_steps).map(|k| k as f64 * self.dt).collect()
    }
}

/// Least-squares weights `w_k` such that the fitted slope of `y` against
/// `x` (with intercept) is `Σ w_k y_k`.
fn slope_weights(x: &[f64]) -> Vec<f64> {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
    if sxx == 0.0 {
        return vec![0.0; x.len()];
    }
    x.iter().map(|v| (v - mean) / sxx).collect()
}

/// Per-step ensemble statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    pub n_traj: usize,
    pub t: Vec<f64>,
    /// Ensemble mean of `|v|²`.
    pub msv: Vec<f64>,
    /// Standard error of `msv`.
    pub stderr: Vec<f64>,
    /// Per-component mean of `v_i²`.
    pub component_msv: Vec<[f64; 3]>,
    pub component_stderr: Vec<[f64; 3]>,
    /// Standard error of the least-squares slope of `msv` against the
    /// analytic prediction, from the spread of per-trajectory slopes.
    pub slope_stderr: f64,
}

#[derive(Clone)]
struct BlockSums {
    v2: Vec<f64>,
    v4: Vec<f64>,
    comp: Vec<[f64; 3]>,
    comp2: Vec<[f64; 3]>,
    slope: f64,
    slope2: f64,
}

impl BlockSums {
    fn zeros(len: usize) -> Self {
        Self {
            v2: vec![0.0; len],
            v4: vec![0.0; len],
            comp: vec![[0.0; 3]; len],
            comp2: vec![[0.0; 3]; len],
            slope: 0.0,
            slope2: 0.0,
        }
    }

    fn absorb(&mut self, other: &BlockSums) {
        for k in 0..self.v2.len() {
            self.v2[k] += other.v2[k];
            self.v4[k] += other.v4[k];
            for c in 0..3 {
                self.comp[k][c] += other.comp[k][c];
                self.comp2[k][c] += other.comp2[k][c];
            }
        }
        self.slope += other.slope;
        self.slope2 += other.slope2;
    }
}

fn run_block(cfg: &NoiseConfig, sigmas: &[f64], weights: &[f64], range: std::ops::Range<usize>) -> BlockSums {
    let len = cfg.n_steps + 1;
    let mut sums = BlockSums::zeros(len);
    for traj in range {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.master_seed);
        rng.set_stream(traj as u64);
        let mut v = [0.0f64; 3];
        let mut projection = 0.0;
        for k in 1..len {
            let sigma = sigmas[k - 1];
            for comp in v.iter_mut() {
                let z: f64 = StandardNormal.sample(&mut rng);
                *comp += sigma * z;
            }
            let sq = [v[0] * v[0], v[1] * v[1], v[2] * v[2]];
            let v2 = sq[0] + sq[1] + sq[2];
            sums.v2[k] += v2;
            sums.v4[k] += v2 * v2;
            for c in 0..3 {
                sums.comp[k][c] += sq[c];
                sums.comp2[k][c] += sq[c] * sq[c];
            }
            projection += weights[k] * v2;
        }
        sums.slope += projection;
        sums.slope2 += projection * projection;
    }
    sums
}

fn mean_and_stderr(sum: f64, sum_sq: f64, n: usize) -> (f64, f64) {
    let nf = n as f64;
    let mean = sum / nf;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = ((sum_sq - sum * mean) / (nf - 1.0)).max(0.0);
    (mean, (var / nf).sqrt())
}

/// Simulates the ensemble on the global thread pool.
pub fn simulate_ensemble(cfg: &NoiseConfig) -> Result<EnsembleStats> {
    simulate_ensemble_with_threads(cfg, 0)
}

/// Simulates the ensemble on a dedicated pool of `threads` workers
/// (`0` uses the global pool). The result is bit-identical for any width.
pub fn simulate_ensemble_with_threads(cfg: &NoiseConfig, threads: usize) -> Result<EnsembleStats> {
    cfg.validate()?;
    let times = cfg.times();
    let analytic = times
        .iter()
        .map(|&t| analytic_msv(t, &cfg.profile))
        .collect::<Result<Vec<_>>>()?;
    // Per-component kick width over each step; the total kick variance over
    // the step equals the increment of the analytic integral, which is
    // `dt/V_c` for a constant profile.
    let sigmas: Vec<f64> = analytic.windows(2).map(|w| ((w[1] - w[0]).max(0.0) / 3.0).sqrt()).collect();
    let weights = slope_weights(&analytic);

    let n_blocks = cfg.n_traj.div_ceil(BLOCK_SIZE);
    let block_range = |b: usize| b * BLOCK_SIZE..((b + 1) * BLOCK_SIZE).min(cfg.n_traj);

    let mut total = BlockSums::zeros(cfg.n_steps + 1);
    let mut accumulate = || {
        for round in (0..n_blocks).step_by(BLOCKS_PER_ROUND) {
            let end = (round + BLOCKS_PER_ROUND).min(n_blocks);
            let blocks: Vec<BlockSums> = (round..end)
                .into_par_iter()
                .map(|b| run_block(cfg, &sigmas, &weights, block_range(b)))
                .collect();
            for b in &blocks {
                total.absorb(b);
            }
        }
    };
    if threads == 0 {
        accumulate();
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        pool.install(accumulate);
    }

    let n = cfg.n_traj;
    let mut msv = Vec::with_capacity(times.len());
    let mut stderr = Vec::with_capacity(times.len());
    let mut component_msv = Vec::with_capacity(times.len());
    let mut component_stderr = Vec::with_capacity(times.len());
    for k in 0..times.len() {
        let (m, se) = mean_and_stderr(total.v2[k], total.v4[k], n);
        msv.push(m);
        stderr.push(se);
        let mut cm = [0.0; 3];
        let mut cs = [0.0; 3];
        for c in 0..3 {
            (cm[c], cs[c]) = mean_and_stderr(total.comp[k][c], total.comp2[k][c], n);
        }
        component_msv.push(cm);
        component_stderr.push(cs);
    }
    let (_, slope_stderr) = mean_and_stderr(total.slope, total.slope2, n);

    Ok(EnsembleStats {
        n_traj: n,
        t: times,
        msv,
        stderr,
        component_msv,
        component_stderr,
        slope_stderr,
    })
}

/// Outcome of comparing a simulated ensemble against the analytic law.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub analytic: Vec<f64>,
    /// Per-step z-scores; `None` where the standard error vanishes.
    pub z: Vec<Option<f64>>,
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub z_threshold: f64,
    /// Fraction of checked steps with `|z|` above the threshold.
    pub exceed_fraction: f64,
    pub max_abs_z: f64,
    pub insufficient_statistics: bool,
    pub passed: bool,
}

/// Maximum fraction of steps allowed above the z threshold.
pub const MAX_EXCEED_FRACTION: f64 = 0.01;

/// Slope acceptance band in units of the slope standard error.
pub const SLOPE_SIGMAS: f64 = 3.0;

pub fn verify_energy_growth(stats: &EnsembleStats, profile: &VcProfile, z_threshold: f64) -> Result<VerificationReport> {
    let len = stats.t.len();
    if len < 2 || stats.msv.len() != len || stats.stderr.len() != len {
        return Err(Error::InternalConsistency("ensemble statistics arrays are inconsistent".into()));
    }
    if !(z_threshold > 0.0) {
        return Err(Error::Config(format!("z threshold must be positive, got {z_threshold}")));
    }
    let analytic = stats
        .t
        .iter()
        .map(|&t| analytic_msv(t, profile))
        .collect::<Result<Vec<_>>>()?;

    let insufficient = stats.n_traj < 2;
    if !insufficient && stats.stderr[1..].iter().all(|&s| s == 0.0) {
        return Err(Error::InternalConsistency(format!(
            "all standard errors vanish with {} trajectories",
            stats.n_traj
        )));
    }

    let z: Vec<Option<f64>> = stats
        .msv
        .iter()
        .zip(&analytic)
        .zip(&stats.stderr)
        .map(|((m, a), s)| (*s > 0.0).then(|| (m - a) / s))
        .collect();
    let checked: Vec<f64> = z.iter().skip(1).flatten().copied().collect();
    let exceed = checked.iter().filter(|v| v.abs() > z_threshold).count();
    let exceed_fraction = if checked.is_empty() {
        0.0
    } else {
        exceed as f64 / checked.len() as f64
    };
    let max_abs_z = checked.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));

    let weights = slope_weights(&analytic);
    let slope: f64 = weights.iter().zip(&stats.msv).map(|(w, y)| w * y).sum();
    let nf = len as f64;
    let x_mean = analytic.iter().sum::<f64>() / nf;
    let y_mean = stats.msv.iter().sum::<f64>() / nf;
    let intercept = y_mean - slope * x_mean;

    let slope_ok = (slope - 1.0).abs() < SLOPE_SIGMAS * stats.slope_stderr;
    let passed = !insufficient && slope_ok && exceed_fraction < MAX_EXCEED_FRACTION;

    Ok(VerificationReport {
        analytic,
        z,
        slope,
        intercept,
        slope_stderr: stats.slope_stderr,
        z_threshold,
        exceed_fraction,
        max_abs_z,
        insufficient_statistics: insufficient,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> NoiseConfig {
        NoiseConfig::new(600, 50, 0.1, VcProfile::Constant(1.0), seed)
    }

    #[test]
    fn analytic_constant_profile() {
        let p = VcProfile::Constant(1.0);
        assert_eq!(analytic_msv(10.0, &p).unwrap(), 10.0);
        assert_eq!(analytic_msv(0.0, &p).unwrap(), 0.0);
        assert!(analytic_msv(-1.0, &p).is_err());
    }

    #[test]
    fn analytic_linear_profile_matches_log() {
        let n = 10_001;
        let times: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let values: Vec<f64> = times.iter().map(|t| 1.0 + t).collect();
        let p = VcProfile::sampled(times, values).unwrap();
        // ∫_0^1 dt/(1+t) = ln 2, trapezoid error ~ h²/12 · 3/4
        assert!((analytic_msv(1.0, &p).unwrap() - 2f64.ln()).abs() < 1e-8);
        // between nodes: ∫_0^0.5 = ln 1.5
        assert!((analytic_msv(0.50005, &p).unwrap() - 1.50005f64.ln()).abs() < 1e-8);
        assert!(analytic_msv(1.5, &p).is_err());
    }

    #[test]
    fn profile_validation() {
        assert!(VcProfile::Constant(0.0).validate().is_err());
        assert!(VcProfile::Constant(f64::INFINITY).validate().is_err());
        assert!(VcProfile::sampled(vec![0.0], vec![1.0]).is_err());
        assert!(VcProfile::sampled(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(VcProfile::sampled(vec![0.5, 1.0], vec![1.0, 1.0]).is_err());
        assert!(VcProfile::sampled(vec![0.0, 1.0], vec![1.0, -1.0]).is_err());
    }

    #[test]
    fn config_validation() {
        let mut cfg = small(1);
        cfg.n_traj = 0;
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));

        let mut cfg = small(1);
        cfg.max_kicks = 100;
        assert!(matches!(cfg.validate(), Err(Error::ResourceLimit { requested: 30_000, cap: 100 })));

        let mut cfg = small(1);
        cfg.profile = VcProfile::sampled(vec![0.0, 1.0], vec![1.0, 1.0]).unwrap();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn starts_at_rest() {
        let stats = simulate_ensemble(&small(3)).unwrap();
        assert_eq!(stats.msv[0], 0.0);
        assert_eq!(stats.stderr[0], 0.0);
        assert!(stats.msv.iter().all(|&m| m >= 0.0));
        assert!(stats.stderr.iter().all(|&s| s >= 0.0));
        assert_eq!(stats.t.len(), 51);
    }

    #[test]
    fn deterministic_across_widths() {
        let cfg = NoiseConfig::new(700, 20, 0.1, VcProfile::Constant(1.0), 42);
        let a = simulate_ensemble_with_threads(&cfg, 1).unwrap();
        let b = simulate_ensemble_with_threads(&cfg, 3).unwrap();
        assert_eq!(a, b);
        let c = simulate_ensemble_with_threads(&NoiseConfig { master_seed: 43, ..cfg }, 1).unwrap();
        assert_ne!(a.msv, c.msv);
    }

    #[test]
    fn zero_noise_limit() {
        let cfg = NoiseConfig::new(100, 100, 0.1, VcProfile::Constant(1e300), 9);
        let stats = simulate_ensemble(&cfg).unwrap();
        assert!(stats.msv.iter().all(|&m| m <= 10.0 * f64::EPSILON));
    }

    #[test]
    fn tampered_stats_fail() {
        let cfg = small(5);
        let mut stats = simulate_ensemble(&cfg).unwrap();
        let honest = verify_energy_growth(&stats, &cfg.profile, 3.0).unwrap();
        assert!(honest.passed, "{honest:?}");
        stats.msv.iter_mut().for_each(|m| *m *= 2.0);
        let report = verify_energy_growth(&stats, &cfg.profile, 3.0).unwrap();
        assert!(!report.passed);
        assert!((report.slope - 2.0 * honest.slope).abs() < 1e-12);
    }

    #[test]
    fn single_trajectory_is_flagged() {
        let cfg = NoiseConfig::new(1, 20, 0.1, VcProfile::Constant(1.0), 5);
        let stats = simulate_ensemble(&cfg).unwrap();
        let report = verify_energy_growth(&stats, &cfg.profile, 3.0).unwrap();
        assert!(report.insufficient_statistics);
        assert!(!report.passed);
    }

    #[test]
    fn degenerate_stderr_is_an_error() {
        let cfg = small(5);
        let mut stats = simulate_ensemble(&cfg).unwrap();
        stats.stderr.iter_mut().for_each(|s| *s = 0.0);
        assert!(matches!(
            verify_energy_growth(&stats, &cfg.profile, 3.0),
            Err(Error::InternalConsistency(_))
        ));
    }

    #[test]
    fn slope_weights_recover_slope() {
        let x = [0.0, 1.0, 2.0, 4.0];
        let w = slope_weights(&x);
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v + 1.0).collect();
        let slope: f64 = w.iter().zip(&y).map(|(a, b)| a * b).sum();
        assert!((slope - 3.0).abs() < 1e-14);
    }
}
