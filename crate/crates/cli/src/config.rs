//! Flat `key = value` run configuration with command-line overrides.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use vacrc::units::{HUBBLE_NOW_GEV, PROTON_MASS_GEV};

use crate::error::CliError;

/// Every accepted configuration key, in echo order.
pub const KEYS: &[&str] = &[
    "h0_gev",
    "omega_d0",
    "omega_b0",
    "omega_vac0",
    "delta",
    "mass_gev",
    "m_dark_gev",
    "a_start",
    "a_end",
    "n_samples",
    "n_traj",
    "n_steps",
    "dt",
    "seed",
    "vc_profile",
    "vc_scaled",
    "threads",
    "axis",
    "grid",
    "out_path",
    "format",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileSource {
    Constant,
    FromEvolve,
}

impl fmt::Display for ProfileSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProfileSource::Constant => "constant",
            ProfileSource::FromEvolve => "from-evolve",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Delta,
    Mass,
    H0,
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepAxis::Delta => "delta",
            SweepAxis::Mass => "mass",
            SweepAxis::H0 => "h0",
        })
    }
}

impl SweepAxis {
    pub fn default_grid(&self) -> Vec<f64> {
        match self {
            SweepAxis::Delta => vec![0.01, 0.03, 0.06, 0.1, 0.16],
            SweepAxis::Mass => vec![0.000511, 0.938, 10.0],
            SweepAxis::H0 => vec![0.5 * HUBBLE_NOW_GEV, HUBBLE_NOW_GEV, 2.0 * HUBBLE_NOW_GEV],
        }
    }
}

/// Fully resolved configuration for one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub h0_gev: f64,
    pub omega_d0: f64,
    pub omega_b0: f64,
    pub omega_vac0: f64,
    pub delta: f64,
    pub mass_gev: f64,
    pub m_dark_gev: f64,
    pub a_start: f64,
    pub a_end: f64,
    pub n_samples: usize,
    pub n_traj: usize,
    pub n_steps: usize,
    pub dt: f64,
    pub seed: u64,
    pub vc_profile: ProfileSource,
    pub vc_scaled: f64,
    /// Worker threads for the Monte Carlo; 0 picks the global pool. Does not
    /// affect results.
    pub threads: usize,
    pub axis: Option<SweepAxis>,
    pub grid: Option<Vec<f64>>,
    pub out_path: Option<String>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            h0_gev: HUBBLE_NOW_GEV,
            omega_d0: 0.27,
            omega_b0: 0.03,
            omega_vac0: 0.70,
            delta: 0.06,
            mass_gev: PROTON_MASS_GEV,
            m_dark_gev: PROTON_MASS_GEV,
            a_start: 0.5,
            a_end: 2.0,
            n_samples: 201,
            n_traj: 10_000,
            n_steps: 1_000,
            dt: 0.01,
            seed: 1,
            vc_profile: ProfileSource::Constant,
            vc_scaled: 1.0,
            threads: 0,
            axis: None,
            grid: None,
            out_path: None,
            format: Format::Csv,
        }
    }
}

/// Parses a config file body into raw key/value pairs.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::config(format!("line {line_no}: expected `key = value`, got `{line}`")));
        };
        let key = key.trim();
        let value = value.trim();
        if !KEYS.contains(&key) {
            return Err(CliError::config(format!("line {line_no}: unknown key `{key}`")));
        }
        if value.is_empty() {
            return Err(CliError::config(format!("line {line_no}: empty value for `{key}`")));
        }
        if out.insert(key.to_string(), value.to_string()).is_some() {
            return Err(CliError::config(format!("line {line_no}: duplicate key `{key}`")));
        }
    }
    Ok(out)
}

pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_text(&text)
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::config(format!("invalid value `{value}` for `{key}`")))
}

fn parse_f64(key: &str, value: &str) -> Result<f64, CliError> {
    let v: f64 = parse(key, value)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::config(format!("non-finite value `{value}` for `{key}`")))
    }
}

impl RunConfig {
    /// Resolves defaults, then file values, then flag overrides.
    pub fn resolve(file: &BTreeMap<String, String>, flags: &BTreeMap<String, String>) -> Result<Self, CliError> {
        let mut merged = file.clone();
        for (k, v) in flags {
            if !KEYS.contains(&k.as_str()) {
                return Err(CliError::config(format!("unknown key `{k}`")));
            }
            merged.insert(k.clone(), v.clone());
        }
        let mut cfg = RunConfig::default();
        for (key, value) in &merged {
            let v = value.as_str();
            match key.as_str() {
                "h0_gev" => cfg.h0_gev = parse_f64(key, v)?,
                "omega_d0" => cfg.omega_d0 = parse_f64(key, v)?,
                "omega_b0" => cfg.omega_b0 = parse_f64(key, v)?,
                "omega_vac0" => cfg.omega_vac0 = parse_f64(key, v)?,
                "delta" => cfg.delta = parse_f64(key, v)?,
                "mass_gev" => cfg.mass_gev = parse_f64(key, v)?,
                "m_dark_gev" => cfg.m_dark_gev = parse_f64(key, v)?,
                "a_start" => cfg.a_start = parse_f64(key, v)?,
                "a_end" => cfg.a_end = parse_f64(key, v)?,
                "n_samples" => cfg.n_samples = parse(key, v)?,
                "n_traj" => cfg.n_traj = parse(key, v)?,
                "n_steps" => cfg.n_steps = parse(key, v)?,
                "dt" => cfg.dt = parse_f64(key, v)?,
                "seed" => cfg.seed = parse(key, v)?,
                "vc_profile" => {
                    cfg.vc_profile = match v {
                        "constant" => ProfileSource::Constant,
                        "from-evolve" => ProfileSource::FromEvolve,
                        _ => return Err(CliError::config(format!("vc_profile must be constant|from-evolve, got `{v}`"))),
                    }
                }
                "vc_scaled" => cfg.vc_scaled = parse_f64(key, v)?,
                "threads" => cfg.threads = parse(key, v)?,
                "axis" => {
                    cfg.axis = Some(match v {
                        "delta" => SweepAxis::Delta,
                        "mass" => SweepAxis::Mass,
                        "h0" => SweepAxis::H0,
                        _ => return Err(CliError::config(format!("axis must be delta|mass|h0, got `{v}`"))),
                    })
                }
                "grid" => {
                    cfg.grid = Some(
                        v.split(',')
                            .map(|s| parse_f64(key, s.trim()))
                            .collect::<Result<Vec<_>, _>>()?,
                    )
                }
                "out_path" => cfg.out_path = Some(v.to_string()),
                "format" => {
                    cfg.format = match v {
                        "csv" => Format::Csv,
                        "json" => Format::Json,
                        _ => return Err(CliError::config(format!("format must be csv|json, got `{v}`"))),
                    }
                }
                _ => unreachable!("keys checked above"),
            }
        }
        Ok(cfg)
    }

    /// Resolved configuration as `(key, value)` text pairs in [`KEYS`] order.
    /// Feeding these lines back as a config file reproduces the run.
    /// Floats use 17 significant digits.
    pub fn echo(&self) -> Vec<(&'static str, String)> {
        let f = |v: f64| format!("{v:.16e}");
        let mut out = vec![
            ("h0_gev", f(self.h0_gev)),
            ("omega_d0", f(self.omega_d0)),
            ("omega_b0", f(self.omega_b0)),
            ("omega_vac0", f(self.omega_vac0)),
            ("delta", f(self.delta)),
            ("mass_gev", f(self.mass_gev)),
            ("m_dark_gev", f(self.m_dark_gev)),
            ("a_start", f(self.a_start)),
            ("a_end", f(self.a_end)),
            ("n_samples", self.n_samples.to_string()),
            ("n_traj", self.n_traj.to_string()),
            ("n_steps", self.n_steps.to_string()),
            ("dt", f(self.dt)),
            ("seed", self.seed.to_string()),
            ("vc_profile", self.vc_profile.to_string()),
            ("vc_scaled", f(self.vc_scaled)),
            ("threads", self.threads.to_string()),
        ];
        if let Some(axis) = self.axis {
            out.push(("axis", axis.to_string()));
        }
        if let Some(grid) = &self.grid {
            out.push(("grid", grid.iter().map(|v| f(*v)).collect::<Vec<_>>().join(",")));
        }
        out.push(("format", self.format.to_string()));
        out
    }
}
