//! Parameter sweeps over `(k, γ, ρ_c)` grids and mass-radius curves.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eos::{parse_number, PolytropicEos};
use crate::error::{Error, Result};
use crate::structure::{integrate_tov, newtonian_star, IntegrationOptions, StellarProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Log,
}

/// `count` values from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

impl Axis {
    pub fn new(min: f64, max: f64, count: usize, spacing: Spacing) -> Result<Self> {
        let axis = Self { min, max, count, spacing };
        axis.validate("axis")?;
        Ok(axis)
    }

    pub fn single(value: f64) -> Self {
        Self { min: value, max: value, count: 1, spacing: Spacing::Linear }
    }

    fn validate(&self, name: &str) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(format!("{name}: {m}")));
        if self.count == 0 {
            return bad("count must be at least 1".into());
        }
        if !(self.min.is_finite() && self.max.is_finite()) || self.min > self.max {
            return bad(format!("need finite min <= max, got {} > {}", self.min, self.max));
        }
        if self.spacing == Spacing::Log && self.min <= 0.0 {
            return bad(format!("log spacing needs min > 0, got {}", self.min));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let t = i as f64 / last;
                if i == 0 {
                    return self.min;
                } else if i + 1 == self.count {
                    return self.max;
                }
                match self.spacing {
                    Spacing::Linear => self.min + (self.max - self.min) * t,
                    Spacing::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * t).exp(),
                }
            })
            .map(|v| v.clamp(self.min, self.max))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Tov,
    Newtonian,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tov" => Ok(Mode::Tov),
            "newtonian" => Ok(Mode::Newtonian),
            other => Err(Error::InvalidParameter(format!("mode must be tov or newtonian, got `{other}`"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Tov => "tov",
            Mode::Newtonian => "newtonian",
        })
    }
}

/// Integrates one star in the given mode.
pub fn solve_star(eos: PolytropicEos, rho_c: f64, mode: Mode, opts: &IntegrationOptions) -> Result<StellarProfile> {
    match mode {
        Mode::Tov => integrate_tov(eos, rho_c, opts),
        Mode::Newtonian => newtonian_star(eos, rho_c, opts),
    }
}

/// A sweep over `k × γ × ρ_c` with `k0 = 0`.
///
/// Config format, one `key = value` per line (`#` starts a comment):
///
/// ```text
/// k     = 100 100 1 linear
/// gamma = 1.5 2.5 5 linear
/// rho_c = 1e-4 1e-2 20 log
/// mode  = tov
/// rtol  = 1e-10
/// ```
///
/// An axis given as a single number is a one-point axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSpec {
    pub k: Axis,
    pub gamma: Axis,
    pub rho_c: Axis,
    pub mode: Mode,
    pub rtol: f64,
}

impl ScanSpec {
    pub fn new(k: Axis, gamma: Axis, rho_c: Axis, mode: Mode) -> Result<Self> {
        let spec = Self { k, gamma, rho_c, mode, rtol: IntegrationOptions::default().rtol };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        self.k.validate("k")?;
        self.gamma.validate("gamma")?;
        self.rho_c.validate("rho_c")?;
        if self.k.min <= 0.0 {
            return Err(Error::InvalidParameter(format!("k must be positive, got min {}", self.k.min)));
        }
        if self.gamma.min <= 1.0 {
            return Err(Error::InvalidParameter(format!("gamma must exceed 1, got min {}", self.gamma.min)));
        }
        if self.rho_c.min <= 0.0 {
            return Err(Error::InvalidParameter(format!("rho_c must be positive, got min {}", self.rho_c.min)));
        }
        if !(self.rtol > 0.0 && self.rtol < 1.0) {
            return Err(Error::InvalidParameter(format!("rtol must lie in (0, 1), got {}", self.rtol)));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.k.count * self.gamma.count * self.rho_c.count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn parse_axis(value: &str, row: usize) -> Result<Axis> {
    let fields: Vec<&str> = value.split_whitespace().collect();
    let num = |s: &str| parse_number(s).map_err(|message| Error::Parse { row, message });
    match fields.as_slice() {
        [v] => Ok(Axis::single(num(v)?)),
        [lo, hi, count, rest @ ..] if rest.len() <= 1 => {
            let count = count.parse::<usize>().map_err(|_| Error::Parse {
                row,
                message: format!("count `{count}` is not a nonnegative integer"),
            })?;
            let spacing = match rest.first().map(|s| s.to_ascii_lowercase()) {
                None => Spacing::Linear,
                Some(s) if s == "linear" || s == "lin" => Spacing::Linear,
                Some(s) if s == "log" => Spacing::Log,
                Some(s) => {
                    return Err(Error::Parse {
                        row,
                        message: format!("spacing must be linear or log, got `{s}`"),
                    })
                }
            };
            Ok(Axis { min: num(lo)?, max: num(hi)?, count, spacing })
        }
        _ => Err(Error::Parse {
            row,
            message: format!("expected `min max count [linear|log]`, got `{value}`"),
        }),
    }
}

impl FromStr for ScanSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (mut k, mut gamma, mut rho_c) = (None, None, None);
        let mut mode = Mode::Tov;
        let mut rtol = IntegrationOptions::default().rtol;
        for (idx, raw) in s.lines().enumerate() {
            let row = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                row,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            let value = value.trim();
            match key.trim() {
                "k" | "k_range" => k = Some(parse_axis(value, row)?),
                "gamma" | "gamma_range" => gamma = Some(parse_axis(value, row)?),
                "rho_c" | "rho_c_range" => rho_c = Some(parse_axis(value, row)?),
                "mode" => mode = value.parse()?,
                "rtol" => rtol = parse_number(value).map_err(|message| Error::Parse { row, message })?,
                other => {
                    return Err(Error::Parse {
                        row,
                        message: format!("unknown key `{other}`"),
                    })
                }
            }
        }
        let missing = |name: &str| Error::InvalidParameter(format!("scan config is missing `{name}`"));
        let spec = ScanSpec {
            k: k.ok_or_else(|| missing("k"))?,
            gamma: gamma.ok_or_else(|| missing("gamma"))?,
            rho_c: rho_c.ok_or_else(|| missing("rho_c"))?,
            mode,
            rtol,
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointStatus {
    Ok,
    HorizonApproach,
    NoFiniteRadius,
    NonConvergence,
}

impl fmt::Display for PointStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PointStatus::Ok => "ok",
            PointStatus::HorizonApproach => "horizon-approach",
            PointStatus::NoFiniteRadius => "no-finite-radius",
            PointStatus::NonConvergence => "non-convergence",
        })
    }
}

/// One grid cell. Mass and radius are geometrized (km) and absent when the
/// integration failed; `causal` is `k γ ρ_c^(γ-1) < 1` in every case.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub k: f64,
    pub gamma: f64,
    pub rho_c: f64,
    pub mass: Option<f64>,
    pub radius: Option<f64>,
    pub causal: bool,
    pub status: PointStatus,
}

fn evaluate(k: f64, gamma: f64, rho_c: f64, mode: Mode, opts: &IntegrationOptions) -> ScanPoint {
    let mut point = ScanPoint { k, gamma, rho_c, mass: None, radius: None, causal: false, status: PointStatus::NonConvergence };
    let eos = match PolytropicEos::new(k, 0.0, gamma) {
        Ok(e) => e,
        Err(_) => return point,
    };
    point.causal = eos.is_causal_at_center(rho_c).map(|v| v.causal).unwrap_or(false);
    match solve_star(eos, rho_c, mode, opts) {
        Ok(p) => {
            point.mass = Some(p.total_mass);
            point.radius = Some(p.surface_radius);
            point.status = PointStatus::Ok;
        }
        Err(Error::HorizonApproach { .. }) => point.status = PointStatus::HorizonApproach,
        Err(Error::NoFiniteRadius { .. }) => point.status = PointStatus::NoFiniteRadius,
        Err(_) => point.status = PointStatus::NonConvergence,
    }
    point
}

/// Evaluates every grid cell in parallel. Output order is `k`-major, then
/// `γ`, then `ρ_c`, whatever the evaluation order.
pub fn run_scan(spec: &ScanSpec) -> Result<Vec<ScanPoint>> {
    spec.validate()?;
    let opts = IntegrationOptions::with_rtol(spec.rtol);
    let (ks, gs, rs) = (spec.k.values(), spec.gamma.values(), spec.rho_c.values());
    let mut cells = Vec::with_capacity(spec.len());
    for &k in &ks {
        for &g in &gs {
            cells.extend(rs.iter().map(|&r| (k, g, r)));
        }
    }
    if cells.is_empty() {
        return Err(Error::Validation { row: 0, message: "scan grid is empty".into() });
    }
    Ok(cells
        .par_iter()
        .map(|&(k, g, r)| evaluate(k, g, r, spec.mode, &opts))
        .collect())
}

pub fn write_scan_csv<W: Write>(points: &[ScanPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["k", "gamma", "rho_c", "mass", "radius", "causal", "status"]).map_err(io)?;
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.16e}")).unwrap_or_default();
    for p in points {
        w.write_record([
            format!("{:.16e}", p.k),
            format!("{:.16e}", p.gamma),
            format!("{:.16e}", p.rho_c),
            opt(p.mass),
            opt(p.radius),
            p.causal.to_string(),
            p.status.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn scan_to_json(points: &[ScanPoint]) -> Result<String> {
    crate::json::to_string(&points)
}

/// One star on a mass-radius curve (geometrized units).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub rho_c: f64,
    pub mass: f64,
    pub radius: f64,
}

/// Stars along `rho_c` for a fixed EOS, in order of the axis values.
pub fn mass_radius_curve(eos: PolytropicEos, rho_c: &Axis, mode: Mode, opts: &IntegrationOptions) -> Result<Vec<CurvePoint>> {
    rho_c.validate("rho_c")?;
    if rho_c.min <= 0.0 {
        return Err(Error::InvalidParameter("rho_c must be positive".into()));
    }
    rho_c
        .values()
        .par_iter()
        .map(|&r| {
            solve_star(eos, r, mode, opts).map(|p| CurvePoint { rho_c: r, mass: p.total_mass, radius: p.surface_radius })
        })
        .collect()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}
