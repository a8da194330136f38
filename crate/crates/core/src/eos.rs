//! Polytropic equation of state `p = k ρ^γ + k₀`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Polytrope with constant `k`, stiffness offset `k0` and exponent `gamma`.
///
/// The polytropic index `n` satisfies `gamma = (n + 1) / n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolytropicEos {
    k: f64,
    k0: f64,
    gamma: f64,
}

/// Result of the central causality test `k γ ρ_c^(γ-1) < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CausalityVerdict {
    pub causal: bool,
    pub v2_max: f64,
    pub evaluation_density: f64,
}

impl PolytropicEos {
    pub fn new(k: f64, k0: f64, gamma: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "polytropic constant k must be positive, got {k}"
            )));
        }
        if !k0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "stiffness constant k0 must be finite, got {k0}"
            )));
        }
        if !(gamma.is_finite() && gamma > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "polytrope exponent gamma must exceed 1, got {gamma}"
            )));
        }
        Ok(Self { k, k0, gamma })
    }

    /// Builds the EOS from the polytropic index `n > 0`.
    pub fn from_index(k: f64, k0: f64, n: f64) -> Result<Self> {
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "polytropic index n must be positive and finite, got {n}"
            )));
        }
        Self::new(k, k0, (n + 1.0) / n)
    }

    /// Exponent given as a rational `num/den`, e.g. 5/3.
    pub fn from_rational(k: f64, k0: f64, num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidParameter("zero denominator in gamma".into()));
        }
        Self::new(k, k0, num as f64 / den as f64)
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Polytropic index `n = 1 / (γ - 1)`.
    pub fn n(&self) -> f64 {
        1.0 / (self.gamma - 1.0)
    }

    pub fn pressure(&self, rho: f64) -> Result<f64> {
        if !(rho >= 0.0) {
            return Err(domain(format!("density must be nonnegative, got {rho}")));
        }
        Ok(self.k * rho.powf(self.gamma) + self.k0)
    }

    pub fn density_from_pressure(&self, p: f64) -> Result<f64> {
        if !(p >= self.k0) {
            return Err(Error::OutOfBranch {
                pressure: p,
                k0: self.k0,
            });
        }
        Ok(((p - self.k0) / self.k).powf(1.0 / self.gamma))
    }

    /// Squared sound speed `∂p/∂ρ = k γ ρ^(γ-1)`.
    pub fn sound_speed_squared(&self, rho: f64) -> Result<f64> {
        if !(rho > 0.0) {
            return Err(domain(format!("density must be positive, got {rho}")));
        }
        Ok(self.k * self.gamma * rho.powf(self.gamma - 1.0))
    }

    /// Strict inequality: `v² = 1` is not causal.
    pub fn is_causal_at_center(&self, rho_c: f64) -> Result<CausalityVerdict> {
        let v2 = self.sound_speed_squared(rho_c)?;
        Ok(CausalityVerdict {
            causal: v2 < 1.0,
            v2_max: v2,
            evaluation_density: rho_c,
        })
    }

    /// Density at which `v² = 1`.
    pub fn causal_limit_density(&self) -> f64 {
        (1.0 / (self.k * self.gamma)).powf(1.0 / (self.gamma - 1.0))
    }
}

/// Plain key-value block:
///
/// ```text
/// k = 100
/// k0 = 0
/// gamma = 2
/// ```
impl fmt::Display for PolytropicEos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "k = {:?}", self.k)?;
        writeln!(f, "k0 = {:?}", self.k0)?;
        writeln!(f, "gamma = {:?}", self.gamma)
    }
}

impl FromStr for PolytropicEos {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let kv = parse_key_values(s)?;
        let get = |key: &str| kv.get(key).copied();
        let k = get("k").ok_or_else(|| Error::InvalidParameter("missing key `k`".into()))?;
        let k0 = get("k0").unwrap_or(0.0);
        let gamma = match (get("gamma"), get("n")) {
            (Some(g), _) => g,
            (None, Some(n)) => (n + 1.0) / n,
            (None, None) => {
                return Err(Error::InvalidParameter("missing key `gamma` (or `n`)".into()))
            }
        };
        PolytropicEos::new(k, k0, gamma)
    }
}

/// Parses `key = value` lines into numbers; `#` starts a comment.
/// Values of the form `a/b` are read as rationals.
pub(crate) fn parse_key_values(s: &str) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for (idx, raw) in s.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            row: idx + 1,
            message: format!("expected `key = value`, got `{line}`"),
        })?;
        let value = parse_number(value.trim()).map_err(|message| Error::Parse {
            row: idx + 1,
            message,
        })?;
        out.insert(key.trim().to_string(), value);
    }
    Ok(out)
}

pub(crate) fn parse_number(s: &str) -> std::result::Result<f64, String> {
    if let Some((num, den)) = s.split_once('/') {
        let num: f64 = num.trim().parse().map_err(|_| format!("bad number `{s}`"))?;
        let den: f64 = den.trim().parse().map_err(|_| format!("bad number `{s}`"))?;
        return Ok(num / den);
    }
    s.trim().parse().map_err(|_| format!("bad number `{s}`"))
}
