//! Obstruction bounds on EOS and relation parameters, and a brute-force
//! check that compares each bound against the condition it came from.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eos::PolytropicEos;
use crate::error::{domain, require_positive, Error, Result};
use crate::relations::{monomial_density, rational_density, MassRadiusRelation, MonomialRelation, RationalRelation};
use crate::units::{solar_mass_to_km, solar_radius_to_km};

const FOUR_PI: f64 = 4.0 * PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Upper,
    Lower,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Upper => "upper",
            Direction::Lower => "lower",
        })
    }
}

/// Which derivation produced a bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// Causality of a Newtonian polytrope on `M = A R²`.
    NewtonianCausal,
    /// Mass and radius bounds on a monomial relation.
    MassRadiusParameter,
    /// Mass-derivative bound turned into a density bound.
    MassDerivativeDensity,
    MassDerivativeGamma,
    MassDerivativeRadius,
    /// Causality on a monomial relation.
    MonomialCausal,
    /// The closed form `[(ab/4π)^β R0^(β-1)]^(-1)`, `β = γ(b-3)`.
    MonomialClosedForm,
    /// Causality on a rational relation.
    RationalCausal,
}

/// A one-sided bound `quantity < value` (or `>`, `≤`, `≥`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundResult {
    pub quantity: String,
    pub direction: Direction,
    pub value: f64,
    pub strict: bool,
    pub route: Route,
    pub inputs: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relation: Option<MassRadiusRelation>,
    /// Same bound in geometrized km units when the inputs were solar.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geometrized_value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl BoundResult {
    fn new(quantity: &str, direction: Direction, value: f64, strict: bool, route: Route, inputs: &[(&str, f64)]) -> Result<Self> {
        if !value.is_finite() {
            return Err(Error::NonConvergence(format!("bound on {quantity} is not finite ({value})")));
        }
        Ok(Self {
            quantity: quantity.to_string(),
            direction,
            value,
            strict,
            route,
            inputs: inputs.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            relation: None,
            geometrized_value: None,
            note: None,
        })
    }

    fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    /// Does `x` satisfy the bound?
    pub fn admits(&self, x: f64) -> bool {
        match (self.direction, self.strict) {
            (Direction::Upper, true) => x < self.value,
            (Direction::Upper, false) => x <= self.value,
            (Direction::Lower, true) => x > self.value,
            (Direction::Lower, false) => x >= self.value,
        }
    }

    pub fn input(&self, name: &str) -> Result<f64> {
        self.inputs
            .get(name)
            .copied()
            .ok_or_else(|| Error::InvalidParameter(format!("bound is missing input `{name}`")))
    }
}

impl fmt::Display for BoundResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match (self.direction, self.strict) {
            (Direction::Upper, true) => "<",
            (Direction::Upper, false) => "<=",
            (Direction::Lower, true) => ">",
            (Direction::Lower, false) => ">=",
        };
        write!(f, "{} {} {:e}", self.quantity, op, self.value)
    }
}

/// Central density of a Newtonian polytrope on `M = A R²`, i.e. the
/// inversion of `A(k, n, ρ_c, s) = M / R²` for `ρ_c`. Undefined at `n = 3`.
pub fn newtonian_central_density(k: f64, n: f64, mass: f64, radius: f64, surface_combination: f64) -> Result<f64> {
    for (name, v) in [("k", k), ("n", n), ("M", mass), ("R", radius), ("s", surface_combination)] {
        require_positive(name, v)?;
    }
    if n == 3.0 {
        return Err(domain("at n = 3 the mass-radius coefficient does not depend on the central density"));
    }
    let base = mass / (radius * radius * surface_combination) * ((n + 1.0) * k / FOUR_PI).powf(1.5);
    Ok(base.powf(2.0 * n / (n - 3.0)))
}

/// Causality threshold on `k` for a Newtonian polytrope of index `n` with
/// mass `M`, radius `R` and surface combination `s`:
/// `k* = n/(n+1) · (R⁴β / (n³M²))^(1/n)`, `β = 64π³s²`.
///
/// The central sound speed scales as `k^(n/(n-3))` at fixed `(M, R, s)`,
/// so `k < k*` is the causal side for `n > 3` and `k > k*` for `n < 3`.
/// The returned direction follows. `n = 3` is rejected.
pub fn newtonian_causal_k_bound(n: f64, mass: f64, radius: f64, surface_combination: f64) -> Result<BoundResult> {
    for (name, v) in [("n", n), ("M", mass), ("R", radius), ("s", surface_combination)] {
        require_positive(name, v)?;
    }
    if n == 3.0 {
        return Err(domain("no causal k bound at n = 3: the central density is not fixed by (M, R)"));
    }
    let beta = 64.0 * PI.powi(3) * surface_combination * surface_combination;
    let value = n / (n + 1.0) * (radius.powi(4) * beta / (n.powi(3) * mass * mass)).powf(1.0 / n);
    let direction = if n > 3.0 { Direction::Upper } else { Direction::Lower };
    let inputs = [("n", n), ("M", mass), ("R", radius), ("s", surface_combination)];
    BoundResult::new("k", direction, value, true, Route::NewtonianCausal, &inputs)
}

/// Bound on `a` in `M = a R^b` from `M ≤ m`, `R ≤ r`: `a ≤ m / r^b`.
///
/// For `b < 0` it holds for every `R ≤ r`; for `b > 0` only for systems at
/// `R = r`, since `M / R^b` is unbounded as `R → 0`.
pub fn theorem1_parameter_bound(m: f64, r: f64, b: f64) -> Result<BoundResult> {
    require_positive("m", m)?;
    require_positive("r", r)?;
    if b == 0.0 {
        return Err(Error::ExcludedExponent);
    }
    let res = BoundResult::new("a", Direction::Upper, m / r.powf(b), false, Route::MassRadiusParameter, &[("m", m), ("r", r), ("b", b)])?;
    Ok(if b > 0.0 {
        res.with_note("valid for systems at R = r; not uniform in R < r when b > 0")
    } else {
        res.with_note("valid for all R <= r")
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitSystem {
    /// Masses in solar masses, lengths in solar radii.
    Solar,
    /// G = c = 1, lengths in km.
    Geometrized,
}

/// Outcome of the `γ` constraint `M0^(1/γ) ≥ a b R0^(b-1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GammaConstraint {
    Bound(BoundResult),
    /// Holds for every `γ > 0`.
    Unconstrained,
    /// Fails for every `γ > 0`.
    Infeasible,
}

/// Size of the threshold radius `(M0^(1/γ)/(ab))^(1/(b-1))` as read from
/// the sign of `b - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusClassification {
    /// `b < 1`: the threshold is pushed to small radii.
    SmallRadius,
    /// `b > 1`: the threshold sits at large radii.
    LargeRadius,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MassDerivativeBounds {
    pub density: BoundResult,
    pub gamma: GammaConstraint,
    /// Absent at `b = 1`, where `R0` drops out.
    pub radius: Option<BoundResult>,
    pub classification: Option<RadiusClassification>,
}

/// From `M'(R0) ≤ M0`: `ρ(R0) ≤ M0 / (4π R0²)`, plus the monomial
/// companions on `γ` and `R0` obtained from `M0^(1/γ) ≥ a b R0^(b-1)`.
///
/// Values are in the unit system of the inputs; with `UnitSystem::Solar`
/// the density and radius bounds also carry geometrized values. The
/// companions depend on the unit system, since `M0^(1/γ)` is not
/// dimensionally homogeneous.
pub fn theorem2_density_bound(rel: &MonomialRelation, m0: f64, r0: f64, gamma: f64, units: UnitSystem) -> Result<MassDerivativeBounds> {
    require_positive("M0", m0)?;
    require_positive("R0", r0)?;
    require_positive("gamma", gamma)?;
    let (a, b) = (rel.a, rel.b);
    let inputs = [("M0", m0), ("R0", r0), ("a", a), ("b", b), ("gamma", gamma)];
    let relation = Some(MassRadiusRelation::Monomial(*rel));

    let mut density = BoundResult::new("rho", Direction::Upper, m0 / (FOUR_PI * r0 * r0), false, Route::MassDerivativeDensity, &inputs)?;
    density.relation = relation.clone();
    if units == UnitSystem::Solar {
        let dm_dr = solar_mass_to_km(m0) / solar_radius_to_km(1.0);
        density.geometrized_value = Some(dm_dr / (FOUR_PI * solar_radius_to_km(r0).powi(2)));
    }

    // (1/γ) μ ≥ ℓ with μ = ln M0, ℓ = ln(a b R0^(b-1)).
    let rhs = a * b * r0.powf(b - 1.0);
    let gamma_constraint = if rhs <= 0.0 {
        GammaConstraint::Unconstrained
    } else {
        let (mu, ell) = (m0.ln(), rhs.ln());
        if mu > 0.0 {
            if ell <= 0.0 {
                GammaConstraint::Unconstrained
            } else {
                let mut g = BoundResult::new("gamma", Direction::Upper, mu / ell, false, Route::MassDerivativeGamma, &inputs)?;
                g.relation = relation.clone();
                GammaConstraint::Bound(g)
            }
        } else if mu < 0.0 {
            if ell >= 0.0 {
                GammaConstraint::Infeasible
            } else {
                let mut g = BoundResult::new("gamma", Direction::Lower, mu / ell, false, Route::MassDerivativeGamma, &inputs)?;
                g.relation = relation.clone();
                GammaConstraint::Bound(g)
            }
        } else if ell <= 0.0 {
            GammaConstraint::Unconstrained
        } else {
            GammaConstraint::Infeasible
        }
    };

    let (radius, classification) = if b == 1.0 || a * b <= 0.0 {
        (None, None)
    } else {
        let threshold = (m0.powf(1.0 / gamma) / (a * b)).powf(1.0 / (b - 1.0));
        let (direction, class) = if b > 1.0 {
            (Direction::Upper, RadiusClassification::LargeRadius)
        } else {
            (Direction::Lower, RadiusClassification::SmallRadius)
        };
        let mut r = BoundResult::new("R0", direction, threshold, false, Route::MassDerivativeRadius, &inputs)?;
        r.relation = relation;
        if units == UnitSystem::Solar {
            r.geometrized_value = Some(solar_radius_to_km(threshold));
        }
        let r = if b < 1.0 {
            r.with_note("exponent 1/(b-1) < 0 flips the inequality: R0 is bounded below by a small threshold")
        } else {
            r
        };
        (Some(r), Some(class))
    };

    Ok(MassDerivativeBounds {
        density,
        gamma: gamma_constraint,
        radius,
        classification,
    })
}

/// `k < 1 / (γ ρ0^(γ-1))`: causality at the density the monomial relation
/// induces at `R0`, `ρ0 = a b R0^(b-3) / (4π)`. Needs `b > 0` so that
/// `ρ0 > 0`.
pub fn theorem3_causal_k_bound_monomial(a: f64, b: f64, gamma: f64, r0: f64) -> Result<BoundResult> {
    require_positive("a", a)?;
    require_positive("R0", r0)?;
    require_positive("gamma", gamma)?;
    if b == 0.0 {
        return Err(Error::ExcludedExponent);
    }
    let rho0 = monomial_density(r0, a, b)?;
    if rho0 <= 0.0 {
        return Err(domain(format!("relation density at R0 is not positive (b = {b})")));
    }
    let value = 1.0 / (gamma * rho0.powf(gamma - 1.0));
    let mut res = BoundResult::new("k", Direction::Upper, value, true, Route::MonomialCausal, &[("a", a), ("b", b), ("gamma", gamma), ("R0", r0)])?;
    res.relation = Some(MassRadiusRelation::Monomial(MonomialRelation::new(a, b)?));
    Ok(res)
}

/// The closed form `k < [(ab/4π)^β R0^(β-1)]^(-1)` with `β = γ(b-3)`.
///
/// This is not the causality threshold of the monomial relation (see
/// [`theorem3_causal_k_bound_monomial`]); it is kept for comparison.
pub fn closed_form_monomial_k_bound(a: f64, b: f64, gamma: f64, r0: f64) -> Result<BoundResult> {
    require_positive("a", a)?;
    require_positive("R0", r0)?;
    if b == 0.0 {
        return Err(Error::ExcludedExponent);
    }
    let base = a * b / FOUR_PI;
    if base <= 0.0 {
        return Err(domain(format!("a b / 4π must be positive, got {base}")));
    }
    let beta = gamma * (b - 3.0);
    let value = 1.0 / (base.powf(beta) * r0.powf(beta - 1.0));
    Ok(BoundResult::new("k", Direction::Upper, value, true, Route::MonomialClosedForm, &[("a", a), ("b", b), ("gamma", gamma), ("R0", r0)])?
        .with_note("closed form; does not coincide with the causality threshold"))
}

/// `k < 1 / (γ ρ0^(γ-1))` with `ρ0` the continuity-equation density of the
/// rational relation at `R0` on the branch through `seed_m`.
pub fn theorem3_causal_k_bound_rational(rel: &RationalRelation, gamma: f64, r0: f64, seed_m: f64) -> Result<BoundResult> {
    require_positive("gamma", gamma)?;
    let rho0 = rational_density(r0, rel, seed_m)?;
    if rho0 <= 0.0 {
        return Err(domain(format!("relation density at R0 is not positive ({rho0}); R decreases with M on this branch")));
    }
    let value = 1.0 / (gamma * rho0.powf(gamma - 1.0));
    let mut res = BoundResult::new("k", Direction::Upper, value, true, Route::RationalCausal, &[("gamma", gamma), ("R0", r0), ("seed_M", seed_m), ("rho0", rho0)])?;
    res.relation = Some(MassRadiusRelation::Rational(rel.clone()));
    Ok(res)
}

/// The direct condition a bound is checked against.
#[derive(Debug, Clone, PartialEq)]
pub enum VerificationContext {
    /// `k ↦` causality at the centre of the Newtonian polytrope with
    /// `M = A R²`.
    NewtonianCausal { n: f64, mass: f64, radius: f64, surface_combination: f64 },
    /// `k ↦` `k γ ρ0^(γ-1) < 1` at the monomial density.
    MonomialCausal { a: f64, b: f64, gamma: f64, r0: f64 },
    /// `k ↦` `k γ ρ0^(γ-1) < 1` at a fixed relation density.
    RationalCausal { gamma: f64, rho0: f64 },
    /// `a ↦` `a r^b ≤ m`.
    MassRadius { m: f64, r: f64, b: f64 },
    /// `ρ ↦` `4π R0² ρ ≤ M0`.
    MassDerivative { m0: f64, r0: f64 },
}

impl VerificationContext {
    /// Rebuilds the context from the inputs stored in a bound.
    pub fn from_bound(bound: &BoundResult) -> Result<Self> {
        let g = |k: &str| bound.input(k);
        Ok(match bound.route {
            Route::NewtonianCausal => VerificationContext::NewtonianCausal {
                n: g("n")?,
                mass: g("M")?,
                radius: g("R")?,
                surface_combination: g("s")?,
            },
            Route::MonomialCausal | Route::MonomialClosedForm => VerificationContext::MonomialCausal {
                a: g("a")?,
                b: g("b")?,
                gamma: g("gamma")?,
                r0: g("R0")?,
            },
            Route::RationalCausal => {
                let rho0 = match (&bound.relation, bound.inputs.get("rho0")) {
                    (Some(MassRadiusRelation::Rational(rel)), _) => rational_density(g("R0")?, rel, g("seed_M")?)?,
                    (_, Some(&rho0)) => rho0,
                    _ => return Err(Error::InvalidParameter("rational bound needs a relation or rho0".into())),
                };
                VerificationContext::RationalCausal { gamma: g("gamma")?, rho0 }
            }
            Route::MassRadiusParameter => VerificationContext::MassRadius {
                m: g("m")?,
                r: g("r")?,
                b: g("b")?,
            },
            Route::MassDerivativeDensity => VerificationContext::MassDerivative { m0: g("M0")?, r0: g("R0")? },
            Route::MassDerivativeGamma | Route::MassDerivativeRadius => {
                return Err(Error::InvalidParameter(format!(
                    "no direct check for route {:?}",
                    bound.route
                )))
            }
        })
    }

    /// Excess of the direct condition at `x`: the check passes when the
    /// excess is negative (strict conditions) or non-positive. `None` when
    /// the check is undefined at `x`.
    fn excess(&self, x: f64) -> Option<(f64, bool)> {
        match *self {
            VerificationContext::NewtonianCausal { n, mass, radius, surface_combination } => {
                let rho_c = newtonian_central_density(x, n, mass, radius, surface_combination).ok()?;
                let eos = PolytropicEos::from_index(x, 0.0, n).ok()?;
                let v = eos.is_causal_at_center(rho_c).ok()?;
                v.v2_max.is_finite().then_some((v.v2_max - 1.0, v.causal))
            }
            VerificationContext::MonomialCausal { a, b, gamma, r0 } => {
                let rho0 = monomial_density(r0, a, b).ok().filter(|r| *r > 0.0)?;
                causal_excess(x, gamma, rho0)
            }
            VerificationContext::RationalCausal { gamma, rho0 } => causal_excess(x, gamma, rho0),
            VerificationContext::MassRadius { m, r, b } => {
                let mass = x * r.powf(b);
                mass.is_finite().then_some((mass - m, mass <= m))
            }
            VerificationContext::MassDerivative { m0, r0 } => {
                let dm = FOUR_PI * r0 * r0 * x;
                dm.is_finite().then_some((dm - m0, dm <= m0))
            }
        }
    }
}

fn causal_excess(k: f64, gamma: f64, rho: f64) -> Option<(f64, bool)> {
    if !(k > 0.0) {
        return None;
    }
    let v2 = k * gamma * rho.powf(gamma - 1.0);
    v2.is_finite().then_some((v2 - 1.0, v2 < 1.0))
}

/// Tally of a brute-force comparison.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct VerificationReport {
    pub grid_size: usize,
    /// Points the bound admits and the direct check is defined at.
    pub checked: usize,
    /// Points not checked: outside the bound or undefined.
    pub skipped: usize,
    /// Subset of `skipped` where the direct check is undefined.
    pub undefined: usize,
    /// Admitted points failing the direct check.
    pub violations: usize,
    /// Points outside the bound that still pass the direct check. Zero
    /// means the bound is sharp on this grid.
    pub outside_passing: usize,
    /// Largest excess over a violated condition (0 without violations).
    pub worst_margin: f64,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    fn merge(self, o: Self) -> Self {
        Self {
            grid_size: self.grid_size + o.grid_size,
            checked: self.checked + o.checked,
            skipped: self.skipped + o.skipped,
            undefined: self.undefined + o.undefined,
            violations: self.violations + o.violations,
            outside_passing: self.outside_passing + o.outside_passing,
            worst_margin: self.worst_margin.max(o.worst_margin),
        }
    }
}

/// Evaluates the direct condition at every grid value of the bounded
/// quantity and counts admitted points where it fails.
pub fn verify_bound_by_bruteforce(bound: &BoundResult, context: &VerificationContext, grid: &[f64]) -> Result<VerificationReport> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("verification grid is empty".into()));
    }
    let report = grid
        .par_iter()
        .map(|&x| {
            let mut r = VerificationReport { grid_size: 1, ..Default::default() };
            let inside = bound.admits(x);
            match context.excess(x) {
                None => {
                    r.skipped = 1;
                    r.undefined = 1;
                }
                Some((excess, pass)) if inside => {
                    r.checked = 1;
                    if !pass {
                        r.violations = 1;
                        r.worst_margin = excess.max(0.0);
                    }
                }
                Some((_, pass)) => {
                    r.skipped = 1;
                    r.outside_passing = usize::from(pass);
                }
            }
            r
        })
        .reduce(VerificationReport::default, VerificationReport::merge);
    Ok(report)
}

/// `count` log-spaced values from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..count)
                .map(|i| match i {
                    0 => lo,
                    _ if i + 1 == count => hi,
                    _ => (a + (b - a) * i as f64 / (count - 1) as f64).exp(),
                })
                .collect()
        }
    }
}
