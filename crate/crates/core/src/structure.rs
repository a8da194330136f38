//! Stellar structure: the TOV system, the Lane-Emden equation and
//! Newtonian polytropes built from it.
//!
//! Both integrators run in two phases. The first integrates outwards in
//! radius from a series-expanded start near the centre. Once the solution
//! is close to the surface, the roles are swapped and the radius (and mass)
//! are integrated as functions of a surface variable that vanishes
//! transversally at the surface: `θ` for Lane-Emden, `ρ^(γ-1)` for
//! `k₀ = 0` polytropes and the pressure otherwise. The surface is then
//! reached exactly instead of being approached asymptotically.

use std::f64::consts::PI;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::eos::PolytropicEos;
use crate::error::{domain, require_positive, Error, Result};
use crate::ode::{self, Control, Verdict};

const FOUR_PI: f64 = 4.0 * PI;
/// Relative pressure drop of the series-expanded starting point.
const START_DROP: f64 = 1e-8;
/// Fraction of the surface-variable range left for the second phase.
const SWITCH_FRACTION: f64 = 0.05;
const LANE_EMDEN_SWITCH: f64 = 0.1;
const LANE_EMDEN_START: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationOptions {
    /// Per-step relative tolerance.
    pub rtol: f64,
    pub max_steps: usize,
    /// Optional cap on the radial step (geometrized km for TOV, ξ for
    /// Lane-Emden, km for Newtonian stars).
    pub max_step: Option<f64>,
    /// Surface criterion `p ≤ max(k₀, 0) + ε p_c`.
    pub surface_pressure_fraction: f64,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            max_steps: 200_000,
            max_step: None,
            surface_pressure_fraction: 0.0,
        }
    }
}

impl IntegrationOptions {
    pub fn with_rtol(rtol: f64) -> Self {
        Self { rtol, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0 && self.rtol < 1e-2) {
            return Err(Error::InvalidParameter(format!("rtol must lie in (0, 1e-2), got {}", self.rtol)));
        }
        if !(self.surface_pressure_fraction >= 0.0 && self.surface_pressure_fraction < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "surface pressure fraction must lie in [0, 1), got {}",
                self.surface_pressure_fraction
            )));
        }
        if let Some(h) = self.max_step {
            require_positive("max_step", h)?;
        }
        Ok(())
    }

    fn control(&self) -> Control {
        Control {
            rtol: self.rtol,
            atol: 0.0,
            max_steps: self.max_steps,
            max_step: self.max_step.unwrap_or(f64::INFINITY),
        }
    }
}

/// Pressure-density relation used inside the structure equations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Barotrope {
    Polytropic(PolytropicEos),
    /// Incompressible matter, `ρ ≡ ρ₀`.
    ConstantDensity { rho0: f64 },
}

impl From<PolytropicEos> for Barotrope {
    fn from(eos: PolytropicEos) -> Self {
        Barotrope::Polytropic(eos)
    }
}

impl Barotrope {
    /// Density at pressure `p`, clamped to the physical branch.
    fn density(&self, p: f64) -> f64 {
        match self {
            Barotrope::Polytropic(eos) => ((p - eos.k0()).max(0.0) / eos.k()).powf(1.0 / eos.gamma()),
            Barotrope::ConstantDensity { rho0 } => *rho0,
        }
    }

    fn pressure_floor(&self) -> f64 {
        match self {
            Barotrope::Polytropic(eos) => eos.k0().max(0.0),
            Barotrope::ConstantDensity { .. } => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    Relativistic,
    Newtonian,
}

/// Radial profile of a star together with its surface quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StellarProfile {
    pub kind: ProfileKind,
    pub r: Vec<f64>,
    pub p: Vec<f64>,
    pub rho: Vec<f64>,
    pub m: Vec<f64>,
    pub surface_radius: f64,
    pub total_mass: f64,
    pub central_density: f64,
    pub central_pressure: f64,
    pub surface_density: f64,
    pub surface_pressure: f64,
    /// `|p'(R)|` from the structure equation at the surface.
    pub surface_pressure_gradient: f64,
    /// Limit of `|p'(R)| / ρ_rel` with `ρ_rel = ρ(R)/ρ_c`.
    pub rho_rel_limit: f64,
}

impl StellarProfile {
    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// `2M/R`.
    pub fn compactness(&self) -> f64 {
        2.0 * self.total_mass / self.surface_radius
    }

    /// CSV with header `r,p,rho,m`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "r,p,rho,m")?;
        for i in 0..self.len() {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e}",
                self.r[i], self.p[i], self.rho[i], self.m[i]
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }
}

/// Surface quantities entering the Newtonian mass-radius coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceData {
    pub p_prime_surface: f64,
    pub rho_rel_combination: f64,
}

/// Returns `|p'(R)|` and the finite limit of `|p'(R)| / ρ_rel`.
///
/// For polytropes `ρ_rel` vanishes at the surface; the combination is the
/// analytic limit (`ρ_c M / R²` in Newtonian hydrostatics) rather than the
/// raw 0/0 ratio.
pub fn surface_data(profile: &StellarProfile) -> Result<SurfaceData> {
    let finite = profile.surface_radius.is_finite()
        && profile.surface_radius > 0.0
        && profile.total_mass.is_finite();
    if !finite {
        return Err(domain("profile has no finite surface"));
    }
    if !profile.rho_rel_limit.is_finite() {
        return Err(domain(
            "|p'(R)|/rho_rel diverges: the surface density vanishes while the surface pressure gradient does not",
        ));
    }
    Ok(SurfaceData {
        p_prime_surface: profile.surface_pressure_gradient,
        rho_rel_combination: profile.rho_rel_limit,
    })
}

/// Independent variable used near the surface.
#[derive(Debug, Clone, Copy)]
enum SurfaceVar {
    /// `u = ρ^(γ-1)` for `k₀ = 0` polytropes, so `p = k u^(n+1)`.
    Enthalpy { k: f64, gamma: f64 },
    /// `u = p`.
    Pressure(Barotrope),
}

impl SurfaceVar {
    fn pressure(&self, u: f64) -> f64 {
        match self {
            SurfaceVar::Enthalpy { k, gamma } => k * u.max(0.0).powf(gamma / (gamma - 1.0)),
            SurfaceVar::Pressure(_) => u,
        }
    }

    fn density(&self, u: f64) -> f64 {
        match self {
            SurfaceVar::Enthalpy { gamma, .. } => u.max(0.0).powf(1.0 / (gamma - 1.0)),
            SurfaceVar::Pressure(b) => b.density(u),
        }
    }

    fn of_pressure(&self, p: f64) -> f64 {
        match self {
            SurfaceVar::Enthalpy { k, gamma } => (p / k).powf((gamma - 1.0) / gamma),
            SurfaceVar::Pressure(_) => p,
        }
    }

    /// `du/dr` from the TOV pressure equation.
    fn du_dr(&self, r: f64, m: f64, u: f64) -> f64 {
        let p = self.pressure(u);
        let g = (m + FOUR_PI * r.powi(3) * p) / (r * (r - 2.0 * m));
        match self {
            SurfaceVar::Enthalpy { k, gamma } => {
                let n = 1.0 / (gamma - 1.0);
                -(1.0 + k * u.max(0.0)) / (k * (n + 1.0)) * g
            }
            SurfaceVar::Pressure(_) => -(self.density(u) + p) * g,
        }
    }
}

/// Integrates the TOV equations for a polytrope with central density `rho_c`.
pub fn integrate_tov(eos: PolytropicEos, rho_c: f64, opts: &IntegrationOptions) -> Result<StellarProfile> {
    require_positive("central density", rho_c)?;
    let p_c = eos.pressure(rho_c)?;
    let var = if eos.k0() == 0.0 {
        SurfaceVar::Enthalpy { k: eos.k(), gamma: eos.gamma() }
    } else {
        SurfaceVar::Pressure(Barotrope::Polytropic(eos))
    };
    tov_with(var, Barotrope::Polytropic(eos), rho_c, p_c, opts)
}

/// Constant-density (incompressible) star with central pressure `p_c`.
pub fn integrate_tov_constant_density(rho0: f64, p_c: f64, opts: &IntegrationOptions) -> Result<StellarProfile> {
    require_positive("density", rho0)?;
    require_positive("central pressure", p_c)?;
    let matter = Barotrope::ConstantDensity { rho0 };
    tov_with(SurfaceVar::Pressure(matter), matter, rho0, p_c, opts)
}

fn tov_with(
    var: SurfaceVar,
    matter: Barotrope,
    rho_c: f64,
    p_c: f64,
    opts: &IntegrationOptions,
) -> Result<StellarProfile> {
    opts.validate()?;
    let p_surf = matter.pressure_floor() + opts.surface_pressure_fraction * p_c;
    if !(p_c > p_surf) {
        return Err(domain(format!(
            "central pressure {p_c} does not exceed the surface threshold {p_surf}"
        )));
    }
    let u_c = var.of_pressure(p_c);
    let u_s = var.of_pressure(p_surf);
    let u_switch = u_s + SWITCH_FRACTION * (u_c - u_s);

    // p ≈ p_c − (2π/3)(ρ_c + p_c)(ρ_c + 3p_c) r² near the centre.
    let q = 2.0 * PI / 3.0 * (rho_c + p_c) * (rho_c + 3.0 * p_c);
    let r0 = (START_DROP * (p_c - p_surf) / q).sqrt();
    let p0 = p_c - q * r0 * r0;
    let m0 = FOUR_PI / 3.0 * rho_c * r0.powi(3);

    let mut r_grid = vec![0.0];
    let mut p_grid = vec![p_c];
    let mut rho_grid = vec![rho_c];
    let mut m_grid = vec![0.0];

    let ctl = opts.control();
    let mut horizon: Option<(f64, f64)> = None;
    let phase1 = ode::integrate(
        |r, y: &[f64; 2]| {
            let (m, u) = (y[0], y[1]);
            if r - 2.0 * m <= 0.0 {
                return [f64::NAN; 2];
            }
            [FOUR_PI * r * r * var.density(u), var.du_dr(r, m, u)]
        },
        r0,
        [m0, var.of_pressure(p0)],
        f64::MAX,
        r0,
        &ctl,
        |r, y| {
            let compactness = 2.0 * y[0] / r;
            if compactness >= 1.0 - 1e-9 {
                horizon = Some((r, compactness));
                return Verdict::Stop;
            }
            if !(y[1] > u_s) {
                Verdict::Reject
            } else if y[1] <= u_switch {
                Verdict::Stop
            } else {
                Verdict::Accept
            }
        },
        |r, y| {
            r_grid.push(r);
            p_grid.push(var.pressure(y[1]));
            rho_grid.push(var.density(y[1]));
            m_grid.push(y[0]);
        },
    )?;
    if let Some((radius, compactness)) = horizon {
        return Err(Error::HorizonApproach { radius, compactness });
    }

    let (r1, m1, u1) = (phase1.t, phase1.y[0], phase1.y[1]);
    let slope = var.du_dr(r1, m1, u1).abs();
    let ctl2 = Control {
        max_step: opts.max_step.map_or(f64::INFINITY, |h| h * slope),
        max_steps: opts.max_steps.saturating_sub(phase1.steps).max(1),
        ..ctl
    };
    let mut first = true;
    let phase2 = ode::integrate(
        |u, y: &[f64; 2]| {
            let (r, m) = (y[0], y[1]);
            if r - 2.0 * m <= 0.0 {
                return [f64::NAN; 2];
            }
            let drdu = 1.0 / var.du_dr(r, m, u);
            [drdu, FOUR_PI * r * r * var.density(u) * drdu]
        },
        u1,
        [r1, m1],
        u_s,
        (u_s - u1) / 16.0,
        &ctl2,
        |_, y| {
            if y[0] - 2.0 * y[1] > 0.0 {
                Verdict::Accept
            } else {
                Verdict::Reject
            }
        },
        |u, y| {
            if std::mem::take(&mut first) {
                return;
            }
            r_grid.push(y[0]);
            p_grid.push(var.pressure(u));
            rho_grid.push(var.density(u));
            m_grid.push(y[1]);
        },
    )
    .map_err(|e| match e {
        Error::NonConvergence(_) if 2.0 * m1 / r1 > 0.9 => Error::HorizonApproach {
            radius: r1,
            compactness: 2.0 * m1 / r1,
        },
        other => other,
    })?;

    let radius = phase2.y[0];
    let mass = phase2.y[1];
    let rho_s = var.density(u_s);
    let p_s = var.pressure(u_s);
    let gradient = (rho_s + p_s) * (mass + FOUR_PI * radius.powi(3) * p_s) / (radius * (radius - 2.0 * mass));
    let rho_rel_limit = if rho_s > 0.0 {
        gradient * rho_c / rho_s
    } else if p_s == 0.0 {
        rho_c * mass / (radius * (radius - 2.0 * mass))
    } else {
        f64::INFINITY
    };

    Ok(StellarProfile {
        kind: ProfileKind::Relativistic,
        r: r_grid,
        p: p_grid,
        rho: rho_grid,
        m: m_grid,
        surface_radius: radius,
        total_mass: mass,
        central_density: rho_c,
        central_pressure: p_c,
        surface_density: rho_s,
        surface_pressure: p_s,
        surface_pressure_gradient: gradient,
        rho_rel_limit,
    })
}

/// Solution of `θ'' + 2θ'/ξ + θⁿ = 0`, `θ(0) = 1`, `θ'(0) = 0`, up to the
/// first point where `θ` reaches `theta_surface` (zero for the classical
/// problem).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaneEmdenSolution {
    pub n: f64,
    pub theta_surface: f64,
    /// First zero `ξ₁` (or the point where `θ = theta_surface`).
    pub xi1: f64,
    pub theta_prime_at_xi1: f64,
    pub xi: Vec<f64>,
    pub theta: Vec<f64>,
    pub theta_prime: Vec<f64>,
}

impl LaneEmdenSolution {
    /// `-ξ₁² θ'(ξ₁)`, the dimensionless mass.
    pub fn mass_integral(&self) -> f64 {
        -self.xi1 * self.xi1 * self.theta_prime_at_xi1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LaneEmden {
    Finite(LaneEmdenSolution),
    /// `n ≥ 5`: θ stays positive for all ξ.
    InfiniteRadius { n: f64 },
}

impl LaneEmden {
    pub fn finite(self) -> Result<LaneEmdenSolution> {
        match self {
            LaneEmden::Finite(s) => Ok(s),
            LaneEmden::InfiniteRadius { n } => Err(Error::NoFiniteRadius { n }),
        }
    }
}

pub fn integrate_lane_emden(n: f64, opts: &IntegrationOptions) -> Result<LaneEmden> {
    integrate_lane_emden_to(n, 0.0, opts)
}

/// As [`integrate_lane_emden`], stopping where `θ = theta_surface`.
pub fn integrate_lane_emden_to(n: f64, theta_surface: f64, opts: &IntegrationOptions) -> Result<LaneEmden> {
    if !(n >= 0.0) || !n.is_finite() {
        return Err(domain(format!("polytropic index must be nonnegative, got {n}")));
    }
    if !(0.0..1.0).contains(&theta_surface) {
        return Err(domain(format!("surface value of theta must lie in [0, 1), got {theta_surface}")));
    }
    opts.validate()?;
    if n >= 5.0 && theta_surface == 0.0 {
        return Ok(LaneEmden::InfiniteRadius { n });
    }

    let power = |theta: f64| theta.max(0.0).powf(n);
    let x0 = LANE_EMDEN_START;
    let theta0 = 1.0 - x0 * x0 / 6.0 + n * x0.powi(4) / 120.0;
    let dtheta0 = -x0 / 3.0 + n * x0.powi(3) / 30.0;
    let theta_switch = theta_surface + LANE_EMDEN_SWITCH * (1.0 - theta_surface);

    let mut xi = vec![0.0];
    let mut theta = vec![1.0];
    let mut theta_prime = vec![0.0];

    let ctl = opts.control();
    let phase1 = ode::integrate(
        |x, y: &[f64; 2]| [y[1], -power(y[0]) - 2.0 * y[1] / x],
        x0,
        [theta0, dtheta0],
        f64::MAX,
        x0,
        &ctl,
        |_, y| {
            if !(y[0] > theta_surface) {
                Verdict::Reject
            } else if y[0] <= theta_switch {
                Verdict::Stop
            } else {
                Verdict::Accept
            }
        },
        |x, y| {
            xi.push(x);
            theta.push(y[0]);
            theta_prime.push(y[1]);
        },
    )
    .map_err(|e| match e {
        Error::NonConvergence(msg) if n >= 5.0 => Error::NonConvergence(format!(
            "{msg}; theta does not reach {theta_surface} within the step budget for n = {n}"
        )),
        other => other,
    })?;

    let (x1, t1, d1) = (phase1.t, phase1.y[0], phase1.y[1]);
    let ctl2 = Control {
        max_step: opts.max_step.map_or(f64::INFINITY, |h| h * d1.abs()),
        max_steps: opts.max_steps.saturating_sub(phase1.steps).max(1),
        ..ctl
    };
    let mut first = true;
    let phase2 = ode::integrate(
        |t, y: &[f64; 2]| {
            let (x, d) = (y[0], y[1]);
            [1.0 / d, (-power(t) - 2.0 * d / x) / d]
        },
        t1,
        [x1, d1],
        theta_surface,
        (theta_surface - t1) / 16.0,
        &ctl2,
        |_, y| if y[1] < 0.0 { Verdict::Accept } else { Verdict::Reject },
        |t, y| {
            if std::mem::take(&mut first) {
                return;
            }
            xi.push(y[0]);
            theta.push(t);
            theta_prime.push(y[1]);
        },
    )?;

    Ok(LaneEmden::Finite(LaneEmdenSolution {
        n,
        theta_surface,
        xi1: phase2.y[0],
        theta_prime_at_xi1: phase2.y[1],
        xi,
        theta,
        theta_prime,
    }))
}

/// Lane-Emden length scale `α` with `α² = (n+1) k ρ_c^((1-n)/n) / (4π)`.
pub fn lane_emden_length_scale(eos: &PolytropicEos, rho_c: f64) -> f64 {
    let n = eos.n();
    ((n + 1.0) * eos.k() * rho_c.powf((1.0 - n) / n) / FOUR_PI).sqrt()
}

/// Newtonian polytrope from the Lane-Emden solution:
/// `r = αξ`, `ρ = ρ_c θⁿ`, `M(r) = 4π α³ ρ_c (−ξ² θ')`.
pub fn newtonian_star(eos: PolytropicEos, rho_c: f64, opts: &IntegrationOptions) -> Result<StellarProfile> {
    require_positive("central density", rho_c)?;
    opts.validate()?;
    let n = eos.n();
    let p_c = eos.pressure(rho_c)?;
    let p_surf = eos.k0().max(0.0) + opts.surface_pressure_fraction * p_c;
    if !(p_c > p_surf) {
        return Err(domain(format!(
            "central pressure {p_c} does not exceed the surface threshold {p_surf}"
        )));
    }
    let scale_p = eos.k() * rho_c.powf(eos.gamma());
    let theta_s = ((p_surf - eos.k0()) / scale_p).max(0.0).powf(1.0 / (n + 1.0));

    let alpha = lane_emden_length_scale(&eos, rho_c);
    let le_opts = IntegrationOptions {
        max_step: opts.max_step.map(|h| h / alpha),
        ..*opts
    };
    let sol = integrate_lane_emden_to(n, theta_s, &le_opts)?.finite()?;

    let mass_scale = FOUR_PI * alpha.powi(3) * rho_c;
    let r: Vec<f64> = sol.xi.iter().map(|x| alpha * x).collect();
    let rho: Vec<f64> = sol.theta.iter().map(|t| rho_c * t.max(0.0).powf(n)).collect();
    let p: Vec<f64> = sol.theta.iter().map(|t| scale_p * t.max(0.0).powf(n + 1.0) + eos.k0()).collect();
    let m: Vec<f64> = sol
        .xi
        .iter()
        .zip(&sol.theta_prime)
        .map(|(x, d)| -mass_scale * x * x * d)
        .collect();

    let radius = alpha * sol.xi1;
    let mass = mass_scale * sol.mass_integral();
    let rho_s = rho_c * theta_s.powf(n);
    Ok(StellarProfile {
        kind: ProfileKind::Newtonian,
        r,
        p,
        rho,
        m,
        surface_radius: radius,
        total_mass: mass,
        central_density: rho_c,
        central_pressure: p_c,
        surface_density: rho_s,
        surface_pressure: scale_p * theta_s.powf(n + 1.0) + eos.k0(),
        surface_pressure_gradient: rho_s * mass / (radius * radius),
        rho_rel_limit: rho_c * mass / (radius * radius),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(k: f64, gamma: f64) -> PolytropicEos {
        PolytropicEos::new(k, 0.0, gamma).unwrap()
    }

    fn le(n: f64, rtol: f64) -> LaneEmdenSolution {
        integrate_lane_emden(n, &IntegrationOptions::with_rtol(rtol))
            .unwrap()
            .finite()
            .unwrap()
    }

    #[test]
    fn lane_emden_n0_analytic() {
        let s = le(0.0, 1e-10);
        assert!((s.xi1 - 6f64.sqrt()).abs() < 1e-8);
        for (x, t) in s.xi.iter().zip(&s.theta) {
            assert!((t - (1.0 - x * x / 6.0)).abs() < 1e-8);
        }
    }

    #[test]
    fn lane_emden_n1_analytic() {
        let s = le(1.0, 1e-10);
        assert!((s.xi1 - PI).abs() < 1e-8);
        assert!((s.theta_prime_at_xi1 + 1.0 / PI).abs() < 1e-8);
        for (x, t) in s.xi.iter().zip(&s.theta).skip(1) {
            assert!((t - x.sin() / x).abs() < 1e-8);
        }
    }

    #[test]
    fn lane_emden_n3_against_tighter_run() {
        let coarse = le(3.0, 1e-10);
        let fine = le(3.0, 1e-11);
        assert!((coarse.xi1 / fine.xi1 - 1.0).abs() < 1e-6);
        assert!((coarse.mass_integral() / fine.mass_integral() - 1.0).abs() < 1e-6);
        // Tabulated values: ξ₁ = 6.89685, −ξ₁²θ'(ξ₁) = 2.01824.
        assert!((coarse.xi1 - 6.896_848_6).abs() < 1e-6);
        assert!((coarse.mass_integral() - 2.018_235_9).abs() < 1e-6);
    }

    #[test]
    fn lane_emden_n5_has_no_surface() {
        let out = integrate_lane_emden(5.0, &IntegrationOptions::default()).unwrap();
        assert_eq!(out, LaneEmden::InfiniteRadius { n: 5.0 });
        assert!(matches!(out.finite(), Err(Error::NoFiniteRadius { .. })));
        assert!(integrate_lane_emden(-0.5, &IntegrationOptions::default()).is_err());
    }

    #[test]
    fn lane_emden_profile_is_monotone() {
        let s = le(1.5, 1e-10);
        assert!(s.theta.windows(2).all(|w| w[1] < w[0]));
        assert!(s.theta.iter().all(|t| *t >= 0.0));
        assert_eq!(*s.theta.last().unwrap(), 0.0);
        assert!((s.xi1 - 3.653_753_7).abs() < 1e-6);
    }

    #[test]
    fn constant_density_mass_is_cubic() {
        let rho0 = 1e-3;
        let prof = integrate_tov_constant_density(rho0, 1e-5, &IntegrationOptions::default()).unwrap();
        for (r, m) in prof.r.iter().zip(&prof.m) {
            let exact = FOUR_PI * r.powi(3) * rho0 / 3.0;
            assert!((m - exact).abs() <= 1e-12 * exact.max(1e-300));
        }
    }

    #[test]
    fn newtonian_n1_radius_is_density_independent() {
        let eos = poly(2.0, 2.0);
        let opts = IntegrationOptions::default();
        let a = newtonian_star(eos, 0.3, &opts).unwrap();
        let b = newtonian_star(eos, 7.0, &opts).unwrap();
        assert!((a.surface_radius / b.surface_radius - 1.0).abs() < 1e-8);
        assert!((a.surface_radius - PI * (2.0 * 2.0 / FOUR_PI).sqrt()).abs() < 1e-8);
    }

    #[test]
    fn newtonian_n3_mass_is_density_independent() {
        let eos = PolytropicEos::from_index(1.0, 0.0, 3.0).unwrap();
        let opts = IntegrationOptions::default();
        let a = newtonian_star(eos, 0.01, &opts).unwrap();
        let b = newtonian_star(eos, 5.0, &opts).unwrap();
        assert!((a.total_mass / b.total_mass - 1.0).abs() < 1e-6);
    }

    #[test]
    fn newtonian_n15_against_tighter_run() {
        let eos = PolytropicEos::from_index(1.0, 0.0, 1.5).unwrap();
        let a = newtonian_star(eos, 1.0, &IntegrationOptions::with_rtol(1e-10)).unwrap();
        let b = newtonian_star(eos, 1.0, &IntegrationOptions::with_rtol(1e-11)).unwrap();
        assert!((a.total_mass / b.total_mass - 1.0).abs() < 1e-6);
        assert!((a.surface_radius / b.surface_radius - 1.0).abs() < 1e-6);
    }

    #[test]
    fn surface_combination_newtonian() {
        let prof = newtonian_star(poly(1.0, 2.0), 1.0, &IntegrationOptions::default()).unwrap();
        let s = surface_data(&prof).unwrap();
        let oracle = prof.central_density * prof.total_mass / prof.surface_radius.powi(2);
        assert!((s.rho_rel_combination / oracle - 1.0).abs() < 1e-6);
        assert_eq!(s.p_prime_surface, 0.0);

        // Doubling ρ_c at n = 1 keeps R and doubles M, so the combination
        // scales by 2 · 2.
        let prof2 = newtonian_star(poly(1.0, 2.0), 2.0, &IntegrationOptions::default()).unwrap();
        let s2 = surface_data(&prof2).unwrap();
        let expected = 2.0 * (prof2.total_mass / prof2.surface_radius.powi(2))
            / (prof.total_mass / prof.surface_radius.powi(2));
        assert!((s2.rho_rel_combination / s.rho_rel_combination - expected).abs() < 1e-9);
        assert!((expected - 4.0).abs() < 1e-7);
    }

    #[test]
    fn surface_combination_constant_density_newtonian_limit() {
        // ρ_rel = 1 everywhere; at low pressure the TOV gradient is the
        // Newtonian ρ₀ M / R².
        let rho0 = 1e-6;
        let prof = integrate_tov_constant_density(rho0, 1e-16, &IntegrationOptions::default()).unwrap();
        let s = surface_data(&prof).unwrap();
        let newtonian = rho0 * prof.total_mass / prof.surface_radius.powi(2);
        assert_eq!(s.rho_rel_combination, s.p_prime_surface);
        assert!((s.p_prime_surface / newtonian - 1.0).abs() < 1e-6);
    }

    #[test]
    fn surface_data_rejects_missing_surface() {
        let mut prof = newtonian_star(poly(1.0, 2.0), 1.0, &IntegrationOptions::default()).unwrap();
        prof.surface_radius = f64::INFINITY;
        assert!(surface_data(&prof).is_err());
    }

    #[test]
    fn tov_rejects_bad_input() {
        let opts = IntegrationOptions::default();
        assert!(integrate_tov(poly(100.0, 2.0), 0.0, &opts).is_err());
        let stiff = PolytropicEos::new(100.0, 1.0, 2.0).unwrap();
        // p_c = 100 ρ² + 1 always exceeds the floor k0 = 1, so this works.
        assert!(integrate_tov(stiff, 1e-3, &opts).is_ok());
        let newt_n5 = PolytropicEos::from_index(1.0, 0.0, 5.0).unwrap();
        assert!(matches!(
            newtonian_star(newt_n5, 1.0, &opts),
            Err(Error::NoFiniteRadius { .. })
        ));
    }

    #[test]
    fn negative_offset_gives_finite_surface_density() {
        let eos = PolytropicEos::new(100.0, -1e-6, 2.0).unwrap();
        let prof = integrate_tov(eos, 5e-4, &IntegrationOptions::default()).unwrap();
        assert!(prof.surface_density > 0.0);
        assert!(prof.surface_pressure.abs() < 1e-20);
        let expected = (1e-6f64 / 100.0).sqrt();
        assert!((prof.surface_density / expected - 1.0).abs() < 1e-9);

        let newt = newtonian_star(eos, 5e-4, &IntegrationOptions::default()).unwrap();
        assert!((newt.surface_density / expected - 1.0).abs() < 1e-9);
    }

    #[test]
    fn csv_header_and_rows() {
        let prof = newtonian_star(poly(1.0, 2.0), 1.0, &IntegrationOptions::default()).unwrap();
        let csv = prof.to_csv_string();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("r,p,rho,m"));
        assert_eq!(lines.count(), prof.len());
    }
}
