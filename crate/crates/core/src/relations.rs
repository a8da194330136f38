//! Mass-radius relation families: Newtonian polytrope `M = A R²`,
//! monomial `M = a R^b` and rational `p(M) = R q(M)`.
//!
//! The continuity equation `M'(R) = 4π R² ρ` turns each relation into a
//! density at the surface radius, and from there into a sound speed.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::eos::{parse_number, PolytropicEos};
use crate::error::{domain, require_positive, Error, Result};
use crate::units::{solar_mass_to_km, solar_radius_to_km};

const FOUR_PI: f64 = 4.0 * PI;
const SINGULAR_EPS: f64 = 1e-12;
const MAX_NEWTON: usize = 200;

/// `A = (4π/((n+1)k))^(3/2) ρ_c^((n-3)/(2n)) · s` where `s` is the
/// surface combination `|p'(R)|/ρ_rel`.
pub fn newtonian_a(k: f64, n: f64, rho_c: f64, surface_combination: f64) -> Result<f64> {
    require_positive("k", k)?;
    require_positive("n", n)?;
    require_positive("central density", rho_c)?;
    require_positive("surface combination", surface_combination)?;
    Ok((FOUR_PI / ((n + 1.0) * k)).powf(1.5) * rho_c.powf((n - 3.0) / (2.0 * n)) * surface_combination)
}

/// Solves `M = a R^b` for `a`.
pub fn solve_monomial_for_a(mass: f64, radius: f64, b: f64) -> Result<f64> {
    require_positive("radius", radius)?;
    Ok(mass / radius.powf(b))
}

/// Density from the continuity equation applied to `M = a R^b`:
/// `ρ = a b R^(b-3) / (4π)`.
pub fn monomial_density(radius: f64, a: f64, b: f64) -> Result<f64> {
    require_positive("radius", radius)?;
    require_positive("a", a)?;
    Ok(a * b * radius.powf(b - 3.0) / FOUR_PI)
}

/// `k γ ρ^(γ-1)` at the monomial-relation density.
pub fn monomial_sound_speed_squared(radius: f64, a: f64, b: f64, eos: &PolytropicEos) -> Result<f64> {
    let rho = monomial_density(radius, a, b)?;
    if !(rho > 0.0) {
        return Err(domain(format!("monomial density must be positive, got {rho} (b = {b})")));
    }
    eos.sound_speed_squared(rho)
}

/// `M = a R^b` with `a > 0`, `b ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonomialRelation {
    pub a: f64,
    pub b: f64,
}

impl MonomialRelation {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        require_positive("a", a)?;
        if b == 0.0 {
            return Err(Error::ExcludedExponent);
        }
        if !b.is_finite() {
            return Err(domain(format!("exponent b must be finite, got {b}")));
        }
        Ok(Self { a, b })
    }

    pub fn mass(&self, radius: f64) -> f64 {
        self.a * radius.powf(self.b)
    }

    pub fn residual(&self, mass: f64, radius: f64) -> f64 {
        mass - self.mass(radius)
    }

    pub fn density(&self, radius: f64) -> Result<f64> {
        monomial_density(radius, self.a, self.b)
    }

    /// Re-expresses a relation fitted in solar masses and solar radii in
    /// geometrized km units.
    pub fn solar_to_geometrized(&self) -> Self {
        Self {
            a: solar_mass_to_km(self.a) / solar_radius_to_km(1.0).powf(self.b),
            b: self.b,
        }
    }
}

/// Text form `a b`.
impl fmt::Display for MonomialRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} {:?}", self.a, self.b)
    }
}

impl FromStr for MonomialRelation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let fields: Vec<&str> = s.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::Parse {
                row: 1,
                message: format!("expected `a b`, got `{}`", s.trim()),
            });
        }
        let parse = |x: &str| parse_number(x).map_err(|message| Error::Parse { row: 1, message });
        MonomialRelation::new(parse(fields[0])?, parse(fields[1])?)
    }
}

/// One monomial term `coefficient · M^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coefficient: f64,
    pub exponent: f64,
}

impl Term {
    pub fn new(coefficient: f64, exponent: f64) -> Self {
        Self { coefficient, exponent }
    }

    fn value(&self, m: f64) -> f64 {
        if self.exponent == 0.0 {
            self.coefficient
        } else {
            self.coefficient * m.powf(self.exponent)
        }
    }

    fn derivative(&self, m: f64) -> f64 {
        if self.exponent == 0.0 {
            0.0
        } else {
            self.coefficient * self.exponent * m.powf(self.exponent - 1.0)
        }
    }
}

/// `R = p(M) / q(M)` with `p(M) = Σ aᵢ M^bᵢ`, `q(M) = Σ cⱼ M^dⱼ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalRelation {
    pub p: Vec<Term>,
    pub q: Vec<Term>,
}

impl RationalRelation {
    pub fn new(p: Vec<Term>, q: Vec<Term>) -> Result<Self> {
        if p.is_empty() || q.is_empty() {
            return Err(Error::InvalidParameter("rational relation needs nonempty p and q".into()));
        }
        let all_finite = p
            .iter()
            .chain(&q)
            .all(|t| t.coefficient.is_finite() && t.exponent.is_finite());
        if !all_finite {
            return Err(Error::InvalidParameter("rational relation terms must be finite".into()));
        }
        if q.iter().all(|t| t.coefficient == 0.0) {
            return Err(Error::InvalidParameter("q(M) is identically zero".into()));
        }
        Ok(Self { p, q })
    }

    /// Convenience constructor from `(coefficient, exponent)` pairs.
    pub fn from_pairs(p: &[(f64, f64)], q: &[(f64, f64)]) -> Result<Self> {
        let conv = |v: &[(f64, f64)]| v.iter().map(|&(c, e)| Term::new(c, e)).collect();
        Self::new(conv(p), conv(q))
    }

    pub fn p_at(&self, m: f64) -> f64 {
        self.p.iter().map(|t| t.value(m)).sum()
    }

    pub fn q_at(&self, m: f64) -> f64 {
        self.q.iter().map(|t| t.value(m)).sum()
    }

    fn is_singular(&self, m: f64) -> bool {
        self.q_at(m).abs() < SINGULAR_EPS * (1.0 + self.p_at(m).abs())
    }

    pub fn radius(&self, m: f64) -> Result<f64> {
        if self.is_singular(m) {
            return Err(Error::SingularPoint { mass: m });
        }
        Ok(self.p_at(m) / self.q_at(m))
    }

    /// `dR/dM = (p' q − p q') / q²`.
    pub fn radius_derivative(&self, m: f64) -> Result<f64> {
        if self.is_singular(m) {
            return Err(Error::SingularPoint { mass: m });
        }
        let (p, q) = (self.p_at(m), self.q_at(m));
        let dp: f64 = self.p.iter().map(|t| t.derivative(m)).sum();
        let dq: f64 = self.q.iter().map(|t| t.derivative(m)).sum();
        Ok((dp * q - p * dq) / (q * q))
    }

    pub fn residual(&self, mass: f64, radius: f64) -> f64 {
        self.p_at(mass) - radius * self.q_at(mass)
    }

    /// Re-expresses a relation in solar masses and solar radii in
    /// geometrized km units: `c M^e` becomes `c M_sun^(-e) M^e`, and `p`
    /// picks up a factor `R_sun`.
    pub fn solar_to_geometrized(&self) -> Self {
        let (ms, rs) = (solar_mass_to_km(1.0), solar_radius_to_km(1.0));
        let scale = |terms: &[Term], factor: f64| {
            terms
                .iter()
                .map(|t| Term::new(t.coefficient * factor * ms.powf(-t.exponent), t.exponent))
                .collect()
        };
        Self {
            p: scale(&self.p, rs),
            q: scale(&self.q, 1.0),
        }
    }
}

/// Text form: one `p,coefficient,exponent` or `q,coefficient,exponent`
/// row per term.
impl fmt::Display for RationalRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.p {
            writeln!(f, "p,{:?},{:?}", t.coefficient, t.exponent)?;
        }
        for t in &self.q {
            writeln!(f, "q,{:?},{:?}", t.coefficient, t.exponent)?;
        }
        Ok(())
    }
}

impl FromStr for RationalRelation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (mut p, mut q) = (Vec::new(), Vec::new());
        for (idx, raw) in s.lines().enumerate() {
            let row = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(Error::Parse {
                    row,
                    message: format!("expected `p|q,coefficient,exponent`, got `{line}`"),
                });
            }
            let num = |x: &str| parse_number(x).map_err(|message| Error::Parse { row, message });
            let term = Term::new(num(fields[1])?, num(fields[2])?);
            match fields[0] {
                "p" => p.push(term),
                "q" => q.push(term),
                other => {
                    return Err(Error::Parse {
                        row,
                        message: format!("unknown polynomial tag `{other}`"),
                    })
                }
            }
        }
        RationalRelation::new(p, q)
    }
}

pub fn rational_radius(mass: f64, rel: &RationalRelation) -> Result<f64> {
    rel.radius(mass)
}

/// Inverts `R(M)` on the branch containing `seed_m`.
///
/// A bracket is searched by scanning ±50% around the seed; the sign change
/// nearest to the seed that does not straddle a pole wins. Newton steps are
/// used inside the bracket and replaced by bisection whenever they leave it.
pub fn rational_invert_for_mass(radius: f64, rel: &RationalRelation, seed_m: f64) -> Result<f64> {
    if !seed_m.is_finite() || !radius.is_finite() {
        return Err(domain("radius and seed mass must be finite"));
    }
    if rel.is_singular(seed_m) {
        return Err(Error::SingularPoint { mass: seed_m });
    }
    let tol = 1e-10 * radius.abs().max(1.0);
    let f = |m: f64| rel.radius(m).map(|r| r - radius);

    let result = match find_bracket(rel, radius, seed_m) {
        Some((lo, hi)) => safeguarded_newton(rel, radius, lo, hi, seed_m.clamp(lo, hi)),
        None => plain_newton(rel, radius, seed_m),
    }?;

    let slope = rel.radius_derivative(result)?;
    // A double root converges only to ~sqrt(eps); treat such slopes as a fold.
    if slope.abs() * result.abs() < 1e-7 * radius.abs().max(f64::MIN_POSITIVE) {
        return Err(Error::FoldPoint { mass: result });
    }
    let residual = f(result)?;
    if residual.abs() >= tol {
        return Err(Error::InversionFailure(format!(
            "residual {residual} above tolerance {tol} at M = {result}"
        )));
    }
    Ok(result)
}

fn find_bracket(rel: &RationalRelation, radius: f64, seed: f64) -> Option<(f64, f64)> {
    const CELLS: usize = 128;
    let half = 0.5 * seed.abs().max(1e-300);
    let (lo, hi) = (seed - half, seed + half);
    let h = (hi - lo) / CELLS as f64;
    let sample = |m: f64| -> Option<(f64, f64)> {
        let q = rel.q_at(m);
        let p = rel.p_at(m);
        (q.is_finite() && p.is_finite()).then_some((p - radius * q, q))
    };

    let mut best: Option<(f64, f64, f64)> = None;
    let mut prev = (lo, sample(lo));
    for i in 1..=CELLS {
        let m = lo + h * i as f64;
        let cur = sample(m);
        if let (Some((g0, q0)), Some((g1, q1))) = (prev.1, cur) {
            // Work with R(M) − R = g/q; a sign change in q marks a pole.
            let pole = q0.signum() != q1.signum();
            let f0 = g0 / q0;
            let f1 = g1 / q1;
            if !pole && (f0 == 0.0 || f0.signum() != f1.signum()) {
                let dist = (0.5 * (prev.0 + m) - seed).abs();
                if best.map_or(true, |b| dist < b.2) {
                    best = Some((prev.0, m, dist));
                }
            }
        }
        prev = (m, cur);
    }
    best.map(|(a, b, _)| (a, b))
}

fn safeguarded_newton(rel: &RationalRelation, radius: f64, mut lo: f64, mut hi: f64, start: f64) -> Result<f64> {
    let f = |m: f64| rel.radius(m).map(|r| r - radius);
    let f_lo = f(lo)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    let mut x = start;
    for _ in 0..MAX_NEWTON {
        let fx = f(x)?;
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == f_lo.signum() {
            lo = x;
        } else {
            hi = x;
        }
        let slope = rel.radius_derivative(x)?;
        let newton = x - fx / slope;
        let next = if slope != 0.0 && newton > lo.min(hi) && newton < lo.max(hi) {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(1e-300) {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::InversionFailure(format!(
        "no convergence within {MAX_NEWTON} iterations in [{lo}, {hi}]"
    )))
}

fn plain_newton(rel: &RationalRelation, radius: f64, seed: f64) -> Result<f64> {
    let mut x = seed;
    for _ in 0..MAX_NEWTON {
        let fx = rel.radius(x)? - radius;
        let slope = rel.radius_derivative(x)?;
        if slope == 0.0 {
            return Err(Error::FoldPoint { mass: x });
        }
        let step = fx / slope;
        // Never move more than half the current magnitude.
        let limit = 0.5 * x.abs().max(1e-300);
        let next = x - step.clamp(-limit, limit);
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs() {
            return Ok(next);
        }
        x = next;
    }
    Err(Error::InversionFailure(format!(
        "no bracket near seed {seed} and Newton did not converge"
    )))
}

/// `ρ = M'(R) / (4π R²)` on the branch through `seed_m`, where
/// `M'(R) = 1 / (dR/dM)`.
pub fn rational_density(radius: f64, rel: &RationalRelation, seed_m: f64) -> Result<f64> {
    require_positive("radius", radius)?;
    let m = rational_invert_for_mass(radius, rel, seed_m)?;
    let slope = rel.radius_derivative(m)?;
    if slope == 0.0 {
        return Err(Error::FoldPoint { mass: m });
    }
    Ok(1.0 / slope / (FOUR_PI * radius * radius))
}

/// `M = A R²` for a Newtonian polytrope.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NewtonianPolytropeRelation {
    pub k: f64,
    pub n: f64,
    pub rho_c: f64,
    pub surface_combination: f64,
}

impl NewtonianPolytropeRelation {
    pub fn new(k: f64, n: f64, rho_c: f64, surface_combination: f64) -> Result<Self> {
        newtonian_a(k, n, rho_c, surface_combination)?;
        Ok(Self { k, n, rho_c, surface_combination })
    }

    pub fn coefficient(&self) -> f64 {
        newtonian_a(self.k, self.n, self.rho_c, self.surface_combination)
            .expect("validated at construction")
    }

    pub fn mass(&self, radius: f64) -> f64 {
        self.coefficient() * radius * radius
    }

    pub fn residual(&self, mass: f64, radius: f64) -> f64 {
        mass - self.mass(radius)
    }

    /// `α² = (n+1) k ρ_c^((1-n)/n) / (4π)`. With `s = ρ_c M / R²`, the
    /// relation `M = A R²` holds exactly when this equals one.
    pub fn length_scale_squared(&self) -> f64 {
        (self.n + 1.0) * self.k * self.rho_c.powf((1.0 - self.n) / self.n) / FOUR_PI
    }
}

/// The three relation families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum MassRadiusRelation {
    Monomial(MonomialRelation),
    Rational(RationalRelation),
    NewtonianPolytrope(NewtonianPolytropeRelation),
}

impl MassRadiusRelation {
    /// `g(M, R)`; zero on the relation.
    pub fn residual(&self, mass: f64, radius: f64) -> f64 {
        match self {
            MassRadiusRelation::Monomial(r) => r.residual(mass, radius),
            MassRadiusRelation::Rational(r) => r.residual(mass, radius),
            MassRadiusRelation::NewtonianPolytrope(r) => r.residual(mass, radius),
        }
    }
}
