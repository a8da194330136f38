//! Geometrized units (G = c = 1) with the kilometre as the base length.
//!
//! Every solver in this crate works in these units: masses are lengths
//! (GM/c²), densities and pressures are inverse squared lengths
//! (Gρ/c² and Gp/c⁴). Conversions to astrophysical and cgs units only
//! happen at the edges (catalogs, command line).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical constants in cgs units.
pub mod constants {
    /// Newtonian constant of gravitation, cm³ g⁻¹ s⁻² (CODATA 2018).
    pub const G_CGS: f64 = 6.674_300_000_00e-8;
    /// Speed of light in vacuum, cm s⁻¹ (exact).
    pub const C_CGS: f64 = 2.997_924_580_00e10;
    /// Solar mass, g.
    pub const SOLAR_MASS_G: f64 = 1.988_470_000_00e33;
    /// Nominal solar radius, cm.
    pub const SOLAR_RADIUS_CM: f64 = 6.957_000_000_00e10;
    /// Centimetres per kilometre.
    pub const CM_PER_KM: f64 = 1.0e5;
}

use constants::*;

/// Physical dimension of a quantity.
///
/// In geometrized units mass and length are both measured in km and
/// density and pressure are both measured in km⁻², but the tag is kept so
/// that a pressure is never converted back as a mass.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dimension {
    Mass,
    Length,
    Density,
    Pressure,
    Dimensionless,
}

impl Dimension {
    /// Power of length carried by this dimension in geometrized units.
    pub fn length_power(self) -> i32 {
        match self {
            Dimension::Mass | Dimension::Length => 1,
            Dimension::Density | Dimension::Pressure => -2,
            Dimension::Dimensionless => 0,
        }
    }
}

/// A value expressed in geometrized units (km-based).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeomQuantity {
    pub value: f64,
    pub dimension: Dimension,
}

/// Units accepted at the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhysicalUnit {
    SolarMass,
    Gram,
    Kilometer,
    Centimeter,
    SolarRadius,
    GramPerCm3,
    DynePerCm2,
    /// Already geometrized, dimensionless.
    Unity,
}

impl PhysicalUnit {
    pub const ALL: [PhysicalUnit; 8] = [
        PhysicalUnit::SolarMass,
        PhysicalUnit::Gram,
        PhysicalUnit::Kilometer,
        PhysicalUnit::Centimeter,
        PhysicalUnit::SolarRadius,
        PhysicalUnit::GramPerCm3,
        PhysicalUnit::DynePerCm2,
        PhysicalUnit::Unity,
    ];

    pub fn dimension(self) -> Dimension {
        match self {
            PhysicalUnit::SolarMass | PhysicalUnit::Gram => Dimension::Mass,
            PhysicalUnit::Kilometer | PhysicalUnit::Centimeter | PhysicalUnit::SolarRadius => {
                Dimension::Length
            }
            PhysicalUnit::GramPerCm3 => Dimension::Density,
            PhysicalUnit::DynePerCm2 => Dimension::Pressure,
            PhysicalUnit::Unity => Dimension::Dimensionless,
        }
    }

    /// Multiplicative factor taking a value in this unit to geometrized km units.
    pub fn factor(self) -> f64 {
        let g_over_c2 = G_CGS / (C_CGS * C_CGS);
        match self {
            PhysicalUnit::SolarMass => SOLAR_MASS_G * g_over_c2 / CM_PER_KM,
            PhysicalUnit::Gram => g_over_c2 / CM_PER_KM,
            PhysicalUnit::Kilometer | PhysicalUnit::Unity => 1.0,
            PhysicalUnit::Centimeter => 1.0 / CM_PER_KM,
            PhysicalUnit::SolarRadius => SOLAR_RADIUS_CM / CM_PER_KM,
            // cm⁻² → km⁻²
            PhysicalUnit::GramPerCm3 => g_over_c2 * CM_PER_KM * CM_PER_KM,
            PhysicalUnit::DynePerCm2 => g_over_c2 / (C_CGS * C_CGS) * CM_PER_KM * CM_PER_KM,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            PhysicalUnit::SolarMass => "Msun",
            PhysicalUnit::Gram => "g",
            PhysicalUnit::Kilometer => "km",
            PhysicalUnit::Centimeter => "cm",
            PhysicalUnit::SolarRadius => "Rsun",
            PhysicalUnit::GramPerCm3 => "g/cm3",
            PhysicalUnit::DynePerCm2 => "dyn/cm2",
            PhysicalUnit::Unity => "1",
        }
    }
}

impl fmt::Display for PhysicalUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for PhysicalUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unit = match s.trim() {
            "Msun" | "msun" | "M_sun" | "solar_mass" => PhysicalUnit::SolarMass,
            "g" => PhysicalUnit::Gram,
            "km" => PhysicalUnit::Kilometer,
            "cm" => PhysicalUnit::Centimeter,
            "Rsun" | "rsun" | "R_sun" | "solar_radius" => PhysicalUnit::SolarRadius,
            "g/cm3" | "g/cm^3" | "g cm-3" => PhysicalUnit::GramPerCm3,
            "dyn/cm2" | "dyn/cm^2" | "dyn cm-2" => PhysicalUnit::DynePerCm2,
            "1" | "geom" | "dimensionless" => PhysicalUnit::Unity,
            other => return Err(Error::UnknownUnit(other.to_string())),
        };
        Ok(unit)
    }
}

pub fn to_geometrized(value: f64, unit: PhysicalUnit) -> GeomQuantity {
    GeomQuantity {
        value: value * unit.factor(),
        dimension: unit.dimension(),
    }
}

/// Parses the unit tag first; unknown tags are rejected.
pub fn to_geometrized_tagged(value: f64, unit: &str) -> Result<GeomQuantity> {
    Ok(to_geometrized(value, unit.parse()?))
}

/// Converts back to `unit`. Fails when the quantity's dimension does not
/// match the target unit.
pub fn from_geometrized(quantity: GeomQuantity, unit: PhysicalUnit) -> Result<f64> {
    if quantity.dimension != unit.dimension() {
        return Err(Error::InvalidParameter(format!(
            "cannot express a {:?} quantity in {}",
            quantity.dimension, unit
        )));
    }
    Ok(quantity.value / unit.factor())
}

/// Solar masses → km.
pub fn solar_mass_to_km(m: f64) -> f64 {
    m * PhysicalUnit::SolarMass.factor()
}

/// km → solar masses.
pub fn km_to_solar_mass(m: f64) -> f64 {
    m / PhysicalUnit::SolarMass.factor()
}

/// Solar radii → km.
pub fn solar_radius_to_km(r: f64) -> f64 {
    r * PhysicalUnit::SolarRadius.factor()
}
