//! Geometrized units with km as the length unit.
//!
//!     cargo run --example units

use stellar_bounds::units::{from_geometrized, to_geometrized, to_geometrized_tagged, PhysicalUnit};

fn main() -> stellar_bounds::Result<()> {
    let sun = to_geometrized(1.0, PhysicalUnit::SolarMass);
    println!("1 Msun = {:.6} km", sun.value);
    println!("1 Rsun = {:.1} km", to_geometrized(1.0, PhysicalUnit::SolarRadius).value);

    let nuclear = to_geometrized(2.8e14, PhysicalUnit::GramPerCm3);
    println!("2.8e14 g/cm^3 = {:.4e} km^-2", nuclear.value);
    println!("  back: {:.4e} g/cm^3", from_geometrized(nuclear, PhysicalUnit::GramPerCm3)?);
    // The same km^-2 value read as a pressure is a different physical quantity.
    let p = to_geometrized(1e35, PhysicalUnit::DynePerCm2);
    println!("1e35 dyn/cm^2 = {:.4e} km^-2", p.value);
    match from_geometrized(p, PhysicalUnit::GramPerCm3) {
        Ok(v) => println!("{v}"),
        Err(e) => println!("  as a density: {e}"),
    }

    let q = to_geometrized_tagged(1.4, "Msun")?;
    println!("1.4 Msun -> {:.4} km", q.value);
    match from_geometrized(q, PhysicalUnit::GramPerCm3) {
        Ok(v) => println!("{v}"),
        Err(e) => println!("mass as density: {e}"),
    }
    match to_geometrized_tagged(1.0, "furlong") {
        Ok(v) => println!("{v:?}"),
        Err(e) => println!("{e}"),
    }
    Ok(())
}
