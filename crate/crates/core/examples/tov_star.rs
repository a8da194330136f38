//! A relativistic polytrope, the same star in the Newtonian limit, and a
//! constant-density star against the interior Schwarzschild solution.
//!
//!     cargo run --example tov_star

use std::f64::consts::PI;

use stellar_bounds::eos::PolytropicEos;
use stellar_bounds::structure::{integrate_tov, integrate_tov_constant_density, newtonian_star, surface_data, IntegrationOptions};
use stellar_bounds::units::{km_to_solar_mass, solar_radius_to_km};

fn main() -> stellar_bounds::Result<()> {
    let eos = PolytropicEos::new(100.0, 0.0, 2.0)?;
    let rho_c = 5e-4;
    let opts = IntegrationOptions::default();

    let gr = integrate_tov(eos, rho_c, &opts)?;
    let newt = newtonian_star(eos, rho_c, &opts)?;
    let verdict = eos.is_causal_at_center(rho_c)?;
    println!("k = 100, gamma = 2, rho_c = {rho_c} km^-2 (v^2 at centre = {:.4}, causal: {})", verdict.v2_max, verdict.causal);
    for (name, p) in [("TOV", &gr), ("Newtonian", &newt)] {
        println!(
            "{name:>10}: R = {:.4} km, M = {:.4} km = {:.4} Msun, 2M/R = {:.4}, {} points",
            p.surface_radius,
            p.total_mass,
            km_to_solar_mass(p.total_mass),
            p.compactness(),
            p.len()
        );
    }
    println!("Newtonian |p'(R)|/rho_rel = {:.6e} km^-3", surface_data(&newt)?.rho_rel_combination);
    println!("radius in solar radii: {:.3e}", gr.surface_radius / solar_radius_to_km(1.0));

    // Uniform density with 2M/R = 0.3.
    let rho0 = 1e-3;
    let radius = (0.9 / (8.0 * PI * rho0)).sqrt();
    let mass = 0.15 * radius;
    let outer = (1.0 - 0.3f64).sqrt();
    let p_c = rho0 * (1.0 - outer) / (3.0 * outer - 1.0);
    let cd = integrate_tov_constant_density(rho0, p_c, &opts)?;
    let worst = cd.r[..cd.len() - 1]
        .iter()
        .zip(&cd.p)
        .map(|(r, p)| {
            let inner = (1.0 - 2.0 * mass * r * r / radius.powi(3)).sqrt();
            let exact = rho0 * (inner - outer) / (3.0 * outer - inner);
            (p / exact - 1.0).abs()
        })
        .fold(0.0, f64::max);
    println!("constant density: R = {:.9} km (exact {radius:.9}), worst pressure error {worst:.2e}", cd.surface_radius);
    Ok(())
}
