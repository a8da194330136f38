//! Mass-radius curves of Newtonian polytropes and their power laws
//! R ~ rho_c^((1-n)/2n), M ~ rho_c^((3-n)/2n).
//!
//!     cargo run --example newtonian_curve

use stellar_bounds::eos::PolytropicEos;
use stellar_bounds::scan::{log_log_slope, mass_radius_curve, Axis, Mode, Spacing};
use stellar_bounds::structure::IntegrationOptions;

fn main() -> stellar_bounds::Result<()> {
    let axis = Axis::new(0.01, 1.0, 15, Spacing::Log)?;
    let opts = IntegrationOptions::default();
    println!("{:>4} {:>12} {:>12} {:>12} {:>12}", "n", "dlnR/dlnrho", "expected", "dlnM/dlnR", "expected");
    for n in [0.5, 1.0, 1.5, 2.0, 3.0, 4.0] {
        let eos = PolytropicEos::from_index(1.0, 0.0, n)?;
        let curve = mass_radius_curve(eos, &axis, Mode::Newtonian, &opts)?;
        let rho: Vec<f64> = curve.iter().map(|p| p.rho_c).collect();
        let r: Vec<f64> = curve.iter().map(|p| p.radius).collect();
        let m: Vec<f64> = curve.iter().map(|p| p.mass).collect();
        let mr = if n == 1.0 { f64::NAN } else { log_log_slope(&r, &m) };
        println!(
            "{n:>4} {:>12.6} {:>12.6} {:>12.6} {:>12.6}",
            log_log_slope(&rho, &r),
            (1.0 - n) / (2.0 * n),
            mr,
            (3.0 - n) / (1.0 - n)
        );
    }
    Ok(())
}
