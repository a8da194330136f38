//! A rational relation R = p(M)/q(M): branch-aware inversion, density from
//! the continuity equation and the causal k bound.
//!
//!     cargo run --example rational_relation

use stellar_bounds::bounds::theorem3_causal_k_bound_rational;
use stellar_bounds::relations::{rational_density, rational_invert_for_mass, RationalRelation};

fn main() -> stellar_bounds::Result<()> {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/rational.txt"))?;
    let rel: RationalRelation = text.parse()?;
    let radius = 2.5;
    for seed in [0.6, 1.8] {
        let m = rational_invert_for_mass(radius, &rel, seed)?;
        println!("R = {radius}, seed {seed}: M = {m}, dR/dM = {}", rel.radius_derivative(m)?);
    }
    println!("rho(2.5) on the M = 2 branch: {:.12e}", rational_density(radius, &rel, 1.8)?);
    for gamma in [1.0, 4.0 / 3.0, 5.0 / 3.0, 2.0] {
        println!("gamma = {gamma:.4}: {}", theorem3_causal_k_bound_rational(&rel, gamma, radius, 1.8)?);
    }
    // The lower branch has dR/dM < 0, so the continuity density is negative.
    if let Err(e) = theorem3_causal_k_bound_rational(&rel, 2.0, radius, 0.6) {
        println!("M = 0.5 branch: {e}");
    }
    // At the fold R = 2, M = 1 the relation cannot be inverted.
    if let Err(e) = rational_invert_for_mass(2.0, &rel, 1.05) {
        println!("R = 2: {e}");
    }
    Ok(())
}
