//! Brute-force check of every bound against the condition it was derived
//! from, on 1000-point log grids around the bound.
//!
//!     cargo run --example verify_bounds

use stellar_bounds::bounds::{
    log_grid, newtonian_causal_k_bound, theorem1_parameter_bound, theorem2_density_bound,
    theorem3_causal_k_bound_monomial, theorem3_causal_k_bound_rational, verify_bound_by_bruteforce, BoundResult,
    UnitSystem, VerificationContext,
};
use stellar_bounds::relations::{MonomialRelation, RationalRelation};

fn main() -> stellar_bounds::Result<()> {
    let quad = RationalRelation::from_pairs(&[(1.0, 2.0), (1.0, 0.0)], &[(1.0, 1.0)])?;
    let bounds: Vec<BoundResult> = vec![
        newtonian_causal_k_bound(1.5, 1.0, 2.0, 0.5)?,
        newtonian_causal_k_bound(4.0, 1.0, 2.0, 0.5)?,
        theorem1_parameter_bound(4.0, 2.0, -1.5)?,
        theorem2_density_bound(&MonomialRelation::new(0.85, 0.67)?, 120.0, 1.0, 3.0, UnitSystem::Solar)?.density,
        theorem3_causal_k_bound_monomial(0.85, 0.67, 3.0, 1.0)?,
        theorem3_causal_k_bound_rational(&quad, 5.0 / 3.0, 2.5, 1.8)?,
    ];
    println!("{:<26} {:<26} {:>7} {:>10} {:>14}", "route", "bound", "checked", "violations", "outside, pass");
    for b in &bounds {
        let ctx = VerificationContext::from_bound(b)?;
        let rep = verify_bound_by_bruteforce(b, &ctx, &log_grid(b.value / 100.0, b.value * 100.0, 1000))?;
        println!(
            "{:<26} {:<26} {:>7} {:>10} {:>14}",
            format!("{:?}", b.route),
            b.to_string(),
            rep.checked,
            rep.violations,
            rep.outside_passing
        );
    }
    Ok(())
}
