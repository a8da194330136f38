//! Causal threshold on k for a Newtonian polytrope with given M, R and
//! surface combination. Below n = 3 the causal side is k above the
//! threshold, above n = 3 it is k below.
//!
//!     cargo run --example causal_k_bound

use stellar_bounds::bounds::{log_grid, newtonian_causal_k_bound, verify_bound_by_bruteforce, VerificationContext};

fn main() -> stellar_bounds::Result<()> {
    let (mass, radius, s) = (1.0, 1.0, 1.0);
    for n in [1.0, 2.0, 2.9, 3.1, 4.0, 4.5] {
        let bound = newtonian_causal_k_bound(n, mass, radius, s)?;
        let ctx = VerificationContext::from_bound(&bound)?;
        let grid = log_grid(bound.value / 100.0, bound.value * 100.0, 1000);
        let rep = verify_bound_by_bruteforce(&bound, &ctx, &grid)?;
        println!(
            "n = {n:<4} {bound:<28} ({}), checked {}, violations {}, causal outside {}",
            bound.direction, rep.checked, rep.violations, rep.outside_passing
        );
    }
    match newtonian_causal_k_bound(3.0, mass, radius, s) {
        Ok(b) => println!("n = 3: {b}"),
        Err(e) => println!("n = 3: {e}"),
    }
    Ok(())
}
