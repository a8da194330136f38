//! First zeros of the Lane-Emden equation and the dimensionless mass.
//!
//!     cargo run --example lane_emden

use stellar_bounds::structure::{integrate_lane_emden, IntegrationOptions, LaneEmden};

fn main() -> stellar_bounds::Result<()> {
    let opts = IntegrationOptions::default();
    println!("{:>5} {:>14} {:>14}", "n", "xi1", "-xi1^2 theta'");
    for n in [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0] {
        match integrate_lane_emden(n, &opts)? {
            LaneEmden::Finite(sol) => println!("{n:>5} {:>14.9} {:>14.9}", sol.xi1, sol.mass_integral()),
            LaneEmden::InfiniteRadius { .. } => println!("{n:>5} {:>14} {:>14}", "inf", "-"),
        }
    }
    Ok(())
}
