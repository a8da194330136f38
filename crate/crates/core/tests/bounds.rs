//! Every bound against the condition it came from, on 1000-point grids.

use stellar_bounds::bounds::{
    log_grid, newtonian_causal_k_bound, closed_form_monomial_k_bound, theorem1_parameter_bound, theorem2_density_bound,
    theorem3_causal_k_bound_monomial, theorem3_causal_k_bound_rational, verify_bound_by_bruteforce, BoundResult,
    Direction, UnitSystem, VerificationContext,
};
use stellar_bounds::relations::{MonomialRelation, RationalRelation};

fn check(bound: &BoundResult) {
    let ctx = VerificationContext::from_bound(bound).unwrap();
    let grid = log_grid(bound.value / 1e3, bound.value * 1e3, 1000);
    let rep = verify_bound_by_bruteforce(bound, &ctx, &grid).unwrap();
    assert_eq!(rep.grid_size, 1000);
    assert!(rep.checked > 0, "{bound}: nothing checked");
    assert_eq!(rep.violations, 0, "{bound}: {rep:?}");
    assert!(rep.passed());
}

#[test]
fn newtonian_causal_bounds() {
    for n in [0.5, 1.0, 2.0, 2.9, 3.1, 4.0, 5.0] {
        for (m, r, s) in [(1.0, 1.0, 1.0), (0.3, 10.0, 1e-3), (2.0, 5.0, 0.1)] {
            let b = newtonian_causal_k_bound(n, m, r, s).unwrap();
            assert_eq!(b.direction, if n < 3.0 { Direction::Lower } else { Direction::Upper });
            check(&b);
        }
    }
}

#[test]
fn parameter_bound_from_mass_radius_limits() {
    for b in [-2.0, -0.5, 0.5, 1.78] {
        check(&theorem1_parameter_bound(3.0, 7.0, b).unwrap());
    }
}

#[test]
fn density_bound_from_mass_derivative() {
    for (a, b) in [(0.85, 0.67), (0.85, 1.78), (2.0, -1.0)] {
        let rel = MonomialRelation::new(a, b).unwrap();
        for units in [UnitSystem::Solar, UnitSystem::Geometrized] {
            let t2 = theorem2_density_bound(&rel, 120.0, 1.0, 3.0, units).unwrap();
            check(&t2.density);
        }
    }
}

#[test]
fn monomial_causal_bounds() {
    for (a, b, gamma, r0) in [(0.85, 0.67, 3.0, 1.0), (0.85, 1.78, 2.0, 1.0), (2.0, 1.5, 5.0 / 3.0, 0.5), (1e-4, 0.67, 4.0 / 3.0, 10.0)] {
        let bound = theorem3_causal_k_bound_monomial(a, b, gamma, r0).unwrap();
        check(&bound);
        // The closed form is never above the exact threshold here.
        let closed_form = closed_form_monomial_k_bound(a, b, gamma, r0).unwrap();
        assert!(closed_form.value <= bound.value, "{closed_form} vs {bound}");
    }
}

#[test]
fn rational_causal_bounds() {
    let quad = RationalRelation::from_pairs(&[(1.0, 2.0), (1.0, 0.0)], &[(1.0, 1.0)]).unwrap();
    let sat = RationalRelation::from_pairs(&[(3.0, 1.0)], &[(1.0, 0.0), (0.5, 1.0)]).unwrap();
    for gamma in [1.2, 5.0 / 3.0, 2.5] {
        check(&theorem3_causal_k_bound_rational(&quad, gamma, 2.5, 1.8).unwrap());
        check(&theorem3_causal_k_bound_rational(&sat, gamma, 3.0, 1.0).unwrap());
    }
}
