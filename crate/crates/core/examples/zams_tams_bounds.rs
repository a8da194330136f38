//! Bounds for main-sequence style monomial relations M = a R^b with
//! a = 0.85 and b = 0.67 (ZAMS) or b = 1.78 (TAMS), M0 = 120 Msun.
//!
//!     cargo run --example zams_tams_bounds

use stellar_bounds::bounds::{
    closed_form_monomial_k_bound, theorem1_parameter_bound, theorem2_density_bound, theorem3_causal_k_bound_monomial,
    GammaConstraint, UnitSystem,
};
use stellar_bounds::relations::MonomialRelation;

fn main() -> stellar_bounds::Result<()> {
    let gamma = 3.0;
    let m0 = 120.0;
    for (label, b) in [("ZAMS", 0.67), ("TAMS", 1.78)] {
        let rel = MonomialRelation::new(0.85, b)?;
        println!("{label}: M = {} R^{}", rel.a, rel.b);

        let t1 = theorem1_parameter_bound(m0, 10.0, b)?;
        println!("  a from M <= {m0}, R <= 10:  {t1}  [{}]", t1.note.as_deref().unwrap_or(""));

        let t2 = theorem2_density_bound(&rel, m0, 1.0, gamma, UnitSystem::Solar)?;
        println!(
            "  rho from M'(1) <= {m0}:      {}  ({:.3e} km^-2)",
            t2.density,
            t2.density.geometrized_value.unwrap()
        );
        match &t2.gamma {
            GammaConstraint::Bound(g) => println!("  gamma:                      {g}"),
            other => println!("  gamma:                      {other:?}"),
        }
        if let (Some(r), Some(class)) = (&t2.radius, t2.classification) {
            println!("  R0:                         {r}  -> {class:?}");
        }

        let geo = rel.solar_to_geometrized();
        let r0 = 1.0;
        let causal = theorem3_causal_k_bound_monomial(rel.a, rel.b, gamma, r0)?;
        let closed = closed_form_monomial_k_bound(rel.a, rel.b, gamma, r0)?;
        println!("  causal k at R0 = 1 (relation units): {causal}; closed form: {closed}");
        println!("  same in km: a = {:.4e}, b = {}", geo.a, geo.b);
    }
    Ok(())
}
