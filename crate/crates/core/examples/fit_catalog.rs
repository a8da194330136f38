//! Fit monomial and rational relations to a labelled catalog and feed the
//! fits into the causal k bounds.
//!
//!     cargo run --example fit_catalog [path/to/catalog.csv]

use stellar_bounds::bounds::{theorem3_causal_k_bound_monomial, theorem3_causal_k_bound_rational};
use stellar_bounds::catalog::{fit_monomial, fit_rational, load_catalog_path, CatalogOptions, CatalogRecord};
use stellar_bounds::relations::MassRadiusRelation;

fn main() -> stellar_bounds::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/zams_tams.csv").to_string());
    let records = load_catalog_path(path.as_ref(), &CatalogOptions::default())?;
    println!("{} records from {path}", records.len());

    for label in ["ZAMS", "TAMS"] {
        let subset: Vec<CatalogRecord> = records.iter().filter(|r| r.label.as_deref() == Some(label)).cloned().collect();
        let fit = fit_monomial(&subset)?;
        let (a, b) = (fit.parameters["a"], fit.parameters["b"]);
        println!("{label}: a = {a:.4}, b = {b:.4}, rms(ln M) = {:.4}, n = {}", fit.residual_rms, fit.n_points);
        println!("      causal k at R0 = 1: {}", theorem3_causal_k_bound_monomial(a, b, 3.0, 1.0)?);

        // R = (p0 M^2 + p1 M) / (1 + q1 M)
        let rat = fit_rational(&subset, &[2.0, 1.0], &[0.0, 1.0])?;
        println!("      rational fit {:?}, rms = {:.4}", rat.parameters, rat.residual_rms);
        if let MassRadiusRelation::Rational(rel) = &rat.relation {
            let seed = subset[subset.len() / 2].mass;
            let r0 = rel.radius(seed)?;
            match theorem3_causal_k_bound_rational(rel, 3.0, r0, seed) {
                Ok(bound) => println!("      rational causal k at R0 = {r0:.3}: {bound}"),
                Err(e) => println!("      rational bound at R0 = {r0:.3}: {e}"),
            }
        }
    }
    Ok(())
}
