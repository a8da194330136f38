//! Sweep a (k, gamma, rho_c) grid from a config file and summarize it.
//!
//!     cargo run --example scan_grid [path/to/scan.conf]

use stellar_bounds::scan::{run_scan, write_scan_csv, PointStatus, ScanSpec};

fn main() -> stellar_bounds::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/data/scan.conf").to_string());
    let spec: ScanSpec = std::fs::read_to_string(&path)?.parse()?;
    let points = run_scan(&spec)?;

    let ok = points.iter().filter(|p| p.status == PointStatus::Ok).count();
    let causal = points.iter().filter(|p| p.causal).count();
    let heaviest = points
        .iter()
        .filter(|p| p.causal)
        .filter_map(|p| p.mass.map(|m| (m, p)))
        .max_by(|a, b| a.0.total_cmp(&b.0));
    println!("{} points ({} mode): {ok} integrated, {causal} causal at the centre", points.len(), spec.mode);
    if let Some((m, p)) = heaviest {
        println!("heaviest causal star: M = {m:.4} km at k = {}, gamma = {}, rho_c = {:.3e}", p.k, p.gamma, p.rho_c);
    }
    write_scan_csv(&points[..5.min(points.len())], std::io::stdout())?;
    Ok(())
}
