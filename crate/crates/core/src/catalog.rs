//! Mass-radius catalogs in solar units and least-squares fits of the
//! monomial and rational relation families.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relations::{MassRadiusRelation, MonomialRelation, RationalRelation, Term};

pub const DEFAULT_MASS_FLOOR: f64 = 0.1;

/// One observed star, mass in solar masses and radius in solar radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogRecord {
    pub mass: f64,
    pub radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub weight: f64,
}

impl CatalogRecord {
    pub fn new(mass: f64, radius: f64) -> Self {
        Self { mass, radius, label: None, weight: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CatalogOptions {
    pub mass_floor: f64,
}

impl Default for CatalogOptions {
    fn default() -> Self {
        Self { mass_floor: DEFAULT_MASS_FLOOR }
    }
}

#[derive(Debug, Deserialize)]
struct RawRow {
    mass: String,
    radius: String,
    #[serde(default)]
    label: Option<String>,
    #[serde(default)]
    weight: Option<String>,
}

/// Reads CSV with header `mass,radius[,label][,weight]`. Rows are numbered
/// from 1, not counting the header.
pub fn load_catalog<R: Read>(source: R, opts: &CatalogOptions) -> Result<Vec<CatalogRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(source);
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse { row: 0, message: e.to_string() })?
        .clone();
    for required in ["mass", "radius"] {
        if !headers.iter().any(|h| h == required) {
            return Err(Error::Parse {
                row: 0,
                message: format!("header must contain `{required}`, got `{}`", headers.iter().collect::<Vec<_>>().join(",")),
            });
        }
    }

    let mut out = Vec::new();
    for (idx, row) in reader.deserialize::<RawRow>().enumerate() {
        let row_no = idx + 1;
        let raw = row.map_err(|e| Error::Parse { row: row_no, message: e.to_string() })?;
        let num = |field: &str, s: &str| {
            s.parse::<f64>().map_err(|_| Error::Parse {
                row: row_no,
                message: format!("{field} `{s}` is not a number"),
            })
        };
        let mass = num("mass", &raw.mass)?;
        let radius = num("radius", &raw.radius)?;
        let weight = match raw.weight.as_deref() {
            None | Some("") => 1.0,
            Some(w) => num("weight", w)?,
        };
        let invalid = |message: String| Error::Validation { row: row_no, message };
        if !mass.is_finite() || mass < opts.mass_floor {
            return Err(invalid(format!(
                "mass {mass} is below the catalog floor of {} solar masses",
                opts.mass_floor
            )));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(invalid(format!("radius must be positive, got {radius}")));
        }
        if !(weight.is_finite() && weight > 0.0) {
            return Err(invalid(format!("weight must be positive, got {weight}")));
        }
        let label = raw.label.filter(|l| !l.is_empty());
        out.push(CatalogRecord { mass, radius, label, weight });
    }
    Ok(out)
}

pub fn load_catalog_path(path: &Path, opts: &CatalogOptions) -> Result<Vec<CatalogRecord>> {
    let file = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    load_catalog(file, opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    Monomial,
    Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: FitModel,
    pub parameters: BTreeMap<String, f64>,
    pub relation: MassRadiusRelation,
    /// Weighted RMS of the fit-space residuals: `ln M - ln a - b ln R`
    /// for monomials, `p(M) - R q(M)` for rationals.
    pub residual_rms: f64,
    pub n_points: usize,
}

/// Records in a canonical order so that fits do not depend on input order.
fn sorted(records: &[CatalogRecord]) -> Vec<&CatalogRecord> {
    let mut v: Vec<&CatalogRecord> = records.iter().collect();
    v.sort_by(|x, y| {
        x.radius
            .total_cmp(&y.radius)
            .then(x.mass.total_cmp(&y.mass))
            .then(x.weight.total_cmp(&y.weight))
    });
    v
}

fn weighted_rms(residuals: impl Iterator<Item = (f64, f64)>) -> f64 {
    let (num, den) = residuals.fold((0.0, 0.0), |(n, d), (r, w)| (n + w * r * r, d + w));
    (num / den).sqrt()
}

/// Weighted least squares of `ln M = ln a + b ln R`.
pub fn fit_monomial(records: &[CatalogRecord]) -> Result<FitResult> {
    let recs = sorted(records);
    let distinct = recs.windows(2).filter(|w| w[0].radius != w[1].radius).count() + 1;
    if recs.len() < 2 || distinct < 2 {
        return Err(Error::Underdetermined(format!(
            "monomial fit needs at least 2 distinct radii, got {}",
            if recs.is_empty() { 0 } else { distinct }
        )));
    }
    let pts: Vec<(f64, f64, f64)> = recs.iter().map(|r| (r.radius.ln(), r.mass.ln(), r.weight)).collect();
    let wsum: f64 = pts.iter().map(|p| p.2).sum();
    let xbar = pts.iter().map(|p| p.2 * p.0).sum::<f64>() / wsum;
    let ybar = pts.iter().map(|p| p.2 * p.1).sum::<f64>() / wsum;
    let sxx: f64 = pts.iter().map(|p| p.2 * (p.0 - xbar).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| p.2 * (p.0 - xbar) * (p.1 - ybar)).sum();
    let b = sxy / sxx;
    let ln_a = ybar - b * xbar;
    let a = ln_a.exp();
    let rel = MonomialRelation::new(a, b)?;
    let residual_rms = weighted_rms(pts.iter().map(|p| (p.1 - ln_a - b * p.0, p.2)));
    Ok(FitResult {
        model: FitModel::Monomial,
        parameters: BTreeMap::from([("a".to_string(), a), ("b".to_string(), b)]),
        relation: MassRadiusRelation::Monomial(rel),
        residual_rms,
        n_points: recs.len(),
    })
}

/// Linear least squares of `p(M) - R q(M) = 0` over the coefficients of
/// `p` and `q`, with the first `q` coefficient fixed to 1.
pub fn fit_rational(records: &[CatalogRecord], p_exponents: &[f64], q_exponents: &[f64]) -> Result<FitResult> {
    if p_exponents.is_empty() || q_exponents.is_empty() {
        return Err(Error::InvalidParameter("rational fit needs at least one p and one q exponent".into()));
    }
    let recs = sorted(records);
    let unknowns = p_exponents.len() + q_exponents.len() - 1;
    if recs.len() < unknowns {
        return Err(Error::Underdetermined(format!(
            "{unknowns} coefficients but only {} records",
            recs.len()
        )));
    }

    let rows = recs.len();
    let mut design = DMatrix::<f64>::zeros(rows, unknowns);
    let mut rhs = DVector::<f64>::zeros(rows);
    for (i, r) in recs.iter().enumerate() {
        let sw = r.weight.sqrt();
        for (j, e) in p_exponents.iter().enumerate() {
            design[(i, j)] = sw * r.mass.powf(*e);
        }
        for (j, e) in q_exponents.iter().enumerate().skip(1) {
            design[(i, p_exponents.len() + j - 1)] = -sw * r.radius * r.mass.powf(*e);
        }
        rhs[i] = sw * r.radius * r.mass.powf(q_exponents[0]);
    }

    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let cutoff = smax * 1e-12 * rows.max(unknowns) as f64;
    let rank = svd.singular_values.iter().filter(|s| **s > cutoff).count();
    if smax == 0.0 || rank < unknowns {
        return Err(Error::Underdetermined(format!(
            "design matrix has rank {rank} for {unknowns} coefficients"
        )));
    }
    let coeffs = svd
        .solve(&rhs, cutoff)
        .map_err(|e| Error::NonConvergence(format!("least-squares solve failed: {e}")))?;

    let p: Vec<Term> = p_exponents.iter().enumerate().map(|(j, e)| Term::new(coeffs[j], *e)).collect();
    let mut q = vec![Term::new(1.0, q_exponents[0])];
    q.extend(q_exponents.iter().enumerate().skip(1).map(|(j, e)| Term::new(coeffs[p_exponents.len() + j - 1], *e)));
    let rel = RationalRelation::new(p, q)?;

    let residual_rms = weighted_rms(recs.iter().map(|r| (rel.residual(r.mass, r.radius), r.weight)));
    let mut parameters = BTreeMap::new();
    for (i, t) in rel.p.iter().enumerate() {
        parameters.insert(format!("p{i}"), t.coefficient);
    }
    for (i, t) in rel.q.iter().enumerate() {
        parameters.insert(format!("q{i}"), t.coefficient);
    }
    Ok(FitResult {
        model: FitModel::Rational,
        parameters,
        relation: MassRadiusRelation::Rational(rel),
        residual_rms,
        n_points: rows,
    })
}
