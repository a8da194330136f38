//! Command-line frontend. JSON summaries go to stdout, bulk CSV to files.
//!
//! Exit codes: 0 success, 2 invalid input, 3 no physical solution (or a
//! bound that fails verification), 4 numerical failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bounds::{
    log_grid, newtonian_causal_k_bound, closed_form_monomial_k_bound, theorem1_parameter_bound, theorem2_density_bound,
    theorem3_causal_k_bound_monomial, theorem3_causal_k_bound_rational, verify_bound_by_bruteforce, BoundResult,
    MassDerivativeBounds, UnitSystem, VerificationContext, VerificationReport,
};
use crate::catalog::{fit_monomial, fit_rational, load_catalog_path, CatalogOptions, DEFAULT_MASS_FLOOR};
use crate::eos::{parse_number, PolytropicEos};
use crate::error::{Error, ErrorCategory, Result};
use crate::relations::{MassRadiusRelation, MonomialRelation, RationalRelation};
use crate::scan::{run_scan, scan_to_json, solve_star, write_scan_csv, Axis, Mode, ScanSpec, Spacing};
use crate::structure::{integrate_lane_emden_to, surface_data, IntegrationOptions};
use crate::units::{km_to_solar_mass, solar_mass_to_km, solar_radius_to_km};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NO_SOLUTION: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

fn real(s: &str) -> std::result::Result<f64, String> {
    parse_number(s)
}

#[derive(Debug, Parser)]
#[command(name = "stellar-bounds", version, about = "Polytropic stellar structure and mass-radius obstruction bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one star and print a JSON summary; optionally write the profile CSV.
    Solve(SolveArgs),
    /// Solve the Lane-Emden equation for index n.
    LaneEmden(LaneEmdenArgs),
    /// Sweep a (k, gamma, rho_c) grid described by a config file.
    Scan(ScanArgs),
    /// Derive a bound on an EOS or relation parameter.
    Bound(BoundArgs),
    /// Check a bound against its direct condition on a grid.
    Verify(VerifyArgs),
    /// Fit a mass-radius relation to a catalog CSV.
    Fit(FitArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Tov,
    Newtonian,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Tov => Mode::Tov,
            ModeArg::Newtonian => Mode::Newtonian,
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Polytropic constant k (geometrized, km^(2γ-2)).
    #[arg(long, value_parser = real)]
    pub k: f64,
    /// Pressure offset k0 (geometrized, km^-2).
    #[arg(long, value_parser = real, default_value = "0")]
    pub k0: f64,
    /// Adiabatic exponent gamma > 1 (dimensionless, fractions like 5/3 allowed).
    #[arg(long, value_parser = real)]
    pub gamma: f64,
    /// Central density (geometrized, km^-2).
    #[arg(long = "rho-c", value_parser = real)]
    pub rho_c: f64,
    #[arg(long, value_enum, default_value = "tov")]
    pub mode: ModeArg,
    /// Relative integration tolerance.
    #[arg(long, value_parser = real, default_value = "1e-10")]
    pub rtol: f64,
    /// Write the r,p,rho,m profile here (geometrized units).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Report mass and radius in km instead of solar masses and solar radii.
    #[arg(long)]
    pub geometrized: bool,
}

#[derive(Debug, Args)]
pub struct LaneEmdenArgs {
    /// Polytropic index n >= 0 (dimensionless).
    #[arg(long, value_parser = real)]
    pub n: f64,
    /// Stop where theta reaches this value (dimensionless, default the first zero).
    #[arg(long = "theta-surface", value_parser = real, default_value = "0")]
    pub theta_surface: f64,
    #[arg(long, value_parser = real, default_value = "1e-10")]
    pub rtol: f64,
    /// Write xi,theta,theta_prime here.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Scan config: `k`, `gamma`, `rho_c` axes as `min max count [linear|log]`, `mode`, `rtol`.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Output file (stdout if absent). Masses and radii are in km.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Worker threads (default: available processors).
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    /// Treat masses and radii as km instead of solar masses and solar radii.
    #[arg(long, global = true)]
    pub geometrized: bool,
    #[command(subcommand)]
    pub kind: BoundKind,
}

#[derive(Debug, Subcommand)]
pub enum BoundKind {
    /// Causal k threshold of a Newtonian polytrope on M = A R^2.
    Newtonian {
        /// Polytropic index n (n != 3).
        #[arg(long, value_parser = real)]
        n: f64,
        /// Mass (solar masses, or km with --geometrized).
        #[arg(long, value_parser = real)]
        mass: f64,
        /// Radius (solar radii, or km with --geometrized).
        #[arg(long, value_parser = real)]
        radius: f64,
        /// Surface combination |p'(R)|/rho_rel (geometrized, km^-3).
        #[arg(long, value_parser = real)]
        s: f64,
    },
    /// Bound on a in M = a R^b from M <= m and R <= r (units of the inputs).
    Parameter {
        /// Mass upper bound.
        #[arg(long, value_parser = real)]
        m: f64,
        /// Radius upper bound.
        #[arg(long, value_parser = real)]
        r: f64,
        /// Exponent b != 0.
        #[arg(long, value_parser = real, allow_hyphen_values = true)]
        b: f64,
    },
    /// Density bound from M'(R0) <= M0, with gamma and R0 companions for M = a R^b.
    Density {
        #[arg(long, value_parser = real)]
        a: f64,
        #[arg(long, value_parser = real, allow_hyphen_values = true)]
        b: f64,
        /// Bound on dM/dR (solar masses per solar radius, or dimensionless with --geometrized).
        #[arg(long, value_parser = real)]
        m0: f64,
        /// Evaluation radius (solar radii, or km).
        #[arg(long, value_parser = real)]
        r0: f64,
        #[arg(long, value_parser = real)]
        gamma: f64,
    },
    /// Causal k bound on the monomial relation M = a R^b at R0.
    Monomial {
        /// Amplitude a (solar units unless --geometrized).
        #[arg(long, value_parser = real)]
        a: f64,
        #[arg(long, value_parser = real, allow_hyphen_values = true)]
        b: f64,
        #[arg(long, value_parser = real)]
        gamma: f64,
        /// Radius (solar radii, or km).
        #[arg(long, value_parser = real)]
        r0: f64,
        /// Evaluate the closed form [(ab/4π)^β R0^(β-1)]^-1 instead.
        #[arg(long)]
        closed_form: bool,
    },
    /// Causal k bound on a rational relation R = p(M)/q(M) at R0.
    Rational {
        /// Relation file with `p,coefficient,exponent` / `q,coefficient,exponent` rows.
        #[arg(long)]
        relation: PathBuf,
        #[arg(long, value_parser = real)]
        gamma: f64,
        /// Radius (solar radii, or km).
        #[arg(long, value_parser = real)]
        r0: f64,
        /// Mass on the wanted branch (solar masses, or km).
        #[arg(long = "seed-m", value_parser = real)]
        seed_m: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpacingArg {
    Linear,
    Log,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// JSON written by `bound`.
    #[arg(long)]
    pub bound: PathBuf,
    /// Grid minimum of the bounded quantity (default value/100).
    #[arg(long, value_parser = real, allow_hyphen_values = true)]
    pub min: Option<f64>,
    /// Grid maximum (default value*100).
    #[arg(long, value_parser = real, allow_hyphen_values = true)]
    pub max: Option<f64>,
    #[arg(long, default_value = "1000")]
    pub count: usize,
    #[arg(long, value_enum, default_value = "log")]
    pub spacing: SpacingArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Monomial,
    Rational,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// CSV with header mass,radius[,label][,weight] (solar masses, solar radii).
    #[arg(long)]
    pub catalog: PathBuf,
    #[arg(long, value_enum, default_value = "monomial")]
    pub model: ModelArg,
    /// Exponents of p(M), comma separated (rational model).
    #[arg(long = "p-exponents", value_parser = real, value_delimiter = ',', allow_hyphen_values = true)]
    pub p_exponents: Option<Vec<f64>>,
    /// Exponents of q(M), comma separated; the first coefficient is fixed to 1.
    #[arg(long = "q-exponents", value_parser = real, value_delimiter = ',', allow_hyphen_values = true)]
    pub q_exponents: Option<Vec<f64>>,
    /// Minimum accepted mass (solar masses).
    #[arg(long = "mass-floor", value_parser = real, default_value_t = DEFAULT_MASS_FLOOR)]
    pub mass_floor: f64,
    /// Only use records with this label.
    #[arg(long)]
    pub label: Option<String>,
    /// Also write the fitted relation in its text form.
    #[arg(long = "relation-out")]
    pub relation_out: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e.category() {
        ErrorCategory::Input => EXIT_INPUT,
        ErrorCategory::NoSolution => EXIT_NO_SOLUTION,
        ErrorCategory::Numerical => EXIT_NUMERICAL,
    }
}

fn emit<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    writeln!(out, "{}", crate::json::to_string(value)?)?;
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Solve(a) => solve(a, out),
        Command::LaneEmden(a) => lane_emden(a, out),
        Command::Scan(a) => scan(a, out),
        Command::Bound(a) => bound(a, out),
        Command::Verify(a) => verify(a, out),
        Command::Fit(a) => fit(a, out),
    }
}

#[derive(Serialize)]
struct SolveSummary {
    mode: String,
    k: f64,
    k0: f64,
    gamma: f64,
    rho_c: f64,
    units: &'static str,
    mass: f64,
    radius: f64,
    compactness: f64,
    causal: bool,
    v2_center: f64,
    surface_combination: Option<f64>,
    points: usize,
}

fn solve(a: SolveArgs, out: &mut dyn Write) -> Result<i32> {
    let eos = PolytropicEos::new(a.k, a.k0, a.gamma)?;
    let opts = IntegrationOptions::with_rtol(a.rtol);
    let mode = Mode::from(a.mode);
    let verdict = eos.is_causal_at_center(a.rho_c)?;
    let prof = solve_star(eos, a.rho_c, mode, &opts)?;
    if let Some(path) = &a.output {
        prof.write_csv(create(path)?)?;
    }
    let (units, mass, radius) = if a.geometrized {
        ("km", prof.total_mass, prof.surface_radius)
    } else {
        ("solar", km_to_solar_mass(prof.total_mass), prof.surface_radius / solar_radius_to_km(1.0))
    };
    emit(
        out,
        &SolveSummary {
            mode: mode.to_string(),
            k: a.k,
            k0: a.k0,
            gamma: a.gamma,
            rho_c: a.rho_c,
            units,
            mass,
            radius,
            compactness: prof.compactness(),
            causal: verdict.causal,
            v2_center: verdict.v2_max,
            surface_combination: surface_data(&prof).ok().map(|s| s.rho_rel_combination),
            points: prof.len(),
        },
    )?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct LaneEmdenSummary {
    n: f64,
    theta_surface: f64,
    xi1: f64,
    theta_prime_xi1: f64,
    mass_integral: f64,
    points: usize,
}

fn lane_emden(a: LaneEmdenArgs, out: &mut dyn Write) -> Result<i32> {
    let sol = integrate_lane_emden_to(a.n, a.theta_surface, &IntegrationOptions::with_rtol(a.rtol))?.finite()?;
    if let Some(path) = &a.output {
        let mut w = csv::Writer::from_writer(create(path)?);
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["xi", "theta", "theta_prime"]).map_err(io)?;
        for i in 0..sol.xi.len() {
            w.write_record([sol.xi[i], sol.theta[i], sol.theta_prime[i]].map(|v| format!("{v:.16e}")))
                .map_err(io)?;
        }
        w.flush()?;
    }
    emit(
        out,
        &LaneEmdenSummary {
            n: sol.n,
            theta_surface: sol.theta_surface,
            xi1: sol.xi1,
            theta_prime_xi1: sol.theta_prime_at_xi1,
            mass_integral: sol.mass_integral(),
            points: sol.xi.len(),
        },
    )?;
    Ok(EXIT_OK)
}

fn scan(a: ScanArgs, out: &mut dyn Write) -> Result<i32> {
    let spec: ScanSpec = read(&a.config)?.parse()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = a.jobs {
        if j == 0 {
            return Err(Error::InvalidParameter("--jobs must be at least 1".into()));
        }
        builder = builder.num_threads(j);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start worker pool: {e}")))?;
    let points = pool.install(|| run_scan(&spec))?;
    let mut sink: Box<dyn Write + '_> = match &a.output {
        Some(p) => Box::new(create(p)?),
        None => Box::new(&mut *out),
    };
    match a.format {
        Format::Csv => write_scan_csv(&points, &mut sink)?,
        Format::Json => writeln!(sink, "{}", scan_to_json(&points)?)?,
    }
    Ok(EXIT_OK)
}

fn bound(a: BoundArgs, out: &mut dyn Write) -> Result<i32> {
    let geo = a.geometrized;
    let len = |r: f64| if geo { r } else { solar_radius_to_km(r) };
    let mass = |m: f64| if geo { m } else { solar_mass_to_km(m) };
    match a.kind {
        BoundKind::Newtonian { n, mass: m, radius, s } => {
            emit(out, &newtonian_causal_k_bound(n, mass(m), len(radius), s)?)?;
        }
        BoundKind::Parameter { m, r, b } => emit(out, &theorem1_parameter_bound(m, r, b)?)?,
        BoundKind::Density { a, b, m0, r0, gamma } => {
            let units = if geo { UnitSystem::Geometrized } else { UnitSystem::Solar };
            emit(out, &theorem2_density_bound(&MonomialRelation::new(a, b)?, m0, r0, gamma, units)?)?;
        }
        BoundKind::Monomial { a, b, gamma, r0, closed_form } => {
            let rel = MonomialRelation::new(a, b)?;
            let rel = if geo { rel } else { rel.solar_to_geometrized() };
            let res = if closed_form {
                closed_form_monomial_k_bound(rel.a, rel.b, gamma, len(r0))?
            } else {
                theorem3_causal_k_bound_monomial(rel.a, rel.b, gamma, len(r0))?
            };
            emit(out, &res)?;
        }
        BoundKind::Rational { relation, gamma, r0, seed_m } => {
            let rel: RationalRelation = read(&relation)?.parse()?;
            let rel = if geo { rel } else { rel.solar_to_geometrized() };
            emit(out, &theorem3_causal_k_bound_rational(&rel, gamma, len(r0), mass(seed_m))?)?;
        }
    }
    Ok(EXIT_OK)
}

/// Accepts a plain bound or the density-bound bundle.
fn parse_bound(text: &str) -> Result<BoundResult> {
    let bad = |e: serde_json::Error| Error::Parse { row: e.line(), message: e.to_string() };
    let value: serde_json::Value = serde_json::from_str(text).map_err(bad)?;
    if value.get("density").is_some() {
        let bundle: MassDerivativeBounds = serde_json::from_value(value).map_err(bad)?;
        Ok(bundle.density)
    } else {
        serde_json::from_value(value).map_err(bad)
    }
}

#[derive(Serialize)]
struct VerifySummary<'a> {
    bound: &'a BoundResult,
    grid_min: f64,
    grid_max: f64,
    report: VerificationReport,
}

fn verify(a: VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let bound = parse_bound(&read(&a.bound)?)?;
    let ctx = VerificationContext::from_bound(&bound)?;
    let lo = a.min.unwrap_or(bound.value.abs() / 100.0);
    let hi = a.max.unwrap_or(bound.value.abs() * 100.0);
    let axis = Axis::new(
        lo,
        hi,
        a.count,
        match a.spacing {
            SpacingArg::Linear => Spacing::Linear,
            SpacingArg::Log => Spacing::Log,
        },
    )?;
    let grid = if axis.spacing == Spacing::Log { log_grid(lo, hi, a.count) } else { axis.values() };
    let report = verify_bound_by_bruteforce(&bound, &ctx, &grid)?;
    emit(out, &VerifySummary { bound: &bound, grid_min: lo, grid_max: hi, report })?;
    Ok(if report.passed() { EXIT_OK } else { EXIT_NO_SOLUTION })
}

fn fit(a: FitArgs, out: &mut dyn Write) -> Result<i32> {
    let mut records = load_catalog_path(&a.catalog, &CatalogOptions { mass_floor: a.mass_floor })?;
    if let Some(label) = &a.label {
        records.retain(|r| r.label.as_deref() == Some(label.as_str()));
    }
    let result = match a.model {
        ModelArg::Monomial => fit_monomial(&records)?,
        ModelArg::Rational => {
            let need = |v: &Option<Vec<f64>>, flag: &str| {
                v.clone()
                    .ok_or_else(|| Error::InvalidParameter(format!("rational fit needs --{flag}")))
            };
            fit_rational(&records, &need(&a.p_exponents, "p-exponents")?, &need(&a.q_exponents, "q-exponents")?)?
        }
    };
    if let Some(path) = &a.relation_out {
        let text = match &result.relation {
            MassRadiusRelation::Monomial(m) => format!("{m}\n"),
            MassRadiusRelation::Rational(r) => r.to_string(),
            MassRadiusRelation::NewtonianPolytrope(_) => unreachable!("fits produce monomial or rational relations"),
        };
        fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    emit(out, &result)?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("stellar-bounds").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn solve_summary() {
        let (code, out, _) = run_args(&["solve", "--k", "100", "--gamma", "2", "--rho-c", "5e-4", "--mode", "tov"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(v["mass"].as_f64().unwrap().is_finite());
        assert_eq!(v["causal"], true);
        assert_eq!(v["units"], "solar");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_args(&["solve", "--k", "1", "--gamma", "0.5", "--rho-c", "1"]).0, EXIT_INPUT);
        let (code, _, err) = run_args(&["solve", "--k", "1", "--gamma", "1.2", "--rho-c", "1", "--mode", "newtonian"]);
        assert_eq!(code, EXIT_NO_SOLUTION);
        assert!(err.contains("no finite radius"), "{err}");
        assert_eq!(run_args(&["lane-emden", "--n", "5"]).0, EXIT_NO_SOLUTION);
        assert_eq!(run_args(&["solve", "--k", "abc"]).0, EXIT_INPUT);
        assert_eq!(run_args(&["bound", "newtonian", "--n", "3", "--mass", "1", "--radius", "1", "--s", "1"]).0, EXIT_INPUT);
        assert_eq!(run_args(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn every_subcommand_has_help() {
        for sub in ["solve", "lane-emden", "scan", "bound", "verify", "fit"] {
            let (code, out, _) = run_args(&[sub, "--help"]);
            assert_eq!(code, 0, "{sub}");
            assert!(out.contains("Usage"), "{sub}");
        }
        let (_, out, _) = run_args(&["solve", "--help"]);
        assert!(out.contains("km^-2"));
    }

    #[test]
    fn bound_json_is_deterministic() {
        let args = ["bound", "--geometrized", "monomial", "--a", "0.85", "--b", "0.67", "--gamma", "3", "--r0", "1"];
        let (c1, o1, _) = run_args(&args);
        let (c2, o2, _) = run_args(&args);
        assert_eq!((c1, c2), (0, 0));
        assert_eq!(o1, o2);
        let b: BoundResult = serde_json::from_str(&o1).unwrap();
        assert!((b.value / 162.297_195_957_340_54 - 1.0).abs() < 1e-13);
    }

    #[test]
    fn density_bound_bundle_parses_for_verify() {
        let (code, out, _) = run_args(&["bound", "density", "--a", "0.85", "--b", "0.67", "--m0", "120", "--r0", "1", "--gamma", "3"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["classification"], "small_radius");
        assert_eq!(parse_bound(&out).unwrap().quantity, "rho");
    }
}
