use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use dirac_basis::acceptance;
use dirac_basis::approx::{ball_grid, builtin_target, fit_polynomial, sup_error, FitProblem, BUILTIN_TARGETS};
use dirac_basis::basis::{build_franklin, expand, BasisReport, ExpandMode, ExpandOptions, ExpansionReport, ExpansionSystem, FranklinBasis, Target};
use dirac_basis::poisson::{BoundaryFunction, SampledBoundary};
use dirac_basis::sphere::{chebyshev_r_grid, norm_hardy, HardyMode, QuadratureRule};
use dirac_basis::{Clifford, Quaternion, SymFunction};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::config::{Arithmetic, Config, KERNEL, ORTHONORMALITY};

/// Whether every checked invariant held.
pub type Passed = bool;

pub fn read_json<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("{}: malformed input", path.display()))
}

/// Pretty JSON with a trailing newline, to `out` or stdout.
pub fn write_json<T: Serialize>(value: &T, out: Option<&Path>) -> anyhow::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_basis(path: &Path) -> anyhow::Result<FranklinBasis> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    FranklinBasis::from_json(&text).with_context(|| format!("{}: malformed basis file", path.display()))
}

#[derive(Serialize)]
struct BuildSummary<'a> {
    out: &'a Path,
    max_degree: u32,
    elements: usize,
    dropped: usize,
}

pub fn basis_build(cfg: &Config, out: &Path) -> anyhow::Result<Passed> {
    let basis = build_franklin(cfg.max_degree)?;
    std::fs::write(out, basis.to_json()? + "\n").with_context(|| format!("writing {}", out.display()))?;
    write_json(&BuildSummary { out, max_degree: cfg.max_degree, elements: basis.len(), dropped: basis.dropped.len() }, None)?;
    Ok(true)
}

#[derive(Serialize)]
struct VerifyOutput {
    #[serde(flatten)]
    report: BasisReport,
    arithmetic: Arithmetic,
    kernel_tolerance: f64,
}

pub fn basis_verify(cfg: &Config, file: &Path, out: Option<&Path>) -> anyhow::Result<Passed> {
    let basis = read_basis(file)?;
    let mut report = basis.verify(cfg.tolerance(ORTHONORMALITY))?;
    let kernel_tolerance = cfg.tolerance(KERNEL);
    let kernel_ok = match cfg.arithmetic {
        Arithmetic::Rational => report.kernel_exact,
        Arithmetic::Float => report.kernel_residual < kernel_tolerance,
    };
    report.passed = kernel_ok && report.real_deviation < report.tolerance;
    let passed = report.passed;
    write_json(&VerifyOutput { report, arithmetic: cfg.arithmetic, kernel_tolerance }, out)?;
    Ok(passed)
}

#[derive(Serialize)]
struct ExpandOutput {
    terms: usize,
    #[serde(flatten)]
    report: ExpansionReport,
    /// Hardy 2-norm of the final partial sum.
    partial_sum_hardy2: f64,
}

pub fn expand_cmd(cfg: &Config, basis: &Path, input: &Path, terms: usize, mode: ExpandMode, out: Option<&Path>) -> anyhow::Result<Passed> {
    let basis = read_basis(basis)?;
    let h: SymFunction = read_json(input)?;
    if h.n() != 4 || h.l() != 1 {
        bail!("{}: expansion input must be quaternion-valued on R^4", input.display());
    }
    let opts = ExpandOptions { mode, ..ExpandOptions::default() };
    let report = expand(&Target::Sym(h), &basis, terms, &opts)?;
    let system = ExpansionSystem::new(&basis, mode)?;
    let k = system.prefix(terms);
    let sum = system.partial_sum(&report.coefficients, k)?;
    let rule = QuadratureRule::quad_sphere(cfg.quad_order)?;
    let hardy = norm_hardy(|x| sum.eval_q(x).expect("l = 1"), 2.0, &chebyshev_r_grid(cfg.r_grid), &rule, HardyMode::Standard)?;
    let passed = report.coefficient_bound_holds;
    write_json(&ExpandOutput { terms, report, partial_sum_hardy2: hardy }, out)?;
    Ok(passed)
}

#[derive(Serialize)]
struct ExtendPoint {
    point: [f64; 4],
    value: Clifford,
    /// Difference from the extension at twice the quadrature order.
    error_estimate: f64,
}

pub fn poisson_extend(cfg: &Config, boundary: &Path, points: &Path, out: Option<&Path>) -> anyhow::Result<Passed> {
    let f: SymFunction = read_json(boundary)?;
    if f.n() != 4 {
        bail!("{}: boundary data must live on R^4", boundary.display());
    }
    let points: Vec<[f64; 4]> = read_json(points)?;
    let f = BoundaryFunction::Sym(f);
    let coarse_rule = QuadratureRule::quad_sphere(cfg.quad_order)?;
    let fine_rule = QuadratureRule::quad_sphere(2 * cfg.quad_order)?;
    let coarse = SampledBoundary::new(&f, &coarse_rule)?;
    let fine = SampledBoundary::new(&f, &fine_rule)?;
    let rows = points
        .iter()
        .map(|z| {
            let value = coarse.extend(z)?;
            let error_estimate = value.try_sub(&fine.extend(z)?)?.abs();
            Ok(ExtendPoint { point: *z, value, error_estimate })
        })
        .collect::<dirac_basis::Result<Vec<_>>>()?;
    write_json(&rows, out)?;
    Ok(true)
}

/// One sample of a fitting target read from a file.
#[derive(Deserialize)]
struct Sample {
    point: [f64; 4],
    value: Quaternion,
}

#[derive(Serialize)]
struct FitOutput {
    target: String,
    degree: u32,
    samples: usize,
    sup_error: f64,
    polynomial: SymFunction,
}

pub fn approx_fit(target: &str, degree: u32, grid: usize, out: Option<&Path>) -> anyhow::Result<Passed> {
    let prob = match builtin_target(target) {
        Some(f) => {
            if grid < 2 {
                bail!("grid must have at least 2 points per axis");
            }
            FitProblem::from_fn(&ball_grid(grid), degree, f)
        }
        None => {
            let path = PathBuf::from(target);
            if !path.exists() {
                bail!("unknown target `{target}`: not a file and not one of {}", BUILTIN_TARGETS.join(", "));
            }
            let samples: Vec<Sample> = read_json(&path)?;
            FitProblem { samples: samples.into_iter().map(|s| (s.point, s.value)).collect(), degree }
        }
    };
    let polynomial = fit_polynomial(&prob)?;
    let sup_error = sup_error(&polynomial, &prob.samples)?;
    write_json(&FitOutput { target: target.to_string(), degree, samples: prob.samples.len(), sup_error, polynomial }, out)?;
    Ok(true)
}

pub fn verify_all(criteria: &[u32], out: Option<&Path>) -> anyhow::Result<Passed> {
    let known: Vec<u32> = acceptance::CRITERIA.iter().map(|(id, _)| *id).collect();
    if let Some(bad) = criteria.iter().find(|id| !known.contains(id)) {
        bail!("unknown criterion {bad}; expected 1..={}", known.len());
    }
    let ids = if criteria.is_empty() { known } else { criteria.to_vec() };
    let mut outcomes = Vec::with_capacity(ids.len());
    for id in ids {
        let outcome = acceptance::run(id);
        println!("{outcome}");
        outcomes.push(outcome);
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("{} passed, {failed} failed", outcomes.len() - failed);
    if let Some(path) = out {
        write_json(&outcomes, Some(path))?;
    }
    Ok(failed == 0)
}
