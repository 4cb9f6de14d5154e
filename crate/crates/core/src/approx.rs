//! Least-squares approximation of quaternion-valued functions by polynomials
//! `sum_beta c_beta x^beta` with left quaternion coefficients.
//!
//! Monomials are real, so the fit splits into four independent real least
//! squares problems, one per quaternion component.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::Quaternion;
use crate::error::{Error, Result};
use crate::symfun::{MultiIndex, SymFunction};

/// Singular values below this fraction of the largest count as zero.
pub const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitProblem {
    pub samples: Vec<([f64; 4], Quaternion)>,
    pub degree: u32,
}

impl FitProblem {
    pub fn from_fn(grid: &[[f64; 4]], degree: u32, f: impl Fn(&[f64; 4]) -> Quaternion + Sync) -> Self {
        FitProblem { samples: grid.par_iter().map(|x| (*x, f(x))).collect(), degree }
    }
}

fn monomial_value(beta: &MultiIndex, x: &[f64; 4]) -> f64 {
    beta.0.iter().zip(x).map(|(&b, v)| v.powi(b as i32)).product()
}

/// Points of the uniform `k^4` grid on `[-1, 1]^4` that lie in the closed ball.
pub fn ball_grid(k: usize) -> Vec<[f64; 4]> {
    assert!(k >= 2, "ball grid needs at least two points per axis");
    let t = |i: usize| -1.0 + 2.0 * i as f64 / (k - 1) as f64;
    let mut out = Vec::new();
    for a in 0..k {
        for b in 0..k {
            for c in 0..k {
                for d in 0..k {
                    let x = [t(a), t(b), t(c), t(d)];
                    if x.iter().map(|v| v * v).sum::<f64>() <= 1.0 + 1e-12 {
                        out.push(x);
                    }
                }
            }
        }
    }
    out
}

fn check_distinct(samples: &[([f64; 4], Quaternion)]) -> Result<()> {
    // adding 0.0 folds -0.0 into 0.0
    let mut pts: Vec<[u64; 4]> = samples.iter().map(|(x, _)| x.map(|v| (v + 0.0).to_bits())).collect();
    pts.sort_unstable();
    if pts.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidArgument("sample points must be pairwise distinct".into()));
    }
    Ok(())
}

/// Least-squares polynomial of degree `prob.degree` through the samples.
pub fn fit_polynomial(prob: &FitProblem) -> Result<SymFunction> {
    let monos = MultiIndex::all_up_to(4, prob.degree);
    let (rows, cols) = (prob.samples.len(), monos.len());
    if rows < cols {
        return Err(Error::UnderDetermined { rank: rows, unknowns: cols });
    }
    check_distinct(&prob.samples)?;
    let design = DMatrix::from_fn(rows, cols, |i, j| monomial_value(&monos[j], &prob.samples[i].0));
    let svd = design.svd(true, true);
    let smax = svd.singular_values.max();
    let rank = svd.singular_values.iter().filter(|s| **s > RANK_TOLERANCE * smax).count();
    if rank < cols {
        return Err(Error::UnderDetermined { rank, unknowns: cols });
    }
    let solutions = (0..4)
        .map(|k| {
            let rhs = DVector::from_fn(rows, |i, _| *prob.samples[i].1.coord(k));
            svd.solve(&rhs, RANK_TOLERANCE * smax).map_err(|e| Error::Internal(e.to_string()))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut f = SymFunction::zero4();
    for (j, beta) in monos.into_iter().enumerate() {
        let c = Quaternion::new(solutions[0][j], solutions[1][j], solutions[2][j], solutions[3][j]);
        if !c.is_zero() {
            f = f.try_add(&SymFunction::monomial(4, beta, 0, c))?;
        }
    }
    Ok(f)
}

/// Fits each real component separately and recombines `sum_j f_j i_j`.
pub fn fit_by_components(prob: &FitProblem) -> Result<SymFunction> {
    let mut f = SymFunction::zero4();
    for k in 0..4 {
        let real = FitProblem {
            samples: prob.samples.iter().map(|(x, v)| (*x, Quaternion::real(*v.coord(k)))).collect(),
            degree: prob.degree,
        };
        f = f.try_add(&fit_polynomial(&real)?.right_mul(&Quaternion::unit(k)))?;
    }
    Ok(f)
}

/// `max |p(x) - f(x)|` over the samples.
pub fn sup_error(p: &SymFunction, samples: &[([f64; 4], Quaternion)]) -> Result<f64> {
    samples
        .par_iter()
        .map(|(x, v)| Ok((p.eval_q(x)? - v.clone()).abs()))
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityRow {
    pub degree: u32,
    pub sup_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub rows: Vec<DensityRow>,
    /// Each error below the previous one by more than the slack.
    pub strictly_decreasing: bool,
    pub improved: bool,
    pub slack: f64,
}

/// Sup errors of the least-squares fits of degree `0..=max_degree` on `grid`.
pub fn density_report(target: impl Fn(&[f64; 4]) -> Quaternion + Sync, max_degree: u32, grid: &[[f64; 4]]) -> Result<DensityReport> {
    let samples = FitProblem::from_fn(grid, 0, &target).samples;
    let rows = (0..=max_degree)
        .map(|degree| {
            let p = fit_polynomial(&FitProblem { samples: samples.clone(), degree })?;
            Ok(DensityRow { degree, sup_error: sup_error(&p, &samples)? })
        })
        .collect::<Result<Vec<_>>>()?;
    let slack = 1e-12;
    let strictly_decreasing = rows.windows(2).all(|w| w[1].sup_error < w[0].sup_error - slack);
    let (first, last) = (rows[0].sup_error, rows[rows.len() - 1].sup_error);
    let improved = last < first || first <= slack;
    Ok(DensityReport { rows, strictly_decreasing, improved, slack })
}

/// Built-in targets addressable by name.
pub fn builtin_target(name: &str) -> Option<fn(&[f64; 4]) -> Quaternion> {
    fn conj(x: &[f64; 4]) -> Quaternion {
        Quaternion::new(x[0], -x[1], -x[2], -x[3])
    }
    fn norm_sqr(x: &[f64; 4]) -> Quaternion {
        Quaternion::real(x.iter().map(|v| v * v).sum())
    }
    fn exp_cos(x: &[f64; 4]) -> Quaternion {
        Quaternion::new(x[1].cos(), x[0].exp(), 0.0, 0.0)
    }
    match name {
        "conj" => Some(conj),
        "norm2" => Some(norm_sqr),
        "exp-cos" => Some(exp_cos),
        _ => None,
    }
}

pub const BUILTIN_TARGETS: [&str; 3] = ["conj", "norm2", "exp-cos"];
