//! Kelvin-type harmonic generators `Q_alpha`, the homogeneous polynomials
//! agreeing with `D^alpha r^-2` on the unit sphere.

use serde::{Deserialize, Serialize};

use super::inner::inner_sphere_exact;
use super::linalg::rank;
use crate::error::{Error, Result};
use crate::scalar::Rational;
use crate::symfun::{MultiIndex, SymFunction};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarmonicGenerator {
    pub alpha: MultiIndex,
    pub degree: u32,
    /// Real homogeneous harmonic polynomial with integer coefficients.
    pub poly: SymFunction<Rational>,
}

/// Sphere points used to confirm `Q_alpha = D^alpha r^-2` on `S^3`.
const PROBES: [[f64; 4]; 4] = [
    [1.0, 0.0, 0.0, 0.0],
    [0.6, 0.0, 0.8, 0.0],
    [0.5, -0.5, 0.5, 0.5],
    [0.1, 0.3, -0.7, 0.640_312_423_743_284_8],
];

pub fn kelvin_generator(alpha: &MultiIndex) -> Result<HarmonicGenerator> {
    if alpha.len() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, found: alpha.len() });
    }
    let m = alpha.order();
    if m == 0 {
        return Err(Error::InvalidArgument("generator degree must be at least 1".into()));
    }
    if alpha.0[0] > 1 {
        return Err(Error::InvalidArgument(format!("alpha_1 must be 0 or 1, got {alpha}")));
    }
    let derivative = SymFunction::<Rational>::radial(4, -2).dalpha(alpha)?;
    let lifted = derivative.try_mul(&SymFunction::radial(4, 2 + 2 * m as i32))?;
    let poly = lifted.expand_even_radial();
    if !poly.is_polynomial() || poly.homogeneous_degree() != Some(m as i64) {
        return Err(Error::Internal(format!("Q{alpha} is not a homogeneous polynomial of degree {m}")));
    }
    let lap = poly.laplace()?;
    if !lap.is_zero() {
        return Err(Error::NotHarmonic(lap.len()));
    }
    let (d, p) = (derivative.to_f64(), poly.to_f64());
    for x in &PROBES {
        let (a, b) = (d.eval_q(x)?.w, p.eval_q(x)?.w);
        if (a - b).abs() > 1e-9 * a.abs().max(1.0) {
            return Err(Error::Internal(format!("Q{alpha} differs from its sphere trace at {x:?}")));
        }
    }
    Ok(HarmonicGenerator { alpha: alpha.clone(), degree: m, poly })
}

/// All generators of degree `m`, lexicographic in `alpha`.
pub fn harmonic_space(m: u32) -> Result<Vec<HarmonicGenerator>> {
    if m == 0 {
        return Err(Error::InvalidArgument("degree 0 is annihilated by the adjoint Dirac operator".into()));
    }
    MultiIndex::all_of_order(4, m)
        .into_iter()
        .filter(|a| a.0[0] <= 1)
        .map(|a| kelvin_generator(&a))
        .collect()
}

/// Exact sphere Gram matrix `{Q_i, Q_j}` of real generators.
pub fn sphere_gram(gens: &[HarmonicGenerator]) -> Result<Vec<Vec<Rational>>> {
    gens.iter()
        .map(|a| gens.iter().map(|b| Ok(inner_sphere_exact(&a.poly, &b.poly)?.w)).collect())
        .collect()
}

pub fn sphere_gram_rank(gens: &[HarmonicGenerator]) -> Result<usize> {
    Ok(rank(sphere_gram(gens)?))
}

/// Embeds a real generator as a quaternion polynomial in floating point.
pub fn generator_f64(g: &HarmonicGenerator) -> SymFunction {
    g.poly.to_f64()
}

/// Real multiples of the identity quaternion only.
pub fn is_real_polynomial(f: &SymFunction<Rational>) -> bool {
    f.terms().all(|(_, _, c)| c.quaternion().is_real()) && f.terms().all(|(_, _, c)| c.l() == 1)
}
