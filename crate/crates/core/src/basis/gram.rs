//! Gram-Schmidt under the bracket, in exact arithmetic.
//!
//! For real generators the bracket Gram matrix is Hermitian; its real part is
//! the symmetric Dirichlet form `int grad f . grad g`. Orthonormalizing with
//! real coefficients against that real part is classical Gram-Schmidt, done
//! here as an exact `L D L^T` factorization: `v_m = sum_k (L^-1)_{mk} g_k /
//! sqrt(d_m)`.

use serde::{Deserialize, Serialize};

use super::inner::inner_ball_exact;
use super::linalg::RMatrix;
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};
use crate::symfun::SymFunction;

/// Relative pivot below which a generator counts as dependent.
pub const DROP_TOLERANCE: f64 = 1e-10;


#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DroppedGenerator {
    pub index: usize,
    /// `d / G_kk`, or 0 when the generator has zero bracket norm.
    pub pivot_ratio: f64,
}

/// Exact factorization of a symmetric Gram matrix.
#[derive(Clone, Debug)]
pub struct GramFactor {
    /// Input indices kept, in order.
    pub kept: Vec<usize>,
    pub dropped: Vec<DroppedGenerator>,
    /// Row `m`: exact combination of all inputs giving the unnormalized `v_m`.
    pub combos: Vec<Vec<Rational>>,
    /// `d_m = [v_m, v_m]` before normalization.
    pub pivots: Vec<Rational>,
}

impl GramFactor {
    pub fn factor(gram: &RMatrix, tol: f64) -> Self {
        let n = gram.len();
        let mut kept: Vec<usize> = Vec::new();
        let mut dropped = Vec::new();
        let mut lrows: Vec<Vec<Rational>> = Vec::new();
        let mut pivots: Vec<Rational> = Vec::new();
        let mut combos: Vec<Vec<Rational>> = Vec::new();
        for i in 0..n {
            let mut l: Vec<Rational> = Vec::with_capacity(kept.len());
            for (jpos, &j) in kept.iter().enumerate() {
                let mut s = gram[i][j].clone();
                for k in 0..jpos {
                    if !l[k].is_zero() && !lrows[jpos][k].is_zero() {
                        s = s - l[k].clone() * lrows[jpos][k].clone() * pivots[k].clone();
                    }
                }
                l.push(if s.is_zero() { s } else { s / pivots[jpos].clone() });
            }
            let mut d = gram[i][i].clone();
            for (k, lk) in l.iter().enumerate() {
                if !lk.is_zero() {
                    d = d - lk.clone() * lk.clone() * pivots[k].clone();
                }
            }
            let gii = gram[i][i].to_f64();
            let ratio = if gii > 0.0 { d.to_f64() / gii } else { 0.0 };
            if !(ratio >= tol) {
                dropped.push(DroppedGenerator { index: i, pivot_ratio: ratio });
                continue;
            }
            let mut combo = vec![Rational::zero(); n];
            combo[i] = Rational::one();
            for (k, lk) in l.iter().enumerate() {
                if lk.is_zero() {
                    continue;
                }
                for (c, v) in combo.iter_mut().zip(&combos[k]) {
                    if !v.is_zero() {
                        *c = c.clone() - lk.clone() * v.clone();
                    }
                }
            }
            kept.push(i);
            lrows.push(l);
            pivots.push(d);
            combos.push(combo);
        }
        GramFactor { kept, dropped, combos, pivots }
    }

    /// Real coefficients `a_{m,k} = combo_{m,k} / sqrt(d_m)`.
    pub fn coefficients(&self) -> Vec<Vec<f64>> {
        self.combos
            .iter()
            .zip(&self.pivots)
            .map(|(row, d)| {
                let s = 1.0 / d.to_f64().sqrt();
                row.iter().map(|v| v.to_f64() * s).collect()
            })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct GramSchmidtResult {
    pub factor: GramFactor,
    /// `a_{m,k}` over all inputs (zero above the diagonal).
    pub coeffs: Vec<Vec<f64>>,
    /// Largest `|Im [g_i, g_j]|`; nonzero means the bracket is only Hermitian.
    pub hermitian_defect: f64,
    /// The orthonormal `v_m` in floating point.
    pub vectors: Vec<SymFunction>,
}

/// Orthonormalizes real harmonic polynomials under `Re [., .]`. The inputs are
/// converted exactly, so rounding enters only in the final `1/sqrt(d)` scale.
pub fn gram_schmidt(generators: &[SymFunction]) -> Result<GramSchmidtResult> {
    let exact: Vec<SymFunction<Rational>> = generators.iter().map(SymFunction::to_rational).collect();
    for (g, ge) in generators.iter().zip(&exact) {
        if !ge.is_real_valued() {
            return Err(Error::InvalidArgument("Gram-Schmidt generators must be real-valued".into()));
        }
        if !ge.is_polynomial() {
            return Err(Error::NotPolynomial);
        }
        if !g.is_harmonic()? {
            return Err(Error::NotHarmonic(g.laplace()?.len()));
        }
    }
    let transformed = exact.iter().map(SymFunction::dirac_star).collect::<Result<Vec<_>>>()?;
    let n = exact.len();
    let mut gram = vec![vec![Rational::zero(); n]; n];
    let mut hermitian_defect: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            let b = inner_ball_exact(&transformed[i], &transformed[j])?;
            hermitian_defect = hermitian_defect.max(b.to_f64().imag_abs());
            gram[i][j] = b.w.clone();
            gram[j][i] = b.w;
        }
    }
    let factor = GramFactor::factor(&gram, DROP_TOLERANCE);
    let coeffs = factor.coefficients();
    let vectors = coeffs
        .iter()
        .map(|row| {
            row.iter().zip(generators).try_fold(SymFunction::zero4(), |acc, (a, g)| {
                if *a == 0.0 {
                    Ok(acc)
                } else {
                    acc.try_add(&g.scale(a))
                }
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GramSchmidtResult { factor, coeffs, hermitian_defect, vectors })
}
