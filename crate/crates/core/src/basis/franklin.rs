//! The system `w_m = T v_m`, built degree block by degree block.
//!
//! Generators of different degrees are bracket-orthogonal, so Gram-Schmidt
//! factors into independent blocks. Inside block `m` the elements are
//! `W_j / sqrt(d_j)` where the numerators `W_j = sum_k (L^-1)_{jk} T g_k` are
//! exact rational polynomials of degree `m - 1`; `sigma W_j = 0` holds exactly.

use serde::{Deserialize, Serialize};

use super::generators::harmonic_space;
use super::gram::{DroppedGenerator, GramFactor, DROP_TOLERANCE};
use super::inner::{inner_ball, inner_ball_left, Block};
use crate::algebra::Quaternion;
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};
use crate::symfun::{MultiIndex, SymFunction};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FranklinConfig {
    pub max_degree: u32,
    pub drop_tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub alpha: MultiIndex,
    /// Degree of the generator; the element has degree `m - 1`.
    pub m: u32,
}

/// `w = numerator * scale` with an exact numerator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactElement {
    pub numerator: SymFunction<Rational>,
    pub scale: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FranklinBasis {
    pub config: FranklinConfig,
    pub elements: Vec<SymFunction>,
    pub provenance: Vec<Provenance>,
    /// Row `j` holds the real `a_{j,k}`, `k <= j`, over the global generator
    /// sequence (degree-major, then lexicographic in `alpha`).
    pub gram_coeffs: Vec<Vec<f64>>,
    pub exact: Vec<ExactElement>,
    pub dropped: Vec<DroppedGenerator>,
}

/// Number of elements `sum_{m <= M} (m + 1)^2` when nothing is dropped.
pub fn expected_len(max_degree: u32) -> usize {
    (1..=max_degree).map(|m| ((m + 1) * (m + 1)) as usize).sum()
}

pub fn build_franklin(max_degree: u32) -> Result<FranklinBasis> {
    if max_degree == 0 {
        return Err(Error::InvalidArgument("max_degree must be at least 1".into()));
    }
    let mut basis = FranklinBasis {
        config: FranklinConfig { max_degree, drop_tolerance: DROP_TOLERANCE },
        elements: Vec::new(),
        provenance: Vec::new(),
        gram_coeffs: Vec::new(),
        exact: Vec::new(),
        dropped: Vec::new(),
    };
    let mut offset = 0;
    for m in 1..=max_degree {
        let gens = harmonic_space(m)?;
        let block = Block::new(m - 1);
        let transformed = gens
            .iter()
            .map(|g| block.to_dense(&g.poly.dirac_star()?))
            .collect::<Result<Vec<_>>>()?;
        let gram: Vec<Vec<Rational>> = transformed
            .iter()
            .map(|a| transformed.iter().map(|b| block.inner_real(a, b)).collect())
            .collect();
        let factor = GramFactor::factor(&gram, DROP_TOLERANCE);
        let coeffs = factor.coefficients();
        for (pos, &k) in factor.kept.iter().enumerate() {
            let combo = &factor.combos[pos];
            let mut dense = vec![Quaternion::<Rational>::zero(); block.monos.len()];
            for (c, u) in combo.iter().zip(&transformed) {
                if c.is_zero() {
                    continue;
                }
                for (acc, q) in dense.iter_mut().zip(u) {
                    if !q.is_zero() {
                        *acc = acc.clone() + q.scale(c);
                    }
                }
            }
            let numerator = block.from_dense(&dense);
            let scale = 1.0 / factor.pivots[pos].to_f64().sqrt();
            basis.elements.push(numerator.to_f64().scale(&scale));
            basis.exact.push(ExactElement { numerator, scale });
            basis.provenance.push(Provenance { alpha: gens[k].alpha.clone(), m });
            let mut row = vec![0.0; offset + k + 1];
            row[offset..].copy_from_slice(&coeffs[pos][..=k]);
            basis.gram_coeffs.push(row);
        }
        basis.dropped.extend(factor.dropped.into_iter().map(|d| DroppedGenerator { index: offset + d.index, ..d }));
        offset += gens.len();
    }
    Ok(basis)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasisReport {
    pub elements: usize,
    pub dropped: usize,
    /// `sigma W = 0` in exact arithmetic for every stored numerator.
    pub kernel_exact: bool,
    /// Largest coefficient of `sigma w` on the floating-point elements.
    pub kernel_residual: f64,
    /// `max |Re (w_i, w_j) - delta_ij|`, the bracket Gram of the `v_m`.
    pub real_deviation: f64,
    /// `max |Im (w_i, w_j)|`.
    pub imaginary_deviation: f64,
    /// `max |(w_i, w_j) - delta_ij|` as quaternions.
    pub full_deviation: f64,
    /// `max |<w_i, w_j>_L - delta_ij|` with `<f, g>_L = int f g*`.
    pub reversed_deviation: f64,
    pub tolerance: f64,
    /// Kernel membership and orthonormality of the real part.
    pub passed: bool,
}

/// Max deviations from the identity: `(real part, imaginary part, full)`.
pub(crate) fn gram_deviation(gram: &[Vec<Quaternion>]) -> (f64, f64, f64) {
    let mut dev = (0.0f64, 0.0f64, 0.0f64);
    for (i, row) in gram.iter().enumerate() {
        for (j, g) in row.iter().enumerate() {
            let delta = if i == j { 1.0 } else { 0.0 };
            let re = (g.w - delta).abs();
            let im = g.imag_abs();
            dev.0 = dev.0.max(re);
            dev.1 = dev.1.max(im);
            dev.2 = dev.2.max(re.hypot(im));
        }
    }
    dev
}

/// All pairings `pair(e_i, e_j)`, computed on the upper triangle in parallel.
pub(crate) fn gram_matrix(
    elems: &[SymFunction],
    pair: impl Fn(&SymFunction, &SymFunction) -> Result<Quaternion> + Sync,
) -> Result<Vec<Vec<Quaternion>>> {
    use rayon::prelude::*;
    let n = elems.len();
    let upper: Vec<Vec<Quaternion>> = (0..n)
        .into_par_iter()
        .map(|i| (i..n).map(|j| pair(&elems[i], &elems[j])).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let mut full = vec![vec![Quaternion::zero(); n]; n];
    for (i, row) in upper.into_iter().enumerate() {
        for (off, q) in row.into_iter().enumerate() {
            let j = i + off;
            // both pairings satisfy <g, f> = <f, g>*
            full[j][i] = q.conj();
            full[i][j] = q;
        }
    }
    Ok(full)
}

impl FranklinBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `(w_i, w_j)` against exact moments.
    pub fn gram(&self) -> Result<Vec<Vec<Quaternion>>> {
        gram_matrix(&self.elements, inner_ball)
    }

    /// `<w_i, w_j>_L = int w_i w_j*` against exact moments.
    pub fn reversed_gram(&self) -> Result<Vec<Vec<Quaternion>>> {
        gram_matrix(&self.elements, inner_ball_left)
    }

    pub fn reversed_deviation(&self) -> Result<f64> {
        Ok(gram_deviation(&self.reversed_gram()?).2)
    }

    pub fn verify(&self, tolerance: f64) -> Result<BasisReport> {
        if !(tolerance > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tolerance}")));
        }
        let mut kernel_exact = self.exact.len() == self.elements.len();
        for e in &self.exact {
            kernel_exact &= e.numerator.dirac()?.is_zero();
        }
        let mut kernel_residual: f64 = 0.0;
        for w in &self.elements {
            kernel_residual = kernel_residual.max(w.dirac()?.max_coeff());
        }
        let (real_deviation, imaginary_deviation, full_deviation) = gram_deviation(&self.gram()?);
        let reversed_deviation = self.reversed_deviation()?;
        Ok(BasisReport {
            elements: self.len(),
            dropped: self.dropped.len(),
            kernel_exact,
            kernel_residual,
            real_deviation,
            imaginary_deviation,
            full_deviation,
            reversed_deviation,
            tolerance,
            passed: kernel_exact && real_deviation < tolerance,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let b: FranklinBasis = serde_json::from_str(s)?;
        let n = b.elements.len();
        if b.provenance.len() != n || b.gram_coeffs.len() != n || !(b.exact.is_empty() || b.exact.len() == n) {
            return Err(Error::InvalidArgument("basis file has inconsistent section lengths".into()));
        }
        Ok(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_one_basis() {
        let b = build_franklin(1).unwrap();
        assert_eq!(b.len(), 4);
        // T(-2 x_0) = -2 normalizes to the constant -1
        let k = b.provenance.iter().position(|p| p.alpha == MultiIndex(vec![1, 0, 0, 0])).unwrap();
        assert_eq!(b.elements[k], SymFunction::constant(4, Quaternion::real(-1.0)));
        for w in &b.elements {
            assert_eq!(w.degree(), Some(0));
        }
        let r = b.verify(1e-9).unwrap();
        assert!(r.passed && r.kernel_exact);
        assert!(r.real_deviation < 1e-15);
        // constants cannot be mutually orthogonal as quaternions
        assert!(r.full_deviation > 0.5);
    }

    #[test]
    fn counts_and_kernel_through_degree_three() {
        let b = build_franklin(3).unwrap();
        assert_eq!(b.len(), 29);
        assert_eq!(b.len(), expected_len(3));
        assert!(b.dropped.is_empty());
        let r = b.verify(1e-9).unwrap();
        assert!(r.kernel_exact);
        assert!(r.real_deviation < 1e-12, "{r:?}");
        assert!(r.kernel_residual < 1e-12);
    }

    #[test]
    fn gram_coeffs_reconstruct_elements() {
        let b = build_franklin(2).unwrap();
        let gens: Vec<SymFunction> =
            (1..=2).flat_map(|m| harmonic_space(m).unwrap()).map(|g| g.poly.to_f64()).collect();
        for (row, w) in b.gram_coeffs.iter().zip(&b.elements) {
            let v = row.iter().zip(&gens).fold(SymFunction::zero4(), |acc, (a, g)| acc.try_add(&g.scale(a)).unwrap());
            let diff = v.dirac_star().unwrap().try_sub(w).unwrap();
            assert!(diff.max_coeff() < 1e-12);
        }
    }

    #[test]
    fn json_round_trip() {
        let b = build_franklin(2).unwrap();
        let s = b.to_json().unwrap();
        let back = FranklinBasis::from_json(&s).unwrap();
        assert_eq!(back, b);
        assert_eq!(back.to_json().unwrap(), s);
    }
}
