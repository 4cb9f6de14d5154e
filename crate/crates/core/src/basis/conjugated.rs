//! Left-orthonormal system for the pairing `<f, g>_L = int_B f g*`.
//!
//! The coefficient functional `beta(h) = <h, w>_L` recovers left expansions
//! `h = sum beta_m w_m` only when `<w_i, w_j>_L = delta_ij`. The `w_m` are
//! orthonormal for the real part of the bracket, not for `<., .>_L`, so this
//! module re-orthonormalizes their numerators with left quaternion
//! coefficients, in exact arithmetic and degree block by degree block.
//! Homogeneous elements of `ker sigma` of different degrees are orthogonal,
//! so the blocks are independent.

use serde::{Deserialize, Serialize};

use super::franklin::{gram_deviation, gram_matrix, ExactElement, FranklinBasis};
use super::inner::{inner_ball_left, Block, Dense};
use crate::algebra::{q_mul, Quaternion};
use crate::error::{Error, Result};
use crate::scalar::Rational;
use crate::symfun::SymFunction;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjugatedSystem {
    pub elements: Vec<SymFunction>,
    pub exact: Vec<ExactElement>,
    /// Polynomial degree of each element.
    pub degrees: Vec<u32>,
    /// Index of the `w` whose residual produced each element.
    pub source: Vec<usize>,
    /// `derived_count[n]`: elements built from `w_1 .. w_n` alone. Their left
    /// span equals the left span of `w_1 .. w_n`.
    pub derived_count: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConjugatedReport {
    pub elements: usize,
    pub kernel_exact: bool,
    /// `max |<c_i, c_j>_L - delta_ij|`.
    pub left_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

fn left_combine(acc: &mut Dense, lambda: &Quaternion<Rational>, v: &Dense) {
    for (a, q) in acc.iter_mut().zip(v) {
        if !q.is_zero() {
            *a = a.clone() - q_mul(lambda, q);
        }
    }
}

impl ConjugatedSystem {
    pub fn from_basis(basis: &FranklinBasis) -> Result<Self> {
        if basis.exact.len() != basis.len() {
            return Err(Error::InvalidArgument("the conjugated system needs the exact numerators".into()));
        }
        let mut sys = ConjugatedSystem {
            elements: Vec::new(),
            exact: Vec::new(),
            degrees: Vec::new(),
            source: Vec::new(),
            derived_count: vec![0],
        };
        let mut start = 0;
        while start < basis.len() {
            let m = basis.provenance[start].m;
            let end = (start..basis.len()).find(|&i| basis.provenance[i].m != m).unwrap_or(basis.len());
            let block = Block::new(m - 1);
            let mut done: Vec<(Dense, Rational)> = Vec::new();
            for i in start..end {
                let w = block.to_dense(&basis.exact[i].numerator)?;
                let mut c = w.clone();
                for (cj, nj) in &done {
                    let proj = block.inner_left(&w, cj);
                    if !proj.is_zero() {
                        left_combine(&mut c, &proj.scale(&nj.recip()), cj);
                    }
                }
                if c.iter().all(Quaternion::is_zero) {
                    sys.derived_count.push(sys.elements.len());
                    continue;
                }
                let norm2 = block.inner_left(&c, &c).w;
                let scale = 1.0 / norm2.to_f64().sqrt();
                let numerator = block.from_dense(&c);
                sys.elements.push(numerator.to_f64().scale(&scale));
                sys.exact.push(ExactElement { numerator, scale });
                sys.degrees.push(m - 1);
                sys.source.push(i);
                sys.derived_count.push(sys.elements.len());
                done.push((c, norm2));
            }
            start = end;
        }
        Ok(sys)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Elements spanning the same left module as the first `n` basis elements.
    pub fn prefix(&self, n: usize) -> usize {
        self.derived_count[n.min(self.derived_count.len() - 1)]
    }

    pub fn left_gram(&self) -> Result<Vec<Vec<Quaternion>>> {
        gram_matrix(&self.elements, inner_ball_left)
    }

    pub fn verify(&self, tolerance: f64) -> Result<ConjugatedReport> {
        let mut kernel_exact = true;
        for e in &self.exact {
            kernel_exact &= e.numerator.dirac()?.is_zero();
        }
        let left_deviation = gram_deviation(&self.left_gram()?).2;
        Ok(ConjugatedReport {
            elements: self.len(),
            kernel_exact,
            left_deviation,
            tolerance,
            passed: kernel_exact && left_deviation < tolerance,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::franklin::build_franklin;

    #[test]
    fn degree_one_collapses_to_one_constant() {
        let sys = ConjugatedSystem::from_basis(&build_franklin(1).unwrap()).unwrap();
        assert_eq!(sys.len(), 1);
        assert_eq!(sys.derived_count, vec![0, 1, 1, 1, 1]);
        assert_eq!(sys.elements[0].degree(), Some(0));
        let c = sys.elements[0].eval_q(&[0.0; 4]).unwrap();
        assert!((c.abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn left_orthonormal_through_degree_three() {
        let basis = build_franklin(3).unwrap();
        let sys = ConjugatedSystem::from_basis(&basis).unwrap();
        // left dimensions of homogeneous ker sigma: 1, 3, 6
        assert_eq!(sys.len(), 10);
        assert_eq!(sys.prefix(4), 1);
        assert_eq!(sys.prefix(13), 4);
        assert_eq!(sys.prefix(29), 10);
        let r = sys.verify(1e-9).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn every_w_is_in_the_left_span() {
        let basis = build_franklin(2).unwrap();
        let sys = ConjugatedSystem::from_basis(&basis).unwrap();
        for w in &basis.elements {
            let mut rest = w.clone();
            for c in &sys.elements {
                let beta = inner_ball_left(w, c).unwrap();
                rest = rest.try_sub(&c.left_mul(&beta)).unwrap();
            }
            assert!(rest.max_coeff() < 1e-12);
        }
    }
}
