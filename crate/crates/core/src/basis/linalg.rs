//! Small dense exact linear algebra over the rationals.

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

pub type RMatrix = Vec<Vec<Rational>>;

/// Rank by exact Gaussian elimination.
pub fn rank(mut m: RMatrix) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for i in (r + 1)..rows {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] * &inv;
            for j in c..cols {
                let d = &f * &m[r][j];
                m[i][j] = &m[i][j] - &d;
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Exact LU factorization with row pivoting of a square matrix.
#[derive(Clone, Debug)]
pub struct Lu {
    lu: RMatrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn new(mut a: RMatrix) -> Result<Self> {
        let n = a.len();
        if a.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidArgument("LU needs a square matrix".into()));
        }
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n)
                .find(|&i| !a[i][k].is_zero())
                .ok_or_else(|| Error::Internal(format!("singular matrix at column {k}")))?;
            a.swap(k, p);
            perm.swap(k, p);
            let inv = a[k][k].recip();
            for i in (k + 1)..n {
                if a[i][k].is_zero() {
                    continue;
                }
                let f = &a[i][k] * &inv;
                for j in (k + 1)..n {
                    if a[k][j].is_zero() {
                        continue;
                    }
                    let d = &f * &a[k][j];
                    a[i][j] = &a[i][j] - &d;
                }
                a[i][k] = f;
            }
        }
        Ok(Lu { lu: a, perm })
    }

    pub fn solve(&self, b: &[Rational]) -> Vec<Rational> {
        let n = self.lu.len();
        let mut y: Vec<Rational> = self.perm.iter().map(|&p| b[p].clone()).collect();
        for i in 0..n {
            for j in 0..i {
                if !self.lu[i][j].is_zero() && !y[j].is_zero() {
                    let d = &self.lu[i][j] * &y[j];
                    y[i] = &y[i] - &d;
                }
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                if !self.lu[i][j].is_zero() && !y[j].is_zero() {
                    let d = &self.lu[i][j] * &y[j];
                    y[i] = &y[i] - &d;
                }
            }
            y[i] = &y[i] / &self.lu[i][i];
        }
        y
    }
}
