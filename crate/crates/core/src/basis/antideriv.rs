//! Polynomial anti-derivative of the adjoint Dirac operator: given a
//! quaternion polynomial `f`, find `g` with `sigma* g = f`.
//!
//! Each homogeneous degree `d` of `f` is solved separately for a homogeneous
//! `g` of degree `d + 1`. The linear map `A: coeffs(g) -> coeffs(sigma* g)` is
//! onto, so the minimum-norm solution `A^T (A A^T)^-1 f` is unique and is
//! computed exactly. Factorizations of `A A^T` are cached per degree.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use crate::algebra::{q_mul, Quaternion};
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};
use crate::symfun::{MultiIndex, SymFunction};

use super::linalg::Lu;

struct DegreeSolver {
    /// Monomials of the target degree `d`.
    target: Vec<MultiIndex>,
    target_index: HashMap<MultiIndex, usize>,
    /// Monomials of the unknown degree `d + 1`.
    source: Vec<MultiIndex>,
    /// Column `4 * b + c` lists `(row, value)` for `sigma*(x^b i_c)`.
    columns: Vec<Vec<(usize, i64)>>,
    lu: Lu,
}

/// `i_c i_j*` as `(component, sign)`.
fn unit_product(c: usize, j: usize) -> (usize, i64) {
    let p = q_mul(&Quaternion::<f64>::unit(c), &Quaternion::<f64>::unit(j).conj());
    let a = p.to_array();
    let k = (0..4).find(|&k| a[k] != 0.0).expect("unit product");
    (k, a[k] as i64)
}

impl DegreeSolver {
    fn new(d: u32) -> Result<Self> {
        let target = MultiIndex::all_of_order(4, d);
        let target_index: HashMap<MultiIndex, usize> = target.iter().enumerate().map(|(i, b)| (b.clone(), i)).collect();
        let source = MultiIndex::all_of_order(4, d + 1);
        let mut columns = Vec::with_capacity(4 * source.len());
        for b in &source {
            for c in 0..4 {
                let mut col = Vec::new();
                for j in 0..4 {
                    if b.0[j] == 0 {
                        continue;
                    }
                    let mut a = b.clone();
                    a.0[j] -= 1;
                    let (k, sign) = unit_product(c, j);
                    col.push((4 * target_index[&a] + k, sign * b.0[j] as i64));
                }
                columns.push(col);
            }
        }
        let rows = 4 * target.len();
        let mut aat = vec![vec![0i64; rows]; rows];
        for col in &columns {
            for (r1, v1) in col {
                for (r2, v2) in col {
                    aat[*r1][*r2] += v1 * v2;
                }
            }
        }
        let aat = aat.into_iter().map(|row| row.into_iter().map(Rational::from_i64).collect()).collect();
        Ok(DegreeSolver { target, target_index, source, columns, lu: Lu::new(aat)? })
    }

    fn solve(&self, f: &[(MultiIndex, Quaternion<Rational>)]) -> SymFunction<Rational> {
        let mut rhs = vec![Rational::zero(); 4 * self.target.len()];
        for (b, c) in f {
            let i = self.target_index[b];
            for (k, v) in c.to_array().into_iter().enumerate() {
                rhs[4 * i + k] = v;
            }
        }
        let y = self.lu.solve(&rhs);
        let mut g = SymFunction::zero4();
        for (bi, b) in self.source.iter().enumerate() {
            let comps: [Rational; 4] = std::array::from_fn(|c| {
                self.columns[4 * bi + c]
                    .iter()
                    .fold(Rational::zero(), |acc, (r, v)| acc + Rational::from_i64(*v) * y[*r].clone())
            });
            let q = Quaternion::from_array(comps);
            if !q.is_zero() {
                g = g.try_add(&SymFunction::monomial(4, b.clone(), 0, q)).expect("same space");
            }
        }
        g
    }
}

fn solver(d: u32) -> Result<Arc<DegreeSolver>> {
    static CACHE: OnceLock<Mutex<BTreeMap<u32, Arc<DegreeSolver>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(s) = cache.lock().expect("solver cache").get(&d) {
        return Ok(s.clone());
    }
    let s = Arc::new(DegreeSolver::new(d)?);
    cache.lock().expect("solver cache").entry(d).or_insert_with(|| s.clone());
    Ok(s)
}

/// Minimum-norm polynomial `g` with `sigma* g = f`, exactly.
pub fn anti_derivation_exact(f: &SymFunction<Rational>) -> Result<SymFunction<Rational>> {
    if f.n() != 4 || f.l() != 1 {
        return Err(Error::Unsupported("anti-derivation needs n = 4, l = 1".into()));
    }
    let p = f.to_polynomial().ok_or(Error::NotPolynomial)?;
    let mut blocks: BTreeMap<u32, Vec<(MultiIndex, Quaternion<Rational>)>> = BTreeMap::new();
    for (b, _, c) in p.terms() {
        blocks.entry(b.order()).or_default().push((b.clone(), c.quaternion().clone()));
    }
    let mut g = SymFunction::zero4();
    for (d, terms) in blocks {
        g = g.try_add(&solver(d)?.solve(&terms))?;
    }
    if g.dirac_star()? != p {
        return Err(Error::Internal("anti-derivation failed to reproduce its input".into()));
    }
    Ok(g)
}

/// Floating-point front end: the input is converted exactly, solved exactly,
/// and rounded once.
pub fn anti_derivation(f: &SymFunction) -> Result<SymFunction> {
    Ok(anti_derivation_exact(&f.to_rational())?.to_f64())
}
