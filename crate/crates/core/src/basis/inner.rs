//! Inner products of quaternion polynomials over the ball, evaluated through
//! exact monomial moments.
//!
//! Three pairings appear:
//!
//! * `(f, g) = int_B f* g dmu / mu(B)`, right-linear in `g`;
//! * `<f, g>_L = int_B f g* dmu / mu(B)`, left-linear in `f`, the pairing
//!   behind the expansion coefficients;
//! * `{f, g} = int_S f* g dpsi`, the sphere product.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::algebra::{q_mul, Quaternion};
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};
use crate::sphere::{moment_ball_exact, moment_sphere_exact};
use crate::symfun::{MultiIndex, SymFunction};

type MomentCache = Mutex<HashMap<MultiIndex, (Rational, f64)>>;

fn ball_cache() -> &'static MomentCache {
    static CACHE: OnceLock<MomentCache> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Exact normalized ball moment of a monomial (`s = 0`), memoized.
pub fn ball_moment(beta: &MultiIndex) -> (Rational, f64) {
    if !beta.all_even() {
        return (Rational::zero(), 0.0);
    }
    if let Some(v) = ball_cache().lock().expect("moment cache").get(beta) {
        return v.clone();
    }
    let r = moment_ball_exact(beta, 0).expect("polynomial moments converge");
    let v = (r.clone(), r.to_f64());
    ball_cache().lock().expect("moment cache").insert(beta.clone(), v.clone());
    v
}

fn polynomial_terms<T: Scalar>(f: &SymFunction<T>) -> Result<Vec<(MultiIndex, Quaternion<T>)>> {
    if f.l() != 1 {
        return Err(Error::Unsupported("ball inner products need l = 1".into()));
    }
    let p = f.to_polynomial().ok_or(Error::NotPolynomial)?;
    Ok(p.terms().map(|(b, _, c)| (b.clone(), c.quaternion().clone())).collect())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Pairing {
    /// `a* b`
    Right,
    /// `a b*`
    Left,
}

fn pair_terms<T: Scalar>(
    f: &[(MultiIndex, Quaternion<T>)],
    g: &[(MultiIndex, Quaternion<T>)],
    pairing: Pairing,
    moment: impl Fn(&MultiIndex) -> T,
) -> Quaternion<T> {
    let mut acc = Quaternion::zero();
    for (bf, cf) in f {
        for (bg, cg) in g {
            let beta = bf.add(bg);
            if !beta.all_even() {
                continue;
            }
            let prod = match pairing {
                Pairing::Right => q_mul(&cf.conj(), cg),
                Pairing::Left => q_mul(cf, &cg.conj()),
            };
            acc = acc + prod.scale(&moment(&beta));
        }
    }
    acc
}

/// `(f, g)` computed exactly in rational arithmetic.
pub fn inner_ball_exact(f: &SymFunction<Rational>, g: &SymFunction<Rational>) -> Result<Quaternion<Rational>> {
    Ok(pair_terms(&polynomial_terms(f)?, &polynomial_terms(g)?, Pairing::Right, |b| ball_moment(b).0))
}

/// `<f, g>_L = int_B f g*` computed exactly.
pub fn inner_ball_left_exact(f: &SymFunction<Rational>, g: &SymFunction<Rational>) -> Result<Quaternion<Rational>> {
    Ok(pair_terms(&polynomial_terms(f)?, &polynomial_terms(g)?, Pairing::Left, |b| ball_moment(b).0))
}

/// `(f, g)` in floating point against exact moments.
pub fn inner_ball(f: &SymFunction, g: &SymFunction) -> Result<Quaternion> {
    Ok(pair_terms(&polynomial_terms(f)?, &polynomial_terms(g)?, Pairing::Right, |b| ball_moment(b).1))
}

/// `<f, g>_L` in floating point against exact moments.
pub fn inner_ball_left(f: &SymFunction, g: &SymFunction) -> Result<Quaternion> {
    Ok(pair_terms(&polynomial_terms(f)?, &polynomial_terms(g)?, Pairing::Left, |b| ball_moment(b).1))
}

/// Sphere product `{f, g} = int_S f* g dpsi`, exact.
pub fn inner_sphere_exact(f: &SymFunction<Rational>, g: &SymFunction<Rational>) -> Result<Quaternion<Rational>> {
    let fr = polynomial_terms(&f.restrict_sphere())?;
    let gr = polynomial_terms(&g.restrict_sphere())?;
    Ok(pair_terms(&fr, &gr, Pairing::Right, moment_sphere_exact))
}

/// Homogeneous polynomials of one degree in four variables, with the sparse
/// ball-moment matrix `M[a][b] = int x^(beta_a + beta_b)`.
pub(crate) struct Block {
    pub degree: u32,
    pub monos: Vec<MultiIndex>,
    index: HashMap<MultiIndex, usize>,
    moments: Vec<Vec<(usize, Rational)>>,
}

pub(crate) type Dense = Vec<Quaternion<Rational>>;

impl Block {
    pub fn new(degree: u32) -> Self {
        let monos = MultiIndex::all_of_order(4, degree);
        let index = monos.iter().enumerate().map(|(i, b)| (b.clone(), i)).collect();
        let moments = monos
            .iter()
            .map(|a| {
                monos
                    .iter()
                    .enumerate()
                    .filter_map(|(j, b)| {
                        let beta = a.add(b);
                        beta.all_even().then(|| (j, ball_moment(&beta).0))
                    })
                    .collect()
            })
            .collect();
        Block { degree, monos, index, moments }
    }

    pub fn to_dense(&self, f: &SymFunction<Rational>) -> Result<Dense> {
        let mut v = vec![Quaternion::zero(); self.monos.len()];
        for (b, s, c) in f.terms() {
            if s != 0 || b.order() != self.degree {
                return Err(Error::Internal(format!("term x^{b} r^{s} outside degree-{} block", self.degree)));
            }
            v[self.index[b]] = c.quaternion().clone();
        }
        Ok(v)
    }

    pub fn from_dense(&self, v: &Dense) -> SymFunction<Rational> {
        let mut f = SymFunction::zero4();
        for (b, c) in self.monos.iter().zip(v) {
            if !c.is_zero() {
                f = f.try_add(&SymFunction::monomial(4, b.clone(), 0, c.clone())).expect("same space");
            }
        }
        f
    }

    fn pair(&self, f: &Dense, g: &Dense, pairing: Pairing) -> Quaternion<Rational> {
        let mut acc = Quaternion::zero();
        for (a, row) in self.moments.iter().enumerate() {
            if f[a].is_zero() {
                continue;
            }
            let fa = match pairing {
                Pairing::Right => f[a].conj(),
                Pairing::Left => f[a].clone(),
            };
            for (b, m) in row {
                if g[*b].is_zero() {
                    continue;
                }
                let prod = match pairing {
                    Pairing::Right => q_mul(&fa, &g[*b]),
                    Pairing::Left => q_mul(&fa, &g[*b].conj()),
                };
                acc = acc + prod.scale(m);
            }
        }
        acc
    }

    /// `<f, g>_L`.
    pub fn inner_left(&self, f: &Dense, g: &Dense) -> Quaternion<Rational> {
        self.pair(f, g, Pairing::Left)
    }

    /// `Re (f, g)`, the cheap real part.
    pub fn inner_real(&self, f: &Dense, g: &Dense) -> Rational {
        let mut acc = Rational::zero();
        for (a, row) in self.moments.iter().enumerate() {
            if f[a].is_zero() {
                continue;
            }
            for (b, m) in row {
                if g[*b].is_zero() {
                    continue;
                }
                let dot = crate::algebra::q_dot(&f[a], &g[*b]);
                if !dot.is_zero() {
                    acc = acc + dot * m.clone();
                }
            }
        }
        acc
    }
}
