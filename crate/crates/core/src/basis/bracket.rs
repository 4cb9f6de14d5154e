//! The bracket `[f, g]` on harmonic functions and the operator `T = sigma*`
//! (the harmonic extension is the identity on harmonic polynomials).
//!
//! Volume form: `[f, g] = (sigma* f, sigma* g)`. Surface form, by Green's
//! identity: `[f, g] = n int_S (sigma* f)(y)* y* g(y) dpsi(y)`.

use serde::{Deserialize, Serialize};

use super::inner::{inner_ball, inner_ball_exact};
use crate::algebra::Quaternion;
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};
use crate::sphere::QuadratureRule;
use crate::symfun::SymFunction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BracketMode {
    /// Exact moments of `(sigma* f)* sigma* g` over the ball.
    Volume,
    /// Sphere quadrature of the boundary form.
    Surface,
}

fn require_harmonic<T: Scalar>(f: &SymFunction<T>) -> Result<()> {
    if f.is_harmonic()? {
        Ok(())
    } else {
        Err(Error::NotHarmonic(f.laplace()?.canonical().len()))
    }
}

/// `T v = sigma* v` for a harmonic polynomial `v`.
pub fn operator_t<T: Scalar>(v: &SymFunction<T>) -> Result<SymFunction<T>> {
    if !v.is_polynomial() {
        return Err(Error::NotPolynomial);
    }
    require_harmonic(v)?;
    v.dirac_star()
}

pub fn bracket_exact(f: &SymFunction<Rational>, g: &SymFunction<Rational>) -> Result<Quaternion<Rational>> {
    inner_ball_exact(&operator_t(f)?, &operator_t(g)?)
}

/// `[f, g]`. `Surface` needs a sphere rule exact to degree `deg f + deg g`.
pub fn bracket(f: &SymFunction, g: &SymFunction, mode: BracketMode, rule: Option<&QuadratureRule>) -> Result<Quaternion> {
    match mode {
        BracketMode::Volume => inner_ball(&operator_t(f)?, &operator_t(g)?),
        BracketMode::Surface => {
            let rule = rule.ok_or_else(|| Error::InvalidArgument("surface bracket needs a sphere rule".into()))?;
            require_harmonic(g)?;
            let tf = operator_t(f)?;
            let v = rule.try_integrate_q(|y| {
                let a = tf.eval_q(y)?.conj();
                let ystar = Quaternion::from_point(y).conj();
                Ok(a * ystar * g.eval_q(y)?)
            })?;
            Ok(v.scale(&4.0))
        }
    }
}

/// `max(|f|, |d_j f|)` over a grid; the grid `C^1` norm.
pub fn c1_grid_norm(f: &SymFunction, grid: &[[f64; 4]]) -> Result<f64> {
    let parts = std::iter::once(Ok(f.clone()))
        .chain((0..4).map(|i| f.partial(i)))
        .collect::<Result<Vec<_>>>()?;
    let mut m: f64 = 0.0;
    for x in grid {
        for p in &parts {
            m = m.max(p.eval_q(x)?.abs());
        }
    }
    Ok(m)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BilinearBound {
    pub bracket_abs: f64,
    pub bound: f64,
    pub holds: bool,
}

/// `|[f, g]| <= n ||f||_C1 ||g||_C1` on a boundary grid.
pub fn bilinear_bound(f: &SymFunction, g: &SymFunction, grid: &[[f64; 4]]) -> Result<BilinearBound> {
    let bracket_abs = bracket(f, g, BracketMode::Volume, None)?.abs();
    let bound = 4.0 * c1_grid_norm(f, grid)? * c1_grid_norm(g, grid)?;
    Ok(BilinearBound { bracket_abs, bound, holds: bracket_abs <= bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Quaternion as Q;
    use crate::basis::generators::harmonic_space;

    fn x(i: usize) -> SymFunction {
        SymFunction::coordinate(4, i)
    }

    #[test]
    fn operator_t_examples() {
        assert!(operator_t(&SymFunction::constant(4, Q::<f64>::one())).unwrap().is_zero());
        assert_eq!(operator_t(&x(0)).unwrap(), SymFunction::constant(4, Q::one()));
        assert_eq!(operator_t(&x(1).scale(&-2.0)).unwrap(), SymFunction::constant(4, Q::unit(1).scale(&2.0)));
        let sq = x(0).try_mul(&x(0)).unwrap();
        assert!(matches!(operator_t(&sq), Err(Error::NotHarmonic(_))));
        // T v lies in ker sigma
        for g in harmonic_space(3).unwrap() {
            assert!(operator_t(&g.poly).unwrap().dirac().unwrap().is_zero());
        }
    }

    #[test]
    fn bracket_examples() {
        let c = SymFunction::constant(4, Q::real(3.0));
        assert!(bracket(&c, &c, BracketMode::Volume, None).unwrap().is_zero());
        assert_eq!(bracket(&x(0), &x(0), BracketMode::Volume, None).unwrap(), Q::one());
    }

    #[test]
    fn brackets_of_real_functions_are_hermitian_not_real() {
        // [x_1, x_2] = (i_1, -i_2) = -i_1 i_2 = -i_3 (zero-based coordinates 1, 2)
        let b = bracket_exact(&x(1).to_rational(), &x(2).to_rational()).unwrap();
        assert_eq!(b, Q::unit(3).map(|v: &f64| Rational::from_f64(-*v).unwrap()));
        let rev = bracket_exact(&x(2).to_rational(), &x(1).to_rational()).unwrap();
        assert_eq!(rev, b.conj());
    }

    #[test]
    fn surface_matches_volume() {
        let rule = QuadratureRule::quad_sphere(10).unwrap();
        let gens = harmonic_space(2).unwrap();
        for a in gens.iter().take(4) {
            for b in gens.iter().skip(3).take(4) {
                let (f, g) = (a.poly.to_f64(), b.poly.to_f64());
                let v = bracket(&f, &g, BracketMode::Volume, None).unwrap();
                let s = bracket(&f, &g, BracketMode::Surface, Some(&rule)).unwrap();
                assert!((v.clone() - s).abs() <= 1e-12 * v.abs().max(1.0));
            }
        }
    }

    #[test]
    fn bilinear_bound_on_generators() {
        let grid = QuadratureRule::quad_sphere(8).unwrap().nodes;
        let gens = harmonic_space(2).unwrap();
        let r = bilinear_bound(&gens[0].poly.to_f64(), &gens[5].poly.to_f64(), &grid).unwrap();
        assert!(r.holds);
    }
}
