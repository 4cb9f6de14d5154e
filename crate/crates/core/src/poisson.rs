//! Poisson kernel of the unit ball in `R^4`, harmonic extension of boundary
//! data, the boundary representation of Dirac-kernel functions, the extremal
//! function `U`, and numerical checks of the maximum principle and the
//! Schwarz-type bound.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{Clifford, Quaternion};
use crate::error::{Error, Result};
use crate::scalar::pairwise_sum;
use crate::sphere::{ProductSpec, QuadratureRule};
use crate::symfun::{MultiIndex, SymFunction};

/// Minimum distance between an evaluation point and a boundary node.
pub const SINGULARITY_GUARD: f64 = 1e-9;

fn dist_sqr(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn norm_sqr(a: &[f64; 4]) -> f64 {
    a.iter().map(|v| v * v).sum()
}

fn check_interior(z: &[f64; 4]) -> Result<()> {
    let r = norm_sqr(z).sqrt();
    if r < 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange { what: "|z| (must be < 1)", value: r.to_string() })
    }
}

/// `P(z, xi) = (1 - |z|^2) / |z - xi|^4`.
pub fn kernel(z: &[f64; 4], xi: &[f64; 4]) -> Result<f64> {
    let d2 = dist_sqr(z, xi);
    if d2.sqrt() <= SINGULARITY_GUARD {
        return Err(Error::Singularity("Poisson kernel evaluated at z = xi".into()));
    }
    if norm_sqr(z) > 1.0 + 1e-12 {
        return Err(Error::OutOfRange { what: "|z| (must be <= 1)", value: norm_sqr(z).sqrt().to_string() });
    }
    Ok((1.0 - norm_sqr(z)) / (d2 * d2))
}

/// Closed form of `sigma*_z P(z, w)`:
/// `-(2|z-w|^2 z* + 4(1-|z|^2)(z-w)*) / |z-w|^6`.
pub fn kernel_sigma_star(z: &[f64; 4], w: &[f64; 4]) -> Result<Quaternion> {
    Ok(kernel_sigma(z, w)?.conj())
}

/// `sigma_z P(z, w) = -(2|z-w|^2 z + 4(1-|z|^2)(z-w)) / |z-w|^6`.
pub fn kernel_sigma(z: &[f64; 4], w: &[f64; 4]) -> Result<Quaternion> {
    let d2 = dist_sqr(z, w);
    if d2.sqrt() <= SINGULARITY_GUARD {
        return Err(Error::Singularity("kernel derivative evaluated at z = w".into()));
    }
    let a = 2.0 * d2;
    let b = 4.0 * (1.0 - norm_sqr(z));
    let inv = -1.0 / (d2 * d2 * d2);
    Ok(Quaternion::from_array(std::array::from_fn(|j| (a * z[j] + b * (z[j] - w[j])) * inv)))
}

/// For a boundary point `w`, the kernel written symbolically in the shifted
/// variable `x = z - w`: `P = -r^-2 - 2 sum_i w_i x_i r^-4`.
pub fn kernel_shifted(w: &[f64; 4]) -> SymFunction {
    let mut p = SymFunction::radial(4, -2).neg();
    for (i, wi) in w.iter().enumerate() {
        let t = SymFunction::monomial(4, MultiIndex::unit(4, i), -4, Quaternion::real(-2.0 * wi));
        p = p.try_add(&t).expect("same space");
    }
    p
}

type Sampler = Arc<dyn Fn(&[f64; 4]) -> Quaternion + Send + Sync>;

/// Boundary data for extension problems.
#[derive(Clone)]
pub enum BoundaryFunction {
    /// A symbolic function restricted to the sphere.
    Sym(SymFunction),
    /// A quaternion-valued function sampled pointwise.
    Sampled(Sampler),
}

impl fmt::Debug for BoundaryFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryFunction::Sym(s) => write!(f, "Sym({s:?})"),
            BoundaryFunction::Sampled(_) => write!(f, "Sampled(<fn>)"),
        }
    }
}

impl BoundaryFunction {
    pub fn sampled(f: impl Fn(&[f64; 4]) -> Quaternion + Send + Sync + 'static) -> Self {
        BoundaryFunction::Sampled(Arc::new(f))
    }

    pub fn l(&self) -> usize {
        match self {
            BoundaryFunction::Sym(s) => s.l(),
            BoundaryFunction::Sampled(_) => 1,
        }
    }

    pub fn eval(&self, x: &[f64; 4]) -> Result<Clifford> {
        match self {
            BoundaryFunction::Sym(s) => s.restrict_sphere().eval(x),
            BoundaryFunction::Sampled(f) => Ok(Clifford::from_quaternion(f(x))),
        }
    }

    /// Left multiplication by a constant quaternion.
    pub fn left_mul(&self, a: &Quaternion) -> Self {
        match self {
            BoundaryFunction::Sym(s) => BoundaryFunction::Sym(s.left_mul(a)),
            BoundaryFunction::Sampled(f) => {
                let f = f.clone();
                let a = a.clone();
                BoundaryFunction::sampled(move |x| a.clone() * f(x))
            }
        }
    }
}

/// Boundary data sampled once on a sphere rule; each Clifford component is
/// stored separately so the hot loops run on plain quaternions.
pub struct SampledBoundary<'r> {
    rule: &'r QuadratureRule,
    /// `values[k][i]` is component `k` at node `i`, premultiplied by the weight.
    values: Vec<Vec<Quaternion>>,
}

impl<'r> SampledBoundary<'r> {
    pub fn new(f: &BoundaryFunction, rule: &'r QuadratureRule) -> Result<Self> {
        if rule.is_empty() {
            return Err(Error::InvalidArgument("empty quadrature rule".into()));
        }
        let l = f.l();
        let restricted = match f {
            BoundaryFunction::Sym(s) => Some(s.restrict_sphere()),
            BoundaryFunction::Sampled(_) => None,
        };
        let per_node: Vec<Vec<Quaternion>> = rule
            .nodes
            .par_iter()
            .zip(&rule.weights)
            .map(|(x, w)| {
                let v = match (&restricted, f) {
                    (Some(s), _) => s.eval(x)?,
                    (None, BoundaryFunction::Sampled(g)) => Clifford::from_quaternion(g(x)),
                    (None, BoundaryFunction::Sym(_)) => unreachable!(),
                };
                Ok(v.comps().iter().map(|q| q.scale(w)).collect())
            })
            .collect::<Result<_>>()?;
        let values = (0..l).map(|k| per_node.iter().map(|v| v[k].clone()).collect()).collect();
        Ok(SampledBoundary { rule, values })
    }

    fn reduce(&self, k: usize, weight: impl Fn(&[f64; 4], &Quaternion) -> Result<Quaternion> + Sync) -> Result<Quaternion> {
        let chunks: Vec<Quaternion> = self.values[k]
            .par_chunks(2048)
            .zip(self.rule.nodes.par_chunks(2048))
            .map(|(vs, xs)| {
                let vals = xs.iter().zip(vs).map(|(x, v)| weight(x, v)).collect::<Result<Vec<_>>>()?;
                Ok(pairwise_sum(&vals, Quaternion::zero(), &|a, b| a.clone() + b.clone()))
            })
            .collect::<Result<_>>()?;
        Ok(pairwise_sum(&chunks, Quaternion::zero(), &|a, b| a.clone() + b.clone()))
    }

    /// Harmonic extension `int g(xi) P(z, xi) dpsi(xi)`.
    pub fn extend(&self, z: &[f64; 4]) -> Result<Clifford> {
        check_interior(z)?;
        let comps = (0..self.values.len())
            .map(|k| self.reduce(k, |xi, v| Ok(v.scale(&kernel(z, xi)?))))
            .collect::<Result<Vec<_>>>()?;
        Clifford::new(comps)
    }

    /// Boundary representation `int h(xi) sigma*_z P(z, xi) dpsi(xi)`.
    pub fn represent(&self, z: &[f64; 4]) -> Result<Clifford> {
        check_interior(z)?;
        let comps = (0..self.values.len())
            .map(|k| self.reduce(k, |xi, v| Ok(v.clone() * kernel_sigma_star(z, xi)?)))
            .collect::<Result<Vec<_>>>()?;
        Clifford::new(comps)
    }
}

/// Quadrature realization of the harmonic extension operator.
pub fn extend(f: &BoundaryFunction, z: &[f64; 4], rule: &QuadratureRule) -> Result<Clifford> {
    check_interior(z)?;
    SampledBoundary::new(f, rule)?.extend(z)
}

/// Quadrature realization of the boundary representation of `ker sigma`.
pub fn represent(h: &BoundaryFunction, z: &[f64; 4], rule: &QuadratureRule) -> Result<Clifford> {
    check_interior(z)?;
    SampledBoundary::new(h, rule)?.represent(z)
}

/// Hemisphere sign used by `U`; nodes within `1e-12` of the equator count 0.
fn hemisphere_sign(xi: &[f64; 4]) -> f64 {
    if xi[0] > 1e-12 {
        1.0
    } else if xi[0] < -1e-12 {
        -1.0
    } else {
        0.0
    }
}

/// `U(z)`: harmonic extension of `+1` on `x_1 > 0` and `-1` on `x_1 < 0`.
pub fn extremal_u(z: &[f64; 4], rule: &QuadratureRule) -> Result<f64> {
    check_interior(z)?;
    rule.try_integrate(0.0, |a, b| a + b, |xi, w| Ok(w * hemisphere_sign(xi) * kernel(z, xi)?))
}

/// Rule adapted to `U` on the `x_1` axis, where the integrand depends only on
/// `theta1`: Gauss-Legendre on each hemisphere, one node in the other angles.
pub fn axial_u_rule(points_per_half: usize) -> Result<QuadratureRule> {
    QuadratureRule::sphere(ProductSpec {
        theta1_points: points_per_half,
        theta2_points: 1,
        theta3_points: 1,
        split_equator: true,
    })
}

/// `U(r i_0)` for a list of radii, memoized by radius.
pub struct AxialU {
    rule: QuadratureRule,
    cache: BTreeMap<u64, f64>,
}

impl AxialU {
    pub fn new(points_per_half: usize) -> Result<Self> {
        Ok(AxialU { rule: axial_u_rule(points_per_half)?, cache: BTreeMap::new() })
    }

    pub fn at(&mut self, r: f64) -> Result<f64> {
        if r >= 1.0 {
            return Ok(1.0);
        }
        if let Some(v) = self.cache.get(&r.to_bits()) {
            return Ok(*v);
        }
        let v = extremal_u(&[r, 0.0, 0.0, 0.0], &self.rule)?;
        self.cache.insert(r.to_bits(), v);
        Ok(v)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MaxPrincipleReport {
    pub interior_max: f64,
    pub boundary_max: f64,
    pub tolerance: f64,
    pub holds: bool,
}

fn require_harmonic(u: &SymFunction) -> Result<()> {
    if u.is_harmonic()? {
        Ok(())
    } else {
        Err(Error::NotHarmonic(u.laplace()?.canonical().len()))
    }
}

/// Compares `max |u|` over interior points with the maximum over the nodes
/// of a boundary rule.
pub fn check_max_principle(u: &SymFunction, interior: &[[f64; 4]], boundary: &QuadratureRule) -> Result<MaxPrincipleReport> {
    require_harmonic(u)?;
    if interior.is_empty() || boundary.is_empty() {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    let max_over = |pts: &[[f64; 4]]| -> Result<f64> {
        pts.par_iter()
            .map(|x| Ok(u.eval(x)?.abs()))
            .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
    };
    let interior_max = max_over(interior)?;
    let boundary_max = max_over(&boundary.nodes)?;
    let tolerance = 1e-9;
    Ok(MaxPrincipleReport { interior_max, boundary_max, tolerance, holds: interior_max <= boundary_max + tolerance })
}

/// Maximum of `|f|` on the sphere: the best sample node, refined by
/// projected gradient ascent from the most promising starts.
pub fn sphere_sup(f: &SymFunction, samples: &[[f64; 4]]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    let grads = (0..4).map(|i| f.partial(i)).collect::<Result<Vec<_>>>()?;
    let value = |x: &[f64; 4]| -> Result<f64> { Ok(f.eval_q(x)?.norm_sqr()) };
    let mut scored = samples
        .par_iter()
        .map(|x| Ok((value(x)?, *x)))
        .collect::<Result<Vec<(f64, [f64; 4])>>>()?;
    scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal)));
    let mut best = scored[0].0;
    for &(v0, x0) in scored.iter().take(16) {
        let (mut x, mut v, mut step) = (x0, v0, 0.05);
        for _ in 0..200 {
            let fx = f.eval_q(&x)?;
            // gradient of |f|^2 = 2 sum_j <f, d_j f>
            let g: [f64; 4] = std::array::from_fn(|j| {
                let d = grads[j].eval_q(&x).expect("validated");
                2.0 * crate::algebra::q_dot(&fx, &d)
            });
            let radial: f64 = g.iter().zip(&x).map(|(a, b)| a * b).sum();
            let tangent: [f64; 4] = std::array::from_fn(|j| g[j] - radial * x[j]);
            let tn = tangent.iter().map(|t| t * t).sum::<f64>().sqrt();
            if tn < 1e-14 {
                break;
            }
            let cand = normalize(&std::array::from_fn(|j| x[j] + step * tangent[j] / tn));
            let vc = value(&cand)?;
            if vc > v {
                x = cand;
                v = vc;
                step *= 1.5;
            } else {
                step *= 0.5;
                if step < 1e-12 {
                    break;
                }
            }
        }
        best = best.max(v);
    }
    Ok(best.sqrt())
}

fn normalize(x: &[f64; 4]) -> [f64; 4] {
    let n = norm_sqr(x).sqrt();
    x.map(|v| v / n)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SchwarzPoint {
    pub point: [f64; 4],
    pub value: f64,
    pub bound: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SchwarzReport {
    /// Sup of `|f|` used to normalize the input.
    pub normalizer: f64,
    /// Largest `|f(z)| - U(|z| i_0)` over the grid.
    pub worst_excess: f64,
    pub worst: Option<SchwarzPoint>,
    pub tolerance: f64,
    pub holds: bool,
}

/// Checks `|f(z)| <= U(|z| i_0)` for harmonic `f` with `f(0) = 0`, after
/// normalizing `f` by its sup over the closed ball (taken on the sphere).
pub fn check_schwarz(f: &SymFunction, grid: &[[f64; 4]], u: &mut AxialU, sup_samples: &[[f64; 4]]) -> Result<SchwarzReport> {
    require_harmonic(f)?;
    let f0 = f.eval_q(&[0.0; 4])?.abs();
    if f0 > 1e-12 {
        return Err(Error::InvalidArgument(format!("f(0) = {f0:e} must vanish")));
    }
    let tolerance = 1e-4;
    let normalizer = sphere_sup(f, sup_samples)?;
    if normalizer == 0.0 {
        return Ok(SchwarzReport { normalizer, worst_excess: f64::NEG_INFINITY, worst: None, tolerance, holds: true });
    }
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst = None;
    for z in grid {
        let r = norm_sqr(z).sqrt();
        let bound = u.at(r)?;
        let value = f.eval_q(z)?.abs() / normalizer;
        if value - bound > worst_excess {
            worst_excess = value - bound;
            worst = Some(SchwarzPoint { point: *z, value, bound });
        }
    }
    Ok(SchwarzReport { normalizer, worst_excess, worst, tolerance, holds: worst_excess <= tolerance })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Quaternion as Q;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_ball_point(rng: &mut impl Rng, rmax: f64) -> [f64; 4] {
        loop {
            let p: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-rmax..rmax));
            if norm_sqr(&p).sqrt() <= rmax {
                return p;
            }
        }
    }

    fn random_unit(rng: &mut impl Rng) -> [f64; 4] {
        loop {
            let p = random_ball_point(rng, 1.0);
            if norm_sqr(&p) > 0.01 {
                return normalize(&p);
            }
        }
    }

    #[test]
    fn kernel_examples() {
        let xi = [0.0, 0.6, 0.0, 0.8];
        assert_eq!(kernel(&[0.0; 4], &xi).unwrap(), 1.0);
        assert!((kernel(&[0.5, 0.0, 0.0, 0.0], &[1.0, 0.0, 0.0, 0.0]).unwrap() - 12.0).abs() < 1e-12);
        assert!(matches!(kernel(&xi, &xi), Err(Error::Singularity(_))));
    }

    #[test]
    fn kernel_integrates_to_one() {
        let rule = QuadratureRule::quad_sphere(80).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let z = random_ball_point(&mut rng, 0.6);
            let total = rule.integrate_real(|xi| kernel(&z, xi).unwrap());
            assert!((total - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn sigma_star_at_origin() {
        let w = [0.6, 0.0, 0.8, 0.0];
        let v = kernel_sigma_star(&[0.0; 4], &w).unwrap();
        assert!((v - Q::from_point(&w).conj().scale(&4.0)).abs() < 1e-14);
    }

    #[test]
    fn closed_form_matches_symbolic_derivative() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let z = random_ball_point(&mut rng, 0.9);
            let w = random_unit(&mut rng);
            let sym = kernel_shifted(&w).dirac_star().unwrap();
            let x: Vec<f64> = z.iter().zip(&w).map(|(a, b)| a - b).collect();
            let s = sym.eval_q(&x).unwrap();
            let c = kernel_sigma_star(&z, &w).unwrap();
            assert!((s.clone() - c.clone()).abs() <= 1e-10 * c.abs().max(1.0));
            let sig = kernel_sigma(&z, &w).unwrap();
            assert!((sig - c.conj()).abs() <= 1e-10 * c.abs().max(1.0));
            // the shifted kernel really is P
            let p = kernel_shifted(&w).eval_q(&x).unwrap().w;
            assert!((p - kernel(&z, &w).unwrap()).abs() <= 1e-10 * p.abs().max(1.0));
        }
    }

    #[test]
    fn extension_reproduces_harmonic_polynomials() {
        let rule = QuadratureRule::quad_sphere(60).unwrap();
        let p = SymFunction::coordinate(4, 0)
            .try_mul(&SymFunction::coordinate(4, 1))
            .unwrap()
            .left_mul(&Q::new(1.0, 0.5, 0.0, -2.0))
            .try_add(&SymFunction::coordinate(4, 2))
            .unwrap();
        assert!(p.is_harmonic().unwrap());
        let samples = SampledBoundary::new(&BoundaryFunction::Sym(p.clone()), &rule).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let z = random_ball_point(&mut rng, 0.5);
            let e = samples.extend(&z).unwrap().quaternion().clone() - p.eval_q(&z).unwrap();
            assert!(e.abs() < 1e-9);
        }
        let one = extend(&BoundaryFunction::sampled(|_| Q::one()), &[0.1, 0.2, 0.0, 0.0], &rule).unwrap();
        assert!((one.quaternion().clone() - Q::one()).abs() < 1e-12);
        assert!(extend(&BoundaryFunction::Sym(p), &[1.0, 0.0, 0.0, 0.0], &rule).is_err());
    }

    #[test]
    fn extension_is_left_linear() {
        let rule = QuadratureRule::quad_sphere(30).unwrap();
        let f = BoundaryFunction::sampled(|x| Q::new(x[0].exp(), x[1], 0.0, x[2] * x[3]));
        let a = Q::new(0.3, -1.0, 2.0, 0.5);
        let z = [0.1, -0.2, 0.3, 0.0];
        let lhs = extend(&f.left_mul(&a), &z, &rule).unwrap().quaternion().clone();
        let rhs = a.clone() * extend(&f, &z, &rule).unwrap().quaternion().clone();
        assert!((lhs - rhs).abs() < 1e-12);
        let lhs = represent(&f.left_mul(&a), &z, &rule).unwrap().quaternion().clone();
        let rhs = a * represent(&f, &z, &rule).unwrap().quaternion().clone();
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn extension_of_smooth_data_is_harmonic() {
        let rule = QuadratureRule::quad_sphere(60).unwrap();
        let f = BoundaryFunction::sampled(|x| Q::new(x[0].exp() * x[1].cos(), (x[2] + x[3]).sin(), 0.0, 0.0));
        let s = SampledBoundary::new(&f, &rule).unwrap();
        let h = 1e-3;
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..5 {
            let z = random_ball_point(&mut rng, 0.4);
            let c = s.extend(&z).unwrap().quaternion().clone();
            let mut lap = c.scale(&-8.0);
            for i in 0..4 {
                for sign in [1.0, -1.0] {
                    let mut p = z;
                    p[i] += sign * h;
                    lap = lap + s.extend(&p).unwrap().quaternion().clone();
                }
            }
            assert!(lap.scale(&(1.0 / (h * h))).abs() < 1e-3);
        }
    }

    #[test]
    fn representation_of_coordinate() {
        let rule = QuadratureRule::quad_sphere(60).unwrap();
        let h = BoundaryFunction::Sym(SymFunction::coordinate(4, 0));
        let s = SampledBoundary::new(&h, &rule).unwrap();
        let zero = SampledBoundary::new(&BoundaryFunction::sampled(|_| Q::zero()), &rule).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let z = random_ball_point(&mut rng, 0.5);
            assert!((s.represent(&z).unwrap().quaternion().clone() - Q::one()).abs() < 1e-9);
            assert!(zero.represent(&z).unwrap().is_zero());
        }
    }

    #[test]
    fn representation_lies_in_dirac_kernel() {
        let rule = QuadratureRule::quad_sphere(60).unwrap();
        let h = BoundaryFunction::sampled(|x| Q::new(x[0].exp() * x[1].cos(), x[0].exp() * x[1].sin(), 0.0, 0.0));
        let s = SampledBoundary::new(&h, &rule).unwrap();
        let step = 1e-4;
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..5 {
            let z = random_ball_point(&mut rng, 0.4);
            let mut sigma = Q::zero();
            for j in 0..4 {
                let (mut a, mut b) = (z, z);
                a[j] += step;
                b[j] -= step;
                let d = (s.represent(&a).unwrap().quaternion().clone() - s.represent(&b).unwrap().quaternion().clone())
                    .scale(&(0.5 / step));
                sigma = sigma + d.mul_unit_right(j);
            }
            assert!(sigma.abs() < 1e-4);
        }
    }

    #[test]
    fn extremal_function_properties() {
        let rule = QuadratureRule::quad_sphere(40).unwrap();
        assert!(extremal_u(&[0.0; 4], &rule).unwrap().abs() < 1e-14);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let z = random_ball_point(&mut rng, 0.9);
            let u = extremal_u(&z, &rule).unwrap();
            assert!((-1.0..=1.0).contains(&u));
        }
        let mut axial = AxialU::new(200).unwrap();
        let vals: Vec<f64> = (1..=9).map(|k| axial.at(k as f64 / 10.0).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[0] < w[1]));
        // agrees with the generic rule where both are accurate
        let generic = extremal_u(&[0.3, 0.0, 0.0, 0.0], &QuadratureRule::sphere(ProductSpec {
            theta1_points: 100,
            theta2_points: 2,
            theta3_points: 2,
            split_equator: true,
        }).unwrap())
        .unwrap();
        assert!((generic - vals[2]).abs() < 1e-12);
    }

    #[test]
    fn max_principle_examples() {
        let rule = QuadratureRule::quad_sphere(10).unwrap();
        let interior: Vec<[f64; 4]> = rule.nodes.iter().map(|p| p.map(|v| 0.7 * v)).collect();
        let c = SymFunction::constant(4, Q::new(1.0, 2.0, 2.0, 0.0));
        let rep = check_max_principle(&c, &interior, &rule).unwrap();
        assert!((rep.interior_max - 3.0).abs() < 1e-14 && (rep.boundary_max - 3.0).abs() < 1e-14);
        let rep = check_max_principle(&SymFunction::coordinate(4, 0), &interior, &rule).unwrap();
        assert!(rep.holds && rep.interior_max < rep.boundary_max);
        let bad = SymFunction::coordinate(4, 0).try_mul(&SymFunction::coordinate(4, 0)).unwrap();
        assert!(matches!(check_max_principle(&bad, &interior, &rule), Err(Error::NotHarmonic(_))));
    }

    #[test]
    fn schwarz_examples() {
        let mut u = AxialU::new(200).unwrap();
        let samples = QuadratureRule::quad_sphere(30).unwrap().nodes;
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let grid: Vec<[f64; 4]> = (0..200).map(|_| random_ball_point(&mut rng, 0.9)).collect();
        let rep = check_schwarz(&SymFunction::zero4(), &grid, &mut u, &samples).unwrap();
        assert!(rep.holds);
        let rep = check_schwarz(&SymFunction::coordinate(4, 0), &grid, &mut u, &samples).unwrap();
        assert!(rep.holds, "{rep:?}");
        assert!((rep.normalizer - 1.0).abs() < 1e-12);
        let bad = SymFunction::constant(4, Q::one());
        assert!(check_schwarz(&bad, &grid, &mut u, &samples).is_err());
    }

    #[test]
    fn sphere_sup_refines_coarse_grid() {
        // x_0 x_1 peaks at 1/2 off the coarse nodes
        let f = SymFunction::coordinate(4, 0).try_mul(&SymFunction::coordinate(4, 1)).unwrap();
        let coarse = QuadratureRule::quad_sphere(4).unwrap().nodes;
        assert!((sphere_sup(&f, &coarse).unwrap() - 0.5).abs() < 1e-9);
    }
}
