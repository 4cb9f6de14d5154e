//! Geometry of `S^3` and the unit ball in `R^4`: spherical coordinates, the
//! coordinate form of the Dirac operator, product quadrature, exact
//! monomial moments and the function norms used throughout the crate.
//!
//! All measures are normalized: the sphere rule has total mass 1 and the ball
//! rule integrates against `dmu / mu(B)`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::Quaternion;
use crate::error::{Error, Result};
use crate::scalar::{pairwise_sum, Rational, Scalar};
use crate::symfun::{MultiIndex, SymFunction};

/// Point `(r, theta1, theta2, theta3)` of `R^4` in spherical coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphericalPoint {
    pub r: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
}

impl SphericalPoint {
    pub fn new(r: f64, theta1: f64, theta2: f64, theta3: f64) -> Result<Self> {
        let bad = |what, v: f64| Err(Error::OutOfRange { what, value: v.to_string() });
        if !(r >= 0.0) {
            return bad("radius", r);
        }
        if !(0.0..=PI).contains(&theta1) {
            return bad("theta1", theta1);
        }
        if !(0.0..=PI).contains(&theta2) {
            return bad("theta2", theta2);
        }
        if !(0.0..2.0 * PI).contains(&theta3) {
            return bad("theta3", theta3);
        }
        Ok(SphericalPoint { r, theta1, theta2, theta3 })
    }

    pub fn from_cart(x: &[f64; 4]) -> Self {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r == 0.0 {
            return SphericalPoint { r, theta1: 0.0, theta2: 0.0, theta3: 0.0 };
        }
        let rho1 = (x[1] * x[1] + x[2] * x[2] + x[3] * x[3]).sqrt();
        let rho2 = (x[2] * x[2] + x[3] * x[3]).sqrt();
        let theta1 = rho1.atan2(x[0]);
        let theta2 = rho2.atan2(x[1]);
        let mut theta3 = x[3].atan2(x[2]);
        if theta3 < 0.0 {
            theta3 += 2.0 * PI;
        }
        if theta3 >= 2.0 * PI {
            theta3 = 0.0;
        }
        SphericalPoint { r, theta1, theta2, theta3 }
    }

    pub fn to_cart(&self) -> [f64; 4] {
        let (s1, c1) = self.theta1.sin_cos();
        let (s2, c2) = self.theta2.sin_cos();
        let (s3, c3) = self.theta3.sin_cos();
        let r = self.r;
        [r * c1, r * s1 * c2, r * s1 * s2 * c3, r * s1 * s2 * s3]
    }

    /// `J = r^3 sin^2(theta1) sin(theta2)`.
    pub fn jacobian(&self) -> f64 {
        self.r.powi(3) * self.theta1.sin().powi(2) * self.theta2.sin()
    }

    /// Columns `dx / dt_k` for `t = (r, theta1, theta2, theta3)`.
    fn tangents(&self) -> [[f64; 4]; 4] {
        let (s1, c1) = self.theta1.sin_cos();
        let (s2, c2) = self.theta2.sin_cos();
        let (s3, c3) = self.theta3.sin_cos();
        let r = self.r;
        [
            [c1, s1 * c2, s1 * s2 * c3, s1 * s2 * s3],
            [-r * s1, r * c1 * c2, r * c1 * s2 * c3, r * c1 * s2 * s3],
            [0.0, -r * s1 * s2, r * s1 * c2 * c3, r * s1 * c2 * s3],
            [0.0, 0.0, -r * s1 * s2 * s3, r * s1 * s2 * c3],
        ]
    }
}

/// The radial field `alpha_1`, defined everywhere.
pub fn alpha_radial(t: &SphericalPoint) -> Quaternion {
    let (s1, c1) = t.theta1.sin_cos();
    let (s2, c2) = t.theta2.sin_cos();
    let (s3, c3) = t.theta3.sin_cos();
    Quaternion::new(c1, s1 * c2, s1 * s2 * c3, s1 * s2 * s3)
}

/// The fields `alpha_1..alpha_4` with `sigma f = sum_k (df/dt_k) alpha_k`.
pub fn alpha_fields(t: &SphericalPoint) -> Result<[Quaternion; 4]> {
    let j = t.jacobian();
    if !(j > 0.0) {
        return Err(Error::Singularity(format!("Jacobian vanishes at {t:?}")));
    }
    let (s1, c1) = t.theta1.sin_cos();
    let (s2, c2) = t.theta2.sin_cos();
    let (s3, c3) = t.theta3.sin_cos();
    let k = t.r * t.r / j;
    Ok([
        alpha_radial(t),
        Quaternion::new(
            -s1.powi(3) * s2,
            s1 * s1 * c1 * s2 * c2,
            s1 * s1 * c1 * s2 * s2 * c3,
            s1 * s1 * c1 * s2 * s2 * s3,
        )
        .scale(&k),
        Quaternion::new(0.0, -s1 * s2 * s2, s1 * s2 * c2 * c3, s1 * s2 * c2 * s3).scale(&k),
        Quaternion::new(0.0, 0.0, -s1 * s3, s1 * c3).scale(&k),
    ])
}

/// Dirac operator evaluated in spherical coordinates at `t`.
pub fn sigma_spherical(f: &SymFunction, t: &SphericalPoint) -> Result<Quaternion> {
    if f.n() != 4 || f.l() != 1 {
        return Err(Error::Unsupported("spherical Dirac operator needs n = 4, l = 1".into()));
    }
    let alpha = alpha_fields(t)?;
    let x = t.to_cart();
    let grads = (0..4)
        .map(|i| f.partial(i)?.eval_q(&x))
        .collect::<Result<Vec<_>>>()?;
    let mut acc = Quaternion::zero();
    for (tk, ak) in t.tangents().iter().zip(&alpha) {
        let mut d = Quaternion::zero();
        for (g, dx) in grads.iter().zip(tk) {
            d = d + g.scale(dx);
        }
        acc = acc + d * ak.clone();
    }
    Ok(acc)
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p1 = z;
                p0 = 1.0;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// Weighted nodes for `theta1` against `sin^2`, unnormalized.
fn theta1_rule(points: usize, split: bool) -> Vec<(f64, f64)> {
    if split {
        let (x, w) = gauss_legendre(points);
        let half = PI / 4.0;
        [0.0, PI / 2.0]
            .iter()
            .flat_map(|&a| {
                x.iter()
                    .zip(&w)
                    .map(move |(xi, wi)| {
                        let t = a + half * (xi + 1.0);
                        (t, wi * half * t.sin().powi(2))
                    })
                    .collect::<Vec<_>>()
            })
            .collect()
    } else {
        // Gauss rule for the weight sin^2 on [0, pi] (Chebyshev, second kind).
        let h = PI / (points + 1) as f64;
        (1..=points)
            .map(|k| {
                let t = k as f64 * h;
                (t, h * t.sin().powi(2))
            })
            .collect()
    }
}

/// Shape of a product rule on `S^3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductSpec {
    pub theta1_points: usize,
    pub theta2_points: usize,
    pub theta3_points: usize,
    /// Split the `theta1` range at `pi/2` and use Gauss-Legendre on each half,
    /// so integrands discontinuous across `x_1 = 0` converge spectrally.
    pub split_equator: bool,
}

impl ProductSpec {
    /// Rule exact for all monomials of total degree `<= order`.
    pub fn exact_for(order: usize) -> Self {
        ProductSpec {
            theta1_points: order / 2 + 1,
            theta2_points: order / 2 + 1,
            theta3_points: order + 1,
            split_equator: false,
        }
    }
}

/// Nodes and positive weights of total mass 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub nodes: Vec<[f64; 4]>,
    pub weights: Vec<f64>,
}

const CHUNK: usize = 2048;

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn normalized(nodes: Vec<[f64; 4]>, weights: Vec<f64>) -> Self {
        let total = pairwise_sum(&weights, 0.0, &|a, b| a + b);
        QuadratureRule { nodes, weights: weights.iter().map(|w| w / total).collect() }
    }

    pub fn sphere(spec: ProductSpec) -> Result<Self> {
        if spec.theta1_points == 0 || spec.theta2_points == 0 || spec.theta3_points == 0 {
            return Err(Error::InvalidArgument("product rule needs at least one point per axis".into()));
        }
        let t1 = theta1_rule(spec.theta1_points, spec.split_equator);
        let (x2, w2) = gauss_legendre(spec.theta2_points);
        let m = spec.theta3_points;
        let mut nodes = Vec::with_capacity(t1.len() * x2.len() * m);
        let mut weights = Vec::with_capacity(nodes.capacity());
        for &(th1, w1) in &t1 {
            for (c2, w2) in x2.iter().zip(&w2) {
                let th2 = c2.acos();
                for k in 0..m {
                    let th3 = 2.0 * PI * k as f64 / m as f64;
                    let p = SphericalPoint { r: 1.0, theta1: th1, theta2: th2, theta3: th3 };
                    nodes.push(p.to_cart());
                    weights.push(w1 * w2);
                }
            }
        }
        Ok(Self::normalized(nodes, weights))
    }

    /// Sphere rule integrating every monomial of degree `<= order` exactly.
    pub fn quad_sphere(order: usize) -> Result<Self> {
        if order < 2 {
            return Err(Error::OutOfRange { what: "quadrature order", value: order.to_string() });
        }
        Self::sphere(ProductSpec::exact_for(order))
    }

    /// Ball rule: Gauss-Legendre in `r` against `4 r^3 dr` times a sphere rule.
    pub fn quad_ball(order_r: usize, order_ang: usize) -> Result<Self> {
        if order_r < 2 {
            return Err(Error::OutOfRange { what: "radial quadrature order", value: order_r.to_string() });
        }
        let sphere = Self::quad_sphere(order_ang)?;
        let (x, w) = gauss_legendre(order_r / 2 + 2);
        let mut nodes = Vec::with_capacity(x.len() * sphere.len());
        let mut weights = Vec::with_capacity(nodes.capacity());
        for (xi, wi) in x.iter().zip(&w) {
            let r = 0.5 * (xi + 1.0);
            let wr = 0.5 * wi * 4.0 * r.powi(3);
            for (p, wp) in sphere.nodes.iter().zip(&sphere.weights) {
                nodes.push(p.map(|v| v * r));
                weights.push(wr * wp);
            }
        }
        Ok(Self::normalized(nodes, weights))
    }

    /// Weighted sum of `f` over the nodes. Node chunks are evaluated in
    /// parallel and combined by a fixed pairwise reduction.
    pub fn try_integrate<V, F>(&self, zero: V, add: impl Fn(&V, &V) -> V + Sync, f: F) -> Result<V>
    where
        V: Clone + Send + Sync,
        F: Fn(&[f64; 4], f64) -> Result<V> + Sync,
    {
        let partial: Vec<V> = self
            .nodes
            .par_chunks(CHUNK)
            .zip(self.weights.par_chunks(CHUNK))
            .map(|(ns, ws)| {
                let vals = ns.iter().zip(ws).map(|(p, w)| f(p, *w)).collect::<Result<Vec<V>>>()?;
                Ok(pairwise_sum(&vals, zero.clone(), &add))
            })
            .collect::<Result<Vec<V>>>()?;
        Ok(pairwise_sum(&partial, zero, &add))
    }

    pub fn integrate_real(&self, f: impl Fn(&[f64; 4]) -> f64 + Sync) -> f64 {
        self.try_integrate(0.0, |a, b| a + b, |p, w| Ok(w * f(p))).expect("infallible")
    }

    pub fn integrate_q(&self, f: impl Fn(&[f64; 4]) -> Quaternion + Sync) -> Quaternion {
        self.try_integrate_q(|p| Ok(f(p))).expect("infallible")
    }

    pub fn try_integrate_q(&self, f: impl Fn(&[f64; 4]) -> Result<Quaternion> + Sync) -> Result<Quaternion> {
        self.try_integrate(Quaternion::zero(), |a, b| a.clone() + b.clone(), |p, w| Ok(f(p)?.scale(&w)))
    }

    /// Integral of a symbolic function (first Clifford component).
    pub fn integrate_sym(&self, f: &SymFunction) -> Result<Quaternion> {
        self.try_integrate_q(|p| f.eval_q(p))
    }
}

fn double_factorial_odd(k: u32) -> i64 {
    // (2k - 1)!!
    (1..=k as i64).map(|j| 2 * j - 1).product::<i64>().max(1)
}

/// Exact normalized sphere moment `int_{S^{n-1}} x^beta dpsi`.
pub fn moment_sphere_exact(beta: &MultiIndex) -> Rational {
    if !beta.all_even() {
        return Rational::zero();
    }
    let n = beta.len() as i64;
    let mut num = Rational::one();
    for &b in &beta.0 {
        let k = b / 2;
        num = num * Rational::new(double_factorial_odd(k), 1i64 << k);
    }
    let total = (beta.order() / 2) as i64;
    let mut den = Rational::one();
    for j in 0..total {
        den = den * Rational::new(n + 2 * j, 2);
    }
    num / den
}

pub fn moment_sphere(beta: &MultiIndex) -> f64 {
    moment_sphere_exact(beta).to_f64()
}

/// Exact normalized ball moment `int_B x^beta r^s dmu / mu(B)`.
pub fn moment_ball_exact(beta: &MultiIndex, s: i32) -> Result<Rational> {
    let n = beta.len() as i64;
    let d = n + beta.order() as i64 + s as i64;
    if d <= 0 {
        return Err(Error::Singularity(format!("ball moment of x^{beta} r^{s} diverges")));
    }
    Ok(Rational::new(n, d) * moment_sphere_exact(beta))
}

pub fn moment_ball(beta: &MultiIndex, s: i32) -> Result<f64> {
    Ok(moment_ball_exact(beta, s)?.to_f64())
}

/// Radii `sin(j pi / (2k))`, `j = 1..k`, clustered toward the boundary.
pub fn chebyshev_r_grid(k: usize) -> Vec<f64> {
    (1..=k)
        .map(|j| if j == k { 1.0 } else { (j as f64 * PI / (2 * k) as f64).sin() })
        .collect()
}

fn check_p(p: f64) -> Result<()> {
    if p > 1.0 && p.is_finite() {
        Ok(())
    } else {
        Err(Error::OutOfRange { what: "exponent p", value: p.to_string() })
    }
}

pub fn norm_sup(f: impl Fn(&[f64; 4]) -> Quaternion + Sync, grid: &[[f64; 4]]) -> Result<f64> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    Ok(grid.par_iter().map(|x| f(x).abs()).reduce(|| 0.0, f64::max))
}

pub fn norm_lp_sphere(f: impl Fn(&[f64; 4]) -> Quaternion + Sync, p: f64, rule: &QuadratureRule) -> Result<f64> {
    check_p(p)?;
    Ok(rule.integrate_real(|x| f(x).abs().powf(p)).powf(1.0 / p))
}

pub fn norm_l2_ball(f: impl Fn(&[f64; 4]) -> Quaternion + Sync, rule: &QuadratureRule) -> Result<f64> {
    Ok(rule.integrate_real(|x| f(x).norm_sqr()).sqrt())
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HardyMode {
    /// `sup_r (int |f(ry)|^p dpsi)^(1/p)`.
    #[default]
    Standard,
    /// `(sup_r r^(1-n) int |f(ry)| dpsi)^(1/p)`; infinite for constants.
    Literal,
}

/// Per-radius profile `(r, mean)` plus the resulting norm.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HardyReport {
    pub profile: Vec<(f64, f64)>,
    pub norm: f64,
    pub mode: HardyMode,
}

pub fn hardy_profile(
    f: impl Fn(&[f64; 4]) -> Quaternion + Sync,
    p: f64,
    r_grid: &[f64],
    rule: &QuadratureRule,
    mode: HardyMode,
) -> Result<HardyReport> {
    check_p(p)?;
    if r_grid.is_empty() || rule.is_empty() {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    if let Some(r) = r_grid.iter().find(|r| !(**r > 0.0 && **r <= 1.0)) {
        return Err(Error::OutOfRange { what: "Hardy radius", value: r.to_string() });
    }
    let profile: Vec<(f64, f64)> = r_grid
        .iter()
        .map(|&r| {
            let mean = match mode {
                HardyMode::Standard => rule.integrate_real(|y| f(&y.map(|v| v * r)).abs().powf(p)).powf(1.0 / p),
                HardyMode::Literal => r.powi(-3) * rule.integrate_real(|y| f(&y.map(|v| v * r)).abs()),
            };
            (r, mean)
        })
        .collect();
    let sup = profile.iter().map(|(_, m)| *m).fold(0.0, f64::max);
    let norm = match mode {
        HardyMode::Standard => sup,
        HardyMode::Literal => sup.powf(1.0 / p),
    };
    Ok(HardyReport { profile, norm, mode })
}

pub fn norm_hardy(
    f: impl Fn(&[f64; 4]) -> Quaternion + Sync,
    p: f64,
    r_grid: &[f64],
    rule: &QuadratureRule,
    mode: HardyMode,
) -> Result<f64> {
    Ok(hardy_profile(f, p, r_grid, rule, mode)?.norm)
}

/// `(sum_{|alpha| <= 1} int_S |D^alpha f|^p dpsi)^(1/p)`.
pub fn norm_w1_sphere(f: &SymFunction, p: f64, rule: &QuadratureRule) -> Result<f64> {
    check_p(p)?;
    let mut parts = vec![f.clone()];
    for i in 0..f.n() {
        parts.push(f.partial(i)?);
    }
    let mut total = 0.0;
    for g in &parts {
        total += rule.try_integrate(0.0, |a, b| a + b, |x, w| Ok(w * g.eval_q(x)?.abs().powf(p)))?;
    }
    Ok(total.powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Quaternion as Q;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn coordinate_examples() {
        let x = SphericalPoint::new(1.0, 0.0, 0.4, 1.0).unwrap().to_cart();
        assert_eq!(x, [1.0, 0.0, 0.0, 0.0]);
        let x = SphericalPoint::new(2.0, PI / 2.0, PI / 2.0, 0.0).unwrap().to_cart();
        assert!(x.iter().zip([0.0, 0.0, 2.0, 0.0]).all(|(a, b)| close(*a, b, 1e-15)));
        let t = SphericalPoint::new(1.0, PI / 2.0, PI / 2.0, 0.3).unwrap();
        assert!(close(t.jacobian(), 1.0, 1e-15));
        assert!(SphericalPoint::new(1.0, 4.0, 0.0, 0.0).is_err());
        assert!(SphericalPoint::new(1.0, 0.0, 0.0, 2.0 * PI).is_err());
    }

    #[test]
    fn cartesian_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let t = SphericalPoint::new(
                rng.gen_range(0.01..3.0),
                rng.gen_range(0.0..PI),
                rng.gen_range(0.0..PI),
                rng.gen_range(0.0..2.0 * PI),
            )
            .unwrap();
            let x = t.to_cart();
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(close(norm, t.r, 1e-12));
            let back = SphericalPoint::from_cart(&x).to_cart();
            assert!(back.iter().zip(&x).all(|(a, b)| close(*a, *b, 1e-12)));
        }
    }

    #[test]
    fn alpha_field_examples() {
        assert_eq!(alpha_radial(&SphericalPoint::new(1.0, 0.0, 0.5, 0.5).unwrap()), Q::one());
        let a = alpha_fields(&SphericalPoint::new(1.0, PI / 2.0, PI / 2.0, 0.0).unwrap()).unwrap();
        assert!((a[3].clone() - Q::unit(3)).abs() < 1e-15);
        assert!(matches!(
            alpha_fields(&SphericalPoint::new(1.0, 0.0, 0.5, 0.5).unwrap()),
            Err(Error::Singularity(_))
        ));
    }

    #[test]
    fn alpha_fields_are_coordinate_gradients() {
        // alpha_k = sum_j (dt_k/dx_j) i_j, checked against the inverse of dx/dt.
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let t = SphericalPoint::new(
                rng.gen_range(0.2..2.0),
                rng.gen_range(0.2..PI - 0.2),
                rng.gen_range(0.2..PI - 0.2),
                rng.gen_range(0.0..2.0 * PI),
            )
            .unwrap();
            let a = alpha_fields(&t).unwrap();
            let tan = t.tangents();
            // (dt/dx)(dx/dt) = I  =>  <alpha_k, tangent_m> = delta_km
            for (k, ak) in a.iter().enumerate() {
                for (m, tm) in tan.iter().enumerate() {
                    let dot: f64 = (0..4).map(|j| ak.coord(j) * tm[j]).sum();
                    assert!(close(dot, if k == m { 1.0 } else { 0.0 }, 1e-12));
                }
            }
        }
    }

    #[test]
    fn spherical_dirac_simple_cases() {
        let t = SphericalPoint::new(0.7, 1.1, 0.8, 2.0).unwrap();
        let z0 = SymFunction::coordinate(4, 0);
        assert!((sigma_spherical(&z0, &t).unwrap() - Q::one()).abs() < 1e-12);
        let id = SymFunction::identity4();
        assert!((sigma_spherical(&id, &t).unwrap() - Q::real(-2.0)).abs() < 1e-12);
    }

    #[test]
    fn gauss_legendre_exactness() {
        for n in 1..30 {
            let (x, w) = gauss_legendre(n);
            assert!(close(w.iter().sum(), 2.0, 1e-13));
            for k in 0..(2 * n) {
                let q: f64 = x.iter().zip(&w).map(|(a, b)| b * a.powi(k as i32)).sum();
                let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                assert!(close(q, exact, 1e-13), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn sphere_rule_basics() {
        let rule = QuadratureRule::quad_sphere(8).unwrap();
        assert!(close(rule.weights.iter().sum(), 1.0, 1e-12));
        assert!(rule.weights.iter().all(|w| *w > 0.0));
        for p in &rule.nodes {
            assert!(close(p.iter().map(|v| v * v).sum::<f64>(), 1.0, 1e-12));
        }
        assert!(close(rule.integrate_real(|_| 1.0), 1.0, 1e-14));
        assert!(close(rule.integrate_real(|x| x[0] * x[0]), 0.25, 1e-14));
        assert!(close(rule.integrate_real(|x| x[0].powi(4)), 0.125, 1e-14));
        assert!(QuadratureRule::quad_sphere(1).is_err());
    }

    #[test]
    fn sphere_rule_exact_on_all_monomials() {
        for order in [2usize, 5, 8, 12] {
            let rule = QuadratureRule::quad_sphere(order).unwrap();
            for beta in MultiIndex::all_up_to(4, order as u32) {
                let q = rule.integrate_real(|x| (0..4).map(|i| x[i].powi(beta.0[i] as i32)).product());
                assert!(close(q, moment_sphere(&beta), 1e-13), "order {order} beta {beta}");
            }
        }
    }

    #[test]
    fn x1_fourth_moment_against_dense_rule() {
        // independent of the Gamma formula: a much finer rule
        let rule = QuadratureRule::sphere(ProductSpec {
            theta1_points: 40,
            theta2_points: 40,
            theta3_points: 40,
            split_equator: true,
        })
        .unwrap();
        assert!(close(rule.integrate_real(|x| x[0].powi(4)), 0.125, 1e-13));
        assert!(close(rule.integrate_real(|x| (x[1] * x[3]).powi(2)), moment_sphere(&MultiIndex(vec![0, 2, 0, 2])), 1e-13));
    }

    #[test]
    fn ball_rule_exact() {
        let rule = QuadratureRule::quad_ball(8, 8).unwrap();
        assert!(close(rule.weights.iter().sum(), 1.0, 1e-12));
        assert!(close(rule.integrate_real(|x| x[0] * x[0]), 1.0 / 6.0, 1e-14));
        for beta in MultiIndex::all_up_to(4, 6) {
            let q = rule.integrate_real(|x| (0..4).map(|i| x[i].powi(beta.0[i] as i32)).product());
            assert!(close(q, moment_ball(&beta, 0).unwrap(), 1e-13));
        }
    }

    #[test]
    fn moment_examples() {
        assert_eq!(moment_sphere_exact(&MultiIndex::zeros(4)), Rational::one());
        assert_eq!(moment_sphere_exact(&MultiIndex(vec![1, 0, 0, 0])), Rational::zero());
        assert_eq!(moment_sphere_exact(&MultiIndex(vec![2, 0, 0, 0])), Rational::new(1, 4));
        assert_eq!(moment_sphere_exact(&MultiIndex(vec![4, 0, 0, 0])), Rational::new(1, 8));
        assert_eq!(moment_ball_exact(&MultiIndex(vec![2, 0, 0, 0]), 0).unwrap(), Rational::new(1, 6));
        assert!(moment_ball_exact(&MultiIndex::zeros(4), -4).is_err());
        assert!(moment_ball_exact(&MultiIndex::zeros(4), -3).is_ok());
    }

    #[test]
    fn ball_sphere_factorization_is_exact() {
        for beta in MultiIndex::all_up_to(4, 8) {
            let lhs = moment_ball_exact(&beta, 0).unwrap() * Rational::new(4 + beta.order() as i64, 4);
            assert_eq!(lhs, moment_sphere_exact(&beta));
        }
    }

    #[test]
    fn moments_sum_to_radial_identity() {
        // sum_i int x_i^2 x^beta = int x^beta on the sphere
        for beta in MultiIndex::all_up_to(4, 6) {
            let lhs = (0..4).fold(Rational::zero(), |acc, i| {
                let mut b = beta.clone();
                b.0[i] += 2;
                acc + moment_sphere_exact(&b)
            });
            assert_eq!(lhs, moment_sphere_exact(&beta));
        }
    }

    #[test]
    fn norm_examples() {
        let rule = QuadratureRule::quad_sphere(10).unwrap();
        let grid = chebyshev_r_grid(32);
        assert_eq!(grid.len(), 32);
        assert_eq!(*grid.last().unwrap(), 1.0);
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(norm_sup(|_| Q::one(), &rule.nodes).unwrap(), 1.0);
        let c = Q::new(1.0, 2.0, -2.0, 0.0);
        let h = norm_hardy(|_| c.clone(), 2.0, &grid, &rule, HardyMode::Standard).unwrap();
        assert!(close(h, 3.0, 1e-12));
        let lit = norm_hardy(|_| c.clone(), 2.0, &grid, &rule, HardyMode::Literal).unwrap();
        assert!(lit > 100.0);
        assert!(norm_hardy(|_| c.clone(), 1.0, &grid, &rule, HardyMode::Standard).is_err());
        assert!(norm_hardy(|_| c.clone(), 2.0, &[], &rule, HardyMode::Standard).is_err());
        assert!(norm_sup(|_| Q::one(), &[]).is_err());
    }

    #[test]
    fn hardy_norm_of_kernel_element_is_boundary_norm() {
        // w = z_1 - z_0 i_1 is in ker sigma
        let w = |x: &[f64; 4]| Q::new(x[1], -x[0], 0.0, 0.0);
        let rule = QuadratureRule::quad_sphere(8).unwrap();
        let h = norm_hardy(w, 2.0, &chebyshev_r_grid(32), &rule, HardyMode::Standard).unwrap();
        let b = norm_lp_sphere(w, 2.0, &rule).unwrap();
        assert!(close(h, b, 1e-12));
        assert!(close(b, 0.5f64.sqrt(), 1e-12));
    }

    #[test]
    fn w1_norm_of_linear_function() {
        let rule = QuadratureRule::quad_sphere(6).unwrap();
        let f = SymFunction::coordinate(4, 0);
        // int x_0^2 + 1 (d_0) = 1/4 + 1
        assert!(close(norm_w1_sphere(&f, 2.0, &rule).unwrap(), 1.25f64.sqrt(), 1e-13));
    }

    #[test]
    fn rule_json_shape() {
        let rule = QuadratureRule::quad_sphere(2).unwrap();
        let v = serde_json::to_value(&rule).unwrap();
        assert_eq!(v["nodes"][0].as_array().unwrap().len(), 4);
        let back: QuadratureRule = serde_json::from_value(v).unwrap();
        assert_eq!(back, rule);
    }

    #[test]
    fn integration_is_deterministic() {
        let rule = QuadratureRule::quad_sphere(60).unwrap();
        let f = |x: &[f64; 4]| Q::new(x[0].exp(), x[1].sin(), x[2] * x[3], 1.0);
        let a = rule.integrate_q(f);
        for _ in 0..3 {
            assert_eq!(rule.integrate_q(f), a);
        }
    }
}
