//! Quaternion and componentwise Clifford arithmetic.
//!
//! Quaternions use the basis `i_0 = 1, i_1, i_2, i_3` with `i_1 i_2 = i_3`
//! and `i_j i_k = -i_k i_j` for `j != k >= 1`. Clifford elements over `H`
//! are sequences of `l` quaternions (coefficients of `e_1, ..., e_l`); only
//! componentwise operations and conjugation are defined for `l > 1`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Quaternion<T = f64> {
    pub w: T,
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar> Quaternion<T> {
    pub fn new(w: T, x: T, y: T, z: T) -> Self {
        Quaternion { w, x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    pub fn one() -> Self {
        Self::real(T::one())
    }

    pub fn real(w: T) -> Self {
        Self::new(w, T::zero(), T::zero(), T::zero())
    }

    /// The generator `i_j`, `j` in `0..4`.
    pub fn unit(j: usize) -> Self {
        let mut c = [T::zero(), T::zero(), T::zero(), T::zero()];
        c[j] = T::one();
        Self::from_array(c)
    }

    pub fn from_array(c: [T; 4]) -> Self {
        let [w, x, y, z] = c;
        Self::new(w, x, y, z)
    }

    pub fn to_array(&self) -> [T; 4] {
        [self.w.clone(), self.x.clone(), self.y.clone(), self.z.clone()]
    }

    /// Coordinate `z_j` by direct extraction.
    pub fn coord(&self, j: usize) -> &T {
        match j {
            0 => &self.w,
            1 => &self.x,
            2 => &self.y,
            3 => &self.z,
            _ => panic!("quaternion coordinate {j} out of range"),
        }
    }

    pub fn conj(&self) -> Self {
        Self::new(self.w.clone(), -self.x.clone(), -self.y.clone(), -self.z.clone())
    }

    pub fn norm_sqr(&self) -> T {
        self.w.clone() * self.w.clone()
            + self.x.clone() * self.x.clone()
            + self.y.clone() * self.y.clone()
            + self.z.clone() * self.z.clone()
    }

    pub fn is_zero(&self) -> bool {
        self.w.is_zero() && self.x.is_zero() && self.y.is_zero() && self.z.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.x.is_zero() && self.y.is_zero() && self.z.is_zero()
    }

    pub fn scale(&self, s: &T) -> Self {
        Self::new(
            self.w.clone() * s.clone(),
            self.x.clone() * s.clone(),
            self.y.clone() * s.clone(),
            self.z.clone() * s.clone(),
        )
    }

    pub fn inv(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if n.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let c = self.conj();
        Ok(Self::new(c.w / n.clone(), c.x / n.clone(), c.y / n.clone(), c.z / n))
    }

    /// Right multiplication by the generator `i_j` (a signed permutation).
    pub fn mul_unit_right(&self, j: usize) -> Self {
        let (w, x, y, z) = (self.w.clone(), self.x.clone(), self.y.clone(), self.z.clone());
        match j {
            0 => self.clone(),
            // (w + x i + y j + z k) i = -x + w i + z j - y k
            1 => Self::new(-x, w, z, -y),
            // (w + x i + y j + z k) j = -y - z i + w j + x k
            2 => Self::new(-y, -z, w, x),
            // (w + x i + y j + z k) k = -z + y i - x j + w k
            3 => Self::new(-z, y, -x, w),
            _ => panic!("quaternion generator {j} out of range"),
        }
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Quaternion<U> {
        Quaternion::new(f(&self.w), f(&self.x), f(&self.y), f(&self.z))
    }

    pub fn to_f64(&self) -> Quaternion<f64> {
        self.map(|v| v.to_f64())
    }
}

impl Quaternion<f64> {
    pub fn abs(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn max_abs_coord(&self) -> f64 {
        self.w.abs().max(self.x.abs()).max(self.y.abs()).max(self.z.abs())
    }

    /// Imaginary magnitude `|Im q|`.
    pub fn imag_abs(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    /// Point of `R^4` read as a quaternion.
    pub fn from_point(p: &[f64; 4]) -> Self {
        Self::new(p[0], p[1], p[2], p[3])
    }
}

impl<T: Scalar> Add for Quaternion<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Scalar> Sub for Quaternion<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Scalar> Neg for Quaternion<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl<T: Scalar> Mul for Quaternion<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        q_mul(&self, &o)
    }
}

impl<'a, T: Scalar> Mul<&'a Quaternion<T>> for &'a Quaternion<T> {
    type Output = Quaternion<T>;
    fn mul(self, o: &'a Quaternion<T>) -> Quaternion<T> {
        q_mul(self, o)
    }
}

/// Hamilton product.
pub fn q_mul<T: Scalar>(a: &Quaternion<T>, b: &Quaternion<T>) -> Quaternion<T> {
    let (a0, a1, a2, a3) = (&a.w, &a.x, &a.y, &a.z);
    let (b0, b1, b2, b3) = (&b.w, &b.x, &b.y, &b.z);
    let m = |p: &T, q: &T| p.clone() * q.clone();
    Quaternion::new(
        m(a0, b0) - m(a1, b1) - m(a2, b2) - m(a3, b3),
        m(a0, b1) + m(a1, b0) + m(a2, b3) - m(a3, b2),
        m(a0, b2) - m(a1, b3) + m(a2, b0) + m(a3, b1),
        m(a0, b3) + m(a1, b2) - m(a2, b1) + m(a3, b0),
    )
}

/// Real part of `a* b`, i.e. the Euclidean dot product on `R^4`.
pub fn q_dot<T: Scalar>(a: &Quaternion<T>, b: &Quaternion<T>) -> T {
    a.w.clone() * b.w.clone() + a.x.clone() * b.x.clone() + a.y.clone() * b.y.clone() + a.z.clone() * b.z.clone()
}

/// Real projection `pi_j(z) = z_j`, evaluated through the quaternion
/// identities
///
/// ```text
/// S(z) = (-z + sum_{k=1..3} i_k (z i_k*)) / 2
/// z_0  = (z + S(z)) / 2
/// z_j  = (-z i_j + i_j S(z)) / 2,   j = 1, 2, 3
/// ```
///
/// rather than by reading a field, so that the identities themselves are
/// what gets exercised.
pub fn pi_project<T: Scalar>(z: &Quaternion<T>, j: usize) -> Result<T> {
    if j > 3 {
        return Err(Error::OutOfRange { what: "projection index", value: j.to_string() });
    }
    let half = T::one() / T::from_i64(2);
    let mut acc = -z.clone();
    for k in 1..=3 {
        let ik = Quaternion::<T>::unit(k);
        acc = acc + q_mul(&ik, &q_mul(z, &ik.conj()));
    }
    let s = acc.scale(&half);
    let r = if j == 0 {
        (z.clone() + s).scale(&half)
    } else {
        let ij = Quaternion::<T>::unit(j);
        (q_mul(&ij, &s) - q_mul(z, &ij)).scale(&half)
    };
    Ok(r.w)
}

impl<T: fmt::Debug> fmt::Debug for Quaternion<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?} + {:?} i1 + {:?} i2 + {:?} i3)", self.w, self.x, self.y, self.z)
    }
}

impl<T: Scalar> Serialize for Quaternion<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_array().serialize(serializer)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for Quaternion<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let c = <[T; 4]>::deserialize(deserializer)?;
        Ok(Self::from_array(c))
    }
}

/// Sign of `e_k* = (-1)^{p(k)} e_k` (1-based `k`). `e_1* = e_1`; the
/// remaining signs are a convention, `e_k* = -e_k` for `k >= 2`.
pub fn e_conj_sign(k: usize) -> i64 {
    if k <= 1 {
        1
    } else {
        -1
    }
}

/// Element `sum_k q_k e_k` of the Clifford algebra over `H` with `l` generators.
#[derive(Clone, PartialEq, Debug)]
pub struct Clifford<T = f64> {
    comps: Vec<Quaternion<T>>,
}

impl<T: Scalar> Clifford<T> {
    pub fn new(comps: Vec<Quaternion<T>>) -> Result<Self> {
        if comps.is_empty() {
            return Err(Error::InvalidArgument("Clifford element needs l >= 1".into()));
        }
        Ok(Clifford { comps })
    }

    pub fn zero(l: usize) -> Self {
        Clifford { comps: vec![Quaternion::zero(); l.max(1)] }
    }

    pub fn from_quaternion(q: Quaternion<T>) -> Self {
        Clifford { comps: vec![q] }
    }

    /// `q e_k` (1-based `k`).
    pub fn single(l: usize, k: usize, q: Quaternion<T>) -> Self {
        let mut c = Self::zero(l);
        c.comps[k - 1] = q;
        c
    }

    pub fn l(&self) -> usize {
        self.comps.len()
    }

    pub fn comps(&self) -> &[Quaternion<T>] {
        &self.comps
    }

    pub fn comp(&self, k: usize) -> &Quaternion<T> {
        &self.comps[k - 1]
    }

    /// First component; the whole value when `l = 1`.
    pub fn quaternion(&self) -> &Quaternion<T> {
        &self.comps[0]
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Quaternion::is_zero)
    }

    pub fn is_real(&self) -> bool {
        self.comps[0].is_real() && self.comps[1..].iter().all(Quaternion::is_zero)
    }

    /// Conjugation `(q e_k)* = e_k* q* = (-1)^{p(k)} q* e_k`.
    pub fn conj(&self) -> Self {
        let comps = self
            .comps
            .iter()
            .enumerate()
            .map(|(i, q)| {
                let c = q.conj();
                if e_conj_sign(i + 1) < 0 {
                    -c
                } else {
                    c
                }
            })
            .collect();
        Clifford { comps }
    }

    fn zip(&self, o: &Self, f: impl Fn(&Quaternion<T>, &Quaternion<T>) -> Quaternion<T>) -> Result<Self> {
        if self.l() != o.l() {
            return Err(Error::DimensionMismatch { expected: self.l(), found: o.l() });
        }
        Ok(Clifford { comps: self.comps.iter().zip(&o.comps).map(|(a, b)| f(a, b)).collect() })
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.zip(o, |a, b| a.clone() + b.clone())
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        self.zip(o, |a, b| a.clone() - b.clone())
    }

    pub fn neg(&self) -> Self {
        Clifford { comps: self.comps.iter().map(|q| -q.clone()).collect() }
    }

    /// Left multiplication by a quaternion; `H` commutes with every `e_k`.
    pub fn left_mul(&self, a: &Quaternion<T>) -> Self {
        Clifford { comps: self.comps.iter().map(|q| q_mul(a, q)).collect() }
    }

    pub fn right_mul(&self, b: &Quaternion<T>) -> Self {
        Clifford { comps: self.comps.iter().map(|q| q_mul(q, b)).collect() }
    }

    pub fn scale(&self, s: &T) -> Self {
        Clifford { comps: self.comps.iter().map(|q| q.scale(s)).collect() }
    }

    pub fn to_f64(&self) -> Clifford<f64> {
        Clifford { comps: self.comps.iter().map(Quaternion::to_f64).collect() }
    }
}

impl Clifford<f64> {
    /// `|y|^2 = sum_k |y_k|^2`.
    pub fn abs(&self) -> f64 {
        self.comps.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl<T: Scalar> Serialize for Clifford<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.comps.serialize(serializer)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for Clifford<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let comps = Vec::<Quaternion<T>>::deserialize(deserializer)?;
        Clifford::new(comps).map_err(serde::de::Error::custom)
    }
}

/// Quaternion-valued pairing `<y, z> = sum_p y_p* z_p`.
pub fn c_pair<T: Scalar>(y: &Clifford<T>, z: &Clifford<T>) -> Result<Quaternion<T>> {
    if y.l() != z.l() {
        return Err(Error::DimensionMismatch { expected: y.l(), found: z.l() });
    }
    Ok(y.comps
        .iter()
        .zip(&z.comps)
        .fold(Quaternion::zero(), |acc, (a, b)| acc + q_mul(&a.conj(), b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use proptest::prelude::*;

    type Q = Quaternion<f64>;

    fn q(w: f64, x: f64, y: f64, z: f64) -> Q {
        Q::new(w, x, y, z)
    }

    #[test]
    fn generator_products() {
        let (i1, i2, i3) = (Q::unit(1), Q::unit(2), Q::unit(3));
        assert_eq!(&i1 * &i2, i3);
        assert_eq!(&i2 * &i1, -i3.clone());
        assert_eq!(q(1.0, 1.0, 0.0, 0.0) * q(1.0, -1.0, 0.0, 0.0), q(2.0, 0.0, 0.0, 0.0));
        for j in 1..4 {
            assert_eq!(&Q::unit(j) * &Q::unit(j), Q::real(-1.0));
            for k in 1..4 {
                if j != k {
                    let s = &Q::unit(j) * &Q::unit(k) + &Q::unit(k) * &Q::unit(j);
                    assert!(s.is_zero());
                }
            }
        }
    }

    #[test]
    fn right_unit_multiplication_matches_product() {
        let a = q(0.3, -1.2, 2.5, 0.7);
        for j in 0..4 {
            assert_eq!(a.mul_unit_right(j), &a * &Q::unit(j));
        }
    }

    #[test]
    fn conj_abs_inv() {
        assert_eq!(q(1.0, 2.0, 0.0, 0.0).conj(), q(1.0, -2.0, 0.0, 0.0));
        assert_eq!(q(3.0, 0.0, 4.0, 0.0).abs(), 5.0);
        assert_eq!(Q::unit(3).inv().unwrap(), -Q::unit(3));
        assert!(matches!(Q::zero().inv(), Err(Error::DivisionByZero)));
    }

    #[test]
    fn projection_examples() {
        let z = q(2.0, 3.0, -1.0, 5.0);
        assert_eq!(pi_project(&z, 2).unwrap(), -1.0);
        assert_eq!(pi_project(&Q::unit(1), 0).unwrap(), 0.0);
        assert!(matches!(pi_project(&z, 4), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn projection_is_exact_in_rationals() {
        let z = Quaternion::new(Rational::new(1, 3), Rational::new(-2, 7), Rational::new(5, 11), Rational::new(13, 17));
        for j in 0..4 {
            assert_eq!(&pi_project(&z, j).unwrap(), z.coord(j));
        }
    }

    #[test]
    fn c_pair_examples() {
        let a = Clifford::from_quaternion(q(1.0, 1.0, 0.0, 0.0));
        assert_eq!(c_pair(&a, &a).unwrap(), Q::real(2.0));
        let i1 = Clifford::from_quaternion(Q::unit(1));
        let i2 = Clifford::from_quaternion(Q::unit(2));
        assert_eq!(c_pair(&i1, &i2).unwrap(), -Q::unit(3));
        assert!(c_pair(&Clifford::zero(1), &i2).unwrap().is_zero());
        assert!(matches!(c_pair(&Clifford::zero(2), &i2), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn clifford_conjugation_signs() {
        let c = Clifford::new(vec![q(1.0, 2.0, 0.0, 0.0), q(3.0, 0.0, 1.0, 0.0)]).unwrap();
        let cc = c.conj();
        assert_eq!(cc.comp(1), &q(1.0, -2.0, 0.0, 0.0));
        assert_eq!(cc.comp(2), &q(-3.0, 0.0, 1.0, 0.0));
        assert_eq!(cc.conj(), c);
        // <y, y> is real and equals |y|^2 for any l.
        let p = c_pair(&c, &c).unwrap();
        assert!(p.is_real());
        assert!((p.w - c.abs().powi(2)).abs() < 1e-14);
    }

    #[test]
    fn json_encoding() {
        let z = q(1.0, -2.5, 0.0, 3.0);
        assert_eq!(serde_json::to_string(&z).unwrap(), "[1.0,-2.5,0.0,3.0]");
        let c = Clifford::new(vec![z.clone(), Q::unit(2)]).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(s, "[[1.0,-2.5,0.0,3.0],[0.0,0.0,1.0,0.0]]");
        assert_eq!(serde_json::from_str::<Clifford>(&s).unwrap(), c);
    }

    fn arb_q() -> impl Strategy<Value = Q> {
        prop::array::uniform4(-10.0f64..10.0).prop_map(Q::from_array)
    }

    proptest! {
        #[test]
        fn prop_norm_multiplicative(a in arb_q(), b in arb_q()) {
            let lhs = (&a * &b).abs();
            let rhs = a.abs() * b.abs();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
        }

        #[test]
        fn prop_associative(a in arb_q(), b in arb_q(), c in arb_q()) {
            let d = (&a * &b) * c.clone() - a.clone() * (&b * &c);
            prop_assert!(d.max_abs_coord() < 1e-12 * (a.abs() * b.abs() * c.abs()).max(1.0));
        }

        #[test]
        fn prop_conj_and_inverse(a in arb_q()) {
            prop_assert_eq!(a.conj().conj(), a.clone());
            let n = &a * &a.conj();
            prop_assert!(n.imag_abs() < 1e-12 * a.norm_sqr().max(1.0));
            prop_assert!((n.w - a.norm_sqr()).abs() < 1e-12 * a.norm_sqr().max(1.0));
            if a.abs() > 1e-3 {
                let e = &a * &a.inv().unwrap() - Q::one();
                prop_assert!(e.max_abs_coord() < 1e-12);
            }
        }

        #[test]
        fn prop_projection_reconstructs(a in arb_q()) {
            let mut rec = Q::zero();
            for j in 0..4 {
                let p = pi_project(&a, j).unwrap();
                prop_assert!((p - a.coord(j)).abs() <= 4.0 * f64::EPSILON * a.abs());
                rec = rec + Q::unit(j).scale(&p);
            }
            prop_assert!((rec - a.clone()).abs() <= 8.0 * f64::EPSILON * a.abs());
        }
    }
}
