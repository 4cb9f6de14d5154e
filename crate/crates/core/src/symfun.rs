//! Symbolic functions on `R^n` of the form `sum c * x^beta * |x|^s`.
//!
//! The family is closed under partial derivatives:
//!
//! ```text
//! d_i (c x^b r^s) = b_i c x^(b - e_i) r^s + s c x^(b + e_i) r^(s - 2)
//! ```
//!
//! so `D^alpha`, the Dirac operator, its adjoint and the Laplacian never
//! leave it. Coefficients are Clifford elements; with `l = 1` they are plain
//! quaternions. Terms are kept in order (`s` ascending, then `beta`
//! lexicographic) with duplicates merged and zeros dropped.
//!
//! The term representation is not unique because `sum x_i^2 r^s = r^(s+2)`.
//! [`SymFunction::canonical`] rewrites every `x_1^2` through that identity;
//! the result is unique, and equality and zero tests compare it.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{e_conj_sign, q_mul, Clifford, Quaternion};
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zeros(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut m = Self::zeros(n);
        m.0[i] = 1;
        m
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `|alpha|`.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn add(&self, o: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn all_even(&self) -> bool {
        self.0.iter().all(|b| b % 2 == 0)
    }

    /// All multi-indices of length `n` with `|alpha| = m`, lexicographically
    /// ascending.
    pub fn all_of_order(n: usize, m: u32) -> Vec<MultiIndex> {
        fn rec(n: usize, m: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if prefix.len() + 1 == n {
                prefix.push(m);
                out.push(MultiIndex(prefix.clone()));
                prefix.pop();
                return;
            }
            for a in 0..=m {
                prefix.push(a);
                rec(n, m - a, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if n == 0 {
            return out;
        }
        rec(n, m, &mut Vec::with_capacity(n), &mut out);
        out
    }

    /// All multi-indices with `|alpha| <= m`, graded then lexicographic.
    pub fn all_up_to(n: usize, m: u32) -> Vec<MultiIndex> {
        (0..=m).flat_map(|d| Self::all_of_order(n, d)).collect()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, b) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, ")")
    }
}

/// One term `coeff * x^beta * r^s`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct RadialTerm<T = f64> {
    pub coeff: Clifford<T>,
    pub beta: MultiIndex,
    pub s: i32,
}

type Key = (i32, MultiIndex);

#[derive(Clone)]
pub struct SymFunction<T = f64> {
    n: usize,
    l: usize,
    terms: BTreeMap<Key, Clifford<T>>,
}

impl<T: Scalar> SymFunction<T> {
    pub fn zero(n: usize, l: usize) -> Self {
        SymFunction { n, l, terms: BTreeMap::new() }
    }

    /// Quaternion-valued zero function on `R^4`.
    pub fn zero4() -> Self {
        Self::zero(4, 1)
    }

    pub fn from_terms(n: usize, l: usize, terms: impl IntoIterator<Item = RadialTerm<T>>) -> Result<Self> {
        if n != 4 * l {
            return Err(Error::DimensionMismatch { expected: 4 * l, found: n });
        }
        let mut f = Self::zero(n, l);
        for t in terms {
            if t.beta.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: t.beta.len() });
            }
            if t.coeff.l() != l {
                return Err(Error::DimensionMismatch { expected: l, found: t.coeff.l() });
            }
            f.add_term(t.beta, t.s, t.coeff);
        }
        Ok(f)
    }

    pub fn monomial(n: usize, beta: MultiIndex, s: i32, coeff: Quaternion<T>) -> Self {
        let l = n / 4;
        let mut f = Self::zero(n, l);
        f.add_term(beta, s, Clifford::single(l, 1, coeff));
        f
    }

    pub fn constant(n: usize, c: Quaternion<T>) -> Self {
        Self::monomial(n, MultiIndex::zeros(n), 0, c)
    }

    /// The real coordinate function `x_i`.
    pub fn coordinate(n: usize, i: usize) -> Self {
        Self::monomial(n, MultiIndex::unit(n, i), 0, Quaternion::one())
    }

    /// `r^s = |x|^s`.
    pub fn radial(n: usize, s: i32) -> Self {
        Self::monomial(n, MultiIndex::zeros(n), s, Quaternion::one())
    }

    /// The identity `z = sum_j x_j i_j` on `R^4`.
    pub fn identity4() -> Self {
        let mut f = Self::zero4();
        for j in 0..4 {
            f.add_term(MultiIndex::unit(4, j), 0, Clifford::from_quaternion(Quaternion::unit(j)));
        }
        f
    }

    fn add_term(&mut self, beta: MultiIndex, s: i32, coeff: Clifford<T>) {
        if coeff.is_zero() {
            return;
        }
        let key = (s, beta);
        match self.terms.remove(&key) {
            Some(old) => {
                let sum = old.try_add(&coeff).expect("coefficient width checked by caller");
                if !sum.is_zero() {
                    self.terms.insert(key, sum);
                }
            }
            None => {
                self.terms.insert(key, coeff);
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn l(&self) -> usize {
        self.l
    }

    /// True when the function vanishes identically.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() || self.canonical().terms.is_empty()
    }

    /// Unique representation in which no term carries `x_1^2`.
    pub fn canonical(&self) -> Self {
        if self.terms.keys().all(|(_, b)| b.0[0] < 2) {
            return self.clone();
        }
        let mut out = Self::zero(self.n, self.l);
        let mut stack: Vec<(i32, MultiIndex, Clifford<T>)> =
            self.terms.iter().map(|((s, b), c)| (*s, b.clone(), c.clone())).collect();
        while let Some((s, b, c)) = stack.pop() {
            if b.0[0] < 2 {
                out.add_term(b, s, c);
                continue;
            }
            let mut rest = b.clone();
            rest.0[0] -= 2;
            for i in 1..self.n {
                let mut nb = rest.clone();
                nb.0[i] += 2;
                stack.push((s, nb, c.neg()));
            }
            stack.push((s + 2, rest, c));
        }
        out
    }

    /// Polynomial form, if the function is one (after canonicalizing).
    pub fn to_polynomial(&self) -> Option<Self> {
        if self.is_polynomial() {
            return Some(self.clone());
        }
        let c = self.canonical();
        c.terms
            .keys()
            .all(|(s, _)| *s >= 0 && s % 2 == 0)
            .then(|| c.expand_even_radial())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, i32, &Clifford<T>)> {
        self.terms.iter().map(|((s, b), c)| (b, *s, c))
    }

    pub fn to_terms(&self) -> Vec<RadialTerm<T>> {
        self.terms()
            .map(|(b, s, c)| RadialTerm { coeff: c.clone(), beta: b.clone(), s })
            .collect()
    }

    /// True when no term carries a radial factor.
    pub fn is_polynomial(&self) -> bool {
        self.terms.keys().all(|(s, _)| *s == 0)
    }

    /// All coefficients real (and supported on `e_1`).
    pub fn is_real_valued(&self) -> bool {
        self.terms.values().all(Clifford::is_real)
    }

    /// Total polynomial degree `max |beta|` (ignoring radial factors).
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|(_, b)| b.order()).max()
    }

    /// Homogeneity degree if every term has the same `|beta| + s`.
    pub fn homogeneous_degree(&self) -> Option<i64> {
        let mut it = self.terms.keys().map(|(s, b)| b.order() as i64 + *s as i64);
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    fn check_same_space(&self, o: &Self) -> Result<()> {
        if self.n != o.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: o.n });
        }
        if self.l != o.l {
            return Err(Error::DimensionMismatch { expected: self.l, found: o.l });
        }
        Ok(())
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.check_same_space(o)?;
        let mut f = self.clone();
        for ((s, b), c) in &o.terms {
            f.add_term(b.clone(), *s, c.clone());
        }
        Ok(f)
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        self.try_add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| c.neg())
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map_coeffs(|c| c.scale(s))
    }

    /// `a * f` with the quaternion acting on the left of every coefficient.
    pub fn left_mul(&self, a: &Quaternion<T>) -> Self {
        self.map_coeffs(|c| c.left_mul(a))
    }

    pub fn right_mul(&self, b: &Quaternion<T>) -> Self {
        self.map_coeffs(|c| c.right_mul(b))
    }

    /// Pointwise conjugate `f*`.
    pub fn conj(&self) -> Self {
        self.map_coeffs(|c| c.conj())
    }

    fn map_coeffs(&self, f: impl Fn(&Clifford<T>) -> Clifford<T>) -> Self {
        let mut out = Self::zero(self.n, self.l);
        for ((s, b), c) in &self.terms {
            out.add_term(b.clone(), *s, f(c));
        }
        out
    }

    /// Pointwise product. Requires `l = 1` unless one factor is real-valued.
    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        self.check_same_space(o)?;
        let left_real = self.is_real_valued();
        let right_real = o.is_real_valued();
        if self.l > 1 && !left_real && !right_real {
            return Err(Error::Unsupported("product of two Clifford-valued functions with l > 1".into()));
        }
        let mut out = Self::zero(self.n, self.l);
        for ((s1, b1), c1) in &self.terms {
            for ((s2, b2), c2) in &o.terms {
                let c = if left_real {
                    c2.scale(&c1.quaternion().w)
                } else if right_real {
                    c1.scale(&c2.quaternion().w)
                } else {
                    Clifford::from_quaternion(q_mul(c1.quaternion(), c2.quaternion()))
                };
                out.add_term(b1.add(b2), s1 + s2, c);
            }
        }
        Ok(out)
    }

    pub fn partial(&self, i: usize) -> Result<Self> {
        if i >= self.n {
            return Err(Error::OutOfRange { what: "coordinate", value: i.to_string() });
        }
        let mut out = Self::zero(self.n, self.l);
        for ((s, b), c) in &self.terms {
            let bi = b.0[i];
            if bi > 0 {
                let mut nb = b.clone();
                nb.0[i] -= 1;
                out.add_term(nb, *s, c.scale(&T::from_i64(bi as i64)));
            }
            if *s != 0 {
                let mut nb = b.clone();
                nb.0[i] += 1;
                out.add_term(nb, s - 2, c.scale(&T::from_i64(*s as i64)));
            }
        }
        Ok(out)
    }

    /// `D^alpha f`, applying partials in coordinate order.
    pub fn dalpha(&self, alpha: &MultiIndex) -> Result<Self> {
        if alpha.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: alpha.len() });
        }
        let mut f = self.clone();
        for (i, &a) in alpha.0.iter().enumerate() {
            for _ in 0..a {
                f = f.partial(i)?;
            }
        }
        Ok(f)
    }

    pub fn laplace(&self) -> Result<Self> {
        let mut out = Self::zero(self.n, self.l);
        for i in 0..self.n {
            out = out.try_add(&self.partial(i)?.partial(i)?)?;
        }
        Ok(out)
    }

    /// Exact for rational coefficients; up to `T::ROUNDING` relative to the
    /// largest coefficient for floats.
    pub fn is_harmonic(&self) -> Result<bool> {
        let lap = self.laplace()?;
        if lap.is_zero() || T::ROUNDING == 0.0 {
            return Ok(lap.is_zero());
        }
        Ok(lap.to_f64().max_coeff() <= T::ROUNDING * self.to_f64().max_coeff().max(1.0))
    }

    /// Dirac operator `sigma f = sum_{k,j} (d f / d z_{j,k}) e_k i_j` with
    /// `i_j` multiplied on the right. With `l > 1` the input must take values
    /// in the `e_1` component.
    pub fn dirac(&self) -> Result<Self> {
        self.dirac_impl(false)
    }

    /// Adjoint `sigma* f = sum_{k,j} (d f / d z_{j,k}) e_k* i_j*`.
    pub fn dirac_star(&self) -> Result<Self> {
        self.dirac_impl(true)
    }

    fn dirac_impl(&self, adjoint: bool) -> Result<Self> {
        let l = self.l;
        if l > 1 && self.terms.values().any(|c| c.comps()[1..].iter().any(|q| !q.is_zero())) {
            return Err(Error::Unsupported(
                "Dirac operator with l > 1 is only defined for functions valued in the e_1 component".into(),
            ));
        }
        let mut out = Self::zero(self.n, l);
        for k in 1..=l {
            for j in 0..4 {
                let d = self.partial(4 * (k - 1) + j)?;
                for ((s, b), c) in &d.terms {
                    let q = c.quaternion();
                    let mut v = if adjoint {
                        // i_j* = -i_j for j >= 1
                        let r = q.mul_unit_right(j);
                        if j == 0 {
                            r
                        } else {
                            -r
                        }
                    } else {
                        q.mul_unit_right(j)
                    };
                    if adjoint && e_conj_sign(k) < 0 {
                        v = -v;
                    }
                    out.add_term(b.clone(), *s, Clifford::single(l, k, v));
                }
            }
        }
        Ok(out)
    }

    /// Restriction to the unit sphere: every radial factor becomes 1.
    pub fn restrict_sphere(&self) -> Self {
        let mut out = Self::zero(self.n, self.l);
        for ((_, b), c) in &self.terms {
            out.add_term(b.clone(), 0, c.clone());
        }
        out
    }

    /// Replaces every even nonnegative radial power `r^(2k)` by the expanded
    /// polynomial `(x_1^2 + ... + x_n^2)^k`. Odd or negative powers are left
    /// untouched.
    pub fn expand_even_radial(&self) -> Self {
        let mut out = Self::zero(self.n, self.l);
        for ((s, b), c) in &self.terms {
            if *s > 0 && s % 2 == 0 {
                for (mb, mult) in expand_r2k(self.n, (*s / 2) as u32) {
                    out.add_term(b.add(&mb), 0, c.scale(&T::from_i64(mult)));
                }
            } else {
                out.add_term(b.clone(), *s, c.clone());
            }
        }
        out
    }

    pub fn to_f64(&self) -> SymFunction<f64> {
        let mut out = SymFunction::<f64>::zero(self.n, self.l);
        for ((s, b), c) in &self.terms {
            out.add_term(b.clone(), *s, c.to_f64());
        }
        out
    }

    pub fn eval(&self, x: &[f64]) -> Result<Clifford<f64>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: x.len() });
        }
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let r = r2.sqrt();
        let mut acc = Clifford::<f64>::zero(self.l);
        for ((s, b), c) in &self.terms {
            if *s < 0 && r == 0.0 {
                return Err(Error::Singularity("negative radial power evaluated at the origin".into()));
            }
            let mut m = 1.0;
            for (xi, &bi) in x.iter().zip(&b.0) {
                if bi > 0 {
                    m *= xi.powi(bi as i32);
                }
            }
            if *s != 0 {
                m *= r.powi(*s);
            }
            acc = acc.try_add(&c.to_f64().scale(&m))?;
        }
        Ok(acc)
    }

    /// Quaternion value of an `l = 1` function.
    pub fn eval_q(&self, x: &[f64]) -> Result<Quaternion<f64>> {
        if self.l != 1 {
            return Err(Error::Unsupported("eval_q needs l = 1".into()));
        }
        Ok(self.eval(x)?.quaternion().clone())
    }

    /// Value at a point of `R^4`, panicking on singular or mismatched input.
    /// For closures over functions already validated by the caller.
    pub fn value4(&self, x: &[f64; 4]) -> Quaternion<f64> {
        self.eval_q(x).expect("validated l = 1 function")
    }
}

impl SymFunction<f64> {
    /// Exact rational image of the coefficients.
    pub fn to_rational(&self) -> SymFunction<Rational> {
        let mut out = SymFunction::<Rational>::zero(self.n, self.l);
        for ((s, b), c) in &self.terms {
            let comps = c
                .comps()
                .iter()
                .map(|q| q.map(|v| Rational::from_f64(*v).expect("finite coefficient")))
                .collect();
            out.add_term(b.clone(), *s, Clifford::new(comps).expect("nonempty"));
        }
        out
    }

    /// Largest coefficient modulus.
    pub fn max_coeff(&self) -> f64 {
        self.terms.values().map(Clifford::abs).fold(0.0, f64::max)
    }
}

/// Multinomial expansion of `(x_1^2 + ... + x_n^2)^k` as `(beta, multiplicity)`.
fn expand_r2k(n: usize, k: u32) -> Vec<(MultiIndex, i64)> {
    MultiIndex::all_of_order(n, k)
        .into_iter()
        .map(|a| {
            let mut mult: i64 = factorial(k as i64);
            for &ai in &a.0 {
                mult /= factorial(ai as i64);
            }
            (MultiIndex(a.0.iter().map(|v| 2 * v).collect()), mult)
        })
        .collect()
}

fn factorial(k: i64) -> i64 {
    (1..=k).product::<i64>().max(1)
}

impl<T: Scalar> PartialEq for SymFunction<T> {
    fn eq(&self, o: &Self) -> bool {
        if self.n != o.n || self.l != o.l {
            return false;
        }
        self.terms == o.terms || self.canonical().terms == o.canonical().terms
    }
}

impl<T: Scalar> fmt::Debug for SymFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, ((s, b), c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{:?} x^{}", c.comps(), b)?;
            if *s != 0 {
                write!(f, " r^{s}")?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
struct SymFunctionRepr<T> {
    n: usize,
    l: usize,
    terms: Vec<RadialTerm<T>>,
}

impl<T: Scalar> Serialize for SymFunction<T> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SymFunctionRepr { n: self.n, l: self.l, terms: self.to_terms() }.serialize(serializer)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for SymFunction<T> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let r = SymFunctionRepr::<T>::deserialize(deserializer)?;
        SymFunction::from_terms(r.n, r.l, r.terms).map_err(serde::de::Error::custom)
    }
}
