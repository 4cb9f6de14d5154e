//! Left expansions `h ~ sum beta_m e_m` with `beta_m = <h, e_m>_L = int_B h e_m*`.
//!
//! `Literal` expands in the `w_m` themselves. `Conjugated` expands in the
//! left-orthonormal system derived from them, where the same coefficient
//! formula is a genuine biorthogonal functional. `Auto` measures the reversed
//! Gram deviation of the `w_m` and picks `Conjugated` when it exceeds
//! [`REVERSED_TOLERANCE`], flagging the switch in the report.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::conjugated::ConjugatedSystem;
use super::franklin::FranklinBasis;
use super::inner::{inner_ball, inner_ball_left};
use crate::algebra::Quaternion;
use crate::error::{Error, Result};
use crate::sphere::QuadratureRule;
use crate::symfun::SymFunction;

pub const REVERSED_TOLERANCE: f64 = 1e-9;

type Sampler = Arc<dyn Fn(&[f64; 4]) -> Quaternion + Send + Sync>;

/// A function on the closed ball to expand.
#[derive(Clone)]
pub enum Target {
    Sym(SymFunction),
    Sampled(Sampler),
}

impl fmt::Debug for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Sym(s) => f.debug_tuple("Sym").field(s).finish(),
            Target::Sampled(_) => f.write_str("Sampled(..)"),
        }
    }
}

impl Target {
    pub fn sampled(f: impl Fn(&[f64; 4]) -> Quaternion + Send + Sync + 'static) -> Self {
        Target::Sampled(Arc::new(f))
    }

    pub fn eval(&self, x: &[f64; 4]) -> Result<Quaternion> {
        match self {
            Target::Sym(s) => s.eval_q(x),
            Target::Sampled(f) => Ok(f(x)),
        }
    }

    fn polynomial(&self) -> Option<SymFunction> {
        match self {
            Target::Sym(s) if s.l() == 1 => s.to_polynomial(),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExpandMode {
    Literal,
    Conjugated,
    #[default]
    Auto,
}

#[derive(Clone, Debug)]
pub struct ExpandOptions {
    pub mode: ExpandMode,
    /// Ball rule for non-polynomial targets: `(order_r, order_angular)`.
    pub ball_order: (usize, usize),
    /// Radii of the sup-residual grid; each carries a sphere rule's nodes.
    pub sup_radii: Vec<f64>,
    pub sup_sphere_order: usize,
}

impl Default for ExpandOptions {
    fn default() -> Self {
        ExpandOptions { mode: ExpandMode::Auto, ball_order: (24, 24), sup_radii: vec![0.25, 0.5, 0.75, 1.0], sup_sphere_order: 8 }
    }
}

impl ExpandOptions {
    pub fn sup_grid(&self) -> Result<Vec<[f64; 4]>> {
        let sphere = QuadratureRule::quad_sphere(self.sup_sphere_order)?;
        Ok(self
            .sup_radii
            .iter()
            .flat_map(|r| sphere.nodes.iter().map(move |p| p.map(|v| v * r)))
            .collect())
    }
}

/// The system actually used for an expansion.
pub struct ExpansionSystem {
    pub mode: ExpandMode,
    pub elements: Vec<SymFunction>,
    /// Map from a count of basis elements to a count of system elements.
    prefix: Vec<usize>,
    pub reversed_deviation: f64,
    /// Set when `Auto` replaced the literal system.
    pub flagged: bool,
}

impl ExpansionSystem {
    pub fn new(basis: &FranklinBasis, mode: ExpandMode) -> Result<Self> {
        let reversed_deviation = basis.reversed_deviation()?;
        let conjugated = match mode {
            ExpandMode::Literal => false,
            ExpandMode::Conjugated => true,
            ExpandMode::Auto => reversed_deviation > REVERSED_TOLERANCE,
        };
        if conjugated {
            let sys = ConjugatedSystem::from_basis(basis)?;
            Ok(ExpansionSystem {
                mode: ExpandMode::Conjugated,
                elements: sys.elements,
                prefix: sys.derived_count,
                reversed_deviation,
                flagged: mode == ExpandMode::Auto,
            })
        } else {
            Ok(ExpansionSystem {
                mode: ExpandMode::Literal,
                elements: basis.elements.clone(),
                prefix: (0..=basis.len()).collect(),
                reversed_deviation,
                flagged: false,
            })
        }
    }

    pub fn basis_len(&self) -> usize {
        self.prefix.len() - 1
    }

    pub fn prefix(&self, n: usize) -> usize {
        self.prefix[n]
    }

    pub fn coefficients(&self, h: &Target, k: usize, opts: &ExpandOptions) -> Result<Vec<Quaternion>> {
        let elems = &self.elements[..k];
        if let Some(p) = h.polynomial() {
            return elems.iter().map(|e| inner_ball_left(&p, e)).collect();
        }
        let rule = QuadratureRule::quad_ball(opts.ball_order.0, opts.ball_order.1)?;
        let zero = vec![Quaternion::zero(); k];
        rule.try_integrate(
            zero,
            |a, b| a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect(),
            |x, w| {
                let hx = h.eval(x)?;
                elems.iter().map(|e| Ok((hx.clone() * e.eval_q(x)?.conj()).scale(&w))).collect()
            },
        )
    }

    /// `sum_{m < k} beta_m e_m` as a symbolic function.
    pub fn partial_sum(&self, beta: &[Quaternion], k: usize) -> Result<SymFunction> {
        self.elements[..k]
            .iter()
            .zip(beta)
            .try_fold(SymFunction::zero4(), |acc, (e, b)| acc.try_add(&e.left_mul(b)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    /// Number of basis elements `N`.
    pub terms: usize,
    /// System elements covering the same left span.
    pub elements: usize,
    pub l2_residual: f64,
    pub sup_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub mode: ExpandMode,
    pub flagged: bool,
    pub reversed_deviation: f64,
    pub coefficients: Vec<Quaternion>,
    pub checkpoints: Vec<Checkpoint>,
    pub target_l2: f64,
    pub target_sup: f64,
    /// `|beta_m| <= ||h||_{L^2(B)}` for every coefficient.
    pub coefficient_bound_holds: bool,
}

impl ExpansionReport {
    pub fn l2_residuals(&self) -> Vec<f64> {
        self.checkpoints.iter().map(|c| c.l2_residual).collect()
    }
}

fn l2_norms(h: &Target, sums: &[SymFunction], opts: &ExpandOptions) -> Result<(f64, Vec<f64>)> {
    if let Some(p) = h.polynomial() {
        let target = inner_ball(&p, &p)?.w.max(0.0).sqrt();
        let res = sums
            .iter()
            .map(|s| {
                let r = p.try_sub(s)?;
                Ok(inner_ball(&r, &r)?.w.max(0.0).sqrt())
            })
            .collect::<Result<Vec<_>>>()?;
        return Ok((target, res));
    }
    let rule = QuadratureRule::quad_ball(opts.ball_order.0, opts.ball_order.1)?;
    let k = sums.len();
    let acc = rule.try_integrate(
        vec![0.0; k + 1],
        |a, b| a.iter().zip(b).map(|(x, y)| x + y).collect(),
        |x, w| {
            let hx = h.eval(x)?;
            let mut v = Vec::with_capacity(k + 1);
            v.push(w * hx.norm_sqr());
            for s in sums {
                v.push(w * (hx.clone() - s.eval_q(x)?).norm_sqr());
            }
            Ok(v)
        },
    )?;
    Ok((acc[0].sqrt(), acc[1..].iter().map(|v| v.sqrt()).collect()))
}

fn sup_norms(h: &Target, sums: &[SymFunction], grid: &[[f64; 4]]) -> Result<(f64, Vec<f64>)> {
    let mut target: f64 = 0.0;
    let mut res = vec![0.0f64; sums.len()];
    for x in grid {
        let hx = h.eval(x)?;
        target = target.max(hx.abs());
        for (r, s) in res.iter_mut().zip(sums) {
            *r = r.max((hx.clone() - s.eval_q(x)?).abs());
        }
    }
    Ok((target, res))
}

/// Expansion with residuals recorded at each `N` in `checkpoints` (counts of
/// basis elements, strictly increasing).
pub fn expand_at(h: &Target, basis: &FranklinBasis, checkpoints: &[usize], opts: &ExpandOptions) -> Result<ExpansionReport> {
    if checkpoints.is_empty() || checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument("checkpoints must be nonempty and strictly increasing".into()));
    }
    let n = *checkpoints.last().expect("nonempty");
    if n > basis.len() {
        return Err(Error::OutOfRange { what: "expansion terms", value: format!("{n} > {}", basis.len()) });
    }
    let sys = ExpansionSystem::new(basis, opts.mode)?;
    let k = sys.prefix(n);
    let coefficients = sys.coefficients(h, k, opts)?;
    let sizes: Vec<usize> = checkpoints.iter().map(|&c| sys.prefix(c)).collect();
    let sums = sizes.iter().map(|&s| sys.partial_sum(&coefficients, s)).collect::<Result<Vec<_>>>()?;
    let (target_l2, l2) = l2_norms(h, &sums, opts)?;
    let (target_sup, sup) = sup_norms(h, &sums, &opts.sup_grid()?)?;
    let bound = target_l2 * (1.0 + 1e-12) + 1e-14;
    let coefficient_bound_holds = coefficients.iter().all(|b| b.abs() <= bound);
    Ok(ExpansionReport {
        mode: sys.mode,
        flagged: sys.flagged,
        reversed_deviation: sys.reversed_deviation,
        coefficients,
        checkpoints: checkpoints
            .iter()
            .zip(sizes)
            .zip(l2.into_iter().zip(sup))
            .map(|((&terms, elements), (l2_residual, sup_residual))| Checkpoint { terms, elements, l2_residual, sup_residual })
            .collect(),
        target_l2,
        target_sup,
        coefficient_bound_holds,
    })
}

/// Expansion in the first `n` basis elements, residuals recorded at every `N <= n`.
pub fn expand(h: &Target, basis: &FranklinBasis, n: usize, opts: &ExpandOptions) -> Result<ExpansionReport> {
    if n == 0 || n > basis.len() {
        return Err(Error::OutOfRange { what: "expansion terms", value: format!("{n} (basis has {})", basis.len()) });
    }
    expand_at(h, basis, &(1..=n).collect::<Vec<_>>(), opts)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub expansion: ExpansionReport,
    pub slack: f64,
    /// `L^2` residuals strictly decrease across checkpoints.
    pub decreasing: bool,
}

pub fn convergence_report(h: &Target, basis: &FranklinBasis, checkpoints: &[usize], opts: &ExpandOptions) -> Result<ConvergenceReport> {
    let expansion = expand_at(h, basis, checkpoints, opts)?;
    let slack = 1e-12;
    let decreasing = expansion.checkpoints.windows(2).all(|w| w[1].l2_residual < w[0].l2_residual - slack);
    Ok(ConvergenceReport { expansion, slack, decreasing })
}

/// Componentwise expansion of a target with several quaternion components.
pub fn expand_componentwise(components: &[Target], basis: &FranklinBasis, n: usize, opts: &ExpandOptions) -> Result<Vec<ExpansionReport>> {
    components.iter().map(|h| expand(h, basis, n, opts)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub p: f64,
    pub trials: usize,
    pub mode: ExpandMode,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub tolerance: f64,
    /// `p = 2`: every ratio within `tolerance` of 1. Otherwise: every ratio finite and below 10.
    pub holds: bool,
}

/// Boundary `L^p` norms of sign-flipped expansions relative to the unflipped one.
pub fn unconditionality_probe(
    h: &Target,
    basis: &FranklinBasis,
    p: f64,
    trials: usize,
    seed: u64,
    opts: &ExpandOptions,
) -> Result<ProbeReport> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::OutOfRange { what: "p", value: p.to_string() });
    }
    let sys = ExpansionSystem::new(basis, opts.mode)?;
    let k = sys.prefix(basis.len());
    let beta = sys.coefficients(h, k, opts)?;
    let degree = sys.elements.iter().filter_map(SymFunction::degree).max().unwrap_or(0) as usize;
    let rule = QuadratureRule::quad_sphere((2 * degree).max(2) * if p == 2.0 { 1 } else { 2 } + 4)?;
    let terms: Vec<Vec<Quaternion>> = rule
        .nodes
        .iter()
        .map(|x| sys.elements[..k].iter().zip(&beta).map(|(e, b)| Ok(b.clone() * e.eval_q(x)?)).collect())
        .collect::<Result<_>>()?;
    let norm = |signs: &[f64]| -> f64 {
        let s: f64 = terms
            .iter()
            .zip(&rule.weights)
            .map(|(t, w)| {
                let v = t.iter().zip(signs).fold(Quaternion::zero(), |acc, (q, e)| acc + q.scale(e));
                w * v.abs().powf(p)
            })
            .sum();
        s.powf(1.0 / p)
    };
    let base = norm(&vec![1.0; k]);
    if base == 0.0 {
        return Err(Error::InvalidArgument("the expansion of h vanishes".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut min_ratio, mut max_ratio) = (f64::INFINITY, 0.0f64);
    for _ in 0..trials {
        let signs: Vec<f64> = (0..k).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect();
        let r = norm(&signs) / base;
        min_ratio = min_ratio.min(r);
        max_ratio = max_ratio.max(r);
    }
    let tolerance = 1e-8;
    let holds = if p == 2.0 {
        (max_ratio - 1.0).abs() <= tolerance && (min_ratio - 1.0).abs() <= tolerance
    } else {
        max_ratio.is_finite() && max_ratio < 10.0
    };
    Ok(ProbeReport { p, trials, mode: sys.mode, min_ratio, max_ratio, tolerance, holds })
}
