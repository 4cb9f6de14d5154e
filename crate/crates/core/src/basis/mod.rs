//! Harmonic generators, the bracket, and the orthonormal systems built from them.

pub mod antideriv;
pub mod bracket;
pub mod conjugated;
pub mod expand;
pub mod franklin;
pub mod generators;
pub mod gram;
pub mod inner;
mod linalg;

pub use antideriv::{anti_derivation, anti_derivation_exact};
pub use bracket::{bilinear_bound, bracket, bracket_exact, operator_t, BilinearBound, BracketMode};
pub use generators::{harmonic_space, kelvin_generator, HarmonicGenerator};
pub use gram::{gram_schmidt, GramFactor, GramSchmidtResult};
pub use inner::{inner_ball, inner_ball_exact, inner_ball_left, inner_ball_left_exact, inner_sphere_exact};
pub use franklin::{build_franklin, expected_len, BasisReport, ExactElement, FranklinBasis, FranklinConfig, Provenance};
pub use conjugated::{ConjugatedReport, ConjugatedSystem};
pub use expand::{
    convergence_report, expand, expand_at, expand_componentwise, unconditionality_probe, Checkpoint, ConvergenceReport,
    ExpandMode, ExpandOptions, ExpansionReport, ExpansionSystem, ProbeReport, Target,
};
