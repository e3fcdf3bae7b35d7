//! Exact arithmetic for a two-periodic family of algebras `A_ij` indexed by
//! pairs of integers, built from a field carrying two commuting quadratic
//! involutions.
//!
//! The layers, bottom up:
//!
//! * [`field`]: the coefficient field `F` together with its two index-two
//!   subfields `K_0`, `K_1` (fixed fields of involutions `tau_0`, `tau_1`)
//!   and chosen anti-invariant elements `w_0`, `w_1`.
//! * [`instances`]: the three shipped field towers plus a deliberately
//!   broken fixture for negative-control tests.
//! * [`tensor`]: sign-twisted tensor spaces `T_ij` with componentwise
//!   storage keyed by sign patterns, the product `star_mul`, and the
//!   multilinear map `mu`.
//! * [`sym`]: the quadratic quotient `A_ij = T_ij / R_ij`, its normal-form
//!   projection, certified dimension counts, and the distinguished normal
//!   elements `g_i`.
//! * [`loc`]: the localized ring obtained by inverting the `g` chain,
//!   its filtration, and probes for normality, ideal saturation, and the
//!   center.
//! * [`verify`]: named invariant suites over all of the above, used by the
//!   command-line driver and the acceptance tests.

pub mod field;
pub mod instances;
pub mod linalg;
pub mod loc;
pub mod sample;
pub mod sym;
pub mod tensor;
pub mod verify;

/// Errors surfaced by fallible library operations.
///
/// Programmer errors (mixing towers, out-of-range pattern bits) panic
/// instead; everything a caller can plausibly feed us at runtime lands here.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unknown instance key `{0}`")]
    UnknownInstance(String),
    #[error("field tower data is inconsistent: {0}")]
    BadTowerData(String),
    #[error("index mismatch: left factor ends at {left_end}, right factor starts at {right_start}")]
    IndexMismatch { left_end: i64, right_start: i64 },
    #[error("factor list must be nonempty")]
    EmptyFactors,
    #[error("end index {end} must not precede start index {start}")]
    BadSpan { start: i64, end: i64 },
    #[error("degree must be even, got {0}")]
    OddDegree(i64),
    #[error("element must be nonzero")]
    ZeroElement,
    #[error("operation needs an instance where the twist has infinite order; `{0}` does not qualify")]
    RequiresInfiniteTwist(String),
    #[error("operation needs a finite-dimensional coefficient field; `{0}` is not")]
    RequiresFiniteDimensional(String),
    #[error("levels must satisfy {0}")]
    BadLevel(String),
    #[error("dimension certification failed in degree {degree}: {detail}")]
    QuotientCertification { degree: i64, detail: String },
}

pub use field::{AlgebraicClass, AutWord, FieldElement, FieldTower, SigmaOrder};
pub use loc::{
    CenterReport, IdealWindow, LocElement, NormalTestOutcome, SaturationOutcome, SaturationProbe,
};
pub use sym::{QuotientCert, RelationSpace, SymElement};
pub use tensor::{SignPattern, TensorElement};
