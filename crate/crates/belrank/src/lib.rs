//! Isotopy invariants of finite semifields.
//!
//! The crate computes the matrix rank `mrk` and BEL-rank `brk` of finite
//! (pre)semifields presented in q-polynomial coefficient form, by exact
//! linear algebra over `F_{q^n}` and exhaustive minimization over normalized
//! isotopes. A geometric verifier for BEL-configurations and a spread-set
//! span computation provide independent cross-checks.
//!
//! Entry points:
//! - [`gf::FieldCtx`]: the field tower with table-backed arithmetic.
//! - [`semifield::SemifieldCoeffs`]: algebras as coefficient matrices, with
//!   Knuth operations (dual, transpose, dual-transpose-dual) and isotopes.
//! - [`search`]: `mrk`, `mrk_class`, `bel_rank`, `bel_triple`.
//! - [`belconfig`]: BEL-configurations and the disjointness verifier.
//! - [`families`]: built-in constructions (finite fields, twisted fields).
//! - [`formats`]: the COEFF / TABLE / DECOMP text formats.

// Index-style loops mirror the matrix formulas; iterator rewrites obscure them.
#![allow(clippy::needless_range_loop)]

pub mod belconfig;
pub mod families;
pub mod formats;
pub mod gf;
pub mod linmap;
pub mod matrix;
pub mod search;
pub mod semifield;

pub use gf::{FFElem, FieldCtx};
pub use linmap::LinMap;
pub use matrix::MatrixQN;
pub use semifield::{NucleiReport, SemifieldCoeffs};

use std::sync::Arc;

/// Shared immutable field context.
pub type Ctx = Arc<FieldCtx>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NonPrime(u32),
    #[error("field order {0} exceeds the 2^20 table bound")]
    TooLarge(u128),
    #[error("no primitive polynomial of degree {0} over F_{1}")]
    NoPrimitivePolynomial(u32, u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("interpolation points do not form a basis")]
    NotABasis,
    #[error("no solution: coefficient rank {rank}, augmented rank {augmented}")]
    NoSolution { rank: usize, augmented: usize },
    #[error("not a semifield: zero divisor at ({x}, {y})")]
    NotASemifield { x: u32, y: u32 },
    #[error("multiplication table is not bilinear: {0}")]
    NotBilinear(String),
    #[error("table size mismatch: {0}")]
    SizeMismatch(String),
    #[error("F_{0} is not a subfield of F_{1}")]
    NotASubfield(u32, u32),
    #[error("singular map where an invertible one is required")]
    SingularMap,
    #[error("budget must be positive")]
    BudgetInvalid,
    #[error("exhaustive search space of {0} candidates exceeds 2^32; use budget mode")]
    SearchSpaceTooLarge(u128),
    #[error("no valid twist constant: the product set covers the field")]
    NoValidC,
    #[error("invalid twist constant {0}: it lies in the forbidden product set")]
    InvalidC(u32),
    #[error("degenerate U: the maps share a nontrivial common kernel")]
    DegenerateU,
    #[error("degenerate W: the sum map is not surjective")]
    DegenerateW,
    #[error("too many spread elements ({0}) for exhaustive verification")]
    TooManySpreadElements(u128),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn check_same_ctx(a: &FieldCtx, b: &FieldCtx) {
    debug_assert!(a == b, "mixed field contexts: {a:?} vs {b:?}");
}
