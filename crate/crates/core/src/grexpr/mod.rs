//! Bigraded expression algebra: functions and differential forms on a
//! chart of even and odd coordinates, in one graded-commutative algebra.

mod chart;
mod coeff;
mod derive;
mod equal;
mod eval;
mod expr;
mod integrate;
mod parse;
mod print;

pub use chart::{parse_rational, ChartSpec, CoordinateDecl, Degree, Parity, Weight, DEFAULT_BOX};
pub use coeff::Coeff;
pub use derive::{partial, substitute, Derivation};
pub use equal::{equal, equal_randomized, EqualPolicy, EqualityMode, EqualityReport};
pub use eval::{eval_body, eval_body_exact, eval_numeric, EvalPoint, GrassmannValue};
pub(crate) use eval::eval_with_scale;
pub use expr::{apply_func, gdiv, gmul, Func, GradedExpr};
pub use integrate::{integrate_univariate, Bound};
pub use parse::parse_expr;

pub(crate) use chart::rational_to_f64;

/// Alias kept for call sites that read better with "canonical" in them;
/// every `GradedExpr` is already canonical.
pub fn canonicalize(a: &GradedExpr) -> GradedExpr {
    a.clone()
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExprError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier '{name}' at byte {pos}")]
    UnknownIdentifier { name: String, pos: usize },
    #[error("differential of unknown coordinate '{name}' at byte {pos}")]
    UnknownDifferential { name: String, pos: usize },
    #[error("argument of {func} must be an even function of form degree 0")]
    InvalidAtomArgument { func: String },
    #[error("expressions live on different charts")]
    MixedCharts,
    #[error("division by zero")]
    DivisionByZero,
    #[error("denominator must be an even function of form degree 0")]
    InvalidDenominator,
    #[error("cannot divide by a nilpotent expression")]
    NilpotentDenominator,
    #[error("parity mismatch: {0}")]
    ParityMismatch(String),
    #[error("no closed-form antiderivative: {0}")]
    NonIntegrable(String),
    #[error("denominator has zero body at the evaluation point")]
    ZeroBody,
    #[error("logarithm of a non-positive body")]
    LogNonPositive,
    #[error("only functions (form degree 0) can be evaluated")]
    NotAFunction,
    #[error("invalid declaration: {0}")]
    InvalidDeclaration(String),
}
