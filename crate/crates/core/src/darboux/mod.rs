//! Homogeneous normal forms: primitives, linear Darboux bases, the
//! one-form Darboux construction, numeric straightening and verification
//! of candidate Darboux charts.

mod linear;
mod normal_form;
mod poincare;
mod straighten;

use thiserror::Error;

use crate::cartan::CartanError;
use crate::grexpr::ExprError;
use crate::homogeneity::HomogeneityError;
use crate::pfaffian::PfaffianError;

pub use linear::{linear_darboux, LinearDarboux};
pub use normal_form::{
    canonical_form, obstruction_at, one_form_darboux, verify_normal_form, CoordinateCheck, DarbouxResult,
    NormalFormReport, NormalFormSpec, Variant,
};
pub use poincare::{closed_primitive, homog_solve_pde, homotopy, log_primitive, poincare_primitive, PdeSolution};
pub use straighten::{straighten_commuting, GridOptions, StraighteningGrid};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DarbouxError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Cartan(#[from] CartanError),
    #[error(transparent)]
    Homogeneity(#[from] HomogeneityError),
    #[error(transparent)]
    Pfaffian(#[from] PfaffianError),
    #[error("expected a {0}-form")]
    FormDegree(usize),
    #[error("form has no definite parity")]
    MixedParity,
    #[error("odd forms have no constructive normal form here")]
    OddForm,
    #[error("not a polynomial form: {0}")]
    NonPolynomial(String),
    #[error("bad centre: {0}")]
    Center(String),
    #[error("form is not closed; its differential is {0}")]
    NotClosed(String),
    #[error("form is not homogeneous")]
    NotHomogeneous,
    #[error("form must have weight zero")]
    WeightNotZero,
    #[error("expected a constant, found {0}")]
    NotConstant(String),
    #[error("no homogeneous Darboux chart guaranteed: the weight field {0} lies in the characteristic distribution")]
    NoHomogeneousChart(String),
    #[error("form is {0}, which has no Darboux normal form")]
    Irregular(String),
    #[error("presymplectic chart does not match: {0}")]
    ChartMismatch(String),
    #[error("construction failed: {0}")]
    ConstructionFailed(String),
    #[error("vector fields do not commute: [{0}, {1}] ≠ 0")]
    NotCommuting(usize, usize),
    #[error("only even vector fields on even charts can be straightened")]
    NotEven,
    #[error("fields are dependent at the base point")]
    Singular,
    #[error("flow leaves the chart box at {0:?}")]
    LeftBox(Vec<f64>),
}
