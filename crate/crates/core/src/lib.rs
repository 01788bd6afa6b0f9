//! Symbolic-numeric calculus of homogeneous differential forms on graded
//! (super)manifolds.

pub mod grexpr;
pub mod cartan;
pub mod linalg;
pub mod homogeneity;
pub mod pfaffian;
pub mod darboux;
pub mod random;
