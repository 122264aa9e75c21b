//! Numerical verification engine for a bimetric vierbein field theory with
//! a Dirac matter field.
//!
//! Fields are given as analytic expressions of the coordinates; the engine
//! evaluates metrics, connections, curvature and the Dirac field equations
//! pointwise and reports residuals of every identity and field equation.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod dirac;
pub mod error;
pub mod expr;
pub mod gamma;
pub mod geometry;
pub mod oracles;
pub mod scalar;
pub mod scenario;
pub mod tensor;

pub use error::{Error, Result};
pub use expr::{parse_expression, ComplexExpression, Constants, Expression, Jet2, Point4};
pub use gamma::{CMatrix4, GammaSet, Spinor};
pub use tensor::{det4, invert4, minkowski_eta, reindex, IndexedTensor, Matrix4, Variance};
