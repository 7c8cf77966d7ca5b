//! Coined quantum walks on the half-line and the line, simulated through CMV
//! matrices, orthogonal Laurent polynomials and Karlin–McGregor integrals.

pub mod closed_forms;
pub mod cmv;
pub mod coin;
pub mod error;
pub mod kmcg;
pub mod laurent;
pub mod linalg;
pub mod opuc;
pub mod quadrature;
pub mod recurrence;
pub mod spectral;

pub use error::{QrwError, Result};
pub use linalg::{Mat2, Vec2, C64};
