//! Polynomial coordinates `t_α`, exponential functions, index sets and
//! moment matrices.
//!
//! A PBW polynomial `ξ` becomes, through `ν`, a polynomial `φ` in commuting
//! variables. Membership of `ξ` in the convex hull of group elements is
//! tested on `φ` through its moment (Hankel) matrix
//! `M[i,j] = φ₀^{(i+j)} = (i+j)!·coeff_{i+j}(φ)`, whose positivity is decided
//! exactly by [`psd_check`].

mod extend;
mod index;
mod matrix;
mod poly;

pub use extend::{erank1, erank_lower_bound, extend_moments, Extension, EXTENSION_ETA_CAP};
pub use index::{IndexSet, Shape};
pub use matrix::{
    moment_matrix, moment_matrix_on, positive_definite, psd_check, psd_decide, vandermonde_separator, DualVector, MomentMatrix,
    PsdResult,
};
pub use poly::{exp_coord, nu_map, project_poly, CoordPoly};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MomentError {
    #[error("coefficient of t^{index} is required but lies outside the known domain")]
    Coverage { index: String },
    #[error("moment matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("positive extension stalled at half-index {index} (η cap {cap} reached)")]
    ExtensionStalled { index: String, cap: String },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
}
