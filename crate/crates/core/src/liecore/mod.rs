//! Hall basis of `Lie(a1..ak)`, Dynkin projection, PBW coordinates and the
//! drift-linear rewriting `x ↦ Σ c_J (ad a_{j1})⋯(ad a_{jm}) a0`.

mod dynkin;
mod hall;
mod pbw;
mod rewrite;

pub use dynkin::{dynkin_project, is_lie_element, left_normed_bracket};
pub use hall::{HallBasis, HallElement, HallTree};
pub use pbw::{pbw_decompose, PBWMonomial, PBWPoly, PbwTable};
pub use rewrite::{
    ad0_apply, ad0_apply_pbw, ad0_apply_words, ad_words_to_series, rewrite_a0_linear, AdWordTerm,
};

use crate::algebra::AlgebraError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LieError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("not a Lie element")]
    NotLieElement,
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degree overflow: result needs degree {needed} but truncation is {n}")]
    Truncation { needed: usize, n: usize },
}
