//! Exact certification of good Lie-bracket combinations for control-affine
//! systems `ẋ = x(a0 + Σ u_i a_i)`, computed in nilpotent truncations of the
//! free associative algebra.
//!
//! Pipeline: a candidate Lie element is split into its drift-free part and
//! its drift-linear part; the latter is pulled back through `Ad₀` to
//! `Ass(a1..ak)`, written in PBW coordinates, mapped to a polynomial in
//! commuting variables `t_α`, and its moment matrix is tested for
//! positivity with exact rational arithmetic.

pub mod algebra;
pub mod appsys;
pub mod certify;
pub mod cli;
pub mod expr;
pub mod flows;
pub mod linalg;
pub mod liecore;
pub mod moments;
pub mod multiindex;
pub mod rational;
pub mod word;

pub use algebra::{AlgebraError, TruncSeries};
pub use rational::Q;
pub use word::Word;
