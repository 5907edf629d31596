use num_bigint::BigInt;
use num_traits::One;
use serde::{Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;

use crate::rational::factorial;

/// Finitely supported exponent vector `i ∈ ℤ₊^∞`.
///
/// Variables are 1-based (they are Hall indices). Stored as sorted
/// `(variable, exponent)` pairs with positive exponents only, so every
/// `ℤ₊^m` embeds in `ℤ₊^{m'}` for `m ≤ m'` without padding.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MultiIndex(Vec<(usize, u32)>);

impl MultiIndex {
    pub fn zero() -> Self {
        MultiIndex(Vec::new())
    }

    pub fn unit(var: usize) -> Self {
        MultiIndex(vec![(var, 1)])
    }

    /// Merges repeated variables and drops zero exponents.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, u32)>) -> Self {
        let mut v: Vec<(usize, u32)> = Vec::new();
        let mut all: Vec<(usize, u32)> = pairs.into_iter().filter(|p| p.1 > 0).collect();
        all.sort_by_key(|p| p.0);
        for (var, e) in all {
            match v.last_mut() {
                Some(last) if last.0 == var => last.1 += e,
                _ => v.push((var, e)),
            }
        }
        MultiIndex(v)
    }

    /// `exps[j]` is the exponent of variable `j + 1`.
    pub fn from_dense(exps: &[u32]) -> Self {
        Self::from_pairs(exps.iter().enumerate().map(|(j, &e)| (j + 1, e)))
    }

    pub fn to_dense(&self, m: usize) -> Vec<u32> {
        let mut out = vec![0; m];
        for &(v, e) in &self.0 {
            if v <= m {
                out[v - 1] = e;
            }
        }
        out
    }

    pub fn entries(&self) -> &[(usize, u32)] {
        &self.0
    }

    pub fn get(&self, var: usize) -> u32 {
        self.0
            .iter()
            .find(|p| p.0 == var)
            .map_or(0, |p| p.1)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// `|i| = Σ i_α`.
    pub fn total(&self) -> u32 {
        self.0.iter().map(|p| p.1).sum()
    }

    /// `Σ i_α · w_α` with `weights[α - 1] = w_α`.
    pub fn weighted(&self, weights: &[u32]) -> u32 {
        self.0.iter().map(|&(v, e)| e * weights[v - 1]).sum()
    }

    pub fn max_var(&self) -> usize {
        self.0.last().map_or(0, |p| p.0)
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        Self::from_pairs(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn double(&self) -> MultiIndex {
        MultiIndex(self.0.iter().map(|&(v, e)| (v, 2 * e)).collect())
    }

    /// `i! = Π i_α!`.
    pub fn factorial(&self) -> BigInt {
        self.0
            .iter()
            .fold(BigInt::one(), |acc, &(_, e)| acc * factorial(e))
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total()
            .cmp(&other.total())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (j, &(v, e)) in self.0.iter().enumerate() {
            if j > 0 {
                write!(f, "*")?;
            }
            if e == 1 {
                write!(f, "t{v}")?;
            } else {
                write!(f, "t{v}^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for MultiIndex {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}
