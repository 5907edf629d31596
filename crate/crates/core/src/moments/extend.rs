use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

use super::matrix::positive_definite;
use super::{moment_matrix, CoordPoly, IndexSet, MomentError};
use crate::linalg::rank;
use crate::multiindex::MultiIndex;
use crate::rational::{fmt_q, Q};

/// Largest `η` tried by the doubling search before giving up (`2^128`).
pub const EXTENSION_ETA_CAP: u32 = 128;

/// Result of [`extend_moments`].
#[derive(Clone, Debug)]
pub struct Extension {
    pub poly: CoordPoly,
    pub index_set: IndexSet,
    /// `η` chosen for every new half-index whose doubled index was free.
    pub etas: Vec<(MultiIndex, Q)>,
}

/// Extends `φ` (known on `I`, strictly positive moment matrix) to the body
/// enlarged by `2·shells`, keeping `Π_I` fixed and the enlarged moment
/// matrix strictly positive definite.
///
/// New half-indices `h` are adjoined one at a time in increasing order. For
/// each, the entries `i + h` not yet fixed are set to 0, except `2h`, which
/// carries `η/(2h)!` so that `η` appears on the new diagonal only. `η` is
/// found by doubling from 1; the Schur complement grows linearly in `η`, so
/// this terminates. In several variables `2h` can coincide with an index
/// already fixed by an earlier step (e.g. `(2,0)+(0,2) = 2·(1,1)`); if the
/// matrix is then not definite the extension reports that it stalled.
pub fn extend_moments(phi: &CoordPoly, set: &IndexSet, shells: u32) -> Result<Extension, MomentError> {
    let base = moment_matrix(phi, set)?;
    if !positive_definite(&base.entries) {
        return Err(MomentError::NotPositiveDefinite);
    }
    if shells == 0 {
        return Ok(Extension {
            poly: phi.clone(),
            index_set: set.clone(),
            etas: Vec::new(),
        });
    }
    let target = set.enlarged(2 * shells)?;
    let mut fixed: BTreeMap<MultiIndex, Q> = set
        .members()
        .iter()
        .map(|i| (i.clone(), phi.coeff(i)))
        .collect();
    let mut rows: Vec<MultiIndex> = set.half_set().to_vec();
    let new_rows: Vec<MultiIndex> = target
        .half_set()
        .iter()
        .filter(|h| !set.in_half(h))
        .cloned()
        .collect();
    let cap = Q::from_integer(BigInt::one() << EXTENSION_ETA_CAP);
    let mut etas = Vec::new();
    for h in new_rows {
        let diag = h.double();
        let free_diag = !fixed.contains_key(&diag);
        for i in &rows {
            fixed.entry(i.add(&h)).or_insert_with(Q::zero);
        }
        rows.push(h.clone());
        let matrix_with = |fixed: &BTreeMap<MultiIndex, Q>| -> Vec<Vec<Q>> {
            rows.iter()
                .map(|a| {
                    rows.iter()
                        .map(|b| {
                            let s = a.add(b);
                            fixed[&s].clone() * Q::from_integer(s.factorial())
                        })
                        .collect()
                })
                .collect()
        };
        if free_diag {
            let fact = Q::from_integer(diag.factorial());
            let mut eta = Q::one();
            loop {
                fixed.insert(diag.clone(), &eta / &fact);
                if positive_definite(&matrix_with(&fixed)) {
                    break;
                }
                if eta >= cap {
                    return Err(MomentError::ExtensionStalled {
                        index: h.to_string(),
                        cap: fmt_q(&cap),
                    });
                }
                eta *= Q::from_integer(BigInt::from(2));
            }
            etas.push((h, eta));
        } else if !positive_definite(&matrix_with(&fixed)) {
            return Err(MomentError::ExtensionStalled {
                index: h.to_string(),
                cap: fmt_q(&cap),
            });
        }
    }
    let poly = CoordPoly::from_terms(target.weights(), fixed);
    Ok(Extension {
        poly,
        index_set: target,
        etas,
    })
}

/// Hankel rank of the moments `m_0..m_{2n−1}` of a univariate `φ`, at least 1.
///
/// For `φ = Π(Σ_{i≤r} c_i e^{ν_i t})` with distinct `ν_i`, nonzero `c_i` and
/// `r ≤ n`, the `n × (n+1)` Hankel matrix has rank `r` (Prony). In general
/// the rank is a lower bound for the exponential rank, since a truncation
/// whose Prony roots are not real needs more real exponentials.
pub fn erank1(phi: &CoordPoly, domain: &IndexSet, n: usize) -> Result<usize, MomentError> {
    if n == 0 {
        return Err(MomentError::InvalidParameters("erank1 needs n ≥ 1".into()));
    }
    if phi.terms().any(|(i, _)| i.max_var() > 1) || domain.nvars() > 1 {
        return Err(MomentError::InvalidParameters(
            "erank1 applies to univariate polynomials".into(),
        ));
    }
    let moments: Vec<Q> = (0..2 * n as u32)
        .map(|j| {
            let i = MultiIndex::from_pairs([(1, j)]);
            if domain.contains(&i) {
                Ok(phi.derivative_at_zero(&i))
            } else {
                Err(MomentError::Coverage {
                    index: i.to_string(),
                })
            }
        })
        .collect::<Result<_, _>>()?;
    let hankel: Vec<Vec<Q>> = (0..n)
        .map(|r| (0..=n).map(|c| moments[r + c].clone()).collect())
        .collect();
    Ok(rank(&hankel).max(1))
}

/// Rank of the moment matrix over the half-set, at least 1. Each
/// exponential contributes a rank-one term, so this bounds the exponential
/// rank from below in any number of variables.
pub fn erank_lower_bound(phi: &CoordPoly, set: &IndexSet) -> Result<usize, MomentError> {
    let m = moment_matrix(phi, set)?;
    Ok(rank(&m.entries).max(1))
}
