//! Exact linear algebra over the rationals.
//!
//! [`SpanReducer`] is the single elimination kernel behind Hall coordinates,
//! PBW decomposition, ideal quotients and subspace sums: it keeps an echelon
//! form of the vectors inserted so far together with the combination of the
//! original vectors each echelon row represents.

use crate::rational::Q;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

pub type SparseVec<K> = BTreeMap<K, Q>;

#[derive(Debug, Clone)]
struct Row<K> {
    pivot: K,
    vec: SparseVec<K>,
    // combination of inserted vectors (by insertion id) equal to `vec`
    combo: BTreeMap<usize, Q>,
}

#[derive(Debug, Clone)]
pub struct SpanReducer<K: Ord + Clone> {
    rows: Vec<Row<K>>,
    inserted: usize,
}

/// Outcome of reducing a vector against a span.
#[derive(Debug, Clone)]
pub struct Reduction<K> {
    pub residual: SparseVec<K>,
    /// `target - residual = Σ coords[id] · inserted[id]`
    pub coords: BTreeMap<usize, Q>,
}

fn axpy<K: Ord + Clone>(dst: &mut SparseVec<K>, a: &Q, src: &SparseVec<K>) {
    for (key, v) in src {
        let delta = a * v;
        match dst.entry(key.clone()) {
            std::collections::btree_map::Entry::Vacant(e) => {
                if !delta.is_zero() {
                    e.insert(delta);
                }
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += delta;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }
}

impl<K: Ord + Clone> Default for SpanReducer<K> {
    fn default() -> Self {
        Self::new()
    }
}

impl<K: Ord + Clone> SpanReducer<K> {
    pub fn new() -> Self {
        SpanReducer {
            rows: Vec::new(),
            inserted: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn inserted(&self) -> usize {
        self.inserted
    }

    /// Reduces `target` modulo the current span.
    pub fn reduce(&self, target: &SparseVec<K>) -> Reduction<K> {
        let mut residual = target.clone();
        let mut coords: BTreeMap<usize, Q> = BTreeMap::new();
        for row in &self.rows {
            let Some(f) = residual.get(&row.pivot).cloned() else {
                continue;
            };
            axpy(&mut residual, &-f.clone(), &row.vec);
            axpy(&mut coords, &f, &row.combo);
        }
        Reduction { residual, coords }
    }

    /// Inserts a vector and returns its id plus whether it enlarged the span.
    pub fn insert(&mut self, v: SparseVec<K>) -> (usize, bool) {
        let id = self.inserted;
        self.inserted += 1;
        let red = self.reduce(&v);
        if red.residual.is_empty() {
            return (id, false);
        }
        let mut combo: BTreeMap<usize, Q> = red.coords.into_iter().map(|(i, c)| (i, -c)).collect();
        combo.insert(id, Q::one());
        let (pivot, lead) = red
            .residual
            .iter()
            .next()
            .map(|(k, c)| (k.clone(), c.clone()))
            .expect("nonempty residual");
        let inv = lead.recip();
        let vec: SparseVec<K> = red.residual.into_iter().map(|(k, c)| (k, c * &inv)).collect();
        let combo = combo.into_iter().map(|(i, c)| (i, c * &inv)).collect();
        self.rows.push(Row { pivot, vec, combo });
        (id, true)
    }

    /// Exact coordinates of `target` in terms of the inserted vectors, if it
    /// lies in their span. Dependent inserted vectors receive coefficient 0.
    pub fn solve(&self, target: &SparseVec<K>) -> Option<BTreeMap<usize, Q>> {
        let red = self.reduce(target);
        if red.residual.is_empty() {
            Some(red.coords.into_iter().filter(|(_, c)| !c.is_zero()).collect())
        } else {
            None
        }
    }

    pub fn contains(&self, target: &SparseVec<K>) -> bool {
        self.reduce(target).residual.is_empty()
    }

    /// Echelon rows (pivot coefficient 1).
    pub fn echelon(&self) -> impl Iterator<Item = &SparseVec<K>> {
        self.rows.iter().map(|r| &r.vec)
    }
}

/// Reduced row echelon form of a dense matrix; returns the nonzero rows.
pub fn rref(rows: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let mut m: Vec<Vec<Q>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..ncols {
                    let delta = &f * &m[r][j];
                    m[i][j] -= delta;
                }
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    m
}

pub fn rank(rows: &[Vec<Q>]) -> usize {
    rref(rows).len()
}

/// Solves the square system `a · x = b` exactly; `None` if singular.
pub fn solve_square(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let n = a.len();
    let aug: Vec<Vec<Q>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let red = rref(&aug);
    if red.len() < n || (0..n).any(|i| !red[i][i].is_one()) {
        return None;
    }
    Some(red.iter().map(|r| r[n].clone()).collect())
}

pub fn mat_vec(a: &[Vec<Q>], x: &[Q]) -> Vec<Q> {
    a.iter()
        .map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum())
        .collect()
}

pub fn quad_form(a: &[Vec<Q>], x: &[Q]) -> Q {
    mat_vec(a, x).iter().zip(x).map(|(p, q)| p * q).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn sv(entries: &[(u32, i64)]) -> SparseVec<u32> {
        entries.iter().map(|&(k, v)| (k, qi(v))).collect()
    }

    #[test]
    fn reducer_solves_and_detects_dependence() {
        let mut r = SpanReducer::new();
        assert!(r.insert(sv(&[(0, 1), (1, 1)])).1);
        assert!(r.insert(sv(&[(1, 1), (2, 1)])).1);
        assert!(!r.insert(sv(&[(0, 1), (2, -1)])).1);
        assert_eq!(r.rank(), 2);
        let coords = r.solve(&sv(&[(0, 2), (1, 5), (2, 3)])).unwrap();
        assert_eq!(coords.get(&0), Some(&qi(2)));
        assert_eq!(coords.get(&1), Some(&qi(3)));
        assert!(r.solve(&sv(&[(0, 1)])).is_none());
    }

    #[test]
    fn rref_and_solve() {
        let a = vec![vec![qi(2), qi(1)], vec![qi(1), qi(3)]];
        let x = solve_square(&a, &[qi(3), qi(4)]).unwrap();
        assert_eq!(x, vec![qi(1), qi(1)]);
        assert_eq!(rank(&[vec![qi(1), qi(2)], vec![qi(2), qi(4)]]), 1);
        assert!(solve_square(&[vec![qi(1), qi(2)], vec![qi(2), qi(4)]], &[qi(1), qi(1)]).is_none());
        assert_eq!(quad_form(&a, &[q(1, 2), qi(0)]), q(1, 2));
    }
}
