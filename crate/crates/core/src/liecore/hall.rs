use crate::algebra::TruncSeries;
use crate::linalg::SpanReducer;
use crate::rational::Q;
use crate::word::Word;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt;

use super::LieError;

/// Binary bracket tree over the generators `a1..ak`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HallTree {
    Letter(usize),
    Bracket(Box<HallTree>, Box<HallTree>),
}

impl HallTree {
    pub fn leaves(&self) -> usize {
        match self {
            HallTree::Letter(_) => 1,
            HallTree::Bracket(l, r) => l.leaves() + r.leaves(),
        }
    }

    /// Nested-pair JSON: a letter is its index, a bracket is `[left, right]`.
    pub fn to_json(&self) -> Value {
        match self {
            HallTree::Letter(i) => json!(i),
            HallTree::Bracket(l, r) => json!([l.to_json(), r.to_json()]),
        }
    }
}

impl fmt::Display for HallTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HallTree::Letter(i) => write!(f, "a{i}"),
            HallTree::Bracket(l, r) => write!(f, "[{l},{r}]"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct HallElement {
    /// 1-based position in the basis order.
    pub index: usize,
    pub degree: usize,
    pub tree: HallTree,
    /// Indices of the two factors for brackets.
    pub factors: Option<(usize, usize)>,
    pub expansion: TruncSeries,
}

/// Classical Hall basis of `Lie(a1..ak)` up to a degree, ordered by degree
/// and then by construction order. Carries a precomputed elimination of the
/// word expansions so Lie coordinates are a single reduction.
#[derive(Clone, Debug)]
pub struct HallBasis {
    k: usize,
    max_degree: usize,
    elements: Vec<HallElement>,
    coords: SpanReducer<Word>,
}

impl HallBasis {
    pub fn new(k: usize, n: usize) -> Result<Self, LieError> {
        if k == 0 || n == 0 {
            return Err(LieError::InvalidParameters(format!(
                "Hall basis needs k ≥ 1 and n ≥ 1 (got k={k}, n={n})"
            )));
        }
        let mut elements: Vec<HallElement> = Vec::new();
        for i in 1..=k {
            elements.push(HallElement {
                index: i,
                degree: 1,
                tree: HallTree::Letter(i),
                factors: None,
                expansion: TruncSeries::letter(k, n, i).expect("generator in range"),
            });
        }
        for d in 2..=n {
            let mut new = Vec::new();
            // [u, v] with u < v, deg u + deg v = d, and v a letter or v = [x, y] with x ≤ u
            for u in elements.iter() {
                for v in elements.iter() {
                    if u.degree + v.degree != d || u.index >= v.index {
                        continue;
                    }
                    if let Some((x, _)) = v.factors {
                        if x > u.index {
                            continue;
                        }
                    }
                    new.push((u.index, v.index));
                }
            }
            for (ui, vi) in new {
                let u = &elements[ui - 1];
                let v = &elements[vi - 1];
                let expansion = u.expansion.bracket(&v.expansion).expect("same dimensions");
                let tree = HallTree::Bracket(Box::new(u.tree.clone()), Box::new(v.tree.clone()));
                let index = elements.len() + 1;
                elements.push(HallElement {
                    index,
                    degree: d,
                    tree,
                    factors: Some((ui, vi)),
                    expansion,
                });
            }
        }
        let mut coords = SpanReducer::new();
        for e in &elements {
            let (_, independent) = coords.insert(series_vec(&e.expansion));
            debug_assert!(independent, "Hall expansions must be independent");
        }
        Ok(HallBasis {
            k,
            max_degree: n,
            elements,
            coords,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[HallElement] {
        &self.elements
    }

    /// Element by its 1-based index.
    pub fn get(&self, index: usize) -> Option<&HallElement> {
        index.checked_sub(1).and_then(|i| self.elements.get(i))
    }

    pub fn degree_of(&self, index: usize) -> usize {
        self.elements[index - 1].degree
    }

    /// Degrees of all elements, in basis order (the weights of `t_α`).
    pub fn weights(&self) -> Vec<u32> {
        self.elements.iter().map(|e| e.degree as u32).collect()
    }

    pub fn count_by_degree(&self) -> Vec<usize> {
        let mut out = vec![0; self.max_degree];
        for e in &self.elements {
            out[e.degree - 1] += 1;
        }
        out
    }

    /// Expansion of `V_α` re-embedded at another truncation degree.
    pub fn expansion_at(&self, index: usize, n: usize) -> TruncSeries {
        let e = &self.elements[index - 1].expansion;
        if n >= self.max_degree {
            e.lift(n).expect("lift")
        } else {
            e.project_degree(n).expect("project")
        }
    }

    /// Coordinates `c_α` with `Σ c_α V_α = x` exactly.
    pub fn lie_to_hall(&self, x: &TruncSeries) -> Result<BTreeMap<usize, Q>, LieError> {
        if x.alphabet() != self.k {
            return Err(LieError::InvalidParameters(format!(
                "series over a0..a{} used with a Hall basis over a1..a{}",
                x.alphabet(),
                self.k
            )));
        }
        if let Some(len) = x.max_word_len() {
            if len > self.max_degree {
                return Err(LieError::InvalidParameters(format!(
                    "series has degree {len} beyond the basis degree {}",
                    self.max_degree
                )));
            }
        }
        let target = series_vec(x);
        let sol = self.coords.solve(&target).ok_or(LieError::NotLieElement)?;
        Ok(sol.into_iter().map(|(id, c)| (id + 1, c)).collect())
    }

    /// Evaluates `Σ c_α V_α` at truncation degree `n`.
    pub fn from_coords(&self, coords: &BTreeMap<usize, Q>, n: usize) -> TruncSeries {
        let mut out = TruncSeries::zero(self.k, n);
        for (&alpha, c) in coords {
            out = &out + &self.expansion_at(alpha, n).scale(c);
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": "goodbrackets/hall/v1",
            "letters": self.k,
            "degree": self.max_degree,
            "counts_by_degree": self.count_by_degree(),
            "elements": self.elements.iter().map(|e| json!({
                "index": e.index,
                "degree": e.degree,
                "tree": e.tree.to_json(),
                "bracket": e.tree.to_string(),
                "expansion": e.expansion,
            })).collect::<Vec<_>>(),
        })
    }
}

pub(crate) fn series_vec(x: &TruncSeries) -> BTreeMap<Word, Q> {
    x.terms().map(|(w, c)| (w.clone(), c.clone())).collect()
}
