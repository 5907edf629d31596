use serde_json::{json, Value};

use super::MomentError;
use crate::multiindex::MultiIndex;

/// Convex body `C ⊂ ℝ₊^m` whose lattice points form an index set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shape {
    /// `T^m_n = {i : |i| < n}`.
    TotalDegree { m: usize, n: u32 },
    /// `J^m_n = {i : 0 ≤ i_j < n}`.
    Box { m: usize, n: u32 },
    /// `{i : Σ w_j i_j ≤ d}` with positive integer weights.
    WeightedSimplex { weights: Vec<u32>, d: u32 },
}

impl Shape {
    pub fn nvars(&self) -> usize {
        match self {
            Shape::TotalDegree { m, .. } | Shape::Box { m, .. } => *m,
            Shape::WeightedSimplex { weights, .. } => weights.len(),
        }
    }

    /// Variable weights; 1 for the unweighted shapes.
    pub fn weights(&self) -> Vec<u32> {
        match self {
            Shape::WeightedSimplex { weights, .. } => weights.clone(),
            _ => vec![1; self.nvars()],
        }
    }

    /// Whether `scale · i ∈ C` for the dense exponent vector `i`.
    fn holds(&self, dense: &[u32], scale: u32) -> bool {
        match self {
            Shape::TotalDegree { n, .. } => {
                *n > 0 && scale * dense.iter().sum::<u32>() < *n
            }
            Shape::Box { n, .. } => *n > 0 && dense.iter().all(|&e| scale * e < *n),
            Shape::WeightedSimplex { weights, d } => {
                scale * dense.iter().zip(weights).map(|(e, w)| e * w).sum::<u32>() <= *d
            }
        }
    }

    /// The same body with its size parameter increased by `by`.
    pub fn enlarged(&self, by: u32) -> Shape {
        match self {
            Shape::TotalDegree { m, n } => Shape::TotalDegree { m: *m, n: n + by },
            Shape::Box { m, n } => Shape::Box { m: *m, n: n + by },
            Shape::WeightedSimplex { weights, d } => Shape::WeightedSimplex {
                weights: weights.clone(),
                d: d + by,
            },
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Shape::TotalDegree { m, n } => json!({"kind": "total_degree", "variables": m, "n": n}),
            Shape::Box { m, n } => json!({"kind": "box", "variables": m, "n": n}),
            Shape::WeightedSimplex { weights, d } => {
                json!({"kind": "weighted_simplex", "weights": weights, "d": d})
            }
        }
    }
}

/// Lattice points `I_C = C ∩ ℤ₊^m` together with the half-set `I_{C/2}`,
/// the row index set of moment matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexSet {
    shape: Shape,
    members: Vec<MultiIndex>,
    half: Vec<MultiIndex>,
}

impl IndexSet {
    pub fn new(shape: Shape) -> Result<Self, MomentError> {
        if !shape.holds(&vec![0; shape.nvars()], 1) {
            return Err(MomentError::InvalidParameters(format!(
                "index set {shape:?} does not contain 0"
            )));
        }
        if let Shape::WeightedSimplex { weights, .. } = &shape {
            if weights.contains(&0) {
                return Err(MomentError::InvalidParameters(
                    "weighted simplex needs positive weights".into(),
                ));
            }
        }
        let members = lattice_points(&shape, 1);
        let half = lattice_points(&shape, 2);
        Ok(IndexSet {
            shape,
            members,
            half,
        })
    }

    pub fn total_degree(m: usize, n: u32) -> Result<Self, MomentError> {
        Self::new(Shape::TotalDegree { m, n })
    }

    pub fn box_set(m: usize, n: u32) -> Result<Self, MomentError> {
        Self::new(Shape::Box { m, n })
    }

    pub fn weighted_simplex(weights: Vec<u32>, d: u32) -> Result<Self, MomentError> {
        Self::new(Shape::WeightedSimplex { weights, d })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn nvars(&self) -> usize {
        self.shape.nvars()
    }

    pub fn weights(&self) -> Vec<u32> {
        self.shape.weights()
    }

    /// Members in increasing order (total degree, then lexicographic).
    pub fn members(&self) -> &[MultiIndex] {
        &self.members
    }

    pub fn half_set(&self) -> &[MultiIndex] {
        &self.half
    }

    pub fn contains(&self, i: &MultiIndex) -> bool {
        i.max_var() <= self.nvars() && self.shape.holds(&i.to_dense(self.nvars()), 1)
    }

    pub fn in_half(&self, i: &MultiIndex) -> bool {
        i.max_var() <= self.nvars() && self.shape.holds(&i.to_dense(self.nvars()), 2)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn enlarged(&self, by: u32) -> Result<Self, MomentError> {
        Self::new(self.shape.enlarged(by))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "shape": self.shape.to_json(),
            "members": self.members.len(),
            "half_set": self.half.iter().map(|i| i.to_string()).collect::<Vec<_>>(),
        })
    }
}

/// All `i` with `scale · i ∈ C`, sorted. Every shape is downward closed, so
/// a depth-first walk that stops at the first failing exponent is exhaustive.
fn lattice_points(shape: &Shape, scale: u32) -> Vec<MultiIndex> {
    fn rec(shape: &Shape, scale: u32, j: usize, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if j == cur.len() {
            out.push(MultiIndex::from_dense(cur));
            return;
        }
        loop {
            if !shape.holds(cur, scale) {
                break;
            }
            rec(shape, scale, j + 1, cur, out);
            cur[j] += 1;
        }
        cur[j] = 0;
    }
    let m = shape.nvars();
    let mut out = Vec::new();
    let mut cur = vec![0; m];
    if shape.holds(&cur, scale) {
        rec(shape, scale, 0, &mut cur, &mut out);
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simplex_and_box_sizes() {
        let t = IndexSet::total_degree(2, 3).unwrap();
        assert_eq!(t.len(), 6);
        assert_eq!(t.half_set().len(), 3);
        let j = IndexSet::box_set(2, 2).unwrap();
        assert_eq!(j.len(), 4);
        assert_eq!(j.half_set(), &[MultiIndex::zero()]);
    }

    #[test]
    fn weighted_simplex_for_hall_degrees() {
        // k = 2, n = 3: weights of V1, V2, V3 are 1, 1, 2 and d = 2
        let s = IndexSet::weighted_simplex(vec![1, 1, 2], 2).unwrap();
        assert!(s.contains(&MultiIndex::unit(3)));
        assert!(!s.contains(&MultiIndex::from_pairs([(3, 2)])));
        assert_eq!(s.half_set().len(), 3);
        for i in s.half_set() {
            for j in s.half_set() {
                assert!(s.contains(&i.add(j)));
            }
        }
    }

    #[test]
    fn rejects_empty_body() {
        assert!(IndexSet::total_degree(1, 0).is_err());
        assert!(IndexSet::weighted_simplex(vec![0], 1).is_err());
    }
}
