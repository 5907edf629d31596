use num_traits::{One, Pow, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;

use super::IndexSet;
use crate::liecore::{HallBasis, PBWPoly};
use crate::multiindex::MultiIndex;
use crate::rational::{fmt_q, Q};

/// Polynomial in commuting variables `t_1..t_m`, each carrying the degree of
/// the Hall element it stands for.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct CoordPoly {
    weights: Vec<u32>,
    coeffs: BTreeMap<MultiIndex, Q>,
}

impl CoordPoly {
    pub fn zero(weights: Vec<u32>) -> Self {
        CoordPoly {
            weights,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_terms(weights: Vec<u32>, terms: impl IntoIterator<Item = (MultiIndex, Q)>) -> Self {
        let mut p = Self::zero(weights);
        for (i, c) in terms {
            p.add_term(i, c);
        }
        p
    }

    /// `Σ coeffs[j] t^j` in one variable of weight 1.
    pub fn univariate(coeffs: &[Q]) -> Self {
        Self::from_terms(
            vec![1],
            coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| (MultiIndex::from_pairs([(1, j as u32)]), c.clone())),
        )
    }

    pub fn add_term(&mut self, i: MultiIndex, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(i.clone()).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&i);
        }
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn nvars(&self) -> usize {
        self.weights.len()
    }

    pub fn coeff(&self, i: &MultiIndex) -> Q {
        self.coeffs.get(i).cloned().unwrap_or_else(Q::zero)
    }

    /// `φ₀^{(i)} = i!·coeff_i`, the value of `∂^i φ` at 0.
    pub fn derivative_at_zero(&self, i: &MultiIndex) -> Q {
        self.coeff(i) * Q::from_integer(i.factorial())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Q)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn scale(&self, c: &Q) -> CoordPoly {
        CoordPoly::from_terms(
            self.weights.clone(),
            self.coeffs.iter().map(|(i, x)| (i.clone(), x * c)),
        )
    }

    /// Sum of two polynomials; the weights of the longer variable list win.
    pub fn add(&self, other: &CoordPoly) -> CoordPoly {
        let weights = if other.weights.len() > self.weights.len() {
            other.weights.clone()
        } else {
            self.weights.clone()
        };
        let mut out = CoordPoly::from_terms(weights, self.coeffs.clone());
        for (i, c) in &other.coeffs {
            out.add_term(i.clone(), c.clone());
        }
        out
    }

    /// Evaluates at a rational point (`t_j = point[j-1]`, missing entries 0).
    pub fn eval(&self, point: &[Q]) -> Q {
        self.coeffs
            .iter()
            .map(|(i, c)| {
                i.entries().iter().fold(c.clone(), |acc, &(v, e)| {
                    let x = point.get(v - 1).cloned().unwrap_or_else(Q::zero);
                    acc * Pow::pow(x, e)
                })
            })
            .sum()
    }
}

impl fmt::Display for CoordPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(i, c)| {
                if i.is_zero() {
                    fmt_q(c)
                } else {
                    format!("({})*{}", fmt_q(c), i)
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for CoordPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CoordPoly({self})")
    }
}

impl Serialize for CoordPoly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a> {
            index: &'a MultiIndex,
            monomial: String,
            #[serde(with = "crate::rational::serde_q")]
            coeff: &'a Q,
        }
        let mut seq = s.serialize_seq(Some(self.coeffs.len()))?;
        for (i, c) in &self.coeffs {
            seq.serialize_element(&Term {
                index: i,
                monomial: i.to_string(),
                coeff: c,
            })?;
        }
        seq.end()
    }
}

/// `ν : V_{α1}^{i1}⋯V_{αm}^{im} ↦ t_{α1}^{i1}⋯t_{αm}^{im}`, extended linearly.
pub fn nu_map(xi: &PBWPoly, basis: &HallBasis) -> CoordPoly {
    CoordPoly::from_terms(
        basis.weights(),
        xi.terms().map(|(m, c)| (m.0.clone(), c.clone())),
    )
}

/// `Π_I e^{⟨v,t⟩}`: the coefficient of `t^i` is `v^i / i!`.
pub fn exp_coord(v: &BTreeMap<usize, Q>, set: &IndexSet) -> CoordPoly {
    let terms = set.members().iter().map(|i| {
        let mut c = Q::one();
        for &(var, e) in i.entries() {
            let x = v.get(&var).cloned().unwrap_or_else(Q::zero);
            c *= Pow::pow(x, e);
        }
        (i.clone(), c / Q::from_integer(i.factorial()))
    });
    CoordPoly::from_terms(set.weights(), terms)
}

/// `Π_I`: keeps exactly the monomials indexed by `I`.
pub fn project_poly(phi: &CoordPoly, set: &IndexSet) -> CoordPoly {
    CoordPoly::from_terms(
        phi.weights.clone(),
        phi.coeffs
            .iter()
            .filter(|(i, _)| set.contains(i))
            .map(|(i, c)| (i.clone(), c.clone())),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::TruncSeries;
    use crate::liecore::{pbw_decompose, PBWMonomial};
    use crate::rational::{q, qi};

    #[test]
    fn nu_is_monomial_to_monomial() {
        let b = HallBasis::new(1, 2).unwrap();
        let one = PBWPoly::from_terms([(PBWMonomial::one(), qi(1))]);
        assert_eq!(nu_map(&one, &b).coeff(&MultiIndex::zero()), qi(1));
        let sq = PBWPoly::from_terms([(PBWMonomial::from_factors([(1, 2)]), qi(1))]);
        let phi = nu_map(&sq, &b);
        assert_eq!(phi.len(), 1);
        assert_eq!(phi.coeff(&MultiIndex::from_pairs([(1, 2)])), qi(1));
    }

    #[test]
    fn nu_of_group_element_is_exponential() {
        let b = HallBasis::new(1, 4).unwrap();
        let v = qi(3);
        let g = TruncSeries::letter(1, 4, 1).unwrap().scale(&v).exp_trunc().unwrap();
        let phi = nu_map(&pbw_decompose(&g, &b).unwrap(), &b);
        let set = IndexSet::total_degree(1, 5).unwrap();
        let expected = exp_coord(&BTreeMap::from([(1, v)]), &set);
        assert_eq!(phi.terms().collect::<Vec<_>>(), expected.terms().collect::<Vec<_>>());
    }

    #[test]
    fn exp_coord_examples() {
        let t13 = IndexSet::total_degree(1, 3).unwrap();
        assert_eq!(
            exp_coord(&BTreeMap::new(), &t13),
            CoordPoly::univariate(&[qi(1)])
        );
        assert_eq!(
            exp_coord(&BTreeMap::from([(1, qi(2))]), &t13),
            CoordPoly::univariate(&[qi(1), qi(2), qi(2)])
        );
        let j22 = IndexSet::box_set(2, 2).unwrap();
        let phi = exp_coord(&BTreeMap::from([(1, qi(1)), (2, qi(1))]), &j22);
        assert_eq!(phi.len(), 4);
        assert!(phi.terms().all(|(_, c)| *c == qi(1)));
    }

    #[test]
    fn projection_is_idempotent() {
        let phi = CoordPoly::univariate(&[qi(1), qi(1), qi(1)]);
        let t12 = IndexSet::total_degree(1, 2).unwrap();
        let p = project_poly(&phi, &t12);
        assert_eq!(p, CoordPoly::univariate(&[qi(1), qi(1)]));
        assert_eq!(project_poly(&p, &t12), p);
        let w = IndexSet::weighted_simplex(vec![1, 1, 2], 2).unwrap();
        let psi = CoordPoly::from_terms(
            vec![1, 1, 2],
            [
                (MultiIndex::unit(3), q(1, 2)),
                (MultiIndex::from_pairs([(3, 2)]), qi(1)),
            ],
        );
        let p = project_poly(&psi, &w);
        assert_eq!(p.len(), 1);
        assert_eq!(p.coeff(&MultiIndex::unit(3)), q(1, 2));
    }
}
