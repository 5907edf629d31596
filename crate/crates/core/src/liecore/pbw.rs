use crate::algebra::TruncSeries;
use crate::linalg::SpanReducer;
use crate::multiindex::MultiIndex;
use crate::rational::{fmt_q, Q};
use crate::word::Word;
use num_traits::Zero;
use std::collections::BTreeMap;
use std::fmt;

use super::hall::{series_vec, HallBasis};
use super::LieError;

/// Ordered PBW monomial `V_{α1}^{i1} ⋯ V_{αm}^{im}` with `α1 < ⋯ < αm`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct PBWMonomial(pub MultiIndex);

impl PBWMonomial {
    pub fn one() -> Self {
        PBWMonomial(MultiIndex::zero())
    }

    pub fn generator(alpha: usize) -> Self {
        PBWMonomial(MultiIndex::unit(alpha))
    }

    pub fn from_factors(factors: impl IntoIterator<Item = (usize, u32)>) -> Self {
        PBWMonomial(MultiIndex::from_pairs(factors))
    }

    pub fn factors(&self) -> &[(usize, u32)] {
        self.0.entries()
    }

    pub fn weighted_degree(&self, basis: &HallBasis) -> usize {
        self.factors()
            .iter()
            .map(|&(a, e)| e as usize * basis.degree_of(a))
            .sum()
    }

    /// Product of the Hall expansions, truncated at `n`.
    pub fn evaluate(&self, basis: &HallBasis, n: usize) -> TruncSeries {
        let mut acc = TruncSeries::one(basis.k(), n);
        for &(alpha, e) in self.factors() {
            let v = basis.expansion_at(alpha, n);
            for _ in 0..e {
                acc = &acc * &v;
            }
        }
        acc
    }
}

impl fmt::Display for PBWMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors().is_empty() {
            return write!(f, "1");
        }
        for (j, &(a, e)) in self.factors().iter().enumerate() {
            if j > 0 {
                write!(f, "*")?;
            }
            if e == 1 {
                write!(f, "V{a}")?;
            } else {
                write!(f, "V{a}^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for PBWMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Element of `Ass(a1..ak)` in PBW coordinates.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct PBWPoly {
    coeffs: BTreeMap<PBWMonomial, Q>,
}

impl PBWPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (PBWMonomial, Q)>) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: PBWMonomial, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.coeffs.entry(m).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.retain(|_, c| !c.is_zero());
        }
    }

    pub fn coeff(&self, m: &PBWMonomial) -> Q {
        self.coeffs.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PBWMonomial, &Q)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Substitutes the Hall expansions and multiplies out in `A^n`.
    pub fn evaluate(&self, basis: &HallBasis, n: usize) -> TruncSeries {
        let mut out = TruncSeries::zero(basis.k(), n);
        for (m, c) in &self.coeffs {
            out = &out + &m.evaluate(basis, n).scale(c);
        }
        out
    }
}

impl fmt::Display for PBWPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(m, c)| format!("({})*{}", fmt_q(c), m))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for PBWPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PBWPoly({self})")
    }
}

/// Word expansions of every PBW monomial of weighted degree ≤ `degree`,
/// eliminated once so that decompositions are single reductions.
pub struct PbwTable<'a> {
    basis: &'a HallBasis,
    degree: usize,
    monomials: Vec<PBWMonomial>,
    reducer: SpanReducer<Word>,
}

impl<'a> PbwTable<'a> {
    pub fn new(basis: &'a HallBasis, degree: usize) -> Result<Self, LieError> {
        if degree > basis.max_degree() {
            return Err(LieError::InvalidParameters(format!(
                "PBW table of degree {degree} needs a Hall basis of at least that degree (have {})",
                basis.max_degree()
            )));
        }
        let monomials = enumerate_monomials(basis, degree);
        let mut reducer = SpanReducer::new();
        for m in &monomials {
            let (_, independent) = reducer.insert(series_vec(&m.evaluate(basis, degree)));
            debug_assert!(independent, "PBW monomials must be independent");
        }
        Ok(PbwTable {
            basis,
            degree,
            monomials,
            reducer,
        })
    }

    pub fn monomials(&self) -> &[PBWMonomial] {
        &self.monomials
    }

    pub fn decompose(&self, x: &TruncSeries) -> Result<PBWPoly, LieError> {
        if x.terms().any(|(w, _)| w.a0_degree() > 0) {
            return Err(LieError::Domain(
                "PBW decomposition is defined on Ass(a1..ak); the series contains a0".into(),
            ));
        }
        if let Some(len) = x.max_word_len() {
            if len > self.degree {
                return Err(LieError::InvalidParameters(format!(
                    "series degree {len} exceeds PBW table degree {}",
                    self.degree
                )));
            }
        }
        let sol = self
            .reducer
            .solve(&series_vec(x))
            .ok_or_else(|| LieError::Domain("series outside the PBW span".into()))?;
        Ok(PBWPoly::from_terms(
            sol.into_iter()
                .map(|(id, c)| (self.monomials[id].clone(), c)),
        ))
    }

    pub fn basis(&self) -> &HallBasis {
        self.basis
    }
}

fn enumerate_monomials(basis: &HallBasis, degree: usize) -> Vec<PBWMonomial> {
    fn rec(
        basis: &HallBasis,
        alpha: usize,
        remaining: usize,
        current: &mut Vec<(usize, u32)>,
        out: &mut Vec<PBWMonomial>,
    ) {
        if alpha > basis.len() {
            out.push(PBWMonomial::from_factors(current.iter().copied()));
            return;
        }
        let d = basis.degree_of(alpha);
        rec(basis, alpha + 1, remaining, current, out);
        let mut e = 1;
        while e * d <= remaining {
            current.push((alpha, e as u32));
            rec(basis, alpha + 1, remaining - e * d, current, out);
            current.pop();
            e += 1;
        }
    }
    let mut out = Vec::new();
    rec(basis, 1, degree, &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// Unique PBW coordinates of an `a0`-free series.
pub fn pbw_decompose(x: &TruncSeries, basis: &HallBasis) -> Result<PBWPoly, LieError> {
    let degree = x.max_word_len().unwrap_or(0);
    if degree > basis.max_degree() {
        return Err(LieError::InvalidParameters(format!(
            "series degree {degree} exceeds Hall basis degree {}",
            basis.max_degree()
        )));
    }
    PbwTable::new(basis, degree)?.decompose(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn letter(k: usize, n: usize, i: usize) -> TruncSeries {
        TruncSeries::letter(k, n, i).unwrap()
    }

    #[test]
    fn hall_element_is_its_own_monomial() {
        let b = HallBasis::new(2, 3).unwrap();
        for e in b.elements() {
            let p = pbw_decompose(&e.expansion, &b).unwrap();
            assert_eq!(p, PBWPoly::from_terms([(PBWMonomial::generator(e.index), qi(1))]));
        }
    }

    #[test]
    fn straightening_of_reversed_pair() {
        let b = HallBasis::new(2, 2).unwrap();
        let x = &letter(2, 2, 2) * &letter(2, 2, 1);
        let p = pbw_decompose(&x, &b).unwrap();
        let expected = PBWPoly::from_terms([
            (PBWMonomial::from_factors([(1, 1), (2, 1)]), qi(1)),
            (PBWMonomial::generator(3), qi(-1)),
        ]);
        assert_eq!(p, expected);
    }

    #[test]
    fn product_of_exponentials() {
        // ordered product e^{a1} e^{a2} has no [a1,a2] component
        let b = HallBasis::new(2, 2).unwrap();
        let x = &letter(2, 2, 1).exp_trunc().unwrap() * &letter(2, 2, 2).exp_trunc().unwrap();
        let p = pbw_decompose(&x, &b).unwrap();
        let m = |f: &[(usize, u32)]| PBWMonomial::from_factors(f.iter().copied());
        let expected = PBWPoly::from_terms([
            (m(&[]), qi(1)),
            (m(&[(1, 1)]), qi(1)),
            (m(&[(2, 1)]), qi(1)),
            (m(&[(1, 2)]), q(1, 2)),
            (m(&[(1, 1), (2, 1)]), qi(1)),
            (m(&[(2, 2)]), q(1, 2)),
        ]);
        assert_eq!(p, expected);
    }

    #[test]
    fn a0_is_rejected() {
        let b = HallBasis::new(1, 2).unwrap();
        assert!(matches!(
            pbw_decompose(&letter(1, 2, 0), &b),
            Err(LieError::Domain(_))
        ));
    }

    #[test]
    fn monomial_counts_match_word_counts() {
        // PBW: number of monomials of weighted degree d equals k^d
        let b = HallBasis::new(2, 4).unwrap();
        let t = PbwTable::new(&b, 4).unwrap();
        let mut counts = [0usize; 5];
        for m in t.monomials() {
            counts[m.weighted_degree(&b)] += 1;
        }
        assert_eq!(counts, [1, 2, 4, 8, 16]);
    }
}
