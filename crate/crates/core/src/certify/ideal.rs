use num_traits::{One, Zero};
use serde_json::{json, Value};
use std::collections::BTreeMap;

use super::CertifyError;
use crate::algebra::TruncSeries;
use crate::linalg::SpanReducer;
use crate::liecore::is_lie_element;
use crate::rational::{factorial_q, Q};
use crate::word::Word;

/// The two-sided ideal of `A^n` generated by `g = (ad V)^{2m} a0`, spanned by
/// `π^n(u·g·v)` over words `u`, `v`. The quotient `Â = A/𝔄𝔍` is realized as
/// reduction modulo this span.
#[derive(Clone, Debug)]
pub struct IdealContext {
    pub k: usize,
    pub n: usize,
    pub m: usize,
    pub v: TruncSeries,
    pub generator: TruncSeries,
    span: SpanReducer<Word>,
}

impl IdealContext {
    pub fn new(v: &TruncSeries, m: usize) -> Result<Self, CertifyError> {
        if m == 0 {
            return Err(CertifyError::Invalid("m must be positive".into()));
        }
        if v.terms().any(|(w, _)| w.a0_degree() > 0) || !is_lie_element(v) {
            return Err(CertifyError::Invalid(
                "V must be a Lie element in the letters a1..ak".into(),
            ));
        }
        let (k, n) = (v.alphabet(), v.degree_bound());
        let a0 = TruncSeries::letter(k, n, 0)?;
        let generator = TruncSeries::ad_pow(v, 2 * m, &a0)?;
        let mut span = SpanReducer::new();
        if let Some(low) = generator.min_word_len() {
            for len in 0..=n.saturating_sub(low) {
                for total in all_words(k, len) {
                    for cut in 0..=len {
                        let (u, w) = total.letters().split_at(cut);
                        let left = TruncSeries::monomial(k, n, Word::from_letters(u.to_vec()), Q::one());
                        let right = TruncSeries::monomial(k, n, Word::from_letters(w.to_vec()), Q::one());
                        let x = left.mul_trunc(&generator)?.mul_trunc(&right)?;
                        if !x.is_zero() {
                            span.insert(vec_of(&x));
                        }
                    }
                }
            }
        }
        Ok(IdealContext {
            k,
            n,
            m,
            v: v.clone(),
            generator,
            span,
        })
    }

    /// Dimension of the ideal inside `A^n`.
    pub fn dim(&self) -> usize {
        self.span.rank()
    }

    pub fn contains(&self, x: &TruncSeries) -> bool {
        self.span.contains(&vec_of(x))
    }

    /// Normal form of `x` modulo the ideal.
    pub fn reduce(&self, x: &TruncSeries) -> TruncSeries {
        let residual = self.span.reduce(&vec_of(x)).residual;
        TruncSeries::from_terms(self.k, self.n, residual).expect("same dimensions")
    }

    /// `e^{s·ad V̂} â0 = Σ_{i<2m} sⁱ/i! (ad V̂)ⁱ â0` as an identity in `s`: every
    /// coefficient `(ad V)^j a0 / j!` with `2m ≤ j ≤ n` lies in the ideal.
    pub fn ad_exponential_identity(&self) -> Result<bool, CertifyError> {
        let a0 = TruncSeries::letter(self.k, self.n, 0)?;
        for j in 2 * self.m..=self.n {
            let term = TruncSeries::ad_pow(&self.v, j, &a0)?.scale(&factorial_q(j as u32).recip());
            if !self.contains(&term) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The associative form `e^{sV̂} = Σ_{i<2m} sⁱ V̂ⁱ/i!`, i.e. `V^j` in the
    /// ideal for `2m ≤ j ≤ n`. It does not follow from the ideal and is
    /// reported for information only.
    pub fn associative_exponential_identity(&self) -> bool {
        (2 * self.m..=self.n).all(|j| self.contains(&self.v.pow(j)))
    }
}

/// One round of the quotient construction: the free directions
/// `(Ad z)(ad V̂)^{2m−1} â0` adjoinable to `â0`.
#[derive(Clone, Debug)]
pub struct IdealReport {
    pub generator: TruncSeries,
    /// The generator vanishes at this truncation, so the ideal is trivial.
    pub trivial_ideal: bool,
    pub ideal_dim: usize,
    pub ad_identity_holds: bool,
    pub associative_identity_holds: bool,
    pub direction_seed: TruncSeries,
    /// Reduced direction for each supplied `z`.
    pub directions: Vec<TruncSeries>,
    /// Independent reduced directions spanning the new affine part.
    pub span_basis: Vec<TruncSeries>,
}

impl IdealReport {
    pub fn span_dim(&self) -> usize {
        self.span_basis.len()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": "goodbrackets/quotient/v1",
            "generator": self.generator.to_string(),
            "trivial_ideal": self.trivial_ideal,
            "ideal_dim": self.ideal_dim,
            "ad_identity_holds": self.ad_identity_holds,
            "associative_identity_holds": self.associative_identity_holds,
            "direction_seed": self.direction_seed.to_string(),
            "directions": self.directions.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
            "span_dim": self.span_dim(),
            "span_basis": self.span_basis.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
        })
    }
}

/// Builds the ideal generated by `(ad V)^{2m} a0` at the truncation of `V`,
/// checks the exponential identity in the quotient, and reduces
/// `(Ad z)(ad V)^{2m−1} a0` for every group element `z`.
pub fn iterate_ideal(
    v: &TruncSeries,
    m: usize,
    z_list: &[TruncSeries],
) -> Result<IdealReport, CertifyError> {
    let ctx = IdealContext::new(v, m)?;
    let a0 = TruncSeries::letter(ctx.k, ctx.n, 0)?;
    let seed = TruncSeries::ad_pow(v, 2 * m - 1, &a0)?;
    if seed.is_zero() {
        return Err(CertifyError::DegenerateIdeal {
            power: 2 * m - 1,
            n: ctx.n,
        });
    }
    let mut directions = Vec::new();
    let mut span = SpanReducer::new();
    let mut span_basis = Vec::new();
    for z in z_list {
        if z.alphabet() != ctx.k || z.degree_bound() != ctx.n {
            return Err(CertifyError::Invalid(
                "group elements must share the alphabet and truncation of V".into(),
            ));
        }
        let log = z.log_trunc()?;
        if log.terms().any(|(w, _)| w.a0_degree() > 0) || !is_lie_element(&log) {
            return Err(CertifyError::Invalid(
                "z must be the exponential of a Lie element in a1..ak".into(),
            ));
        }
        let d = ctx.reduce(&TruncSeries::adjoint(z, &seed)?);
        if span.insert(vec_of(&d)).1 {
            span_basis.push(d.clone());
        }
        directions.push(d);
    }
    Ok(IdealReport {
        generator: ctx.generator.clone(),
        trivial_ideal: ctx.generator.is_zero(),
        ideal_dim: ctx.dim(),
        ad_identity_holds: ctx.ad_exponential_identity()?,
        associative_identity_holds: ctx.associative_exponential_identity(),
        direction_seed: seed,
        directions,
        span_basis,
    })
}

fn vec_of(x: &TruncSeries) -> BTreeMap<Word, Q> {
    x.terms()
        .filter(|(_, c)| !c.is_zero())
        .map(|(w, c)| (w.clone(), c.clone()))
        .collect()
}

fn all_words(k: usize, len: usize) -> Vec<Word> {
    let mut out = vec![Vec::<u8>::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..=k as u8).map(move |l| {
                    let mut w2 = w.clone();
                    w2.push(l);
                    w2
                })
            })
            .collect();
    }
    out.into_iter().map(Word::from_letters).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(k: usize, n: usize, i: usize) -> TruncSeries {
        TruncSeries::letter(k, n, i).unwrap()
    }

    #[test]
    fn first_order_direction() {
        let v = a(1, 3, 1);
        let one = TruncSeries::one(1, 3);
        let r = iterate_ideal(&v, 1, &[one]).unwrap();
        assert_eq!(r.span_dim(), 1);
        assert_eq!(r.directions[0], a(1, 3, 1).bracket(&a(1, 3, 0)).unwrap());
        assert!(r.ad_identity_holds);
        assert!(!r.associative_identity_holds);
        assert!(!r.trivial_ideal);
    }

    #[test]
    fn conjugation_adds_only_ideal_terms() {
        let v = a(1, 3, 1);
        let z = v.exp_trunc().unwrap();
        let r = iterate_ideal(&v, 1, &[TruncSeries::one(1, 3), z]).unwrap();
        assert_eq!(r.span_dim(), 1);
        assert_eq!(r.directions[0], r.directions[1]);
    }

    #[test]
    fn trivial_ideal_still_reports_direction() {
        let v = a(2, 4, 1);
        let r = iterate_ideal(&v, 2, &[TruncSeries::one(2, 4)]).unwrap();
        assert!(r.trivial_ideal);
        let expected = TruncSeries::ad_pow(&v, 3, &a(2, 4, 0)).unwrap();
        assert_eq!(r.directions[0], expected);
    }

    #[test]
    fn degenerate_seed_is_an_error() {
        let v = a(1, 2, 1);
        assert!(matches!(
            iterate_ideal(&v, 2, &[]),
            Err(CertifyError::DegenerateIdeal { .. })
        ));
        assert!(iterate_ideal(&a(1, 3, 0), 1, &[]).is_err());
    }
}
