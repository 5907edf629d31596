use crate::algebra::TruncSeries;
use crate::rational::Q;
use crate::word::Word;
use num_traits::Zero;
use std::collections::BTreeMap;

use super::dynkin::dynkin_project;
use super::hall::HallBasis;
use super::pbw::PBWPoly;
use super::LieError;

/// One term `coeff · (ad a_{j1})⋯(ad a_{jm}) a0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdWordTerm {
    pub coeff: Q,
    /// `j1..jm`, letters in `1..=k`; empty for `a0` itself.
    pub word: Vec<u8>,
}

/// Writes a drift-linear Lie element as `Σ c_J (ad a_{j1})⋯(ad a_{jm}) a0`.
///
/// The element is first put in left-normed form via the Dynkin projection;
/// each left-normed monomial with `a0` inside is then rewritten by moving
/// `ad(Y)` (with `Y` the bracket holding `a0`) to the right, using
/// `(ad Y)(ad r) = (ad r)(ad Y) + ad[Y, r]`, and finally
/// `[[a0, y1], …, ys] = (-1)^s (ad ys)⋯(ad y1) a0`.
/// The ad-words form a basis of the drift-linear part, so the output is unique.
pub fn rewrite_a0_linear(x: &TruncSeries) -> Result<Vec<AdWordTerm>, LieError> {
    if let Some((w, _)) = x.terms().find(|(w, _)| w.a0_degree() != 1) {
        return Err(LieError::Domain(format!(
            "word {w} has a0-degree {} (expected exactly 1)",
            w.a0_degree()
        )));
    }
    if &dynkin_project(x)? != x {
        return Err(LieError::NotLieElement);
    }
    let mut acc: BTreeMap<Vec<u8>, Q> = BTreeMap::new();
    for (w, c) in x.terms() {
        let letters = w.letters();
        let scale = c / Q::from_integer((letters.len() as i64).into());
        let p = letters.iter().position(|&l| l == 0).expect("a0-degree 1");
        let prefix = &letters[..p];
        let rest = &letters[p + 1..];
        if rest.is_empty() {
            *acc.entry(prefix.to_vec()).or_insert_with(Q::zero) += &scale;
            continue;
        }
        for (sign, tail) in commute_drift_right(&[], rest) {
            let mut word = prefix.to_vec();
            word.extend_from_slice(&tail);
            *acc.entry(word).or_insert_with(Q::zero) += &scale * Q::from_integer(sign.into());
        }
    }
    Ok(acc
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(word, coeff)| AdWordTerm { coeff, word })
        .collect())
}

/// Expands `(ad Y)(ad r0)⋯(ad r_{q-2}) r_{q-1}`, where
/// `Y = [[a0, y1], …, ys]`, into signed ad-words applied to `a0`.
fn commute_drift_right(ys: &[u8], rest: &[u8]) -> Vec<(i64, Vec<u8>)> {
    if let [r] = rest {
        // [Y, r] = -(ad r) Y, Y = (-1)^s (ad ys)⋯(ad y1) a0
        let sign = if ys.len().is_multiple_of(2) { -1 } else { 1 };
        let mut word = vec![*r];
        word.extend(ys.iter().rev());
        return vec![(sign, word)];
    }
    let r0 = rest[0];
    let mut out: Vec<(i64, Vec<u8>)> = commute_drift_right(ys, &rest[1..])
        .into_iter()
        .map(|(s, w)| {
            let mut word = vec![r0];
            word.extend(w);
            (s, word)
        })
        .collect();
    let mut ys2 = ys.to_vec();
    ys2.push(r0);
    out.extend(commute_drift_right(&ys2, &rest[1..]));
    out
}

/// `Σ c_J (ad a_{j1})⋯(ad a_{jm}) a0` in `A^n` over `a0..ak`.
pub fn ad0_apply_words(terms: &[AdWordTerm], k: usize, n: usize) -> Result<TruncSeries, LieError> {
    let mut out = TruncSeries::zero(k, n);
    for t in terms {
        if t.word.len() + 1 > n {
            return Err(LieError::Truncation {
                needed: t.word.len() + 1,
                n,
            });
        }
        let mut acc = TruncSeries::letter(k, n, 0)?;
        for &j in t.word.iter().rev() {
            if j == 0 {
                return Err(LieError::Domain("ad-words use the letters a1..ak only".into()));
            }
            acc = TruncSeries::letter(k, n, j as usize)?.bracket(&acc)?;
        }
        out = out.try_add(&acc.scale(&t.coeff))?;
    }
    Ok(out)
}

/// `Ad₀(ξ) = ρ(ξ) a0` for `ξ ∈ Ass(a1..ak)`, with `ρ` the multiplicative
/// extension of `ad`.
pub fn ad0_apply(xi: &TruncSeries) -> Result<TruncSeries, LieError> {
    let terms: Vec<AdWordTerm> = xi
        .terms()
        .map(|(w, c)| {
            if w.a0_degree() > 0 {
                Err(LieError::Domain("Ad0 is defined on Ass(a1..ak)".into()))
            } else {
                Ok(AdWordTerm {
                    coeff: c.clone(),
                    word: w.letters().to_vec(),
                })
            }
        })
        .collect::<Result<_, _>>()?;
    ad0_apply_words(&terms, xi.alphabet(), xi.degree_bound())
}

/// `Ad₀` on PBW monomials: `V_{α1}^{i1}⋯V_{αm}^{im} ↦ (ad V_{α1})^{i1}⋯(ad V_{αm})^{im} a0`.
pub fn ad0_apply_pbw(xi: &PBWPoly, basis: &HallBasis, n: usize) -> Result<TruncSeries, LieError> {
    let k = basis.k();
    let mut out = TruncSeries::zero(k, n);
    for (m, c) in xi.terms() {
        let needed = m.weighted_degree(basis) + 1;
        if needed > n {
            return Err(LieError::Truncation { needed, n });
        }
        let mut acc = TruncSeries::letter(k, n, 0)?;
        for &(alpha, e) in m.factors().iter().rev() {
            let v = basis.expansion_at(alpha, n);
            acc = TruncSeries::ad_pow(&v, e as usize, &acc)?;
        }
        out = out.try_add(&acc.scale(c))?;
    }
    Ok(out)
}

/// Ad-words as an element of `Ass(a1..ak)` (the inverse image under `Ad₀`).
pub fn ad_words_to_series(terms: &[AdWordTerm], k: usize, n: usize) -> TruncSeries {
    let mut out = TruncSeries::zero(k, n);
    for t in terms {
        out.add_term(Word::from_letters(t.word.clone()), t.coeff.clone());
    }
    out
}
