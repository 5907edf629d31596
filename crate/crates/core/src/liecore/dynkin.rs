use crate::algebra::TruncSeries;
use crate::rational::Q;
use crate::word::Word;
use num_traits::Zero;
use std::collections::BTreeMap;

use super::LieError;

/// Word expansion of the left-normed bracket
/// `(ad a_{i1})⋯(ad a_{i(m-1)}) a_{im}` of the letters of `w`.
pub fn left_normed_bracket(w: &Word) -> BTreeMap<Word, Q> {
    let letters = w.letters();
    let mut acc: BTreeMap<Word, Q> = BTreeMap::new();
    let Some((&last, rest)) = letters.split_last() else {
        return acc;
    };
    acc.insert(Word::letter(last), Q::from_integer(1.into()));
    for &l in rest.iter().rev() {
        let lw = Word::letter(l);
        let mut next: BTreeMap<Word, Q> = BTreeMap::new();
        for (u, c) in &acc {
            *next.entry(lw.concat(u)).or_insert_with(Q::zero) += c;
            *next.entry(u.concat(&lw)).or_insert_with(Q::zero) -= c;
        }
        next.retain(|_, c| !c.is_zero());
        acc = next;
    }
    acc
}

/// Dynkin projection: each word `w` of length `m` goes to `(1/m)` times its
/// left-normed bracket. Fixes every Lie element.
pub fn dynkin_project(x: &TruncSeries) -> Result<TruncSeries, LieError> {
    if !x.constant_term().is_zero() {
        return Err(LieError::Domain(
            "Dynkin projection needs a zero constant term".into(),
        ));
    }
    let mut out = TruncSeries::zero(x.alphabet(), x.degree_bound());
    for (w, c) in x.terms() {
        let scale = c / Q::from_integer((w.len() as i64).into());
        for (u, d) in left_normed_bracket(w) {
            out.add_term(u, d * &scale);
        }
    }
    Ok(out)
}

pub fn is_lie_element(x: &TruncSeries) -> bool {
    matches!(dynkin_project(x), Ok(p) if &p == x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn ws(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn single_letter_is_fixed() {
        let a1 = TruncSeries::letter(2, 3, 1).unwrap();
        assert_eq!(dynkin_project(&a1).unwrap(), a1);
    }

    #[test]
    fn two_letter_word_projects_to_half_bracket() {
        let x = TruncSeries::monomial(2, 2, ws("a1a2"), qi(1));
        let expected =
            TruncSeries::from_terms(2, 2, [(ws("a1a2"), q(1, 2)), (ws("a2a1"), q(-1, 2))]).unwrap();
        assert_eq!(dynkin_project(&x).unwrap(), expected);
    }

    #[test]
    fn repeated_inner_letter_vanishes() {
        let x = TruncSeries::monomial(2, 3, ws("a1a2a2"), qi(1));
        assert!(dynkin_project(&x).unwrap().is_zero());
    }

    #[test]
    fn constant_term_is_rejected() {
        assert!(dynkin_project(&TruncSeries::one(1, 2)).is_err());
    }
}
