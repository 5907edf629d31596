use goodbrackets::liecore::{is_lie_element, HallBasis};
use goodbrackets::linalg::SpanReducer;
use goodbrackets::Word;
use std::collections::BTreeMap;

fn mobius(n: u64) -> i64 {
    let (mut n, mut sign, mut p) = (n, 1i64, 2u64);
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

/// Witt's formula for the dimension of the degree-d part of a free Lie algebra on k generators.
fn witt(k: u64, d: u64) -> usize {
    let s: i64 = (1..=d)
        .filter(|e| d.is_multiple_of(*e))
        .map(|e| mobius(e) * (k as i64).pow((d / e) as u32))
        .sum();
    (s / d as i64) as usize
}

#[test]
fn counts_match_witt_formula() {
    for (k, max_d) in [(1u64, 6u64), (2, 6), (3, 5)] {
        let basis = HallBasis::new(k as usize, max_d as usize).unwrap();
        let expected: Vec<usize> = (1..=max_d).map(|d| witt(k, d)).collect();
        assert_eq!(basis.count_by_degree(), expected, "k={k}");
    }
    assert_eq!(witt(2, 6), 9);
}

#[test]
fn basis_elements_are_independent_lie_elements() {
    let basis = HallBasis::new(2, 5).unwrap();
    let mut span = SpanReducer::new();
    for e in basis.elements() {
        assert!(is_lie_element(&e.expansion));
        let v: BTreeMap<Word, _> = e.expansion.terms().map(|(w, c)| (w.clone(), c.clone())).collect();
        assert!(span.insert(v).1, "V{} is dependent", e.index);
    }
}
