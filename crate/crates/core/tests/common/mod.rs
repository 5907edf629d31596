#![allow(dead_code)]

use goodbrackets::rational::{q, Q};
use goodbrackets::{TruncSeries, Word};
use rand::rngs::StdRng;
use rand::Rng;

pub fn small_q(rng: &mut StdRng) -> Q {
    let num = rng.gen_range(-6i64..=6);
    let den = rng.gen_range(1i64..=4);
    q(num, den)
}

pub fn nonzero_q(rng: &mut StdRng) -> Q {
    loop {
        let x = small_q(rng);
        if x != q(0, 1) {
            return x;
        }
    }
}

pub fn letter(k: usize, n: usize, i: usize) -> TruncSeries {
    TruncSeries::letter(k, n, i).unwrap()
}

/// A random bracket tree with `leaves` leaves drawn from `pool`.
pub fn random_tree(rng: &mut StdRng, k: usize, n: usize, leaves: &[usize]) -> TruncSeries {
    if leaves.len() == 1 {
        return letter(k, n, leaves[0]);
    }
    let cut = rng.gen_range(1..leaves.len());
    let l = random_tree(rng, k, n, &leaves[..cut]);
    let r = random_tree(rng, k, n, &leaves[cut..]);
    l.bracket(&r).unwrap()
}

/// Random Lie element in `a_lo..a_k`, built from bracket trees of degree ≤ `max_deg`.
pub fn random_lie(rng: &mut StdRng, k: usize, n: usize, lo: usize, max_deg: usize, terms: usize) -> TruncSeries {
    let mut out = TruncSeries::zero(k, n);
    for _ in 0..terms {
        let deg = rng.gen_range(1..=max_deg);
        let leaves: Vec<usize> = (0..deg).map(|_| rng.gen_range(lo..=k)).collect();
        let t = random_tree(rng, k, n, &leaves);
        out = out.try_add(&t.scale(&small_q(rng))).unwrap();
    }
    out
}

/// Random Lie element linear in `a0`: bracket trees with exactly one `a0` leaf.
pub fn random_a0_linear(rng: &mut StdRng, k: usize, n: usize, max_deg: usize, terms: usize) -> TruncSeries {
    let mut out = TruncSeries::zero(k, n);
    for _ in 0..terms {
        let deg = rng.gen_range(1..=max_deg);
        let mut leaves: Vec<usize> = (0..deg - 1).map(|_| rng.gen_range(1..=k)).collect();
        leaves.insert(rng.gen_range(0..deg), 0);
        let t = random_tree(rng, k, n, &leaves);
        out = out.try_add(&t.scale(&small_q(rng))).unwrap();
    }
    out
}

/// Random element of `Ass(a_lo..a_k)` with words of length `min_len..=max_len`.
pub fn random_assoc(
    rng: &mut StdRng,
    k: usize,
    n: usize,
    lo: usize,
    min_len: usize,
    max_len: usize,
    terms: usize,
) -> TruncSeries {
    let mut out = TruncSeries::zero(k, n);
    for _ in 0..terms {
        let len = rng.gen_range(min_len..=max_len);
        let w: Vec<u8> = (0..len).map(|_| rng.gen_range(lo..=k) as u8).collect();
        out.add_term(Word::from_letters(w), small_q(rng));
    }
    out
}
