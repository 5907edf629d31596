//! Truncated free associative algebra `A^n` on the letters `a0..ak`.
//!
//! A [`TruncSeries`] is a sparse map from words of length at most `n` to
//! exact rationals. Zero coefficients are never stored, so structural
//! equality is mathematical equality. Every value carries its alphabet size
//! and truncation degree; binary operations refuse to mix them.

use crate::rational::{fmt_q, Q};
use crate::word::Word;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("dimension mismatch: (k={0}, n={1}) vs (k={2}, n={3})")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("letter a{letter} outside the alphabet a0..a{k}")]
    LetterOutOfRange { letter: usize, k: usize },
    #[error("degree {d} outside 0..={n}")]
    DegreeOutOfRange { d: usize, n: usize },
    #[error("domain error: {0}")]
    Domain(String),
}

#[derive(Clone, PartialEq, Eq)]
pub struct TruncSeries {
    k: usize,
    n: usize,
    coeffs: BTreeMap<Word, Q>,
}

impl TruncSeries {
    /// The zero element of `A^n` over `a0..ak`.
    pub fn zero(k: usize, n: usize) -> Self {
        TruncSeries {
            k,
            n,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(k: usize, n: usize) -> Self {
        Self::constant(k, n, Q::one())
    }

    pub fn constant(k: usize, n: usize, c: Q) -> Self {
        Self::monomial(k, n, Word::empty(), c)
    }

    /// A single word with a coefficient. Words longer than `n` vanish.
    pub fn monomial(k: usize, n: usize, w: Word, c: Q) -> Self {
        let mut s = Self::zero(k, n);
        s.add_term(w, c);
        s
    }

    pub fn letter(k: usize, n: usize, i: usize) -> Result<Self, AlgebraError> {
        if i > k {
            return Err(AlgebraError::LetterOutOfRange { letter: i, k });
        }
        Ok(Self::monomial(k, n, Word::letter(i as u8), Q::one()))
    }

    /// Builds a series from `(word, coefficient)` pairs, summing repeats.
    pub fn from_terms(
        k: usize,
        n: usize,
        terms: impl IntoIterator<Item = (Word, Q)>,
    ) -> Result<Self, AlgebraError> {
        let mut s = Self::zero(k, n);
        for (w, c) in terms {
            if let Some(l) = w.max_letter() {
                if l as usize > k {
                    return Err(AlgebraError::LetterOutOfRange {
                        letter: l as usize,
                        k,
                    });
                }
            }
            s.add_term(w, c);
        }
        Ok(s)
    }

    pub fn alphabet(&self) -> usize {
        self.k
    }

    pub fn degree_bound(&self) -> usize {
        self.n
    }

    pub fn coeff(&self, w: &Word) -> Q {
        self.coeffs.get(w).cloned().unwrap_or_else(Q::zero)
    }

    pub fn constant_term(&self) -> Q {
        self.coeff(&Word::empty())
    }

    /// Terms in canonical (length-then-lexicographic) order.
    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Q)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Length of the longest stored word, `None` for zero.
    pub fn max_word_len(&self) -> Option<usize> {
        self.coeffs.keys().map(Word::len).max()
    }

    pub fn min_word_len(&self) -> Option<usize> {
        self.coeffs.keys().map(Word::len).min()
    }

    pub fn max_abs_coeff(&self) -> Q {
        self.coeffs
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(Q::zero)
    }

    /// Adds `c·w` in place; drops words beyond the truncation.
    pub fn add_term(&mut self, w: Word, c: Q) {
        if w.len() > self.n || c.is_zero() {
            return;
        }
        match self.coeffs.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn check(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.k != other.k || self.n != other.n {
            return Err(AlgebraError::DimensionMismatch(
                self.k, self.n, other.k, other.n,
            ));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check(other)?;
        let mut out = self.clone();
        for (w, c) in &other.coeffs {
            out.add_term(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check(other)?;
        let mut out = self.clone();
        for (w, c) in &other.coeffs {
            out.add_term(w.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero(self.k, self.n);
        }
        TruncSeries {
            k: self.k,
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .map(|(w, x)| (w.clone(), x * c))
                .collect(),
        }
    }

    /// Truncated product `π^n(xy)`.
    pub fn mul_trunc(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check(other)?;
        let mut out = Self::zero(self.k, self.n);
        for (w1, c1) in &self.coeffs {
            let room = self.n - w1.len();
            for (w2, c2) in &other.coeffs {
                // words are sorted by length, nothing further fits
                if w2.len() > room {
                    break;
                }
                out.add_term(w1.concat(w2), c1 * c2);
            }
        }
        Ok(out)
    }

    /// Commutator `xy - yx`, truncated.
    pub fn bracket(&self, other: &Self) -> Result<Self, AlgebraError> {
        let xy = self.mul_trunc(other)?;
        let yx = other.mul_trunc(self)?;
        xy.try_sub(&yx)
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::one(self.k, self.n);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// `Σ_{j≤n} x^j / j!`; requires zero constant term.
    pub fn exp_trunc(&self) -> Result<Self, AlgebraError> {
        if !self.constant_term().is_zero() {
            return Err(AlgebraError::Domain(
                "exp requires a series with zero constant term".into(),
            ));
        }
        let mut result = Self::one(self.k, self.n);
        let mut term = Self::one(self.k, self.n);
        for j in 1..=self.n {
            term = term.mul_trunc(self)?.scale(&Q::new(1.into(), (j as i64).into()));
            if term.is_zero() {
                break;
            }
            result = result.try_add(&term)?;
        }
        Ok(result)
    }

    /// `Σ_{j≤n} (-1)^{j+1} (x-1)^j / j`; requires constant term 1.
    pub fn log_trunc(&self) -> Result<Self, AlgebraError> {
        if !self.constant_term().is_one() {
            return Err(AlgebraError::Domain(
                "log requires a series with constant term 1".into(),
            ));
        }
        let y = self.try_sub(&Self::one(self.k, self.n))?;
        let mut result = Self::zero(self.k, self.n);
        let mut power = Self::one(self.k, self.n);
        for j in 1..=self.n {
            power = power.mul_trunc(&y)?;
            if power.is_zero() {
                break;
            }
            let sign = if j % 2 == 1 { 1 } else { -1 };
            result = result.try_add(&power.scale(&Q::new(sign.into(), (j as i64).into())))?;
        }
        Ok(result)
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn inverse(&self) -> Result<Self, AlgebraError> {
        let c = self.constant_term();
        if c.is_zero() {
            return Err(AlgebraError::Domain(
                "series with zero constant term is not invertible".into(),
            ));
        }
        let cinv = c.recip();
        // x = c(1 + y) with y nilpotent
        let y = self
            .scale(&cinv)
            .try_sub(&Self::one(self.k, self.n))?;
        let neg_y = -&y;
        let mut result = Self::one(self.k, self.n);
        let mut power = Self::one(self.k, self.n);
        for _ in 1..=self.n {
            power = power.mul_trunc(&neg_y)?;
            if power.is_zero() {
                break;
            }
            result = result.try_add(&power)?;
        }
        Ok(result.scale(&cinv))
    }

    /// `Ad(g) x = g x g⁻¹`.
    pub fn adjoint(g: &Self, x: &Self) -> Result<Self, AlgebraError> {
        g.check(x)?;
        let ginv = g.inverse()?;
        g.mul_trunc(x)?.mul_trunc(&ginv)
    }

    /// `π^d`: drops every word longer than `d`; the result lives in `A^d`.
    pub fn project_degree(&self, d: usize) -> Result<Self, AlgebraError> {
        if d > self.n {
            return Err(AlgebraError::DegreeOutOfRange { d, n: self.n });
        }
        Ok(TruncSeries {
            k: self.k,
            n: d,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(w, _)| w.len() <= d)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        })
    }

    /// Re-embeds into `A^m` for `m ≥ n` (zero padding of higher degrees).
    pub fn lift(&self, m: usize) -> Result<Self, AlgebraError> {
        if m < self.n {
            return Err(AlgebraError::DegreeOutOfRange { d: m, n: self.n });
        }
        Ok(TruncSeries {
            k: self.k,
            n: m,
            coeffs: self.coeffs.clone(),
        })
    }

    /// Same coefficients viewed over a larger alphabet.
    pub fn widen_alphabet(&self, k: usize) -> Result<Self, AlgebraError> {
        if k < self.k {
            return Err(AlgebraError::LetterOutOfRange { letter: self.k, k });
        }
        Ok(TruncSeries {
            k,
            n: self.n,
            coeffs: self.coeffs.clone(),
        })
    }

    /// Homogeneous component of word length `d`.
    pub fn component(&self, d: usize) -> Self {
        self.filter(|w| w.len() == d)
    }

    /// Keeps only the words satisfying `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&Word) -> bool) -> Self {
        TruncSeries {
            k: self.k,
            n: self.n,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(w, _)| keep(w))
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    /// `(ad x)^j y`.
    pub fn ad_pow(x: &Self, j: usize, y: &Self) -> Result<Self, AlgebraError> {
        let mut acc = y.clone();
        for _ in 0..j {
            acc = x.bracket(&acc)?;
        }
        Ok(acc)
    }
}

impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (w, c) in &self.coeffs {
            let (sign, mag) = if c.is_negative() {
                ("-", -c.clone())
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            if w.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{w}")?;
            } else {
                write!(f, "{mag}*{w}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncSeries(k={}, n={}: {})", self.k, self.n, self)
    }
}

impl serde::Serialize for TruncSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.coeffs.len()))?;
        for (w, c) in &self.coeffs {
            seq.serialize_element(&serde_json::json!({
                "word": w.to_string(),
                "coeff": fmt_q(c),
            }))?;
        }
        seq.end()
    }
}

// Operator forms panic on mismatched (k, n); the `try_*` methods report it.

impl Add for &TruncSeries {
    type Output = TruncSeries;
    fn add(self, rhs: &TruncSeries) -> TruncSeries {
        self.try_add(rhs).expect("TruncSeries addition")
    }
}

impl Sub for &TruncSeries {
    type Output = TruncSeries;
    fn sub(self, rhs: &TruncSeries) -> TruncSeries {
        self.try_sub(rhs).expect("TruncSeries subtraction")
    }
}

impl Mul for &TruncSeries {
    type Output = TruncSeries;
    fn mul(self, rhs: &TruncSeries) -> TruncSeries {
        self.mul_trunc(rhs).expect("TruncSeries product")
    }
}

impl Neg for &TruncSeries {
    type Output = TruncSeries;
    fn neg(self) -> TruncSeries {
        self.scale(&-Q::one())
    }
}
