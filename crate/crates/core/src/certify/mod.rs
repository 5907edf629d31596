//! Good-bracket certification.
//!
//! A Lie element `V = X + W` with `X ∈ L` (no `a0`) and `W` linear in `a0` is
//! a good bracket exactly when `W` lies in the closed convex hull of
//! `(Ad 𝓛) a0`. [`certify_good_bracket`] reduces that membership to the
//! moment matrix of a polynomial `φ` and decides its positivity exactly.

mod ideal;

pub use ideal::{iterate_ideal, IdealContext, IdealReport};

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::algebra::{AlgebraError, TruncSeries};
use crate::liecore::{
    ad_words_to_series, is_lie_element, pbw_decompose, rewrite_a0_linear, AdWordTerm, HallBasis,
    LieError, PBWPoly,
};
use crate::moments::{
    moment_matrix, nu_map, psd_check, CoordPoly, DualVector, IndexSet, MomentError, MomentMatrix,
    PsdResult,
};
use crate::rational::{fmt_q, q_json, Q};
use crate::word::Word;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CertifyError {
    #[error("candidate is not a Lie element")]
    NotLieElement,
    #[error("candidate has a nonzero constant term")]
    ConstantTerm,
    #[error("verdict carries no moment-matrix witness")]
    NoWitness,
    #[error("the ideal is degenerate: (ad V)^{power} a0 vanishes at degree {n}")]
    DegenerateIdeal { power: usize, n: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Moment(#[from] MomentError),
}

/// A Lie element of `Lie(a0..ak)` truncated at degree `n`.
#[derive(Clone, Debug)]
pub struct Candidate {
    element: TruncSeries,
}

impl Candidate {
    pub fn new(element: TruncSeries) -> Result<Self, CertifyError> {
        if !element.constant_term().is_zero() {
            return Err(CertifyError::ConstantTerm);
        }
        if !is_lie_element(&element) {
            return Err(CertifyError::NotLieElement);
        }
        Ok(Candidate { element })
    }

    pub fn element(&self) -> &TruncSeries {
        &self.element
    }

    pub fn k(&self) -> usize {
        self.element.alphabet()
    }

    pub fn n(&self) -> usize {
        self.element.degree_bound()
    }
}

/// Drift-free and drift-linear parts of a candidate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Split {
    Parts { x: TruncSeries, w: TruncSeries },
    /// Some word has `a0`-degree at least 2; such elements are never in `K0 + L`.
    Rejected { word: Word },
}

pub fn split_parts(c: &Candidate) -> Split {
    let e = c.element();
    if let Some((w, _)) = e.terms().find(|(w, _)| w.a0_degree() >= 2) {
        return Split::Rejected { word: w.clone() };
    }
    Split::Parts {
        x: e.filter(|w| w.a0_degree() == 0),
        w: e.filter(|w| w.a0_degree() == 1),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Good,
    NotGood,
    NecessaryPassed,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Good => "GOOD",
            Status::NotGood => "NOT_GOOD",
            Status::NecessaryPassed => "NECESSARY_PASSED",
        }
    }
}

/// Which sufficient condition grounds a GOOD verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sufficiency {
    /// The candidate has no `a0` component; it lies in `L`.
    PureLie,
    /// The index set has one variable (Hankel moment problem).
    SingleVariable,
    /// Every index in the set has `|i| ≤ 2` (nonnegative quadratics are sums of squares).
    QuadraticIndices,
}

impl Sufficiency {
    pub fn as_str(&self) -> &'static str {
        match self {
            Sufficiency::PureLie => "pure_lie",
            Sufficiency::SingleVariable => "single_variable",
            Sufficiency::QuadraticIndices => "quadratic_indices",
        }
    }
}

/// Moment data computed for a drift-linear part.
#[derive(Clone, Debug)]
pub struct MomentData {
    pub ad_words: Vec<AdWordTerm>,
    pub xi: TruncSeries,
    pub basis: HallBasis,
    pub pbw: PBWPoly,
    pub phi: CoordPoly,
    pub index_set: IndexSet,
    pub matrix: MomentMatrix,
    pub psd: PsdResult,
}

#[derive(Clone, Debug)]
pub enum Certificate {
    PureLie,
    /// `a0`-degree ≥ 2 in some word.
    HigherDrift { word: Word },
    /// The `a0` coefficient rules out the affine slice (or the cone).
    DriftCoefficient { coefficient: Q },
    Moments(Box<MomentData>),
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub status: Status,
    /// Truncation degree the verdict refers to.
    pub scope: usize,
    pub k: usize,
    pub x: Option<TruncSeries>,
    pub w: Option<TruncSeries>,
    /// Factor `c` with `W = c·W₀`, `W₀` normalized to `a0`-coefficient 1.
    pub scale: Q,
    pub certificate: Certificate,
    pub sufficiency: Option<Sufficiency>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CertifyOptions {
    /// Accept any positive `a0` coefficient (membership in the cone `K`).
    pub cone: bool,
}

pub fn certify_good_bracket(c: &Candidate) -> Result<Verdict, CertifyError> {
    certify_with(c, CertifyOptions::default())
}

pub fn certify_with(c: &Candidate, opts: CertifyOptions) -> Result<Verdict, CertifyError> {
    let (k, n) = (c.k(), c.n());
    let verdict = |status, x, w, scale, certificate, sufficiency| Verdict {
        status,
        scope: n,
        k,
        x,
        w,
        scale,
        certificate,
        sufficiency,
    };
    let (x, w) = match split_parts(c) {
        Split::Rejected { word } => {
            return Ok(verdict(
                Status::NotGood,
                None,
                None,
                Q::zero(),
                Certificate::HigherDrift { word },
                None,
            ))
        }
        Split::Parts { x, w } => (x, w),
    };
    if w.is_zero() {
        return Ok(verdict(
            Status::Good,
            Some(x),
            Some(w),
            Q::zero(),
            Certificate::PureLie,
            Some(Sufficiency::PureLie),
        ));
    }
    let a0 = w.coeff(&Word::letter(0));
    let admissible = if opts.cone { a0.is_positive() } else { a0.is_one() };
    if !admissible {
        return Ok(verdict(
            Status::NotGood,
            Some(x),
            Some(w),
            a0.clone(),
            Certificate::DriftCoefficient { coefficient: a0 },
            None,
        ));
    }
    let data = moment_data(&w.scale(&a0.recip()))?;
    let (status, sufficiency) = if !data.psd.psd {
        (Status::NotGood, None)
    } else if data.index_set.nvars() <= 1 {
        (Status::Good, Some(Sufficiency::SingleVariable))
    } else if data.index_set.members().iter().all(|i| i.total() <= 2) {
        (Status::Good, Some(Sufficiency::QuadraticIndices))
    } else {
        (Status::NecessaryPassed, None)
    };
    Ok(verdict(
        status,
        Some(x),
        Some(w),
        a0,
        Certificate::Moments(Box::new(data)),
        sufficiency,
    ))
}

/// `W₀ = Ad₀ ξ`, `ξ` in PBW form, `φ = ν(ξ)` and its moment matrix over the
/// weighted simplex of Hall degrees with bound `n − 1`.
pub fn moment_data(w: &TruncSeries) -> Result<MomentData, CertifyError> {
    let (k, n) = (w.alphabet(), w.degree_bound());
    let ad_words = rewrite_a0_linear(w)?;
    let xi = ad_words_to_series(&ad_words, k, n);
    let d = n.saturating_sub(1);
    let basis = HallBasis::new(k.max(1), d.max(1))?;
    let pbw = pbw_decompose(&xi, &basis)?;
    let phi = nu_map(&pbw, &basis);
    let index_set = IndexSet::weighted_simplex(basis.weights(), d as u32)?;
    let matrix = moment_matrix(&phi, &index_set)?;
    let psd = psd_check(&matrix);
    Ok(MomentData {
        ad_words,
        xi,
        basis,
        pbw,
        phi,
        index_set,
        matrix,
        psd,
    })
}

/// The separating functional of a NOT_GOOD verdict: `η` with `⟨η², φ⟩ < 0`.
pub fn dual_certificate(v: &Verdict) -> Result<DualVector, CertifyError> {
    match &v.certificate {
        Certificate::Moments(data) if !data.psd.psd => {
            let xi = data.psd.witness.as_ref().ok_or(CertifyError::NoWitness)?;
            Ok(DualVector::from_witness(&data.matrix.index, xi))
        }
        _ => Err(CertifyError::NoWitness),
    }
}

impl Verdict {
    /// Recomputes the witness value with exact arithmetic.
    pub fn recheck_witness(&self) -> Option<Q> {
        let Certificate::Moments(data) = &self.certificate else {
            return None;
        };
        let eta = dual_certificate(self).ok()?;
        let direct = data.matrix.quad(data.psd.witness.as_ref()?);
        debug_assert_eq!(eta.square().pair(&data.phi), direct);
        Some(direct)
    }

    pub fn to_json(&self, input: &str) -> Value {
        let mut out = json!({
            "schema": "goodbrackets/certify/v1",
            "input": input,
            "letters": self.k,
            "degree": self.scope,
            "status": self.status.as_str(),
            "sufficiency": self.sufficiency.map(|s| s.as_str()),
            "drift_coefficient": q_json(&self.scale),
            "x_part": self.x.as_ref().map(|x| x.to_string()),
            "w_part": self.w.as_ref().map(|w| w.to_string()),
        });
        let obj = out.as_object_mut().expect("object");
        match &self.certificate {
            Certificate::PureLie => {
                obj.insert("reason".into(), json!("candidate lies in L"));
            }
            Certificate::HigherDrift { word } => {
                obj.insert(
                    "reason".into(),
                    json!(format!("word {word} has a0-degree {}", word.a0_degree())),
                );
            }
            Certificate::DriftCoefficient { coefficient } => {
                obj.insert(
                    "reason".into(),
                    json!(format!(
                        "a0 coefficient is {}; the affine slice needs 1 and the cone a positive value",
                        fmt_q(coefficient)
                    )),
                );
            }
            Certificate::Moments(data) => {
                obj.insert(
                    "ad_words".into(),
                    Value::Array(
                        data.ad_words
                            .iter()
                            .map(|t| json!({"coeff": q_json(&t.coeff), "word": t.word}))
                            .collect(),
                    ),
                );
                obj.insert(
                    "pbw".into(),
                    Value::Array(
                        data.pbw
                            .terms()
                            .map(|(m, c)| json!({"monomial": m.to_string(), "coeff": q_json(c)}))
                            .collect(),
                    ),
                );
                obj.insert("phi".into(), serde_json::to_value(&data.phi).expect("json"));
                obj.insert("index_set".into(), data.index_set.to_json());
                obj.insert("matrix".into(), data.matrix.to_json());
                obj.insert("psd".into(), data.psd.to_json());
                if let Ok(eta) = dual_certificate(self) {
                    obj.insert("dual_certificate".into(), eta.to_json());
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    fn a(k: usize, n: usize, i: usize) -> TruncSeries {
        TruncSeries::letter(k, n, i).unwrap()
    }

    fn br(x: &TruncSeries, y: &TruncSeries) -> TruncSeries {
        x.bracket(y).unwrap()
    }

    fn k1n3(c1: Q, c2: Q) -> Candidate {
        let (a0, a1) = (a(1, 3, 0), a(1, 3, 1));
        let e1 = br(&a1, &a0);
        let e2 = br(&a1, &e1);
        Candidate::new(&(&a0 + &e1.scale(&c1)) + &e2.scale(&c2)).unwrap()
    }

    #[test]
    fn split_examples() {
        let (a0, a1, a2) = (a(2, 3, 0), a(2, 3, 1), a(2, 3, 2));
        let c = Candidate::new(&a0 + &br(&a1, &a2)).unwrap();
        assert_eq!(
            split_parts(&c),
            Split::Parts {
                x: br(&a1, &a2),
                w: a0.clone()
            }
        );
        let c = Candidate::new(br(&a0, &br(&a0, &a1))).unwrap();
        assert!(matches!(split_parts(&c), Split::Rejected { .. }));
        let c = Candidate::new(&(&a0 + &br(&a1, &a0)) + &br(&a1, &a2)).unwrap();
        let Split::Parts { x, w } = split_parts(&c) else {
            panic!("expected parts")
        };
        assert_eq!(x, br(&a1, &a2));
        assert_eq!(w, &a0 + &br(&a1, &a0));
    }

    #[test]
    fn drift_alone_is_good() {
        for n in 1..4 {
            let v = certify_good_bracket(&Candidate::new(a(2, n, 0)).unwrap()).unwrap();
            assert_eq!(v.status, Status::Good);
            let Certificate::Moments(data) = &v.certificate else {
                panic!()
            };
            // φ = 1: only the (0,0) moment is nonzero
            for (r, row) in data.matrix.entries.iter().enumerate() {
                for (c, x) in row.iter().enumerate() {
                    assert_eq!(*x, if r == 0 && c == 0 { qi(1) } else { qi(0) });
                }
            }
        }
    }

    #[test]
    fn second_order_term_sign_decides() {
        let v = certify_good_bracket(&k1n3(qi(0), qi(3))).unwrap();
        assert_eq!(v.status, Status::Good);
        let v = certify_good_bracket(&k1n3(qi(0), qi(-1))).unwrap();
        assert_eq!(v.status, Status::NotGood);
        let Certificate::Moments(data) = &v.certificate else {
            panic!()
        };
        assert_eq!(data.matrix.entries, vec![vec![qi(1), qi(0)], vec![qi(0), qi(-2)]]);
        assert_eq!(data.psd.witness.as_ref().unwrap(), &vec![qi(0), qi(1)]);
        assert!(v.recheck_witness().unwrap() < qi(0));
        let eta = dual_certificate(&v).unwrap();
        assert_eq!(eta.square().pair(&data.phi), qi(-2));
    }

    #[test]
    fn missing_second_order_term_is_not_good() {
        let v = certify_good_bracket(&k1n3(qi(1), qi(0))).unwrap();
        assert_eq!(v.status, Status::NotGood);
        let Certificate::Moments(data) = &v.certificate else {
            panic!()
        };
        assert_eq!(data.matrix.entries, vec![vec![qi(1), qi(1)], vec![qi(1), qi(0)]]);
    }

    #[test]
    fn averaged_field_is_good() {
        let v = certify_good_bracket(&k1n3(q(1, 2), q(1, 6))).unwrap();
        assert_eq!(v.status, Status::Good);
        assert_eq!(v.sufficiency, Some(Sufficiency::SingleVariable));
        assert!(dual_certificate(&v).is_err());
    }

    #[test]
    fn drift_coefficient_modes() {
        let w = a(1, 3, 0).scale(&qi(2));
        let c = Candidate::new(w).unwrap();
        assert_eq!(certify_good_bracket(&c).unwrap().status, Status::NotGood);
        let v = certify_with(&c, CertifyOptions { cone: true }).unwrap();
        assert_eq!(v.status, Status::Good);
        let neg = Candidate::new(a(1, 3, 0).scale(&qi(-1))).unwrap();
        assert_eq!(
            certify_with(&neg, CertifyOptions { cone: true }).unwrap().status,
            Status::NotGood
        );
    }

    #[test]
    fn pure_lie_and_tri_state() {
        let c = Candidate::new(br(&a(2, 3, 1), &a(2, 3, 2))).unwrap();
        let v = certify_good_bracket(&c).unwrap();
        assert_eq!(v.sufficiency, Some(Sufficiency::PureLie));
        // k = 2, n = 4: indices of total degree 3 exist, so a PSD pass is not conclusive
        let c = Candidate::new(a(2, 4, 0)).unwrap();
        assert_eq!(certify_good_bracket(&c).unwrap().status, Status::NecessaryPassed);
    }

    #[test]
    fn candidate_validation() {
        let x = &a(1, 2, 1) * &a(1, 2, 0);
        assert_eq!(Candidate::new(x).unwrap_err(), CertifyError::NotLieElement);
        assert_eq!(
            Candidate::new(TruncSeries::one(1, 2)).unwrap_err(),
            CertifyError::ConstantTerm
        );
    }
}
