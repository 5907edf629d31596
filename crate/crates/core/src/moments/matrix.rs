use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Pow, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt;

use super::{CoordPoly, IndexSet, MomentError};
use crate::linalg::{quad_form, solve_square};
use crate::multiindex::MultiIndex;
use crate::rational::{fmt_q, q_json, q_matrix_json, Q};

/// Symmetric matrix `M[i,j] = φ₀^{(i+j)}` with rows indexed by multi-indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MomentMatrix {
    pub index: Vec<MultiIndex>,
    pub entries: Vec<Vec<Q>>,
}

impl MomentMatrix {
    pub fn dim(&self) -> usize {
        self.index.len()
    }

    /// `ξᵀMξ`.
    pub fn quad(&self, xi: &[Q]) -> Q {
        quad_form(&self.entries, xi)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "index": self.index.iter().map(|i| i.to_string()).collect::<Vec<_>>(),
            "entries": q_matrix_json(&self.entries),
        })
    }
}

impl Serialize for MomentMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("MomentMatrix", 2)?;
        st.serialize_field(
            "index",
            &self.index.iter().map(|i| i.to_string()).collect::<Vec<_>>(),
        )?;
        st.serialize_field("entries", &q_matrix_json(&self.entries))?;
        st.end()
    }
}

/// Moment matrix of `φ` over the half-set of `I`.
pub fn moment_matrix(phi: &CoordPoly, set: &IndexSet) -> Result<MomentMatrix, MomentError> {
    moment_matrix_on(phi, set, set.half_set())
}

/// Moment matrix of `φ` (known on `domain`) over arbitrary rows; every
/// pairwise sum of rows must lie in the domain.
pub fn moment_matrix_on(
    phi: &CoordPoly,
    domain: &IndexSet,
    rows: &[MultiIndex],
) -> Result<MomentMatrix, MomentError> {
    let n = rows.len();
    let mut entries = vec![vec![Q::zero(); n]; n];
    for a in 0..n {
        for b in a..n {
            let s = rows[a].add(&rows[b]);
            if !domain.contains(&s) {
                return Err(MomentError::Coverage {
                    index: s.to_string(),
                });
            }
            let v = phi.derivative_at_zero(&s);
            entries[b][a] = v.clone();
            entries[a][b] = v;
        }
    }
    Ok(MomentMatrix {
        index: rows.to_vec(),
        entries,
    })
}

/// Exact positive-semidefiniteness verdict. When negative, `witness` is a
/// rational vector with `witnessᵀ M witness = value < 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsdResult {
    pub psd: bool,
    pub witness: Option<Vec<Q>>,
    pub value: Option<Q>,
}

impl PsdResult {
    pub fn to_json(&self) -> Value {
        json!({
            "psd": self.psd,
            "witness": self.witness.as_ref().map(|w| w.iter().map(q_json).collect::<Vec<_>>()),
            "value": self.value.as_ref().map(q_json),
        })
    }
}

/// Decides `M ⪰ 0` exactly.
///
/// The matrix is scaled to integers and reduced by fraction-free symmetric
/// elimination with diagonal pivoting. Each step divides by the previous
/// pivot, which is exact because all intermediate entries are minors of the
/// scaled matrix. The rows of the accumulated transform stay integral too,
/// and give the witness directly. A negative remaining diagonal means row
/// `i` of the transform is a witness. If all remaining diagonals are zero but
/// some off-diagonal entry `a_ij` is not, then `T_i − sign(a_ij)·T_j` is one.
pub fn psd_check(m: &MomentMatrix) -> PsdResult {
    psd_decide(&m.entries)
}

pub fn psd_decide(m: &[Vec<Q>]) -> PsdResult {
    let n = m.len();
    let scale = m
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|row| row.iter().map(|x| x.numer() * (&scale / x.denom())).collect())
        .collect();
    let mut t: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| BigInt::from((i == j) as u8)).collect())
        .collect();
    let mut active: Vec<bool> = vec![true; n];
    let mut prev = BigInt::one();

    let witness = loop {
        let live: Vec<usize> = (0..n).filter(|&i| active[i]).collect();
        if let Some(&i) = live.iter().find(|&&i| a[i][i].is_negative()) {
            break Some(t[i].clone());
        }
        let Some(&p) = live.iter().find(|&&i| a[i][i].is_positive()) else {
            let pair = live.iter().enumerate().find_map(|(x, &i)| {
                live[x + 1..]
                    .iter()
                    .find(|&&j| !a[i][j].is_zero())
                    .map(|&j| (i, j))
            });
            break pair.map(|(i, j)| {
                let sign = if a[i][j].sign() == Sign::Minus { -1 } else { 1 };
                t[i].iter()
                    .zip(&t[j])
                    .map(|(x, y)| x - y * BigInt::from(sign))
                    .collect()
            });
        };
        let app = a[p][p].clone();
        for &r in &live {
            if r == p {
                continue;
            }
            let arp = a[r][p].clone();
            for &s in &live {
                if s != p {
                    a[r][s] = (&app * &a[r][s] - &arp * &a[p][s]) / &prev;
                }
            }
            for c in 0..n {
                t[r][c] = (&app * &t[r][c] - &arp * &t[p][c]) / &prev;
            }
        }
        prev = app;
        active[p] = false;
    };

    match witness {
        None => PsdResult {
            psd: true,
            witness: None,
            value: None,
        },
        Some(w) => {
            let g = w.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
            let xi: Vec<Q> = w
                .iter()
                .map(|x| Q::from_integer(if g.is_zero() { x.clone() } else { x / &g }))
                .collect();
            let value = quad_form(m, &xi);
            debug_assert!(value.is_negative(), "PSD witness must be negative");
            PsdResult {
                psd: false,
                witness: Some(xi),
                value: Some(value),
            }
        }
    }
}

/// Strict positive definiteness via the leading principal pivots.
pub fn positive_definite(m: &[Vec<Q>]) -> bool {
    let n = m.len();
    let mut a = m.to_vec();
    for p in 0..n {
        if !a[p][p].is_positive() {
            return false;
        }
        for r in p + 1..n {
            let f = &a[r][p] / &a[p][p];
            if f.is_zero() {
                continue;
            }
            for c in p..n {
                let delta = &f * &a[p][c];
                a[r][c] -= delta;
            }
        }
    }
    true
}

/// Symbol `η = Σ η_i τ^i` of a constant-coefficient differential operator
/// evaluated at 0. The pairing is `⟨τ^i, t^j⟩ = i!·δ_ij`.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct DualVector {
    coeffs: BTreeMap<MultiIndex, Q>,
}

impl DualVector {
    pub fn from_terms(terms: impl IntoIterator<Item = (MultiIndex, Q)>) -> Self {
        let mut out = DualVector::default();
        for (i, c) in terms {
            out.add_term(i, c);
        }
        out
    }

    /// `Σ ξ_a τ^{index_a}` from a moment-matrix vector.
    pub fn from_witness(index: &[MultiIndex], xi: &[Q]) -> Self {
        Self::from_terms(index.iter().cloned().zip(xi.iter().cloned()))
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

    pub fn coeff(&self, i: &MultiIndex) -> Q {
        self.coeffs.get(i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Q)> {
        self.coeffs.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.coeffs.keys().map(MultiIndex::total).max().unwrap_or(0)
    }

    /// Product of symbols (composition of the operators).
    pub fn mul(&self, other: &DualVector) -> DualVector {
        let mut out = DualVector::default();
        for (i, a) in &self.coeffs {
            for (j, b) in &other.coeffs {
                out.add_term(i.add(j), a * b);
            }
        }
        out
    }

    pub fn square(&self) -> DualVector {
        self.mul(self)
    }

    /// `⟨η, φ⟩ = Σ η_i · i! · coeff_i(φ)`; coefficients absent from `φ` count as 0.
    pub fn pair(&self, phi: &CoordPoly) -> Q {
        self.coeffs
            .iter()
            .map(|(i, c)| c * phi.derivative_at_zero(i))
            .sum()
    }

    /// Pairing that insists every index of `η` lies in the known domain of `φ`.
    pub fn pair_on(&self, phi: &CoordPoly, domain: &IndexSet) -> Result<Q, MomentError> {
        if let Some(i) = self.coeffs.keys().find(|i| !domain.contains(i)) {
            return Err(MomentError::Coverage {
                index: i.to_string(),
            });
        }
        Ok(self.pair(phi))
    }

    /// Value of the symbol at `w`, i.e. `η` applied to `e^{⟨w,t⟩}`.
    pub fn eval_at(&self, w: &[Q]) -> Q {
        self.coeffs
            .iter()
            .map(|(i, c)| {
                i.entries().iter().fold(c.clone(), |acc, &(v, e)| {
                    acc * Pow::pow(w.get(v - 1).cloned().unwrap_or_else(Q::zero), e)
                })
            })
            .sum()
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.coeffs
                .iter()
                .map(|(i, c)| json!({"index": i, "symbol": symbol_name(i), "coeff": q_json(c)}))
                .collect(),
        )
    }
}

fn symbol_name(i: &MultiIndex) -> String {
    if i.is_zero() {
        return "1".into();
    }
    i.entries()
        .iter()
        .map(|&(v, e)| if e == 1 { format!("tau{v}") } else { format!("tau{v}^{e}") })
        .collect::<Vec<_>>()
        .join("*")
}

impl fmt::Display for DualVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(i, c)| format!("({})*{}", fmt_q(c), symbol_name(i)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for DualVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DualVector({self})")
    }
}

/// Operator `η` with `η(w_target) = 1` and `η(w_i) = 0` otherwise, of degree
/// at most `#freqs − 1`.
///
/// The frequencies are projected to a line `⟨s,·⟩` on which they stay
/// distinct, the Vandermonde system for the interpolation polynomial `p` is
/// solved, and `η = p(⟨s,τ⟩)`. For `φ = Σ c_i Π e^{⟨w_i,t⟩}` this gives
/// `⟨η², φ⟩ = c_target`.
pub fn vandermonde_separator(freqs: &[Vec<Q>], target: usize) -> Result<DualVector, MomentError> {
    let n = freqs.len();
    if target >= n {
        return Err(MomentError::InvalidParameters(format!(
            "target {target} out of range for {n} frequencies"
        )));
    }
    for a in 0..n {
        for b in a + 1..n {
            if same_point(&freqs[a], &freqs[b]) {
                return Err(MomentError::InvalidParameters(
                    "frequencies must be mutually distinct".into(),
                ));
            }
        }
    }
    let m = freqs.iter().map(Vec::len).max().unwrap_or(0);
    // s = (1, N, N², …) separates the points for all but finitely many N
    let (s, proj) = (1i64..)
        .map(|big| {
            let s: Vec<Q> = (0..m as u32).map(|j| Q::from_integer(BigInt::from(big).pow(j))).collect();
            let proj: Vec<Q> = freqs
                .iter()
                .map(|w| w.iter().zip(&s).map(|(x, y)| x * y).sum())
                .collect();
            (s, proj)
        })
        .find(|(_, proj)| {
            (0..n).all(|a| (a + 1..n).all(|b| proj[a] != proj[b]))
        })
        .expect("a separating direction exists");
    // row i: (1, p_i, p_i², …), so the solution holds the coefficients of p
    let vander: Vec<Vec<Q>> = proj
        .iter()
        .map(|p| (0..n as u32).map(|d| Pow::pow(p.clone(), d)).collect())
        .collect();
    let rhs: Vec<Q> = (0..n).map(|i| if i == target { Q::one() } else { Q::zero() }).collect();
    let c = solve_square(&vander, &rhs).expect("Vandermonde matrix of distinct nodes is invertible");
    let line = DualVector::from_terms(
        s.iter()
            .enumerate()
            .map(|(j, sj)| (MultiIndex::unit(j + 1), sj.clone())),
    );
    let mut power = DualVector::from_terms([(MultiIndex::zero(), Q::one())]);
    let mut eta = DualVector::default();
    for cd in &c {
        for (i, x) in power.terms() {
            eta.add_term(i.clone(), x * cd);
        }
        power = power.mul(&line);
    }
    Ok(eta)
}

fn same_point(a: &[Q], b: &[Q]) -> bool {
    let len = a.len().max(b.len());
    (0..len).all(|j| a.get(j).cloned().unwrap_or_else(Q::zero) == b.get(j).cloned().unwrap_or_else(Q::zero))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::exp_coord;
    use crate::rational::{q, qi};

    fn mat(rows: &[&[i64]]) -> Vec<Vec<Q>> {
        rows.iter().map(|r| r.iter().map(|&x| qi(x)).collect()).collect()
    }

    #[test]
    fn moment_matrix_examples() {
        let t13 = IndexSet::total_degree(1, 3).unwrap();
        let m = moment_matrix(&CoordPoly::univariate(&[qi(1), qi(1), q(1, 2)]), &t13).unwrap();
        assert_eq!(m.entries, mat(&[&[1, 1], &[1, 1]]));
        let m = moment_matrix(&CoordPoly::univariate(&[qi(1), qi(0), qi(-1)]), &t13).unwrap();
        assert_eq!(m.entries, mat(&[&[1, 0], &[0, -2]]));
        let m = moment_matrix(&CoordPoly::univariate(&[qi(1), q(1, 2), q(1, 6)]), &t13).unwrap();
        assert_eq!(m.entries, vec![vec![qi(1), q(1, 2)], vec![q(1, 2), q(1, 3)]]);
    }

    #[test]
    fn coverage_error() {
        let t12 = IndexSet::total_degree(1, 2).unwrap();
        let rows = [MultiIndex::zero(), MultiIndex::unit(1)];
        let err = moment_matrix_on(&CoordPoly::univariate(&[qi(1)]), &t12, &rows).unwrap_err();
        assert!(matches!(err, MomentError::Coverage { .. }));
    }

    #[test]
    fn psd_examples() {
        assert!(psd_decide(&mat(&[&[1, 0], &[0, 1]])).psd);
        assert!(psd_decide(&mat(&[&[1, 1], &[1, 1]])).psd);
        let r = psd_decide(&mat(&[&[1, 2], &[2, 1]]));
        assert!(!r.psd);
        let xi = r.witness.unwrap();
        assert_eq!(quad_form(&mat(&[&[1, 2], &[2, 1]]), &xi), r.value.unwrap());
        assert!(psd_decide(&mat(&[&[0, 1], &[1, 0]])).value.unwrap() < qi(0));
        assert!(psd_decide(&[]).psd);
    }

    #[test]
    fn definiteness() {
        assert!(positive_definite(&mat(&[&[2, 1], &[1, 2]])));
        assert!(!positive_definite(&mat(&[&[1, 1], &[1, 1]])));
        assert!(!positive_definite(&mat(&[&[1, 2], &[2, 1]])));
    }

    #[test]
    fn zero_pivot_with_nonzero_row() {
        let m = mat(&[&[1, 1, 0], &[1, 1, 1], &[0, 1, 1]]);
        let r = psd_decide(&m);
        assert!(!r.psd);
        assert!(quad_form(&m, r.witness.as_ref().unwrap()) < qi(0));
    }

    #[test]
    fn witness_pairs_to_negative_value() {
        let phi = CoordPoly::univariate(&[qi(1), qi(0), qi(-1)]);
        let set = IndexSet::total_degree(1, 3).unwrap();
        let m = moment_matrix(&phi, &set).unwrap();
        let r = psd_check(&m);
        let eta = DualVector::from_witness(&m.index, r.witness.as_ref().unwrap());
        assert_eq!(eta.square().pair(&phi), r.value.unwrap());
    }

    #[test]
    fn separator_isolates_negative_weight() {
        // φ = 2e^{0·t} − e^{t} + ... in one variable
        let freqs = vec![vec![qi(0)], vec![qi(1)], vec![qi(3)]];
        let cs = [qi(2), qi(-1), q(1, 2)];
        let set = IndexSet::total_degree(1, 5).unwrap();
        let mut phi = CoordPoly::zero(vec![1]);
        for (w, c) in freqs.iter().zip(&cs) {
            phi = phi.add(&exp_coord(&BTreeMap::from([(1, w[0].clone())]), &set).scale(c));
        }
        let eta = vandermonde_separator(&freqs, 1).unwrap();
        assert!(eta.degree() <= 2);
        assert_eq!(eta.square().pair_on(&phi, &set).unwrap(), qi(-1));
    }

    #[test]
    fn separator_in_two_variables() {
        let freqs = vec![vec![qi(1), qi(0)], vec![qi(0), qi(1)], vec![qi(1), qi(1)]];
        let eta = vandermonde_separator(&freqs, 2).unwrap();
        assert_eq!(eta.eval_at(&freqs[2]), qi(1));
        assert_eq!(eta.eval_at(&freqs[0]), qi(0));
        assert_eq!(eta.eval_at(&freqs[1]), qi(0));
        assert!(vandermonde_separator(&[vec![qi(1)], vec![qi(1)]], 0).is_err());
    }
}
