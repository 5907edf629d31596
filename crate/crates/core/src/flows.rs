//! Flows of the universal system `ẋ = x(a0 + Σ u_i a_i)`, `x(0) = 1`, in `A^n`
//! for piecewise-constant controls, their iterated-integral coefficients, and
//! the fast-oscillation experiment.

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::algebra::{AlgebraError, TruncSeries};
use crate::rational::{factorial_q, fmt_q, parse_q, q_json, to_f64, Q};
use crate::word::Word;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FlowError {
    #[error("invalid control: {0}")]
    Control(String),
    #[error("invalid experiment configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// A constant piece: run `a0 + Σ value_i a_i` for `duration`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Piece {
    pub duration: Q,
    pub value: Vec<Q>,
}

/// Piecewise-constant control with `k` components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseControl {
    k: usize,
    pieces: Vec<Piece>,
}

impl PiecewiseControl {
    pub fn new(k: usize, pieces: Vec<Piece>) -> Result<Self, FlowError> {
        for p in &pieces {
            if !p.duration.is_positive() {
                return Err(FlowError::Control(format!(
                    "durations must be positive (got {})",
                    fmt_q(&p.duration)
                )));
            }
            if p.value.len() != k {
                return Err(FlowError::Control(format!(
                    "control value has {} components, expected {k}",
                    p.value.len()
                )));
            }
        }
        Ok(PiecewiseControl { k, pieces })
    }

    /// Constant control on `[0, duration]`.
    pub fn constant(duration: Q, value: Vec<Q>) -> Result<Self, FlowError> {
        Self::new(value.len(), vec![Piece { duration, value }])
    }

    /// Parses `"dur:v1,v2;dur:v1,v2"`; an empty value list means all zeros.
    pub fn parse(src: &str, k: usize) -> Result<Self, FlowError> {
        let mut pieces = Vec::new();
        for part in src.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let (dur, vals) = part.split_once(':').unwrap_or((part, ""));
            let duration = parse_q(dur).map_err(FlowError::Control)?;
            let mut value: Vec<Q> = vals
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| parse_q(s).map_err(FlowError::Control))
                .collect::<Result<_, _>>()?;
            if value.is_empty() {
                value = vec![Q::zero(); k];
            }
            pieces.push(Piece { duration, value });
        }
        Self::new(k, pieces)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn total_time(&self) -> Q {
        self.pieces.iter().map(|p| p.duration.clone()).sum()
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &PiecewiseControl) -> Result<Self, FlowError> {
        if self.k != other.k {
            return Err(FlowError::Control("concatenating controls of different width".into()));
        }
        let mut pieces = self.pieces.clone();
        pieces.extend(other.pieces.iter().cloned());
        Self::new(self.k, pieces)
    }

    /// `τ ↦ −v(T − τ)`: pieces in reverse order with negated values.
    pub fn reflected(&self) -> Self {
        let pieces = self
            .pieces
            .iter()
            .rev()
            .map(|p| Piece {
                duration: p.duration.clone(),
                value: p.value.iter().map(|x| -x).collect(),
            })
            .collect();
        PiecewiseControl { k: self.k, pieces }
    }

    /// `(1/λ)·v(t/λ)` on `[0, λT]`.
    pub fn rescaled(&self, lambda: &Q) -> Self {
        let inv = lambda.recip();
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece {
                duration: &p.duration * lambda,
                value: p.value.iter().map(|x| x * &inv).collect(),
            })
            .collect();
        PiecewiseControl { k: self.k, pieces }
    }
}

/// Endpoint of a flow and its logarithm.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowResult {
    pub endpoint: TruncSeries,
    pub logchart: TruncSeries,
}

fn field(k: usize, n: usize, value: &[Q]) -> Result<TruncSeries, FlowError> {
    let mut f = TruncSeries::letter(k, n, 0)?;
    for (i, c) in value.iter().enumerate() {
        f.add_term(Word::letter(i as u8 + 1), c.clone());
    }
    Ok(f)
}

/// `Π_pieces exp(d·(a0 + Σ u_i a_i))`, later pieces multiplied on the right.
pub fn flow_endpoint(u: &PiecewiseControl, n: usize) -> Result<FlowResult, FlowError> {
    let k = u.k;
    let mut x = TruncSeries::one(k, n);
    for p in &u.pieces {
        let step = field(k, n, &p.value)?.scale(&p.duration).exp_trunc()?;
        x = x.mul_trunc(&step)?;
    }
    let logchart = x.log_trunc()?;
    Ok(FlowResult {
        endpoint: x,
        logchart,
    })
}

/// `S^w_u(t) = ∫_{s_0 ≤ ⋯ ≤ s_{L−1}} Π_p u_{w[p]}(s_p)` with `u_0 ≡ 1`.
///
/// Uses Chen's relation across pieces: on a constant piece of length `d` the
/// iterated integral of a word of length `j` is `Π c · d^j / j!`.
pub fn chrono_coefficient(w: &Word, u: &PiecewiseControl) -> Result<Q, FlowError> {
    let letters = w.letters();
    if let Some(&l) = letters.iter().find(|&&l| l as usize > u.k) {
        return Err(FlowError::Control(format!(
            "letter a{l} outside the control width {}",
            u.k
        )));
    }
    let len = letters.len();
    // prefix[j] = S^{w[0..j]} over the pieces processed so far
    let mut prefix = vec![Q::zero(); len + 1];
    prefix[0] = Q::one();
    for p in &u.pieces {
        let rate = |l: u8| -> Q {
            if l == 0 {
                Q::one()
            } else {
                p.value[l as usize - 1].clone()
            }
        };
        let mut next = prefix.clone();
        for j in 1..=len {
            let mut prod = Q::one();
            for i in (0..j).rev() {
                prod *= rate(letters[i]) * &p.duration;
                let span = (j - i) as u32;
                next[j] += &prefix[i] * &prod / factorial_q(span);
            }
        }
        prefix = next;
    }
    Ok(prefix[len].clone())
}

/// `V = ∫_0^T Ad(p_s) a0 ds`, `p_s` the flow of `Σ v_i a_i` (no drift).
///
/// On a piece with field `a_c` starting at `P`, the contribution is
/// `Ad(P) Σ_j d^{j+1}/(j+1)! (ad a_c)^j a0`, which terminates in `A^n`.
pub fn averaged_drift(v: &PiecewiseControl, n: usize) -> Result<TruncSeries, FlowError> {
    let k = v.k;
    let a0 = TruncSeries::letter(k, n, 0)?;
    let mut start = TruncSeries::one(k, n);
    let mut total = TruncSeries::zero(k, n);
    for p in &v.pieces {
        let mut ac = TruncSeries::zero(k, n);
        for (i, c) in p.value.iter().enumerate() {
            ac.add_term(Word::letter(i as u8 + 1), c.clone());
        }
        let mut term = a0.clone();
        let mut local = TruncSeries::zero(k, n);
        for j in 0..n {
            if term.is_zero() {
                break;
            }
            let coeff = num_traits::Pow::pow(p.duration.clone(), j as u32 + 1) / factorial_q(j as u32 + 1);
            local = local.try_add(&term.scale(&coeff))?;
            term = ac.bracket(&term)?;
        }
        total = total.try_add(&TruncSeries::adjoint(&start, &local)?)?;
        start = start.mul_trunc(&ac.scale(&p.duration).exp_trunc()?)?;
    }
    Ok(total)
}

/// One row of the fast-oscillation table.
#[derive(Clone, Debug)]
pub struct OscRow {
    pub eps: Q,
    pub steps: u64,
    /// `max |log(one period) − εV|` and its per-degree maxima.
    pub single_error: Q,
    pub single_by_degree: Vec<Q>,
    /// `max |log(whole flow) − tV|` and its per-degree maxima.
    pub global_error: Q,
    pub global_by_degree: Vec<Q>,
}

#[derive(Clone, Debug)]
pub struct OscReport {
    pub k: usize,
    pub n: usize,
    pub t: Q,
    pub v_target: TruncSeries,
    pub rows: Vec<OscRow>,
    pub slope_single: Option<f64>,
    pub slope_global: Option<f64>,
    /// Single-step errors strictly decrease as ε decreases.
    pub monotone: bool,
}

/// The oscillating control with period `ε`: `(2/ε)v` on `[0, ε/2]`, then the
/// reflected profile on `[ε/2, ε]`.
pub fn oscillating_period(v: &PiecewiseControl, eps: &Q) -> Result<PiecewiseControl, FlowError> {
    let half = eps / Q::from_integer(2.into());
    let first = v.rescaled(&half);
    first.concat(&first.reflected())
}

/// Runs the experiment for every `ε`, in parallel. `v` must live on `[0,1]`
/// and `t/ε` must be an integer.
pub fn fast_osc_experiment(
    v: &PiecewiseControl,
    t: &Q,
    eps_list: &[Q],
    n: usize,
) -> Result<OscReport, FlowError> {
    if v.total_time() != Q::one() {
        return Err(FlowError::Config(format!(
            "the profile must have total duration 1 (got {})",
            fmt_q(&v.total_time())
        )));
    }
    if !t.is_positive() {
        return Err(FlowError::Config("t must be positive".into()));
    }
    for e in eps_list {
        if !e.is_positive() || !(t / e).is_integer() {
            return Err(FlowError::Config(format!(
                "ε = {} does not divide t = {}",
                fmt_q(e),
                fmt_q(t)
            )));
        }
    }
    let k = v.k;
    let v_target = averaged_drift(v, n)?;
    let mut rows: Vec<OscRow> = eps_list
        .par_iter()
        .map(|eps| -> Result<OscRow, FlowError> {
            let period = flow_endpoint(&oscillating_period(v, eps)?, n)?;
            let steps_q = t / eps;
            let steps: u64 = steps_q
                .to_integer()
                .try_into()
                .map_err(|_| FlowError::Config("too many periods".into()))?;
            let single = period.logchart.try_sub(&v_target.scale(eps))?;
            // the whole flow is a power of one period, so its log is exactly steps·log
            let total = power(&period.endpoint, steps)?;
            let global = total.log_trunc()?.try_sub(&v_target.scale(t))?;
            Ok(OscRow {
                eps: eps.clone(),
                steps,
                single_error: single.max_abs_coeff(),
                single_by_degree: by_degree(&single, n),
                global_error: global.max_abs_coeff(),
                global_by_degree: by_degree(&global, n),
            })
        })
        .collect::<Result<_, _>>()?;
    rows.sort_by(|a, b| b.eps.cmp(&a.eps));
    let slope_single = fit_slope(rows.iter().map(|r| (&r.eps, &r.single_error)));
    let slope_global = fit_slope(rows.iter().map(|r| (&r.eps, &r.global_error)));
    let monotone = rows.windows(2).all(|w| w[1].single_error < w[0].single_error);
    Ok(OscReport {
        k,
        n,
        t: t.clone(),
        v_target,
        rows,
        slope_single,
        slope_global,
        monotone,
    })
}

fn power(x: &TruncSeries, mut e: u64) -> Result<TruncSeries, FlowError> {
    let mut base = x.clone();
    let mut acc = TruncSeries::one(x.alphabet(), x.degree_bound());
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul_trunc(&base)?;
        }
        base = base.mul_trunc(&base)?;
        e >>= 1;
    }
    Ok(acc)
}

fn by_degree(x: &TruncSeries, n: usize) -> Vec<Q> {
    (1..=n).map(|d| x.component(d).max_abs_coeff()).collect()
}

/// Least-squares slope of `log err` against `log ε`; `None` if fewer than two
/// positive errors.
fn fit_slope<'a>(points: impl Iterator<Item = (&'a Q, &'a Q)>) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .filter(|(_, e)| e.is_positive())
        .map(|(x, e)| (to_f64(x).ln(), to_f64(e).ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

impl OscReport {
    pub fn to_json(&self) -> Value {
        json!({
            "schema": "goodbrackets/simulate/v1",
            "letters": self.k,
            "degree": self.n,
            "t": q_json(&self.t),
            "v_target": self.v_target.to_string(),
            "rows": self.rows.iter().map(|r| json!({
                "eps": q_json(&r.eps),
                "steps": r.steps,
                "single_error": q_json(&r.single_error),
                "single_by_degree": r.single_by_degree.iter().map(q_json).collect::<Vec<_>>(),
                "global_error": q_json(&r.global_error),
                "global_by_degree": r.global_by_degree.iter().map(q_json).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "slope_single": self.slope_single,
            "slope_global": self.slope_global,
            "monotone": self.monotone,
        })
    }

    /// CSV with header `eps,err_deg1..err_degn,slope_single,slope_global`;
    /// per-degree columns hold single-step errors.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eps");
        for d in 1..=self.n {
            out.push_str(&format!(",err_deg{d}"));
        }
        out.push_str(",slope_single,slope_global\n");
        let slope = |s: Option<f64>| s.map(|x| format!("{x:.6}")).unwrap_or_default();
        for r in &self.rows {
            out.push_str(&fmt_q(&r.eps));
            for e in &r.single_by_degree {
                out.push_str(&format!(",{}", fmt_q(e)));
            }
            out.push_str(&format!(",{},{}\n", slope(self.slope_single), slope(self.slope_global)));
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

    #[test]
    fn drift_only_and_empty() {
        let u = PiecewiseControl::constant(qi(3), vec![qi(0)]).unwrap();
        let r = flow_endpoint(&u, 3).unwrap();
        assert_eq!(r.endpoint, a(1, 3, 0).scale(&qi(3)).exp_trunc().unwrap());
        let empty = PiecewiseControl::new(1, vec![]).unwrap();
        assert_eq!(flow_endpoint(&empty, 3).unwrap().endpoint, TruncSeries::one(1, 3));
    }

    #[test]
    fn single_field_second_order() {
        let (c, t) = (qi(2), q(1, 3));
        let u = PiecewiseControl::constant(t.clone(), vec![c.clone()]).unwrap();
        let f = &a(1, 2, 0) + &a(1, 2, 1).scale(&c);
        let expected = &(&TruncSeries::one(1, 2) + &f.scale(&t)) + &(&f * &f).scale(&(&t * &t / qi(2)));
        assert_eq!(flow_endpoint(&u, 2).unwrap().endpoint, expected);
    }

    #[test]
    fn chrono_examples() {
        let (c, t) = (qi(3), q(1, 2));
        let u = PiecewiseControl::constant(t.clone(), vec![c.clone()]).unwrap();
        assert_eq!(chrono_coefficient(&Word::parse("a0").unwrap(), &u).unwrap(), t);
        assert_eq!(
            chrono_coefficient(&Word::parse("a1a1").unwrap(), &u).unwrap(),
            &c * &c * &t * &t / qi(2)
        );
        assert_eq!(
            chrono_coefficient(&Word::parse("a1a0").unwrap(), &u).unwrap(),
            &c * &t * &t / qi(2)
        );
        assert_eq!(chrono_coefficient(&Word::empty(), &u).unwrap(), qi(1));
    }

    #[test]
    fn two_pieces_order() {
        let u = PiecewiseControl::parse("1:1,0;2:0,1", 2).unwrap();
        let x = flow_endpoint(&u, 2).unwrap().endpoint;
        let w = Word::parse("a1a2").unwrap();
        assert_eq!(x.coeff(&w), qi(2));
        assert_eq!(chrono_coefficient(&w, &u).unwrap(), qi(2));
        assert_eq!(chrono_coefficient(&Word::parse("a2a1").unwrap(), &u).unwrap(), qi(0));
    }

    #[test]
    fn reflected_phase_cancels_drift_free_part() {
        let v = PiecewiseControl::parse("1/3:1,2;2/3:-1,1/2", 2).unwrap();
        let no_drift = oscillating_period(&v, &q(1, 4)).unwrap();
        // drop the drift by flowing only the control fields
        let mut x = TruncSeries::one(2, 4);
        for p in &no_drift.pieces {
            let mut f = TruncSeries::zero(2, 4);
            for (i, c) in p.value.iter().enumerate() {
                f.add_term(Word::letter(i as u8 + 1), c.clone());
            }
            x = &x * &f.scale(&p.duration).exp_trunc().unwrap();
        }
        assert_eq!(x, TruncSeries::one(2, 4));
    }

    #[test]
    fn averaged_drift_for_constant_profile() {
        let v = PiecewiseControl::constant(qi(1), vec![qi(1)]).unwrap();
        let vt = averaged_drift(&v, 3).unwrap();
        let (a0, a1) = (a(1, 3, 0), a(1, 3, 1));
        let e1 = a1.bracket(&a0).unwrap();
        let e2 = a1.bracket(&e1).unwrap();
        let expected = &(&a0 + &e1.scale(&q(1, 2))) + &e2.scale(&q(1, 6));
        assert_eq!(vt, expected);
    }

    #[test]
    fn zero_profile_has_zero_error() {
        let v = PiecewiseControl::constant(qi(1), vec![qi(0)]).unwrap();
        let r = fast_osc_experiment(&v, &qi(1), &[q(1, 2), q(1, 4)], 3).unwrap();
        assert!(r.rows.iter().all(|row| row.single_error.is_zero() && row.global_error.is_zero()));
        assert_eq!(r.slope_single, None);
    }

    #[test]
    fn rejects_bad_configuration() {
        let v = PiecewiseControl::constant(qi(1), vec![qi(1)]).unwrap();
        assert!(fast_osc_experiment(&v, &qi(1), &[q(2, 3)], 3).is_err());
        let long = PiecewiseControl::constant(qi(2), vec![qi(1)]).unwrap();
        assert!(fast_osc_experiment(&long, &qi(1), &[q(1, 2)], 3).is_err());
        assert!(PiecewiseControl::parse("0:1", 1).is_err());
        assert!(PiecewiseControl::parse("1:1,2", 1).is_err());
    }

    #[test]
    fn convergence_orders() {
        // the reflected period satisfies P(ε)⁻¹ = P(−ε), so log P is odd in ε:
        // exact at n = 3, local error O(ε³) and global error O(ε²) beyond
        let v = PiecewiseControl::constant(qi(1), vec![qi(1)]).unwrap();
        let eps = [q(1, 8), q(1, 16), q(1, 32)];
        let r = fast_osc_experiment(&v, &qi(1), &eps, 3).unwrap();
        assert!(r.rows.iter().all(|row| row.single_error.is_zero()));
        let r = fast_osc_experiment(&v, &qi(1), &eps, 4).unwrap();
        let s = r.slope_single.unwrap();
        assert!((s - 3.0).abs() < 1e-9, "single-step slope {s}");
        let g = r.slope_global.unwrap();
        assert!((g - 2.0).abs() < 1e-9, "global slope {g}");
        assert!(r.monotone);
        assert!(r.to_csv().starts_with("eps,err_deg1,err_deg2,err_deg3,err_deg4,slope_single,slope_global\n"));
    }

    #[test]
    fn odd_in_eps() {
        let v = PiecewiseControl::parse("1/2:1,-1;1/2:2,1/3", 2).unwrap();
        let period = oscillating_period(&v, &q(1, 4)).unwrap();
        let x = flow_endpoint(&period, 4).unwrap().endpoint;
        // same pieces with the drift reversed
        let mut back = TruncSeries::one(2, 4);
        for p in period.pieces() {
            let f = &a(2, 4, 0).scale(&qi(-1)) + &field(2, 4, &p.value).unwrap().try_sub(&a(2, 4, 0)).unwrap();
            back = &back * &f.scale(&p.duration).exp_trunc().unwrap();
        }
        assert_eq!(&x * &back, TruncSeries::one(2, 4));
    }
}
