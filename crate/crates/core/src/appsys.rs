//! Application generators: the scalar-control extension, the step-3
//! nilpotent extension, and the generalized Kalman test for
//! `ẋ = f(x) + u, u ∈ U`.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

use crate::linalg::rref;
use crate::rational::{factorial, factorial_q, fmt_q, parse_q, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AppError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("component {component} has degree {degree} > 2m-1 = {bound}")]
    DegreeTooHigh {
        component: usize,
        degree: u32,
        bound: u32,
    },
    #[error("invalid polynomial map: {0}")]
    Invalid(String),
}

/// One monomial `coefficient · x^exponents` of a [`PolyMap`] component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Monomial {
    pub exponents: Vec<u32>,
    #[serde(with = "crate::rational::serde_q")]
    pub coefficient: Q,
}

impl Monomial {
    pub fn degree(&self) -> u32 {
        self.exponents.iter().sum()
    }
}

/// A polynomial vector field `f: ℝⁿ → ℝⁿ` of degree at most `2m − 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMap {
    dim: usize,
    m: u32,
    components: Vec<Vec<Monomial>>,
}

#[derive(Deserialize)]
struct PolyMapWire {
    m: u32,
    components: Vec<Vec<Monomial>>,
}

impl PolyMap {
    pub fn new(m: u32, components: Vec<Vec<Monomial>>) -> Result<Self, AppError> {
        if m == 0 {
            return Err(AppError::Invalid("m must be positive".into()));
        }
        let dim = components.len();
        if dim == 0 {
            return Err(AppError::Invalid("at least one component is required".into()));
        }
        let bound = 2 * m - 1;
        for (c, comp) in components.iter().enumerate() {
            for mono in comp {
                if mono.exponents.len() != dim {
                    return Err(AppError::Dimension {
                        expected: dim,
                        got: mono.exponents.len(),
                    });
                }
                if mono.degree() > bound {
                    return Err(AppError::DegreeTooHigh {
                        component: c,
                        degree: mono.degree(),
                        bound,
                    });
                }
            }
        }
        Ok(PolyMap { dim, m, components })
    }

    /// `f(x) = A x` with `m = 1`.
    pub fn linear(a: &[Vec<Q>]) -> Result<Self, AppError> {
        let n = a.len();
        let components = a
            .iter()
            .map(|row| {
                if row.len() != n {
                    return Err(AppError::Dimension {
                        expected: n,
                        got: row.len(),
                    });
                }
                Ok(row
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(j, c)| {
                        let mut exponents = vec![0; n];
                        exponents[j] = 1;
                        Monomial {
                            exponents,
                            coefficient: c.clone(),
                        }
                    })
                    .collect())
            })
            .collect::<Result<Vec<_>, _>>()?;
        PolyMap::new(1, components)
    }

    /// Parses `{"m": .., "components": [[{"exponents": [..], "coefficient": "p/q"}, ..], ..]}`.
    pub fn from_json(v: &Value) -> Result<Self, AppError> {
        let wire: PolyMapWire =
            serde_json::from_value(v.clone()).map_err(|e| AppError::Invalid(e.to_string()))?;
        PolyMap::new(wire.m, wire.components)
    }

    pub fn to_json(&self) -> Value {
        json!({ "m": self.m, "components": self.components })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn components(&self) -> &[Vec<Monomial>] {
        &self.components
    }

    pub fn eval(&self, x: &[Q]) -> Result<Vec<Q>, AppError> {
        self.check_dim(x)?;
        Ok(self
            .components
            .iter()
            .map(|comp| comp.iter().map(|mono| eval_monomial(mono, x)).sum())
            .collect())
    }

    fn check_dim(&self, x: &[Q]) -> Result<(), AppError> {
        if x.len() != self.dim {
            return Err(AppError::Dimension {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    fn top_degree(&self) -> u32 {
        2 * self.m - 1
    }
}

fn eval_monomial(mono: &Monomial, x: &[Q]) -> Q {
    mono.exponents
        .iter()
        .zip(x)
        .fold(mono.coefficient.clone(), |acc, (&e, xi)| acc * pow_q(xi, e))
}

fn pow_q(x: &Q, e: u32) -> Q {
    (0..e).fold(Q::one(), |acc, _| acc * x)
}

/// `Φ(v) = d^{2m−1}/dτ^{2m−1} f(τv)|₀`, i.e. `(2m−1)!` times the top-degree
/// homogeneous part of `f` evaluated at `v`.
pub fn phi_map(f: &PolyMap, v: &[Q]) -> Result<Vec<Q>, AppError> {
    f.check_dim(v)?;
    let top = f.top_degree();
    let fact = factorial_q(top);
    Ok(f.components
        .iter()
        .map(|comp| {
            let s: Q = comp
                .iter()
                .filter(|mono| mono.degree() == top)
                .map(|mono| eval_monomial(mono, v))
                .sum();
            s * &fact
        })
        .collect())
}

/// A linear subspace of `ℚⁿ` stored by its reduced row echelon basis, so
/// equal subspaces compare equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vec<Q>>,
}

impl Subspace {
    pub fn span(ambient: usize, vectors: &[Vec<Q>]) -> Result<Self, AppError> {
        for v in vectors {
            if v.len() != ambient {
                return Err(AppError::Dimension {
                    expected: ambient,
                    got: v.len(),
                });
            }
        }
        Ok(Subspace {
            ambient,
            basis: rref(vectors),
        })
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace {
            ambient,
            basis: Vec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        let basis = (0..ambient).map(|i| unit(ambient, i)).collect();
        Subspace { ambient, basis }
    }

    /// Span of the coordinate vectors `e_i` for the given indices.
    pub fn coordinate(ambient: usize, indices: &[usize]) -> Result<Self, AppError> {
        if let Some(&i) = indices.iter().find(|&&i| i >= ambient) {
            return Err(AppError::Dimension {
                expected: ambient,
                got: i + 1,
            });
        }
        let vs: Vec<Vec<Q>> = indices.iter().map(|&i| unit(ambient, i)).collect();
        Subspace::span(ambient, &vs)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Q>] {
        &self.basis
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    pub fn contains(&self, v: &[Q]) -> bool {
        let mut rows = self.basis.clone();
        rows.push(v.to_vec());
        rref(&rows).len() == self.dim()
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, vectors: &[Vec<Q>]) -> Result<Subspace, AppError> {
        let mut rows = self.basis.clone();
        rows.extend(vectors.iter().cloned());
        Subspace::span(self.ambient, &rows)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "ambient": self.ambient,
            "dim": self.dim(),
            "basis": self
                .basis
                .iter()
                .map(|v| v.iter().map(fmt_q).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .basis
            .iter()
            .map(|v| {
                let xs: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                format!("({})", xs.join(", "))
            })
            .collect();
        write!(f, "span{{{}}}", rows.join(", "))
    }
}

fn unit(n: usize, i: usize) -> Vec<Q> {
    let mut v = vec![Q::zero(); n];
    v[i] = Q::one();
    v
}

/// All vector coefficients of the `λ`-monomials in `Φ(Σ λ_i b_i)`.
///
/// Each component of the top-degree part is expanded as a polynomial in the
/// `λ_i`. The span of these coefficient vectors is the span of `Φ(V)`: a
/// polynomial map's image spans the same space as its coefficients, since
/// evaluation at enough generic points inverts a Vandermonde system.
pub fn phi_image_generators(f: &PolyMap, v: &Subspace) -> Result<Vec<Vec<Q>>, AppError> {
    if v.ambient() != f.dim() {
        return Err(AppError::Dimension {
            expected: f.dim(),
            got: v.ambient(),
        });
    }
    let top = f.top_degree();
    let r = v.dim();
    let fact = Q::from_integer(factorial(top));
    // x_j = Σ_i λ_i b_i[j] as a linear polynomial in λ.
    let coords: Vec<LambdaPoly> = (0..f.dim())
        .map(|j| {
            let mut p = LambdaPoly::new();
            for (i, b) in v.basis().iter().enumerate() {
                if !b[j].is_zero() {
                    let mut e = vec![0u32; r];
                    e[i] = 1;
                    p.insert(e, b[j].clone());
                }
            }
            p
        })
        .collect();
    let mut collected: BTreeMap<Vec<u32>, Vec<Q>> = BTreeMap::new();
    for (c, comp) in f.components.iter().enumerate() {
        let mut total = LambdaPoly::new();
        for mono in comp.iter().filter(|m| m.degree() == top) {
            let mut p: LambdaPoly = BTreeMap::from([(vec![0u32; r], mono.coefficient.clone())]);
            for (j, &e) in mono.exponents.iter().enumerate() {
                for _ in 0..e {
                    p = lambda_mul(&p, &coords[j]);
                }
            }
            for (k, x) in p {
                *total.entry(k).or_insert_with(Q::zero) += x;
            }
        }
        for (k, x) in total {
            if !x.is_zero() {
                collected
                    .entry(k)
                    .or_insert_with(|| vec![Q::zero(); f.dim()])[c] = x * &fact;
            }
        }
    }
    Ok(collected.into_values().collect())
}

type LambdaPoly = BTreeMap<Vec<u32>, Q>;

fn lambda_mul(a: &LambdaPoly, b: &LambdaPoly) -> LambdaPoly {
    let mut out = LambdaPoly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            *out.entry(e).or_insert_with(Q::zero) += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// The chain `V_1 = U`, `V_{j+1} = span Φ(V_j) + V_j` for `j < n`. The last
/// entry `V_n` is the admissible control subspace of the compatible system
/// `ẋ = f(x) + v, v ∈ V_n`.
pub fn kalman_subspaces(f: &PolyMap, u: &Subspace) -> Result<Vec<Subspace>, AppError> {
    let n = f.dim();
    if u.ambient() != n {
        return Err(AppError::Dimension {
            expected: n,
            got: u.ambient(),
        });
    }
    let mut chain = vec![u.clone()];
    for _ in 1..n {
        let last = chain.last().expect("chain is nonempty");
        let next = if last.is_full() {
            last.clone()
        } else {
            last.sum(&phi_image_generators(f, last)?)?
        };
        chain.push(next);
    }
    Ok(chain)
}

/// One control vector field of an extended system: `coefficient · control · expr`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FieldDescriptor {
    pub control: String,
    #[serde(with = "crate::rational::serde_q")]
    pub coefficient: Q,
    /// The field as an expression in the letters `a0..ak` (parser syntax).
    pub expr: String,
    /// The field in the system's own notation.
    pub display: String,
}

/// Positive semidefiniteness of a symmetric matrix of control symbols.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstraintSpec {
    pub matrix: Vec<Vec<String>>,
    /// Symbols pinned to a value (e.g. `u_{00} = 1`).
    pub fixed: Vec<(String, String)>,
    pub description: String,
}

/// A compatible extended system template: symbolic fields, the convexity
/// constraint on the constrained controls, and the free controls.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtendedSystemSpec {
    pub kind: String,
    pub parameter: usize,
    pub drift: String,
    pub fields: Vec<FieldDescriptor>,
    pub constraint: ConstraintSpec,
    pub free_controls: Vec<String>,
}

impl ExtendedSystemSpec {
    pub fn control_count(&self) -> usize {
        self.fields.len()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": "goodbrackets/extend/v1",
            "kind": self.kind,
            "parameter": self.parameter,
            "drift": self.drift,
            "control_count": self.control_count(),
            "fields": self.fields.iter().map(|f| json!({
                "control": f.control,
                "coefficient": fmt_q(&f.coefficient),
                "expr": f.expr,
                "display": f.display,
            })).collect::<Vec<_>>(),
            "constraint": {
                "matrix": self.constraint.matrix,
                "fixed": self.constraint.fixed.iter().map(|(s, v)| json!({"symbol": s, "value": v})).collect::<Vec<_>>(),
                "description": self.constraint.description,
            },
            "free_controls": self.free_controls,
        })
    }
}

fn sym(base: &str, idx: &[usize]) -> String {
    let sep = if idx.iter().any(|&i| i >= 10) { "," } else { "" };
    let parts: Vec<String> = idx.iter().map(|i| i.to_string()).collect();
    format!("{base}_{{{}}}", parts.join(sep))
}

/// Symbol for the `(i, j)` entry of the step-3 constraint matrix, using the
/// conventions `u_{i0}` for the first row and `u_{ij}` with `i < j` elsewhere.
pub fn step3_matrix_symbol(i: usize, j: usize) -> String {
    let (lo, hi) = (i.min(j), i.max(j));
    match (lo, hi) {
        (0, 0) => "1".into(),
        (0, h) => sym("u", &[h, 0]),
        (l, h) => sym("u", &[l, h]),
    }
}

fn a(i: usize) -> String {
    format!("a{i}")
}

fn br(x: &str, y: &str) -> String {
    format!("[{x},{y}]")
}

fn fl(i: usize) -> String {
    format!("f_{i}")
}

/// The compatible extension of a system whose fields generate a step-3
/// nilpotent Lie algebra, with `k(k+1)(2k+7)/6` controls.
pub fn step3_extension(k: usize) -> ExtendedSystemSpec {
    let mut fields = Vec::new();
    let mut free = Vec::new();
    let mut push = |control: String, coefficient: Q, expr: String, display: String, is_free: bool| {
        if is_free {
            free.push(control.clone());
        }
        fields.push(FieldDescriptor {
            control,
            coefficient,
            expr,
            display,
        });
    };
    let half = Q::new(1.into(), 2.into());
    for i in 1..=k {
        push(sym("u", &[i]), Q::one(), a(i), fl(i), true);
        push(
            sym("u", &[i, 0]),
            Q::one(),
            br(&a(i), &a(0)),
            br(&fl(i), &fl(0)),
            false,
        );
        push(
            sym("u", &[i, i]),
            half.clone(),
            br(&a(i), &br(&a(i), &a(0))),
            br(&fl(i), &br(&fl(i), &fl(0))),
            false,
        );
    }
    for i in 1..=k {
        for j in i + 1..=k {
            push(
                sym("u", &[i, j]),
                Q::one(),
                br(&a(i), &br(&a(j), &a(0))),
                br(&fl(i), &br(&fl(j), &fl(0))),
                false,
            );
            push(
                sym("v", &[i, j]),
                Q::one(),
                br(&br(&a(i), &a(j)), &a(0)),
                br(&br(&fl(i), &fl(j)), &fl(0)),
                true,
            );
            push(
                sym("w", &[i, j]),
                Q::one(),
                br(&a(i), &a(j)),
                br(&fl(i), &fl(j)),
                true,
            );
        }
    }
    for i in 1..=k {
        for j in i + 1..=k {
            for iota in i..=k {
                push(
                    sym("w", &[i, j, iota]),
                    Q::one(),
                    br(&br(&a(i), &a(j)), &a(iota)),
                    br(&br(&fl(i), &fl(j)), &fl(iota)),
                    true,
                );
            }
        }
    }
    let matrix = (0..=k)
        .map(|i| (0..=k).map(|j| step3_matrix_symbol(i, j)).collect())
        .collect();
    ExtendedSystemSpec {
        kind: "step3".into(),
        parameter: k,
        drift: a(0),
        fields,
        constraint: ConstraintSpec {
            matrix,
            fixed: vec![(sym("u", &[0, 0]), "1/1".into())],
            description: "sum_{i,j=0..k} u_{ij} xi_i xi_j >= 0 with u_{00} = 1 and u_{ij} = u_{ji}".into(),
        },
        free_controls: free,
    }
}

/// Closed-form control count of [`step3_extension`].
pub fn step3_control_count(k: usize) -> usize {
    k * (k + 1) * (2 * k + 7) / 6
}

/// The compatible extension of `ẋ = u, ẏ = ψ(x, y)` with `ψ` of degree `m`
/// in `x`. With `f0 = ψ∂_y` and `f1 = ∂_x`, the field `∂^iψ/∂x^i` is
/// `(ad f1)^i f0`.
pub fn scalar_extension(m: usize) -> ExtendedSystemSpec {
    let fields = (0..=m)
        .map(|i| {
            let expr = match i {
                0 => a(0),
                _ => format!("ad(a1)^{i}(a0)"),
            };
            let display = match i {
                0 => "psi".to_string(),
                1 => "dpsi/dx".to_string(),
                _ => format!("d^{i}psi/dx^{i}"),
            };
            FieldDescriptor {
                control: sym("u", &[i]),
                coefficient: factorial_q(i as u32).recip(),
                expr,
                display,
            }
        })
        .collect();
    let h = m / 2;
    let entry = |s: usize| if s == 0 { "1".to_string() } else { sym("u", &[s]) };
    let matrix = (0..=h)
        .map(|i| (0..=h).map(|j| entry(i + j)).collect())
        .collect();
    let mut free_controls = vec!["u".to_string()];
    free_controls.extend((2 * h + 1..=m).map(|i| sym("u", &[i])));
    ExtendedSystemSpec {
        kind: "scalar".into(),
        parameter: m,
        drift: "0".into(),
        fields,
        constraint: ConstraintSpec {
            matrix,
            fixed: vec![(sym("u", &[0]), "1/1".into())],
            description: "sum_{0<=i,j<=m/2} u_{i+j} xi_i xi_j >= 0 with u_0 = 1".into(),
        },
        free_controls,
    }
}

/// Parses a rational vector given as strings.
pub fn parse_vector(xs: &[String]) -> Result<Vec<Q>, AppError> {
    xs.iter()
        .map(|s| parse_q(s).map_err(AppError::Invalid))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qi;

    fn mono(exponents: &[u32], c: i64) -> Monomial {
        Monomial {
            exponents: exponents.to_vec(),
            coefficient: qi(c),
        }
    }

    fn cubic() -> PolyMap {
        PolyMap::new(2, vec![vec![mono(&[0, 1], 1)], vec![mono(&[3, 0], 1)]]).unwrap()
    }

    #[test]
    fn phi_examples() {
        let a = vec![vec![qi(1), qi(2)], vec![qi(3), qi(4)]];
        let f = PolyMap::linear(&a).unwrap();
        assert_eq!(phi_map(&f, &[qi(1), qi(-1)]).unwrap(), vec![qi(-1), qi(-1)]);
        assert_eq!(phi_map(&cubic(), &[qi(1), qi(0)]).unwrap(), vec![qi(0), qi(6)]);
        let low = PolyMap::new(2, vec![vec![mono(&[1, 0], 5)], vec![]]).unwrap();
        assert_eq!(phi_map(&low, &[qi(3), qi(7)]).unwrap(), vec![qi(0), qi(0)]);
        assert!(matches!(phi_map(&low, &[qi(1)]), Err(AppError::Dimension { .. })));
    }

    #[test]
    fn rejects_high_degree() {
        let r = PolyMap::new(1, vec![vec![mono(&[2], 1)]]);
        assert!(matches!(r, Err(AppError::DegreeTooHigh { .. })));
    }

    #[test]
    fn kalman_examples() {
        let e1 = Subspace::coordinate(2, &[0]).unwrap();
        let shift = PolyMap::new(1, vec![vec![], vec![mono(&[1, 0], 1)]]).unwrap();
        assert!(kalman_subspaces(&shift, &e1).unwrap()[1].is_full());
        let id = PolyMap::linear(&[vec![qi(1), qi(0)], vec![qi(0), qi(1)]]).unwrap();
        let chain = kalman_subspaces(&id, &e1).unwrap();
        assert_eq!(chain.last().unwrap(), &e1);
        assert!(kalman_subspaces(&cubic(), &e1).unwrap()[1].is_full());
    }

    #[test]
    fn cubic_image_needs_all_monomials() {
        // Φ(λ1 e1 + λ2 e2) for f = (x1 x2², x1³) spans ℝ², while Φ(e1), Φ(e2)
        // alone give only (0,6) and 0.
        let f = PolyMap::new(2, vec![vec![mono(&[1, 2], 1)], vec![mono(&[3, 0], 1)]]).unwrap();
        let gens = phi_image_generators(&f, &Subspace::full(2)).unwrap();
        assert!(Subspace::span(2, &gens).unwrap().is_full());
    }

    #[test]
    fn polymap_json_roundtrip() {
        let f = cubic();
        assert_eq!(PolyMap::from_json(&f.to_json()).unwrap(), f);
        let v = json!({"m": 1, "components": [[{"exponents": [1], "coefficient": "2"}]]});
        assert_eq!(PolyMap::from_json(&v).unwrap().dim(), 1);
    }

    #[test]
    fn subspace_is_canonical() {
        let a = Subspace::span(3, &[vec![qi(1), qi(1), qi(0)], vec![qi(0), qi(1), qi(0)]]).unwrap();
        let b = Subspace::coordinate(3, &[1, 0]).unwrap();
        assert_eq!(a, b);
        assert!(a.contains(&[qi(2), qi(-3), qi(0)]));
        assert!(!a.contains(&[qi(0), qi(0), qi(1)]));
    }

    #[test]
    fn step3_counts() {
        let expected = [3, 11, 26, 50, 85, 133];
        for (k, &c) in (1..=6).zip(expected.iter()) {
            assert_eq!(step3_extension(k).control_count(), c);
            assert_eq!(step3_control_count(k), c);
        }
        let s = step3_extension(2);
        assert_eq!(s.constraint.matrix[0], vec!["1", "u_{10}", "u_{20}"]);
        assert_eq!(s.constraint.matrix[2][1], "u_{12}");
    }

    #[test]
    fn scalar_examples() {
        let s2 = scalar_extension(2);
        assert_eq!(s2.control_count(), 3);
        assert_eq!(s2.constraint.matrix, vec![vec!["1", "u_{1}"], vec!["u_{1}", "u_{2}"]]);
        let s1 = scalar_extension(1);
        assert_eq!(s1.constraint.matrix, vec![vec!["1"]]);
        assert!(s1.free_controls.contains(&"u_{1}".to_string()));
        let s4 = scalar_extension(4);
        assert_eq!(s4.control_count(), 5);
        assert_eq!(s4.constraint.matrix[2], vec!["u_{2}", "u_{3}", "u_{4}"]);
    }
}
