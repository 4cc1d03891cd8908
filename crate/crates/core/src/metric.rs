//! Riemannian metrics on the chart and the operators they induce.
//!
//! A [`MetricField`] is a symmetric 3×3 matrix of symbolic entries,
//! positive definite on the verification domain. It induces the Hodge
//! star, the musical isomorphisms between 1-forms and vector fields, the
//! Riemannian volume form, and conformal rescalings. Everything is
//! composed symbolically — the 3×3 inverse goes through the adjugate and
//! determinant in closed form — and only evaluated numerically at sample
//! points, so identities like `∗∘∗ = Id` hold to rounding error.
//!
//! Positive definiteness is audited on samples (leading principal
//! minors), never proven; [`MetricField::audit`] also estimates the
//! condition number and flags badly conditioned metrics.

use crate::chart::{Point, SampleSet};
use crate::expr::{EvalCache, EvalError, Expression};
use crate::forms::{FormError, KForm};
use crate::scalar::Scalar;

/// Condition-number estimate above which [`MetricField::audit`] sets the
/// warning flag.
pub const CONDITION_WARN_THRESHOLD: f64 = 1e12;

/// Errors from metric-dependent operations.
#[derive(Debug, Clone, thiserror::Error)]
pub enum MetricError<T: Scalar> {
    #[error("metric fails the SPD check at {point}: leading principal minor {minor} = {value}")]
    NotSpd { point: Point<T>, minor: usize, value: T },
    #[error("conformal factor must be strictly positive on the domain: value {value} at {point}")]
    NonPositiveScale { point: Point<T>, value: T },
    #[error("metric evaluation failed: {0}")]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Form(#[from] FormError),
}

/// Result of sampling-based SPD auditing.
#[derive(Debug, Clone, Copy)]
pub struct SpdAudit<T> {
    /// Smallest determinant seen over the samples.
    pub min_det: T,
    /// Largest Frobenius-based condition estimate `‖g‖_F · ‖g⁻¹‖_F`.
    pub max_condition_estimate: T,
    /// Set when the estimate exceeds [`CONDITION_WARN_THRESHOLD`].
    pub condition_warning: bool,
}

/// Vector field in the coordinate frame.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField<T> {
    components: [Expression<T>; 3],
}

impl<T: Scalar> VectorField<T> {
    pub fn new(components: [Expression<T>; 3]) -> Self {
        VectorField { components }
    }

    pub fn components(&self) -> &[Expression<T>; 3] {
        &self.components
    }

    pub fn evaluate(&self, p: &Point<T>) -> Result<[T; 3], EvalError> {
        let mut cache = EvalCache::new();
        Ok([
            self.components[0].evaluate_cached(p, &mut cache)?,
            self.components[1].evaluate_cached(p, &mut cache)?,
            self.components[2].evaluate_cached(p, &mut cache)?,
        ])
    }
}

/// Symmetric 3×3 metric with symbolic entries; orientation is globally
/// fixed as `dx∧dy∧dz > 0`.
///
/// Only the upper triangle is stored, so `g_ij = g_ji` holds structurally.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricField<T> {
    // g11, g12, g13, g22, g23, g33
    upper: [Expression<T>; 6],
}

/// Position of entry `(i, j)` (with `i ≤ j`) in the upper-triangle store.
fn upper_index(i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    match (i, j) {
        (0, 0) => 0,
        (0, 1) => 1,
        (0, 2) => 2,
        (1, 1) => 3,
        (1, 2) => 4,
        (2, 2) => 5,
        _ => unreachable!("indices within 0..3"),
    }
}

impl<T: Scalar> MetricField<T> {
    /// Metric from upper-triangle entries `[g11, g12, g13, g22, g23, g33]`.
    pub fn from_upper_triangle(upper: [Expression<T>; 6]) -> Self {
        MetricField { upper }
    }

    /// The Euclidean metric of the chart.
    pub fn euclidean() -> Self {
        let zero = || Expression::constant(T::zero());
        let one = || Expression::constant(T::one());
        MetricField {
            upper: [one(), zero(), zero(), one(), zero(), one()],
        }
    }

    /// Diagonal metric `diag(d1, d2, d3)`.
    pub fn diagonal(d1: Expression<T>, d2: Expression<T>, d3: Expression<T>) -> Self {
        let zero = || Expression::constant(T::zero());
        MetricField {
            upper: [d1, zero(), zero(), d2, zero(), d3],
        }
    }

    /// Entry `g_ij` (cheap clone of the shared subtree).
    pub fn entry(&self, i: usize, j: usize) -> Expression<T> {
        self.upper[upper_index(i, j)].clone()
    }

    /// Upper-triangle entries in order `[g11, g12, g13, g22, g23, g33]`.
    pub fn upper_triangle(&self) -> &[Expression<T>; 6] {
        &self.upper
    }

    /// Determinant in closed form.
    pub fn determinant(&self) -> Expression<T> {
        let [a, b, c, d, e, f] = self.upper.clone();
        let m0 = Expression::sub(
            Expression::mul(d.clone(), f.clone()),
            Expression::powi(e.clone(), 2),
        );
        let m1 = Expression::sub(
            Expression::mul(b.clone(), f),
            Expression::mul(c.clone(), e.clone()),
        );
        let m2 = Expression::sub(Expression::mul(b.clone(), e), Expression::mul(c.clone(), d));
        Expression::add(
            Expression::sub(Expression::mul(a, m0), Expression::mul(b, m1)),
            Expression::mul(c, m2),
        )
    }

    /// `√(det g)`, the density of the volume form.
    pub fn sqrt_det(&self) -> Expression<T> {
        Expression::sqrt(self.determinant())
    }

    /// Adjugate matrix (symmetric, upper triangle in entry order).
    fn adjugate_upper(&self) -> [Expression<T>; 6] {
        let [a, b, c, d, e, f] = self.upper.clone();
        let mul = Expression::mul;
        let sub = Expression::sub;
        [
            // df − e²
            sub(mul(d.clone(), f.clone()), Expression::powi(e.clone(), 2)),
            // ce − bf
            sub(mul(c.clone(), e.clone()), mul(b.clone(), f.clone())),
            // be − cd
            sub(mul(b.clone(), e.clone()), mul(c.clone(), d.clone())),
            // af − c²
            sub(mul(a.clone(), f), Expression::powi(c.clone(), 2)),
            // bc − ae
            sub(mul(b.clone(), c), mul(a.clone(), e)),
            // ad − b²
            sub(mul(a, d), Expression::powi(b, 2)),
        ]
    }

    /// Inverse entries `g^{ij} = adj_ij / det` with the determinant shared
    /// across all nine entries.
    pub fn inverse_entries(&self) -> [[Expression<T>; 3]; 3] {
        let det = self.determinant();
        let adj = self.adjugate_upper();
        let inv = |i: usize, j: usize| {
            Expression::div(adj[upper_index(i, j)].clone(), det.clone())
        };
        [
            [inv(0, 0), inv(0, 1), inv(0, 2)],
            [inv(1, 0), inv(1, 1), inv(1, 2)],
            [inv(2, 0), inv(2, 1), inv(2, 2)],
        ]
    }

    /// Numeric metric matrix at a point.
    pub fn evaluate(&self, p: &Point<T>) -> Result<[[T; 3]; 3], EvalError> {
        let mut cache = EvalCache::new();
        self.evaluate_cached(p, &mut cache)
    }

    /// Numeric metric matrix at a point, reusing a per-point memo table.
    pub fn evaluate_cached(
        &self,
        p: &Point<T>,
        cache: &mut EvalCache<T>,
    ) -> Result<[[T; 3]; 3], EvalError> {
        let mut m = [[T::zero(); 3]; 3];
        for i in 0..3 {
            for j in i..3 {
                let v = self.upper[upper_index(i, j)].evaluate_cached(p, cache)?;
                m[i][j] = v;
                m[j][i] = v;
            }
        }
        Ok(m)
    }

    /// Hodge star by the coordinate index formula
    /// `∗(dx^{i1}∧…∧dx^{ip}) = √|g| g^{i1 l1}…g^{ip lp} ε_{l1…l3} dx^{l(p+1)}∧…∧dx^{l3}`
    /// applied slotwise to the canonical basis. Degree `p` maps to `3−p`.
    ///
    /// The sum runs over permutation classes with increasing trailing
    /// indices; each class occurs `(3−p)!` times with identical value,
    /// which absorbs the factorial in the usual normalisation.
    pub fn hodge(&self, w: &KForm<T>) -> KForm<T> {
        let p = w.degree() as usize;
        let sqrt_det = self.sqrt_det();
        let inv = self.inverse_entries();
        let out_degree = (3 - p) as u8;
        let out_len = [1usize, 3, 3, 1][out_degree as usize];
        let mut out: Vec<Expression<T>> =
            (0..out_len).map(|_| Expression::constant(T::zero())).collect();

        for (k, idx) in basis_indices(p).iter().enumerate() {
            let wk = &w.coeffs()[k];
            for (perm, parity) in PERMS {
                let trailing = &perm[p..];
                if !is_increasing(trailing) {
                    continue;
                }
                let (slot, orient) = canonical_slot(trailing);
                let mut factor = sqrt_det.clone();
                for (m, &i_m) in idx.iter().enumerate() {
                    factor = Expression::mul(factor, inv[i_m][perm[m]].clone());
                }
                let mut term = Expression::mul(wk.clone(), factor);
                if parity * orient < 0 {
                    term = Expression::neg(term);
                }
                out[slot] = Expression::add(out[slot].clone(), term);
            }
        }
        KForm::new(out_degree, out).expect("output degree and slot count are consistent")
    }

    /// Musical isomorphism raising an index: `X^i = g^{ij} a_j`.
    pub fn sharp(&self, a: &KForm<T>) -> Result<VectorField<T>, FormError> {
        a.expect_degree(1)?;
        let inv = self.inverse_entries();
        let comp = |i: usize| {
            let mut acc = Expression::constant(T::zero());
            for j in 0..3 {
                acc = Expression::add(
                    acc,
                    Expression::mul(inv[i][j].clone(), a.coeffs()[j].clone()),
                );
            }
            acc
        };
        Ok(VectorField::new([comp(0), comp(1), comp(2)]))
    }

    /// Musical isomorphism lowering an index: `a_i = g_ij X^j`.
    pub fn flat(&self, x: &VectorField<T>) -> KForm<T> {
        let comp = |i: usize| {
            let mut acc = Expression::constant(T::zero());
            for j in 0..3 {
                acc = Expression::add(
                    acc,
                    Expression::mul(self.entry(i, j), x.components()[j].clone()),
                );
            }
            acc
        };
        KForm::one_form(comp(0), comp(1), comp(2))
    }

    /// Riemannian volume form `√(det g) dx∧dy∧dz`.
    pub fn volume_form(&self) -> KForm<T> {
        KForm::three_form(self.sqrt_det())
    }

    /// Pointwise inner product of two 1-forms: `g(a♯, b♯) = g^{ij} a_i b_j`.
    pub fn one_form_inner(&self, a: &KForm<T>, b: &KForm<T>) -> Result<Expression<T>, FormError> {
        a.expect_degree(1)?;
        b.expect_degree(1)?;
        let inv = self.inverse_entries();
        let mut acc = Expression::constant(T::zero());
        for i in 0..3 {
            for j in 0..3 {
                acc = Expression::add(
                    acc,
                    Expression::mul(
                        inv[i][j].clone(),
                        Expression::mul(a.coeffs()[i].clone(), b.coeffs()[j].clone()),
                    ),
                );
            }
        }
        Ok(acc)
    }

    /// Conformal rescaling `g̃ = μ g` for a factor audited strictly
    /// positive on the samples. On 1-forms the induced star satisfies
    /// `∗̃ = √μ ∗`.
    pub fn conformal_rescale(
        &self,
        mu: &Expression<T>,
        samples: &SampleSet<T>,
    ) -> Result<MetricField<T>, MetricError<T>> {
        for p in samples.points() {
            let v = mu.evaluate(p)?;
            if !(v > T::zero()) || !v.is_finite() {
                return Err(MetricError::NonPositiveScale { point: *p, value: v });
            }
        }
        let upper = [
            Expression::mul(mu.clone(), self.upper[0].clone()),
            Expression::mul(mu.clone(), self.upper[1].clone()),
            Expression::mul(mu.clone(), self.upper[2].clone()),
            Expression::mul(mu.clone(), self.upper[3].clone()),
            Expression::mul(mu.clone(), self.upper[4].clone()),
            Expression::mul(mu.clone(), self.upper[5].clone()),
        ];
        Ok(MetricField { upper })
    }

    /// Samples the leading principal minors at every point. Errors on the
    /// first SPD violation; otherwise reports the worst determinant and a
    /// Frobenius condition estimate.
    pub fn audit(&self, samples: &SampleSet<T>) -> Result<SpdAudit<T>, MetricError<T>> {
        let mut min_det = T::infinity();
        let mut max_cond = T::zero();
        for p in samples.points() {
            let m = self.evaluate(p)?;
            let m1 = m[0][0];
            let m2 = m[0][0] * m[1][1] - m[0][1] * m[0][1];
            let m3 = det3(&m);
            for (k, v) in [(1usize, m1), (2, m2), (3, m3)] {
                if !(v > T::zero()) || !v.is_finite() {
                    return Err(MetricError::NotSpd { point: *p, minor: k, value: v });
                }
            }
            min_det = min_det.min(m3);
            let inv = inverse3(&m, m3);
            let cond = frobenius(&m) * frobenius(&inv);
            max_cond = max_cond.max(cond);
        }
        Ok(SpdAudit {
            min_det,
            max_condition_estimate: max_cond,
            condition_warning: max_cond > T::from_f64_lossy(CONDITION_WARN_THRESHOLD),
        })
    }
}

/// Numeric 3×3 determinant.
pub(crate) fn det3<T: Scalar>(m: &[[T; 3]; 3]) -> T {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Numeric 3×3 inverse given a nonzero determinant.
pub(crate) fn inverse3<T: Scalar>(m: &[[T; 3]; 3], det: T) -> [[T; 3]; 3] {
    let adj = |r1: usize, c1: usize, r2: usize, c2: usize| m[r1][c1] * m[r2][c2] - m[r1][c2] * m[r2][c1];
    let mut inv = [[T::zero(); 3]; 3];
    inv[0][0] = adj(1, 1, 2, 2) / det;
    inv[0][1] = -adj(0, 1, 2, 2) / det;
    inv[0][2] = adj(0, 1, 1, 2) / det;
    inv[1][0] = -adj(1, 0, 2, 2) / det;
    inv[1][1] = adj(0, 0, 2, 2) / det;
    inv[1][2] = -adj(0, 0, 1, 2) / det;
    inv[2][0] = adj(1, 0, 2, 1) / det;
    inv[2][1] = -adj(0, 0, 2, 1) / det;
    inv[2][2] = adj(0, 0, 1, 1) / det;
    inv
}

fn frobenius<T: Scalar>(m: &[[T; 3]; 3]) -> T {
    let mut acc = T::zero();
    for row in m {
        for &v in row {
            acc = acc + v * v;
        }
    }
    acc.sqrt()
}

/// All permutations of `(0, 1, 2)` with parity.
const PERMS: [([usize; 3], i8); 6] = [
    ([0, 1, 2], 1),
    ([1, 2, 0], 1),
    ([2, 0, 1], 1),
    ([0, 2, 1], -1),
    ([2, 1, 0], -1),
    ([1, 0, 2], -1),
];

/// Canonical basis index tuples per degree (0-based coordinates).
fn basis_indices(degree: usize) -> &'static [&'static [usize]] {
    const D0: [&[usize]; 1] = [&[]];
    const D1: [&[usize]; 3] = [&[0], &[1], &[2]];
    const D2: [&[usize]; 3] = [&[1, 2], &[2, 0], &[0, 1]];
    const D3: [&[usize]; 1] = [&[0, 1, 2]];
    match degree {
        0 => &D0,
        1 => &D1,
        2 => &D2,
        3 => &D3,
        _ => unreachable!("degrees are 0..=3"),
    }
}

fn is_increasing(idx: &[usize]) -> bool {
    idx.windows(2).all(|w| w[0] < w[1])
}

/// Maps an ordered tuple of distinct coordinate indices to its canonical
/// basis slot and orientation sign.
fn canonical_slot(idx: &[usize]) -> (usize, i8) {
    match idx {
        [] => (0, 1),
        [i] => (*i, 1),
        [1, 2] => (0, 1),
        [2, 1] => (0, -1),
        [2, 0] => (1, 1),
        [0, 2] => (1, -1),
        [0, 1] => (2, 1),
        [1, 0] => (2, -1),
        [a, b, c] => {
            let parity = PERMS
                .iter()
                .find(|(p, _)| p == &[*a, *b, *c])
                .map(|(_, s)| *s)
                .expect("distinct indices form a permutation");
            (0, parity)
        }
        _ => unreachable!("tuples have length 0..=3 with distinct entries"),
    }
}
