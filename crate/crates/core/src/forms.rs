//! Graded exterior algebra on the 3-dimensional chart.
//!
//! A [`KForm`] of degree `k` holds symbolic coefficients in a fixed
//! canonical basis:
//!
//! * degree 0: `[c]`
//! * degree 1: `[a1, a2, a3]` for `a1 dx + a2 dy + a3 dz`
//! * degree 2: `[b1, b2, b3]` for `b1 dy∧dz + b2 dz∧dx + b3 dx∧dy`
//! * degree 3: `[v]` for `v dx∧dy∧dz`
//!
//! The degree-2 basis is the cyclic dual ordering, so the Euclidean Hodge
//! star is the identity on coefficient slots between degrees 1 and 2.
//! Exterior derivatives differentiate coefficients symbolically, which is
//! what makes `d∘d = 0` hold to machine precision downstream.

use std::fmt;

use crate::chart::{Point, Var};
use crate::expr::{EvalCache, EvalError, Expression};
use crate::scalar::Scalar;

/// Coefficient counts by degree.
const COEFF_COUNT: [usize; 4] = [1, 3, 3, 1];

/// Errors from graded-algebra operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormError {
    #[error("degree {0} is not a valid form degree on a 3-chart (expected 0..=3)")]
    InvalidDegree(u8),
    #[error("degree-{degree} form needs {expected} coefficients, got {got}")]
    CoefficientCount { degree: u8, expected: usize, got: usize },
    #[error("wedge of degrees {0} and {1} exceeds the chart dimension")]
    DegreeOverflow(u8, u8),
    #[error("exterior derivative of a degree-3 form does not exist on a 3-chart")]
    TopDegreeDerivative,
    #[error("expected a degree-{expected} form, got degree {got}")]
    DegreeMismatch { expected: u8, got: u8 },
}

/// Exterior form with symbolic coefficients in the canonical basis.
#[derive(Debug, Clone, PartialEq)]
pub struct KForm<T> {
    degree: u8,
    coeffs: Vec<Expression<T>>,
}

impl<T: Scalar> KForm<T> {
    /// Builds a form from coefficients in the canonical basis.
    pub fn new(degree: u8, coeffs: Vec<Expression<T>>) -> Result<Self, FormError> {
        if degree > 3 {
            return Err(FormError::InvalidDegree(degree));
        }
        let expected = COEFF_COUNT[degree as usize];
        if coeffs.len() != expected {
            return Err(FormError::CoefficientCount {
                degree,
                expected,
                got: coeffs.len(),
            });
        }
        Ok(KForm { degree, coeffs })
    }

    /// A 0-form (scalar field).
    pub fn scalar(c: Expression<T>) -> Self {
        KForm { degree: 0, coeffs: vec![c] }
    }

    /// `a1 dx + a2 dy + a3 dz`.
    pub fn one_form(a1: Expression<T>, a2: Expression<T>, a3: Expression<T>) -> Self {
        KForm { degree: 1, coeffs: vec![a1, a2, a3] }
    }

    /// `b1 dy∧dz + b2 dz∧dx + b3 dx∧dy`.
    pub fn two_form(b1: Expression<T>, b2: Expression<T>, b3: Expression<T>) -> Self {
        KForm { degree: 2, coeffs: vec![b1, b2, b3] }
    }

    /// `v dx∧dy∧dz`.
    pub fn three_form(v: Expression<T>) -> Self {
        KForm { degree: 3, coeffs: vec![v] }
    }

    /// The zero form of a given degree.
    pub fn zero(degree: u8) -> Result<Self, FormError> {
        if degree > 3 {
            return Err(FormError::InvalidDegree(degree));
        }
        let coeffs = (0..COEFF_COUNT[degree as usize])
            .map(|_| Expression::constant(T::zero()))
            .collect();
        Ok(KForm { degree, coeffs })
    }

    pub fn degree(&self) -> u8 {
        self.degree
    }

    pub fn coeffs(&self) -> &[Expression<T>] {
        &self.coeffs
    }

    /// Fails unless the form has the given degree.
    pub fn expect_degree(&self, expected: u8) -> Result<(), FormError> {
        if self.degree == expected {
            Ok(())
        } else {
            Err(FormError::DegreeMismatch { expected, got: self.degree })
        }
    }

    /// Simplifies every coefficient.
    pub fn simplify(&self) -> Self {
        KForm {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(Expression::simplify).collect(),
        }
    }

    /// Numeric coefficients at a point.
    pub fn evaluate(&self, p: &Point<T>) -> Result<Vec<T>, EvalError> {
        let mut cache = EvalCache::new();
        self.evaluate_cached(p, &mut cache)
    }

    /// Numeric coefficients at a point, reusing a per-point memo table.
    pub fn evaluate_cached(
        &self,
        p: &Point<T>,
        cache: &mut EvalCache<T>,
    ) -> Result<Vec<T>, EvalError> {
        self.coeffs
            .iter()
            .map(|c| c.evaluate_cached(p, cache))
            .collect()
    }

    /// Wedge product in the canonical basis. Graded-anticommutative and
    /// bilinear; wedges of total degree above 3 are rejected.
    pub fn wedge(&self, other: &KForm<T>) -> Result<KForm<T>, FormError> {
        let (p, q) = (self.degree, other.degree);
        if p + q > 3 {
            return Err(FormError::DegreeOverflow(p, q));
        }
        let e = |i: usize| self.coeffs[i].clone();
        let f = |i: usize| other.coeffs[i].clone();
        let form = match (p, q) {
            (0, _) => KForm {
                degree: q,
                coeffs: other.coeffs.iter().map(|c| Expression::mul(e(0), c.clone())).collect(),
            },
            (_, 0) => KForm {
                degree: p,
                coeffs: self.coeffs.iter().map(|c| Expression::mul(c.clone(), f(0))).collect(),
            },
            // (1,1): coefficient cross product into the cyclic degree-2 basis.
            (1, 1) => KForm::two_form(
                Expression::sub(Expression::mul(e(1), f(2)), Expression::mul(e(2), f(1))),
                Expression::sub(Expression::mul(e(2), f(0)), Expression::mul(e(0), f(2))),
                Expression::sub(Expression::mul(e(0), f(1)), Expression::mul(e(1), f(0))),
            ),
            // (1,2) and (2,1): slot dot product times the volume basis.
            (1, 2) | (2, 1) => {
                let mut acc = Expression::constant(T::zero());
                for i in 0..3 {
                    acc = Expression::add(acc, Expression::mul(e(i), f(i)));
                }
                KForm::three_form(acc)
            }
            _ => unreachable!("degree overflow handled above"),
        };
        Ok(form)
    }

    /// Exterior derivative with exact symbolic partials.
    ///
    /// * 0-form `c` ↦ gradient `[∂x c, ∂y c, ∂z c]`
    /// * 1-form ↦ curl pattern in the cyclic degree-2 basis
    /// * 2-form ↦ divergence times `dx∧dy∧dz`
    /// * 3-form ↦ error (the result would have degree 4)
    pub fn exterior_derivative(&self) -> Result<KForm<T>, FormError> {
        let d = |i: usize, v: Var| self.coeffs[i].differentiate(v);
        match self.degree {
            0 => Ok(KForm::one_form(d(0, Var::X), d(0, Var::Y), d(0, Var::Z))),
            1 => Ok(KForm::two_form(
                Expression::sub(d(2, Var::Y), d(1, Var::Z)),
                Expression::sub(d(0, Var::Z), d(2, Var::X)),
                Expression::sub(d(1, Var::X), d(0, Var::Y)),
            )),
            2 => Ok(KForm::three_form(Expression::add(
                Expression::add(d(0, Var::X), d(1, Var::Y)),
                d(2, Var::Z),
            ))),
            _ => Err(FormError::TopDegreeDerivative),
        }
    }

    /// Coefficient-wise scaling by a constant.
    pub fn scale(&self, c: T) -> KForm<T> {
        KForm {
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .map(|e| Expression::mul(Expression::constant(c), e.clone()))
                .collect(),
        }
    }

    /// Coefficient-wise `c1·p + c2·q` for forms of equal degree.
    pub fn linear_combine(
        c1: T,
        p: &KForm<T>,
        c2: T,
        q: &KForm<T>,
    ) -> Result<KForm<T>, FormError> {
        if p.degree != q.degree {
            return Err(FormError::DegreeMismatch { expected: p.degree, got: q.degree });
        }
        let coeffs = p
            .coeffs
            .iter()
            .zip(&q.coeffs)
            .map(|(a, b)| {
                Expression::add(
                    Expression::mul(Expression::constant(c1), a.clone()),
                    Expression::mul(Expression::constant(c2), b.clone()),
                )
            })
            .collect();
        Ok(KForm { degree: p.degree, coeffs })
    }
}

impl<T: Scalar> fmt::Display for KForm<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        const BASIS: [&[&str]; 4] = [
            &[""],
            &["dx", "dy", "dz"],
            &["dy∧dz", "dz∧dx", "dx∧dy"],
            &["dx∧dy∧dz"],
        ];
        let names = BASIS[self.degree as usize];
        let mut first = true;
        for (c, name) in self.coeffs.iter().zip(names) {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if name.is_empty() {
                write!(f, "{c}")?;
            } else {
                write!(f, "({c}) {name}")?;
            }
        }
        Ok(())
    }
}

/// Which part of the complex exponential a real amplitude represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseRole {
    /// Amplitude carried by `cos ωt`.
    RealPart,
    /// Amplitude carried by `sin ωt`.
    ImagPart,
}

/// A real 1- or 2-form amplitude oscillating harmonically in time.
///
/// For a real amplitude `a`, the real part of `a·e^{iωt}` is `a·cos ωt`
/// and the imaginary part is `a·sin ωt`; time dependence factors out of
/// every spatial operation, so verification happens on amplitudes and the
/// time factor is reattached only when sampling fields.
#[derive(Debug, Clone)]
pub struct TimeHarmonicField<T> {
    amplitude: KForm<T>,
    omega: T,
    phase_role: PhaseRole,
}

/// Error for a zero temporal frequency, which the harmonic ansatz excludes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("angular frequency must be nonzero")]
pub struct ZeroOmega;

impl<T: Scalar> TimeHarmonicField<T> {
    pub fn new(amplitude: KForm<T>, omega: T, phase_role: PhaseRole) -> Result<Self, ZeroOmega> {
        if omega == T::zero() || !omega.is_finite() {
            return Err(ZeroOmega);
        }
        Ok(TimeHarmonicField { amplitude, omega, phase_role })
    }

    pub fn amplitude(&self) -> &KForm<T> {
        &self.amplitude
    }

    pub fn omega(&self) -> T {
        self.omega
    }

    pub fn phase_role(&self) -> PhaseRole {
        self.phase_role
    }

    /// Coefficients of the field at `(p, t)`.
    pub fn at(&self, p: &Point<T>, t: T) -> Result<Vec<T>, EvalError> {
        let phase = self.omega * t;
        let factor = match self.phase_role {
            PhaseRole::RealPart => phase.cos(),
            PhaseRole::ImagPart => phase.sin(),
        };
        Ok(self.amplitude.evaluate(p)?.into_iter().map(|c| c * factor).collect())
    }
}
