//! Contact-form verification and Beltrami-factor recovery.
//!
//! A 1-form `α` is a contact form when `α∧dα` vanishes nowhere; it is a
//! Beltrami 1-form for a metric `g` when `dα = f ∗α` for a scalar field
//! `f`, rotational when `f` vanishes nowhere, and `g` is adapted to `α`
//! when `dα = 2∗α` with `g(α♯, α♯) = 1`. These are "nowhere/never"
//! statements; here they become sampled claims with explicit tolerances
//! and witness points, never proofs.
//!
//! [`rescale_to_factor`] realises the conformal change of metric that
//! moves a Beltrami factor `f₀` to a prescribed target: `g̃ = (f₀/f)² g`,
//! using the fact that on 1-forms the Hodge star of `μ g` is `√μ` times
//! the star of `g`.

use crate::chart::{Point, SampleSet};
use crate::expr::{EvalCache, EvalError, Expression};
use crate::forms::{FormError, KForm};
use crate::metric::{MetricError, MetricField};
use crate::numeric::euclid_norm;
use crate::scalar::Scalar;

/// Floor used when normalising residuals, so zero fields give zero residuals.
pub(crate) const RESIDUAL_FLOOR: f64 = 1e-30;

/// Sign pattern of the `α∧dα` coefficient over the samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DefectSign {
    Positive,
    Negative,
    Mixed,
}

/// Sampled report on the contact condition `α∧dα ≠ 0`.
#[derive(Debug, Clone)]
pub struct ContactReport<T> {
    /// Minimum of `|coefficient of α∧dα|` over the samples.
    pub min_abs: T,
    pub sign: DefectSign,
    /// Point where the minimum is attained.
    pub witness: Point<T>,
    /// True when the minimum clears `tol · defect_scale` and the sign is
    /// uniform over the samples.
    pub is_contact: bool,
    /// Normalisation `1 + max ‖α‖·‖dα‖` (coefficient norms).
    pub defect_scale: T,
}

/// Sampled estimate of the Beltrami factor in `dα = f ∗α`.
#[derive(Debug, Clone)]
pub struct BeltramiEstimate<T> {
    /// Per-sample least-squares factor estimates.
    pub factor_values: Vec<T>,
    /// Per-sample relative deviation of `dα` from `f ∗α`.
    pub residuals: Vec<T>,
    /// Worst per-sample residual.
    pub max_residual: T,
    /// Point attaining the worst residual.
    pub witness: Point<T>,
    /// True when `|f|` stays bounded away from zero on the samples.
    pub is_rotational: bool,
    /// True when the factor estimates agree to tolerance across samples.
    pub is_constant: bool,
    /// Mean factor when `is_constant` holds.
    pub constant_value: Option<T>,
}

/// Sampled report on the adapted-metric conditions `dα = 2∗α`,
/// `g(α♯,α♯) = 1`.
#[derive(Debug, Clone)]
pub struct AdaptedReport<T> {
    /// Worst relative deviation of `dα` from `2∗α`.
    pub residual_star: T,
    /// Worst deviation of `g(α♯,α♯)` from 1.
    pub residual_norm: T,
    pub is_adapted: bool,
    pub witness_star: Point<T>,
    pub witness_norm: Point<T>,
}

/// Errors from contact/Beltrami drivers.
#[derive(Debug, Clone, thiserror::Error)]
pub enum ContactError<T: Scalar> {
    #[error("sample set is empty")]
    EmptySamples,
    #[error("not a Beltrami pair: ∗α vanishes at {witness} while dα does not")]
    NotBeltrami { witness: Point<T> },
    #[error("Beltrami residual {residual} exceeds tolerance {tol}; (g, α) do not satisfy dα = f∗α")]
    ResidualTooLarge { residual: T, tol: T },
    #[error("recovered Beltrami factor is not bounded away from zero (min |f| = {min_abs_factor}); conformal rescaling needs a rotational factor")]
    SourceNotRotational { min_abs_factor: T },
    #[error("target factor vanishes at {witness}")]
    TargetVanishes { witness: Point<T> },
    #[error("target factor sign differs from the recovered factor at {witness}; a conformal rescaling cannot flip the Beltrami sign")]
    SignMismatch { witness: Point<T> },
    #[error("post-verification of the rescaled metric failed: {detail}")]
    PostVerification { detail: String },
    #[error(transparent)]
    Metric(#[from] MetricError<T>),
    #[error("evaluation failed: {0}")]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Form(#[from] FormError),
}

/// Evaluates `α∧dα` on the samples and reports how far it stays from zero.
///
/// Deterministic given the sample seed. Metric-free: the defect is a
/// 3-form and its coefficient is compared in the coordinate volume basis.
pub fn contact_defect<T: Scalar>(
    alpha: &KForm<T>,
    samples: &SampleSet<T>,
    tol: T,
) -> Result<ContactReport<T>, ContactError<T>> {
    alpha.expect_degree(1)?;
    if samples.is_empty() {
        return Err(ContactError::EmptySamples);
    }
    let d_alpha = alpha.exterior_derivative()?;
    let defect = alpha.wedge(&d_alpha)?;

    let mut cache = EvalCache::new();
    let mut min_abs = T::infinity();
    let mut witness_idx = 0usize;
    let mut max_scale = T::zero();
    let mut any_pos = false;
    let mut any_nonpos = false;
    for (idx, p) in samples.points().iter().enumerate() {
        cache.clear();
        let c = defect.evaluate_cached(p, &mut cache)?[0];
        let na = euclid_norm(&alpha.evaluate_cached(p, &mut cache)?);
        let nd = euclid_norm(&d_alpha.evaluate_cached(p, &mut cache)?);
        max_scale = max_scale.max(na * nd);
        if c.abs() < min_abs {
            min_abs = c.abs();
            witness_idx = idx;
        }
        if c > T::zero() {
            any_pos = true;
        } else {
            any_nonpos = true;
        }
    }
    let sign = match (any_pos, any_nonpos) {
        (true, false) => DefectSign::Positive,
        (false, true) => DefectSign::Negative,
        _ => DefectSign::Mixed,
    };
    let defect_scale = T::one() + max_scale;
    let is_contact = min_abs > tol * defect_scale && sign != DefectSign::Mixed;
    Ok(ContactReport {
        min_abs,
        sign,
        witness: samples.points()[witness_idx],
        is_contact,
        defect_scale,
    })
}

/// Recovers the Beltrami factor of `(g, α)` per sample by least squares
/// over the three coefficient slots: `f = (dα·∗α) / (∗α·∗α)`.
///
/// Using all three slots keeps the estimate stable where individual
/// coefficients vanish. A sample where `∗α ≈ 0` but `dα` does not is a
/// hard failure: no scalar factor can relate them there.
pub fn beltrami_factor<T: Scalar>(
    g: &MetricField<T>,
    alpha: &KForm<T>,
    samples: &SampleSet<T>,
    tol: T,
) -> Result<BeltramiEstimate<T>, ContactError<T>> {
    alpha.expect_degree(1)?;
    if samples.is_empty() {
        return Err(ContactError::EmptySamples);
    }
    let d_alpha = alpha.exterior_derivative()?;
    let star_alpha = g.hodge(alpha);

    let n = samples.len();
    let mut us: Vec<[T; 3]> = Vec::with_capacity(n);
    let mut vs: Vec<[T; 3]> = Vec::with_capacity(n);
    let mut scale_u = T::zero();
    let mut scale_v = T::zero();
    let mut cache = EvalCache::new();
    for p in samples.points() {
        cache.clear();
        let u = to3(d_alpha.evaluate_cached(p, &mut cache)?);
        let v = to3(star_alpha.evaluate_cached(p, &mut cache)?);
        scale_u = scale_u.max(euclid_norm(&u));
        scale_v = scale_v.max(euclid_norm(&v));
        us.push(u);
        vs.push(v);
    }

    let floor = T::from_f64_lossy(RESIDUAL_FLOOR);
    let eps_u = tol * (T::one() + scale_u);
    let eps_v = tol * (T::one() + scale_v);
    let mut factor_values = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    let mut max_residual = T::zero();
    let mut witness_idx = 0usize;
    for (idx, (u, v)) in us.iter().zip(&vs).enumerate() {
        let nu = euclid_norm(u);
        let nv = euclid_norm(v);
        let (f, r) = if nv <= eps_v {
            if nu <= eps_u {
                (T::zero(), T::zero())
            } else {
                return Err(ContactError::NotBeltrami {
                    witness: samples.points()[idx],
                });
            }
        } else {
            let f = dot3(u, v) / dot3(v, v);
            let dev = [u[0] - f * v[0], u[1] - f * v[1], u[2] - f * v[2]];
            (f, euclid_norm(&dev) / nu.max(nv).max(floor))
        };
        if r > max_residual {
            max_residual = r;
            witness_idx = idx;
        }
        factor_values.push(f);
        residuals.push(r);
    }

    let mut min_abs_f = T::infinity();
    let mut max_abs_f = T::zero();
    let mut min_f = T::infinity();
    let mut max_f = T::neg_infinity();
    let mut sum_f = T::zero();
    for &f in &factor_values {
        min_abs_f = min_abs_f.min(f.abs());
        max_abs_f = max_abs_f.max(f.abs());
        min_f = min_f.min(f);
        max_f = max_f.max(f);
        sum_f = sum_f + f;
    }
    let is_rotational = min_abs_f > tol * (T::one() + max_abs_f);
    let is_constant = (max_f - min_f) <= tol * (T::one() + max_abs_f);
    let constant_value = is_constant.then(|| sum_f / T::from_f64_lossy(n as f64));

    Ok(BeltramiEstimate {
        factor_values,
        residuals,
        max_residual,
        witness: samples.points()[witness_idx],
        is_rotational,
        is_constant,
        constant_value,
    })
}

/// Checks the adapted-metric conditions `dα = 2∗α` and `g(α♯,α♯) = 1`.
pub fn check_adapted<T: Scalar>(
    g: &MetricField<T>,
    alpha: &KForm<T>,
    samples: &SampleSet<T>,
    tol: T,
) -> Result<AdaptedReport<T>, ContactError<T>> {
    alpha.expect_degree(1)?;
    if samples.is_empty() {
        return Err(ContactError::EmptySamples);
    }
    let d_alpha = alpha.exterior_derivative()?;
    let star_alpha = g.hodge(alpha);
    let two = T::from_f64_lossy(2.0);
    let deviation = KForm::linear_combine(T::one(), &d_alpha, -two, &star_alpha)?;
    let norm_expr = g.one_form_inner(alpha, alpha)?;

    let floor = T::from_f64_lossy(RESIDUAL_FLOOR);
    let mut residual_star = T::zero();
    let mut residual_norm = T::zero();
    let mut widx_star = 0usize;
    let mut widx_norm = 0usize;
    let mut cache = EvalCache::new();
    for (idx, p) in samples.points().iter().enumerate() {
        cache.clear();
        let dev = euclid_norm(&deviation.evaluate_cached(p, &mut cache)?);
        let nu = euclid_norm(&d_alpha.evaluate_cached(p, &mut cache)?);
        let nv = two * euclid_norm(&star_alpha.evaluate_cached(p, &mut cache)?);
        let rel = dev / nu.max(nv).max(floor);
        if rel > residual_star {
            residual_star = rel;
            widx_star = idx;
        }
        let norm_dev = (norm_expr.evaluate_cached(p, &mut cache)? - T::one()).abs();
        if norm_dev > residual_norm {
            residual_norm = norm_dev;
            widx_norm = idx;
        }
    }
    Ok(AdaptedReport {
        residual_star,
        residual_norm,
        is_adapted: residual_star <= tol && residual_norm <= tol,
        witness_star: samples.points()[widx_star],
        witness_norm: samples.points()[widx_norm],
    })
}

/// Conformally rescales `g` so that the Beltrami factor of `α` becomes
/// `f_target`: returns `g̃ = (f₀/f_target)² g`.
///
/// Preconditions checked on the samples: `(g, α)` is Beltrami within
/// `tol`, the recovered factor is rotational, and `f_target` is nowhere
/// zero with the same sign as the recovered factor (a positive conformal
/// factor cannot flip the sign). The result is post-verified by running
/// the factor recovery on `g̃`.
///
/// When the recovered factor is constant it is used as a number; otherwise
/// the factor is carried symbolically as `(dα·∗α)/(∗α·∗α)`, which is exact
/// whenever the Beltrami precondition holds.
pub fn rescale_to_factor<T: Scalar>(
    g: &MetricField<T>,
    alpha: &KForm<T>,
    f_target: &Expression<T>,
    samples: &SampleSet<T>,
    tol: T,
) -> Result<MetricField<T>, ContactError<T>> {
    let est = beltrami_factor(g, alpha, samples, tol)?;
    if est.max_residual > tol {
        return Err(ContactError::ResidualTooLarge {
            residual: est.max_residual,
            tol,
        });
    }
    if !est.is_rotational {
        let min_abs = est
            .factor_values
            .iter()
            .fold(T::infinity(), |m, f| m.min(f.abs()));
        return Err(ContactError::SourceNotRotational {
            min_abs_factor: min_abs,
        });
    }

    let mut targets = Vec::with_capacity(samples.len());
    let mut scale_t = T::zero();
    for p in samples.points() {
        let v = f_target.evaluate(p)?;
        scale_t = scale_t.max(v.abs());
        targets.push(v);
    }
    for (idx, (&ft, &f0)) in targets.iter().zip(&est.factor_values).enumerate() {
        if ft.abs() <= tol * (T::one() + scale_t) {
            return Err(ContactError::TargetVanishes {
                witness: samples.points()[idx],
            });
        }
        if ft * f0 <= T::zero() {
            return Err(ContactError::SignMismatch {
                witness: samples.points()[idx],
            });
        }
    }

    let f0_expr = match est.constant_value {
        Some(c) => Expression::constant(c),
        None => {
            let d_alpha = alpha.exterior_derivative()?;
            let star_alpha = g.hodge(alpha);
            Expression::div(
                coeff_dot(&d_alpha, &star_alpha),
                coeff_dot(&star_alpha, &star_alpha),
            )
        }
    };
    let mu = Expression::powi(Expression::div(f0_expr, f_target.clone()), 2);
    let rescaled = g.conformal_rescale(&mu, samples)?;

    let post = beltrami_factor(&rescaled, alpha, samples, tol)?;
    if post.max_residual > tol {
        return Err(ContactError::PostVerification {
            detail: format!(
                "rescaled metric has Beltrami residual {} > {}",
                post.max_residual, tol
            ),
        });
    }
    for (f, ft) in post.factor_values.iter().zip(&targets) {
        if (*f - *ft).abs() > tol * (T::one() + scale_t) {
            return Err(ContactError::PostVerification {
                detail: format!("recovered factor {f} differs from target {ft}"),
            });
        }
    }
    Ok(rescaled)
}

/// Dot product of coefficient slots as a symbolic expression.
fn coeff_dot<T: Scalar>(a: &KForm<T>, b: &KForm<T>) -> Expression<T> {
    let mut acc = Expression::constant(T::zero());
    for (ca, cb) in a.coeffs().iter().zip(b.coeffs()) {
        acc = Expression::add(acc, Expression::mul(ca.clone(), cb.clone()));
    }
    acc
}

fn to3<T: Scalar>(v: Vec<T>) -> [T; 3] {
    [v[0], v[1], v[2]]
}

fn dot3<T: Scalar>(a: &[T; 3], b: &[T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::BoxDomain;
    use crate::expr::parse;

    type E = Expression<f64>;
    type F = KForm<f64>;
    type M = MetricField<f64>;

    const TOL: f64 = 1e-9;

    fn e(s: &str) -> E {
        parse(s).unwrap()
    }

    fn samples() -> SampleSet<f64> {
        SampleSet::generate(BoxDomain::unit_symmetric(), 256, 17)
    }

    fn standard_contact_form() -> F {
        // α = dz + x dy
        F::one_form(e("0"), e("x"), e("1"))
    }

    fn plane_wave() -> F {
        // α = cos(2z) dx − sin(2z) dy, adapted to the Euclidean metric
        F::one_form(e("cos(2*z)"), e("-sin(2*z)"), e("0"))
    }

    fn overtwisted_wave() -> F {
        // α = cos z dx + sin z dy, Beltrami factor −1
        F::one_form(e("cos(z)"), e("sin(z)"), e("0"))
    }

    fn heisenberg() -> (F, M) {
        let alpha = F::one_form(e("-y"), e("0"), e("1"));
        let g = M::from_upper_triangle([
            e("0.5 + y^2"),
            e("0"),
            e("-y"),
            e("0.5"),
            e("0"),
            e("1"),
        ]);
        (alpha, g)
    }

    #[test]
    fn standard_form_is_contact() {
        let report = contact_defect(&standard_contact_form(), &samples(), TOL).unwrap();
        assert!(report.is_contact);
        assert_eq!(report.sign, DefectSign::Positive);
        assert!((report.min_abs - 1.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_is_not_contact() {
        let dz = F::one_form(e("0"), e("0"), e("1"));
        let report = contact_defect(&dz, &samples(), TOL).unwrap();
        assert!(!report.is_contact);
        assert!(report.min_abs.abs() < 1e-15);
    }

    #[test]
    fn overtwisted_wave_is_contact_with_negative_sign() {
        let report = contact_defect(&overtwisted_wave(), &samples(), TOL).unwrap();
        assert!(report.is_contact);
        assert_eq!(report.sign, DefectSign::Negative);
        assert!((report.min_abs - 1.0).abs() < 1e-12);
    }

    #[test]
    fn beltrami_factor_of_overtwisted_wave() {
        let est = beltrami_factor(&M::euclidean(), &overtwisted_wave(), &samples(), TOL).unwrap();
        assert!(est.max_residual <= 1e-12);
        assert!(est.is_rotational);
        assert!(est.is_constant);
        assert!((est.constant_value.unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn beltrami_factor_of_plane_wave_is_two() {
        let est = beltrami_factor(&M::euclidean(), &plane_wave(), &samples(), TOL).unwrap();
        assert!(est.max_residual <= 1e-12);
        assert!(est.is_constant);
        assert!((est.constant_value.unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_has_zero_factor() {
        let dz = F::one_form(e("0"), e("0"), e("1"));
        let est = beltrami_factor(&M::euclidean(), &dz, &samples(), TOL).unwrap();
        assert!(est.max_residual == 0.0);
        assert!(!est.is_rotational);
        assert!(est.is_constant);
        assert!(est.constant_value.unwrap().abs() < 1e-15);
    }

    #[test]
    fn adapted_examples_pass() {
        let s = samples();
        let rep = check_adapted(&M::euclidean(), &plane_wave(), &s, TOL).unwrap();
        assert!(rep.is_adapted, "residuals {} {}", rep.residual_star, rep.residual_norm);
        assert!(rep.residual_star <= 1e-12 && rep.residual_norm <= 1e-12);

        let (alpha, g) = heisenberg();
        let rep = check_adapted(&g, &alpha, &s, TOL).unwrap();
        assert!(rep.is_adapted, "residuals {} {}", rep.residual_star, rep.residual_norm);
        assert!(rep.residual_star <= 1e-12 && rep.residual_norm <= 1e-12);
    }

    #[test]
    fn overtwisted_wave_is_not_adapted() {
        let rep = check_adapted(&M::euclidean(), &overtwisted_wave(), &samples(), TOL).unwrap();
        assert!(!rep.is_adapted);
        assert!(rep.residual_star > 0.1);
    }

    #[test]
    fn rescale_moves_factor_to_target() {
        let s = samples();
        let g = rescale_to_factor(&M::euclidean(), &plane_wave(), &e("5"), &s, TOL).unwrap();
        // μ = (2/5)² = 0.16
        let m = g.evaluate(&Point::origin()).unwrap();
        assert!((m[0][0] - 0.16).abs() < 1e-15);
        let est = beltrami_factor(&g, &plane_wave(), &s, TOL).unwrap();
        assert!((est.constant_value.unwrap() - 5.0).abs() < 1e-10);
    }

    #[test]
    fn rescale_to_same_factor_is_identity() {
        let s = samples();
        let g = rescale_to_factor(&M::euclidean(), &plane_wave(), &e("2"), &s, TOL).unwrap();
        for p in s.points().iter().take(8) {
            let m = g.evaluate(p).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((m[i][j] - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn rescale_rejects_sign_flip() {
        match rescale_to_factor(&M::euclidean(), &plane_wave(), &e("-3"), &samples(), TOL) {
            Err(ContactError::SignMismatch { .. }) => {}
            other => panic!("expected sign mismatch, got {other:?}"),
        }
    }

    #[test]
    fn rescale_rejects_vanishing_target() {
        match rescale_to_factor(&M::euclidean(), &plane_wave(), &e("x"), &samples(), TOL) {
            Err(ContactError::TargetVanishes { .. }) | Err(ContactError::SignMismatch { .. }) => {}
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn degenerate_star_with_nonzero_derivative_is_not_beltrami() {
        // α = x dy on a slab where x ≈ 0: ∗α vanishes there while
        // dα = dx∧dy stays at unit size, so no scalar factor exists.
        let alpha = F::one_form(e("0"), e("x"), e("0"));
        let slab = crate::chart::BoxDomain::new([0.0, -1.0, -1.0], [1e-12, 1.0, 1.0]).unwrap();
        let s = SampleSet::generate(slab, 64, 3);
        match beltrami_factor(&M::euclidean(), &alpha, &s, TOL) {
            Err(ContactError::NotBeltrami { witness }) => {
                assert!(witness.x.abs() <= 1e-12);
            }
            other => panic!("expected NotBeltrami, got {other:?}"),
        }
    }

    #[test]
    fn rescale_rejects_non_beltrami_input() {
        // α = dz + x dy is not Beltrami for the Euclidean metric
        match rescale_to_factor(&M::euclidean(), &standard_contact_form(), &e("2"), &samples(), TOL)
        {
            Err(ContactError::ResidualTooLarge { .. }) => {}
            other => panic!("expected residual failure, got {other:?}"),
        }
    }
}
