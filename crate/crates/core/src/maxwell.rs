//! Time-harmonic Maxwell verification on the chart.
//!
//! Fields are modelled as `E = α cos ωt`, `H = β sin ωt` with real 1-form
//! amplitudes, and media as a pair of metrics `(g_ε, g_μ)` acting through
//! their Hodge stars: `D = ∗_ε E`, `B = ∗_μ H`. Because the time factors
//! are exact, the four source-free equations reduce to time-independent
//! amplitude identities, which are what [`maxwell_residuals`] measures:
//!
//! * `R1 = dα + ω ∗_μ β`   (Faraday: `dE = −∂B/∂t`)
//! * `R2 = dβ + ω ∗_ε α`   (Ampère: `dH = ∂D/∂t`)
//! * `R3 = d ∗_ε α`        (Gauss: `dD = 0`)
//! * `R4 = d ∗_μ β`        (no monopoles: `dB = 0`)
//!
//! plus the constitutive cross-check, the double-curl identity
//! `∗_ε d ∗_μ dα = ω² α`, and the closed form `β = −sign(ω) α` that holds
//! on the output of [`verify_theorem1`].
//!
//! [`verify_theorem1`] runs the full constructive pipeline: starting from
//! a metric adapted to a contact form (`dα = 2∗α`, `g(α♯,α♯) = 1`), it
//! conformally rescales so that `dα = |ω| ∗α`, takes that metric as both
//! permittivity and permeability, builds `β = −(1/ω) ∗dα`, and certifies
//! every identity above on the samples.

use crate::chart::{Point, SampleSet};
use crate::contact::{
    check_adapted, rescale_to_factor, ContactError, RESIDUAL_FLOOR,
};
use crate::expr::{EvalCache, EvalError, Expression};
use crate::forms::{FormError, KForm, PhaseRole, TimeHarmonicField};
use crate::metric::{det3, inverse3, MetricError, MetricField, VectorField};
use crate::numeric::euclid_norm;
use crate::scalar::Scalar;

/// Electromagnetic media: permittivity and permeability metrics.
#[derive(Debug, Clone)]
pub struct Media<T> {
    g_eps: MetricField<T>,
    g_mu: MetricField<T>,
}

impl<T: Scalar> Media<T> {
    pub fn new(g_eps: MetricField<T>, g_mu: MetricField<T>) -> Self {
        Media { g_eps, g_mu }
    }

    /// Same metric for both constitutive laws.
    pub fn isotropic(g: MetricField<T>) -> Self {
        Media {
            g_eps: g.clone(),
            g_mu: g,
        }
    }

    pub fn g_eps(&self) -> &MetricField<T> {
        &self.g_eps
    }

    pub fn g_mu(&self) -> &MetricField<T> {
        &self.g_mu
    }
}

/// Max/mean of a sampled relative residual with its worst point.
#[derive(Debug, Clone, Copy)]
pub struct ResidualStat<T> {
    pub max: T,
    pub mean: T,
    pub argmax: Point<T>,
}

/// Residuals of the reduced Maxwell system over a sample set.
#[derive(Debug, Clone)]
pub struct ResidualReport<T> {
    pub r1: ResidualStat<T>,
    pub r2: ResidualStat<T>,
    pub r3: ResidualStat<T>,
    pub r4: ResidualStat<T>,
    /// Constitutive re-check `D = ∗_ε E` through an independent pointwise
    /// numeric star.
    pub c1: ResidualStat<T>,
    /// Constitutive re-check `B = ∗_μ H`.
    pub c2: ResidualStat<T>,
    /// `∗_ε d ∗_μ dα − ω²α`.
    pub double_curl: ResidualStat<T>,
    /// `β + sign(ω) α`.
    pub beta_closed_form: ResidualStat<T>,
    pub samples: usize,
    pub seed: u64,
}

impl<T: Scalar> ResidualReport<T> {
    /// Residuals in report order with stable names.
    pub fn stats(&self) -> [(&'static str, &ResidualStat<T>); 8] {
        [
            ("r1", &self.r1),
            ("r2", &self.r2),
            ("r3", &self.r3),
            ("r4", &self.r4),
            ("c1", &self.c1),
            ("c2", &self.c2),
            ("double_curl", &self.double_curl),
            ("beta_closed_form", &self.beta_closed_form),
        ]
    }

    /// Largest max-residual across all equations.
    pub fn worst(&self) -> T {
        self.stats()
            .iter()
            .fold(T::zero(), |m, (_, s)| m.max(s.max))
    }

    /// True when every max-residual is within `tol`.
    pub fn all_within(&self, tol: T) -> bool {
        self.stats().iter().all(|(_, s)| s.max <= tol)
    }

    /// True when the four Maxwell residuals and the constitutive checks
    /// are within `tol` (the closed-form and double-curl diagnostics only
    /// apply to the adapted pipeline).
    pub fn maxwell_within(&self, tol: T) -> bool {
        self.r1.max <= tol
            && self.r2.max <= tol
            && self.r3.max <= tol
            && self.r4.max <= tol
            && self.c1.max <= tol
            && self.c2.max <= tol
    }
}

/// Field coefficient triples at one spacetime point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSnapshot<T> {
    pub e: [T; 3],
    pub h: [T; 3],
    pub d: [T; 3],
    pub b: [T; 3],
}

/// Output of the constructive pipeline.
#[derive(Debug, Clone)]
pub struct Theorem1Outcome<T> {
    /// Media metric (used for both `g_ε` and `g_μ`).
    pub media: Media<T>,
    /// The constructed magnetic amplitude.
    pub beta: KForm<T>,
    pub report: ResidualReport<T>,
}

/// Errors from the Maxwell drivers.
#[derive(Debug, Clone, thiserror::Error)]
pub enum MaxwellError<T: Scalar> {
    #[error("angular frequency must be a nonzero real")]
    ZeroOmega,
    #[error("sample set is empty")]
    EmptySamples,
    #[error("metric is not adapted to the form: star residual {residual_star}, norm residual {residual_norm} (tolerance {tol})")]
    NotAdapted {
        residual_star: T,
        residual_norm: T,
        tol: T,
    },
    #[error(transparent)]
    Contact(#[from] ContactError<T>),
    #[error(transparent)]
    Metric(#[from] MetricError<T>),
    #[error("evaluation failed: {0}")]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Form(#[from] FormError),
}

/// Curl through the metric: `(∇×X)♭ = ∗ d (X♭)`.
pub fn curl<T: Scalar>(
    g: &MetricField<T>,
    x: &VectorField<T>,
) -> Result<VectorField<T>, FormError> {
    let flat = g.flat(x);
    let d_flat = flat.exterior_derivative()?;
    let star = g.hodge(&d_flat);
    g.sharp(&star)
}

/// The unique 1-form with `dα = −ω ∗β`, namely `β = −(1/ω) ∗dα`
/// (uniqueness because the star is an involution).
pub fn build_beta<T: Scalar>(
    g: &MetricField<T>,
    alpha: &KForm<T>,
    omega: T,
) -> Result<KForm<T>, MaxwellError<T>> {
    if omega == T::zero() || !omega.is_finite() {
        return Err(MaxwellError::ZeroOmega);
    }
    alpha.expect_degree(1)?;
    let d_alpha = alpha.exterior_derivative()?;
    let star_d = g.hodge(&d_alpha);
    Ok(star_d.scale(-omega.recip()))
}

/// Numeric field values `E = α cos ωt`, `H = β sin ωt`, `D = ∗_ε E`,
/// `B = ∗_μ H` at one spacetime point.
pub fn fields_at<T: Scalar>(
    alpha: &KForm<T>,
    beta: &KForm<T>,
    media: &Media<T>,
    omega: T,
    p: &Point<T>,
    t: T,
) -> Result<FieldSnapshot<T>, MaxwellError<T>> {
    if omega == T::zero() || !omega.is_finite() {
        return Err(MaxwellError::ZeroOmega);
    }
    alpha.expect_degree(1)?;
    beta.expect_degree(1)?;
    let e = TimeHarmonicField::new(alpha.clone(), omega, PhaseRole::RealPart)
        .expect("omega checked nonzero");
    let h = TimeHarmonicField::new(beta.clone(), omega, PhaseRole::ImagPart)
        .expect("omega checked nonzero");
    let d = TimeHarmonicField::new(media.g_eps.hodge(alpha), omega, PhaseRole::RealPart)
        .expect("omega checked nonzero");
    let b = TimeHarmonicField::new(media.g_mu.hodge(beta), omega, PhaseRole::ImagPart)
        .expect("omega checked nonzero");
    Ok(FieldSnapshot {
        e: to3(e.at(p, t)?),
        h: to3(h.at(p, t)?),
        d: to3(d.at(p, t)?),
        b: to3(b.at(p, t)?),
    })
}

/// Accumulates max/mean/argmax in fixed sample order.
struct Acc<T> {
    max: T,
    sum: T,
    argmax: usize,
}

impl<T: Scalar> Acc<T> {
    fn new() -> Self {
        Acc {
            max: T::zero(),
            sum: T::zero(),
            argmax: 0,
        }
    }

    fn push(&mut self, idx: usize, v: T) {
        if v > self.max {
            self.max = v;
            self.argmax = idx;
        }
        self.sum = self.sum + v;
    }

    fn finish(self, points: &[Point<T>]) -> ResidualStat<T> {
        ResidualStat {
            max: self.max,
            mean: self.sum / T::from_f64_lossy(points.len() as f64),
            argmax: points[self.argmax],
        }
    }
}

/// Measures all residual identities for given amplitudes and media.
///
/// Residual forms are composed symbolically and evaluated per sample;
/// each residual is normalised by the local magnitude of the terms being
/// compared (floored at `1e-30`), so thresholds are scale-free and the
/// zero field reports exactly zero.
pub fn maxwell_residuals<T: Scalar>(
    alpha: &KForm<T>,
    beta: &KForm<T>,
    media: &Media<T>,
    omega: T,
    samples: &SampleSet<T>,
) -> Result<ResidualReport<T>, MaxwellError<T>> {
    if omega == T::zero() || !omega.is_finite() {
        return Err(MaxwellError::ZeroOmega);
    }
    alpha.expect_degree(1)?;
    beta.expect_degree(1)?;
    if samples.is_empty() {
        return Err(MaxwellError::EmptySamples);
    }

    let d_alpha = alpha.exterior_derivative()?;
    let d_beta = beta.exterior_derivative()?;
    let se_alpha = media.g_eps.hodge(alpha);
    let sm_beta = media.g_mu.hodge(beta);
    let r1_form = KForm::linear_combine(T::one(), &d_alpha, omega, &sm_beta)?;
    let r2_form = KForm::linear_combine(T::one(), &d_beta, omega, &se_alpha)?;
    let r3_form = se_alpha.exterior_derivative()?;
    let r4_form = sm_beta.exterior_derivative()?;
    // ∗_ε d ∗_μ dα, the curl-of-curl of α through the media stars.
    let curl_curl = media
        .g_eps
        .hodge(&media.g_mu.hodge(&d_alpha).exterior_derivative()?);
    let omega_sq = omega * omega;
    let dc_form = KForm::linear_combine(T::one(), &curl_curl, -omega_sq, alpha)?;
    let sign = if omega > T::zero() { T::one() } else { -T::one() };
    let bcf_form = KForm::linear_combine(T::one(), beta, sign, alpha)?;

    let floor = T::from_f64_lossy(RESIDUAL_FLOOR);
    let abs_omega = omega.abs();
    let points = samples.points();
    let mut acc = [
        Acc::new(), // r1
        Acc::new(), // r2
        Acc::new(), // r3
        Acc::new(), // r4
        Acc::new(), // c1
        Acc::new(), // c2
        Acc::new(), // double curl
        Acc::new(), // beta closed form
    ];
    let mut cache = EvalCache::new();
    for (idx, p) in points.iter().enumerate() {
        cache.clear();
        let al = to3(alpha.evaluate_cached(p, &mut cache)?);
        let be = to3(beta.evaluate_cached(p, &mut cache)?);
        let ua = to3(d_alpha.evaluate_cached(p, &mut cache)?);
        let ub = to3(d_beta.evaluate_cached(p, &mut cache)?);
        let va = to3(se_alpha.evaluate_cached(p, &mut cache)?);
        let vb = to3(sm_beta.evaluate_cached(p, &mut cache)?);

        let r1 = euclid_norm(&to3(r1_form.evaluate_cached(p, &mut cache)?))
            / euclid_norm(&ua)
                .max(abs_omega * euclid_norm(&vb))
                .max(floor);
        acc[0].push(idx, r1);

        let r2 = euclid_norm(&to3(r2_form.evaluate_cached(p, &mut cache)?))
            / euclid_norm(&ub)
                .max(abs_omega * euclid_norm(&va))
                .max(floor);
        acc[1].push(idx, r2);

        let r3 = r3_form.evaluate_cached(p, &mut cache)?[0].abs()
            / euclid_norm(&va).max(floor);
        acc[2].push(idx, r3);

        let r4 = r4_form.evaluate_cached(p, &mut cache)?[0].abs()
            / euclid_norm(&vb).max(floor);
        acc[3].push(idx, r4);

        // Constitutive recheck through a numeric star matrix on 1-forms:
        // coefficients of ∗a are √det(g) · g⁻¹ · a evaluated pointwise.
        let c1 = constitutive_residual(&media.g_eps, al, va, p, &mut cache, floor)?;
        acc[4].push(idx, c1);
        let c2 = constitutive_residual(&media.g_mu, be, vb, p, &mut cache, floor)?;
        acc[5].push(idx, c2);

        let cc = to3(curl_curl.evaluate_cached(p, &mut cache)?);
        let dc = euclid_norm(&to3(dc_form.evaluate_cached(p, &mut cache)?))
            / euclid_norm(&cc)
                .max(omega_sq * euclid_norm(&al))
                .max(floor);
        acc[6].push(idx, dc);

        let bcf = euclid_norm(&to3(bcf_form.evaluate_cached(p, &mut cache)?))
            / euclid_norm(&al).max(euclid_norm(&be)).max(floor);
        acc[7].push(idx, bcf);
    }

    let [a1, a2, a3, a4, a5, a6, a7, a8] = acc;
    Ok(ResidualReport {
        r1: a1.finish(points),
        r2: a2.finish(points),
        r3: a3.finish(points),
        r4: a4.finish(points),
        c1: a5.finish(points),
        c2: a6.finish(points),
        double_curl: a7.finish(points),
        beta_closed_form: a8.finish(points),
        samples: samples.len(),
        seed: samples.seed(),
    })
}

/// Relative deviation between the symbolically composed star coefficients
/// and a pointwise numeric star matrix applied to the amplitude.
fn constitutive_residual<T: Scalar>(
    g: &MetricField<T>,
    amplitude: [T; 3],
    star_sym: [T; 3],
    p: &Point<T>,
    cache: &mut EvalCache<T>,
    floor: T,
) -> Result<T, MaxwellError<T>> {
    let m = g.evaluate_cached(p, cache)?;
    let det = det3(&m);
    if !(det > T::zero()) || !det.is_finite() {
        return Err(MaxwellError::Metric(MetricError::NotSpd {
            point: *p,
            minor: 3,
            value: det,
        }));
    }
    let inv = inverse3(&m, det);
    let scale = det.sqrt();
    let mut num = [T::zero(); 3];
    for i in 0..3 {
        for j in 0..3 {
            num[i] = num[i] + scale * inv[i][j] * amplitude[j];
        }
    }
    let dev = [
        star_sym[0] - num[0],
        star_sym[1] - num[1],
        star_sym[2] - num[2],
    ];
    Ok(euclid_norm(&dev) / euclid_norm(&star_sym).max(euclid_norm(&num)).max(floor))
}

/// Constructive verification pipeline for an adapted pair `(α, g)` and a
/// nonzero frequency.
///
/// 1. rescale the adapted metric so `dα = |ω| ∗α`;
/// 2. take the rescaled metric as both media metrics;
/// 3. build `β = −(1/ω) ∗dα`;
/// 4. measure all residuals, including `dβ = −ω∗α` (inside `R2`) and the
///    closed form `β = −sign(ω) α`.
///
/// The media metric depends on `ω` only through `|ω|`.
pub fn verify_theorem1<T: Scalar>(
    alpha: &KForm<T>,
    g_adapted: &MetricField<T>,
    omega: T,
    samples: &SampleSet<T>,
    tol: T,
) -> Result<Theorem1Outcome<T>, MaxwellError<T>> {
    if omega == T::zero() || !omega.is_finite() {
        return Err(MaxwellError::ZeroOmega);
    }
    let adapted = check_adapted(g_adapted, alpha, samples, tol)?;
    if !adapted.is_adapted {
        return Err(MaxwellError::NotAdapted {
            residual_star: adapted.residual_star,
            residual_norm: adapted.residual_norm,
            tol,
        });
    }
    let target = Expression::constant(omega.abs());
    let g_media = rescale_to_factor(g_adapted, alpha, &target, samples, tol)?;
    let media = Media::isotropic(g_media);
    let beta = build_beta(media.g_mu(), alpha, omega)?;
    let report = maxwell_residuals(alpha, &beta, &media, omega, samples)?;
    Ok(Theorem1Outcome {
        media,
        beta,
        report,
    })
}

fn to3<T: Scalar>(v: Vec<T>) -> [T; 3] {
    [v[0], v[1], v[2]]
}
