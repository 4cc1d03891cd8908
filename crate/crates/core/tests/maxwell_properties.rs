//! Maxwell-pipeline properties: the time-domain bridge between the
//! reduced residuals and the harmonic fields, the β closed form, the
//! double-curl eigen-identity, and constitutive consistency.

mod common;

use common::norm_slice;
use contact_maxwell::{
    build_beta, fields_at, maxwell_residuals, parse, verify_theorem1, BoxDomain, Expr64, KForm64,
    Media, Metric64, SampleSet,
};

const TOL: f64 = 1e-9;

fn samples() -> SampleSet<f64> {
    SampleSet::generate(BoxDomain::unit_symmetric(), 400, 71)
}

fn e(s: &str) -> Expr64 {
    parse(s).unwrap()
}

fn plane_wave() -> KForm64 {
    KForm64::one_form(e("cos(2*z)"), e("-sin(2*z)"), e("0"))
}

fn heisenberg() -> (KForm64, Metric64) {
    (
        KForm64::one_form(e("-y"), e("0"), e("1")),
        Metric64::from_upper_triangle([
            e("0.5 + y^2"),
            e("0"),
            e("-y"),
            e("0.5"),
            e("0"),
            e("1"),
        ]),
    )
}

#[test]
fn time_derivative_of_b_matches_minus_de() {
    // Faraday bridge: when the reduced residual R1 vanishes, the centered
    // finite difference of B in t equals −dE evaluated as a 2-form.
    let alpha = plane_wave();
    let g = Metric64::euclidean();
    let omega = 2.0;
    let media = Media::isotropic(g);
    let beta = build_beta(media.g_mu(), &alpha, omega).unwrap();
    let s = samples();
    let report = maxwell_residuals(&alpha, &beta, &media, omega, &s).unwrap();
    assert!(report.r1.max <= 1e-10);

    let d_alpha = alpha.exterior_derivative().unwrap();
    let h = 1e-6;
    for (k, p) in s.points().iter().take(10).enumerate() {
        let t = -0.9 + 0.37 * k as f64;
        let plus = fields_at(&alpha, &beta, &media, omega, p, t + h).unwrap();
        let minus = fields_at(&alpha, &beta, &media, omega, p, t - h).unwrap();
        let de: Vec<f64> = d_alpha
            .evaluate(p)
            .unwrap()
            .iter()
            .map(|c| -c * (omega * t).cos())
            .collect();
        for i in 0..3 {
            let fd = (plus.b[i] - minus.b[i]) / (2.0 * h);
            assert!(
                (fd - de[i]).abs() <= 1e-6 * (1.0 + norm_slice(&de)),
                "∂B/∂t vs −dE mismatch at {p}, t={t}, slot {i}: {fd} vs {}",
                de[i]
            );
        }
    }
}

#[test]
fn beta_closed_form_for_all_frequencies() {
    let s = samples();
    let cases: Vec<(KForm64, Metric64)> = vec![
        (plane_wave(), Metric64::euclidean()),
        {
            let (a, g) = heisenberg();
            (a, g)
        },
    ];
    for (alpha, g) in cases {
        for omega in [2.0, 5.0, -3.0, 0.7, -0.2] {
            let out = verify_theorem1(&alpha, &g, omega, &s, TOL).unwrap();
            assert!(
                out.report.beta_closed_form.max <= 1e-10,
                "β ≠ −sign(ω)α for ω={omega}: {}",
                out.report.beta_closed_form.max
            );
            let sign = omega.signum();
            for p in s.points().iter().take(25) {
                let av = alpha.evaluate(p).unwrap();
                let bv = out.beta.evaluate(p).unwrap();
                for i in 0..3 {
                    assert!((bv[i] + sign * av[i]).abs() <= 1e-10 * (1.0 + norm_slice(&av)));
                }
            }
        }
    }
}

#[test]
fn double_curl_eigen_identity() {
    // Whenever dα = |ω| ∗α holds to tol, ∗d∗dα = ω²α holds to 10·tol.
    let s = samples();
    let (h_alpha, h_g) = heisenberg();
    let cases: Vec<(KForm64, Metric64)> = vec![(plane_wave(), Metric64::euclidean()), (h_alpha, h_g)];
    for (alpha, g) in cases {
        for omega in [2.0, 5.0, -3.0] {
            let out = verify_theorem1(&alpha, &g, omega, &s, TOL).unwrap();
            // the rescaled media satisfy dα = |ω| ∗α by construction
            assert!(
                out.report.r1.max <= TOL,
                "pipeline residual out of tolerance"
            );
            assert!(
                out.report.double_curl.max <= 10.0 * TOL,
                "double curl residual {} for ω={omega}",
                out.report.double_curl.max
            );
        }
    }
}

#[test]
fn constitutive_checks_are_tight() {
    let s = samples();
    let alpha = plane_wave();
    let out = verify_theorem1(&alpha, &Metric64::euclidean(), 5.0, &s, TOL).unwrap();
    assert!(out.report.c1.max <= 1e-12, "c1 = {}", out.report.c1.max);
    assert!(out.report.c2.max <= 1e-12, "c2 = {}", out.report.c2.max);
}

#[test]
fn anisotropic_media_are_supported() {
    // Different ε and μ metrics: residual bookkeeping still works; for an
    // arbitrary pairing the system is generally violated, and the report
    // says so rather than erroring.
    let alpha = plane_wave();
    let g_eps = Metric64::euclidean();
    let g_mu = Metric64::diagonal(e("2"), e("1"), e("1"));
    let media = Media::new(g_eps, g_mu.clone());
    let beta = build_beta(&g_mu, &alpha, 2.0).unwrap();
    let report = maxwell_residuals(&alpha, &beta, &media, 2.0, &samples()).unwrap();
    // R1 holds by the construction of β; R2 generally fails here.
    assert!(report.r1.max <= 1e-10);
    assert!(report.r2.max > 1e-3);
}
