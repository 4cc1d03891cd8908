//! Shared helpers for the property suites: deterministic generators for
//! expressions, forms and SPD metrics, plus an orthonormal-coframe Hodge
//! oracle that is independent of the index-formula implementation.

#![allow(dead_code)]

use contact_maxwell::{Expr64, KForm64, Metric64, Point64, Var};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    lo + u * (hi - lo)
}

pub fn pick(rng: &mut ChaCha8Rng, n: usize) -> usize {
    (rng.next_u64() % n as u64) as usize
}

fn leaf(rng: &mut ChaCha8Rng) -> Expr64 {
    match pick(rng, 4) {
        0 => Expr64::constant((uniform(rng, -2.0, 2.0) * 64.0).round() / 64.0),
        1 => Expr64::var(Var::X),
        2 => Expr64::var(Var::Y),
        _ => Expr64::var(Var::Z),
    }
}

/// Random polynomial/trig expression: total on the chart, no quotients.
pub fn random_polytrig(rng: &mut ChaCha8Rng, depth: usize) -> Expr64 {
    if depth == 0 {
        return leaf(rng);
    }
    match pick(rng, 8) {
        0 => Expr64::add(random_polytrig(rng, depth - 1), random_polytrig(rng, depth - 1)),
        1 => Expr64::sub(random_polytrig(rng, depth - 1), random_polytrig(rng, depth - 1)),
        2 | 3 => Expr64::mul(random_polytrig(rng, depth - 1), random_polytrig(rng, depth - 1)),
        4 => Expr64::neg(random_polytrig(rng, depth - 1)),
        5 => Expr64::sin(random_polytrig(rng, depth - 1)),
        6 => Expr64::cos(random_polytrig(rng, depth - 1)),
        _ => Expr64::powi(random_polytrig(rng, depth - 1), 2 + pick(rng, 2) as i32),
    }
}

/// Random expression exercising the whole grammar while staying smooth on
/// the chart: quotients and square roots are guarded by `c + e²` with
/// `c ≥ 1`, and exponentials are damped.
pub fn random_smooth(rng: &mut ChaCha8Rng, depth: usize) -> Expr64 {
    if depth == 0 {
        return leaf(rng);
    }
    match pick(rng, 10) {
        0 => Expr64::add(random_smooth(rng, depth - 1), random_smooth(rng, depth - 1)),
        1 => Expr64::sub(random_smooth(rng, depth - 1), random_smooth(rng, depth - 1)),
        2 | 3 => Expr64::mul(random_smooth(rng, depth - 1), random_smooth(rng, depth - 1)),
        4 => Expr64::neg(random_smooth(rng, depth - 1)),
        5 => Expr64::sin(random_smooth(rng, depth - 1)),
        6 => Expr64::cos(random_smooth(rng, depth - 1)),
        7 => Expr64::exp(Expr64::mul(
            Expr64::constant(0.5),
            random_smooth(rng, depth - 1),
        )),
        8 => Expr64::div(random_smooth(rng, depth - 1), positive_guard(rng, depth - 1)),
        _ => Expr64::sqrt(positive_guard(rng, depth - 1)),
    }
}

/// `c + e²` with `c ∈ [1, 3]`: strictly positive everywhere.
fn positive_guard(rng: &mut ChaCha8Rng, depth: usize) -> Expr64 {
    Expr64::add(
        Expr64::constant(uniform(rng, 1.0, 3.0)),
        Expr64::powi(random_polytrig(rng, depth.min(2)), 2),
    )
}

/// Random form of the given degree with polynomial/trig coefficients.
pub fn random_form(rng: &mut ChaCha8Rng, degree: u8, depth: usize) -> KForm64 {
    let n = if degree == 0 || degree == 3 { 1 } else { 3 };
    let coeffs: Vec<Expr64> = (0..n).map(|_| random_polytrig(rng, depth)).collect();
    KForm64::new(degree, coeffs).unwrap()
}

/// Random constant SPD metric `Q diag(λ) Qᵀ` with eigenvalues in
/// `[0.1, 10]` — a symmetric perturbation of the identity with clamped
/// spectrum.
pub fn random_const_spd(rng: &mut ChaCha8Rng) -> Metric64 {
    let q = random_orthogonal(rng);
    let lambda = [
        uniform(rng, 0.1, 10.0),
        uniform(rng, 0.1, 10.0),
        uniform(rng, 0.1, 10.0),
    ];
    let mut m = [[0.0f64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = 0.0;
            for (k, l) in lambda.iter().enumerate() {
                acc += q[i][k] * l * q[j][k];
            }
            m[i][j] = acc;
        }
    }
    Metric64::from_upper_triangle([
        Expr64::constant(m[0][0]),
        Expr64::constant(m[0][1]),
        Expr64::constant(m[0][2]),
        Expr64::constant(m[1][1]),
        Expr64::constant(m[1][2]),
        Expr64::constant(m[2][2]),
    ])
}

/// Random position-dependent SPD metric `Q diag(λ_k(x)) Qᵀ` with
/// `λ_k(x) = c_k (1 + 0.3 sin(a·x + b·y + d·z))`, so the spectrum stays in
/// `[0.7 c_k, 1.3 c_k]` and the metric is SPD on the whole chart.
pub fn random_varying_spd(rng: &mut ChaCha8Rng) -> Metric64 {
    let q = random_orthogonal(rng);
    let lambda: Vec<Expr64> = (0..3)
        .map(|_| {
            let c = uniform(rng, 0.3, 4.0);
            let lin = Expr64::add(
                Expr64::add(
                    Expr64::mul(Expr64::constant(uniform(rng, -1.0, 1.0)), Expr64::var(Var::X)),
                    Expr64::mul(Expr64::constant(uniform(rng, -1.0, 1.0)), Expr64::var(Var::Y)),
                ),
                Expr64::mul(Expr64::constant(uniform(rng, -1.0, 1.0)), Expr64::var(Var::Z)),
            );
            Expr64::mul(
                Expr64::constant(c),
                Expr64::add(
                    Expr64::constant(1.0),
                    Expr64::mul(Expr64::constant(0.3), Expr64::sin(lin)),
                ),
            )
        })
        .collect();
    let entry = |i: usize, j: usize| {
        let mut acc = Expr64::constant(0.0);
        for (k, l) in lambda.iter().enumerate() {
            acc = Expr64::add(
                acc,
                Expr64::mul(Expr64::constant(q[i][k] * q[j][k]), l.clone()),
            );
        }
        acc
    };
    Metric64::from_upper_triangle([
        entry(0, 0),
        entry(0, 1),
        entry(0, 2),
        entry(1, 1),
        entry(1, 2),
        entry(2, 2),
    ])
}

/// Random rotation matrix via Euclidean Gram-Schmidt, orientation fixed.
pub fn random_orthogonal(rng: &mut ChaCha8Rng) -> [[f64; 3]; 3] {
    loop {
        let mut v = [[0.0f64; 3]; 3];
        for row in v.iter_mut() {
            for c in row.iter_mut() {
                *c = uniform(rng, -1.0, 1.0);
            }
        }
        let Some(q) = gram_schmidt_euclid(&v) else {
            continue;
        };
        return q;
    }
}

fn gram_schmidt_euclid(v: &[[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let mut q = [[0.0f64; 3]; 3];
    for i in 0..3 {
        let mut u = v[i];
        for j in 0..i {
            let proj = dot(&u, &q[j]);
            for k in 0..3 {
                u[k] -= proj * q[j][k];
            }
        }
        let n = norm(&u);
        if n < 1e-6 {
            return None;
        }
        for k in 0..3 {
            q[i][k] = u[k] / n;
        }
    }
    // rows are orthonormal; flip one to fix a right-handed orientation
    if det3(&q) < 0.0 {
        for k in 0..3 {
            q[2][k] = -q[2][k];
        }
    }
    // return as columns
    let mut out = [[0.0f64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = q[j][i];
        }
    }
    Some(out)
}

pub fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: &[f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_slice(a: &[f64]) -> f64 {
    a.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

pub fn inv3(m: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let d = det3(m);
    let adj = |r1: usize, c1: usize, r2: usize, c2: usize| {
        m[r1][c1] * m[r2][c2] - m[r1][c2] * m[r2][c1]
    };
    [
        [adj(1, 1, 2, 2) / d, -adj(0, 1, 2, 2) / d, adj(0, 1, 1, 2) / d],
        [-adj(1, 0, 2, 2) / d, adj(0, 0, 2, 2) / d, -adj(0, 0, 1, 2) / d],
        [adj(1, 0, 2, 1) / d, -adj(0, 0, 2, 1) / d, adj(0, 0, 1, 1) / d],
    ]
}

fn solve3(m: &[[f64; 3]; 3], rhs: &[f64; 3]) -> [f64; 3] {
    let inv = inv3(m);
    let mut out = [0.0f64; 3];
    for i in 0..3 {
        out[i] = dot(&inv[i], rhs);
    }
    out
}

/// Hodge star at a single point computed through a `g`-orthonormal coframe
/// obtained by Gram-Schmidt of the coordinate frame. Wholly numeric, no
/// shared code with the symbolic index-formula star.
pub struct FrameStar {
    /// Columns are the orthonormal frame vectors.
    b: [[f64; 3]; 3],
    /// Rows are the dual coframe covectors (`a = b⁻¹`).
    a: [[f64; 3]; 3],
}

impl FrameStar {
    pub fn at(g: &[[f64; 3]; 3]) -> FrameStar {
        let inner = |u: &[f64; 3], v: &[f64; 3]| {
            let mut acc = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    acc += u[i] * g[i][j] * v[j];
                }
            }
            acc
        };
        let mut frame = [[0.0f64; 3]; 3]; // rows, converted to columns below
        let basis = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        for i in 0..3 {
            let mut u = basis[i];
            for j in 0..i {
                let proj = inner(&basis[i], &frame[j]);
                for k in 0..3 {
                    u[k] -= proj * frame[j][k];
                }
            }
            let n = inner(&u, &u).sqrt();
            for k in 0..3 {
                frame[i][k] = u[k] / n;
            }
        }
        let mut b = [[0.0f64; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                b[i][j] = frame[j][i];
            }
        }
        let a = inv3(&b);
        FrameStar { b, a }
    }

    fn coframe_volume(&self) -> f64 {
        det3(&self.a)
    }

    /// `∗` of a 0-form coefficient: 3-form coefficient.
    pub fn star0(&self, c: f64) -> f64 {
        c * self.coframe_volume()
    }

    /// `∗` of 1-form coefficients `[dx, dy, dz]`: 2-form slot coefficients.
    pub fn star1(&self, w: &[f64; 3]) -> [f64; 3] {
        // components in the coframe: ŵ_a = Σ_i B_ia w_i
        let mut hat = [0.0f64; 3];
        for a in 0..3 {
            for i in 0..3 {
                hat[a] += self.b[i][a] * w[i];
            }
        }
        // ∗θᵃ = θᵇ∧θᶜ (cyclic); expand in the coordinate slot basis
        let mut out = [0.0f64; 3];
        for a in 0..3 {
            let wedge = cross(&self.a[(a + 1) % 3], &self.a[(a + 2) % 3]);
            for k in 0..3 {
                out[k] += hat[a] * wedge[k];
            }
        }
        out
    }

    /// `∗` of 2-form slot coefficients: 1-form coefficients.
    pub fn star2(&self, s: &[f64; 3]) -> [f64; 3] {
        // express the 2-form in the coframe wedge basis, then ∗(θᵇ∧θᶜ) = θᵃ
        let mut k = [[0.0f64; 3]; 3];
        for a in 0..3 {
            let wedge = cross(&self.a[(a + 1) % 3], &self.a[(a + 2) % 3]);
            for r in 0..3 {
                k[r][a] = wedge[r];
            }
        }
        let hat = solve3(&k, s);
        let mut out = [0.0f64; 3];
        for a in 0..3 {
            for i in 0..3 {
                out[i] += hat[a] * self.a[a][i];
            }
        }
        out
    }

    /// `∗` of a 3-form coefficient: 0-form coefficient.
    pub fn star3(&self, v: f64) -> f64 {
        v / self.coframe_volume()
    }
}

/// Evaluates every coefficient of a form at a point, as a plain vector.
pub fn eval_form(form: &KForm64, p: &Point64) -> Vec<f64> {
    form.evaluate(p).unwrap()
}
