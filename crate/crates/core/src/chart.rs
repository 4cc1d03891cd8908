//! Coordinate-chart plumbing: the three chart variables, points, box
//! domains, and deterministic sample clouds.
//!
//! All computation happens on a single coordinate chart with coordinates
//! `(x, y, z)`. "For all points" claims are audited on a finite
//! [`SampleSet`] drawn uniformly from a box; regeneration from the same
//! `(seed, box, count)` triple is bit-identical, which is what makes
//! verification reports reproducible.

use std::fmt;

use rand_core::{RngCore, SeedableRng};

use crate::scalar::Scalar;

/// Identifier string for the sampling algorithm, recorded in reports.
///
/// ChaCha8 seeded through `seed_from_u64`, each coordinate mapped from the
/// top 53 bits of one `u64` draw into `[0, 1)` and affinely placed in the
/// box. The stream is fixed by the ChaCha specification, so the same seed
/// reproduces the same points on every platform.
pub const SAMPLER_ID: &str = "chacha8-u53";

/// One of the three chart coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Var {
    X,
    Y,
    Z,
}

impl Var {
    /// All variables in coordinate order.
    pub const ALL: [Var; 3] = [Var::X, Var::Y, Var::Z];

    /// Zero-based coordinate index.
    pub fn index(self) -> usize {
        match self {
            Var::X => 0,
            Var::Y => 1,
            Var::Z => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
            Var::Z => "z",
        }
    }

    /// Parses `"x" | "y" | "z"`.
    pub fn from_name(name: &str) -> Option<Var> {
        match name {
            "x" => Some(Var::X),
            "y" => Some(Var::Y),
            "z" => Some(Var::Z),
            _ => None,
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A point of the chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Scalar> Point<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Point { x, y, z }
    }

    pub fn origin() -> Self {
        Point::new(T::zero(), T::zero(), T::zero())
    }

    /// Coordinate by variable.
    pub fn coord(&self, var: Var) -> T {
        match var {
            Var::X => self.x,
            Var::Y => self.y,
            Var::Z => self.z,
        }
    }

    /// Returns a copy with `var` shifted by `delta` (used by finite-difference checks).
    pub fn shifted(&self, var: Var, delta: T) -> Self {
        let mut p = *self;
        match var {
            Var::X => p.x = p.x + delta,
            Var::Y => p.y = p.y + delta,
            Var::Z => p.z = p.z + delta,
        }
        p
    }

    pub fn to_array(&self) -> [T; 3] {
        [self.x, self.y, self.z]
    }
}

impl<T: Scalar> fmt::Display for Point<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// Axis-aligned box domain with componentwise `min < max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxDomain<T> {
    min: [T; 3],
    max: [T; 3],
}

/// Error raised by [`BoxDomain::new`] when a box is degenerate.
#[derive(Debug, Clone, thiserror::Error)]
#[error("invalid box: min[{axis}] = {min} must be strictly less than max[{axis}] = {max}")]
pub struct InvalidBox<T: Scalar> {
    pub axis: usize,
    pub min: T,
    pub max: T,
}

impl<T: Scalar> BoxDomain<T> {
    pub fn new(min: [T; 3], max: [T; 3]) -> Result<Self, InvalidBox<T>> {
        for axis in 0..3 {
            if !(min[axis] < max[axis]) || !min[axis].is_finite() || !max[axis].is_finite() {
                return Err(InvalidBox {
                    axis,
                    min: min[axis],
                    max: max[axis],
                });
            }
        }
        Ok(BoxDomain { min, max })
    }

    /// The symmetric unit box `[-1, 1]^3`, the default verification domain.
    pub fn unit_symmetric() -> Self {
        let one = T::one();
        BoxDomain {
            min: [-one, -one, -one],
            max: [one, one, one],
        }
    }

    pub fn min(&self) -> [T; 3] {
        self.min
    }

    pub fn max(&self) -> [T; 3] {
        self.max
    }

    pub fn contains(&self, p: &Point<T>) -> bool {
        let c = p.to_array();
        (0..3).all(|i| self.min[i] <= c[i] && c[i] <= self.max[i])
    }
}

/// Deterministic pseudo-random point cloud in a box domain.
///
/// A finite stand-in for "at every point of the chart": verification
/// drivers evaluate symbolic identities on these points and report
/// worst-case residuals with witness points.
#[derive(Debug, Clone)]
pub struct SampleSet<T> {
    points: Vec<Point<T>>,
    seed: u64,
    domain: BoxDomain<T>,
}

impl<T: Scalar> SampleSet<T> {
    /// Draws `count` points uniformly from `domain` using the documented
    /// [`SAMPLER_ID`] stream. Same inputs, same points, bit for bit.
    pub fn generate(domain: BoxDomain<T>, count: usize, seed: u64) -> Self {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let min: Vec<f64> = domain.min().iter().map(|v| v.to_f64().unwrap()).collect();
        let max: Vec<f64> = domain.max().iter().map(|v| v.to_f64().unwrap()).collect();
        let mut points = Vec::with_capacity(count);
        for _ in 0..count {
            let mut c = [T::zero(); 3];
            for axis in 0..3 {
                let u = unit_f64(rng.next_u64());
                c[axis] = T::from_f64_lossy(min[axis] + u * (max[axis] - min[axis]));
            }
            points.push(Point::new(c[0], c[1], c[2]));
        }
        SampleSet {
            points,
            seed,
            domain,
        }
    }

    pub fn points(&self) -> &[Point<T>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn domain(&self) -> &BoxDomain<T> {
        &self.domain
    }
}

/// Top 53 bits of a draw, scaled into `[0, 1)`.
fn unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
