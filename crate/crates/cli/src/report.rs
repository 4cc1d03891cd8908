//! Machine-readable verification reports.
//!
//! The report is a single JSON object
//! `{scenario, seed, samples, sampler, tol, domain, omega?, checks, pass, timestamp}`
//! with one entry per executed check under `checks`, in execution order.
//! Numbers serialize as shortest round-trip decimals, and everything
//! except `timestamp` is a pure function of the scenario and seed, so two
//! runs with the same inputs produce byte-identical reports modulo that
//! field.

use contact_maxwell::{Point64, ResidualReport};
use indexmap::IndexMap;
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct Report {
    pub scenario: String,
    pub seed: u64,
    pub samples: usize,
    pub sampler: &'static str,
    pub tol: f64,
    pub domain: DomainOut,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    pub checks: IndexMap<&'static str, CheckReport>,
    pub pass: bool,
    pub timestamp: String,
}

#[derive(Debug, Serialize)]
pub struct DomainOut {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

#[derive(Debug, Serialize)]
pub struct CheckReport {
    pub pass: bool,
    pub residuals: IndexMap<&'static str, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factor: Option<FactorOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub means: Option<IndexMap<&'static str, f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct FactorOut {
    pub is_rotational: bool,
    pub is_constant: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constant_value: Option<f64>,
    pub min: f64,
    pub max: f64,
}

impl CheckReport {
    pub fn failure(message: String) -> CheckReport {
        CheckReport {
            pass: false,
            residuals: IndexMap::new(),
            witness: None,
            sign: None,
            factor: None,
            means: None,
            error: Some(message),
        }
    }
}

pub fn point_array(p: &Point64) -> [f64; 3] {
    [p.x, p.y, p.z]
}

/// Flattens a residual report into `(max values, means, worst witness)`.
pub fn residual_maps(
    report: &ResidualReport<f64>,
) -> (
    IndexMap<&'static str, f64>,
    IndexMap<&'static str, f64>,
    [f64; 3],
) {
    let mut maxes = IndexMap::new();
    let mut means = IndexMap::new();
    let mut worst = f64::NEG_INFINITY;
    let mut witness = [0.0f64; 3];
    for (name, stat) in report.stats() {
        maxes.insert(name, stat.max);
        means.insert(name, stat.mean);
        if stat.max > worst {
            worst = stat.max;
            witness = point_array(&stat.argmax);
        }
    }
    (maxes, means, witness)
}
