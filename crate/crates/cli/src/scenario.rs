//! Scenario files: the JSON schema, semantic validation, and the built-in
//! example scenarios.
//!
//! A scenario names a 1-form `alpha`, a metric (the string `"euclidean"`
//! or six upper-triangle expression strings `g11,g12,g13,g22,g23,g33`),
//! the checks to run, and the sampling parameters. Validation errors carry
//! the offending field path and map to exit code 2.

use contact_maxwell::{parse, Box64, Expr64, KForm64, Metric64};
use serde::Deserialize;

pub const DEFAULT_SAMPLES: usize = contact_maxwell::DEFAULT_SAMPLES;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_TOL: f64 = contact_maxwell::DEFAULT_TOL;

/// Schema violation with the path of the offending field.
#[derive(Debug, thiserror::Error)]
#[error("schema violation at `{path}`: {message}")]
pub struct SchemaError {
    pub path: String,
    pub message: String,
}

fn schema_err<T>(path: &str, message: impl Into<String>) -> Result<T, SchemaError> {
    Err(SchemaError {
        path: path.to_string(),
        message: message.into(),
    })
}

/// The checks a scenario can request.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    Contact,
    Beltrami,
    Adapted,
    Theorem1,
    Maxwell,
}

impl CheckKind {
    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Contact => "contact",
            CheckKind::Beltrami => "beltrami",
            CheckKind::Adapted => "adapted",
            CheckKind::Theorem1 => "theorem1",
            CheckKind::Maxwell => "maxwell",
        }
    }

    fn needs_omega(self) -> bool {
        matches!(self, CheckKind::Theorem1 | CheckKind::Maxwell)
    }

    fn needs_metric(self) -> bool {
        !matches!(self, CheckKind::Contact)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum MetricSpec {
    Named(String),
    UpperTriangle([String; 6]),
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub min: [f64; 3],
    pub max: [f64; 3],
}

fn default_domain() -> DomainSpec {
    DomainSpec {
        min: [-1.0, -1.0, -1.0],
        max: [1.0, 1.0, 1.0],
    }
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

/// Raw scenario as read from JSON.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: Option<String>,
    pub alpha: [String; 3],
    pub metric: MetricSpec,
    #[serde(default)]
    pub omega: Option<f64>,
    #[serde(default = "default_domain")]
    pub domain: DomainSpec,
    pub checks: Vec<CheckKind>,
    #[serde(default)]
    pub beta_override: Option<[String; 3]>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

/// Scenario after parsing every expression and checking the invariants.
#[derive(Debug, Clone)]
pub struct CompiledScenario {
    pub name: String,
    pub alpha: KForm64,
    pub metric: Metric64,
    pub omega: Option<f64>,
    pub domain: Box64,
    pub domain_spec: DomainSpec,
    pub checks: Vec<CheckKind>,
    pub beta_override: Option<KForm64>,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
}

fn parse_field(path: &str, text: &str) -> Result<Expr64, SchemaError> {
    parse(text).map_err(|e| SchemaError {
        path: path.to_string(),
        message: e.to_string(),
    })
}

impl Scenario {
    pub fn compile(&self) -> Result<CompiledScenario, SchemaError> {
        if self.samples < 1 {
            return schema_err("samples", "must be at least 1");
        }
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return schema_err("tol", "must be a positive real");
        }
        if self.checks.is_empty() {
            return schema_err("checks", "at least one check must be requested");
        }
        for axis in 0..3 {
            if !(self.domain.min[axis] < self.domain.max[axis]) {
                return schema_err(
                    &format!("domain.min[{axis}]"),
                    format!(
                        "must be strictly less than domain.max[{axis}] ({} vs {})",
                        self.domain.min[axis], self.domain.max[axis]
                    ),
                );
            }
        }
        let domain = Box64::new(self.domain.min, self.domain.max)
            .map_err(|e| SchemaError {
                path: "domain".into(),
                message: e.to_string(),
            })?;

        if self.checks.iter().any(|c| c.needs_omega()) {
            match self.omega {
                Some(w) if w != 0.0 && w.is_finite() => {}
                Some(_) => {
                    return schema_err(
                        "omega",
                        "must be a nonzero real when checks include theorem1 or maxwell",
                    )
                }
                None => {
                    return schema_err(
                        "omega",
                        "required when checks include theorem1 or maxwell",
                    )
                }
            }
        }

        let a1 = parse_field("alpha[0]", &self.alpha[0])?;
        let a2 = parse_field("alpha[1]", &self.alpha[1])?;
        let a3 = parse_field("alpha[2]", &self.alpha[2])?;
        let alpha = KForm64::one_form(a1, a2, a3);

        let metric = match &self.metric {
            MetricSpec::Named(name) if name == "euclidean" => Metric64::euclidean(),
            MetricSpec::Named(name) => {
                return schema_err(
                    "metric",
                    format!(
                        "unknown metric name `{name}`; expected \"euclidean\" or six upper-triangle expressions"
                    ),
                )
            }
            MetricSpec::UpperTriangle(entries) => {
                let mut parsed = Vec::with_capacity(6);
                for (i, text) in entries.iter().enumerate() {
                    parsed.push(parse_field(&format!("metric[{i}]"), text)?);
                }
                let arr: [Expr64; 6] = parsed.try_into().expect("six entries");
                Metric64::from_upper_triangle(arr)
            }
        };

        let beta_override = match &self.beta_override {
            None => None,
            Some(entries) => {
                let b1 = parse_field("beta_override[0]", &entries[0])?;
                let b2 = parse_field("beta_override[1]", &entries[1])?;
                let b3 = parse_field("beta_override[2]", &entries[2])?;
                Some(KForm64::one_form(b1, b2, b3))
            }
        };

        // dedupe while preserving the requested execution order
        let mut checks = Vec::new();
        for c in &self.checks {
            if !checks.contains(c) {
                checks.push(*c);
            }
        }

        Ok(CompiledScenario {
            name: self.name.clone(),
            alpha,
            metric,
            omega: self.omega,
            domain,
            domain_spec: self.domain,
            checks,
            beta_override,
            samples: self.samples,
            seed: self.seed,
            tol: self.tol,
        })
    }
}

impl CompiledScenario {
    pub fn needs_metric(&self) -> bool {
        self.checks.iter().any(|c| c.needs_metric())
    }
}

/// A built-in example scenario with its expected verification outcome.
pub struct BuiltinScenario {
    pub name: &'static str,
    pub summary: &'static str,
    pub json: &'static str,
    /// Whether every declared check is expected to pass (exit code 0).
    pub expect_pass: bool,
}

pub const BUILTINS: [BuiltinScenario; 4] = [
    BuiltinScenario {
        name: "adapted-plane-wave",
        summary: "plane wave cos(2z)dx - sin(2z)dy, adapted to the Euclidean metric; all checks pass",
        json: include_str!("../scenarios/adapted-plane-wave.json"),
        expect_pass: true,
    },
    BuiltinScenario {
        name: "heisenberg-tight",
        summary: "tight contact form dz - y dx with its adapted metric, omega = -2; all checks pass",
        json: include_str!("../scenarios/heisenberg-tight.json"),
        expect_pass: true,
    },
    BuiltinScenario {
        name: "overtwisted-plane-wave",
        summary: "plane wave cos(z)dx + sin(z)dy with Beltrami factor -1; contact and beltrami checks only",
        json: include_str!("../scenarios/overtwisted-plane-wave.json"),
        expect_pass: true,
    },
    BuiltinScenario {
        name: "non-example-dz",
        summary: "alpha = dz is closed, hence no contact form; the contact check fails by design",
        json: include_str!("../scenarios/non-example-dz.json"),
        expect_pass: false,
    },
];

pub fn builtin(name: &str) -> Option<&'static BuiltinScenario> {
    BUILTINS.iter().find(|b| b.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal(checks: &str, omega: &str) -> String {
        format!(
            r#"{{
                "name": "t",
                "alpha": ["0", "x", "1"],
                "metric": "euclidean",
                {omega}
                "checks": [{checks}]
            }}"#
        )
    }

    #[test]
    fn builtins_parse_and_compile() {
        for b in &BUILTINS {
            let sc: Scenario = serde_json::from_str(b.json).unwrap();
            assert_eq!(sc.name, b.name);
            sc.compile().unwrap();
        }
    }

    #[test]
    fn omega_required_for_maxwell_checks() {
        let sc: Scenario =
            serde_json::from_str(&minimal("\"theorem1\"", "")).unwrap();
        let err = sc.compile().unwrap_err();
        assert_eq!(err.path, "omega");

        let sc: Scenario =
            serde_json::from_str(&minimal("\"maxwell\"", "\"omega\": 0.0,")).unwrap();
        let err = sc.compile().unwrap_err();
        assert_eq!(err.path, "omega");

        let sc: Scenario = serde_json::from_str(&minimal("\"contact\"", "")).unwrap();
        sc.compile().unwrap();
    }

    #[test]
    fn expression_errors_carry_field_paths() {
        let text = r#"{
            "name": "t",
            "alpha": ["0", "dq", "1"],
            "metric": "euclidean",
            "checks": ["contact"]
        }"#;
        let sc: Scenario = serde_json::from_str(text).unwrap();
        let err = sc.compile().unwrap_err();
        assert_eq!(err.path, "alpha[1]");
        assert!(err.message.contains("unknown identifier"));
    }

    #[test]
    fn degenerate_domain_is_rejected() {
        let text = r#"{
            "name": "t",
            "alpha": ["0", "x", "1"],
            "metric": "euclidean",
            "domain": {"min": [0, -1, -1], "max": [0, 1, 1]},
            "checks": ["contact"]
        }"#;
        let sc: Scenario = serde_json::from_str(text).unwrap();
        let err = sc.compile().unwrap_err();
        assert!(err.path.starts_with("domain.min[0]"));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{
            "name": "t",
            "alpha": ["0", "x", "1"],
            "metric": "euclidean",
            "checks": ["contact"],
            "selfadjoint": true
        }"#;
        assert!(serde_json::from_str::<Scenario>(text).is_err());
    }

    #[test]
    fn duplicate_checks_are_deduped_in_order() {
        let sc: Scenario = serde_json::from_str(&minimal(
            "\"beltrami\", \"contact\", \"beltrami\"",
            "",
        ))
        .unwrap();
        let compiled = sc.compile().unwrap();
        assert_eq!(
            compiled.checks,
            vec![CheckKind::Beltrami, CheckKind::Contact]
        );
    }
}
