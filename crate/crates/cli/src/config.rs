//! Session configuration and construction of the bivector and product.

use crate::parse::{parse_poly_expr, ParseError};
use crate::render::{parse_matrix, parse_operator, OperatorError, TermSpec};
use naq_core::{Bivector, Check, Polynomial, StarProduct};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SessionConfig {
    pub dimension: usize,
    pub truncation_order: usize,
    pub bivector: BivectorSpec,
    pub product: ProductSpec,
    #[serde(default)]
    pub checks: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate_degree_override: Option<u32>,
    #[serde(default)]
    pub corpus_seed: u64,
    /// Random above-bound tuples tried per holding verdict.
    #[serde(default = "default_backstop")]
    pub backstop_tuples: u32,
}

fn default_backstop() -> u32 {
    8
}

/// Named constructors; expressions are strings in the polynomial grammar
/// and indices are one-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BivectorSpec {
    Zero,
    /// The standard symplectic form; the dimension must be even.
    Symplectic,
    Constant { matrix: Vec<Vec<String>> },
    Linear { structure_constants: Vec<(usize, usize, usize, String)> },
    Su2,
    Heisenberg,
    Monopole {
        #[serde(default = "radial_field")]
        field: [String; 3],
    },
    Custom { matrix: Vec<Vec<String>> },
}

fn radial_field() -> [String; 3] {
    ["x1".into(), "x2".into(), "x3".into()]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProductSpec {
    Moyal,
    Flexible,
    /// Corrections `C_1, C_2, ...` inline or in a JSON file holding
    /// `{"corrections": [...]}`, resolved against the config's directory.
    Custom {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        corrections: Option<Vec<Vec<TermSpec>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        file: Option<String>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrectionsFile {
    pub corrections: Vec<Vec<TermSpec>>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Invalid(String),
    #[error("{context}: {source}")]
    Parse { context: String, source: ParseError },
    #[error("correction C_{index}: {source}")]
    Operator { index: usize, source: OperatorError },
    #[error(transparent)]
    Core(#[from] naq_core::Error),
}

impl SessionConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let config: SessionConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.dimension < 1 {
            return Err(ConfigError::Invalid("dimension must be at least 1".into()));
        }
        if self.truncation_order < 1 {
            return Err(ConfigError::Invalid("truncation_order must be at least 1".into()));
        }
        self.requested_checks()?;
        Ok(())
    }

    /// Requested checks in catalogue order; `"all"` selects every check.
    pub fn requested_checks(&self) -> Result<Vec<Check>, ConfigError> {
        let mut wanted = Vec::new();
        for name in &self.checks {
            if name == "all" {
                wanted.extend(Check::ALL);
                continue;
            }
            match Check::ALL.iter().find(|c| c.as_str() == name) {
                Some(c) => wanted.push(*c),
                None => {
                    let known: Vec<&str> = Check::ALL.iter().map(|c| c.as_str()).collect();
                    return Err(ConfigError::Invalid(format!("unknown check '{name}'; expected one of {}, all", known.join(", "))));
                }
            }
        }
        Ok(Check::ALL.into_iter().filter(|c| wanted.contains(c)).collect())
    }

    pub fn build_bivector(&self) -> Result<Bivector, ConfigError> {
        let n = self.dimension;
        let need = |dim: usize, what: &str| {
            if n == dim {
                Ok(())
            } else {
                Err(ConfigError::Invalid(format!("{what} bivector needs dimension {dim}, got {n}")))
            }
        };
        let poly = |text: &str, context: String| parse_poly_expr(text, n).map_err(|source| ConfigError::Parse { context, source });
        let matrix = |rows: &[Vec<String>]| -> Result<Vec<Vec<Polynomial>>, ConfigError> {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(ConfigError::Invalid(format!("bivector matrix must be {n} x {n}")));
            }
            parse_matrix(rows, n).map_err(|source| ConfigError::Parse { context: "bivector matrix".into(), source })
        };
        Ok(match &self.bivector {
            BivectorSpec::Zero => Bivector::zero(n),
            BivectorSpec::Symplectic => {
                if n % 2 != 0 {
                    return Err(ConfigError::Invalid(format!("symplectic bivector needs an even dimension, got {n}")));
                }
                Bivector::symplectic(n / 2)
            }
            BivectorSpec::Constant { matrix: rows } => {
                let entries = matrix(rows)?;
                for (i, row) in entries.iter().enumerate() {
                    for (j, e) in row.iter().enumerate() {
                        if !e.is_constant() {
                            return Err(ConfigError::Invalid(format!("constant bivector entry ({}, {}) is not constant", i + 1, j + 1)));
                        }
                    }
                }
                Bivector::from_matrix(entries)?
            }
            BivectorSpec::Custom { matrix: rows } => Bivector::from_matrix(matrix(rows)?)?,
            BivectorSpec::Linear { structure_constants } => {
                let mut constants = Vec::new();
                for (t, (i, j, k, c)) in structure_constants.iter().enumerate() {
                    if [*i, *j, *k].iter().any(|&a| a < 1 || a > n) {
                        return Err(ConfigError::Invalid(format!("structure constant {t}: indices are one-based and at most {n}")));
                    }
                    let value = poly(c, format!("structure constant {t}"))?;
                    if !value.is_constant() {
                        return Err(ConfigError::Invalid(format!("structure constant {t} is not a number")));
                    }
                    constants.push((i - 1, j - 1, k - 1, value.constant_term()));
                }
                Bivector::linear(n, constants)?
            }
            BivectorSpec::Su2 => {
                need(3, "su2")?;
                Bivector::su2()
            }
            BivectorSpec::Heisenberg => {
                need(3, "heisenberg")?;
                Bivector::heisenberg()
            }
            BivectorSpec::Monopole { field } => {
                need(6, "monopole")?;
                let [b1, b2, b3] = field;
                Bivector::monopole([poly(b1, "field B1".into())?, poly(b2, "field B2".into())?, poly(b3, "field B3".into())?])?
            }
        })
    }

    /// Builds the product; `base` resolves a relative corrections file.
    pub fn build_product(&self, p: &Bivector, base: &Path) -> Result<StarProduct, ConfigError> {
        let k = self.truncation_order;
        Ok(match &self.product {
            ProductSpec::Moyal => StarProduct::moyal(p, k)?,
            ProductSpec::Flexible => StarProduct::flexible(p, k)?,
            ProductSpec::Custom { corrections, file } => {
                let terms = match (corrections, file) {
                    (Some(c), None) => c.clone(),
                    (None, Some(f)) => {
                        let path = base.join(f);
                        let text = std::fs::read_to_string(&path).map_err(|source| ConfigError::Io { path, source })?;
                        serde_json::from_str::<CorrectionsFile>(&text)?.corrections
                    }
                    _ => return Err(ConfigError::Invalid("custom product needs exactly one of corrections, file".into())),
                };
                let ops = terms
                    .iter()
                    .enumerate()
                    .map(|(i, t)| parse_operator(t, self.dimension).map_err(|source| ConfigError::Operator { index: i + 1, source }))
                    .collect::<Result<Vec<_>, _>>()?;
                StarProduct::custom(p, ops, k)?
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(body: &str) -> Result<SessionConfig, ConfigError> {
        SessionConfig::from_json(body)
    }

    #[test]
    fn minimal_config_defaults() {
        let c = config(r#"{"dimension": 3, "truncation_order": 2, "bivector": {"kind": "su2"}, "product": {"kind": "flexible"}}"#)
            .unwrap();
        assert!(c.checks.is_empty());
        assert_eq!(c.corpus_seed, 0);
        assert_eq!(c.backstop_tuples, 8);
        assert!(c.build_bivector().unwrap().jacobi_check().holds());
    }

    #[test]
    fn invalid_configs() {
        assert!(matches!(config("{"), Err(ConfigError::Json(_))));
        assert!(matches!(
            config(r#"{"dimension": 3, "truncation_order": 0, "bivector": {"kind": "su2"}, "product": {"kind": "moyal"}}"#),
            Err(ConfigError::Invalid(_))
        ));
        assert!(matches!(
            config(r#"{"dimension": 3, "truncation_order": 1, "bivector": {"kind": "su2"}, "product": {"kind": "moyal"}, "checks": ["jordan"]}"#),
            Err(ConfigError::Invalid(_))
        ));
        assert!(config(r#"{"dimension": 3, "truncation_order": 1, "bivector": {"kind": "su2"}, "product": {"kind": "moyal"}, "extra": 1}"#).is_err());
    }

    #[test]
    fn moyal_on_su2_surfaces_the_precondition() {
        let c = config(r#"{"dimension": 3, "truncation_order": 2, "bivector": {"kind": "su2"}, "product": {"kind": "moyal"}}"#).unwrap();
        let p = c.build_bivector().unwrap();
        let err = c.build_product(&p, Path::new(".")).unwrap_err();
        assert!(matches!(err, ConfigError::Core(naq_core::Error::NonConstantBivector { .. })));
    }

    #[test]
    fn explicit_bivectors() {
        let c = config(
            r#"{"dimension": 3, "truncation_order": 1, "product": {"kind": "flexible"},
                "bivector": {"kind": "linear", "structure_constants": [[1, 2, 3, "1"], [2, 3, 1, "1"], [3, 1, 2, "1"]]}}"#,
        )
        .unwrap();
        assert_eq!(c.build_bivector().unwrap(), Bivector::su2());
        let c = config(
            r#"{"dimension": 2, "truncation_order": 1, "product": {"kind": "moyal"},
                "bivector": {"kind": "constant", "matrix": [["0", "x1"], ["-x1", "0"]]}}"#,
        )
        .unwrap();
        assert!(matches!(c.build_bivector(), Err(ConfigError::Invalid(_))));
        let c = config(
            r#"{"dimension": 2, "truncation_order": 1, "product": {"kind": "flexible"},
                "bivector": {"kind": "custom", "matrix": [["0", "x4"], ["-x4", "0"]]}}"#,
        )
        .unwrap();
        assert!(c.build_bivector().unwrap_err().to_string().contains("unknown variable"));
    }
}
