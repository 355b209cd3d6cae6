//! JSON algebra files.
//!
//! ```json
//! {
//!   "name": "sphere-even:2",
//!   "field": {"kind": "rational"},
//!   "basis": [{"label": "1", "degree": 0}, {"label": "a", "degree": 2}],
//!   "products": []
//! }
//! ```
//!
//! Coefficients are strings so that exact rationals never pass through a
//! floating-point parser. Unknown keys are rejected.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::exactnum::{FieldSpec, NumError};
use crate::galg::{AlgebraPresentation, BasisElement, ProductEntry};

#[derive(Debug, Error)]
pub enum FileError {
    #[error("invalid JSON at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{context}: unknown basis label {label:?}")]
    UnknownLabel { context: String, label: String },
    #[error("{context}: {source}")]
    Coefficient { context: String, source: NumError },
    #[error("field: {0}")]
    Field(NumError),
}

impl From<serde_json::Error> for FileError {
    fn from(e: serde_json::Error) -> Self {
        FileError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    pub name: String,
    pub field: FieldJson,
    pub basis: Vec<BasisJson>,
    pub products: Vec<ProductJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FieldJson {
    Prime { p: u64 },
    Rational {},
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisJson {
    pub label: String,
    pub degree: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductJson {
    pub left: String,
    pub right: String,
    pub value: Vec<TermJson>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub coeff: String,
    pub basis: String,
}

impl AlgebraFile {
    pub fn parse(text: &str) -> Result<Self, FileError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("algebra files always serialize")
    }

    /// `sha256:<hex>` of the canonical compact serialization.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_vec(self).expect("algebra files always serialize");
        format!("sha256:{}", hex::encode(Sha256::digest(&canonical)))
    }

    /// Resolves labels and parses coefficients; axioms are checked later by
    /// `validate_algebra`.
    pub fn to_presentation(&self) -> Result<AlgebraPresentation, FileError> {
        let field = match self.field {
            FieldJson::Prime { p } => FieldSpec::prime(p).map_err(FileError::Field)?,
            FieldJson::Rational {} => FieldSpec::Rational,
        };
        let basis: Vec<BasisElement> = self
            .basis
            .iter()
            .map(|b| BasisElement {
                label: b.label.clone(),
                degree: b.degree,
            })
            .collect();
        let index = |label: &str, context: &str| {
            basis
                .iter()
                .position(|b| b.label == label)
                .ok_or_else(|| FileError::UnknownLabel {
                    context: context.to_string(),
                    label: label.to_string(),
                })
        };
        let mut products = Vec::with_capacity(self.products.len());
        for (n, entry) in self.products.iter().enumerate() {
            let context = format!("products[{n}] ({}·{})", entry.left, entry.right);
            let left = index(&entry.left, &context)?;
            let right = index(&entry.right, &context)?;
            let mut terms = Vec::with_capacity(entry.value.len());
            for term in &entry.value {
                let coeff = field.parse(&term.coeff).map_err(|source| FileError::Coefficient {
                    context: context.clone(),
                    source,
                })?;
                terms.push((coeff, index(&term.basis, &context)?));
            }
            products.push(ProductEntry { left, right, terms });
        }
        Ok(AlgebraPresentation {
            name: self.name.clone(),
            field,
            basis,
            products,
        })
    }

    pub fn from_presentation(p: &AlgebraPresentation) -> Self {
        let label = |i: usize| p.basis[i].label.clone();
        AlgebraFile {
            name: p.name.clone(),
            field: match p.field {
                FieldSpec::Prime { p } => FieldJson::Prime { p: p as u64 },
                FieldSpec::Rational => FieldJson::Rational {},
            },
            basis: p
                .basis
                .iter()
                .map(|b| BasisJson {
                    label: b.label.clone(),
                    degree: b.degree,
                })
                .collect(),
            products: p
                .products
                .iter()
                .map(|e| ProductJson {
                    left: label(e.left),
                    right: label(e.right),
                    value: e
                        .terms
                        .iter()
                        .map(|(c, k)| TermJson {
                            coeff: c.to_string(),
                            basis: label(*k),
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::builtins::surface;
    use crate::galg::validate_algebra;

    const TORUS: &str = r#"{
      "name": "torus",
      "field": {"kind": "rational"},
      "basis": [
        {"label": "1", "degree": 0},
        {"label": "a", "degree": 1},
        {"label": "b", "degree": 1},
        {"label": "c", "degree": 2}
      ],
      "products": [
        {"left": "a", "right": "b", "value": [{"coeff": "1", "basis": "c"}]}
      ]
    }"#;

    #[test]
    fn parses_and_validates() {
        let f = AlgebraFile::parse(TORUS).unwrap();
        let p = f.to_presentation().unwrap();
        let a = validate_algebra(&p).unwrap();
        assert_eq!(a.dim(), 4);
        let s = validate_algebra(&surface(1)).unwrap();
        assert!(a.same_structure(&s));
    }

    #[test]
    fn rejects_unknown_keys() {
        let extra = TORUS.replacen("\"name\"", "\"colour\": 1, \"name\"", 1);
        assert!(matches!(AlgebraFile::parse(&extra), Err(FileError::Json { .. })));
        let extra_field = TORUS.replace(r#"{"kind": "rational"}"#, r#"{"kind": "rational", "p": 3}"#);
        assert!(matches!(AlgebraFile::parse(&extra_field), Err(FileError::Json { .. })));
        let extra_term = TORUS.replace(r#""basis": "c"}"#, r#""basis": "c", "w": 0}"#);
        assert!(matches!(AlgebraFile::parse(&extra_term), Err(FileError::Json { .. })));
    }

    #[test]
    fn reports_bad_labels_and_coefficients() {
        let f = AlgebraFile::parse(&TORUS.replace(r#""right": "b""#, r#""right": "z""#)).unwrap();
        assert!(matches!(f.to_presentation(), Err(FileError::UnknownLabel { label, .. }) if label == "z"));
        let f = AlgebraFile::parse(&TORUS.replace(r#""coeff": "1""#, r#""coeff": "1/0""#)).unwrap();
        assert!(matches!(f.to_presentation(), Err(FileError::Coefficient { .. })));
        let f = AlgebraFile::parse(&TORUS.replace(r#"{"kind": "rational"}"#, r#"{"kind": "prime", "p": 9}"#)).unwrap();
        assert!(matches!(
            f.to_presentation(),
            Err(FileError::Field(NumError::NotPrime(9)))
        ));
    }

    #[test]
    fn coefficients_are_strings() {
        let f = AlgebraFile::from_presentation(&surface(1));
        let json: serde_json::Value = serde_json::from_str(&f.to_json()).unwrap();
        assert_eq!(json["products"][0]["value"][0]["coeff"], serde_json::json!("1"));
        assert_eq!(AlgebraFile::parse(&f.to_json()).unwrap(), f);
        assert!(f.digest().starts_with("sha256:"));
    }
}
