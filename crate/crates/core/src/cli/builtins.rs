//! Named algebras available as `builtin:<name>`.

use thiserror::Error;

use crate::exactnum::FieldSpec;
use crate::galg::AlgebraPresentation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuiltinError {
    #[error("unknown builtin {name:?}; available: {}", available.join(", "))]
    Unknown { name: String, available: Vec<String> },
    #[error("bad parameter for builtin {name:?}: {reason}")]
    BadParameter { name: String, reason: String },
}

/// Catalog patterns and what they describe.
pub const CATALOG: &[(&str, &str)] = &[
    (
        "stanley-p3",
        "basis 1, a2, a3, a11 over F3 with all positive-degree products zero",
    ),
    ("point", "the ground field Q, dimension 1"),
    (
        "sphere-odd:n",
        "exterior algebra on one generator of odd degree n, over Q",
    ),
    (
        "sphere-even:n",
        "truncated algebra on one generator a of even degree n with a² = 0, over Q",
    ),
    (
        "surface:g",
        "closed orientable genus-g surface over Q: a_i, b_i in degree 1, c in degree 2, a_i·b_i = c",
    ),
];

/// Concrete instances of every catalog pattern, used by tests and reports.
pub fn sample_names() -> Vec<String> {
    [
        "stanley-p3",
        "point",
        "sphere-odd:1",
        "sphere-odd:3",
        "sphere-even:2",
        "sphere-even:4",
        "surface:0",
        "surface:1",
        "surface:2",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect()
}

pub fn builtin_catalog(name: &str) -> Result<AlgebraPresentation, BuiltinError> {
    let bad = |reason: &str| BuiltinError::BadParameter {
        name: name.to_string(),
        reason: reason.to_string(),
    };
    let param = |s: &str| s.parse::<u32>().map_err(|_| bad("expected a nonnegative integer"));
    match name.split_once(':') {
        None if name == "stanley-p3" => Ok(stanley_p3()),
        None if name == "point" => Ok(AlgebraPresentation::new("point", FieldSpec::Rational, &[("1", 0)])),
        Some(("sphere-odd", n)) => {
            let n = param(n)?;
            if n % 2 == 0 {
                return Err(bad("degree must be odd"));
            }
            Ok(sphere(name, n))
        }
        Some(("sphere-even", n)) => {
            let n = param(n)?;
            if n == 0 || n % 2 == 1 {
                return Err(bad("degree must be even and positive"));
            }
            Ok(sphere(name, n))
        }
        Some(("surface", g)) => Ok(surface(param(g)?)),
        _ => Err(BuiltinError::Unknown {
            name: name.to_string(),
            available: CATALOG.iter().map(|(n, _)| n.to_string()).collect(),
        }),
    }
}

/// Cells in dimensions 2, 3 and 11 over F3; every product of positive-degree
/// classes vanishes since no sum of two of 2, 3, 11 is again one of them.
pub fn stanley_p3() -> AlgebraPresentation {
    AlgebraPresentation::new(
        "stanley-p3",
        FieldSpec::Prime { p: 3 },
        &[("1", 0), ("a2", 2), ("a3", 3), ("a11", 11)],
    )
}

fn sphere(name: &str, n: u32) -> AlgebraPresentation {
    AlgebraPresentation::new(name, FieldSpec::Rational, &[("1", 0), ("a", n)])
}

pub fn surface(g: u32) -> AlgebraPresentation {
    let a: Vec<String> = (1..=g).map(|i| format!("a{i}")).collect();
    let b: Vec<String> = (1..=g).map(|i| format!("b{i}")).collect();
    let mut basis: Vec<(&str, u32)> = vec![("1", 0)];
    basis.extend(a.iter().map(|l| (l.as_str(), 1)));
    basis.extend(b.iter().map(|l| (l.as_str(), 1)));
    basis.push(("c", 2));
    let mut p = AlgebraPresentation::new(format!("surface:{g}"), FieldSpec::Rational, &basis);
    for (ai, bi) in a.iter().zip(&b) {
        p = p.with_product(ai, bi, &[(1, "c")]);
    }
    p
}
