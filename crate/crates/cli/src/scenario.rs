//! Scenario files: the JSON description of a code-construction setup and
//! its conversion into library objects. Validation is strict (unknown
//! keys are rejected) so that a typo in a fixture cannot silently change
//! what is being tested.

use serde::Deserialize;
use sha2::{Digest, Sha256};
use std::path::Path;

use agres::geom::{Divisor, Hypersurface, Variety, VarietyPoint, VarietyRef};
use agres::gf::{FieldElement, FiniteField};
use agres::poly::{parse_poly, parse_rational, RationalFunction};

use crate::report::CmdError;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub field: FieldSpec,
    pub variety: VarietySpec,
    pub divisors: Vec<DivisorTerm>,
    #[serde(default)]
    pub points: Vec<Vec<String>>,
    #[serde(rename = "G", default)]
    pub g: Vec<DivisorTerm>,
    #[serde(default)]
    pub theta: Option<String>,
    #[serde(default)]
    pub options: OptionsSpec,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub p: u64,
    pub m: usize,
    /// Coefficients of the defining polynomial, constant term first.
    /// Optional; when present it must match the canonical modulus the
    /// library picks for GF(p^m), since element syntax depends on it.
    #[serde(default)]
    pub modulus: Option<Vec<u64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VarietySpec {
    pub kind: String,
    pub r: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivisorTerm {
    pub poly: String,
    #[serde(default = "default_mult")]
    pub mult: i64,
}

fn default_mult() -> i64 {
    1
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsSpec {
    #[serde(rename = "E_max", default)]
    pub e_max: Option<usize>,
    #[serde(rename = "A_max", default)]
    pub a_max: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
}

/// A scenario converted to library objects, plus the provenance hash of
/// the raw file.
#[derive(Debug)]
pub struct Scenario {
    pub variety: VarietyRef,
    pub divisors: Vec<Divisor>,
    pub points: Vec<VarietyPoint>,
    pub g: Divisor,
    pub theta: Option<RationalFunction>,
    pub options: OptionsSpec,
    pub sha256: String,
}

pub fn load(path: &Path) -> Result<Scenario, CmdError> {
    let bytes = std::fs::read(path)
        .map_err(|e| CmdError::schema(format!("cannot read {}: {e}", path.display())))?;
    let parsed: ScenarioFile = serde_json::from_slice(&bytes)
        .map_err(|e| CmdError::schema(format!("{}: {e}", path.display())))?;
    let sha256 = hex_digest(&bytes);
    convert(parsed, sha256)
}

pub fn hex_digest(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

fn convert(sf: ScenarioFile, sha256: String) -> Result<Scenario, CmdError> {
    let field = FiniteField::new(sf.field.p, sf.field.m)
        .map_err(|e| CmdError::schema(format!("field: {e}")))?;
    if let Some(given) = &sf.field.modulus {
        if given.as_slice() != field.modulus() {
            return Err(CmdError::schema(format!(
                "modulus {:?} differs from the canonical modulus {:?} of GF({}^{})",
                given,
                field.modulus(),
                sf.field.p,
                sf.field.m
            )));
        }
    }
    let variety = match sf.variety.kind.as_str() {
        "projective" => Variety::proj(&field, sf.variety.r),
        "product_p1" => Variety::product_p1(&field, sf.variety.r),
        other => {
            return Err(CmdError::schema(format!(
                "unknown variety kind {other:?} (expected \"projective\" or \"product_p1\")"
            )))
        }
    }
    .map_err(|e| CmdError::schema(format!("variety: {e}")))?;

    let mut divisors = Vec::with_capacity(sf.divisors.len());
    for term in &sf.divisors {
        divisors.push(divisor_term(&variety, term)?);
    }
    let mut g = Divisor::zero(&variety);
    for term in &sf.g {
        g = g
            .add_ref(&divisor_term(&variety, term)?)
            .map_err(|e| CmdError::schema(format!("G: {e}")))?;
    }
    let mut points = Vec::with_capacity(sf.points.len());
    for coords in &sf.points {
        let parsed = coords
            .iter()
            .map(|s| FieldElement::parse(&field, s))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CmdError::schema(format!("point {coords:?}: {e}")))?;
        points.push(
            VarietyPoint::rational(&variety, parsed)
                .map_err(|e| CmdError::schema(format!("point {coords:?}: {e}")))?,
        );
    }
    let theta = match &sf.theta {
        Some(expr) => Some(
            parse_rational(&field, variety.coords(), expr)
                .map_err(|e| CmdError::schema(format!("theta: {e}")))?,
        ),
        None => None,
    };
    Ok(Scenario {
        variety,
        divisors,
        points,
        g,
        theta,
        options: sf.options,
        sha256,
    })
}

fn divisor_term(variety: &VarietyRef, term: &DivisorTerm) -> Result<Divisor, CmdError> {
    let poly = parse_poly(variety.field(), variety.coords(), &term.poly)
        .map_err(|e| CmdError::schema(format!("poly {:?}: {e}", term.poly)))?;
    let h = Hypersurface::new(variety, &poly)
        .map_err(|e| CmdError::schema(format!("poly {:?}: {e}", term.poly)))?;
    Ok(Divisor::of(h, term.mult))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::EXIT_SCHEMA;

    fn convert_str(text: &str) -> Result<Scenario, CmdError> {
        let parsed: ScenarioFile = serde_json::from_str(text)
            .map_err(|e| CmdError::schema(e.to_string()))?;
        convert(parsed, hex_digest(text.as_bytes()))
    }

    #[test]
    fn minimal_scenario_converts() {
        let scn = convert_str(
            r#"{"field":{"p":2,"m":2},"variety":{"kind":"projective","r":2},
                "divisors":[{"poly":"X"},{"poly":"Y"}],
                "points":[["0","0","1"]],"G":[{"poly":"Z"}],"theta":"X/Y"}"#,
        )
        .unwrap();
        assert_eq!(scn.divisors.len(), 2);
        assert_eq!(scn.points.len(), 1);
        assert!(scn.theta.is_some());
        assert_eq!(scn.sha256.len(), 64);
    }

    #[test]
    fn wrong_modulus_is_rejected() {
        let err = convert_str(
            r#"{"field":{"p":2,"m":2,"modulus":[1,0,1]},
                "variety":{"kind":"projective","r":2},"divisors":[{"poly":"X"}]}"#,
        )
        .unwrap_err();
        assert_eq!(err.exit, EXIT_SCHEMA);
        assert!(err.message.contains("modulus"));
    }

    #[test]
    fn matching_modulus_is_accepted() {
        // x^2 + x + 1 is the canonical GF(4) modulus
        convert_str(
            r#"{"field":{"p":2,"m":2,"modulus":[1,1,1]},
                "variety":{"kind":"projective","r":2},"divisors":[{"poly":"X"}]}"#,
        )
        .unwrap();
    }

    #[test]
    fn bad_variety_kind_is_rejected() {
        let err = convert_str(
            r#"{"field":{"p":2,"m":2},"variety":{"kind":"toric","r":2},
                "divisors":[{"poly":"X"}]}"#,
        )
        .unwrap_err();
        assert_eq!(err.exit, EXIT_SCHEMA);
        assert!(err.message.contains("toric"));
    }

    #[test]
    fn malformed_point_is_rejected() {
        let err = convert_str(
            r#"{"field":{"p":2,"m":2},"variety":{"kind":"projective","r":2},
                "divisors":[{"poly":"X"}],"points":[["0","1"]]}"#,
        )
        .unwrap_err();
        assert_eq!(err.exit, EXIT_SCHEMA);
    }
}
