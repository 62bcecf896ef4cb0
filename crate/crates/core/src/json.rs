//! JSON forms of families, certificates and coverage reports.
//!
//! Big integers are always written as decimal strings.

use std::path::Path;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certificate::{Assignment, MatchingCertificate};
use crate::explicit::DigitMode;
use crate::field::FieldDescriptor;
use crate::random::CoverageReport;
use crate::sets::{LogSparseSet, Provenance, SetFamily};

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("malformed JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("invalid value for {field}: {reason}")]
    Invalid { field: String, reason: String },
}

fn invalid(field: impl Into<String>, reason: impl ToString) -> JsonError {
    JsonError::Invalid {
        field: field.into(),
        reason: reason.to_string(),
    }
}

fn parse_big(field: &str, s: &str) -> Result<BigUint, JsonError> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(invalid(field, format!("{s:?} is not a decimal integer")));
    }
    BigUint::from_str(s).map_err(|e| invalid(field, e))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum ProvenanceJson {
    Explicit { field: String, q: u32, mode: String },
    Random { n: usize, eps: String, seed: u64 },
    Manual,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyJson {
    n: usize,
    offset: String,
    provenance: ProvenanceJson,
    sparsity_c: usize,
    sets: Vec<Vec<String>>,
}

fn provenance_to_json(p: &Provenance) -> ProvenanceJson {
    match p {
        Provenance::Explicit { field, mode } => ProvenanceJson::Explicit {
            field: field.to_string(),
            q: field.order(),
            mode: mode.to_string(),
        },
        Provenance::Random { n, eps, seed } => ProvenanceJson::Random {
            n: *n,
            eps: format!("{}/{}", eps.numer(), eps.denom()),
            seed: *seed,
        },
        Provenance::Manual => ProvenanceJson::Manual,
    }
}

fn provenance_from_json(p: ProvenanceJson) -> Result<Provenance, JsonError> {
    Ok(match p {
        ProvenanceJson::Explicit { field, q, mode } => {
            let field: FieldDescriptor =
                field.parse().map_err(|e| invalid("provenance.field", e))?;
            if field.order() != q {
                return Err(invalid(
                    "provenance.q",
                    format!("field has order {}", field.order()),
                ));
            }
            Provenance::Explicit {
                field,
                mode: DigitMode::from_str(&mode).map_err(|e| invalid("provenance.mode", e))?,
            }
        }
        ProvenanceJson::Random { n, eps, seed } => Provenance::Random {
            n,
            eps: parse_ratio(&eps).map_err(|e| invalid("provenance.eps", e))?,
            seed,
        },
        ProvenanceJson::Manual => Provenance::Manual,
    })
}

/// Parses `"a/b"`, an integer, or a finite decimal like `"0.25"`.
pub fn parse_ratio(s: &str) -> Result<Ratio<u64>, String> {
    let bad = || format!("{s:?} is not a non-negative rational");
    if let Some((a, b)) = s.split_once('/') {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        if b == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(a, b));
    }
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if (int.is_empty() && frac.is_empty())
        || !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit())
        || frac.len() > 18
    {
        return Err(bad());
    }
    let denom = 10u64.pow(frac.len() as u32);
    let int: u64 = if int.is_empty() {
        0
    } else {
        int.parse().map_err(|_| bad())?
    };
    let frac: u64 = if frac.is_empty() {
        0
    } else {
        frac.parse().map_err(|_| bad())?
    };
    let numer = int
        .checked_mul(denom)
        .and_then(|v| v.checked_add(frac))
        .ok_or_else(bad)?;
    Ok(Ratio::new(numer, denom))
}

pub fn family_to_json(family: &SetFamily) -> serde_json::Value {
    let c = family
        .sets()
        .iter()
        .map(LogSparseSet::sparsity_c)
        .max()
        .unwrap_or(1);
    let doc = FamilyJson {
        n: family.n(),
        offset: family.offset().to_string(),
        provenance: provenance_to_json(family.provenance()),
        sparsity_c: c,
        sets: family
            .sets()
            .iter()
            .map(|s| s.elements().iter().map(ToString::to_string).collect())
            .collect(),
    };
    serde_json::to_value(doc).expect("family serializes")
}

/// Parses and re-validates a family, including the sparsity of every set.
pub fn family_from_json(value: serde_json::Value) -> Result<SetFamily, JsonError> {
    let doc: FamilyJson = serde_json::from_value(value)?;
    if doc.n != doc.sets.len() {
        return Err(invalid("n", format!("{} sets listed", doc.sets.len())));
    }
    let offset = parse_big("offset", &doc.offset)?;
    let provenance = provenance_from_json(doc.provenance)?;
    let pre_shift = offset == BigUint::from(0u32);
    let sets = doc
        .sets
        .iter()
        .enumerate()
        .map(|(j, raw)| {
            let field = format!("sets[{j}]");
            let elements = raw
                .iter()
                .map(|s| parse_big(&field, s))
                .collect::<Result<Vec<_>, _>>()?;
            let set = if pre_shift {
                LogSparseSet::new_pre_shift(elements, doc.sparsity_c)
            } else {
                LogSparseSet::new(elements, doc.sparsity_c)
            };
            set.map_err(|e| invalid(field, e))
        })
        .collect::<Result<Vec<_>, _>>()?;
    SetFamily::with_offset(sets, provenance, offset).map_err(|e| invalid("family", e))
}

/// The sets of a family document as raw integers, without any sparsity
/// check, together with the declared `sparsity_c`.
pub fn raw_family_sets(value: serde_json::Value) -> Result<(Vec<Vec<BigUint>>, usize), JsonError> {
    let doc: FamilyJson = serde_json::from_value(value)?;
    let sets = doc
        .sets
        .iter()
        .enumerate()
        .map(|(j, raw)| {
            let field = format!("sets[{j}]");
            raw.iter().map(|s| parse_big(&field, s)).collect()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((sets, doc.sparsity_c))
}

#[derive(Debug, Serialize, Deserialize)]
struct AssignmentJson {
    block: usize,
    digit: u64,
    set_index: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertificateJson {
    target: String,
    assignments: Vec<AssignmentJson>,
    offset: String,
    radix: u64,
}

pub fn certificate_to_json(cert: &MatchingCertificate) -> serde_json::Value {
    let doc = CertificateJson {
        target: cert.target.to_string(),
        assignments: cert
            .assignments
            .iter()
            .map(|a| AssignmentJson {
                block: a.block,
                digit: a.digit,
                set_index: a.set_index,
            })
            .collect(),
        offset: cert.offset.to_string(),
        radix: cert.radix,
    };
    serde_json::to_value(doc).expect("certificate serializes")
}

pub fn certificate_from_json(value: serde_json::Value) -> Result<MatchingCertificate, JsonError> {
    let doc: CertificateJson = serde_json::from_value(value)?;
    Ok(MatchingCertificate {
        target: parse_big("target", &doc.target)?,
        offset: parse_big("offset", &doc.offset)?,
        radix: doc.radix,
        assignments: doc
            .assignments
            .into_iter()
            .map(|a| Assignment {
                block: a.block,
                digit: a.digit,
                set_index: a.set_index,
            })
            .collect(),
    })
}

#[derive(Debug, Serialize)]
struct FailureJson {
    target: String,
    hall_witness: Vec<usize>,
    neighborhood: Vec<usize>,
}

#[derive(Debug, Serialize)]
struct CoverageJson {
    targets_checked: usize,
    covered: usize,
    failures: Vec<FailureJson>,
}

/// `hall_witness` lists the blocks of the violating set; `neighborhood` the
/// sets able to serve them.
pub fn coverage_report_to_json(report: &CoverageReport) -> serde_json::Value {
    let doc = CoverageJson {
        targets_checked: report.targets_checked,
        covered: report.covered,
        failures: report
            .failures
            .iter()
            .map(|f| FailureJson {
                target: f.target.to_string(),
                hall_witness: f.hall_witness.left.clone(),
                neighborhood: f.hall_witness.neighbors.clone(),
            })
            .collect(),
    };
    serde_json::to_value(doc).expect("report serializes")
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values serialize");
    s.push('\n');
    s
}

pub fn save_family(family: &SetFamily, path: &Path) -> Result<(), JsonError> {
    std::fs::write(path, to_pretty(&family_to_json(family)))?;
    Ok(())
}

pub fn load_family(path: &Path) -> Result<SetFamily, JsonError> {
    let text = std::fs::read_to_string(path)?;
    family_from_json(serde_json::from_str(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explicit::build_family;

    #[test]
    fn ratios() {
        assert_eq!(parse_ratio("1/2").unwrap(), Ratio::new(1, 2));
        assert_eq!(parse_ratio("0.25").unwrap(), Ratio::new(1, 4));
        assert_eq!(parse_ratio("3").unwrap(), Ratio::from_integer(3));
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("-1").is_err());
        assert!(parse_ratio(".").is_err());
    }

    #[test]
    fn family_roundtrip() {
        let fam = build_family(&FieldDescriptor::for_order(4).unwrap(), DigitMode::Binary)
            .unwrap()
            .into_family();
        let again = family_from_json(family_to_json(&fam)).unwrap();
        assert_eq!(again, fam);
        let shifted = fam.shifted(&BigUint::from(3u32)).unwrap();
        let v = family_to_json(&shifted);
        assert_eq!(v["offset"], "48");
        assert_eq!(family_from_json(v).unwrap(), shifted);
    }

    #[test]
    fn rejects_non_sparse_sets() {
        let v = serde_json::json!({
            "n": 1, "offset": "0", "provenance": {"kind": "manual"},
            "sparsity_c": 1, "sets": [["0", "2", "3"]]
        });
        assert!(matches!(
            family_from_json(v),
            Err(JsonError::Invalid { .. })
        ));
        let v = serde_json::json!({
            "n": 1, "offset": "0", "provenance": {"kind": "manual"},
            "sparsity_c": 2, "sets": [["0", "-2"]]
        });
        assert!(family_from_json(v).is_err());
    }

    #[test]
    fn certificate_roundtrip() {
        let cert = MatchingCertificate {
            target: BigUint::from(173u32),
            offset: BigUint::from(16u32),
            radix: 4,
            assignments: vec![Assignment {
                block: 2,
                digit: 1,
                set_index: 5,
            }],
        };
        assert_eq!(
            certificate_from_json(certificate_to_json(&cert)).unwrap(),
            cert
        );
    }
}
