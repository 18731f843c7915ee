//! JSON artifacts.
//!
//! Numbers that carry precision are written as decimal strings; object keys
//! come out sorted because `serde_json::Map` is ordered.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex;
use serde_json::{json, Map, Value};

use crate::error::{Result, SicError};
use crate::fiducial::{Fiducial, SymmetryType};
use crate::number_theory::{dprime, DimensionSequence, Tower};
use crate::overlaps::{OrbitPartition, OverlapTable, StabilityReport};
use crate::recognition::{MinimalPolynomial, PhaseReport, RankEstimate};
use crate::scalar::Real;
use crate::wh_group::{DisplacementIndex, SymplecticMatrix};

pub const FORMAT_VERSION: u64 = 1;

/// Parses JSON text, reporting line and column on failure.
pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text)
        .map_err(|e| SicError::Format(format!("line {}, column {}: {}", e.line(), e.column(), e)))
}

/// Serializes with two-space indentation and a trailing newline.
pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values always serialize");
    s.push('\n');
    s
}

fn header(kind: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("format_version".into(), json!(FORMAT_VERSION));
    m.insert("kind".into(), json!(kind));
    m
}

/// Checks `format_version` and `kind`.
pub fn expect_kind(v: &Value, kind: &str) -> Result<()> {
    match v.get("format_version").and_then(Value::as_u64) {
        Some(FORMAT_VERSION) => {}
        Some(other) => {
            return Err(SicError::Format(format!(
                "format_version {other} is not supported (this build reads {FORMAT_VERSION})"
            )))
        }
        None => return Err(SicError::Format("missing format_version".into())),
    }
    match v.get("kind").and_then(Value::as_str) {
        Some(k) if k == kind => Ok(()),
        Some(k) => Err(SicError::Format(format!("expected a {kind} artifact, found {k}"))),
        None => Err(SicError::Format("missing kind".into())),
    }
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| SicError::Format(format!("missing field {key}")))
}

fn field_u64(v: &Value, key: &str) -> Result<u64> {
    field(v, key)?.as_u64().ok_or_else(|| SicError::Format(format!("field {key} is not an unsigned integer")))
}

fn real<T: Real>(v: &Value, what: &str) -> Result<T> {
    v.as_str()
        .and_then(T::parse_decimal)
        .ok_or_else(|| SicError::Format(format!("{what} is not a decimal string")))
}

fn complex_json<T: Real>(z: &Complex<T>) -> Value {
    json!([z.re.to_decimal(), z.im.to_decimal()])
}

fn complex_from<T: Real>(v: &Value, what: &str) -> Result<Complex<T>> {
    match v.as_array().map(Vec::as_slice) {
        Some([re, im]) => Ok(Complex::new(real(re, what)?, real(im, what)?)),
        _ => Err(SicError::Format(format!("{what} is not a [re, im] pair"))),
    }
}

fn index_json(p: &DisplacementIndex) -> Value {
    json!([p.p1, p.p2])
}

fn index_from(v: &Value) -> Result<DisplacementIndex> {
    match v.as_array().map(Vec::as_slice) {
        Some([a, b]) => match (a.as_u64(), b.as_u64()) {
            (Some(p1), Some(p2)) if p1 <= u32::MAX as u64 && p2 <= u32::MAX as u64 => {
                Ok(DisplacementIndex { p1: p1 as u32, p2: p2 as u32 })
            }
            _ => Err(SicError::Format("index entries must be small non-negative integers".into())),
        },
        _ => Err(SicError::Format("index is not a [p1, p2] pair".into())),
    }
}

fn matrix_json(f: &SymplecticMatrix) -> Value {
    let e = f.entries();
    json!([[e[0][0], e[0][1]], [e[1][0], e[1][1]]])
}

/// Reads `precision_bits` from any numeric artifact.
pub fn precision_of(v: &Value) -> Result<u32> {
    let bits = field_u64(v, "precision_bits")?;
    u32::try_from(bits).map_err(|_| SicError::Format("precision_bits out of range".into()))
}

pub fn fiducial_to_json<T: Real>(f: &Fiducial<T>) -> Value {
    let mut m = header("fiducial");
    m.insert("d".into(), json!(f.dimension));
    m.insert("precision_bits".into(), json!(T::PREC_BITS));
    m.insert("seed".into(), json!(f.seed));
    m.insert("symmetry_type".into(), json!(f.symmetry_type.as_str()));
    m.insert("residual".into(), json!(f.residual.to_decimal()));
    m.insert("converged".into(), json!(f.converged));
    m.insert("vector".into(), Value::Array(f.vector.iter().map(complex_json).collect()));
    Value::Object(m)
}

/// Reads a fiducial as stored. The residual is the recorded one; callers that
/// need a fresh value recompute it.
pub fn fiducial_from_json<T: Real>(v: &Value) -> Result<Fiducial<T>> {
    expect_kind(v, "fiducial")?;
    let d = field_u64(v, "d")? as usize;
    let vector = field(v, "vector")?
        .as_array()
        .ok_or_else(|| SicError::Format("vector is not an array".into()))?
        .iter()
        .map(|z| complex_from(z, "vector entry"))
        .collect::<Result<Vec<Complex<T>>>>()?;
    if vector.len() != d {
        return Err(SicError::Format(format!("vector has {} entries, expected {d}", vector.len())));
    }
    let symmetry_type = match field(v, "symmetry_type")?.as_str() {
        Some("z") => SymmetryType::TypeZ,
        Some("a") => SymmetryType::TypeA,
        Some("unknown") => SymmetryType::Unknown,
        _ => return Err(SicError::Format("symmetry_type must be z, a or unknown".into())),
    };
    Ok(Fiducial {
        vector,
        dimension: d,
        residual: real(field(v, "residual")?, "residual")?,
        seed: field_u64(v, "seed")?,
        symmetry_type,
        converged: field(v, "converged")?.as_bool().unwrap_or(false),
    })
}

pub fn overlaps_to_json<T: Real>(t: &OverlapTable<T>) -> Value {
    let mut m = header("overlaps");
    m.insert("d".into(), json!(t.d));
    m.insert("d_prime".into(), json!(t.d_prime));
    m.insert("precision_bits".into(), json!(T::PREC_BITS));
    m.insert("residual".into(), json!(t.residual.to_decimal()));
    let entries: Vec<Value> = t
        .entries
        .iter()
        .map(|(p, z)| json!({ "p": index_json(p), "overlap": complex_json(z), "phase": complex_json(&t.phases[p]) }))
        .collect();
    m.insert("entries".into(), Value::Array(entries));
    Value::Object(m)
}

pub fn overlaps_from_json<T: Real>(v: &Value) -> Result<OverlapTable<T>> {
    expect_kind(v, "overlaps")?;
    let d = field_u64(v, "d")? as usize;
    let d_prime = field_u64(v, "d_prime")? as usize;
    let mut entries = BTreeMap::new();
    let mut phases = BTreeMap::new();
    for e in field(v, "entries")?.as_array().ok_or_else(|| SicError::Format("entries is not an array".into()))? {
        let p = index_from(field(e, "p")?)?;
        entries.insert(p, complex_from(field(e, "overlap")?, "overlap")?);
        phases.insert(p, complex_from(field(e, "phase")?, "phase")?);
    }
    Ok(OverlapTable { d, d_prime, residual: real(field(v, "residual")?, "residual")?, entries, phases })
}

pub fn stability_to_json(d: usize, report: &StabilityReport, partition: &OrbitPartition) -> Value {
    let mut m = header("stability");
    m.insert("d".into(), json!(d));
    m.insert("symplectic_stabilizers".into(), report.symplectic_stabilizers.iter().map(matrix_json).collect());
    m.insert("overlap_stabilizers".into(), report.overlap_stabilizers.iter().map(matrix_json).collect());
    m.insert(
        "elements".into(),
        report
            .elements
            .iter()
            .map(|e| json!({ "F": matrix_json(&e.symplectic), "r": index_json(&e.displacement) }))
            .collect(),
    );
    m.insert("centred".into(), json!(report.centred));
    m.insert("canonical_order3_present".into(), json!(report.canonical_order3_present));
    m.insert("cyclic".into(), json!(report.cyclic));
    m.insert(
        "orbits".into(),
        partition.parts.iter().map(|part| Value::Array(part.iter().map(index_json).collect())).collect(),
    );
    m.insert("orbit_violations".into(), json!(partition.violations.len()));
    Value::Object(m)
}

fn big(n: &BigInt) -> Value {
    json!(n.to_string())
}

/// Tower report; `d_prime` is added per term when requested.
pub fn tower_to_json(seq: &DimensionSequence, towers: &[Tower], with_dprime: bool) -> Value {
    let mut m = header("tower");
    m.insert("D".into(), json!(seq.discriminant));
    m.insert("d1".into(), big(&seq.d1));
    m.insert("terms".into(), seq.terms.iter().map(big).collect());
    m.insert("m".into(), seq.m_values.iter().map(big).collect());
    m.insert("towers".into(), towers.iter().map(|t| Value::Array(t.iter().map(big).collect())).collect());
    if with_dprime {
        m.insert("d_prime".into(), seq.terms.iter().map(|d| big(&dprime(d))).collect());
    }
    Value::Object(m)
}

fn polynomial_json(p: &MinimalPolynomial) -> Value {
    json!({
        "coeffs": p.coefficients,
        "degree": p.degree,
        "residual_log2": format!("{:.3}", p.residual_log2),
        "monic": p.certified_monic,
        "unit": p.certified_unit,
    })
}

pub fn recognition_to_json(report: &PhaseReport, rank: Option<&RankEstimate>) -> Value {
    let mut m = header("recognition");
    m.insert("d".into(), json!(report.d));
    m.insert(
        "config".into(),
        json!({
            "max_degree": report.config.max_degree,
            "precision_bits": report.config.precision_bits,
            "lattice_scale_exponent": report.config.lattice_scale_exponent,
            "certify_threshold": format!("{:e}", report.config.certify_threshold),
        }),
    );
    let per_phase: Vec<Value> = report
        .per_phase
        .iter()
        .map(|r| {
            let mut e = Map::new();
            e.insert("p".into(), index_json(&r.p));
            match &r.polynomial {
                Some(q) => {
                    if let Value::Object(pm) = polynomial_json(q) {
                        e.extend(pm);
                    }
                }
                None => {
                    e.insert("coeffs".into(), Value::Null);
                    e.insert("monic".into(), json!(false));
                    e.insert("unit".into(), json!(false));
                    e.insert("failure".into(), json!(r.failure.clone().unwrap_or_default()));
                }
            }
            Value::Object(e)
        })
        .collect();
    m.insert("per_phase".into(), Value::Array(per_phase));
    let s = &report.summary;
    m.insert(
        "summary".into(),
        json!({
            "total": s.total,
            "recognized": s.recognized,
            "algebraic_integers": s.algebraic_integers,
            "units": s.units,
            "certified_non_units": s.certified_non_units,
            "failures": s.failures,
            "distinct_polynomials": s.distinct_polynomials,
            "max_degree_found": s.max_degree_found,
            "note": "minimal among certified candidates up to the degree bound",
        }),
    );
    m.insert(
        "census".into(),
        report.census.iter().map(|(c, n)| json!({ "coeffs": c, "count": n })).collect(),
    );
    if let Some(r) = rank {
        m.insert(
            "rank_estimate".into(),
            json!({
                "rank": r.rank,
                "generators": r.generators,
                "relations": r.relations.len(),
                "confident": r.confident,
                "certified": false,
            }),
        );
    }
    Value::Object(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Mp256;

    #[test]
    fn fiducial_round_trip_is_exact() {
        let v = vec![
            Complex::new(Mp256::from_i64(1) / Mp256::from_i64(3), Mp256::from_i64(2).sqrt()),
            Complex::new(Mp256::pi(), Mp256::from_f64(-0.25)),
        ];
        let f = Fiducial {
            vector: v,
            dimension: 2,
            residual: Mp256::from_f64(1e-70),
            seed: 7,
            symmetry_type: SymmetryType::TypeZ,
            converged: true,
        };
        let j = fiducial_to_json(&f);
        let g: Fiducial<Mp256> = fiducial_from_json(&parse_json(&to_pretty(&j)).unwrap()).unwrap();
        assert_eq!(g.vector, f.vector);
        assert_eq!(g.residual, f.residual);
        assert_eq!(to_pretty(&fiducial_to_json(&g)), to_pretty(&j));
    }

    #[test]
    fn keys_are_sorted() {
        let v = json!({ "b": 1, "a": 2, "kind": "x" });
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"a":2,"b":1,"kind":"x"}"#);
    }

    #[test]
    fn parse_errors_carry_position() {
        match parse_json("{\n  \"a\": [1,\n}") {
            Err(SicError::Format(msg)) => assert!(msg.starts_with("line 3"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn version_mismatch_is_refused() {
        let v = json!({ "format_version": 99, "kind": "fiducial" });
        assert!(matches!(expect_kind(&v, "fiducial"), Err(SicError::Format(m)) if m.contains("99")));
        let v = json!({ "format_version": 1, "kind": "overlaps" });
        assert!(expect_kind(&v, "fiducial").is_err());
    }
}
