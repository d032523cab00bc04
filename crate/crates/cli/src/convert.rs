//! JSON conversions. Integers ride as JSON numbers while they fit 53 bits
//! and as decimal strings beyond that; parsing accepts both forms.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use zn_ci::cayley::{ConnectionSet, Mode};
use zn_ci::intlin::IntMatrix;
use zn_ci::lattice::LatticeIndex;
use zn_ci::oracle::{FiniteAbelianGroup, ScanMode};
use zn_ci::symmetry::ModMatrix;

use crate::{CliError, CliResult};

const MAX_SAFE: i64 = (1 << 53) - 1;

pub(crate) fn big_to_value(v: &BigInt) -> Value {
    match v.to_i64() {
        Some(i) if i.abs() <= MAX_SAFE => json!(i),
        _ => Value::String(v.to_string()),
    }
}

pub(crate) fn value_to_big(v: &Value) -> CliResult<BigInt> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigInt::from(i))
            } else if let Some(u) = n.as_u64() {
                Ok(BigInt::from(u))
            } else {
                Err(CliError("non-integer number in payload".into()))
            }
        }
        Value::String(s) => s
            .parse::<BigInt>()
            .map_err(|_| CliError(format!("cannot parse integer from {s:?}"))),
        _ => Err(CliError("expected an integer (number or decimal string)".into())),
    }
}

pub(crate) fn matrix_to_value(m: &IntMatrix) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array((0..m.cols()).map(|j| big_to_value(m.entry(i, j))).collect()))
            .collect(),
    )
}

pub(crate) fn value_to_matrix(v: &Value) -> CliResult<IntMatrix> {
    let rows = v
        .as_array()
        .ok_or(CliError("matrix must be an array of rows".into()))?;
    if rows.is_empty() {
        return Err(CliError("matrix must be nonempty".into()));
    }
    let mut entries = Vec::new();
    let mut cols = None;
    for row in rows {
        let row = row
            .as_array()
            .ok_or(CliError("matrix rows must be arrays".into()))?;
        match cols {
            None => cols = Some(row.len()),
            Some(c) if c != row.len() => return Err(CliError("ragged matrix rows".into())),
            _ => {}
        }
        for e in row {
            entries.push(value_to_big(e)?);
        }
    }
    Ok(IntMatrix::new(rows.len(), cols.unwrap_or(0), entries)?)
}

pub(crate) fn get_matrix(payload: &Value, key: &str) -> CliResult<IntMatrix> {
    let v = payload
        .get(key)
        .ok_or(CliError(format!("payload needs a field {key}")))?;
    value_to_matrix(v)
}

pub(crate) fn vectors_to_value(vs: &[Vec<BigInt>]) -> Value {
    Value::Array(
        vs.iter()
            .map(|v| Value::Array(v.iter().map(big_to_value).collect()))
            .collect(),
    )
}

pub(crate) fn value_to_vectors(v: &Value) -> CliResult<Vec<Vec<BigInt>>> {
    let arr = v
        .as_array()
        .ok_or(CliError("expected an array of integer vectors".into()))?;
    arr.iter()
        .map(|row| {
            row.as_array()
                .ok_or(CliError("vectors must be arrays".into()))?
                .iter()
                .map(value_to_big)
                .collect()
        })
        .collect()
}

pub(crate) fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Directed => "directed",
        Mode::Undirected => "undirected",
    }
}

pub(crate) fn get_mode(payload: &Value) -> CliResult<Mode> {
    match payload.get("mode").and_then(Value::as_str) {
        Some("directed") => Ok(Mode::Directed),
        Some("undirected") => Ok(Mode::Undirected),
        _ => Err(CliError(
            "payload needs a mode of \"directed\" or \"undirected\"".into(),
        )),
    }
}

pub(crate) fn get_connection_set(payload: &Value) -> CliResult<ConnectionSet> {
    let n = payload
        .get("n")
        .and_then(Value::as_u64)
        .ok_or(CliError("payload needs a positive integer n".into()))? as usize;
    let mode = get_mode(payload)?;
    let raw = payload
        .get("set")
        .ok_or(CliError("payload needs a field set".into()))?;
    let vectors = value_to_vectors(raw)?;
    Ok(ConnectionSet::validate(&vectors, n, mode)?)
}

pub(crate) fn get_second_set(payload: &Value, n: usize, mode: Mode) -> CliResult<ConnectionSet> {
    let raw = payload
        .get("set2")
        .ok_or(CliError("payload needs a field set2".into()))?;
    let vectors = value_to_vectors(raw)?;
    Ok(ConnectionSet::validate(&vectors, n, mode)?)
}

pub(crate) fn index_to_value(idx: &LatticeIndex) -> Value {
    match idx {
        LatticeIndex::Finite(k) => big_to_value(k),
        LatticeIndex::Infinite => Value::String("INFINITE".into()),
    }
}

pub(crate) fn mod_matrix_to_value(m: &ModMatrix) -> Value {
    json!({
        "k": m.modulus(),
        "matrix": (0..m.n())
            .map(|i| (0..m.n()).map(|j| m.entry(i, j)).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    })
}

pub(crate) fn get_group(payload: &Value) -> CliResult<FiniteAbelianGroup> {
    let g = payload
        .get("group")
        .ok_or(CliError("payload needs a field group".into()))?;
    if let Some(m) = g.get("cyclic").and_then(Value::as_u64) {
        return Ok(FiniteAbelianGroup::cyclic(m)?);
    }
    if let Some(parts) = g.get("primary").and_then(Value::as_array) {
        let parts: Vec<u64> = parts
            .iter()
            .map(|v| v.as_u64().ok_or(CliError("primary parts must be integers".into())))
            .collect::<CliResult<_>>()?;
        return Ok(FiniteAbelianGroup::from_primary(&parts)?);
    }
    if let Some(factors) = g.get("invariant_factors").and_then(Value::as_array) {
        let factors: Vec<u64> = factors
            .iter()
            .map(|v| v.as_u64().ok_or(CliError("invariant factors must be integers".into())))
            .collect::<CliResult<_>>()?;
        return Ok(FiniteAbelianGroup::from_invariant_factors(&factors)?);
    }
    Err(CliError(
        "group needs one of: cyclic, primary, invariant_factors".into(),
    ))
}

pub(crate) fn get_scan_mode(payload: &Value) -> CliResult<ScanMode> {
    match payload.get("mode").and_then(Value::as_str) {
        Some("directed") => Ok(ScanMode::Directed),
        Some("undirected") => Ok(ScanMode::Undirected),
        _ => Err(CliError(
            "payload needs a mode of \"directed\" or \"undirected\"".into(),
        )),
    }
}

pub(crate) fn scan_mode_name(m: ScanMode) -> &'static str {
    match m {
        ScanMode::Directed => "directed",
        ScanMode::Undirected => "undirected",
    }
}
