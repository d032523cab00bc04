//! Re-checks previously emitted result documents.
//!
//! Deterministic commands are re-run on the echoed input and the result
//! objects compared for equality; scan results are instead certificate
//! checked pair by pair (isomorphism witness re-applied arc by arc, group
//! automorphisms exhausted). Witness certificates additionally go through
//! the library's independent verification.

use serde_json::{json, Value};
use std::collections::BTreeSet;

use zn_ci::cayley::ConnectionSet;
use zn_ci::oracle::{finite_cayley_graph, Permutation};

use crate::convert::*;
use crate::{get_int_set, iso_witness_to_value, verdict_to_value, CliError, CliResult};

pub(crate) fn run_verify(payload: &Value) -> CliResult<(Value, Value, u8)> {
    let command = payload
        .get("command")
        .and_then(Value::as_str)
        .ok_or(CliError("verify expects a result document with a command field".into()))?;
    let input = payload
        .get("input")
        .ok_or(CliError("verify expects an input echo".into()))?;
    let claimed = payload
        .get("result")
        .ok_or(CliError("verify expects a result field".into()))?;

    let valid = match command {
        "snf" => verify_snf(input, claimed)?,
        "decide-ci" => verify_decide_ci(input, claimed)?,
        "iso" => verify_iso(input, claimed)?,
        "stab" => verify_recompute_stab(input, claimed)?,
        "z-iso" => verify_z_iso(input, claimed)?,
        "demo-mod5" => verify_demo(input, claimed)?,
        "scan-finite" => verify_scan(input, claimed)?,
        other => return Err(CliError(format!("cannot verify command {other:?}"))),
    };

    let echo = json!({ "command": command });
    let result = json!({ "valid": valid, "checked_command": command });
    Ok((echo, result, u8::from(!valid)))
}

fn verify_snf(input: &Value, claimed: &Value) -> CliResult<bool> {
    let a = get_matrix(input, "matrix")?;
    let s = zn_ci::intlin::snf(&a);
    // independent consistency: U*A*V = D on the claimed matrices
    let u = value_to_matrix(claimed.get("u").ok_or(CliError("missing u".into()))?)?;
    let d = value_to_matrix(claimed.get("d").ok_or(CliError("missing d".into()))?)?;
    let v = value_to_matrix(claimed.get("v").ok_or(CliError("missing v".into()))?)?;
    let product_ok = u.mul(&a).mul(&v) == d
        && zn_ci::intlin::is_unimodular(&u)?
        && zn_ci::intlin::is_unimodular(&v)?;
    let recomputed = json!({
        "d": matrix_to_value(&s.d),
        "u": matrix_to_value(&s.u),
        "v": matrix_to_value(&s.v),
        "rank": s.rank(),
        "invariant_factors": s.invariant_factors().iter().map(big_to_value).collect::<Vec<_>>(),
    });
    Ok(product_ok && recomputed == *claimed)
}

fn verify_decide_ci(input: &Value, claimed: &Value) -> CliResult<bool> {
    let s = get_connection_set(input)?;
    let verdict = zn_ci::decision::decide_ci(&s)?;
    if verdict_to_value(&verdict) != *claimed {
        return Ok(false);
    }
    // independent witness check when one is attached
    if let Some(cert) = claimed.get("certificate").filter(|c| !c.is_null()) {
        if cert.get("type").and_then(Value::as_str) == Some("witness") {
            let vectors = value_to_vectors(
                cert.get("witness_set")
                    .ok_or(CliError("witness certificate lacks a set".into()))?,
            )?;
            let witness = ConnectionSet::validate(&vectors, s.n(), s.mode())?;
            return Ok(zn_ci::decision::verify_non_ci_witness(&s, &witness)?);
        }
    }
    Ok(true)
}

fn verify_iso(input: &Value, claimed: &Value) -> CliResult<bool> {
    let s = get_connection_set(input)?;
    let s2_raw = input
        .get("set2")
        .ok_or(CliError("iso input echo lacks set2".into()))?;
    let s2 = ConnectionSet::validate(&value_to_vectors(s2_raw)?, s.n(), s.mode())?;
    let witness = zn_ci::decision::are_isomorphic(&s, &s2)?;
    if iso_witness_to_value(&witness) != *claimed {
        return Ok(false);
    }
    // independent check of an ambient matrix certificate
    if let Some(matrix) = claimed
        .get("witness")
        .and_then(|w| w.get("matrix"))
        .filter(|m| !m.is_null())
    {
        let m = value_to_matrix(matrix)?;
        if !zn_ci::intlin::is_unimodular(&m)? {
            return Ok(false);
        }
        let mapped: BTreeSet<Vec<num_bigint::BigInt>> =
            s.vectors().iter().map(|v| m.mul_vec(v)).collect();
        let want: BTreeSet<Vec<num_bigint::BigInt>> = s2.vectors().iter().cloned().collect();
        return Ok(mapped == want);
    }
    Ok(true)
}

fn verify_recompute_stab(input: &Value, claimed: &Value) -> CliResult<bool> {
    let s = get_connection_set(input)?;
    let h = s.span_lattice();
    let group = zn_ci::symmetry::set_stabilizer(&h, &s)?;
    let recomputed = json!({
        "lattice_basis": matrix_to_value(h.basis()),
        "order": group.order(),
        "elements": group
            .elements()
            .iter()
            .map(|t| matrix_to_value(t.matrix()))
            .collect::<Vec<_>>(),
    });
    Ok(recomputed == *claimed)
}

fn verify_z_iso(input: &Value, claimed: &Value) -> CliResult<bool> {
    let s = get_int_set(input, "set")?;
    let s2 = get_int_set(input, "set2")?;
    let sign = zn_ci::decision::z_iso_decide(&s, &s2);
    Ok(json!({ "sign": sign }) == *claimed)
}

fn verify_demo(input: &Value, claimed: &Value) -> CliResult<bool> {
    let n = input
        .get("N")
        .and_then(Value::as_i64)
        .ok_or(CliError("demo input echo lacks N".into()))?;
    let verified = zn_ci::oracle::mod5_demo(n)?;
    Ok(json!({ "verified": verified, "window": n }) == *claimed)
}

fn verify_scan(input: &Value, claimed: &Value) -> CliResult<bool> {
    let group = get_group(input)?;
    let auts = group.automorphisms()?;
    let pairs = claimed
        .get("pairs")
        .and_then(Value::as_array)
        .ok_or(CliError("scan result lacks pairs".into()))?;
    for pair in pairs {
        let parse_set = |key: &str| -> CliResult<BTreeSet<Vec<u64>>> {
            pair.get(key)
                .and_then(Value::as_array)
                .ok_or(CliError(format!("scan pair lacks {key}")))?
                .iter()
                .map(|el| {
                    el.as_array()
                        .ok_or(CliError("elements must be arrays".into()))?
                        .iter()
                        .map(|x| x.as_u64().ok_or(CliError("element entries must be integers".into())))
                        .collect()
                })
                .collect()
        };
        let s = parse_set("set")?;
        let s2 = parse_set("set2")?;
        let images: Vec<usize> = pair
            .get("witness_permutation")
            .and_then(Value::as_array)
            .ok_or(CliError("scan pair lacks a witness permutation".into()))?
            .iter()
            .map(|v| v.as_u64().map(|u| u as usize).ok_or(CliError("bad permutation".into())))
            .collect::<CliResult<_>>()?;
        let perm = Permutation::new(images)?;
        let g1 = finite_cayley_graph(&group, &s)?;
        let g2 = finite_cayley_graph(&group, &s2)?;
        let is_iso = g1.arc_count() == g2.arc_count()
            && g1
                .arcs
                .iter()
                .all(|&(a, b)| g2.has_arc(perm.apply(a), perm.apply(b)));
        if !is_iso {
            return Ok(false);
        }
        if auts.iter().any(|alpha| alpha.apply_set(&group, &s) == s2) {
            return Ok(false);
        }
    }
    Ok(true)
}
