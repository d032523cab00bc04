//! Command-line front end: every decision and demo of the library behind
//! JSON input/output with machine-checkable certificates.
//!
//! Payloads are read from a file argument or stdin. Output is a single
//! canonical JSON document: keys sorted, connection sets normalized and
//! echoed back, integers emitted as JSON numbers up to 53-bit safety and
//! as decimal strings beyond.
//!
//! Exit codes: 0 decided/succeeded, 1 decided-negative for yes/no queries,
//! 2 invalid input.

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use serde_json::{json, Map, Value};
use std::collections::BTreeSet;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

mod convert;
mod verify;

use convert::*;

#[derive(Parser)]
#[command(name = "zn-ci", version, about = "CI decisions for Cayley (di)graphs on Z^n")]
struct Cli {
    /// Seed echoed into the output; reserved for randomized verification
    /// modes (the decision commands themselves are deterministic).
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Smith normal form of an integer matrix.
    Snf { input: Option<PathBuf> },
    /// Decide whether Cay(Z^n; S) is a (D)CI-graph.
    DecideCi { input: Option<PathBuf> },
    /// Decide isomorphism of two Cayley graphs on Z^n with a witness.
    Iso { input: Option<PathBuf> },
    /// The setwise stabilizer of S inside Aut(<S>).
    Stab { input: Option<PathBuf> },
    /// Rigidity decision on Z: S2 = S, S2 = -S, or neither.
    ZIso { input: Option<PathBuf> },
    /// Scan a small abelian group for non-CI connection-set pairs.
    ScanFinite { input: Option<PathBuf> },
    /// Verify the mod-5 map on a window of Z.
    DemoMod5 { input: Option<PathBuf> },
    /// Re-check a previously emitted result document.
    Verify { input: Option<PathBuf> },
}

pub(crate) struct CliError(pub String);

impl From<zn_ci::Error> for CliError {
    fn from(e: zn_ci::Error) -> Self {
        CliError(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError(format!("malformed JSON: {e}"))
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError(format!("cannot read input: {e}"))
    }
}

pub(crate) type CliResult<T> = Result<T, CliError>;

fn read_payload(input: &Option<PathBuf>) -> CliResult<Value> {
    let text = match input {
        Some(path) if path.as_os_str() != "-" => std::fs::read_to_string(path)?,
        _ => {
            let mut buf = String::new();
            std::io::stdin().read_to_string(&mut buf)?;
            buf
        }
    };
    Ok(serde_json::from_str(&text)?)
}

fn envelope(command: &str, input_echo: Value, result: Value, seed: Option<u64>) -> Value {
    let mut map = Map::new();
    map.insert("schema_version".into(), json!("1"));
    map.insert("command".into(), json!(command));
    map.insert("input".into(), input_echo);
    map.insert("result".into(), result);
    if let Some(seed) = seed {
        map.insert("seed".into(), json!(seed));
    }
    Value::Object(map)
}

fn run_snf(payload: &Value) -> CliResult<(Value, Value, u8)> {
    let matrix = get_matrix(payload, "matrix")?;
    let s = zn_ci::intlin::snf(&matrix);
    let echo = json!({ "matrix": matrix_to_value(&matrix) });
    let result = json!({
        "d": matrix_to_value(&s.d),
        "u": matrix_to_value(&s.u),
        "v": matrix_to_value(&s.v),
        "rank": s.rank(),
        "invariant_factors": s.invariant_factors().iter().map(big_to_value).collect::<Vec<_>>(),
    });
    Ok((echo, result, 0))
}

fn run_decide_ci(payload: &Value) -> CliResult<(Value, Value, u8)> {
    let s = get_connection_set(payload)?;
    let verdict = zn_ci::decision::decide_ci(&s)?;
    let echo = connection_set_echo(&s);
    let result = verdict_to_value(&verdict);
    Ok((echo, result, 0))
}

fn run_iso(payload: &Value) -> CliResult<(Value, Value, u8)> {
    let s = get_connection_set(payload)?;
    let s2 = get_second_set(payload, s.n(), s.mode())?;
    let witness = zn_ci::decision::are_isomorphic(&s, &s2)?;
    let mut echo = connection_set_echo(&s);
    echo.as_object_mut()
        .expect("echo is an object")
        .insert("set2".into(), vectors_to_value(s2.vectors()));
    let code = u8::from(!witness.is_isomorphic());
    let result = iso_witness_to_value(&witness);
    Ok((echo, result, code))
}

fn run_stab(payload: &Value) -> CliResult<(Value, Value, u8)> {
    let s = get_connection_set(payload)?;
    let h = s.span_lattice();
    let group = zn_ci::symmetry::set_stabilizer(&h, &s)?;
    let echo = connection_set_echo(&s);
    let result = json!({
        "lattice_basis": matrix_to_value(h.basis()),
        "order": group.order(),
        "elements": group
            .elements()
            .iter()
            .map(|t| matrix_to_value(t.matrix()))
            .collect::<Vec<_>>(),
    });
    Ok((echo, result, 0))
}

fn run_z_iso(payload: &Value) -> CliResult<(Value, Value, u8)> {
    let s = get_int_set(payload, "set")?;
    let s2 = get_int_set(payload, "set2")?;
    let sign = zn_ci::decision::z_iso_decide(&s, &s2);
    let echo = json!({
        "set": s.iter().map(big_to_value).collect::<Vec<_>>(),
        "set2": s2.iter().map(big_to_value).collect::<Vec<_>>(),
    });
    let code = u8::from(sign.is_none());
    let result = json!({ "sign": sign });
    Ok((echo, result, code))
}

fn run_scan_finite(payload: &Value) -> CliResult<(Value, Value, u8)> {
    let group = get_group(payload)?;
    let mode = get_scan_mode(payload)?;
    let pairs = zn_ci::oracle::finite_ci_group_scan(&group, mode)?;
    let echo = json!({
        "group": { "primary": group.primary() },
        "mode": scan_mode_name(mode),
    });
    let result = json!({
        "pairs": pairs
            .iter()
            .map(|p| {
                json!({
                    "set": p.set,
                    "set2": p.set2,
                    "witness_permutation": p.witness.images(),
                })
            })
            .collect::<Vec<_>>(),
        "count": pairs.len(),
    });
    Ok((echo, result, 0))
}

fn run_demo_mod5(payload: &Value) -> CliResult<(Value, Value, u8)> {
    let n = payload
        .get("N")
        .and_then(Value::as_i64)
        .ok_or(CliError("payload needs an integer field N".into()))?;
    let verified = zn_ci::oracle::mod5_demo(n)?;
    let echo = json!({ "N": n });
    let result = json!({ "verified": verified, "window": n });
    Ok((echo, result, u8::from(!verified)))
}

fn dispatch(cli: &Cli) -> CliResult<(String, Value, u8)> {
    let (name, input) = match &cli.command {
        Command::Snf { input } => ("snf", input),
        Command::DecideCi { input } => ("decide-ci", input),
        Command::Iso { input } => ("iso", input),
        Command::Stab { input } => ("stab", input),
        Command::ZIso { input } => ("z-iso", input),
        Command::ScanFinite { input } => ("scan-finite", input),
        Command::DemoMod5 { input } => ("demo-mod5", input),
        Command::Verify { input } => ("verify", input),
    };
    let payload = read_payload(input)?;
    let (echo, result, code) = match &cli.command {
        Command::Snf { .. } => run_snf(&payload)?,
        Command::DecideCi { .. } => run_decide_ci(&payload)?,
        Command::Iso { .. } => run_iso(&payload)?,
        Command::Stab { .. } => run_stab(&payload)?,
        Command::ZIso { .. } => run_z_iso(&payload)?,
        Command::ScanFinite { .. } => run_scan_finite(&payload)?,
        Command::DemoMod5 { .. } => run_demo_mod5(&payload)?,
        Command::Verify { .. } => verify::run_verify(&payload)?,
    };
    Ok((name.to_string(), envelope(name, echo, result, cli.seed), code))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok((_, doc, code)) => {
            println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
            ExitCode::from(code)
        }
        Err(CliError(message)) => {
            let doc = json!({
                "schema_version": "1",
                "error": { "message": message },
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
            ExitCode::from(2)
        }
    }
}

pub(crate) fn get_int_set(payload: &Value, key: &str) -> CliResult<BTreeSet<BigInt>> {
    let arr = payload
        .get(key)
        .and_then(Value::as_array)
        .ok_or(CliError(format!("payload needs an array field {key}")))?;
    arr.iter().map(value_to_big).collect()
}

pub(crate) fn verdict_to_value(v: &zn_ci::decision::CiVerdict) -> Value {
    let certificate = match &v.certificate {
        Some(zn_ci::decision::Certificate::Coverage(c)) => json!({
            "type": "coverage",
            "k": big_to_value(&c.k),
            "card_extendable_image": big_to_value(&c.card_extendable_image),
            "card_stabilizer_image": big_to_value(&c.card_stabilizer_image),
            "card_intersection": big_to_value(&c.card_intersection),
            "card_quotient": big_to_value(&c.card_quotient),
        }),
        Some(zn_ci::decision::Certificate::Witness(w)) => json!({
            "type": "witness",
            "witness_set": vectors_to_value(w.witness_set.vectors()),
            "component_map": matrix_to_value(&w.component_map),
            "uncovered_class": w.uncovered_class.as_ref().map(mod_matrix_to_value),
        }),
        None => Value::Null,
    };
    json!({
        "is_ci": v.is_ci,
        "reason": v.reason.code(),
        "components": index_to_value(&v.components),
        "certificate": certificate,
        "uncertain": v.uncertain,
    })
}

pub(crate) fn iso_witness_to_value(w: &zn_ci::decision::IsoWitness) -> Value {
    use zn_ci::decision::IsoWitness;
    let witness = match w {
        IsoWitness::AmbientAutomorphism(m) => json!({
            "kind": "AMBIENT_AUTOMORPHISM",
            "matrix": matrix_to_value(m),
        }),
        IsoWitness::Componentwise {
            component_map,
            components,
        } => json!({
            "kind": "COMPONENTWISE",
            "component_map": matrix_to_value(component_map),
            "components": index_to_value(components),
        }),
        IsoWitness::None => json!({ "kind": "NONE" }),
    };
    json!({ "isomorphic": w.is_isomorphic(), "witness": witness })
}

pub(crate) fn connection_set_echo(s: &zn_ci::cayley::ConnectionSet) -> Value {
    json!({
        "n": s.n(),
        "mode": mode_name(s.mode()),
        "set": vectors_to_value(s.vectors()),
    })
}
