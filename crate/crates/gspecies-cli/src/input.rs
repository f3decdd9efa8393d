//! Input resolution: an argument is inline JSON, a built-in example name, or a file path.

use gspecies::fixtures::{self, DEFAULT_TRUNC};
use gspecies::gsp::Gsp;
use gspecies::json::{gsp_from_json, matrix_from_json, species_from_json};
use gspecies::seed::{find_skew_symmetrizer, ExchangeMatrix};
use gspecies::species::species_from_matrix;
use gspecies::{counterexample, GspError, Result};
use serde_json::{json, Value};

pub const BUILTINS: &[&str] = &["c3", "rank2", "three-cycle", "counterexample"];

fn builtin_gsp(name: &str) -> Option<Gsp> {
    match name {
        "c3" => Some(fixtures::c3_gsp()),
        "rank2" => Some(fixtures::rank2_gsp()),
        "three-cycle" => Some(fixtures::three_cycle_gsp()),
        _ => None,
    }
}

fn builtin_matrix(name: &str) -> Option<ExchangeMatrix> {
    match name {
        "c3" => Some(fixtures::c3_matrix()),
        "rank2" => Some(fixtures::rank2_matrix()),
        "counterexample" => Some(counterexample::counterexample_matrix()),
        _ => None,
    }
}

pub fn load_value(arg: &str) -> Result<Value> {
    let t = arg.trim_start();
    let text = if t.starts_with('{') || t.starts_with('[') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| GspError::Invalid(format!("cannot read {arg}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| GspError::Invalid(format!("cannot parse {arg}: {e}")))
}

fn rows_object(v: Value) -> Value {
    if v.is_array() {
        json!({ "rows": v })
    } else {
        v
    }
}

fn is_matrix(v: &Value) -> bool {
    v.get("rows").is_some()
}

/// A GSP from a built-in, a GSP/species encoding, or a matrix (via its minimal symmetrizer).
pub fn load_gsp(arg: &str, trunc: Option<usize>) -> Result<Gsp> {
    let n = trunc.unwrap_or(DEFAULT_TRUNC);
    if let Some(mut g) = builtin_gsp(arg) {
        if let Some(t) = trunc {
            g.trunc = t;
        }
        return Ok(g);
    }
    if let Some(b) = builtin_matrix(arg) {
        return gsp_of_matrix(&b, n);
    }
    let v = rows_object(load_value(arg)?);
    if is_matrix(&v) {
        return gsp_of_matrix(&matrix_from_json(&v)?, n);
    }
    let mut g = gsp_from_json(&v, n)?;
    if let Some(t) = trunc {
        g.trunc = t;
    }
    Ok(g)
}

pub fn gsp_of_matrix(b: &ExchangeMatrix, trunc: usize) -> Result<Gsp> {
    let d = find_skew_symmetrizer(b)?;
    Ok(Gsp::from_species(&species_from_matrix(b, &d)?, trunc))
}

/// An exchange matrix from a built-in, a matrix encoding, a bare row list, or a species.
pub fn load_matrix(arg: &str) -> Result<ExchangeMatrix> {
    if let Some(b) = builtin_matrix(arg) {
        return Ok(b);
    }
    let v = rows_object(load_value(arg)?);
    if is_matrix(&v) {
        matrix_from_json(&v)
    } else {
        species_from_json(&v)?.exchange_matrix()
    }
}

/// Comma-separated vertex labels; the empty string is the empty sequence.
pub fn parse_seq(s: &str, labels: &[String]) -> Result<Vec<usize>> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty()).map(|x| parse_vertex(x, labels)).collect()
}

pub fn parse_vertex(s: &str, labels: &[String]) -> Result<usize> {
    labels
        .iter()
        .position(|l| l == s.trim())
        .ok_or_else(|| GspError::IndexOutOfRange { index: s.trim().parse().unwrap_or(usize::MAX), size: labels.len() })
}
