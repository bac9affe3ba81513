//! JSON run report.
//!
//! Keys are emitted in sorted order and arrays in a fixed order (pairs by
//! system names, edges by `(winner, loser)`), so equal inputs give
//! byte-identical files. Optional values are written as `null` rather than
//! omitted.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::model::Mode;
use crate::siggraph::{rank_systems, Comparison, Edge, SignificanceGraph, RANKING_METHOD};

pub fn report_value(c: &Comparison) -> Value {
    let cfg = &c.config;
    let baseline = match &cfg.mode {
        Mode::Nx1 { baseline } => Value::String(baseline.clone()),
        Mode::NxN => Value::Null,
    };
    let pairs: Vec<Value> = c
        .pairs
        .iter()
        .map(|p| {
            json!({
                "systems": [p.system_i, p.system_j],
                "n_i": p.n_i,
                "n_j": p.n_j,
                "test": p.test.name(),
                "statistic": p.statistic,
                "raw_p": p.raw_p,
                "apv": p.apv,
                "significant": p.significant,
                "winner": p.winner,
                "small_sample": p.small_sample,
                "note": p.note,
            })
        })
        .collect();
    let edges: Vec<Value> = c
        .graph
        .edges
        .iter()
        .map(|e| {
            json!({
                "winner": e.winner,
                "loser": e.loser,
                "apv": e.apv,
                "raw_p": e.raw_p,
                "n_winner": e.n_winner,
                "n_loser": e.n_loser,
            })
        })
        .collect();
    let ranking = rank_systems(&c.graph);
    json!({
        "config": {
            "perspective": cfg.perspective.name(),
            "test": cfg.test.name(),
            "correction": cfg.correction.name(),
            "mode": cfg.mode.label(),
            "baseline": baseline,
            "alpha": cfg.alpha,
            "bergmann_cap": cfg.bergmann_cap,
        },
        "systems": c.graph.nodes,
        "pairs": pairs,
        "edges": edges,
        "ranking": {
            "method": RANKING_METHOD,
            "groups": ranking.groups,
        },
        "warnings": c.warnings,
    })
}

/// Pretty-printed report with a trailing newline.
pub fn to_json(c: &Comparison) -> String {
    let mut s = serde_json::to_string_pretty(&report_value(c)).expect("report values are finite");
    s.push('\n');
    s
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::MalformedReport(format!("missing key {key:?}")))
}

fn string(v: &Value, what: &str) -> Result<String> {
    v.as_str()
        .map(str::to_string)
        .ok_or_else(|| Error::MalformedReport(format!("{what} must be a string")))
}

fn number(v: &Value, what: &str) -> Result<f64> {
    v.as_f64()
        .ok_or_else(|| Error::MalformedReport(format!("{what} must be a number")))
}

fn count(v: &Value, what: &str) -> Result<u64> {
    v.as_u64()
        .ok_or_else(|| Error::MalformedReport(format!("{what} must be a non-negative integer")))
}

/// Rebuilds the significance graph stored in a report.
pub fn graph_from_report(bytes: &[u8]) -> Result<SignificanceGraph> {
    let root: Value = serde_json::from_slice(bytes).map_err(|e| Error::MalformedReport(e.to_string()))?;
    let obj = root
        .as_object()
        .ok_or_else(|| Error::MalformedReport("top level must be an object".into()))?;
    let systems = field(obj, "systems")?
        .as_array()
        .ok_or_else(|| Error::MalformedReport("systems must be an array".into()))?
        .iter()
        .map(|v| string(v, "system name"))
        .collect::<Result<Vec<_>>>()?;
    let edges = field(obj, "edges")?
        .as_array()
        .ok_or_else(|| Error::MalformedReport("edges must be an array".into()))?
        .iter()
        .map(|v| {
            let e = v
                .as_object()
                .ok_or_else(|| Error::MalformedReport("edge must be an object".into()))?;
            Ok(Edge {
                winner: string(field(e, "winner")?, "winner")?,
                loser: string(field(e, "loser")?, "loser")?,
                apv: number(field(e, "apv")?, "apv")?,
                raw_p: number(field(e, "raw_p")?, "raw_p")?,
                n_winner: count(field(e, "n_winner")?, "n_winner")?,
                n_loser: count(field(e, "n_loser")?, "n_loser")?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    SignificanceGraph::new(systems, edges).map_err(|e| Error::MalformedReport(e.to_string()))
}
