//! CSV and DOT rendering.

use std::fmt::Write as _;

use dmst_core::{EdgeId, SpanningTree, WeightedGraph};

use crate::experiment::Row;
use crate::CliResult;

/// Column order of every CSV this tool writes. `messages_by_type` is a
/// `;`-separated list of `Type:count`; empty cells mean "not applicable".
pub const CSV_HEADER: [&str; 16] = [
    "seed",
    "algorithm",
    "n",
    "m",
    "delay",
    "z",
    "updates",
    "swaps",
    "messages",
    "messages_by_type",
    "message_bound",
    "within_bound",
    "completion_time",
    "tree_weight",
    "oracle_weight",
    "oracle_match",
];

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn record(r: &Row) -> Vec<String> {
    let by_type = r
        .by_type
        .iter()
        .map(|(k, v)| format!("{k}:{v}"))
        .collect::<Vec<_>>()
        .join(";");
    let within = match (r.messages, r.message_bound) {
        (Some(m), Some(b)) => Some(m <= b),
        _ => None,
    };
    vec![
        r.seed.to_string(),
        r.algorithm.to_string(),
        r.n.to_string(),
        r.m.to_string(),
        r.delay.clone(),
        opt(r.z),
        r.updates.to_string(),
        r.swaps.to_string(),
        opt(r.messages),
        by_type,
        opt(r.message_bound),
        opt(within),
        opt(r.completion_time),
        r.tree_weight.to_string(),
        r.oracle_weight.to_string(),
        r.oracle_match.to_string(),
    ]
}

pub fn csv_text(rows: &[&Row]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record(record(r))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Tree edges solid, the rest dashed; the last swap's leaving edge red and
/// entering edge blue.
pub fn dot(g: &WeightedGraph, t: &SpanningTree, last_swap: Option<(EdgeId, EdgeId)>) -> String {
    let mut out = String::from("graph mst {\n");
    for v in 0..g.n() {
        let _ = writeln!(out, "  {v};");
    }
    for e in g.edges() {
        let mut attrs = vec![format!("label=\"{} ({})\"", e.label, e.weight)];
        attrs.push(if t.contains(e.id) { "style=solid" } else { "style=dashed" }.into());
        match last_swap {
            Some((out_e, _)) if out_e == e.id => attrs.push("color=red".into()),
            Some((_, in_e)) if in_e == e.id => attrs.push("color=blue".into()),
            _ => {}
        }
        let _ = writeln!(out, "  {} -- {} [{}];", e.u, e.v, attrs.join(", "));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_marks_tree_and_swap() {
        let g = dmst_core::load_graph("3 3\n0 1 1 a\n1 2 2 b\n0 2 3 c\n").unwrap();
        let t = dmst_core::kruskal(&g).unwrap();
        let d = dot(&g, &t, Some((EdgeId(1), EdgeId(2))));
        assert!(d.contains("0 -- 1 [label=\"a (1)\", style=solid];"));
        assert!(d.contains("1 -- 2 [label=\"b (2)\", style=solid, color=red];"));
        assert!(d.contains("0 -- 2 [label=\"c (3)\", style=dashed, color=blue];"));
    }
}
