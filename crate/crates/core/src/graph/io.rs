//! Edge-list text format.
//!
//! ```text
//! n m
//! u v weight id
//! ...
//! ```
//!
//! Vertices are 0-based, weights decimal, ids arbitrary whitespace-free
//! strings. Blank lines and lines starting with `#` are skipped.

use std::fmt::Write as _;

use super::{WeightedEdge, WeightedGraph};
use crate::error::{Error, Result};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

pub fn load_graph(text: &str) -> Result<WeightedGraph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(parse_err(hline, "header must be `n m`"));
    }
    let n: usize = fields[0]
        .parse()
        .map_err(|_| parse_err(hline, format!("bad vertex count {:?}", fields[0])))?;
    let m: usize = fields[1]
        .parse()
        .map_err(|_| parse_err(hline, format!("bad edge count {:?}", fields[1])))?;

    let mut g = WeightedGraph::new(n);
    let mut last_line = hline;
    for (lineno, line) in lines {
        last_line = lineno;
        if g.m() == m {
            return Err(parse_err(lineno, format!("more than {m} edge lines")));
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 4 {
            return Err(parse_err(lineno, "edge line must be `u v weight id`"));
        }
        let u: usize = f[0]
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad vertex {:?}", f[0])))?;
        let v: usize = f[1]
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad vertex {:?}", f[1])))?;
        let w: f64 = f[2]
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad weight {:?}", f[2])))?;
        if !w.is_finite() {
            return Err(Error::NonFiniteWeight {
                label: f[3].to_string(),
            });
        }
        g.add_edge(u, v, w, f[3])?;
    }
    if g.m() != m {
        return Err(parse_err(
            last_line,
            format!("expected {m} edges, found {}", g.m()),
        ));
    }
    Ok(g)
}

/// Orders ids so that `e2` sorts before `e10`.
fn label_order(a: &WeightedEdge, b: &WeightedEdge) -> std::cmp::Ordering {
    (a.label.len(), &a.label).cmp(&(b.label.len(), &b.label))
}

/// Serializes `g`, edges sorted by id, so equal graphs produce equal bytes.
pub fn save_graph(g: &WeightedGraph) -> String {
    let mut edges: Vec<&WeightedEdge> = g.edges().iter().collect();
    edges.sort_by(|a, b| label_order(a, b));
    let mut out = String::new();
    writeln!(out, "{} {}", g.n(), g.m()).unwrap();
    for e in edges {
        writeln!(out, "{} {} {} {}", e.u, e.v, e.weight, e.label).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, GraphKind};

    #[test]
    fn triangle_document() {
        let g = load_graph("3 3\n0 1 1.0 e0\n1 2 2.0 e1\n0 2 3.0 e2\n").unwrap();
        assert_eq!((g.n(), g.m()), (3, 3));
        assert_eq!(g.label(g.find_label("e1").unwrap()), "e1");
    }

    #[test]
    fn duplicate_weight_names_both_ids() {
        let err = load_graph("3 2\n0 1 5.0 a\n1 2 5.0 b\n").unwrap_err();
        assert!(
            matches!(err, Error::DuplicateWeight { ref first, ref second, .. }
            if first == "a" && second == "b")
        );
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = load_graph("3 2\n0 1 1.0 a\n1 x 2.0 b\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        let err = load_graph("3 3\n0 1 1.0 a\n").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
        assert!(matches!(
            load_graph("2 1\n1 1 1.0 a\n"),
            Err(Error::SelfLoop { .. })
        ));
        assert!(matches!(
            load_graph("2 1\n0 1 inf a\n"),
            Err(Error::NonFiniteWeight { .. })
        ));
    }

    #[test]
    fn generated_graph_round_trips() {
        let g = generate(GraphKind::Random, 64, 200, 11).unwrap();
        let text = save_graph(&g);
        let g2 = load_graph(&text).unwrap();
        assert_eq!(g, g2);
        assert_eq!(save_graph(&g2), text);
    }
}
