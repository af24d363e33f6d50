//! Line-oriented update scripts.
//!
//! ```text
//! inc <edge> <delta>
//! dec <edge> <delta>
//! del <edge>
//! ins <u> <v> <w> <edge>
//! ```
//!
//! `<edge>` is a numeric edge id or a label. Deletion raises the edge to
//! the sentinel weight; insertion lowers a deleted edge with endpoints
//! `u`, `v` back to `w`. `#` starts a comment.

use dmst_core::{EdgeId, Vertex, WeightedGraph, SENTINEL};

use crate::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq)]
pub enum EdgeRef {
    Id(usize),
    Label(String),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Update {
    Inc(EdgeRef, f64),
    Dec(EdgeRef, f64),
    Del(EdgeRef),
    Ins {
        u: Vertex,
        v: Vertex,
        w: f64,
        edge: EdgeRef,
    },
}

/// Source line of each update, for error messages.
#[derive(Clone, Debug, PartialEq)]
pub struct Scripted {
    pub line: usize,
    pub update: Update,
}

fn edge_ref(s: &str) -> EdgeRef {
    match s.parse() {
        Ok(id) => EdgeRef::Id(id),
        Err(_) => EdgeRef::Label(s.to_owned()),
    }
}

pub fn parse_script(text: &str) -> CliResult<Vec<Scripted>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let bad = |msg: String| CliError::Script { line, msg };
        let f: Vec<&str> = body.split_whitespace().collect();
        let num = |s: &str| -> CliResult<f64> {
            match s.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(x),
                _ => Err(bad(format!("bad number {s:?}"))),
            }
        };
        let vertex = |s: &str| -> CliResult<Vertex> {
            s.parse().map_err(|_| bad(format!("bad vertex {s:?}")))
        };
        let update = match f[..] {
            ["inc", e, d] => Update::Inc(edge_ref(e), num(d)?),
            ["dec", e, d] => Update::Dec(edge_ref(e), num(d)?),
            ["del", e] => Update::Del(edge_ref(e)),
            ["ins", u, v, w, e] => Update::Ins {
                u: vertex(u)?,
                v: vertex(v)?,
                w: num(w)?,
                edge: edge_ref(e),
            },
            _ => return Err(bad(format!("cannot parse {body:?}"))),
        };
        out.push(Scripted { line, update });
    }
    Ok(out)
}

fn resolve_edge(g: &WeightedGraph, r: &EdgeRef) -> Option<EdgeId> {
    match r {
        EdgeRef::Id(i) if *i < g.m() => Some(EdgeId(*i)),
        EdgeRef::Id(_) => None,
        EdgeRef::Label(l) => g.find_label(l),
    }
}

/// The edge an update touches and its new weight.
pub fn resolve(g: &WeightedGraph, s: &Scripted) -> CliResult<(EdgeId, f64)> {
    let bad = |msg: String| CliError::Script { line: s.line, msg };
    let find = |r: &EdgeRef| resolve_edge(g, r).ok_or_else(|| bad(format!("unknown edge {r:?}")));
    match &s.update {
        Update::Inc(r, d) => {
            let e = find(r)?;
            Ok((e, g.weight(e) + d))
        }
        Update::Dec(r, d) => {
            let e = find(r)?;
            Ok((e, g.weight(e) - d))
        }
        Update::Del(r) => Ok((find(r)?, SENTINEL)),
        Update::Ins { u, v, w, edge } => {
            let e = find(edge)?;
            let (a, b) = g.endpoints(e);
            if (a, b) != (*u, *v) && (a, b) != (*v, *u) {
                return Err(bad(format!("edge {e} joins {a} and {b}, not {u} and {v}")));
            }
            if g.weight(e) != SENTINEL {
                return Err(bad(format!("edge {e} is present; delete it first")));
            }
            Ok((e, *w))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri() -> WeightedGraph {
        dmst_core::load_graph("3 3\n0 1 1 a\n1 2 2 b\n0 2 3 c\n").unwrap()
    }

    #[test]
    fn parses_every_form() {
        let s = parse_script("inc 0 1.5\n# note\n\ndec b 0.5\ndel 2 # gone\nins 2 0 7 c\n").unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s[0].update, Update::Inc(EdgeRef::Id(0), 1.5));
        assert_eq!(s[1].update, Update::Dec(EdgeRef::Label("b".into()), 0.5));
        assert_eq!(s[2].line, 5);
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["bump 0 1", "inc 0", "inc 0 x", "ins 0 1 2", "inc 0 nan"] {
            assert!(matches!(
                parse_script(bad),
                Err(CliError::Script { line: 1, .. })
            ));
        }
    }

    #[test]
    fn resolves_against_the_graph() {
        let mut g = tri();
        let s = parse_script("inc a 4\ndel c\nins 0 2 9 c\nins 0 1 9 c\n").unwrap();
        assert_eq!(resolve(&g, &s[0]).unwrap(), (EdgeId(0), 5.0));
        assert!(resolve(&g, &s[2]).is_err(), "c is still present");
        let (e, w) = resolve(&g, &s[1]).unwrap();
        g.set_weight(e, w).unwrap();
        assert_eq!(resolve(&g, &s[2]).unwrap(), (EdgeId(2), 9.0));
        assert!(resolve(&g, &s[3]).is_err(), "wrong endpoints");
    }
}
