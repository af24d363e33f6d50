use super::{EdgeId, SpanningTree, WeightedGraph};
use crate::edgeset::EdgeSet;
use crate::error::{Error, Result};

/// Tree edges on the cycle that non-tree edge `f` closes with `t`.
pub fn fundamental_cycle(g: &WeightedGraph, t: &SpanningTree, f: EdgeId) -> Result<EdgeSet> {
    if f.0 >= g.m() {
        return Err(Error::UnknownEdge(f.to_string()));
    }
    if t.contains(f) {
        return Err(Error::IsATreeEdge(f));
    }
    let (u, v) = g.endpoints(f);
    Ok(t.rooted(g).path(u, v).into_iter().collect())
}

#[derive(Clone, Debug, PartialEq)]
pub enum MstVerdict {
    Pass,
    /// `non_tree` is lighter than `heavier`, a tree edge on its cycle.
    Fail {
        non_tree: EdgeId,
        heavier: EdgeId,
    },
}

impl MstVerdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, MstVerdict::Pass)
    }
}

/// Checks the strong cycle property: every non-tree edge must be the
/// heaviest edge on its fundamental cycle.
pub fn verify_mst_properties(g: &WeightedGraph, t: &SpanningTree) -> Result<MstVerdict> {
    t.validate(g)?;
    let rooted = t.rooted(g);
    for f in t.non_tree_edges(g) {
        let (u, v) = g.endpoints(f);
        let heaviest = rooted.path(u, v).into_iter().max_by_key(|&e| g.key(e));
        if let Some(e) = heaviest {
            if g.key(e) > g.key(f) {
                return Ok(MstVerdict::Fail {
                    non_tree: f,
                    heavier: e,
                });
            }
        }
    }
    Ok(MstVerdict::Pass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::triangle;

    #[test]
    fn triangle_cycle() {
        let g = triangle();
        let t = SpanningTree::new(&g, [EdgeId(0), EdgeId(1)]).unwrap();
        let c = fundamental_cycle(&g, &t, EdgeId(2)).unwrap();
        assert_eq!(c, [EdgeId(0), EdgeId(1)].into_iter().collect());
        assert_eq!(
            fundamental_cycle(&g, &t, EdgeId(0)),
            Err(Error::IsATreeEdge(EdgeId(0)))
        );
    }

    #[test]
    fn star_leaf_chord() {
        let mut g = WeightedGraph::new(4);
        let s1 = g.add_edge(0, 1, 1.0, "s1").unwrap();
        let s2 = g.add_edge(0, 2, 2.0, "s2").unwrap();
        g.add_edge(0, 3, 3.0, "s3").unwrap();
        let chord = g.add_edge(1, 2, 9.0, "c").unwrap();
        let t = SpanningTree::new(&g, [EdgeId(0), EdgeId(1), EdgeId(2)]).unwrap();
        let c = fundamental_cycle(&g, &t, chord).unwrap();
        assert_eq!(c, [s1, s2].into_iter().collect());
    }

    #[test]
    fn verdicts_on_triangle() {
        let g = triangle();
        let good = SpanningTree::new(&g, [EdgeId(0), EdgeId(1)]).unwrap();
        assert_eq!(verify_mst_properties(&g, &good).unwrap(), MstVerdict::Pass);
        let bad = SpanningTree::new(&g, [EdgeId(0), EdgeId(2)]).unwrap();
        assert_eq!(
            verify_mst_properties(&g, &bad).unwrap(),
            MstVerdict::Fail {
                non_tree: EdgeId(1),
                heavier: EdgeId(2)
            }
        );
        let partial = SpanningTree::from_edges_unchecked([EdgeId(0)]);
        assert!(verify_mst_properties(&g, &partial).is_err());
    }
}
