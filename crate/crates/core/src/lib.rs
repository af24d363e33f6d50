//! Static, fully-dynamic and distributed minimum spanning trees.
//!
//! Every structure here is checked against the brute-force routines in
//! [`oracle`]; the distributed protocols run on the deterministic
//! simulator in [`sim`].

pub mod dist_dynamic;
pub mod dynamic;
pub mod edgeset;
pub mod error;
pub mod generate;
pub mod ghs;
pub mod graph;
pub mod oracle;
pub mod responsibility;
pub mod sim;
pub mod static_mst;
pub mod topology;

pub use dist_dynamic::{DistConfig, DistDynamic, DistDynamicMst};
pub use dynamic::{DynamicMst, UpdateOutcome};
pub use edgeset::EdgeSet;
pub use error::{Error, Result};
pub use generate::{generate, GraphKind};
pub use graph::{
    fundamental_cycle, load_graph, save_graph, ternarize, verify_mst_properties, EdgeId, EdgeKey,
    MstVerdict, RootedTree, SpanningTree, TernaryMapping, Vertex, WeightedEdge, WeightedGraph,
    SENTINEL,
};
pub use responsibility::{ResponsibilityDmst, ResponsibilityIndex};
pub use static_mst::{kruskal, prim, UnionFind};
pub use topology::{TopologyDmst, TopologyHierarchy};
