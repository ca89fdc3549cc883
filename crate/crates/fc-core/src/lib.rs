//! Discrepancy-sensitive dynamic fractional cascading.
//!
//! A catalog graph stores a sorted catalog at every vertex of a
//! bounded-degree graph and maintains, per directed edge, a bridge from each
//! element to its closed predecessor in the neighboring catalog. A query for
//! a value along a path pays one full search at the first vertex and then,
//! per edge, a forward finger search whose cost grows only with the local
//! discrepancy between the two catalogs around the query value — not with
//! their size. Bridges are maintained exactly under insertions and
//! deletions.
//!
//! On top of this sits a dynamic planar point set ([`PointSet`]): a
//! weight-balanced tree over x whose nodes carry cascaded y-catalogs,
//! answering dominated-maxima (staircase) queries per quadrant and exact
//! nearest-neighbor queries under any Minkowski metric.

pub mod audit;
pub mod catalog;
pub mod graph;
pub mod key;
pub mod points;
pub mod reduce;
pub mod seed;
pub mod tree;

pub use catalog::{Catalog, CatalogError, ElementHandle, FINGER_COST_COEFF};
pub use graph::{
    load_graph, load_graph_path, write_graph, CatalogGraph, CostTrace, EdgeCost, GraphError,
    GraphFileError, LocalDiscrepancy, VertexId, EDGE_COST_COEFF,
};
pub use key::{FiniteKey, Key, KeyError};
pub use points::{
    load_points, load_points_path, nn_oracle, staircase_oracle, GeometryError, Metric, Point,
    PointFileError, PointId, Quadrant, Staircase,
};
pub use reduce::{reduce_degree, ReducedGraph};
pub use seed::mix_seed;
pub use tree::PointSet;
