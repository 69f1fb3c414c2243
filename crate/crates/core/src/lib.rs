//! FastMap embeddings, differential heuristics and A* search on weighted
//! undirected graphs and MovingAI grid maps.
//!
//! The library is generic over the weight type ([`Scalar`], implemented for
//! `f32` and `f64`). The aliases below fix it to `f64`, which is what the
//! command-line tool uses.

pub mod bench;
pub mod fastmap;
pub mod graph;
pub mod grid;
pub mod heuristics;
pub mod mapgen;
pub mod persist;
pub mod scalar;
pub mod search;
pub mod stats;
mod wide;

pub use fastmap::{
    build_embedding, build_embedding_traced, fastmap_heuristic, get_farthest_pair, BuildTrace,
    DimSpan, EmbedConfig, EmbedError, Embedding, Epsilon, FarthestPair,
};
pub use graph::{
    build_graph, farthest_node, shortest_path_tree, GraphError, NodeId, ShortestPathTree,
    WeightedGraph,
};
pub use grid::{
    grid_to_graph, parse_map, parse_map_with, parse_scenario, validate_scenario, Cell, GridGraph,
    GridMap, MapError, Neighborhood, ParseOptions, Scenario, ScenarioEntry, ScenarioIssue,
};
pub use heuristics::{
    build_differential, differential_heuristic, manhattan_heuristic, octile_heuristic, Heuristic,
    HeuristicError, HeuristicProvider, PivotTable,
};
pub use scalar::Scalar;
pub use search::{astar, dijkstra_baseline, SearchEngine, SearchResult};

pub type Graph = WeightedGraph<f64>;
pub type Tree = ShortestPathTree<f64>;
pub type Embedding64 = Embedding<f64>;
pub type Embedding32 = Embedding<f32>;
pub type Pivots = PivotTable<f64>;
pub type Provider = HeuristicProvider<f64>;
pub type Grid = GridGraph<f64>;
pub type Result64 = SearchResult<f64>;
