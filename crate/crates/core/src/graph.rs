//! Undirected non-negative weighted graphs and single-source shortest paths.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::sync::Arc;

use crate::scalar::Scalar;

/// Dense node identifier in `0..node_count`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn from_index(index: usize) -> Self {
        NodeId(u32::try_from(index).expect("node index fits in u32"))
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for NodeId {
    fn from(v: u32) -> Self {
        NodeId(v)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GraphError {
    #[error("edge {edge} has negative weight {weight}")]
    NegativeWeight { edge: usize, weight: f64 },
    #[error("edge {edge} has non-finite weight {weight}")]
    NonFiniteWeight { edge: usize, weight: f64 },
    #[error("node {node} is out of range for a graph with {node_count} nodes")]
    NodeOutOfRange { node: usize, node_count: usize },
    #[error("edge {edge} is a self-loop on node {node}")]
    SelfLoop { edge: usize, node: usize },
    #[error("expected {expected} edge weights, got {actual}")]
    WeightCountMismatch { expected: usize, actual: usize },
    #[error("graph has no nodes")]
    EmptyGraph,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Arc_ {
    to: NodeId,
    edge: u32,
}

/// Edge endpoints and CSR adjacency. Shared between a graph and every
/// reweighted copy of it.
#[derive(Debug, PartialEq, Eq)]
struct Topology {
    node_count: usize,
    endpoints: Vec<(NodeId, NodeId)>,
    offsets: Vec<usize>,
    arcs: Vec<Arc_>,
}

/// Immutable undirected graph with non-negative finite edge weights.
///
/// Neighbor lists are sorted by neighbor id. Reweighted copies made with
/// [`WeightedGraph::with_weights`] share the topology.
#[derive(Clone, Debug)]
pub struct WeightedGraph<S> {
    topology: Arc<Topology>,
    weights: Vec<S>,
}

fn check_weight<S: Scalar>(edge: usize, w: S) -> Result<(), GraphError> {
    if !w.is_finite() {
        return Err(GraphError::NonFiniteWeight {
            edge,
            weight: w.as_f64(),
        });
    }
    if w < S::zero() {
        return Err(GraphError::NegativeWeight {
            edge,
            weight: w.as_f64(),
        });
    }
    Ok(())
}

impl<S: Scalar> WeightedGraph<S> {
    /// Builds a graph from `(u, v, w)` triples.
    pub fn new<I>(node_count: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize, S)>,
    {
        let mut endpoints = Vec::new();
        let mut weights = Vec::new();
        let mut degree = vec![0usize; node_count];
        for (i, (u, v, w)) in edges.into_iter().enumerate() {
            for node in [u, v] {
                if node >= node_count {
                    return Err(GraphError::NodeOutOfRange { node, node_count });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop { edge: i, node: u });
            }
            check_weight(i, w)?;
            degree[u] += 1;
            degree[v] += 1;
            endpoints.push((NodeId::from_index(u), NodeId::from_index(v)));
            weights.push(w);
        }

        let mut offsets = Vec::with_capacity(node_count + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..node_count].to_vec();
        let mut arcs = vec![
            Arc_ {
                to: NodeId(0),
                edge: 0
            };
            offsets[node_count]
        ];
        for (e, &(u, v)) in endpoints.iter().enumerate() {
            let e = u32::try_from(e).expect("edge index fits in u32");
            arcs[fill[u.index()]] = Arc_ { to: v, edge: e };
            fill[u.index()] += 1;
            arcs[fill[v.index()]] = Arc_ { to: u, edge: e };
            fill[v.index()] += 1;
        }
        for n in 0..node_count {
            arcs[offsets[n]..offsets[n + 1]].sort_unstable_by_key(|a| (a.to, a.edge));
        }

        Ok(WeightedGraph {
            topology: Arc::new(Topology {
                node_count,
                endpoints,
                offsets,
                arcs,
            }),
            weights,
        })
    }

    /// Same nodes and edges, new weights (indexed like [`Self::edges`]).
    pub fn with_weights(&self, weights: Vec<S>) -> Result<Self, GraphError> {
        if weights.len() != self.edge_count() {
            return Err(GraphError::WeightCountMismatch {
                expected: self.edge_count(),
                actual: weights.len(),
            });
        }
        for (i, &w) in weights.iter().enumerate() {
            check_weight(i, w)?;
        }
        Ok(WeightedGraph {
            topology: Arc::clone(&self.topology),
            weights,
        })
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.topology.node_count
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.topology.endpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_count() == 0
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.node_count()).map(NodeId::from_index)
    }

    #[inline]
    pub fn contains(&self, node: NodeId) -> bool {
        node.index() < self.node_count()
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    #[inline]
    pub fn endpoints(&self, edge: usize) -> (NodeId, NodeId) {
        self.topology.endpoints[edge]
    }

    /// All edges as `(u, v, w)` in construction order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, S)> + '_ {
        self.topology
            .endpoints
            .iter()
            .zip(&self.weights)
            .map(|(&(u, v), &w)| (u, v, w))
    }

    /// Neighbors of `node` with the connecting edge weight, ascending by id.
    #[inline]
    pub fn neighbors(&self, node: NodeId) -> impl Iterator<Item = (NodeId, S)> + '_ {
        self.arcs_of(node)
            .iter()
            .map(move |a| (a.to, self.weights[a.edge as usize]))
    }

    /// Like [`Self::neighbors`] but also yields the edge index.
    pub fn incident_edges(&self, node: NodeId) -> impl Iterator<Item = (NodeId, usize, S)> + '_ {
        self.arcs_of(node)
            .iter()
            .map(move |a| (a.to, a.edge as usize, self.weights[a.edge as usize]))
    }

    pub fn degree(&self, node: NodeId) -> usize {
        self.arcs_of(node).len()
    }

    #[inline]
    fn arcs_of(&self, node: NodeId) -> &[Arc_] {
        let t = &self.topology;
        &t.arcs[t.offsets[node.index()]..t.offsets[node.index() + 1]]
    }

    /// Smallest weight among edges joining `u` and `v`, if any.
    pub fn edge_weight(&self, u: NodeId, v: NodeId) -> Option<S> {
        self.neighbors(u)
            .filter(|&(n, _)| n == v)
            .map(|(_, w)| w)
            .reduce(S::min)
    }

    /// True when both graphs have identical nodes and edges.
    pub fn same_topology(&self, other: &WeightedGraph<S>) -> bool {
        Arc::ptr_eq(&self.topology, &other.topology) || self.topology == other.topology
    }

    /// Connected component label for every node; labels are dense and
    /// assigned in order of the smallest node id in each component.
    pub fn components(&self) -> Vec<u32> {
        let n = self.node_count();
        let mut label = vec![u32::MAX; n];
        let mut next = 0u32;
        let mut stack = Vec::new();
        for s in 0..n {
            if label[s] != u32::MAX {
                continue;
            }
            label[s] = next;
            stack.push(NodeId::from_index(s));
            while let Some(u) = stack.pop() {
                for a in self.arcs_of(u) {
                    if label[a.to.index()] == u32::MAX {
                        label[a.to.index()] = next;
                        stack.push(a.to);
                    }
                }
            }
            next += 1;
        }
        label
    }
}

/// Shorthand for [`WeightedGraph::new`].
pub fn build_graph<S: Scalar, I>(node_count: usize, edges: I) -> Result<WeightedGraph<S>, GraphError>
where
    I: IntoIterator<Item = (usize, usize, S)>,
{
    WeightedGraph::new(node_count, edges)
}

/// Result of a single-source Dijkstra run.
#[derive(Clone, Debug, PartialEq)]
pub struct ShortestPathTree<S> {
    source: NodeId,
    dist: Vec<S>,
    parent: Vec<Option<NodeId>>,
}

impl<S: Scalar> ShortestPathTree<S> {
    pub(crate) fn from_parts(source: NodeId, dist: Vec<S>, parent: Vec<Option<NodeId>>) -> Self {
        ShortestPathTree {
            source,
            dist,
            parent,
        }
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    /// Distance to `node`, `+inf` when unreachable.
    #[inline]
    pub fn distance(&self, node: NodeId) -> S {
        self.dist[node.index()]
    }

    pub fn distances(&self) -> &[S] {
        &self.dist
    }

    pub fn into_distances(self) -> Vec<S> {
        self.dist
    }

    pub fn parent(&self, node: NodeId) -> Option<NodeId> {
        self.parent[node.index()]
    }

    pub fn is_reachable(&self, node: NodeId) -> bool {
        self.dist[node.index()].is_finite()
    }

    /// Tree path from the source to `target`, inclusive.
    pub fn path_to(&self, target: NodeId) -> Option<Vec<NodeId>> {
        if !self.is_reachable(target) {
            return None;
        }
        let mut path = vec![target];
        let mut cur = target;
        while let Some(p) = self.parent[cur.index()] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        Some(path)
    }

    /// Reachable node with the largest distance, smallest id on ties.
    pub fn farthest_node(&self) -> (NodeId, S) {
        farthest_of(self.source, &self.dist)
    }
}

/// Totally ordered, additive path length used by the Dijkstra core.
pub(crate) trait PathLength: Copy {
    fn zero() -> Self;
    fn infinity() -> Self;
    fn plus(self, other: Self) -> Self;
    fn order(&self, other: &Self) -> Ordering;
    fn finite(&self) -> bool;
}

impl<S: Scalar> PathLength for S {
    #[inline]
    fn zero() -> Self {
        <S as num_traits::Zero>::zero()
    }

    #[inline]
    fn infinity() -> Self {
        <S as num_traits::Float>::infinity()
    }

    #[inline]
    fn plus(self, other: Self) -> Self {
        self + other
    }

    #[inline]
    fn order(&self, other: &Self) -> Ordering {
        self.total_order(other)
    }

    #[inline]
    fn finite(&self) -> bool {
        self.is_finite()
    }
}

#[derive(Clone, Copy)]
pub(crate) struct MinEntry<D> {
    pub key: D,
    pub node: NodeId,
}

impl<D: PathLength> PartialEq for MinEntry<D> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<D: PathLength> Eq for MinEntry<D> {}

impl<D: PathLength> PartialOrd for MinEntry<D> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<D: PathLength> Ord for MinEntry<D> {
    // Reversed so that `BinaryHeap` pops the smallest key, then smallest id.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .order(&self.key)
            .then_with(|| other.node.cmp(&self.node))
    }
}

/// Dijkstra over the topology of `g` with per-edge lengths `weights`.
pub(crate) fn dijkstra_with<S: Scalar, D: PathLength>(
    g: &WeightedGraph<S>,
    weights: &[D],
    source: NodeId,
) -> (Vec<D>, Vec<Option<NodeId>>) {
    assert!(g.contains(source), "source {source} not in graph");
    debug_assert_eq!(weights.len(), g.edge_count());
    let n = g.node_count();
    let mut dist = vec![<D as PathLength>::infinity(); n];
    let mut parent = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::with_capacity(n.min(1 << 16));

    dist[source.index()] = <D as PathLength>::zero();
    heap.push(MinEntry {
        key: <D as PathLength>::zero(),
        node: source,
    });
    while let Some(MinEntry { key, node }) = heap.pop() {
        let u = node.index();
        if done[u] {
            continue;
        }
        done[u] = true;
        for a in g.arcs_of(node) {
            let v = a.to.index();
            let cand = key.plus(weights[a.edge as usize]);
            if cand.order(&dist[v]) == Ordering::Less {
                dist[v] = cand;
                parent[v] = Some(node);
                heap.push(MinEntry { key: cand, node: a.to });
            }
        }
    }
    (dist, parent)
}

/// Reachable node with the largest distance, smallest id on ties.
pub(crate) fn farthest_of<D: PathLength>(source: NodeId, dist: &[D]) -> (NodeId, D) {
    let mut best = (source, <D as PathLength>::zero());
    for (i, d) in dist.iter().enumerate() {
        if d.finite() && d.order(&best.1) == Ordering::Greater {
            best = (NodeId::from_index(i), *d);
        }
    }
    best
}

/// Exact Dijkstra from `source`. Panics if `source` is not in the graph.
pub fn shortest_path_tree<S: Scalar>(g: &WeightedGraph<S>, source: NodeId) -> ShortestPathTree<S> {
    let (dist, parent) = dijkstra_with(g, g.weights(), source);
    ShortestPathTree {
        source,
        dist,
        parent,
    }
}

/// Shorthand for [`ShortestPathTree::farthest_node`].
pub fn farthest_node<S: Scalar>(tree: &ShortestPathTree<S>) -> (NodeId, S) {
    tree.farthest_node()
}
