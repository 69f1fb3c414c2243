//! A* with expansion counting.
//!
//! Open-list order is `f` ascending, then `g` descending, then node id
//! ascending. Stale heap entries are skipped without being counted. A node is
//! expanded at most once; a later strictly cheaper route to a closed node is
//! only counted in [`SearchResult::closed_improvements`], which stays zero
//! for consistent heuristics.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::graph::{NodeId, WeightedGraph};
use crate::heuristics::{Heuristic, HeuristicProvider};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct SearchResult<S> {
    /// Start to goal inclusive; `None` when the goal is unreachable.
    pub path: Option<Vec<NodeId>>,
    /// Path cost, `+inf` when unreachable.
    pub cost: S,
    /// Nodes popped from the open list and processed.
    pub expanded: usize,
    /// Edge relaxations attempted.
    pub generated: usize,
    /// Relaxations that found a cheaper route to an already expanded node.
    pub closed_improvements: usize,
}

impl<S: Scalar> SearchResult<S> {
    pub fn is_found(&self) -> bool {
        self.path.is_some()
    }
}

#[derive(Clone, Copy)]
struct OpenEntry<S> {
    f: S,
    g: S,
    node: NodeId,
}

impl<S: Scalar> PartialEq for OpenEntry<S> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<S: Scalar> Eq for OpenEntry<S> {}

impl<S: Scalar> PartialOrd for OpenEntry<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<S: Scalar> Ord for OpenEntry<S> {
    // BinaryHeap is a max-heap: "greater" means "popped first".
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_order(&self.f)
            .then_with(|| self.g.total_order(&other.g))
            .then_with(|| other.node.cmp(&self.node))
    }
}

/// Reusable per-thread search state. Generation stamps avoid clearing the
/// per-node arrays between searches.
pub struct SearchEngine<S> {
    g: Vec<S>,
    parent: Vec<NodeId>,
    seen: Vec<u32>,
    closed: Vec<u32>,
    generation: u32,
    open: BinaryHeap<OpenEntry<S>>,
}

impl<S: Scalar> SearchEngine<S> {
    pub fn new(node_count: usize) -> Self {
        SearchEngine {
            g: vec![S::infinity(); node_count],
            parent: vec![NodeId(0); node_count],
            seen: vec![0; node_count],
            closed: vec![0; node_count],
            generation: 0,
            open: BinaryHeap::new(),
        }
    }

    fn reset(&mut self, node_count: usize) {
        if self.g.len() != node_count {
            *self = SearchEngine::new(node_count);
        }
        self.open.clear();
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.seen.fill(0);
            self.closed.fill(0);
            self.generation = 1;
        }
    }

    /// Least-cost path from `start` to `goal`. Panics on invalid ids.
    pub fn search<H: Heuristic<S> + ?Sized>(
        &mut self,
        graph: &WeightedGraph<S>,
        start: NodeId,
        goal: NodeId,
        h: &H,
    ) -> SearchResult<S> {
        assert!(graph.contains(start), "start {start} not in graph");
        assert!(graph.contains(goal), "goal {goal} not in graph");
        self.reset(graph.node_count());
        let gen = self.generation;
        let tolerance = S::of(1e-9);
        let mut expanded = 0;
        let mut generated = 0;
        let mut closed_improvements = 0;

        self.g[start.index()] = S::zero();
        self.seen[start.index()] = gen;
        self.open.push(OpenEntry {
            f: h.estimate(start, goal),
            g: S::zero(),
            node: start,
        });

        while let Some(OpenEntry { g, node, .. }) = self.open.pop() {
            let u = node.index();
            if self.closed[u] == gen {
                continue;
            }
            self.closed[u] = gen;
            expanded += 1;
            if node == goal {
                return SearchResult {
                    path: Some(self.trace(start, goal)),
                    cost: g,
                    expanded,
                    generated,
                    closed_improvements,
                };
            }
            for (v, w) in graph.neighbors(node) {
                generated += 1;
                let vi = v.index();
                let ng = g + w;
                if self.closed[vi] == gen {
                    if ng + tolerance < self.g[vi] {
                        closed_improvements += 1;
                    }
                    continue;
                }
                if self.seen[vi] != gen || ng < self.g[vi] {
                    self.seen[vi] = gen;
                    self.g[vi] = ng;
                    self.parent[vi] = node;
                    self.open.push(OpenEntry {
                        f: ng + h.estimate(v, goal),
                        g: ng,
                        node: v,
                    });
                }
            }
        }

        SearchResult {
            path: None,
            cost: S::infinity(),
            expanded,
            generated,
            closed_improvements,
        }
    }

    fn trace(&self, start: NodeId, goal: NodeId) -> Vec<NodeId> {
        let mut path = vec![goal];
        let mut cur = goal;
        while cur != start {
            cur = self.parent[cur.index()];
            path.push(cur);
        }
        path.reverse();
        path
    }
}

/// One-off A* search; use a [`SearchEngine`] to reuse allocations.
pub fn astar<S: Scalar, H: Heuristic<S> + ?Sized>(
    graph: &WeightedGraph<S>,
    start: NodeId,
    goal: NodeId,
    h: &H,
) -> SearchResult<S> {
    SearchEngine::new(graph.node_count()).search(graph, start, goal, h)
}

/// A* with the zero heuristic, i.e. Dijkstra with early termination.
pub fn dijkstra_baseline<S: Scalar>(
    graph: &WeightedGraph<S>,
    start: NodeId,
    goal: NodeId,
) -> SearchResult<S> {
    astar(graph, start, goal, &HeuristicProvider::Zero)
}

/// Sum of edge weights along `path`, or `None` if it uses a missing edge.
pub fn path_cost<S: Scalar>(graph: &WeightedGraph<S>, path: &[NodeId]) -> Option<S> {
    path.windows(2)
        .map(|w| graph.edge_weight(w[0], w[1]))
        .try_fold(S::zero(), |acc, w| w.map(|w| acc + w))
}
