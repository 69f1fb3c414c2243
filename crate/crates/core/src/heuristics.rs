//! Heuristic providers for A*: closed-form grid distances, differential
//! (landmark) heuristics, FastMap embeddings and their pointwise maximum.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fastmap::Embedding;
use crate::graph::{shortest_path_tree, NodeId, WeightedGraph};
use crate::grid::Cell;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HeuristicError {
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("requested {requested} pivots but the graph has {node_count} nodes")]
    TooManyPivots { requested: usize, node_count: usize },
    #[error("at least one pivot is required")]
    NoPivots,
    #[error("providers were built for different graphs ({0} vs {1} nodes)")]
    GraphMismatch(usize, usize),
    #[error("providers use different cell tables")]
    CellMismatch,
    #[error("cannot combine an empty list of heuristics")]
    EmptyCombination,
    #[error("invalid pivot table: {0}")]
    InvalidTable(String),
}

/// Anything A* can ask for a lower bound on the distance to the goal.
pub trait Heuristic<S> {
    fn estimate(&self, node: NodeId, goal: NodeId) -> S;
}

impl<S, H: Heuristic<S> + ?Sized> Heuristic<S> for &H {
    #[inline]
    fn estimate(&self, node: NodeId, goal: NodeId) -> S {
        (**self).estimate(node, goal)
    }
}

/// Exact distances from a set of pivot nodes to every node.
#[derive(Clone, Debug, PartialEq)]
pub struct PivotTable<S> {
    node_count: usize,
    pivots: Vec<NodeId>,
    // node-major: dist[node * pivots.len() + p]
    dist: Vec<S>,
}

impl<S: Scalar> PivotTable<S> {
    /// Builds a table from one distance row per pivot.
    pub fn from_rows(
        node_count: usize,
        pivots: Vec<NodeId>,
        rows: Vec<Vec<S>>,
    ) -> Result<Self, HeuristicError> {
        if rows.len() != pivots.len() {
            return Err(HeuristicError::InvalidTable(format!(
                "{} pivots but {} rows",
                pivots.len(),
                rows.len()
            )));
        }
        let mut seen = vec![false; node_count];
        for p in &pivots {
            if p.index() >= node_count {
                return Err(HeuristicError::InvalidTable(format!("pivot {p} out of range")));
            }
            if std::mem::replace(&mut seen[p.index()], true) {
                return Err(HeuristicError::InvalidTable(format!("duplicate pivot {p}")));
            }
        }
        for (p, row) in pivots.iter().zip(&rows) {
            if row.len() != node_count {
                return Err(HeuristicError::InvalidTable(format!(
                    "row of pivot {p} has {} entries",
                    row.len()
                )));
            }
            if row.iter().any(|d| d.is_nan() || *d < S::zero()) {
                return Err(HeuristicError::InvalidTable(format!(
                    "row of pivot {p} has a negative or NaN distance"
                )));
            }
        }
        let k = pivots.len();
        let mut dist = vec![S::zero(); node_count * k];
        for (p, row) in rows.iter().enumerate() {
            for (v, &d) in row.iter().enumerate() {
                dist[v * k + p] = d;
            }
        }
        Ok(PivotTable {
            node_count,
            pivots,
            dist,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn pivots(&self) -> &[NodeId] {
        &self.pivots
    }

    pub fn pivot_count(&self) -> usize {
        self.pivots.len()
    }

    /// Distance from pivot number `p` to `node`.
    #[inline]
    pub fn distance(&self, p: usize, node: NodeId) -> S {
        self.dist[node.index() * self.pivots.len() + p]
    }

    pub fn row(&self, p: usize) -> Vec<S> {
        (0..self.node_count)
            .map(|v| self.distance(p, NodeId::from_index(v)))
            .collect()
    }

    /// The first `p` pivots. Farthest-first placement is incremental, so
    /// this equals a table built with `pivot_count = p` from the same seed.
    pub fn truncated(&self, p: usize) -> PivotTable<S> {
        let p = p.min(self.pivots.len());
        let k = self.pivots.len();
        let dist = if k == 0 {
            Vec::new()
        } else {
            self.dist
                .chunks(k)
                .flat_map(|row| row[..p].iter().copied())
                .collect()
        };
        PivotTable {
            node_count: self.node_count,
            pivots: self.pivots[..p].to_vec(),
            dist,
        }
    }
}

/// Places `pivot_count` pivots farthest-first and records their distance rows.
///
/// The first pivot is the node farthest from a node drawn with `seed`; every
/// further pivot maximizes its distance to the nearest pivot chosen so far
/// (nodes unreachable from all pivots count as infinitely far). Ties go to the
/// smallest node id.
pub fn build_differential<S: Scalar>(
    g: &WeightedGraph<S>,
    pivot_count: usize,
    seed: u64,
) -> Result<PivotTable<S>, HeuristicError> {
    let n = g.node_count();
    if n == 0 {
        return Err(HeuristicError::EmptyGraph);
    }
    if pivot_count == 0 {
        return Err(HeuristicError::NoPivots);
    }
    if pivot_count > n {
        return Err(HeuristicError::TooManyPivots {
            requested: pivot_count,
            node_count: n,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = NodeId::from_index(rng.gen_range(0..n));
    let (first, _) = shortest_path_tree(g, start).farthest_node();

    let mut pivots = vec![first];
    let mut is_pivot = vec![false; n];
    is_pivot[first.index()] = true;
    let mut rows = vec![shortest_path_tree(g, first).into_distances()];
    let mut nearest = rows[0].clone();

    while pivots.len() < pivot_count {
        let mut best: Option<(usize, S)> = None;
        for (v, &d) in nearest.iter().enumerate() {
            if is_pivot[v] {
                continue;
            }
            if best.is_none_or(|(_, bd)| d.total_order(&bd).is_gt()) {
                best = Some((v, d));
            }
        }
        let next = NodeId::from_index(best.expect("non-pivot nodes remain").0);
        is_pivot[next.index()] = true;
        let row = shortest_path_tree(g, next).into_distances();
        for (m, &d) in nearest.iter_mut().zip(&row) {
            *m = m.min(d);
        }
        pivots.push(next);
        rows.push(row);
    }
    PivotTable::from_rows(n, pivots, rows)
}

/// `max_p |d(p, a) - d(p, b)|`, skipping pivots that reach neither node.
#[inline]
pub fn differential_heuristic<S: Scalar>(t: &PivotTable<S>, a: NodeId, b: NodeId) -> S {
    let k = t.pivots.len();
    let ra = &t.dist[a.index() * k..a.index() * k + k];
    let rb = &t.dist[b.index() * k..b.index() * k + k];
    let mut best = S::zero();
    for (&da, &db) in ra.iter().zip(rb) {
        if da.is_infinite() && db.is_infinite() {
            continue;
        }
        let h = (da - db).abs();
        if h > best {
            best = h;
        }
    }
    best
}

/// Octile distance on an 8-connected grid with unit straight and `sqrt(2)`
/// diagonal moves: `max(dx, dy) + (sqrt(2) - 1) * min(dx, dy)`.
#[inline]
pub fn octile_heuristic<S: Scalar>(a: Cell, b: Cell) -> S {
    let dx = a.x.abs_diff(b.x);
    let dy = a.y.abs_diff(b.y);
    let (lo, hi) = if dx < dy { (dx, dy) } else { (dy, dx) };
    // Written as straight + diagonal * sqrt(2) so it rounds like path costs.
    S::of(f64::from(hi - lo)) + S::of(f64::from(lo)) * S::SQRT_2()
}

/// `|x1 - x2| + |y1 - y2|`.
#[inline]
pub fn manhattan_heuristic<S: Scalar>(a: Cell, b: Cell) -> S {
    S::of(f64::from(a.x.abs_diff(b.x) + a.y.abs_diff(b.y)))
}

/// Runtime-selectable heuristic.
#[derive(Clone, Debug)]
pub enum HeuristicProvider<S> {
    Zero,
    /// Cell of every node, indexed by node id.
    Manhattan(Arc<[Cell]>),
    Octile(Arc<[Cell]>),
    FastMap(Arc<Embedding<S>>),
    Differential(Arc<PivotTable<S>>),
    Max(Vec<HeuristicProvider<S>>),
}

impl<S: Scalar> HeuristicProvider<S> {
    pub fn fastmap(e: Embedding<S>) -> Self {
        HeuristicProvider::FastMap(Arc::new(e))
    }

    pub fn differential(t: PivotTable<S>) -> Self {
        HeuristicProvider::Differential(Arc::new(t))
    }

    /// Pointwise maximum of `providers`, which must target the same graph.
    pub fn max_combine(providers: Vec<HeuristicProvider<S>>) -> Result<Self, HeuristicError> {
        if providers.is_empty() {
            return Err(HeuristicError::EmptyCombination);
        }
        let mut nodes: Option<usize> = None;
        let mut cells: Option<&Arc<[Cell]>> = None;
        for p in &providers {
            if let Some(n) = p.node_count() {
                match nodes {
                    Some(m) if m != n => return Err(HeuristicError::GraphMismatch(m, n)),
                    _ => nodes = Some(n),
                }
            }
            for c in p.cell_tables() {
                match cells {
                    Some(prev) if !Arc::ptr_eq(prev, c) && prev[..] != c[..] => {
                        return Err(HeuristicError::CellMismatch)
                    }
                    _ => cells = Some(c),
                }
            }
        }
        if providers.len() == 1 {
            return Ok(providers.into_iter().next().unwrap());
        }
        Ok(HeuristicProvider::Max(providers))
    }

    /// Number of nodes the provider was built for; `None` for `Zero`.
    pub fn node_count(&self) -> Option<usize> {
        match self {
            HeuristicProvider::Zero => None,
            HeuristicProvider::Manhattan(c) | HeuristicProvider::Octile(c) => Some(c.len()),
            HeuristicProvider::FastMap(e) => Some(e.node_count()),
            HeuristicProvider::Differential(t) => Some(t.node_count()),
            HeuristicProvider::Max(ps) => ps.iter().find_map(|p| p.node_count()),
        }
    }

    fn cell_tables(&self) -> Vec<&Arc<[Cell]>> {
        match self {
            HeuristicProvider::Manhattan(c) | HeuristicProvider::Octile(c) => vec![c],
            HeuristicProvider::Max(ps) => ps.iter().flat_map(|p| p.cell_tables()).collect(),
            _ => Vec::new(),
        }
    }

    /// Reals stored per node: `K` for a `K`-dimensional embedding, `P` for
    /// `P` pivots, the sum for a combination, zero for closed forms.
    pub fn memory_units(&self) -> usize {
        match self {
            HeuristicProvider::Zero
            | HeuristicProvider::Manhattan(_)
            | HeuristicProvider::Octile(_) => 0,
            HeuristicProvider::FastMap(e) => e.dims(),
            HeuristicProvider::Differential(t) => t.pivot_count(),
            HeuristicProvider::Max(ps) => ps.iter().map(|p| p.memory_units()).sum(),
        }
    }
}

impl<S: Scalar> Heuristic<S> for HeuristicProvider<S> {
    #[inline]
    fn estimate(&self, node: NodeId, goal: NodeId) -> S {
        match self {
            HeuristicProvider::Zero => S::zero(),
            HeuristicProvider::Manhattan(c) => manhattan_heuristic(c[node.index()], c[goal.index()]),
            HeuristicProvider::Octile(c) => octile_heuristic(c[node.index()], c[goal.index()]),
            HeuristicProvider::FastMap(e) => e.distance(node, goal),
            HeuristicProvider::Differential(t) => differential_heuristic(t, node, goal),
            HeuristicProvider::Max(ps) => ps
                .iter()
                .map(|p| p.estimate(node, goal))
                .fold(S::zero(), S::max),
        }
    }
}

impl<S: Scalar> fmt::Display for HeuristicProvider<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeuristicProvider::Zero => write!(f, "ZERO"),
            HeuristicProvider::Manhattan(_) => write!(f, "MAN"),
            HeuristicProvider::Octile(_) => write!(f, "OCT"),
            HeuristicProvider::FastMap(e) => write!(f, "FM({})", e.dims()),
            HeuristicProvider::Differential(t) => write!(f, "DH({})", t.pivot_count()),
            HeuristicProvider::Max(ps) => {
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        write!(f, "+")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
        }
    }
}
