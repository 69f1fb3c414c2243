//! FastMap embeddings of weighted graphs.
//!
//! Each dimension picks a (heuristically) farthest pair of nodes `a`, `b` on
//! the current working graph, assigns every node the coordinate
//! `(d(a, v) + d(a, b) - d(v, b)) / 2`, and then lowers every edge weight by
//! the absolute coordinate difference of its endpoints. The L1 distance
//! between two embedded nodes is an admissible and consistent heuristic for
//! the original graph, and it never decreases as dimensions are added.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{
    dijkstra_with, farthest_of, GraphError, NodeId, PathLength, ShortestPathTree, WeightedGraph,
};
use crate::scalar::Scalar;
use crate::wide::Wide;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EmbedError {
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("invalid embedding configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Cutoff on the farthest-pair distance below which no more dimensions are
/// produced.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Epsilon<S> {
    /// Stop once `d_ab < value`.
    Absolute(S),
    /// Stop once `d_ab < value * d_ab(first dimension)`.
    Relative(S),
}

impl<S: Scalar> Epsilon<S> {
    fn value(&self) -> S {
        match *self {
            Epsilon::Absolute(v) | Epsilon::Relative(v) => v,
        }
    }

    fn threshold(&self, first_span: Option<S>, span: S) -> S {
        match *self {
            Epsilon::Absolute(v) => v,
            Epsilon::Relative(v) => v * first_span.unwrap_or(span),
        }
    }
}

impl<S: Scalar> Default for Epsilon<S> {
    fn default() -> Self {
        Epsilon::Relative(S::of(1e-4))
    }
}

impl<S: Scalar> fmt::Display for Epsilon<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Epsilon::Absolute(v) => write!(f, "{v}"),
            Epsilon::Relative(v) => write!(f, "rel:{v}"),
        }
    }
}

impl<S: Scalar> FromStr for Epsilon<S> {
    type Err = EmbedError;

    /// `0.5` is absolute, `rel:1e-4` is relative to the first span.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || EmbedError::InvalidConfig(format!("cannot parse epsilon {s:?}"));
        let s = s.trim();
        match s.strip_prefix("rel:") {
            Some(rest) => rest.parse().map(Epsilon::Relative).map_err(|_| bad()),
            None => s.parse().map(Epsilon::Absolute).map_err(|_| bad()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmbedConfig<S> {
    /// Upper bound on the number of dimensions.
    pub k_max: usize,
    pub epsilon: Epsilon<S>,
    /// Alternating farthest-node sweeps per restart.
    pub tau: usize,
    /// Random starting nodes tried per dimension.
    pub restarts: usize,
    pub seed: u64,
}

impl<S: Scalar> Default for EmbedConfig<S> {
    fn default() -> Self {
        EmbedConfig {
            k_max: 10,
            epsilon: Epsilon::default(),
            tau: 10,
            restarts: 10,
            seed: 0,
        }
    }
}

impl<S: Scalar> EmbedConfig<S> {
    pub fn with_dims(k_max: usize) -> Self {
        EmbedConfig {
            k_max,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), EmbedError> {
        let bad = |msg: &str| Err(EmbedError::InvalidConfig(msg.to_string()));
        if self.k_max < 1 {
            return bad("k_max must be at least 1");
        }
        if self.tau < 1 {
            return bad("tau must be at least 1");
        }
        if self.restarts < 1 {
            return bad("restarts must be at least 1");
        }
        let eps = self.epsilon.value();
        if eps.is_nan() || eps < S::zero() || eps.is_infinite() {
            return bad("epsilon must be finite and non-negative");
        }
        Ok(())
    }
}

/// The farthest pair found for one dimension.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DimSpan<S> {
    pub n_a: NodeId,
    pub n_b: NodeId,
    pub d_ab: S,
}

/// Per-node coordinates, `dims()` values per node, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedding<S> {
    node_count: usize,
    dims: usize,
    coords: Vec<S>,
    spans: Vec<DimSpan<S>>,
}

impl<S: Scalar> Embedding<S> {
    /// Assembles an embedding from a row-major coordinate table.
    pub fn from_parts(
        node_count: usize,
        spans: Vec<DimSpan<S>>,
        coords: Vec<S>,
    ) -> Result<Self, EmbedError> {
        let dims = spans.len();
        if coords.len() != node_count * dims {
            return Err(EmbedError::InvalidEmbedding(format!(
                "expected {} coordinates, got {}",
                node_count * dims,
                coords.len()
            )));
        }
        if let Some(c) = coords.iter().find(|c| !c.is_finite()) {
            return Err(EmbedError::InvalidEmbedding(format!(
                "non-finite coordinate {c}"
            )));
        }
        for s in &spans {
            if s.n_a.index() >= node_count || s.n_b.index() >= node_count {
                return Err(EmbedError::InvalidEmbedding(format!(
                    "span endpoint out of range: {} {}",
                    s.n_a, s.n_b
                )));
            }
            if !s.d_ab.is_finite() || s.d_ab < S::zero() {
                return Err(EmbedError::InvalidEmbedding(format!(
                    "bad span length {}",
                    s.d_ab
                )));
            }
        }
        Ok(Embedding {
            node_count,
            dims,
            coords,
            spans,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Achieved dimensionality.
    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn spans(&self) -> &[DimSpan<S>] {
        &self.spans
    }

    /// Farthest-pair distance of every dimension, in build order.
    pub fn span_lengths(&self) -> Vec<S> {
        self.spans.iter().map(|s| s.d_ab).collect()
    }

    #[inline]
    pub fn coords(&self, node: NodeId) -> &[S] {
        let i = node.index() * self.dims;
        &self.coords[i..i + self.dims]
    }

    pub fn coord_table(&self) -> &[S] {
        &self.coords
    }

    /// L1 distance between the embedded points of `x` and `y`.
    #[inline]
    pub fn distance(&self, x: NodeId, y: NodeId) -> S {
        self.coords(x)
            .iter()
            .zip(self.coords(y))
            .fold(S::zero(), |acc, (&a, &b)| acc + (a - b).abs())
    }

    /// The first `k` dimensions. Since dimensions are built one after
    /// another, this equals an embedding built with `k_max = k`.
    pub fn truncated(&self, k: usize) -> Embedding<S> {
        let k = k.min(self.dims);
        let coords = self
            .coords
            .chunks(self.dims.max(1))
            .take(if self.dims == 0 { 0 } else { self.node_count })
            .flat_map(|row| row[..k].iter().copied())
            .collect();
        Embedding {
            node_count: self.node_count,
            dims: k,
            coords,
            spans: self.spans[..k].to_vec(),
        }
    }
}

/// Heuristic value between `x` and `goal`: the L1 distance of their points.
#[inline]
pub fn fastmap_heuristic<S: Scalar>(e: &Embedding<S>, x: NodeId, goal: NodeId) -> S {
    e.distance(x, goal)
}

pub struct FarthestPair<S> {
    pub n_a: NodeId,
    pub n_b: NodeId,
    pub d_ab: S,
    pub tree_a: ShortestPathTree<S>,
    pub tree_b: ShortestPathTree<S>,
}

/// Heuristic farthest pair of `g`.
///
/// Each restart starts at a uniformly random node and performs `tau`
/// alternating farthest-node sweeps. The restart with the largest distance
/// wins, ties going to the lexicographically smallest `(n_a, n_b)`. Both
/// trees of the winner are returned.
pub fn get_farthest_pair<S: Scalar, R: Rng + ?Sized>(
    g: &WeightedGraph<S>,
    tau: usize,
    restarts: usize,
    rng: &mut R,
) -> Result<FarthestPair<S>, EmbedError> {
    let p = farthest_pair_with(g, g.weights(), tau, restarts, rng)?;
    let tree = |source, (dist, parent)| ShortestPathTree::from_parts(source, dist, parent);
    Ok(FarthestPair {
        n_a: p.n_a,
        n_b: p.n_b,
        d_ab: p.d_ab,
        tree_a: tree(p.n_a, p.tree_a),
        tree_b: tree(p.n_b, p.tree_b),
    })
}

type Lengths<D> = (Vec<D>, Vec<Option<NodeId>>);

struct PairWith<D> {
    n_a: NodeId,
    n_b: NodeId,
    d_ab: D,
    tree_a: Lengths<D>,
    tree_b: Lengths<D>,
}

fn farthest_pair_with<S: Scalar, D: PathLength, R: Rng + ?Sized>(
    g: &WeightedGraph<S>,
    weights: &[D],
    tau: usize,
    restarts: usize,
    rng: &mut R,
) -> Result<PairWith<D>, EmbedError> {
    if g.is_empty() {
        return Err(EmbedError::EmptyGraph);
    }
    let tau = tau.max(1);
    let mut best: Option<(NodeId, NodeId, D, Lengths<D>)> = None;
    for _ in 0..restarts.max(1) {
        let mut n_a = NodeId::from_index(rng.gen_range(0..g.node_count()));
        let mut n_b = n_a;
        let mut last = None;
        for sweep in 0..tau {
            // Odd sweeps root at n_a and move n_b, even sweeps the reverse.
            let root = if sweep % 2 == 0 { n_a } else { n_b };
            let tree = dijkstra_with(g, weights, root);
            let (far, _) = farthest_of(root, &tree.0);
            if sweep % 2 == 0 {
                n_b = far;
            } else {
                n_a = far;
            }
            last = Some(tree);
        }
        let last = last.expect("tau >= 1");
        let d_ab = last.0[if tau % 2 == 1 { n_b } else { n_a }.index()];
        let better = match &best {
            None => true,
            Some((ba, bb, bd, _)) => match d_ab.order(bd) {
                Ordering::Greater => true,
                Ordering::Equal => (n_a, n_b) < (*ba, *bb),
                Ordering::Less => false,
            },
        };
        if better {
            best = Some((n_a, n_b, d_ab, last));
        }
    }
    let (n_a, n_b, d_ab, last) = best.expect("restarts >= 1");
    // The final sweep was rooted at n_a when tau is odd, at n_b when even.
    let (tree_a, tree_b) = if tau % 2 == 1 {
        (last, dijkstra_with(g, weights, n_b))
    } else {
        (dijkstra_with(g, weights, n_a), last)
    };
    Ok(PairWith {
        n_a,
        n_b,
        d_ab,
        tree_a,
        tree_b,
    })
}

/// Book-keeping collected while building an embedding.
#[derive(Clone, Debug)]
pub struct BuildTrace<S> {
    /// Number of residual edge-weight computations performed.
    pub edge_updates: usize,
    /// Residuals that came out negative and were clamped to zero.
    pub clamps: usize,
    /// Smallest residual seen before clamping (`+inf` when none).
    pub min_residual: S,
    /// Working graph of every iteration, starting with the input graph.
    /// Only filled when archiving was requested.
    pub working_graphs: Vec<WeightedGraph<S>>,
}

/// Builds a FastMap embedding of `g`.
pub fn build_embedding<S: Scalar>(
    g: &WeightedGraph<S>,
    cfg: &EmbedConfig<S>,
) -> Result<Embedding<S>, EmbedError> {
    build_embedding_traced(g, cfg, false).map(|(e, _)| e)
}

/// [`build_embedding`] that also reports residual statistics and, when
/// `archive` is set, keeps a copy of each working graph.
pub fn build_embedding_traced<S: Scalar>(
    g: &WeightedGraph<S>,
    cfg: &EmbedConfig<S>,
    archive: bool,
) -> Result<(Embedding<S>, BuildTrace<S>), EmbedError> {
    cfg.validate()?;
    if g.is_empty() {
        return Err(EmbedError::EmptyGraph);
    }
    let n = g.node_count();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    // Path lengths, coordinates and residuals are carried in double-double
    // precision and rounded to `S` only on output.
    let mut working: Vec<Wide> = g.weights().iter().map(|w| Wide::from_f64(w.as_f64())).collect();
    let mut trace = BuildTrace {
        edge_updates: 0,
        clamps: 0,
        min_residual: S::infinity(),
        working_graphs: Vec::new(),
    };
    let mut wide_min = Wide::INFINITY;
    let mut columns: Vec<Vec<S>> = Vec::new();
    let mut spans = Vec::new();
    let mut first_span: Option<S> = None;
    let snapshot = |w: &[Wide]| g.with_weights(w.iter().map(|x| S::of(x.to_f64().max(0.0))).collect());

    while columns.len() < cfg.k_max {
        if archive {
            trace.working_graphs.push(snapshot(&working)?);
        }
        let pair = farthest_pair_with(g, &working, cfg.tau, cfg.restarts, &mut rng)?;
        let d_ab = S::of(pair.d_ab.to_f64());
        if !pair.d_ab.hi_positive() || d_ab < cfg.epsilon.threshold(first_span, d_ab) {
            break;
        }
        first_span.get_or_insert(d_ab);

        let (dist_a, dist_b) = (&pair.tree_a.0, &pair.tree_b.0);
        let column: Vec<Wide> = (0..n)
            .map(|i| {
                if dist_a[i].is_finite() && dist_b[i].is_finite() {
                    dist_a[i].add(pair.d_ab).sub(dist_b[i]).half()
                } else {
                    Wide::ZERO
                }
            })
            .collect();

        for (e, w) in working.iter_mut().enumerate() {
            let (u, v) = g.endpoints(e);
            let r = w.sub(column[u.index()].sub(column[v.index()]).abs());
            trace.edge_updates += 1;
            if r.total_order(&wide_min) == Ordering::Less {
                wide_min = r;
            }
            *w = if r.is_negative() {
                trace.clamps += 1;
                Wide::ZERO
            } else {
                r
            };
        }

        spans.push(DimSpan {
            n_a: pair.n_a,
            n_b: pair.n_b,
            d_ab,
        });
        columns.push(column.iter().map(|c| S::of(c.to_f64())).collect());
    }
    if archive && trace.working_graphs.len() == columns.len() {
        trace.working_graphs.push(snapshot(&working)?);
    }
    trace.min_residual = S::of(wide_min.to_f64());

    let dims = columns.len();
    let mut coords = Vec::with_capacity(n * dims);
    for i in 0..n {
        coords.extend(columns.iter().map(|c| c[i]));
    }
    let embedding = Embedding::from_parts(n, spans, coords)?;
    Ok((embedding, trace))
}
