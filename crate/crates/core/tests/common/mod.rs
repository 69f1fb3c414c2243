//! Reference implementations shared by the integration tests. None of these
//! call into the library's search or shortest-path code.

#![allow(dead_code)]

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use pathlab::{build_graph, Graph, GridMap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Connected random graph: a random spanning tree plus about `n` extra edges,
/// weights uniform in `[0.1, 10]`.
pub fn random_graph(n: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.gen_range(0..v), v, rng.gen_range(0.1..=10.0)));
    }
    for _ in 0..n {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a != b {
            edges.push((a, b, rng.gen_range(0.1..=10.0)));
        }
    }
    build_graph(n, edges).unwrap()
}

/// All-pairs distances by Floyd-Warshall, row-major.
pub fn floyd_warshall(g: &Graph) -> Vec<f64> {
    let n = g.node_count();
    let mut d = vec![f64::INFINITY; n * n];
    for i in 0..n {
        d[i * n + i] = 0.0;
    }
    for (u, v, w) in g.edges() {
        let (u, v) = (u.index(), v.index());
        d[u * n + v] = d[u * n + v].min(w);
        d[v * n + u] = d[v * n + u].min(w);
    }
    for k in 0..n {
        for i in 0..n {
            let dik = d[i * n + k];
            if dik.is_infinite() {
                continue;
            }
            for j in 0..n {
                let c = dik + d[k * n + j];
                if c < d[i * n + j] {
                    d[i * n + j] = c;
                }
            }
        }
    }
    d
}

/// Single-source distances by Bellman-Ford.
pub fn bellman_ford(g: &Graph, source: usize) -> Vec<f64> {
    let mut d = vec![f64::INFINITY; g.node_count()];
    d[source] = 0.0;
    for _ in 0..g.node_count() {
        let mut changed = false;
        for (u, v, w) in g.edges() {
            let (u, v) = (u.index(), v.index());
            if d[u] + w < d[v] {
                d[v] = d[u] + w;
                changed = true;
            }
            if d[v] + w < d[u] {
                d[u] = d[v] + w;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    d
}

/// Textbook Dijkstra over an adjacency list rebuilt from the edge list.
pub fn reference_dijkstra(g: &Graph, source: usize) -> Vec<f64> {
    let n = g.node_count();
    let mut adj = vec![Vec::new(); n];
    for (u, v, w) in g.edges() {
        adj[u.index()].push((v.index(), w));
        adj[v.index()].push((u.index(), w));
    }
    let mut d = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    d[source] = 0.0;
    heap.push(Reverse((OrdF64(0.0), source)));
    while let Some(Reverse((OrdF64(du), u))) = heap.pop() {
        if du > d[u] {
            continue;
        }
        for &(v, w) in &adj[u] {
            if du + w < d[v] {
                d[v] = du + w;
                heap.push(Reverse((OrdF64(d[v]), v)));
            }
        }
    }
    d
}

#[derive(Clone, Copy)]
struct OrdF64(f64);
impl PartialEq for OrdF64 {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other).is_eq()
    }
}
impl Eq for OrdF64 {}
impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Hop counts on a 4-connected grid by breadth-first search over cells.
pub fn grid_bfs(map: &GridMap, sx: usize, sy: usize) -> Vec<Option<usize>> {
    let (w, h) = (map.width(), map.height());
    let mut d = vec![None; w * h];
    let mut q = VecDeque::new();
    d[sy * w + sx] = Some(0);
    q.push_back((sx, sy));
    while let Some((x, y)) = q.pop_front() {
        let here = d[y * w + x].unwrap();
        for (dx, dy) in [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)] {
            let (nx, ny) = (x as i64 + dx, y as i64 + dy);
            if map.is_passable(nx, ny) && d[ny as usize * w + nx as usize].is_none() {
                d[ny as usize * w + nx as usize] = Some(here + 1);
                q.push_back((nx as usize, ny as usize));
            }
        }
    }
    d
}

/// Largest finite entry of an all-pairs table.
pub fn diameter(apsp: &[f64]) -> f64 {
    apsp.iter().copied().filter(|d| d.is_finite()).fold(0.0, f64::max)
}
