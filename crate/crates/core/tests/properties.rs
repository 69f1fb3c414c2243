//! Property tests over random graphs and maps.

mod common;

use pathlab::persist::{read_embedding, read_pivots, write_embedding, write_pivots};
use pathlab::{
    astar, build_differential, build_embedding, build_embedding_traced, build_graph,
    grid_to_graph, EmbedConfig, Embedding, Graph, GridMap, Heuristic, Neighborhood, NodeId,
    PivotTable, Provider, WeightedGraph,
};
use proptest::prelude::*;

use common::floyd_warshall;

/// Random graph with `n` nodes; possibly disconnected.
fn graph_strategy(max_nodes: usize) -> impl Strategy<Value = Graph> {
    (2..=max_nodes).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n, 0.1f64..=10.0), 1..3 * n).prop_map(move |edges| {
            let edges: Vec<_> = edges.into_iter().filter(|(a, b, _)| a != b).collect();
            build_graph(n, edges).unwrap()
        })
    })
}

fn map_strategy() -> impl Strategy<Value = GridMap> {
    (2usize..14, 2usize..14, any::<bool>()).prop_flat_map(|(w, h, four)| {
        prop::collection::vec(prop::bool::weighted(0.75), w * h).prop_map(move |cells| {
            let m = GridMap::new(w, h, cells);
            if four {
                m.with_neighborhood(Neighborhood::Four)
            } else {
                m
            }
        })
    })
}

fn consistent_and_admissible<H: Heuristic<f64>>(g: &Graph, h: &H, apsp: &[f64]) -> Result<(), TestCaseError> {
    let n = g.node_count();
    for goal in g.nodes() {
        for (u, v, w) in g.edges() {
            let (hu, hv) = (h.estimate(u, goal), h.estimate(v, goal));
            prop_assert!(hu <= w + hv + 1e-9, "edge {u}-{v} goal {goal}: {hu} > {w} + {hv}");
            prop_assert!(hv <= w + hu + 1e-9);
        }
        prop_assert!(h.estimate(goal, goal).abs() <= 1e-12);
        for s in g.nodes() {
            let d = apsp[s.index() * n + goal.index()];
            if d.is_finite() {
                prop_assert!(h.estimate(s, goal) <= d + 1e-9);
            }
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fastmap_is_consistent(g in graph_strategy(40), k in 1usize..8, seed in 0u64..1000) {
        let e = build_embedding(&g, &EmbedConfig { seed, ..EmbedConfig::with_dims(k) }).unwrap();
        prop_assert!(e.dims() <= k);
        consistent_and_admissible(&g, &Provider::fastmap(e), &floyd_warshall(&g))?;
    }

    #[test]
    fn differential_and_max_are_consistent(g in graph_strategy(40), p in 1usize..6, seed in 0u64..1000) {
        let p = p.min(g.node_count());
        let t = build_differential(&g, p, seed).unwrap();
        let e = build_embedding(&g, &EmbedConfig { seed, ..EmbedConfig::with_dims(3) }).unwrap();
        let apsp = floyd_warshall(&g);
        consistent_and_admissible(&g, &Provider::differential(t.clone()), &apsp)?;
        let both = Provider::max_combine(vec![Provider::differential(t), Provider::fastmap(e)]).unwrap();
        consistent_and_admissible(&g, &both, &apsp)?;
    }

    /// Adding a dimension never lowers the heuristic.
    #[test]
    fn more_dimensions_never_lower_the_estimate(g in graph_strategy(50), seed in 0u64..1000) {
        let e = build_embedding(&g, &EmbedConfig { seed, ..EmbedConfig::with_dims(10) }).unwrap();
        for k in 1..=e.dims() {
            let (lo, hi) = (e.truncated(k - 1), e.truncated(k));
            for x in g.nodes() {
                for y in g.nodes() {
                    prop_assert!(hi.distance(x, y) >= lo.distance(x, y));
                }
            }
        }
    }

    /// Residual weights stay non-negative and distances shrink by at least
    /// the coordinate gap of the dimension just added.
    #[test]
    fn residual_distances_shrink_by_coordinate_gap(g in graph_strategy(30), seed in 0u64..1000) {
        let cfg = EmbedConfig { seed, ..EmbedConfig::with_dims(6) };
        let (e, trace) = build_embedding_traced(&g, &cfg, true).unwrap();
        prop_assert_eq!(trace.clamps, 0);
        prop_assert!(trace.min_residual >= -1e-9 || trace.edge_updates == 0);
        prop_assert_eq!(trace.working_graphs.len(), e.dims() + 1);
        let n = g.node_count();
        let tables: Vec<Vec<f64>> = trace.working_graphs.iter().map(floyd_warshall).collect();
        for i in 0..e.dims() {
            for x in 0..n {
                for y in 0..n {
                    let drop = tables[i][x * n + y] - tables[i + 1][x * n + y];
                    if drop.is_nan() {
                        continue;
                    }
                    let gap = (e.coords(NodeId::from_index(x))[i] - e.coords(NodeId::from_index(y))[i]).abs();
                    prop_assert!(drop >= gap - 1e-9, "iteration {i} pair {x},{y}: {drop} < {gap}");
                }
            }
        }
    }

    #[test]
    fn grid_search_matches_floyd_warshall(m in map_strategy(), seed in 0u64..100) {
        let grid = grid_to_graph::<f64>(&m);
        prop_assume!(grid.graph.node_count() >= 2);
        let g = &grid.graph;
        let apsp = floyd_warshall(g);
        let n = g.node_count();
        let e = build_embedding(g, &EmbedConfig { seed, ..EmbedConfig::with_dims(4) }).unwrap();
        let t = build_differential(g, 2.min(n), seed).unwrap();
        let closed_form = match m.neighborhood {
            Neighborhood::Four => Provider::Manhattan(grid.cells().clone()),
            Neighborhood::Eight => Provider::Octile(grid.cells().clone()),
        };
        let providers = [
            closed_form.clone(),
            Provider::fastmap(e.clone()),
            Provider::differential(t.clone()),
            Provider::max_combine(vec![closed_form, Provider::fastmap(e), Provider::differential(t)]).unwrap(),
        ];
        for h in &providers {
            consistent_and_admissible(g, h, &apsp)?;
            for s in (0..n).step_by(3) {
                for goal in (0..n).step_by(2) {
                    let r = astar(g, NodeId::from_index(s), NodeId::from_index(goal), h);
                    let d = apsp[s * n + goal];
                    if d.is_finite() {
                        prop_assert!((r.cost - d).abs() <= 1e-9);
                        prop_assert_eq!(r.closed_improvements, 0);
                    } else {
                        prop_assert!(r.path.is_none() && r.cost.is_infinite());
                    }
                }
            }
        }
    }

    #[test]
    fn builds_are_deterministic(g in graph_strategy(30), seed in 0u64..1000) {
        let cfg = EmbedConfig { seed, ..EmbedConfig::with_dims(5) };
        prop_assert_eq!(build_embedding(&g, &cfg).unwrap(), build_embedding(&g, &cfg).unwrap());
        let p = 3.min(g.node_count());
        prop_assert_eq!(build_differential(&g, p, seed).unwrap(), build_differential(&g, p, seed).unwrap());
    }

    #[test]
    fn artifacts_round_trip_exactly(g in graph_strategy(30), seed in 0u64..1000) {
        let e = build_embedding(&g, &EmbedConfig { seed, ..EmbedConfig::with_dims(5) }).unwrap();
        let mut buf = Vec::new();
        write_embedding(&e, &mut buf).unwrap();
        let back: Embedding<f64> = read_embedding(&buf[..]).unwrap();
        prop_assert_eq!(back, e);

        let t = build_differential(&g, 3.min(g.node_count()), seed).unwrap();
        let mut buf = Vec::new();
        write_pivots(&t, &mut buf).unwrap();
        let back: PivotTable<f64> = read_pivots(&buf[..]).unwrap();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn single_precision_is_consistent(g in graph_strategy(25), seed in 0u64..100) {
        let g32: WeightedGraph<f32> = build_graph(
            g.node_count(),
            g.edges().map(|(u, v, w)| (u.index(), v.index(), w as f32)),
        ).unwrap();
        let e = build_embedding(&g32, &EmbedConfig { seed, ..EmbedConfig::with_dims(4) }).unwrap();
        let g64: Graph = build_graph(
            g.node_count(),
            g32.edges().map(|(u, v, w)| (u.index(), v.index(), f64::from(w))),
        ).unwrap();
        let apsp = floyd_warshall(&g64);
        let n = g.node_count();
        for goal in g32.nodes() {
            for (u, v, w) in g32.edges() {
                let (hu, hv) = (e.distance(u, goal), e.distance(v, goal));
                prop_assert!(f64::from(hu) <= f64::from(w) + f64::from(hv) + 1e-4);
            }
            for s in g32.nodes() {
                let d = apsp[s.index() * n + goal.index()];
                if d.is_finite() {
                    prop_assert!(f64::from(e.distance(s, goal)) <= d * (1.0 + 1e-6) + 1e-4);
                }
            }
        }
    }

    #[test]
    fn map_text_round_trips(m in map_strategy()) {
        let back = pathlab::parse_map(&m.to_map_text()).unwrap();
        prop_assert_eq!(back.passable_grid(), m.passable_grid());
        prop_assert_eq!((back.width(), back.height()), (m.width(), m.height()));
    }
}
