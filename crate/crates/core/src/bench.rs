//! Benchmark harness: random instances on a grid map, A* with several
//! heuristics, expansion statistics (median, MAD, wins).

use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::fastmap::{build_embedding, EmbedConfig, EmbedError, Embedding};
use crate::graph::NodeId;
use crate::grid::{grid_to_graph, Cell, GridGraph, GridMap, Neighborhood};
use crate::heuristics::{build_differential, HeuristicError, HeuristicProvider, PivotTable};
use crate::search::SearchEngine;
use crate::stats::median_mad;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("cannot parse heuristic spec {input:?}: {reason}")]
    Spec { input: String, reason: String },
    #[error("{spec} is not admissible on a {neighborhood}-connected grid")]
    Inadmissible {
        spec: String,
        neighborhood: Neighborhood,
    },
    #[error("invalid benchmark configuration: {0}")]
    InvalidConfig(String),
    #[error("map has no passable cells")]
    EmptyMap,
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error(transparent)]
    Heuristic(#[from] HeuristicError),
    #[error(
        "instance {instance} ({start} -> {goal}): {spec} found cost {got}, expected {expected}; \
         the heuristic is not consistent"
    )]
    CostMismatch {
        instance: usize,
        start: Cell,
        goal: Cell,
        spec: String,
        expected: f64,
        got: f64,
    },
}

/// Heuristic description, e.g. `FM(10)`, `DH(5)` or `MAX(FM(5),DH(5))`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum HeuristicSpec {
    Zero,
    Octile,
    Manhattan,
    FastMap(usize),
    Differential(usize),
    Max(Vec<HeuristicSpec>),
}

impl HeuristicSpec {
    /// Stored reals per node.
    pub fn memory_units(&self) -> usize {
        match self {
            HeuristicSpec::Zero | HeuristicSpec::Octile | HeuristicSpec::Manhattan => 0,
            HeuristicSpec::FastMap(k) | HeuristicSpec::Differential(k) => *k,
            HeuristicSpec::Max(parts) => parts.iter().map(Self::memory_units).sum(),
        }
    }

    fn max_dims(&self) -> (usize, usize) {
        match self {
            HeuristicSpec::FastMap(k) => (*k, 0),
            HeuristicSpec::Differential(p) => (0, *p),
            HeuristicSpec::Max(parts) => parts
                .iter()
                .map(Self::max_dims)
                .fold((0, 0), |a, b| (a.0.max(b.0), a.1.max(b.1))),
            _ => (0, 0),
        }
    }
}

impl fmt::Display for HeuristicSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HeuristicSpec::Zero => write!(f, "ZERO"),
            HeuristicSpec::Octile => write!(f, "OCT"),
            HeuristicSpec::Manhattan => write!(f, "MAN"),
            HeuristicSpec::FastMap(k) => write!(f, "FM({k})"),
            HeuristicSpec::Differential(p) => write!(f, "DH({p})"),
            HeuristicSpec::Max(parts) => {
                for (i, p) in parts.iter().enumerate() {
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

struct SpecParser<'a> {
    input: &'a str,
    rest: &'a str,
}

impl<'a> SpecParser<'a> {
    fn err(&self, reason: impl Into<String>) -> BenchError {
        BenchError::Spec {
            input: self.input.to_string(),
            reason: reason.into(),
        }
    }

    fn skip_ws(&mut self) {
        self.rest = self.rest.trim_start();
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if let Some(r) = self.rest.strip_prefix(c) {
            self.rest = r;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), BenchError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected {c:?} at {:?}", self.rest)))
        }
    }

    fn word(&mut self) -> String {
        self.skip_ws();
        let end = self
            .rest
            .find(|c: char| !c.is_ascii_alphanumeric())
            .unwrap_or(self.rest.len());
        let (w, r) = self.rest.split_at(end);
        self.rest = r;
        w.to_ascii_uppercase()
    }

    fn count(&mut self) -> Result<usize, BenchError> {
        self.expect('(')?;
        let w = self.word();
        let n: usize = w.parse().map_err(|_| self.err(format!("bad count {w:?}")))?;
        if n == 0 {
            return Err(self.err("count must be positive"));
        }
        self.expect(')')?;
        Ok(n)
    }

    /// sum := atom ('+' atom)*
    fn sum(&mut self) -> Result<HeuristicSpec, BenchError> {
        let mut parts = vec![self.atom()?];
        while self.eat('+') {
            parts.push(self.atom()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            HeuristicSpec::Max(parts)
        })
    }

    fn atom(&mut self) -> Result<HeuristicSpec, BenchError> {
        let w = self.word();
        match w.as_str() {
            "ZERO" => Ok(HeuristicSpec::Zero),
            "OCT" => Ok(HeuristicSpec::Octile),
            "MAN" => Ok(HeuristicSpec::Manhattan),
            "FM" => Ok(HeuristicSpec::FastMap(self.count()?)),
            "DH" => Ok(HeuristicSpec::Differential(self.count()?)),
            "MAX" => {
                self.expect('(')?;
                let mut parts = vec![self.sum()?];
                while self.eat(',') {
                    parts.push(self.sum()?);
                }
                self.expect(')')?;
                Ok(HeuristicSpec::Max(parts))
            }
            "" => Err(self.err(format!("expected a heuristic at {:?}", self.rest))),
            other => Err(self.err(format!("unknown heuristic {other:?}"))),
        }
    }
}

impl FromStr for HeuristicSpec {
    type Err = BenchError;

    /// `ZERO | OCT | MAN | FM(k) | DH(p) | MAX(spec,spec,...)`; `a+b` is
    /// shorthand for `MAX(a,b)`. Case-insensitive.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = SpecParser { input: s, rest: s };
        let spec = p.sum()?;
        p.skip_ws();
        if !p.rest.is_empty() {
            return Err(p.err(format!("trailing input {:?}", p.rest)));
        }
        Ok(spec)
    }
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub instance_count: usize,
    pub seed: u64,
    pub specs: Vec<HeuristicSpec>,
    /// FM(K) vs DH(K) sweep over this inclusive range of K.
    pub sweep: Option<(usize, usize)>,
    /// Embedding parameters; `k_max` and `seed` are overridden.
    pub embed: EmbedConfig<f64>,
    /// Also run Dijkstra per instance and require every heuristic to match it.
    pub verify_dijkstra: bool,
    /// Worker threads; `None` uses rayon's default.
    pub threads: Option<usize>,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            instance_count: 1000,
            seed: 0,
            specs: vec![
                HeuristicSpec::FastMap(10),
                HeuristicSpec::Differential(10),
                HeuristicSpec::Max(vec![HeuristicSpec::FastMap(5), HeuristicSpec::Differential(5)]),
            ],
            sweep: None,
            embed: EmbedConfig::default(),
            verify_dijkstra: false,
            threads: None,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        if self.instance_count < 1 {
            return Err(BenchError::InvalidConfig("instance_count must be >= 1".into()));
        }
        if self.specs.is_empty() && self.sweep.is_none() {
            return Err(BenchError::InvalidConfig("no heuristics to run".into()));
        }
        if let Some((lo, hi)) = self.sweep {
            if lo < 1 || lo > hi {
                return Err(BenchError::InvalidConfig(format!("bad sweep range {lo}..={hi}")));
            }
        }
        if self.threads == Some(0) {
            return Err(BenchError::InvalidConfig("threads must be >= 1".into()));
        }
        self.embed.validate()?;
        Ok(())
    }

    /// True when every spec stores the same number of reals per node.
    pub fn equal_memory(&self) -> bool {
        let units: Vec<usize> = self.specs.iter().map(HeuristicSpec::memory_units).collect();
        units.windows(2).all(|w| w[0] == w[1])
    }
}

/// Preprocessed heuristics for one map. FM(K) and DH(P) for every K, P up to
/// the largest requested are prefixes of a single embedding / pivot table.
pub struct HeuristicSet {
    pub embedding: Option<Embedding<f64>>,
    pub pivots: Option<PivotTable<f64>>,
    cells: std::sync::Arc<[Cell]>,
    neighborhood: Neighborhood,
    pub embed_seconds: f64,
    pub pivot_seconds: f64,
}

impl HeuristicSet {
    /// Builds FastMap up to `fm_dims` dimensions and `dh_pivots` pivots.
    pub fn build(
        grid: &GridGraph<f64>,
        neighborhood: Neighborhood,
        fm_dims: usize,
        dh_pivots: usize,
        embed: &EmbedConfig<f64>,
        seed: u64,
    ) -> Result<Self, BenchError> {
        let t = Instant::now();
        let embedding = if fm_dims > 0 {
            let cfg = EmbedConfig {
                k_max: fm_dims,
                seed,
                ..embed.clone()
            };
            Some(build_embedding(&grid.graph, &cfg)?)
        } else {
            None
        };
        let embed_seconds = t.elapsed().as_secs_f64();
        let t = Instant::now();
        let pivots = if dh_pivots > 0 {
            let p = dh_pivots.min(grid.graph.node_count());
            Some(build_differential(&grid.graph, p, seed)?)
        } else {
            None
        };
        Ok(HeuristicSet {
            embedding,
            pivots,
            cells: grid.cells().clone(),
            neighborhood,
            embed_seconds,
            pivot_seconds: t.elapsed().as_secs_f64(),
        })
    }

    pub fn provider(&self, spec: &HeuristicSpec) -> Result<HeuristicProvider<f64>, BenchError> {
        Ok(match spec {
            HeuristicSpec::Zero => HeuristicProvider::Zero,
            HeuristicSpec::Octile => HeuristicProvider::Octile(self.cells.clone()),
            HeuristicSpec::Manhattan => {
                if self.neighborhood != Neighborhood::Four {
                    return Err(BenchError::Inadmissible {
                        spec: spec.to_string(),
                        neighborhood: self.neighborhood,
                    });
                }
                HeuristicProvider::Manhattan(self.cells.clone())
            }
            HeuristicSpec::FastMap(k) => {
                let e = self.embedding.as_ref().expect("embedding built for FM specs");
                HeuristicProvider::fastmap(e.truncated(*k))
            }
            HeuristicSpec::Differential(p) => {
                let t = self.pivots.as_ref().expect("pivots built for DH specs");
                HeuristicProvider::differential(t.truncated(*p))
            }
            HeuristicSpec::Max(parts) => HeuristicProvider::max_combine(
                parts.iter().map(|p| self.provider(p)).collect::<Result<_, _>>()?,
            )?,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InstanceRow {
    pub index: usize,
    pub start: Cell,
    pub goal: Cell,
    pub cost: f64,
    /// Expansions per spec, in spec order.
    pub expanded: Vec<usize>,
    /// FM(K) and DH(K) expansions for each K of the sweep.
    pub sweep_fm: Vec<usize>,
    pub sweep_dh: Vec<usize>,
    pub sweep_baseline: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpecSummary {
    pub label: String,
    pub memory_units: usize,
    pub median: f64,
    pub mad: f64,
    /// Instances with the fewest expansions, ties credited to every tied spec.
    pub wins: usize,
    /// Instances won outright.
    pub sole_wins: usize,
    /// Cheaper routes found to closed nodes, summed over instances.
    pub closed_improvements: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WinnerBin {
    /// `FM-WINS`, `DH-WINS`, `FM+DH-WINS` or `TIES`.
    pub label: String,
    pub count: usize,
    /// (median, MAD) of each spec over the instances in this bin.
    pub stats: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub k: usize,
    pub fm: (f64, f64),
    pub dh: (f64, f64),
    pub fm_wins: usize,
    pub dh_wins: usize,
    pub baseline_wins: usize,
}

#[derive(Clone, Debug)]
pub struct BenchReport {
    pub map_name: String,
    pub node_count: usize,
    pub edge_count: usize,
    pub neighborhood: Neighborhood,
    pub labels: Vec<String>,
    pub rows: Vec<InstanceRow>,
    pub summaries: Vec<SpecSummary>,
    /// Per-winner breakdown, present for the FM(K) / DH(K) / FM(K/2)+DH(K/2) trio.
    pub bins: Option<Vec<WinnerBin>>,
    pub sweep: Vec<SweepRow>,
    pub baseline_label: Option<String>,
    pub spans: Vec<f64>,
    pub equal_memory: bool,
    pub embed_seconds: f64,
    pub pivot_seconds: f64,
}

/// Uniform random pairs of mutually reachable nodes.
pub fn sample_instances(
    grid: &GridGraph<f64>,
    count: usize,
    seed: u64,
) -> Result<Vec<(NodeId, NodeId)>, BenchError> {
    let n = grid.graph.node_count();
    if n == 0 {
        return Err(BenchError::EmptyMap);
    }
    let comp = grid.graph.components();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let s = rng.gen_range(0..n);
        let g = rng.gen_range(0..n);
        if comp[s] == comp[g] {
            out.push((NodeId::from_index(s), NodeId::from_index(g)));
        }
    }
    Ok(out)
}

fn trio_positions(specs: &[HeuristicSpec]) -> Option<[usize; 3]> {
    if specs.len() != 3 {
        return None;
    }
    let k = specs.iter().find_map(|s| match s {
        HeuristicSpec::FastMap(k) => Some(*k),
        _ => None,
    })?;
    if k % 2 != 0 {
        return None;
    }
    let half = k / 2;
    let fm = specs.iter().position(|s| *s == HeuristicSpec::FastMap(k))?;
    let dh = specs.iter().position(|s| *s == HeuristicSpec::Differential(k))?;
    let mix = specs.iter().position(|s| match s {
        HeuristicSpec::Max(p) => {
            p.len() == 2
                && p.contains(&HeuristicSpec::FastMap(half))
                && p.contains(&HeuristicSpec::Differential(half))
        }
        _ => false,
    })?;
    Some([fm, dh, mix])
}

fn winners(values: &[usize]) -> Vec<usize> {
    let best = values.iter().copied().min().unwrap_or(0);
    (0..values.len()).filter(|&i| values[i] == best).collect()
}

fn costs_agree(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(1.0)
}

/// Runs the benchmark protocol on one map.
pub fn run_bench(map_name: &str, map: &GridMap, cfg: &BenchConfig) -> Result<BenchReport, BenchError> {
    cfg.validate()?;
    let grid = grid_to_graph::<f64>(map);
    if grid.graph.is_empty() {
        return Err(BenchError::EmptyMap);
    }
    let neighborhood = map.neighborhood;
    let baseline = match neighborhood {
        Neighborhood::Eight => HeuristicSpec::Octile,
        Neighborhood::Four => HeuristicSpec::Manhattan,
    };

    let (mut fm_dims, mut dh_pivots) = cfg
        .specs
        .iter()
        .map(HeuristicSpec::max_dims)
        .fold((0, 0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    if let Some((_, hi)) = cfg.sweep {
        fm_dims = fm_dims.max(hi);
        dh_pivots = dh_pivots.max(hi);
    }
    let set = HeuristicSet::build(&grid, neighborhood, fm_dims, dh_pivots, &cfg.embed, cfg.seed)?;
    let providers: Vec<HeuristicProvider<f64>> = cfg
        .specs
        .iter()
        .map(|s| set.provider(s))
        .collect::<Result<_, _>>()?;
    let sweep_ks: Vec<usize> = cfg.sweep.map(|(lo, hi)| (lo..=hi).collect()).unwrap_or_default();
    let sweep_providers: Vec<(HeuristicProvider<f64>, HeuristicProvider<f64>)> = sweep_ks
        .iter()
        .map(|&k| {
            Ok((
                set.provider(&HeuristicSpec::FastMap(k))?,
                set.provider(&HeuristicSpec::Differential(k))?,
            ))
        })
        .collect::<Result<_, BenchError>>()?;
    let baseline_provider = if sweep_ks.is_empty() {
        None
    } else {
        Some(set.provider(&baseline)?)
    };
    let labels: Vec<String> = cfg.specs.iter().map(|s| s.to_string()).collect();

    let instances = sample_instances(&grid, cfg.instance_count, cfg.seed.wrapping_add(1))?;
    let node_count = grid.graph.node_count();

    let solve = |engine: &mut SearchEngine<f64>, index: usize| -> Result<(InstanceRow, Vec<usize>), BenchError> {
        let (s, g) = instances[index];
        let (start, goal) = (grid.cell_of(s), grid.cell_of(g));
        let mut reference: Option<(f64, String)> = None;
        let mut check = |cost: f64, label: &str| -> Result<(), BenchError> {
            match &reference {
                None => reference = Some((cost, label.to_string())),
                Some((expected, _)) if !costs_agree(*expected, cost) => {
                    return Err(BenchError::CostMismatch {
                        instance: index,
                        start,
                        goal,
                        spec: label.to_string(),
                        expected: *expected,
                        got: cost,
                    })
                }
                _ => {}
            }
            Ok(())
        };
        if cfg.verify_dijkstra {
            let r = engine.search(&grid.graph, s, g, &HeuristicProvider::Zero);
            check(r.cost, "DIJKSTRA")?;
        }
        let mut expanded = Vec::with_capacity(providers.len());
        let mut improvements = Vec::with_capacity(providers.len());
        for (p, label) in providers.iter().zip(&labels) {
            let r = engine.search(&grid.graph, s, g, p);
            check(r.cost, label)?;
            expanded.push(r.expanded);
            improvements.push(r.closed_improvements);
        }
        let mut sweep_fm = Vec::with_capacity(sweep_providers.len());
        let mut sweep_dh = Vec::with_capacity(sweep_providers.len());
        for (k, (fm, dh)) in sweep_ks.iter().zip(&sweep_providers) {
            let r = engine.search(&grid.graph, s, g, fm);
            check(r.cost, &format!("FM({k})"))?;
            sweep_fm.push(r.expanded);
            let r = engine.search(&grid.graph, s, g, dh);
            check(r.cost, &format!("DH({k})"))?;
            sweep_dh.push(r.expanded);
        }
        let sweep_baseline = match &baseline_provider {
            Some(p) => {
                let r = engine.search(&grid.graph, s, g, p);
                check(r.cost, &baseline.to_string())?;
                Some(r.expanded)
            }
            None => None,
        };
        let cost = reference.map(|r| r.0).unwrap_or(0.0);
        Ok((
            InstanceRow {
                index,
                start,
                goal,
                cost,
                expanded,
                sweep_fm,
                sweep_dh,
                sweep_baseline,
            },
            improvements,
        ))
    };

    let run = || -> Result<Vec<(InstanceRow, Vec<usize>)>, BenchError> {
        (0..instances.len())
            .into_par_iter()
            .map_init(|| SearchEngine::new(node_count), |engine, i| solve(engine, i))
            .collect()
    };
    let results = match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| BenchError::InvalidConfig(e.to_string()))?
            .install(run)?,
        None => run()?,
    };

    let mut rows = Vec::with_capacity(results.len());
    let mut improvements = vec![0usize; providers.len()];
    for (row, imp) in results {
        for (acc, v) in improvements.iter_mut().zip(imp) {
            *acc += v;
        }
        rows.push(row);
    }

    let mut wins = vec![0usize; labels.len()];
    let mut sole = vec![0usize; labels.len()];
    for row in &rows {
        let w = winners(&row.expanded);
        for &i in &w {
            wins[i] += 1;
        }
        if w.len() == 1 {
            sole[w[0]] += 1;
        }
    }
    let summaries = labels
        .iter()
        .enumerate()
        .map(|(i, label)| {
            let counts: Vec<usize> = rows.iter().map(|r| r.expanded[i]).collect();
            let (median, mad) = median_mad(&counts);
            SpecSummary {
                label: label.clone(),
                memory_units: cfg.specs[i].memory_units(),
                median,
                mad,
                wins: wins[i],
                sole_wins: sole[i],
                closed_improvements: improvements[i],
            }
        })
        .collect();

    let bins = trio_positions(&cfg.specs).map(|pos| {
        let names = ["FM-WINS", "DH-WINS", "FM+DH-WINS", "TIES"];
        let mut members: Vec<Vec<&InstanceRow>> = vec![Vec::new(); 4];
        for row in &rows {
            let trio: Vec<usize> = pos.iter().map(|&p| row.expanded[p]).collect();
            let w = winners(&trio);
            members[if w.len() == 1 { w[0] } else { 3 }].push(row);
        }
        names
            .iter()
            .zip(members)
            .map(|(name, rs)| WinnerBin {
                label: name.to_string(),
                count: rs.len(),
                stats: (0..labels.len())
                    .map(|i| median_mad(&rs.iter().map(|r| r.expanded[i]).collect::<Vec<_>>()))
                    .collect(),
            })
            .collect()
    });

    let sweep = sweep_ks
        .iter()
        .enumerate()
        .map(|(j, &k)| {
            let fm: Vec<usize> = rows.iter().map(|r| r.sweep_fm[j]).collect();
            let dh: Vec<usize> = rows.iter().map(|r| r.sweep_dh[j]).collect();
            let mut w = [0usize; 3];
            for r in &rows {
                for i in winners(&[r.sweep_fm[j], r.sweep_dh[j], r.sweep_baseline.unwrap_or(usize::MAX)]) {
                    w[i] += 1;
                }
            }
            SweepRow {
                k,
                fm: median_mad(&fm),
                dh: median_mad(&dh),
                fm_wins: w[0],
                dh_wins: w[1],
                baseline_wins: w[2],
            }
        })
        .collect();

    Ok(BenchReport {
        map_name: map_name.to_string(),
        node_count,
        edge_count: grid.graph.edge_count(),
        neighborhood,
        labels,
        rows,
        summaries,
        bins,
        sweep,
        baseline_label: (!sweep_ks.is_empty()).then(|| baseline.to_string()),
        spans: set
            .embedding
            .as_ref()
            .map(|e| e.span_lengths())
            .unwrap_or_default(),
        equal_memory: cfg.equal_memory(),
        embed_seconds: set.embed_seconds,
        pivot_seconds: set.pivot_seconds,
    })
}

impl BenchReport {
    pub fn summary(&self, label: &str) -> Option<&SpecSummary> {
        self.summaries.iter().find(|s| s.label == label)
    }

    /// One row per instance:
    /// `instance,start_x,start_y,goal_x,goal_y,cost,<spec>_expanded...`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("instance,start_x,start_y,goal_x,goal_y,cost");
        for l in &self.labels {
            let _ = write!(out, ",{l}_expanded");
        }
        out.push('\n');
        for r in &self.rows {
            let _ = write!(
                out,
                "{},{},{},{},{},{}",
                r.index, r.start.x, r.start.y, r.goal.x, r.goal.y, r.cost
            );
            for e in &r.expanded {
                let _ = write!(out, ",{e}");
            }
            out.push('\n');
        }
        out
    }

    /// `k,fm_median,fm_mad,dh_median,dh_mad,fm_wins,dh_wins,<baseline>_wins`.
    pub fn sweep_csv(&self) -> String {
        let base = self.baseline_label.as_deref().unwrap_or("baseline");
        let mut out = format!("k,fm_median,fm_mad,dh_median,dh_mad,fm_wins,dh_wins,{base}_wins\n");
        for s in &self.sweep {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                s.k, s.fm.0, s.fm.1, s.dh.0, s.dh.1, s.fm_wins, s.dh_wins, s.baseline_wins
            );
        }
        out
    }

    /// Human-readable summary.
    pub fn summary_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "map {} ({}-connected): {} nodes, {} edges, {} instances",
            self.map_name,
            self.neighborhood,
            self.node_count,
            self.edge_count,
            self.rows.len()
        );
        if !self.spans.is_empty() {
            let spans: Vec<String> = self.spans.iter().map(|d| format!("{d:.1}")).collect();
            let _ = writeln!(out, "farthest-pair spans: <{}>", spans.join(", "));
        }
        let _ = writeln!(
            out,
            "preprocessing: embedding {:.2}s, pivots {:.2}s",
            self.embed_seconds, self.pivot_seconds
        );
        if !self.equal_memory {
            let _ = writeln!(out, "note: heuristics do not use equal memory");
        }
        if !self.summaries.is_empty() {
            let _ = writeln!(
                out,
                "{:<16} {:>6} {:>10} {:>10} {:>6} {:>6}",
                "heuristic", "mem", "median", "MAD", "wins", "sole"
            );
            for s in &self.summaries {
                let _ = writeln!(
                    out,
                    "{:<16} {:>6} {:>10.1} {:>10.1} {:>6} {:>6}",
                    s.label, s.memory_units, s.median, s.mad, s.wins, s.sole_wins
                );
            }
        }
        if let Some(bins) = &self.bins {
            let _ = writeln!(out, "winner bins (median / MAD of expansions):");
            for b in bins {
                let _ = write!(out, "  {:<11} {:>5}:", b.label, b.count);
                for (l, (m, d)) in self.labels.iter().zip(&b.stats) {
                    let _ = write!(out, "  {l} {m:.0}/{d:.0}");
                }
                out.push('\n');
            }
        }
        if !self.sweep.is_empty() {
            let base = self.baseline_label.as_deref().unwrap_or("baseline");
            let _ = writeln!(
                out,
                "{:>3} {:>16} {:>16} {:>6} {:>6} {:>6}",
                "K", "FM median/MAD", "DH median/MAD", "FM", "DH", base
            );
            for s in &self.sweep {
                let _ = writeln!(
                    out,
                    "{:>3} {:>16} {:>16} {:>6} {:>6} {:>6}",
                    s.k,
                    format!("{:.0}/{:.0}", s.fm.0, s.fm.1),
                    format!("{:.0}/{:.0}", s.dh.0, s.dh.1),
                    s.fm_wins,
                    s.dh_wins,
                    s.baseline_wins
                );
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapgen;

    #[test]
    fn spec_grammar() {
        assert_eq!("ZERO".parse::<HeuristicSpec>().unwrap(), HeuristicSpec::Zero);
        assert_eq!("oct".parse::<HeuristicSpec>().unwrap(), HeuristicSpec::Octile);
        assert_eq!("MAN".parse::<HeuristicSpec>().unwrap(), HeuristicSpec::Manhattan);
        assert_eq!("FM(10)".parse::<HeuristicSpec>().unwrap(), HeuristicSpec::FastMap(10));
        assert_eq!("DH( 3 )".parse::<HeuristicSpec>().unwrap(), HeuristicSpec::Differential(3));
        let mix = HeuristicSpec::Max(vec![HeuristicSpec::FastMap(5), HeuristicSpec::Differential(5)]);
        assert_eq!("MAX(FM(5),DH(5))".parse::<HeuristicSpec>().unwrap(), mix);
        assert_eq!("FM(5)+DH(5)".parse::<HeuristicSpec>().unwrap(), mix);
        assert_eq!(mix.to_string(), "FM(5)+DH(5)");
        assert_eq!(mix.memory_units(), 10);
        for bad in ["", "FM", "FM()", "FM(0)", "FM(3", "XY(2)", "MAX(FM(1)", "OCT OCT"] {
            assert!(bad.parse::<HeuristicSpec>().is_err(), "{bad:?}");
        }
    }

    #[test]
    fn trio_detection() {
        let parse = |v: &[&str]| v.iter().map(|s| s.parse().unwrap()).collect::<Vec<HeuristicSpec>>();
        assert_eq!(trio_positions(&parse(&["FM(10)", "DH(10)", "FM(5)+DH(5)"])), Some([0, 1, 2]));
        assert_eq!(trio_positions(&parse(&["DH(4)", "MAX(DH(2),FM(2))", "FM(4)"])), Some([2, 0, 1]));
        assert_eq!(trio_positions(&parse(&["FM(10)", "DH(10)", "OCT"])), None);
        assert_eq!(trio_positions(&parse(&["FM(10)", "DH(10)"])), None);
    }

    #[test]
    fn single_instance_on_open_grid() {
        let map = mapgen::open(3, 3).with_neighborhood(Neighborhood::Four);
        let cfg = BenchConfig {
            instance_count: 1,
            specs: vec!["ZERO".parse().unwrap(), "MAN".parse().unwrap(), "FM(2)".parse().unwrap()],
            ..Default::default()
        };
        let report = run_bench("open3", &map, &cfg).unwrap();
        assert_eq!(report.rows.len(), 1);
        for s in &report.summaries {
            assert_eq!(s.mad, 0.0);
        }
        let csv = report.to_csv();
        assert!(csv.starts_with(
            "instance,start_x,start_y,goal_x,goal_y,cost,ZERO_expanded,MAN_expanded,FM(2)_expanded\n"
        ));
        assert_eq!(csv.lines().count(), 2);
    }

    #[test]
    fn manhattan_rejected_on_eight_grid() {
        let cfg = BenchConfig {
            instance_count: 1,
            specs: vec![HeuristicSpec::Manhattan],
            ..Default::default()
        };
        assert!(matches!(
            run_bench("open", &mapgen::open(4, 4), &cfg),
            Err(BenchError::Inadmissible { .. })
        ));
    }

    #[test]
    fn report_is_deterministic_and_thread_independent() {
        let map = mapgen::terrain(40, 40, 0.2, 3);
        let mut cfg = BenchConfig {
            instance_count: 30,
            seed: 11,
            sweep: Some((1, 3)),
            threads: Some(1),
            verify_dijkstra: true,
            ..Default::default()
        };
        let a = run_bench("t", &map, &cfg).unwrap();
        cfg.threads = Some(3);
        let b = run_bench("t", &map, &cfg).unwrap();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.sweep_csv(), b.sweep_csv());
        assert_eq!(a.rows, b.rows);
        let bins = a.bins.as_ref().unwrap();
        assert_eq!(bins.iter().map(|b| b.count).sum::<usize>(), 30);
        assert!(a.equal_memory);
        assert!(a.summaries.iter().all(|s| s.closed_improvements == 0));
        assert_eq!(a.sweep.len(), 3);
        assert!(a.summary_table().contains("FM+DH-WINS"));
    }

    #[test]
    fn instances_are_reachable() {
        let map = mapgen::rooms(30, 30, 5, 0.3, 4);
        let grid = grid_to_graph::<f64>(&map);
        let comp = grid.graph.components();
        for (s, g) in sample_instances(&grid, 200, 5).unwrap() {
            assert_eq!(comp[s.index()], comp[g.index()]);
        }
    }

    #[test]
    fn config_validation() {
        let bad = BenchConfig {
            instance_count: 0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = BenchConfig {
            sweep: Some((3, 2)),
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let unequal = BenchConfig {
            specs: vec![HeuristicSpec::FastMap(10), HeuristicSpec::Differential(4)],
            ..Default::default()
        };
        assert!(!unequal.equal_memory());
    }
}
