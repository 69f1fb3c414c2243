use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use pathlab::bench::{run_bench, BenchConfig, HeuristicSpec};
use pathlab::persist::{read_embedding, read_pivots, write_embedding, write_pivots};
use pathlab::{
    build_differential, build_embedding, grid_to_graph, parse_map_with, parse_scenario,
    validate_scenario, Cell, EmbedConfig, Embedding64, Epsilon, Grid, GridMap, Neighborhood,
    ParseOptions, Pivots, Provider, Scenario, ScenarioIssue, SearchEngine,
};

/// Exit status of `solve` when start and goal are not connected.
const EXIT_UNREACHABLE: u8 = 3;

#[derive(Parser)]
#[command(name = "pathlab", version, about = "FastMap and differential heuristics for A* on grid maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a FastMap embedding of a map and write it to a file.
    Embed(EmbedArgs),
    /// Build a differential-heuristic pivot table and write it to a file.
    Pivots(PivotArgs),
    /// Find a shortest path between two cells.
    Solve(SolveArgs),
    /// Run the benchmark protocol on one or more maps.
    Bench(BenchArgs),
    /// Check a scenario file against its map.
    ValidateScen(ValidateArgs),
}

#[derive(Args)]
struct MapArgs {
    /// MovingAI `.map` file.
    #[arg(long)]
    map: PathBuf,
    #[arg(long, default_value = "eight")]
    neighborhood: Neighborhood,
    /// Treat swamp (`S`) cells as passable.
    #[arg(long)]
    swamp_passable: bool,
}

impl MapArgs {
    fn load(&self) -> Result<GridMap> {
        load_map(&self.map, self.neighborhood, self.swamp_passable)
    }
}

#[derive(Args)]
struct EmbedParams {
    /// Maximum number of FastMap dimensions.
    #[arg(long, default_value_t = 10)]
    kmax: usize,
    /// Stop threshold on the farthest-pair distance: an absolute value, or
    /// `rel:<x>` for a fraction of the first dimension's distance.
    #[arg(long, default_value = "rel:1e-4")]
    epsilon: Epsilon<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl EmbedParams {
    fn config(&self) -> EmbedConfig<f64> {
        EmbedConfig {
            k_max: self.kmax,
            epsilon: self.epsilon,
            seed: self.seed,
            ..EmbedConfig::default()
        }
    }
}

#[derive(Args)]
struct EmbedArgs {
    #[command(flatten)]
    map: MapArgs,
    #[command(flatten)]
    params: EmbedParams,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PivotArgs {
    #[command(flatten)]
    map: MapArgs,
    /// Number of pivots.
    #[arg(long, default_value_t = 10)]
    pivots: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    map: MapArgs,
    /// Start cell as `x,y`.
    #[arg(long)]
    start: Cell,
    /// Goal cell as `x,y`.
    #[arg(long)]
    goal: Cell,
    #[arg(long, default_value = "ZERO")]
    heuristic: HeuristicSpec,
    /// Embedding file for FM terms; built on the fly when absent.
    #[arg(long)]
    embedding: Option<PathBuf>,
    /// Pivot table file for DH terms; built on the fly when absent.
    #[arg(long)]
    pivot_table: Option<PathBuf>,
    #[command(flatten)]
    params: EmbedParams,
}

#[derive(Args)]
struct BenchArgs {
    /// Map files; repeat for several maps.
    #[arg(long, required = true)]
    map: Vec<PathBuf>,
    #[arg(long, default_value = "eight")]
    neighborhood: Neighborhood,
    #[arg(long)]
    swamp_passable: bool,
    /// Heuristic to compare; repeatable. Defaults to FM(10), DH(10) and
    /// FM(5)+DH(5).
    #[arg(long)]
    heuristic: Vec<HeuristicSpec>,
    /// Also sweep FM(K) and DH(K) for K in `lo..=hi`, e.g. `1..10`.
    #[arg(long, value_parser = parse_range)]
    sweep: Option<(usize, usize)>,
    #[arg(long, default_value_t = 1000)]
    instances: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "rel:1e-4")]
    epsilon: Epsilon<f64>,
    /// Check every instance against plain Dijkstra as well.
    #[arg(long)]
    verify: bool,
    /// Output directory for `<map>.csv`, `<map>-sweep.csv` and
    /// `<map>-summary.txt`. Without it the CSV goes to stdout and the summary
    /// to stderr (single map only).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (also capped by PATHLAB_THREADS).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    map: MapArgs,
    /// MovingAI `.scen` file.
    #[arg(long)]
    scen: PathBuf,
    /// Allowed difference between recorded and computed optimal cost.
    #[arg(long, default_value_t = 1e-4)]
    tolerance: f64,
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("expected `lo..hi`, got {s:?}"))?;
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    Ok((num(lo)?, num(hi.trim_start_matches('='))?))
}

fn load_map(path: &Path, neighborhood: Neighborhood, swamp_passable: bool) -> Result<GridMap> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let map = parse_map_with(&text, ParseOptions { swamp_passable })
        .with_context(|| format!("parsing {}", path.display()))?;
    Ok(map.with_neighborhood(neighborhood))
}

fn map_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "map".into())
}

fn nonempty_grid(map: &GridMap) -> Result<Grid> {
    let grid = grid_to_graph::<f64>(map);
    if grid.graph.is_empty() {
        bail!("map has no passable cells");
    }
    Ok(grid)
}

/// Worker count from `--threads` and `PATHLAB_THREADS`, whichever is smaller.
fn worker_threads(requested: Option<usize>) -> Result<Option<usize>> {
    let env = match std::env::var("PATHLAB_THREADS") {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .ok()
                .filter(|&n| n > 0)
                .with_context(|| format!("PATHLAB_THREADS must be a positive integer, got {v:?}"))?,
        ),
        Err(_) => None,
    };
    Ok(match (requested, env) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn embed(args: &EmbedArgs) -> Result<()> {
    let map = args.map.load()?;
    let grid = nonempty_grid(&map)?;
    let e = build_embedding(&grid.graph, &args.params.config())?;
    write_embedding(&e, create(&args.out)?)?;
    println!(
        "{} nodes, {} edges, {} dimensions",
        grid.graph.node_count(),
        grid.graph.edge_count(),
        e.dims()
    );
    for (i, s) in e.spans().iter().enumerate() {
        println!("dim {}: d_ab {:.6} ({} -> {})", i + 1, s.d_ab, grid.cell_of(s.n_a), grid.cell_of(s.n_b));
    }
    Ok(())
}

fn pivots(args: &PivotArgs) -> Result<()> {
    let map = args.map.load()?;
    let grid = nonempty_grid(&map)?;
    let t = build_differential(&grid.graph, args.pivots, args.seed)?;
    write_pivots(&t, create(&args.out)?)?;
    println!("{} nodes, {} pivots", t.node_count(), t.pivot_count());
    for (i, p) in t.pivots().iter().enumerate() {
        println!("pivot {}: {}", i + 1, grid.cell_of(*p));
    }
    Ok(())
}

fn spec_needs(spec: &HeuristicSpec) -> (usize, usize) {
    match spec {
        HeuristicSpec::FastMap(k) => (*k, 0),
        HeuristicSpec::Differential(p) => (0, *p),
        HeuristicSpec::Max(parts) => parts
            .iter()
            .map(spec_needs)
            .fold((0, 0), |a, b| (a.0.max(b.0), a.1.max(b.1))),
        _ => (0, 0),
    }
}

fn provider_for(
    spec: &HeuristicSpec,
    grid: &Grid,
    neighborhood: Neighborhood,
    embedding: Option<&Embedding64>,
    table: Option<&Pivots>,
) -> Result<Provider> {
    Ok(match spec {
        HeuristicSpec::Zero => Provider::Zero,
        HeuristicSpec::Octile => Provider::Octile(grid.cells().clone()),
        HeuristicSpec::Manhattan => {
            if neighborhood != Neighborhood::Four {
                bail!("MAN is not admissible on an eight-connected grid; use OCT or --neighborhood four");
            }
            Provider::Manhattan(grid.cells().clone())
        }
        HeuristicSpec::FastMap(k) => {
            Provider::fastmap(embedding.context("no embedding available")?.truncated(*k))
        }
        HeuristicSpec::Differential(p) => {
            let t = table.context("no pivot table available")?;
            if *p > t.pivot_count() {
                bail!("DH({p}) needs {p} pivots but the table has {}", t.pivot_count());
            }
            Provider::differential(t.truncated(*p))
        }
        HeuristicSpec::Max(parts) => Provider::max_combine(
            parts
                .iter()
                .map(|p| provider_for(p, grid, neighborhood, embedding, table))
                .collect::<Result<_>>()?,
        )?,
    })
}

fn check_nodes(what: &str, path: &Path, found: usize, expected: usize) -> Result<()> {
    if found != expected {
        bail!(
            "{what} {} has {found} nodes but the map has {expected}; it was built for a different map or neighborhood",
            path.display()
        );
    }
    Ok(())
}

/// Returns `true` when a path was found.
fn solve(args: &SolveArgs) -> Result<bool> {
    let map = args.map.load()?;
    let grid = nonempty_grid(&map)?;
    let n = grid.graph.node_count();
    let node = |c: Cell, what: &str| {
        grid.node_at(c).with_context(|| {
            if map.in_bounds(c.x as i64, c.y as i64) {
                format!("{what} cell {c} is blocked")
            } else {
                format!("{what} cell {c} is outside the {}x{} map", map.width(), map.height())
            }
        })
    };
    let (s, g) = (node(args.start, "start")?, node(args.goal, "goal")?);

    let (fm_dims, dh_pivots) = spec_needs(&args.heuristic);
    let embedding = match (&args.embedding, fm_dims) {
        (Some(path), _) => {
            let e: Embedding64 = read_embedding(BufReader::new(
                File::open(path).with_context(|| format!("opening {}", path.display()))?,
            ))
            .with_context(|| format!("reading {}", path.display()))?;
            check_nodes("embedding", path, e.node_count(), n)?;
            Some(e)
        }
        (None, 0) => None,
        (None, k) => Some(build_embedding(
            &grid.graph,
            &EmbedConfig {
                k_max: k,
                ..args.params.config()
            },
        )?),
    };
    let table = match (&args.pivot_table, dh_pivots) {
        (Some(path), _) => {
            let t: Pivots = read_pivots(BufReader::new(
                File::open(path).with_context(|| format!("opening {}", path.display()))?,
            ))
            .with_context(|| format!("reading {}", path.display()))?;
            check_nodes("pivot table", path, t.node_count(), n)?;
            Some(t)
        }
        (None, 0) => None,
        (None, p) => Some(build_differential(&grid.graph, p.min(n), args.params.seed)?),
    };
    let h = provider_for(
        &args.heuristic,
        &grid,
        map.neighborhood,
        embedding.as_ref(),
        table.as_ref(),
    )?;

    let r = SearchEngine::new(n).search(&grid.graph, s, g, &h);
    let mut out = std::io::stdout().lock();
    writeln!(out, "heuristic {}", args.heuristic)?;
    writeln!(out, "expanded {}", r.expanded)?;
    writeln!(out, "generated {}", r.generated)?;
    match &r.path {
        Some(path) => {
            writeln!(out, "cost {}", r.cost)?;
            let cells: Vec<String> = path.iter().map(|&v| grid.cell_of(v).to_string()).collect();
            writeln!(out, "length {}", path.len())?;
            writeln!(out, "path {}", cells.join(" "))?;
            Ok(true)
        }
        None => {
            writeln!(out, "cost inf")?;
            writeln!(out, "unreachable: no path from {} to {}", args.start, args.goal)?;
            Ok(false)
        }
    }
}

fn bench(args: &BenchArgs) -> Result<()> {
    let specs = if args.heuristic.is_empty() && args.sweep.is_none() {
        BenchConfig::default().specs
    } else {
        args.heuristic.clone()
    };
    let cfg = BenchConfig {
        instance_count: args.instances,
        seed: args.seed,
        specs,
        sweep: args.sweep,
        embed: EmbedConfig {
            epsilon: args.epsilon,
            ..EmbedConfig::default()
        },
        verify_dijkstra: args.verify,
        threads: worker_threads(args.threads)?,
    };
    cfg.validate()?;
    if args.out.is_none() && args.map.len() > 1 {
        bail!("benchmarking several maps needs --out <dir>");
    }
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    for path in &args.map {
        let map = load_map(path, args.neighborhood, args.swamp_passable)?;
        let name = map_name(path);
        let report = run_bench(&name, &map, &cfg).with_context(|| format!("benchmarking {}", path.display()))?;
        let mut summary = report.summary_table();
        summary.push_str(&format!(
            "swamp cells: {}\n",
            if args.swamp_passable { "passable" } else { "blocked" }
        ));
        match &args.out {
            Some(dir) => {
                fs::write(dir.join(format!("{name}.csv")), report.to_csv())?;
                if !report.sweep.is_empty() {
                    fs::write(dir.join(format!("{name}-sweep.csv")), report.sweep_csv())?;
                }
                fs::write(dir.join(format!("{name}-summary.txt")), &summary)?;
                print!("{summary}");
            }
            None => {
                print!("{}", report.to_csv());
                eprint!("{summary}");
                if !report.sweep.is_empty() {
                    eprint!("{}", report.sweep_csv());
                }
            }
        }
    }
    Ok(())
}

fn validate(args: &ValidateArgs) -> Result<bool> {
    let map = args.map.load()?;
    let text = fs::read_to_string(&args.scen).with_context(|| format!("reading {}", args.scen.display()))?;
    let scen: Scenario<f64> = parse_scenario(&text).with_context(|| format!("parsing {}", args.scen.display()))?;
    let grid = grid_to_graph::<f64>(&map);
    let issues = validate_scenario(&grid, &scen, args.tolerance);
    for issue in &issues {
        match issue {
            ScenarioIssue::SizeMismatch { index } => {
                println!("entry {index}: map size differs from {}x{}", map.width(), map.height())
            }
            ScenarioIssue::CellBlocked { index, cell } => println!("entry {index}: cell {cell} is blocked"),
            ScenarioIssue::Unreachable { index } => println!("entry {index}: goal unreachable"),
            ScenarioIssue::CostMismatch {
                index,
                expected,
                computed,
            } => println!("entry {index}: recorded cost {expected}, computed {computed}"),
        }
    }
    println!("{} entries, {} issues", scen.entries.len(), issues.len());
    Ok(issues.is_empty())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Embed(a) => embed(a).map(|_| ExitCode::SUCCESS),
        Command::Pivots(a) => pivots(a).map(|_| ExitCode::SUCCESS),
        Command::Solve(a) => solve(a).map(|found| {
            if found {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_UNREACHABLE)
            }
        }),
        Command::Bench(a) => bench(a).map(|_| ExitCode::SUCCESS),
        Command::ValidateScen(a) => validate(a).map(|ok| if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE }),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
