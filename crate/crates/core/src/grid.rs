//! MovingAI grid maps and scenarios, and their conversion to graphs.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::graph::{build_graph, NodeId, WeightedGraph};
use crate::scalar::Scalar;
use crate::search::dijkstra_baseline;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MapError {
    #[error("line {line}: malformed header: {reason}")]
    MalformedHeader { line: usize, reason: String },
    #[error("line {line}: row has {actual} cells, expected {expected}")]
    RowLengthMismatch {
        line: usize,
        expected: usize,
        actual: usize,
    },
    #[error("map has {actual} rows, expected {expected}")]
    RowCountMismatch { expected: usize, actual: usize },
    #[error("line {line}, column {column}: unknown glyph {glyph:?}")]
    UnknownGlyph {
        line: usize,
        column: usize,
        glyph: char,
    },
    #[error("line {line}: malformed scenario entry: {reason}")]
    MalformedEntry { line: usize, reason: String },
}

/// Grid cell coordinates, `x` is the column and `y` the row.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub x: u32,
    pub y: u32,
}

impl Cell {
    pub fn new(x: u32, y: u32) -> Self {
        Cell { x, y }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.x, self.y)
    }
}

impl FromStr for Cell {
    type Err = String;

    /// Parses `x,y`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (x, y) = s
            .split_once(',')
            .ok_or_else(|| format!("expected x,y, got {s:?}"))?;
        let parse = |v: &str| v.trim().parse::<u32>().map_err(|e| format!("{s:?}: {e}"));
        Ok(Cell::new(parse(x)?, parse(y)?))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Neighborhood {
    /// Cardinal moves of cost 1.
    Four,
    /// Cardinal moves of cost 1 and diagonal moves of cost `sqrt(2)`; a
    /// diagonal needs both adjacent cardinal cells free.
    #[default]
    Eight,
}

impl FromStr for Neighborhood {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "four" | "4" => Ok(Neighborhood::Four),
            "eight" | "8" => Ok(Neighborhood::Eight),
            other => Err(format!("unknown neighborhood {other:?}")),
        }
    }
}

impl fmt::Display for Neighborhood {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Neighborhood::Four => "four",
            Neighborhood::Eight => "eight",
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ParseOptions {
    /// Treat `S` (swamp) cells as passable.
    pub swamp_passable: bool,
}

/// Passability grid, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridMap {
    width: usize,
    height: usize,
    passable: Vec<bool>,
    pub neighborhood: Neighborhood,
}

impl GridMap {
    pub fn new(width: usize, height: usize, passable: Vec<bool>) -> Self {
        assert_eq!(passable.len(), width * height, "passability size mismatch");
        GridMap {
            width,
            height,
            passable,
            neighborhood: Neighborhood::default(),
        }
    }

    /// Builds a map from rows of `.` (free) and `@` (blocked).
    pub fn from_rows(rows: &[&str]) -> Self {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.len());
        let passable = rows
            .iter()
            .flat_map(|r| {
                assert_eq!(r.len(), width, "ragged rows");
                r.bytes().map(|b| b == b'.')
            })
            .collect();
        GridMap::new(width, height, passable)
    }

    pub fn with_neighborhood(mut self, neighborhood: Neighborhood) -> Self {
        self.neighborhood = neighborhood;
        self
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn passable_grid(&self) -> &[bool] {
        &self.passable
    }

    pub fn passable_count(&self) -> usize {
        self.passable.iter().filter(|&&p| p).count()
    }

    pub fn in_bounds(&self, x: i64, y: i64) -> bool {
        x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height
    }

    /// False for blocked or out-of-bounds cells.
    pub fn is_passable(&self, x: i64, y: i64) -> bool {
        self.in_bounds(x, y) && self.passable[y as usize * self.width + x as usize]
    }

    pub fn set_passable(&mut self, x: usize, y: usize, value: bool) {
        self.passable[y * self.width + x] = value;
    }

    /// Sub-map with top-left corner `(x0, y0)`, clipped to the map.
    pub fn crop(&self, x0: usize, y0: usize, width: usize, height: usize) -> GridMap {
        let x1 = (x0 + width).min(self.width);
        let y1 = (y0 + height).min(self.height);
        let (x0, y0) = (x0.min(x1), y0.min(y1));
        let mut passable = Vec::with_capacity((x1 - x0) * (y1 - y0));
        for y in y0..y1 {
            passable.extend_from_slice(&self.passable[y * self.width + x0..y * self.width + x1]);
        }
        GridMap {
            width: x1 - x0,
            height: y1 - y0,
            passable,
            neighborhood: self.neighborhood,
        }
    }

    /// MovingAI text with `.` for free and `@` for blocked cells.
    pub fn to_map_text(&self) -> String {
        let mut out = format!(
            "type octile\nheight {}\nwidth {}\nmap\n",
            self.height, self.width
        );
        for row in self.passable.chunks(self.width.max(1)).take(self.height) {
            out.extend(row.iter().map(|&p| if p { '.' } else { '@' }));
            out.push('\n');
        }
        out
    }
}

/// Parses a MovingAI `.map` file with default options.
pub fn parse_map(text: &str) -> Result<GridMap, MapError> {
    parse_map_with(text, ParseOptions::default())
}

pub fn parse_map_with(text: &str, options: ParseOptions) -> Result<GridMap, MapError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end_matches('\r')));
    let header = |line: usize, reason: &str| MapError::MalformedHeader {
        line,
        reason: reason.to_string(),
    };

    let mut kind = None;
    let mut height = None;
    let mut width = None;
    let mut last_line = 0;
    loop {
        let Some((no, line)) = lines.next() else {
            return Err(header(last_line + 1, "missing `map` line"));
        };
        last_line = no;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if line == "map" {
            break;
        }
        let mut parts = line.split_whitespace();
        let key = parts.next().unwrap_or_default();
        let value = parts.next().ok_or_else(|| header(no, "missing value"))?;
        if parts.next().is_some() {
            return Err(header(no, "trailing tokens"));
        }
        let number = || {
            value
                .parse::<usize>()
                .map_err(|_| header(no, &format!("bad number {value:?}")))
        };
        match key {
            "type" => kind = Some(value.to_string()),
            "height" => height = Some(number()?),
            "width" => width = Some(number()?),
            _ => return Err(header(no, &format!("unknown key {key:?}"))),
        }
    }
    if kind.as_deref() != Some("octile") {
        return Err(header(last_line, "expected `type octile`"));
    }
    let height = height.ok_or_else(|| header(last_line, "missing height"))?;
    let width = width.ok_or_else(|| header(last_line, "missing width"))?;

    let mut passable = Vec::with_capacity(width * height);
    let mut rows = 0;
    for (no, line) in lines {
        if rows == height {
            if line.trim().is_empty() {
                continue;
            }
            return Err(MapError::RowCountMismatch {
                expected: height,
                actual: rows + 1,
            });
        }
        let count = line.chars().count();
        if count != width {
            return Err(MapError::RowLengthMismatch {
                line: no,
                expected: width,
                actual: count,
            });
        }
        for (column, glyph) in line.chars().enumerate() {
            let free = match glyph {
                '.' | 'G' => true,
                'S' => options.swamp_passable,
                '@' | 'O' | 'T' | 'W' => false,
                glyph => {
                    return Err(MapError::UnknownGlyph {
                        line: no,
                        column: column + 1,
                        glyph,
                    })
                }
            };
            passable.push(free);
        }
        rows += 1;
    }
    if rows != height {
        return Err(MapError::RowCountMismatch {
            expected: height,
            actual: rows,
        });
    }
    Ok(GridMap::new(width, height, passable))
}

/// A grid map as a graph. Nodes are the passable cells in row-major order.
#[derive(Clone, Debug)]
pub struct GridGraph<S> {
    pub graph: WeightedGraph<S>,
    cells: Arc<[Cell]>,
    node_of_cell: Vec<Option<NodeId>>,
    width: usize,
    height: usize,
}

impl<S: Scalar> GridGraph<S> {
    pub fn cells(&self) -> &Arc<[Cell]> {
        &self.cells
    }

    #[inline]
    pub fn cell_of(&self, node: NodeId) -> Cell {
        self.cells[node.index()]
    }

    /// Node of a passable in-bounds cell.
    pub fn node_at(&self, cell: Cell) -> Option<NodeId> {
        let (x, y) = (cell.x as usize, cell.y as usize);
        if x >= self.width || y >= self.height {
            return None;
        }
        self.node_of_cell[y * self.width + x]
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }
}

/// Converts a grid to a graph according to its neighborhood.
pub fn grid_to_graph<S: Scalar>(map: &GridMap) -> GridGraph<S> {
    let (w, h) = (map.width, map.height);
    let mut node_of_cell = vec![None; w * h];
    let mut cells = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if map.passable[y * w + x] {
                node_of_cell[y * w + x] = Some(NodeId::from_index(cells.len()));
                cells.push(Cell::new(x as u32, y as u32));
            }
        }
    }
    let id = |x: i64, y: i64| node_of_cell[y as usize * w + x as usize].map(|n| n.index());
    let free = |x: i64, y: i64| map.is_passable(x, y);
    let one = S::one();
    let diag = S::SQRT_2();

    let mut edges = Vec::new();
    for c in &cells {
        let (x, y) = (i64::from(c.x), i64::from(c.y));
        let u = id(x, y).expect("passable");
        if free(x + 1, y) {
            edges.push((u, id(x + 1, y).unwrap(), one));
        }
        if free(x, y + 1) {
            edges.push((u, id(x, y + 1).unwrap(), one));
        }
        if map.neighborhood == Neighborhood::Eight {
            if free(x + 1, y + 1) && free(x + 1, y) && free(x, y + 1) {
                edges.push((u, id(x + 1, y + 1).unwrap(), diag));
            }
            if free(x - 1, y + 1) && free(x - 1, y) && free(x, y + 1) {
                edges.push((u, id(x - 1, y + 1).unwrap(), diag));
            }
        }
    }
    let graph = build_graph(cells.len(), edges).expect("grid edges are valid");
    GridGraph {
        graph,
        cells: cells.into(),
        node_of_cell,
        width: w,
        height: h,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioEntry<S> {
    pub bucket: u32,
    pub map_name: String,
    pub width: usize,
    pub height: usize,
    pub start: Cell,
    pub goal: Cell,
    pub optimal_cost: S,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario<S> {
    pub entries: Vec<ScenarioEntry<S>>,
}

impl<S: Scalar> Scenario<S> {
    /// `version 1` followed by tab-separated entries.
    pub fn to_text(&self) -> String {
        let mut out = String::from("version 1\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                e.bucket,
                e.map_name,
                e.width,
                e.height,
                e.start.x,
                e.start.y,
                e.goal.x,
                e.goal.y,
                crate::scalar::format_exact(e.optimal_cost)
            ));
        }
        out
    }
}

/// Parses a MovingAI `.scen` file. Fields are tab-separated; lines without
/// tabs fall back to whitespace splitting.
pub fn parse_scenario<S: Scalar>(text: &str) -> Result<Scenario<S>, MapError> {
    let mut entries = Vec::new();
    let mut saw_version = false;
    for (i, raw) in text.lines().enumerate() {
        let no = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let bad = |reason: String| MapError::MalformedEntry { line: no, reason };
        if !saw_version {
            let mut parts = line.split_whitespace();
            if parts.next() != Some("version") || parts.next().is_none() {
                return Err(bad("expected `version` header".into()));
            }
            saw_version = true;
            continue;
        }
        let fields: Vec<&str> = if line.contains('\t') {
            line.split('\t').map(str::trim).collect()
        } else {
            line.split_whitespace().collect()
        };
        if fields.len() != 9 {
            return Err(bad(format!("expected 9 fields, got {}", fields.len())));
        }
        fn num<T: FromStr>(s: &str, what: &str, line: usize) -> Result<T, MapError> {
            s.parse().map_err(|_| MapError::MalformedEntry {
                line,
                reason: format!("bad {what} {s:?}"),
            })
        }
        let optimal_cost: S = num(fields[8], "optimal cost", no)?;
        if !optimal_cost.is_finite() || optimal_cost < S::zero() {
            return Err(bad(format!("bad optimal cost {}", fields[8])));
        }
        entries.push(ScenarioEntry {
            bucket: num(fields[0], "bucket", no)?,
            map_name: fields[1].to_string(),
            width: num(fields[2], "width", no)?,
            height: num(fields[3], "height", no)?,
            start: Cell::new(num(fields[4], "x", no)?, num(fields[5], "y", no)?),
            goal: Cell::new(num(fields[6], "x", no)?, num(fields[7], "y", no)?),
            optimal_cost,
        });
    }
    if !saw_version {
        return Err(MapError::MalformedEntry {
            line: 1,
            reason: "missing `version` header".into(),
        });
    }
    Ok(Scenario { entries })
}

#[derive(Clone, Debug, PartialEq)]
pub enum ScenarioIssue<S> {
    SizeMismatch { index: usize },
    CellBlocked { index: usize, cell: Cell },
    Unreachable { index: usize },
    CostMismatch { index: usize, expected: S, computed: S },
}

/// Checks scenario entries against the map: dimensions, passability and the
/// recorded optimal cost (within `tolerance`, via Dijkstra).
pub fn validate_scenario<S: Scalar>(
    grid: &GridGraph<S>,
    scenario: &Scenario<S>,
    tolerance: S,
) -> Vec<ScenarioIssue<S>> {
    let mut issues = Vec::new();
    for (index, e) in scenario.entries.iter().enumerate() {
        if e.width != grid.width || e.height != grid.height {
            issues.push(ScenarioIssue::SizeMismatch { index });
            continue;
        }
        let mut nodes = [None, None];
        for (slot, cell) in nodes.iter_mut().zip([e.start, e.goal]) {
            *slot = grid.node_at(cell);
            if slot.is_none() {
                issues.push(ScenarioIssue::CellBlocked { index, cell });
            }
        }
        let [Some(s), Some(g)] = nodes else { continue };
        let r = dijkstra_baseline(&grid.graph, s, g);
        if !r.is_found() {
            issues.push(ScenarioIssue::Unreachable { index });
        } else if (r.cost - e.optimal_cost).abs() > tolerance {
            issues.push(ScenarioIssue::CostMismatch {
                index,
                expected: e.optimal_cost,
                computed: r.cost,
            });
        }
    }
    issues
}
