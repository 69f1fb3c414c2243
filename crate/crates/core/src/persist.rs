//! Text formats for embeddings and pivot tables.
//!
//! Embedding (`FASTMAP-EMBED v1`):
//!
//! ```text
//! FASTMAP-EMBED v1
//! nodes <N> dims <K>
//! span <n_a> <n_b> <d_ab>        (K lines)
//! <c_1> ... <c_K>                (N lines)
//! ```
//!
//! Pivot table (`DIFFH v1`):
//!
//! ```text
//! DIFFH v1
//! nodes <N> pivots <P>
//! pivot <id>                     (P lines)
//! <d_1> ... <d_N>                (P lines, one row per pivot)
//! ```
//!
//! Reals are written with enough significant digits (17 for `f64`) to parse
//! back to the identical value. Unreachable distances are written as `inf`.

use std::io::{self, BufRead, Write};

use crate::fastmap::{DimSpan, Embedding};
use crate::graph::NodeId;
use crate::heuristics::PivotTable;
use crate::scalar::{format_exact, Scalar};

pub const EMBEDDING_MAGIC: &str = "FASTMAP-EMBED v1";
pub const PIVOTS_MAGIC: &str = "DIFFH v1";

#[derive(Debug, thiserror::Error)]
pub enum PersistError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {reason}")]
    Format { line: usize, reason: String },
}

fn write_real<S: Scalar>(out: &mut impl Write, v: S) -> io::Result<()> {
    if v.is_infinite() {
        write!(out, "inf")
    } else {
        write!(out, "{}", format_exact(v))
    }
}

fn write_row<S: Scalar>(out: &mut impl Write, row: impl IntoIterator<Item = S>) -> io::Result<()> {
    for (i, v) in row.into_iter().enumerate() {
        if i > 0 {
            write!(out, " ")?;
        }
        write_real(out, v)?;
    }
    writeln!(out)
}

pub fn write_embedding<S: Scalar>(e: &Embedding<S>, mut out: impl Write) -> io::Result<()> {
    writeln!(out, "{EMBEDDING_MAGIC}")?;
    writeln!(out, "nodes {} dims {}", e.node_count(), e.dims())?;
    for s in e.spans() {
        write!(out, "span {} {} ", s.n_a, s.n_b)?;
        write_real(&mut out, s.d_ab)?;
        writeln!(out)?;
    }
    for v in 0..e.node_count() {
        write_row(&mut out, e.coords(NodeId::from_index(v)).iter().copied())?;
    }
    out.flush()
}

pub fn write_pivots<S: Scalar>(t: &PivotTable<S>, mut out: impl Write) -> io::Result<()> {
    writeln!(out, "{PIVOTS_MAGIC}")?;
    writeln!(out, "nodes {} pivots {}", t.node_count(), t.pivot_count())?;
    for p in t.pivots() {
        writeln!(out, "pivot {p}")?;
    }
    for p in 0..t.pivot_count() {
        write_row(&mut out, t.row(p))?;
    }
    out.flush()
}

struct Lines<R> {
    inner: io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn new(r: R) -> Self {
        Lines {
            inner: r.lines(),
            line: 0,
        }
    }

    fn err(&self, reason: impl Into<String>) -> PersistError {
        PersistError::Format {
            line: self.line,
            reason: reason.into(),
        }
    }

    fn next(&mut self, what: &str) -> Result<String, PersistError> {
        self.line += 1;
        match self.inner.next() {
            Some(l) => Ok(l?.trim_end_matches('\r').to_string()),
            None => Err(self.err(format!("unexpected end of file, expected {what}"))),
        }
    }

    /// `<key1> <usize> <key2> <usize>`.
    fn counts(&mut self, k1: &str, k2: &str) -> Result<(usize, usize), PersistError> {
        let l = self.next("count line")?;
        let t: Vec<&str> = l.split_whitespace().collect();
        match t.as_slice() {
            [a, x, b, y] if *a == k1 && *b == k2 => {
                let x = x.parse().map_err(|_| self.err(format!("bad {k1} count")))?;
                let y = y.parse().map_err(|_| self.err(format!("bad {k2} count")))?;
                Ok((x, y))
            }
            _ => Err(self.err(format!("expected `{k1} <n> {k2} <n>`"))),
        }
    }

    fn reals<S: Scalar>(&mut self, expected: usize) -> Result<Vec<S>, PersistError> {
        let l = self.next("row")?;
        let row: Vec<S> = l
            .split_whitespace()
            .map(|t| parse_real(t).ok_or_else(|| self.err(format!("bad number {t:?}"))))
            .collect::<Result<_, _>>()?;
        if row.len() != expected {
            return Err(self.err(format!("expected {expected} values, got {}", row.len())));
        }
        Ok(row)
    }

    fn node(&self, t: &str, node_count: usize) -> Result<NodeId, PersistError> {
        match t.parse::<usize>() {
            Ok(v) if v < node_count => Ok(NodeId::from_index(v)),
            _ => Err(self.err(format!("bad node id {t:?}"))),
        }
    }
}

fn parse_real<S: Scalar>(t: &str) -> Option<S> {
    match t {
        "inf" => Some(S::infinity()),
        _ => t.parse().ok(),
    }
}

pub fn read_embedding<S: Scalar>(r: impl BufRead) -> Result<Embedding<S>, PersistError> {
    let mut lines = Lines::new(r);
    if lines.next("header")?.trim() != EMBEDDING_MAGIC {
        return Err(lines.err(format!("expected `{EMBEDDING_MAGIC}`")));
    }
    let (n, k) = lines.counts("nodes", "dims")?;
    let mut spans = Vec::with_capacity(k);
    for _ in 0..k {
        let l = lines.next("span line")?;
        let t: Vec<&str> = l.split_whitespace().collect();
        let [tag, a, b, d] = t.as_slice() else {
            return Err(lines.err("expected `span <n_a> <n_b> <d_ab>`"));
        };
        if *tag != "span" {
            return Err(lines.err("expected `span`"));
        }
        let d_ab = parse_real(d).ok_or_else(|| lines.err("bad span length"))?;
        spans.push(DimSpan {
            n_a: lines.node(a, n)?,
            n_b: lines.node(b, n)?,
            d_ab,
        });
    }
    let mut coords = Vec::with_capacity(n * k);
    for _ in 0..n {
        coords.extend(lines.reals::<S>(k)?);
    }
    Embedding::from_parts(n, spans, coords).map_err(|e| lines.err(e.to_string()))
}

pub fn read_pivots<S: Scalar>(r: impl BufRead) -> Result<PivotTable<S>, PersistError> {
    let mut lines = Lines::new(r);
    if lines.next("header")?.trim() != PIVOTS_MAGIC {
        return Err(lines.err(format!("expected `{PIVOTS_MAGIC}`")));
    }
    let (n, p) = lines.counts("nodes", "pivots")?;
    let mut pivots = Vec::with_capacity(p);
    for _ in 0..p {
        let l = lines.next("pivot line")?;
        let t: Vec<&str> = l.split_whitespace().collect();
        let ["pivot", id] = t.as_slice() else {
            return Err(lines.err("expected `pivot <id>`"));
        };
        pivots.push(lines.node(id, n)?);
    }
    let mut rows = Vec::with_capacity(p);
    for _ in 0..p {
        rows.push(lines.reals::<S>(n)?);
    }
    PivotTable::from_rows(n, pivots, rows).map_err(|e| lines.err(e.to_string()))
}
