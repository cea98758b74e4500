//! Temporal edge streams.
//!
//! A temporal edge `(u, v, t, λ)` leaves `u` at availability time `t` and
//! reaches `v` at `t + λ`. An [`EdgeStream`] stores all edges of a graph
//! sorted by availability time; the position of an edge in that order is its
//! identifier throughout the crate (substreams, sketches, index files).

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::streaming::{reachable_stream, SkipArray};

/// Time unit used for availability and transition times.
pub type Time = u64;

/// Sentinel for "never reached" / infinite distance.
pub const INFINITY: Time = Time::MAX;

/// Dense vertex identifier, an index into the stream's label table.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<u32> for VertexId {
    fn from(v: u32) -> Self {
        VertexId(v)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One directed temporal edge together with its position in the global stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TemporalEdge {
    pub tail: VertexId,
    pub head: VertexId,
    pub time: Time,
    pub transition: Time,
    /// 0-based position in the sorted global stream.
    pub pos: u32,
}

impl TemporalEdge {
    #[inline]
    pub fn arrival(&self) -> Time {
        self.time + self.transition
    }
}

/// Closed time window `[start, end]`.
///
/// An edge participates iff it departs and arrives inside the window, i.e.
/// `start <= t` and `t + λ <= end`. Since every transition is at least one
/// time unit, this is the same as `start <= t < end` and `start < t + λ <= end`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub start: Time,
    pub end: Time,
}

impl Interval {
    pub fn new(start: Time, end: Time) -> Result<Self> {
        if start > end {
            return Err(Error::InvalidInterval { start, end });
        }
        Ok(Interval { start, end })
    }

    /// The window that admits every edge.
    pub const fn unbounded() -> Self {
        Interval {
            start: 0,
            end: INFINITY,
        }
    }

    #[inline]
    pub fn admits(&self, e: &TemporalEdge) -> bool {
        self.start <= e.time && e.arrival() <= self.end
    }

    /// Narrower windows admit fewer edges.
    pub fn contains(&self, other: &Interval) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}

/// Options for [`parse_edge_list`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParseOptions {
    /// Transition time used for lines that only carry three tokens.
    pub default_transition: Time,
    /// Emit a forward and a backward edge for every input line.
    pub undirected: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            default_transition: 1,
            undirected: false,
        }
    }
}

/// A chronologically sorted temporal edge stream with interned vertex labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeStream {
    edges: Vec<TemporalEdge>,
    labels: Vec<String>,
    lookup: HashMap<String, VertexId>,
    uniform_transition: Option<Time>,
    /// Position of each vertex's last outgoing edge.
    last_departure: Vec<Option<u32>>,
}

impl EdgeStream {
    /// Builds a stream from edges over dense vertex ids `0..labels.len()`.
    ///
    /// Edges are stably sorted by availability time and renumbered; every
    /// label must be used by at least one edge.
    pub fn from_edges(labels: Vec<String>, edges: Vec<(VertexId, VertexId, Time, Time)>) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::EmptyStream);
        }
        let mut sorted: Vec<(VertexId, VertexId, Time, Time)> = edges;
        sorted.sort_by_key(|e| e.2);
        let edges = sorted
            .into_iter()
            .enumerate()
            .map(|(pos, (tail, head, time, transition))| TemporalEdge {
                tail,
                head,
                time,
                transition,
                pos: pos as u32,
            })
            .collect();
        Self::from_parts(labels, edges)
    }

    /// Reassembles a stream whose edges are already in stream order with
    /// `pos` equal to their index. Used when loading index files.
    pub fn from_parts(labels: Vec<String>, edges: Vec<TemporalEdge>) -> Result<Self> {
        let n = labels.len();
        if edges.len() >= u32::MAX as usize {
            return Err(Error::TooLarge {
                what: "edge stream",
                detail: format!("{} edges exceed the 32-bit position space", edges.len()),
            });
        }
        let mut used = vec![false; n];
        for (i, e) in edges.iter().enumerate() {
            if e.pos as usize != i {
                return Err(Error::Format(format!("edge {i} carries position {}", e.pos)));
            }
            if e.tail.index() >= n || e.head.index() >= n {
                return Err(Error::Format(format!("edge {i} references a vertex outside the label table")));
            }
            if e.transition == 0 {
                return Err(Error::Format(format!("edge {i} has zero transition time")));
            }
            if e.time.checked_add(e.transition).is_none_or(|a| a == INFINITY) {
                return Err(Error::Format(format!("edge {i} arrival time overflows")));
            }
            if i > 0 && edges[i - 1].time > e.time {
                return Err(Error::Format(format!("edge {i} breaks chronological order")));
            }
            used[e.tail.index()] = true;
            used[e.head.index()] = true;
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(Error::Format(format!("vertex `{}` has no incident edge", labels[v])));
        }
        let mut lookup = HashMap::with_capacity(n);
        for (i, label) in labels.iter().enumerate() {
            if lookup.insert(label.clone(), VertexId(i as u32)).is_some() {
                return Err(Error::Format(format!("duplicate vertex label `{label}`")));
            }
        }
        let uniform_transition = match edges.first() {
            Some(first) if edges.iter().all(|e| e.transition == first.transition) => Some(first.transition),
            _ => None,
        };
        let mut last_departure = vec![None; n];
        for e in &edges {
            last_departure[e.tail.index()] = Some(e.pos);
        }
        Ok(EdgeStream {
            edges,
            labels,
            lookup,
            uniform_transition,
            last_departure,
        })
    }

    /// Position of the last edge leaving each vertex, `None` for sinks.
    pub fn last_departures(&self) -> &[Option<u32>] {
        &self.last_departure
    }

    #[inline]
    pub fn edges(&self) -> &[TemporalEdge] {
        &self.edges
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: VertexId) -> &str {
        &self.labels[v.index()]
    }

    pub fn vertex(&self, label: &str) -> Result<VertexId> {
        self.lookup
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(label.to_string()))
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.labels.len() as u32).map(VertexId)
    }

    /// `Some(λ)` when every edge has the same transition time.
    pub fn uniform_transition(&self) -> Option<Time> {
        self.uniform_transition
    }

    /// `[min t, max (t + λ)]` over all edges.
    pub fn lifetime(&self) -> Interval {
        let start = self.edges.first().map_or(0, |e| e.time);
        let end = self.edges.iter().map(TemporalEdge::arrival).max().unwrap_or(0);
        Interval { start, end }
    }

    /// Number of vertices with at least one outgoing edge.
    pub fn non_sink_count(&self) -> usize {
        let mut seen = vec![false; self.vertex_count()];
        for e in &self.edges {
            seen[e.tail.index()] = true;
        }
        seen.into_iter().filter(|&s| s).count()
    }

    /// Serializes back to the edge-list text format in stream order.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(self.edges.len() * 16);
        for e in &self.edges {
            out.push_str(&format!(
                "{} {} {} {}\n",
                self.label(e.tail),
                self.label(e.head),
                e.time,
                e.transition
            ));
        }
        out
    }
}

/// Parses a whitespace-separated edge list: `tail head time [transition]`.
///
/// Lines starting with `#` or `%` and blank lines are ignored. Labels are
/// interned in order of first appearance, and edges with equal timestamps
/// keep their input order.
pub fn parse_edge_list(input: &str, options: ParseOptions) -> Result<EdgeStream> {
    if options.default_transition == 0 {
        return Err(Error::InvalidParameter("default transition must be at least 1".into()));
    }
    let mut labels: Vec<String> = Vec::new();
    let mut ids: HashMap<String, VertexId> = HashMap::new();
    let mut intern = |label: &str| -> VertexId {
        if let Some(&id) = ids.get(label) {
            return id;
        }
        let id = VertexId(labels.len() as u32);
        labels.push(label.to_string());
        ids.insert(label.to_string(), id);
        id
    };

    let mut edges = Vec::new();
    for (idx, raw) in input.lines().enumerate() {
        let line = idx + 1;
        let text = raw.trim();
        if text.is_empty() || text.starts_with('#') || text.starts_with('%') {
            continue;
        }
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.len() != 3 && tokens.len() != 4 {
            return Err(Error::Parse {
                line,
                message: format!("expected 3 or 4 fields, found {}", tokens.len()),
            });
        }
        let time: Time = tokens[2].parse().map_err(|_| Error::Parse {
            line,
            message: format!("invalid timestamp `{}`", tokens[2]),
        })?;
        let transition = match tokens.get(3) {
            None => options.default_transition,
            Some(tok) => {
                let value: i128 = tok.parse().map_err(|_| Error::Parse {
                    line,
                    message: format!("invalid transition time `{tok}`"),
                })?;
                if value <= 0 {
                    return Err(Error::InvalidTransition { line, value });
                }
                Time::try_from(value).map_err(|_| Error::Parse {
                    line,
                    message: format!("transition time `{tok}` out of range"),
                })?
            }
        };
        if time.checked_add(transition).is_none_or(|a| a == INFINITY) {
            return Err(Error::Parse {
                line,
                message: "arrival time overflows".into(),
            });
        }
        let tail = intern(tokens[0]);
        let head = intern(tokens[1]);
        edges.push((tail, head, time, transition));
        if options.undirected {
            edges.push((head, tail, time, transition));
        }
    }
    EdgeStream::from_edges(labels, edges)
}

/// Reads and parses an edge-list file.
pub fn read_edge_list(path: impl AsRef<Path>, options: ParseOptions) -> Result<EdgeStream> {
    let text = fs::read_to_string(path)?;
    parse_edge_list(&text, options)
}

/// Union of two substreams of the same global stream given as sorted
/// position lists. Linear merge; duplicates collapse.
pub fn union_positions(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// `|a ∪ b|` for sorted position lists without materializing the union.
pub fn union_size(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut shared) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                shared += 1;
                i += 1;
                j += 1;
            }
        }
    }
    a.len() + b.len() - shared
}

/// Union of two substreams of the same global stream, ordered by stream position.
pub fn union_streams(a: &[TemporalEdge], b: &[TemporalEdge]) -> Vec<TemporalEdge> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].pos.cmp(&b[j].pos) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Dataset statistics in the shape of the usual temporal-graph summary table.
#[derive(Clone, Debug, PartialEq)]
pub struct StreamStats {
    pub vertices: usize,
    pub edges: usize,
    /// Distinct availability timestamps.
    pub timestamps: usize,
    pub avg_reachable: f64,
    pub max_reachable: usize,
}

/// Computes [`StreamStats`]; `|ξ(v)|` is evaluated for every vertex.
pub fn stream_stats(s: &EdgeStream) -> StreamStats {
    let timestamps = s.edges().iter().map(|e| e.time).collect::<HashSet<_>>().len();
    let skip = SkipArray::build(s.edges());
    let view = s.view();
    let sizes: Vec<usize> = (0..s.vertex_count() as u32)
        .into_par_iter()
        .map(|v| {
            reachable_stream(view, VertexId(v), &skip, None)
                .map(|xi| xi.len())
                .unwrap_or(0)
        })
        .collect();
    let total: usize = sizes.iter().sum();
    StreamStats {
        vertices: s.vertex_count(),
        edges: s.edge_count(),
        timestamps,
        avg_reachable: if sizes.is_empty() {
            0.0
        } else {
            total as f64 / sizes.len() as f64
        },
        max_reachable: sizes.into_iter().max().unwrap_or(0),
    }
}
