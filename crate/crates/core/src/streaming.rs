//! One-pass edge stream algorithms.
//!
//! Every routine here makes a single chronological scan over a stream (or a
//! substream) and keeps per-vertex state only. Because each transition takes
//! at least one time unit, an edge can never be followed by another edge with
//! the same timestamp, so processing edges in stream order is sufficient.

use crate::error::{Error, Result};
use crate::graph::{EdgeStream, Interval, TemporalEdge, Time, VertexId, INFINITY};
use crate::sketch::{BottomHSketch, PermutationHash};

/// Edges of a stream or substream plus the size of the vertex table they
/// index into.
#[derive(Clone, Copy, Debug)]
pub struct StreamView<'a> {
    pub edges: &'a [TemporalEdge],
    pub vertex_count: usize,
    /// `Some(λ)` when all transition times are equal; enables the
    /// append-only dominance list update.
    pub uniform_transition: Option<Time>,
    /// Last outgoing position per vertex, when the view covers a whole
    /// stream. Lets reachability scans stop early.
    pub last_departure: Option<&'a [Option<u32>]>,
}

impl<'a> StreamView<'a> {
    pub fn new(edges: &'a [TemporalEdge], vertex_count: usize, uniform_transition: Option<Time>) -> Self {
        StreamView {
            edges,
            vertex_count,
            uniform_transition,
            last_departure: None,
        }
    }

    fn check_source(&self, source: VertexId) -> Result<()> {
        if source.index() >= self.vertex_count {
            return Err(Error::UnknownVertex(source.to_string()));
        }
        Ok(())
    }

    /// First position worth scanning for a query from `source`, or `None`
    /// when the source has no outgoing edge in this stream.
    fn scan_start(&self, source: VertexId, skip: Option<&SkipArray>, from: Time) -> Option<usize> {
        let skipped = match skip {
            Some(skip) => skip.first_out(source)?,
            None => 0,
        };
        let by_time = self.edges.partition_point(|e| e.time < from);
        Some(skipped.max(by_time))
    }
}

impl EdgeStream {
    pub fn view(&self) -> StreamView<'_> {
        StreamView {
            last_departure: Some(self.last_departures()),
            ..StreamView::new(self.edges(), self.vertex_count(), self.uniform_transition())
        }
    }
}

/// Position of each vertex's first outgoing edge within one (sub)stream.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SkipArray {
    /// Sorted by vertex.
    entries: Vec<(VertexId, u32)>,
}

impl SkipArray {
    /// One pass over `edges`; positions are local to the slice.
    pub fn build(edges: &[TemporalEdge]) -> Self {
        let Some(max) = edges.iter().map(|e| e.tail.0).max() else {
            return SkipArray::default();
        };
        let mut first = vec![u32::MAX; max as usize + 1];
        for (pos, e) in edges.iter().enumerate().rev() {
            first[e.tail.index()] = pos as u32;
        }
        let entries = first
            .into_iter()
            .enumerate()
            .filter(|&(_, p)| p != u32::MAX)
            .map(|(v, p)| (VertexId(v as u32), p))
            .collect();
        SkipArray { entries }
    }

    /// Rebuilds from stored entries; they must be sorted by vertex without
    /// duplicates.
    pub fn from_entries(entries: Vec<(VertexId, u32)>) -> Result<Self> {
        if entries.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::Format("skip entries not strictly sorted by vertex".into()));
        }
        Ok(SkipArray { entries })
    }

    pub fn first_out(&self, v: VertexId) -> Option<usize> {
        self.entries
            .binary_search_by_key(&v, |&(u, _)| u)
            .ok()
            .map(|i| self.entries[i].1 as usize)
    }

    pub fn entries(&self) -> &[(VertexId, u32)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Earliest arrival time per vertex; [`INFINITY`] marks unreached vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrivalTable {
    pub source: VertexId,
    pub arrival: Vec<Time>,
}

impl ArrivalTable {
    pub fn get(&self, v: VertexId) -> Option<Time> {
        match self.arrival[v.index()] {
            INFINITY => None,
            t => Some(t),
        }
    }
}

/// Minimum duration from the source per vertex; [`INFINITY`] marks
/// unreachable vertices and the source itself is at distance zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DurationTable {
    pub source: VertexId,
    pub duration: Vec<Time>,
}

impl DurationTable {
    pub(crate) fn unreachable(source: VertexId, n: usize) -> Self {
        let mut duration = vec![INFINITY; n];
        duration[source.index()] = 0;
        DurationTable { source, duration }
    }

    pub fn get(&self, v: VertexId) -> Option<Time> {
        match self.duration[v.index()] {
            INFINITY => None,
            d => Some(d),
        }
    }
}

/// One-pass earliest arrival times from `source`, departing no earlier than
/// `interval.start`.
pub fn earliest_arrival(
    view: StreamView<'_>,
    source: VertexId,
    interval: Interval,
    skip: Option<&SkipArray>,
) -> Result<ArrivalTable> {
    view.check_source(source)?;
    let mut arrival = vec![INFINITY; view.vertex_count];
    arrival[source.index()] = interval.start;
    if let Some(start) = view.scan_start(source, skip, interval.start) {
        for e in &view.edges[start..] {
            if e.time >= interval.end {
                break;
            }
            if e.time >= arrival[e.tail.index()] && e.arrival() <= interval.end {
                let a = &mut arrival[e.head.index()];
                *a = (*a).min(e.arrival());
            }
        }
    }
    Ok(ArrivalTable { source, arrival })
}

/// A `(start, arrival)` label: some walk from the source that left the source
/// at `start` reaches the vertex at `arrival`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Label {
    pub start: Time,
    pub arrival: Time,
}

/// Pareto front of labels at one vertex: strictly increasing in both start
/// and arrival, so no label dominates another.
#[derive(Clone, Debug, Default)]
pub struct DominanceList {
    labels: Vec<Label>,
}

impl DominanceList {
    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Latest start among labels that have arrived by time `t`.
    ///
    /// Queries come in non-decreasing `t` during a pass, so every usable
    /// label except the latest-starting one is dropped: it can neither serve
    /// a later lookup better nor dominate a later insertion.
    #[inline]
    pub fn latest_start_by(&mut self, t: Time) -> Option<Time> {
        let usable = self.labels.partition_point(|l| l.arrival <= t);
        if usable == 0 {
            return None;
        }
        let start = self.labels[usable - 1].start;
        if usable > 1 {
            self.labels.drain(..usable - 1);
        }
        Some(start)
    }

    /// Inserts `label` unless an existing label dominates it, removing the
    /// labels it dominates. Returns whether the label was kept.
    pub fn insert(&mut self, label: Label) -> bool {
        // First label starting at or after `label.start`: the cheapest
        // arrival among all possible dominators.
        let at = self.labels.partition_point(|l| l.start < label.start);
        if at < self.labels.len() && self.labels[at].arrival <= label.arrival {
            return false;
        }
        // Labels before `at` start earlier; those arriving no earlier are
        // dominated, as is a label with the same start arriving later.
        let from = self.labels[..at].partition_point(|l| l.arrival < label.arrival);
        let to = if at < self.labels.len() && self.labels[at].start == label.start { at + 1 } else { at };
        self.labels.splice(from..to, std::iter::once(label));
        debug_assert!(self.is_pareto());
        true
    }

    /// Insertion for streams with a uniform transition time: arrivals come
    /// in non-decreasing order, so only the tail of the list is touched.
    #[inline]
    pub fn insert_monotone(&mut self, label: Label) -> bool {
        if let Some(last) = self.labels.last() {
            debug_assert!(last.arrival <= label.arrival);
            if last.start >= label.start {
                return false;
            }
        }
        while self.labels.last().is_some_and(|l| l.arrival >= label.arrival) {
            self.labels.pop();
        }
        self.labels.push(label);
        debug_assert!(self.is_pareto());
        true
    }

    pub fn is_pareto(&self) -> bool {
        self.labels
            .windows(2)
            .all(|w| w[0].start < w[1].start && w[0].arrival < w[1].arrival)
    }
}

/// One-pass minimum durations from `source` within `interval`.
///
/// The source may depart at any admitted edge, which is modelled as the
/// implicit label `(t, t)` on every edge leaving it. Every other vertex
/// keeps a [`DominanceList`] of reachable `(start, arrival)` labels.
pub fn fastest_durations(
    view: StreamView<'_>,
    source: VertexId,
    interval: Interval,
    skip: Option<&SkipArray>,
) -> Result<DurationTable> {
    view.check_source(source)?;
    let mut table = DurationTable::unreachable(source, view.vertex_count);
    let mut lists = vec![DominanceList::default(); view.vertex_count];
    fastest_scan(view, source, interval, skip, &mut lists, &mut table.duration, &mut Vec::new());
    Ok(table)
}

/// Per-worker buffers for repeated fastest-path queries over one vertex
/// table. Only entries touched by a query are reset afterwards.
#[derive(Clone, Debug)]
pub struct FastestScratch {
    lists: Vec<DominanceList>,
    duration: Vec<Time>,
    touched: Vec<u32>,
}

impl FastestScratch {
    pub fn new(vertex_count: usize) -> Self {
        FastestScratch {
            lists: vec![DominanceList::default(); vertex_count],
            duration: vec![INFINITY; vertex_count],
            touched: Vec::new(),
        }
    }

    /// Same query as [`fastest_durations`], returning only the reached
    /// vertices other than the source, in ascending id order.
    pub fn reached(
        &mut self,
        view: StreamView<'_>,
        source: VertexId,
        interval: Interval,
        skip: Option<&SkipArray>,
    ) -> Result<Vec<(VertexId, Time)>> {
        view.check_source(source)?;
        if self.lists.len() != view.vertex_count {
            *self = FastestScratch::new(view.vertex_count);
        }
        fastest_scan(view, source, interval, skip, &mut self.lists, &mut self.duration, &mut self.touched);
        self.touched.sort_unstable();
        let out = self
            .touched
            .iter()
            .map(|&v| (VertexId(v), self.duration[v as usize]))
            .collect();
        for &v in &self.touched {
            self.lists[v as usize].labels.clear();
            self.duration[v as usize] = INFINITY;
        }
        self.touched.clear();
        Ok(out)
    }
}

/// The scan behind [`fastest_durations`]. `lists` must be empty and
/// `duration` infinite for every vertex except possibly the source; every
/// vertex whose duration becomes finite is appended to `touched`.
fn fastest_scan(
    view: StreamView<'_>,
    source: VertexId,
    interval: Interval,
    skip: Option<&SkipArray>,
    lists: &mut [DominanceList],
    duration: &mut [Time],
    touched: &mut Vec<u32>,
) {
    let Some(start) = view.scan_start(source, skip, interval.start) else {
        return;
    };
    let monotone = view.uniform_transition.is_some();
    for e in &view.edges[start..] {
        if e.time >= interval.end {
            break;
        }
        let depart = if e.tail == source {
            e.time
        } else {
            match lists[e.tail.index()].latest_start_by(e.time) {
                Some(s) => s,
                None => continue,
            }
        };
        if e.head == source || e.arrival() > interval.end {
            continue;
        }
        let label = Label {
            start: depart,
            arrival: e.arrival(),
        };
        let list = &mut lists[e.head.index()];
        let kept = if monotone {
            list.insert_monotone(label)
        } else {
            list.insert(label)
        };
        if kept {
            let d = &mut duration[e.head.index()];
            if *d == INFINITY {
                touched.push(e.head.0);
            }
            *d = (*d).min(label.arrival - label.start);
        }
    }
}

/// Collects bottom-h sketch values while computing a reachable stream.
#[derive(Debug)]
pub struct SketchAccumulator<'a> {
    pub permutation: &'a PermutationHash,
    pub sketch: BottomHSketch,
}

impl<'a> SketchAccumulator<'a> {
    pub fn new(permutation: &'a PermutationHash, h: usize) -> Self {
        SketchAccumulator {
            permutation,
            sketch: BottomHSketch::new(h, permutation.domain()),
        }
    }
}

/// ξ(source): positions of all edges usable by some temporal walk that
/// starts at `source`, in stream order.
///
/// When `sketcher` is given, every included edge's permuted position is
/// offered to its sketch during the same pass.
pub fn reachable_stream(
    view: StreamView<'_>,
    source: VertexId,
    skip: &SkipArray,
    mut sketcher: Option<&mut SketchAccumulator<'_>>,
) -> Result<Vec<u32>> {
    view.check_source(source)?;
    let mut out = Vec::new();
    let Some(start) = skip.first_out(source) else {
        return Ok(out);
    };
    // Timestamps are non-negative, so zero lets the source use every edge.
    let mut arrival = vec![INFINITY; view.vertex_count];
    arrival[source.index()] = 0;
    // Past the last departure of every reached vertex no edge can be used.
    let last_departure = |v: VertexId| match view.last_departure {
        Some(last) => last[v.index()].map_or(0, |p| p as usize),
        None => usize::MAX,
    };
    let mut horizon = last_departure(source);
    for (i, e) in view.edges.iter().enumerate().skip(start) {
        if i > horizon {
            break;
        }
        if arrival[e.tail.index()] <= e.time {
            out.push(e.pos);
            let a = &mut arrival[e.head.index()];
            if *a == INFINITY {
                horizon = horizon.max(last_departure(e.head));
            }
            *a = (*a).min(e.arrival());
            if let Some(acc) = sketcher.as_deref_mut() {
                acc.sketch.insert(acc.permutation.apply(e.pos));
            }
        }
    }
    Ok(out)
}
