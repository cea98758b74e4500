//! Slow reference algorithms used to cross-check the streaming code.
//!
//! None of these scan the edge stream in order: they work on per-vertex
//! adjacency lists (label setting, Dijkstra-style search) or enumerate
//! temporal paths outright.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::graph::{EdgeStream, Interval, TemporalEdge, Time, VertexId, INFINITY};
use crate::streaming::{ArrivalTable, DurationTable};

/// Soft cap on the vertex count accepted by the label-setting oracles.
pub const ORACLE_VERTEX_CAP: usize = 10_000;

/// Outgoing edges per vertex, each list sorted by availability time.
#[derive(Clone, Debug)]
pub struct AdjacencyView {
    out: Vec<Vec<TemporalEdge>>,
}

impl AdjacencyView {
    pub fn new(s: &EdgeStream) -> Self {
        let mut out = vec![Vec::new(); s.vertex_count()];
        for e in s.edges() {
            out[e.tail.index()].push(*e);
        }
        AdjacencyView { out }
    }

    pub fn out_edges(&self, v: VertexId) -> &[TemporalEdge] {
        &self.out[v.index()]
    }

    /// Outgoing edges of `v` departing at or after `t`.
    pub fn out_edges_from(&self, v: VertexId, t: Time) -> &[TemporalEdge] {
        let list = &self.out[v.index()];
        &list[list.partition_point(|e| e.time < t)..]
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }
}

fn check(s: &EdgeStream, source: VertexId) -> Result<()> {
    if source.index() >= s.vertex_count() {
        return Err(Error::UnknownVertex(source.to_string()));
    }
    if s.vertex_count() > ORACLE_VERTEX_CAP {
        return Err(Error::TooLarge {
            what: "label-setting oracle",
            detail: format!("{} vertices, cap is {ORACLE_VERTEX_CAP}", s.vertex_count()),
        });
    }
    Ok(())
}

/// Label-setting minimum durations.
///
/// Labels `(start, arrival)` are settled in order of arrival. A label at
/// `v` is discarded when a label with a later (or equal) start was already
/// settled there, since that one arrived no later.
pub fn oracle_fastest(s: &EdgeStream, source: VertexId, interval: Interval) -> Result<DurationTable> {
    check(s, source)?;
    let adj = AdjacencyView::new(s);
    let mut table = DurationTable::unreachable(source, s.vertex_count());
    let mut best_start: Vec<Option<Time>> = vec![None; s.vertex_count()];
    let mut heap = BinaryHeap::new();
    for e in adj.out_edges_from(source, interval.start) {
        if interval.admits(e) && e.head != source {
            heap.push(Reverse((e.arrival(), e.time, e.head)));
        }
    }
    while let Some(Reverse((arrival, start, v))) = heap.pop() {
        if best_start[v.index()].is_some_and(|b| b >= start) {
            continue;
        }
        best_start[v.index()] = Some(start);
        let d = &mut table.duration[v.index()];
        *d = (*d).min(arrival - start);
        for e in adj.out_edges_from(v, arrival) {
            if interval.admits(e) && e.head != source {
                heap.push(Reverse((e.arrival(), start, e.head)));
            }
        }
    }
    Ok(table)
}

/// Dijkstra-style earliest arrival over adjacency lists.
pub fn oracle_earliest_arrival(s: &EdgeStream, source: VertexId, interval: Interval) -> Result<ArrivalTable> {
    check(s, source)?;
    let adj = AdjacencyView::new(s);
    let mut arrival = vec![INFINITY; s.vertex_count()];
    arrival[source.index()] = interval.start;
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((interval.start, source)));
    while let Some(Reverse((t, v))) = heap.pop() {
        if t > arrival[v.index()] {
            continue;
        }
        for e in adj.out_edges_from(v, t) {
            if interval.admits(e) && e.arrival() < arrival[e.head.index()] {
                arrival[e.head.index()] = e.arrival();
                heap.push(Reverse((e.arrival(), e.head)));
            }
        }
    }
    Ok(ArrivalTable { source, arrival })
}

/// Minimum durations by enumerating temporal paths of at most `max_len`
/// edges (every path when `max_len >= n - 1`).
///
/// Accepts instances with at most 12 vertices or at most 20 edges.
pub fn oracle_enumerate_paths(
    s: &EdgeStream,
    source: VertexId,
    interval: Interval,
    max_len: usize,
) -> Result<DurationTable> {
    enumerate(s, source, interval, max_len, true)
}

struct Search<'a> {
    adj: &'a AdjacencyView,
    interval: Interval,
    max_len: usize,
    prune: bool,
    start: Time,
    best: Vec<Time>,
    /// Fully explored `(visited, arrival, length)` states per vertex for the
    /// current start.
    explored: Vec<Vec<(u64, Time, usize)>>,
}

impl Search<'_> {
    fn visit(&mut self, v: VertexId, arrival: Time, visited: u64, len: usize) {
        let b = &mut self.best[v.index()];
        *b = (*b).min(arrival - self.start);
        if len == self.max_len {
            return;
        }
        if self.prune {
            // A state that saw a subset of the vertices, no later and with
            // no less remaining length, leaves at least the same
            // continuations open.
            if self.explored[v.index()]
                .iter()
                .any(|&(mask, t, l)| mask & visited == mask && t <= arrival && l <= len)
            {
                return;
            }
        }
        let adj = self.adj;
        let mut next: Vec<(VertexId, Time)> = Vec::new();
        for e in adj.out_edges_from(v, arrival) {
            if !self.interval.admits(e) || visited & (1 << e.head.0) != 0 {
                continue;
            }
            if self.prune {
                // Per neighbour only the earliest-arriving edge matters.
                match next.iter_mut().find(|(h, _)| *h == e.head) {
                    Some(entry) => entry.1 = entry.1.min(e.arrival()),
                    None => next.push((e.head, e.arrival())),
                }
            } else {
                next.push((e.head, e.arrival()));
            }
        }
        for (head, t) in next {
            self.visit(head, t, visited | (1 << head.0), len + 1);
        }
        if self.prune {
            self.explored[v.index()].push((visited, arrival, len));
        }
    }
}

pub(crate) fn enumerate(
    s: &EdgeStream,
    source: VertexId,
    interval: Interval,
    max_len: usize,
    prune: bool,
) -> Result<DurationTable> {
    if source.index() >= s.vertex_count() {
        return Err(Error::UnknownVertex(source.to_string()));
    }
    let n = s.vertex_count();
    if (n > 12 && s.edge_count() > 20) || n > 64 {
        return Err(Error::TooLarge {
            what: "path enumeration",
            detail: format!("{n} vertices and {} edges", s.edge_count()),
        });
    }
    let adj = AdjacencyView::new(s);
    let mut search = Search {
        adj: &adj,
        interval,
        max_len,
        prune,
        start: 0,
        best: vec![INFINITY; n],
        explored: vec![Vec::new(); n],
    };
    for first in adj.out_edges(source) {
        if max_len == 0 || !interval.admits(first) || first.head == source {
            continue;
        }
        search.start = first.time;
        search.explored.iter_mut().for_each(Vec::clear);
        let visited = (1u64 << source.0) | (1u64 << first.head.0);
        search.visit(first.head, first.arrival(), visited, 1);
    }
    let mut duration = search.best;
    duration[source.index()] = 0;
    Ok(DurationTable { source, duration })
}

/// ξ(source) straight from its definition: an edge is usable iff it leaves
/// the source, or it leaves the head of a usable edge no earlier than that
/// edge arrives. Iterated to a fixpoint; quadratic per round.
pub fn oracle_reachable_edges(s: &EdgeStream, source: VertexId) -> Result<Vec<u32>> {
    if source.index() >= s.vertex_count() {
        return Err(Error::UnknownVertex(source.to_string()));
    }
    let edges = s.edges();
    let mut usable: Vec<bool> = edges.iter().map(|e| e.tail == source).collect();
    loop {
        let mut changed = false;
        for (i, e) in edges.iter().enumerate() {
            if usable[i] {
                continue;
            }
            let feeds = edges
                .iter()
                .enumerate()
                .any(|(j, f)| usable[j] && f.head == e.tail && f.arrival() <= e.time);
            if feeds {
                usable[i] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ok(edges
        .iter()
        .zip(usable)
        .filter_map(|(e, u)| u.then_some(e.pos))
        .collect())
}
