//! The substream index.
//!
//! `k` substreams `S_1..S_k` of the global stream plus an assignment `f`
//! such that every edge usable by a walk from `v` lies in `S_{f(v)}`.
//! Vertices without outgoing edges map to the implicit empty substream
//! `S_0`. A single-source query from `v` then only scans `S_{f(v)}`.

mod build;
pub mod format;
mod validate;

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{EdgeStream, Interval, TemporalEdge, Time, VertexId};
use crate::streaming::{
    earliest_arrival, fastest_durations, ArrivalTable, DurationTable, FastestScratch, SkipArray, StreamView,
};

pub use build::{build_greedy, build_parallel, ParallelConfig, DEFAULT_H, DEFAULT_K};
pub use validate::{validate, ValidationReport, Violation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Exact union-size greedy assignment.
    Greedy,
    /// Batch-parallel assignment ranked by sketch-estimated Jaccard distance.
    Sketch,
}

/// Build parameters recorded in the index and its file header.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IndexParams {
    pub algorithm: Algorithm,
    pub k: usize,
    /// Sketch size; zero for greedy builds.
    pub h: usize,
    /// Permutation seed; zero for greedy builds.
    pub seed: u64,
}

/// One substream with its own edge-skipping array (local positions).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Substream {
    edges: Vec<TemporalEdge>,
    skip: SkipArray,
}

impl Substream {
    pub(crate) fn from_positions(stream: &EdgeStream, positions: &[u32]) -> Self {
        let edges: Vec<TemporalEdge> = positions.iter().map(|&p| stream.edges()[p as usize]).collect();
        let skip = SkipArray::build(&edges);
        Substream { edges, skip }
    }

    pub(crate) fn from_parts(edges: Vec<TemporalEdge>, skip: SkipArray) -> Self {
        Substream { edges, skip }
    }

    pub fn edges(&self) -> &[TemporalEdge] {
        &self.edges
    }

    pub fn skip(&self) -> &SkipArray {
        &self.skip
    }

    pub fn positions(&self) -> impl Iterator<Item = u32> + '_ {
        self.edges.iter().map(|e| e.pos)
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Distinct vertices incident to an edge of this substream.
    pub fn vertex_count(&self) -> usize {
        let mut vs: Vec<VertexId> = self.edges.iter().flat_map(|e| [e.tail, e.head]).collect();
        vs.sort_unstable();
        vs.dedup();
        vs.len()
    }

    /// Bytes this substream occupies in an index file.
    pub fn serialized_bytes(&self) -> usize {
        8 + 8 * self.edges.len() + 8 + 12 * self.skip.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QueryKind {
    EarliestArrival,
    Fastest,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QueryResult {
    Arrival(ArrivalTable),
    Duration(DurationTable),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubstreamIndex {
    stream: Arc<EdgeStream>,
    params: IndexParams,
    /// `f(v)` in `0..=k`.
    assignment: Vec<u32>,
    /// `substreams[j - 1]` is `S_j`.
    substreams: Vec<Substream>,
    /// `I_j`: vertices assigned to `S_j`.
    assigned: Vec<u32>,
}

impl SubstreamIndex {
    /// Materializes substreams from position lists and builds their skip
    /// arrays in parallel.
    pub(crate) fn assemble(
        stream: Arc<EdgeStream>,
        params: IndexParams,
        assignment: Vec<u32>,
        positions: Vec<Vec<u32>>,
    ) -> Self {
        let substreams: Vec<Substream> = positions
            .par_iter()
            .map(|p| Substream::from_positions(&stream, p))
            .collect();
        Self::from_parts(stream, params, assignment, substreams)
    }

    pub(crate) fn from_parts(
        stream: Arc<EdgeStream>,
        params: IndexParams,
        assignment: Vec<u32>,
        substreams: Vec<Substream>,
    ) -> Self {
        let mut assigned = vec![0u32; substreams.len()];
        for &j in &assignment {
            if j > 0 {
                assigned[j as usize - 1] += 1;
            }
        }
        SubstreamIndex {
            stream,
            params,
            assignment,
            substreams,
            assigned,
        }
    }

    pub fn stream(&self) -> &Arc<EdgeStream> {
        &self.stream
    }

    pub fn params(&self) -> IndexParams {
        self.params
    }

    pub fn k(&self) -> usize {
        self.substreams.len()
    }

    /// `f(v)`; zero means the empty substream.
    pub fn assignment(&self, v: VertexId) -> usize {
        self.assignment[v.index()] as usize
    }

    pub fn assignments(&self) -> &[u32] {
        &self.assignment
    }

    /// `S_1..S_k`.
    pub fn substreams(&self) -> &[Substream] {
        &self.substreams
    }

    /// `S_j` for `j` in `1..=k`.
    pub fn substream(&self, j: usize) -> Option<&Substream> {
        j.checked_sub(1).and_then(|i| self.substreams.get(i))
    }

    /// `I_1..I_k`.
    pub fn assigned_counts(&self) -> &[u32] {
        &self.assigned
    }

    /// Largest substream, in edges.
    pub fn size(&self) -> usize {
        self.substreams.iter().map(Substream::len).max().unwrap_or(0)
    }

    /// Edges stored over all substreams.
    pub fn total_edges(&self) -> usize {
        self.substreams.iter().map(Substream::len).sum()
    }

    /// `Σ_v |S_f(v)|`: edges scanned when every vertex issues one query.
    pub fn query_work(&self) -> u64 {
        self.assignment
            .iter()
            .filter(|&&j| j > 0)
            .map(|&j| self.substreams[j as usize - 1].len() as u64)
            .sum()
    }

    fn check_vertex(&self, v: VertexId) -> Result<()> {
        if v.index() >= self.stream.vertex_count() {
            return Err(Error::UnknownVertex(v.to_string()));
        }
        Ok(())
    }

    /// The substream answering queries from `v`, or `None` for `S_0`.
    pub fn route(&self, v: VertexId) -> Result<Option<(StreamView<'_>, &SkipArray)>> {
        self.check_vertex(v)?;
        Ok(self.substream(self.assignment(v)).map(|s| {
            let view = StreamView::new(s.edges(), self.stream.vertex_count(), self.stream.uniform_transition());
            (view, s.skip())
        }))
    }

    pub fn query_fastest(&self, v: VertexId, interval: Interval) -> Result<DurationTable> {
        match self.route(v)? {
            Some((view, skip)) => fastest_durations(view, v, interval, Some(skip)),
            None => Ok(DurationTable::unreachable(v, self.stream.vertex_count())),
        }
    }

    /// [`SubstreamIndex::query_fastest`] through reusable buffers; returns
    /// reached vertices other than `v` in ascending id order.
    pub fn query_fastest_reached(
        &self,
        v: VertexId,
        interval: Interval,
        scratch: &mut FastestScratch,
    ) -> Result<Vec<(VertexId, Time)>> {
        match self.route(v)? {
            Some((view, skip)) => scratch.reached(view, v, interval, Some(skip)),
            None => Ok(Vec::new()),
        }
    }

    pub fn query_earliest(&self, v: VertexId, interval: Interval) -> Result<ArrivalTable> {
        match self.route(v)? {
            Some((view, skip)) => earliest_arrival(view, v, interval, Some(skip)),
            None => {
                let empty = StreamView::new(&[], self.stream.vertex_count(), None);
                earliest_arrival(empty, v, interval, None)
            }
        }
    }

    pub fn query(&self, v: VertexId, interval: Interval, kind: QueryKind) -> Result<QueryResult> {
        Ok(match kind {
            QueryKind::EarliestArrival => QueryResult::Arrival(self.query_earliest(v, interval)?),
            QueryKind::Fastest => QueryResult::Duration(self.query_fastest(v, interval)?),
        })
    }

    #[cfg(test)]
    pub(crate) fn substreams_mut(&mut self) -> &mut Vec<Substream> {
        &mut self.substreams
    }
}

/// Runs `op` on a dedicated pool of `threads` workers; zero uses the
/// global pool.
pub(crate) fn with_threads<R: Send>(threads: usize, op: impl FnOnce() -> R + Send) -> Result<R> {
    if threads == 0 {
        return Ok(op());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::ThreadPool(e.to_string()))?;
    Ok(pool.install(op))
}
