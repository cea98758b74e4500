//! Substream index for single-source temporal path queries on edge streams.
//!
//! A temporal graph is a list of edges `(u, v, t, λ)` sorted by availability
//! time `t`. The index splits the stream into `k` substreams so that every
//! query from a vertex only scans the substream it is assigned to.

pub mod closeness;
pub mod error;
pub mod generate;
pub mod graph;
pub mod index;
pub mod oracle;
pub mod sketch;
pub mod streaming;

pub use closeness::{closeness_baseline, closeness_oracle, closeness_via_index, ClosenessRanking, RankedVertex};
pub use error::{Error, Result};
pub use graph::{
    parse_edge_list, read_edge_list, stream_stats, EdgeStream, Interval, ParseOptions, StreamStats, TemporalEdge,
    Time, VertexId, INFINITY,
};
pub use index::{
    build_greedy, build_parallel, validate, Algorithm, IndexParams, ParallelConfig, QueryKind, QueryResult,
    Substream, SubstreamIndex, ValidationReport, Violation,
};
pub use sketch::{jaccard_estimate, BottomHSketch, PermutationHash};
pub use streaming::{
    earliest_arrival, fastest_durations, reachable_stream, ArrivalTable, DurationTable, FastestScratch, SkipArray,
};
