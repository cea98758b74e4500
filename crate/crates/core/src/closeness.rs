//! Harmonic temporal closeness for every vertex.

use rayon::prelude::*;

use crate::error::Result;
use crate::graph::{EdgeStream, Interval, Time, VertexId, INFINITY};
use crate::index::{with_threads, SubstreamIndex};
use crate::oracle::oracle_fastest;
use crate::streaming::{DurationTable, FastestScratch};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankedVertex {
    pub vertex: VertexId,
    pub closeness: f64,
}

/// Vertices by closeness, highest first; ties by ascending id.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosenessRanking {
    entries: Vec<RankedVertex>,
}

impl ClosenessRanking {
    pub fn from_values(values: Vec<f64>) -> Self {
        let mut entries: Vec<RankedVertex> = values
            .into_iter()
            .enumerate()
            .map(|(i, c)| RankedVertex {
                vertex: VertexId(i as u32),
                closeness: c,
            })
            .collect();
        entries.sort_by(|a, b| b.closeness.total_cmp(&a.closeness).then(a.vertex.cmp(&b.vertex)));
        ClosenessRanking { entries }
    }

    pub fn entries(&self) -> &[RankedVertex] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn closeness(&self, v: VertexId) -> Option<f64> {
        self.entries.iter().find(|e| e.vertex == v).map(|e| e.closeness)
    }

    /// Same order and every value within `tolerance` relative error.
    pub fn agrees_with(&self, other: &ClosenessRanking, tolerance: f64) -> bool {
        self.entries.len() == other.entries.len()
            && self.entries.iter().zip(&other.entries).all(|(a, b)| {
                a.vertex == b.vertex
                    && (a.closeness - b.closeness).abs() <= tolerance * a.closeness.abs().max(b.closeness.abs())
            })
    }
}

/// `c(v) = Σ_{w≠v} 1/d(v, w)`, summed in ascending `w`.
pub fn harmonic_closeness(table: &DurationTable) -> f64 {
    harmonic_sum(
        table
            .duration
            .iter()
            .enumerate()
            .filter(|&(w, &d)| w != table.source.index() && d != INFINITY)
            .map(|(_, &d)| d),
    )
}

/// Sum of reciprocals of finite durations, in the order given.
fn harmonic_sum(durations: impl Iterator<Item = Time>) -> f64 {
    durations.filter(|&d| d > 0).map(|d| 1.0 / d as f64).sum()
}

fn rank_all(
    n: usize,
    threads: usize,
    query: impl Fn(VertexId, &mut FastestScratch) -> Result<Vec<(VertexId, Time)>> + Sync + Send,
) -> Result<ClosenessRanking> {
    let values = with_threads(threads, || {
        (0..n as u32)
            .into_par_iter()
            .map_init(
                || FastestScratch::new(n),
                |scratch, v| query(VertexId(v), scratch).map(|r| harmonic_sum(r.into_iter().map(|(_, d)| d))),
            )
            .collect::<Result<Vec<f64>>>()
    })??;
    Ok(ClosenessRanking::from_values(values))
}

/// One fastest-path query per vertex, each over its own substream.
pub fn closeness_via_index(ix: &SubstreamIndex, interval: Interval, threads: usize) -> Result<ClosenessRanking> {
    rank_all(ix.stream().vertex_count(), threads, |v, scratch| {
        ix.query_fastest_reached(v, interval, scratch)
    })
}

/// One fastest-path query per vertex, each over the whole stream.
pub fn closeness_baseline(s: &EdgeStream, interval: Interval, threads: usize) -> Result<ClosenessRanking> {
    let view = s.view();
    rank_all(s.vertex_count(), threads, |v, scratch| scratch.reached(view, v, interval, None))
}

/// Label-setting reference.
pub fn closeness_oracle(s: &EdgeStream, interval: Interval, threads: usize) -> Result<ClosenessRanking> {
    let values = with_threads(threads, || {
        s.vertices()
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|v| oracle_fastest(s, v, interval).map(|t| harmonic_closeness(&t)))
            .collect::<Result<Vec<f64>>>()
    })??;
    Ok(ClosenessRanking::from_values(values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::small_example;
    use crate::graph::{parse_edge_list, ParseOptions};
    use crate::index::build_greedy;
    use std::sync::Arc;

    #[test]
    fn small_example_value_of_a() {
        let s = Arc::new(small_example());
        let ix = build_greedy(s.clone(), 2).unwrap();
        let r = closeness_via_index(&ix, s.lifetime(), 1).unwrap();
        let a = s.vertex("a").unwrap();
        let expect = 1.0 + 1.0 + 0.5 + 1.0 / 7.0;
        assert!((r.closeness(a).unwrap() - expect).abs() < 1e-12);
        assert_eq!(r.entries()[0].vertex, a);
        let base = closeness_baseline(&s, s.lifetime(), 2).unwrap();
        assert_eq!(r, base);
        assert_eq!(closeness_oracle(&s, s.lifetime(), 0).unwrap(), base);
    }

    #[test]
    fn single_edge() {
        let s = parse_edge_list("x y 5 2", ParseOptions::default()).unwrap();
        let r = closeness_baseline(&s, s.lifetime(), 0).unwrap();
        assert_eq!(r.closeness(s.vertex("x").unwrap()), Some(0.5));
        assert_eq!(r.closeness(s.vertex("y").unwrap()), Some(0.0));
    }

    #[test]
    fn point_interval_gives_zero() {
        let s = small_example();
        let r = closeness_baseline(&s, Interval::new(3, 3).unwrap(), 0).unwrap();
        assert!(r.entries().iter().all(|e| e.closeness == 0.0));
        // All tied, so ids ascend.
        let ids: Vec<u32> = r.entries().iter().map(|e| e.vertex.0).collect();
        assert_eq!(ids, (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn agreement_tolerance() {
        let a = ClosenessRanking::from_values(vec![1.0, 2.0]);
        let b = ClosenessRanking::from_values(vec![1.0 + 1e-14, 2.0]);
        let c = ClosenessRanking::from_values(vec![2.5, 2.0]);
        assert!(a.agrees_with(&b, 1e-12));
        assert!(!a.agrees_with(&c, 1e-12));
    }
}
