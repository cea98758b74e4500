//! Invariant checks for a built index.

use rayon::prelude::*;

use super::{Algorithm, SubstreamIndex};
use crate::graph::{union_positions, VertexId};
use crate::streaming::{reachable_stream, SkipArray};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// An edge of ξ(v) is missing from `S_f(v)`.
    NotContained { vertex: VertexId, substream: usize, missing: u32 },
    /// `f(v) ≠ 0` although ξ(v) is empty.
    SinkAssigned { vertex: VertexId, substream: usize },
    /// `f(v) = 0` although ξ(v) is not empty.
    Unassigned { vertex: VertexId },
    OutOfRange { vertex: VertexId, substream: usize },
    /// More than `2·size` distinct vertices occur in one substream.
    VertexBound { substream: usize, vertices: usize, size: usize },
    GreedyBound { size: usize, bound: usize },
    BelowLowerBound { size: usize, bound: usize },
    CountMismatch { substream: usize, stored: u32, actual: u32 },
    SkipArray { substream: usize },
    Unsorted { substream: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub size: usize,
    pub substream_sizes: Vec<usize>,
    pub assigned_counts: Vec<u32>,
    /// `n⁺`: vertices with a non-empty reachable stream.
    pub non_sink: usize,
    /// Sum of the `⌈n⁺/k⌉` largest |ξ(v)|.
    pub greedy_bound: usize,
    /// `⌈|⋃ ξ(v)| / k⌉`.
    pub lower_bound: usize,
    /// Largest number of distinct vertices occurring in one substream.
    pub vertices: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn greedy_bound_holds(&self) -> bool {
        self.size <= self.greedy_bound
    }
}

/// Recomputes every ξ(v) on the full stream and checks the index against it.
///
/// The greedy size bound is a violation only for greedy builds; for sketch
/// builds it is reported through [`ValidationReport::greedy_bound_holds`].
pub fn validate(ix: &SubstreamIndex) -> ValidationReport {
    let stream = ix.stream();
    let view = stream.view();
    let skip = SkipArray::build(stream.edges());
    let k = ix.k();
    let mut violations = Vec::new();

    let per_vertex: Vec<(Vec<u32>, Vec<Violation>)> = stream
        .vertices()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|v| {
            let xi = reachable_stream(view, v, &skip, None).expect("vertex from stream");
            let mut found = Vec::new();
            let j = ix.assignment(v);
            if j > k {
                found.push(Violation::OutOfRange { vertex: v, substream: j });
            } else if j == 0 {
                if !xi.is_empty() {
                    found.push(Violation::Unassigned { vertex: v });
                }
            } else if xi.is_empty() {
                found.push(Violation::SinkAssigned { vertex: v, substream: j });
            } else {
                let sub = &ix.substreams()[j - 1];
                let mut it = sub.positions().peekable();
                for &p in &xi {
                    while it.next_if(|&q| q < p).is_some() {}
                    if it.peek() != Some(&p) {
                        found.push(Violation::NotContained { vertex: v, substream: j, missing: p });
                        break;
                    }
                }
            }
            (xi, found)
        })
        .collect();

    let mut sizes: Vec<usize> = per_vertex.iter().map(|(xi, _)| xi.len()).filter(|&l| l > 0).collect();
    let mut everything: Vec<u32> = Vec::new();
    for (xi, found) in &per_vertex {
        violations.extend(found.iter().cloned());
        if !xi.is_empty() {
            everything = union_positions(&everything, xi);
        }
    }

    for (i, sub) in ix.substreams().iter().enumerate() {
        let j = i + 1;
        if sub.edges().windows(2).any(|w| w[0].pos >= w[1].pos) {
            violations.push(Violation::Unsorted { substream: j });
        }
        if *sub.skip() != SkipArray::build(sub.edges()) {
            violations.push(Violation::SkipArray { substream: j });
        }
    }

    let mut actual = vec![0u32; k];
    for &j in ix.assignments() {
        if j > 0 && (j as usize) <= k {
            actual[j as usize - 1] += 1;
        }
    }
    for (i, (&stored, &actual)) in ix.assigned_counts().iter().zip(&actual).enumerate() {
        if stored != actual {
            violations.push(Violation::CountMismatch { substream: i + 1, stored, actual });
        }
    }

    let size = ix.size();
    let mut vertices = 0;
    for (i, sub) in ix.substreams().iter().enumerate() {
        let count = sub.vertex_count();
        vertices = vertices.max(count);
        if count > 2 * size {
            violations.push(Violation::VertexBound { substream: i + 1, vertices: count, size });
        }
    }

    let non_sink = sizes.len();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    let greedy_bound = sizes.iter().take(non_sink.div_ceil(k.max(1))).sum();
    if ix.params().algorithm == Algorithm::Greedy && size > greedy_bound {
        violations.push(Violation::GreedyBound { size, bound: greedy_bound });
    }
    let lower_bound = everything.len().div_ceil(k.max(1));
    if size < lower_bound {
        violations.push(Violation::BelowLowerBound { size, bound: lower_bound });
    }

    ValidationReport {
        size,
        substream_sizes: ix.substreams().iter().map(|s| s.len()).collect(),
        assigned_counts: ix.assigned_counts().to_vec(),
        non_sink,
        greedy_bound,
        lower_bound,
        vertices,
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{random_stream, RandomStreamConfig};
    use crate::graph::tests::small_example;
    use crate::index::{build_greedy, build_parallel, ParallelConfig, Substream};
    use std::sync::Arc;

    #[test]
    fn small_example_report() {
        let s = Arc::new(small_example());
        let r = validate(&build_greedy(s, 2).unwrap());
        assert!(r.is_clean(), "{:?}", r.violations);
        assert_eq!(r.non_sink, 6);
        // Three largest of 5 3 3 3 2 1.
        assert_eq!(r.greedy_bound, 11);
        assert_eq!(r.lower_bound, 5);
        assert_eq!(r.substream_sizes, vec![7, 6]);
        assert!(r.vertices <= 2 * r.size);
    }

    #[test]
    fn dropped_edge_is_reported() {
        let s = Arc::new(small_example());
        let mut ix = build_greedy(s.clone(), 2).unwrap();
        let a = s.vertex("a").unwrap();
        let j = ix.assignment(a);
        let sub = &mut ix.substreams_mut()[j - 1];
        // Position 8 is (c, e, 9), reached from a.
        let edges: Vec<_> = sub.edges().iter().copied().filter(|e| e.pos != 8).collect();
        *sub = Substream::from_parts(edges.clone(), SkipArray::build(&edges));
        let r = validate(&ix);
        assert!(r
            .violations
            .contains(&Violation::NotContained { vertex: a, substream: j, missing: 8 }));
    }

    #[test]
    fn stale_skip_array_is_reported() {
        let s = Arc::new(small_example());
        let mut ix = build_greedy(s, 2).unwrap();
        let sub = &mut ix.substreams_mut()[0];
        *sub = Substream::from_parts(sub.edges().to_vec(), SkipArray::default());
        assert!(validate(&ix).violations.contains(&Violation::SkipArray { substream: 1 }));
    }

    #[test]
    fn random_graphs_meet_bounds() {
        for seed in 0..15 {
            let s = Arc::new(
                random_stream(&RandomStreamConfig {
                    vertices: 40,
                    edges: 300,
                    max_time: 100,
                    max_transition: 4,
                    seed,
                })
                .unwrap(),
            );
            for k in [2, 4, 8] {
                let r = validate(&build_greedy(s.clone(), k).unwrap());
                assert!(r.is_clean(), "seed {seed} k {k}: {:?}", r.violations);
                let mut cfg = ParallelConfig::new(k);
                cfg.seed = seed;
                let r = validate(&build_parallel(s.clone(), &cfg).unwrap());
                assert!(r.is_clean(), "seed {seed} k {k}: {:?}", r.violations);
            }
        }
    }
}
