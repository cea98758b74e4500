//! Index construction: exact greedy and the batch-parallel sketch variant.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::sync::Arc;

use rayon::prelude::*;

use super::{with_threads, Algorithm, IndexParams, SubstreamIndex};
use crate::error::{Error, Result};
use crate::graph::{union_positions, union_size, EdgeStream, VertexId};
use crate::sketch::{jaccard_estimate, BottomHSketch, PermutationHash};
use crate::streaming::{reachable_stream, SketchAccumulator, SkipArray};

pub const DEFAULT_K: usize = 256;
pub const DEFAULT_H: usize = 8;

/// Graphs with at least this many vertices are processed in batches of
/// [`LARGE_GRAPH_BATCH`] by default; smaller graphs in a single batch.
const LARGE_GRAPH_VERTICES: usize = 1_000_000;
const LARGE_GRAPH_BATCH: usize = 2048;

fn check_k(k: usize, n: usize) -> Result<()> {
    if k < 2 || k >= n {
        return Err(Error::InvalidParameter(format!(
            "number of substreams must satisfy 2 <= k < n, got k={k} with n={n}"
        )));
    }
    if k > u32::MAX as usize {
        return Err(Error::InvalidParameter(format!("k={k} exceeds 32 bits")));
    }
    Ok(())
}

/// Processes vertices in id order and adds each ξ(v) to the substream whose
/// size grows least (smallest id on ties).
pub fn build_greedy(stream: Arc<EdgeStream>, k: usize) -> Result<SubstreamIndex> {
    let n = stream.vertex_count();
    check_k(k, n)?;
    let view = stream.view();
    let skip = SkipArray::build(stream.edges());
    let mut substreams: Vec<Vec<u32>> = vec![Vec::new(); k];
    let mut assignment = vec![0u32; n];
    for v in stream.vertices() {
        let xi = reachable_stream(view, v, &skip, None)?;
        if xi.is_empty() {
            continue;
        }
        let j = (0..k)
            .min_by_key(|&j| union_size(&substreams[j], &xi))
            .expect("k >= 2");
        substreams[j] = union_positions(&substreams[j], &xi);
        assignment[v.index()] = j as u32 + 1;
    }
    let params = IndexParams {
        algorithm: Algorithm::Greedy,
        k,
        h: 0,
        seed: 0,
    };
    Ok(SubstreamIndex::assemble(stream, params, assignment, substreams))
}

/// Parameters of [`build_parallel`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParallelConfig {
    pub k: usize,
    pub h: usize,
    /// Vertices per batch; zero picks `n` for graphs below one million
    /// vertices and 2048 otherwise.
    pub batch_size: usize,
    pub seed: u64,
    /// Worker threads; zero uses the global pool.
    pub threads: usize,
}

impl ParallelConfig {
    pub fn new(k: usize) -> Self {
        ParallelConfig {
            k,
            h: DEFAULT_H,
            batch_size: 0,
            seed: 0,
            threads: 0,
        }
    }

    pub fn effective_batch(&self, n: usize) -> usize {
        match self.batch_size {
            0 if n < LARGE_GRAPH_VERTICES => n.max(1),
            0 => LARGE_GRAPH_BATCH,
            b => b,
        }
    }
}

impl Default for ParallelConfig {
    fn default() -> Self {
        Self::new(DEFAULT_K)
    }
}

/// `r(v, j) = ½ (I_j + 1)(Ĵ(s(S_j), s(ξ(v))) + 1)`.
pub(crate) fn rank(assigned: u32, distance: f64) -> f64 {
    0.5 * (f64::from(assigned) + 1.0) * (distance + 1.0)
}

/// Batch-parallel construction.
///
/// Per batch: compute ξ(v) and its bottom-h sketch for every batch vertex
/// in parallel; assign vertices one after another to the substream with the
/// smallest rank; then extend every substream with the streams assigned to
/// it in parallel. The result does not depend on the number of threads.
pub fn build_parallel(stream: Arc<EdgeStream>, cfg: &ParallelConfig) -> Result<SubstreamIndex> {
    let n = stream.vertex_count();
    let m = stream.edge_count();
    check_k(cfg.k, n)?;
    if cfg.h == 0 {
        return Err(Error::InvalidParameter("sketch size h must be at least 1".into()));
    }
    let k = cfg.k;
    let h = cfg.h;
    let batch = cfg.effective_batch(n);
    let permutation = PermutationHash::new(cfg.seed, m)?;

    with_threads(cfg.threads, || -> Result<SubstreamIndex> {
        let view = stream.view();
        let skip = SkipArray::build(stream.edges());
        let mut substreams: Vec<Vec<u32>> = vec![Vec::new(); k];
        let mut sketches = vec![BottomHSketch::new(h, permutation.domain()); k];
        let mut assigned = vec![0u32; k];
        let mut assignment = vec![0u32; n];

        for first in (0..n).step_by(batch) {
            let last = (first + batch).min(n);

            let reached: Vec<(Vec<u32>, BottomHSketch)> = (first..last)
                .into_par_iter()
                .map(|v| {
                    let mut acc = SketchAccumulator::new(&permutation, h);
                    let xi = reachable_stream(view, VertexId(v as u32), &skip, Some(&mut acc))?;
                    Ok((xi, acc.sketch))
                })
                .collect::<Result<_>>()?;

            let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
            for (offset, (xi, sketch)) in reached.iter().enumerate() {
                if xi.is_empty() {
                    continue;
                }
                let mut best = (f64::INFINITY, 0);
                for j in 0..k {
                    let r = rank(assigned[j], jaccard_estimate(&sketches[j], sketch)?);
                    if r < best.0 {
                        best = (r, j);
                    }
                }
                let j = best.1;
                sketches[j] = sketches[j].union(sketch)?;
                assigned[j] += 1;
                assignment[first + offset] = j as u32 + 1;
                members[j].push(offset);
            }

            substreams
                .par_iter_mut()
                .zip(members.par_iter())
                .filter(|(_, ms)| !ms.is_empty())
                .for_each(|(sub, ms)| {
                    let mut lists: Vec<&[u32]> = Vec::with_capacity(ms.len() + 1);
                    lists.push(sub);
                    lists.extend(ms.iter().map(|&i| reached[i].0.as_slice()));
                    *sub = merge_sorted(&lists, m);
                });
        }

        let params = IndexParams {
            algorithm: Algorithm::Sketch,
            k,
            h,
            seed: cfg.seed,
        };
        Ok(SubstreamIndex::assemble(stream.clone(), params, assignment, substreams))
    })?
}

/// Multi-way merge of sorted position lists below `domain`, dropping
/// duplicates. Dense inputs go through a bitmap, sparse ones through a heap.
pub(crate) fn merge_sorted(lists: &[&[u32]], domain: usize) -> Vec<u32> {
    let total: usize = lists.iter().map(|l| l.len()).sum();
    if total >= domain / 32 {
        let mut bits = vec![0u64; domain.div_ceil(64)];
        for &p in lists.iter().copied().flatten() {
            bits[p as usize / 64] |= 1 << (p % 64);
        }
        let mut out = Vec::with_capacity(total.min(domain));
        for (w, &word) in bits.iter().enumerate() {
            let mut word = word;
            while word != 0 {
                out.push((w * 64) as u32 + word.trailing_zeros());
                word &= word - 1;
            }
        }
        return out;
    }
    let mut out = Vec::with_capacity(total);
    let mut heap: BinaryHeap<Reverse<(u32, usize, usize)>> = lists
        .iter()
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| Reverse((l[0], i, 0)))
        .collect();
    while let Some(Reverse((value, list, at))) = heap.pop() {
        if out.last() != Some(&value) {
            out.push(value);
        }
        if let Some(&next) = lists[list].get(at + 1) {
            heap.push(Reverse((next, list, at + 1)));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{random_stream, RandomStreamConfig};
    use crate::graph::tests::small_example;
    use crate::graph::{parse_edge_list, ParseOptions};
    use crate::index::validate;
    use proptest::prelude::*;

    #[test]
    fn k_out_of_range() {
        let s = Arc::new(small_example());
        assert!(build_greedy(s.clone(), 1).is_err());
        assert!(build_greedy(s.clone(), 6).is_err());
        assert!(build_parallel(s.clone(), &ParallelConfig::new(1)).is_err());
        let two = Arc::new(parse_edge_list("x y 1", ParseOptions::default()).unwrap());
        assert!(build_greedy(two, 2).is_err());
        let mut cfg = ParallelConfig::new(2);
        cfg.h = 0;
        assert!(build_parallel(s, &cfg).is_err());
    }

    #[test]
    fn small_example_greedy_groups() {
        let s = Arc::new(small_example());
        let ix = build_greedy(s.clone(), 2).unwrap();
        assert!(validate(&ix).is_clean());
        // Vertex order a c b e d f with |ξ| = 5 3 1 3 3 2. a opens S_1, c
        // prefers the empty S_2, b and e follow c, d ties at 7 and takes S_1.
        let f = |l: &str| ix.assignment(s.vertex(l).unwrap());
        let got: Vec<usize> = ["a", "c", "b", "e", "d", "f"].iter().map(|l| f(l)).collect();
        assert_eq!(got, vec![1, 2, 2, 2, 1, 2]);
        let s1: Vec<u32> = ix.substream(1).unwrap().positions().collect();
        let s2: Vec<u32> = ix.substream(2).unwrap().positions().collect();
        assert_eq!(s1, vec![0, 1, 2, 4, 5, 7, 8]);
        assert_eq!(s2, vec![3, 4, 5, 6, 7, 8]);
        assert_eq!(ix.size(), 7);
        assert_eq!(ix.assigned_counts(), &[2, 4]);
    }

    #[test]
    fn disjoint_stars_each_get_a_substream() {
        // Three stars active at different times; sizes 3, 2, 4.
        let text = "a a1 1\na a2 2\na a3 3\nb b1 5\nb b2 6\nc c1 8\nc c2 9\nc c3 10\nc c4 11\n";
        let s = Arc::new(parse_edge_list(text, ParseOptions::default()).unwrap());
        let ix = build_greedy(s.clone(), 3).unwrap();
        // Brute force over all 3^3 assignments of the star centres: the best
        // achievable size is the largest star.
        let stars = [3usize, 2, 4];
        let mut best = usize::MAX;
        for code in 0..27usize {
            let mut loads = [0usize; 3];
            let mut c = code;
            for &w in &stars {
                loads[c % 3] += w;
                c /= 3;
            }
            best = best.min(*loads.iter().max().unwrap());
        }
        assert_eq!(best, 4);
        assert_eq!(ix.size(), best);
        let centres: Vec<usize> = ["a", "b", "c"].iter().map(|l| ix.assignment(s.vertex(l).unwrap())).collect();
        assert_eq!(centres, vec![1, 2, 3]);
    }

    #[test]
    fn parallel_small_example_is_valid() {
        let s = Arc::new(small_example());
        for seed in 0..20 {
            let cfg = ParallelConfig {
                k: 2,
                h: 8,
                batch_size: 0,
                seed,
                threads: 1,
            };
            let ix = build_parallel(s.clone(), &cfg).unwrap();
            let report = validate(&ix);
            assert!(report.is_clean(), "seed {seed}: {:?}", report.violations);
        }
    }

    #[test]
    fn thread_count_does_not_change_result() {
        let s = Arc::new(
            random_stream(&RandomStreamConfig {
                vertices: 60,
                edges: 600,
                max_time: 200,
                max_transition: 5,
                seed: 9,
            })
            .unwrap(),
        );
        let mut cfg = ParallelConfig::new(8);
        cfg.seed = 5;
        cfg.batch_size = 7;
        let reference = build_parallel(s.clone(), &cfg).unwrap();
        for threads in [2, 8] {
            cfg.threads = threads;
            assert_eq!(build_parallel(s.clone(), &cfg).unwrap(), reference);
        }
    }

    #[test]
    fn batch_sizes_both_valid() {
        let s = Arc::new(
            random_stream(&RandomStreamConfig {
                vertices: 50,
                edges: 400,
                max_time: 150,
                max_transition: 3,
                seed: 4,
            })
            .unwrap(),
        );
        for batch in [1, 50] {
            let cfg = ParallelConfig {
                k: 4,
                h: 8,
                batch_size: batch,
                seed: 11,
                threads: 0,
            };
            assert!(validate(&build_parallel(s.clone(), &cfg).unwrap()).is_clean());
        }
    }

    #[test]
    fn rank_values() {
        assert_eq!(rank(0, 1.0), 1.0);
        assert_eq!(rank(3, 0.0), 2.0);
        assert_eq!(rank(1, 0.5), 1.5);
    }

    proptest! {
        #[test]
        fn merge_matches_sort_dedup(
            lists in proptest::collection::vec(proptest::collection::btree_set(0u32..300, 0..40), 0..6),
            domain in prop_oneof![Just(300usize), Just(100_000usize)],
        ) {
            let owned: Vec<Vec<u32>> = lists.iter().map(|s| s.iter().copied().collect()).collect();
            let refs: Vec<&[u32]> = owned.iter().map(Vec::as_slice).collect();
            let mut expect: Vec<u32> = owned.iter().flatten().copied().collect();
            expect.sort_unstable();
            expect.dedup();
            prop_assert_eq!(merge_sorted(&refs, domain), expect);
        }
    }
}
