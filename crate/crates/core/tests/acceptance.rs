//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use substream_index::generate::{community_stream, random_stream, CommunityStreamConfig, RandomStreamConfig};
use substream_index::index::format;
use substream_index::oracle::{oracle_earliest_arrival, oracle_enumerate_paths, oracle_fastest};
use substream_index::{
    build_greedy, build_parallel, closeness_baseline, closeness_oracle, closeness_via_index, earliest_arrival,
    fastest_durations, jaccard_estimate, parse_edge_list, reachable_stream, validate, BottomHSketch, EdgeStream,
    Error, Interval, ParallelConfig, ParseOptions, PermutationHash, SkipArray, SubstreamIndex, Time,
};

const SMALL_EXAMPLE: &str = "a c 3\na b 1\na b 2\nc a 2\nc e 9\nb d 3\nd f 1\ne f 6\nf c 7\n";
const CORPUS_GRAPHS: usize = 100;
const TAU_PER_GRAPH: usize = 5;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }
}

struct CorpusGraph {
    stream: Arc<EdgeStream>,
    intervals: Vec<Interval>,
}

fn random_interval(rng: &mut ChaCha8Rng, max_time: Time) -> Interval {
    let a = rng.random_range(0..=max_time);
    let b = if rng.random_bool(0.1) { a } else { rng.random_range(a..=max_time + 6) };
    Interval::new(a, b).unwrap()
}

fn corpus() -> Vec<CorpusGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    (0..CORPUS_GRAPHS)
        .map(|i| {
            // A few tiny graphs so exhaustive enumeration is exercised.
            let n = if i % 5 == 0 { rng.random_range(5..=12) } else { rng.random_range(5..=200) };
            let m = rng.random_range(n..=2000.min(n * 12));
            let max_time = rng.random_range(10..=600);
            let stream = random_stream(&RandomStreamConfig {
                vertices: n,
                edges: m,
                max_time,
                max_transition: 5,
                seed: rng.random(),
            })
            .unwrap();
            let mut intervals = vec![stream.lifetime()];
            while intervals.len() < TAU_PER_GRAPH {
                intervals.push(random_interval(&mut rng, max_time));
            }
            CorpusGraph {
                stream: Arc::new(stream),
                intervals,
            }
        })
        .collect()
}

fn small_example_golden() -> Outcome {
    let expect_a = [("a", "b", 1), ("a", "b", 2), ("a", "c", 3), ("b", "d", 3), ("c", "e", 9)];
    let expect_def = [("d", "f", 1), ("e", "f", 6), ("f", "c", 7), ("c", "e", 9)];
    let started = Instant::now();
    let s = parse_edge_list(SMALL_EXAMPLE, ParseOptions::default()).unwrap();
    let skip = SkipArray::build(s.edges());
    let xi = |l: &str| reachable_stream(s.view(), s.vertex(l).unwrap(), &skip, None).unwrap();
    let a = xi("a");
    let mut def: Vec<u32> = ["d", "e", "f"].iter().flat_map(|l| xi(l)).collect();
    def.sort_unstable();
    def.dedup();
    let elapsed = started.elapsed();
    let named = |ps: &[u32]| -> Vec<(String, String, Time)> {
        let mut v: Vec<_> = ps
            .iter()
            .map(|&p| {
                let e = s.edges()[p as usize];
                (s.label(e.tail).to_string(), s.label(e.head).to_string(), e.time)
            })
            .collect();
        v.sort();
        v
    };
    let owned = |es: &[(&str, &str, Time)]| -> Vec<(String, String, Time)> {
        let mut v: Vec<_> = es.iter().map(|&(u, w, t)| (u.to_string(), w.to_string(), t)).collect();
        v.sort();
        v
    };
    let ok = named(&a) == owned(&expect_a) && named(&def) == owned(&expect_def);
    Outcome::new(
        ok && elapsed < Duration::from_millis(1),
        format!("|xi(a)|={} |xi(d)+xi(e)+xi(f)|={} in {:?}", a.len(), def.len(), elapsed),
    )
}

fn oracle_equivalence(corpus: &[CorpusGraph]) -> Outcome {
    let started = Instant::now();
    let mut mismatches = 0usize;
    let mut queries = 0usize;
    let mut enumerated = 0usize;
    for g in corpus {
        let s = &g.stream;
        for v in s.vertices() {
            for &tau in &g.intervals[..2] {
                queries += 1;
                let fast = fastest_durations(s.view(), v, tau, None).unwrap();
                if oracle_fastest(s, v, tau).unwrap() != fast {
                    mismatches += 1;
                }
                if s.vertex_count() <= 12 {
                    enumerated += 1;
                    if oracle_enumerate_paths(s, v, tau, usize::MAX).unwrap() != fast {
                        mismatches += 1;
                    }
                }
                if earliest_arrival(s.view(), v, tau, None).unwrap() != oracle_earliest_arrival(s, v, tau).unwrap() {
                    mismatches += 1;
                }
            }
        }
    }
    let elapsed = started.elapsed();
    Outcome::new(
        mismatches == 0 && elapsed < Duration::from_secs(60),
        format!("{queries} queries, {enumerated} enumerated, {mismatches} mismatches in {elapsed:.1?}"),
    )
}

/// All indices of the corpus configuration grid for one graph.
fn grid(s: &Arc<EdgeStream>, seed: u64) -> Vec<(String, SubstreamIndex)> {
    let n = s.vertex_count();
    let mut out = Vec::new();
    for k in [2, 4, 8, 16].into_iter().filter(|&k| k < n) {
        out.push((format!("greedy k={k}"), build_greedy(s.clone(), k).unwrap()));
        for h in [4, 8] {
            for batch in [1, n] {
                let cfg = ParallelConfig {
                    k,
                    h,
                    batch_size: batch,
                    seed,
                    threads: 0,
                };
                out.push((format!("sketch k={k} h={h} B={batch}"), build_parallel(s.clone(), &cfg).unwrap()));
            }
        }
    }
    out
}

struct GridStats {
    indices: usize,
    invalid: usize,
    query_mismatches: usize,
    vertex_bound_violations: usize,
    greedy_bound_violations: usize,
    checked_bounds: usize,
}

fn index_grid(corpus: &[CorpusGraph]) -> (GridStats, Duration) {
    let started = Instant::now();
    let mut st = GridStats {
        indices: 0,
        invalid: 0,
        query_mismatches: 0,
        vertex_bound_violations: 0,
        greedy_bound_violations: 0,
        checked_bounds: 0,
    };
    for (gi, g) in corpus.iter().enumerate() {
        let s = &g.stream;
        let reference: Vec<Vec<_>> = s
            .vertices()
            .map(|v| {
                g.intervals
                    .iter()
                    .map(|&tau| {
                        (
                            fastest_durations(s.view(), v, tau, None).unwrap(),
                            earliest_arrival(s.view(), v, tau, None).unwrap(),
                        )
                    })
                    .collect()
            })
            .collect();
        for (name, ix) in grid(s, gi as u64) {
            st.indices += 1;
            let report = validate(&ix);
            if !report.is_clean() {
                st.invalid += 1;
                eprintln!("graph {gi} {name}: {:?}", report.violations);
            }
            st.checked_bounds += 1;
            if report.vertices > 2 * report.size {
                st.vertex_bound_violations += 1;
            }
            if name.starts_with("greedy") && !report.greedy_bound_holds() {
                st.greedy_bound_violations += 1;
            }
            for v in s.vertices() {
                for (ti, &tau) in g.intervals.iter().enumerate() {
                    let (fast, ea) = &reference[v.index()][ti];
                    if ix.query_fastest(v, tau).unwrap() != *fast || ix.query_earliest(v, tau).unwrap() != *ea {
                        st.query_mismatches += 1;
                    }
                }
            }
        }
    }
    (st, started.elapsed())
}

fn exact_jaccard_distance(a: &[u32], b: &[u32]) -> f64 {
    let inter = a.iter().filter(|x| b.contains(x)).count();
    let union = a.len() + b.len() - inter;
    1.0 - inter as f64 / union as f64
}

/// Twenty pairs over `[0, 1024)` whose overlap runs from disjoint to equal.
fn jaccard_pairs() -> Vec<(Vec<u32>, Vec<u32>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    (0..20)
        .map(|i| {
            let size_a = rng.random_range(16..=256u32);
            let size_b = if i == 19 { size_a } else { rng.random_range(16..=256u32) };
            let shared = (size_a.min(size_b) as f64 * i as f64 / 19.0).round() as u32;
            let a: Vec<u32> = (0..size_a).collect();
            let b: Vec<u32> = (0..shared).chain(512..512 + size_b - shared).collect();
            (a, b)
        })
        .collect()
}

fn jaccard_estimator() -> Outcome {
    const SEEDS: u64 = 10_000;
    const H: usize = 8;
    const DOMAIN: usize = 1024;
    let started = Instant::now();
    let pairs = jaccard_pairs();
    let small: Vec<(Vec<u32>, Vec<u32>)> = vec![
        (vec![1, 2, 3], vec![2, 3, 4]),
        (vec![5], vec![5]),
        (vec![0, 9, 100, 700], vec![800, 900]),
        (vec![10, 11, 12, 13, 14], vec![10, 11, 12, 13, 14, 15, 16, 17]),
    ];
    let mut sums = vec![0.0f64; pairs.len()];
    let mut small_errors = 0usize;
    for seed in 0..SEEDS {
        let p = PermutationHash::new(seed, DOMAIN).unwrap();
        let sketch = |set: &[u32]| BottomHSketch::from_values(H, p.domain(), set.iter().map(|&x| p.apply(x)));
        for (i, (a, b)) in pairs.iter().enumerate() {
            sums[i] += jaccard_estimate(&sketch(a), &sketch(b)).unwrap();
        }
        for (a, b) in &small {
            if jaccard_estimate(&sketch(a), &sketch(b)).unwrap() != exact_jaccard_distance(a, b) {
                small_errors += 1;
            }
        }
    }
    let worst = pairs
        .iter()
        .zip(&sums)
        .map(|((a, b), sum)| (sum / SEEDS as f64 - exact_jaccard_distance(a, b)).abs())
        .fold(0.0, f64::max);
    let elapsed = started.elapsed();
    Outcome::new(
        worst <= 0.02 && small_errors == 0 && elapsed < Duration::from_secs(30),
        format!("max |mean - exact| = {worst:.4}, small-set errors {small_errors}, in {elapsed:.1?}"),
    )
}

fn closeness_agreement(corpus: &[CorpusGraph]) -> Outcome {
    let s = Arc::new(parse_edge_list(SMALL_EXAMPLE, ParseOptions::default()).unwrap());
    let ix = build_greedy(s.clone(), 2).unwrap();
    let ranked = closeness_via_index(&ix, s.lifetime(), 0).unwrap();
    let c_a = ranked.closeness(s.vertex("a").unwrap()).unwrap();
    let example_ok = (c_a - (1.0 + 1.0 + 0.5 + 1.0 / 7.0)).abs() <= 1e-12;

    let mut disagreements = 0usize;
    let mut rankings = 0usize;
    for (gi, g) in corpus.iter().enumerate() {
        let s = &g.stream;
        let k = 4.min(s.vertex_count() - 1);
        let greedy = build_greedy(s.clone(), k).unwrap();
        let mut cfg = ParallelConfig::new(k);
        cfg.seed = gi as u64;
        let sketch = build_parallel(s.clone(), &cfg).unwrap();
        for &tau in &g.intervals[..2] {
            rankings += 1;
            let base = closeness_baseline(s, tau, 0).unwrap();
            let others = [
                closeness_via_index(&greedy, tau, 0).unwrap(),
                closeness_via_index(&sketch, tau, 0).unwrap(),
                closeness_oracle(s, tau, 0).unwrap(),
            ];
            if others.iter().any(|r| !r.agrees_with(&base, 1e-12)) {
                disagreements += 1;
            }
        }
    }
    Outcome::new(
        example_ok && disagreements == 0,
        format!("c(a) = {c_a:.12}, {rankings} rankings, {disagreements} disagreements"),
    )
}

fn determinism(corpus: &[CorpusGraph]) -> Outcome {
    let community = Arc::new(
        community_stream(&CommunityStreamConfig {
            communities: 6,
            vertices_per_community: 40,
            edges: 6000,
            ..Default::default()
        })
        .unwrap(),
    );
    let mut graphs: Vec<Arc<EdgeStream>> = corpus.iter().take(10).map(|g| g.stream.clone()).collect();
    graphs.push(community);
    let mut differing = 0usize;
    let mut cases = 0usize;
    for (gi, s) in graphs.iter().enumerate() {
        let n = s.vertex_count();
        for batch in [1, 7, n] {
            let mut cfg = ParallelConfig {
                k: 4.min(n - 1),
                h: 8,
                batch_size: batch,
                seed: 100 + gi as u64,
                threads: 1,
            };
            let reference = format::to_bytes(&build_parallel(s.clone(), &cfg).unwrap());
            for threads in [2, 8] {
                cfg.threads = threads;
                cases += 1;
                if format::to_bytes(&build_parallel(s.clone(), &cfg).unwrap()) != reference {
                    differing += 1;
                }
            }
        }
    }
    Outcome::new(differing == 0, format!("{cases} comparisons against 1 thread, {differing} differ"))
}

/// Fastest of `runs` timings, to damp scheduler noise.
fn best_of<T>(runs: usize, mut f: impl FnMut() -> T) -> (T, Duration) {
    let mut best = None;
    let mut out = None;
    for _ in 0..runs {
        let t0 = Instant::now();
        let r = f();
        let d = t0.elapsed();
        if best.is_none_or(|b| d < b) {
            best = Some(d);
        }
        out = Some(r);
    }
    (out.unwrap(), best.unwrap())
}

fn trade_off() -> Outcome {
    let started = Instant::now();
    let cfg = CommunityStreamConfig {
        communities: 24,
        edges: 50_000,
        ..Default::default()
    };
    let s = Arc::new(community_stream(&cfg).unwrap());
    let tau = s.lifetime();

    let (base, baseline_time) = best_of(3, || closeness_baseline(&s, tau, 0).unwrap());

    let mut lines = Vec::new();
    let mut bytes = Vec::new();
    let mut work = Vec::new();
    let mut speedups = Vec::new();
    let mut agree = true;
    for k in [8, 32, 128] {
        let ((ix, ranked), total) = best_of(3, || {
            let ix = build_parallel(s.clone(), &ParallelConfig::new(k)).unwrap();
            let ranked = closeness_via_index(&ix, tau, 0).unwrap();
            (ix, ranked)
        });
        agree &= ranked.agrees_with(&base, 1e-12);
        let b = format::to_bytes(&ix).len();
        let w = ix.query_work();
        let speedup = baseline_time.as_secs_f64() / total.as_secs_f64();
        lines.push(format!("k={k}: bytes={b} work={w} total={total:.2?} speedup={speedup:.2}x"));
        bytes.push(b);
        work.push(w);
        speedups.push(speedup);
    }
    let bytes_ok = bytes.windows(2).all(|w| w[0] <= w[1]);
    let work_ok = work.windows(2).all(|w| w[0] >= w[1]);
    let speed_ok = speedups.iter().all(|&x| x >= 2.0);
    let elapsed = started.elapsed();
    Outcome::new(
        bytes_ok && work_ok && speed_ok && agree && elapsed < Duration::from_secs(300),
        format!(
            "n={} m={} baseline={baseline_time:.2?} n*m={}; {}",
            s.vertex_count(),
            s.edge_count(),
            s.vertex_count() as u64 * s.edge_count() as u64,
            lines.join("; ")
        ),
    )
}

fn serialization(corpus: &[CorpusGraph]) -> Outcome {
    let mut failures = 0usize;
    let mut checked = 0usize;
    let mut accepted_corrupt = 0usize;
    for (gi, g) in corpus.iter().enumerate().step_by(4) {
        let s = &g.stream;
        let k = 8.min(s.vertex_count() - 1);
        let mut cfg = ParallelConfig::new(k);
        cfg.seed = gi as u64;
        for ix in [build_greedy(s.clone(), k).unwrap(), build_parallel(s.clone(), &cfg).unwrap()] {
            checked += 1;
            let bytes = format::to_bytes(&ix);
            match format::from_bytes(&bytes) {
                Ok(back) => {
                    let same = back == ix
                        && back.params() == ix.params()
                        && back.assignments() == ix.assignments()
                        && back.substreams().iter().zip(ix.substreams()).all(|(a, b)| a.skip() == b.skip());
                    if !same {
                        failures += 1;
                    }
                }
                Err(_) => failures += 1,
            }
            let mut corrupt = bytes.clone();
            let at = bytes.len() - 4;
            corrupt[at] ^= 0xff;
            if !matches!(format::from_bytes(&corrupt), Err(Error::Checksum { .. })) {
                accepted_corrupt += 1;
            }
        }
    }
    Outcome::new(
        failures == 0 && accepted_corrupt == 0,
        format!("{checked} indices, {failures} round-trip failures, {accepted_corrupt} corrupt files accepted"),
    )
}

fn main() -> ExitCode {
    let mut all_pass = true;
    let mut report = |name: &str, o: Outcome| {
        all_pass &= o.pass;
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    };

    report("small-example golden", small_example_golden());
    let corpus = corpus();
    report("oracle equivalence", oracle_equivalence(&corpus));

    let (st, elapsed) = index_grid(&corpus);
    report(
        "index correctness",
        Outcome::new(
            st.invalid == 0 && st.query_mismatches == 0 && elapsed < Duration::from_secs(300),
            format!(
                "{} indices, {} invalid, {} query mismatches in {elapsed:.1?}",
                st.indices, st.invalid, st.query_mismatches
            ),
        ),
    );
    report(
        "size bounds",
        Outcome::new(
            st.vertex_bound_violations == 0 && st.greedy_bound_violations == 0,
            format!(
                "{} indices, vertex bound violations {}, greedy bound violations {}",
                st.checked_bounds, st.vertex_bound_violations, st.greedy_bound_violations
            ),
        ),
    );
    report("jaccard estimator", jaccard_estimator());
    report("closeness agreement", closeness_agreement(&corpus));
    report("determinism", determinism(&corpus));
    report("trade-off", trade_off());
    report("serialization", serialization(&corpus));

    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
