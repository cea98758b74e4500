//! Seeded synthetic temporal graphs for tests, benchmarks and the CLI.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{EdgeStream, Time, VertexId};

/// Uniformly random temporal graph without isolated vertices.
#[derive(Clone, Debug)]
pub struct RandomStreamConfig {
    pub vertices: usize,
    pub edges: usize,
    /// Timestamps are drawn from `0..=max_time`.
    pub max_time: Time,
    /// Transition times are drawn from `1..=max_transition`.
    pub max_transition: Time,
    pub seed: u64,
}

pub fn random_stream(cfg: &RandomStreamConfig) -> Result<EdgeStream> {
    let n = cfg.vertices;
    if n < 2 || cfg.edges < n.div_ceil(2) || cfg.max_transition == 0 {
        return Err(Error::InvalidParameter(format!(
            "cannot cover {n} vertices with {} edges",
            cfg.edges
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut uncovered: Vec<u32> = (0..n as u32).collect();
    uncovered.shuffle(&mut rng);
    let mut edges = Vec::with_capacity(cfg.edges);
    for _ in 0..cfg.edges {
        let tail = uncovered.pop().unwrap_or_else(|| rng.random_range(0..n as u32));
        let head = uncovered.pop().unwrap_or_else(|| rng.random_range(0..n as u32));
        let time = rng.random_range(0..=cfg.max_time);
        let transition = rng.random_range(1..=cfg.max_transition);
        edges.push((VertexId(tail), VertexId(head), time, transition));
    }
    let labels = (0..n).map(|i| format!("v{i}")).collect();
    EdgeStream::from_edges(labels, edges)
}

/// Graph made of communities that are each active during their own time
/// window, with a small share of edges crossing between communities.
///
/// Vertex ids are a seeded permutation, so they carry no community order;
/// labels `c{community}_{member}` still do.
#[derive(Clone, Debug)]
pub struct CommunityStreamConfig {
    pub communities: usize,
    pub vertices_per_community: usize,
    pub edges: usize,
    /// Share of edges whose head lies in a different community.
    pub cross_fraction: f64,
    /// Length of each community's activity window.
    pub window: Time,
    /// Offset between the start of consecutive windows.
    pub stride: Time,
    pub max_transition: Time,
    pub seed: u64,
}

impl Default for CommunityStreamConfig {
    fn default() -> Self {
        CommunityStreamConfig {
            communities: 24,
            vertices_per_community: 400,
            edges: 50_000,
            cross_fraction: 0.001,
            window: 1_000,
            stride: 800,
            max_transition: 5,
            seed: 7,
        }
    }
}

pub fn community_stream(cfg: &CommunityStreamConfig) -> Result<EdgeStream> {
    let c = cfg.communities;
    let size = cfg.vertices_per_community;
    if c < 2 || size < 2 || cfg.edges < c * size || cfg.max_transition == 0 || cfg.window == 0 {
        return Err(Error::InvalidParameter("degenerate community graph parameters".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut ids: Vec<u32> = (0..(c * size) as u32).collect();
    ids.shuffle(&mut rng);
    let mut edges = Vec::with_capacity(cfg.edges);
    let vertex = |community: usize, member: usize| VertexId(ids[community * size + member]);
    for i in 0..cfg.edges {
        // The first pass touches every vertex once as a tail.
        let (home, tail) = if i < c * size {
            (i / size, vertex(i / size, i % size))
        } else {
            let home = rng.random_range(0..c);
            (home, vertex(home, rng.random_range(0..size)))
        };
        let target = if rng.random_bool(cfg.cross_fraction) {
            let mut other = rng.random_range(0..c - 1);
            if other >= home {
                other += 1;
            }
            other
        } else {
            home
        };
        let mut member = rng.random_range(0..size);
        if vertex(target, member) == tail {
            member = (member + 1) % size;
        }
        let head = vertex(target, member);
        let time = home as Time * cfg.stride + rng.random_range(0..cfg.window);
        let transition = rng.random_range(1..=cfg.max_transition);
        edges.push((tail, head, time, transition));
    }
    let mut labels = vec![String::new(); c * size];
    for (i, &id) in ids.iter().enumerate() {
        labels[id as usize] = format!("c{}_{}", i / size, i % size);
    }
    EdgeStream::from_edges(labels, edges)
}
