//! Named fixtures and seeded random instance generation.
//!
//! The RNG is ChaCha8 keyed by a 64-bit seed, with Fisher-Yates shuffles, so
//! a (generator, seed) pair pins down the instance exactly.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::factor::TwoFactor;
use crate::graph::{edge, Edge, Graph};

const MAX_RETRIES: usize = 1000;

/// A named instance plus whatever ground truth is published for it.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub graph: Graph,
    /// Added to internal ids in user-facing output. 1 for `appendix48`,
    /// whose published numbering is 1-based; 0 everywhere else.
    pub label_offset: usize,
    pub known: KnownData,
}

/// Published structures accompanying a fixture, in internal 0-based ids.
#[derive(Debug, Clone, Default)]
pub struct KnownData {
    pub f1: Option<TwoFactor>,
    pub f2: Option<TwoFactor>,
    pub hamilton: Option<Vec<usize>>,
    /// (components of F1, components of F2) where published.
    pub expected_components: Option<(usize, usize)>,
}

/// Look up a fixture by name. Names: `appendix48`, `k33`, `q3`, `heawood`,
/// `diamond-pair`, `petersen`, `k4`.
pub fn fixture(name: &str) -> Result<Fixture> {
    match name {
        "k33" => {
            let mut edges = Vec::new();
            for i in 0..3 {
                for j in 0..3 {
                    edges.push((i, 3 + j));
                }
            }
            Ok(plain("k33", Graph::new(6, &edges)?))
        }
        "q3" => {
            let mut edges = Vec::new();
            for u in 0..8usize {
                for bit in 0..3 {
                    let v = u ^ (1 << bit);
                    if u < v {
                        edges.push((u, v));
                    }
                }
            }
            Ok(plain("q3", Graph::new(8, &edges)?))
        }
        "heawood" => {
            // LCF [5, -5]^7: a 14-cycle plus chords i -- i+5 at even i.
            let mut edges: Vec<(usize, usize)> = (0..14).map(|i| (i, (i + 1) % 14)).collect();
            for i in (0..14).step_by(2) {
                edges.push((i, (i + 5) % 14));
            }
            Ok(plain("heawood", Graph::new(14, &edges)?))
        }
        "petersen" => {
            let mut edges: Vec<(usize, usize)> = (0..5).map(|i| (i, (i + 1) % 5)).collect();
            for i in 0..5 {
                edges.push((5 + i, 5 + (i + 2) % 5));
                edges.push((i, 5 + i));
            }
            Ok(plain("petersen", Graph::new(10, &edges)?))
        }
        "k4" => {
            let edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
            Ok(plain("k4", Graph::new(4, &edges)?))
        }
        "diamond-pair" => {
            // Two K4-minus-an-edge gadgets joined at their degree-2 corners.
            let edges = [
                (0, 1),
                (1, 2),
                (2, 3),
                (3, 0),
                (1, 3),
                (4, 5),
                (5, 6),
                (6, 7),
                (7, 4),
                (5, 7),
                (0, 4),
                (2, 6),
            ];
            Ok(plain("diamond-pair", Graph::new(8, &edges)?))
        }
        "appendix48" => appendix48(),
        other => Err(Error::UnknownFixture(other.to_string())),
    }
}

fn plain(name: &'static str, graph: Graph) -> Fixture {
    Fixture {
        name,
        graph,
        label_offset: 0,
        known: KnownData::default(),
    }
}

/// The published 48-node tight instance. Both 2-factors, the Hamilton
/// cycle, and the edge set are reconstructed from its cycle listings; the
/// second factor contains every edge outside the first, so the edge set is
/// the union of the two factors.
fn appendix48() -> Result<Fixture> {
    // 1-based node orders; edges are consecutive pairs plus the wraparound.
    const F1_CYCLES: [&[usize]; 6] = [
        &[1, 2, 3, 4, 5, 6],
        &[7, 8, 9, 10, 11, 12],
        &[13, 14, 15, 16, 17, 18],
        &[19, 20, 21, 22, 23, 24],
        &[25, 26, 27, 28, 29, 30, 31, 32, 33, 34],
        &[35, 36, 37, 38, 39, 40, 41, 42, 43, 44, 45, 46, 47, 48],
    ];
    const F2_CYCLES: [&[usize]; 6] = [
        &[6, 1, 30, 31, 42, 43, 28, 29, 40, 41],
        &[48, 35, 10, 11, 4, 5, 8, 9, 2, 3],
        &[34, 25, 16, 17, 22, 23, 14, 15, 20, 21],
        &[18, 13, 38, 39, 44, 45],
        &[24, 19, 26, 27, 32, 33],
        &[12, 7, 36, 37, 46, 47],
    ];
    const HAMILTON: [usize; 48] = [
        1, 30, 29, 40, 39, 38, 13, 14, 15, 16, 25, 26, 19, 20, 21, 34, 33, 24, 23, 22, 17, 18, 45,
        44, 43, 28, 27, 32, 31, 42, 41, 6, 5, 8, 7, 12, 11, 4, 3, 48, 47, 46, 37, 36, 35, 10, 9, 2,
    ];

    let cycle_edges = |lists: &[&[usize]]| -> BTreeSet<Edge> {
        let mut set = BTreeSet::new();
        for nodes in lists {
            for i in 0..nodes.len() {
                let u = nodes[i] - 1;
                let v = nodes[(i + 1) % nodes.len()] - 1;
                set.insert(edge(u, v));
            }
        }
        set
    };
    let f1_edges = cycle_edges(&F1_CYCLES);
    let f2_edges = cycle_edges(&F2_CYCLES);
    let union: Vec<(usize, usize)> = f1_edges.union(&f2_edges).copied().collect();
    let graph = Graph::new(48, &union)?;
    let f1 = TwoFactor::from_edges(f1_edges, 48)?;
    let f2 = TwoFactor::from_edges(f2_edges, 48)?;
    let hamilton = HAMILTON.iter().map(|&v| v - 1).collect();
    Ok(Fixture {
        name: "appendix48",
        graph,
        label_offset: 1,
        known: KnownData {
            f1: Some(f1),
            f2: Some(f2),
            hamilton: Some(hamilton),
            expected_components: Some((6, 6)),
        },
    })
}

/// All fixture names, in a stable order.
pub const FIXTURE_NAMES: [&str; 7] = [
    "appendix48",
    "k33",
    "q3",
    "heawood",
    "diamond-pair",
    "petersen",
    "k4",
];

/// Random cubic bipartite graph: the union of three uniform perfect
/// matchings between sides of size `half_n`, resampled until simple and
/// connected.
pub fn random_cubic_bipartite(half_n: usize, seed: u64) -> Result<Graph> {
    assert!(half_n >= 3, "half_n must be at least 3");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_RETRIES {
        let mut edges: BTreeSet<Edge> = BTreeSet::new();
        let mut simple = true;
        for _ in 0..3 {
            let mut perm: Vec<usize> = (0..half_n).collect();
            perm.shuffle(&mut rng);
            for (i, &p) in perm.iter().enumerate() {
                if !edges.insert((i, half_n + p)) {
                    simple = false;
                }
            }
        }
        if !simple {
            continue;
        }
        let list: Vec<(usize, usize)> = edges.into_iter().collect();
        let g = Graph::new(2 * half_n, &list)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::RetriesExhausted(MAX_RETRIES))
}

/// Random cubic (not necessarily bipartite) graph on `n` nodes: a Hamilton
/// cycle on a shuffled node order plus a random perfect matching, resampled
/// until no matching edge duplicates a cycle edge.
pub fn random_cubic(n: usize, seed: u64) -> Result<Graph> {
    assert!(n >= 4 && n % 2 == 0, "need even n >= 4");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_RETRIES {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let mut edges: BTreeSet<Edge> =
            (0..n).map(|i| edge(order[i], order[(i + 1) % n])).collect();
        let mut pairing: Vec<usize> = (0..n).collect();
        pairing.shuffle(&mut rng);
        let mut ok = true;
        for pair in pairing.chunks(2) {
            if !edges.insert(edge(pair[0], pair[1])) {
                ok = false;
                break;
            }
        }
        if !ok {
            continue;
        }
        let list: Vec<(usize, usize)> = edges.into_iter().collect();
        return Graph::new(n, &list);
    }
    Err(Error::RetriesExhausted(MAX_RETRIES))
}

/// Replace `count` randomly chosen edges of `g` by diamond gadgets (K4 minus
/// an edge, the removed edge's endpoints rewired to the gadget's degree-2
/// corners). Preserves 3-regularity and plants `count` node-disjoint chorded
/// 4-cycles.
pub fn plant_diamonds(g: &Graph, count: usize, seed: u64) -> Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut all: Vec<Edge> = g.edges().iter().copied().collect();
    assert!(count <= all.len());
    all.shuffle(&mut rng);
    let picked: BTreeSet<Edge> = all.into_iter().take(count).collect();

    let mut edges: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .copied()
        .filter(|e| !picked.contains(e))
        .collect();
    let mut next = g.node_count();
    for (a, b) in picked {
        let (d1, d2, d3, d4) = (next, next + 1, next + 2, next + 3);
        next += 4;
        edges.extend([
            (d1, d2),
            (d2, d3),
            (d3, d4),
            (d4, d1),
            (d2, d4),
            (a, d1),
            (b, d3),
        ]);
    }
    Graph::new(next, &edges)
}

/// Seed taken from the `CUBIC_TSP_SEED` environment variable, or 0.
pub fn seed_from_env() -> u64 {
    std::env::var("CUBIC_TSP_SEED")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(0)
}

/// Convenience for tests and the CLI: returns `g.gen_range(lo..hi)` with the
/// fixture RNG.
pub fn rng_for(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Draw a uniform value in `lo..hi` from a seeded stream (single use).
pub fn pick_in_range(seed: u64, lo: usize, hi: usize) -> usize {
    rng_for(seed).gen_range(lo..hi)
}
