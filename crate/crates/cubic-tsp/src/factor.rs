//! 2-factors and their cycle structure: the initial factor `E \ M` for a
//! perfect matching `M`, deterministic cycle decomposition, and the per-cycle
//! half matchings used to seed the second factor.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{edge, Bipartition, Edge, Graph};

/// Simple cycle, stored in a canonical rotation: starts at its smallest
/// node, second node is the smaller-id neighbor of the start.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cycle {
    nodes: Vec<usize>,
}

impl Cycle {
    /// Canonicalize an ordered node list (consecutive nodes adjacent, last
    /// wraps to first). Panics on lists shorter than 3 or with repeats; the
    /// decomposition below is the only production caller and guarantees both.
    pub fn new(nodes: Vec<usize>) -> Self {
        assert!(nodes.len() >= 3, "cycle needs at least 3 nodes");
        let start = nodes
            .iter()
            .enumerate()
            .min_by_key(|&(_, v)| v)
            .map(|(i, _)| i)
            .unwrap();
        let len = nodes.len();
        let next = nodes[(start + 1) % len];
        let prev = nodes[(start + len - 1) % len];
        let mut out = Vec::with_capacity(len);
        if next <= prev {
            for i in 0..len {
                out.push(nodes[(start + i) % len]);
            }
        } else {
            for i in 0..len {
                out.push(nodes[(start + len - i) % len]);
            }
        }
        Cycle { nodes: out }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn contains(&self, v: usize) -> bool {
        self.nodes.contains(&v)
    }

    /// Consecutive-pair edges, including the wraparound edge.
    pub fn edges(&self) -> BTreeSet<Edge> {
        let len = self.nodes.len();
        (0..len)
            .map(|i| edge(self.nodes[i], self.nodes[(i + 1) % len]))
            .collect()
    }

    /// Alternate edges, anchored at the canonical first edge. Errors on odd
    /// cycles, which have no perfect matching of their nodes.
    pub fn half_matching(&self) -> Result<BTreeSet<Edge>> {
        self.half_matching_phase(0)
    }

    /// An even cycle decomposes into two perfect matchings; `phase` (0 or 1)
    /// picks which one.
    pub fn half_matching_phase(&self, phase: usize) -> Result<BTreeSet<Edge>> {
        let len = self.nodes.len();
        if len % 2 != 0 {
            return Err(Error::OddCycle(len));
        }
        Ok((0..len / 2)
            .map(|i| {
                edge(
                    self.nodes[(2 * i + phase) % len],
                    self.nodes[(2 * i + 1 + phase) % len],
                )
            })
            .collect())
    }
}

/// Spanning edge subset with every node of degree exactly 2, plus its cached
/// cycle decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoFactor {
    edges: BTreeSet<Edge>,
    cycles: Vec<Cycle>,
}

impl TwoFactor {
    /// Decompose an edge set into cycles, checking 2-regularity. Cycles are
    /// sorted by smallest contained node and individually canonicalized, so
    /// the decomposition is deterministic.
    pub fn from_edges(edges: BTreeSet<Edge>, n: usize) -> Result<Self> {
        let cycles = cycle_decomposition(&edges, n)?;
        Ok(TwoFactor { edges, cycles })
    }

    pub fn edges(&self) -> &BTreeSet<Edge> {
        &self.edges
    }

    pub fn cycles(&self) -> &[Cycle] {
        &self.cycles
    }

    pub fn component_count(&self) -> usize {
        self.cycles.len()
    }

    pub fn contains(&self, e: &Edge) -> bool {
        self.edges.contains(e)
    }

    /// Index of the cycle containing `v`.
    pub fn cycle_of(&self, v: usize) -> usize {
        self.cycles
            .iter()
            .position(|c| c.contains(v))
            .expect("2-factor spans all nodes")
    }
}

/// Decompose a 2-regular edge set over nodes `0..n` into cycles.
pub fn cycle_decomposition(edges: &BTreeSet<Edge>, n: usize) -> Result<Vec<Cycle>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    for (v, list) in adj.iter().enumerate() {
        if list.len() != 2 {
            return Err(Error::NotTwoRegular {
                node: v,
                degree: list.len(),
            });
        }
    }
    let mut seen = vec![false; n];
    let mut cycles = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut nodes = vec![start];
        seen[start] = true;
        let mut prev = start;
        // Walk toward the smaller neighbor first; Cycle::new re-canonicalizes
        // anyway, this just keeps the traversal deterministic.
        let mut cur = *adj[start].iter().min().unwrap();
        while cur != start {
            seen[cur] = true;
            nodes.push(cur);
            let next = if adj[cur][0] == prev {
                adj[cur][1]
            } else {
                adj[cur][0]
            };
            prev = cur;
            cur = next;
        }
        cycles.push(Cycle::new(nodes));
    }
    cycles.sort_by_key(|c| c.nodes()[0]);
    Ok(cycles)
}

/// Perfect matching in a cubic bipartite graph via augmenting paths.
/// Regularity guarantees one exists, so failure signals an upstream bug.
pub fn perfect_matching(g: &Graph, bp: &Bipartition) -> Result<BTreeSet<Edge>> {
    let left = bp.nodes_on(0);
    let n = g.node_count();
    // match_of[v] = matched partner of v, or usize::MAX.
    let mut match_of = vec![usize::MAX; n];
    for &u in &left {
        let mut visited = vec![false; n];
        if !augment(g, u, &mut visited, &mut match_of) {
            return Err(Error::MatchingFailed);
        }
    }
    let mut edges = BTreeSet::new();
    for v in 0..n {
        let w = match_of[v];
        if w == usize::MAX {
            return Err(Error::MatchingFailed);
        }
        edges.insert(edge(v, w));
    }
    Ok(edges)
}

fn augment(g: &Graph, u: usize, visited: &mut [bool], match_of: &mut [usize]) -> bool {
    for &w in g.neighbors(u) {
        if visited[w] {
            continue;
        }
        visited[w] = true;
        if match_of[w] == usize::MAX || augment(g, match_of[w], visited, match_of) {
            match_of[w] = u;
            match_of[u] = w;
            return true;
        }
    }
    false
}

/// `E \ matching` as a 2-factor.
pub fn two_factor_from_matching(g: &Graph, matching: &BTreeSet<Edge>) -> Result<TwoFactor> {
    let edges: BTreeSet<Edge> = g.edges().difference(matching).copied().collect();
    TwoFactor::from_edges(edges, g.node_count())
}

/// Initial 2-factor of a cubic bipartite graph: complement of a perfect
/// matching.
pub fn initial_two_factor(g: &Graph) -> Result<TwoFactor> {
    initial_two_factor_variant(g, 0)
}

/// Deterministic alternative starting factors: the matching is computed on
/// the graph relabeled by `v -> (v + rotation) % n`, which steers the
/// augmenting-path search to a different matching, and mapped back.
pub fn initial_two_factor_variant(g: &Graph, rotation: usize) -> Result<TwoFactor> {
    let bp = g.validate_cubic_bipartite()?;
    if rotation == 0 {
        let matching = perfect_matching(g, &bp)?;
        return two_factor_from_matching(g, &matching);
    }
    let n = g.node_count();
    let relabel = |v: usize| (v + rotation) % n;
    let unlabel = |v: usize| (v + n - rotation % n) % n;
    let rotated_edges: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .map(|&(u, v)| (relabel(u), relabel(v)))
        .collect();
    let rotated = Graph::new(n, &rotated_edges)?;
    let bp_rot = rotated.bipartition()?;
    let matching_rot = perfect_matching(&rotated, &bp_rot)?;
    let matching: BTreeSet<Edge> = matching_rot
        .iter()
        .map(|&(u, v)| edge(unlabel(u), unlabel(v)))
        .collect();
    two_factor_from_matching(g, &matching)
}

/// Serialized form of a 2-factor: `{"cycles": [[node, ...], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TwoFactorJson {
    pub cycles: Vec<Vec<usize>>,
}

impl TwoFactorJson {
    pub fn from_factor(f: &TwoFactor, label_offset: usize) -> Self {
        TwoFactorJson {
            cycles: f
                .cycles()
                .iter()
                .map(|c| c.nodes().iter().map(|&v| v + label_offset).collect())
                .collect(),
        }
    }
}
