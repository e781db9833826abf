//! Exhaustive ground truth at small scale: full 2-factor enumeration,
//! minimum cycle cover, exact graph-TSP by bitmask dynamic programming, and
//! the existential potential-4-cycle test. No heuristics anywhere; these are
//! the reference answers the fast paths are checked against.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::factor::TwoFactor;
use crate::graph::{edge, Edge, Graph};

/// Node cap for 2-factor enumeration.
pub const MAX_ENUM_NODES: usize = 20;
/// Node cap for the exact TSP dynamic program.
pub const MAX_TSP_NODES: usize = 16;

struct Search<F: FnMut(&BTreeSet<Edge>) -> bool> {
    edges: Vec<Edge>,
    forced: BTreeSet<Edge>,
    chosen_deg: Vec<usize>,
    undecided: Vec<usize>,
    chosen: BTreeSet<Edge>,
    // Returns false to stop the whole search.
    visit: F,
}

impl<F: FnMut(&BTreeSet<Edge>) -> bool> Search<F> {
    fn run(&mut self) {
        self.step(0);
    }

    /// Include/exclude backtracking over edges in canonical order, pruning on
    /// degree bounds: a node may never exceed degree 2 and must always be
    /// able to still reach degree 2 from its undecided edges.
    fn step(&mut self, idx: usize) -> bool {
        if idx == self.edges.len() {
            if self.chosen_deg.iter().all(|&d| d == 2) {
                return (self.visit)(&self.chosen);
            }
            return true;
        }
        let e = self.edges[idx];
        let (u, v) = e;
        self.undecided[u] -= 1;
        self.undecided[v] -= 1;

        // Include branch.
        if self.chosen_deg[u] < 2 && self.chosen_deg[v] < 2 {
            self.chosen_deg[u] += 1;
            self.chosen_deg[v] += 1;
            self.chosen.insert(e);
            let keep_going = self.step(idx + 1);
            self.chosen.remove(&e);
            self.chosen_deg[u] -= 1;
            self.chosen_deg[v] -= 1;
            if !keep_going {
                return false;
            }
        }

        // Exclude branch, unless the edge is forced or a node would be
        // starved below degree 2.
        if !self.forced.contains(&e)
            && self.chosen_deg[u] + self.undecided[u] >= 2
            && self.chosen_deg[v] + self.undecided[v] >= 2
            && !self.step(idx + 1)
        {
            self.undecided[u] += 1;
            self.undecided[v] += 1;
            return false;
        }

        self.undecided[u] += 1;
        self.undecided[v] += 1;
        true
    }
}

fn for_each_two_factor<F: FnMut(&BTreeSet<Edge>) -> bool>(
    g: &Graph,
    forced: BTreeSet<Edge>,
    visit: F,
) -> Result<()> {
    let n = g.node_count();
    if n > MAX_ENUM_NODES {
        return Err(Error::TooLarge {
            n,
            cap: MAX_ENUM_NODES,
        });
    }
    let mut search = Search {
        edges: g.edges().iter().copied().collect(),
        forced,
        chosen_deg: vec![0; n],
        undecided: (0..n).map(|v| g.degree(v)).collect(),
        chosen: BTreeSet::new(),
        visit,
    };
    search.run();
    Ok(())
}

/// Every 2-factor of `g`, each exactly once, in canonical edge-set order.
pub fn enumerate_two_factors(g: &Graph) -> Result<Vec<TwoFactor>> {
    let mut out = Vec::new();
    let n = g.node_count();
    for_each_two_factor(g, BTreeSet::new(), |edges| {
        out.push(TwoFactor::from_edges(edges.clone(), n).expect("search yields 2-regular sets"));
        true
    })?;
    Ok(out)
}

/// Minimum number of components over all 2-factors, with a witness. Stops
/// early on a Hamiltonian witness, which no 2-factor can beat.
pub fn min_cycle_cover_components(g: &Graph) -> Result<(usize, TwoFactor)> {
    let mut best: Option<(usize, TwoFactor)> = None;
    let n = g.node_count();
    for_each_two_factor(g, BTreeSet::new(), |edges| {
        let tf = TwoFactor::from_edges(edges.clone(), n).expect("search yields 2-regular sets");
        let k = tf.component_count();
        if best.as_ref().map_or(true, |(bk, _)| k < *bk) {
            best = Some((k, tf));
        }
        k > 1
    })?;
    best.ok_or(Error::NoTwoFactor)
}

/// True iff some 2-factor of `g` contains the 4-cycle on `s` as a component.
/// Returns false when `s` does not even induce a 4-cycle.
pub fn is_potential_4cycle_exact(g: &Graph, s: &[usize; 4]) -> Result<bool> {
    let n = g.node_count();
    if n > MAX_ENUM_NODES {
        return Err(Error::TooLarge {
            n,
            cap: MAX_ENUM_NODES,
        });
    }
    let set: BTreeSet<usize> = s.iter().copied().collect();
    if set.len() != 4 {
        return Ok(false);
    }
    let Some(cycle_edges) = four_cycle_edges(g, &set) else {
        return Ok(false);
    };
    let mut found = false;
    for_each_two_factor(g, cycle_edges, |_| {
        found = true;
        false // one witness is enough
    })?;
    Ok(found)
}

/// The 4 cycle edges induced by a 4-node set, if the set carries a 4-cycle.
pub(crate) fn four_cycle_edges(g: &Graph, set: &BTreeSet<usize>) -> Option<BTreeSet<Edge>> {
    let nodes: Vec<usize> = set.iter().copied().collect();
    let mut inside = BTreeSet::new();
    for i in 0..4 {
        for j in (i + 1)..4 {
            if g.has_edge(nodes[i], nodes[j]) {
                inside.insert(edge(nodes[i], nodes[j]));
            }
        }
    }
    // A 4-cycle: every node has exactly two neighbors inside the set. Sets
    // inducing a chord (5 or 6 edges) still contain a 4-cycle; pick the
    // degree-2 sub-cycle only in the exact-4-edge case, which is the one the
    // bipartite reduction can meet.
    if inside.len() != 4 {
        return None;
    }
    for &v in &nodes {
        let d = inside.iter().filter(|&&(a, b)| a == v || b == v).count();
        if d != 2 {
            return None;
        }
    }
    Some(inside)
}

/// Optimal graph-TSP tour length over the shortest-path metric, by the
/// bitmask dynamic program with node 0 fixed as start.
pub fn exact_tsp(g: &Graph) -> Result<usize> {
    let n = g.node_count();
    if n > MAX_TSP_NODES {
        return Err(Error::TooLarge {
            n,
            cap: MAX_TSP_NODES,
        });
    }
    if n == 0 {
        return Ok(0);
    }
    if n == 1 {
        return Ok(0);
    }
    let dist: Vec<Vec<usize>> = (0..n).map(|v| g.bfs_distances_from(v)).collect();
    for row in &dist {
        if row.contains(&usize::MAX) {
            return Err(Error::NotConnected);
        }
    }
    let m = n - 1; // nodes 1..n encoded as bits 0..m
    let full = (1usize << m) - 1;
    const INF: usize = usize::MAX / 2;
    let mut dp = vec![vec![INF; m]; full + 1];
    for v in 0..m {
        dp[1 << v][v] = dist[0][v + 1];
    }
    for mask in 1..=full {
        for last in 0..m {
            if mask & (1 << last) == 0 || dp[mask][last] == INF {
                continue;
            }
            let base = dp[mask][last];
            for next in 0..m {
                if mask & (1 << next) != 0 {
                    continue;
                }
                let nm = mask | (1 << next);
                let cand = base + dist[last + 1][next + 1];
                if cand < dp[nm][next] {
                    dp[nm][next] = cand;
                }
            }
        }
    }
    Ok((0..m)
        .map(|last| dp[full][last] + dist[last + 1][0])
        .min()
        .unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;

    /// Dumb reference: every subset of the 12 edges of Q3, checked for
    /// 2-regularity directly.
    fn q3_two_factors_by_bitmask() -> Vec<BTreeSet<Edge>> {
        let g = gen::fixture("q3").unwrap().graph;
        let edges: Vec<Edge> = g.edges().iter().copied().collect();
        let mut out = Vec::new();
        for mask in 0u32..(1 << edges.len()) {
            let mut deg = [0usize; 8];
            let mut set = BTreeSet::new();
            for (i, &e) in edges.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    deg[e.0] += 1;
                    deg[e.1] += 1;
                    set.insert(e);
                }
            }
            if deg.iter().all(|&d| d == 2) {
                out.push(set);
            }
        }
        out
    }

    #[test]
    fn k33_has_six_two_factors_all_hamilton() {
        let g = gen::fixture("k33").unwrap().graph;
        let all = enumerate_two_factors(&g).unwrap();
        assert_eq!(all.len(), 6);
        assert!(all.iter().all(|tf| tf.component_count() == 1));
    }

    #[test]
    fn q3_enumeration_matches_bitmask_reference() {
        let g = gen::fixture("q3").unwrap().graph;
        let fast: Vec<BTreeSet<Edge>> = enumerate_two_factors(&g)
            .unwrap()
            .iter()
            .map(|tf| tf.edges().clone())
            .collect();
        let slow = q3_two_factors_by_bitmask();
        assert_eq!(fast.len(), slow.len());
        for s in &slow {
            assert!(fast.contains(s));
        }
        // Both Hamiltonian covers and 4+4 covers occur.
        let comps: BTreeSet<usize> = enumerate_two_factors(&g)
            .unwrap()
            .iter()
            .map(|tf| tf.component_count())
            .collect();
        assert_eq!(comps, BTreeSet::from([1, 2]));
    }

    #[test]
    fn single_cycle_graph_has_one_two_factor() {
        let g = Graph::new(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]).unwrap();
        let all = enumerate_two_factors(&g).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].edges(), g.edges());
    }

    #[test]
    fn min_cover_on_fixtures() {
        for name in ["k33", "heawood", "q3"] {
            let g = gen::fixture(name).unwrap().graph;
            let (k, witness) = min_cycle_cover_components(&g).unwrap();
            assert_eq!(k, 1, "{name} should be Hamiltonian");
            assert_eq!(witness.component_count(), 1);
        }
    }

    #[test]
    fn exact_tsp_hamiltonian_fixtures() {
        for (name, expect) in [("k33", 6), ("q3", 8), ("heawood", 14)] {
            let g = gen::fixture(name).unwrap().graph;
            assert_eq!(exact_tsp(&g).unwrap(), expect, "{name}");
        }
    }

    #[test]
    fn potential_4cycles_q3_yes_k33_no() {
        let q3 = gen::fixture("q3").unwrap().graph;
        // Any face of the cube: {0,1,2,3} is one.
        assert!(is_potential_4cycle_exact(&q3, &[0, 1, 3, 2]).unwrap());

        let k33 = gen::fixture("k33").unwrap().graph;
        // Every 4-cycle of K33 fails: all of its 2-factors are 6-cycles.
        for a in 0..3 {
            for b in a + 1..3 {
                for c in 3..6 {
                    for d in c + 1..6 {
                        assert!(!is_potential_4cycle_exact(&k33, &[a, b, c, d]).unwrap());
                    }
                }
            }
        }
        // A set that is not even a 4-cycle.
        assert!(!is_potential_4cycle_exact(&q3, &[0, 1, 2, 7]).unwrap());
    }

    #[test]
    fn caps_are_enforced() {
        let big = gen::random_cubic_bipartite(11, 7).unwrap();
        assert!(matches!(
            enumerate_two_factors(&big),
            Err(Error::TooLarge { .. })
        ));
        assert!(matches!(exact_tsp(&big), Err(Error::TooLarge { .. })));
    }
}
