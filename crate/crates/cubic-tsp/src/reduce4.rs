//! Contraction of potential 4-cycles in cubic bipartite graphs, and the
//! reverse direction: lifting a 2-factor of the contracted graph back to the
//! parent without increasing its component count.
//!
//! A 4-cycle is treated as contractible when no node outside it neighbors
//! two of its nodes. That condition is necessary for the 4-cycle to appear
//! in any 2-factor, and it is exactly what keeps the contracted graph
//! simple, cubic, and bipartite.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::TwoFactor;
use crate::graph::{edge, Edge, Graph};

/// A 4-cycle eligible for contraction, labeled in cycle order
/// `v1-v2-v3-v4-v1` with `v1` the smallest node; `v1, v3` share a
/// bipartition side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Square {
    pub nodes: [usize; 4],
}

impl Square {
    pub fn sorted(&self) -> [usize; 4] {
        let mut s = self.nodes;
        s.sort_unstable();
        s
    }
}

/// Everything needed to invert one contraction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContractionRecord4 {
    pub n_before: usize,
    pub square: Square,
    /// External neighbor of `square.nodes[i]` in the parent graph.
    pub externals: [usize; 4],
    /// Replacement node ids in the contracted graph.
    pub v_odd: usize,
    pub v_even: usize,
    /// Contracted id -> parent id for ordinary nodes (positions `v_odd` and
    /// `v_even` hold a sentinel and are handled by the case analysis).
    old_of_new: Vec<usize>,
}

/// True when no node outside the 4 given nodes has two or more neighbors
/// among them. Assumes `s` spans a 4-cycle.
pub fn is_rule_contractible(g: &Graph, s: &[usize; 4]) -> bool {
    let set: BTreeSet<usize> = s.iter().copied().collect();
    let mut seen = BTreeSet::new();
    for &v in s {
        for &w in g.neighbors(v) {
            if !set.contains(&w) && !seen.insert(w) {
                return false;
            }
        }
    }
    true
}

fn all_4cycles(g: &Graph) -> Vec<[usize; 4]> {
    let mut found: BTreeSet<[usize; 4]> = BTreeSet::new();
    let n = g.node_count();
    for a in 0..n {
        for c in (a + 1)..n {
            if g.has_edge(a, c) {
                continue; // bipartite graphs have none of these anyway
            }
            let common: Vec<usize> = g
                .neighbors(a)
                .iter()
                .copied()
                .filter(|&w| g.has_edge(c, w))
                .collect();
            for i in 0..common.len() {
                for j in (i + 1)..common.len() {
                    let mut quad = [a, common[i], c, common[j]];
                    quad.sort_unstable();
                    found.insert(quad);
                }
            }
        }
    }
    found.into_iter().collect()
}

fn label_square(g: &Graph, quad: [usize; 4]) -> Square {
    let v1 = quad[0];
    let in_s: Vec<usize> = quad[1..]
        .iter()
        .copied()
        .filter(|&w| g.has_edge(v1, w))
        .collect();
    debug_assert_eq!(in_s.len(), 2);
    let (v2, v4) = (in_s[0].min(in_s[1]), in_s[0].max(in_s[1]));
    let v3 = quad[1..]
        .iter()
        .copied()
        .find(|&w| w != v2 && w != v4)
        .expect("fourth node of the square");
    Square {
        nodes: [v1, v2, v3, v4],
    }
}

/// The lexicographically smallest contractible 4-cycle, if any.
pub fn find_contractible_4cycle(g: &Graph) -> Option<Square> {
    all_4cycles(g)
        .into_iter()
        .find(|quad| is_rule_contractible(g, quad))
        .map(|quad| label_square(g, quad))
}

/// Contract `s`: `v1, v3` merge to `v_odd`, `v2, v4` to `v_even`, keeping a
/// single copy of the edge between them. The result has two fewer nodes and
/// stays simple, cubic, and bipartite.
pub fn contract_4cycle(g: &Graph, s: &Square) -> Result<(Graph, ContractionRecord4)> {
    let n = g.node_count();
    let [v1, v2, v3, v4] = s.nodes;
    let set: BTreeSet<usize> = s.nodes.iter().copied().collect();
    let external = |v: usize| -> usize {
        g.neighbors(v)
            .iter()
            .copied()
            .find(|w| !set.contains(w))
            .expect("cubic node on a 4-cycle has one external edge")
    };
    let externals = [external(v1), external(v2), external(v3), external(v4)];

    let plain: Vec<usize> = (0..n).filter(|v| !set.contains(v)).collect();
    let mut new_of_old = vec![usize::MAX; n];
    for (new, &old) in plain.iter().enumerate() {
        new_of_old[old] = new;
    }
    let v_odd = n - 4;
    let v_even = n - 3;
    let mut old_of_new = plain.clone();
    old_of_new.push(usize::MAX); // v_odd slot
    old_of_new.push(usize::MAX); // v_even slot

    let mut new_edges: BTreeSet<Edge> = BTreeSet::new();
    let mut push = |e: Edge| -> Result<()> {
        if !new_edges.insert(e) {
            return Err(Error::ParallelEdgeWouldForm(e.0, e.1));
        }
        Ok(())
    };
    for &(a, b) in g.edges() {
        if set.contains(&a) || set.contains(&b) {
            continue;
        }
        push(edge(new_of_old[a], new_of_old[b]))?;
    }
    push(edge(v_odd, v_even))?;
    push(edge(v_odd, new_of_old[externals[0]]))?;
    push(edge(v_odd, new_of_old[externals[2]]))?;
    push(edge(v_even, new_of_old[externals[1]]))?;
    push(edge(v_even, new_of_old[externals[3]]))?;

    let list: Vec<(usize, usize)> = new_edges.into_iter().collect();
    let contracted = Graph::new(n - 2, &list)?;
    let record = ContractionRecord4 {
        n_before: n,
        square: *s,
        externals,
        v_odd,
        v_even,
        old_of_new,
    };
    Ok((contracted, record))
}

/// Contract until no contractible 4-cycle remains, always taking the
/// lexicographically smallest eligible one. Records are returned in
/// application order.
pub fn reduce_all(g: &Graph) -> Result<(Graph, Vec<ContractionRecord4>)> {
    let mut current = g.clone();
    let mut records = Vec::new();
    while let Some(s) = find_contractible_4cycle(&current) {
        let (next, record) = contract_4cycle(&current, &s)?;
        records.push(record);
        current = next;
    }
    Ok((current, records))
}

/// Lift a 2-factor of the contracted graph to the parent graph. The result
/// never has more components than the input.
pub fn uncontract_two_factor(rec: &ContractionRecord4, f: &TwoFactor) -> Result<TwoFactor> {
    let [v1, v2, v3, v4] = rec.square.nodes;
    let [t1, t2, t3, t4] = rec.externals;
    let old_plain = |x: usize| -> Result<usize> {
        let old = rec.old_of_new.get(x).copied().unwrap_or(usize::MAX);
        if old == usize::MAX {
            return Err(Error::InvalidFactor(format!(
                "node {x} is not an ordinary node of the contracted graph"
            )));
        }
        Ok(old)
    };

    let mut lifted: BTreeSet<Edge> = BTreeSet::new();
    let mut square_stubs: Vec<usize> = Vec::new(); // square nodes that received their external edge
    let mut has_center = false;
    for &(a, b) in f.edges() {
        let touches_odd = a == rec.v_odd || b == rec.v_odd;
        let touches_even = a == rec.v_even || b == rec.v_even;
        if touches_odd && touches_even {
            has_center = true;
            continue;
        }
        if !touches_odd && !touches_even {
            lifted.insert(edge(old_plain(a)?, old_plain(b)?));
            continue;
        }
        let x = old_plain(if a == rec.v_odd || a == rec.v_even {
            b
        } else {
            a
        })?;
        let endpoint = if touches_odd {
            if x == t1 {
                v1
            } else if x == t3 {
                v3
            } else {
                return Err(Error::InvalidFactor(format!(
                    "edge at the odd contraction node leads to {x}, expected {t1} or {t3}"
                )));
            }
        } else if x == t2 {
            v2
        } else if x == t4 {
            v4
        } else {
            return Err(Error::InvalidFactor(format!(
                "edge at the even contraction node leads to {x}, expected {t2} or {t4}"
            )));
        };
        square_stubs.push(endpoint);
        lifted.insert(edge(endpoint, x));
    }

    let n = rec.n_before;
    let result = if has_center {
        // One external edge landed on the odd side, one on the even side;
        // close up with the unique 3-edge path through the other two nodes.
        if square_stubs.len() != 2 {
            return Err(Error::InvalidFactor(format!(
                "expected 2 external edges alongside the center edge, got {}",
                square_stubs.len()
            )));
        }
        let vi = *square_stubs
            .iter()
            .find(|&&v| v == v1 || v == v3)
            .ok_or_else(|| {
                Error::InvalidFactor("no odd-side external edge next to the center edge".into())
            })?;
        let vj = *square_stubs
            .iter()
            .find(|&&v| v == v2 || v == v4)
            .ok_or_else(|| {
                Error::InvalidFactor("no even-side external edge next to the center edge".into())
            })?;
        let r_odd = if vi == v1 { v3 } else { v1 };
        let r_even = if vj == v2 { v4 } else { v2 };
        lifted.insert(edge(vi, r_even));
        lifted.insert(edge(r_even, r_odd));
        lifted.insert(edge(r_odd, vj));
        TwoFactor::from_edges(lifted, n)?
    } else {
        // All four external edges are present; both pairings of square edges
        // complete a 2-factor, keep the one with fewer components.
        if square_stubs.len() != 4 {
            return Err(Error::InvalidFactor(format!(
                "expected 4 external edges without the center edge, got {}",
                square_stubs.len()
            )));
        }
        let mut option_a = lifted.clone();
        option_a.insert(edge(v1, v2));
        option_a.insert(edge(v3, v4));
        let fa = TwoFactor::from_edges(option_a, n)?;
        let mut option_b = lifted;
        option_b.insert(edge(v2, v3));
        option_b.insert(edge(v1, v4));
        let fb = TwoFactor::from_edges(option_b, n)?;
        if fa.component_count() <= fb.component_count() {
            fa
        } else {
            fb
        }
    };

    if result.component_count() > f.component_count() {
        return Err(Error::InvariantBreach(format!(
            "uncontraction raised component count from {} to {}",
            f.component_count(),
            result.component_count()
        )));
    }
    Ok(result)
}

/// Undo a whole contraction stack, newest record first.
pub fn uncontract_stack(records: &[ContractionRecord4], f: &TwoFactor) -> Result<TwoFactor> {
    let mut current = f.clone();
    for rec in records.iter().rev() {
        current = uncontract_two_factor(rec, &current)?;
    }
    Ok(current)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen;
    use crate::oracle;

    #[test]
    fn q3_smallest_face_is_contractible() {
        let g = gen::fixture("q3").unwrap().graph;
        let s = find_contractible_4cycle(&g).unwrap();
        assert_eq!(s.sorted(), [0, 1, 2, 3]);
        assert_eq!(s.nodes, [0, 1, 3, 2]);
    }

    #[test]
    fn k33_and_heawood_have_no_contractible_4cycle() {
        let k33 = gen::fixture("k33").unwrap().graph;
        // Every 4-cycle exists but fails the external-neighbor rule.
        assert!(!all_4cycles(&k33).is_empty());
        assert!(find_contractible_4cycle(&k33).is_none());

        let heawood = gen::fixture("heawood").unwrap().graph;
        assert!(all_4cycles(&heawood).is_empty());
        assert!(find_contractible_4cycle(&heawood).is_none());
    }

    #[test]
    fn contract_q3_face_yields_6_node_cubic_bipartite() {
        let g = gen::fixture("q3").unwrap().graph;
        let s = find_contractible_4cycle(&g).unwrap();
        let (contracted, rec) = contract_4cycle(&g, &s).unwrap();
        assert_eq!(contracted.node_count(), g.node_count() - 2);
        contracted.validate_cubic_bipartite().unwrap();
        assert_eq!(rec.n_before, 8);
    }

    #[test]
    fn reduce_all_q3_and_heawood() {
        let q3 = gen::fixture("q3").unwrap().graph;
        let (reduced, records) = reduce_all(&q3).unwrap();
        assert_eq!(reduced.node_count(), 6);
        assert_eq!(records.len(), 1);
        assert!(find_contractible_4cycle(&reduced).is_none());

        let heawood = gen::fixture("heawood").unwrap().graph;
        let (reduced, records) = reduce_all(&heawood).unwrap();
        assert_eq!(reduced, heawood);
        assert!(records.is_empty());
    }

    #[test]
    fn appendix48_reduces_to_something_without_contractible_4cycles() {
        let g = gen::fixture("appendix48").unwrap().graph;
        let (reduced, _) = reduce_all(&g).unwrap();
        reduced.validate_cubic_bipartite().unwrap();
        assert!(find_contractible_4cycle(&reduced).is_none());
    }

    #[test]
    fn uncontraction_exhaustive_over_q3() {
        let g = gen::fixture("q3").unwrap().graph;
        let s = find_contractible_4cycle(&g).unwrap();
        let (contracted, rec) = contract_4cycle(&g, &s).unwrap();
        let all = oracle::enumerate_two_factors(&contracted).unwrap();
        assert!(!all.is_empty());
        let center = edge(rec.v_odd, rec.v_even);
        let mut saw_center = false;
        let mut saw_no_center = false;
        let q3_factors = oracle::enumerate_two_factors(&g).unwrap();
        let square_edges = [
            edge(rec.square.nodes[0], rec.square.nodes[1]),
            edge(rec.square.nodes[1], rec.square.nodes[2]),
            edge(rec.square.nodes[2], rec.square.nodes[3]),
            edge(rec.square.nodes[3], rec.square.nodes[0]),
        ];
        for f in &all {
            if f.contains(&center) {
                saw_center = true;
                // Forced completion adds exactly 3 of the 4 square edges
                // (the center edge itself is consumed).
                let lifted = uncontract_two_factor(&rec, f).unwrap();
                let used = square_edges.iter().filter(|e| lifted.contains(e)).count();
                assert_eq!(used, 3);
                assert_eq!(lifted.edges().len(), f.edges().len() + 2);
            } else {
                saw_no_center = true;
            }
            let lifted = uncontract_two_factor(&rec, f).unwrap();
            assert!(lifted.component_count() <= f.component_count());
            assert!(q3_factors.iter().any(|tf| tf.edges() == lifted.edges()));
        }
        assert!(
            saw_center && saw_no_center,
            "both uncontraction cases must occur"
        );
    }

    #[test]
    fn rule_is_sound_at_small_scale() {
        // Every rule-accepted square really appears in some 2-factor.
        let mut graphs = vec![gen::fixture("q3").unwrap().graph];
        for seed in 0..20 {
            graphs.push(gen::random_cubic_bipartite(5, seed).unwrap());
            graphs.push(gen::random_cubic_bipartite(7, 100 + seed).unwrap());
        }
        let mut accepted = 0usize;
        for g in &graphs {
            for quad in all_4cycles(g) {
                if is_rule_contractible(g, &quad) {
                    accepted += 1;
                    assert!(
                        oracle::is_potential_4cycle_exact(g, &quad).unwrap(),
                        "rule accepted {quad:?} but no 2-factor realizes it"
                    );
                }
            }
        }
        assert!(accepted > 0, "soundness check never fired");
    }

    #[test]
    fn round_trip_never_raises_component_count() {
        for seed in 0..30 {
            let g = gen::random_cubic_bipartite(6, seed).unwrap();
            let (reduced, records) = reduce_all(&g).unwrap();
            if records.is_empty() || reduced.node_count() > oracle::MAX_ENUM_NODES {
                continue;
            }
            for f in oracle::enumerate_two_factors(&reduced).unwrap() {
                let k = f.component_count();
                let lifted = uncontract_stack(&records, &f).unwrap();
                assert!(lifted.component_count() <= k);
            }
        }
    }
}
