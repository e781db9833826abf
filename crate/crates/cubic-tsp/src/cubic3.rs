//! General cubic graphs: detection and contraction of chorded 4-cycles,
//! parity-based uncontraction of tour multigraphs, and the exact rational
//! arithmetic combining the two per-node bounds into the 4/3 - 1/8754
//! guarantee. The external tour samplers those bounds come from are out of
//! scope; a pluggable provider supplies test tour multigraphs so both
//! uncontraction branches run.
//!
//! Contraction can create parallel edges, and the uncontraction rule reads
//! the multiplicity of each parallel copy separately (a doubled copy and two
//! copies used once each splice differently). Multigraphs here therefore
//! carry individually labeled copies rather than merged pair counts.

use std::collections::BTreeSet;

use num::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{edge, Edge, Graph, Multigraph};
use crate::oracle::MAX_ENUM_NODES;
use crate::rational::{rat, rat_int};
use crate::tour::shortcut_walk;

/// Index of one parallel copy in an [`EdgeCopies`] multigraph.
pub type CopyId = usize;

/// Multigraph with individually labeled parallel copies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeCopies {
    n: usize,
    copies: Vec<Edge>,
}

impl EdgeCopies {
    pub fn from_graph(g: &Graph) -> Self {
        EdgeCopies {
            n: g.node_count(),
            copies: g.edges().iter().copied().collect(),
        }
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn copy_count(&self) -> usize {
        self.copies.len()
    }

    pub fn endpoints(&self, id: CopyId) -> Edge {
        self.copies[id]
    }

    pub fn copies(&self) -> &[Edge] {
        &self.copies
    }

    pub fn degree(&self, v: usize) -> usize {
        self.copies
            .iter()
            .filter(|&&(a, b)| a == v || b == v)
            .count()
    }

    fn incident(&self, v: usize) -> Vec<CopyId> {
        (0..self.copies.len())
            .filter(|&i| self.copies[i].0 == v || self.copies[i].1 == v)
            .collect()
    }

    /// BFS spanning tree over underlying adjacency; per tree pair the
    /// smallest copy id represents it.
    fn spanning_tree_copies(&self) -> Result<Vec<CopyId>> {
        if self.n == 0 {
            return Ok(Vec::new());
        }
        let mut best: std::collections::BTreeMap<Edge, CopyId> = std::collections::BTreeMap::new();
        for (i, &e) in self.copies.iter().enumerate() {
            best.entry(e).or_insert(i);
        }
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in best.keys() {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let mut seen = vec![false; self.n];
        seen[0] = true;
        let mut queue = std::collections::VecDeque::from([0usize]);
        let mut tree = Vec::new();
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    tree.push(best[&edge(x, y)]);
                    queue.push_back(y);
                }
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::NotConnected);
        }
        tree.sort_unstable();
        Ok(tree)
    }
}

/// Per-copy multiplicities (0, 1, or 2) over an [`EdgeCopies`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TourEdges {
    pub mult: Vec<usize>,
}

impl TourEdges {
    pub fn zero(ec: &EdgeCopies) -> Self {
        TourEdges {
            mult: vec![0; ec.copy_count()],
        }
    }

    pub fn edge_count(&self) -> usize {
        self.mult.iter().sum()
    }

    pub fn degree(&self, ec: &EdgeCopies, v: usize) -> usize {
        ec.copies()
            .iter()
            .zip(&self.mult)
            .filter(|(&(a, b), _)| a == v || b == v)
            .map(|(_, &m)| m)
            .sum()
    }

    pub fn to_multigraph(&self, ec: &EdgeCopies) -> Multigraph {
        let mut mg = Multigraph::new(ec.node_count());
        for (&(u, v), &m) in ec.copies().iter().zip(&self.mult) {
            if m > 0 {
                mg.add_edge(u, v, m);
            }
        }
        mg
    }
}

/// A 4-cycle `v1-v2-v3-v4` with chord `{v2, v4}`. The chord endpoints have
/// all three edges inside the gadget; `v1` and `v3` carry one external edge
/// each.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChordedFourCycle {
    pub nodes: [usize; 4],
}

impl ChordedFourCycle {
    pub fn sorted(&self) -> [usize; 4] {
        let mut s = self.nodes;
        s.sort_unstable();
        s
    }

    pub fn v1(&self) -> usize {
        self.nodes[0]
    }

    pub fn v3(&self) -> usize {
        self.nodes[2]
    }
}

/// One contraction step with the copy- and node-mappings of its stage.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContractionRecordC4 {
    pub n_before: usize,
    pub copies_before: usize,
    pub gadget: ChordedFourCycle,
    /// Replacement node id in the contracted multigraph.
    pub w: usize,
    /// External copies of `v1` and `v3` in the stage-before graph.
    pub ext1_before: CopyId,
    pub ext3_before: CopyId,
    /// The same external copies as seen at `w` in the contracted graph.
    pub w_copy1: CopyId,
    pub w_copy3: CopyId,
    /// Internal gadget copies in the stage-before graph:
    /// `[v1v2, v2v3, v3v4, v4v1, chord v2v4]`.
    pub internal_before: [CopyId; 5],
    old_of_new: Vec<usize>,
    new_of_old: Vec<usize>,
    before_of_after: Vec<CopyId>,
}

/// Maximal node-disjoint family of chorded 4-cycles, greedy by smallest
/// node ids, plus the union of their nodes.
pub fn find_chorded_4cycles(g: &Graph) -> Result<(Vec<ChordedFourCycle>, BTreeSet<usize>)> {
    if g.node_count() == 4 && g.edge_count() == 6 {
        return Err(Error::IsK4);
    }
    let mut candidates: Vec<ChordedFourCycle> = Vec::new();
    let mut seen: BTreeSet<[usize; 4]> = BTreeSet::new();
    for &(b, d) in g.edges() {
        // Treat {b, d} as the chord; both endpoints then have closed
        // neighborhood {a, c, each other}.
        let common: Vec<usize> = g
            .neighbors(b)
            .iter()
            .copied()
            .filter(|&w| w != d && g.has_edge(d, w))
            .collect();
        if common.len() != 2 || g.degree(b) != 3 || g.degree(d) != 3 {
            continue;
        }
        let (a, c) = (common[0], common[1]);
        if g.has_edge(a, c) {
            continue; // K4 as a component; nothing to contract
        }
        let mut key = [a, b, c, d];
        key.sort_unstable();
        if seen.insert(key) {
            let (v1, v3) = (a.min(c), a.max(c));
            let (v2, v4) = (b.min(d), b.max(d));
            candidates.push(ChordedFourCycle {
                nodes: [v1, v2, v3, v4],
            });
        }
    }
    candidates.sort_by_key(|g4| g4.sorted());
    let mut family = Vec::new();
    let mut taken: BTreeSet<usize> = BTreeSet::new();
    for cand in candidates {
        if cand.nodes.iter().all(|v| !taken.contains(v)) {
            taken.extend(cand.nodes);
            family.push(cand);
        }
    }
    Ok((family, taken))
}

fn contract_one(
    before: &EdgeCopies,
    gadget: ChordedFourCycle,
) -> (EdgeCopies, ContractionRecordC4) {
    let n = before.node_count();
    let [v1, v2, v3, v4] = gadget.nodes;
    let set: BTreeSet<usize> = gadget.nodes.iter().copied().collect();

    let find_copy = |a: usize, b: usize| -> CopyId {
        before
            .copies()
            .iter()
            .position(|&e| e == edge(a, b))
            .expect("gadget edge present")
    };
    let internal_before = [
        find_copy(v1, v2),
        find_copy(v2, v3),
        find_copy(v3, v4),
        find_copy(v4, v1),
        find_copy(v2, v4),
    ];
    let external_of = |v: usize| -> CopyId {
        before
            .incident(v)
            .into_iter()
            .find(|&i| {
                let (a, b) = before.endpoints(i);
                !(set.contains(&a) && set.contains(&b))
            })
            .expect("gadget corner has an external copy")
    };
    let ext1_before = external_of(v1);
    let ext3_before = external_of(v3);

    let plain: Vec<usize> = (0..n).filter(|v| !set.contains(v)).collect();
    let mut new_of_old = vec![usize::MAX; n];
    for (new, &old) in plain.iter().enumerate() {
        new_of_old[old] = new;
    }
    let w = n - 4;
    let mut old_of_new = plain;
    old_of_new.push(usize::MAX);

    let internal: BTreeSet<CopyId> = internal_before.iter().copied().collect();
    let mut copies = Vec::new();
    let mut before_of_after = Vec::new();
    let mut w_copy1 = usize::MAX;
    let mut w_copy3 = usize::MAX;
    for (i, &(a, b)) in before.copies().iter().enumerate() {
        if internal.contains(&i) {
            continue;
        }
        let map = |v: usize| if set.contains(&v) { w } else { new_of_old[v] };
        let id = copies.len();
        copies.push(edge(map(a), map(b)));
        before_of_after.push(i);
        if i == ext1_before {
            w_copy1 = id;
        }
        if i == ext3_before {
            w_copy3 = id;
        }
    }
    let after = EdgeCopies { n: n - 3, copies };
    let record = ContractionRecordC4 {
        n_before: n,
        copies_before: before.copy_count(),
        gadget,
        w,
        ext1_before,
        ext3_before,
        w_copy1,
        w_copy3,
        internal_before,
        old_of_new,
        new_of_old,
        before_of_after,
    };
    (after, record)
}

/// Contract a node-disjoint family one gadget at a time. Each record keeps
/// the mappings of its own stage; later gadgets are renumbered through
/// earlier contractions. Every gadget node ends with degree 2.
pub fn contract_chorded(
    g: &Graph,
    family: &[ChordedFourCycle],
) -> (EdgeCopies, Vec<ContractionRecordC4>) {
    let mut current = EdgeCopies::from_graph(g);
    let mut pending: Vec<ChordedFourCycle> = family.to_vec();
    let mut records = Vec::new();
    while !pending.is_empty() {
        let gadget = pending.remove(0);
        let (next, record) = contract_one(&current, gadget);
        for later in &mut pending {
            for v in &mut later.nodes {
                *v = record.new_of_old[*v];
            }
        }
        current = next;
        records.push(record);
    }
    (current, records)
}

/// Undo one contraction on a spanning even-degree tour multigraph. If both
/// external copies at the gadget node appear an odd number of times, the
/// three-edge path through the chord is spliced in (+3 edges); otherwise
/// the full 4-cycle (+4 edges).
pub fn uncontract_tour_multigraph(
    rec: &ContractionRecordC4,
    t_after: &TourEdges,
) -> Result<TourEdges> {
    let mut mult = vec![0usize; rec.copies_before];
    for (after_id, &before_id) in rec.before_of_after.iter().enumerate() {
        mult[before_id] = t_after.mult[after_id];
    }
    let m1 = t_after.mult[rec.w_copy1];
    let m3 = t_after.mult[rec.w_copy3];
    if (m1 + m3) % 2 != 0 {
        return Err(Error::OddDegreeAtGadget(rec.w));
    }
    let [c12, c23, c34, c41, chord] = rec.internal_before;
    if m1 % 2 == 1 && m3 % 2 == 1 {
        mult[c12] += 1;
        mult[chord] += 1;
        mult[c34] += 1;
    } else {
        mult[c12] += 1;
        mult[c23] += 1;
        mult[c34] += 1;
        mult[c41] += 1;
    }
    Ok(TourEdges { mult })
}

/// Undo a whole stack, newest record first.
pub fn uncontract_all(records: &[ContractionRecordC4], t: &TourEdges) -> Result<TourEdges> {
    let mut current = t.clone();
    for rec in records.iter().rev() {
        current = uncontract_tour_multigraph(rec, &current)?;
    }
    Ok(current)
}

/// Replay a contraction stack, returning the multigraph at every stage:
/// `stages[0]` is the original graph, `stages[i]` the graph after the first
/// `i` contractions.
pub fn contraction_stages(g: &Graph, records: &[ContractionRecordC4]) -> Vec<EdgeCopies> {
    let mut stages = vec![EdgeCopies::from_graph(g)];
    for rec in records {
        let (next, _) = contract_one(stages.last().unwrap(), rec.gadget);
        stages.push(next);
    }
    stages
}

/// How to build the test tour multigraph on the contracted graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TourProvider {
    /// Doubled spanning tree: every multiplicity even.
    DoubledTree,
    /// A 2-factor plus a doubled tree connecting its components: factor
    /// copies appear exactly once.
    FactorPlusTree,
}

/// Spanning connected even-degree tour multigraph with multiplicities at
/// most 2 per copy.
pub fn default_tour_multigraph(ec: &EdgeCopies, provider: TourProvider) -> Result<TourEdges> {
    match provider {
        TourProvider::DoubledTree => {
            let tree = ec.spanning_tree_copies()?;
            let mut t = TourEdges::zero(ec);
            for id in tree {
                t.mult[id] = 2;
            }
            Ok(t)
        }
        TourProvider::FactorPlusTree => {
            let selected = two_factor_copies(ec)?;
            let mut t = TourEdges::zero(ec);
            let mut factor_edges: BTreeSet<Edge> = BTreeSet::new();
            for (id, &take) in selected.iter().enumerate() {
                if take {
                    t.mult[id] = 1;
                    factor_edges.insert(ec.endpoints(id));
                }
            }
            let comps = crate::graph::connected_components(&factor_edges, ec.node_count());
            let mut comp_of = vec![usize::MAX; ec.node_count()];
            for (i, comp) in comps.iter().enumerate() {
                for &v in comp {
                    comp_of[v] = i;
                }
            }
            // Doubled tree over the factor components, smallest copy first.
            let mut best: std::collections::BTreeMap<Edge, CopyId> =
                std::collections::BTreeMap::new();
            for (id, &(u, v)) in ec.copies().iter().enumerate() {
                let (cu, cv) = (comp_of[u], comp_of[v]);
                if cu != cv {
                    best.entry(edge(cu, cv)).or_insert(id);
                }
            }
            let mut supergraph = Multigraph::new(comps.len());
            for &(cu, cv) in best.keys() {
                supergraph.add_edge(cu, cv, 1);
            }
            for (cu, cv) in supergraph.spanning_tree()? {
                t.mult[best[&edge(cu, cv)]] = 2;
            }
            Ok(t)
        }
    }
}

/// First (in canonical copy order) subset of copies giving every node
/// degree exactly 2.
pub fn two_factor_copies(ec: &EdgeCopies) -> Result<Vec<bool>> {
    let n = ec.node_count();
    if n > MAX_ENUM_NODES {
        return Err(Error::TooLarge {
            n,
            cap: MAX_ENUM_NODES,
        });
    }
    let copies = ec.copies();
    let mut degree = vec![0usize; n];
    let mut slack = vec![0usize; n];
    for &(u, v) in copies {
        slack[u] += 1;
        slack[v] += 1;
    }
    let mut selected = vec![false; copies.len()];
    fn step(
        idx: usize,
        copies: &[Edge],
        degree: &mut [usize],
        slack: &mut [usize],
        selected: &mut [bool],
    ) -> bool {
        if idx == copies.len() {
            return degree.iter().all(|&d| d == 2);
        }
        let (u, v) = copies[idx];
        slack[u] -= 1;
        slack[v] -= 1;
        if degree[u] < 2 && degree[v] < 2 {
            degree[u] += 1;
            degree[v] += 1;
            selected[idx] = true;
            if step(idx + 1, copies, degree, slack, selected) {
                return true;
            }
            selected[idx] = false;
            degree[u] -= 1;
            degree[v] -= 1;
        }
        if degree[u] + slack[u] >= 2
            && degree[v] + slack[v] >= 2
            && step(idx + 1, copies, degree, slack, selected)
        {
            return true;
        }
        slack[u] += 1;
        slack[v] += 1;
        false
    }
    if !step(0, copies, &mut degree, &mut slack, &mut selected) {
        return Err(Error::NoTwoFactor);
    }
    Ok(selected)
}

/// Tour length bound from the contraction-averse side:
/// `4b/3 + (4/3 - 1/8748)(n - b) + 2`.
pub fn bound_cls(n: usize, b: usize) -> BigRational {
    assert!(b <= n);
    rat(4, 3) * rat_int(b) + (rat(4, 3) - rat(1, 8748)) * rat_int(n - b) + rat(2, 1)
}

/// Tour length bound from the contraction-friendly side:
/// `4n/3 - b/6 - 2/3`.
pub fn bound_ms(n: usize, b: usize) -> BigRational {
    assert!(b <= n);
    rat(4, 3) * rat_int(n) - rat(1, 6) * rat_int(b) - rat(2, 3)
}

/// Where the two bounds meet, additive constants dropped.
#[derive(Debug, Clone)]
pub struct CombinedBound {
    /// Chorded-4-cycle node count at the crossing: n/1459.
    pub b_star: BigRational,
    /// Per-node coefficient there: 4/3 - 1/8754.
    pub coefficient: BigRational,
}

pub fn combined_bound(n: usize) -> CombinedBound {
    CombinedBound {
        b_star: rat_int(n) * rat(1, 1459),
        coefficient: rat(4, 3) - rat(1, 8754),
    }
}

/// Report from the gadget pipeline on a general cubic graph.
#[derive(Debug, Clone, Serialize)]
pub struct CubicSolveReport {
    pub schema: u32,
    pub n: usize,
    pub gadgets: usize,
    pub b_size: usize,
    pub contracted_nodes: usize,
    pub provider: TourProvider,
    pub contracted_edges: usize,
    pub uncontracted_edges: usize,
    /// Edge-count increase per gadget, in uncontraction order.
    pub deltas: Vec<usize>,
    pub tour: Vec<usize>,
    pub tour_length: usize,
}

/// Detect, contract, build a tour multigraph with the chosen provider,
/// uncontract, and shortcut to a tour of the original graph. K4
/// short-circuits to its own 4-cycle.
pub fn solve_cubic(g: &Graph, provider: TourProvider) -> Result<CubicSolveReport> {
    let n = g.node_count();
    let (family, b) = match find_chorded_4cycles(g) {
        Err(Error::IsK4) => {
            return Ok(CubicSolveReport {
                schema: 1,
                n,
                gadgets: 0,
                b_size: 4,
                contracted_nodes: 4,
                provider,
                contracted_edges: 0,
                uncontracted_edges: 4,
                deltas: Vec::new(),
                tour: vec![0, 1, 2, 3],
                tour_length: 4,
            });
        }
        other => other?,
    };
    let (contracted, records) = contract_chorded(g, &family);
    let t = default_tour_multigraph(&contracted, provider)?;
    let contracted_edges = t.edge_count();

    let stages = contraction_stages(g, &records);
    let mut deltas = Vec::new();
    let mut current = t;
    for (rec, stage) in records.iter().rev().zip(stages.iter().rev().skip(1)) {
        let before = current.edge_count();
        current = uncontract_tour_multigraph(rec, &current)?;
        deltas.push(current.edge_count() - before);
        check_tour_multigraph(stage, &current)?;
    }
    let original = stages.first().unwrap();
    check_tour_multigraph(original, &current)?;
    let walk = current.to_multigraph(original).eulerian_circuit()?;
    let tour = shortcut_walk(g, &walk)?;
    Ok(CubicSolveReport {
        schema: 1,
        n,
        gadgets: family.len(),
        b_size: b.len(),
        contracted_nodes: contracted.node_count(),
        provider,
        contracted_edges,
        uncontracted_edges: current.edge_count(),
        deltas,
        tour: tour.order,
        tour_length: tour.length,
    })
}

/// Spanning, connected, all degrees even and positive, all copy
/// multiplicities at most 2.
pub fn check_tour_multigraph(ec: &EdgeCopies, t: &TourEdges) -> Result<()> {
    if t.mult.len() != ec.copy_count() {
        return Err(Error::InvariantBreach(
            "tour multigraph on the wrong copy set".into(),
        ));
    }
    if t.mult.iter().any(|&m| m > 2) {
        return Err(Error::InvariantBreach("copy multiplicity above 2".into()));
    }
    for v in 0..ec.node_count() {
        let d = t.degree(ec, v);
        if d == 0 {
            return Err(Error::InvariantBreach(format!(
                "tour multigraph misses node {v}"
            )));
        }
        if d % 2 != 0 {
            return Err(Error::OddDegree { node: v, degree: d });
        }
    }
    if !t.to_multigraph(ec).is_connected() {
        return Err(Error::NotConnected);
    }
    Ok(())
}
