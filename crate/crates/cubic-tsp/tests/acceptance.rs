//! Acceptance suite: one test per shipped guarantee, each printing a
//! PASS line with the measured values. Run with `cargo test --test
//! acceptance -- --nocapture` to see them.

use std::collections::BTreeSet;
use std::time::Instant;

use cubic_tsp::batch;
use cubic_tsp::certify::{build_alpha_certificate, check_certificate};
use cubic_tsp::cubic3::{
    bound_cls, bound_ms, check_tour_multigraph, combined_bound, contract_chorded,
    default_tour_multigraph, find_chorded_4cycles, two_factor_copies, uncontract_tour_multigraph,
    TourProvider,
};
use cubic_tsp::gen;
use cubic_tsp::improve::{run_local_improvement_with, ImproveConfig};
use cubic_tsp::oracle;
use cubic_tsp::rational::{rat, rat_int};
use cubic_tsp::reduce4;
use cubic_tsp::tour::solve_bipartite;

fn debug_cfg() -> ImproveConfig {
    ImproveConfig {
        debug_invariants: true,
    }
}

#[test]
fn criterion_1_appendix_tightness() {
    let start = Instant::now();
    let fx = gen::fixture("appendix48").unwrap();
    let f1 = fx.known.f1.clone().unwrap();
    let f2 = fx.known.f2.clone().unwrap();
    let out = run_local_improvement_with(&fx.graph, f1, f2, debug_cfg()).unwrap();
    assert_eq!(
        out.modifications, 0,
        "published factors are already locally optimal"
    );
    assert_eq!(out.k1(), 6);
    assert_eq!(out.k2(), 6);
    assert_eq!(out.k1(), 48 / 8);

    let cert = build_alpha_certificate(&out.f1, &out.f2, 48).unwrap();
    let report = check_certificate(&cert, out.f1.cycles()).unwrap();
    assert!(report.global_ok);
    assert!(
        report.global_tight,
        "(1/4)*6 + (3/4)*6 must equal 48/8 exactly"
    );
    let lhs = rat(1, 4) * rat_int(out.k1()) + rat(3, 4) * rat_int(out.k2());
    assert_eq!(lhs, rat_int(6));
    println!(
        "PASS criterion 1: appendix tightness (0 modifications, K1=K2=6, certificate tight) in {:?}",
        start.elapsed()
    );
    assert!(start.elapsed().as_secs() < 1);
}

#[test]
fn criterion_2_appendix_hamilton_cycle() {
    let start = Instant::now();
    let fx = gen::fixture("appendix48").unwrap();
    let ham = fx.known.hamilton.as_ref().unwrap();
    assert_eq!(ham.len(), 48);
    let distinct: BTreeSet<usize> = ham.iter().copied().collect();
    assert_eq!(distinct.len(), 48, "every node exactly once");
    for i in 0..48 {
        assert!(
            fx.graph.has_edge(ham[i], ham[(i + 1) % 48]),
            "tour edge {} missing",
            i
        );
    }
    println!(
        "PASS criterion 2: published 48-node Hamilton cycle validates in {:?}",
        start.elapsed()
    );
    assert!(start.elapsed().as_secs() < 1);
}

#[test]
fn criterion_3_theorem_bound_at_desk_scale() {
    let start = Instant::now();
    let fx = gen::fixture("appendix48").unwrap();
    let out = solve_bipartite(&fx.graph, debug_cfg()).unwrap();
    assert!(
        out.factor.component_count() <= 6,
        "components {}",
        out.factor.component_count()
    );
    assert!(out.tour.length <= 58, "tour length {}", out.tour.length);
    assert_eq!(58, 5 * 48 / 4 - 2);
    println!(
        "PASS criterion 3: solve(appendix48) gives {} components, tour {} <= 58, in {:?}",
        out.factor.component_count(),
        out.tour.length,
        start.elapsed()
    );
    assert!(start.elapsed().as_secs() < 1);
}

#[test]
fn criterion_4_fuzz_bound_suite() {
    let start = Instant::now();
    // 500 seeded instances, n in {16, ..., 40}.
    let graphs = batch::fuzz_instances(500, 8, 20, 0).unwrap();
    let results = batch::solve_batch(&graphs, debug_cfg());
    let mut stalls = 0usize;
    for (g, result) in graphs.iter().zip(results) {
        let n = g.node_count();
        let out = result.unwrap_or_else(|e| panic!("n={n}: {e}"));
        if out.engine_stalled {
            stalls += 1;
        }
        assert!(
            out.factor.component_count() <= n / 8,
            "n={n}: {} components",
            out.factor.component_count()
        );
        assert!(
            4 * out.tour.length <= 5 * n - 8,
            "n={n}: tour {}",
            out.tour.length
        );
    }
    println!(
        "PASS criterion 4: 500 fuzz instances within cap, invariants clean, bounds met \
         ({stalls} exact-cover stalls) in {:?}",
        start.elapsed()
    );
    assert!(start.elapsed().as_secs() < 60);
}

#[test]
fn criterion_5_oracle_equivalence_small() {
    let start = Instant::now();
    let mut instances = Vec::new();
    for name in ["k33", "q3", "heawood"] {
        instances.push(gen::fixture(name).unwrap().graph);
    }
    for half_n in 3..=7usize {
        for seed in 0..8u64 {
            instances.push(gen::random_cubic_bipartite(half_n, seed * 13 + half_n as u64).unwrap());
        }
    }
    for g in &instances {
        let n = g.node_count();
        let out = solve_bipartite(g, debug_cfg()).unwrap();
        let (k_min, _) = oracle::min_cycle_cover_components(g).unwrap();
        assert_eq!(
            out.factor.component_count(),
            k_min,
            "n={n}: solver must match the exact minimum cycle cover"
        );
        let opt = oracle::exact_tsp(g).unwrap();
        assert!(out.tour.length >= opt, "n={n}: beat the optimum?");
        assert!(
            out.tour.length <= n + 2 * k_min - 2,
            "n={n}: above n + 2k - 2"
        );
    }
    println!(
        "PASS criterion 5: {} small instances match the exact oracle in {:?}",
        instances.len(),
        start.elapsed()
    );
    assert!(start.elapsed().as_secs() < 120);
}

#[test]
fn criterion_6_reduction_soundness() {
    let start = Instant::now();
    let mut instances = vec![gen::fixture("q3").unwrap().graph];
    for i in 0..100u64 {
        let half_n = 4 + (i % 4) as usize; // 8 to 14 nodes
        instances.push(gen::random_cubic_bipartite(half_n, 1000 + i).unwrap());
    }
    let mut accepted = 0usize;
    let mut round_trips = 0usize;
    for g in &instances {
        // Soundness of the combinatorial rule against the existential test.
        let mut current = g.clone();
        while let Some(s) = reduce4::find_contractible_4cycle(&current) {
            accepted += 1;
            if current.node_count() <= oracle::MAX_ENUM_NODES {
                assert!(
                    oracle::is_potential_4cycle_exact(&current, &s.sorted()).unwrap(),
                    "rule accepted a non-potential 4-cycle"
                );
            }
            let (next, _) = reduce4::contract_4cycle(&current, &s).unwrap();
            current = next;
        }
        // Round trips never raise the component count.
        let (reduced, records) = reduce4::reduce_all(g).unwrap();
        if records.is_empty() {
            continue;
        }
        for f in oracle::enumerate_two_factors(&reduced).unwrap() {
            let lifted = reduce4::uncontract_stack(&records, &f).unwrap();
            assert!(lifted.component_count() <= f.component_count());
            round_trips += 1;
        }
    }
    assert!(accepted > 0, "no contractible 4-cycles in the whole corpus");
    println!(
        "PASS criterion 6: {accepted} rule-accepted squares all potential, \
         {round_trips} round trips never raised components, in {:?}",
        start.elapsed()
    );
    assert!(start.elapsed().as_secs() < 60);
}

#[test]
fn criterion_7_section3_arithmetic() {
    let start = Instant::now();
    let cb = combined_bound(8754);
    assert_eq!(cb.coefficient, rat(11671, 8754));
    assert_eq!(cb.coefficient, rat(4, 3) - rat(1, 8754));
    assert_eq!(cb.b_star, rat_int(8754) * rat(1, 1459));
    assert_eq!(combined_bound(1459).b_star, rat_int(1));

    // Symbolic checks at b = 0, b = n, and b = n/1459 (pick n = 1459 * 12).
    let n = 1459 * 12;
    assert_eq!(
        bound_cls(n, 0),
        (rat(4, 3) - rat(1, 8748)) * rat_int(n) + rat(2, 1)
    );
    assert_eq!(bound_cls(n, n), rat(4, 3) * rat_int(n) + rat(2, 1));
    assert_eq!(bound_ms(n, 0), rat(4, 3) * rat_int(n) - rat(2, 3));
    assert_eq!(bound_ms(n, n), rat(7, 6) * rat_int(n) - rat(2, 3));
    let b_star = 12usize;
    assert_eq!(combined_bound(n).b_star, rat_int(b_star));
    assert_eq!(
        bound_ms(n, b_star),
        cb.coefficient.clone() * rat_int(n) - rat(2, 3)
    );
    // Dropping the additive constants, both bounds agree at the crossing.
    assert_eq!(
        bound_cls(n, b_star) - rat(2, 1),
        bound_ms(n, b_star) + rat(2, 3)
    );
    println!(
        "PASS criterion 7: crossing at b = n/1459, coefficient 11671/8754 exact, in {:?}",
        start.elapsed()
    );
    assert!(start.elapsed().as_secs() < 1);
}

#[test]
fn criterion_8_gadget_property_suite() {
    let start = Instant::now();
    let mut instances = vec![gen::fixture("diamond-pair").unwrap().graph];
    let mut produced = 0u64;
    let mut seed = 0u64;
    while instances.len() < 101 {
        seed += 1;
        let base_n = 8 + 2 * ((seed % 3) as usize);
        let diamonds = 1 + (seed % 3) as usize;
        let Ok(base) = gen::random_cubic(base_n, seed) else {
            continue;
        };
        let Ok(g) = gen::plant_diamonds(&base, diamonds, seed + 7000) else {
            continue;
        };
        // Keep only instances where both providers can run.
        let Ok((family, _)) = find_chorded_4cycles(&g) else {
            continue;
        };
        if family.len() < diamonds {
            continue;
        }
        let (contracted, _) = contract_chorded(&g, &family);
        if two_factor_copies(&contracted).is_err() {
            continue;
        }
        instances.push(g);
        produced += 1;
    }
    assert!(produced >= 100);

    let mut checked = 0usize;
    for g in &instances {
        let (family, b) = find_chorded_4cycles(g).unwrap();
        assert!(!family.is_empty());
        assert_eq!(b.len(), 4 * family.len());
        let (contracted, records) = contract_chorded(g, &family);
        let stages = cubic_tsp::cubic3::contraction_stages(g, &records);
        for provider in [TourProvider::DoubledTree, TourProvider::FactorPlusTree] {
            let t = default_tour_multigraph(&contracted, provider).unwrap();
            let mut current = t;
            for (rec, stage) in records.iter().rev().zip(stages.iter().rev().skip(1)) {
                let before = current.edge_count();
                current = uncontract_tour_multigraph(rec, &current).unwrap();
                let delta = current.edge_count() - before;
                assert!(delta == 3 || delta == 4, "delta {delta}");
                check_tour_multigraph(stage, &current).unwrap();
                checked += 1;
            }
        }
    }
    println!(
        "PASS criterion 8: {} instances, {checked} gadget uncontractions spanning/connected/even \
         with deltas in {{3,4}}, in {:?}",
        instances.len(),
        start.elapsed()
    );
    assert!(start.elapsed().as_secs() < 30);
}
