mod common;

use std::collections::{BTreeSet, HashSet};

use proptest::prelude::*;
use satmatch_core::matching::deferred_acceptance_random_order;
use satmatch_core::*;

use common::{graph_from_mask, stable_by_brute_force};

fn small_graph(max: usize) -> impl Strategy<Value = BipartiteGraph> {
    (1..=max, 1..=max)
        .prop_flat_map(|(nx, ny)| (Just(nx), Just(ny), 0u64..(1u64 << (nx * ny))))
        .prop_map(|(nx, ny, mask)| graph_from_mask(nx, ny, mask))
}

fn any_vertex(g: &BipartiteGraph) -> Vec<VertexId> {
    Side::BOTH.iter().flat_map(|&s| g.vertices(s)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn neighborhoods_are_symmetric(g in small_graph(5)) {
        for v in any_vertex(&g) {
            for w in g.neighborhood(v).unwrap() {
                prop_assert!(g.neighborhood(w).unwrap().contains(&v));
            }
        }
    }

    #[test]
    fn set_neighborhood_is_monotone_and_subadditive(g in small_graph(5), a in 0u8..32, b in 0u8..32) {
        let pick = |mask: u8| -> Vec<VertexId> {
            g.vertices(Side::X).filter(|v| mask >> v.index & 1 == 1).collect()
        };
        let (s, t) = (pick(a), pick(b));
        let union: Vec<VertexId> = s.iter().chain(&t).copied().collect::<BTreeSet<_>>().into_iter().collect();
        let ns = g.neighborhood_of_set(&s).unwrap();
        let nt = g.neighborhood_of_set(&t).unwrap();
        let nu = g.neighborhood_of_set(&union).unwrap();
        prop_assert!(nu.len() <= ns.len() + nt.len());
        prop_assert!(ns.is_subset(&nu));
    }

    #[test]
    fn components_partition_the_graph(g in small_graph(5)) {
        let comps = g.components();
        let xs: usize = comps.iter().map(|c| c.graph.x_count()).sum();
        let ys: usize = comps.iter().map(|c| c.graph.y_count()).sum();
        prop_assert_eq!(xs + ys, g.x_count() + g.y_count());
        let es: usize = comps.iter().map(|c| c.graph.edge_count()).sum();
        prop_assert_eq!(es, g.edge_count());
        for c in &comps {
            for (x, y) in c.graph.edges() {
                prop_assert!(g.has_edge(c.x_map[x], c.y_map[y]));
            }
        }
        if g.is_biclique() {
            for v in any_vertex(&g) {
                prop_assert_eq!(g.degree(v).unwrap(), g.side_len(v.side.opposite()));
            }
        }
    }

    #[test]
    fn prefers_is_a_strict_total_order(g in small_graph(4), seed in any::<u64>()) {
        let p = PreferenceInstance::sample_uniform(&g, seed);
        for v in any_vertex(&g) {
            let other = v.side.opposite();
            let mut options: Vec<Option<VertexId>> =
                g.adjacent(v).iter().map(|&i| Some(VertexId::new(other, i))).collect();
            options.push(None);
            for &a in &options {
                prop_assert!(!p.prefers(v, a, a).unwrap());
                if a.is_some() {
                    prop_assert!(p.prefers(v, a, None).unwrap());
                }
                for &b in &options {
                    if a != b {
                        prop_assert!(p.prefers(v, a, b).unwrap() ^ p.prefers(v, b, a).unwrap());
                    }
                    for &c in &options {
                        if p.prefers(v, a, b).unwrap() && p.prefers(v, b, c).unwrap() {
                            prop_assert!(p.prefers(v, a, c).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn samples_pass_validation(g in small_graph(5), seed in any::<u64>()) {
        let p = PreferenceInstance::sample_uniform(&g, seed);
        let raw: RawPreferences = any_vertex(&g)
            .into_iter()
            .map(|v| {
                let other = v.side.opposite();
                (v, p.list(v).iter().map(|&i| VertexId::new(other, i)).collect())
            })
            .collect();
        prop_assert_eq!(PreferenceInstance::validate(&g, &raw).unwrap(), p);
    }

    #[test]
    fn enumeration_yields_each_instance_once(g in small_graph(3)) {
        let count = instance_count(&g).0;
        prop_assume!(count <= 5_000);
        let all: Vec<_> = PreferenceInstance::enumerate_all(&g, 5_000).unwrap().collect();
        prop_assert_eq!(all.len() as u128, count);
        prop_assert_eq!(all.iter().collect::<HashSet<_>>().len(), all.len());
    }

    #[test]
    fn deferred_acceptance_is_stable_and_optimal(g in small_graph(4), seed in any::<u64>()) {
        let p = PreferenceInstance::sample_uniform(&g, seed);
        let set = enumerate_stable(&g, &p, DEFAULT_NODE_CAP).unwrap();
        for side in Side::BOTH {
            let best = deferred_acceptance(&g, &p, side);
            prop_assert!(is_stable(&g, &p, &best));
            prop_assert!(find_blocking_pairs(&g, &p, &best).is_empty());
            prop_assert_eq!(&best, &deferred_acceptance_random_order(&g, &p, side, seed ^ 0x5eed));
            prop_assert!(set.matchings.contains(&best));
            for m in &set.matchings {
                for v in g.vertices(side) {
                    let ours = best.partner(v);
                    let theirs = m.partner(v);
                    prop_assert!(ours == theirs || p.prefers(v, ours, theirs).unwrap());
                }
            }
        }
    }

    #[test]
    fn matched_sets_agree_across_stable_matchings(g in small_graph(4), seed in any::<u64>()) {
        let p = PreferenceInstance::sample_uniform(&g, seed);
        let set = enumerate_stable(&g, &p, DEFAULT_NODE_CAP).unwrap();
        prop_assert!(!set.matchings.is_empty());
        for m in &set.matchings {
            prop_assert_eq!(&m.matched_set(Side::X), &set.matched_x);
            prop_assert_eq!(&m.matched_set(Side::Y), &set.matched_y);
        }
    }

    #[test]
    fn stable_matchings_never_beat_maximum(g in small_graph(4), seed in any::<u64>()) {
        let p = PreferenceInstance::sample_uniform(&g, seed);
        let max = maximum_matching(&g);
        let set = enumerate_stable(&g, &p, DEFAULT_NODE_CAP).unwrap();
        for m in &set.matchings {
            prop_assert!(m.size() <= max.size());
            if m.is_saturating(Side::X) {
                prop_assert_eq!(max.size(), g.x_count());
            }
        }
    }

    #[test]
    fn enumeration_matches_brute_force(g in small_graph(4), seed in any::<u64>()) {
        let p = PreferenceInstance::sample_uniform(&g, seed);
        let ours: Vec<Vec<Option<usize>>> = enumerate_stable(&g, &p, DEFAULT_NODE_CAP)
            .unwrap()
            .matchings
            .iter()
            .map(|m| m.partners(Side::X).to_vec())
            .collect();
        prop_assert_eq!(ours, stable_by_brute_force(&g, &p));
    }

    #[test]
    fn satisfied_vertices_are_always_matched(g in small_graph(4), seed in any::<u64>()) {
        let p = PreferenceInstance::sample_uniform(&g, seed);
        let set = enumerate_stable(&g, &p, DEFAULT_NODE_CAP).unwrap();
        for side in Side::BOTH {
            for r in saturation_verdict(&g, side).reports.iter().filter(|r| r.satisfied) {
                prop_assert!(set.matched(side).contains(&r.vertex));
            }
        }
    }

    #[test]
    fn adversarial_instance_strands_its_target(g in small_graph(4)) {
        for side in Side::BOTH {
            for v in g.vertices(side) {
                match adversarial_instance(&g, v) {
                    Ok(p) => {
                        let set = enumerate_stable(&g, &p, DEFAULT_NODE_CAP).unwrap();
                        prop_assert!(set.matchings.iter().all(|m| m.partner(v).is_none()));
                    }
                    Err(AnalysisError::HallObstruction { .. }) => {
                        // Matched under any instance; spot-check one.
                        let p = PreferenceInstance::sample_uniform(&g, v.index as u64);
                        let set = enumerate_stable(&g, &p, DEFAULT_NODE_CAP).unwrap();
                        prop_assert!(set.matched(side).contains(&v));
                    }
                    Err(_) => {
                        let r = vertex_report(&g, v).unwrap();
                        prop_assert!(r.satisfied || r.isolated);
                    }
                }
            }
        }
    }

    #[test]
    fn one_stable_matching_speaks_for_all(g in small_graph(4), seed in any::<u64>()) {
        let p = PreferenceInstance::sample_uniform(&g, seed);
        let set = enumerate_stable(&g, &p, DEFAULT_NODE_CAP).unwrap();
        let da = deferred_acceptance(&g, &p, Side::X);
        prop_assert_eq!(da.is_saturating(Side::X), set.all_saturating(Side::X));
    }

    #[test]
    fn reports_recompute_after_adding_an_edge(g in small_graph(4), x in 0usize..4, y in 0usize..4) {
        prop_assume!(x < g.x_count() && y < g.y_count() && !g.has_edge(x, y));
        let mut edges: Vec<(usize, usize)> = g.edges().collect();
        edges.push((x, y));
        let grown = BipartiteGraph::new(g.x_count(), g.y_count(), edges.iter().copied()).unwrap();
        let rebuilt = BipartiteGraph::new(g.x_count(), g.y_count(), edges.iter().rev().copied()).unwrap();
        let v = VertexId::x(x);
        let report = vertex_report(&grown, v).unwrap();
        prop_assert_eq!(report, vertex_report(&rebuilt, v).unwrap());
        if let Some(w) = report.cond2_witness {
            prop_assert_eq!(grown.degree(w).unwrap(), 1);
            prop_assert!(grown.has_edge(x, w.index));
        }
    }

    #[test]
    fn perfect_verdict_agrees_with_component_verdict(n in 1usize..=3, mask in 0u64..512) {
        let g = graph_from_mask(n, n, mask & ((1 << (n * n)) - 1));
        prop_assert_eq!(perfect_verdict(&g), component_verdict(&g).unwrap().holds);
    }
}

fn set(v: &[usize]) -> BTreeSet<usize> {
    v.iter().copied().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn induced_neighborhoods_follow_class_sizes(
        n in 1usize..=3,
        extra in proptest::collection::vec(1u8..8, 0..3),
        ys in proptest::collection::vec(0usize..3, 0..5),
    ) {
        let mut membership: Vec<BTreeSet<usize>> = (0..n).map(|i| set(&[i])).collect();
        for m in extra {
            let classes: BTreeSet<usize> = (0..n).filter(|i| m >> i & 1 == 1).collect();
            if !classes.is_empty() {
                membership.push(classes);
            }
        }
        let y_class: Vec<usize> = ys.into_iter().map(|c| c % n).collect();
        let market = CompatibilityMarket::new(n, membership, y_class).unwrap();
        let g = market.induced_graph();
        for (x, q) in market.x_membership().iter().enumerate() {
            let v = VertexId::x(x);
            let b_sum: usize = q.iter().map(|&i| market.class_y(i).count()).sum();
            // Classes with empty B_i are not reachable through N(x).
            let a_union: BTreeSet<usize> =
                q.iter().filter(|&&i| market.class_y(i).count() > 0).flat_map(|&i| market.class_x(i)).collect();
            let c1 = check_condition1(&g, v).unwrap();
            prop_assert_eq!(c1.n_size, b_sum);
            prop_assert_eq!(c1.nn_size, a_union.len());
            if market.class_verdict().holds {
                prop_assert!(c1.holds);
            }
        }
        prop_assert!(market.verdict_consistency().consistent);
    }
}
