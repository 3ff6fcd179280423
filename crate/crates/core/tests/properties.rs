mod common;

use common::{arb_connected_graph, arb_graph};
use domlab::domination::{self, is_weak_k_dominating_fn, solve, Invariant, SolverConfig};
use domlab::io::{parse_graph6, write_graph6};
use domlab::labeling::{build_context, parse_trace, replay, run_labeling};
use domlab::{cartesian_product, Graph};
use proptest::prelude::*;

fn value(g: &Graph, inv: Invariant) -> u32 {
    solve(g, inv, &SolverConfig::default()).unwrap().value
}

fn claw_by_subsets(g: &Graph) -> bool {
    let n = g.order();
    for c in 0..n {
        let nb = g.neighbors(c);
        for a in 0..nb.len() {
            for b in a + 1..nb.len() {
                for d in b + 1..nb.len() {
                    let (x, y, z) = (nb[a], nb[b], nb[d]);
                    if !g.has_edge(x, y) && !g.has_edge(x, z) && !g.has_edge(y, z) {
                        return true;
                    }
                }
            }
        }
    }
    false
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn graph6_round_trip(g in arb_graph(20)) {
        let s = write_graph6(&g).unwrap();
        prop_assert_eq!(parse_graph6(&s).unwrap(), g);
    }

    #[test]
    fn product_edge_count(g in arb_graph(7), h in arb_graph(7)) {
        let p = cartesian_product(&g, &h).unwrap();
        prop_assert_eq!(p.graph.order(), g.order() * h.order());
        prop_assert_eq!(p.graph.size(), g.order() * h.size() + h.order() * g.size());
        prop_assert_eq!(p.graph.is_connected(), g.is_connected() && h.is_connected());
        for v in 0..p.graph.order() {
            let pv = p.coords(v);
            prop_assert_eq!(p.flat(pv), v);
            prop_assert_eq!(p.graph.degree(v), g.degree(pv.g) + h.degree(pv.h));
        }
    }

    #[test]
    fn private_neighbors_of_independent_dominating_sets(g in arb_graph(10)) {
        let r = domination::independent_gamma(&g).unwrap();
        let s = r.certificate.as_set().unwrap();
        prop_assert!(g.is_independent(s));
        let mut covered = vec![0usize; g.order()];
        for v in s.iter() {
            let pn = g.private_nbhd(v, s).unwrap();
            // members of an independent set have no neighbor in it
            prop_assert!(!pn.intersects(s));
            for w in pn.iter() {
                prop_assert!(g.has_edge(v, w));
                covered[w] += 1;
            }
        }
        for (w, &c) in covered.iter().enumerate() {
            let once = !s.contains(w) && g.row(w).intersection_len(s) == 1;
            prop_assert_eq!(c, usize::from(once));
        }
    }

    #[test]
    fn claw_detection_matches_subset_scan(g in arb_graph(9)) {
        prop_assert_eq!(g.is_claw_free(), !claw_by_subsets(&g));
        if let Some((c, [x, y, z])) = g.find_claw() {
            prop_assert!(g.has_edge(c, x) && g.has_edge(c, y) && g.has_edge(c, z));
            prop_assert!(!g.has_edge(x, y) && !g.has_edge(x, z) && !g.has_edge(y, z));
        }
    }

    #[test]
    fn invariants_add_over_components(g in arb_graph(5), h in arb_graph(5), k in 1u32..=3) {
        let u = g.disjoint_union(&h);
        for inv in Invariant::all(k) {
            prop_assert_eq!(value(&u, inv), value(&g, inv) + value(&h, inv), "{}", inv);
        }
    }

    #[test]
    fn invariant_chain(g in arb_graph(10)) {
        let gamma = value(&g, Invariant::Gamma);
        let i = value(&g, Invariant::IndependentGamma);
        let g2 = value(&g, Invariant::Gamma2);
        let gk = value(&g, Invariant::GammaK(2));
        let gw = value(&g, Invariant::GammaWeakK(2));
        prop_assert!(gamma <= i);
        prop_assert!(gamma <= gw && gw <= gk && gk <= 2 * gamma);
        prop_assert!(gw <= g2 && gamma <= g2);
        if g.is_claw_free() {
            prop_assert_eq!(gamma, i);
        }
    }

    #[test]
    fn k_functions_are_monotone(g in arb_graph(7)) {
        for k in 1..=3 {
            prop_assert!(value(&g, Invariant::GammaK(k)) <= value(&g, Invariant::GammaK(k + 1)));
            prop_assert!(value(&g, Invariant::GammaWeakK(k)) <= value(&g, Invariant::GammaWeakK(k + 1)));
        }
        prop_assert_eq!(value(&g, Invariant::GammaK(1)), value(&g, Invariant::Gamma));
        prop_assert_eq!(value(&g, Invariant::GammaWeakK(1)), value(&g, Invariant::Gamma));
    }

    #[test]
    fn product_domination_upper_bounds(g in arb_graph(4), h in arb_graph(4)) {
        let p = cartesian_product(&g, &h).unwrap();
        let gp = value(&p.graph, Invariant::Gamma);
        let (gg, gh) = (value(&g, Invariant::Gamma), value(&h, Invariant::Gamma));
        prop_assert!(gp as usize <= (gg as usize * h.order()).min(gh as usize * g.order()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn labeling_traces_replay(
        g in arb_connected_graph(5).prop_filter("claw-free", Graph::is_claw_free),
        h in arb_connected_graph(4),
    ) {
        let ctx = build_context(&g, &h).unwrap();
        prop_assert!(is_weak_k_dominating_fn(&ctx.product.graph, ctx.d.weights()));
        let out = run_labeling(&ctx, &SolverConfig::default()).unwrap();
        prop_assert!(out.discrepancy.is_none());
        prop_assert!(out.derived_bound_holds());
        let st = out.final_state.unwrap();
        prop_assert!(st.is_all_single());
        let parsed = parse_trace(&st.trace_text()).unwrap();
        prop_assert_eq!(parsed.as_slice(), st.trace());
        prop_assert_eq!(replay(&ctx.d, &parsed).unwrap(), st.labels().to_vec());
        for c in &out.classes {
            prop_assert!(c.dominating);
            prop_assert!(c.projection.len() as u32 >= out.gamma_h);
        }
    }
}
