mod common;

use domlab::domination::{oracle_brute_force, solve, Invariant, OracleConfig, SolverConfig};
use domlab::enumerate::{enumerate_small_graphs, random_graphs};
use domlab::Graph;
use proptest::prelude::*;

fn agree(g: &Graph, inv: Invariant) -> Result<(), TestCaseError> {
    let bb = solve(g, inv, &SolverConfig::default()).unwrap();
    let or = oracle_brute_force(g, inv, &OracleConfig::default()).unwrap();
    prop_assert_eq!(bb.value, or.value, "{} on {:?}", inv, g);
    // both return the lexicographically least optimum
    prop_assert_eq!(&bb.certificate, &or.certificate, "{} on {:?}", inv, g);
    Ok(())
}

#[test]
fn all_graphs_up_to_six_vertices_every_k() {
    for n in 1..=6 {
        for g in enumerate_small_graphs(n, false).unwrap() {
            for k in 1..=3 {
                for inv in Invariant::all(k) {
                    agree(&g, inv).unwrap();
                }
            }
        }
    }
}

#[test]
fn seeded_random_graphs_up_to_ten_vertices() {
    for g in random_graphs(300, 1, 10, 0.15, 0.7, 20_240_611).unwrap() {
        for inv in Invariant::all(2) {
            agree(&g, inv).unwrap();
        }
    }
}

#[test]
fn named_families() {
    let mut gs = vec![Graph::petersen()];
    for n in 3..=9 {
        gs.push(Graph::cycle(n).unwrap());
        gs.push(Graph::path(n).unwrap());
    }
    for g in &gs {
        for inv in [Invariant::Gamma, Invariant::IndependentGamma, Invariant::Gamma2] {
            agree(g, inv).unwrap();
        }
    }
    for g in gs.iter().filter(|g| g.order() <= 9) {
        agree(g, Invariant::GammaWeakK(2)).unwrap();
        agree(g, Invariant::GammaK(2)).unwrap();
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn random_graphs_agree(g in common::arb_graph(9), k in 1u32..=2) {
        for inv in Invariant::all(k) {
            agree(&g, inv)?;
        }
    }
}
