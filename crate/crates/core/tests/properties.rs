//! Randomized end-to-end properties of the solver over generated models.
//! Each run is seeded, so failures reproduce exactly.

use evpi_core::{
    enumerate_policies, evpi, evpi_with, generate, generate_noncanonical, solve, EvpiOptions,
    GenConfig, Method, NodeId, UtilityCurve,
};

fn varied_config(seed: u64) -> GenConfig {
    let s = seed as usize;
    GenConfig {
        chance: 1 + s % 5,
        decisions: 1 + s % 2,
        actions: 2 + s % 3,
        states: 2 + s % 2,
        seed,
        edge_probability: 0.3 + 0.1 * (s % 5) as f64,
        cost_range: None,
    }
}

/// Adding an information arc can only refine the optimal policy, so the
/// observed model is worth at least as much and the information value is
/// never negative.
#[test]
fn observing_any_chance_node_never_hurts() {
    let a1 = NodeId::from("A1");
    for seed in 0..300 {
        let m = generate(&varied_config(seed));
        for x in m.chance_nodes() {
            let r = evpi(&m, &a1, &[x.clone()]).unwrap();
            assert!(
                r.eu_with >= r.eu_without - 1e-12,
                "seed {seed}, {x}: eu_with {} < eu_without {}",
                r.eu_with,
                r.eu_without
            );
            assert!(r.value >= -1e-9, "seed {seed}, {x}: evpi {}", r.value);
        }
    }
}

/// Under a linear curve the indifference price collapses to the utility
/// gap, and the solver should take that closed form.
#[test]
fn risk_neutral_information_value_equals_utility_gap() {
    let a1 = NodeId::from("A1");
    for seed in 0..100 {
        let m = generate(&varied_config(seed));
        for x in m.chance_nodes() {
            let r = evpi(&m, &a1, &[x.clone()]).unwrap();
            assert_eq!(r.method, Method::ClosedForm, "seed {seed}, {x}");
            let gap = r.eu_with - r.eu_without;
            assert!(
                (r.value - gap).abs() <= 1e-12,
                "seed {seed}, {x}: evpi {} vs gap {gap}",
                r.value
            );
        }
    }
}

/// Observing a superset of nodes is worth at least as much as any subset.
/// Pairs keep the policy table small; the argument is the same for any
/// superset.
#[test]
fn observing_more_nodes_never_hurts() {
    let a1 = NodeId::from("A1");
    for seed in 0..50 {
        let s = seed as usize;
        // Observing a pair squares the policy table, so stay small here.
        let m = generate(&GenConfig {
            chance: 2 + s % 3,
            decisions: 1 + s % 2,
            actions: 2 + s % 2,
            states: 2,
            seed,
            edge_probability: 0.3 + 0.1 * (s % 5) as f64,
            cost_range: None,
        });
        let all = m.chance_nodes();
        let pair = [all[0].clone(), all[1].clone()];
        let joint = evpi(&m, &a1, &pair).unwrap();
        for x in &pair {
            let single = evpi(&m, &a1, &[x.clone()]).unwrap();
            assert!(
                joint.value >= single.value - 1e-9,
                "seed {seed}: joint {} < single({x}) {}",
                joint.value,
                single.value
            );
            assert!(joint.eu_with >= single.eu_with - 1e-12, "seed {seed}, {x}");
        }
    }
}

/// Rewriting a decision-dependent chance node through a mapping variable
/// changes the graph but must not change what any policy is worth.
#[test]
fn conversion_to_canonical_form_preserves_every_policy() {
    let a1 = NodeId::from("A1");
    for seed in 0..40 {
        let cfg = GenConfig {
            chance: 1 + (seed as usize % 4),
            seed,
            ..GenConfig::default()
        };
        let m = generate_noncanonical(&cfg);
        let (canon, _) = m.canonicalize(&a1).unwrap();
        assert!(canon.is_canonical_wrt(&a1).unwrap(), "seed {seed}");
        for policy in enumerate_policies(&m).unwrap() {
            let before = evpi_core::expected_utility(&m, &policy).unwrap();
            let after = evpi_core::expected_utility(&canon, &policy).unwrap();
            assert!(
                (before - after).abs() <= 1e-9,
                "seed {seed}: policy worth {before} became {after}"
            );
        }
        let best_before = solve(&m).unwrap().expected_utility;
        let best_after = solve(&canon).unwrap().expected_utility;
        assert!(
            (best_before - best_after).abs() <= 1e-9,
            "seed {seed}: optimum {best_before} became {best_after}"
        );
    }
}

/// For curves with the delta property the numeric search must land on the
/// closed-form answer.
#[test]
fn numeric_search_agrees_with_closed_form() {
    let a1 = NodeId::from("A1");
    let forced = EvpiOptions {
        force_bisection: true,
        ..EvpiOptions::default()
    };
    for seed in 0..25 {
        let risk_tolerance = 10.0 + (seed as f64 * 19.6) % 490.0;
        let m =
            generate(&varied_config(seed)).with_curve(UtilityCurve::Exponential { risk_tolerance });
        for x in m.chance_nodes() {
            let closed = evpi(&m, &a1, &[x.clone()]).unwrap();
            let numeric = evpi_with(&m, &a1, &[x.clone()], &forced).unwrap();
            assert_eq!(closed.method, Method::ClosedForm);
            assert_eq!(numeric.method, Method::Bisection);
            assert!(
                (closed.value - numeric.value).abs() <= 1e-6,
                "seed {seed}, {x}: closed {} vs bisection {}",
                closed.value,
                numeric.value
            );
            assert!(numeric.residual.abs() <= 1e-9, "seed {seed}, {x}");
            assert!(numeric.iterations <= 200, "seed {seed}, {x}");
        }
    }
}
