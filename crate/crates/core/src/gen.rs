//! Seeded random generation of well-formed models for testing and
//! consistency checking. Identical configurations produce identical models.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::curve::UtilityCurve;
use crate::model::{DiagramBuilder, InfluenceDiagram};

/// Shape of a generated model. All decisions are roots and feed the value
/// node directly, so no chance node ever descends from a decision and every
/// generated model is ready for information-value queries as-is.
#[derive(Debug, Clone)]
pub struct GenConfig {
    pub chance: usize,
    pub decisions: usize,
    /// Actions per decision.
    pub actions: usize,
    /// States per chance node.
    pub states: usize,
    pub seed: u64,
    /// Probability of an arc between two chance nodes (earlier declaration
    /// to later).
    pub edge_probability: f64,
    /// When set, every chance node gets an observation cost drawn uniformly
    /// from this range.
    pub cost_range: Option<(f64, f64)>,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            chance: 4,
            decisions: 1,
            actions: 2,
            states: 2,
            seed: 0,
            edge_probability: 0.5,
            cost_range: None,
        }
    }
}

fn labels(prefix: &str, count: usize) -> Vec<String> {
    (0..count).map(|i| format!("{prefix}{i}")).collect()
}

fn random_row(rng: &mut ChaCha8Rng, width: usize) -> Vec<f64> {
    // A floor keeps probabilities away from zero so no scenario collapses.
    let mut row: Vec<f64> = (0..width).map(|_| rng.random_range(0.05..1.0)).collect();
    let sum: f64 = row.iter().sum();
    for p in &mut row {
        *p /= sum;
    }
    row
}

/// Generates a random model: chance nodes `X1..Xn` wired forward at the
/// configured density, root decisions `A1..Ak`, and a value node `V` fed by
/// every decision and a random non-empty subset of the chance nodes.
pub fn generate(cfg: &GenConfig) -> InfluenceDiagram {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let chance_ids: Vec<String> = (1..=cfg.chance).map(|i| format!("X{i}")).collect();
    let decision_ids: Vec<String> = (1..=cfg.decisions).map(|i| format!("A{i}")).collect();
    let state_labels = labels("s", cfg.states);
    let action_labels = labels("a", cfg.actions);

    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); cfg.chance];
    for j in 0..cfg.chance {
        for i in 0..j {
            if rng.random_bool(cfg.edge_probability) {
                parents[j].push(i);
            }
        }
    }
    let mut value_chance: Vec<usize> = (0..cfg.chance).filter(|_| rng.random_bool(0.5)).collect();
    if value_chance.is_empty() && cfg.chance > 0 {
        value_chance.push(cfg.chance - 1);
    }

    let state_refs: Vec<&str> = state_labels.iter().map(String::as_str).collect();
    let action_refs: Vec<&str> = action_labels.iter().map(String::as_str).collect();
    let mut b = DiagramBuilder::new();
    for (j, id) in chance_ids.iter().enumerate() {
        let parent_refs: Vec<&str> = parents[j].iter().map(|&i| chance_ids[i].as_str()).collect();
        let rows = (0..cfg.states.pow(parents[j].len() as u32))
            .map(|_| random_row(&mut rng, cfg.states))
            .collect();
        b = b.chance(id, &state_refs, &parent_refs, rows);
    }
    for id in &decision_ids {
        b = b.decision(id, &action_refs, &[]);
    }
    let mut value_parents: Vec<&str> = value_chance
        .iter()
        .map(|&i| chance_ids[i].as_str())
        .collect();
    value_parents.extend(decision_ids.iter().map(String::as_str));
    let table_len =
        cfg.states.pow(value_chance.len() as u32) * cfg.actions.pow(cfg.decisions as u32);
    let ce: Vec<f64> = (0..table_len)
        .map(|_| rng.random_range(0.0..100.0))
        .collect();
    b = b.value("V", &value_parents, ce).curve(UtilityCurve::Linear);
    if let Some((lo, hi)) = cfg.cost_range {
        for id in &chance_ids {
            let cost = rng.random_range(lo..hi);
            b = b.cost(id, cost);
        }
    }
    b.build()
        .expect("generated models are well-formed by construction")
}

/// Like [`generate`], but with one extra chance node `XD` that depends on
/// the first decision and feeds the value node, so the result is not in
/// canonical form with respect to `A1`.
pub fn generate_noncanonical(cfg: &GenConfig) -> InfluenceDiagram {
    assert!(cfg.decisions >= 1, "needs a decision for XD to depend on");
    let base = generate(cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5851_F42D_4C95_7F2D);
    let mut file = crate::format::to_model_file(&base);
    let rows = (0..cfg.actions)
        .map(|_| random_row(&mut rng, cfg.states))
        .collect();
    file.nodes.push(crate::format::NodeSpec {
        id: "XD".into(),
        kind: crate::graph::NodeKind::Chance,
        domain: labels("s", cfg.states),
        parents: vec!["A1".into()],
        cpt: Some(rows),
    });
    file.value.parents.insert(0, "XD".into());
    let mut ce = Vec::with_capacity(cfg.states * file.value.ce.len());
    for _ in 0..cfg.states {
        for v in &file.value.ce {
            ce.push(v + rng.random_range(-10.0..10.0));
        }
    }
    file.value.ce = ce;
    crate::format::from_model_file(&file, false)
        .expect("generated models are well-formed by construction")
}

/// Generates a chance chain feeding the value node: `X<len> -> ... -> X1 ->
/// V`, with a free decision `A -> V`. Indices count steps away from the
/// value node, so `X1` screens everything upstream.
pub fn generate_chain(len: usize, actions: usize, seed: u64) -> InfluenceDiagram {
    assert!(len >= 1, "chains need at least one chance node");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ids: Vec<String> = (1..=len).map(|i| format!("X{i}")).collect();
    let state_refs = ["s0", "s1"];
    let action_labels = labels("a", actions);
    let action_refs: Vec<&str> = action_labels.iter().map(String::as_str).collect();

    let mut b = DiagramBuilder::new();
    // Declared root-first so every parent precedes its child.
    for i in (0..len).rev() {
        let (parent_refs, rows): (Vec<&str>, Vec<Vec<f64>>) = if i == len - 1 {
            (vec![], vec![random_row(&mut rng, 2)])
        } else {
            (
                vec![ids[i + 1].as_str()],
                vec![random_row(&mut rng, 2), random_row(&mut rng, 2)],
            )
        };
        b = b.chance(&ids[i], &state_refs, &parent_refs, rows);
    }
    b = b.decision("A", &action_refs, &[]);
    let ce: Vec<f64> = (0..2 * actions)
        .map(|_| rng.random_range(0.0..100.0))
        .collect();
    b.value("V", &["A", "X1"], ce)
        .curve(UtilityCurve::Linear)
        .build()
        .expect("generated chains are well-formed by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::emit_model;
    use crate::graph::NodeId;
    use crate::ordering::{build_ordering, Dominance};
    use crate::solver::evpi;

    #[test]
    fn generation_is_deterministic_per_seed() {
        let cfg = GenConfig {
            chance: 5,
            seed: 42,
            ..GenConfig::default()
        };
        let a = generate(&cfg);
        let b = generate(&cfg);
        assert_eq!(a, b);
        assert_eq!(emit_model(&a), emit_model(&b));
        let c = generate(&GenConfig { seed: 43, ..cfg });
        assert_ne!(a, c);
    }

    #[test]
    fn generated_models_validate_and_are_canonical() {
        for seed in 0..30 {
            let cfg = GenConfig {
                chance: 1 + (seed as usize % 6),
                decisions: 1 + (seed as usize % 2),
                actions: 2 + (seed as usize % 3),
                states: 2 + (seed as usize % 2),
                seed,
                cost_range: if seed % 2 == 0 {
                    Some((0.0, 5.0))
                } else {
                    None
                },
                ..GenConfig::default()
            };
            let m = generate(&cfg);
            let report = m.validate();
            assert!(report.is_valid(), "seed {seed}: {:?}", report.violations);
            assert!(m.is_canonical(), "seed {seed}");
            if cfg.cost_range.is_some() {
                assert_eq!(m.costs().len(), cfg.chance);
                assert!(m.costs().values().all(|&c| (0.0..5.0).contains(&c)));
            } else {
                assert!(m.costs().is_empty());
            }
        }
    }

    #[test]
    fn noncanonical_variant_has_a_decision_child_and_converts() {
        for seed in 0..10 {
            let cfg = GenConfig {
                chance: 1 + (seed as usize % 4),
                seed,
                ..GenConfig::default()
            };
            let m = generate_noncanonical(&cfg);
            assert!(m.validate().is_valid(), "seed {seed}");
            let a1 = NodeId::from("A1");
            assert!(!m.is_canonical_wrt(&a1).unwrap(), "seed {seed}");
            let (canon, records) = m.canonicalize(&a1).unwrap();
            assert!(canon.validate().is_valid(), "seed {seed}");
            assert!(canon.is_canonical_wrt(&a1).unwrap(), "seed {seed}");
            assert_eq!(records.len(), 1);
            assert_eq!(records[0].original, NodeId::from("XD"));
        }
    }

    #[test]
    fn chains_attenuate_information_value() {
        let m = generate_chain(4, 3, 7);
        assert!(m.validate().is_valid());
        let d: Vec<(NodeId, NodeId)> = m
            .dag()
            .edges()
            .map(|(f, t)| (f.clone(), t.clone()))
            .collect();
        assert!(d.contains(&(NodeId::from("X4"), NodeId::from("X3"))));
        assert!(d.contains(&(NodeId::from("X2"), NodeId::from("X1"))));
        assert!(d.contains(&(NodeId::from("X1"), NodeId::from("V"))));

        let g = build_ordering(&m, &NodeId::from("A")).unwrap();
        let mut previous = f64::INFINITY;
        for i in 1..=4 {
            let x = NodeId::from(format!("X{i}"));
            if i > 1 {
                let nearer = NodeId::from(format!("X{}", i - 1));
                assert_eq!(g.dominates(&nearer, &x).unwrap(), Dominance::GreaterOrEqual);
            }
            let value = evpi(&m, &NodeId::from("A"), &[x]).unwrap().value;
            assert!(value <= previous + 1e-9, "X{i}: {value} > {previous}");
            previous = value;
        }
    }
}
