//! Cross-verification of the qualitative ordering against the numeric
//! solver on streams of random models.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::gen::{generate, GenConfig};
use crate::graph::NodeId;
use crate::ordering::build_ordering;
use crate::solver::{evpi, SolveError};

#[derive(Debug, Clone)]
pub struct CheckConfig {
    pub trials: u32,
    pub seed: u64,
    /// Chance-node count is drawn per trial from `1..=max_chance`.
    pub max_chance: usize,
    /// Action count is drawn per trial from `2..=max_actions`.
    pub max_actions: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            trials: 200,
            seed: 0,
            max_chance: 6,
            max_actions: 4,
        }
    }
}

/// Deliberate corruption applied between building an ordering and checking
/// it numerically; used as a negative control to prove the check can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tamper {
    /// Flip every ordering edge, asserting the opposite inequalities.
    ReverseEdges,
}

/// An ordering edge whose claimed inequality the solver contradicts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeViolation {
    pub seed: u64,
    pub from: NodeId,
    pub to: NodeId,
    pub evpi_from: f64,
    pub evpi_to: f64,
}

/// A claimed-worthless node with nonzero numeric value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroViolation {
    pub seed: u64,
    pub node: NodeId,
    pub evpi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub trials: u32,
    pub models_generated: u32,
    pub edges_checked: u64,
    pub violations: Vec<EdgeViolation>,
    pub zero_set_checked: u64,
    pub zero_violations: Vec<ZeroViolation>,
}

impl ConsistencyReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty() && self.zero_violations.is_empty()
    }
}

/// Edge inequalities get this much slack; zero-set values must stay within
/// it of zero.
pub const CHECK_TOLERANCE: f64 = 1e-9;

fn trial_seed(master: u64, trial: u32) -> u64 {
    // splitmix64 of the trial index keyed by the master seed, so trials are
    // independent and the whole run is reproducible from one number.
    let mut z = master ^ (0x9E37_79B9_7F4A_7C15u64).wrapping_mul(trial as u64 + 1);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generates models, builds their orderings, and verifies every claimed
/// relation against numeric information values.
///
/// Passing a [`Tamper`] corrupts each ordering before verification; the CLI
/// never does, tests do.
pub fn run_consistency_check(
    cfg: &CheckConfig,
    tamper: Option<Tamper>,
) -> Result<ConsistencyReport, SolveError> {
    let mut report = ConsistencyReport {
        trials: cfg.trials,
        models_generated: 0,
        edges_checked: 0,
        violations: Vec::new(),
        zero_set_checked: 0,
        zero_violations: Vec::new(),
    };
    for trial in 0..cfg.trials {
        let seed = trial_seed(cfg.seed, trial);
        let mut meta = ChaCha8Rng::seed_from_u64(seed);
        let gen_cfg = GenConfig {
            chance: meta.random_range(1..=cfg.max_chance.max(1)),
            decisions: 1,
            actions: meta.random_range(2..=cfg.max_actions.max(2)),
            states: 2,
            seed,
            ..GenConfig::default()
        };
        let m = generate(&gen_cfg);
        report.models_generated += 1;
        let decision = NodeId::from("A1");
        let mut g = build_ordering(&m, &decision)?;
        if tamper == Some(Tamper::ReverseEdges) {
            for e in &mut g.edges {
                std::mem::swap(&mut e.from, &mut e.to);
            }
        }

        let mut cache: BTreeMap<NodeId, f64> = BTreeMap::new();
        let mut value_of = |x: &NodeId| -> Result<f64, SolveError> {
            if let Some(&v) = cache.get(x) {
                return Ok(v);
            }
            let v = evpi(&m, &decision, &[x.clone()])?.value;
            cache.insert(x.clone(), v);
            Ok(v)
        };

        for e in &g.edges {
            report.edges_checked += 1;
            let hi = value_of(&e.from)?;
            let lo = value_of(&e.to)?;
            if hi < lo - CHECK_TOLERANCE {
                report.violations.push(EdgeViolation {
                    seed,
                    from: e.from.clone(),
                    to: e.to.clone(),
                    evpi_from: hi,
                    evpi_to: lo,
                });
            }
        }
        for z in &g.zero_set {
            report.zero_set_checked += 1;
            let v = value_of(z)?;
            if v.abs() > CHECK_TOLERANCE {
                report.zero_violations.push(ZeroViolation {
                    seed,
                    node: z.clone(),
                    evpi: v,
                });
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orderings_survive_numeric_verification() {
        let cfg = CheckConfig {
            trials: 40,
            seed: 11,
            max_chance: 5,
            max_actions: 3,
        };
        let report = run_consistency_check(&cfg, None).unwrap();
        assert!(report.is_clean(), "{:?}", report);
        assert_eq!(report.models_generated, 40);
        // A vacuous pass would be meaningless; these runs must actually
        // exercise edges and zero sets.
        assert!(report.edges_checked > 0);
        assert!(report.zero_set_checked > 0);
    }

    #[test]
    fn reversed_edges_are_caught() {
        let cfg = CheckConfig {
            trials: 40,
            seed: 11,
            max_chance: 5,
            max_actions: 3,
        };
        let report = run_consistency_check(&cfg, Some(Tamper::ReverseEdges)).unwrap();
        assert!(!report.violations.is_empty());
    }

    #[test]
    fn zero_trials_is_a_clean_no_op() {
        let cfg = CheckConfig {
            trials: 0,
            ..CheckConfig::default()
        };
        let report = run_consistency_check(&cfg, None).unwrap();
        assert!(report.is_clean());
        assert_eq!(report.models_generated, 0);
        assert_eq!(report.edges_checked, 0);
    }
}
