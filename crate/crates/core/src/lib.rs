//! Influence-diagram toolkit: exact expected value of perfect information
//! (EVPI) for discrete models, and qualitative EVPI orderings derived purely
//! from graph structure via d-separation, each usable to cross-check the
//! other.

pub mod check;
pub mod curve;
pub mod format;
pub mod gen;
pub mod graph;
pub mod model;
pub mod ordering;
pub mod solver;
pub mod tables;

pub use check::{run_consistency_check, CheckConfig, ConsistencyReport, Tamper};
pub use curve::UtilityCurve;
pub use format::{emit_model, from_model_file, parse_model, to_model_file, FormatError, ModelFile};
pub use gen::{generate, generate_chain, generate_noncanonical, GenConfig};
pub use graph::{Dag, GraphError, NodeId, NodeKind};
pub use model::{
    CeTable, Cpt, DiagramBuilder, Domain, InfluenceDiagram, MappingVariableRecord, ModelError,
    ValidationReport, Violation,
};
pub use ordering::{
    build_ordering, nevpi_refine, set_dominance, zero_evpi_nodes, CandidateRule, Dominance,
    NevpiRefinement, OrderingEdge, OrderingGraph,
};
pub use solver::{
    certain_equivalent, enumerate_policies, evpi, evpi_with, expected_utility, joint_probability,
    nevpi, solve, solve_with, with_observation, Assignment, EvpiOptions, EvpiReport, Method,
    Policy, Solution, SolveError, SolveOptions,
};
