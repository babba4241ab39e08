//! Exact policy evaluation, optimization and information-value computation
//! by full scenario enumeration.
//!
//! Scenarios range over the stochastic nodes in declaration order, so the
//! floating-point sum an expected utility reduces to does not depend on the
//! arc set. Adding an informational arc therefore never perturbs the value
//! of a policy that ignores the new observation, which keeps comparisons
//! between a model and its observed variant exact rather than merely close.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::graph::{GraphError, NodeId, NodeKind};
use crate::model::{InfluenceDiagram, ModelError};
use crate::tables::Odometer;

/// Default ceiling on `policies x scenarios` evaluations for exhaustive
/// operations.
pub const DEFAULT_ENUMERATION_CAP: u128 = 1 << 24;

/// Closed-form information values this far below zero are treated as
/// round-off and reported as zero.
const NEGATIVE_ROUNDOFF_CLAMP: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("model is not solvable: {0}")]
    InvalidModel(String),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("assignment has no state for '{0}'")]
    IncompleteAssignment(NodeId),
    #[error("invalid assignment: {0}")]
    InvalidAssignment(String),
    #[error("policy does not fit the model: {0}")]
    InvalidPolicy(String),
    #[error("{actual} policy-scenario evaluations exceed the cap of {cap}")]
    ModelTooLarge { cap: u128, actual: u128 },
    #[error("expected utility {eu} lies outside the range of the utility curve")]
    CurveRangeError { eu: f64 },
    #[error("observing '{chance}' before deciding '{decision}' would create a cycle")]
    WouldCreateCycle { decision: NodeId, chance: NodeId },
    #[error(
        "'{chance}' is influenced by decision '{decision}'; canonicalize the model before \
         asking for its information value"
    )]
    NonCanonicalQuery { decision: NodeId, chance: NodeId },
    #[error("indifference search lost its bracket: lhs at zero is {at_zero}, target {target}")]
    BracketError { at_zero: f64, target: f64 },
    #[error("cost for '{node}' is {cost}, but costs must be finite and non-negative")]
    InvalidCost { node: NodeId, cost: f64 },
}

/// A (partial) assignment of states to nodes by id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    states: BTreeMap<NodeId, usize>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(mut self, id: impl Into<NodeId>, state: usize) -> Self {
        self.states.insert(id.into(), state);
        self
    }

    pub fn get(&self, id: &NodeId) -> Option<usize> {
        self.states.get(id).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&NodeId, usize)> {
        self.states.iter().map(|(id, &s)| (id, s))
    }
}

impl<K: Into<NodeId>> FromIterator<(K, usize)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (K, usize)>>(iter: I) -> Self {
        Assignment {
            states: iter.into_iter().map(|(k, s)| (k.into(), s)).collect(),
        }
    }
}

/// One action per joint configuration of each decision's informational
/// predecessors.
///
/// A decision's table holds one action index per configuration of its
/// predecessors taken in declaration order and flattened with
/// [`crate::tables::rank`] (first predecessor most significant).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Policy {
    choices: BTreeMap<NodeId, Vec<usize>>,
}

impl Policy {
    pub fn from_tables(choices: BTreeMap<NodeId, Vec<usize>>) -> Self {
        Policy { choices }
    }

    pub fn table(&self, decision: &NodeId) -> Option<&[usize]> {
        self.choices.get(decision).map(|t| t.as_slice())
    }

    pub fn action(&self, decision: &NodeId, config: usize) -> Option<usize> {
        self.choices
            .get(decision)
            .and_then(|t| t.get(config))
            .copied()
    }

    pub fn decisions(&self) -> impl Iterator<Item = &NodeId> {
        self.choices.keys()
    }
}

/// An optimal policy together with its expected utility.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Solution {
    pub policy: Policy,
    pub expected_utility: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Bisection,
}

/// Result of an information-value query.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvpiReport {
    pub decision: NodeId,
    pub observed: Vec<NodeId>,
    pub value: f64,
    pub method: Method,
    /// Gap between the two sides of the indifference equation at the
    /// reported value.
    pub residual: f64,
    pub iterations: u32,
    pub eu_with: f64,
    pub eu_without: f64,
    pub ce_with: f64,
    pub ce_without: f64,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub enumeration_cap: u128,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvpiOptions {
    pub enumeration_cap: u128,
    /// Solve the indifference equation numerically even when the curve
    /// admits the closed form.
    pub force_bisection: bool,
    /// Width of the bisection bracket at which the search may stop.
    pub rho_tolerance: f64,
    /// Largest acceptable indifference-equation gap at the answer.
    pub residual_tolerance: f64,
    pub max_iterations: u32,
}

impl Default for EvpiOptions {
    fn default() -> Self {
        EvpiOptions {
            enumeration_cap: DEFAULT_ENUMERATION_CAP,
            force_bisection: false,
            rho_tolerance: 1e-9,
            residual_tolerance: 1e-9,
            max_iterations: 200,
        }
    }
}

struct StochSlot<'a> {
    node: usize,
    parents: Vec<usize>,
    parent_sizes: Vec<usize>,
    rows: &'a [Vec<f64>],
}

struct DecisionSlot {
    node: usize,
    actions: usize,
    parents: Vec<usize>,
    parent_sizes: Vec<usize>,
    table_len: u128,
}

/// Per-model context for scenario walks: indices resolved, shapes checked,
/// so the inner loops cannot panic.
struct Evaluator<'a> {
    m: &'a InfluenceDiagram,
    node_count: usize,
    scen_sizes: Vec<usize>,
    stoch: Vec<StochSlot<'a>>,
    /// Declaration order; policy digit blocks follow this order.
    decisions: Vec<DecisionSlot>,
    /// Indices into `decisions`, topologically sorted so informational
    /// predecessors are resolved before dependent decisions.
    topo_decisions: Vec<usize>,
    value_parents: Vec<usize>,
    value_parent_sizes: Vec<usize>,
    ce: &'a [f64],
}

impl<'a> Evaluator<'a> {
    fn new(m: &'a InfluenceDiagram) -> Result<Self, SolveError> {
        let dag = m.dag();
        let n = dag.len();
        let value_nodes: Vec<usize> = (0..n)
            .filter(|&i| dag.kind_at(i) == NodeKind::Value)
            .collect();
        let value_idx = match value_nodes[..] {
            [v] => v,
            _ => {
                return Err(SolveError::InvalidModel(
                    "expected exactly one value node".into(),
                ))
            }
        };
        if !dag.children_idx(value_idx).is_empty() {
            return Err(SolveError::InvalidModel(
                "the value node must be terminal".into(),
            ));
        }

        let mut sizes = vec![0usize; n];
        for i in 0..n {
            if i == value_idx {
                continue;
            }
            let id = dag.id_at(i);
            let dom = m
                .domain(id)
                .ok_or_else(|| SolveError::InvalidModel(format!("missing domain for '{id}'")))?;
            if dom.is_empty() {
                return Err(SolveError::InvalidModel(format!("empty domain for '{id}'")));
            }
            sizes[i] = dom.len();
        }

        let resolve = |node: &NodeId, ids: &[NodeId]| -> Result<Vec<usize>, SolveError> {
            ids.iter()
                .map(|p| {
                    dag.idx(p).map_err(|_| {
                        SolveError::InvalidModel(format!(
                            "table for '{node}' references unknown node '{p}'"
                        ))
                    })
                })
                .collect()
        };
        let set_eq = |a: &[usize], b: &[usize]| {
            let mut a = a.to_vec();
            let mut b = b.to_vec();
            a.sort_unstable();
            b.sort_unstable();
            a == b
        };

        let mut stoch = Vec::new();
        let mut scen_sizes = Vec::new();
        let mut decisions = Vec::new();
        for i in 0..n {
            let id = dag.id_at(i);
            match dag.kind_at(i) {
                NodeKind::Chance | NodeKind::Deterministic => {
                    let cpt = m.cpt(id).ok_or_else(|| {
                        SolveError::InvalidModel(format!("missing table for '{id}'"))
                    })?;
                    let parents = resolve(id, &cpt.parent_order)?;
                    if !set_eq(&parents, dag.parents_idx(i)) {
                        return Err(SolveError::InvalidModel(format!(
                            "table parents for '{id}' disagree with the graph"
                        )));
                    }
                    let parent_sizes: Vec<usize> = parents.iter().map(|&p| sizes[p]).collect();
                    let rows_expected = parent_sizes
                        .iter()
                        .fold(1u128, |acc, &s| acc.saturating_mul(s as u128));
                    if cpt.rows.len() as u128 != rows_expected
                        || cpt.rows.iter().any(|r| r.len() != sizes[i])
                    {
                        return Err(SolveError::InvalidModel(format!(
                            "table for '{id}' has the wrong shape"
                        )));
                    }
                    scen_sizes.push(sizes[i]);
                    stoch.push(StochSlot {
                        node: i,
                        parents,
                        parent_sizes,
                        rows: &cpt.rows,
                    });
                }
                NodeKind::Decision => {
                    let parents = dag.parents_idx(i).to_vec();
                    let parent_sizes: Vec<usize> = parents.iter().map(|&p| sizes[p]).collect();
                    let table_len = parent_sizes
                        .iter()
                        .fold(1u128, |acc, &s| acc.saturating_mul(s as u128));
                    decisions.push(DecisionSlot {
                        node: i,
                        actions: sizes[i],
                        parents,
                        parent_sizes,
                        table_len,
                    });
                }
                NodeKind::Value => {}
            }
        }

        let value_id = dag.id_at(value_idx);
        let value_parents = resolve(value_id, &m.value_ce().parent_order)?;
        if !set_eq(&value_parents, dag.parents_idx(value_idx)) {
            return Err(SolveError::InvalidModel(
                "value-table parents disagree with the graph".into(),
            ));
        }
        let value_parent_sizes: Vec<usize> = value_parents.iter().map(|&p| sizes[p]).collect();
        let ce_expected = value_parent_sizes
            .iter()
            .fold(1u128, |acc, &s| acc.saturating_mul(s as u128));
        if m.value_ce().values.len() as u128 != ce_expected {
            return Err(SolveError::InvalidModel(
                "value table has the wrong shape".into(),
            ));
        }

        let mut topo_decisions = Vec::with_capacity(decisions.len());
        for id in dag.topological_order() {
            let i = dag.idx(&id).expect("topological order lists known nodes");
            if let Some(pos) = decisions.iter().position(|d| d.node == i) {
                topo_decisions.push(pos);
            }
        }

        Ok(Evaluator {
            m,
            node_count: n,
            scen_sizes,
            stoch,
            decisions,
            topo_decisions,
            value_parents,
            value_parent_sizes,
            ce: &m.value_ce().values,
        })
    }

    fn scenario_count(&self) -> u128 {
        self.scen_sizes
            .iter()
            .fold(1u128, |acc, &s| acc.saturating_mul(s as u128))
    }

    fn policy_count(&self) -> u128 {
        self.decisions.iter().fold(1u128, |acc, d| {
            acc.saturating_mul(saturating_pow(d.actions as u128, d.table_len))
        })
    }

    fn check_cap(&self, cap: u128) -> Result<(), SolveError> {
        let actual = self.policy_count().saturating_mul(self.scenario_count());
        if actual > cap {
            return Err(SolveError::ModelTooLarge { cap, actual });
        }
        // A table too long to address would have blown the cap already
        // unless the cap itself is astronomical; refuse it the same way.
        for d in &self.decisions {
            if d.table_len > usize::MAX as u128 {
                return Err(SolveError::ModelTooLarge {
                    cap,
                    actual: u128::MAX,
                });
            }
        }
        Ok(())
    }

    /// Per-decision `(offset, len)` into the flat policy digit vector, plus
    /// the radix of every digit. Call only after `check_cap`.
    fn policy_shape(&self) -> (Vec<usize>, Vec<(usize, usize)>) {
        let mut radixes = Vec::new();
        let mut offsets = Vec::with_capacity(self.decisions.len());
        for d in &self.decisions {
            let len = d.table_len as usize;
            offsets.push((radixes.len(), len));
            radixes.extend(std::iter::repeat(d.actions).take(len));
        }
        (radixes, offsets)
    }

    /// Expected utility of the policy encoded in `digits`, with every
    /// certain equivalent shifted down by `shift` before the curve applies.
    fn eu_with_digits(&self, digits: &[usize], offsets: &[(usize, usize)], shift: f64) -> f64 {
        let mut states = vec![0usize; self.node_count];
        let mut od = Odometer::new(self.scen_sizes.clone());
        let mut eu = 0.0;
        loop {
            for (k, slot) in self.stoch.iter().enumerate() {
                states[slot.node] = od.digits()[k];
            }
            for &dpos in &self.topo_decisions {
                let d = &self.decisions[dpos];
                let mut cfg = 0usize;
                for (&p, &sz) in d.parents.iter().zip(&d.parent_sizes) {
                    cfg = cfg * sz + states[p];
                }
                states[d.node] = digits[offsets[dpos].0 + cfg];
            }
            let mut p = 1.0;
            for slot in &self.stoch {
                let mut row = 0usize;
                for (&q, &sz) in slot.parents.iter().zip(&slot.parent_sizes) {
                    row = row * sz + states[q];
                }
                p *= slot.rows[row][states[slot.node]];
                if p == 0.0 {
                    break;
                }
            }
            if p != 0.0 {
                let mut cell = 0usize;
                for (&q, &sz) in self.value_parents.iter().zip(&self.value_parent_sizes) {
                    cell = cell * sz + states[q];
                }
                eu += p * self.m.curve().utility(self.ce[cell] - shift);
            }
            if !od.advance() {
                break;
            }
        }
        eu
    }

    /// Best policy under `shift`, by exhaustive search. Ties keep the first
    /// candidate, which is the lexicographically smallest action table.
    fn best(&self, shift: f64) -> (Vec<usize>, f64) {
        let (radixes, offsets) = self.policy_shape();
        let mut od = Odometer::new(radixes);
        let mut best_digits = od.digits().to_vec();
        let mut best_eu = f64::NEG_INFINITY;
        loop {
            let eu = self.eu_with_digits(od.digits(), &offsets, shift);
            if eu > best_eu {
                best_eu = eu;
                best_digits.clear();
                best_digits.extend_from_slice(od.digits());
            }
            if !od.advance() {
                break;
            }
        }
        (best_digits, best_eu)
    }

    fn policy_from_digits(&self, digits: &[usize]) -> Policy {
        let (_, offsets) = self.policy_shape();
        let mut choices = BTreeMap::new();
        for (d, &(off, len)) in self.decisions.iter().zip(&offsets) {
            let id = self.m.dag().id_at(d.node).clone();
            choices.insert(id, digits[off..off + len].to_vec());
        }
        Policy { choices }
    }

    /// Flattens a user policy into digits, validating coverage and bounds.
    fn digits_from_policy(&self, policy: &Policy) -> Result<Vec<usize>, SolveError> {
        let dag = self.m.dag();
        let known: BTreeSet<&NodeId> = self.decisions.iter().map(|d| dag.id_at(d.node)).collect();
        for id in policy.decisions() {
            if !known.contains(id) {
                return Err(SolveError::InvalidPolicy(format!(
                    "'{id}' is not a decision node of this model"
                )));
            }
        }
        let mut digits = Vec::new();
        for d in &self.decisions {
            let id = dag.id_at(d.node);
            let table = policy
                .table(id)
                .ok_or_else(|| SolveError::InvalidPolicy(format!("no table for '{id}'")))?;
            if table.len() as u128 != d.table_len {
                return Err(SolveError::InvalidPolicy(format!(
                    "table for '{id}' has {} entries, expected {}",
                    table.len(),
                    d.table_len
                )));
            }
            if let Some(&bad) = table.iter().find(|&&a| a >= d.actions) {
                return Err(SolveError::InvalidPolicy(format!(
                    "table for '{id}' selects action {bad}, but it has {} actions",
                    d.actions
                )));
            }
            digits.extend_from_slice(table);
        }
        Ok(digits)
    }
}

fn saturating_pow(base: u128, exp: u128) -> u128 {
    if base <= 1 {
        return base;
    }
    if exp >= 128 {
        return u128::MAX;
    }
    base.checked_pow(exp as u32).unwrap_or(u128::MAX)
}

/// Probability of a full assignment to the stochastic nodes. Decision nodes
/// may (and, when some stochastic node depends on one, must) carry states
/// too; they condition the scenario without contributing a factor.
pub fn joint_probability(m: &InfluenceDiagram, s: &Assignment) -> Result<f64, SolveError> {
    let dag = m.dag();
    for (id, state) in s.iter() {
        if !dag.contains(id) {
            return Err(SolveError::InvalidAssignment(format!(
                "unknown node '{id}'"
            )));
        }
        let dom = m.domain(id).ok_or_else(|| {
            SolveError::InvalidAssignment(format!("'{id}' has no states to assign"))
        })?;
        if state >= dom.len() {
            return Err(SolveError::InvalidAssignment(format!(
                "state {state} is out of range for '{id}'"
            )));
        }
    }
    let mut p = 1.0;
    for id in m.stochastic_nodes() {
        let state = s
            .get(&id)
            .ok_or(SolveError::IncompleteAssignment(id.clone()))?;
        let cpt = m
            .cpt(&id)
            .ok_or_else(|| SolveError::InvalidModel(format!("missing table for '{id}'")))?;
        let mut row = 0usize;
        for parent in &cpt.parent_order {
            let psize = m
                .domain(parent)
                .ok_or_else(|| {
                    SolveError::InvalidModel(format!(
                        "table for '{id}' references unknown node '{parent}'"
                    ))
                })?
                .len();
            let pstate = s
                .get(parent)
                .ok_or_else(|| SolveError::IncompleteAssignment(parent.clone()))?;
            row = row * psize + pstate;
        }
        let dist = cpt
            .rows
            .get(row)
            .ok_or_else(|| SolveError::InvalidModel(format!("table for '{id}' is too short")))?;
        if dist.len() <= state {
            return Err(SolveError::InvalidModel(format!(
                "table for '{id}' has rows of the wrong width"
            )));
        }
        p *= dist[state];
        if p == 0.0 {
            return Ok(0.0);
        }
    }
    Ok(p)
}

/// Expected utility of `policy` on `m`.
pub fn expected_utility(m: &InfluenceDiagram, policy: &Policy) -> Result<f64, SolveError> {
    let ev = Evaluator::new(m)?;
    if ev.scenario_count() > DEFAULT_ENUMERATION_CAP {
        return Err(SolveError::ModelTooLarge {
            cap: DEFAULT_ENUMERATION_CAP,
            actual: ev.scenario_count(),
        });
    }
    let digits = ev.digits_from_policy(policy)?;
    let (_, offsets) = ev.policy_shape();
    Ok(ev.eu_with_digits(&digits, &offsets, 0.0))
}

/// All policies of `m`, in lexicographic order of their flattened action
/// tables (decisions in declaration order, first table slot most
/// significant).
pub fn enumerate_policies(
    m: &InfluenceDiagram,
) -> Result<impl Iterator<Item = Policy>, SolveError> {
    let ev = Evaluator::new(m)?;
    let total = ev.policy_count();
    if total > DEFAULT_ENUMERATION_CAP {
        return Err(SolveError::ModelTooLarge {
            cap: DEFAULT_ENUMERATION_CAP,
            actual: total,
        });
    }
    let (radixes, offsets) = ev.policy_shape();
    let ids: Vec<NodeId> = ev
        .decisions
        .iter()
        .map(|d| m.dag().id_at(d.node).clone())
        .collect();
    let mut od = Odometer::new(radixes);
    let mut done = od.exhausted();
    Ok(std::iter::from_fn(move || {
        if done {
            return None;
        }
        let mut choices = BTreeMap::new();
        for (id, &(off, len)) in ids.iter().zip(&offsets) {
            choices.insert(id.clone(), od.digits()[off..off + len].to_vec());
        }
        if !od.advance() {
            done = true;
        }
        Some(Policy { choices })
    }))
}

pub fn solve(m: &InfluenceDiagram) -> Result<Solution, SolveError> {
    solve_with(m, &SolveOptions::default())
}

/// Finds a maximum-expected-utility policy by exhaustive enumeration. Ties
/// resolve to the lexicographically smallest action table.
pub fn solve_with(m: &InfluenceDiagram, opts: &SolveOptions) -> Result<Solution, SolveError> {
    let ev = Evaluator::new(m)?;
    ev.check_cap(opts.enumeration_cap)?;
    let (digits, eu) = ev.best(0.0);
    Ok(Solution {
        policy: ev.policy_from_digits(&digits),
        expected_utility: eu,
    })
}

pub fn certain_equivalent(m: &InfluenceDiagram) -> Result<f64, SolveError> {
    certain_equivalent_with(m, &SolveOptions::default())
}

/// Certain equivalent of the model under an optimal policy.
pub fn certain_equivalent_with(
    m: &InfluenceDiagram,
    opts: &SolveOptions,
) -> Result<f64, SolveError> {
    let eu = solve_with(m, opts)?.expected_utility;
    m.curve()
        .inverse(eu)
        .ok_or(SolveError::CurveRangeError { eu })
}

/// Returns `m` with informational arcs `x -> a` added for every `x` in
/// `xs`. Arcs already present are kept as they are, so observing an
/// already-observed node changes nothing.
pub fn with_observation(
    m: &InfluenceDiagram,
    xs: &[NodeId],
    a: &NodeId,
) -> Result<InfluenceDiagram, SolveError> {
    let dag = m.dag();
    if dag.kind(a)? != NodeKind::Decision {
        return Err(SolveError::InvalidQuery(format!(
            "'{a}' is not a decision node"
        )));
    }
    let descendants: BTreeSet<NodeId> = dag.descendants(a)?.into_iter().collect();
    let mut new_edges: Vec<(NodeId, NodeId)> = Vec::new();
    let mut seen = BTreeSet::new();
    for x in xs {
        if !seen.insert(x.clone()) {
            continue;
        }
        if dag.kind(x)? != NodeKind::Chance {
            return Err(SolveError::InvalidQuery(format!(
                "only chance nodes can be observed, and '{x}' is not one"
            )));
        }
        if descendants.contains(x) {
            return Err(SolveError::WouldCreateCycle {
                decision: a.clone(),
                chance: x.clone(),
            });
        }
        let already = dag.predecessors(a)?.iter().any(|p| p == x);
        if !already {
            new_edges.push((x.clone(), a.clone()));
        }
    }
    if new_edges.is_empty() {
        return Ok(m.clone());
    }
    let nodes: Vec<(NodeId, NodeKind)> = dag.nodes().map(|(id, k)| (id.clone(), k)).collect();
    let mut edges: Vec<(NodeId, NodeId)> =
        dag.edges().map(|(f, t)| (f.clone(), t.clone())).collect();
    edges.extend(new_edges);
    Ok(m.replace_dag(crate::graph::Dag::new(nodes, &edges)?))
}

pub fn evpi(m: &InfluenceDiagram, a: &NodeId, xs: &[NodeId]) -> Result<EvpiReport, SolveError> {
    evpi_with(m, a, xs, &EvpiOptions::default())
}

/// Value of observing the chance nodes `xs` before deciding `a`: the price
/// that makes the decision maker indifferent between buying the
/// observations and deciding without them.
///
/// For curves with the delta property the value is the difference of the
/// two certain equivalents; otherwise (or when forced) it is found by
/// bisection on the indifference equation, re-optimizing the policy at
/// every trial price.
pub fn evpi_with(
    m: &InfluenceDiagram,
    a: &NodeId,
    xs: &[NodeId],
    opts: &EvpiOptions,
) -> Result<EvpiReport, SolveError> {
    let dag = m.dag();
    if dag.kind(a)? != NodeKind::Decision {
        return Err(SolveError::InvalidQuery(format!(
            "'{a}' is not a decision node"
        )));
    }
    if xs.is_empty() {
        return Err(SolveError::InvalidQuery(
            "the set of nodes to observe is empty".into(),
        ));
    }
    let descendants: BTreeSet<NodeId> = dag.descendants(a)?.into_iter().collect();
    for x in xs {
        if dag.kind(x)? != NodeKind::Chance {
            return Err(SolveError::InvalidQuery(format!(
                "only chance nodes can be observed, and '{x}' is not one"
            )));
        }
        if descendants.contains(x) {
            return Err(SolveError::NonCanonicalQuery {
                decision: a.clone(),
                chance: x.clone(),
            });
        }
    }
    let observed = with_observation(m, xs, a)?;

    let ev_without = Evaluator::new(m)?;
    let ev_with = Evaluator::new(&observed)?;
    ev_without.check_cap(opts.enumeration_cap)?;
    ev_with.check_cap(opts.enumeration_cap)?;

    let eu_without = ev_without.best(0.0).1;
    let eu_with = ev_with.best(0.0).1;
    let ce_without = m
        .curve()
        .inverse(eu_without)
        .ok_or(SolveError::CurveRangeError { eu: eu_without })?;
    let ce_with = m
        .curve()
        .inverse(eu_with)
        .ok_or(SolveError::CurveRangeError { eu: eu_with })?;

    let report = |value: f64, method: Method, residual: f64, iterations: u32| EvpiReport {
        decision: a.clone(),
        observed: xs.to_vec(),
        value,
        method,
        residual,
        iterations,
        eu_with,
        eu_without,
        ce_with,
        ce_without,
    };

    if !opts.force_bisection && m.curve().satisfies_delta_property() {
        let mut value = ce_with - ce_without;
        if value < 0.0 && value >= -NEGATIVE_ROUNDOFF_CLAMP {
            log::debug!("clamping closed-form information value {value:e} to zero");
            value = 0.0;
        }
        let residual = (ev_with.best(value).1 - eu_without).abs();
        return Ok(report(value, Method::ClosedForm, residual, 0));
    }

    // Bisection on rho -> max-policy EU of the observed model with every
    // certain equivalent reduced by rho. The left side is non-increasing in
    // rho; it starts at eu_with >= eu_without and is at most the utility of
    // the worst outcome once rho spans the table, so the root is bracketed.
    let rhs = eu_without;
    if eu_with < rhs - NEGATIVE_ROUNDOFF_CLAMP {
        return Err(SolveError::BracketError {
            at_zero: eu_with,
            target: rhs,
        });
    }
    let values = &m.value_ce().values;
    let spread = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - values.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut lo = 0.0;
    let mut hi = spread.max(0.0);
    let mut rho = 0.0;
    let mut residual = (eu_with - rhs).abs();
    let mut iterations = 0;
    while iterations < opts.max_iterations
        && (hi - lo > opts.rho_tolerance || residual > opts.residual_tolerance)
    {
        let mid = 0.5 * (lo + hi);
        let lhs = ev_with.best(mid).1;
        residual = (lhs - rhs).abs();
        rho = mid;
        if lhs >= rhs {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    Ok(report(rho, Method::Bisection, residual, iterations))
}

pub fn nevpi(m: &InfluenceDiagram, a: &NodeId, xs: &[NodeId]) -> Result<f64, SolveError> {
    nevpi_with(m, a, xs, &EvpiOptions::default())
}

/// Information value net of the observation costs of `xs`.
pub fn nevpi_with(
    m: &InfluenceDiagram,
    a: &NodeId,
    xs: &[NodeId],
    opts: &EvpiOptions,
) -> Result<f64, SolveError> {
    let gross = evpi_with(m, a, xs, opts)?.value;
    let mut seen = BTreeSet::new();
    let cost: f64 = xs
        .iter()
        .filter(|x| seen.insert((*x).clone()))
        .map(|x| m.cost(x))
        .sum();
    Ok(gross - cost)
}
