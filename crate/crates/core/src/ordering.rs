//! Qualitative information-value analysis from graph structure alone.
//!
//! Every conclusion here rests on d-separation: a chance node that is
//! screened off from the value node by the decision alone is worthless to
//! observe, and a node that screens another from the value node is worth at
//! least as much as the node it screens. The numeric solver can verify each
//! claim, and the consistency check does so at scale.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::graph::{GraphError, NodeId, NodeKind};
use crate::model::{InfluenceDiagram, MappingVariableRecord};
use crate::solver::SolveError;

/// How a compared pair of chance nodes was found.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "rule", content = "via", rename_all = "snake_case")]
pub enum CandidateRule {
    /// The two nodes share an arc.
    Adjacent,
    /// The named decision node sits between them.
    ViaDecision(NodeId),
}

/// One proved relation: observing `from` is worth at least as much as
/// observing `to`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrderingEdge {
    pub from: NodeId,
    pub to: NodeId,
    /// The independence statement that justifies the edge.
    pub premise: String,
    pub rule: CandidateRule,
}

/// Answer to a dominance query between (sets of) chance nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Dominance {
    GreaterOrEqual,
    LessOrEqual,
    /// The first argument is provably worthless to observe.
    Zero,
    Unordered,
}

/// Partial order of information values for one decision, derived from the
/// structure of the (canonicalized) model.
///
/// An edge (X, Y) states that observing X before the decision is worth at
/// least as much as observing Y. Mutually screening nodes form two-edge
/// cycles and read as provably equal values.
#[derive(Debug, Clone, Serialize)]
pub struct OrderingGraph {
    pub decision: NodeId,
    /// The chance nodes of the canonicalized model, in declaration order.
    pub nodes: Vec<NodeId>,
    pub edges: Vec<OrderingEdge>,
    /// Nodes whose information value is exactly zero: the decision alone
    /// screens them from the value node.
    pub zero_set: Vec<NodeId>,
    /// Chance-to-deterministic conversions applied before the analysis.
    pub reformulation: Vec<MappingVariableRecord>,
    #[serde(skip)]
    position: BTreeMap<NodeId, usize>,
    #[serde(skip)]
    reach: Vec<Vec<bool>>,
}

impl OrderingGraph {
    /// Compares the information value of observing `x` with observing `y`,
    /// using transitive reachability. When neither relation is provable and
    /// `x` is in the zero set, the answer is [`Dominance::Zero`].
    pub fn dominates(&self, x: &NodeId, y: &NodeId) -> Result<Dominance, SolveError> {
        let i = self.index_of(x)?;
        let j = self.index_of(y)?;
        Ok(if self.reach[i][j] {
            Dominance::GreaterOrEqual
        } else if self.reach[j][i] {
            Dominance::LessOrEqual
        } else if self.zero_set.contains(x) {
            Dominance::Zero
        } else {
            Dominance::Unordered
        })
    }

    fn index_of(&self, x: &NodeId) -> Result<usize, SolveError> {
        self.position
            .get(x)
            .copied()
            .ok_or_else(|| SolveError::Graph(GraphError::NodeNotFound(x.clone())))
    }
}

fn value_node_of(m: &InfluenceDiagram) -> Result<NodeId, SolveError> {
    let mut values = m
        .dag()
        .nodes()
        .filter(|(_, k)| *k == NodeKind::Value)
        .map(|(id, _)| id.clone());
    match (values.next(), values.next()) {
        (Some(v), None) => Ok(v),
        _ => Err(SolveError::InvalidModel(
            "expected exactly one value node".into(),
        )),
    }
}

fn require_decision(m: &InfluenceDiagram, a: &NodeId) -> Result<(), SolveError> {
    if m.dag().kind(a)? != NodeKind::Decision {
        return Err(SolveError::InvalidQuery(format!(
            "'{a}' is not a decision node"
        )));
    }
    Ok(())
}

fn first_chance_descendant(m: &InfluenceDiagram, a: &NodeId) -> Result<Option<NodeId>, SolveError> {
    Ok(m.dag()
        .descendants(a)?
        .into_iter()
        .find(|d| m.dag().kind(d) == Ok(NodeKind::Chance)))
}

/// Chance nodes that are provably worthless to observe before deciding `a`:
/// the decision alone d-separates them from the value node.
pub fn zero_evpi_nodes(m: &InfluenceDiagram, a: &NodeId) -> Result<Vec<NodeId>, SolveError> {
    require_decision(m, a)?;
    if let Some(chance) = first_chance_descendant(m, a)? {
        return Err(SolveError::NonCanonicalQuery {
            decision: a.clone(),
            chance,
        });
    }
    let v = value_node_of(m)?;
    let mut zero = Vec::new();
    for x in m.chance_nodes() {
        if m.dag()
            .d_separated(&[x.clone()], &[v.clone()], &[a.clone()])?
        {
            zero.push(x);
        }
    }
    Ok(zero)
}

/// Builds the information-value partial order for decision `a`.
///
/// The model is first reformulated so no chance node depends on `a` (the
/// conversions are recorded). Candidate pairs are chance nodes joined by an
/// arc or bridged by a single decision node; an edge is added in whichever
/// direction the screening premise holds, checked by d-separation. Output
/// is deterministic.
pub fn build_ordering(m: &InfluenceDiagram, a: &NodeId) -> Result<OrderingGraph, SolveError> {
    require_decision(m, a)?;
    let (canon, reformulation) = m.canonicalize(a)?;
    let dag = canon.dag();
    let v = value_node_of(&canon)?;

    let nodes = canon.chance_nodes();
    let position: BTreeMap<NodeId, usize> = nodes
        .iter()
        .enumerate()
        .map(|(i, id)| (id.clone(), i))
        .collect();
    let n = nodes.len();

    // Candidate pairs keyed by declaration positions, smaller first.
    // Adjacent pairs are collected before decision-bridged ones so the
    // recorded rule prefers the direct connection.
    let mut candidates: BTreeMap<(usize, usize), CandidateRule> = BTreeMap::new();
    let pair = |x: usize, y: usize| (x.min(y), x.max(y));
    let mut pairs_via = Vec::new();
    for x in &nodes {
        for s in dag.successors(x)? {
            match dag.kind(&s)? {
                NodeKind::Chance => {
                    candidates
                        .entry(pair(position[x], position[&s]))
                        .or_insert(CandidateRule::Adjacent);
                }
                NodeKind::Decision => {
                    for t in dag.successors(&s)? {
                        if dag.kind(&t)? == NodeKind::Chance {
                            pairs_via.push((pair(position[x], position[&t]), s.clone()));
                        }
                    }
                }
                _ => {}
            }
        }
    }
    for (key, via) in pairs_via {
        candidates
            .entry(key)
            .or_insert(CandidateRule::ViaDecision(via));
    }

    let a_descendants: BTreeSet<NodeId> = dag.descendants(a)?.into_iter().collect();
    let mut edges = Vec::new();
    let mut reach = vec![vec![false; n]; n];
    for ((i, j), rule) in &candidates {
        let (x, y) = (&nodes[*i], &nodes[*j]);
        // Screening arguments do not apply to nodes the decision influences;
        // the reformulation has removed them, but check all the same.
        if a_descendants.contains(x) || a_descendants.contains(y) {
            continue;
        }
        for (from, to) in [(x, y), (y, x)] {
            if dag.d_separated(&[to.clone()], &[v.clone()], &[from.clone()])? {
                edges.push(OrderingEdge {
                    from: from.clone(),
                    to: to.clone(),
                    premise: format!("'{to}' is independent of '{v}' given '{from}'"),
                    rule: rule.clone(),
                });
                reach[position[from]][position[to]] = true;
            }
        }
    }

    for i in 0..n {
        reach[i][i] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }

    let zero_set = zero_evpi_nodes(&canon, a)?;
    Ok(OrderingGraph {
        decision: a.clone(),
        nodes,
        edges,
        zero_set,
        reformulation,
        position,
        reach,
    })
}

/// Compares the joint information value of observing `x_set` against
/// `y_set` before the decisions in `a_set`, directly on the model.
///
/// The screening premise additionally requires that neither set contains a
/// descendant of any queried decision. When `x_set` is screened from the
/// value node by the decisions alone, its joint value is zero.
pub fn set_dominance(
    m: &InfluenceDiagram,
    a_set: &[NodeId],
    x_set: &[NodeId],
    y_set: &[NodeId],
) -> Result<Dominance, SolveError> {
    if a_set.is_empty() || x_set.is_empty() || y_set.is_empty() {
        return Err(SolveError::InvalidQuery(
            "set dominance needs non-empty decision and observation sets".into(),
        ));
    }
    for a in a_set {
        require_decision(m, a)?;
    }
    for x in x_set.iter().chain(y_set) {
        if m.dag().kind(x)? != NodeKind::Chance {
            return Err(SolveError::InvalidQuery(format!(
                "only chance nodes can be compared, and '{x}' is not one"
            )));
        }
    }
    let xs: BTreeSet<&NodeId> = x_set.iter().collect();
    if y_set.iter().any(|y| xs.contains(y)) {
        return Err(SolveError::InvalidQuery(
            "the compared observation sets overlap".into(),
        ));
    }
    let v = vec![value_node_of(m)?];
    let dag = m.dag();
    let mut descendants = BTreeSet::new();
    for a in a_set {
        descendants.extend(dag.descendants(a)?);
    }
    let untouched = |set: &[NodeId]| set.iter().all(|x| !descendants.contains(x));

    if dag.d_separated(y_set, &v, x_set)? && untouched(x_set) && untouched(y_set) {
        return Ok(Dominance::GreaterOrEqual);
    }
    if dag.d_separated(x_set, &v, a_set)? {
        return Ok(Dominance::Zero);
    }
    if dag.d_separated(x_set, &v, y_set)? && untouched(x_set) && untouched(y_set) {
        return Ok(Dominance::LessOrEqual);
    }
    Ok(Dominance::Unordered)
}

/// Strict and tied conclusions about cost-adjusted information value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NevpiRefinement {
    /// Pairs (x, y) where x's net value is strictly greater: x weakly
    /// dominates y and costs strictly less to observe.
    pub strict: Vec<(NodeId, NodeId)>,
    /// Weakly dominating pairs with equal costs; the weak relation carries
    /// over to net values unchanged.
    pub equal_cost: Vec<(NodeId, NodeId)>,
}

/// Refines the weak order of `g` with observation costs. Nodes missing
/// from `costs` observe for free.
pub fn nevpi_refine(
    g: &OrderingGraph,
    costs: &BTreeMap<NodeId, f64>,
) -> Result<NevpiRefinement, SolveError> {
    for (node, &cost) in costs {
        if !cost.is_finite() || cost < 0.0 {
            return Err(SolveError::InvalidCost {
                node: node.clone(),
                cost,
            });
        }
    }
    let cost_of = |x: &NodeId| costs.get(x).copied().unwrap_or(0.0);
    let mut strict = Vec::new();
    let mut equal_cost = Vec::new();
    for (i, x) in g.nodes.iter().enumerate() {
        for (j, y) in g.nodes.iter().enumerate() {
            if i == j || !g.reach[i][j] {
                continue;
            }
            let (cx, cy) = (cost_of(x), cost_of(y));
            if cx < cy {
                strict.push((x.clone(), y.clone()));
            } else if cx == cy {
                equal_cost.push((x.clone(), y.clone()));
            }
        }
    }
    Ok(NevpiRefinement { strict, equal_cost })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DiagramBuilder;
    use crate::solver::{evpi, nevpi};

    fn n(s: &str) -> NodeId {
        NodeId::from(s)
    }

    // X2 -> X1 -> V with a free decision: the node nearer the value screens
    // the farther one.
    fn chain() -> InfluenceDiagram {
        DiagramBuilder::new()
            .chance("X2", &["u0", "u1"], &[], vec![vec![0.5, 0.5]])
            .chance(
                "X1",
                &["x0", "x1"],
                &["X2"],
                vec![vec![0.9, 0.1], vec![0.2, 0.8]],
            )
            .decision("A", &["a0", "a1"], &[])
            .value("V", &["A", "X1"], vec![100.0, 0.0, 0.0, 100.0])
            .build()
            .unwrap()
    }

    #[test]
    fn chain_orders_toward_the_value_node() {
        let m = chain();
        let g = build_ordering(&m, &n("A")).unwrap();
        assert_eq!(g.nodes, vec![n("X2"), n("X1")]);
        assert_eq!(g.edges.len(), 1);
        assert_eq!(g.edges[0].from, n("X1"));
        assert_eq!(g.edges[0].to, n("X2"));
        assert_eq!(g.edges[0].rule, CandidateRule::Adjacent);
        assert!(g.zero_set.is_empty());
        assert!(g.reformulation.is_empty());
        assert_eq!(
            g.dominates(&n("X1"), &n("X2")).unwrap(),
            Dominance::GreaterOrEqual
        );
        assert_eq!(
            g.dominates(&n("X2"), &n("X1")).unwrap(),
            Dominance::LessOrEqual
        );

        // The qualitative claim, priced: seeing X1 is worth 45, seeing the
        // upstream X2 only 30.
        let direct = evpi(&m, &n("A"), &[n("X1")]).unwrap().value;
        let upstream = evpi(&m, &n("A"), &[n("X2")]).unwrap().value;
        assert!((direct - 45.0).abs() < 1e-9);
        assert!((upstream - 30.0).abs() < 1e-9);
    }

    #[test]
    fn dominates_rejects_unknown_nodes() {
        let g = build_ordering(&chain(), &n("A")).unwrap();
        assert!(matches!(
            g.dominates(&n("X1"), &n("Q")),
            Err(SolveError::Graph(GraphError::NodeNotFound(_)))
        ));
    }

    // Seven chance nodes around one decision; only four screening relations
    // hold, three hang off X5.
    fn seven_node_model() -> InfluenceDiagram {
        DiagramBuilder::new()
            .chance("X4", &["s0", "s1"], &[], vec![vec![0.3, 0.7]])
            .chance(
                "X3",
                &["s0", "s1"],
                &["X4"],
                vec![vec![0.8, 0.2], vec![0.25, 0.75]],
            )
            .chance("X6", &["s0", "s1"], &[], vec![vec![0.6, 0.4]])
            .chance("X7", &["s0", "s1"], &[], vec![vec![0.45, 0.55]])
            .chance(
                "X5",
                &["s0", "s1"],
                &["X6", "X7"],
                vec![
                    vec![0.9, 0.1],
                    vec![0.5, 0.5],
                    vec![0.3, 0.7],
                    vec![0.15, 0.85],
                ],
            )
            .chance(
                "X2",
                &["s0", "s1"],
                &["X5"],
                vec![vec![0.7, 0.3], vec![0.35, 0.65]],
            )
            .chance("X1", &["s0", "s1"], &[], vec![vec![0.52, 0.48]])
            .decision("A", &["a0", "a1"], &[])
            .value(
                "V",
                &["X1", "X2", "X3", "A"],
                vec![
                    85.0, 10.0, 64.0, 30.0, 42.0, 77.0, 12.0, 95.0, 5.0, 88.0, 51.0, 23.0, 70.0,
                    33.0, 96.0, 18.0,
                ],
            )
            .build()
            .unwrap()
    }

    #[test]
    fn seven_node_model_yields_exactly_the_four_screening_relations() {
        let m = seven_node_model();
        let g = build_ordering(&m, &n("A")).unwrap();
        let relations: BTreeSet<(NodeId, NodeId)> = g
            .edges
            .iter()
            .map(|e| (e.from.clone(), e.to.clone()))
            .collect();
        let expected: BTreeSet<(NodeId, NodeId)> = [
            (n("X3"), n("X4")),
            (n("X2"), n("X5")),
            (n("X5"), n("X6")),
            (n("X5"), n("X7")),
        ]
        .into();
        assert_eq!(relations, expected);
        assert!(g.zero_set.is_empty());

        // Transitivity: X2 screens X5 which screens X6 and X7.
        assert_eq!(
            g.dominates(&n("X2"), &n("X6")).unwrap(),
            Dominance::GreaterOrEqual
        );
        assert_eq!(
            g.dominates(&n("X7"), &n("X2")).unwrap(),
            Dominance::LessOrEqual
        );
        assert_eq!(
            g.dominates(&n("X1"), &n("X2")).unwrap(),
            Dominance::Unordered
        );

        // Every claimed relation holds numerically.
        for e in &g.edges {
            let hi = evpi(&m, &n("A"), &[e.from.clone()]).unwrap().value;
            let lo = evpi(&m, &n("A"), &[e.to.clone()]).unwrap().value;
            assert!(hi >= lo - 1e-9, "{} -> {}: {hi} < {lo}", e.from, e.to);
        }
    }

    #[test]
    fn a_decision_can_bridge_a_candidate_pair() {
        // U informs another decision B whose outcome node W feeds V; W
        // screens U from V even though they are not adjacent.
        let m = DiagramBuilder::new()
            .chance("U", &["u0", "u1"], &[], vec![vec![0.55, 0.45]])
            .decision("B", &["b0", "b1"], &["U"])
            .chance(
                "W",
                &["w0", "w1"],
                &["B"],
                vec![vec![0.85, 0.15], vec![0.2, 0.8]],
            )
            .decision("A", &["a0", "a1"], &[])
            .value("V", &["W", "A"], vec![90.0, 15.0, 25.0, 60.0])
            .build()
            .unwrap();
        let g = build_ordering(&m, &n("A")).unwrap();
        assert_eq!(g.edges.len(), 1);
        assert_eq!(g.edges[0].from, n("W"));
        assert_eq!(g.edges[0].to, n("U"));
        assert_eq!(g.edges[0].rule, CandidateRule::ViaDecision(n("B")));

        let hi = evpi(&m, &n("A"), &[n("W")]).unwrap().value;
        let lo = evpi(&m, &n("A"), &[n("U")]).unwrap().value;
        assert!(hi >= lo - 1e-9);
    }

    #[test]
    fn unconnected_nodes_are_unordered_and_vacuous_screens_tie() {
        // X -> Y dangle off to the side; W is what matters. X and Y screen
        // each other vacuously (no path to V at all), so they form an
        // equal-value class, and both are worthless.
        let m = DiagramBuilder::new()
            .chance("X", &["x0", "x1"], &[], vec![vec![0.5, 0.5]])
            .chance(
                "Y",
                &["y0", "y1"],
                &["X"],
                vec![vec![0.8, 0.2], vec![0.3, 0.7]],
            )
            .chance("W", &["w0", "w1"], &[], vec![vec![0.6, 0.4]])
            .decision("A", &["a0", "a1"], &[])
            .value("V", &["W", "A"], vec![80.0, 20.0, 35.0, 65.0])
            .build()
            .unwrap();
        let g = build_ordering(&m, &n("A")).unwrap();
        assert_eq!(g.zero_set, vec![n("X"), n("Y")]);
        let directions: BTreeSet<(NodeId, NodeId)> = g
            .edges
            .iter()
            .map(|e| (e.from.clone(), e.to.clone()))
            .collect();
        assert_eq!(directions, [(n("X"), n("Y")), (n("Y"), n("X"))].into());
        // Mutual reachability reads as equality, reported from either end.
        assert_eq!(
            g.dominates(&n("X"), &n("Y")).unwrap(),
            Dominance::GreaterOrEqual
        );
        assert_eq!(
            g.dominates(&n("Y"), &n("X")).unwrap(),
            Dominance::GreaterOrEqual
        );
        // W relates to neither, and a zero-set first argument reports Zero.
        assert_eq!(g.dominates(&n("W"), &n("X")).unwrap(), Dominance::Unordered);
        assert_eq!(g.dominates(&n("X"), &n("W")).unwrap(), Dominance::Zero);

        assert_eq!(evpi(&m, &n("A"), &[n("X")]).unwrap().value, 0.0);
        assert_eq!(evpi(&m, &n("A"), &[n("Y")]).unwrap().value, 0.0);
    }

    // Two decisions; X4 only matters through what A2 already knows.
    fn two_decision_model() -> InfluenceDiagram {
        DiagramBuilder::new()
            .chance("X2", &["s0", "s1"], &[], vec![vec![0.35, 0.65]])
            .chance(
                "X1",
                &["s0", "s1"],
                &["X2"],
                vec![vec![0.75, 0.25], vec![0.4, 0.6]],
            )
            .chance("X3", &["s0", "s1"], &[], vec![vec![0.5, 0.5]])
            .chance("X4", &["s0", "s1"], &[], vec![vec![0.2, 0.8]])
            .decision("A2", &["c0", "c1"], &["X4"])
            .decision("A1", &["d0", "d1"], &[])
            .value(
                "V",
                &["X1", "X3", "A2", "A1"],
                vec![
                    60.0, 12.0, 38.0, 81.0, 27.0, 54.0, 9.0, 73.0, 44.0, 66.0, 21.0, 90.0, 15.0,
                    48.0, 84.0, 33.0,
                ],
            )
            .build()
            .unwrap()
    }

    #[test]
    fn zero_set_contains_nodes_the_decision_already_screens() {
        let m = two_decision_model();
        assert_eq!(zero_evpi_nodes(&m, &n("A2")).unwrap(), vec![n("X4")]);
        // Observing X4 again buys nothing: the arc already exists, so the
        // observed model is identical and the value is exactly zero.
        let r = evpi(&m, &n("A2"), &[n("X4")]).unwrap();
        assert_eq!(r.value, 0.0);

        let g = build_ordering(&m, &n("A2")).unwrap();
        assert_eq!(g.zero_set, vec![n("X4")]);
    }

    #[test]
    fn zero_evpi_nodes_demands_a_canonical_model() {
        let m = DiagramBuilder::new()
            .decision("A", &["a0", "a1"], &[])
            .chance(
                "X",
                &["x0", "x1"],
                &["A"],
                vec![vec![0.5, 0.5], vec![0.2, 0.8]],
            )
            .value("V", &["X"], vec![0.0, 100.0])
            .build()
            .unwrap();
        assert_eq!(
            zero_evpi_nodes(&m, &n("A")).unwrap_err(),
            SolveError::NonCanonicalQuery {
                decision: n("A"),
                chance: n("X"),
            }
        );
    }

    #[test]
    fn build_ordering_reformulates_first() {
        let m = DiagramBuilder::new()
            .decision("A", &["a0", "a1"], &[])
            .chance(
                "X",
                &["x0", "x1"],
                &["A"],
                vec![vec![0.5, 0.5], vec![0.2, 0.8]],
            )
            .value("V", &["X"], vec![0.0, 100.0])
            .build()
            .unwrap();
        let g = build_ordering(&m, &n("A")).unwrap();
        assert_eq!(g.reformulation.len(), 1);
        let mapping = g.reformulation[0].mapping_node.clone();
        assert_eq!(g.nodes, vec![mapping.clone()]);
        assert!(g.edges.is_empty());
        assert!(g.zero_set.is_empty());
        assert_eq!(
            g.dominates(&mapping, &mapping).unwrap(),
            Dominance::GreaterOrEqual
        );
        // The original node is no longer a chance node, so it is not
        // comparable.
        assert!(g.dominates(&n("X"), &mapping).is_err());
    }

    #[test]
    fn set_dominance_generalizes_the_pairwise_rules() {
        let chain = chain();
        assert_eq!(
            set_dominance(&chain, &[n("A")], &[n("X1")], &[n("X2")]).unwrap(),
            Dominance::GreaterOrEqual
        );
        assert_eq!(
            set_dominance(&chain, &[n("A")], &[n("X2")], &[n("X1")]).unwrap(),
            Dominance::LessOrEqual
        );

        let seven = seven_node_model();
        // The value node's chance parents jointly screen everything else.
        assert_eq!(
            set_dominance(
                &seven,
                &[n("A")],
                &[n("X1"), n("X2"), n("X3")],
                &[n("X4"), n("X5")],
            )
            .unwrap(),
            Dominance::GreaterOrEqual
        );
        let hi = evpi(&seven, &n("A"), &[n("X1"), n("X2"), n("X3")])
            .unwrap()
            .value;
        let lo = evpi(&seven, &n("A"), &[n("X4"), n("X5")]).unwrap().value;
        assert!(hi >= lo - 1e-9);

        let two = two_decision_model();
        assert_eq!(
            set_dominance(&two, &[n("A2")], &[n("X4")], &[n("X1")]).unwrap(),
            Dominance::Zero
        );
        assert_eq!(
            set_dominance(&two, &[n("A2")], &[n("X2")], &[n("X3")]).unwrap(),
            Dominance::Unordered
        );
    }

    #[test]
    fn set_dominance_rejects_malformed_sets() {
        let m = chain();
        assert!(matches!(
            set_dominance(&m, &[n("A")], &[n("X1")], &[n("X1")]),
            Err(SolveError::InvalidQuery(_))
        ));
        assert!(matches!(
            set_dominance(&m, &[n("A")], &[], &[n("X1")]),
            Err(SolveError::InvalidQuery(_))
        ));
        assert!(matches!(
            set_dominance(&m, &[n("X1")], &[n("X2")], &[n("X1")]),
            Err(SolveError::InvalidQuery(_))
        ));
        assert!(matches!(
            set_dominance(&m, &[n("A")], &[n("V")], &[n("X1")]),
            Err(SolveError::InvalidQuery(_))
        ));
    }

    #[test]
    fn cost_differences_sharpen_the_order() {
        let m = DiagramBuilder::new()
            .chance("X3", &["s0", "s1"], &[], vec![vec![0.5, 0.5]])
            .chance(
                "X2",
                &["s0", "s1"],
                &["X3"],
                vec![vec![0.85, 0.15], vec![0.3, 0.7]],
            )
            .chance(
                "X1",
                &["s0", "s1"],
                &["X2"],
                vec![vec![0.9, 0.1], vec![0.2, 0.8]],
            )
            .decision("A", &["a0", "a1"], &[])
            .value("V", &["A", "X1"], vec![100.0, 0.0, 0.0, 100.0])
            .cost("X1", 1.0)
            .cost("X2", 2.0)
            .cost("X3", 2.0)
            .build()
            .unwrap();
        let g = build_ordering(&m, &n("A")).unwrap();
        let refinement = nevpi_refine(&g, m.costs()).unwrap();
        let strict: BTreeSet<(NodeId, NodeId)> = refinement.strict.iter().cloned().collect();
        assert_eq!(strict, [(n("X1"), n("X2")), (n("X1"), n("X3"))].into());
        assert_eq!(refinement.equal_cost, vec![(n("X2"), n("X3"))]);

        // Strict pairs are strict on the numeric oracle too.
        for (x, y) in &refinement.strict {
            let nx = nevpi(&m, &n("A"), &[x.clone()]).unwrap();
            let ny = nevpi(&m, &n("A"), &[y.clone()]).unwrap();
            assert!(nx > ny, "{x} vs {y}: {nx} <= {ny}");
        }

        // Uniform costs change nothing.
        let uniform: BTreeMap<NodeId, f64> = g.nodes.iter().map(|x| (x.clone(), 3.0)).collect();
        let r = nevpi_refine(&g, &uniform).unwrap();
        assert!(r.strict.is_empty());
        assert_eq!(r.equal_cost.len(), 3);

        let bad: BTreeMap<NodeId, f64> = [(n("X1"), -1.0)].into();
        assert!(matches!(
            nevpi_refine(&g, &bad),
            Err(SolveError::InvalidCost { .. })
        ));
    }
}
