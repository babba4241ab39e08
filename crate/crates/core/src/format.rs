//! JSON model files.
//!
//! A file lists the non-value nodes in declaration order, the value node
//! with its certain-equivalent table, the utility curve, and optional
//! observation costs. Table rows follow the mixed-radix contract of
//! [`crate::tables`]: the first-listed parent is most significant.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::curve::UtilityCurve;
use crate::graph::{Dag, GraphError, NodeId, NodeKind};
use crate::model::{CeTable, Cpt, Domain, InfluenceDiagram, ModelError};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("could not parse model file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid model file: {0}")]
    Invalid(String),
}

/// One non-value node of the model file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeSpec {
    pub id: NodeId,
    pub kind: NodeKind,
    pub domain: Vec<String>,
    #[serde(default)]
    pub parents: Vec<NodeId>,
    /// Required for chance and deterministic nodes, forbidden for
    /// decisions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cpt: Option<Vec<Vec<f64>>>,
}

/// The value node: certain equivalents per joint parent configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueSpec {
    #[serde(default = "default_value_id")]
    pub id: NodeId,
    #[serde(default)]
    pub parents: Vec<NodeId>,
    pub ce: Vec<f64>,
}

fn default_value_id() -> NodeId {
    NodeId::from("V")
}

fn default_curve() -> UtilityCurve {
    UtilityCurve::Linear
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub nodes: Vec<NodeSpec>,
    pub value: ValueSpec,
    #[serde(default = "default_curve")]
    pub utility_curve: UtilityCurve,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub costs: BTreeMap<NodeId, f64>,
}

/// Parses a JSON model file. With `renormalize`, chance-node rows are
/// rescaled to sum to one; rows are otherwise taken verbatim, and any slack
/// beyond the validation tolerance surfaces through
/// [`InfluenceDiagram::validate`].
pub fn parse_model(json: &str, renormalize: bool) -> Result<InfluenceDiagram, FormatError> {
    let file: ModelFile = serde_json::from_str(json)?;
    from_model_file(&file, renormalize)
}

/// Builds a diagram from a parsed file. Graph-level problems (duplicate
/// ids, unknown parents, cycles) fail here; table-level problems are left
/// for [`InfluenceDiagram::validate`] so they can be reported together.
pub fn from_model_file(
    file: &ModelFile,
    renormalize: bool,
) -> Result<InfluenceDiagram, FormatError> {
    let mut nodes: Vec<(NodeId, NodeKind)> = Vec::with_capacity(file.nodes.len() + 1);
    let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
    let mut domains = BTreeMap::new();
    let mut cpts = BTreeMap::new();
    for spec in &file.nodes {
        if spec.kind == NodeKind::Value {
            return Err(FormatError::Invalid(format!(
                "'{}' declares kind \"value\"; the value node belongs in the \"value\" entry",
                spec.id
            )));
        }
        nodes.push((spec.id.clone(), spec.kind));
        domains.insert(spec.id.clone(), Domain::new(spec.domain.clone()));
        for p in &spec.parents {
            edges.push((p.clone(), spec.id.clone()));
        }
        match (spec.kind, &spec.cpt) {
            (NodeKind::Decision, Some(_)) => {
                return Err(FormatError::Invalid(format!(
                    "decision '{}' must not carry a probability table",
                    spec.id
                )));
            }
            (NodeKind::Decision, None) => {}
            (_, Some(rows)) => {
                let mut rows = rows.clone();
                if renormalize && spec.kind == NodeKind::Chance {
                    for (i, row) in rows.iter_mut().enumerate() {
                        let sum: f64 = row.iter().sum();
                        if !(sum > 0.0) || !sum.is_finite() {
                            return Err(FormatError::Invalid(format!(
                                "cannot renormalize row {i} of '{}': its sum is {sum}",
                                spec.id
                            )));
                        }
                        for p in row.iter_mut() {
                            *p /= sum;
                        }
                    }
                }
                cpts.insert(
                    spec.id.clone(),
                    Cpt {
                        parent_order: spec.parents.clone(),
                        rows,
                    },
                );
            }
            (_, None) => {
                return Err(FormatError::Invalid(format!(
                    "'{}' needs a probability table",
                    spec.id
                )));
            }
        }
    }
    nodes.push((file.value.id.clone(), NodeKind::Value));
    for p in &file.value.parents {
        edges.push((p.clone(), file.value.id.clone()));
    }
    let dag = Dag::new(nodes, &edges)?;
    Ok(InfluenceDiagram::from_parts(
        dag,
        domains,
        cpts,
        CeTable {
            parent_order: file.value.parents.clone(),
            values: file.value.ce.clone(),
        },
        file.utility_curve.clone(),
        file.costs.clone(),
    ))
}

/// The file representation of a diagram. Node order, parent order and row
/// order are preserved, so emitting is deterministic.
pub fn to_model_file(m: &InfluenceDiagram) -> ModelFile {
    let dag = m.dag();
    let mut nodes = Vec::new();
    let mut value = ValueSpec {
        id: default_value_id(),
        parents: m.value_ce().parent_order.clone(),
        ce: m.value_ce().values.clone(),
    };
    for (id, kind) in dag.nodes() {
        if kind == NodeKind::Value {
            value.id = id.clone();
            continue;
        }
        let domain = m
            .domain(id)
            .map(|d| d.states().to_vec())
            .unwrap_or_default();
        let (parents, cpt) = match m.cpt(id) {
            Some(c) => (c.parent_order.clone(), Some(c.rows.clone())),
            None => (dag.predecessors(id).unwrap_or_default(), None),
        };
        nodes.push(NodeSpec {
            id: id.clone(),
            kind,
            domain,
            parents,
            cpt,
        });
    }
    ModelFile {
        nodes,
        value,
        utility_curve: m.curve().clone(),
        costs: m.costs().clone(),
    }
}

/// Pretty-printed JSON for a diagram; stable for fixed input.
pub fn emit_model(m: &InfluenceDiagram) -> String {
    let file = to_model_file(m);
    let mut out = serde_json::to_string_pretty(&file).expect("model files always serialize");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DiagramBuilder;

    fn coin_json() -> String {
        r#"{
            "nodes": [
                {"id": "X", "kind": "chance", "domain": ["heads", "tails"], "cpt": [[0.5, 0.5]]},
                {"id": "A", "kind": "decision", "domain": ["call_heads", "call_tails"]}
            ],
            "value": {"parents": ["A", "X"], "ce": [100.0, 0.0, 0.0, 100.0]},
            "utility_curve": {"type": "linear"}
        }"#
        .to_string()
    }

    #[test]
    fn parses_a_minimal_file_with_defaults() {
        let m = parse_model(&coin_json(), false).unwrap();
        assert!(m.validate().is_valid());
        assert_eq!(m.value_node(), Some(&NodeId::from("V")));
        assert_eq!(m.chance_nodes(), vec![NodeId::from("X")]);
        assert_eq!(m.curve(), &UtilityCurve::Linear);
        let sol = crate::solver::solve(&m).unwrap();
        assert_eq!(sol.expected_utility, 50.0);
    }

    #[test]
    fn missing_curve_defaults_to_linear_and_costs_to_empty() {
        let json = r#"{
            "nodes": [
                {"id": "X", "kind": "chance", "domain": ["a", "b"], "cpt": [[0.4, 0.6]]}
            ],
            "value": {"id": "W", "parents": ["X"], "ce": [1.0, 2.0]}
        }"#;
        let m = parse_model(json, false).unwrap();
        assert_eq!(m.curve(), &UtilityCurve::Linear);
        assert!(m.costs().is_empty());
        assert_eq!(m.value_node(), Some(&NodeId::from("W")));
    }

    #[test]
    fn renormalization_is_explicit() {
        let json = r#"{
            "nodes": [
                {"id": "X", "kind": "chance", "domain": ["a", "b"], "cpt": [[2.0, 6.0]]}
            ],
            "value": {"parents": ["X"], "ce": [0.0, 1.0]}
        }"#;
        let verbatim = parse_model(json, false).unwrap();
        assert!(!verbatim.validate().is_valid());
        let rescaled = parse_model(json, true).unwrap();
        assert!(rescaled.validate().is_valid());
        assert_eq!(
            rescaled.cpt(&NodeId::from("X")).unwrap().rows[0],
            vec![0.25, 0.75]
        );

        let zero_row = r#"{
            "nodes": [
                {"id": "X", "kind": "chance", "domain": ["a", "b"], "cpt": [[0.0, 0.0]]}
            ],
            "value": {"parents": ["X"], "ce": [0.0, 1.0]}
        }"#;
        assert!(matches!(
            parse_model(zero_row, true),
            Err(FormatError::Invalid(_))
        ));
    }

    #[test]
    fn structural_problems_are_reported_at_parse_time() {
        let cyclic = r#"{
            "nodes": [
                {"id": "X", "kind": "chance", "domain": ["a", "b"], "parents": ["Y"],
                 "cpt": [[0.5, 0.5], [0.5, 0.5]]},
                {"id": "Y", "kind": "chance", "domain": ["a", "b"], "parents": ["X"],
                 "cpt": [[0.5, 0.5], [0.5, 0.5]]}
            ],
            "value": {"parents": ["X"], "ce": [0.0, 1.0]}
        }"#;
        assert!(matches!(
            parse_model(cyclic, false),
            Err(FormatError::Graph(GraphError::CyclicGraph(_)))
        ));

        let value_in_nodes = r#"{
            "nodes": [
                {"id": "V", "kind": "value", "domain": []}
            ],
            "value": {"parents": [], "ce": [0.0]}
        }"#;
        assert!(matches!(
            parse_model(value_in_nodes, false),
            Err(FormatError::Invalid(_))
        ));

        let decision_with_cpt = r#"{
            "nodes": [
                {"id": "A", "kind": "decision", "domain": ["a", "b"], "cpt": [[1.0, 0.0]]}
            ],
            "value": {"parents": ["A"], "ce": [0.0, 1.0]}
        }"#;
        assert!(matches!(
            parse_model(decision_with_cpt, false),
            Err(FormatError::Invalid(_))
        ));

        let chance_without_cpt = r#"{
            "nodes": [
                {"id": "X", "kind": "chance", "domain": ["a", "b"]}
            ],
            "value": {"parents": ["X"], "ce": [0.0, 1.0]}
        }"#;
        assert!(matches!(
            parse_model(chance_without_cpt, false),
            Err(FormatError::Invalid(_))
        ));

        assert!(matches!(
            parse_model("{", false),
            Err(FormatError::Parse(_))
        ));
    }

    #[test]
    fn emit_then_parse_is_identity_on_parsed_models() {
        let m = parse_model(&coin_json(), false).unwrap();
        let emitted = emit_model(&m);
        let reparsed = parse_model(&emitted, false).unwrap();
        assert_eq!(reparsed, m);
        // Emitting again yields the same bytes.
        assert_eq!(emit_model(&reparsed), emitted);
    }

    #[test]
    fn round_trips_a_model_with_every_feature() {
        let m = DiagramBuilder::new()
            .chance("X", &["x0", "x1"], &[], vec![vec![0.3, 0.7]])
            .deterministic(
                "D",
                &["d0", "d1"],
                &["X"],
                vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            )
            .decision("A", &["go", "stay"], &["X"])
            .value("V", &["D", "A"], vec![5.0, 10.0, 0.0, 2.5])
            .curve(UtilityCurve::TabulatedMonotone {
                breakpoints: vec![(0.0, 0.0), (10.0, 1.0)],
            })
            .cost("X", 2.5)
            .build()
            .unwrap();
        let reparsed = parse_model(&emit_model(&m), false).unwrap();
        assert_eq!(reparsed, m);
        assert!(reparsed.validate().is_valid());
    }
}
