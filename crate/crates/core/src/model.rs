//! Influence diagrams: a typed DAG carrying conditional probability tables,
//! one certain-equivalent table on the value node, a utility curve and
//! optional observation costs.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::curve::UtilityCurve;
use crate::graph::{Dag, GraphError, NodeId, NodeKind};
use crate::tables;

/// CPT rows must sum to one within this tolerance.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("unsupported reformulation: {0}")]
    UnsupportedReformulation(String),
}

/// Ordered, labelled states of a chance, decision or deterministic node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    states: Vec<String>,
}

impl Domain {
    pub fn new<S: Into<String>>(states: impl IntoIterator<Item = S>) -> Self {
        Domain {
            states: states.into_iter().map(Into::into).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn label(&self, state: usize) -> &str {
        &self.states[state]
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.states.iter().position(|s| s == label)
    }
}

/// Conditional probability table. Row `r` holds the distribution of the
/// child given the parent configuration that [`tables::rank`] maps to `r`,
/// over the parent domain sizes in `parent_order`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cpt {
    pub parent_order: Vec<NodeId>,
    pub rows: Vec<Vec<f64>>,
}

impl Cpt {
    pub fn row(&self, idx: usize) -> &[f64] {
        &self.rows[idx]
    }
}

/// Certain-equivalent table of the value node: one number per joint parent
/// configuration, indexed like CPT rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CeTable {
    pub parent_order: Vec<NodeId>,
    pub values: Vec<f64>,
}

/// Record of one chance-to-deterministic conversion performed by
/// [`InfluenceDiagram::canonicalize`].
///
/// Each state of `mapping_node` encodes a total function from the decision's
/// actions to the states of `original`: `functions[s][d]` is the state the
/// original node takes when the mapping node is in state `s` and the
/// decision takes action `d`. State labels join the image labels with `|`
/// in action order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MappingVariableRecord {
    pub original: NodeId,
    pub mapping_node: NodeId,
    pub deterministic_node: NodeId,
    pub functions: Vec<Vec<usize>>,
}

/// One problem found by [`InfluenceDiagram::validate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Structure {
        node: Option<NodeId>,
        detail: String,
    },
    Domain {
        node: NodeId,
        detail: String,
    },
    TableShape {
        node: NodeId,
        detail: String,
    },
    Normalization {
        node: NodeId,
        row: usize,
        sum: f64,
    },
    Entry {
        node: NodeId,
        row: usize,
        detail: String,
    },
    Curve {
        detail: String,
    },
    Cost {
        node: NodeId,
        detail: String,
    },
}

impl Violation {
    pub fn kind(&self) -> &'static str {
        match self {
            Violation::Structure { .. } => "structure",
            Violation::Domain { .. } => "domain",
            Violation::TableShape { .. } => "table_shape",
            Violation::Normalization { .. } => "normalization",
            Violation::Entry { .. } => "entry",
            Violation::Curve { .. } => "curve",
            Violation::Cost { .. } => "cost",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Structure {
                node: Some(n),
                detail,
            } => write!(f, "{n}: {detail}"),
            Violation::Structure { node: None, detail } => write!(f, "{detail}"),
            Violation::Domain { node, detail } => write!(f, "{node}: {detail}"),
            Violation::TableShape { node, detail } => write!(f, "{node}: {detail}"),
            Violation::Normalization { node, row, sum } => {
                write!(f, "{node}: row {row} sums to {sum}, expected 1")
            }
            Violation::Entry { node, row, detail } => write!(f, "{node}: row {row}: {detail}"),
            Violation::Curve { detail } => write!(f, "utility curve: {detail}"),
            Violation::Cost { node, detail } => write!(f, "cost of {node}: {detail}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceDiagram {
    dag: Dag,
    domains: BTreeMap<NodeId, Domain>,
    cpts: BTreeMap<NodeId, Cpt>,
    value_ce: CeTable,
    curve: UtilityCurve,
    costs: BTreeMap<NodeId, f64>,
}

impl InfluenceDiagram {
    /// Assembles a diagram from parts without semantic checks; run
    /// [`Self::validate`] before trusting numeric results.
    pub fn from_parts(
        dag: Dag,
        domains: BTreeMap<NodeId, Domain>,
        cpts: BTreeMap<NodeId, Cpt>,
        value_ce: CeTable,
        curve: UtilityCurve,
        costs: BTreeMap<NodeId, f64>,
    ) -> Self {
        InfluenceDiagram {
            dag,
            domains,
            cpts,
            value_ce,
            curve,
            costs,
        }
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    /// The value node, if exactly its kind appears once it is unambiguous;
    /// with zero or several value nodes the first declared one (if any) is
    /// returned and validation reports the problem.
    pub fn value_node(&self) -> Option<&NodeId> {
        self.dag
            .nodes()
            .find(|(_, kind)| *kind == NodeKind::Value)
            .map(|(id, _)| id)
    }

    pub fn domain(&self, id: &NodeId) -> Option<&Domain> {
        self.domains.get(id)
    }

    pub fn domains(&self) -> &BTreeMap<NodeId, Domain> {
        &self.domains
    }

    pub fn cpt(&self, id: &NodeId) -> Option<&Cpt> {
        self.cpts.get(id)
    }

    pub fn value_ce(&self) -> &CeTable {
        &self.value_ce
    }

    pub fn curve(&self) -> &UtilityCurve {
        &self.curve
    }

    /// The same diagram re-priced under a different utility curve.
    pub fn with_curve(&self, curve: UtilityCurve) -> Self {
        let mut out = self.clone();
        out.curve = curve;
        out
    }

    /// Observation cost of a node; unlisted nodes are free.
    pub fn cost(&self, id: &NodeId) -> f64 {
        self.costs.get(id).copied().unwrap_or(0.0)
    }

    pub fn costs(&self) -> &BTreeMap<NodeId, f64> {
        &self.costs
    }

    fn nodes_of_kind(&self, want: impl Fn(NodeKind) -> bool) -> Vec<NodeId> {
        self.dag
            .nodes()
            .filter(|(_, kind)| want(*kind))
            .map(|(id, _)| id.clone())
            .collect()
    }

    pub fn chance_nodes(&self) -> Vec<NodeId> {
        self.nodes_of_kind(|k| k == NodeKind::Chance)
    }

    pub fn decision_nodes(&self) -> Vec<NodeId> {
        self.nodes_of_kind(|k| k == NodeKind::Decision)
    }

    /// Chance and deterministic nodes, declaration order: everything that
    /// carries a probability table.
    pub fn stochastic_nodes(&self) -> Vec<NodeId> {
        self.nodes_of_kind(|k| matches!(k, NodeKind::Chance | NodeKind::Deterministic))
    }

    /// Same diagram over a different DAG; used when only edges change.
    pub(crate) fn replace_dag(&self, dag: Dag) -> Self {
        InfluenceDiagram {
            dag,
            domains: self.domains.clone(),
            cpts: self.cpts.clone(),
            value_ce: self.value_ce.clone(),
            curve: self.curve.clone(),
            costs: self.costs.clone(),
        }
    }

    /// Checks every structural and numeric invariant, reporting all
    /// violations rather than stopping at the first.
    pub fn validate(&self) -> ValidationReport {
        let mut v = Vec::new();

        let value_nodes = self.nodes_of_kind(|k| k == NodeKind::Value);
        if value_nodes.len() != 1 {
            v.push(Violation::Structure {
                node: None,
                detail: format!(
                    "expected exactly one value node, found {}",
                    value_nodes.len()
                ),
            });
        }
        for vn in &value_nodes {
            let succ = self.dag.successors(vn).expect("value node is in the dag");
            if !succ.is_empty() {
                v.push(Violation::Structure {
                    node: Some(vn.clone()),
                    detail: "value node must have no outgoing arcs".into(),
                });
            }
            if self.domains.contains_key(vn) {
                v.push(Violation::Structure {
                    node: Some(vn.clone()),
                    detail: "value node must not declare a domain".into(),
                });
            }
            if self.cpts.contains_key(vn) {
                v.push(Violation::Structure {
                    node: Some(vn.clone()),
                    detail: "value node must not have a probability table".into(),
                });
            }
        }

        for (id, kind) in self.dag.nodes() {
            if kind == NodeKind::Value {
                continue;
            }
            match self.domains.get(id) {
                None => v.push(Violation::Domain {
                    node: id.clone(),
                    detail: "missing domain".into(),
                }),
                Some(dom) => {
                    if dom.len() < 2 && matches!(kind, NodeKind::Chance | NodeKind::Decision) {
                        v.push(Violation::Domain {
                            node: id.clone(),
                            detail: format!(
                                "domain must have at least 2 states, has {}",
                                dom.len()
                            ),
                        });
                    }
                    let mut seen = std::collections::BTreeSet::new();
                    for s in dom.states() {
                        if s.is_empty() {
                            v.push(Violation::Domain {
                                node: id.clone(),
                                detail: "empty state label".into(),
                            });
                        } else if !seen.insert(s) {
                            v.push(Violation::Domain {
                                node: id.clone(),
                                detail: format!("duplicate state label {s:?}"),
                            });
                        }
                    }
                }
            }
        }

        for (id, kind) in self.dag.nodes() {
            match kind {
                NodeKind::Chance | NodeKind::Deterministic => {
                    let Some(cpt) = self.cpts.get(id) else {
                        v.push(Violation::TableShape {
                            node: id.clone(),
                            detail: "missing probability table".into(),
                        });
                        continue;
                    };
                    self.check_table_shape(id, &cpt.parent_order, cpt.rows.len(), &mut v);
                    let Some(dom) = self.domains.get(id) else {
                        continue;
                    };
                    for (r, row) in cpt.rows.iter().enumerate() {
                        if row.len() != dom.len() {
                            v.push(Violation::TableShape {
                                node: id.clone(),
                                detail: format!(
                                    "row {r} has {} entries, domain has {} states",
                                    row.len(),
                                    dom.len()
                                ),
                            });
                            continue;
                        }
                        let mut sum = 0.0;
                        let mut bad_entry = false;
                        for &p in row {
                            if !p.is_finite() || !(0.0..=1.0).contains(&p) {
                                bad_entry = true;
                            }
                            sum += p;
                        }
                        if bad_entry {
                            v.push(Violation::Entry {
                                node: id.clone(),
                                row: r,
                                detail: "probabilities must lie in [0, 1]".into(),
                            });
                        } else if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                            v.push(Violation::Normalization {
                                node: id.clone(),
                                row: r,
                                sum,
                            });
                        }
                        if kind == NodeKind::Deterministic
                            && row.iter().any(|&p| p != 0.0 && p != 1.0)
                        {
                            v.push(Violation::Entry {
                                node: id.clone(),
                                row: r,
                                detail: "deterministic rows must be 0/1 valued".into(),
                            });
                        }
                    }
                }
                NodeKind::Decision => {
                    if self.cpts.contains_key(id) {
                        v.push(Violation::Structure {
                            node: Some(id.clone()),
                            detail: "decision node must not have a probability table".into(),
                        });
                    }
                }
                NodeKind::Value => {}
            }
        }

        if let Some(vn) = value_nodes.first() {
            let vn = vn.clone();
            self.check_table_shape(
                &vn,
                &self.value_ce.parent_order,
                self.value_ce.values.len(),
                &mut v,
            );
            for (i, &ce) in self.value_ce.values.iter().enumerate() {
                if !ce.is_finite() {
                    v.push(Violation::Entry {
                        node: vn.clone(),
                        row: i,
                        detail: "certain equivalent must be finite".into(),
                    });
                }
            }
        }

        match &self.curve {
            UtilityCurve::Linear => {}
            UtilityCurve::Exponential { risk_tolerance } => {
                if !risk_tolerance.is_finite() || *risk_tolerance <= 0.0 {
                    v.push(Violation::Curve {
                        detail: format!("risk tolerance must be positive, got {risk_tolerance}"),
                    });
                }
            }
            UtilityCurve::TabulatedMonotone { breakpoints } => {
                if breakpoints.len() < 2 {
                    v.push(Violation::Curve {
                        detail: "tabulated curve needs at least 2 breakpoints".into(),
                    });
                }
                if breakpoints
                    .iter()
                    .any(|(c, u)| !c.is_finite() || !u.is_finite())
                {
                    v.push(Violation::Curve {
                        detail: "breakpoints must be finite".into(),
                    });
                } else if breakpoints
                    .windows(2)
                    .any(|w| w[1].0 <= w[0].0 || w[1].1 <= w[0].1)
                {
                    v.push(Violation::Curve {
                        detail: "breakpoints must be strictly increasing in both coordinates"
                            .into(),
                    });
                }
            }
        }

        for (id, &cost) in &self.costs {
            if !self.dag.contains(id) {
                v.push(Violation::Cost {
                    node: id.clone(),
                    detail: "not a declared node".into(),
                });
            } else if !matches!(
                self.dag.kind(id).unwrap(),
                NodeKind::Chance | NodeKind::Deterministic
            ) {
                v.push(Violation::Cost {
                    node: id.clone(),
                    detail: "only observable (chance or deterministic) nodes can carry a cost"
                        .into(),
                });
            }
            if !cost.is_finite() || cost < 0.0 {
                v.push(Violation::Cost {
                    node: id.clone(),
                    detail: format!("must be finite and non-negative, got {cost}"),
                });
            }
        }

        ValidationReport { violations: v }
    }

    /// Checks that a table's parent list matches the graph and that the row
    /// count matches the parents' joint domain size.
    fn check_table_shape(
        &self,
        node: &NodeId,
        parent_order: &[NodeId],
        row_count: usize,
        v: &mut Vec<Violation>,
    ) {
        let graph_parents = self.dag.predecessors(node).expect("node is in the dag");
        let mut listed = parent_order.to_vec();
        listed.sort();
        let had_dups = {
            let before = listed.len();
            listed.dedup();
            listed.len() != before
        };
        let mut expected = graph_parents.clone();
        expected.sort();
        if had_dups || listed != expected {
            v.push(Violation::TableShape {
                node: node.clone(),
                detail: format!(
                    "table parents {:?} do not match graph predecessors {:?}",
                    parent_order.iter().map(NodeId::as_str).collect::<Vec<_>>(),
                    graph_parents.iter().map(NodeId::as_str).collect::<Vec<_>>()
                ),
            });
            return;
        }
        let mut product: u128 = 1;
        for p in parent_order {
            let Some(dom) = self.domains.get(p) else {
                return;
            };
            product = product.saturating_mul(dom.len() as u128);
        }
        if row_count as u128 != product {
            v.push(Violation::TableShape {
                node: node.clone(),
                detail: format!("expected {product} rows, found {row_count}"),
            });
        }
    }

    /// Whether no chance node is a descendant of decision `a`, so that
    /// observing any chance node before acting cannot create a cycle.
    pub fn is_canonical_wrt(&self, a: &NodeId) -> Result<bool, ModelError> {
        if self.dag.kind(a)? != NodeKind::Decision {
            return Err(ModelError::InvalidQuery(format!(
                "{a} is not a decision node"
            )));
        }
        let desc = self.dag.descendants(a)?;
        Ok(desc
            .iter()
            .all(|d| self.dag.kind(d).unwrap() != NodeKind::Chance))
    }

    /// [`Self::is_canonical_wrt`] for every decision in the diagram.
    pub fn is_canonical(&self) -> bool {
        self.decision_nodes()
            .iter()
            .all(|a| self.is_canonical_wrt(a).unwrap())
    }

    /// Converts each direct chance child of `a` into a deterministic node
    /// driven by a new mapping variable, removing all chance nodes from the
    /// decision's descendants while preserving the expected utility of every
    /// policy.
    ///
    /// A child X with actions d and other parents P becomes deterministic
    /// with parents {a, X(a)}, where the mapping variable X(a) has parents P,
    /// one state per total function f from actions to states of X, and prior
    /// p(f | P) = prod over d of p_X(f(d) | a = d, P); the factors are taken
    /// as independent across actions.
    ///
    /// Returns the reformulated diagram and one record per conversion; an
    /// already-canonical diagram comes back unchanged with no records.
    ///
    /// Only this single-step construction is supported. Chance descendants
    /// of `a` deeper than its direct children, children that also have other
    /// decision parents, and children whose other parents themselves depend
    /// on `a` all raise [`ModelError::UnsupportedReformulation`].
    pub fn canonicalize(
        &self,
        a: &NodeId,
    ) -> Result<(InfluenceDiagram, Vec<MappingVariableRecord>), ModelError> {
        if self.dag.kind(a)? != NodeKind::Decision {
            return Err(ModelError::InvalidQuery(format!(
                "{a} is not a decision node"
            )));
        }
        let descendants = self.dag.descendants(a)?;
        let chance_desc: Vec<NodeId> = descendants
            .iter()
            .filter(|d| self.dag.kind(d).unwrap() == NodeKind::Chance)
            .cloned()
            .collect();
        if chance_desc.is_empty() {
            return Ok((self.clone(), Vec::new()));
        }
        let direct = self.dag.successors(a)?;
        for x in &chance_desc {
            if !direct.contains(x) {
                return Err(ModelError::UnsupportedReformulation(format!(
                    "chance node {x} is a transitive descendant of {a}; only direct children can be reformulated"
                )));
            }
            for p in self.dag.predecessors(x)? {
                if p == *a {
                    continue;
                }
                if self.dag.kind(&p)? == NodeKind::Decision {
                    return Err(ModelError::UnsupportedReformulation(format!(
                        "chance node {x} has a second decision parent {p}"
                    )));
                }
                if descendants.contains(&p) {
                    return Err(ModelError::UnsupportedReformulation(format!(
                        "parent {p} of chance node {x} itself depends on {a}"
                    )));
                }
            }
        }

        let a_size = self
            .domains
            .get(a)
            .ok_or_else(|| ModelError::InvalidQuery(format!("{a} has no domain")))?
            .len();

        let mut taken: std::collections::BTreeSet<NodeId> =
            self.dag.nodes().map(|(id, _)| id.clone()).collect();
        let mut new_nodes: Vec<(NodeId, NodeKind)> = Vec::new();
        let mut edges: Vec<(NodeId, NodeId)> = self
            .dag
            .edges()
            .map(|(f, t)| (f.clone(), t.clone()))
            .collect();
        let mut domains = self.domains.clone();
        let mut cpts = self.cpts.clone();
        let mut records = Vec::new();

        for (id, kind) in self.dag.nodes() {
            if !chance_desc.contains(id) {
                new_nodes.push((id.clone(), kind));
                continue;
            }
            let x = id;
            let x_dom = self
                .domains
                .get(x)
                .ok_or_else(|| ModelError::InvalidQuery(format!("{x} has no domain")))?;
            let x_size = x_dom.len();
            let x_cpt = self
                .cpts
                .get(x)
                .ok_or_else(|| ModelError::InvalidQuery(format!("{x} has no table")))?;

            let mapping_id = fresh_id(&taken, &format!("{x}({a})"));
            taken.insert(mapping_id.clone());

            // All total functions from actions to states of x, indexed with
            // the first action most significant.
            let fn_shape = vec![x_size; a_size];
            let functions: Vec<Vec<usize>> = tables::configs(&fn_shape).collect();
            let labels: Vec<String> = functions
                .iter()
                .map(|f| {
                    f.iter()
                        .map(|&s| x_dom.label(s).to_owned())
                        .collect::<Vec<_>>()
                        .join("|")
                })
                .collect();

            // The mapping variable keeps x's non-decision parents, in x's
            // original table order.
            let p_order: Vec<NodeId> = x_cpt
                .parent_order
                .iter()
                .filter(|p| *p != a)
                .cloned()
                .collect();
            let p_sizes: Vec<usize> = p_order
                .iter()
                .map(|p| self.domains.get(p).map(Domain::len).unwrap_or(0))
                .collect();
            let a_pos = x_cpt
                .parent_order
                .iter()
                .position(|p| p == a)
                .expect("a is a parent of its chance child");
            let x_parent_sizes: Vec<usize> = x_cpt
                .parent_order
                .iter()
                .map(|p| self.domains.get(p).map(Domain::len).unwrap_or(0))
                .collect();

            let mut mapping_rows = Vec::with_capacity(tables::config_count(&p_sizes));
            for p_config in tables::configs(&p_sizes) {
                let mut row = Vec::with_capacity(functions.len());
                for f in &functions {
                    let mut prob = 1.0;
                    for (action, &image) in f.iter().enumerate() {
                        let mut full = Vec::with_capacity(x_cpt.parent_order.len());
                        let mut p_iter = p_config.iter();
                        for pos in 0..x_cpt.parent_order.len() {
                            if pos == a_pos {
                                full.push(action);
                            } else {
                                full.push(*p_iter.next().unwrap());
                            }
                        }
                        let row_idx = tables::rank(&x_parent_sizes, &full);
                        prob *= x_cpt.rows[row_idx][image];
                    }
                    row.push(prob);
                }
                mapping_rows.push(row);
            }

            // x becomes deterministic: state = f(action). Rows follow parent
            // order [a, mapping]: action outer, function inner.
            let det_parent_order = vec![a.clone(), mapping_id.clone()];
            let mut det_rows = Vec::with_capacity(a_size * functions.len());
            for action in 0..a_size {
                for f in &functions {
                    let mut row = vec![0.0; x_size];
                    row[f[action]] = 1.0;
                    det_rows.push(row);
                }
            }

            for p in &p_order {
                edges.retain(|(f, t)| !(f == p && t == x));
                edges.push((p.clone(), mapping_id.clone()));
            }
            edges.push((mapping_id.clone(), x.clone()));

            domains.insert(mapping_id.clone(), Domain::new(labels));
            cpts.insert(
                mapping_id.clone(),
                Cpt {
                    parent_order: p_order,
                    rows: mapping_rows,
                },
            );
            cpts.insert(
                x.clone(),
                Cpt {
                    parent_order: det_parent_order,
                    rows: det_rows,
                },
            );

            new_nodes.push((mapping_id.clone(), NodeKind::Chance));
            new_nodes.push((x.clone(), NodeKind::Deterministic));
            records.push(MappingVariableRecord {
                original: x.clone(),
                mapping_node: mapping_id,
                deterministic_node: x.clone(),
                functions,
            });
        }

        let dag = Dag::new(new_nodes, &edges)?;
        Ok((
            InfluenceDiagram {
                dag,
                domains,
                cpts,
                value_ce: self.value_ce.clone(),
                curve: self.curve.clone(),
                costs: self.costs.clone(),
            },
            records,
        ))
    }
}

fn fresh_id(taken: &std::collections::BTreeSet<NodeId>, base: &str) -> NodeId {
    let candidate = NodeId::new(base);
    if !taken.contains(&candidate) {
        return candidate;
    }
    for k in 2.. {
        let candidate = NodeId::new(format!("{base}#{k}"));
        if !taken.contains(&candidate) {
            return candidate;
        }
    }
    unreachable!()
}

/// Incremental construction of an [`InfluenceDiagram`]. Parent lists double
/// as table parent order, keeping the two in sync by construction.
#[derive(Debug, Clone)]
pub struct DiagramBuilder {
    nodes: Vec<(NodeId, NodeKind)>,
    edges: Vec<(NodeId, NodeId)>,
    domains: BTreeMap<NodeId, Domain>,
    cpts: BTreeMap<NodeId, Cpt>,
    value_ce: CeTable,
    curve: UtilityCurve,
    costs: BTreeMap<NodeId, f64>,
}

impl Default for DiagramBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl DiagramBuilder {
    pub fn new() -> Self {
        DiagramBuilder {
            nodes: Vec::new(),
            edges: Vec::new(),
            domains: BTreeMap::new(),
            cpts: BTreeMap::new(),
            value_ce: CeTable {
                parent_order: Vec::new(),
                values: Vec::new(),
            },
            curve: UtilityCurve::Linear,
            costs: BTreeMap::new(),
        }
    }

    fn add_node(
        mut self,
        id: &str,
        kind: NodeKind,
        states: &[&str],
        parents: &[&str],
        rows: Option<Vec<Vec<f64>>>,
    ) -> Self {
        let id = NodeId::from(id);
        self.nodes.push((id.clone(), kind));
        self.domains
            .insert(id.clone(), Domain::new(states.iter().copied()));
        let parent_order: Vec<NodeId> = parents.iter().map(|p| NodeId::from(*p)).collect();
        for p in &parent_order {
            self.edges.push((p.clone(), id.clone()));
        }
        if let Some(rows) = rows {
            self.cpts.insert(id, Cpt { parent_order, rows });
        }
        self
    }

    pub fn chance(self, id: &str, states: &[&str], parents: &[&str], rows: Vec<Vec<f64>>) -> Self {
        self.add_node(id, NodeKind::Chance, states, parents, Some(rows))
    }

    pub fn deterministic(
        self,
        id: &str,
        states: &[&str],
        parents: &[&str],
        rows: Vec<Vec<f64>>,
    ) -> Self {
        self.add_node(id, NodeKind::Deterministic, states, parents, Some(rows))
    }

    pub fn decision(self, id: &str, actions: &[&str], parents: &[&str]) -> Self {
        self.add_node(id, NodeKind::Decision, actions, parents, None)
    }

    pub fn value(mut self, id: &str, parents: &[&str], ce: Vec<f64>) -> Self {
        let id = NodeId::from(id);
        self.nodes.push((id.clone(), NodeKind::Value));
        let parent_order: Vec<NodeId> = parents.iter().map(|p| NodeId::from(*p)).collect();
        for p in &parent_order {
            self.edges.push((p.clone(), id.clone()));
        }
        self.value_ce = CeTable {
            parent_order,
            values: ce,
        };
        self
    }

    pub fn curve(mut self, curve: UtilityCurve) -> Self {
        self.curve = curve;
        self
    }

    pub fn cost(mut self, id: &str, cost: f64) -> Self {
        self.costs.insert(NodeId::from(id), cost);
        self
    }

    /// Wires the DAG; graph-level problems (cycles, unknown parents, ...)
    /// fail here, everything else is left to `validate`.
    pub fn build(self) -> Result<InfluenceDiagram, ModelError> {
        let dag = Dag::new(self.nodes, &self.edges)?;
        Ok(InfluenceDiagram {
            dag,
            domains: self.domains,
            cpts: self.cpts,
            value_ce: self.value_ce,
            curve: self.curve,
            costs: self.costs,
        })
    }
}
