//! Directed acyclic graphs over named, typed nodes, with the d-separation
//! test used by every qualitative result in this crate.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Identifier of a node, unique within one graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(id: impl Into<String>) -> Self {
        NodeId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_owned())
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Chance,
    Decision,
    Value,
    /// A chance node whose table is 0/1 valued; produced when converting a
    /// decision's direct chance child into functional form.
    Deterministic,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("node id must be non-empty")]
    EmptyNodeId,
    #[error("duplicate node id {0}")]
    DuplicateNode(NodeId),
    #[error("edge endpoint {0} is not a declared node")]
    UnknownEndpoint(NodeId),
    #[error("self loop on {0}")]
    SelfLoop(NodeId),
    #[error("duplicate edge {0} -> {1}")]
    DuplicateEdge(NodeId, NodeId),
    #[error("graph contains a cycle through {}", format_cycle(.0))]
    CyclicGraph(Vec<NodeId>),
    #[error("node {0} not found")]
    NodeNotFound(NodeId),
    #[error("invalid query: {0}")]
    InvalidQuery(String),
}

fn format_cycle(nodes: &[NodeId]) -> String {
    nodes
        .iter()
        .map(NodeId::as_str)
        .collect::<Vec<_>>()
        .join(" -> ")
}

/// A DAG. Node declaration order is part of the structure: every operation
/// that returns node lists orders them by declaration, and ties in the
/// topological sort are broken the same way.
#[derive(Debug, Clone, PartialEq)]
pub struct Dag {
    nodes: Vec<(NodeId, NodeKind)>,
    index: HashMap<NodeId, usize>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
}

impl Dag {
    /// Builds a DAG, rejecting empty or duplicate ids, unknown edge
    /// endpoints, self loops, duplicate edges and cycles.
    pub fn new(
        nodes: Vec<(NodeId, NodeKind)>,
        edges: &[(NodeId, NodeId)],
    ) -> Result<Self, GraphError> {
        let mut index = HashMap::with_capacity(nodes.len());
        for (pos, (id, _)) in nodes.iter().enumerate() {
            if id.as_str().is_empty() {
                return Err(GraphError::EmptyNodeId);
            }
            if index.insert(id.clone(), pos).is_some() {
                return Err(GraphError::DuplicateNode(id.clone()));
            }
        }
        let n = nodes.len();
        let mut parents = vec![Vec::new(); n];
        let mut children = vec![Vec::new(); n];
        for (from, to) in edges {
            let f = *index
                .get(from)
                .ok_or_else(|| GraphError::UnknownEndpoint(from.clone()))?;
            let t = *index
                .get(to)
                .ok_or_else(|| GraphError::UnknownEndpoint(to.clone()))?;
            if f == t {
                return Err(GraphError::SelfLoop(from.clone()));
            }
            if children[f].contains(&t) {
                return Err(GraphError::DuplicateEdge(from.clone(), to.clone()));
            }
            children[f].push(t);
            parents[t].push(f);
        }
        for list in parents.iter_mut().chain(children.iter_mut()) {
            list.sort_unstable();
        }
        let dag = Dag {
            nodes,
            index,
            parents,
            children,
        };
        if let Some(cycle) = dag.find_cycle() {
            return Err(GraphError::CyclicGraph(cycle));
        }
        Ok(dag)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes in declaration order.
    pub fn nodes(&self) -> impl Iterator<Item = (&NodeId, NodeKind)> {
        self.nodes.iter().map(|(id, kind)| (id, *kind))
    }

    pub fn contains(&self, id: &NodeId) -> bool {
        self.index.contains_key(id)
    }

    pub fn kind(&self, id: &NodeId) -> Result<NodeKind, GraphError> {
        Ok(self.nodes[self.idx(id)?].1)
    }

    pub fn edges(&self) -> impl Iterator<Item = (&NodeId, &NodeId)> {
        self.children.iter().enumerate().flat_map(move |(f, cs)| {
            cs.iter()
                .map(move |&t| (&self.nodes[f].0, &self.nodes[t].0))
        })
    }

    pub(crate) fn idx(&self, id: &NodeId) -> Result<usize, GraphError> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| GraphError::NodeNotFound(id.clone()))
    }

    pub(crate) fn id_at(&self, idx: usize) -> &NodeId {
        &self.nodes[idx].0
    }

    pub(crate) fn kind_at(&self, idx: usize) -> NodeKind {
        self.nodes[idx].1
    }

    pub(crate) fn parents_idx(&self, idx: usize) -> &[usize] {
        &self.parents[idx]
    }

    pub(crate) fn children_idx(&self, idx: usize) -> &[usize] {
        &self.children[idx]
    }

    fn ids(&self, idxs: impl IntoIterator<Item = usize>) -> Vec<NodeId> {
        idxs.into_iter().map(|i| self.nodes[i].0.clone()).collect()
    }

    /// Direct successors, in declaration order.
    pub fn successors(&self, x: &NodeId) -> Result<Vec<NodeId>, GraphError> {
        Ok(self.ids(self.children[self.idx(x)?].iter().copied()))
    }

    /// Direct predecessors, in declaration order.
    pub fn predecessors(&self, x: &NodeId) -> Result<Vec<NodeId>, GraphError> {
        Ok(self.ids(self.parents[self.idx(x)?].iter().copied()))
    }

    fn reach_mask(&self, start: usize, forward: bool) -> Vec<bool> {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            let next = if forward {
                &self.children[i]
            } else {
                &self.parents[i]
            };
            for &j in next {
                if !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen
    }

    /// All nodes reachable from `x` by directed paths, excluding `x`.
    pub fn descendants(&self, x: &NodeId) -> Result<Vec<NodeId>, GraphError> {
        let mask = self.reach_mask(self.idx(x)?, true);
        Ok(self.ids((0..self.nodes.len()).filter(|&i| mask[i])))
    }

    /// All nodes from which `x` is reachable by directed paths, excluding `x`.
    pub fn ancestors(&self, x: &NodeId) -> Result<Vec<NodeId>, GraphError> {
        let mask = self.reach_mask(self.idx(x)?, false);
        Ok(self.ids((0..self.nodes.len()).filter(|&i| mask[i])))
    }

    fn find_cycle(&self) -> Option<Vec<NodeId>> {
        // Kahn's algorithm; any nodes left over lie on or downstream of a
        // cycle, and a backward walk inside that remainder recovers one.
        let n = self.nodes.len();
        let mut degree: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut ready: Vec<usize> = (0..n).filter(|&i| degree[i] == 0).collect();
        let mut removed = 0usize;
        while let Some(i) = ready.pop() {
            removed += 1;
            for &c in &self.children[i] {
                degree[c] -= 1;
                if degree[c] == 0 {
                    ready.push(c);
                }
            }
        }
        if removed == n {
            return None;
        }
        let start = (0..n).find(|&i| degree[i] > 0).unwrap();
        let mut seen = vec![usize::MAX; n];
        let mut path = vec![start];
        seen[start] = 0;
        loop {
            let cur = *path.last().unwrap();
            let next = self.parents[cur]
                .iter()
                .copied()
                .find(|&p| degree[p] > 0)
                .unwrap();
            if seen[next] != usize::MAX {
                let mut cycle: Vec<NodeId> = path[seen[next]..]
                    .iter()
                    .map(|&i| self.nodes[i].0.clone())
                    .collect();
                cycle.reverse();
                cycle.push(cycle[0].clone());
                return Some(cycle);
            }
            seen[next] = path.len();
            path.push(next);
        }
    }

    /// Topological order; ties broken by declaration order. Construction
    /// rejects cycles, so this always succeeds.
    pub fn topological_order(&self) -> Vec<NodeId> {
        let n = self.nodes.len();
        let mut degree: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut ready: Vec<usize> = (0..n).filter(|&i| degree[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while !ready.is_empty() {
            // Smallest declaration index first.
            let pos = ready
                .iter()
                .enumerate()
                .min_by_key(|(_, &i)| i)
                .map(|(p, _)| p)
                .unwrap();
            let i = ready.swap_remove(pos);
            order.push(i);
            for &c in &self.children[i] {
                degree[c] -= 1;
                if degree[c] == 0 {
                    ready.push(c);
                }
            }
        }
        debug_assert_eq!(order.len(), n);
        self.ids(order)
    }

    /// Whether `zs` d-separates `xs` from `ys`: every undirected path between
    /// the two sets is blocked, where a path is blocked iff it contains a
    /// non-collider in `zs` or a collider that is neither in `zs` nor an
    /// ancestor of `zs`. All node kinds participate alike.
    ///
    /// The three sets must be pairwise disjoint.
    pub fn d_separated(
        &self,
        xs: &[NodeId],
        ys: &[NodeId],
        zs: &[NodeId],
    ) -> Result<bool, GraphError> {
        let xs = self.idx_set(xs)?;
        let ys = self.idx_set(ys)?;
        let zs = self.idx_set(zs)?;
        for (a, b, what) in [
            (&xs, &ys, "x/y"),
            (&xs, &zs, "x/given"),
            (&ys, &zs, "y/given"),
        ] {
            if a.iter().any(|i| b.contains(i)) {
                return Err(GraphError::InvalidQuery(format!(
                    "query sets must be disjoint ({what} overlap)"
                )));
            }
        }
        Ok(self.d_separated_idx(&xs, &ys, &zs))
    }

    fn idx_set(&self, ids: &[NodeId]) -> Result<Vec<usize>, GraphError> {
        let mut out: Vec<usize> = ids
            .iter()
            .map(|id| self.idx(id))
            .collect::<Result<_, _>>()?;
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Active-path reachability over (node, entry direction) states.
    pub(crate) fn d_separated_idx(&self, xs: &[usize], ys: &[usize], zs: &[usize]) -> bool {
        let n = self.nodes.len();
        let mut in_z = vec![false; n];
        for &z in zs {
            in_z[z] = true;
        }
        // Colliders are openable iff they are in zs or have a descendant there.
        let mut anc_z = in_z.clone();
        {
            let mut stack: Vec<usize> = zs.to_vec();
            while let Some(i) = stack.pop() {
                for &p in &self.parents[i] {
                    if !anc_z[p] {
                        anc_z[p] = true;
                        stack.push(p);
                    }
                }
            }
        }
        let mut is_y = vec![false; n];
        for &y in ys {
            is_y[y] = true;
        }

        // State (i, dir): the trail reached node i moving upward (from one of
        // its children) or downward (from one of its parents).
        const UP: usize = 0;
        const DOWN: usize = 1;
        let mut visited = vec![[false; 2]; n];
        let mut queue: VecDeque<(usize, usize)> = xs.iter().map(|&x| (x, UP)).collect();
        while let Some((i, dir)) = queue.pop_front() {
            if visited[i][dir] {
                continue;
            }
            visited[i][dir] = true;
            if !in_z[i] && is_y[i] {
                return false;
            }
            if dir == UP {
                if !in_z[i] {
                    for &p in &self.parents[i] {
                        queue.push_back((p, UP));
                    }
                    for &c in &self.children[i] {
                        queue.push_back((c, DOWN));
                    }
                }
            } else {
                if !in_z[i] {
                    for &c in &self.children[i] {
                        queue.push_back((c, DOWN));
                    }
                }
                if anc_z[i] {
                    for &p in &self.parents[i] {
                        queue.push_back((p, UP));
                    }
                }
            }
        }
        true
    }
}
