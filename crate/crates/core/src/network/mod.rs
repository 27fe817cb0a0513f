//! Acyclic single-source multicast networks.
//!
//! A [`Network`] is a directed acyclic multigraph of unit-capacity channels
//! with one source and a nonempty set of sinks. This module parses the text
//! format, computes max-flow quantities (C_t, C_min and the min-cut between
//! the source and an edge set) and enumerates topology-based wiretap sets.

mod flow;

pub(crate) use flow::FlowGraph;

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use itertools::Itertools;
use thiserror::Error;

use crate::field::{FieldError, FieldSpec};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetworkError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("network contains a cycle through node `{0}`")]
    CycleDetected(String),
    #[error("sink `{0}` is not reachable from the source")]
    UnreachableSink(String),
    #[error("duplicate edge id `{0}`")]
    DuplicateEdgeId(String),
    #[error("unknown sink `{0}`")]
    UnknownSink(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("edge set is empty")]
    EmptySet,
    #[error("security level must be at least 1")]
    ZeroSecurityLevel,
    #[error("security level {r} must be below the multicast capacity {c_min}")]
    SecurityLevelTooLarge { r: usize, c_min: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A channel: unit capacity, from `tail` to `head` (node indices).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub tail: usize,
    pub head: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    nodes: Vec<String>,
    edges: Vec<Edge>,
    source: usize,
    sinks: Vec<usize>,
    field: FieldSpec,
    edge_index: HashMap<String, usize>,
    /// Edge indices sorted topologically, ties broken by declaration order.
    topo_edges: Vec<usize>,
    incoming: Vec<Vec<usize>>,
    outgoing: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WiretapKind {
    /// Size-r sets with mincut(s, A) = r.
    Topology,
    /// Size-r sets whose kernel matrix has rank r.
    CodeRank,
}

/// Sets of exactly `r` edge ids, each set sorted, listed in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WiretapCollection {
    pub r: usize,
    pub kind: WiretapKind,
    pub sets: Vec<Vec<String>>,
}

impl WiretapCollection {
    pub(crate) fn from_index_sets(
        net: &Network,
        r: usize,
        kind: WiretapKind,
        sets: impl IntoIterator<Item = Vec<usize>>,
    ) -> Self {
        let mut sets: Vec<Vec<String>> = sets
            .into_iter()
            .map(|s| {
                let mut ids: Vec<String> = s.iter().map(|&e| net.edges[e].id.clone()).collect();
                ids.sort();
                ids
            })
            .collect();
        sets.sort();
        Self { r, kind, sets }
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn contains(&self, set: &[String]) -> bool {
        let mut s = set.to_vec();
        s.sort();
        self.sets.binary_search(&s).is_ok()
    }
}

/// Number of `k`-subsets of an `n`-set.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn parse_err(line: usize, msg: impl Into<String>) -> NetworkError {
    NetworkError::Parse {
        line,
        msg: msg.into(),
    }
}

impl Network {
    /// Parses and validates the line-oriented network format.
    pub fn parse(text: &str) -> Result<Self, NetworkError> {
        let mut field = None;
        let mut source: Option<String> = None;
        let mut sinks: Vec<String> = Vec::new();
        let mut raw_edges: Vec<(String, String, String)> = Vec::new();
        let mut node_names: Vec<String> = Vec::new();
        let mut seen_nodes: HashMap<String, usize> = HashMap::new();
        let mut note_node = |name: &str, names: &mut Vec<String>| {
            if !seen_nodes.contains_key(name) {
                seen_nodes.insert(name.to_string(), names.len());
                names.push(name.to_string());
            }
        };

        for (lineno, raw) in text.lines().enumerate() {
            let lineno = lineno + 1;
            let line = raw.split('#').next().unwrap_or("");
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let Some((&kw, args)) = tokens.split_first() else {
                continue;
            };
            match (kw, args) {
                ("field", [q]) => {
                    if field.is_some() {
                        return Err(parse_err(lineno, "duplicate `field` line"));
                    }
                    let q: u32 = q
                        .parse()
                        .map_err(|_| parse_err(lineno, format!("bad field size `{q}`")))?;
                    field = Some(FieldSpec::new(q)?);
                }
                ("source", [s]) => {
                    if source.is_some() {
                        return Err(parse_err(lineno, "duplicate `source` line"));
                    }
                    note_node(s, &mut node_names);
                    source = Some(s.to_string());
                }
                ("sink", [t]) => {
                    if sinks.iter().any(|x| x == t) {
                        return Err(parse_err(lineno, format!("duplicate sink `{t}`")));
                    }
                    note_node(t, &mut node_names);
                    sinks.push(t.to_string());
                }
                ("edge", [id, tail, head]) => {
                    if id.starts_with("__") {
                        return Err(parse_err(lineno, format!("reserved edge id `{id}`")));
                    }
                    if raw_edges.iter().any(|(x, _, _)| x == id) {
                        return Err(NetworkError::DuplicateEdgeId(id.to_string()));
                    }
                    if tail == head {
                        return Err(NetworkError::CycleDetected(tail.to_string()));
                    }
                    note_node(tail, &mut node_names);
                    note_node(head, &mut node_names);
                    raw_edges.push((id.to_string(), tail.to_string(), head.to_string()));
                }
                ("field" | "source" | "sink" | "edge", _) => {
                    return Err(parse_err(
                        lineno,
                        format!("wrong number of arguments to `{kw}`"),
                    ));
                }
                _ => return Err(parse_err(lineno, format!("unknown directive `{kw}`"))),
            }
        }

        let field = field.ok_or_else(|| parse_err(0, "missing `field` line"))?;
        let source = source.ok_or_else(|| parse_err(0, "missing `source` line"))?;
        if sinks.is_empty() {
            return Err(parse_err(0, "at least one `sink` line is required"));
        }
        if sinks.contains(&source) {
            return Err(parse_err(0, "the source cannot be a sink"));
        }
        let idx = |name: &str| node_names.iter().position(|n| n == name).unwrap();
        let edges: Vec<Edge> = raw_edges
            .iter()
            .map(|(id, t, h)| Edge {
                id: id.clone(),
                tail: idx(t),
                head: idx(h),
            })
            .collect();
        let source = idx(&source);
        if let Some(e) = edges.iter().find(|e| e.head == source) {
            return Err(parse_err(0, format!("edge `{}` enters the source", e.id)));
        }
        let sinks = sinks.iter().map(|t| idx(t)).collect();
        Self::from_parts(node_names, edges, source, sinks, field)
    }

    fn from_parts(
        nodes: Vec<String>,
        edges: Vec<Edge>,
        source: usize,
        sinks: Vec<usize>,
        field: FieldSpec,
    ) -> Result<Self, NetworkError> {
        let mut incoming = vec![Vec::new(); nodes.len()];
        let mut outgoing = vec![Vec::new(); nodes.len()];
        for (i, e) in edges.iter().enumerate() {
            outgoing[e.tail].push(i);
            incoming[e.head].push(i);
        }

        // Kahn's algorithm, lowest node index first.
        let mut indeg: Vec<usize> = incoming.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<usize> = (0..nodes.len()).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(nodes.len());
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &e in &outgoing[v] {
                let h = edges[e].head;
                indeg[h] -= 1;
                if indeg[h] == 0 {
                    ready.insert(h);
                }
            }
        }
        if order.len() < nodes.len() {
            let stuck = (0..nodes.len()).find(|&v| indeg[v] > 0).unwrap();
            return Err(NetworkError::CycleDetected(nodes[stuck].clone()));
        }
        let mut position = vec![0; nodes.len()];
        for (p, &v) in order.iter().enumerate() {
            position[v] = p;
        }
        let mut topo_edges: Vec<usize> = (0..edges.len()).collect();
        topo_edges.sort_by_key(|&e| (position[edges[e].tail], e));

        let mut reach = vec![false; nodes.len()];
        reach[source] = true;
        let mut queue = VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            for &e in &outgoing[v] {
                let h = edges[e].head;
                if !reach[h] {
                    reach[h] = true;
                    queue.push_back(h);
                }
            }
        }
        if let Some(&t) = sinks.iter().find(|&&t| !reach[t]) {
            return Err(NetworkError::UnreachableSink(nodes[t].clone()));
        }

        let edge_index = edges
            .iter()
            .enumerate()
            .map(|(i, e)| (e.id.clone(), i))
            .collect();
        Ok(Self {
            nodes,
            edges,
            source,
            sinks,
            field,
            edge_index,
            topo_edges,
            incoming,
            outgoing,
        })
    }

    /// Serializes back to the line format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "field {}", self.field.order()).unwrap();
        writeln!(out, "source {}", self.nodes[self.source]).unwrap();
        for &t in &self.sinks {
            writeln!(out, "sink {}", self.nodes[t]).unwrap();
        }
        for e in &self.edges {
            writeln!(
                out,
                "edge {} {} {}",
                e.id, self.nodes[e.tail], self.nodes[e.head]
            )
            .unwrap();
        }
        out
    }

    /// Same topology over a different field.
    pub fn with_field(&self, field: FieldSpec) -> Self {
        Self {
            field,
            ..self.clone()
        }
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, idx: usize) -> &Edge {
        &self.edges[idx]
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn source_name(&self) -> &str {
        &self.nodes[self.source]
    }

    pub fn sinks(&self) -> &[usize] {
        &self.sinks
    }

    pub fn node_name(&self, v: usize) -> &str {
        &self.nodes[v]
    }

    pub fn sink_index(&self, name: &str) -> Result<usize, NetworkError> {
        self.sinks
            .iter()
            .copied()
            .find(|&t| self.nodes[t] == name)
            .ok_or_else(|| NetworkError::UnknownSink(name.to_string()))
    }

    pub fn edge_index(&self, id: &str) -> Result<usize, NetworkError> {
        self.edge_index
            .get(id)
            .copied()
            .ok_or_else(|| NetworkError::UnknownEdge(id.to_string()))
    }

    pub fn edge_indices<S: AsRef<str>>(&self, ids: &[S]) -> Result<Vec<usize>, NetworkError> {
        ids.iter().map(|id| self.edge_index(id.as_ref())).collect()
    }

    /// Real incoming edges of node `v`, in declaration order.
    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.incoming[v]
    }

    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.outgoing[v]
    }

    /// Edges in topological order, ties broken by declaration order.
    pub fn topological_edges(&self) -> &[usize] {
        &self.topo_edges
    }

    fn edge_graph(&self) -> (FlowGraph, Vec<usize>) {
        let mut g = FlowGraph::new(self.nodes.len());
        let arcs = self
            .edges
            .iter()
            .map(|e| g.add_arc(e.tail, e.head, 1))
            .collect();
        (g, arcs)
    }

    /// C_t: the number of edge-disjoint paths from the source to node `t`.
    pub fn min_cut_to_node(&self, t: usize) -> usize {
        let (mut g, _) = self.edge_graph();
        g.max_flow(self.source, t, None)
    }

    /// C_t for a named sink.
    pub fn min_cut_to_sink(&self, sink: &str) -> Result<usize, NetworkError> {
        Ok(self.min_cut_to_node(self.sink_index(sink)?))
    }

    /// C_min: the smallest C_t over all sinks.
    pub fn c_min(&self) -> usize {
        self.sinks
            .iter()
            .map(|&t| self.min_cut_to_node(t))
            .min()
            .expect("sinks are nonempty")
    }

    /// Up to `n` edge-disjoint source-to-`t` paths, as edge-index sequences.
    ///
    /// The flow is found by the deterministic BFS max-flow and then decomposed
    /// by walking, from each node, the first unused flow-carrying edge in
    /// declaration order.
    pub fn edge_disjoint_paths(&self, t: usize, n: usize) -> Vec<Vec<usize>> {
        let (mut g, arcs) = self.edge_graph();
        let k = g.max_flow(self.source, t, Some(n));
        let mut used: Vec<bool> = arcs.iter().map(|&a| g.residual(a) != 0).collect();
        let mut paths = Vec::with_capacity(k);
        for _ in 0..k {
            let mut path = Vec::new();
            let mut v = self.source;
            while v != t {
                let e = *self.outgoing[v]
                    .iter()
                    .find(|&&e| !used[e])
                    .expect("flow conservation");
                used[e] = true;
                path.push(e);
                v = self.edges[e].head;
            }
            paths.push(path);
        }
        paths
    }

    /// mincut(s, A) over edge indices.
    pub(crate) fn min_cut_to_edge_indices(&self, set: &[usize]) -> usize {
        // Each channel e = (u, v) becomes u -> x_e -> v; every x_a for a in A
        // feeds a virtual sink.
        let nv = self.nodes.len();
        let ne = self.edges.len();
        let sink = nv + ne;
        let mut g = FlowGraph::new(nv + ne + 1);
        for (i, e) in self.edges.iter().enumerate() {
            g.add_arc(e.tail, nv + i, 1);
            g.add_arc(nv + i, e.head, 1);
        }
        let distinct: BTreeSet<usize> = set.iter().copied().collect();
        for a in distinct {
            g.add_arc(nv + a, sink, 1);
        }
        g.max_flow(self.source, sink, None)
    }

    /// mincut(s, A) for a set of edge ids.
    pub fn min_cut_to_edges<S: AsRef<str>>(&self, set: &[S]) -> Result<usize, NetworkError> {
        if set.is_empty() {
            return Err(NetworkError::EmptySet);
        }
        let idx = self.edge_indices(set)?;
        Ok(self.min_cut_to_edge_indices(&idx))
    }

    pub(crate) fn check_security_level(&self, r: usize, n: usize) -> Result<(), NetworkError> {
        if r == 0 {
            return Err(NetworkError::ZeroSecurityLevel);
        }
        if r >= n {
            return Err(NetworkError::SecurityLevelTooLarge { r, c_min: n });
        }
        Ok(())
    }

    /// All size-`r` edge sets A with mincut(s, A) = r.
    pub fn enumerate_topology_wiretap_sets(
        &self,
        r: usize,
    ) -> Result<WiretapCollection, NetworkError> {
        self.check_security_level(r, self.c_min())?;
        let sets = (0..self.edges.len())
            .combinations(r)
            .filter(|a| self.min_cut_to_edge_indices(a) == r);
        Ok(WiretapCollection::from_index_sets(
            self,
            r,
            WiretapKind::Topology,
            sets,
        ))
    }
}
