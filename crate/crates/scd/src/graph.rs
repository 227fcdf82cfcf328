//! Weighted undirected sparse graph, node partitions, and the text formats
//! used to exchange both.
//!
//! Node ids are dense `usize` in `[0, n_nodes)`. Arbitrary input tokens are
//! remapped on load in first-seen order; the [`NodeMap`] keeps the mapping so
//! partitions can be written back with the original names.

use std::collections::{BTreeMap, HashMap};
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Dense node identifier.
pub type NodeId = usize;

/// Immutable weighted undirected simple graph.
///
/// Invariants enforced at construction: strictly positive finite weights, no
/// self-loops (dropped and counted), duplicate edges merged by summing
/// weights, symmetric adjacency sorted by neighbor id.
#[derive(Debug, Clone)]
pub struct Graph {
    n_nodes: usize,
    edges: Vec<(NodeId, NodeId, f64)>,
    adj: Vec<Vec<(NodeId, f64)>>,
    degrees: Vec<f64>,
    dropped_self_loops: usize,
}

impl Graph {
    /// Builds a graph from raw weighted pairs. Self-loops are dropped (and
    /// counted); duplicate edges, in either orientation, are merged by
    /// summing their weights.
    pub fn from_weighted_edges(
        n_nodes: usize,
        raw: impl IntoIterator<Item = (NodeId, NodeId, f64)>,
    ) -> Result<Self> {
        let mut merged: BTreeMap<(NodeId, NodeId), f64> = BTreeMap::new();
        let mut dropped = 0usize;
        for (u, v, w) in raw {
            if u >= n_nodes || v >= n_nodes {
                return Err(Error::InvalidParameter {
                    name: "edge",
                    reason: format!("node id {} out of range (n={n_nodes})", u.max(v)),
                });
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidParameter {
                    name: "weight",
                    reason: format!("edge ({u},{v}) has non-positive weight {w}"),
                });
            }
            if u == v {
                dropped += 1;
                continue;
            }
            let key = (u.min(v), u.max(v));
            *merged.entry(key).or_insert(0.0) += w;
        }

        let mut adj = vec![Vec::new(); n_nodes];
        let mut edges = Vec::with_capacity(merged.len());
        for (&(u, v), &w) in &merged {
            adj[u].push((v, w));
            adj[v].push((u, w));
            edges.push((u, v, w));
        }
        for list in &mut adj {
            list.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        }
        let degrees = adj
            .iter()
            .map(|list| list.iter().map(|&(_, w)| w).sum())
            .collect();

        let g = Graph {
            n_nodes,
            edges,
            adj,
            degrees,
            dropped_self_loops: dropped,
        };
        g.assert_invariants();
        Ok(g)
    }

    /// Unweighted convenience constructor (all weights 1.0).
    pub fn from_edges(n_nodes: usize, raw: &[(NodeId, NodeId)]) -> Result<Self> {
        Self::from_weighted_edges(n_nodes, raw.iter().map(|&(u, v)| (u, v, 1.0)))
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Merged edges as `(u, v, weight)` with `u < v`, sorted lexicographically.
    pub fn edges(&self) -> &[(NodeId, NodeId, f64)] {
        &self.edges
    }

    /// Neighbors of `u` with edge weights, sorted by neighbor id.
    pub fn neighbors(&self, u: NodeId) -> &[(NodeId, f64)] {
        &self.adj[u]
    }

    /// Generalized degree `d_u = Σ_v A_uv`.
    pub fn degree(&self, u: NodeId) -> f64 {
        self.degrees[u]
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    /// Number of self-loops dropped while building the graph.
    pub fn dropped_self_loops(&self) -> usize {
        self.dropped_self_loops
    }

    /// Graph volume `Σ_{i,j} A_ij`, i.e. every undirected edge counted in
    /// both directions. Computed as the degree sum.
    pub fn volume(&self) -> f64 {
        self.degrees.iter().sum()
    }

    /// Connected components: per-node component id (dense, in order of the
    /// lowest node id in each component) and the component count.
    pub fn connected_components(&self) -> (Vec<usize>, usize) {
        let mut comp = vec![usize::MAX; self.n_nodes];
        let mut next = 0usize;
        let mut queue = Vec::new();
        for start in 0..self.n_nodes {
            if comp[start] != usize::MAX {
                continue;
            }
            comp[start] = next;
            queue.push(start);
            while let Some(u) = queue.pop() {
                for &(v, _) in &self.adj[u] {
                    if comp[v] == usize::MAX {
                        comp[v] = next;
                        queue.push(v);
                    }
                }
            }
            next += 1;
        }
        (comp, next)
    }

    /// Nodes reachable from `u`, sorted ascending.
    pub fn component_of(&self, u: NodeId) -> Vec<NodeId> {
        let mut seen = vec![false; self.n_nodes];
        let mut queue = vec![u];
        seen[u] = true;
        while let Some(x) = queue.pop() {
            for &(v, _) in &self.adj[x] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push(v);
                }
            }
        }
        (0..self.n_nodes).filter(|&i| seen[i]).collect()
    }

    /// Full-scan check of the structural invariants; panics on violation.
    /// Runs after every load and generation.
    pub fn assert_invariants(&self) {
        assert_eq!(self.adj.len(), self.n_nodes);
        assert_eq!(self.degrees.len(), self.n_nodes);
        for (u, list) in self.adj.iter().enumerate() {
            for &(v, w) in list {
                assert!(v < self.n_nodes, "neighbor id out of range");
                assert_ne!(u, v, "self-loop survived construction");
                assert!(w > 0.0 && w.is_finite(), "bad weight {w}");
                let back = self.adj[v]
                    .binary_search_by(|probe| probe.0.cmp(&u))
                    .expect("adjacency not symmetric");
                assert_eq!(self.adj[v][back].1, w, "asymmetric weight");
            }
            assert!(
                list.windows(2).all(|p| p[0].0 < p[1].0),
                "unsorted or duplicated neighbor list"
            );
        }
    }
}

/// Mapping between external node tokens and dense internal ids.
#[derive(Debug, Clone, Default)]
pub struct NodeMap {
    tokens: Vec<String>,
    index: HashMap<String, NodeId>,
}

impl NodeMap {
    /// Map where token `i` is the decimal string of id `i`.
    pub fn sequential(n: usize) -> Self {
        let mut m = NodeMap::default();
        for i in 0..n {
            m.intern(&i.to_string());
        }
        m
    }

    /// Returns the id for `token`, interning it if new.
    pub fn intern(&mut self, token: &str) -> NodeId {
        if let Some(&id) = self.index.get(token) {
            return id;
        }
        let id = self.tokens.len();
        self.tokens.push(token.to_string());
        self.index.insert(token.to_string(), id);
        id
    }

    pub fn id(&self, token: &str) -> Option<NodeId> {
        self.index.get(token).copied()
    }

    pub fn token(&self, id: NodeId) -> &str {
        &self.tokens[id]
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Non-overlapping assignment of every node to one community.
///
/// Labels are canonicalized to consecutive integers starting at 0, in order
/// of first appearance by node id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    labels: Vec<usize>,
    n_communities: usize,
}

impl Partition {
    /// Builds a partition from arbitrary labels, canonicalizing them.
    pub fn from_labels(raw: &[usize]) -> Self {
        let mut remap: HashMap<usize, usize> = HashMap::new();
        let mut labels = Vec::with_capacity(raw.len());
        for &l in raw {
            let next = remap.len();
            let id = *remap.entry(l).or_insert(next);
            labels.push(id);
        }
        Partition {
            labels,
            n_communities: remap.len(),
        }
    }

    /// Every node in its own community.
    pub fn singletons(n: usize) -> Self {
        Partition {
            labels: (0..n).collect(),
            n_communities: n,
        }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn n_communities(&self) -> usize {
        self.n_communities
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Community sizes indexed by label.
    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0usize; self.n_communities];
        for &l in &self.labels {
            s[l] += 1;
        }
        s
    }
}

/// Reads an edge list: one edge per line, `u v` or `u v w`, fields separated
/// by a tab or spaces, `#` lines ignored. Tokens are interned in first-seen
/// order. With `weighted` set, the weight field is required; otherwise every
/// edge gets weight 1.0.
pub fn load_edge_list<R: BufRead>(reader: R, weighted: bool) -> Result<(Graph, NodeMap)> {
    let mut map = NodeMap::default();
    let mut raw: Vec<(NodeId, NodeId, f64)> = Vec::new();
    let mut saw_data = false;
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        saw_data = true;
        let fields: Vec<&str> = line.split_whitespace().collect();
        let expected = if weighted { 3 } else { 2 };
        if fields.len() != expected {
            return Err(Error::MalformedLine {
                line: lineno + 1,
                reason: format!("expected {expected} fields, found {}", fields.len()),
            });
        }
        let u = map.intern(fields[0]);
        let v = map.intern(fields[1]);
        let w = if weighted {
            let w: f64 = fields[2].parse().map_err(|_| Error::MalformedLine {
                line: lineno + 1,
                reason: format!("cannot parse weight `{}`", fields[2]),
            })?;
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::NonPositiveWeight {
                    line: lineno + 1,
                    weight: w,
                });
            }
            w
        } else {
            1.0
        };
        raw.push((u, v, w));
    }
    if !saw_data {
        return Err(Error::EmptyInput);
    }
    let graph = Graph::from_weighted_edges(map.len(), raw)?;
    Ok((graph, map))
}

/// Writes the merged edge list back out, one edge per line with `u < v` order
/// preserved from [`Graph::edges`]. Weights are printed with full round-trip
/// precision when `weighted` is set.
pub fn write_edge_list<W: Write>(g: &Graph, map: &NodeMap, weighted: bool, mut w: W) -> Result<()> {
    for &(u, v, wt) in g.edges() {
        if weighted {
            writeln!(w, "{}\t{}\t{}", map.token(u), map.token(v), wt)?;
        } else {
            writeln!(w, "{}\t{}", map.token(u), map.token(v))?;
        }
    }
    Ok(())
}

/// Writes a partition as `token<TAB>label` lines in node-id order.
pub fn write_partition<W: Write>(p: &Partition, map: &NodeMap, mut w: W) -> Result<()> {
    for (id, &label) in p.labels().iter().enumerate() {
        writeln!(w, "{}\t{}", map.token(id), label)?;
    }
    Ok(())
}

/// Reads a partition written by [`write_partition`] (or any external tool
/// using the same format). Every node in `map` must receive exactly one
/// label; labels are canonicalized on load.
pub fn load_partition<R: BufRead>(reader: R, map: &NodeMap) -> Result<Partition> {
    let mut label_ids: HashMap<String, usize> = HashMap::new();
    let mut assigned: Vec<Option<usize>> = vec![None; map.len()];
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::MalformedLine {
                line: lineno + 1,
                reason: format!("expected 2 fields, found {}", fields.len()),
            });
        }
        let id = map
            .id(fields[0])
            .ok_or_else(|| Error::UnknownToken(fields[0].to_string()))?;
        if assigned[id].is_some() {
            return Err(Error::MalformedLine {
                line: lineno + 1,
                reason: format!("node `{}` labeled twice", fields[0]),
            });
        }
        let next = label_ids.len();
        let label = *label_ids.entry(fields[1].to_string()).or_insert(next);
        assigned[id] = Some(label);
    }
    let mut labels = Vec::with_capacity(map.len());
    for (id, slot) in assigned.iter().enumerate() {
        match slot {
            Some(l) => labels.push(*l),
            None => return Err(Error::MissingLabel(map.token(id).to_string())),
        }
    }
    Ok(Partition::from_labels(&labels))
}
