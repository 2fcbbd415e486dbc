//! Weighted directed activity graphs.
//!
//! An [`ActivityGraph`] is the simple digraph obtained by aggregating an
//! event stream: parallel events between the same ordered pair collapse into
//! one edge carrying the summed weight and the number of contributing events.
//! Node ids are dense and follow the lexicographic order of account names,
//! so the same events always yield the same graph regardless of input order.

use std::borrow::Borrow;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::{self, Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::account::AccountId;
use crate::ingest::{Activity, ActivityEvent};

/// Dense node index into an [`ActivityGraph`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// An aggregated edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub src: NodeId,
    pub dst: NodeId,
    /// Sum of contributing event weights.
    pub weight: u128,
    /// Number of contributing events, at least 1.
    pub multiplicity: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("event for {found} in a {expected} graph")]
    MixedActivity { expected: Activity, found: Activity },
    #[error("account {0} is created more than once")]
    DuplicateCreation(AccountId),
    #[error("account {0} cannot create itself")]
    SelfCreation(AccountId),
    #[error("invalid graph data: {0}")]
    Invalid(String),
}

/// Immutable aggregated activity graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivityGraph {
    activity: Activity,
    accounts: Vec<AccountId>,
    /// Sorted by `(src, dst)`.
    edges: Vec<Edge>,
    /// `edges[out_offsets[v]..out_offsets[v + 1]]` leave `v`.
    out_offsets: Vec<usize>,
    in_offsets: Vec<usize>,
    in_sources: Vec<NodeId>,
    total_weight: u128,
    total_events: u64,
}

impl ActivityGraph {
    /// Assembles a graph from canonical parts, checking every structural
    /// invariant: strictly sorted account names, strictly sorted in-range
    /// edges, positive multiplicities and the creation-tree edge rules.
    pub fn from_parts(
        activity: Activity,
        accounts: Vec<AccountId>,
        edges: Vec<Edge>,
    ) -> Result<Self, GraphError> {
        let invalid = |msg: String| Err(GraphError::Invalid(msg));
        if let Some(w) = accounts.windows(2).find(|w| w[0] >= w[1]) {
            return invalid(format!("accounts not strictly sorted at {} / {}", w[0], w[1]));
        }
        let n = accounts.len();
        if n > u32::MAX as usize {
            return invalid("too many nodes".into());
        }
        for e in &edges {
            if e.src.index() >= n || e.dst.index() >= n {
                return invalid(format!("edge {} -> {} out of range", e.src, e.dst));
            }
            if e.multiplicity == 0 {
                return invalid(format!("edge {} -> {} has zero multiplicity", e.src, e.dst));
            }
        }
        if let Some(w) = edges
            .windows(2)
            .find(|w| (w[0].src, w[0].dst) >= (w[1].src, w[1].dst))
        {
            return invalid(format!(
                "edges not strictly sorted at {} -> {}",
                w[1].src, w[1].dst
            ));
        }
        let mut out_offsets = vec![0usize; n + 1];
        let mut in_counts = vec![0usize; n + 1];
        for e in &edges {
            out_offsets[e.src.index() + 1] += 1;
            in_counts[e.dst.index() + 1] += 1;
        }
        for v in 0..n {
            out_offsets[v + 1] += out_offsets[v];
            in_counts[v + 1] += in_counts[v];
        }
        let in_offsets = in_counts;
        let mut cursor = in_offsets.clone();
        let mut in_sources = vec![NodeId(0); edges.len()];
        for e in &edges {
            let slot = &mut cursor[e.dst.index()];
            in_sources[*slot] = e.src;
            *slot += 1;
        }
        if activity == Activity::AccountCreation {
            if let Some(e) = edges.iter().find(|e| e.src == e.dst) {
                return Err(GraphError::SelfCreation(accounts[e.src.index()].clone()));
            }
            if let Some(v) = (0..n).find(|&v| in_offsets[v + 1] - in_offsets[v] > 1) {
                return Err(GraphError::DuplicateCreation(accounts[v].clone()));
            }
        }
        let total_weight = edges.iter().map(|e| e.weight).sum();
        let total_events = edges.iter().map(|e| e.multiplicity).sum();
        Ok(ActivityGraph {
            activity,
            accounts,
            edges,
            out_offsets,
            in_offsets,
            in_sources,
            total_weight,
            total_events,
        })
    }

    pub fn empty(activity: Activity) -> Self {
        ActivityGraph::from_parts(activity, Vec::new(), Vec::new()).expect("empty graph is valid")
    }

    pub fn activity(&self) -> Activity {
        self.activity
    }

    pub fn node_count(&self) -> usize {
        self.accounts.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn total_weight(&self) -> u128 {
        self.total_weight
    }

    pub fn total_events(&self) -> u64 {
        self.total_events
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = NodeId> {
        (0..self.accounts.len() as u32).map(NodeId)
    }

    pub fn accounts(&self) -> &[AccountId] {
        &self.accounts
    }

    pub fn account(&self, node: NodeId) -> &AccountId {
        &self.accounts[node.index()]
    }

    /// Looks up a node by account name.
    pub fn node_id(&self, account: &str) -> Option<NodeId> {
        self.accounts
            .binary_search_by(|a| a.as_str().cmp(account))
            .ok()
            .map(|i| NodeId(i as u32))
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn out_edges(&self, node: NodeId) -> &[Edge] {
        &self.edges[self.out_offsets[node.index()]..self.out_offsets[node.index() + 1]]
    }

    /// Sources of the edges entering `node`, ascending.
    pub fn in_neighbors(&self, node: NodeId) -> &[NodeId] {
        &self.in_sources[self.in_offsets[node.index()]..self.in_offsets[node.index() + 1]]
    }

    pub fn out_degree(&self, node: NodeId) -> usize {
        self.out_offsets[node.index() + 1] - self.out_offsets[node.index()]
    }

    pub fn in_degree(&self, node: NodeId) -> usize {
        self.in_offsets[node.index() + 1] - self.in_offsets[node.index()]
    }

    pub fn edge(&self, src: NodeId, dst: NodeId) -> Option<&Edge> {
        let out = self.out_edges(src);
        out.binary_search_by(|e| e.dst.cmp(&dst)).ok().map(|i| &out[i])
    }

    pub fn self_loop_count(&self) -> usize {
        self.edges.iter().filter(|e| e.src == e.dst).count()
    }

    /// Subgraph on the given edges (indices into [`edges`](Self::edges)) and
    /// their endpoints, with node ids re-densified.
    pub fn edge_subgraph(&self, edge_indices: &[usize]) -> ActivityGraph {
        let mut keep: Vec<NodeId> = edge_indices
            .iter()
            .flat_map(|&i| [self.edges[i].src, self.edges[i].dst])
            .collect();
        keep.sort_unstable();
        keep.dedup();
        self.restrict(&keep, edge_indices)
    }

    /// Subgraph induced by `nodes` restricted to `edge_indices`, which must
    /// only touch nodes in `nodes`. `nodes` must be sorted and unique.
    pub(crate) fn restrict(&self, nodes: &[NodeId], edge_indices: &[usize]) -> ActivityGraph {
        let mut remap = HashMap::with_capacity(nodes.len());
        for (i, v) in nodes.iter().enumerate() {
            remap.insert(*v, NodeId(i as u32));
        }
        let accounts = nodes.iter().map(|v| self.account(*v).clone()).collect();
        let mut idx = edge_indices.to_vec();
        idx.sort_unstable();
        idx.dedup();
        let edges = idx
            .into_iter()
            .map(|i| {
                let e = self.edges[i];
                Edge {
                    src: remap[&e.src],
                    dst: remap[&e.dst],
                    ..e
                }
            })
            .collect();
        ActivityGraph::from_parts(self.activity, accounts, edges)
            .expect("subgraph of a valid graph is valid")
    }
}

/// Aggregates events into an [`ActivityGraph`].
pub struct GraphBuilder {
    activity: Activity,
    ids: HashMap<AccountId, u32>,
    names: Vec<AccountId>,
    edges: HashMap<(u32, u32), (u128, u64)>,
    created: HashSet<u32>,
}

impl GraphBuilder {
    pub fn new(activity: Activity) -> Self {
        GraphBuilder {
            activity,
            ids: HashMap::new(),
            names: Vec::new(),
            edges: HashMap::new(),
            created: HashSet::new(),
        }
    }

    fn intern(&mut self, account: &AccountId) -> u32 {
        if let Some(&id) = self.ids.get(account) {
            return id;
        }
        let id = self.names.len() as u32;
        self.ids.insert(account.clone(), id);
        self.names.push(account.clone());
        id
    }

    pub fn push(&mut self, event: &ActivityEvent) -> Result<(), GraphError> {
        if event.activity != self.activity {
            return Err(GraphError::MixedActivity {
                expected: self.activity,
                found: event.activity,
            });
        }
        if self.activity == Activity::AccountCreation && event.source == event.target {
            return Err(GraphError::SelfCreation(event.target.clone()));
        }
        let src = self.intern(&event.source);
        let dst = self.intern(&event.target);
        if self.activity == Activity::AccountCreation && !self.created.insert(dst) {
            return Err(GraphError::DuplicateCreation(event.target.clone()));
        }
        let slot = self.edges.entry((src, dst)).or_insert((0, 0));
        slot.0 += event.weight as u128;
        slot.1 += 1;
        Ok(())
    }

    pub fn finish(self) -> ActivityGraph {
        let mut order: Vec<u32> = (0..self.names.len() as u32).collect();
        order.sort_unstable_by(|a, b| self.names[*a as usize].cmp(&self.names[*b as usize]));
        let mut canonical = vec![0u32; order.len()];
        for (new, old) in order.iter().enumerate() {
            canonical[*old as usize] = new as u32;
        }
        let mut edges: Vec<Edge> = self
            .edges
            .into_iter()
            .map(|((s, d), (weight, multiplicity))| Edge {
                src: NodeId(canonical[s as usize]),
                dst: NodeId(canonical[d as usize]),
                weight,
                multiplicity,
            })
            .collect();
        edges.sort_unstable_by_key(|e| (e.src, e.dst));
        let accounts = order
            .iter()
            .map(|old| self.names[*old as usize].clone())
            .collect();
        ActivityGraph::from_parts(self.activity, accounts, edges)
            .expect("builder output satisfies graph invariants")
    }
}

/// Aggregates an event stream into a graph of the given activity.
pub fn build_graph<I>(events: I, activity: Activity) -> Result<ActivityGraph, GraphError>
where
    I: IntoIterator,
    I::Item: Borrow<ActivityEvent>,
{
    let mut builder = GraphBuilder::new(activity);
    for event in events {
        builder.push(event.borrow())?;
    }
    Ok(builder.finish())
}

/// Number of nodes per degree value.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DegreeHistogram(pub BTreeMap<u64, u64>);

impl DegreeHistogram {
    pub fn from_degrees(degrees: impl IntoIterator<Item = u64>) -> Self {
        let mut map = BTreeMap::new();
        for d in degrees {
            *map.entry(d).or_insert(0) += 1;
        }
        DegreeHistogram(map)
    }

    pub fn get(&self, degree: u64) -> u64 {
        self.0.get(&degree).copied().unwrap_or(0)
    }

    /// Sum of counts, i.e. the number of nodes.
    pub fn node_count(&self) -> u64 {
        self.0.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.0.iter().map(|(d, c)| (*d, *c))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Total, in- and out-degree histograms over unweighted edges. A self-loop
/// adds one to both the in- and out-degree of its node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeViews {
    pub total: DegreeHistogram,
    #[serde(rename = "in")]
    pub in_degree: DegreeHistogram,
    #[serde(rename = "out")]
    pub out_degree: DegreeHistogram,
}

pub fn degree_views(g: &ActivityGraph) -> DegreeViews {
    DegreeViews {
        total: DegreeHistogram::from_degrees(
            g.nodes().map(|v| (g.in_degree(v) + g.out_degree(v)) as u64),
        ),
        in_degree: DegreeHistogram::from_degrees(g.nodes().map(|v| g.in_degree(v) as u64)),
        out_degree: DegreeHistogram::from_degrees(g.nodes().map(|v| g.out_degree(v) as u64)),
    }
}

/// Simple undirected graph in compressed adjacency form: sorted neighbor
/// lists, no self-loops, no parallel edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UndirectedGraph {
    offsets: Vec<usize>,
    neighbors: Vec<u32>,
}

impl UndirectedGraph {
    /// Builds from an arbitrary edge list; self-loops and duplicates are
    /// dropped.
    pub fn from_edges(node_count: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut lists: Vec<Vec<u32>> = vec![Vec::new(); node_count];
        for (u, v) in edges {
            if u != v {
                lists[u as usize].push(v);
                lists[v as usize].push(u);
            }
        }
        let mut offsets = Vec::with_capacity(node_count + 1);
        offsets.push(0);
        let mut neighbors = Vec::new();
        for mut list in lists {
            list.sort_unstable();
            list.dedup();
            neighbors.extend_from_slice(&list);
            offsets.push(neighbors.len());
        }
        UndirectedGraph { offsets, neighbors }
    }

    pub fn node_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&(v as u32)).is_ok()
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .map(move |&v| (u, v as usize))
                .filter(|(u, v)| u < v)
        })
    }
}

/// Symmetrized, self-loop-free view of a digraph on the same node set.
pub fn undirected_projection(g: &ActivityGraph) -> UndirectedGraph {
    UndirectedGraph::from_edges(g.node_count(), g.edges().iter().map(|e| (e.src.0, e.dst.0)))
}

/// Identifies the graph file format.
pub const GRAPH_FORMAT: &str = "eosgraph.graph";
pub const GRAPH_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct GraphFile {
    format: String,
    version: u32,
    activity: Activity,
    node_count: usize,
    edge_count: usize,
    total_weight: u128,
    total_events: u64,
    accounts: Vec<AccountId>,
    /// `[src, dst, weight, multiplicity]`
    edges: Vec<(u32, u32, u128, u64)>,
}

impl ActivityGraph {
    /// Writes the versioned JSON graph document.
    pub fn write_json<W: Write>(&self, out: W) -> io::Result<()> {
        let file = GraphFile {
            format: GRAPH_FORMAT.into(),
            version: GRAPH_VERSION,
            activity: self.activity,
            node_count: self.node_count(),
            edge_count: self.edge_count(),
            total_weight: self.total_weight,
            total_events: self.total_events,
            accounts: self.accounts.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| (e.src.0, e.dst.0, e.weight, e.multiplicity))
                .collect(),
        };
        let mut out = io::BufWriter::new(out);
        serde_json::to_writer(&mut out, &file)?;
        out.write_all(b"\n")?;
        out.flush()
    }

    pub fn to_json_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_json(&mut buf).expect("writing to memory");
        buf
    }

    /// Reads a graph document, rejecting unknown formats or versions and any
    /// header that disagrees with the body.
    pub fn read_json<R: Read>(input: R) -> Result<Self, GraphError> {
        let file: GraphFile = serde_json::from_reader(io::BufReader::new(input))
            .map_err(|e| GraphError::Invalid(e.to_string()))?;
        if file.format != GRAPH_FORMAT {
            return Err(GraphError::Invalid(format!("unknown format {:?}", file.format)));
        }
        if file.version != GRAPH_VERSION {
            return Err(GraphError::Invalid(format!(
                "unsupported version {}",
                file.version
            )));
        }
        let edges = file
            .edges
            .iter()
            .map(|&(s, d, weight, multiplicity)| Edge {
                src: NodeId(s),
                dst: NodeId(d),
                weight,
                multiplicity,
            })
            .collect();
        let g = ActivityGraph::from_parts(file.activity, file.accounts, edges)?;
        if g.node_count() != file.node_count
            || g.edge_count() != file.edge_count
            || g.total_weight != file.total_weight
            || g.total_events != file.total_events
        {
            return Err(GraphError::Invalid("header totals disagree with body".into()));
        }
        Ok(g)
    }
}
