//! Per-activity graph construction with structural checks.
//!
//! Each builder aggregates its events with [`build_graph`] and then derives
//! [`BuildDiagnostics`] from the finished graph alone, so diagnostics can be
//! recomputed from a serialized graph with [`diagnose`].

use std::borrow::Borrow;
use std::collections::VecDeque;

use serde::Serialize;
use thiserror::Error;

use crate::account::AccountId;
use crate::amount::format_fixed;
use crate::graph::{build_graph, ActivityGraph, GraphError, NodeId};
use crate::ingest::{Activity, ActivityEvent};
use crate::metrics::scc;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("cycle detected among {} accounts (first: {})", .accounts.len(), .accounts[0])]
    CycleDetected { accounts: Vec<AccountId> },
}

impl BuildError {
    /// Stable tag for machine-readable error output.
    pub fn code(&self) -> &'static str {
        match self {
            BuildError::Graph(GraphError::MixedActivity { .. }) => "mixed-activity",
            BuildError::Graph(GraphError::DuplicateCreation(_)) => "duplicate-creation",
            BuildError::Graph(GraphError::SelfCreation(_)) => "self-creation",
            BuildError::Graph(GraphError::Invalid(_)) => "invalid-graph",
            BuildError::CycleDetected { .. } => "cycle-detected",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsConfig {
    /// Incident-weight share above which a contract-authorization account is
    /// flagged.
    pub spam_threshold: f64,
    /// Length of ranked account lists.
    pub top_k: usize,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        DiagnosticsConfig {
            spam_threshold: 0.5,
            top_k: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Int(u128),
    Real(f64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub rule: String,
    pub accounts: Vec<AccountId>,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Notable {
    pub account: AccountId,
    pub statistic: String,
    pub value: Value,
}

/// A named set of accounts, such as a voting gang.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AccountGroup {
    pub kind: String,
    pub members: Vec<AccountId>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fact {
    pub name: String,
    pub value: Value,
}

/// Activity-specific findings. `violations` is empty exactly when every rule
/// for the activity holds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BuildDiagnostics {
    pub activity: Activity,
    pub violations: Vec<Violation>,
    pub notable: Vec<Notable>,
    pub groups: Vec<AccountGroup>,
    pub facts: Vec<Fact>,
}

impl BuildDiagnostics {
    fn new(activity: Activity) -> Self {
        BuildDiagnostics {
            activity,
            violations: Vec::new(),
            notable: Vec::new(),
            groups: Vec::new(),
            facts: Vec::new(),
        }
    }

    fn fact(&mut self, name: &str, value: Value) {
        self.facts.push(Fact {
            name: name.to_owned(),
            value,
        });
    }

    pub fn fact_value(&self, name: &str) -> Option<&Value> {
        self.facts.iter().find(|f| f.name == name).map(|f| &f.value)
    }

    pub fn violation(&self, rule: &str) -> Option<&Violation> {
        self.violations.iter().find(|v| v.rule == rule)
    }

    pub fn groups_of(&self, kind: &str) -> impl Iterator<Item = &AccountGroup> {
        let kind = kind.to_owned();
        self.groups.iter().filter(move |g| g.kind == kind)
    }

    pub fn notable_for<'a>(&'a self, statistic: &'a str) -> impl Iterator<Item = &'a Notable> {
        self.notable.iter().filter(move |n| n.statistic == statistic)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("diagnostics serialize");
        s.push('\n');
        s
    }
}

fn names(g: &ActivityGraph, nodes: impl IntoIterator<Item = NodeId>) -> Vec<AccountId> {
    nodes.into_iter().map(|v| g.account(v).clone()).collect()
}

/// Top `k` nodes by `score`, highest first, ties by account name. Zero
/// scores are skipped.
fn ranked(g: &ActivityGraph, k: usize, score: impl Fn(NodeId) -> u128) -> Vec<(NodeId, u128)> {
    let mut scored: Vec<(NodeId, u128)> = g
        .nodes()
        .map(|v| (v, score(v)))
        .filter(|(_, s)| *s > 0)
        .collect();
    scored.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    scored.truncate(k);
    scored
}

fn push_ranked(
    d: &mut BuildDiagnostics,
    g: &ActivityGraph,
    statistic: &str,
    list: Vec<(NodeId, u128)>,
) {
    for (v, s) in list {
        d.notable.push(Notable {
            account: g.account(v).clone(),
            statistic: statistic.to_owned(),
            value: Value::Int(s),
        });
    }
}

fn weighted_in(g: &ActivityGraph) -> Vec<u128> {
    let mut w = vec![0u128; g.node_count()];
    for e in g.edges() {
        w[e.dst.index()] += e.weight;
    }
    w
}

fn weighted_out(g: &ActivityGraph) -> Vec<u128> {
    g.nodes()
        .map(|v| g.out_edges(v).iter().map(|e| e.weight).sum())
        .collect()
}

/// Non-trivial strongly connected components, members ascending.
fn cyclic_groups(g: &ActivityGraph) -> Vec<Vec<NodeId>> {
    scc(g)
        .into_iter()
        .filter(|c| c.size >= 2)
        .map(|c| c.members)
        .collect()
}

fn self_loop_nodes(g: &ActivityGraph) -> Vec<NodeId> {
    g.edges()
        .iter()
        .filter(|e| e.src == e.dst)
        .map(|e| e.src)
        .collect()
}

fn diagnose_acg(g: &ActivityGraph, config: &DiagnosticsConfig) -> Result<BuildDiagnostics, BuildError> {
    if let Some(cycle) = cyclic_groups(g).into_iter().next() {
        return Err(BuildError::CycleDetected {
            accounts: names(g, cycle),
        });
    }
    let mut d = BuildDiagnostics::new(Activity::AccountCreation);
    let roots: Vec<NodeId> = g.nodes().filter(|&v| g.in_degree(v) == 0).collect();
    if roots.len() > 1 {
        d.violations.push(Violation {
            rule: "multiple-roots".into(),
            accounts: names(g, roots.iter().copied()),
            count: roots.len() as u64,
        });
    }
    // Depth of every node below its root.
    let mut depth = vec![u32::MAX; g.node_count()];
    let mut queue: VecDeque<NodeId> = roots.iter().copied().collect();
    for r in &roots {
        depth[r.index()] = 0;
    }
    while let Some(v) = queue.pop_front() {
        for e in g.out_edges(v) {
            if depth[e.dst.index()] == u32::MAX {
                depth[e.dst.index()] = depth[v.index()] + 1;
                queue.push_back(e.dst);
            }
        }
    }
    let height = depth.iter().copied().max().unwrap_or(0);
    if let [root] = roots.as_slice() {
        d.fact("root", Value::Text(g.account(*root).to_string()));
    }
    d.fact("height", Value::Int(height as u128));
    d.fact("node_count", Value::Int(g.node_count() as u128));
    d.fact("edge_count", Value::Int(g.edge_count() as u128));
    let creators = ranked(g, config.top_k, |v| g.out_degree(v) as u128);
    push_ranked(&mut d, g, "accounts-created", creators);
    Ok(d)
}

fn diagnose_avg(g: &ActivityGraph, config: &DiagnosticsConfig) -> BuildDiagnostics {
    let mut d = BuildDiagnostics::new(Activity::AccountVote);
    let selfs = self_loop_nodes(g);
    if !selfs.is_empty() {
        d.violations.push(Violation {
            rule: "self-vote".into(),
            count: selfs.len() as u64,
            accounts: names(g, selfs),
        });
    }
    for e in g.edges() {
        if e.src < e.dst && g.edge(e.dst, e.src).is_some() {
            d.groups.push(AccountGroup {
                kind: "mutual-pair".into(),
                members: names(g, [e.src, e.dst]),
            });
        }
    }
    let gangs = cyclic_groups(g);
    let largest = gangs.iter().map(Vec::len).max().unwrap_or(1.min(g.node_count()));
    d.fact("largest_scc", Value::Int(largest as u128));
    d.fact("voting_gangs", Value::Int(gangs.len() as u128));
    for gang in gangs {
        d.groups.push(AccountGroup {
            kind: "voting-gang".into(),
            members: names(g, gang),
        });
    }
    let win = weighted_in(g);
    push_ranked(&mut d, g, "votes-received", ranked(g, config.top_k, |v| win[v.index()]));
    d
}

fn diagnose_mtg(g: &ActivityGraph, config: &DiagnosticsConfig) -> BuildDiagnostics {
    let mut d = BuildDiagnostics::new(Activity::MoneyTransfer);
    d.fact("total_weight", Value::Int(g.total_weight()));
    d.fact("total_eos", Value::Text(format_fixed(g.total_weight())));
    d.fact("total_events", Value::Int(g.total_events() as u128));
    d.fact("edge_count", Value::Int(g.edge_count() as u128));
    if g.edge_count() > 0 {
        d.fact(
            "events_per_edge",
            Value::Real(g.total_events() as f64 / g.edge_count() as f64),
        );
    }
    d.fact("self_loops", Value::Int(g.self_loop_count() as u128));
    let (win, wout) = (weighted_in(g), weighted_out(g));
    push_ranked(&mut d, g, "weighted-in", ranked(g, config.top_k, |v| win[v.index()]));
    push_ranked(&mut d, g, "weighted-out", ranked(g, config.top_k, |v| wout[v.index()]));
    push_ranked(
        &mut d,
        g,
        "degree",
        ranked(g, config.top_k, |v| (g.in_degree(v) + g.out_degree(v)) as u128),
    );
    d
}

/// Weight of the edges touching each node; a self-loop counts once.
pub fn incident_weights(g: &ActivityGraph) -> Vec<u128> {
    let mut w = vec![0u128; g.node_count()];
    for e in g.edges() {
        w[e.src.index()] += e.weight;
        if e.dst != e.src {
            w[e.dst.index()] += e.weight;
        }
    }
    w
}

fn diagnose_cag(g: &ActivityGraph, config: &DiagnosticsConfig) -> BuildDiagnostics {
    let mut d = BuildDiagnostics::new(Activity::ContractAuthorization);
    let total = g.total_weight();
    let incident = incident_weights(g);
    let share = |v: NodeId| {
        if total == 0 {
            0.0
        } else {
            incident[v.index()] as f64 / total as f64
        }
    };
    let flagged: Vec<NodeId> = g
        .nodes()
        .filter(|&v| share(v) > config.spam_threshold)
        .collect();
    if !flagged.is_empty() {
        d.violations.push(Violation {
            rule: "dominant-weight-share".into(),
            count: flagged.len() as u64,
            accounts: names(g, flagged),
        });
    }
    d.fact("total_weight", Value::Int(total));
    d.fact("spam_threshold", Value::Real(config.spam_threshold));
    let selfs = self_loop_nodes(g);
    d.fact("self_loops", Value::Int(selfs.len() as u128));
    for v in ranked(g, config.top_k, |v| incident[v.index()]) {
        d.notable.push(Notable {
            account: g.account(v.0).clone(),
            statistic: "weight-share".into(),
            value: Value::Real(share(v.0)),
        });
    }
    for v in selfs {
        d.notable.push(Notable {
            account: g.account(v).clone(),
            statistic: "self-authorizations".into(),
            value: Value::Int(g.edge(v, v).map_or(0, |e| e.multiplicity as u128)),
        });
    }
    d
}

/// Recomputes diagnostics from a built graph.
pub fn diagnose(g: &ActivityGraph, config: &DiagnosticsConfig) -> Result<BuildDiagnostics, BuildError> {
    match g.activity() {
        Activity::AccountCreation => diagnose_acg(g, config),
        Activity::AccountVote => Ok(diagnose_avg(g, config)),
        Activity::MoneyTransfer => Ok(diagnose_mtg(g, config)),
        Activity::ContractAuthorization => Ok(diagnose_cag(g, config)),
    }
}

/// Builds the graph for `activity` and its diagnostics.
pub fn build_activity<I>(
    activity: Activity,
    events: I,
    config: &DiagnosticsConfig,
) -> Result<(ActivityGraph, BuildDiagnostics), BuildError>
where
    I: IntoIterator,
    I::Item: Borrow<ActivityEvent>,
{
    let g = build_graph(events, activity)?;
    let d = diagnose(&g, config)?;
    Ok((g, d))
}

/// Creation tree: single root, every account created once, acyclic.
pub fn build_acg<I>(events: I) -> Result<(ActivityGraph, BuildDiagnostics), BuildError>
where
    I: IntoIterator,
    I::Item: Borrow<ActivityEvent>,
{
    build_activity(Activity::AccountCreation, events, &DiagnosticsConfig::default())
}

/// Vote graph: flags self-votes, mutual pairs and voting gangs.
pub fn build_avg<I>(events: I) -> Result<(ActivityGraph, BuildDiagnostics), BuildError>
where
    I: IntoIterator,
    I::Item: Borrow<ActivityEvent>,
{
    build_activity(Activity::AccountVote, events, &DiagnosticsConfig::default())
}

/// Transfer graph: exact amount totals and weighted-degree hubs.
pub fn build_mtg<I>(events: I) -> Result<(ActivityGraph, BuildDiagnostics), BuildError>
where
    I: IntoIterator,
    I::Item: Borrow<ActivityEvent>,
{
    build_activity(Activity::MoneyTransfer, events, &DiagnosticsConfig::default())
}

/// Authorization graph: flags accounts holding a dominant weight share.
pub fn build_cag<I>(
    events: I,
    config: &DiagnosticsConfig,
) -> Result<(ActivityGraph, BuildDiagnostics), BuildError>
where
    I: IntoIterator,
    I::Item: Borrow<ActivityEvent>,
{
    build_activity(Activity::ContractAuthorization, events, config)
}
