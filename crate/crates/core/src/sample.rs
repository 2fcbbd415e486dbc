//! Seeded sampling of graphs for visualization.

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{ActivityGraph, NodeId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SampleError {
    #[error("graph is not a rooted tree: {0}")]
    NotATree(String),
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Indices of a uniform sample of `min(n, edge_count)` distinct edges,
/// ascending.
pub fn sample_edge_indices(g: &ActivityGraph, n: usize, seed: u64) -> Vec<usize> {
    let m = g.edge_count();
    if n >= m {
        return (0..m).collect();
    }
    let mut picked = index::sample(&mut rng(seed), m, n).into_vec();
    picked.sort_unstable();
    picked
}

/// Subgraph made of a uniform edge sample and the endpoints of those edges.
pub fn sample_edges(g: &ActivityGraph, n: usize, seed: u64) -> ActivityGraph {
    g.edge_subgraph(&sample_edge_indices(g, n, seed))
}

/// Parent edge index of every node of a rooted tree, `None` for the root.
fn tree_parents(g: &ActivityGraph) -> Result<(NodeId, Vec<Option<usize>>), SampleError> {
    let n = g.node_count();
    let mut parent: Vec<Option<usize>> = vec![None; n];
    for (i, e) in g.edges().iter().enumerate() {
        if e.src == e.dst {
            return Err(SampleError::NotATree(format!(
                "self-loop at {}",
                g.account(e.src)
            )));
        }
        if parent[e.dst.index()].replace(i).is_some() {
            return Err(SampleError::NotATree(format!(
                "{} has more than one parent",
                g.account(e.dst)
            )));
        }
    }
    let roots: Vec<NodeId> = g.nodes().filter(|v| parent[v.index()].is_none()).collect();
    let root = match roots.as_slice() {
        [r] => *r,
        [] => return Err(SampleError::NotATree("no root".into())),
        many => {
            return Err(SampleError::NotATree(format!("{} roots", many.len())));
        }
    };
    // With one root and in-degree <= 1 everywhere, a tree has n - 1 edges
    // and reaches every node from the root.
    let mut seen = vec![false; n];
    seen[root.index()] = true;
    let mut stack = vec![root];
    let mut reached = 1;
    while let Some(v) = stack.pop() {
        for e in g.out_edges(v) {
            if !seen[e.dst.index()] {
                seen[e.dst.index()] = true;
                reached += 1;
                stack.push(e.dst);
            }
        }
    }
    if reached != n {
        return Err(SampleError::NotATree(format!(
            "{} nodes unreachable from {} (cycle)",
            n - reached,
            g.account(root)
        )));
    }
    Ok((root, parent))
}

/// Samples `n_nodes` nodes uniformly and keeps every edge on each sampled
/// node's path to the root. The result is a subtree containing the root.
pub fn ancestry_subgraph(
    g: &ActivityGraph,
    n_nodes: usize,
    seed: u64,
) -> Result<ActivityGraph, SampleError> {
    let (root, parent) = tree_parents(g)?;
    let n = g.node_count();
    let picked: Vec<usize> = if n_nodes >= n {
        (0..n).collect()
    } else {
        let mut p = index::sample(&mut rng(seed), n, n_nodes).into_vec();
        p.sort_unstable();
        p
    };
    let mut included = vec![false; n];
    included[root.index()] = true;
    let mut edges = Vec::new();
    for start in picked {
        let mut v = start;
        // Climb until the path joins nodes already collected.
        while !included[v] {
            included[v] = true;
            let e = parent[v].expect("only the root lacks a parent");
            edges.push(e);
            v = g.edges()[e].src.index();
        }
    }
    let nodes: Vec<NodeId> = (0..n as u32)
        .map(NodeId)
        .filter(|v| included[v.index()])
        .collect();
    Ok(g.restrict(&nodes, &edges))
}
