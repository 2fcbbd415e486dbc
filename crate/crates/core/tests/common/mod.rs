//! Brute-force oracles and fixtures shared by integration tests.

#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use eosgraph::synth::indexed_graph;
use eosgraph::{Activity, ActivityGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Partition = BTreeSet<BTreeSet<u32>>;

/// Random digraph on `n` nodes with about `density * n^2` edge draws;
/// repeated draws aggregate and self-loops occur naturally.
pub fn random_digraph(seed: u64, n: usize, density: f64) -> ActivityGraph {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    let draws = ((n * n) as f64 * density).round() as usize;
    let edges: Vec<(u32, u32)> = if n == 0 {
        Vec::new()
    } else {
        (0..draws)
            .map(|_| (r.gen_range(0..n as u32), r.gen_range(0..n as u32)))
            .collect()
    };
    indexed_graph(Activity::MoneyTransfer, n, &edges).unwrap()
}

/// Dense boolean adjacency of the digraph.
pub fn directed_matrix(g: &ActivityGraph) -> Vec<Vec<bool>> {
    let n = g.node_count();
    let mut m = vec![vec![false; n]; n];
    for e in g.edges() {
        m[e.src.index()][e.dst.index()] = true;
    }
    m
}

/// Symmetric adjacency without self-loops.
pub fn undirected_matrix(g: &ActivityGraph) -> Vec<Vec<bool>> {
    let n = g.node_count();
    let mut m = vec![vec![false; n]; n];
    for e in g.edges() {
        let (u, v) = (e.src.index(), e.dst.index());
        if u != v {
            m[u][v] = true;
            m[v][u] = true;
        }
    }
    m
}

/// Strong components from the reflexive transitive closure.
pub fn scc_oracle(g: &ActivityGraph) -> Partition {
    let n = g.node_count();
    let mut reach = directed_matrix(g);
    for (v, row) in reach.iter_mut().enumerate() {
        row[v] = true;
    }
    for k in 0..n {
        let via = reach[k].clone();
        for row in reach.iter_mut() {
            if row[k] {
                for (dst, &r) in row.iter_mut().zip(&via) {
                    *dst |= r;
                }
            }
        }
    }
    (0..n)
        .map(|u| {
            (0..n)
                .filter(|&v| reach[u][v] && reach[v][u])
                .map(|v| v as u32)
                .collect()
        })
        .collect()
}

/// Weak components by flood fill on the symmetric matrix.
pub fn wcc_oracle(g: &ActivityGraph) -> Partition {
    let n = g.node_count();
    let adj = undirected_matrix(g);
    let mut seen = vec![false; n];
    let mut parts = Partition::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut part = BTreeSet::from([s as u32]);
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for v in 0..n {
                if adj[u][v] && !seen[v] {
                    seen[v] = true;
                    part.insert(v as u32);
                    queue.push_back(v);
                }
            }
        }
        parts.insert(part);
    }
    parts
}

const INF: u32 = u32::MAX / 2;

/// All-pairs hop distances on the undirected projection.
pub fn floyd_warshall(g: &ActivityGraph) -> Vec<Vec<u32>> {
    let n = g.node_count();
    let adj = undirected_matrix(g);
    let mut d = vec![vec![INF; n]; n];
    for u in 0..n {
        d[u][u] = 0;
        for v in 0..n {
            if adj[u][v] {
                d[u][v] = 1;
            }
        }
    }
    for k in 0..n {
        let dk = d[k].clone();
        for row in d.iter_mut() {
            let via = row[k];
            if via == INF {
                continue;
            }
            for (dst, &w) in row.iter_mut().zip(&dk) {
                if via + w < *dst {
                    *dst = via + w;
                }
            }
        }
    }
    d
}

/// Diameter of each weak component, keyed by its member set.
pub fn diameter_oracle(g: &ActivityGraph) -> Vec<(BTreeSet<u32>, u32)> {
    let d = floyd_warshall(g);
    wcc_oracle(g)
        .into_iter()
        .map(|part| {
            let diam = part
                .iter()
                .flat_map(|&u| part.iter().map(move |&v| (u, v)))
                .map(|(u, v)| d[u as usize][v as usize])
                .max()
                .unwrap_or(0);
            (part, diam)
        })
        .collect()
}

/// Mean over nodes of linked neighbour pairs over all neighbour pairs;
/// nodes with fewer than two neighbours contribute 0.
pub fn clustering_oracle(g: &ActivityGraph) -> Option<f64> {
    let n = g.node_count();
    if n == 0 {
        return None;
    }
    let adj = undirected_matrix(g);
    let mut total = 0.0;
    for v in 0..n {
        let nb: Vec<usize> = (0..n).filter(|&u| adj[v][u]).collect();
        let k = nb.len();
        if k < 2 {
            continue;
        }
        let mut linked = 0u64;
        for i in 0..k {
            for j in i + 1..k {
                if adj[nb[i]][nb[j]] {
                    linked += 1;
                }
            }
        }
        total += linked as f64 / (k * (k - 1) / 2) as f64;
    }
    Some(total / n as f64)
}

/// Pearson correlation of the degrees at both ends of every undirected
/// edge, each edge listed in both orientations.
pub fn assortativity_oracle(g: &ActivityGraph) -> Option<f64> {
    let adj = undirected_matrix(g);
    let n = adj.len();
    let deg: Vec<f64> = adj.iter().map(|r| r.iter().filter(|&&b| b).count() as f64).collect();
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if adj[u][v] {
                pairs.push((deg[u], deg[v]));
            }
        }
    }
    if pairs.is_empty() {
        return None;
    }
    let len = pairs.len() as f64;
    let mean = pairs.iter().map(|p| p.0).sum::<f64>() / len;
    let var = pairs.iter().map(|p| (p.0 - mean).powi(2)).sum::<f64>() / len;
    if pairs.iter().all(|p| p.0 == pairs[0].0) {
        return None;
    }
    let cov = pairs.iter().map(|p| (p.0 - mean) * (p.1 - mean)).sum::<f64>() / len;
    Some(cov / var)
}

/// Groups node ids by label.
pub fn partition_of(labels: &[u32]) -> Partition {
    let mut groups: std::collections::BTreeMap<u32, BTreeSet<u32>> = Default::default();
    for (v, &l) in labels.iter().enumerate() {
        groups.entry(l).or_default().insert(v as u32);
    }
    groups.into_values().collect()
}

/// Peak resident set size of this process in bytes, where available.
pub fn peak_rss_bytes() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}
