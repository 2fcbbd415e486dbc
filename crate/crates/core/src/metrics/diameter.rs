//! Exact diameters of weakly connected components.
//!
//! Every component is measured on the undirected projection. Small
//! components run a BFS from every member. Trees use a double sweep, which is
//! exact on trees. Everything else uses the iterative fringe upper bound
//! method: BFS from a central node, then eccentricities of its BFS levels from
//! the outside in until the lower bound meets the upper bound. The result is
//! always the exact maximum eccentricity; only the number of BFS runs varies.
//! No n x n distance matrix is ever built.

use rayon::prelude::*;
use serde::Serialize;

use crate::graph::UndirectedGraph;

/// Components at or below this size are measured with a BFS from every node.
const ALL_SOURCES_LIMIT: usize = 256;

const UNSEEN: u32 = u32::MAX;

/// Reusable BFS state sized to the whole projection. Only touched entries
/// are reset between runs.
pub struct Bfs {
    dist: Vec<u32>,
    queue: Vec<u32>,
}

impl Bfs {
    pub fn new(n: usize) -> Self {
        Bfs {
            dist: vec![UNSEEN; n],
            queue: Vec::new(),
        }
    }

    /// Runs a BFS from `source`; returns (eccentricity, a farthest node).
    /// Distances stay readable through [`distance`](Self::distance) until
    /// the next run.
    pub fn run(&mut self, p: &UndirectedGraph, source: u32) -> (u32, u32) {
        for &v in &self.queue {
            self.dist[v as usize] = UNSEEN;
        }
        self.queue.clear();
        self.dist[source as usize] = 0;
        self.queue.push(source);
        let mut head = 0;
        while head < self.queue.len() {
            let v = self.queue[head];
            head += 1;
            let dv = self.dist[v as usize];
            for &w in p.neighbors(v as usize) {
                if self.dist[w as usize] == UNSEEN {
                    self.dist[w as usize] = dv + 1;
                    self.queue.push(w);
                }
            }
        }
        let last = *self.queue.last().expect("source is visited");
        (self.dist[last as usize], last)
    }

    pub fn distance(&self, v: u32) -> Option<u32> {
        let d = self.dist[v as usize];
        (d != UNSEEN).then_some(d)
    }

    /// Nodes reached by the last run, in BFS order.
    pub fn visited(&self) -> &[u32] {
        &self.queue
    }
}

/// Largest and smallest WCC diameter plus the per-component values, in
/// component order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WccDiameters {
    pub largest: Option<u32>,
    pub smallest: Option<u32>,
    pub per_wcc: Vec<u32>,
}

/// Exact diameter of every component. `components` lists each component's
/// members; together they must partition the projection's nodes.
pub fn component_diameters(p: &UndirectedGraph, components: &[Vec<u32>]) -> WccDiameters {
    let n = p.node_count();
    // Large components parallelize internally; small ones run in parallel
    // with each other.
    let mut per_wcc = vec![0u32; components.len()];
    let (large, small): (Vec<usize>, Vec<usize>) =
        (0..components.len()).partition(|&c| components[c].len() > ALL_SOURCES_LIMIT);
    let small_results: Vec<(usize, u32)> = small
        .par_iter()
        .map_init(
            || Bfs::new(n),
            |bfs, &c| (c, all_sources_diameter(p, &components[c], bfs)),
        )
        .collect();
    for (c, d) in small_results {
        per_wcc[c] = d;
    }
    for c in large {
        per_wcc[c] = exact_diameter(p, &components[c]);
    }
    WccDiameters {
        largest: per_wcc.iter().copied().max(),
        smallest: per_wcc.iter().copied().min(),
        per_wcc,
    }
}

fn all_sources_diameter(p: &UndirectedGraph, members: &[u32], bfs: &mut Bfs) -> u32 {
    if members.len() <= 1 {
        return 0;
    }
    members.iter().map(|&v| bfs.run(p, v).0).max().unwrap_or(0)
}

fn is_tree(p: &UndirectedGraph, members: &[u32]) -> bool {
    let degree_sum: usize = members.iter().map(|&v| p.degree(v as usize)).sum();
    degree_sum == 2 * (members.len() - 1)
}

/// Exact diameter of one connected component.
pub fn exact_diameter(p: &UndirectedGraph, members: &[u32]) -> u32 {
    let n = p.node_count();
    if members.len() <= ALL_SOURCES_LIMIT {
        return all_sources_diameter(p, members, &mut Bfs::new(n));
    }
    let mut bfs = Bfs::new(n);
    if is_tree(p, members) {
        let (_, far) = bfs.run(p, members[0]);
        return bfs.run(p, far).0;
    }
    fringe_diameter(p, members, &mut bfs)
}

/// Walks from `end` towards the source of the last BFS and returns the node
/// at distance `target` from that source.
fn walk_back(p: &UndirectedGraph, bfs: &Bfs, end: u32, target: u32) -> u32 {
    let mut v = end;
    let mut d = bfs.distance(v).expect("end was reached");
    while d > target {
        v = *p
            .neighbors(v as usize)
            .iter()
            .find(|&&w| bfs.distance(w) == Some(d - 1))
            .expect("a BFS predecessor exists");
        d -= 1;
    }
    v
}

/// Picks a central start node with a four-sweep; returns it with the best
/// eccentricity lower bound seen on the way.
fn four_sweep(p: &UndirectedGraph, members: &[u32], bfs: &mut Bfs) -> (u32, u32) {
    let r1 = *members
        .iter()
        .max_by_key(|&&v| (p.degree(v as usize), std::cmp::Reverse(v)))
        .expect("component is non-empty");
    let mut lower = 0;
    let mut start = r1;
    for _ in 0..2 {
        let (_, a) = bfs.run(p, start);
        let (ecc_a, b) = bfs.run(p, a);
        lower = lower.max(ecc_a);
        start = walk_back(p, bfs, b, ecc_a / 2);
    }
    (start, lower)
}

fn fringe_diameter(p: &UndirectedGraph, members: &[u32], bfs: &mut Bfs) -> u32 {
    let n = p.node_count();
    let (center, sweep_lower) = four_sweep(p, members, bfs);
    let (ecc_center, _) = bfs.run(p, center);
    let mut levels: Vec<Vec<u32>> = vec![Vec::new(); ecc_center as usize + 1];
    for &v in bfs.visited() {
        levels[bfs.distance(v).expect("visited") as usize].push(v);
    }
    let mut lower = sweep_lower.max(ecc_center);
    let mut level = ecc_center;
    let mut upper = 2 * ecc_center;
    while upper > lower && level > 0 {
        let fringe_max = levels[level as usize]
            .par_iter()
            .map_init(|| Bfs::new(n), |b, &v| b.run(p, v).0)
            .max()
            .unwrap_or(0);
        lower = lower.max(fringe_max);
        let bound_below = 2 * (level - 1);
        if lower > bound_below {
            return lower;
        }
        upper = bound_below;
        level -= 1;
    }
    lower
}
