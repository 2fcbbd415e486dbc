//! Strongly and weakly connected components.

use serde::Serialize;

use crate::graph::{ActivityGraph, NodeId};

/// One component: members ascending, plus the exact diameter for weakly
/// connected components once computed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentSummary {
    pub id: usize,
    pub members: Vec<NodeId>,
    pub size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diameter: Option<u32>,
}

/// Per-node component labels. Label `c` is the `c`-th component in order of
/// its smallest member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labels {
    pub labels: Vec<u32>,
    pub count: usize,
}

impl Labels {
    /// Relabels arbitrary component ids so that components are numbered by
    /// first appearance in node order.
    fn canonical(raw: &[u32]) -> Self {
        let mut map = vec![u32::MAX; raw.len()];
        let mut next = 0u32;
        let labels = raw
            .iter()
            .map(|&r| {
                let slot = &mut map[r as usize];
                if *slot == u32::MAX {
                    *slot = next;
                    next += 1;
                }
                *slot
            })
            .collect();
        Labels {
            labels,
            count: next as usize,
        }
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.count];
        for &l in &self.labels {
            sizes[l as usize] += 1;
        }
        sizes
    }

    pub fn largest(&self) -> usize {
        self.sizes().into_iter().max().unwrap_or(0)
    }

    pub fn summaries(&self) -> Vec<ComponentSummary> {
        let mut members: Vec<Vec<NodeId>> = self
            .sizes()
            .into_iter()
            .map(Vec::with_capacity)
            .collect();
        for (v, &l) in self.labels.iter().enumerate() {
            members[l as usize].push(NodeId(v as u32));
        }
        members
            .into_iter()
            .enumerate()
            .map(|(id, members)| ComponentSummary {
                id,
                size: members.len(),
                members,
                diameter: None,
            })
            .collect()
    }
}

/// Tarjan's algorithm with an explicit call stack, linear in nodes + edges.
pub fn scc_labels(g: &ActivityGraph) -> Labels {
    const UNVISITED: u32 = u32::MAX;
    let n = g.node_count();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut raw = vec![0u32; n];
    let mut next_index = 0u32;
    let mut next_comp = 0u32;
    // (node, position in its out-edge list)
    let mut calls: Vec<(u32, usize)> = Vec::new();

    for root in 0..n as u32 {
        if index[root as usize] != UNVISITED {
            continue;
        }
        calls.push((root, 0));
        index[root as usize] = next_index;
        low[root as usize] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root as usize] = true;

        while let Some(&mut (v, ref mut pos)) = calls.last_mut() {
            let out = g.out_edges(NodeId(v));
            if *pos < out.len() {
                let w = out[*pos].dst.0;
                *pos += 1;
                if index[w as usize] == UNVISITED {
                    index[w as usize] = next_index;
                    low[w as usize] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w as usize] = true;
                    calls.push((w, 0));
                } else if on_stack[w as usize] {
                    low[v as usize] = low[v as usize].min(index[w as usize]);
                }
                continue;
            }
            calls.pop();
            if let Some(&(parent, _)) = calls.last() {
                low[parent as usize] = low[parent as usize].min(low[v as usize]);
            }
            if low[v as usize] == index[v as usize] {
                loop {
                    let w = stack.pop().expect("tarjan stack holds the root");
                    on_stack[w as usize] = false;
                    raw[w as usize] = next_comp;
                    if w == v {
                        break;
                    }
                }
                next_comp += 1;
            }
        }
    }
    Labels::canonical(&raw)
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    /// Returns false if `a` and `b` were already joined.
    pub fn union(&mut self, a: u32, b: u32) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
        true
    }
}

/// Weak components: connected components of the undirected projection,
/// isolated nodes included as singletons.
pub fn wcc_labels(g: &ActivityGraph) -> Labels {
    let n = g.node_count();
    let mut uf = UnionFind::new(n);
    for e in g.edges() {
        uf.union(e.src.0, e.dst.0);
    }
    let raw: Vec<u32> = (0..n as u32).map(|v| uf.find(v)).collect();
    Labels::canonical(&raw)
}

/// Strongly connected components, ordered by smallest member.
pub fn scc(g: &ActivityGraph) -> Vec<ComponentSummary> {
    scc_labels(g).summaries()
}

/// Weakly connected components, ordered by smallest member.
pub fn wcc(g: &ActivityGraph) -> Vec<ComponentSummary> {
    wcc_labels(g).summaries()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_util::digraph;

    #[test]
    fn three_cycle_is_one_scc() {
        let g = digraph(3, &[(0, 1), (1, 2), (2, 0)]);
        let s = scc(&g);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].size, 3);
    }

    #[test]
    fn dag_has_singleton_sccs() {
        let g = digraph(4, &[(0, 1), (0, 2), (2, 3)]);
        assert!(scc(&g).iter().all(|c| c.size == 1));
        assert_eq!(scc(&g).len(), 4);
    }

    #[test]
    fn two_disjoint_edges_are_two_wccs() {
        let g = digraph(4, &[(0, 1), (2, 3)]);
        let w = wcc(&g);
        assert_eq!(w.len(), 2);
        assert!(w.iter().all(|c| c.size == 2));
        assert_eq!(w[0].members, vec![NodeId(0), NodeId(1)]);
    }

    #[test]
    fn long_path_does_not_overflow_stack() {
        let n = 200_000u32;
        let edges: Vec<(u32, u32)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        let g = digraph(n as usize, &edges);
        assert_eq!(scc_labels(&g).count, n as usize);
        let mut cyc = edges.clone();
        cyc.push((n - 1, 0));
        let g = digraph(n as usize, &cyc);
        assert_eq!(scc_labels(&g).count, 1);
    }

    #[test]
    fn mutual_pair_inside_larger_wcc() {
        let g = digraph(5, &[(0, 1), (1, 0), (1, 2), (3, 4)]);
        let s = scc_labels(&g);
        assert_eq!(s.count, 4);
        assert_eq!(s.largest(), 2);
        let w = wcc_labels(&g);
        assert_eq!(w.sizes(), vec![3, 2]);
    }
}
