//! Triangle-based clustering on the undirected projection.

use rayon::prelude::*;

use crate::graph::UndirectedGraph;

/// Number of triangles through each node.
///
/// Edges are oriented from lower to higher (degree, id) rank so every
/// triangle is found exactly once from its lowest-ranked corner; the work is
/// O(m^1.5) regardless of hub degrees.
pub fn triangles_per_node(p: &UndirectedGraph) -> Vec<u64> {
    let n = p.node_count();
    let rank = |v: usize| (p.degree(v), v);
    let forward: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .map(|u| {
            p.neighbors(u)
                .iter()
                .copied()
                .filter(|&w| rank(w as usize) > rank(u))
                .collect()
        })
        .collect();

    (0..n)
        .into_par_iter()
        .fold(
            || (vec![0u64; n], vec![u32::MAX; n]),
            |(mut tri, mut mark), u| {
                let fu = &forward[u];
                for &v in fu {
                    mark[v as usize] = u as u32;
                }
                for &v in fu {
                    for &w in &forward[v as usize] {
                        if mark[w as usize] == u as u32 {
                            tri[u] += 1;
                            tri[v as usize] += 1;
                            tri[w as usize] += 1;
                        }
                    }
                }
                (tri, mark)
            },
        )
        .map(|(tri, _)| tri)
        .reduce(
            || vec![0u64; n],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

/// Average local clustering coefficient; nodes of degree < 2 count as 0.
/// `None` for the empty graph.
pub fn average_clustering(p: &UndirectedGraph, triangles: &[u64]) -> Option<f64> {
    let n = p.node_count();
    if n == 0 {
        return None;
    }
    let sum: f64 = (0..n)
        .map(|v| {
            let d = p.degree(v) as f64;
            if d < 2.0 {
                0.0
            } else {
                2.0 * triangles[v] as f64 / (d * (d - 1.0))
            }
        })
        .sum();
    Some(sum / n as f64)
}

/// Global transitivity: closed over connected triples. `None` when the
/// projection has no connected triple.
pub fn transitivity(p: &UndirectedGraph, triangles: &[u64]) -> Option<f64> {
    let closed: u128 = triangles.iter().map(|&t| t as u128).sum();
    let triples: u128 = (0..p.node_count())
        .map(|v| {
            let d = p.degree(v) as u128;
            d * d.saturating_sub(1) / 2
        })
        .sum();
    (triples > 0).then(|| closed as f64 / triples as f64)
}
