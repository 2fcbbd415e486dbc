//! Degree assortativity of the undirected projection.

use crate::graph::UndirectedGraph;

/// Pearson correlation of endpoint degrees over every projection edge taken
/// in both orientations. Degrees are projection degrees.
///
/// Sums are accumulated in exact integer arithmetic, so a zero variance is
/// detected exactly and reported as `None`, as is an edgeless graph.
pub fn degree_assortativity(p: &UndirectedGraph) -> Option<f64> {
    let mut m: u128 = 0;
    let mut sum: u128 = 0;
    let mut sum_sq: u128 = 0;
    let mut sum_prod: u128 = 0;
    for (u, v) in p.edges() {
        let (du, dv) = (p.degree(u) as u128, p.degree(v) as u128);
        m += 1;
        sum += du + dv;
        sum_sq += du * du + dv * dv;
        sum_prod += du * dv;
    }
    if m == 0 {
        return None;
    }
    // With N = 2m oriented pairs:
    //   N^2 var = N * sum_sq - sum^2
    //   N^2 cov = N * 2 * sum_prod - sum^2
    let n = 2 * m;
    let sum2 = sum * sum;
    let var = n * sum_sq - sum2;
    if var == 0 {
        return None;
    }
    let cov = (n * 2 * sum_prod) as i128 - sum2 as i128;
    let r = cov as f64 / var as f64;
    Some(r.clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_is_perfectly_disassortative() {
        let p = UndirectedGraph::from_edges(6, (1..6).map(|i| (0, i)));
        assert_eq!(degree_assortativity(&p), Some(-1.0));
    }

    #[test]
    fn regular_graph_is_undefined() {
        let p = UndirectedGraph::from_edges(6, (0..6).map(|i| (i, (i + 1) % 6)));
        assert_eq!(degree_assortativity(&p), None);
        assert_eq!(degree_assortativity(&UndirectedGraph::from_edges(3, [])), None);
    }

    #[test]
    fn two_stars_joined_at_hubs() {
        // Hubs 0 and 1 joined; each with 2 leaves. Degrees: hubs 3, leaves 1.
        let p = UndirectedGraph::from_edges(6, [(0, 1), (0, 2), (0, 3), (1, 4), (1, 5)]);
        // Oriented pairs: (3,3) x2, (3,1) x4, (1,3) x4.
        let xs = [3.0, 3.0, 3.0, 3.0, 3.0, 3.0, 1.0, 1.0, 1.0, 1.0];
        let ys = [3.0, 3.0, 1.0, 1.0, 1.0, 1.0, 3.0, 3.0, 3.0, 3.0];
        let mean = xs.iter().sum::<f64>() / 10.0;
        let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mean) * (y - mean)).sum();
        let var: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
        let r = degree_assortativity(&p).unwrap();
        assert!((r - cov / var).abs() < 1e-12, "{r}");
    }
}
