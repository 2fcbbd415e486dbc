//! Graph metric suite: clustering, assortativity, strong and weak components,
//! exact component diameters and degree-distribution fits.
//!
//! Every metric is weight-blind; edge weights only matter for exports and
//! builder diagnostics.

pub mod assortativity;
pub mod clustering;
pub mod components;
pub mod diameter;
pub mod powerlaw;

use serde::{Deserialize, Serialize};

use crate::graph::{degree_views, undirected_projection, ActivityGraph, UndirectedGraph};
use crate::ingest::Activity;

pub use assortativity::degree_assortativity;
pub use components::{scc, scc_labels, wcc, wcc_labels, ComponentSummary, Labels, UnionFind};
pub use diameter::{component_diameters, exact_diameter, WccDiameters};
pub use powerlaw::{fit_power_law, InsufficientPoints, PowerLawFit};

/// Average local clustering coefficient of the undirected projection.
pub fn clustering_coefficient(g: &ActivityGraph) -> Option<f64> {
    let p = undirected_projection(g);
    let t = clustering::triangles_per_node(&p);
    clustering::average_clustering(&p, &t)
}

/// Global transitivity of the undirected projection.
pub fn transitivity(g: &ActivityGraph) -> Option<f64> {
    let p = undirected_projection(g);
    let t = clustering::triangles_per_node(&p);
    clustering::transitivity(&p, &t)
}

/// Total-degree assortativity of the undirected projection.
pub fn assortativity(g: &ActivityGraph) -> Option<f64> {
    degree_assortativity(&undirected_projection(g))
}

fn member_lists(labels: &Labels) -> Vec<Vec<u32>> {
    let mut lists: Vec<Vec<u32>> = labels.sizes().into_iter().map(Vec::with_capacity).collect();
    for (v, &l) in labels.labels.iter().enumerate() {
        lists[l as usize].push(v as u32);
    }
    lists
}

fn diameters_on(p: &UndirectedGraph, labels: &Labels) -> WccDiameters {
    component_diameters(p, &member_lists(labels))
}

/// Exact diameter of every weakly connected component, in [`wcc`] order.
pub fn wcc_diameters(g: &ActivityGraph) -> WccDiameters {
    diameters_on(&undirected_projection(g), &wcc_labels(g))
}

/// Weak components with their diameters filled in.
pub fn wcc_with_diameters(g: &ActivityGraph) -> Vec<ComponentSummary> {
    let d = wcc_diameters(g);
    let mut comps = wcc(g);
    for (c, diam) in comps.iter_mut().zip(d.per_wcc) {
        c.diameter = Some(diam);
    }
    comps
}

/// Power-law fits of the three degree distributions; `None` where the
/// histogram has fewer than two usable points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeFits {
    pub total: Option<PowerLawFit>,
    #[serde(rename = "in")]
    pub in_degree: Option<PowerLawFit>,
    #[serde(rename = "out")]
    pub out_degree: Option<PowerLawFit>,
}

/// One row of the metrics table plus degree fits. `None` marks an undefined
/// value (serialized as `null`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub activity: Activity,
    pub node_count: usize,
    pub edge_count: usize,
    /// Average local clustering coefficient.
    pub clustering: Option<f64>,
    /// Global transitivity; a secondary measure, not the "Cluster" column.
    pub transitivity: Option<f64>,
    pub assortativity: Option<f64>,
    pub scc_count: usize,
    pub largest_scc: usize,
    pub wcc_count: usize,
    pub largest_wcc: usize,
    pub largest_wcc_diameter: Option<u32>,
    pub smallest_wcc_diameter: Option<u32>,
    pub fits: DegreeFits,
}

impl MetricsReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Computes the whole suite. Independent parts run in parallel.
pub fn full_report(g: &ActivityGraph) -> MetricsReport {
    let p = undirected_projection(g);
    let ((scc_l, (wcc_l, diam)), ((clust, trans, assort), fits)) = rayon::join(
        || {
            rayon::join(
                || scc_labels(g),
                || {
                    let w = wcc_labels(g);
                    let d = diameters_on(&p, &w);
                    (w, d)
                },
            )
        },
        || {
            rayon::join(
                || {
                    let t = clustering::triangles_per_node(&p);
                    (
                        clustering::average_clustering(&p, &t),
                        clustering::transitivity(&p, &t),
                        degree_assortativity(&p),
                    )
                },
                || {
                    let views = degree_views(g);
                    DegreeFits {
                        total: fit_power_law(&views.total).ok(),
                        in_degree: fit_power_law(&views.in_degree).ok(),
                        out_degree: fit_power_law(&views.out_degree).ok(),
                    }
                },
            )
        },
    );
    MetricsReport {
        activity: g.activity(),
        node_count: g.node_count(),
        edge_count: g.edge_count(),
        clustering: clust,
        transitivity: trans,
        assortativity: assort,
        scc_count: scc_l.count,
        largest_scc: scc_l.largest(),
        wcc_count: wcc_l.count,
        largest_wcc: wcc_l.largest(),
        largest_wcc_diameter: diam.largest,
        smallest_wcc_diameter: diam.smallest,
        fits,
    }
}

/// Groups digits by thousands: `302039` -> `302,039`.
pub fn group_thousands(n: u128) -> String {
    let digits = n.to_string();
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, ch) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i) % 3 == 0 {
            out.push(',');
        }
        out.push(ch);
    }
    out
}

/// Renders rows of equal length as right-aligned columns.
pub fn aligned_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &mut dyn Iterator<Item = &str>| -> String {
        let parts: Vec<String> = cells
            .zip(&widths)
            .enumerate()
            .map(|(i, (c, w))| {
                if i == 0 {
                    format!("{c:<w$}")
                } else {
                    format!("{c:>w$}")
                }
            })
            .collect();
        parts.join("  ").trim_end().to_owned() + "\n"
    };
    let mut out = line(&mut header.iter().copied());
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    out += &line(&mut rule.iter().map(String::as_str));
    for row in rows {
        out += &line(&mut row.iter().map(String::as_str));
    }
    out
}

fn real(v: Option<f64>) -> String {
    v.map_or_else(|| "/".to_owned(), |x| format!("{x:.3}"))
}

fn int(v: Option<u32>) -> String {
    v.map_or_else(|| "/".to_owned(), |x| group_thousands(x as u128))
}

/// Metrics table, one row per graph. Undefined values print as `/`.
pub fn metrics_table(reports: &[MetricsReport]) -> String {
    let header = [
        "Graph",
        "Cluster",
        "Assortativity",
        "Number of SCC",
        "Largest SCC",
        "Number of WCC",
        "Largest WCC",
        "Largest diameter",
        "Smallest diameter",
    ];
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                r.activity.tag().to_uppercase(),
                real(r.clustering),
                real(r.assortativity),
                group_thousands(r.scc_count as u128),
                group_thousands(r.largest_scc as u128),
                group_thousands(r.wcc_count as u128),
                group_thousands(r.largest_wcc as u128),
                int(r.largest_wcc_diameter),
                int(r.smallest_wcc_diameter),
            ]
        })
        .collect();
    aligned_table(&header, &rows)
}
