//! DOT, GraphML and CSV export, plus CSV import and plot-ready degree
//! histograms.
//!
//! Weights print as integers for count-weighted graphs and as fixed-point
//! EOS with four decimals for transfer graphs. All output is a pure function
//! of the graph, so repeated exports are byte-identical.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::account::AccountId;
use crate::amount::{format_fixed, parse_fixed};
use crate::graph::{ActivityGraph, DegreeHistogram, Edge, NodeId};
use crate::ingest::Activity;
use crate::metrics::PowerLawFit;

pub const NODES_CSV: &str = "nodes.csv";
pub const EDGES_CSV: &str = "edges.csv";

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("unsupported export format {0:?} (expected dot, graphml or csv)")]
    UnsupportedFormat(String),
    #[error("{file}:{line}: {message}")]
    Csv {
        file: &'static str,
        line: usize,
        message: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    GraphMl,
    Csv,
}

impl FromStr for ExportFormat {
    type Err = ExportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dot" => Ok(ExportFormat::Dot),
            "graphml" => Ok(ExportFormat::GraphMl),
            "csv" => Ok(ExportFormat::Csv),
            other => Err(ExportError::UnsupportedFormat(other.to_owned())),
        }
    }
}

/// Weight as written to every export format.
pub fn weight_text(activity: Activity, weight: u128) -> String {
    if activity.is_amount_weighted() {
        format_fixed(weight)
    } else {
        weight.to_string()
    }
}

fn parse_weight(activity: Activity, text: &str) -> Option<u128> {
    if activity.is_amount_weighted() {
        // Exactly four decimals, as written by `weight_text`.
        let (_, frac) = text.split_once('.')?;
        (frac.len() == 4).then(|| parse_fixed(text).ok()).flatten()
    } else {
        text.parse().ok()
    }
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

/// Line width in 1..=10, proportional to weight relative to the heaviest
/// edge.
fn pen_width(weight: u128, max: u128) -> f64 {
    if max == 0 {
        1.0
    } else {
        1.0 + 9.0 * (weight as f64 / max as f64)
    }
}

pub fn to_dot(g: &ActivityGraph) -> String {
    let activity = g.activity();
    let max = g.edges().iter().map(|e| e.weight).max().unwrap_or(0);
    let mut out = format!("digraph {} {{\n", activity.tag());
    for v in g.nodes() {
        let _ = writeln!(out, "  n{v} [label=\"{}\"];", g.account(v));
    }
    for e in g.edges() {
        let _ = writeln!(
            out,
            "  n{} -> n{} [weight=\"{}\", multiplicity={}, penwidth={:.3}];",
            e.src,
            e.dst,
            weight_text(activity, e.weight),
            e.multiplicity,
            pen_width(e.weight, max)
        );
    }
    out.push_str("}\n");
    out
}

pub fn to_graphml(g: &ActivityGraph) -> String {
    let activity = g.activity();
    let mut out = String::from(concat!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n",
        "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n",
        "  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n",
        "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n",
        "  <key id=\"multiplicity\" for=\"edge\" attr.name=\"multiplicity\" attr.type=\"long\"/>\n",
    ));
    let _ = writeln!(
        out,
        "  <graph id=\"{}\" edgedefault=\"directed\">",
        activity.tag()
    );
    for v in g.nodes() {
        let _ = writeln!(
            out,
            "    <node id=\"n{v}\"><data key=\"label\">{}</data></node>",
            xml_escape(g.account(v).as_str())
        );
    }
    for (i, e) in g.edges().iter().enumerate() {
        let _ = writeln!(
            out,
            "    <edge id=\"e{i}\" source=\"n{}\" target=\"n{}\"><data key=\"weight\">{}</data><data key=\"multiplicity\">{}</data></edge>",
            e.src,
            e.dst,
            weight_text(activity, e.weight),
            e.multiplicity
        );
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

/// `(nodes.csv, edges.csv)` contents.
pub fn to_csv(g: &ActivityGraph) -> (String, String) {
    let mut nodes = String::from("id,account\n");
    for v in g.nodes() {
        let _ = writeln!(nodes, "{v},{}", g.account(v));
    }
    let mut edges = String::from("src,dst,weight,multiplicity\n");
    for e in g.edges() {
        let _ = writeln!(
            edges,
            "{},{},{},{}",
            e.src,
            e.dst,
            weight_text(g.activity(), e.weight),
            e.multiplicity
        );
    }
    (nodes, edges)
}

fn write(path: &Path, contents: &str) -> Result<PathBuf, ExportError> {
    fs::write(path, contents).map_err(|source| ExportError::Io {
        path: path.to_owned(),
        source,
    })?;
    Ok(path.to_owned())
}

/// Writes `g` in `format`. DOT and GraphML go to the file `out`; CSV writes
/// `nodes.csv` and `edges.csv` into the directory `out`. Returns the files
/// written.
pub fn export(
    g: &ActivityGraph,
    format: ExportFormat,
    out: &Path,
) -> Result<Vec<PathBuf>, ExportError> {
    match format {
        ExportFormat::Dot => Ok(vec![write(out, &to_dot(g))?]),
        ExportFormat::GraphMl => Ok(vec![write(out, &to_graphml(g))?]),
        ExportFormat::Csv => {
            fs::create_dir_all(out).map_err(|source| ExportError::Io {
                path: out.to_owned(),
                source,
            })?;
            let (nodes, edges) = to_csv(g);
            Ok(vec![
                write(&out.join(NODES_CSV), &nodes)?,
                write(&out.join(EDGES_CSV), &edges)?,
            ])
        }
    }
}

fn csv_rows<'a>(
    file: &'static str,
    text: &'a str,
    header: &str,
) -> Result<impl Iterator<Item = (usize, Vec<&'a str>)>, ExportError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == header => {}
        _ => {
            return Err(ExportError::Csv {
                file,
                line: 1,
                message: format!("expected header {header:?}"),
            })
        }
    }
    Ok(lines
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| (i + 1, l.split(',').collect())))
}

/// Parses the CSV pair written by [`to_csv`] back into a graph.
pub fn from_csv(activity: Activity, nodes: &str, edges: &str) -> Result<ActivityGraph, ExportError> {
    let bad = |file, line, message: String| ExportError::Csv {
        file,
        line,
        message,
    };
    let mut accounts = Vec::new();
    for (line, cols) in csv_rows(NODES_CSV, nodes, "id,account")? {
        let [id, account] = cols[..] else {
            return Err(bad(NODES_CSV, line, "expected 2 columns".into()));
        };
        if id.parse::<usize>().ok() != Some(accounts.len()) {
            return Err(bad(NODES_CSV, line, format!("node id {id:?} out of sequence")));
        }
        accounts.push(AccountId::new(account).map_err(|e| bad(NODES_CSV, line, e.to_string()))?);
    }
    let mut parsed = Vec::new();
    for (line, cols) in csv_rows(EDGES_CSV, edges, "src,dst,weight,multiplicity")? {
        let [src, dst, weight, mult] = cols[..] else {
            return Err(bad(EDGES_CSV, line, "expected 4 columns".into()));
        };
        let field = |name: &str, v: Option<u128>| {
            v.ok_or_else(|| bad(EDGES_CSV, line, format!("bad {name} value")))
        };
        let src = field("src", src.parse().ok())?;
        let dst = field("dst", dst.parse().ok())?;
        let weight = field("weight", parse_weight(activity, weight))?;
        let multiplicity = field("multiplicity", mult.parse().ok())?;
        let (Ok(src), Ok(dst), Ok(multiplicity)) =
            (u32::try_from(src), u32::try_from(dst), u64::try_from(multiplicity))
        else {
            return Err(bad(EDGES_CSV, line, "value out of range".into()));
        };
        parsed.push(Edge {
            src: NodeId(src),
            dst: NodeId(dst),
            weight,
            multiplicity,
        });
    }
    ActivityGraph::from_parts(activity, accounts, parsed)
        .map_err(|e| bad(EDGES_CSV, 0, e.to_string()))
}

/// Reads a CSV export directory.
pub fn import_csv(activity: Activity, dir: &Path) -> Result<ActivityGraph, ExportError> {
    let read = |name: &str| {
        let path = dir.join(name);
        fs::read_to_string(&path).map_err(|source| ExportError::Io { path, source })
    };
    from_csv(activity, &read(NODES_CSV)?, &read(EDGES_CSV)?)
}

/// Plot-ready histogram: `degree,count,fitted_count`. The fitted column is
/// empty without a fit and for degree 0.
pub fn histogram_csv(h: &DegreeHistogram, fit: Option<&PowerLawFit>) -> String {
    let mut out = String::from("degree,count,fitted_count\n");
    for (degree, count) in h.iter() {
        let fitted = match fit {
            Some(f) if degree >= 1 => format!("{:.6}", f.predict(degree)),
            _ => String::new(),
        };
        let _ = writeln!(out, "{degree},{count},{fitted}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;
    use crate::ingest::ActivityEvent;
    use crate::trace::ActionKind;

    fn ev(activity: Activity, s: &str, t: &str, w: u64) -> ActivityEvent {
        ActivityEvent {
            activity,
            source: AccountId::new(s).unwrap(),
            target: AccountId::new(t).unwrap(),
            weight: w,
            kind: ActionKind::Calling,
        }
    }

    fn mtg() -> ActivityGraph {
        let a = Activity::MoneyTransfer;
        build_graph(
            [ev(a, "alice", "bob", 15_000), ev(a, "bob", "carol", 1), ev(a, "bob", "carol", 2)],
            a,
        )
        .unwrap()
    }

    #[test]
    fn dot_has_weighted_edges() {
        let dot = to_dot(&mtg());
        assert!(dot.starts_with("digraph mtg {\n"));
        let edges: Vec<&str> = dot.lines().filter(|l| l.contains("->")).collect();
        assert_eq!(edges.len(), 2);
        assert!(edges[0].contains("weight=\"1.5000\""));
        assert!(edges[0].contains("penwidth=10.000"));
        assert!(edges[1].contains("weight=\"0.0003\""));
        assert!(edges[1].contains("multiplicity=2"));
        assert!(dot.contains("label=\"alice\""));
    }

    #[test]
    fn graphml_has_attributes() {
        let xml = to_graphml(&mtg());
        assert_eq!(xml.matches("<edge ").count(), 2);
        assert!(xml.contains("<data key=\"weight\">1.5000</data>"));
        assert!(xml.contains("<data key=\"label\">carol</data>"));
    }

    #[test]
    fn csv_round_trip() {
        let g = mtg();
        let (nodes, edges) = to_csv(&g);
        assert_eq!(edges.lines().nth(1), Some("0,1,1.5000,1"));
        assert_eq!(from_csv(Activity::MoneyTransfer, &nodes, &edges).unwrap(), g);

        let a = Activity::AccountVote;
        let votes = build_graph([ev(a, "v", "p", 1), ev(a, "v", "p", 1)], a).unwrap();
        let (nodes, edges) = to_csv(&votes);
        assert_eq!(edges.lines().nth(1), Some("1,0,2,2"));
        assert_eq!(from_csv(a, &nodes, &edges).unwrap(), votes);
    }

    #[test]
    fn csv_rejects_bad_rows() {
        let (nodes, edges) = to_csv(&mtg());
        let bad = edges.replace("1.5000", "1.5");
        assert!(from_csv(Activity::MoneyTransfer, &nodes, &bad).is_err());
        let bad = edges.replace("0,1,", "0,9,");
        assert!(from_csv(Activity::MoneyTransfer, &nodes, &bad).is_err());
        assert!(from_csv(Activity::MoneyTransfer, "id,name\n", &edges).is_err());
    }

    #[test]
    fn unsupported_format() {
        assert!(matches!(
            "png".parse::<ExportFormat>(),
            Err(ExportError::UnsupportedFormat(_))
        ));
        assert_eq!("graphml".parse::<ExportFormat>().unwrap(), ExportFormat::GraphMl);
    }

    #[test]
    fn histogram_with_fit() {
        let h = DegreeHistogram([(0, 3), (1, 4), (2, 1)].into_iter().collect());
        let fit = crate::metrics::fit_power_law(&h).unwrap();
        let csv = histogram_csv(&h, Some(&fit));
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[1], "0,3,");
        assert_eq!(lines[2], "1,4,4.000000");
        assert_eq!(lines[3], "2,1,1.000000");
    }
}
