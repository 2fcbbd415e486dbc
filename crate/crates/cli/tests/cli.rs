use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use eosgraph::metrics::{full_report, MetricsReport};
use eosgraph::store::read_events;
use eosgraph::{build_graph, Activity};

fn eosgraph(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eosgraph"))
        .args(args)
        .current_dir(cwd)
        .env_remove("EOSGRAPH_THREADS")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], cwd: &Path) -> String {
    let out = eosgraph(args, cwd);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn error_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stderr).expect("stderr is one JSON object")
}

/// Runs the whole pipeline in `dir` and returns every produced file.
fn pipeline(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut stdout = String::new();
    stdout += &ok(&["synth", "--kind", "mixed", "--seed", "5", "--out", "corpus.jsonl"], dir);
    stdout += &ok(&["ingest", "--input", "corpus.jsonl", "--out", "store"], dir);
    for tag in ["acg", "avg", "mtg", "cag"] {
        let graph = format!("{tag}.json");
        stdout += &ok(&["build", "--events", "store", "--activity", tag, "--out", &graph], dir);
        stdout += &ok(&["metrics", "--graph", &graph, "--format", "json"], dir);
        stdout += &ok(&["metrics", "--graph", &graph, "--format", "table"], dir);
        let sample = format!("{tag}.sample.json");
        stdout += &ok(&["sample", "--graph", &graph, "--edges", "100", "--seed", "9", "--out", &sample], dir);
        stdout += &ok(&["export", "--graph", &graph, "--format", "dot", "--out", &format!("{tag}.dot")], dir);
        stdout += &ok(&["export", "--graph", &graph, "--format", "graphml", "--out", &format!("{tag}.graphml")], dir);
        stdout += &ok(&["export", "--graph", &graph, "--format", "csv", "--out", &format!("{tag}_csv")], dir);
    }
    stdout += &ok(&["sample", "--graph", "acg.json", "--ancestry", "40", "--seed", "2", "--out", "anc.json"], dir);
    stdout += &ok(&["histogram", "--graph", "mtg.json", "--out", "hist"], dir);
    stdout += &ok(&["report", "--events", "store", "--out", "report"], dir);

    let mut files = BTreeMap::new();
    files.insert("<stdout>".to_owned(), stdout.into_bytes());
    let mut stack = vec![dir.to_owned()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(dir).unwrap().display().to_string();
                files.insert(rel, fs::read(&path).unwrap());
            }
        }
    }
    files
}

#[test]
fn repeated_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let fa = pipeline(a.path());
    let fb = pipeline(b.path());
    assert_eq!(fa.keys().collect::<Vec<_>>(), fb.keys().collect::<Vec<_>>());
    for (name, bytes) in &fa {
        assert!(&fb[name] == bytes, "{name} differs between runs");
    }
    assert!(fa.len() > 30);
}

#[test]
fn report_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&["synth", "--kind", "mixed", "--seed", "8", "--out", "c.jsonl"], d);
    ok(&["ingest", "--input", "c.jsonl", "--out", "store"], d);
    let stdout = ok(&["report", "--events", "store", "--out", "rep"], d);

    let mut reports: Vec<MetricsReport> = Vec::new();
    for activity in Activity::ALL {
        let events: Vec<_> = read_events(&d.join("store"), activity)
            .unwrap()
            .map(Result::unwrap)
            .collect();
        reports.push(full_report(&build_graph(&events, activity).unwrap()));
    }
    let expected = serde_json::to_string_pretty(&reports).unwrap() + "\n";
    assert_eq!(fs::read_to_string(d.join("rep/metrics.json")).unwrap(), expected);
    let actions = fs::read_to_string(d.join("rep/actions.txt")).unwrap();
    let metrics = fs::read_to_string(d.join("rep/metrics.txt")).unwrap();
    assert!(stdout.contains(&actions) && stdout.contains(&metrics));
    assert!(actions.contains("Calling action (proportion)"));
    for title in ["Account creation", "Account vote", "Money transfer", "Contract authorization"] {
        assert!(actions.contains(title));
    }
    assert!(metrics.starts_with("Graph  Cluster"));
}

#[test]
fn creation_tree_has_zero_cluster() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&["synth", "--kind", "tree", "--scale", "0.1", "--out", "t.jsonl"], d);
    ok(&["ingest", "--input", "t.jsonl", "--out", "store"], d);
    ok(&["build", "--events", "store", "--activity", "acg", "--out", "acg.json"], d);
    let json: serde_json::Value =
        serde_json::from_str(&ok(&["metrics", "--graph", "acg.json"], d)).unwrap();
    assert_eq!(json["clustering"], 0.0);
    assert_eq!(json["largest_scc"], 1);
    assert_eq!(json["wcc_count"], 1);
    let table = ok(&["metrics", "--graph", "acg.json", "--format", "table"], d);
    let row = table.lines().nth(2).unwrap();
    assert_eq!(row.split_whitespace().take(2).collect::<Vec<_>>(), ["ACG", "0.000"]);
}

fn newaccount(tx: u32, creator: &str, name: &str) -> String {
    format!(
        r#"{{"block_num":1,"tx_id":"{tx:064x}","action_index":0,"kind":"calling","contract":"eosio","action_name":"newaccount","authorizer":"{creator}","payload":{{"creator":"{creator}","name":"{name}"}}}}"#
    )
}

#[test]
fn cyclic_creation_corpus_fails_build() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let corpus = [
        newaccount(1, "eosio", "alice"),
        newaccount(2, "bob", "carol"),
        newaccount(3, "carol", "bob"),
    ]
    .join("\n");
    fs::write(d.join("c.jsonl"), corpus + "\n").unwrap();
    ok(&["ingest", "--input", "c.jsonl", "--out", "store"], d);
    let out = eosgraph(&["build", "--events", "store", "--activity", "acg", "--out", "acg.json"], d);
    assert_eq!(out.status.code(), Some(1));
    let err = error_json(&out);
    assert_eq!(err["error"], "cycle-detected");
    assert_eq!(err["accounts"], serde_json::json!(["bob", "carol"]));
    assert!(!d.join("acg.json").exists());
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for args in [
        vec!["frobnicate"],
        vec!["build", "--events", "x", "--activity", "xyz", "--out", "y"],
        vec!["metrics"],
        vec!["sample", "--graph", "g", "--edges", "1", "--ancestry", "1", "--out", "o"],
        vec!["export", "--graph", "g", "--format", "png", "--out", "o"],
    ] {
        let out = eosgraph(&args, d);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert_eq!(error_json(&out)["error"], "usage");
    }
    assert!(eosgraph(&["--help"], d).status.success());
}

#[test]
fn io_and_parse_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = eosgraph(&["ingest", "--input", "missing.jsonl", "--out", "store"], d);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_json(&out)["error"], "io");

    fs::write(d.join("bad.json"), "{ not a graph").unwrap();
    let out = eosgraph(&["metrics", "--graph", "bad.json"], d);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_json(&out)["error"], "parse");

    fs::write(d.join("bad.toml"), "spam_threshold = \"high\"\n").unwrap();
    let out = eosgraph(&["--config", "bad.toml", "metrics", "--graph", "bad.json"], d);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_json(&out)["error"], "config");
}

#[test]
fn malformed_lines_are_tallied_not_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let corpus = [newaccount(1, "eosio", "alice"), "{oops".to_owned(), newaccount(1, "eosio", "alice")].join("\n");
    fs::write(d.join("c.jsonl"), corpus + "\n").unwrap();
    let stats: serde_json::Value = serde_json::from_str(&ok(
        &["ingest", "--input", "c.jsonl", "--out", "store", "--rejects", "rej.jsonl"],
        d,
    ))
    .unwrap();
    assert_eq!(stats["classified"], 1);
    assert_eq!(stats["erroneous"], 2);
    assert_eq!(stats["errors"]["malformed-json"], 1);
    assert_eq!(stats["errors"]["duplicate-key"], 1);
    let rejects = fs::read_to_string(d.join("rej.jsonl")).unwrap();
    assert_eq!(rejects.lines().count(), 2);
}

#[test]
fn config_sets_spam_threshold_and_system_accounts() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&["synth", "--kind", "auth", "--scale", "0.05", "--out", "a.jsonl"], d);
    ok(&["ingest", "--input", "a.jsonl", "--out", "store"], d);
    let flagged = |config: Option<&str>| {
        let mut args = vec![];
        if let Some(c) = config {
            args.extend(["--config", c]);
        }
        args.extend(["build", "--events", "store", "--activity", "cag", "--out", "cag.json"]);
        let diag: serde_json::Value = serde_json::from_str(&ok(&args, d)).unwrap();
        diag["violations"]
            .as_array()
            .unwrap()
            .iter()
            .any(|v| v["rule"] == "dominant-weight-share")
    };
    assert!(flagged(None));
    fs::write(d.join("strict.toml"), "spam_threshold = 0.99\n").unwrap();
    assert!(!flagged(Some("strict.toml")));

    // Declaring the spam account a system account removes its events.
    fs::write(
        d.join("sys.toml"),
        "system_accounts = [\"eosio\", \"eosio.token\", \"spamtweeter\"]\n",
    )
    .unwrap();
    ok(&["--config", "sys.toml", "ingest", "--input", "a.jsonl", "--out", "store2"], d);
    let events = read_events(&d.join("store2"), Activity::ContractAuthorization)
        .unwrap()
        .map(Result::unwrap);
    assert!(events.into_iter().all(|e| e.source.as_str() != "spamtweeter"));
}

#[test]
fn thread_env_fallback_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&["synth", "--kind", "transfers", "--scale", "0.05", "--out", "t.jsonl"], d);
    ok(&["ingest", "--input", "t.jsonl", "--out", "store"], d);
    ok(&["build", "--events", "store", "--activity", "mtg", "--out", "g.json"], d);
    let one = ok(&["--threads", "1", "metrics", "--graph", "g.json"], d);
    let env = Command::new(env!("CARGO_BIN_EXE_eosgraph"))
        .args(["metrics", "--graph", "g.json"])
        .current_dir(d)
        .env("EOSGRAPH_THREADS", "3")
        .output()
        .unwrap();
    assert!(env.status.success());
    assert_eq!(String::from_utf8(env.stdout).unwrap(), one);
    let bad = Command::new(env!("CARGO_BIN_EXE_eosgraph"))
        .args(["metrics", "--graph", "g.json"])
        .current_dir(d)
        .env("EOSGRAPH_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
