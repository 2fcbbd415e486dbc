mod config;

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use eosgraph::builders::BuildError;
use eosgraph::export::{export, histogram_csv, ExportError, ExportFormat};
use eosgraph::graph::GraphError;
use eosgraph::metrics::{fit_power_law, full_report, metrics_table};
use eosgraph::sample::{ancestry_subgraph, sample_edges, SampleError};
use eosgraph::store::{read_events, read_stats, EventStoreWriter, StoreError};
use eosgraph::synth::{self, Attachment, AuthSpec, MixedSpec, TransferSpec, VoteSpec};
use eosgraph::{
    build_activity, build_graph, degree_views, ingest_reader, Activity, ActivityEvent, ActivityGraph, SystemAccounts,
};
use serde::Serialize;
use serde_json::json;

use config::Config;

#[derive(Parser, Debug)]
#[command(name = "eosgraph", version, about = "EOSIO action-trace graph analysis")]
struct Cli {
    /// Worker threads (default: all cores)
    #[arg(long, global = true, env = "EOSGRAPH_THREADS")]
    threads: Option<usize>,

    /// TOML settings: system_accounts, spam_threshold, top_k
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a JSON-lines trace corpus into an event store
    Ingest {
        #[arg(long)]
        input: PathBuf,
        /// One system account per line; overrides the config file
        #[arg(long)]
        system_accounts: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Write rejected lines as JSON lines
        #[arg(long)]
        rejects: Option<PathBuf>,
    },
    /// Build one activity graph from an event store
    Build {
        #[arg(long)]
        events: PathBuf,
        #[arg(long)]
        activity: Activity,
        #[arg(long)]
        out: PathBuf,
        /// Diagnostics file (default: stdout)
        #[arg(long)]
        diagnostics: Option<PathBuf>,
    },
    /// Compute the metric suite of a graph
    Metrics {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum, default_value_t = MetricsFormat::Json)]
        format: MetricsFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample a graph for visualization
    Sample(SampleArgs),
    /// Write a graph as DOT, GraphML or CSV
    Export {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        format: ExportFormat,
        /// File for dot/graphml, directory for csv
        #[arg(long)]
        out: PathBuf,
    },
    /// Degree histograms with fitted power-law counts
    Histogram {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build all four graphs and emit action and metrics tables
    Report {
        #[arg(long)]
        events: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic corpus with a ground-truth sidecar
    Synth {
        #[arg(long, value_enum)]
        kind: SynthKind,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Size multiplier over the default fixture
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        #[arg(long)]
        out: PathBuf,
        /// Ground-truth sidecar (default: <out>.truth.json)
        #[arg(long)]
        truth: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Keep n uniformly sampled edges
    #[arg(long, conflicts_with = "ancestry", required_unless_present = "ancestry")]
    edges: Option<usize>,
    /// Keep the root paths of n sampled nodes (creation trees only)
    #[arg(long)]
    ancestry: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum MetricsFormat {
    Json,
    Table,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum SynthKind {
    Tree,
    Votes,
    Transfers,
    Auth,
    Mixed,
}

/// Error reported as one JSON object on stderr.
#[derive(Debug, Serialize)]
struct Failure {
    error: &'static str,
    message: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    accounts: Vec<String>,
    #[serde(skip)]
    exit: u8,
}

impl Failure {
    fn new(error: &'static str, message: impl Into<String>) -> Self {
        Failure {
            error,
            message: message.into(),
            accounts: Vec::new(),
            exit: 1,
        }
    }

    fn usage(message: impl Into<String>) -> Self {
        Failure {
            exit: 2,
            ..Failure::new("usage", message)
        }
    }
}

fn io_fail(path: &Path) -> impl Fn(io::Error) -> Failure + '_ {
    move |e| Failure::new("io", format!("{}: {e}", path.display()))
}

impl From<StoreError> for Failure {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::Io { .. } => Failure::new("io", e.to_string()),
            _ => Failure::new("parse", e.to_string()),
        }
    }
}

impl From<ExportError> for Failure {
    fn from(e: ExportError) -> Self {
        match e {
            ExportError::Io { .. } => Failure::new("io", e.to_string()),
            _ => Failure::new("parse", e.to_string()),
        }
    }
}

impl From<SampleError> for Failure {
    fn from(e: SampleError) -> Self {
        Failure::new("not-a-tree", e.to_string())
    }
}

impl From<BuildError> for Failure {
    fn from(e: BuildError) -> Self {
        let mut f = Failure::new(e.code(), e.to_string());
        match &e {
            BuildError::CycleDetected { accounts } => {
                f.accounts = accounts.iter().map(|a| a.to_string()).collect();
            }
            BuildError::Graph(GraphError::DuplicateCreation(a) | GraphError::SelfCreation(a)) => {
                f.accounts = vec![a.to_string()];
            }
            _ => {}
        }
        f
    }
}

type Res<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return report_failure(Failure::usage(e.to_string().trim_end())),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => report_failure(f),
    }
}

fn report_failure(f: Failure) -> ExitCode {
    eprintln!("{}", serde_json::to_string(&f).expect("failure serializes"));
    ExitCode::from(f.exit)
}

fn run(cli: Cli) -> Res<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::new("internal", e.to_string()))?;
    }
    let config = match &cli.config {
        Some(p) => Config::load(p).map_err(|m| Failure::new("config", m))?,
        None => Config::default(),
    };
    match cli.command {
        Command::Ingest {
            input,
            system_accounts,
            out,
            rejects,
        } => cmd_ingest(&config, &input, system_accounts.as_deref(), &out, rejects.as_deref()),
        Command::Build {
            events,
            activity,
            out,
            diagnostics,
        } => cmd_build(&config, &events, activity, &out, diagnostics.as_deref()),
        Command::Metrics { graph, format, out } => cmd_metrics(&graph, format, out.as_deref()),
        Command::Sample(args) => cmd_sample(&args),
        Command::Export { graph, format, out } => {
            let g = load_graph(&graph)?;
            let written = export(&g, format, &out)?;
            let files: Vec<String> = written.iter().map(|p| p.display().to_string()).collect();
            print_json(&json!({ "written": files }))
        }
        Command::Histogram { graph, out } => cmd_histogram(&graph, &out),
        Command::Report { events, out } => cmd_report(&config, &events, &out),
        Command::Synth {
            kind,
            seed,
            scale,
            out,
            truth,
        } => cmd_synth(kind, seed, scale, &out, truth),
    }
}

fn print_json<T: Serialize>(value: &T) -> Res<()> {
    let mut s = serde_json::to_string_pretty(value).expect("value serializes");
    s.push('\n');
    emit(None, &s)
}

/// Writes `text` to `path`, or stdout when absent.
fn emit(path: Option<&Path>, text: &str) -> Res<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(io_fail(p)),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(io_fail(Path::new("<stdout>")))
        }
    }
}

fn load_graph(path: &Path) -> Res<ActivityGraph> {
    let file = File::open(path).map_err(io_fail(path))?;
    ActivityGraph::read_json(BufReader::new(file))
        .map_err(|e| Failure::new("parse", format!("{}: {e}", path.display())))
}

fn save_graph(g: &ActivityGraph, path: &Path) -> Res<()> {
    let file = File::create(path).map_err(io_fail(path))?;
    g.write_json(BufWriter::new(file)).map_err(io_fail(path))
}

fn cmd_ingest(
    config: &Config,
    input: &Path,
    system_file: Option<&Path>,
    out: &Path,
    rejects: Option<&Path>,
) -> Res<()> {
    let system = match system_file {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(io_fail(p))?;
            SystemAccounts::parse_list(&text)
                .map_err(|e| Failure::new("parse", format!("{}: {e}", p.display())))?
        }
        None => config.system_accounts(),
    };
    let file = File::open(input).map_err(io_fail(input))?;
    let mut writer = EventStoreWriter::create(out)?;
    let mut reject_out = match rejects {
        Some(p) => Some(BufWriter::new(File::create(p).map_err(io_fail(p))?)),
        None => None,
    };
    let mut reject_err = None;
    let stats = ingest_reader(
        BufReader::with_capacity(1 << 20, file),
        &system,
        |e| writer.push(&e),
        |err| {
            if let Some(w) = reject_out.as_mut() {
                let line = json!({ "line": err.line, "reason": err.kind.reason(), "message": err.to_string() });
                if let Err(e) = writeln!(w, "{line}") {
                    reject_err.get_or_insert(e);
                }
            }
        },
    )
    .map_err(io_fail(input))?;
    if let Some(e) = reject_err {
        return Err(io_fail(rejects.expect("rejects set"))(e));
    }
    if let Some(mut w) = reject_out {
        w.flush().map_err(io_fail(rejects.expect("rejects set")))?;
    }
    writer.finish(&stats)?;
    emit(None, &stats.to_json())
}

fn load_events(dir: &Path, activity: Activity) -> Res<Vec<ActivityEvent>> {
    let events: Result<Vec<_>, _> = read_events(dir, activity)?.collect();
    Ok(events?)
}

fn cmd_build(
    config: &Config,
    events: &Path,
    activity: Activity,
    out: &Path,
    diagnostics: Option<&Path>,
) -> Res<()> {
    let (g, diag) = build_activity(activity, load_events(events, activity)?, &config.diagnostics())?;
    save_graph(&g, out)?;
    emit(diagnostics, &diag.to_json())
}

fn cmd_metrics(graph: &Path, format: MetricsFormat, out: Option<&Path>) -> Res<()> {
    let report = full_report(&load_graph(graph)?);
    let text = match format {
        MetricsFormat::Json => report.to_json(),
        MetricsFormat::Table => metrics_table(std::slice::from_ref(&report)),
    };
    emit(out, &text)
}

fn cmd_sample(args: &SampleArgs) -> Res<()> {
    let g = load_graph(&args.graph)?;
    let s = match (args.edges, args.ancestry) {
        (Some(n), None) => sample_edges(&g, n, args.seed),
        (None, Some(n)) => ancestry_subgraph(&g, n, args.seed)?,
        _ => return Err(Failure::usage("exactly one of --edges or --ancestry is required")),
    };
    save_graph(&s, &args.out)?;
    print_json(&json!({ "nodes": s.node_count(), "edges": s.edge_count(), "seed": args.seed }))
}

fn cmd_histogram(graph: &Path, out: &Path) -> Res<()> {
    let g = load_graph(graph)?;
    let views = degree_views(&g);
    fs::create_dir_all(out).map_err(io_fail(out))?;
    let mut fits = serde_json::Map::new();
    for (name, h) in [("total", &views.total), ("in", &views.in_degree), ("out", &views.out_degree)] {
        let fit = fit_power_law(h).ok();
        let path = out.join(format!("degree_{name}.csv"));
        fs::write(&path, histogram_csv(h, fit.as_ref())).map_err(io_fail(&path))?;
        fits.insert(name.to_owned(), serde_json::to_value(fit).expect("fit serializes"));
    }
    print_json(&fits)
}

fn cmd_report(config: &Config, events: &Path, out: &Path) -> Res<()> {
    let stats = read_stats(events)?;
    fs::create_dir_all(out).map_err(io_fail(out))?;
    let mut reports = Vec::new();
    for activity in Activity::ALL {
        let (g, diag) = match build_activity(activity, load_events(events, activity)?, &config.diagnostics()) {
            Ok(built) => built,
            // A cyclic creation graph still gets metrics; the violation is
            // recorded in place of diagnostics.
            Err(e @ BuildError::CycleDetected { .. }) => {
                let g = build_graph(load_events(events, activity)?, activity)
                    .map_err(BuildError::from)?;
                let path = out.join(format!("{}.diagnostics.json", activity.tag()));
                let f = Failure::from(e);
                fs::write(&path, serde_json::to_string_pretty(&f).expect("serializes") + "\n")
                    .map_err(io_fail(&path))?;
                save_graph(&g, &out.join(format!("{}.graph.json", activity.tag())))?;
                reports.push(full_report(&g));
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let tag = activity.tag();
        save_graph(&g, &out.join(format!("{tag}.graph.json")))?;
        let path = out.join(format!("{tag}.diagnostics.json"));
        fs::write(&path, diag.to_json()).map_err(io_fail(&path))?;
        reports.push(full_report(&g));
    }
    let actions = stats.action_table();
    let metrics = metrics_table(&reports);
    for (name, text) in [("actions.txt", &actions), ("metrics.txt", &metrics)] {
        let path = out.join(name);
        fs::write(&path, text).map_err(io_fail(&path))?;
    }
    let path = out.join("metrics.json");
    let mut json = serde_json::to_string_pretty(&reports).expect("reports serialize");
    json.push('\n');
    fs::write(&path, json).map_err(io_fail(&path))?;
    emit(None, &format!("Statistics of actions\n\n{actions}\nMetrics of graphs\n\n{metrics}"))
}

fn scaled(n: usize, scale: f64) -> usize {
    ((n as f64 * scale).round() as usize).max(1)
}

fn cmd_synth(kind: SynthKind, seed: u64, scale: f64, out: &Path, truth: Option<PathBuf>) -> Res<()> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Failure::usage("--scale must be positive"));
    }
    let truth = truth.unwrap_or_else(|| {
        let mut name = out.as_os_str().to_owned();
        name.push(".truth.json");
        PathBuf::from(name)
    });
    let mixes = synth::default_mixes();
    let written = match kind {
        SynthKind::Tree => synth::gen_creation_tree(scaled(10_000, scale), Attachment::Preferential, seed, mixes[0].1)
            .write_files(out, &truth),
        SynthKind::Votes => {
            let spec = VoteSpec {
                voters: scaled(5_000, scale),
                producers: scaled(100, scale.sqrt()),
                gangs: vec![18],
                ..VoteSpec::default()
            };
            synth::gen_vote_corpus(&spec, seed, mixes[1].1).write_files(out, &truth)
        }
        SynthKind::Transfers => {
            let spec = TransferSpec {
                communities: 5,
                community_size: scaled(2_000, scale),
                extra_transfers_per_community: scaled(6_000, scale),
                inter_community_transfers: scaled(500, scale),
                hubs: 3,
                hub_senders: scaled(300, scale),
                sham_cycle: Some(40),
                ..TransferSpec::default()
            };
            synth::gen_transfer_corpus(&spec, seed, mixes[2].1).write_files(out, &truth)
        }
        SynthKind::Auth => {
            let spec = AuthSpec {
                users: scaled(2_000, scale),
                contracts: scaled(50, scale.sqrt()),
                actions: scaled(20_000, scale),
                spam_share: Some(0.95),
                self_invokers: 10,
                ..AuthSpec::default()
            };
            synth::gen_auth_corpus(&spec, seed, mixes[3].1).write_files(out, &truth)
        }
        SynthKind::Mixed => {
            let d = MixedSpec::default();
            let spec = MixedSpec {
                accounts: scaled(d.accounts, scale),
                votes: VoteSpec {
                    voters: scaled(d.votes.voters, scale),
                    ..d.votes
                },
                transfers: TransferSpec {
                    community_size: scaled(d.transfers.community_size, scale),
                    extra_transfers_per_community: scaled(d.transfers.extra_transfers_per_community, scale),
                    inter_community_transfers: scaled(d.transfers.inter_community_transfers, scale),
                    ..d.transfers
                },
                auth: AuthSpec {
                    users: scaled(d.auth.users, scale),
                    actions: scaled(d.auth.actions, scale),
                    ..d.auth
                },
                noise_actions: scaled(d.noise_actions, scale),
            };
            let (records, t) = synth::gen_mixed_corpus(&spec, seed);
            write_records(out, &records).and_then(|_| {
                let mut s = serde_json::to_string_pretty(&t).expect("truth serializes");
                s.push('\n');
                fs::write(&truth, s)
            })
        }
    };
    written.map_err(io_fail(out))?;
    print_json(&json!({ "corpus": out.display().to_string(), "truth": truth.display().to_string() }))
}

fn write_records(path: &Path, records: &[eosgraph::ActionRecord]) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for r in records {
        w.write_all(r.to_json_line().as_bytes())?;
        w.write_all(b"\n")?;
    }
    w.flush()
}
