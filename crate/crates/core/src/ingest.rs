//! Activity classification and corpus ingestion.
//!
//! Each validated [`ActionRecord`] maps to zero or more [`ActivityEvent`]s.
//! Ingestion streams a JSON-lines corpus, tallies per-activity action and
//! event counts split by action kind, and never aborts on a bad line: every
//! failure is counted under its reason tag.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::account::AccountId;
use crate::amount::parse_quantity;
use crate::trace::{parse_record, ActionKind, ActionRecord, PayloadValue, RecordError, RecordErrorKind};

/// The four activity classes, each backing one graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Activity {
    #[serde(rename = "acg")]
    AccountCreation,
    #[serde(rename = "avg")]
    AccountVote,
    #[serde(rename = "mtg")]
    MoneyTransfer,
    #[serde(rename = "cag")]
    ContractAuthorization,
}

impl Activity {
    pub const ALL: [Activity; 4] = [
        Activity::AccountCreation,
        Activity::AccountVote,
        Activity::MoneyTransfer,
        Activity::ContractAuthorization,
    ];

    /// Short tag: `acg`, `avg`, `mtg` or `cag`.
    pub fn tag(self) -> &'static str {
        match self {
            Activity::AccountCreation => "acg",
            Activity::AccountVote => "avg",
            Activity::MoneyTransfer => "mtg",
            Activity::ContractAuthorization => "cag",
        }
    }

    /// Human-readable activity name.
    pub fn title(self) -> &'static str {
        match self {
            Activity::AccountCreation => "Account creation",
            Activity::AccountVote => "Account vote",
            Activity::MoneyTransfer => "Money transfer",
            Activity::ContractAuthorization => "Contract authorization",
        }
    }

    /// Whether event weights are token amounts rather than counts.
    pub fn is_amount_weighted(self) -> bool {
        self == Activity::MoneyTransfer
    }
}

impl fmt::Display for Activity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Activity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Activity::ALL
            .into_iter()
            .find(|a| a.tag() == s)
            .ok_or_else(|| format!("unknown activity {s:?} (expected acg, avg, mtg or cag)"))
    }
}

/// One edge contribution extracted from an action.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivityEvent {
    pub activity: Activity,
    pub source: AccountId,
    pub target: AccountId,
    /// 1 for count-weighted activities, 0.0001-EOS units for transfers.
    pub weight: u64,
    pub kind: ActionKind,
}

/// Accounts whose contracts are platform contracts. Actions on them are not
/// contract authorizations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemAccounts(BTreeSet<AccountId>);

pub const DEFAULT_SYSTEM_ACCOUNTS: [&str; 10] = [
    "eosio",
    "eosio.token",
    "eosio.msig",
    "eosio.ram",
    "eosio.ramfee",
    "eosio.stake",
    "eosio.names",
    "eosio.saving",
    "eosio.bpay",
    "eosio.vpay",
];

impl Default for SystemAccounts {
    fn default() -> Self {
        SystemAccounts(
            DEFAULT_SYSTEM_ACCOUNTS
                .iter()
                .map(|n| AccountId::new(n).expect("default system account is valid"))
                .collect(),
        )
    }
}

impl SystemAccounts {
    pub fn new(accounts: impl IntoIterator<Item = AccountId>) -> Self {
        SystemAccounts(accounts.into_iter().collect())
    }

    /// Parses an override list: one account per line, `#` comments and blank
    /// lines ignored.
    pub fn parse_list(text: &str) -> Result<Self, crate::account::AccountError> {
        let mut set = BTreeSet::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if !line.is_empty() {
                set.insert(AccountId::new(line)?);
            }
        }
        Ok(SystemAccounts(set))
    }

    pub fn contains(&self, account: &AccountId) -> bool {
        self.0.contains(account)
    }

    pub fn iter(&self) -> impl Iterator<Item = &AccountId> {
        self.0.iter()
    }
}

fn payload_text<'a>(
    record: &'a ActionRecord,
    field: &'static str,
) -> Result<&'a str, RecordErrorKind> {
    match record.payload.get(field) {
        Some(PayloadValue::Text(s)) => Ok(s),
        _ => Err(RecordErrorKind::MissingPayloadField(field)),
    }
}

fn payload_account(record: &ActionRecord, field: &'static str) -> Result<AccountId, RecordErrorKind> {
    Ok(AccountId::new(payload_text(record, field)?)?)
}

fn producers(record: &ActionRecord) -> Result<Vec<AccountId>, RecordErrorKind> {
    let names: Vec<&str> = match record.payload.get("producers") {
        Some(PayloadValue::List(list)) => list.iter().map(String::as_str).collect(),
        Some(PayloadValue::Text(s)) => s
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|p| !p.is_empty())
            .collect(),
        None => return Err(RecordErrorKind::MissingPayloadField("producers")),
    };
    names
        .into_iter()
        .map(|n| AccountId::new(n).map_err(Into::into))
        .collect()
}

/// Maps one record to its activity events; an empty list means the record
/// belongs to no activity.
pub fn classify(
    record: &ActionRecord,
    system: &SystemAccounts,
) -> Result<Vec<ActivityEvent>, RecordErrorKind> {
    let mut events = Vec::new();
    let event = |activity, source, target, weight| ActivityEvent {
        activity,
        source,
        target,
        weight,
        kind: record.kind,
    };
    match (record.contract.as_str(), record.action_name.as_str()) {
        ("eosio", "newaccount") => {
            let creator = payload_account(record, "creator")?;
            let name = payload_account(record, "name")?;
            events.push(event(Activity::AccountCreation, creator, name, 1));
        }
        ("eosio", "voteproducer") => {
            let voter = payload_account(record, "voter")?;
            for producer in producers(record)? {
                events.push(event(Activity::AccountVote, voter.clone(), producer, 1));
            }
        }
        ("eosio.token", "transfer") => {
            let from = payload_account(record, "from")?;
            let to = payload_account(record, "to")?;
            let units = parse_quantity(payload_text(record, "quantity")?)?;
            events.push(event(Activity::MoneyTransfer, from, to, units));
        }
        _ => {}
    }
    if !system.contains(&record.contract) {
        events.push(event(
            Activity::ContractAuthorization,
            record.authorizer.clone(),
            record.contract.clone(),
            1,
        ));
    }
    Ok(events)
}

/// Counts split by action kind.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KindCounts {
    pub calling: u64,
    pub inline: u64,
    pub deferred: u64,
}

impl KindCounts {
    pub fn add(&mut self, kind: ActionKind, n: u64) {
        match kind {
            ActionKind::Calling => self.calling += n,
            ActionKind::Inline => self.inline += n,
            ActionKind::Deferred => self.deferred += n,
        }
    }

    pub fn get(&self, kind: ActionKind) -> u64 {
        match kind {
            ActionKind::Calling => self.calling,
            ActionKind::Inline => self.inline,
            ActionKind::Deferred => self.deferred,
        }
    }

    pub fn total(&self) -> u64 {
        self.calling + self.inline + self.deferred
    }

    fn merge(&mut self, other: &KindCounts) {
        self.calling += other.calling;
        self.inline += other.inline;
        self.deferred += other.deferred;
    }
}

/// Per-activity tallies. `actions` counts records, `events` counts edge
/// contributions (a vote for three producers is one action, three events).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActivityCounts {
    pub actions: KindCounts,
    pub events: KindCounts,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PerActivity {
    pub acg: ActivityCounts,
    pub avg: ActivityCounts,
    pub mtg: ActivityCounts,
    pub cag: ActivityCounts,
}

impl PerActivity {
    pub fn get(&self, activity: Activity) -> &ActivityCounts {
        match activity {
            Activity::AccountCreation => &self.acg,
            Activity::AccountVote => &self.avg,
            Activity::MoneyTransfer => &self.mtg,
            Activity::ContractAuthorization => &self.cag,
        }
    }

    pub fn get_mut(&mut self, activity: Activity) -> &mut ActivityCounts {
        match activity {
            Activity::AccountCreation => &mut self.acg,
            Activity::AccountVote => &mut self.avg,
            Activity::MoneyTransfer => &mut self.mtg,
            Activity::ContractAuthorization => &mut self.cag,
        }
    }
}

/// Ingestion statistics. Every non-blank input line is exactly one of
/// classified, unclassified or erroneous.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestStats {
    pub records_read: u64,
    pub classified: u64,
    pub unclassified: u64,
    pub erroneous: u64,
    pub activities: PerActivity,
    /// Erroneous lines by reason tag.
    pub errors: BTreeMap<String, u64>,
}

impl IngestStats {
    /// Folds one record's classification outcome into the tallies.
    pub fn record(&mut self, kind: ActionKind, events: &[ActivityEvent]) {
        self.records_read += 1;
        if events.is_empty() {
            self.unclassified += 1;
            return;
        }
        self.classified += 1;
        for activity in Activity::ALL {
            let n = events.iter().filter(|e| e.activity == activity).count() as u64;
            if n > 0 {
                let counts = self.activities.get_mut(activity);
                counts.actions.add(kind, 1);
                counts.events.add(kind, n);
            }
        }
    }

    pub fn record_error(&mut self, kind: &RecordErrorKind) {
        self.records_read += 1;
        self.erroneous += 1;
        *self.errors.entry(kind.reason().to_owned()).or_default() += 1;
    }

    /// Associative merge of two partial tallies.
    pub fn merge(&mut self, other: &IngestStats) {
        self.records_read += other.records_read;
        self.classified += other.classified;
        self.unclassified += other.unclassified;
        self.erroneous += other.erroneous;
        for activity in Activity::ALL {
            let mine = self.activities.get_mut(activity);
            let theirs = other.activities.get(activity);
            mine.actions.merge(&theirs.actions);
            mine.events.merge(&theirs.events);
        }
        for (reason, n) in &other.errors {
            *self.errors.entry(reason.clone()).or_default() += n;
        }
    }

    pub fn event_count(&self, activity: Activity) -> u64 {
        self.activities.get(activity).events.total()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("stats serialize");
        s.push('\n');
        s
    }

    /// Action counts by kind with their share of the activity's actions.
    pub fn action_table(&self) -> String {
        let cell = |n: u64, total: u64| {
            let share = if total == 0 {
                "/".to_owned()
            } else {
                format!("{:.3}%", 100.0 * n as f64 / total as f64)
            };
            format!("{} ({share})", crate::metrics::group_thousands(n as u128))
        };
        let rows: Vec<Vec<String>> = Activity::ALL
            .iter()
            .map(|&a| {
                let c = self.activities.get(a).actions;
                let total = c.total();
                vec![
                    a.title().to_owned(),
                    cell(c.calling, total),
                    cell(c.inline, total),
                    cell(c.deferred, total),
                ]
            })
            .collect();
        crate::metrics::aligned_table(
            &[
                "Activity",
                "Calling action (proportion)",
                "Inline action (proportion)",
                "Deferred action (proportion)",
            ],
            &rows,
        )
    }
}

/// Lines handed to the parallel parser per batch.
const BATCH_LINES: usize = 1 << 14;

enum Outcome {
    Events(CompactKey, ActionKind, Vec<ActivityEvent>),
    /// Parsed, so the key is claimed, but classification failed.
    Rejected(CompactKey, RecordError),
    Unparsed(RecordError),
}

fn parse_and_classify(line: &str, line_no: u64, system: &SystemAccounts) -> Outcome {
    let record = match parse_record(line, line_no) {
        Ok(r) => r,
        Err(e) => return Outcome::Unparsed(e),
    };
    let key = compact_key(&record);
    match classify(&record, system) {
        Ok(events) => Outcome::Events(key, record.kind, events),
        Err(kind) => Outcome::Rejected(
            key,
            RecordError {
                line: line_no,
                kind,
            },
        ),
    }
}

/// Compact duplicate-detection key.
type CompactKey = (u64, [u8; 32], u32);

fn compact_key(record: &ActionRecord) -> CompactKey {
    let mut tx = [0u8; 32];
    let hex = record.tx_id.as_bytes();
    for (i, byte) in tx.iter_mut().enumerate() {
        let hi = (hex[2 * i] as char).to_digit(16).unwrap_or(0) as u8;
        let lo = (hex[2 * i + 1] as char).to_digit(16).unwrap_or(0) as u8;
        *byte = (hi << 4) | lo;
    }
    (record.block_num, tx, record.action_index)
}

/// Streams a JSON-lines corpus, handing events to `sink` in file order.
///
/// Lines are parsed in parallel batches; duplicate-key detection and the
/// sink run sequentially, so output order and stats match a serial pass.
/// Blank lines are ignored. `on_error` sees every per-line error.
pub fn ingest_reader<R, F, E>(
    reader: R,
    system: &SystemAccounts,
    mut sink: F,
    mut on_error: E,
) -> io::Result<IngestStats>
where
    R: BufRead,
    F: FnMut(ActivityEvent) -> io::Result<()>,
    E: FnMut(&RecordError),
{
    let mut stats = IngestStats::default();
    let mut seen: HashSet<CompactKey> = HashSet::new();
    let mut lines = reader.lines();
    let mut line_no: u64 = 0;
    let mut batch: Vec<(u64, String)> = Vec::with_capacity(BATCH_LINES);
    loop {
        batch.clear();
        for line in lines.by_ref() {
            line_no += 1;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            batch.push((line_no, line));
            if batch.len() == BATCH_LINES {
                break;
            }
        }
        if batch.is_empty() {
            break;
        }
        let results: Vec<Outcome> = batch
            .par_iter()
            .map(|(n, line)| parse_and_classify(line, *n, system))
            .collect();
        for (result, (n, _)) in results.into_iter().zip(&batch) {
            let err = match result {
                Outcome::Events(key, kind, events) => {
                    if seen.insert(key) {
                        stats.record(kind, &events);
                        for event in events {
                            sink(event)?;
                        }
                        continue;
                    }
                    RecordError {
                        line: *n,
                        kind: RecordErrorKind::DuplicateKey,
                    }
                }
                Outcome::Rejected(key, err) => {
                    if seen.insert(key) {
                        err
                    } else {
                        RecordError {
                            line: *n,
                            kind: RecordErrorKind::DuplicateKey,
                        }
                    }
                }
                Outcome::Unparsed(err) => err,
            };
            stats.record_error(&err.kind);
            on_error(&err);
        }
    }
    Ok(stats)
}

/// Reads a corpus file into memory: events in file order plus stats.
pub fn ingest_corpus(
    path: &Path,
    system: &SystemAccounts,
) -> io::Result<(Vec<ActivityEvent>, IngestStats)> {
    let file = File::open(path)?;
    let mut events = Vec::new();
    let stats = ingest_reader(
        BufReader::new(file),
        system,
        |e| {
            events.push(e);
            Ok(())
        },
        |_| {},
    )?;
    Ok((events, stats))
}

/// Classifies in-memory records with the same policy as [`ingest_reader`].
pub fn ingest_records<'a>(
    records: impl IntoIterator<Item = &'a ActionRecord>,
    system: &SystemAccounts,
) -> (Vec<ActivityEvent>, IngestStats) {
    let mut stats = IngestStats::default();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for record in records {
        if !seen.insert(compact_key(record)) {
            stats.record_error(&RecordErrorKind::DuplicateKey);
            continue;
        }
        match classify(record, system) {
            Ok(events) => {
                stats.record(record.kind, &events);
                out.extend(events);
            }
            Err(kind) => stats.record_error(&kind),
        }
    }
    (out, stats)
}
