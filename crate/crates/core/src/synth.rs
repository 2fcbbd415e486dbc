//! Synthetic action-trace corpora with recorded ground truth.
//!
//! Generators plan actions over a compact account table and render
//! [`ActionRecord`]s lazily, so large corpora can be streamed to disk or
//! straight into a graph builder. Each corpus carries a serializable ground
//! truth describing what was planted. All generators are deterministic for a
//! given seed.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::account::AccountId;
use crate::amount::format_fixed;
use crate::graph::{ActivityGraph, Edge, GraphError, NodeId};
use crate::ingest::{classify, Activity, ActivityCounts, ActivityEvent, SystemAccounts};
use crate::trace::{ActionKind, ActionRecord, Payload, PayloadValue};

const NAME_ALPHABET: &[u8; 26] = b"abcdefghijklmnopqrstuvwxyz";

/// `prefix` followed by `i` in fixed-width base 26 over `a-z`. Names with
/// the same prefix and width sort in index order.
pub fn index_name(prefix: &str, i: u64, width: usize) -> AccountId {
    let mut digits = vec![b'a'; width];
    let mut rest = i;
    for d in digits.iter_mut().rev() {
        *d = NAME_ALPHABET[(rest % 26) as usize];
        rest /= 26;
    }
    assert_eq!(rest, 0, "index {i} does not fit in {width} base-26 digits");
    let name = format!("{prefix}{}", std::str::from_utf8(&digits).expect("ascii"));
    AccountId::new(&name).expect("generated names are valid")
}

/// Graph on nodes `0..n` (named in index order) with unit-weight edges;
/// repeated pairs aggregate. Isolated nodes are kept.
pub fn indexed_graph(
    activity: Activity,
    n: usize,
    edges: &[(u32, u32)],
) -> Result<ActivityGraph, GraphError> {
    let accounts = (0..n as u64).map(|i| index_name("n", i, 6)).collect();
    let mut agg: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    for &(s, d) in edges {
        *agg.entry((s, d)).or_insert(0) += 1;
    }
    let edges = agg
        .into_iter()
        .map(|((s, d), m)| Edge {
            src: NodeId(s),
            dst: NodeId(d),
            weight: m as u128,
            multiplicity: m,
        })
        .collect();
    ActivityGraph::from_parts(activity, accounts, edges)
}

/// Probabilities of inline and deferred actions; the rest are calling
/// actions.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct KindMix {
    pub inline: f64,
    pub deferred: f64,
}

impl KindMix {
    pub fn calling_only() -> Self {
        KindMix::default()
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> ActionKind {
        if self.inline == 0.0 && self.deferred == 0.0 {
            return ActionKind::Calling;
        }
        let x: f64 = rng.gen();
        if x < self.inline {
            ActionKind::Inline
        } else if x < self.inline + self.deferred {
            ActionKind::Deferred
        } else {
            ActionKind::Calling
        }
    }
}

/// One planned action over account-table indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Planned {
    NewAccount { creator: u32, name: u32 },
    Vote { voter: u32, producers: Vec<u32> },
    Transfer { from: u32, to: u32, units: u64 },
    Invoke { authorizer: u32, contract: u32, action: &'static str },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlannedAction {
    pub planned: Planned,
    pub kind: ActionKind,
}

/// A generated corpus: account table, planned actions and ground truth.
#[derive(Debug, Clone)]
pub struct Corpus<T> {
    pub accounts: Vec<AccountId>,
    pub actions: Vec<PlannedAction>,
    pub truth: T,
    /// Mixed into transaction ids so that corpora can be concatenated
    /// without key collisions.
    pub salt: u64,
}

impl<T: Serialize> Corpus<T> {
    fn record(&self, i: usize) -> ActionRecord {
        let action = &self.actions[i];
        let acct = |idx: u32| self.accounts[idx as usize].clone();
        let text = |idx: u32| PayloadValue::Text(self.accounts[idx as usize].to_string());
        let mut payload = Payload::new();
        let (contract, name, authorizer) = match &action.planned {
            Planned::NewAccount { creator, name } => {
                payload.insert("creator".into(), text(*creator));
                payload.insert("name".into(), text(*name));
                (system("eosio"), "newaccount", acct(*creator))
            }
            Planned::Vote { voter, producers } => {
                payload.insert("voter".into(), text(*voter));
                payload.insert("proxy".into(), PayloadValue::Text(String::new()));
                payload.insert(
                    "producers".into(),
                    PayloadValue::List(
                        producers
                            .iter()
                            .map(|p| self.accounts[*p as usize].to_string())
                            .collect(),
                    ),
                );
                (system("eosio"), "voteproducer", acct(*voter))
            }
            Planned::Transfer { from, to, units } => {
                payload.insert("from".into(), text(*from));
                payload.insert("to".into(), text(*to));
                payload.insert(
                    "quantity".into(),
                    PayloadValue::Text(format!("{} EOS", format_fixed(*units as u128))),
                );
                payload.insert("memo".into(), PayloadValue::Text(String::new()));
                (system("eosio.token"), "transfer", acct(*from))
            }
            Planned::Invoke {
                authorizer,
                contract,
                action,
            } => (acct(*contract), *action, acct(*authorizer)),
        };
        ActionRecord {
            block_num: i as u64 / 64 + 1,
            tx_id: format!("{:016x}{:048x}", self.salt, i),
            action_index: 0,
            kind: action.kind,
            contract,
            action_name: name.to_owned(),
            authorizer,
            payload,
        }
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    /// Renders the action records in order.
    pub fn records(&self) -> impl Iterator<Item = ActionRecord> + '_ {
        (0..self.actions.len()).map(move |i| self.record(i))
    }

    /// Events under the default system-account set, in record order.
    pub fn events(&self) -> impl Iterator<Item = ActivityEvent> + '_ {
        let system = SystemAccounts::default();
        self.records()
            .flat_map(move |r| classify(&r, &system).expect("generated records classify"))
    }

    /// Writes the corpus as JSON lines.
    pub fn write_jsonl<W: Write>(&self, out: W) -> io::Result<()> {
        let mut out = BufWriter::new(out);
        for record in self.records() {
            serde_json::to_writer(&mut out, &record)?;
            out.write_all(b"\n")?;
        }
        out.flush()
    }

    pub fn to_jsonl(&self) -> String {
        let mut buf = Vec::new();
        self.write_jsonl(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("json is utf-8")
    }

    pub fn truth_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.truth).expect("truth serializes");
        s.push('\n');
        s
    }

    /// Writes `corpus` and its ground-truth sidecar.
    pub fn write_files(&self, corpus: &Path, truth: &Path) -> io::Result<()> {
        self.write_jsonl(File::create(corpus)?)?;
        std::fs::write(truth, self.truth_json())
    }
}

fn system(name: &str) -> AccountId {
    AccountId::new(name).expect("system account name is valid")
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Accumulates per-kind action and event tallies for the ground truth.
fn tally(counts: &mut ActivityCounts, kind: ActionKind, events: u64) {
    counts.actions.add(kind, 1);
    counts.events.add(kind, events);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Attachment {
    /// Parent drawn uniformly from existing accounts.
    Uniform,
    /// Parent drawn with probability proportional to its number of created
    /// accounts plus one.
    Preferential,
}

impl Attachment {
    /// Exponent of the out-degree distribution tail, where one exists.
    /// Attachment proportional to `out_degree + 1` with one edge per new
    /// node gives `P(k) ~ k^-3`; uniform attachment has a geometric tail.
    pub fn theoretical_out_exponent(self) -> Option<f64> {
        match self {
            Attachment::Preferential => Some(-3.0),
            Attachment::Uniform => None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CreationTruth {
    pub root: AccountId,
    pub attachment: Attachment,
    /// Child to parent.
    pub parents: BTreeMap<AccountId, AccountId>,
    pub counts: ActivityCounts,
}

pub const CREATION_ROOT: &str = "eosio";

/// A creation tree of `n` accounts rooted at `eosio`: `n - 1` `newaccount`
/// actions.
pub fn gen_creation_tree(
    n: usize,
    attachment: Attachment,
    seed: u64,
    mix: KindMix,
) -> Corpus<CreationTruth> {
    assert!(n >= 1, "a creation tree has at least the root");
    let mut r = rng(seed);
    let width = digits_for(n as u64);
    let mut accounts = Vec::with_capacity(n);
    accounts.push(system(CREATION_ROOT));
    accounts.extend((1..n as u64).map(|i| index_name("u", i, width)));
    // Each node appears once per created child plus once for itself.
    let mut pool: Vec<u32> = vec![0];
    let mut actions = Vec::with_capacity(n.saturating_sub(1));
    let mut parents = BTreeMap::new();
    let mut counts = ActivityCounts::default();
    for child in 1..n as u32 {
        let parent = match attachment {
            Attachment::Uniform => r.gen_range(0..child),
            Attachment::Preferential => {
                let p = pool[r.gen_range(0..pool.len())];
                pool.push(p);
                pool.push(child);
                p
            }
        };
        let kind = mix.draw(&mut r);
        tally(&mut counts, kind, 1);
        parents.insert(accounts[child as usize].clone(), accounts[parent as usize].clone());
        actions.push(PlannedAction {
            planned: Planned::NewAccount {
                creator: parent,
                name: child,
            },
            kind,
        });
    }
    Corpus {
        truth: CreationTruth {
            root: accounts[0].clone(),
            attachment,
            parents,
            counts,
        },
        accounts,
        actions,
        salt: 0xac00_0000_0000_0000 ^ seed,
    }
}

/// Base-26 digits needed to name `n` accounts.
fn digits_for(n: u64) -> usize {
    let mut width = 1;
    let mut cap = 26u64;
    while cap < n {
        width += 1;
        cap = cap.saturating_mul(26);
    }
    width
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VoteSpec {
    pub voters: usize,
    pub producers: usize,
    /// Producers per ordinary vote, at most 30.
    pub max_producers_per_vote: usize,
    /// Probability that a voter casts the same vote once more (applied
    /// repeatedly).
    pub repeat_probability: f64,
    /// Sizes of planted gangs whose members all vote for each other.
    pub gangs: Vec<usize>,
    /// Number of voters that also vote for themselves.
    pub self_voters: usize,
}

impl Default for VoteSpec {
    fn default() -> Self {
        VoteSpec {
            voters: 2000,
            producers: 60,
            max_producers_per_vote: 10,
            repeat_probability: 0.2,
            gangs: Vec::new(),
            self_voters: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VoteTruth {
    /// Members of each planted gang, sorted.
    pub gangs: Vec<Vec<AccountId>>,
    pub self_voters: Vec<AccountId>,
    pub counts: ActivityCounts,
}

/// Maximum producers in one `voteproducer` action.
pub const MAX_PRODUCERS_PER_ACTION: usize = 30;

/// Random votes from ordinary voters to producers plus planted gangs.
/// Producers never vote, so the only cycles are the planted gangs.
pub fn gen_vote_corpus(spec: &VoteSpec, seed: u64, mix: KindMix) -> Corpus<VoteTruth> {
    assert!(spec.producers >= 1, "votes need producers");
    assert!(spec.self_voters <= spec.voters, "self-voters are voters");
    let mut r = rng(seed);
    let mut accounts = Vec::new();
    let voter_base = accounts.len() as u32;
    let w = digits_for(spec.voters as u64);
    accounts.extend((0..spec.voters as u64).map(|i| index_name("v", i, w)));
    let producer_base = accounts.len() as u32;
    let w = digits_for(spec.producers as u64);
    accounts.extend((0..spec.producers as u64).map(|i| index_name("p", i, w)));

    let mut actions = Vec::new();
    let mut counts = ActivityCounts::default();
    let mut push = |actions: &mut Vec<PlannedAction>, r: &mut ChaCha8Rng, voter: u32, producers: Vec<u32>| {
        let kind = mix.draw(r);
        tally(&mut counts, kind, producers.len() as u64);
        actions.push(PlannedAction {
            planned: Planned::Vote { voter, producers },
            kind,
        });
    };

    let per_vote = spec
        .max_producers_per_vote
        .clamp(1, MAX_PRODUCERS_PER_ACTION)
        .min(spec.producers);
    for v in 0..spec.voters as u32 {
        let k = r.gen_range(1..=per_vote);
        let mut chosen: Vec<u32> = index::sample(&mut r, spec.producers, k)
            .into_iter()
            .map(|p| producer_base + p as u32)
            .collect();
        chosen.sort_unstable();
        let voter = voter_base + v;
        push(&mut actions, &mut r, voter, chosen.clone());
        while r.gen_bool(spec.repeat_probability.clamp(0.0, 0.95)) {
            push(&mut actions, &mut r, voter, chosen.clone());
        }
    }

    let mut self_voters = Vec::new();
    for v in 0..spec.self_voters as u32 {
        let voter = voter_base + v;
        self_voters.push(accounts[voter as usize].clone());
        push(&mut actions, &mut r, voter, vec![voter]);
    }

    let mut gangs = Vec::new();
    for (g, &size) in spec.gangs.iter().enumerate() {
        let base = accounts.len() as u32;
        let w = digits_for(size as u64);
        accounts.extend((0..size as u64).map(|i| index_name(&format!("g{}", gang_tag(g)), i, w)));
        let members: Vec<u32> = (base..base + size as u32).collect();
        for &m in &members {
            let others: Vec<u32> = members.iter().copied().filter(|&o| o != m).collect();
            for chunk in others.chunks(MAX_PRODUCERS_PER_ACTION) {
                push(&mut actions, &mut r, m, chunk.to_vec());
            }
        }
        let mut names: Vec<AccountId> = members.iter().map(|&m| accounts[m as usize].clone()).collect();
        names.sort();
        gangs.push(names);
    }

    Corpus {
        truth: VoteTruth {
            gangs,
            self_voters,
            counts,
        },
        accounts,
        actions,
        salt: 0xa700_0000_0000_0000 ^ seed,
    }
}

/// Letter tag for the `i`-th planted group.
fn gang_tag(i: usize) -> String {
    index_name("", i as u64, digits_for(i as u64 + 1)).to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransferSpec {
    pub communities: usize,
    pub community_size: usize,
    /// Transfers inside each community beyond its spanning tree.
    pub extra_transfers_per_community: usize,
    /// Transfers between members of different communities.
    pub inter_community_transfers: usize,
    /// Hub accounts, one per community round-robin.
    pub hubs: usize,
    /// Distinct senders paying each hub.
    pub hub_senders: usize,
    /// Length of a planted value loop on fresh accounts, if any.
    pub sham_cycle: Option<usize>,
    /// Amounts are uniform in `1..=max_units` (0.0001 EOS units).
    pub max_units: u64,
}

impl Default for TransferSpec {
    fn default() -> Self {
        TransferSpec {
            communities: 3,
            community_size: 200,
            extra_transfers_per_community: 600,
            inter_community_transfers: 0,
            hubs: 0,
            hub_senders: 0,
            sham_cycle: None,
            max_units: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TransferTruth {
    pub communities: Vec<Vec<AccountId>>,
    pub hubs: Vec<AccountId>,
    pub sham_cycle: Vec<AccountId>,
    pub transfers: u64,
    /// Exact sum of all generated amounts in 0.0001 EOS units.
    pub total_units: u128,
    pub counts: ActivityCounts,
}

/// Community-structured transfers. Inside a community every new member
/// first trades with an earlier member picked preferentially, which keeps the
/// community connected and heavy-tailed; extra transfers pick preferential
/// receivers.
pub fn gen_transfer_corpus(spec: &TransferSpec, seed: u64, mix: KindMix) -> Corpus<TransferTruth> {
    let mut r = rng(seed);
    let mut accounts: Vec<AccountId> = Vec::new();
    let mut actions = Vec::new();
    let mut counts = ActivityCounts::default();
    let mut total_units: u128 = 0;
    let mut push = |actions: &mut Vec<PlannedAction>, r: &mut ChaCha8Rng, from: u32, to: u32| {
        let units = r.gen_range(1..=spec.max_units.max(1));
        let kind = mix.draw(r);
        tally(&mut counts, kind, 1);
        total_units += units as u128;
        actions.push(PlannedAction {
            planned: Planned::Transfer { from, to, units },
            kind,
        });
    };

    let total_members = spec.communities * spec.community_size;
    let w = digits_for(total_members as u64);
    accounts.extend((0..total_members as u64).map(|i| index_name("m", i, w)));
    let member = |c: usize, i: usize| (c * spec.community_size + i) as u32;

    let mut communities = Vec::new();
    for c in 0..spec.communities {
        let mut pool: Vec<u32> = Vec::new();
        if spec.community_size > 0 {
            pool.push(member(c, 0));
        }
        for i in 1..spec.community_size {
            let other = pool[r.gen_range(0..pool.len())];
            let me = member(c, i);
            if r.gen_bool(0.5) {
                push(&mut actions, &mut r, me, other);
            } else {
                push(&mut actions, &mut r, other, me);
            }
            pool.push(other);
            pool.push(me);
        }
        if spec.community_size >= 2 {
            for _ in 0..spec.extra_transfers_per_community {
                let from = member(c, r.gen_range(0..spec.community_size));
                let to = pool[r.gen_range(0..pool.len())];
                if from == to {
                    continue;
                }
                push(&mut actions, &mut r, from, to);
                pool.push(to);
            }
        }
        communities.push((0..spec.community_size).map(|i| accounts[member(c, i) as usize].clone()).collect());
    }

    if spec.communities >= 2 && spec.community_size > 0 {
        for _ in 0..spec.inter_community_transfers {
            let a = r.gen_range(0..spec.communities);
            let mut b = r.gen_range(0..spec.communities - 1);
            if b >= a {
                b += 1;
            }
            let from = member(a, r.gen_range(0..spec.community_size));
            let to = member(b, r.gen_range(0..spec.community_size));
            push(&mut actions, &mut r, from, to);
        }
    }

    let mut hubs = Vec::new();
    if spec.communities > 0 && spec.community_size > 0 {
        let w = digits_for(spec.hubs as u64);
        for h in 0..spec.hubs {
            let hub = accounts.len() as u32;
            accounts.push(index_name("h", h as u64, w));
            hubs.push(accounts[hub as usize].clone());
            let c = h % spec.communities;
            let senders = spec.hub_senders.min(spec.community_size);
            for s in index::sample(&mut r, spec.community_size, senders).into_vec() {
                push(&mut actions, &mut r, member(c, s), hub);
            }
        }
    }

    let mut sham_cycle = Vec::new();
    if let Some(len) = spec.sham_cycle.filter(|&l| l >= 2) {
        let base = accounts.len() as u32;
        let w = digits_for(len as u64);
        accounts.extend((0..len as u64).map(|i| index_name("s", i, w)));
        for i in 0..len as u32 {
            push(&mut actions, &mut r, base + i, base + (i + 1) % len as u32);
        }
        // Funding enters the loop from outside; nothing leaves it.
        if total_members > 0 {
            push(&mut actions, &mut r, member(0, 0), base);
        }
        sham_cycle = accounts[base as usize..].to_vec();
    }

    let transfers = actions.len() as u64;
    Corpus {
        truth: TransferTruth {
            communities,
            hubs,
            sham_cycle,
            transfers,
            total_units,
            counts,
        },
        accounts,
        actions,
        salt: 0x3700_0000_0000_0000 ^ seed,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuthSpec {
    pub users: usize,
    pub contracts: usize,
    /// Ordinary user-to-contract invocations.
    pub actions: usize,
    /// Pick contracts uniformly instead of with a popularity skew.
    pub uniform: bool,
    /// Incident-weight share planted on one self-invoking spam account.
    pub spam_share: Option<f64>,
    /// Accounts that only ever invoke their own contract.
    pub self_invokers: usize,
}

impl Default for AuthSpec {
    fn default() -> Self {
        AuthSpec {
            users: 1000,
            contracts: 50,
            actions: 5000,
            uniform: false,
            spam_share: None,
            self_invokers: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AuthTruth {
    pub spam_account: Option<AccountId>,
    pub spam_actions: u64,
    pub self_invokers: Vec<AccountId>,
    pub total_actions: u64,
    pub counts: ActivityCounts,
}

pub const SPAM_ACCOUNT: &str = "spamtweeter";
const CONTRACT_ACTIONS: [&str; 4] = ["play", "bet", "claim", "tweet"];

/// Contract invocations from users, with an optional dominant spam account
/// that floods its own contract.
pub fn gen_auth_corpus(spec: &AuthSpec, seed: u64, mix: KindMix) -> Corpus<AuthTruth> {
    assert!(spec.users >= 1 && spec.contracts >= 1, "need users and contracts");
    let mut r = rng(seed);
    let mut accounts = Vec::new();
    let w = digits_for(spec.users as u64);
    accounts.extend((0..spec.users as u64).map(|i| index_name("usr", i, w)));
    let contract_base = accounts.len() as u32;
    let w = digits_for(spec.contracts as u64);
    accounts.extend((0..spec.contracts as u64).map(|i| index_name("dapp", i, w)));

    let mut actions = Vec::new();
    let mut counts = ActivityCounts::default();
    let mut push = |actions: &mut Vec<PlannedAction>, r: &mut ChaCha8Rng, authorizer: u32, contract: u32| {
        let kind = mix.draw(r);
        tally(&mut counts, kind, 1);
        let action = CONTRACT_ACTIONS[r.gen_range(0..CONTRACT_ACTIONS.len())];
        actions.push(PlannedAction {
            planned: Planned::Invoke {
                authorizer,
                contract,
                action,
            },
            kind,
        });
    };

    for _ in 0..spec.actions {
        let user = r.gen_range(0..spec.users as u32);
        let pick = if spec.uniform {
            r.gen_range(0..spec.contracts)
        } else {
            // Squared uniform skews towards low indices.
            let u: f64 = r.gen();
            ((u * u) * spec.contracts as f64) as usize
        };
        push(&mut actions, &mut r, user, contract_base + pick.min(spec.contracts - 1) as u32);
    }

    let mut self_invokers = Vec::new();
    let w = digits_for(spec.self_invokers as u64);
    for i in 0..spec.self_invokers {
        let me = accounts.len() as u32;
        accounts.push(index_name("own", i as u64, w));
        self_invokers.push(accounts[me as usize].clone());
        for _ in 0..r.gen_range(1..=5) {
            push(&mut actions, &mut r, me, me);
        }
    }

    let mut spam_account = None;
    let mut spam_actions = 0u64;
    if let Some(share) = spec.spam_share.filter(|s| *s > 0.0 && *s < 1.0) {
        let others = actions.len() as f64;
        spam_actions = (share * others / (1.0 - share)).ceil() as u64;
        let spam = accounts.len() as u32;
        accounts.push(system(SPAM_ACCOUNT));
        spam_account = Some(accounts[spam as usize].clone());
        for _ in 0..spam_actions {
            push(&mut actions, &mut r, spam, spam);
        }
    }

    let total_actions = actions.len() as u64;
    Corpus {
        truth: AuthTruth {
            spam_account,
            spam_actions,
            self_invokers,
            total_actions,
            counts,
        },
        accounts,
        actions,
        salt: 0xca00_0000_0000_0000 ^ seed,
    }
}

/// Ground truth for a corpus mixing all four activities.
#[derive(Debug, Clone, Serialize)]
pub struct MixedTruth {
    pub acg: ActivityCounts,
    pub avg: ActivityCounts,
    pub mtg: ActivityCounts,
    pub cag: ActivityCounts,
    /// Records that belong to no activity.
    pub unclassified: u64,
    pub records: u64,
}

impl MixedTruth {
    pub fn get(&self, activity: Activity) -> &ActivityCounts {
        match activity {
            Activity::AccountCreation => &self.acg,
            Activity::AccountVote => &self.avg,
            Activity::MoneyTransfer => &self.mtg,
            Activity::ContractAuthorization => &self.cag,
        }
    }
}

/// Size knobs for [`gen_mixed_corpus`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixedSpec {
    pub accounts: usize,
    pub votes: VoteSpec,
    pub transfers: TransferSpec,
    pub auth: AuthSpec,
    /// System actions that match no activity (e.g. `buyram`).
    pub noise_actions: usize,
}

impl Default for MixedSpec {
    fn default() -> Self {
        MixedSpec {
            accounts: 2000,
            votes: VoteSpec {
                voters: 500,
                producers: 30,
                gangs: vec![4],
                ..VoteSpec::default()
            },
            transfers: TransferSpec {
                communities: 4,
                community_size: 150,
                extra_transfers_per_community: 400,
                inter_community_transfers: 200,
                hubs: 2,
                hub_senders: 60,
                sham_cycle: Some(12),
                ..TransferSpec::default()
            },
            auth: AuthSpec {
                users: 400,
                contracts: 20,
                actions: 3000,
                spam_share: None,
                self_invokers: 5,
                ..AuthSpec::default()
            },
            noise_actions: 100,
        }
    }
}

/// Kind mixes used by [`gen_mixed_corpus`], chosen to echo the typical
/// calling/inline split of each activity.
pub fn default_mixes() -> [(Activity, KindMix); 4] {
    [
        (Activity::AccountCreation, KindMix { inline: 0.01, deferred: 0.0 }),
        (Activity::AccountVote, KindMix { inline: 0.001, deferred: 0.0 }),
        (Activity::MoneyTransfer, KindMix { inline: 0.47, deferred: 0.01 }),
        (Activity::ContractAuthorization, KindMix { inline: 0.008, deferred: 0.002 }),
    ]
}

/// Interleaves one corpus per activity plus unclassifiable system actions.
/// Records are shuffled deterministically; the truth holds the per-activity
/// kind counts the pipeline must reproduce.
pub fn gen_mixed_corpus(spec: &MixedSpec, seed: u64) -> (Vec<ActionRecord>, MixedTruth) {
    let mixes = default_mixes();
    let acg = gen_creation_tree(spec.accounts, Attachment::Preferential, seed, mixes[0].1);
    let avg = gen_vote_corpus(&spec.votes, seed.wrapping_add(1), mixes[1].1);
    let mtg = gen_transfer_corpus(&spec.transfers, seed.wrapping_add(2), mixes[2].1);
    let cag = gen_auth_corpus(&spec.auth, seed.wrapping_add(3), mixes[3].1);
    let mut records: Vec<ActionRecord> = acg
        .records()
        .chain(avg.records())
        .chain(mtg.records())
        .chain(cag.records())
        .collect();
    let mut r = rng(seed ^ 0x5eed);
    for i in 0..spec.noise_actions {
        let mut payload = Payload::new();
        payload.insert("payer".into(), PayloadValue::Text("eosio".into()));
        records.push(ActionRecord {
            block_num: 1 + i as u64,
            tx_id: format!("{:016x}{:048x}", 0x0015e_u64 ^ seed, i),
            action_index: 0,
            kind: ActionKind::Calling,
            contract: system("eosio"),
            action_name: "buyram".into(),
            authorizer: system("eosio"),
            payload,
        });
    }
    // Deterministic interleaving.
    for i in (1..records.len()).rev() {
        let j = r.gen_range(0..=i);
        records.swap(i, j);
    }
    let truth = MixedTruth {
        acg: acg.truth.counts,
        avg: avg.truth.counts,
        mtg: mtg.truth.counts,
        cag: cag.truth.counts,
        unclassified: spec.noise_actions as u64,
        records: records.len() as u64,
    };
    (records, truth)
}

/// Sorted set of names, for comparing component membership with truth.
pub fn name_set<'a>(names: impl IntoIterator<Item = &'a AccountId>) -> BTreeSet<AccountId> {
    names.into_iter().cloned().collect()
}
