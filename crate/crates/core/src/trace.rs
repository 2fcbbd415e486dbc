//! Action-trace records and the JSON-lines record parser.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::account::{AccountError, AccountId};
use crate::amount::AmountError;

/// How an action entered the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionKind {
    /// Invoked directly by a user transaction.
    Calling,
    /// Triggered by a contract during execution of another action.
    Inline,
    /// Scheduled by a contract for a later transaction.
    Deferred,
}

impl ActionKind {
    pub const ALL: [ActionKind; 3] = [ActionKind::Calling, ActionKind::Inline, ActionKind::Deferred];

    pub fn as_str(self) -> &'static str {
        match self {
            ActionKind::Calling => "calling",
            ActionKind::Inline => "inline",
            ActionKind::Deferred => "deferred",
        }
    }
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A payload value: action arguments are strings, except list arguments
/// such as `voteproducer.producers`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PayloadValue {
    Text(String),
    List(Vec<String>),
}

impl From<&str> for PayloadValue {
    fn from(s: &str) -> Self {
        PayloadValue::Text(s.to_owned())
    }
}

impl From<String> for PayloadValue {
    fn from(s: String) -> Self {
        PayloadValue::Text(s)
    }
}

impl From<Vec<String>> for PayloadValue {
    fn from(v: Vec<String>) -> Self {
        PayloadValue::List(v)
    }
}

pub type Payload = BTreeMap<String, PayloadValue>;

/// One extracted action.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ActionRecord {
    pub block_num: u64,
    /// 64 lowercase hex characters.
    pub tx_id: String,
    pub action_index: u32,
    pub kind: ActionKind,
    pub contract: AccountId,
    pub action_name: String,
    pub authorizer: AccountId,
    pub payload: Payload,
}

impl ActionRecord {
    /// The uniqueness key of a record within a corpus.
    pub fn key(&self) -> RecordKey {
        RecordKey {
            block_num: self.block_num,
            tx_id: self.tx_id.clone(),
            action_index: self.action_index,
        }
    }

    /// Serializes the record as one JSON line (no trailing newline).
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("action record serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RecordKey {
    pub block_num: u64,
    pub tx_id: String,
    pub action_index: u32,
}

/// Why a line could not be turned into activity events.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecordErrorKind {
    #[error("malformed json: {0}")]
    MalformedJson(String),
    #[error("schema violation: {0}")]
    SchemaViolation(String),
    #[error("invalid account name: {0}")]
    InvalidAccountName(#[from] AccountError),
    #[error("unparseable quantity: {0}")]
    UnparseableQuantity(#[from] AmountError),
    #[error("missing payload field {0:?}")]
    MissingPayloadField(&'static str),
    #[error("duplicate record key")]
    DuplicateKey,
}

impl RecordErrorKind {
    /// Stable tag used in ingest statistics.
    pub fn reason(&self) -> &'static str {
        match self {
            RecordErrorKind::MalformedJson(_) => "malformed-json",
            RecordErrorKind::SchemaViolation(_) => "schema-violation",
            RecordErrorKind::InvalidAccountName(_) => "invalid-account-name",
            RecordErrorKind::UnparseableQuantity(_) => "unparseable-quantity",
            RecordErrorKind::MissingPayloadField(_) => "missing-payload-field",
            RecordErrorKind::DuplicateKey => "duplicate-key",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct RecordError {
    /// 1-based line number in the input file.
    pub line: u64,
    pub kind: RecordErrorKind,
}

#[derive(Deserialize)]
struct RawRecord {
    block_num: u64,
    tx_id: String,
    action_index: u32,
    kind: ActionKind,
    contract: String,
    action_name: String,
    authorizer: String,
    #[serde(default)]
    payload: Payload,
}

fn is_tx_id(s: &str) -> bool {
    s.len() == 64 && s.bytes().all(|b| b.is_ascii_hexdigit())
}

/// Parses one JSON line into a validated record. `line_no` is attached to
/// any error.
pub fn parse_record(line: &str, line_no: u64) -> Result<ActionRecord, RecordError> {
    let err = |kind| RecordError {
        line: line_no,
        kind,
    };
    let raw: RawRecord = serde_json::from_str(line).map_err(|e| {
        use serde_json::error::Category;
        err(match e.classify() {
            Category::Data => RecordErrorKind::SchemaViolation(e.to_string()),
            Category::Io | Category::Syntax | Category::Eof => {
                RecordErrorKind::MalformedJson(e.to_string())
            }
        })
    })?;
    if !is_tx_id(&raw.tx_id) {
        return Err(err(RecordErrorKind::SchemaViolation(format!(
            "tx_id {:?} is not 64 hex characters",
            raw.tx_id
        ))));
    }
    let contract = AccountId::new(&raw.contract).map_err(|e| err(e.into()))?;
    let authorizer = AccountId::new(&raw.authorizer).map_err(|e| err(e.into()))?;
    Ok(ActionRecord {
        block_num: raw.block_num,
        tx_id: raw.tx_id.to_ascii_lowercase(),
        action_index: raw.action_index,
        kind: raw.kind,
        contract,
        action_name: raw.action_name,
        authorizer,
        payload: raw.payload,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TX: &str = "8f1c3a6be4d2f0a19b7c5e3d1f2a4b6c8d0e2f4a6b8c0d2e4f6a8b0c2d4e6f80";

    fn transfer_line() -> String {
        format!(
            r#"{{"block_num":12,"tx_id":"{TX}","action_index":0,"kind":"calling","contract":"eosio.token","action_name":"transfer","authorizer":"alice","payload":{{"from":"alice","to":"bob","quantity":"1.5000 EOS","memo":"hi"}}}}"#
        )
    }

    #[test]
    fn parses_transfer() {
        let rec = parse_record(&transfer_line(), 1).unwrap();
        assert_eq!(rec.kind, ActionKind::Calling);
        assert_eq!(rec.contract.as_str(), "eosio.token");
        assert_eq!(rec.action_name, "transfer");
        assert_eq!(rec.authorizer.as_str(), "alice");
        assert_eq!(rec.payload["quantity"], PayloadValue::from("1.5000 EOS"));
        // The serialized form parses back to the same record.
        assert_eq!(parse_record(&rec.to_json_line(), 1).unwrap(), rec);
    }

    #[test]
    fn parses_producer_list() {
        let line = format!(
            r#"{{"block_num":1,"tx_id":"{TX}","action_index":3,"kind":"inline","contract":"eosio","action_name":"voteproducer","authorizer":"carol","payload":{{"voter":"carol","proxy":"","producers":["bp1","bp2"]}}}}"#
        );
        let rec = parse_record(&line, 1).unwrap();
        assert_eq!(
            rec.payload["producers"],
            PayloadValue::List(vec!["bp1".into(), "bp2".into()])
        );
    }

    #[test]
    fn thirteen_char_authorizer_is_invalid_account() {
        let line = transfer_line().replace(r#""authorizer":"alice""#, r#""authorizer":"abcdefghijklm""#);
        let e = parse_record(&line, 7).unwrap_err();
        assert_eq!(e.line, 7);
        assert_eq!(e.kind.reason(), "invalid-account-name");
    }

    #[test]
    fn missing_tx_id_is_schema_violation() {
        let line = transfer_line().replace(&format!(r#""tx_id":"{TX}","#), "");
        let e = parse_record(&line, 3).unwrap_err();
        assert_eq!(e.line, 3);
        assert_eq!(e.kind.reason(), "schema-violation");
    }

    #[test]
    fn bad_kind_and_bad_tx_are_schema_violations() {
        let line = transfer_line().replace(r#""kind":"calling""#, r#""kind":"notify""#);
        assert_eq!(parse_record(&line, 1).unwrap_err().kind.reason(), "schema-violation");
        let line = transfer_line().replace(TX, "abc");
        assert_eq!(parse_record(&line, 1).unwrap_err().kind.reason(), "schema-violation");
    }

    #[test]
    fn garbage_is_malformed() {
        for line in ["{", "not json", r#"{"block_num":1,"#] {
            assert_eq!(parse_record(line, 1).unwrap_err().kind.reason(), "malformed-json");
        }
    }

    #[test]
    fn tx_id_is_normalized_to_lowercase() {
        let line = transfer_line().replace(TX, &TX.to_ascii_uppercase());
        assert_eq!(parse_record(&line, 1).unwrap().tx_id, TX);
    }
}
