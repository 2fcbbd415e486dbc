//! EOSIO account names.

use std::borrow::Borrow;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Maximum length of an account name.
pub const MAX_ACCOUNT_LEN: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AccountError {
    #[error("account name is empty")]
    Empty,
    #[error("account name {0:?} is longer than 12 characters")]
    TooLong(String),
    #[error("account name {name:?} contains invalid character {ch:?}")]
    InvalidChar { name: String, ch: char },
    #[error("account name {0:?} ends with '.'")]
    TrailingDot(String),
}

/// A validated account name: 1 to 12 characters over `a-z`, `1-5` and `.`,
/// not ending in `.`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AccountId(Box<str>);

impl AccountId {
    pub fn new(name: &str) -> Result<Self, AccountError> {
        validate(name)?;
        Ok(AccountId(name.into()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

fn is_name_char(c: char) -> bool {
    matches!(c, 'a'..='z' | '1'..='5' | '.')
}

fn validate(name: &str) -> Result<(), AccountError> {
    if name.is_empty() {
        return Err(AccountError::Empty);
    }
    if let Some(ch) = name.chars().find(|c| !is_name_char(*c)) {
        return Err(AccountError::InvalidChar {
            name: name.to_owned(),
            ch,
        });
    }
    // All characters are ASCII from here on.
    if name.len() > MAX_ACCOUNT_LEN {
        return Err(AccountError::TooLong(name.to_owned()));
    }
    if name.ends_with('.') {
        return Err(AccountError::TrailingDot(name.to_owned()));
    }
    Ok(())
}

impl FromStr for AccountId {
    type Err = AccountError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AccountId::new(s)
    }
}

impl fmt::Display for AccountId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for AccountId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl Borrow<str> for AccountId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl Serialize for AccountId {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for AccountId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = <std::borrow::Cow<'de, str>>::deserialize(deserializer)?;
        AccountId::new(&s).map_err(serde::de::Error::custom)
    }
}
