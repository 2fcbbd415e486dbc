use std::path::Path;

use eosgraph::builders::DiagnosticsConfig;
use eosgraph::{AccountId, SystemAccounts};
use serde::Deserialize;

/// Optional settings file:
///
/// ```toml
/// system_accounts = ["eosio", "eosio.token"]
/// spam_threshold = 0.5
/// top_k = 10
/// ```
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub system_accounts: Option<Vec<AccountId>>,
    pub spam_threshold: Option<f64>,
    pub top_k: Option<usize>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Config, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let config: Config = toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        if let Some(t) = config.spam_threshold {
            if !(0.0..=1.0).contains(&t) {
                return Err(format!("{}: spam_threshold must be in [0, 1]", path.display()));
            }
        }
        Ok(config)
    }

    pub fn system_accounts(&self) -> SystemAccounts {
        match &self.system_accounts {
            Some(list) => SystemAccounts::new(list.iter().cloned()),
            None => SystemAccounts::default(),
        }
    }

    pub fn diagnostics(&self) -> DiagnosticsConfig {
        let mut d = DiagnosticsConfig::default();
        if let Some(t) = self.spam_threshold {
            d.spam_threshold = t;
        }
        if let Some(k) = self.top_k {
            d.top_k = k;
        }
        d
    }
}
