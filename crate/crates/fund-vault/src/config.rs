//! Vault deployment parameters: the admissible asset set, the venue/function
//! whitelist with per-venue capital caps, fee and governance settings, and the
//! owners' intent specification.

use std::collections::{BTreeMap, BTreeSet};

use fund_ledger::{dec, AssetId, Dec18, VenueId};
use serde::{Deserialize, Serialize};

use crate::error::VaultError;

/// Functions a venue may be whitelisted for.
pub const VENUE_FUNCTIONS: [&str; 5] =
    ["trade", "stake", "unstake", "add_liquidity", "remove_liquidity"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VenuePermissions {
    pub functions: BTreeSet<String>,
    /// Cap on capital deployed at (or routed through) the venue, in numeraire.
    pub capital_cap: Dec18,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VaultConfig {
    pub admissible_assets: BTreeSet<AssetId>,
    pub venues: BTreeMap<VenueId, VenuePermissions>,
    /// Accounting and redemption asset; always valued at exactly 1.0.
    pub numeraire: AssetId,
    /// Management fee, fraction of gross NAV per year.
    pub mgmt_fee_rate: Dec18,
    pub min_deposit_value: Dec18,
    /// Governance-set per-asset weight cap, in (0, 1].
    pub per_asset_cap: Dec18,
    /// Approval threshold for governance votes (share of participating weight).
    pub gov_threshold: Dec18,
    /// Minimum participating share of supply for a vote to count.
    pub gov_quorum: Dec18,
    /// Bounds on per-strategy allocation shares.
    pub alpha_min: Dec18,
    pub alpha_max: Dec18,
    /// Owners' intent specification: (metric name, target weight) pairs.
    /// Recorded for validation scoring; not consumed elsewhere.
    pub intent_spec: Vec<(String, Dec18)>,
}

impl VaultConfig {
    /// Minimal config over the given assets with permissive defaults.
    pub fn new(numeraire: AssetId, assets: impl IntoIterator<Item = AssetId>) -> VaultConfig {
        let mut admissible: BTreeSet<AssetId> = assets.into_iter().collect();
        admissible.insert(numeraire.clone());
        VaultConfig {
            admissible_assets: admissible,
            venues: BTreeMap::new(),
            numeraire,
            mgmt_fee_rate: Dec18::ZERO,
            min_deposit_value: Dec18::ZERO,
            per_asset_cap: Dec18::ONE,
            gov_threshold: dec("0.5"),
            gov_quorum: dec("0.5"),
            alpha_min: Dec18::ZERO,
            alpha_max: Dec18::ONE,
            intent_spec: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), VaultError> {
        let invalid = |field: &'static str, reason: String| VaultError::InvalidConfig { field, reason };
        if self.admissible_assets.is_empty() {
            return Err(invalid("admissible_assets", "must be non-empty".into()));
        }
        if !self.admissible_assets.contains(&self.numeraire) {
            return Err(invalid(
                "numeraire",
                format!("{} is not in the admissible asset set", self.numeraire),
            ));
        }
        if self.per_asset_cap <= Dec18::ZERO || self.per_asset_cap > Dec18::ONE {
            return Err(invalid("per_asset_cap", format!("{} not in (0, 1]", self.per_asset_cap)));
        }
        if self.mgmt_fee_rate.is_negative() {
            return Err(invalid("mgmt_fee_rate", "must be >= 0".into()));
        }
        if self.min_deposit_value.is_negative() {
            return Err(invalid("min_deposit_value", "must be >= 0".into()));
        }
        for bound in [("gov_threshold", self.gov_threshold), ("gov_quorum", self.gov_quorum)] {
            if bound.1 <= Dec18::ZERO || bound.1 > Dec18::ONE {
                return Err(invalid(
                    if bound.0 == "gov_threshold" { "gov_threshold" } else { "gov_quorum" },
                    format!("{} not in (0, 1]", bound.1),
                ));
            }
        }
        if self.alpha_min.is_negative()
            || self.alpha_min > self.alpha_max
            || self.alpha_max > Dec18::ONE
        {
            return Err(invalid(
                "alpha_min",
                format!("bounds [{}, {}] must satisfy 0 <= min <= max <= 1", self.alpha_min, self.alpha_max),
            ));
        }
        for (venue, perms) in &self.venues {
            if perms.capital_cap.is_negative() {
                return Err(invalid("venues", format!("{venue}: capital_cap must be >= 0")));
            }
            for f in &perms.functions {
                if !VENUE_FUNCTIONS.contains(&f.as_str()) {
                    return Err(invalid("venues", format!("{venue}: unknown function `{f}`")));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use fund_ledger::asset;

    #[test]
    fn default_config_validates() {
        let cfg = VaultConfig::new(asset("USD"), [asset("ETH")]);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn zero_per_asset_cap_names_the_field() {
        let mut cfg = VaultConfig::new(asset("USD"), [asset("ETH")]);
        cfg.per_asset_cap = Dec18::ZERO;
        match cfg.validate() {
            Err(VaultError::InvalidConfig { field, .. }) => assert_eq!(field, "per_asset_cap"),
            other => panic!("expected InvalidConfig, got {other:?}"),
        }
    }

    #[test]
    fn numeraire_outside_assets_rejected() {
        let mut cfg = VaultConfig::new(asset("USD"), [asset("ETH")]);
        cfg.admissible_assets.remove(&asset("USD"));
        match cfg.validate() {
            Err(VaultError::InvalidConfig { field, .. }) => assert_eq!(field, "numeraire"),
            other => panic!("expected InvalidConfig, got {other:?}"),
        }
    }
}
