//! V-token holder governance over whitelists and parameters. Voting is
//! synchronous single-block with inclusive thresholds; a passed proposal
//! takes effect at the next block (the engine queues it).

use std::collections::{BTreeMap, BTreeSet};

use fund_ledger::{AccountId, Dec18, StrategyId, VenueId};
use serde::{Deserialize, Serialize};

use crate::config::{VenuePermissions, VENUE_FUNCTIONS};
use crate::error::VaultError;
use crate::state::{StrategyStatus, Vault};

/// The governed parameter surface: venue registry entries, strategy whitelist
/// status, the per-asset cap, the fee rate, and the allocation bounds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Proposal {
    SetVenueEntry { venue: VenueId, functions: BTreeSet<String>, capital_cap: Dec18 },
    RemoveVenue { venue: VenueId },
    SetStrategyStatus { strategy: StrategyId, status: StrategyStatus },
    SetPerAssetCap { value: Dec18 },
    SetMgmtFeeRate { value: Dec18 },
    SetAlphaBounds { min: Dec18, max: Dec18 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VoteOutcome {
    Passed,
    Rejected,
}

impl Vault {
    /// Tallies a share-weighted vote on a proposal. Passing does not apply
    /// the change; the engine applies it at the next block.
    pub fn governance_vote(
        &self,
        proposal: &Proposal,
        votes: &BTreeMap<AccountId, bool>,
    ) -> Result<VoteOutcome, VaultError> {
        self.validate_proposal(proposal)?;
        if self.governance_passes(votes)? {
            Ok(VoteOutcome::Passed)
        } else {
            Ok(VoteOutcome::Rejected)
        }
    }

    /// Rejects proposals that could never apply, naming the offending field.
    pub fn validate_proposal(&self, proposal: &Proposal) -> Result<(), VaultError> {
        match proposal {
            Proposal::SetVenueEntry { venue, functions, capital_cap } => {
                if capital_cap.is_negative() {
                    return Err(VaultError::UnknownProposalField(format!(
                        "venue {venue}: capital_cap must be >= 0"
                    )));
                }
                for f in functions {
                    if !VENUE_FUNCTIONS.contains(&f.as_str()) {
                        return Err(VaultError::UnknownProposalField(format!(
                            "venue {venue}: unknown function `{f}`"
                        )));
                    }
                }
            }
            Proposal::RemoveVenue { venue } => {
                if !self.config.venues.contains_key(venue) {
                    return Err(VaultError::UnknownProposalField(format!("unknown venue {venue}")));
                }
            }
            Proposal::SetStrategyStatus { strategy, status } => {
                let entry = self
                    .strategy(strategy)
                    .ok_or_else(|| VaultError::UnknownStrategy(strategy.clone()))?;
                if *status == StrategyStatus::Active && entry.status != StrategyStatus::Validated {
                    return Err(VaultError::InvalidProposal(format!(
                        "{strategy} must be validated before activation (is {:?})",
                        entry.status
                    )));
                }
            }
            Proposal::SetPerAssetCap { value } => {
                if *value <= Dec18::ZERO || *value > Dec18::ONE {
                    return Err(VaultError::UnknownProposalField(format!(
                        "per_asset_cap {value} not in (0, 1]"
                    )));
                }
            }
            Proposal::SetMgmtFeeRate { value } => {
                if value.is_negative() {
                    return Err(VaultError::UnknownProposalField(
                        "mgmt_fee_rate must be >= 0".to_string(),
                    ));
                }
            }
            Proposal::SetAlphaBounds { min, max } => {
                if min.is_negative() || min > max || *max > Dec18::ONE {
                    return Err(VaultError::UnknownProposalField(format!(
                        "alpha bounds [{min}, {max}] must satisfy 0 <= min <= max <= 1"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Applies a passed proposal. The engine calls this one block after the
    /// vote.
    pub fn apply_proposal(&mut self, proposal: &Proposal) -> Result<(), VaultError> {
        self.validate_proposal(proposal)?;
        match proposal {
            Proposal::SetVenueEntry { venue, functions, capital_cap } => {
                self.config.venues.insert(
                    venue.clone(),
                    VenuePermissions { functions: functions.clone(), capital_cap: *capital_cap },
                );
            }
            Proposal::RemoveVenue { venue } => {
                self.config.venues.remove(venue);
            }
            Proposal::SetStrategyStatus { strategy, status } => {
                self.set_strategy_status(strategy, *status)?;
            }
            Proposal::SetPerAssetCap { value } => self.config.per_asset_cap = *value,
            Proposal::SetMgmtFeeRate { value } => self.config.mgmt_fee_rate = *value,
            Proposal::SetAlphaBounds { min, max } => {
                self.config.alpha_min = *min;
                self.config.alpha_max = *max;
            }
        }
        Ok(())
    }
}
