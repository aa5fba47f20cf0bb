//! Capital vault: multi-asset holdings managed by whitelisted strategies,
//! tokenised as fungible shares, with NAV/fee accounting, a five-bound intent
//! gate, share-weighted governance, and exact per-strategy attribution.

mod config;
mod error;
mod governance;
mod intent;
mod state;

pub use config::{VaultConfig, VenuePermissions, VENUE_FUNCTIONS};
pub use error::VaultError;
pub use governance::{Proposal, VoteOutcome};
pub use intent::{CheckedIntent, ExecutionIntent, Fill, IntentAction};
pub use state::{
    AttributionDeltas, BookKey, DepositReceipt, Owner, PriceMap, StrategyEntry, StrategyStatus,
    Vault, WithdrawReceipt,
};
