use fund_ledger::{AssetId, CsoId, LedgerError, StrategyId};
use thiserror::Error;

use crate::state::CsoKind;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CsoError {
    #[error("id {0} already registered")]
    DuplicateId(String),
    #[error("unknown party: {0}")]
    UnknownParty(String),
    #[error("provider {provider} did not declare kind {kind:?}")]
    KindNotDeclared { provider: CsoId, kind: CsoKind },
    #[error("stale nonce {got} for {provider}; last accepted {last}")]
    StaleNonce { provider: CsoId, got: u64, last: u64 },
    #[error("invalid payload: {0}")]
    InvalidPayload(String),
    #[error("{strategy} already subscribed to {provider}")]
    AlreadySubscribed { strategy: StrategyId, provider: CsoId },
    #[error("auction received no bids")]
    NoBids,
    #[error("reward tree needs at least one leaf")]
    EmptyLeaves,
    #[error("no price for asset {0}")]
    MissingPrice(AssetId),
    #[error(transparent)]
    Math(#[from] LedgerError),
}
