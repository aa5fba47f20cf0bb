use fund_ledger::{AssetId, Dec18, LedgerError, StrategyId, VenueId};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VaultError {
    #[error("invalid config: field `{field}`: {reason}")]
    InvalidConfig { field: &'static str, reason: String },
    #[error("no price for asset {0}")]
    MissingPrice(AssetId),
    #[error("asset {0} is not in the admissible set")]
    InadmissibleAsset(AssetId),
    #[error("deposit value {value} below minimum {minimum}")]
    BelowMinimum { value: Dec18, minimum: Dec18 },
    #[error("deposit truncates to zero shares")]
    ZeroShares,
    #[error("insufficient shares: requested {requested}, balance {balance}")]
    InsufficientShares { requested: Dec18, balance: Dec18 },
    #[error("insufficient numeraire liquidity: requested {requested}, available {available}")]
    InsufficientLiquidity { requested: Dec18, available: Dec18 },
    #[error("strategy {0} is not active")]
    StrategyNotActive(StrategyId),
    #[error("venue {0} is not in the registry")]
    VenueNotAllowed(VenueId),
    #[error("function `{function}` is not allowed on venue {venue}")]
    FunctionNotAllowed { venue: VenueId, function: String },
    #[error("allocation exceeded: notional {requested} over remaining allocation {limit}")]
    AllocationExceeded { requested: Dec18, limit: Dec18 },
    #[error("venue cap exceeded on {venue}: requested {requested}, cap {cap}")]
    VenueCapExceeded { venue: VenueId, requested: Dec18, cap: Dec18 },
    #[error("insufficient holdings of {asset}: requested {requested}, available {available}")]
    InsufficientHoldings { asset: AssetId, requested: Dec18, available: Dec18 },
    #[error("unknown strategy {0}")]
    UnknownStrategy(StrategyId),
    #[error("malformed intent: {0}")]
    InvalidIntent(String),
    #[error("unknown proposal field: {0}")]
    UnknownProposalField(String),
    #[error("proposal cannot apply: {0}")]
    InvalidProposal(String),
    #[error("vault NAV is not positive; shares cannot be priced")]
    VaultInsolvent,
    #[error(transparent)]
    Math(#[from] LedgerError),
}
