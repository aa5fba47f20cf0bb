use fund_ledger::LedgerError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    /// No provider carries weight (Z = 0); the caller falls back to holding
    /// the numeraire.
    #[error("no eligible providers: aggregate mass is zero")]
    DegenerateWeights,
    #[error("bad signal input: {0}")]
    BadSignal(String),
    #[error("bad strategy parameters: {0}")]
    BadParams(String),
    #[error(transparent)]
    Math(#[from] LedgerError),
}
