//! Execution intents: the only way a strategy can touch vault capital.
//! An intent names a venue function with parameters; the vault checks it
//! against its rules before any venue sees it.

use fund_ledger::{AssetId, Dec18, StrategyId, VenueId};
use serde::{Deserialize, Serialize};

use crate::error::VaultError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExecutionIntent {
    pub strategy: StrategyId,
    pub venue: VenueId,
    pub action: IntentAction,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "function", rename_all = "snake_case")]
pub enum IntentAction {
    Trade { asset_in: AssetId, asset_out: AssetId, qty_in: Dec18, min_out: Dec18 },
    Stake { asset: AssetId, qty: Dec18 },
    Unstake { asset: AssetId, qty: Dec18 },
    AddLiquidity { asset: AssetId, qty: Dec18 },
    RemoveLiquidity { asset: AssetId, qty: Dec18 },
}

impl IntentAction {
    pub fn function_name(&self) -> &'static str {
        match self {
            IntentAction::Trade { .. } => "trade",
            IntentAction::Stake { .. } => "stake",
            IntentAction::Unstake { .. } => "unstake",
            IntentAction::AddLiquidity { .. } => "add_liquidity",
            IntentAction::RemoveLiquidity { .. } => "remove_liquidity",
        }
    }

    pub fn referenced_assets(&self) -> Vec<&AssetId> {
        match self {
            IntentAction::Trade { asset_in, asset_out, .. } => vec![asset_in, asset_out],
            IntentAction::Stake { asset, .. }
            | IntentAction::Unstake { asset, .. }
            | IntentAction::AddLiquidity { asset, .. }
            | IntentAction::RemoveLiquidity { asset, .. } => vec![asset],
        }
    }

    /// The quantity the vault hands over (input leg).
    pub fn input(&self) -> (&AssetId, Dec18) {
        match self {
            IntentAction::Trade { asset_in, qty_in, .. } => (asset_in, *qty_in),
            IntentAction::Stake { asset, qty }
            | IntentAction::Unstake { asset, qty }
            | IntentAction::AddLiquidity { asset, qty }
            | IntentAction::RemoveLiquidity { asset, qty } => (asset, *qty),
        }
    }

    /// Whether executing this intent can increase the strategy's non-numeraire
    /// exposure. Sells back to the numeraire, unstakes and liquidity removals
    /// only reduce exposure and are never blocked by the allocation bound.
    pub fn increases_exposure(&self, numeraire: &AssetId) -> bool {
        match self {
            IntentAction::Trade { asset_out, .. } => asset_out != numeraire,
            IntentAction::Stake { .. } | IntentAction::AddLiquidity { .. } => true,
            IntentAction::Unstake { .. } | IntentAction::RemoveLiquidity { .. } => false,
        }
    }

    /// Whether the intent sends capital toward the venue (counts against the
    /// venue capital cap).
    pub fn consumes_venue_capacity(&self) -> bool {
        !matches!(
            self,
            IntentAction::Unstake { .. } | IntentAction::RemoveLiquidity { .. }
        )
    }
}

impl ExecutionIntent {
    pub fn validate(&self) -> Result<(), VaultError> {
        let (asset, qty) = self.action.input();
        if !qty.is_positive() {
            return Err(VaultError::InvalidIntent(format!(
                "{} quantity of {asset} must be positive, got {qty}",
                self.action.function_name()
            )));
        }
        if let IntentAction::Trade { asset_in, asset_out, min_out, .. } = &self.action {
            if asset_in == asset_out {
                return Err(VaultError::InvalidIntent("trade legs must differ".into()));
            }
            if min_out.is_negative() {
                return Err(VaultError::InvalidIntent("min_out must be >= 0".into()));
            }
        }
        Ok(())
    }
}

/// An intent that has passed `check_intent`, carrying the notionals the gate
/// computed. Only checked intents reach a venue.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckedIntent {
    pub intent: ExecutionIntent,
    /// Input-leg value at check-time prices.
    pub notional: Dec18,
}

/// What a venue reports back after executing a checked intent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Fill {
    Trade { qty_in: Dec18, qty_out: Dec18 },
    Stake { qty: Dec18 },
    /// `returned` is principal plus accrued yield released by the venue.
    Unstake { returned: Dec18 },
}
