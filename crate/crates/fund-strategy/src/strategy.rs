//! The strategy abstraction: a pure step function from market state, signal
//! space and a vault snapshot to execution intents. All shipped classes are
//! deterministic; anything they remember lives in typed records owned by the
//! engine, never in hidden state.

use std::collections::{BTreeMap, BTreeSet};

use fund_ledger::{AssetId, CsoId, Dec18, StrategyId, VenueId};
use fund_cso::{CsoPayload, CsoState};
use fund_vault::{ExecutionIntent, IntentAction, PriceMap};
use serde::{Deserialize, Serialize};

use crate::aggregate::{aggregate_signals, enforce_caps, AggregateOutcome, ProviderSignal};
use crate::error::StrategyError;
use crate::plan::{weights_to_intents, RebalanceInputs};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum StrategyClass {
    /// Hold one asset outright.
    PureSpot { target_asset: AssetId },
    /// Keep universe-asset balance staked above a cash buffer; unwind on
    /// pending redemptions.
    StakedSpot { staking_venue: VenueId, asset: AssetId, cash_buffer: Dec18 },
    /// Track fixed target weights.
    IndexTracker { target_weights: Vec<(AssetId, Dec18)> },
    /// Mix subscribed providers' allocation signals by capital and
    /// performance.
    SignalAggregator { providers: Vec<CsoId> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RiskEnvelope {
    /// Per-asset weight bound in (0, 1].
    pub max_position_per_asset: Dec18,
    /// Turnover bound per rebalance as a fraction of strategy capital.
    pub max_turnover_per_rebalance: Dec18,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyParams {
    pub id: StrategyId,
    pub class: StrategyClass,
    pub universe: BTreeSet<AssetId>,
    /// Cadence in blocks; the automation task that triggers the strategy must
    /// use the same value.
    pub execution_frequency: u64,
    pub risk_envelope: RiskEnvelope,
    /// Trade venue for rebalancing intents (must be whitelisted).
    pub trade_venue: VenueId,
    /// Minimum trade notional as a fraction of strategy capital.
    pub min_trade_fraction: Dec18,
}

impl StrategyParams {
    pub fn validate(&self, admissible: &BTreeSet<AssetId>) -> Result<(), StrategyError> {
        if self.execution_frequency == 0 {
            return Err(StrategyError::BadParams("execution_frequency must be >= 1".into()));
        }
        let env = &self.risk_envelope;
        for (name, v) in [
            ("max_position_per_asset", env.max_position_per_asset),
            ("max_turnover_per_rebalance", env.max_turnover_per_rebalance),
        ] {
            if !v.is_positive() || v > Dec18::ONE {
                return Err(StrategyError::BadParams(format!("{name} {v} not in (0, 1]")));
            }
        }
        if self.min_trade_fraction.is_negative() {
            return Err(StrategyError::BadParams("min_trade_fraction must be >= 0".into()));
        }
        for asset in &self.universe {
            if !admissible.contains(asset) {
                return Err(StrategyError::BadParams(format!(
                    "universe asset {asset} is not admissible for the vault"
                )));
            }
        }
        let inside = |a: &AssetId| {
            if self.universe.contains(a) {
                Ok(())
            } else {
                Err(StrategyError::BadParams(format!("asset {a} is outside the universe")))
            }
        };
        match &self.class {
            StrategyClass::PureSpot { target_asset } => inside(target_asset)?,
            StrategyClass::StakedSpot { asset, cash_buffer, .. } => {
                inside(asset)?;
                if cash_buffer.is_negative() {
                    return Err(StrategyError::BadParams("cash_buffer must be >= 0".into()));
                }
            }
            StrategyClass::IndexTracker { target_weights } => {
                let mut l1 = Dec18::ZERO;
                for (asset, w) in target_weights {
                    inside(asset)?;
                    l1 = l1.try_add(w.abs()?)?;
                }
                if l1 > Dec18::ONE {
                    return Err(StrategyError::BadParams(format!(
                        "index weights have L1 norm {l1} > 1"
                    )));
                }
            }
            StrategyClass::SignalAggregator { providers } => {
                if providers.is_empty() {
                    return Err(StrategyError::BadParams(
                        "signal aggregator needs at least one provider".into(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Market data visible to a strategy step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarketState {
    pub prices: PriceMap,
    /// Indicative depth per venue.
    pub venue_liquidity: BTreeMap<VenueId, Dec18>,
    pub block: u64,
}

/// Latest readable oracle states for the strategy's subscribed providers,
/// with the weighting metadata the aggregation needs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SignalSpace {
    pub entries: BTreeMap<CsoId, SignalEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignalEntry {
    pub state: CsoState,
    /// s_j: total capital of strategies subscribed to the provider.
    pub capital: Dec18,
    /// P_j from the provider's track record.
    pub perf_weight: Dec18,
    /// g_j governance multiplier.
    pub gov_multiplier: Dec18,
}

/// The slice of vault state a strategy may see.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VaultView {
    pub numeraire: AssetId,
    /// Governance per-asset weight cap.
    pub per_asset_cap: Dec18,
    /// The strategy's capital base (its book value including cash).
    pub capital: Dec18,
    /// The strategy's spot position values by asset (numeraire included).
    pub position_values: BTreeMap<AssetId, Dec18>,
    /// The strategy's spot quantities by asset.
    pub spot_qty: BTreeMap<AssetId, Dec18>,
    /// The strategy's venue position quantities.
    pub venue_qty: BTreeMap<(VenueId, AssetId), Dec18>,
    /// Unserved redemption amount flagged by the vault.
    pub pending_redemptions: Dec18,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StepOutput {
    pub intents: Vec<ExecutionIntent>,
    /// Provider shares used this step (signal aggregator only), for
    /// participation-fee attribution.
    pub aggregation_shares: Option<Vec<(CsoId, Dec18)>>,
}

/// One strategy step: a pure function of its inputs. Strategies that cannot
/// act return no intents.
pub fn strategy_step(
    params: &StrategyParams,
    market: &MarketState,
    signals: &SignalSpace,
    view: &VaultView,
) -> Result<StepOutput, StrategyError> {
    match &params.class {
        StrategyClass::PureSpot { target_asset } => {
            let target: BTreeMap<AssetId, Dec18> =
                [(target_asset.clone(), Dec18::ONE)].into();
            rebalance_toward(params, market, view, &target).map(StepOutput::from_intents)
        }
        StrategyClass::IndexTracker { target_weights } => {
            let target: BTreeMap<AssetId, Dec18> = target_weights.iter().cloned().collect();
            rebalance_toward(params, market, view, &target).map(StepOutput::from_intents)
        }
        StrategyClass::SignalAggregator { providers } => {
            aggregator_step(params, market, signals, view, providers)
        }
        StrategyClass::StakedSpot { staking_venue, asset, cash_buffer } => {
            staked_spot_step(params, view, staking_venue, asset, *cash_buffer)
                .map(StepOutput::from_intents)
        }
    }
}

impl StepOutput {
    fn from_intents(intents: Vec<ExecutionIntent>) -> StepOutput {
        StepOutput { intents, aggregation_shares: None }
    }
}

fn rebalance_toward(
    params: &StrategyParams,
    market: &MarketState,
    view: &VaultView,
    raw_target: &BTreeMap<AssetId, Dec18>,
) -> Result<Vec<ExecutionIntent>, StrategyError> {
    // Project onto the tighter of the vault cap and the risk envelope, then
    // drop shorts: the venue simulator cannot hold negative spot.
    let cap = view.per_asset_cap.min(params.risk_envelope.max_position_per_asset);
    let ordered: Vec<AssetId> = raw_target.keys().cloned().collect();
    let vec: Vec<Dec18> = ordered.iter().map(|a| raw_target[a]).collect();
    let capped = enforce_caps(&vec, cap)?;
    let target: BTreeMap<AssetId, Dec18> = ordered
        .into_iter()
        .zip(capped)
        .map(|(a, w)| (a, w.max(Dec18::ZERO)))
        .collect();

    let min_trade = params.min_trade_fraction.try_mul(view.capital)?;
    weights_to_intents(&RebalanceInputs {
        strategy: params.id.clone(),
        venue: params.trade_venue.clone(),
        numeraire: view.numeraire.clone(),
        base: view.capital,
        current_values: &view.position_values,
        target_weights: &target,
        prices: &market.prices,
        min_trade,
        max_turnover: params.risk_envelope.max_turnover_per_rebalance,
    })
}

fn aggregator_step(
    params: &StrategyParams,
    market: &MarketState,
    signals: &SignalSpace,
    view: &VaultView,
    providers: &[CsoId],
) -> Result<StepOutput, StrategyError> {
    // Ordered universe without the numeraire: the aggregation asset axis.
    let axis: Vec<AssetId> =
        params.universe.iter().filter(|a| **a != view.numeraire).cloned().collect();

    let mut provider_signals = Vec::new();
    for provider in providers {
        let Some(entry) = signals.entries.get(provider) else { continue };
        let Some(weights) = signal_weights(&entry.state, &axis)? else { continue };
        provider_signals.push(ProviderSignal {
            provider: provider.clone(),
            weights,
            capital: entry.capital,
            perf_weight: entry.perf_weight,
            gov_multiplier: entry.gov_multiplier,
        });
    }

    let outcome: AggregateOutcome = match aggregate_signals(&provider_signals) {
        Ok(out) => out,
        // No eligible providers: hold the numeraire (sell everything down).
        Err(StrategyError::DegenerateWeights) => {
            let target = BTreeMap::new();
            let intents = rebalance_toward(params, market, view, &target)?;
            return Ok(StepOutput { intents, aggregation_shares: Some(Vec::new()) });
        }
        Err(e) => return Err(e),
    };

    let target: BTreeMap<AssetId, Dec18> =
        axis.into_iter().zip(outcome.weights).collect();
    let intents = rebalance_toward(params, market, view, &target)?;
    Ok(StepOutput { intents, aggregation_shares: Some(outcome.shares) })
}

/// Extracts an aggregatable weight vector from a provider state: allocation
/// weights directly, or categorical buy/hold/sell decisions mapped to
/// c_i / sum|c|. Assets outside the axis are dropped.
fn signal_weights(
    state: &CsoState,
    axis: &[AssetId],
) -> Result<Option<Vec<Dec18>>, StrategyError> {
    match &state.payload {
        CsoPayload::PortfolioAllocation { weights } => {
            let lookup: BTreeMap<&AssetId, Dec18> =
                weights.iter().map(|(a, w)| (a, *w)).collect();
            Ok(Some(
                axis.iter()
                    .map(|a| lookup.get(a).copied().unwrap_or(Dec18::ZERO))
                    .collect(),
            ))
        }
        CsoPayload::Categorical { decisions } => {
            let mut total: i64 = 0;
            for (_, c) in decisions {
                total += c.unsigned_abs() as i64;
            }
            if total == 0 {
                return Ok(None);
            }
            let unit = Dec18::ONE.try_div(Dec18::from_int(total))?;
            let lookup: BTreeMap<&AssetId, i8> =
                decisions.iter().map(|(a, c)| (a, *c)).collect();
            Ok(Some(
                axis.iter()
                    .map(|a| match lookup.get(a) {
                        Some(1) => Ok(unit),
                        Some(-1) => unit.try_neg().map_err(StrategyError::from),
                        _ => Ok(Dec18::ZERO),
                    })
                    .collect::<Result<_, _>>()?,
            ))
        }
        _ => Ok(None),
    }
}

fn staked_spot_step(
    params: &StrategyParams,
    view: &VaultView,
    staking_venue: &VenueId,
    stake_asset: &AssetId,
    cash_buffer: Dec18,
) -> Result<Vec<ExecutionIntent>, StrategyError> {
    let staked = view
        .venue_qty
        .get(&(staking_venue.clone(), stake_asset.clone()))
        .copied()
        .unwrap_or(Dec18::ZERO);

    // Redemption pressure: release what the vault is short, up to the position.
    if view.pending_redemptions.is_positive() && staked.is_positive() {
        let qty = view.pending_redemptions.min(staked);
        return Ok(vec![ExecutionIntent {
            strategy: params.id.clone(),
            venue: staking_venue.clone(),
            action: IntentAction::Unstake { asset: stake_asset.clone(), qty },
        }]);
    }

    let idle = view.spot_qty.get(stake_asset).copied().unwrap_or(Dec18::ZERO);
    if idle > cash_buffer {
        let qty = idle.try_sub(cash_buffer)?;
        return Ok(vec![ExecutionIntent {
            strategy: params.id.clone(),
            venue: staking_venue.clone(),
            action: IntentAction::Stake { asset: stake_asset.clone(), qty },
        }]);
    }
    Ok(Vec::new())
}
