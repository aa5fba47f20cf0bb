//! Turning target weights into trade intents: per-asset deltas against the
//! strategy's current position values, a minimum-trade filter, pro-rata
//! turnover clamping, and sells before buys so the numeraire leg funds the
//! purchases within the block.

use std::collections::BTreeMap;

use fund_ledger::{AssetId, Dec18, StrategyId, VenueId};
use fund_vault::{ExecutionIntent, IntentAction, PriceMap};

use crate::error::StrategyError;

pub struct RebalanceInputs<'a> {
    pub strategy: StrategyId,
    pub venue: VenueId,
    pub numeraire: AssetId,
    /// Capital base the weights apply to (the strategy's own book value).
    pub base: Dec18,
    /// Current position values per asset, including numeraire cash.
    pub current_values: &'a BTreeMap<AssetId, Dec18>,
    /// Target weights per asset; the numeraire's weight is the implied rest.
    pub target_weights: &'a BTreeMap<AssetId, Dec18>,
    pub prices: &'a PriceMap,
    /// Skip trades with notional below this absolute threshold.
    pub min_trade: Dec18,
    /// Cap on total traded notional, as a fraction of `base`.
    pub max_turnover: Dec18,
}

/// Emits the trades that move current values toward the target weights.
/// Deterministic: sells in ascending asset order, then buys in ascending
/// asset order.
pub fn weights_to_intents(inp: &RebalanceInputs<'_>) -> Result<Vec<ExecutionIntent>, StrategyError> {
    if !inp.base.is_positive() {
        return Ok(Vec::new());
    }

    // Signed notional delta per non-numeraire asset.
    let mut deltas: BTreeMap<AssetId, Dec18> = BTreeMap::new();
    let mut assets: Vec<&AssetId> = inp.target_weights.keys().collect();
    for asset in inp.current_values.keys() {
        if !inp.target_weights.contains_key(asset) {
            assets.push(asset);
        }
    }
    for asset in assets {
        if *asset == inp.numeraire {
            continue;
        }
        let target = inp
            .target_weights
            .get(asset)
            .copied()
            .unwrap_or(Dec18::ZERO)
            .try_mul(inp.base)?;
        let current = inp.current_values.get(asset).copied().unwrap_or(Dec18::ZERO);
        let delta = target.try_sub(current)?;
        if delta.abs()? < inp.min_trade {
            continue;
        }
        deltas.insert(asset.clone(), delta);
    }

    // Pro-rata turnover clamp.
    let mut turnover = Dec18::ZERO;
    for d in deltas.values() {
        turnover = turnover.try_add(d.abs()?)?;
    }
    let turnover_cap = inp.max_turnover.try_mul(inp.base)?;
    if turnover > turnover_cap {
        let factor = turnover_cap.try_div(turnover)?;
        for d in deltas.values_mut() {
            *d = d.try_mul(factor)?;
        }
    }

    let mut sells = Vec::new();
    let mut buys = Vec::new();
    for (asset, delta) in &deltas {
        if delta.is_negative() {
            let price = inp
                .prices
                .get(asset)
                .copied()
                .ok_or_else(|| StrategyError::BadSignal(format!("no price for {asset}")))?;
            if !price.is_positive() {
                return Err(StrategyError::BadSignal(format!("non-positive price for {asset}")));
            }
            let qty = delta.abs()?.try_div(price)?;
            if qty.is_zero() {
                continue;
            }
            sells.push(ExecutionIntent {
                strategy: inp.strategy.clone(),
                venue: inp.venue.clone(),
                action: IntentAction::Trade {
                    asset_in: asset.clone(),
                    asset_out: inp.numeraire.clone(),
                    qty_in: qty,
                    min_out: Dec18::ZERO,
                },
            });
        } else if delta.is_positive() {
            buys.push(ExecutionIntent {
                strategy: inp.strategy.clone(),
                venue: inp.venue.clone(),
                action: IntentAction::Trade {
                    asset_in: inp.numeraire.clone(),
                    asset_out: asset.clone(),
                    qty_in: *delta,
                    min_out: Dec18::ZERO,
                },
            });
        }
    }
    sells.extend(buys);
    Ok(sells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use fund_ledger::{asset, dec, strat, venue};

    fn inputs<'a>(
        base: &str,
        current: &'a BTreeMap<AssetId, Dec18>,
        target: &'a BTreeMap<AssetId, Dec18>,
        prices: &'a PriceMap,
    ) -> RebalanceInputs<'a> {
        RebalanceInputs {
            strategy: strat("s"),
            venue: venue("dex"),
            numeraire: asset("USD"),
            base: dec(base),
            current_values: current,
            target_weights: target,
            prices,
            min_trade: dec("1"),
            max_turnover: Dec18::ONE,
        }
    }

    fn map(pairs: &[(&str, &str)]) -> BTreeMap<AssetId, Dec18> {
        pairs.iter().map(|(a, v)| (asset(a), dec(v))).collect()
    }

    #[test]
    fn on_target_portfolio_emits_nothing() {
        let current = map(&[("A", "50"), ("USD", "50")]);
        let target = map(&[("A", "0.5")]);
        let prices = map(&[("A", "2")]);
        let out = weights_to_intents(&inputs("100", &current, &target, &prices)).unwrap();
        assert!(out.is_empty());
    }

    #[test]
    fn half_half_from_all_in() {
        // all capital in A, target 0.5 A / 0.5 B at unit prices: sell 50 of A,
        // buy 50 of B, sell first.
        let current = map(&[("A", "100")]);
        let target = map(&[("A", "0.5"), ("B", "0.5")]);
        let prices = map(&[("A", "1"), ("B", "1")]);
        let out = weights_to_intents(&inputs("100", &current, &target, &prices)).unwrap();
        assert_eq!(out.len(), 2);
        match &out[0].action {
            IntentAction::Trade { asset_in, asset_out, qty_in, .. } => {
                assert_eq!(asset_in, &asset("A"));
                assert_eq!(asset_out, &asset("USD"));
                assert_eq!(*qty_in, dec("50"));
            }
            other => panic!("expected sell, got {other:?}"),
        }
        match &out[1].action {
            IntentAction::Trade { asset_in, asset_out, qty_in, .. } => {
                assert_eq!(asset_in, &asset("USD"));
                assert_eq!(asset_out, &asset("B"));
                assert_eq!(*qty_in, dec("50"));
            }
            other => panic!("expected buy, got {other:?}"),
        }
    }

    #[test]
    fn turnover_clamp_scales_pro_rata() {
        // required turnover 80 against cap 0.4 * 100 = 40: all deltas halve.
        let current = map(&[("A", "80"), ("USD", "20")]);
        let target = map(&[("B", "0.8")]);
        let prices = map(&[("A", "2"), ("B", "4")]);
        let mut inp = inputs("100", &current, &target, &prices);
        inp.max_turnover = dec("0.4");
        let out = weights_to_intents(&inp).unwrap();
        assert_eq!(out.len(), 2);
        match &out[0].action {
            IntentAction::Trade { asset_in, qty_in, .. } => {
                assert_eq!(asset_in, &asset("A"));
                assert_eq!(*qty_in, dec("20")); // notional 40 at price 2
            }
            other => panic!("{other:?}"),
        }
        match &out[1].action {
            IntentAction::Trade { asset_out, qty_in, .. } => {
                assert_eq!(asset_out, &asset("B"));
                assert_eq!(*qty_in, dec("40"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn min_trade_filters_dust() {
        let current = map(&[("A", "50.4"), ("USD", "49.6")]);
        let target = map(&[("A", "0.5")]);
        let prices = map(&[("A", "1")]);
        let out = weights_to_intents(&inputs("100", &current, &target, &prices)).unwrap();
        assert!(out.is_empty(), "0.4 notional is below the 1.0 min trade");
    }
}
