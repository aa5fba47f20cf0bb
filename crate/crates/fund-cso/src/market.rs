//! The signal marketplace: provider registry with nonce-versioned publication,
//! strategy subscriptions under flat-fee or participation models, epoch fee
//! settlement, and uniform-price access auctions.

use std::collections::{BTreeMap, BTreeSet};

use fund_ledger::{stats, AssetId, CsoId, Dec18, StrategyId};
use serde::{Deserialize, Serialize};

use crate::error::CsoError;
use crate::state::{CsoKind, CsoPayload, CsoState};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FeeModel {
    /// Flat fee per epoch for read access.
    Subscription { flat_fee: Dec18 },
    /// Provider commits co-capital alongside the signal and takes a carry on
    /// the share of strategy PnL attributable to it.
    Participation { co_capital: Dec18, carry_rate: Dec18 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubscriptionStatus {
    Active,
    /// Fee budget ran dry; access stops but the block carries on.
    Suspended,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subscription {
    pub strategy: StrategyId,
    pub provider: CsoId,
    pub model: FeeModel,
    pub epoch_length: u64,
    pub status: SubscriptionStatus,
    /// Mark-to-market balance of the provider's co-capital (participation).
    pub co_capital_balance: Dec18,
}

/// Rolling hypothetical performance of one provider's allocation signal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignalTrackRecord {
    pub provider: CsoId,
    /// Rolling per-epoch hypothetical returns, oldest first.
    pub returns: Vec<Dec18>,
    pub sharpe: Dec18,
    /// Performance weight P = exp(lambda_sig * sharpe); always positive.
    pub perf_weight: Dec18,
    /// Total capital of strategies subscribed to this provider (s_j).
    pub subscribed_capital: Dec18,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct Provider {
    kinds: BTreeSet<CsoKind>,
    last_nonce: Option<u64>,
    /// Governance multiplier g_j in the aggregation weighting; defaults to 1.
    gov_multiplier: Dec18,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarketParams {
    pub lambda_sig: Dec18,
    /// Rolling window length for signal sharpe, in epochs.
    pub w_sig_window: usize,
    /// Std floor for the sharpe estimator.
    pub epsilon: Dec18,
}

impl Default for MarketParams {
    fn default() -> Self {
        MarketParams {
            lambda_sig: Dec18::ONE,
            w_sig_window: 50,
            epsilon: fund_ledger::dec("0.000001"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeeEventKind {
    FlatFee,
    Carry,
    /// Co-capital marked to the strategy's epoch return (no cash moves).
    CoCapitalMark,
    /// Budget could not cover the fee; the subscription is suspended.
    Suspended,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeeEvent {
    pub strategy: StrategyId,
    pub provider: CsoId,
    pub amount: Dec18,
    pub kind: FeeEventKind,
}

/// Per-strategy inputs to an epoch settlement.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EpochStats {
    /// Attribution PnL earned over the epoch.
    pub pnl: Dec18,
    /// PnL over capital at epoch start (for pari-passu co-capital marking).
    pub ret: Dec18,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuctionClearing {
    pub winners: Vec<StrategyId>,
    pub clearing_price: Dec18,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuctionOutcome {
    pub clearing: AuctionClearing,
    /// Winners that paid and received a subscription.
    pub subscribed: Vec<StrategyId>,
    /// Winners skipped (already subscribed, or budget short), with the reason.
    pub skipped: Vec<(StrategyId, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Marketplace {
    pub params: MarketParams,
    providers: BTreeMap<CsoId, Provider>,
    latest: BTreeMap<(CsoId, CsoKind), CsoState>,
    fee_budgets: BTreeMap<StrategyId, Dec18>,
    subscriptions: BTreeMap<(StrategyId, CsoId), Subscription>,
    provider_earnings: BTreeMap<CsoId, Dec18>,
    track: BTreeMap<CsoId, SignalTrackRecord>,
    /// Last aggregation weight share per (strategy, provider); used to
    /// attribute strategy PnL to providers under the participation model.
    agg_shares: BTreeMap<(StrategyId, CsoId), Dec18>,
}

impl Marketplace {
    pub fn new(params: MarketParams) -> Marketplace {
        Marketplace {
            params,
            providers: BTreeMap::new(),
            latest: BTreeMap::new(),
            fee_budgets: BTreeMap::new(),
            subscriptions: BTreeMap::new(),
            provider_earnings: BTreeMap::new(),
            track: BTreeMap::new(),
            agg_shares: BTreeMap::new(),
        }
    }

    pub fn register_cso(&mut self, id: CsoId, kinds: BTreeSet<CsoKind>) -> Result<(), CsoError> {
        if self.providers.contains_key(&id) {
            return Err(CsoError::DuplicateId(id.to_string()));
        }
        self.track.insert(
            id.clone(),
            SignalTrackRecord {
                provider: id.clone(),
                returns: Vec::new(),
                sharpe: Dec18::ZERO,
                perf_weight: Dec18::ONE,
                subscribed_capital: Dec18::ZERO,
            },
        );
        self.providers.insert(
            id,
            Provider { kinds, last_nonce: None, gov_multiplier: Dec18::ONE },
        );
        Ok(())
    }

    /// Strategies must be known before they can subscribe; their fee budget
    /// is funded here at onboarding.
    pub fn register_strategy(&mut self, id: StrategyId, fee_budget: Dec18) -> Result<(), CsoError> {
        if self.fee_budgets.contains_key(&id) {
            return Err(CsoError::DuplicateId(id.to_string()));
        }
        self.fee_budgets.insert(id, fee_budget);
        Ok(())
    }

    pub fn fee_budget(&self, id: &StrategyId) -> Dec18 {
        self.fee_budgets.get(id).copied().unwrap_or(Dec18::ZERO)
    }

    pub fn provider_earnings(&self, id: &CsoId) -> Dec18 {
        self.provider_earnings.get(id).copied().unwrap_or(Dec18::ZERO)
    }

    pub fn set_gov_multiplier(&mut self, id: &CsoId, g: Dec18) -> Result<(), CsoError> {
        let provider = self
            .providers
            .get_mut(id)
            .ok_or_else(|| CsoError::UnknownParty(id.to_string()))?;
        provider.gov_multiplier = g;
        Ok(())
    }

    /// Accepts a state iff the provider declared its kind, the nonce strictly
    /// exceeds every previously accepted nonce for the provider, and the
    /// payload invariants hold.
    pub fn publish_state(
        &mut self,
        provider: &CsoId,
        nonce: u64,
        payload: CsoPayload,
        height: u64,
    ) -> Result<&CsoState, CsoError> {
        let entry = self
            .providers
            .get_mut(provider)
            .ok_or_else(|| CsoError::UnknownParty(provider.to_string()))?;
        let kind = payload.kind();
        if !entry.kinds.contains(&kind) {
            return Err(CsoError::KindNotDeclared { provider: provider.clone(), kind });
        }
        if let Some(last) = entry.last_nonce {
            if nonce <= last {
                return Err(CsoError::StaleNonce { provider: provider.clone(), got: nonce, last });
            }
        }
        payload.validate()?;
        entry.last_nonce = Some(nonce);
        let state =
            CsoState { provider: provider.clone(), nonce, published_at: height, payload };
        self.latest.insert((provider.clone(), kind), state);
        Ok(&self.latest[&(provider.clone(), kind)])
    }

    pub fn latest(&self, provider: &CsoId, kind: CsoKind) -> Option<&CsoState> {
        self.latest.get(&(provider.clone(), kind))
    }

    pub fn subscribe(
        &mut self,
        strategy: &StrategyId,
        provider: &CsoId,
        model: FeeModel,
        epoch_length: u64,
    ) -> Result<&Subscription, CsoError> {
        if !self.fee_budgets.contains_key(strategy) {
            return Err(CsoError::UnknownParty(strategy.to_string()));
        }
        if !self.providers.contains_key(provider) {
            return Err(CsoError::UnknownParty(provider.to_string()));
        }
        let key = (strategy.clone(), provider.clone());
        if self.subscriptions.contains_key(&key) {
            return Err(CsoError::AlreadySubscribed {
                strategy: strategy.clone(),
                provider: provider.clone(),
            });
        }
        match &model {
            FeeModel::Subscription { flat_fee } => {
                if flat_fee.is_negative() {
                    return Err(CsoError::InvalidPayload("flat_fee must be >= 0".into()));
                }
            }
            FeeModel::Participation { co_capital, carry_rate } => {
                if carry_rate.is_negative() || *carry_rate > Dec18::ONE {
                    return Err(CsoError::InvalidPayload("carry_rate must be in [0, 1]".into()));
                }
                if co_capital.is_negative() {
                    return Err(CsoError::InvalidPayload("co_capital must be >= 0".into()));
                }
            }
        }
        if epoch_length == 0 {
            return Err(CsoError::InvalidPayload("epoch_length must be >= 1".into()));
        }
        let co_capital_balance = match &model {
            FeeModel::Participation { co_capital, .. } => *co_capital,
            _ => Dec18::ZERO,
        };
        let sub = Subscription {
            strategy: strategy.clone(),
            provider: provider.clone(),
            model,
            epoch_length,
            status: SubscriptionStatus::Active,
            co_capital_balance,
        };
        self.subscriptions.insert(key.clone(), sub);
        Ok(&self.subscriptions[&key])
    }

    pub fn subscription(&self, strategy: &StrategyId, provider: &CsoId) -> Option<&Subscription> {
        self.subscriptions.get(&(strategy.clone(), provider.clone()))
    }

    /// Providers a strategy can currently read.
    pub fn active_subscriptions(&self, strategy: &StrategyId) -> Vec<&Subscription> {
        self.subscriptions
            .values()
            .filter(|s| s.strategy == *strategy && s.status == SubscriptionStatus::Active)
            .collect()
    }

    /// Strategies currently subscribed to a provider.
    pub fn subscribers(&self, provider: &CsoId) -> Vec<&StrategyId> {
        self.subscriptions
            .values()
            .filter(|s| s.provider == *provider && s.status == SubscriptionStatus::Active)
            .map(|s| &s.strategy)
            .collect()
    }

    /// Records the aggregation weight shares a strategy used this step.
    pub fn note_aggregation_shares(
        &mut self,
        strategy: &StrategyId,
        shares: &BTreeMap<CsoId, Dec18>,
    ) {
        for (provider, share) in shares {
            self.agg_shares
                .insert((strategy.clone(), provider.clone()), *share);
        }
    }

    /// Updates s_j (total capital of subscribed strategies) for a provider.
    pub fn set_subscribed_capital(&mut self, provider: &CsoId, capital: Dec18) {
        if let Some(rec) = self.track.get_mut(provider) {
            rec.subscribed_capital = capital;
        }
    }

    pub fn track_record(&self, provider: &CsoId) -> Option<&SignalTrackRecord> {
        self.track.get(provider)
    }

    pub fn gov_multiplier(&self, provider: &CsoId) -> Dec18 {
        self.providers
            .get(provider)
            .map(|p| p.gov_multiplier)
            .unwrap_or(Dec18::ONE)
    }

    /// Appends one hypothetical epoch return r = sum_i w_i (P1_i/P0_i - 1) to
    /// the provider's rolling record and refreshes sharpe and P.
    pub fn track_signal_performance(
        &mut self,
        provider: &CsoId,
        prices_prev: &BTreeMap<AssetId, Dec18>,
        prices_now: &BTreeMap<AssetId, Dec18>,
    ) -> Result<Option<TrackUpdate>, CsoError> {
        let weights = match self.latest.get(&(provider.clone(), CsoKind::PortfolioAllocation)) {
            Some(CsoState { payload: CsoPayload::PortfolioAllocation { weights }, .. }) => {
                weights.clone()
            }
            _ => return Ok(None),
        };
        let mut r = Dec18::ZERO;
        for (asset, w) in &weights {
            if w.is_zero() {
                continue;
            }
            let p0 = prices_prev
                .get(asset)
                .copied()
                .ok_or_else(|| CsoError::MissingPrice(asset.clone()))?;
            let p1 = prices_now
                .get(asset)
                .copied()
                .ok_or_else(|| CsoError::MissingPrice(asset.clone()))?;
            let growth = p1.try_div(p0)?.try_sub(Dec18::ONE)?;
            r = r.try_add(w.try_mul(growth)?)?;
        }
        let window = self.params.w_sig_window;
        let lambda = self.params.lambda_sig;
        let epsilon = self.params.epsilon;
        let rec = self
            .track
            .get_mut(provider)
            .ok_or_else(|| CsoError::UnknownParty(provider.to_string()))?;
        rec.returns.push(r);
        if rec.returns.len() > window {
            let excess = rec.returns.len() - window;
            rec.returns.drain(..excess);
        }
        rec.sharpe = stats::sharpe(&rec.returns, epsilon)?;
        rec.perf_weight = lambda.try_mul(rec.sharpe)?.exp();
        Ok(Some(TrackUpdate { r, sharpe: rec.sharpe, perf_weight: rec.perf_weight }))
    }

    /// Settles signal fees for every subscription whose epoch ends at
    /// `height`. Budget shortfalls suspend the subscription rather than
    /// failing the block.
    pub fn accrue_signal_fees(
        &mut self,
        height: u64,
        epoch_stats: &BTreeMap<StrategyId, EpochStats>,
    ) -> Result<Vec<FeeEvent>, CsoError> {
        let mut events = Vec::new();
        let keys: Vec<(StrategyId, CsoId)> = self.subscriptions.keys().cloned().collect();
        for key in keys {
            let sub = self.subscriptions.get(&key).expect("key just listed");
            if sub.status != SubscriptionStatus::Active
                || height == 0
                || height % sub.epoch_length != 0
            {
                continue;
            }
            let (strategy, provider) = key.clone();
            let stats = epoch_stats.get(&strategy).copied().unwrap_or_default();
            match sub.model.clone() {
                FeeModel::Subscription { flat_fee } => {
                    if flat_fee.is_zero() {
                        continue;
                    }
                    if !self.charge(&strategy, &provider, flat_fee)? {
                        self.suspend(&key);
                        events.push(FeeEvent {
                            strategy,
                            provider,
                            amount: flat_fee,
                            kind: FeeEventKind::Suspended,
                        });
                        continue;
                    }
                    events.push(FeeEvent {
                        strategy,
                        provider,
                        amount: flat_fee,
                        kind: FeeEventKind::FlatFee,
                    });
                }
                FeeModel::Participation { carry_rate, .. } => {
                    let share = self
                        .agg_shares
                        .get(&key)
                        .copied()
                        .unwrap_or(Dec18::ZERO);
                    let attributable = share.try_mul(stats.pnl)?;
                    let fee = carry_rate.try_mul(attributable.max(Dec18::ZERO))?;
                    if fee.is_positive() {
                        if self.charge(&strategy, &provider, fee)? {
                            events.push(FeeEvent {
                                strategy: strategy.clone(),
                                provider: provider.clone(),
                                amount: fee,
                                kind: FeeEventKind::Carry,
                            });
                        } else {
                            self.suspend(&key);
                            events.push(FeeEvent {
                                strategy: strategy.clone(),
                                provider: provider.clone(),
                                amount: fee,
                                kind: FeeEventKind::Suspended,
                            });
                            continue;
                        }
                    }
                    // pari-passu co-capital mark at the strategy's epoch return
                    let sub = self.subscriptions.get_mut(&key).expect("still present");
                    let mark = sub.co_capital_balance.try_mul(stats.ret)?;
                    if !mark.is_zero() {
                        sub.co_capital_balance = sub.co_capital_balance.try_add(mark)?;
                        events.push(FeeEvent {
                            strategy,
                            provider,
                            amount: mark,
                            kind: FeeEventKind::CoCapitalMark,
                        });
                    }
                }
            }
        }
        Ok(events)
    }

    fn charge(
        &mut self,
        strategy: &StrategyId,
        provider: &CsoId,
        amount: Dec18,
    ) -> Result<bool, CsoError> {
        let budget = self.fee_budgets.get_mut(strategy).expect("subscriber registered");
        if *budget < amount {
            return Ok(false);
        }
        *budget = budget.try_sub(amount)?;
        let earnings = self.provider_earnings.entry(provider.clone()).or_insert(Dec18::ZERO);
        *earnings = earnings.try_add(amount)?;
        Ok(true)
    }

    fn suspend(&mut self, key: &(StrategyId, CsoId)) {
        if let Some(sub) = self.subscriptions.get_mut(key) {
            sub.status = SubscriptionStatus::Suspended;
        }
    }

    /// Runs a uniform-price access auction: winners get a subscription with a
    /// flat fee equal to the clearing price, paid once up front as well.
    pub fn run_access_auction(
        &mut self,
        provider: &CsoId,
        bids: &[(StrategyId, Dec18)],
        capacity: usize,
        epoch_length: u64,
    ) -> Result<AuctionOutcome, CsoError> {
        if !self.providers.contains_key(provider) {
            return Err(CsoError::UnknownParty(provider.to_string()));
        }
        let clearing = clear_auction(bids, capacity)?;
        let mut subscribed = Vec::new();
        let mut skipped = Vec::new();
        for winner in &clearing.winners {
            let key = (winner.clone(), provider.clone());
            if self.subscriptions.contains_key(&key) {
                skipped.push((winner.clone(), "already subscribed".to_string()));
                continue;
            }
            if !self.fee_budgets.contains_key(winner) {
                skipped.push((winner.clone(), "unknown strategy".to_string()));
                continue;
            }
            if !self.charge(winner, provider, clearing.clearing_price)? {
                skipped.push((winner.clone(), "insufficient fee budget".to_string()));
                continue;
            }
            self.subscribe(
                winner,
                provider,
                FeeModel::Subscription { flat_fee: clearing.clearing_price },
                epoch_length,
            )?;
            subscribed.push(winner.clone());
        }
        Ok(AuctionOutcome { clearing, subscribed, skipped })
    }
}

/// Pure auction clearing: top-`capacity` bids win (ties broken toward the
/// lexicographically smaller strategy id) and every winner pays the lowest
/// winning bid.
pub fn clear_auction(
    bids: &[(StrategyId, Dec18)],
    capacity: usize,
) -> Result<AuctionClearing, CsoError> {
    if capacity == 0 {
        return Err(CsoError::InvalidPayload("auction capacity must be >= 1".into()));
    }
    // highest bid per strategy, deterministically
    let mut best: BTreeMap<StrategyId, Dec18> = BTreeMap::new();
    for (who, bid) in bids {
        if bid.is_negative() {
            return Err(CsoError::InvalidPayload(format!("negative bid from {who}")));
        }
        let slot = best.entry(who.clone()).or_insert(*bid);
        if bid > slot {
            *slot = *bid;
        }
    }
    if best.is_empty() {
        return Err(CsoError::NoBids);
    }
    let mut ranked: Vec<(StrategyId, Dec18)> = best.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(capacity);
    let clearing_price = ranked.last().expect("non-empty").1;
    Ok(AuctionClearing {
        winners: ranked.into_iter().map(|(who, _)| who).collect(),
        clearing_price,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrackUpdate {
    pub r: Dec18,
    pub sharpe: Dec18,
    pub perf_weight: Dec18,
}
