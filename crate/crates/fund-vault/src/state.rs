//! The vault state machine: holdings partitioned by owning strategy, the
//! V-token share ledger, NAV and fee accounting, and per-strategy attribution.
//!
//! Every position carries a marked value in the value book (its quantity
//! times price, truncated). All mutations go through the book, so the sum of
//! recorded deltas reproduces the NAV change exactly — that is what makes the
//! per-block conservation identity hold to the raw unit. Deltas are tagged by
//! why they happened: price moves, fills and yield are PnL and feed
//! attribution; deposits and withdrawals are flows; internal capital transfers
//! and fee settlements touch neither.

use std::collections::BTreeMap;

use fund_ledger::{wide, AccountId, AssetId, Dec18, StrategyId, VaultId, VenueId};
use serde::{Deserialize, Serialize};

use crate::config::VaultConfig;
use crate::error::VaultError;
use crate::intent::{CheckedIntent, ExecutionIntent, Fill, IntentAction};

pub type PriceMap = BTreeMap<AssetId, Dec18>;

/// Who a position belongs to. Idle capital that no strategy manages sits in
/// the reserved `Unallocated` bucket.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Owner {
    Unallocated,
    Strategy(StrategyId),
}

impl Owner {
    pub fn label(&self) -> String {
        match self {
            Owner::Unallocated => "unallocated".to_string(),
            Owner::Strategy(s) => s.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BookKey {
    Spot { owner: Owner, asset: AssetId },
    Venue { venue: VenueId, strategy: StrategyId, asset: AssetId },
}

impl BookKey {
    fn owner(&self) -> Owner {
        match self {
            BookKey::Spot { owner, .. } => owner.clone(),
            BookKey::Venue { strategy, .. } => Owner::Strategy(strategy.clone()),
        }
    }

    fn asset(&self) -> &AssetId {
        match self {
            BookKey::Spot { asset, .. } | BookKey::Venue { asset, .. } => asset,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyStatus {
    Proposed,
    Validated,
    Active,
    Retired,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrategyEntry {
    pub alpha: Dec18,
    pub status: StrategyStatus,
    /// Mark-to-market value of the strategy's non-numeraire positions.
    pub deployed_notional: Dec18,
}

/// PnL deltas per owner produced by one operation.
pub type AttributionDeltas = Vec<(Owner, Dec18)>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vault {
    pub id: VaultId,
    pub config: VaultConfig,
    /// Spot quantities per (owner, asset); every quantity is >= 0.
    spot: BTreeMap<(Owner, AssetId), Dec18>,
    /// Liquidation quantity (principal + accrued) per venue position, mirrored
    /// from the venue as fills and yield events arrive.
    venue_qty: BTreeMap<(VenueId, StrategyId, AssetId), Dec18>,
    /// Marked value of every position at the prices last seen.
    book: BTreeMap<BookKey, Dec18>,
    share_supply: Dec18,
    share_balances: BTreeMap<AccountId, Dec18>,
    strategies: BTreeMap<StrategyId, StrategyEntry>,
    /// Accrued management fees f, a liability subtracted from NAV.
    accrued_fees: Dec18,
    /// Cumulative PnL per owner, including the unallocated bucket.
    attribution: BTreeMap<Owner, Dec18>,
    /// Share-price high-water mark (reserved for performance fees).
    pub hwm: Dec18,
    /// Redemption shortfall flagged for liquidity-providing strategies.
    pub pending_redemptions: Dec18,
}

impl Vault {
    /// Deploys an empty vault after checking every config invariant.
    pub fn deploy(id: VaultId, config: VaultConfig) -> Result<Vault, VaultError> {
        config.validate()?;
        Ok(Vault {
            id,
            config,
            spot: BTreeMap::new(),
            venue_qty: BTreeMap::new(),
            book: BTreeMap::new(),
            share_supply: Dec18::ZERO,
            share_balances: BTreeMap::new(),
            strategies: BTreeMap::new(),
            accrued_fees: Dec18::ZERO,
            attribution: BTreeMap::new(),
            hwm: Dec18::ONE,
            pending_redemptions: Dec18::ZERO,
        })
    }

    /// Registers a strategy in the vault's strategy set. Initial alpha is
    /// respected only for genesis-active strategies.
    pub fn register_strategy(
        &mut self,
        id: StrategyId,
        status: StrategyStatus,
        alpha: Dec18,
    ) -> Result<(), VaultError> {
        if alpha.is_negative() {
            return Err(VaultError::InvalidConfig {
                field: "alpha",
                reason: format!("alpha for {id} must be >= 0"),
            });
        }
        let total = Dec18::try_sum(
            self.strategies
                .values()
                .filter(|e| e.status == StrategyStatus::Active)
                .map(|e| e.alpha),
        )?;
        if status == StrategyStatus::Active && total.try_add(alpha)? > Dec18::ONE {
            return Err(VaultError::InvalidConfig {
                field: "alpha",
                reason: "sum of active alphas would exceed 1".to_string(),
            });
        }
        self.strategies
            .insert(id, StrategyEntry { alpha, status, deployed_notional: Dec18::ZERO });
        Ok(())
    }

    pub fn strategy(&self, id: &StrategyId) -> Option<&StrategyEntry> {
        self.strategies.get(id)
    }

    pub fn strategies(&self) -> impl Iterator<Item = (&StrategyId, &StrategyEntry)> {
        self.strategies.iter()
    }

    pub fn set_strategy_status(
        &mut self,
        id: &StrategyId,
        status: StrategyStatus,
    ) -> Result<(), VaultError> {
        let entry = self
            .strategies
            .get_mut(id)
            .ok_or_else(|| VaultError::UnknownStrategy(id.clone()))?;
        entry.status = status;
        Ok(())
    }

    /// Replaces the allocation vector. The caller (allocator or governance)
    /// is responsible for bounds; the simplex constraint is enforced here.
    pub fn set_alphas(&mut self, alphas: &BTreeMap<StrategyId, Dec18>) -> Result<(), VaultError> {
        let mut total = Dec18::ZERO;
        for (id, alpha) in alphas {
            if alpha.is_negative() {
                return Err(VaultError::InvalidProposal(format!("alpha for {id} must be >= 0")));
            }
            if !self.strategies.contains_key(id) {
                return Err(VaultError::UnknownStrategy(id.clone()));
            }
            total = total.try_add(*alpha)?;
        }
        if total > Dec18::ONE {
            return Err(VaultError::InvalidProposal(format!("sum of alphas {total} exceeds 1")));
        }
        for (id, alpha) in alphas {
            self.strategies.get_mut(id).expect("checked above").alpha = *alpha;
        }
        Ok(())
    }

    pub fn share_supply(&self) -> Dec18 {
        self.share_supply
    }

    pub fn share_balance(&self, account: &AccountId) -> Dec18 {
        self.share_balances.get(account).copied().unwrap_or(Dec18::ZERO)
    }

    pub fn share_balances(&self) -> &BTreeMap<AccountId, Dec18> {
        &self.share_balances
    }

    pub fn accrued_fees(&self) -> Dec18 {
        self.accrued_fees
    }

    pub fn attribution(&self) -> &BTreeMap<Owner, Dec18> {
        &self.attribution
    }

    pub fn spot_qty(&self, owner: &Owner, asset: &AssetId) -> Dec18 {
        self.spot.get(&(owner.clone(), asset.clone())).copied().unwrap_or(Dec18::ZERO)
    }

    pub fn spot_positions(&self) -> &BTreeMap<(Owner, AssetId), Dec18> {
        &self.spot
    }

    pub fn venue_positions(&self) -> &BTreeMap<(VenueId, StrategyId, AssetId), Dec18> {
        &self.venue_qty
    }

    /// Numeraire cash in the unallocated bucket — the redemption pool.
    pub fn free_cash(&self) -> Dec18 {
        self.spot_qty(&Owner::Unallocated, &self.config.numeraire.clone())
    }

    /// Price of one asset with the numeraire pinned to exactly 1.0.
    fn price_of(&self, prices: &PriceMap, asset: &AssetId) -> Result<Dec18, VaultError> {
        if *asset == self.config.numeraire {
            return Ok(Dec18::ONE);
        }
        prices
            .get(asset)
            .copied()
            .ok_or_else(|| VaultError::MissingPrice(asset.clone()))
    }

    /// Net asset value: sum of spot and venue position values at the given
    /// prices, minus accrued fees. Recomputed from scratch.
    pub fn nav(&self, prices: &PriceMap) -> Result<Dec18, VaultError> {
        Ok(self.gross_nav(prices)?.try_sub(self.accrued_fees)?)
    }

    /// Liquidation value before fees.
    pub fn gross_nav(&self, prices: &PriceMap) -> Result<Dec18, VaultError> {
        let mut total = Dec18::ZERO;
        for ((_, asset), qty) in &self.spot {
            if qty.is_zero() {
                continue;
            }
            total = total.try_add(qty.try_mul(self.price_of(prices, asset)?)?)?;
        }
        for ((_, _, asset), qty) in &self.venue_qty {
            if qty.is_zero() {
                continue;
            }
            total = total.try_add(qty.try_mul(self.price_of(prices, asset)?)?)?;
        }
        Ok(total)
    }

    /// Sum of the marked value book minus fees; equals `nav` whenever the book
    /// has been remarked at the same prices.
    pub fn marked_nav(&self) -> Result<Dec18, VaultError> {
        Ok(Dec18::try_sum(self.book.values().copied())?.try_sub(self.accrued_fees)?)
    }

    /// Share price NAV / supply; zero while the vault is empty.
    pub fn share_price(&self, prices: &PriceMap) -> Result<Dec18, VaultError> {
        if self.share_supply.is_zero() {
            return Ok(Dec18::ZERO);
        }
        Ok(self.nav(prices)?.try_div(self.share_supply)?)
    }

    fn remark(&mut self, key: BookKey, qty: Dec18, price: Dec18) -> Result<Dec18, VaultError> {
        let value = qty.try_mul(price)?;
        let prev = self.book.get(&key).copied().unwrap_or(Dec18::ZERO);
        if value.is_zero() && qty.is_zero() {
            self.book.remove(&key);
        } else {
            self.book.insert(key, value);
        }
        Ok(value.try_sub(prev)?)
    }

    /// Marks every position at the given prices, crediting the exact value
    /// change of each position to its owner's attribution. Call once per block
    /// right after the oracle refresh.
    pub fn reprice(&mut self, prices: &PriceMap) -> Result<AttributionDeltas, VaultError> {
        let keys: Vec<(BookKey, Dec18)> = self
            .spot
            .iter()
            .map(|((owner, asset), qty)| {
                (BookKey::Spot { owner: owner.clone(), asset: asset.clone() }, *qty)
            })
            .chain(self.venue_qty.iter().map(|((venue, strategy, asset), qty)| {
                (
                    BookKey::Venue {
                        venue: venue.clone(),
                        strategy: strategy.clone(),
                        asset: asset.clone(),
                    },
                    *qty,
                )
            }))
            .collect();
        let mut deltas = AttributionDeltas::new();
        for (key, qty) in keys {
            let price = self.price_of(prices, key.asset())?;
            let owner = key.owner();
            let delta = self.remark(key, qty, price)?;
            if !delta.is_zero() {
                self.credit_attribution(&owner, delta)?;
                deltas.push((owner, delta));
            }
        }
        self.refresh_deployed()?;
        Ok(deltas)
    }

    fn credit_attribution(&mut self, owner: &Owner, delta: Dec18) -> Result<(), VaultError> {
        let slot = self.attribution.entry(owner.clone()).or_insert(Dec18::ZERO);
        *slot = slot.try_add(delta)?;
        Ok(())
    }

    /// Applies a spot quantity change and remarks the position, returning the
    /// exact book-value delta. The caller decides what the delta means.
    fn apply_spot(
        &mut self,
        owner: Owner,
        asset: AssetId,
        qty_delta: Dec18,
        price: Dec18,
    ) -> Result<Dec18, VaultError> {
        let slot = self.spot.entry((owner.clone(), asset.clone())).or_insert(Dec18::ZERO);
        let next = slot.try_add(qty_delta)?;
        if next.is_negative() {
            let available = *slot;
            return Err(VaultError::InsufficientHoldings {
                asset,
                requested: qty_delta.abs()?,
                available,
            });
        }
        *slot = next;
        if next.is_zero() {
            self.spot.remove(&(owner.clone(), asset.clone()));
        }
        self.remark(BookKey::Spot { owner, asset }, next, price)
    }

    fn apply_venue(
        &mut self,
        venue: VenueId,
        strategy: StrategyId,
        asset: AssetId,
        qty_delta: Dec18,
        price: Dec18,
    ) -> Result<Dec18, VaultError> {
        let key = (venue.clone(), strategy.clone(), asset.clone());
        let slot = self.venue_qty.entry(key.clone()).or_insert(Dec18::ZERO);
        let next = slot.try_add(qty_delta)?;
        if next.is_negative() {
            let available = *slot;
            return Err(VaultError::InsufficientHoldings {
                asset,
                requested: qty_delta.abs()?,
                available,
            });
        }
        *slot = next;
        if next.is_zero() {
            self.venue_qty.remove(&key);
        }
        self.remark(BookKey::Venue { venue, strategy, asset }, next, price)
    }

    /// Deposit a basket of admissible assets; mints shares pro rata. The first
    /// deposit bootstraps the share price at 1.0.
    pub fn deposit(
        &mut self,
        account: &AccountId,
        basket: &BTreeMap<AssetId, Dec18>,
        prices: &PriceMap,
    ) -> Result<DepositReceipt, VaultError> {
        if basket.is_empty() {
            return Err(VaultError::InvalidIntent("deposit basket is empty".into()));
        }
        let mut value = Dec18::ZERO;
        for (asset, qty) in basket {
            if !self.config.admissible_assets.contains(asset) {
                return Err(VaultError::InadmissibleAsset(asset.clone()));
            }
            if !qty.is_positive() {
                return Err(VaultError::InvalidIntent(format!(
                    "deposit quantity of {asset} must be positive"
                )));
            }
            value = value.try_add(qty.try_mul(self.price_of(prices, asset)?)?)?;
        }
        if value < self.config.min_deposit_value {
            return Err(VaultError::BelowMinimum {
                value,
                minimum: self.config.min_deposit_value,
            });
        }

        let shares = if self.share_supply.is_zero() {
            value
        } else {
            let nav = self.nav(prices)?;
            if !nav.is_positive() {
                return Err(VaultError::VaultInsolvent);
            }
            value.mul_div(self.share_supply, nav)?
        };
        if shares.is_zero() {
            return Err(VaultError::ZeroShares);
        }

        let mut flow = Dec18::ZERO;
        for (asset, qty) in basket {
            let price = self.price_of(prices, asset)?;
            flow = flow.try_add(self.apply_spot(Owner::Unallocated, asset.clone(), *qty, price)?)?;
        }
        self.share_supply = self.share_supply.try_add(shares)?;
        let bal = self.share_balances.entry(account.clone()).or_insert(Dec18::ZERO);
        *bal = bal.try_add(shares)?;
        Ok(DepositReceipt { shares, value, flow })
    }

    /// Burn shares for a numeraire payout. Truncation favours the remaining
    /// holders; a liquidity shortfall flags `pending_redemptions` so staking
    /// strategies can unwind.
    pub fn withdraw(
        &mut self,
        account: &AccountId,
        shares: Dec18,
        prices: &PriceMap,
    ) -> Result<WithdrawReceipt, VaultError> {
        if !shares.is_positive() {
            return Err(VaultError::InvalidIntent("withdrawal shares must be positive".into()));
        }
        let balance = self.share_balance(account);
        if shares > balance {
            return Err(VaultError::InsufficientShares { requested: shares, balance });
        }
        let nav = self.nav(prices)?;
        if !nav.is_positive() {
            return Err(VaultError::VaultInsolvent);
        }
        let payout = shares.mul_div(nav, self.share_supply)?;
        let cash = self.free_cash();
        if payout > cash {
            let shortfall = payout.try_sub(cash)?;
            self.pending_redemptions = self.pending_redemptions.try_add(shortfall)?;
            return Err(VaultError::InsufficientLiquidity { requested: payout, available: cash });
        }

        let numeraire = self.config.numeraire.clone();
        let flow =
            self.apply_spot(Owner::Unallocated, numeraire, payout.try_neg()?, Dec18::ONE)?;
        self.share_supply = self.share_supply.try_sub(shares)?;
        let bal = self.share_balances.get_mut(account).expect("balance checked");
        *bal = bal.try_sub(shares)?;
        if bal.is_zero() {
            self.share_balances.remove(account);
        }
        self.pending_redemptions = if payout >= self.pending_redemptions {
            Dec18::ZERO
        } else {
            self.pending_redemptions.try_sub(payout)?
        };
        Ok(WithdrawReceipt { payout, flow })
    }

    /// Accrues one block of management fee against gross NAV.
    pub fn accrue_management_fee(
        &mut self,
        prices: &PriceMap,
        blocks_per_year: u64,
    ) -> Result<Dec18, VaultError> {
        let gross = self.gross_nav(prices)?;
        if !gross.is_positive() || self.config.mgmt_fee_rate.is_zero() {
            return Ok(Dec18::ZERO);
        }
        let delta = gross.try_mul(self.config.mgmt_fee_rate)?.div_int(blocks_per_year)?;
        self.accrued_fees = self.accrued_fees.try_add(delta)?;
        Ok(delta)
    }

    /// Settles accrued fees out of unallocated numeraire cash. NAV-neutral:
    /// the cash reduction and the liability release cancel exactly.
    pub fn harvest_fees(&mut self) -> Result<Dec18, VaultError> {
        let fees = self.accrued_fees;
        if fees.is_zero() {
            return Ok(Dec18::ZERO);
        }
        let cash = self.free_cash();
        if fees > cash {
            return Err(VaultError::InsufficientLiquidity { requested: fees, available: cash });
        }
        let numeraire = self.config.numeraire.clone();
        self.apply_spot(Owner::Unallocated, numeraire, fees.try_neg()?, Dec18::ONE)?;
        self.accrued_fees = Dec18::ZERO;
        Ok(fees)
    }

    /// Moves numeraire cash between the unallocated pool and a strategy's
    /// book. Pure ownership transfer: NAV, flows and attribution all unchanged.
    pub fn transfer_capital(
        &mut self,
        strategy: &StrategyId,
        amount: Dec18,
        to_strategy: bool,
    ) -> Result<(), VaultError> {
        if amount.is_zero() {
            return Ok(());
        }
        if amount.is_negative() {
            return Err(VaultError::InvalidIntent("transfer amount must be >= 0".into()));
        }
        if !self.strategies.contains_key(strategy) {
            return Err(VaultError::UnknownStrategy(strategy.clone()));
        }
        let numeraire = self.config.numeraire.clone();
        let (from, to) = if to_strategy {
            (Owner::Unallocated, Owner::Strategy(strategy.clone()))
        } else {
            (Owner::Strategy(strategy.clone()), Owner::Unallocated)
        };
        let available = self.spot_qty(&from, &numeraire);
        if amount > available {
            return Err(VaultError::InsufficientLiquidity { requested: amount, available });
        }
        let out = self.apply_spot(from, numeraire.clone(), amount.try_neg()?, Dec18::ONE)?;
        let inn = self.apply_spot(to, numeraire, amount, Dec18::ONE)?;
        debug_assert_eq!(out.try_add(inn), Ok(Dec18::ZERO), "numeraire transfer must net to zero");
        Ok(())
    }

    /// Applies a venue fill for a checked intent. Attribution gets the exact
    /// mark-to-market value change of the touched positions at current prices.
    pub fn apply_fill(
        &mut self,
        checked: &CheckedIntent,
        fill: &Fill,
        prices: &PriceMap,
    ) -> Result<Dec18, VaultError> {
        let strategy = checked.intent.strategy.clone();
        let owner = Owner::Strategy(strategy.clone());
        let venue = checked.intent.venue.clone();
        let mut pnl = Dec18::ZERO;
        match (&checked.intent.action, fill) {
            (
                IntentAction::Trade { asset_in, asset_out, .. },
                Fill::Trade { qty_in, qty_out },
            ) => {
                let p_in = self.price_of(prices, asset_in)?;
                let p_out = self.price_of(prices, asset_out)?;
                pnl = pnl.try_add(self.apply_spot(
                    owner.clone(),
                    asset_in.clone(),
                    qty_in.try_neg()?,
                    p_in,
                )?)?;
                pnl = pnl.try_add(self.apply_spot(
                    owner.clone(),
                    asset_out.clone(),
                    *qty_out,
                    p_out,
                )?)?;
            }
            (IntentAction::Stake { asset, .. }, Fill::Stake { qty }) => {
                let price = self.price_of(prices, asset)?;
                pnl = pnl.try_add(self.apply_spot(
                    owner.clone(),
                    asset.clone(),
                    qty.try_neg()?,
                    price,
                )?)?;
                pnl = pnl.try_add(self.apply_venue(
                    venue,
                    strategy.clone(),
                    asset.clone(),
                    *qty,
                    price,
                )?)?;
            }
            (IntentAction::Unstake { asset, .. }, Fill::Unstake { returned }) => {
                let price = self.price_of(prices, asset)?;
                pnl = pnl.try_add(self.apply_venue(
                    venue,
                    strategy.clone(),
                    asset.clone(),
                    returned.try_neg()?,
                    price,
                )?)?;
                pnl = pnl.try_add(self.apply_spot(owner.clone(), asset.clone(), *returned, price)?)?;
            }
            (action, fill) => {
                return Err(VaultError::InvalidIntent(format!(
                    "fill {fill:?} does not match intent function {}",
                    action.function_name()
                )));
            }
        }
        self.credit_attribution(&owner, pnl)?;
        self.refresh_deployed()?;
        Ok(pnl)
    }

    /// Books one block of staking yield into the venue position mirror. The
    /// exact value change is PnL for the owning strategy.
    pub fn accrue_venue_yield(
        &mut self,
        venue: &VenueId,
        strategy: &StrategyId,
        asset: &AssetId,
        qty_delta: Dec18,
        prices: &PriceMap,
    ) -> Result<Dec18, VaultError> {
        if qty_delta.is_zero() {
            return Ok(Dec18::ZERO);
        }
        let price = self.price_of(prices, asset)?;
        let delta = self.apply_venue(
            venue.clone(),
            strategy.clone(),
            asset.clone(),
            qty_delta,
            price,
        )?;
        let owner = Owner::Strategy(strategy.clone());
        self.credit_attribution(&owner, delta)?;
        self.refresh_deployed()?;
        Ok(delta)
    }

    /// Recomputes each strategy's deployed notional from the value book:
    /// non-numeraire spot plus all venue positions.
    fn refresh_deployed(&mut self) -> Result<(), VaultError> {
        let numeraire = self.config.numeraire.clone();
        let mut totals: BTreeMap<StrategyId, Dec18> = BTreeMap::new();
        for (key, value) in &self.book {
            let strategy = match key {
                BookKey::Spot { owner: Owner::Strategy(s), asset } if *asset != numeraire => s,
                BookKey::Venue { strategy, .. } => strategy,
                _ => continue,
            };
            let slot = totals.entry(strategy.clone()).or_insert(Dec18::ZERO);
            *slot = slot.try_add(*value)?;
        }
        for (id, entry) in self.strategies.iter_mut() {
            entry.deployed_notional = totals.get(id).copied().unwrap_or(Dec18::ZERO);
        }
        Ok(())
    }

    /// Updates the share-price high-water mark.
    pub fn update_hwm(&mut self, prices: &PriceMap) -> Result<(), VaultError> {
        let price = self.share_price(prices)?;
        if price > self.hwm {
            self.hwm = price;
        }
        Ok(())
    }

    /// Total book value of one strategy's positions including its cash.
    pub fn strategy_capital(&self, strategy: &StrategyId) -> Result<Dec18, VaultError> {
        let mut total = Dec18::ZERO;
        for (key, value) in &self.book {
            let owned = match key {
                BookKey::Spot { owner: Owner::Strategy(s), .. } => s == strategy,
                BookKey::Venue { strategy: s, .. } => s == strategy,
                BookKey::Spot { owner: Owner::Unallocated, .. } => false,
            };
            if owned {
                total = total.try_add(*value)?;
            }
        }
        Ok(total)
    }

    /// Five-bound intent gate. Checks run in a fixed order and each rejection
    /// names the violated bound:
    /// (a) strategy active, (b) venue and function whitelisted, (c) assets
    /// admissible, (d) exposure-increasing notional within the strategy's
    /// remaining allocation, (e) venue capital cap respected.
    pub fn check_intent(
        &self,
        intent: &ExecutionIntent,
        prices: &PriceMap,
    ) -> Result<CheckedIntent, VaultError> {
        intent.validate()?;

        // (a)
        let entry = self
            .strategies
            .get(&intent.strategy)
            .ok_or_else(|| VaultError::StrategyNotActive(intent.strategy.clone()))?;
        if entry.status != StrategyStatus::Active {
            return Err(VaultError::StrategyNotActive(intent.strategy.clone()));
        }

        // (b)
        let perms = self
            .config
            .venues
            .get(&intent.venue)
            .ok_or_else(|| VaultError::VenueNotAllowed(intent.venue.clone()))?;
        let function = intent.action.function_name();
        if !perms.functions.contains(function) {
            return Err(VaultError::FunctionNotAllowed {
                venue: intent.venue.clone(),
                function: function.to_string(),
            });
        }

        // (c)
        for asset in intent.action.referenced_assets() {
            if !self.config.admissible_assets.contains(asset) {
                return Err(VaultError::InadmissibleAsset(asset.clone()));
            }
        }

        // notional of the input leg at current prices
        let (asset_in, qty_in) = intent.action.input();
        let notional = qty_in.try_mul(self.price_of(prices, asset_in)?)?;

        // (d)
        if intent.action.increases_exposure(&self.config.numeraire) {
            let nav = self.nav(prices)?;
            let limit = entry.alpha.try_mul(nav.max(Dec18::ZERO))?;
            let projected = entry.deployed_notional.try_add(notional)?;
            if projected > limit {
                return Err(VaultError::AllocationExceeded { requested: projected, limit });
            }
        }

        // (e)
        if intent.action.consumes_venue_capacity() {
            let mut deployed_at_venue = Dec18::ZERO;
            for ((v, _, asset), qty) in &self.venue_qty {
                if *v != intent.venue {
                    continue;
                }
                deployed_at_venue =
                    deployed_at_venue.try_add(qty.try_mul(self.price_of(prices, asset)?)?)?;
            }
            let projected = deployed_at_venue.try_add(notional)?;
            if projected > perms.capital_cap {
                return Err(VaultError::VenueCapExceeded {
                    venue: intent.venue.clone(),
                    requested: projected,
                    cap: perms.capital_cap,
                });
            }
        }

        Ok(CheckedIntent { intent: intent.clone(), notional })
    }

    /// Inclusive weighted-vote comparison: yes/participating >= threshold and
    /// participating/supply >= quorum, evaluated by exact cross-multiplication.
    pub fn governance_passes(
        &self,
        votes: &BTreeMap<AccountId, bool>,
    ) -> Result<bool, VaultError> {
        let mut yes = Dec18::ZERO;
        let mut participating = Dec18::ZERO;
        for (account, choice) in votes {
            let weight = self.share_balance(account);
            participating = participating.try_add(weight)?;
            if *choice {
                yes = yes.try_add(weight)?;
            }
        }
        if self.share_supply.is_zero() || participating.is_zero() {
            return Ok(false);
        }
        Ok(ratio_at_least(participating, self.share_supply, self.config.gov_quorum)
            && ratio_at_least(yes, participating, self.config.gov_threshold))
    }
}

/// num/den >= bound, exact (no truncation), for non-negative operands.
fn ratio_at_least(num: Dec18, den: Dec18, bound: Dec18) -> bool {
    debug_assert!(!num.is_negative() && den.is_positive() && !bound.is_negative());
    let lhs = wide::mul_u128(num.raw().unsigned_abs(), fund_ledger::SCALE as u128);
    let rhs = wide::mul_u128(bound.raw().unsigned_abs(), den.raw().unsigned_abs());
    wide::cmp_limbs(&lhs, &rhs) != std::cmp::Ordering::Less
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepositReceipt {
    pub shares: Dec18,
    /// Deposit value used for share pricing.
    pub value: Dec18,
    /// Exact NAV change booked by the deposit.
    pub flow: Dec18,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WithdrawReceipt {
    pub payout: Dec18,
    /// Exact NAV change booked by the withdrawal (negative).
    pub flow: Dec18,
}
