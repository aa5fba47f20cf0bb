//! Typed, nonce-versioned oracle states. Each state is a (kind, data) pair
//! over one of the capital-management activity kinds; the disjoint-union
//! structure keeps payloads of different activities from being confused.

use fund_ledger::{AssetId, CsoId, Dec18, VenueId};
use serde::{Deserialize, Serialize};

use crate::error::CsoError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CsoKind {
    PortfolioAllocation,
    Categorical,
    MarketMaking,
    Arbitrage,
    LiquidityProvision,
    Yield,
    RewardAllocation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quote {
    pub asset: AssetId,
    pub bid: Dec18,
    pub bid_vol: Dec18,
    pub ask: Dec18,
    pub ask_vol: Dec18,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Buy,
    Sell,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArbitrageLeg {
    pub venue: VenueId,
    pub asset_in: AssetId,
    pub asset_out: AssetId,
    pub side: Side,
    pub qty: Dec18,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpAllocation {
    pub pool: VenueId,
    pub notional: Dec18,
    pub duration_blocks: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct YieldOffer {
    pub instrument: AssetId,
    pub yield_per_year: Dec18,
    pub maturity_blocks: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CsoPayload {
    PortfolioAllocation { weights: Vec<(AssetId, Dec18)> },
    /// Buy/hold/sell decisions in {-1, 0, +1}.
    Categorical { decisions: Vec<(AssetId, i8)> },
    MarketMaking { quotes: Vec<Quote> },
    Arbitrage { legs: Vec<ArbitrageLeg>, spread: Dec18 },
    LiquidityProvision { allocations: Vec<LpAllocation> },
    Yield { offers: Vec<YieldOffer> },
    RewardAllocation {
        #[serde(with = "hex_root")]
        merkle_root: [u8; 32],
        emission_per_epoch: Dec18,
    },
}

mod hex_root {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(root: &[u8; 32], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(root))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[u8; 32], D::Error> {
        let raw = String::deserialize(d)?;
        let bytes = hex::decode(&raw).map_err(serde::de::Error::custom)?;
        bytes
            .try_into()
            .map_err(|_| serde::de::Error::custom("merkle root must be 32 bytes"))
    }
}

impl CsoPayload {
    pub fn kind(&self) -> CsoKind {
        match self {
            CsoPayload::PortfolioAllocation { .. } => CsoKind::PortfolioAllocation,
            CsoPayload::Categorical { .. } => CsoKind::Categorical,
            CsoPayload::MarketMaking { .. } => CsoKind::MarketMaking,
            CsoPayload::Arbitrage { .. } => CsoKind::Arbitrage,
            CsoPayload::LiquidityProvision { .. } => CsoKind::LiquidityProvision,
            CsoPayload::Yield { .. } => CsoKind::Yield,
            CsoPayload::RewardAllocation { .. } => CsoKind::RewardAllocation,
        }
    }

    /// Checks the payload invariants, naming the violated one.
    pub fn validate(&self) -> Result<(), CsoError> {
        let bad = |msg: String| Err(CsoError::InvalidPayload(msg));
        match self {
            CsoPayload::PortfolioAllocation { weights } => {
                let mut sum_abs = Dec18::ZERO;
                let mut seen = std::collections::BTreeSet::new();
                for (asset, w) in weights {
                    if !seen.insert(asset.clone()) {
                        return bad(format!("duplicate asset {asset} in weight vector"));
                    }
                    let a = w.abs()?;
                    if a > Dec18::ONE {
                        return bad(format!("|w[{asset}]| = {a} exceeds 1"));
                    }
                    sum_abs = sum_abs.try_add(a)?;
                }
                if sum_abs > Dec18::ONE {
                    return bad(format!("sum of |w| = {sum_abs} exceeds 1"));
                }
            }
            CsoPayload::Categorical { decisions } => {
                for (asset, c) in decisions {
                    if !matches!(c, -1 | 0 | 1) {
                        return bad(format!("decision for {asset} must be in {{-1, 0, 1}}, got {c}"));
                    }
                }
            }
            CsoPayload::MarketMaking { quotes } => {
                for q in quotes {
                    if !q.bid.is_positive() || q.bid > q.ask {
                        return bad(format!("quote for {} must satisfy 0 < bid <= ask", q.asset));
                    }
                    if q.bid_vol.is_negative() || q.ask_vol.is_negative() {
                        return bad(format!("quote volumes for {} must be >= 0", q.asset));
                    }
                }
            }
            CsoPayload::Arbitrage { legs, .. } => {
                if legs.is_empty() {
                    return bad("arbitrage bundle needs at least one leg".into());
                }
                for leg in legs {
                    if !leg.qty.is_positive() {
                        return bad(format!("leg quantity on {} must be positive", leg.venue));
                    }
                }
            }
            CsoPayload::LiquidityProvision { allocations } => {
                for a in allocations {
                    if !a.notional.is_positive() || a.duration_blocks == 0 {
                        return bad(format!(
                            "allocation to {} needs positive notional and duration",
                            a.pool
                        ));
                    }
                }
            }
            CsoPayload::Yield { offers } => {
                for o in offers {
                    if o.maturity_blocks == 0 {
                        return bad(format!("maturity for {} must be positive", o.instrument));
                    }
                }
            }
            CsoPayload::RewardAllocation { emission_per_epoch, .. } => {
                if emission_per_epoch.is_negative() {
                    return bad("emission_per_epoch must be >= 0".into());
                }
            }
        }
        Ok(())
    }
}

/// A published oracle state: the latest (kind, data) tuple for a provider.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsoState {
    pub provider: CsoId,
    pub nonce: u64,
    pub published_at: u64,
    pub payload: CsoPayload,
}

#[cfg(test)]
mod tests {
    use super::*;
    use fund_ledger::{asset, dec};

    #[test]
    fn weight_cap_rule() {
        let ok = CsoPayload::PortfolioAllocation {
            weights: vec![(asset("A"), dec("0.5")), (asset("B"), dec("-0.5"))],
        };
        assert!(ok.validate().is_ok());

        let over = CsoPayload::PortfolioAllocation {
            weights: vec![(asset("A"), dec("0.7")), (asset("B"), dec("0.5"))],
        };
        assert!(matches!(over.validate(), Err(CsoError::InvalidPayload(_))));
    }

    #[test]
    fn categorical_values_constrained() {
        let ok = CsoPayload::Categorical { decisions: vec![(asset("A"), -1), (asset("B"), 1)] };
        assert!(ok.validate().is_ok());
        let bad = CsoPayload::Categorical { decisions: vec![(asset("A"), 2)] };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn market_making_spread_rule() {
        let bad = CsoPayload::MarketMaking {
            quotes: vec![Quote {
                asset: asset("A"),
                bid: dec("2"),
                bid_vol: dec("1"),
                ask: dec("1.5"),
                ask_vol: dec("1"),
            }],
        };
        assert!(bad.validate().is_err());
    }
}
