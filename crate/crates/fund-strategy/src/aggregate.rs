//! Capital- and performance-weighted aggregation of provider weight vectors:
//!
//!   W = (1/Z) * sum_j s_j * P_j * g_j * w_j,   Z = sum_j s_j * P_j * g_j
//!
//! Each scalar weight m_j = s_j * P_j * g_j is kept as an exact 256-bit
//! integer product and each component term m_j * w_ji / Z is truncated once,
//! so the result is within one raw unit per provider of the exact rational
//! value. The ratio form makes the single-provider case exact and any common
//! scaling of the s_j cancel identically.

use fund_ledger::{wide, CsoId, Dec18, SCALE};

use crate::error::StrategyError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProviderSignal {
    pub provider: CsoId,
    /// Weight vector aligned to the caller's ordered asset list.
    pub weights: Vec<Dec18>,
    /// Capital managed by strategies subscribed to this provider (s_j >= 0).
    pub capital: Dec18,
    /// Performance weight P_j > 0.
    pub perf_weight: Dec18,
    /// Governance multiplier g_j >= 0.
    pub gov_multiplier: Dec18,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AggregateOutcome {
    pub weights: Vec<Dec18>,
    /// Normalised provider shares m_j / Z, for fee attribution.
    pub shares: Vec<(CsoId, Dec18)>,
}

/// 6-limb scalar weight m_j = s_raw * P_raw * g_raw (scale 10^54).
fn scalar_weight(sig: &ProviderSignal) -> Result<[u64; 6], StrategyError> {
    for (name, v) in [
        ("capital", sig.capital),
        ("perf_weight", sig.perf_weight),
        ("gov_multiplier", sig.gov_multiplier),
    ] {
        if v.is_negative() {
            return Err(StrategyError::BadSignal(format!(
                "{name} for {} must be >= 0, got {v}",
                sig.provider
            )));
        }
    }
    let sp = wide::mul_u128(sig.capital.raw() as u128, sig.perf_weight.raw() as u128);
    let mut out = [0u64; 6];
    wide::mul_limbs(&sp, &[sig.gov_multiplier.raw() as u64, (sig.gov_multiplier.raw() as u128 >> 64) as u64], &mut out);
    Ok(out)
}

pub fn aggregate_signals(signals: &[ProviderSignal]) -> Result<AggregateOutcome, StrategyError> {
    if signals.is_empty() {
        return Err(StrategyError::DegenerateWeights);
    }
    let n = signals[0].weights.len();
    for sig in signals {
        if sig.weights.len() != n {
            return Err(StrategyError::BadSignal(format!(
                "weight vector for {} has length {}, expected {n}",
                sig.provider,
                sig.weights.len()
            )));
        }
    }

    let scalars: Vec<[u64; 6]> = signals
        .iter()
        .map(scalar_weight)
        .collect::<Result<_, _>>()?;

    // Z = sum of scalar weights, 7 limbs.
    let mut z = [0u64; 7];
    for m in &scalars {
        let mut carry: u128 = 0;
        for i in 0..7 {
            let add = if i < 6 { m[i] as u128 } else { 0 };
            let cur = z[i] as u128 + add + carry;
            z[i] = cur as u64;
            carry = cur >> 64;
        }
        debug_assert_eq!(carry, 0, "Z cannot overflow 7 limbs for realistic inputs");
    }
    if wide::sig_len(&z) == 1 && z[0] == 0 {
        return Err(StrategyError::DegenerateWeights);
    }

    // Per-component: W_i = sum_j trunc(m_j * w_ji / Z), one truncation per term.
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc: i128 = 0;
        for (j, sig) in signals.iter().enumerate() {
            let w = sig.weights[i].raw();
            if w == 0 {
                continue;
            }
            let mag = w.unsigned_abs();
            let mut numerator = [0u64; 8];
            wide::mul_limbs(&scalars[j], &[mag as u64, (mag >> 64) as u64], &mut numerator);
            let (q, _) = wide::div_rem(&numerator, &z);
            let term = wide::to_u128(&q[..wide::sig_len(&q)])
                .ok_or(StrategyError::Math(fund_ledger::LedgerError::Overflow))?;
            debug_assert!(term <= SCALE as u128, "|term| is bounded by |w| <= 1");
            acc += if w < 0 { -(term as i128) } else { term as i128 };
        }
        weights.push(Dec18::from_raw(acc));
    }

    // Provider shares u_j = m_j / Z on the Dec18 grid.
    let mut shares = Vec::with_capacity(signals.len());
    for (j, sig) in signals.iter().enumerate() {
        let mut numerator = [0u64; 8];
        wide::mul_limbs(&scalars[j], &[SCALE as u64, 0], &mut numerator);
        let (q, _) = wide::div_rem(&numerator, &z);
        let share = wide::to_u128(&q[..wide::sig_len(&q)])
            .ok_or(StrategyError::Math(fund_ledger::LedgerError::Overflow))?;
        shares.push((sig.provider.clone(), Dec18::from_raw(share as i128)));
    }

    Ok(AggregateOutcome { weights, shares })
}

/// Projects a weight vector into the constraint set sum |W_i| <= 1 and
/// |W_i| <= cap: clip each component first, then rescale the whole vector by
/// 1/sum|W_i| if the L1 norm still exceeds one. Idempotent.
pub fn enforce_caps(weights: &[Dec18], cap: Dec18) -> Result<Vec<Dec18>, StrategyError> {
    if !cap.is_positive() || cap > Dec18::ONE {
        return Err(StrategyError::BadSignal(format!("per-asset cap {cap} not in (0, 1]")));
    }
    let mut out: Vec<Dec18> = weights
        .iter()
        .map(|w| (*w).clamp(cap.try_neg().expect("cap <= 1"), cap))
        .collect();
    let mut l1 = Dec18::ZERO;
    for w in &out {
        l1 = l1.try_add(w.abs()?)?;
    }
    if l1 > Dec18::ONE {
        for w in out.iter_mut() {
            *w = w.try_div(l1)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use fund_ledger::{cso, dec};

    fn sig(name: &str, weights: &[&str], s: &str, p: &str, g: &str) -> ProviderSignal {
        ProviderSignal {
            provider: cso(name),
            weights: weights.iter().map(|w| dec(w)).collect(),
            capital: dec(s),
            perf_weight: dec(p),
            gov_multiplier: dec(g),
        }
    }

    #[test]
    fn single_provider_is_identity() {
        let w = ["0.37", "-0.21", "0.123456789123456789"];
        let out = aggregate_signals(&[sig("a", &w, "17.3", "2.5", "1")]).unwrap();
        assert_eq!(out.weights, w.iter().map(|x| dec(x)).collect::<Vec<_>>());
        assert_eq!(out.shares[0].1, Dec18::ONE);
    }

    #[test]
    fn symmetric_providers_average() {
        let out = aggregate_signals(&[
            sig("a", &["1", "0"], "1", "1", "1"),
            sig("b", &["0", "1"], "1", "1", "1"),
        ])
        .unwrap();
        assert_eq!(out.weights, vec![dec("0.5"), dec("0.5")]);
        assert_eq!(out.shares[0].1, dec("0.5"));
    }

    #[test]
    fn two_provider_oracle_case() {
        // s=(2,1), P=(1.5,1), g=(1,1): Z = 4, W = (3*[0.6,0.4] + 1*[0.2,0.8])/4 = [0.5,0.5]
        let out = aggregate_signals(&[
            sig("a", &["0.6", "0.4"], "2", "1.5", "1"),
            sig("b", &["0.2", "0.8"], "1", "1", "1"),
        ])
        .unwrap();
        assert_eq!(out.weights, vec![dec("0.5"), dec("0.5")]);
        assert_eq!(out.shares, vec![(cso("a"), dec("0.75")), (cso("b"), dec("0.25"))]);
    }

    #[test]
    fn zero_mass_is_degenerate() {
        let err = aggregate_signals(&[sig("a", &["1"], "0", "1", "1")]).unwrap_err();
        assert_eq!(err, StrategyError::DegenerateWeights);
    }

    #[test]
    fn caps_clip_then_rescale() {
        // clip only: [0.6, 0.6, -0.2] at cap 0.4 -> [0.4, 0.4, -0.2], L1 = 1.0
        let out = enforce_caps(&[dec("0.6"), dec("0.6"), dec("-0.2")], dec("0.4")).unwrap();
        assert_eq!(out, vec![dec("0.4"), dec("0.4"), dec("-0.2")]);

        // rescale: [0.4, 0.4, 0.4] at cap 0.5 -> L1 1.2 -> thirds
        let third = dec("0.333333333333333333");
        let out = enforce_caps(&[dec("0.4"), dec("0.4"), dec("0.4")], dec("0.5")).unwrap();
        assert_eq!(out, vec![third, third, third]);

        // zero vector unchanged
        let out = enforce_caps(&[Dec18::ZERO, Dec18::ZERO], dec("0.4")).unwrap();
        assert_eq!(out, vec![Dec18::ZERO, Dec18::ZERO]);
    }

    #[test]
    fn caps_idempotent_on_examples() {
        for (v, cap) in [
            (vec![dec("0.6"), dec("0.6"), dec("-0.2")], dec("0.4")),
            (vec![dec("0.4"), dec("0.4"), dec("0.4")], dec("0.5")),
            (vec![dec("-0.9"), dec("0.8"), dec("0.7")], dec("0.35")),
        ] {
            let once = enforce_caps(&v, cap).unwrap();
            let twice = enforce_caps(&once, cap).unwrap();
            assert_eq!(once, twice);
        }
    }
}
