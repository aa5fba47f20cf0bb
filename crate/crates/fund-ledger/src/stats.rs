//! Rolling-window statistics on the Dec18 grid.

use crate::dec::Dec18;
use crate::error::LedgerError;

/// Mean of a return window; empty windows are zero.
pub fn mean(returns: &[Dec18]) -> Result<Dec18, LedgerError> {
    if returns.is_empty() {
        return Ok(Dec18::ZERO);
    }
    Dec18::try_sum(returns.iter().copied())?.div_int(returns.len() as u64)
}

/// Population standard deviation (divide by n, not n-1).
pub fn std_dev(returns: &[Dec18]) -> Result<Dec18, LedgerError> {
    if returns.is_empty() {
        return Ok(Dec18::ZERO);
    }
    let mu = mean(returns)?;
    let mut acc = Dec18::ZERO;
    for r in returns {
        let d = r.try_sub(mu)?;
        acc = acc.try_add(d.try_mul(d)?)?;
    }
    acc.div_int(returns.len() as u64)?.sqrt()
}

/// Sharpe ratio mean/std with the deviation floored at `eps` so flat windows
/// stay finite. Empty windows are zero.
pub fn sharpe(returns: &[Dec18], eps: Dec18) -> Result<Dec18, LedgerError> {
    if returns.is_empty() {
        return Ok(Dec18::ZERO);
    }
    let mu = mean(returns)?;
    let sigma = std_dev(returns)?.max(eps);
    mu.try_div(sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dec::dec;

    #[test]
    fn flat_and_symmetric_windows_are_zero() {
        let eps = dec("0.000001");
        assert_eq!(sharpe(&[], eps).unwrap(), Dec18::ZERO);
        assert_eq!(sharpe(&[Dec18::ZERO; 4], eps).unwrap(), Dec18::ZERO);
        assert_eq!(sharpe(&[dec("0.03"), dec("-0.03")], eps).unwrap(), Dec18::ZERO);
    }

    #[test]
    fn three_point_window_matches_scalar_oracle() {
        // returns [0.01, 0.02, 0.03]: mean 0.02, population std sqrt(2/3)*0.01.
        // Frozen from the integer oracle; the real value is 2.449489742783178...
        let eps = dec("0.000001");
        let got = sharpe(&[dec("0.01"), dec("0.02"), dec("0.03")], eps).unwrap();
        assert_eq!(got.raw(), 2_449_489_742_783_190_496);
        let real = dec("2.449489742783178098");
        assert!((got.raw() - real.raw()).abs() < 100_000, "got {got}");
    }
}
