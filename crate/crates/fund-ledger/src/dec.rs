//! Signed fixed-point numbers with 18 fractional decimal digits.
//!
//! `Dec18` is the universal numeric for quantities, prices, weights and fees.
//! The backing representation is an `i128` of raw units (value * 10^18); all
//! arithmetic is exact integer arithmetic with truncation toward zero, and
//! overflow is an error, never a wraparound. No floating point is involved
//! anywhere, so results are bit-identical across platforms.

use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use crate::error::LedgerError;
use crate::wide;

/// Raw units per 1.0.
pub const SCALE: i128 = 1_000_000_000_000_000_000;
const SCALE_U: u128 = SCALE as u128;
const FRAC_DIGITS: usize = 18;

/// 18-decimal fixed-point number backed by an `i128` of raw units.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Dec18 {
    raw: i128,
}

impl Dec18 {
    pub const ZERO: Dec18 = Dec18 { raw: 0 };
    pub const ONE: Dec18 = Dec18 { raw: SCALE };
    /// Smallest positive increment (10^-18).
    pub const RAW_UNIT: Dec18 = Dec18 { raw: 1 };
    pub const MAX: Dec18 = Dec18 { raw: i128::MAX };
    pub const MIN: Dec18 = Dec18 { raw: -i128::MAX };

    #[inline]
    pub const fn from_raw(raw: i128) -> Dec18 {
        Dec18 { raw }
    }

    #[inline]
    pub const fn raw(self) -> i128 {
        self.raw
    }

    /// Whole-number constructor; exact for the full i64 range.
    #[inline]
    pub const fn from_int(n: i64) -> Dec18 {
        Dec18 { raw: n as i128 * SCALE }
    }

    /// Convenience for basis points (1 bp = 10^-4).
    #[inline]
    pub const fn from_bps(bps: u32) -> Dec18 {
        Dec18 { raw: bps as i128 * (SCALE / 10_000) }
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.raw == 0
    }

    #[inline]
    pub fn is_negative(self) -> bool {
        self.raw < 0
    }

    #[inline]
    pub fn is_positive(self) -> bool {
        self.raw > 0
    }

    pub fn try_add(self, rhs: Dec18) -> Result<Dec18, LedgerError> {
        self.raw
            .checked_add(rhs.raw)
            .map(Dec18::from_raw)
            .ok_or(LedgerError::Overflow)
    }

    pub fn try_sub(self, rhs: Dec18) -> Result<Dec18, LedgerError> {
        self.raw
            .checked_sub(rhs.raw)
            .map(Dec18::from_raw)
            .ok_or(LedgerError::Overflow)
    }

    pub fn try_neg(self) -> Result<Dec18, LedgerError> {
        self.raw
            .checked_neg()
            .map(Dec18::from_raw)
            .ok_or(LedgerError::Overflow)
    }

    pub fn abs(self) -> Result<Dec18, LedgerError> {
        if self.raw == i128::MIN {
            return Err(LedgerError::Overflow);
        }
        Ok(Dec18::from_raw(self.raw.abs()))
    }

    /// Truncating product: trunc(a.raw * b.raw / 10^18).
    pub fn try_mul(self, rhs: Dec18) -> Result<Dec18, LedgerError> {
        mul_div_i128(self.raw, rhs.raw, SCALE)
    }

    /// Truncating quotient: trunc(a.raw * 10^18 / b.raw).
    pub fn try_div(self, rhs: Dec18) -> Result<Dec18, LedgerError> {
        if rhs.raw == 0 {
            return Err(LedgerError::DivisionByZero);
        }
        mul_div_i128(self.raw, SCALE, rhs.raw)
    }

    /// trunc(a * b / d) with an exact 256-bit intermediate — one truncation
    /// total, which is what pro-rata share math needs.
    pub fn mul_div(self, mul: Dec18, div: Dec18) -> Result<Dec18, LedgerError> {
        if div.raw == 0 {
            return Err(LedgerError::DivisionByZero);
        }
        mul_div_i128(self.raw, mul.raw, div.raw)
    }

    /// Exact truncating division by a positive integer.
    pub fn div_int(self, n: u64) -> Result<Dec18, LedgerError> {
        if n == 0 {
            return Err(LedgerError::DivisionByZero);
        }
        Ok(Dec18::from_raw(self.raw / n as i128))
    }

    pub fn min(self, other: Dec18) -> Dec18 {
        if self.raw <= other.raw {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Dec18) -> Dec18 {
        if self.raw >= other.raw {
            self
        } else {
            other
        }
    }

    /// Clamp into [lo, hi].
    pub fn clamp(self, lo: Dec18, hi: Dec18) -> Dec18 {
        debug_assert!(lo <= hi);
        self.max(lo).min(hi)
    }

    /// Checked sum of an iterator.
    pub fn try_sum<I: IntoIterator<Item = Dec18>>(iter: I) -> Result<Dec18, LedgerError> {
        let mut acc = Dec18::ZERO;
        for v in iter {
            acc = acc.try_add(v)?;
        }
        Ok(acc)
    }

    /// Floor square root on the Dec18 grid: floor(sqrt(value)).
    pub fn sqrt(self) -> Result<Dec18, LedgerError> {
        if self.raw < 0 {
            return Err(LedgerError::NegativeSqrt);
        }
        // sqrt(raw / S) = isqrt(raw * S) / S on the raw grid.
        let prod = wide::mul_u128(self.raw as u128, SCALE_U);
        let root = wide::isqrt(&prod);
        Ok(Dec18::from_raw(root as i128))
    }

    /// Fixed-point exponential. The argument is clamped to [-20, 20]; the
    /// Taylor series is truncated once a term underflows the raw grid.
    pub fn exp(self) -> Dec18 {
        let x = self.clamp(Dec18::from_int(-20), Dec18::from_int(20));
        let pos = exp_nonneg(Dec18::from_raw(x.raw.abs()));
        if x.raw >= 0 {
            pos
        } else {
            // exp(20) fits comfortably, so the reciprocal cannot divide by zero.
            Dec18::ONE.try_div(pos).expect("exp(|x|) >= 1")
        }
    }
}

fn exp_nonneg(x: Dec18) -> Dec18 {
    debug_assert!(x.raw >= 0 && x <= Dec18::from_int(20));
    let mut sum = Dec18::ONE;
    let mut term = Dec18::ONE;
    for k in 1..=200u64 {
        term = term
            .try_mul(x)
            .and_then(|t| t.div_int(k))
            .expect("bounded argument cannot overflow");
        if term.raw == 0 {
            break;
        }
        sum = sum.try_add(term).expect("exp(20) fits in Dec18");
    }
    sum
}

/// trunc(a * b / d) over i128 with a 256-bit intermediate, truncation toward
/// zero, `Overflow` if the result leaves the i128 range.
fn mul_div_i128(a: i128, b: i128, d: i128) -> Result<Dec18, LedgerError> {
    debug_assert!(d != 0);
    let negative = (a < 0) ^ (b < 0) ^ (d < 0);
    let prod = wide::mul_u128(a.unsigned_abs(), b.unsigned_abs());
    let divisor = d.unsigned_abs();
    let dv = [divisor as u64, (divisor >> 64) as u64];
    let (q, _) = wide::div_rem(&prod, &dv);
    let mag = wide::to_u128(&q[..wide::sig_len(&q)]).ok_or(LedgerError::Overflow)?;
    if negative {
        if mag > i128::MAX as u128 {
            return Err(LedgerError::Overflow);
        }
        Ok(Dec18::from_raw(-(mag as i128)))
    } else {
        if mag > i128::MAX as u128 {
            return Err(LedgerError::Overflow);
        }
        Ok(Dec18::from_raw(mag as i128))
    }
}

impl fmt::Display for Dec18 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mag = self.raw.unsigned_abs();
        let int = mag / SCALE_U;
        let frac = mag % SCALE_U;
        if self.raw < 0 {
            write!(f, "-")?;
        }
        if frac == 0 {
            write!(f, "{int}")
        } else {
            let digits = format!("{frac:018}");
            write!(f, "{int}.{}", digits.trim_end_matches('0'))
        }
    }
}

impl fmt::Debug for Dec18 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dec18({self})")
    }
}

impl FromStr for Dec18 {
    type Err = LedgerError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || LedgerError::InvalidDecimal(s.to_string());
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        if body.is_empty() {
            return Err(bad());
        }
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() || !int_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        if body.contains('.') {
            if frac_part.is_empty() || frac_part.len() > FRAC_DIGITS {
                return Err(bad());
            }
            if !frac_part.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
        }
        let int: u128 = int_part.parse().map_err(|_| bad())?;
        let mut frac: u128 = 0;
        if !frac_part.is_empty() {
            frac = frac_part.parse().map_err(|_| bad())?;
            frac *= 10u128.pow((FRAC_DIGITS - frac_part.len()) as u32);
        }
        let mag = int
            .checked_mul(SCALE_U)
            .and_then(|v| v.checked_add(frac))
            .ok_or(LedgerError::Overflow)?;
        if mag > i128::MAX as u128 {
            return Err(LedgerError::Overflow);
        }
        let raw = if neg { -(mag as i128) } else { mag as i128 };
        Ok(Dec18::from_raw(raw))
    }
}

impl serde::Serialize for Dec18 {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for Dec18 {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl PartialOrd<i64> for Dec18 {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        self.partial_cmp(&Dec18::from_int(*other))
    }
}

impl PartialEq<i64> for Dec18 {
    fn eq(&self, other: &i64) -> bool {
        *self == Dec18::from_int(*other)
    }
}

/// Parse a decimal literal, panicking on malformed input. For tests and
/// compiled-in constants only; runtime inputs go through `FromStr`.
pub fn dec(s: &str) -> Dec18 {
    s.parse().unwrap_or_else(|e| panic!("bad Dec18 literal {s:?}: {e}"))
}
