//! Little-endian 64-bit limb arithmetic for exact 256-bit intermediates.
//!
//! Everything here is branch-deterministic integer math; it backs the
//! fixed-point multiply/divide kernel and the integer square root.

/// Full 128x128 -> 256 bit product, little-endian limbs.
pub fn mul_u128(a: u128, b: u128) -> [u64; 4] {
    let (a0, a1) = (a as u64 as u128, a >> 64);
    let (b0, b1) = (b as u64 as u128, b >> 64);

    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;

    let mut out = [0u64; 4];
    out[0] = p00 as u64;
    let mid = (p00 >> 64) + (p01 as u64 as u128) + (p10 as u64 as u128);
    out[1] = mid as u64;
    let hi = (mid >> 64) + (p01 >> 64) + (p10 >> 64) + (p11 as u64 as u128);
    out[2] = hi as u64;
    out[3] = ((hi >> 64) + (p11 >> 64)) as u64;
    out
}

/// Schoolbook product of two limb slices. `out` must hold a.len() + b.len() limbs
/// and be zeroed by the caller.
pub fn mul_limbs(a: &[u64], b: &[u64], out: &mut [u64]) {
    debug_assert!(out.len() >= a.len() + b.len());
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        let mut carry: u128 = 0;
        for (j, &bj) in b.iter().enumerate() {
            let cur = out[i + j] as u128 + ai as u128 * bj as u128 + carry;
            out[i + j] = cur as u64;
            carry = cur >> 64;
        }
        let mut k = i + b.len();
        while carry != 0 {
            let cur = out[k] as u128 + carry;
            out[k] = cur as u64;
            carry = cur >> 64;
            k += 1;
        }
    }
}

/// Number of significant limbs (at least 1 so zero has length 1).
pub fn sig_len(a: &[u64]) -> usize {
    let mut n = a.len();
    while n > 1 && a[n - 1] == 0 {
        n -= 1;
    }
    n
}

/// Lexicographic compare of two limb slices of possibly different lengths.
pub fn cmp_limbs(a: &[u64], b: &[u64]) -> core::cmp::Ordering {
    let (la, lb) = (sig_len(a), sig_len(b));
    if la != lb {
        return la.cmp(&lb);
    }
    for i in (0..la).rev() {
        if a[i] != b[i] {
            return a[i].cmp(&b[i]);
        }
    }
    core::cmp::Ordering::Equal
}

/// Try to read a limb slice back into a u128; None if it does not fit.
pub fn to_u128(a: &[u64]) -> Option<u128> {
    if sig_len(a) > 2 {
        return None;
    }
    let lo = a[0] as u128;
    let hi = if a.len() > 1 { a[1] as u128 } else { 0 };
    Some((hi << 64) | lo)
}

const MAX_LIMBS: usize = 8;

/// Truncating division of a limb slice by a limb slice (Knuth algorithm D).
///
/// Returns (quotient, remainder) with fixed capacity. Panics if the divisor is
/// zero or either operand exceeds the supported width.
pub fn div_rem(u_in: &[u64], v_in: &[u64]) -> ([u64; MAX_LIMBS], [u64; MAX_LIMBS]) {
    let m = sig_len(u_in);
    let n = sig_len(v_in);
    assert!(m <= MAX_LIMBS && n <= MAX_LIMBS, "operand too wide");
    assert!(!(n == 1 && v_in[0] == 0), "division by zero");

    let mut q = [0u64; MAX_LIMBS];
    let mut r = [0u64; MAX_LIMBS];

    if cmp_limbs(&u_in[..m], &v_in[..n]) == core::cmp::Ordering::Less {
        r[..m].copy_from_slice(&u_in[..m]);
        return (q, r);
    }

    if n == 1 {
        let d = v_in[0] as u128;
        let mut rem: u128 = 0;
        for i in (0..m).rev() {
            let cur = (rem << 64) | u_in[i] as u128;
            q[i] = (cur / d) as u64;
            rem = cur % d;
        }
        r[0] = rem as u64;
        return (q, r);
    }

    // Normalize so the top divisor limb has its high bit set.
    let s = v_in[n - 1].leading_zeros();
    let mut v = [0u64; MAX_LIMBS];
    for i in (1..n).rev() {
        v[i] = (v_in[i] << s) | shr_part(v_in[i - 1], s);
    }
    v[0] = v_in[0] << s;

    let mut u = [0u64; MAX_LIMBS + 1];
    u[m] = shr_part(u_in[m - 1], s);
    for i in (1..m).rev() {
        u[i] = (u_in[i] << s) | shr_part(u_in[i - 1], s);
    }
    u[0] = u_in[0] << s;

    let vn1 = v[n - 1] as u128;
    let vn2 = v[n - 2] as u128;
    for j in (0..=(m - n)).rev() {
        let top = ((u[j + n] as u128) << 64) | u[j + n - 1] as u128;
        let mut qhat = top / vn1;
        let mut rhat = top % vn1;
        loop {
            if qhat >= 1 << 64 || qhat * vn2 > (rhat << 64) + u[j + n - 2] as u128 {
                qhat -= 1;
                rhat += vn1;
                if rhat < 1 << 64 {
                    continue;
                }
            }
            break;
        }

        // u[j..=j+n] -= qhat * v[0..n]
        let mut mul_carry: u128 = 0;
        let mut borrow = false;
        for i in 0..n {
            let p = qhat * v[i] as u128 + mul_carry;
            mul_carry = p >> 64;
            let (d1, b1) = u[j + i].overflowing_sub(p as u64);
            let (d2, b2) = d1.overflowing_sub(borrow as u64);
            u[j + i] = d2;
            borrow = b1 || b2;
        }
        let (d1, b1) = u[j + n].overflowing_sub(mul_carry as u64);
        let (d2, b2) = d1.overflowing_sub(borrow as u64);
        u[j + n] = d2;

        if b1 || b2 {
            // qhat was one too large; add the divisor back.
            qhat -= 1;
            let mut carry: u128 = 0;
            for i in 0..n {
                let sum = u[j + i] as u128 + v[i] as u128 + carry;
                u[j + i] = sum as u64;
                carry = sum >> 64;
            }
            u[j + n] = u[j + n].wrapping_add(carry as u64);
        }
        q[j] = qhat as u64;
    }

    // Denormalize the remainder.
    for i in 0..n - 1 {
        r[i] = (u[i] >> s) | shl_part(u[i + 1], s);
    }
    r[n - 1] = u[n - 1] >> s;
    (q, r)
}

#[inline]
fn shr_part(x: u64, s: u32) -> u64 {
    if s == 0 {
        0
    } else {
        x >> (64 - s)
    }
}

#[inline]
fn shl_part(x: u64, s: u32) -> u64 {
    if s == 0 {
        0
    } else {
        x << (64 - s)
    }
}

/// Largest r with r^2 <= n, for n up to 256 bits. Bisection on the result bits
/// keeps this exact and platform-independent.
pub fn isqrt(n: &[u64; 4]) -> u128 {
    if sig_len(n) <= 2 {
        // Fits u128: bisect there directly.
        let val = to_u128(n).expect("sig_len checked");
        return isqrt_u128(val);
    }
    let mut lo: u128 = 0;
    let mut hi: u128 = u128::MAX;
    while lo < hi {
        let d = hi - lo;
        let mid = lo + d / 2 + (d & 1); // ceil midpoint without overflow
        let sq = mul_u128(mid, mid);
        if cmp_limbs(&sq, n) == core::cmp::Ordering::Greater {
            hi = mid - 1;
        } else {
            lo = mid;
        }
    }
    lo
}

fn isqrt_u128(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut lo: u128 = 0;
    let mut hi: u128 = 1 << (n.ilog2() / 2 + 1);
    while lo < hi {
        let mid = lo + (hi - lo + 1) / 2;
        match mid.checked_mul(mid) {
            Some(sq) if sq <= n => lo = mid,
            _ => hi = mid - 1,
        }
    }
    lo
}
