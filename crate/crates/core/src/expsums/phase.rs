//! Exact-phase helpers.
//!
//! For `P ~ 2^20` and `n ~ 5` the raw product `α·xⁿ` is ~`2^100`, far past
//! the point where an f64 retains any fractional bits, so every phase is
//! reduced mod 1 *before* trig: the integer part of `α` is dropped first,
//! and the product of the remaining fraction with the exact integer `xⁿ` is
//! formed in 192-bit integer arithmetic and reduced there.

/// `x^n` in 128 bits, or `None` on overflow.
pub(crate) fn pow_u128(x: u64, n: u32) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..n {
        acc = acc.checked_mul(x as u128)?;
    }
    Some(acc)
}

/// Signed distance to the nearest integer, in `[−0.5, 0.5]`. The
/// subtraction is exact (both operands share a ulp grid and the result is
/// small), so `frac_signed(−α) = −frac_signed(α)` holds bit-for-bit; that is
/// what makes conjugate symmetry of the sums exact.
pub(crate) fn frac_signed(alpha: f64) -> f64 {
    alpha - alpha.round()
}

/// Phase `zf·m mod 1` centered into `(−0.5, 0.5]`, for `zf ∈ [−0.5, 0.5]`
/// and integer `m`. Negating `zf` negates the result exactly.
pub(crate) fn phase_mul(zf: f64, m: u128) -> f64 {
    let p0 = frac_mul(zf.abs(), m);
    // p0 − 1 is exact for p0 in (0.5, 1)
    let centered = if p0 > 0.5 { p0 - 1.0 } else { p0 };
    if zf < 0.0 {
        -centered
    } else {
        centered
    }
}

/// `frac(zf · m)` for `zf ∈ [0, 1)` and integer `m`, without losing the
/// fractional bits. Callers normally want [`phase_mul`], which keeps sign
/// symmetry; this is its unsigned core.
///
/// Writes `zf = mant · 2^e` exactly (mant ≤ 2^53), forms the 192-bit product
/// `mant · m`, discards whole multiples of `2^{-e}`, and only converts the
/// remainder to f64. Absolute error is a few ulps, independent of the size
/// of `m`.
pub(crate) fn frac_mul(zf: f64, m: u128) -> f64 {
    debug_assert!((0.0..1.0).contains(&zf));
    if zf == 0.0 || m == 0 {
        return 0.0;
    }
    let bits = zf.to_bits();
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    let frac_bits = bits & ((1u64 << 52) - 1);
    let (mant, e) = if exp_bits == 0 {
        (frac_bits, -1074i64)
    } else {
        (frac_bits | (1u64 << 52), exp_bits - 1075)
    };
    let shift = -e; // zf < 1 forces e <= -53
    debug_assert!(shift >= 53);

    if shift >= 192 {
        // zf < 2^-140, so zf*m < 2^-13: nothing to reduce.
        return zf * m as f64;
    }

    // 192-bit product mant * m as limbs [low, mid, high].
    let m_lo = m as u64;
    let m_hi = (m >> 64) as u64;
    let p_lo = (mant as u128) * (m_lo as u128);
    let p_hi = (mant as u128) * (m_hi as u128);
    let l0 = p_lo as u64;
    let mid = p_hi + (p_lo >> 64);
    let l1 = mid as u64;
    let l2 = (mid >> 64) as u64;

    // Keep only the low `shift` bits: those are the fractional part
    // numerator over 2^shift.
    let (f0, f1, f2) = if shift >= 128 {
        (l0, l1, l2 & low_mask(shift - 128))
    } else if shift >= 64 {
        (l0, l1 & low_mask(shift - 64), 0)
    } else {
        (l0 & low_mask(shift), 0, 0)
    };

    let f = (f2 as f64) * 2f64.powi(128) + (f1 as f64) * 2f64.powi(64) + (f0 as f64);
    let r = f * 2f64.powi(-(shift as i32));
    if r >= 1.0 {
        r - 1.0
    } else {
        r
    }
}

fn low_mask(bits: i64) -> u64 {
    debug_assert!((0..=64).contains(&bits));
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// `base^exp mod modulus` for u64 inputs.
pub(crate) fn pow_mod(base: u64, exp: u32, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let mut acc: u128 = 1;
    let mut b: u128 = (base % modulus) as u128;
    let m = modulus as u128;
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc as u64
}
