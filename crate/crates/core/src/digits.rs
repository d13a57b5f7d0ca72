//! Binary and base-4 digit primitives.
//!
//! Everything downstream is built on the sign `ε(n)`, which is `+1` when the
//! binary expansion of `n` has an even number of ones and `−1` otherwise.
//! The positive integers split into the class with even digit sum
//! ([`DigitClass::Class0`]) and its complement ([`DigitClass::Class1`]).
//! This module also provides the base-4 digit statistic `κ₁₂` and the exact
//! evaluation of `Σ (3/4)^{κ₁₂(h)}` over a full base-4 block, which equals
//! `(7/2)^t` as a rational identity.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};

/// Upper bound on `t` accepted by [`identity_sum`]. Beyond this the block
/// `4^t` no longer fits the enumeration/census budget for exact arithmetic.
pub const IDENTITY_SUM_MAX_T: u32 = 20;

/// Largest `t` evaluated by literal enumeration of all `4^t` values of `h`;
/// larger `t` use the exact per-digit census, which computes the same sum.
const IDENTITY_SUM_ENUM_MAX_T: u32 = 12;

/// The sign attached to `n` by the parity of its binary digit sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EpsilonSign {
    /// Even number of ones (`ε = +1`).
    Plus,
    /// Odd number of ones (`ε = −1`).
    Minus,
}

impl EpsilonSign {
    /// The numeric value, `+1` or `−1`.
    #[inline]
    pub fn value(self) -> i64 {
        match self {
            EpsilonSign::Plus => 1,
            EpsilonSign::Minus => -1,
        }
    }
}

impl std::ops::Mul for EpsilonSign {
    type Output = EpsilonSign;

    #[inline]
    fn mul(self, rhs: EpsilonSign) -> EpsilonSign {
        if self == rhs {
            EpsilonSign::Plus
        } else {
            EpsilonSign::Minus
        }
    }
}

/// Class label of a positive integer under the digit-sum-parity partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DigitClass {
    /// Even number of binary ones (`ε = +1`).
    Class0,
    /// Odd number of binary ones (`ε = −1`).
    Class1,
}

/// `ε(n)`: `+1` iff `popcount(n)` is even.
///
/// `ε(0) = +1` by convention (zero ones is even); this keeps the block
/// identity `ε(2^K y + m) = ε(y) ε(m)` valid without special cases.
#[inline]
pub fn epsilon(n: u64) -> EpsilonSign {
    if n.count_ones() & 1 == 0 {
        EpsilonSign::Plus
    } else {
        EpsilonSign::Minus
    }
}

/// `ε(n)` as a bare `i64`, for hot summation loops.
#[inline]
pub fn epsilon_i64(n: u64) -> i64 {
    1 - 2 * ((n.count_ones() & 1) as i64)
}

/// Class membership of a positive integer. Rejects `n = 0`: the classes
/// partition the positive integers only.
pub fn classify(n: u64) -> Result<DigitClass> {
    if n == 0 {
        return Err(Error::ZeroNotClassified);
    }
    Ok(match epsilon(n) {
        EpsilonSign::Plus => DigitClass::Class0,
        EpsilonSign::Minus => DigitClass::Class1,
    })
}

/// Base-4 digit statistics of a number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Base4Stats {
    /// Count of base-4 digits equal to 1 or 2.
    pub kappa12: u32,
    /// Base-4 digits, least significant first. Empty for input 0.
    pub digits: Vec<u8>,
}

impl Base4Stats {
    /// Reassemble the original input from the digits.
    pub fn reconstruct(&self) -> u64 {
        self.digits
            .iter()
            .rev()
            .fold(0u64, |acc, &d| acc * 4 + u64::from(d))
    }
}

/// `κ₁₂(h)`: the number of base-4 digits of `h` equal to 1 or 2, over all
/// digits.
pub fn kappa12(h: u64) -> Base4Stats {
    let mut digits = Vec::new();
    let mut kappa = 0u32;
    let mut rest = h;
    while rest > 0 {
        let d = (rest & 3) as u8;
        if d == 1 || d == 2 {
            kappa += 1;
        }
        digits.push(d);
        rest >>= 2;
    }
    Base4Stats {
        kappa12: kappa,
        digits,
    }
}

/// Exact value of `Σ_{h=0}^{4^t − 1} (3/4)^{κ₁₂(h)}`.
///
/// Equals `(7/2)^t` exactly; the caller compares against
/// [`seven_halves_pow`]. For `t` up to [`IDENTITY_SUM_ENUM_MAX_T`] the sum is
/// produced by literal enumeration of all `4^t` values of `h`; for larger `t`
/// an exact digit census (count of `h` per `κ₁₂` value, built one digit at a
/// time) yields the identical sum without the full enumeration. Both routes
/// stay in exact integer/rational arithmetic.
pub fn identity_sum(t: u32) -> Result<BigRational> {
    if t == 0 || t > IDENTITY_SUM_MAX_T {
        return Err(Error::IdentitySumRange {
            t,
            max: IDENTITY_SUM_MAX_T,
        });
    }
    // tally[s] = #{h < 4^t : kappa12(h) = s}
    let tally: Vec<u128> = if t <= IDENTITY_SUM_ENUM_MAX_T {
        let mut tally = vec![0u128; t as usize + 1];
        for h in 0..4u64.pow(t) {
            tally[kappa12(h).kappa12 as usize] += 1;
        }
        tally
    } else {
        // Appending one more base-4 digit: two digit choices (0, 3) keep
        // kappa, two (1, 2) raise it by one.
        let mut tally = vec![1u128];
        for _ in 0..t {
            let mut next = vec![0u128; tally.len() + 1];
            for (s, &c) in tally.iter().enumerate() {
                next[s] += 2 * c;
                next[s + 1] += 2 * c;
            }
            tally = next;
        }
        tally
    };

    // Σ_s tally[s] · 3^s / 4^s, assembled over the common denominator 4^t.
    let mut numer = BigInt::from(0);
    let four = BigInt::from(4);
    let three = BigInt::from(3);
    for (s, &c) in tally.iter().enumerate() {
        let term = BigInt::from(c) * three.pow(s as u32) * four.pow(t - s as u32);
        numer += term;
    }
    Ok(BigRational::new(numer, four.pow(t)))
}

/// `(7/2)^t` as an exact rational; the closed form [`identity_sum`] must hit.
pub fn seven_halves_pow(t: u32) -> BigRational {
    BigRational::new(BigInt::from(7).pow(t), BigInt::from(2).pow(t))
}

/// Checks `ε(2^K y + m) ε(2^K y + m + h) = ε(m) ε(m + h)` for all
/// `0 ≤ m < 2^K − h` and `0 ≤ y ≤ y_max`.
///
/// The identity is exact (digit blocks below and above bit `K` are
/// independent), so this always returns `true`; it exists as an executable
/// witness.
///
/// # Panics
/// If `h >= 2^K` (caller contract) or `K >= 64`.
pub fn progression_identity_check(k_bits: u32, h: u64, y_max: u64) -> bool {
    assert!(k_bits < 64, "2^K must fit in u64");
    let block = 1u64 << k_bits;
    assert!(h < block, "shift h must be smaller than the progression step");
    for m in 0..(block - h) {
        let base = epsilon_i64(m) * epsilon_i64(m + h);
        for y in 0..=y_max {
            let n = block * y + m;
            if epsilon_i64(n) * epsilon_i64(n + h) != base {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Signed, Zero};
    use proptest::prelude::*;

    #[test]
    fn epsilon_examples() {
        assert_eq!(epsilon(3).value(), 1); // 11₂
        assert_eq!(epsilon(1).value(), -1);
        assert_eq!(epsilon(2).value(), -1);
        assert_eq!(epsilon(7).value(), -1); // 111₂
        assert_eq!(epsilon(0).value(), 1); // convention
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(9).unwrap(), DigitClass::Class0); // 1001₂
        assert_eq!(classify(1).unwrap(), DigitClass::Class1);
        assert_eq!(classify(12).unwrap(), DigitClass::Class0); // 1100₂
        assert!(matches!(classify(0), Err(Error::ZeroNotClassified)));
    }

    #[test]
    fn block_multiplicativity() {
        // epsilon(2^K y + m) = epsilon(y) * epsilon(m) whenever m < 2^K.
        for k in [1u32, 3, 8, 13] {
            for y in [0u64, 1, 2, 5, 100, 977] {
                for m in [0u64, 1, (1 << k) - 1, (1 << k) / 2] {
                    assert_eq!(
                        epsilon_i64((y << k) + m),
                        epsilon_i64(y) * epsilon_i64(m)
                    );
                }
            }
        }
    }

    #[test]
    fn class0_census_in_power_of_two_ranges() {
        // In [1, 2^L] exactly 2^{L-1} - 1 members have even digit sum:
        // half of [0, 2^L) does, 0 is excluded, and 2^L itself is odd-sum.
        for l in 1..=16u32 {
            let count = (1..=(1u64 << l))
                .filter(|&n| classify(n).unwrap() == DigitClass::Class0)
                .count() as u64;
            assert_eq!(count, (1 << (l - 1)) - 1, "L = {l}");
        }
    }

    #[test]
    fn kappa12_examples() {
        assert_eq!(kappa12(0).kappa12, 0);
        assert!(kappa12(0).digits.is_empty());
        assert_eq!(kappa12(9).kappa12, 2); // 21₄
        assert_eq!(kappa12(5).kappa12, 2); // 11₄
        assert_eq!(kappa12(9).digits, vec![1, 2]);
    }

    #[test]
    fn identity_sum_small_values() {
        // t = 1: 1 + 3/4 + 3/4 + 1 = 7/2; t = 2: 49/4; t = 3 by enumeration.
        for t in 1..=6 {
            assert_eq!(identity_sum(t).unwrap(), seven_halves_pow(t), "t = {t}");
        }
        let s3 = identity_sum(3).unwrap();
        assert_eq!(s3, BigRational::new(BigInt::from(343), BigInt::from(8)));
    }

    #[test]
    fn identity_sum_census_matches_enumeration() {
        // The per-digit census path must agree with literal enumeration.
        for t in 1..=8u32 {
            let enumerated: BigRational = (0..4u64.pow(t))
                .map(|h| {
                    BigRational::new(
                        BigInt::from(3).pow(kappa12(h).kappa12),
                        BigInt::from(4).pow(kappa12(h).kappa12),
                    )
                })
                .fold(BigRational::zero(), |a, b| a + b);
            assert_eq!(identity_sum(t).unwrap(), enumerated, "t = {t}");
        }
    }

    #[test]
    fn identity_sum_range_errors() {
        assert!(identity_sum(0).is_err());
        assert!(identity_sum(IDENTITY_SUM_MAX_T + 1).is_err());
    }

    #[test]
    fn progression_identity_examples() {
        assert!(progression_identity_check(3, 2, 10));
        assert!(progression_identity_check(8, 255, 100));
        // Boundary: 2^K - h = 1, so m ranges over {0} only.
        assert!(progression_identity_check(3, 7, 20));
    }

    proptest! {
        #[test]
        fn epsilon_doubling_recursion(n in 0u64..(1 << 62)) {
            prop_assert_eq!(epsilon_i64(2 * n), epsilon_i64(n));
            prop_assert_eq!(epsilon_i64(2 * n + 1), -epsilon_i64(n));
        }

        #[test]
        fn epsilon_block_product(y in 0u64..(1 << 40), k in 1u32..20, m_seed in 0u64..u64::MAX) {
            let m = m_seed % (1 << k);
            prop_assert_eq!(
                epsilon_i64((y << k) + m),
                epsilon_i64(y) * epsilon_i64(m)
            );
        }

        #[test]
        fn base4_digits_reconstruct(h in 0u64..u64::MAX) {
            let stats = kappa12(h);
            prop_assert_eq!(stats.reconstruct(), h);
            let direct = stats.digits.iter().filter(|&&d| d == 1 || d == 2).count() as u32;
            prop_assert_eq!(stats.kappa12, direct);
        }

        #[test]
        fn classes_partition(n in 1u64..u64::MAX) {
            let c = classify(n).unwrap();
            let expected = if epsilon(n) == EpsilonSign::Plus {
                DigitClass::Class0
            } else {
                DigitClass::Class1
            };
            prop_assert_eq!(c, expected);
        }
    }

    #[test]
    fn seven_halves_pow_is_positive_and_exact() {
        let v = seven_halves_pow(4);
        assert!(v.is_positive());
        assert_eq!(v, BigRational::new(BigInt::from(2401), BigInt::from(16)));
        assert!(seven_halves_pow(0).is_one());
    }
}
