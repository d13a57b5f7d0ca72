//! Number-theoretic transforms over three 61–62 bit primes with a CRT lift
//! back to signed 128-bit integers.
//!
//! Each prime has 2-adic order at least 2^55 in its unit group, so any
//! transform size this crate can allocate is supported. The product of the
//! three primes is ~2^183, which covers the full signed 128-bit range after
//! centering; a lifted value that cannot be represented is reported, never
//! wrapped.

/// NTT-friendly primes `29·2^57 + 1`, `27·2^56 + 1`, `57·2^55 + 1`.
pub(crate) const PRIMES: [u64; 3] = [
    4_179_340_454_199_820_289,
    1_945_555_039_024_054_273,
    2_053_641_430_080_946_177,
];

/// Smallest primitive roots of the primes above.
const GENERATORS: [u64; 3] = [3, 5, 7];

/// Montgomery arithmetic mod one odd prime `p < 2^63`, with `R = 2^64`.
#[derive(Clone, Copy)]
pub(crate) struct Mont {
    pub p: u64,
    /// `-p^{-1} mod 2^64`.
    neg_inv: u64,
    /// `R^2 mod p`, for conversion into the Montgomery domain.
    r2: u64,
    /// `1` in the Montgomery domain (`R mod p`).
    pub one: u64,
}

impl Mont {
    pub fn new(p: u64) -> Self {
        debug_assert!(p % 2 == 1 && p < (1 << 63));
        // Newton iteration doubles correct low bits each round.
        let mut inv = p;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        debug_assert_eq!(p.wrapping_mul(inv), 1);
        let r = (u128::from(u64::MAX) + 1) % u128::from(p);
        let r2 = (r * r % u128::from(p)) as u64;
        Mont {
            p,
            neg_inv: inv.wrapping_neg(),
            r2,
            one: r as u64,
        }
    }

    /// REDC(a · b) for Montgomery-domain operands.
    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        let t = u128::from(a) * u128::from(b);
        let m = (t as u64).wrapping_mul(self.neg_inv);
        let t = (t + u128::from(m) * u128::from(self.p)) >> 64;
        let t = t as u64;
        if t >= self.p {
            t - self.p
        } else {
            t
        }
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    pub fn to_mont(&self, a: u64) -> u64 {
        self.mul(a % self.p, self.r2)
    }

    pub fn from_mont(&self, a: u64) -> u64 {
        self.mul(a, 1)
    }

    pub fn pow(&self, mut base: u64, mut e: u64) -> u64 {
        // base in Montgomery domain
        let mut acc = self.one;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: u64) -> u64 {
        self.pow(a, self.p - 2)
    }
}

/// In-place iterative radix-2 transform. `values` are Montgomery residues;
/// `len` must be a power of two dividing the 2-adic part of `p − 1`.
fn ntt_in_place(mont: &Mont, g: u64, values: &mut [u64], invert: bool) {
    let n = values.len();
    debug_assert!(n.is_power_of_two());
    // bit-reversal permutation
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            values.swap(i, j);
        }
    }
    let mut len = 2usize;
    while len <= n {
        let root_exp = (mont.p - 1) / len as u64;
        let mut w_len = mont.pow(mont.to_mont(g), root_exp);
        if invert {
            w_len = mont.inv(w_len);
        }
        for start in (0..n).step_by(len) {
            let mut w = mont.one;
            for i in start..start + len / 2 {
                let u = values[i];
                let v = mont.mul(values[i + len / 2], w);
                values[i] = mont.add(u, v);
                values[i + len / 2] = mont.sub(u, v);
                w = mont.mul(w, w_len);
            }
        }
        len <<= 1;
    }
    if invert {
        let n_inv = mont.inv(mont.to_mont(n as u64));
        for v in values.iter_mut() {
            *v = mont.mul(*v, n_inv);
        }
    }
}

/// Linear convolution of the residue images of `a` and `b` mod prime
/// `PRIMES[idx]`, returned as plain residues of length `out_len`.
pub(crate) fn convolve_mod_prime(a: &[i128], b: &[i128], out_len: usize, idx: usize) -> Vec<u64> {
    let p = PRIMES[idx];
    let g = GENERATORS[idx];
    let mont = Mont::new(p);
    let full = a.len() + b.len() - 1;
    let size = full.next_power_of_two();
    debug_assert!(size as u64 <= 1 << 55, "transform size within 2-adic order");

    let reduce = |v: i128| -> u64 { mont.to_mont(v.rem_euclid(p as i128) as u64) };
    let mut fa = vec![0u64; size];
    for (dst, &src) in fa.iter_mut().zip(a.iter()) {
        *dst = reduce(src);
    }
    let mut fb = vec![0u64; size];
    for (dst, &src) in fb.iter_mut().zip(b.iter()) {
        *dst = reduce(src);
    }
    ntt_in_place(&mont, g, &mut fa, false);
    ntt_in_place(&mont, g, &mut fb, false);
    for (x, y) in fa.iter_mut().zip(fb.iter()) {
        *x = mont.mul(*x, *y);
    }
    ntt_in_place(&mont, g, &mut fa, true);
    fa.truncate(out_len.min(full));
    fa.iter().map(|&v| mont.from_mont(v)).collect()
}

/// Garner lift of residues mod the three primes to a centered `i128`.
///
/// Returns `None` when the combined value cannot be represented; callers
/// must have bounded the true value beforehand, so `None` signals overflow
/// rather than a wrong answer.
pub(crate) struct CrtLift {
    p1: u64,
    p2: u64,
    p3: u64,
    inv_p1_mod_p2: u64,
    inv_p12_mod_p3: u64,
    m12: u128,
}

impl CrtLift {
    pub fn new() -> Self {
        let [p1, p2, p3] = PRIMES;
        let m2 = Mont::new(p2);
        let m3 = Mont::new(p3);
        let inv_p1_mod_p2 = m2.from_mont(m2.inv(m2.to_mont(p1 % p2)));
        let p12_mod_p3 = ((u128::from(p1 % p3) * u128::from(p2 % p3)) % u128::from(p3)) as u64;
        let inv_p12_mod_p3 = m3.from_mont(m3.inv(m3.to_mont(p12_mod_p3)));
        CrtLift {
            p1,
            p2,
            p3,
            inv_p1_mod_p2,
            inv_p12_mod_p3,
            m12: u128::from(p1) * u128::from(p2),
        }
    }

    pub fn lift(&self, r1: u64, r2: u64, r3: u64) -> Option<i128> {
        let p2 = u128::from(self.p2);
        let p3 = u128::from(self.p3);
        // digit mod p2
        let diff2 = (u128::from(r2) + p2 - u128::from(r1) % p2) % p2;
        let t1 = diff2 * u128::from(self.inv_p1_mod_p2) % p2;
        let x12 = u128::from(r1) + u128::from(self.p1) * t1; // < p1 p2 < 2^123
        // digit mod p3
        let x12_mod = x12 % p3;
        let diff3 = (u128::from(r3) + p3 - x12_mod) % p3;
        let t2 = diff3 * u128::from(self.inv_p12_mod_p3) % p3;
        // center the top digit; |true value| << m12 * p3 / 2 by caller bound
        let t2c: i128 = if t2 > p3 / 2 {
            t2 as i128 - p3 as i128
        } else {
            t2 as i128
        };
        let m12 = i128::try_from(self.m12).ok()?;
        m12.checked_mul(t2c)?.checked_add(x12 as i128)
    }
}
