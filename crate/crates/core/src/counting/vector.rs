//! Exact integer coefficient vectors and their convolution.
//!
//! A [`CoeffVector`] maps values `v ∈ [0, N_cap]` to exact signed 128-bit
//! counts. Convolution is exact by construction on every path: sparse or
//! dense schoolbook when the operands are small, and a three-prime NTT with
//! CRT lift when they are large. The paths produce bit-identical results;
//! the NTT path is entered only once the output coefficients are proven to
//! fit the CRT range, and any residual overflow is reported, never wrapped.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

use super::ntt::{convolve_mod_prime, CrtLift};

/// Hard cap on dense coefficient storage (entries), ~256 MiB of i128.
pub const MAX_DENSE_LEN: usize = 1 << 24;

/// Magic prefix of the binary coefficient cache.
pub const CACHE_MAGIC: &[u8; 4] = b"WDC1";

/// Whether a vector is a plain count (pointwise ≥ 0) or carries signs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VectorKind {
    Unsigned,
    Signed,
}

/// Exact coefficient array indexed by value `v ∈ [0, n_cap]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffVector {
    pub coeffs: Vec<i128>,
    pub kind: VectorKind,
    /// Range bound of the generating variable this vector came from.
    pub p: u64,
    /// Power `n` of the generating map `x ↦ xⁿ`.
    pub n: u32,
    /// Largest value index retained; `coeffs.len() == n_cap + 1`.
    pub n_cap: u64,
}

impl CoeffVector {
    pub fn zeros(kind: VectorKind, p: u64, n: u32, n_cap: u64) -> Result<Self> {
        let len = usize::try_from(n_cap + 1).map_err(|_| Error::ResourceLimit {
            what: "coefficient length",
            requested: n_cap as u128 + 1,
            cap: MAX_DENSE_LEN as u128,
        })?;
        if len > MAX_DENSE_LEN {
            return Err(Error::ResourceLimit {
                what: "coefficient length",
                requested: len as u128,
                cap: MAX_DENSE_LEN as u128,
            });
        }
        Ok(CoeffVector {
            coeffs: vec![0; len],
            kind,
            p,
            n,
            n_cap,
        })
    }

    /// The Kronecker delta at value 0, the convolution identity.
    pub fn delta(p: u64, n: u32, n_cap: u64) -> Result<Self> {
        let mut v = Self::zeros(VectorKind::Unsigned, p, n, n_cap)?;
        v.coeffs[0] = 1;
        Ok(v)
    }

    pub fn coeff(&self, v: u64) -> i128 {
        self.coeffs.get(v as usize).copied().unwrap_or(0)
    }

    pub fn nonzero_count(&self) -> usize {
        self.coeffs.iter().filter(|&&c| c != 0).count()
    }

    /// Σ_v coeffs[v], exact.
    pub fn sum(&self) -> i128 {
        self.coeffs.iter().sum()
    }

    /// Σ_v coeffs[v]², checked.
    pub fn sum_of_squares(&self) -> Result<i128> {
        let mut acc: i128 = 0;
        for (i, &c) in self.coeffs.iter().enumerate() {
            let sq = c.checked_mul(c).ok_or(Error::CoefficientOverflow { index: i })?;
            acc = acc.checked_add(sq).ok_or(Error::CoefficientOverflow { index: i })?;
        }
        Ok(acc)
    }

    fn max_abs(&self) -> u128 {
        self.coeffs.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
    }

    fn sum_abs(&self) -> Option<u128> {
        let mut acc: u128 = 0;
        for c in &self.coeffs {
            acc = acc.checked_add(c.unsigned_abs())?;
        }
        Some(acc)
    }

    // ------------------------------------------------------------------
    // binary cache
    // ------------------------------------------------------------------

    /// Serializes as: magic `WDC1`, then little-endian `p: u64`, `n: u32`,
    /// `kind: u8` (0 unsigned, 1 signed), `n_cap: u64`, `len: u64`, then
    /// `len` raw `i128` coefficients.
    pub fn write_cache<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&self.p.to_le_bytes())?;
        w.write_all(&self.n.to_le_bytes())?;
        w.write_all(&[match self.kind {
            VectorKind::Unsigned => 0u8,
            VectorKind::Signed => 1u8,
        }])?;
        w.write_all(&self.n_cap.to_le_bytes())?;
        w.write_all(&(self.coeffs.len() as u64).to_le_bytes())?;
        for c in &self.coeffs {
            w.write_all(&c.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_cache<R: Read>(r: &mut R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != CACHE_MAGIC {
            return Err(Error::BadCache {
                reason: format!("bad magic {magic:?}"),
            });
        }
        let mut b8 = [0u8; 8];
        let mut b4 = [0u8; 4];
        let mut b1 = [0u8; 1];
        r.read_exact(&mut b8)?;
        let p = u64::from_le_bytes(b8);
        r.read_exact(&mut b4)?;
        let n = u32::from_le_bytes(b4);
        r.read_exact(&mut b1)?;
        let kind = match b1[0] {
            0 => VectorKind::Unsigned,
            1 => VectorKind::Signed,
            other => {
                return Err(Error::BadCache {
                    reason: format!("unknown kind tag {other}"),
                })
            }
        };
        r.read_exact(&mut b8)?;
        let n_cap = u64::from_le_bytes(b8);
        r.read_exact(&mut b8)?;
        let len = u64::from_le_bytes(b8);
        if len != n_cap + 1 || len as u128 > MAX_DENSE_LEN as u128 {
            return Err(Error::BadCache {
                reason: format!("length {len} inconsistent with cap {n_cap}"),
            });
        }
        let mut coeffs = Vec::with_capacity(len as usize);
        let mut b16 = [0u8; 16];
        for _ in 0..len {
            r.read_exact(&mut b16)?;
            coeffs.push(i128::from_le_bytes(b16));
        }
        if kind == VectorKind::Unsigned && coeffs.iter().any(|&c| c < 0) {
            return Err(Error::BadCache {
                reason: "unsigned vector carries negative coefficients".into(),
            });
        }
        Ok(CoeffVector {
            coeffs,
            kind,
            p,
            n,
            n_cap,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_cache(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);
        Self::read_cache(&mut r)
    }
}

/// Exact truncated convolution: `out[v] = Σ_{i+j=v} u[i]·w[j]` for
/// `v ≤ n_cap`.
///
/// Requires both operands to be complete up to `n_cap` (their caps at least
/// `n_cap`), otherwise low-index outputs would silently miss contributions.
pub fn convolve(u: &CoeffVector, w: &CoeffVector, n_cap: u64) -> Result<CoeffVector> {
    if u.n_cap < n_cap || w.n_cap < n_cap {
        return Err(Error::CapMismatch {
            left: u.n_cap,
            right: w.n_cap,
        });
    }
    let out_len = usize::try_from(n_cap + 1).map_err(|_| Error::ResourceLimit {
        what: "convolution output length",
        requested: n_cap as u128 + 1,
        cap: MAX_DENSE_LEN as u128,
    })?;
    if out_len > MAX_DENSE_LEN {
        return Err(Error::ResourceLimit {
            what: "convolution output length",
            requested: out_len as u128,
            cap: MAX_DENSE_LEN as u128,
        });
    }
    // Indices only add, so operand tails beyond the cap cannot reach
    // retained outputs; trim before costing.
    let ua = &u.coeffs[..u.coeffs.len().min(out_len)];
    let wa = &w.coeffs[..w.coeffs.len().min(out_len)];

    let kind = if u.kind == VectorKind::Unsigned && w.kind == VectorKind::Unsigned {
        VectorKind::Unsigned
    } else {
        VectorKind::Signed
    };

    // Bound on |out[v]|: min over the two operand orders of Σ|u|·max|w|.
    let bound: Option<u128> = {
        let b1 = u
            .sum_abs()
            .and_then(|s| s.checked_mul(w.max_abs()));
        let b2 = w
            .sum_abs()
            .and_then(|s| s.checked_mul(u.max_abs()));
        match (b1, b2) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (Some(x), None) | (None, Some(x)) => Some(x),
            (None, None) => None,
        }
    };
    let bound_ok = matches!(bound, Some(b) if b <= i128::MAX as u128);

    let nnz_u = ua.iter().filter(|&&c| c != 0).count();
    let nnz_w = wa.iter().filter(|&&c| c != 0).count();
    let sparse_cost = nnz_u as u128 * nnz_w as u128;
    let ntt_size = (ua.len() + wa.len() - 1).next_power_of_two() as u128;
    // three primes, three transforms each, ~log2(size) passes
    let ntt_cost = 9 * ntt_size * (ntt_size.max(2).ilog2() as u128 + 1);

    let coeffs = if !bound_ok || sparse_cost <= ntt_cost {
        schoolbook(ua, wa, out_len, bound_ok)?
    } else {
        ntt_path(ua, wa, out_len)?
    };

    Ok(CoeffVector {
        coeffs,
        kind,
        p: u.p,
        n: u.n,
        n_cap,
    })
}

/// Repeated-squaring power `v^{*k}` truncated at `n_cap`; `k = 0` gives the
/// delta vector. Requires `v` complete up to `n_cap`.
pub fn convolve_power(v: &CoeffVector, k: u32, n_cap: u64) -> Result<CoeffVector> {
    if v.n_cap < n_cap {
        return Err(Error::CapMismatch {
            left: v.n_cap,
            right: n_cap,
        });
    }
    if k == 0 {
        return CoeffVector::delta(v.p, v.n, n_cap);
    }
    let out_len = usize::try_from(n_cap + 1).expect("guarded by v's allocation");
    let mut base = CoeffVector {
        coeffs: v.coeffs[..out_len].to_vec(),
        kind: v.kind,
        p: v.p,
        n: v.n,
        n_cap,
    };
    let mut e = k;
    let mut acc: Option<CoeffVector> = None;
    loop {
        if e & 1 == 1 {
            acc = Some(match acc {
                None => base.clone(),
                Some(a) => convolve(&a, &base, n_cap)?,
            });
        }
        e >>= 1;
        if e == 0 {
            break;
        }
        base = convolve(&base, &base, n_cap)?;
    }
    Ok(acc.expect("k >= 1"))
}

fn schoolbook(u: &[i128], w: &[i128], out_len: usize, bound_ok: bool) -> Result<Vec<i128>> {
    let mut out = vec![0i128; out_len];
    // iterate over the sparser operand on the outside
    let (outer, inner) = if u.iter().filter(|&&c| c != 0).count()
        <= w.iter().filter(|&&c| c != 0).count()
    {
        (u, w)
    } else {
        (w, u)
    };
    if bound_ok {
        for (i, &ci) in outer.iter().enumerate() {
            if ci == 0 {
                continue;
            }
            let limit = inner.len().min(out_len - i);
            for (j, &cj) in inner[..limit].iter().enumerate() {
                if cj != 0 {
                    out[i + j] += ci * cj;
                }
            }
        }
    } else {
        for (i, &ci) in outer.iter().enumerate() {
            if ci == 0 {
                continue;
            }
            let limit = inner.len().min(out_len - i);
            for (j, &cj) in inner[..limit].iter().enumerate() {
                if cj != 0 {
                    let prod = ci
                        .checked_mul(cj)
                        .ok_or(Error::CoefficientOverflow { index: i + j })?;
                    out[i + j] = out[i + j]
                        .checked_add(prod)
                        .ok_or(Error::CoefficientOverflow { index: i + j })?;
                }
            }
        }
    }
    Ok(out)
}

fn ntt_path(u: &[i128], w: &[i128], out_len: usize) -> Result<Vec<i128>> {
    let r0 = convolve_mod_prime(u, w, out_len, 0);
    let r1 = convolve_mod_prime(u, w, out_len, 1);
    let r2 = convolve_mod_prime(u, w, out_len, 2);
    let lift = CrtLift::new();
    let mut out = vec![0i128; out_len];
    for i in 0..r0.len() {
        out[i] = lift
            .lift(r0[i], r1[i], r2[i])
            .ok_or(Error::CoefficientOverflow { index: i })?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vec_of(coeffs: Vec<i128>, kind: VectorKind) -> CoeffVector {
        let n_cap = coeffs.len() as u64 - 1;
        CoeffVector {
            coeffs,
            kind,
            p: 0,
            n: 2,
            n_cap,
        }
    }

    #[test]
    fn delta_is_identity() {
        let w = vec_of(vec![3, 0, -1, 7], VectorKind::Signed);
        let d = CoeffVector::delta(0, 2, 3).unwrap();
        let got = convolve(&d, &w, 3).unwrap();
        assert_eq!(got.coeffs, w.coeffs);
    }

    #[test]
    fn truncation_drops_high_terms() {
        let a = vec_of(vec![1, 1, 1], VectorKind::Unsigned);
        let got = convolve(&a, &a, 2).unwrap();
        assert_eq!(got.coeffs, vec![1, 2, 3]);
        assert!(convolve(&a, &a, 4).is_err()); // operands incomplete past 2
    }

    #[test]
    fn schoolbook_and_ntt_agree_on_random_vectors() {
        // 200 deterministic pseudo-random pairs, both paths forced.
        let mut state = 0x243f6a8885a308d3u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for case in 0..200 {
            let la = (next() % 48 + 1) as usize;
            let lb = (next() % 48 + 1) as usize;
            let a: Vec<i128> = (0..la).map(|_| (next() % 2001) as i128 - 1000).collect();
            let b: Vec<i128> = (0..lb).map(|_| (next() % 2001) as i128 - 1000).collect();
            let out_len = la + lb - 1;
            let sb = schoolbook(&a, &b, out_len, true).unwrap();
            let nt = ntt_path(&a, &b, out_len).unwrap();
            assert_eq!(sb, nt, "case {case}");
        }
    }

    #[test]
    fn convolve_power_small() {
        let a = vec_of(vec![0, 1, 1], VectorKind::Unsigned);
        // (x + x²)³ = x³ + 3x⁴ + 3x⁵ + x⁶
        let got = convolve_power(&a, 3, 2).unwrap();
        assert_eq!(got.coeffs, vec![0, 0, 0]);
        let a = vec_of(vec![0, 1, 1, 0, 0, 0, 0], VectorKind::Unsigned);
        let got = convolve_power(&a, 3, 6).unwrap();
        assert_eq!(got.coeffs, vec![0, 0, 0, 1, 3, 3, 1]);
        let d = convolve_power(&a, 0, 6).unwrap();
        assert_eq!(d.coeff(0), 1);
        assert_eq!(d.sum(), 1);
    }

    #[test]
    fn overflow_is_reported_not_wrapped() {
        let big = vec_of(vec![i128::MAX / 2, i128::MAX / 2], VectorKind::Unsigned);
        let r = convolve(&big, &big, 1);
        assert!(matches!(r, Err(Error::CoefficientOverflow { .. })));
    }

    #[test]
    fn cache_round_trip_and_validation() {
        let v = vec_of(vec![5, 0, -3, 123456789012345678901234567i128], VectorKind::Signed);
        let mut buf = Vec::new();
        v.write_cache(&mut buf).unwrap();
        let back = CoeffVector::read_cache(&mut buf.as_slice()).unwrap();
        assert_eq!(v, back);

        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(
            CoeffVector::read_cache(&mut bad.as_slice()),
            Err(Error::BadCache { .. })
        ));

        // unsigned tag with negative payload rejected
        let mut unsigned = buf.clone();
        unsigned[16] = 0; // kind byte offset: 4 magic + 8 p + 4 n
        assert!(matches!(
            CoeffVector::read_cache(&mut unsigned.as_slice()),
            Err(Error::BadCache { .. })
        ));
    }
}
