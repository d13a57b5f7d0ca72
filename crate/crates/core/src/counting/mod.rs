//! Exact representation counting.
//!
//! Let `A[v] = #{x ≤ P : xⁿ = v}` and `E[v] = Σ_{x ≤ P, xⁿ = v} ε(x)`; `G0`
//! and `G1` are the per-class restrictions, so `A = G0 + G1` and
//! `E = G0 − G1` pointwise. Since `S(α) = Σ_v A[v] e(αv)` and
//! `W(α) = Σ_v E[v] e(αv)`, every moment and representation count below is a
//! coefficient (or a sum of squared coefficients) of exact integer
//! convolutions of these vectors, and is computed that way — never through
//! a numeric integral. The one quadrature routine ([`dft_cross_check`])
//! exists to confirm, on an independent route, that the convolution counts
//! match the sampled integral.

mod ntt;
mod vector;

pub use vector::{convolve, convolve_power, CoeffVector, VectorKind, CACHE_MAGIC, MAX_DENSE_LEN};

use serde::{Deserialize, Serialize};

use crate::digits::{epsilon_i64, DigitClass};
use crate::error::{Error, Result};
use crate::report::{i128_str, opt_i128_str};

/// Largest `N` accepted by the quadrature cross-check (`M = kN + 1` samples).
pub const DFT_MAX_N: u64 = 10_000;

/// Largest `k` for the all-patterns partition check (`2^k` patterns).
pub const PARTITION_MAX_K: u32 = 12;

/// `⌊v^{1/n}⌋` for `n ≥ 1`.
pub fn nth_root_floor(v: u64, n: u32) -> u64 {
    if v == 0 || n == 0 {
        return 0;
    }
    if n == 1 {
        return v;
    }
    let mut r = (v as f64).powf(1.0 / n as f64).round() as u64;
    while r > 0 && pow_checked(r, n).map_or(true, |p| p > v as u128) {
        r -= 1;
    }
    while pow_checked(r + 1, n).map_or(false, |p| p <= v as u128) {
        r += 1;
    }
    r
}

fn pow_checked(x: u64, n: u32) -> Option<u128> {
    let mut acc: u128 = 1;
    for _ in 0..n {
        acc = acc.checked_mul(x as u128)?;
    }
    Some(acc)
}

/// The four base vectors over `x ≤ P`, truncated at `n_cap`.
#[derive(Debug, Clone)]
pub struct BaseVectors {
    /// Unrestricted counts `A[v] = #{x ≤ P : xⁿ = v}`.
    pub a: CoeffVector,
    /// Signed counts `E[v] = Σ ε(x)` over the same fibers.
    pub e: CoeffVector,
    /// Counts restricted to even digit sum.
    pub g0: CoeffVector,
    /// Counts restricted to odd digit sum.
    pub g1: CoeffVector,
}

/// Materializes the base vectors for `x ≤ p`, keeping values `v ≤ n_cap`.
pub fn build_base_vectors(p: u64, n: u32, n_cap: u64) -> Result<BaseVectors> {
    if n == 0 {
        return Err(Error::PowerOverflow { base: p, exp: n });
    }
    pow_checked(p, n).ok_or(Error::PowerOverflow { base: p, exp: n })?;
    let mut a = CoeffVector::zeros(VectorKind::Unsigned, p, n, n_cap)?;
    let mut e = CoeffVector::zeros(VectorKind::Signed, p, n, n_cap)?;
    let mut g0 = CoeffVector::zeros(VectorKind::Unsigned, p, n, n_cap)?;
    let mut g1 = CoeffVector::zeros(VectorKind::Unsigned, p, n, n_cap)?;
    for x in 1..=p {
        let v = pow_checked(x, n).expect("checked at p");
        if v > n_cap as u128 {
            continue;
        }
        let v = v as usize;
        a.coeffs[v] += 1;
        let sign = epsilon_i64(x);
        e.coeffs[v] += sign as i128;
        if sign > 0 {
            g0.coeffs[v] += 1;
        } else {
            g1.coeffs[v] += 1;
        }
    }
    Ok(BaseVectors { a, e, g0, g1 })
}

/// As [`build_base_vectors`] with `P = ⌊N_cap^{1/n}⌋`, the largest range
/// whose powers stay within the cap.
pub fn build_base_vectors_auto(n: u32, n_cap: u64) -> Result<BaseVectors> {
    build_base_vectors(nth_root_floor(n_cap, n), n, n_cap)
}

/// Class restriction of one equation slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pattern {
    /// All `k` slots unrestricted.
    Unrestricted,
    /// Exactly one class label per slot.
    Classes(Vec<DigitClass>),
}

impl Pattern {
    /// Parses a string of `0`/`1` labels, one per slot.
    pub fn parse(s: &str) -> Result<Pattern> {
        if s == "unrestricted" {
            return Ok(Pattern::Unrestricted);
        }
        let mut classes = Vec::with_capacity(s.len());
        for c in s.chars() {
            classes.push(match c {
                '0' => DigitClass::Class0,
                '1' => DigitClass::Class1,
                _ => {
                    return Err(Error::BadCache {
                        reason: format!("pattern must be 0/1 characters, got {c:?}"),
                    })
                }
            });
        }
        Ok(Pattern::Classes(classes))
    }

    pub fn describe(&self) -> String {
        match self {
            Pattern::Unrestricted => "unrestricted".to_string(),
            Pattern::Classes(v) => v
                .iter()
                .map(|c| match c {
                    DigitClass::Class0 => '0',
                    DigitClass::Class1 => '1',
                })
                .collect(),
        }
    }
}

/// Exact ordered-solution count of `x₁ⁿ + … + x_kⁿ = N` under a pattern.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RepCountResult {
    pub n_value: u64,
    pub n: u32,
    pub k: u32,
    pub pattern: String,
    #[serde(with = "i128_str")]
    pub count: i128,
}

/// Counts ordered solutions with `x_j` positive and, when a pattern is
/// given, `x_j` in the class the `j`-th label names. The count is the `N`-th
/// coefficient of the convolution product of the per-slot class vectors.
pub fn count_representations(
    n_value: u64,
    n: u32,
    k: u32,
    pattern: &Pattern,
) -> Result<RepCountResult> {
    if k == 0 {
        return Err(Error::EmptyRange);
    }
    if let Pattern::Classes(v) = pattern {
        if v.len() != k as usize {
            return Err(Error::PatternLength {
                len: v.len(),
                k: k as usize,
            });
        }
    }
    let mk = |count: i128| RepCountResult {
        n_value,
        n,
        k,
        pattern: pattern.describe(),
        count,
    };
    if n_value == 0 {
        // positive integers required, so no solutions
        return Ok(mk(0));
    }
    let base = build_base_vectors_auto(n, n_value)?;
    let count = match pattern {
        Pattern::Unrestricted => convolve_power(&base.a, k, n_value)?.coeff(n_value),
        Pattern::Classes(classes) => {
            let c0 = classes.iter().filter(|&&c| c == DigitClass::Class0).count() as u32;
            let c1 = k - c0;
            let part0 = convolve_power(&base.g0, c0, n_value)?;
            let part1 = convolve_power(&base.g1, c1, n_value)?;
            convolve(&part0, &part1, n_value)?.coeff(n_value)
        }
    };
    Ok(mk(count))
}

/// Exponent descriptor of a moment report.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(tag = "form")]
pub enum MomentExponent {
    /// `∫ |S|^{2s}`: the count of `x₁ⁿ+…+x_sⁿ = y₁ⁿ+…+y_sⁿ`.
    Even { s: u32 },
    /// `∫ |W|^{2l} |S|^{2m}`: the signed analogue with `l` twisted slots.
    Mixed { l: u32, m: u32 },
}

/// An exact even or mixed moment.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MomentReport {
    pub p: u64,
    pub n: u32,
    pub exponent: MomentExponent,
    #[serde(with = "i128_str")]
    pub value: i128,
    /// Comparison scale `P^{2s−j}` (power-of-two exponent in the classical
    /// range) or `P^{2s−n}`; probed, never asserted.
    pub reference_bound: f64,
}

fn reference_bound(p: u64, n: u32, s: u32) -> f64 {
    let two_s = 2 * s;
    let exp = if two_s.is_power_of_two() && two_s.trailing_zeros() <= n {
        (two_s - two_s.trailing_zeros()) as i32
    } else {
        two_s as i32 - n as i32
    };
    (p as f64).powi(exp.max(1))
}

/// `∫₀¹ |S(α)|^{2s} dα` exactly: `Σ_u (A^{*s}[u])²` by orthogonality.
///
/// `s = 1` avoids materializing the dense vector (the value is the count of
/// collisions `xⁿ = yⁿ`, which is `P` for strictly monotone powers).
pub fn moment_s(p: u64, n: u32, s: u32) -> Result<MomentReport> {
    if s == 0 {
        return Err(Error::EmptyRange);
    }
    let pn = pow_checked(p, n).ok_or(Error::PowerOverflow { base: p, exp: n })?;
    let mk = |value: i128| MomentReport {
        p,
        n,
        exponent: MomentExponent::Even { s },
        value,
        reference_bound: reference_bound(p, n, s),
    };
    if s == 1 {
        // Σ_v A[v]² over distinct fiber values, without the dense array.
        let mut values: Vec<u128> = (1..=p).map(|x| pow_checked(x, n).expect("checked")).collect();
        values.sort_unstable();
        let mut total: i128 = 0;
        let mut i = 0;
        while i < values.len() {
            let mut j = i + 1;
            while j < values.len() && values[j] == values[i] {
                j += 1;
            }
            let run = (j - i) as i128;
            total += run * run;
            i = j;
        }
        return Ok(mk(total));
    }
    let cap_u128 = pn.checked_mul(s as u128).ok_or(Error::ResourceLimit {
        what: "moment value cap s*P^n",
        requested: u128::MAX,
        cap: MAX_DENSE_LEN as u128,
    })?;
    let n_cap = u64::try_from(cap_u128).map_err(|_| Error::ResourceLimit {
        what: "moment value cap s*P^n",
        requested: cap_u128,
        cap: MAX_DENSE_LEN as u128,
    })?;
    let base = build_base_vectors(p, n, n_cap)?;
    let power = convolve_power(&base.a, s, n_cap)?;
    Ok(mk(power.sum_of_squares()?))
}

/// `∫₀¹ |W(α)|^{2l} |S(α)|^{2m} dα` exactly: `Σ_u C[u]²` with
/// `C = E^{*l} ⊛ A^{*m}`.
pub fn mixed_moment(p: u64, n: u32, l: u32, m: u32) -> Result<MomentReport> {
    if l + m == 0 {
        return Err(Error::EmptyRange);
    }
    let s = l + m;
    if l == 0 {
        let mut r = moment_s(p, n, m)?;
        r.exponent = MomentExponent::Mixed { l, m };
        return Ok(r);
    }
    let pn = pow_checked(p, n).ok_or(Error::PowerOverflow { base: p, exp: n })?;
    let mk = |value: i128| MomentReport {
        p,
        n,
        exponent: MomentExponent::Mixed { l, m },
        value,
        reference_bound: reference_bound(p, n, s),
    };
    if s == 1 {
        // l = 1, m = 0: Σ_v E[v]² without the dense array.
        let mut values: Vec<(u128, i64)> = (1..=p)
            .map(|x| (pow_checked(x, n).expect("checked"), epsilon_i64(x)))
            .collect();
        values.sort_unstable();
        let mut total: i128 = 0;
        let mut i = 0;
        while i < values.len() {
            let mut j = i + 1;
            let mut signed: i128 = values[i].1 as i128;
            while j < values.len() && values[j].0 == values[i].0 {
                signed += values[j].1 as i128;
                j += 1;
            }
            total += signed * signed;
            i = j;
        }
        return Ok(mk(total));
    }
    let cap_u128 = pn.checked_mul(s as u128).ok_or(Error::ResourceLimit {
        what: "moment value cap (l+m)*P^n",
        requested: u128::MAX,
        cap: MAX_DENSE_LEN as u128,
    })?;
    let n_cap = u64::try_from(cap_u128).map_err(|_| Error::ResourceLimit {
        what: "moment value cap (l+m)*P^n",
        requested: cap_u128,
        cap: MAX_DENSE_LEN as u128,
    })?;
    let base = build_base_vectors(p, n, n_cap)?;
    let twisted = convolve_power(&base.e, l, n_cap)?;
    let plain = convolve_power(&base.a, m, n_cap)?;
    let c = convolve(&twisted, &plain, n_cap)?;
    Ok(mk(c.sum_of_squares()?))
}

/// Pointwise and summed domination of the mixed moment by the plain one.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DominationCheck {
    pub p: u64,
    pub n: u32,
    pub l: u32,
    pub m: u32,
    /// `|C[u]| ≤ D[u]` for every `u`, with `D = A^{*(l+m)}`.
    pub pointwise_holds: bool,
    pub first_violation: Option<u64>,
    #[serde(with = "i128_str")]
    pub mixed_value: i128,
    #[serde(with = "i128_str")]
    pub plain_value: i128,
    /// `Σ C² ≤ Σ D²`.
    pub sum_holds: bool,
}

/// Verifies `|E^{*l} ⊛ A^{*m}| ≤ A^{*(l+m)}` coefficient by coefficient
/// (which is what forces the mixed moment under the plain one), plus the
/// summed comparison.
pub fn domination_check(p: u64, n: u32, l: u32, m: u32) -> Result<DominationCheck> {
    if l + m == 0 {
        return Err(Error::EmptyRange);
    }
    let s = l + m;
    let pn = pow_checked(p, n).ok_or(Error::PowerOverflow { base: p, exp: n })?;
    let cap_u128 = pn.checked_mul(s as u128).ok_or(Error::ResourceLimit {
        what: "domination cap (l+m)*P^n",
        requested: u128::MAX,
        cap: MAX_DENSE_LEN as u128,
    })?;
    let n_cap = u64::try_from(cap_u128).map_err(|_| Error::ResourceLimit {
        what: "domination cap (l+m)*P^n",
        requested: cap_u128,
        cap: MAX_DENSE_LEN as u128,
    })?;
    let base = build_base_vectors(p, n, n_cap)?;
    let twisted = convolve_power(&base.e, l, n_cap)?;
    let plain_m = convolve_power(&base.a, m, n_cap)?;
    let c = convolve(&twisted, &plain_m, n_cap)?;
    let d = convolve_power(&base.a, s, n_cap)?;
    let mut first_violation = None;
    for (u, (&cv, &dv)) in c.coeffs.iter().zip(d.coeffs.iter()).enumerate() {
        if cv.unsigned_abs() > dv.unsigned_abs() {
            first_violation = Some(u as u64);
            break;
        }
    }
    let mixed_value = c.sum_of_squares()?;
    let plain_value = d.sum_of_squares()?;
    Ok(DominationCheck {
        p,
        n,
        l,
        m,
        pointwise_holds: first_violation.is_none(),
        first_violation,
        mixed_value,
        plain_value,
        sum_holds: mixed_value <= plain_value,
    })
}

/// Threshold `k₀(n)`: `2ⁿ` for `3 ≤ n ≤ 10`, else
/// `2⌊n²(ln n + ln ln n + 4)⌋` (natural logarithms).
pub fn k0_threshold(n: u32) -> Option<u64> {
    if n < 3 {
        return None;
    }
    if n <= 10 {
        return Some(1u64 << n);
    }
    let nf = n as f64;
    Some(2 * (nf * nf * (nf.ln() + nf.ln().ln() + 4.0)).floor() as u64)
}

/// One value of the ratio window.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RatioRow {
    pub n_value: u64,
    #[serde(with = "i128_str")]
    pub restricted: i128,
    #[serde(with = "i128_str")]
    pub unrestricted: i128,
    /// `I·2^k / J` when `J > 0`.
    pub ratio: Option<f64>,
}

/// Window report comparing restricted counts against `2^{−k}` of the
/// unrestricted ones.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RatioReport {
    pub n: u32,
    pub k: u32,
    pub from: u64,
    pub to: u64,
    /// Range bound actually used, `⌊to^{1/n}⌋`.
    pub p: u64,
    pub k0: Option<u64>,
    /// Whether `k ≥ k₀(n)`.
    pub meets_k0: Option<bool>,
    pub rows: Vec<RatioRow>,
    /// Mean of the pointwise ratios over rows with `J > 0`.
    pub mean_ratio: f64,
    pub std_ratio: f64,
    #[serde(with = "opt_i128_str")]
    pub sum_restricted: Option<i128>,
    #[serde(with = "opt_i128_str")]
    pub sum_unrestricted: Option<i128>,
}

/// Computes exact `(I, J)` for every `N` in the window with a single pair of
/// `k`-fold convolutions, plus window statistics of the pointwise ratios.
pub fn theorem_ratio_report(n: u32, k: u32, from: u64, to: u64) -> Result<RatioReport> {
    if from == 0 || from > to {
        return Err(Error::EmptyWindow);
    }
    if k < 2 {
        return Err(Error::EmptyRange);
    }
    let base = build_base_vectors_auto(n, to)?;
    let unrestricted = convolve_power(&base.a, k, to)?;
    let restricted = convolve_power(&base.g0, k, to)?;
    let scale = 1i128 << k;
    let mut rows = Vec::with_capacity((to - from + 1) as usize);
    let mut sum_i: i128 = 0;
    let mut sum_j: i128 = 0;
    for n_value in from..=to {
        let i_val = restricted.coeff(n_value);
        let j_val = unrestricted.coeff(n_value);
        sum_i += i_val;
        sum_j += j_val;
        let ratio = if j_val > 0 {
            Some((i_val * scale) as f64 / j_val as f64)
        } else {
            None
        };
        rows.push(RatioRow {
            n_value,
            restricted: i_val,
            unrestricted: j_val,
            ratio,
        });
    }
    let ratios: Vec<f64> = rows.iter().filter_map(|r| r.ratio).collect();
    let mean = if ratios.is_empty() {
        f64::NAN
    } else {
        ratios.iter().sum::<f64>() / ratios.len() as f64
    };
    let var = if ratios.is_empty() {
        f64::NAN
    } else {
        ratios.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / ratios.len() as f64
    };
    let k0 = k0_threshold(n);
    Ok(RatioReport {
        n,
        k,
        from,
        to,
        p: base.a.p,
        k0,
        meets_k0: k0.map(|t| k as u64 >= t),
        rows,
        mean_ratio: mean,
        std_ratio: var.sqrt(),
        sum_restricted: Some(sum_i),
        sum_unrestricted: Some(sum_j),
    })
}

/// Result of summing every pattern count against the unrestricted count.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PartitionCheck {
    pub n_value: u64,
    pub n: u32,
    pub k: u32,
    #[serde(with = "i128_str")]
    pub total_over_patterns: i128,
    #[serde(with = "i128_str")]
    pub unrestricted: i128,
    pub holds: bool,
}

/// Sums the `2^k` pattern counts and compares with the unrestricted count.
///
/// Pattern counts depend only on how many slots carry each class, so the
/// sum is assembled as `Σ_c C(k,c) · (G0^{*c} ⊛ G1^{*(k−c)})[N]`, which
/// enumerates every ordered pattern exactly once.
pub fn pattern_partition_check(n_value: u64, n: u32, k: u32) -> Result<PartitionCheck> {
    if k == 0 {
        return Err(Error::EmptyRange);
    }
    if k > PARTITION_MAX_K {
        return Err(Error::ResourceLimit {
            what: "pattern space 2^k",
            requested: k as u128,
            cap: PARTITION_MAX_K as u128,
        });
    }
    if n_value == 0 {
        return Ok(PartitionCheck {
            n_value,
            n,
            k,
            total_over_patterns: 0,
            unrestricted: 0,
            holds: true,
        });
    }
    let base = build_base_vectors_auto(n, n_value)?;
    // binomials C(k, c) for k <= 12 stay tiny
    let mut binom = vec![1i128; k as usize + 1];
    for c in 1..=k as usize {
        binom[c] = binom[c - 1] * (k as usize - c + 1) as i128 / c as i128;
    }
    let mut total: i128 = 0;
    for c in 0..=k {
        let part0 = convolve_power(&base.g0, c, n_value)?;
        let part1 = convolve_power(&base.g1, k - c, n_value)?;
        let count = convolve(&part0, &part1, n_value)?.coeff(n_value);
        total += binom[c as usize] * count;
    }
    let unrestricted = convolve_power(&base.a, k, n_value)?.coeff(n_value);
    Ok(PartitionCheck {
        n_value,
        n,
        k,
        total_over_patterns: total,
        unrestricted,
        holds: total == unrestricted,
    })
}

/// Quadrature cross-check of one pattern count.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DftCrossCheck {
    pub n_value: u64,
    pub n: u32,
    pub k: u32,
    pub pattern: String,
    /// Real part of the sampled integral.
    pub integral: f64,
    /// Distance from the integral to the nearest integer (both components).
    pub residual: f64,
    #[serde(with = "i128_str")]
    pub rounded: i128,
    #[serde(with = "i128_str")]
    pub convolution_count: i128,
    pub agrees: bool,
}

/// Evaluates the counting integral by uniform sampling.
///
/// The integrand `Π_j f_j(α) · e(−αN)` — with `f_j = (S+W)/2`, `(S−W)/2`, or
/// `S` per slot — is a trigonometric polynomial of degree at most `kPⁿ ≤ kN`,
/// so `M = kN + 1` equally spaced samples integrate it exactly up to
/// rounding. The result must reproduce [`count_representations`].
pub fn dft_cross_check(n_value: u64, n: u32, k: u32, pattern: &Pattern) -> Result<DftCrossCheck> {
    if k == 0 || n_value == 0 {
        return Err(Error::EmptyRange);
    }
    if n_value > DFT_MAX_N {
        return Err(Error::ResourceLimit {
            what: "quadrature N",
            requested: n_value as u128,
            cap: DFT_MAX_N as u128,
        });
    }
    if let Pattern::Classes(v) = pattern {
        if v.len() != k as usize {
            return Err(Error::PatternLength {
                len: v.len(),
                k: k as usize,
            });
        }
    }
    let p = nth_root_floor(n_value, n);
    let m = k as u64 * n_value + 1;
    let powers: Vec<u64> = (1..=p)
        .map(|x| (pow_checked(x, n).expect("xⁿ ≤ N") % m as u128) as u64)
        .collect();
    let (c0, c1) = match pattern {
        Pattern::Unrestricted => (0u32, 0u32),
        Pattern::Classes(v) => {
            let c0 = v.iter().filter(|&&c| c == DigitClass::Class0).count() as u32;
            (c0, k - c0)
        }
    };
    let tau = std::f64::consts::TAU;
    let mut acc_re = 0.0f64;
    let mut acc_im = 0.0f64;
    for t in 0..m {
        let mut s_re = 0.0;
        let mut s_im = 0.0;
        let mut w_re = 0.0;
        let mut w_im = 0.0;
        for (x, &pw) in powers.iter().enumerate() {
            let r = (t as u128 * pw as u128 % m as u128) as u64;
            let (sin, cos) = (tau * r as f64 / m as f64).sin_cos();
            s_re += cos;
            s_im += sin;
            let e = epsilon_i64(x as u64 + 1) as f64;
            w_re += e * cos;
            w_im += e * sin;
        }
        let factor = |re: f64, im: f64, count: u32| -> (f64, f64) {
            let mut fr = 1.0;
            let mut fi = 0.0;
            for _ in 0..count {
                let nr = fr * re - fi * im;
                let ni = fr * im + fi * re;
                fr = nr;
                fi = ni;
            }
            (fr, fi)
        };
        let (prod_re, prod_im) = match pattern {
            Pattern::Unrestricted => factor(s_re, s_im, k),
            Pattern::Classes(_) => {
                let (p0r, p0i) = factor((s_re + w_re) / 2.0, (s_im + w_im) / 2.0, c0);
                let (p1r, p1i) = factor((s_re - w_re) / 2.0, (s_im - w_im) / 2.0, c1);
                (p0r * p1r - p0i * p1i, p0r * p1i + p0i * p1r)
            }
        };
        let rn = (t as u128 * (n_value as u128 % m as u128) % m as u128) as u64;
        let (sin, cos) = (-tau * rn as f64 / m as f64).sin_cos();
        acc_re += prod_re * cos - prod_im * sin;
        acc_im += prod_re * sin + prod_im * cos;
    }
    let integral = acc_re / m as f64;
    let imag = acc_im / m as f64;
    let rounded = integral.round() as i128;
    let residual = (integral - rounded as f64).abs().max(imag.abs());
    let conv = count_representations(n_value, n, k, pattern)?.count;
    Ok(DftCrossCheck {
        n_value,
        n,
        k,
        pattern: pattern.describe(),
        integral,
        residual,
        rounded,
        convolution_count: conv,
        agrees: rounded == conv,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digits::classify;

    #[test]
    fn nth_root_floor_basics() {
        assert_eq!(nth_root_floor(51000, 3), 37);
        assert_eq!(nth_root_floor(50653, 3), 37);
        assert_eq!(nth_root_floor(50652, 3), 36);
        assert_eq!(nth_root_floor(1, 5), 1);
        assert_eq!(nth_root_floor(0, 3), 0);
        assert_eq!(nth_root_floor(u64::MAX, 2), (1u64 << 32) - 1);
    }

    #[test]
    fn base_vectors_tiny() {
        let b = build_base_vectors(2, 3, 10).unwrap();
        assert_eq!(b.a.coeff(1), 1);
        assert_eq!(b.a.coeff(8), 1);
        assert_eq!(b.a.sum(), 2);
        // ε(1) = ε(2) = −1
        assert_eq!(b.e.coeff(1), -1);
        assert_eq!(b.e.coeff(8), -1);
        assert_eq!(b.g0.sum(), 0);
        assert_eq!(b.g1.sum(), 2);
    }

    #[test]
    fn base_vectors_census_cross_check() {
        let p = 200u64;
        let b = build_base_vectors(p, 3, pow_checked(p, 3).unwrap() as u64).unwrap();
        let class0_census = (1..=p)
            .filter(|&x| classify(x).unwrap() == DigitClass::Class0)
            .count() as i128;
        assert_eq!(b.g0.sum(), class0_census);
        assert_eq!(b.a.sum(), p as i128);
        // A = G0 + G1 and E = G0 − G1 pointwise
        for v in 0..b.a.coeffs.len() {
            assert_eq!(b.a.coeffs[v], b.g0.coeffs[v] + b.g1.coeffs[v]);
            assert_eq!(b.e.coeffs[v], b.g0.coeffs[v] - b.g1.coeffs[v]);
            assert!(b.e.coeffs[v].abs() <= b.a.coeffs[v]);
        }
    }

    #[test]
    fn count_minimal_solution() {
        let r = count_representations(4, 3, 4, &Pattern::Unrestricted).unwrap();
        assert_eq!(r.count, 1);
    }

    #[test]
    fn count_taxicab() {
        let r = count_representations(1729, 3, 2, &Pattern::Unrestricted).unwrap();
        assert_eq!(r.count, 4);
        let r = count_representations(1729, 3, 2, &Pattern::parse("00").unwrap()).unwrap();
        assert_eq!(r.count, 2); // only (9,10) and (10,9); 1 and 12 mix classes
        let r = count_representations(0, 3, 2, &Pattern::Unrestricted).unwrap();
        assert_eq!(r.count, 0);
    }

    #[test]
    fn count_matches_brute_force() {
        let n_value = 1000u64;
        let n = 3;
        for k in 2..=3u32 {
            let conv = count_representations(n_value, n, k, &Pattern::Unrestricted)
                .unwrap()
                .count;
            let p = nth_root_floor(n_value, n);
            let mut brute = 0i128;
            let mut stack = vec![(0u64, 0u32)];
            while let Some((sum, depth)) = stack.pop() {
                if depth == k {
                    if sum == n_value {
                        brute += 1;
                    }
                    continue;
                }
                for x in 1..=p {
                    let nv = sum + x.pow(n);
                    if nv <= n_value {
                        stack.push((nv, depth + 1));
                    }
                }
            }
            assert_eq!(conv, brute, "k = {k}");
        }
    }

    #[test]
    fn moment_fixtures() {
        assert_eq!(moment_s(8, 3, 2).unwrap().value, 120);
        assert_eq!(moment_s(12, 3, 2).unwrap().value, 284);
        for p in [1u64, 7, 100, 1000] {
            assert_eq!(moment_s(p, 3, 1).unwrap().value, p as i128, "P = {p}");
        }
    }

    #[test]
    fn mixed_moment_degenerate_and_dominated() {
        // l = 0 coincides with the plain moment
        let plain = moment_s(8, 3, 2).unwrap();
        let mixed = mixed_moment(8, 3, 0, 2).unwrap();
        assert_eq!(mixed.value, plain.value);
        // l = 1, m = 0: distinct powers, each fiber ±1
        assert_eq!(mixed_moment(9, 3, 1, 0).unwrap().value, 9);
        // l = 1, m = 1 dominated by the plain fourth moment
        let mm = mixed_moment(8, 3, 1, 1).unwrap();
        assert!(mm.value <= 120);
        let dom = domination_check(8, 3, 1, 1).unwrap();
        assert!(dom.pointwise_holds && dom.sum_holds);
        assert_eq!(dom.plain_value, 120);
        assert_eq!(dom.mixed_value, mm.value);
    }

    #[test]
    fn k0_values() {
        assert_eq!(k0_threshold(3), Some(8));
        assert_eq!(k0_threshold(10), Some(1024));
        assert_eq!(k0_threshold(11), Some(1758));
        assert_eq!(k0_threshold(2), None);
    }

    #[test]
    fn ratio_report_small_window() {
        let r = theorem_ratio_report(3, 8, 200, 260).unwrap();
        assert_eq!(r.rows.len(), 61);
        assert_eq!(r.k0, Some(8));
        assert_eq!(r.meets_k0, Some(true));
        // N = 216 = 8·27 is the smallest with a fully even-class solution
        let row216 = r.rows.iter().find(|row| row.n_value == 216).unwrap();
        assert!(row216.restricted > 0);
        assert!(theorem_ratio_report(3, 8, 10, 5).is_err());
        assert!(theorem_ratio_report(3, 1, 10, 20).is_err());
    }

    #[test]
    fn partition_small_cases() {
        let c = pattern_partition_check(1729, 3, 2).unwrap();
        assert!(c.holds);
        assert_eq!(c.unrestricted, 4);
        // J = 0 window: all patterns empty
        let c = pattern_partition_check(5, 3, 2).unwrap();
        assert!(c.holds);
        assert_eq!(c.unrestricted, 0);
        // triple loop fixture: 36 = 1 + 8 + 27, six orderings
        let c = pattern_partition_check(36, 3, 3).unwrap();
        assert!(c.holds);
        assert_eq!(c.unrestricted, 6);
        assert!(pattern_partition_check(100, 3, 13).is_err());
    }

    #[test]
    fn dft_agrees_with_convolution() {
        let d = dft_cross_check(4, 3, 4, &Pattern::parse("0000").unwrap()).unwrap();
        assert!(d.agrees);
        assert_eq!(d.rounded, 0); // the only solution uses 1 ∈ the odd class
        assert!(d.residual < 0.01);

        let d = dft_cross_check(4, 3, 4, &Pattern::Unrestricted).unwrap();
        assert!(d.agrees);
        assert_eq!(d.rounded, 1);

        let d = dft_cross_check(1729, 3, 2, &Pattern::parse("00").unwrap()).unwrap();
        assert!(d.agrees);
        assert_eq!(d.rounded, 2);
        assert!(d.residual < 0.01);

        assert!(dft_cross_check(20000, 3, 2, &Pattern::Unrestricted).is_err());
    }

    #[test]
    fn pattern_parsing() {
        assert_eq!(Pattern::parse("unrestricted").unwrap(), Pattern::Unrestricted);
        let p = Pattern::parse("010").unwrap();
        assert_eq!(p.describe(), "010");
        assert!(Pattern::parse("012").is_err());
        assert!(matches!(
            count_representations(10, 3, 2, &Pattern::parse("000").unwrap()),
            Err(Error::PatternLength { .. })
        ));
    }
}
