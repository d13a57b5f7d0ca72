//! Complex exponential sums over k-th powers.
//!
//! `S(α) = Σ_{x≤P} e(αxⁿ)` and its sign-twisted companion
//! `W(α) = Σ_{x≤P} ε(x) e(αxⁿ)`, with `e(t) = e^{2πit}`; twisted sums
//! `W(z,b) = Σ ε(x) e(zxⁿ − bx/q)`; complete Gauss sums
//! `Σ_{l mod q} e((alⁿ + bl)/q)` and their second moment over `b`, which
//! equals `q` exactly by orthogonality; differencing probes and a sup scan
//! of `|W|` over low-denominator rationals.
//!
//! Rational phases are reduced mod `q` in integer arithmetic and real
//! phases mod 1 in wide-integer arithmetic (see [`phase`]), so phases handed
//! to trig are always in `[0, 1)` and periodicity `S(α+1) = S(α)` holds at
//! the reduction level. Accumulation is compensated (Kahan) with a tracked
//! rounding bound.

mod phase;
mod rational;

pub use rational::{rational_approx, RationalApprox};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::digits::epsilon_i64;
use crate::error::{Error, Result};
use phase::{frac_signed, phase_mul, pow_mod, pow_u128};

const TAU: f64 = std::f64::consts::TAU;

/// A complex sum with its term count and accumulated rounding bound.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ComplexSumValue {
    pub re: f64,
    pub im: f64,
    /// Number of summands folded in.
    pub terms: u64,
    /// Crude rounding bound: `terms · ε_machine · max partial magnitude`.
    pub err_bound: f64,
}

impl ComplexSumValue {
    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Compensated accumulator for complex unit-modulus terms.
#[derive(Debug, Clone, Copy, Default)]
struct KahanComplex {
    re: f64,
    re_c: f64,
    im: f64,
    im_c: f64,
    terms: u64,
    max_partial: f64,
}

impl KahanComplex {
    #[inline]
    fn add(&mut self, re: f64, im: f64) {
        let y = re - self.re_c;
        let t = self.re + y;
        self.re_c = (t - self.re) - y;
        self.re = t;
        let y = im - self.im_c;
        let t = self.im + y;
        self.im_c = (t - self.im) - y;
        self.im = t;
        self.terms += 1;
        let mag = self.re.abs() + self.im.abs();
        if mag > self.max_partial {
            self.max_partial = mag;
        }
    }

    #[inline]
    fn add_phase(&mut self, theta: f64) {
        let (s, c) = (TAU * theta).sin_cos();
        self.add(c, s);
    }

    fn finish(self) -> ComplexSumValue {
        let v = ComplexSumValue {
            re: self.re,
            im: self.im,
            terms: self.terms,
            err_bound: self.terms as f64 * f64::EPSILON * self.max_partial,
        };
        // Triangle inequality; violation would mean broken phase reduction.
        debug_assert!(v.modulus() <= v.terms as f64 * (1.0 + 1e-12) + v.err_bound + 1e-9);
        v
    }
}

fn check_power_range(p: u64, n: u32) -> Result<()> {
    pow_u128(p, n).map(|_| ()).ok_or(Error::PowerOverflow { base: p, exp: n })
}

/// `S(α) = Σ_{x≤P} e(α xⁿ)`.
pub fn weyl_sum_s(alpha: f64, p: u64, n: u32) -> Result<ComplexSumValue> {
    if !alpha.is_finite() {
        return Err(Error::NonFinite);
    }
    check_power_range(p, n)?;
    let zf = frac_signed(alpha);
    let mut acc = KahanComplex::default();
    for x in 1..=p {
        let xn = pow_u128(x, n).expect("checked at p");
        acc.add_phase(phase_mul(zf, xn));
    }
    Ok(acc.finish())
}

/// `W(α) = Σ_{x≤P} ε(x) e(α xⁿ)`.
pub fn weyl_sum_w(alpha: f64, p: u64, n: u32) -> Result<ComplexSumValue> {
    if !alpha.is_finite() {
        return Err(Error::NonFinite);
    }
    check_power_range(p, n)?;
    let zf = frac_signed(alpha);
    let mut acc = KahanComplex::default();
    for x in 1..=p {
        let xn = pow_u128(x, n).expect("checked at p");
        let theta = phase_mul(zf, xn);
        let (s, c) = (TAU * theta).sin_cos();
        let e = epsilon_i64(x) as f64;
        acc.add(e * c, e * s);
    }
    Ok(acc.finish())
}

/// `W(z, b) = Σ_{x≤P} ε(x) e(z xⁿ − bx/q)` with `0 ≤ b < q`.
pub fn weyl_sum_w_twisted(z: f64, b: u64, q: u64, p: u64, n: u32) -> Result<ComplexSumValue> {
    if !z.is_finite() {
        return Err(Error::NonFinite);
    }
    if q == 0 || b >= q {
        return Err(Error::EmptyRange);
    }
    check_power_range(p, n)?;
    let zf = frac_signed(z);
    let mut acc = KahanComplex::default();
    for x in 1..=p {
        let xn = pow_u128(x, n).expect("checked at p");
        let t_power = phase_mul(zf, xn);
        let t_linear = ((b as u128 * x as u128) % q as u128) as f64 / q as f64;
        let theta = t_power - t_linear; // in (-1, 1); safe for trig directly
        let (s, c) = (TAU * theta).sin_cos();
        let e = epsilon_i64(x) as f64;
        acc.add(e * c, e * s);
    }
    Ok(acc.finish())
}

fn reduce_mod(v: i64, q: u64) -> u64 {
    v.rem_euclid(q as i64) as u64
}

fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Complete exponential sum `Σ_{l=0}^{q−1} e((a lⁿ + b l)/q)` with
/// `gcd(a, q) = 1`. Phases are reduced mod `q` in integer arithmetic, so
/// every summand is an exact `q`-th root of unity up to one trig rounding.
pub fn gauss_sum(a: i64, q: u64, n: u32, b: i64) -> Result<ComplexSumValue> {
    if q == 0 {
        return Err(Error::EmptyRange);
    }
    let a_red = reduce_mod(a, q);
    if q > 1 && gcd_u64(a_red, q) != 1 {
        return Err(Error::NotCoprime { a, q });
    }
    let b_red = reduce_mod(b, q);
    let mut acc = KahanComplex::default();
    for l in 0..q {
        let r = ((a_red as u128 * pow_mod(l, n, q) as u128 + b_red as u128 * l as u128)
            % q as u128) as u64;
        acc.add_phase(r as f64 / q as f64);
    }
    Ok(acc.finish())
}

/// `(1/q) Σ_{b=0}^{q−1} |Σ_l e((a lⁿ + b l)/q)|²`, which equals `q` exactly
/// by orthogonality; returned as computed so callers can check the identity.
pub fn gauss_second_moment(a: i64, q: u64, n: u32) -> Result<f64> {
    if q == 0 {
        return Err(Error::EmptyRange);
    }
    let a_red = reduce_mod(a, q);
    if q > 1 && gcd_u64(a_red, q) != 1 {
        return Err(Error::NotCoprime { a, q });
    }
    let powers: Vec<u64> = (0..q).map(|l| pow_mod(l, n, q)).collect();
    let mut total = 0.0;
    let mut comp = 0.0;
    for b in 0..q {
        let mut acc = KahanComplex::default();
        for l in 0..q {
            let r = ((a_red as u128 * powers[l as usize] as u128 + b as u128 * l as u128)
                % q as u128) as u64;
            acc.add_phase(r as f64 / q as f64);
        }
        let v = acc.finish();
        let sq = v.re * v.re + v.im * v.im;
        let y = sq - comp;
        let t = total + y;
        comp = (t - total) - y;
        total = t;
    }
    Ok(total / q as f64)
}

/// Result of one differencing probe.
#[derive(Debug, Clone, Serialize)]
pub struct VdcProbe {
    pub alpha: f64,
    pub p: u64,
    pub n: u32,
    pub h_cap: u64,
    /// `|W(α)|²`.
    pub lhs: f64,
    /// `2(P²/H + (P/H)·Σ_{1≤h<H}|inner(h)| + PH)`.
    pub rhs: f64,
    pub holds: bool,
}

/// Checks the explicit-constant differencing inequality
/// `|W(α)|² ≤ 2(P²/H + (P/H) Σ_{1≤h<H} |Σ_{x≤P−h} ε(x)ε(x+h) e(α((x+h)ⁿ−xⁿ))| + PH)`.
///
/// The factor-2 form makes the usually implicit constant concrete, so the
/// comparison needs no tolerance.
pub fn van_der_corput_probe(alpha: f64, p: u64, n: u32, h_cap: u64) -> Result<VdcProbe> {
    if !alpha.is_finite() {
        return Err(Error::NonFinite);
    }
    if h_cap == 0 || h_cap > p / 4 {
        return Err(Error::EmptyRange);
    }
    check_power_range(p, n)?;
    let w = weyl_sum_w(alpha, p, n)?;
    let lhs = w.re * w.re + w.im * w.im;
    let zf = frac_signed(alpha);
    let inner_abs: Vec<f64> = (1..h_cap)
        .into_par_iter()
        .map(|h| {
            let mut acc = KahanComplex::default();
            for x in 1..=(p - h) {
                let d = pow_u128(x + h, n).expect("checked") - pow_u128(x, n).expect("checked");
                let theta = phase_mul(zf, d);
                let (s, c) = (TAU * theta).sin_cos();
                let e = (epsilon_i64(x) * epsilon_i64(x + h)) as f64;
                acc.add(e * c, e * s);
            }
            acc.finish().modulus()
        })
        .collect();
    let sum_inner: f64 = inner_abs.iter().sum();
    let pf = p as f64;
    let hf = h_cap as f64;
    let rhs = 2.0 * (pf * pf / hf + pf / hf * sum_inner + pf * hf);
    Ok(VdcProbe {
        alpha,
        p,
        n,
        h_cap,
        lhs,
        rhs,
        holds: lhs <= rhs,
    })
}

/// One row of the sup scan: the sums at `α = a/q`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FareyRow {
    pub a: u64,
    pub q: u64,
    pub abs_s: f64,
    pub abs_w: f64,
    /// `|W(a/q)| / P`.
    pub ratio: f64,
}

/// Scan of `|W(a/q)|/P` over all reduced fractions with `q ≤ q_max`.
#[derive(Debug, Clone, Serialize)]
pub struct SupScan {
    pub p: u64,
    pub n: u32,
    pub q_max: u64,
    pub rows: Vec<FareyRow>,
    pub max_abs_w: f64,
    /// The fraction attaining the max (first in (q, a) order on ties).
    pub max_at: (u64, u64),
    /// `ln max|W| / ln P`; reported, never asserted (the exponent constant
    /// is not pinned down).
    pub exponent: f64,
}

/// Evaluates `|S|` and `|W|` at every reduced fraction `a/q`, `q ≤ q_max`,
/// in ascending `(q, a)` order (the sole `q = 1` point is `α = 0`).
/// Fractions are evaluated in parallel and reduced deterministically.
pub fn sup_scan(p: u64, n: u32, q_max: u64) -> Result<SupScan> {
    if p < 2 || q_max == 0 {
        return Err(Error::EmptyRange);
    }
    if q_max > p {
        return Err(Error::ResourceLimit {
            what: "q_max beyond P",
            requested: q_max as u128,
            cap: p as u128,
        });
    }
    check_power_range(p, n)?;
    let mut fractions = vec![(0u64, 1u64)];
    for q in 2..=q_max {
        for a in 1..q {
            if gcd_u64(a, q) == 1 {
                fractions.push((a, q));
            }
        }
    }
    let rows: Vec<FareyRow> = fractions
        .into_par_iter()
        .map(|(a, q)| {
            let mut acc_s = KahanComplex::default();
            let mut acc_w = KahanComplex::default();
            for x in 1..=p {
                let xn_mod = {
                    // x^n mod q via repeated squaring keeps everything exact
                    let r = pow_mod(x % q.max(1), n, q);
                    ((a as u128 * r as u128) % q as u128) as u64
                };
                let theta = xn_mod as f64 / q as f64;
                let (s, c) = (TAU * theta).sin_cos();
                acc_s.add(c, s);
                let e = epsilon_i64(x) as f64;
                acc_w.add(e * c, e * s);
            }
            let sv = acc_s.finish();
            let wv = acc_w.finish();
            FareyRow {
                a,
                q,
                abs_s: sv.modulus(),
                abs_w: wv.modulus(),
                ratio: wv.modulus() / p as f64,
            }
        })
        .collect();
    let mut max_abs_w = f64::NEG_INFINITY;
    let mut max_at = (0, 1);
    for r in &rows {
        if r.abs_w > max_abs_w {
            max_abs_w = r.abs_w;
            max_at = (r.a, r.q);
        }
    }
    let exponent = if max_abs_w > 0.0 {
        max_abs_w.ln() / (p as f64).ln()
    } else {
        f64::NEG_INFINITY
    };
    Ok(SupScan {
        p,
        n,
        q_max,
        rows,
        max_abs_w,
        max_at,
        exponent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::ToPrimitive;

    fn assert_close(a: f64, b: f64, tol: f64, ctx: &str) {
        assert!((a - b).abs() <= tol, "{ctx}: {a} vs {b}");
    }

    #[test]
    fn s_at_integer_alpha_is_p() {
        for alpha in [0.0, 1.0, -3.0] {
            let v = weyl_sum_s(alpha, 100, 3).unwrap();
            assert_close(v.re, 100.0, 1e-9, "re");
            assert_close(v.im, 0.0, 1e-9, "im");
        }
    }

    #[test]
    fn s_half_cube_parity() {
        // Σ_{x≤4} e^{πi x³} = -1 + 1 - 1 + 1 = 0.
        let v = weyl_sum_s(0.5, 4, 3).unwrap();
        assert_close(v.re, 0.0, 1e-12, "re");
        assert_close(v.im, 0.0, 1e-12, "im");
    }

    #[test]
    fn w_at_zero_is_sign_sum() {
        let v = weyl_sum_w(0.0, 8, 3).unwrap();
        assert_close(v.re, -2.0, 1e-12, "re"); // ε(1..8) sums to -2
        assert_close(v.im, 0.0, 1e-12, "im");
    }

    #[test]
    fn w_single_term() {
        // P = 1: W = ε(1) e(α) = -e(α).
        for alpha in [0.1, 0.77, -0.3] {
            let v = weyl_sum_w(alpha, 1, 4).unwrap();
            let expect = -(TAU * frac_signed(alpha)).cos();
            assert_close(v.re, expect, 1e-12, "re");
        }
    }

    #[test]
    fn w_bounded_by_p() {
        let mut state = 0x9e3779b97f4a7c15u64;
        for _ in 0..100 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let alpha = (state >> 11) as f64 / (1u64 << 53) as f64 * 10.0 - 5.0;
            let v = weyl_sum_w(alpha, 64, 3).unwrap();
            assert!(v.modulus() <= 64.0 + 1e-9);
        }
    }

    #[test]
    fn conjugate_symmetry_and_periodicity() {
        // dyadic alphas so that alpha + 1 is itself exact in f64
        for &alpha in &[0.1236572265625, 0.625, 0.9990234375] {
            let p = 256;
            let plus = weyl_sum_s(alpha, p, 3).unwrap();
            let minus = weyl_sum_s(-alpha, p, 3).unwrap();
            assert_close(plus.re, minus.re, 1e-12 * p as f64, "conj re");
            assert_close(plus.im, -minus.im, 1e-12 * p as f64, "conj im");

            let shifted = weyl_sum_s(alpha + 1.0, p, 3).unwrap();
            assert_close(plus.re, shifted.re, 1e-12 * p as f64, "per re");
            assert_close(plus.im, shifted.im, 1e-12 * p as f64, "per im");

            let wp = weyl_sum_w(alpha, p, 3).unwrap();
            let wm = weyl_sum_w(-alpha, p, 3).unwrap();
            assert_close(wp.re, wm.re, 1e-12 * p as f64, "W conj re");
            assert_close(wp.im, -wm.im, 1e-12 * p as f64, "W conj im");
        }
    }

    #[test]
    fn twisted_degenerate_cases() {
        let w0 = weyl_sum_w(0.0, 32, 3).unwrap();
        let t0 = weyl_sum_w_twisted(0.0, 0, 5, 32, 3).unwrap();
        assert_close(w0.re, t0.re, 1e-12, "z=0,b=0 re");
        assert_close(w0.im, t0.im, 1e-12, "z=0,b=0 im");

        let z = 0.0125;
        let w = weyl_sum_w(z, 32, 3).unwrap();
        let t = weyl_sum_w_twisted(z, 0, 1, 32, 3).unwrap();
        assert_close(w.re, t.re, 1e-12 * 32.0, "q=1 re");
        assert_close(w.im, t.im, 1e-12 * 32.0, "q=1 im");
    }

    #[test]
    fn twisted_matches_extended_precision_oracle() {
        // Re-sum with exact rational phase reduction: phase = frac(z xⁿ - bx/q)
        // computed in BigRational, then one trig call per term.
        let (z, b, q, p, n) = (1.0 / 2000.0, 3u64, 7u64, 64u64, 3u32);
        let got = weyl_sum_w_twisted(z, b, q, p, n).unwrap();
        let z_r = BigRational::from_float(z).unwrap();
        let (mut re, mut im) = (0.0f64, 0.0f64);
        for x in 1..=p {
            let xn = BigInt::from(x).pow(n);
            let phase = &z_r * BigRational::from_integer(xn)
                - BigRational::new(BigInt::from(b * x), BigInt::from(q));
            let fr = (&phase - phase.floor()).to_f64().unwrap();
            let e = epsilon_i64(x) as f64;
            re += e * (TAU * fr).cos();
            im += e * (TAU * fr).sin();
        }
        assert_close(got.re, re, 1e-9 * p as f64, "re");
        assert_close(got.im, im, 1e-9 * p as f64, "im");
    }

    #[test]
    fn gauss_sum_edges() {
        // q = 1: single term e(0) = 1.
        let v = gauss_sum(1, 1, 3, 0).unwrap();
        assert_close(v.re, 1.0, 1e-12, "q=1");
        // n = 1: geometric sum, q | (a+b) decides q vs 0.
        let v = gauss_sum(5, 6, 1, 1).unwrap();
        assert_close(v.re, 6.0, 1e-9, "q | a+b");
        let v = gauss_sum(5, 6, 1, 3).unwrap();
        assert_close(v.modulus(), 0.0, 1e-9, "q !| a+b");
        // coprimality enforced
        assert!(matches!(gauss_sum(2, 6, 3, 0), Err(Error::NotCoprime { .. })));
        // negative a is reduced mod q
        let v1 = gauss_sum(-1, 5, 3, 2).unwrap();
        let v2 = gauss_sum(4, 5, 3, 2).unwrap();
        assert_close(v1.re, v2.re, 1e-12, "reduction re");
        assert_close(v1.im, v2.im, 1e-12, "reduction im");
    }

    #[test]
    fn gauss_sum_direct_five_terms() {
        let got = gauss_sum(2, 5, 3, 0).unwrap();
        let (mut re, mut im) = (0.0, 0.0);
        for l in 0u64..5 {
            let r = (2 * l.pow(3)) % 5;
            re += (TAU * r as f64 / 5.0).cos();
            im += (TAU * r as f64 / 5.0).sin();
        }
        assert_close(got.re, re, 1e-12, "re");
        assert_close(got.im, im, 1e-12, "im");
    }

    #[test]
    fn gauss_second_moment_is_q() {
        assert_close(gauss_second_moment(1, 7, 3).unwrap(), 7.0, 1e-6 * 7.0, "q=7");
        assert_close(gauss_second_moment(1, 1, 2).unwrap(), 1.0, 1e-9, "q=1");
        assert_close(
            gauss_second_moment(7, 100, 5).unwrap(),
            100.0,
            1e-4,
            "q=100",
        );
    }

    #[test]
    fn vdc_probe_holds() {
        // H = 1: rhs >= 2P² >= lhs unconditionally.
        let pr = van_der_corput_probe(0.4321, 64, 3, 1).unwrap();
        assert!(pr.holds);
        let pr = van_der_corput_probe(0.0, 256, 3, 16).unwrap();
        assert!(pr.holds);
        let golden = 0.6180339887498949f64;
        let pr = van_der_corput_probe(golden, 1024, 3, 32).unwrap();
        assert!(pr.holds);
        assert!(van_der_corput_probe(0.1, 64, 3, 17).is_err()); // H > P/4
    }

    #[test]
    fn sup_scan_small() {
        let scan = sup_scan(1 << 10, 3, 50).unwrap();
        // q = 1 row present and first
        assert_eq!((scan.rows[0].a, scan.rows[0].q), (0, 1));
        // strict ratio < 1: ε takes both signs below any P > 1
        assert!(scan.max_abs_w / 1024.0 < 1.0);
        // rows are lowest-terms only and ordered
        for w in scan.rows.windows(2) {
            assert!((w[0].q, w[0].a) < (w[1].q, w[1].a));
        }
        let count: usize = scan.rows.len();
        // 1 + Σ_{q=2..50} φ(q)
        let phi_sum: u64 = (2u64..=50)
            .map(|q| (1..q).filter(|&a| gcd_u64(a, q) == 1).count() as u64)
            .sum();
        assert_eq!(count as u64, 1 + phi_sum);
    }

    #[test]
    fn power_overflow_reported() {
        assert!(matches!(
            weyl_sum_s(0.3, 1 << 40, 4),
            Err(Error::PowerOverflow { .. })
        ));
    }
}
