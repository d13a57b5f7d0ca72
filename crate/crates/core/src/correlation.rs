//! Sign correlation sums and their halving recursion.
//!
//! `S(X,h) = Σ_{n≤X} ε(n)ε(n+h)` and the companion
//! `V(X,h) = Σ_{n≤X} ε(n)(ε(n+h) + ε(n+h+1))` obey an exact level-by-level
//! recursion driven by the binary digits of `h`: splitting each sum into even
//! and odd `n` re-expresses level `j` through level `j+1` with shift
//! `h_{j+1} = ⌊h_j/2⌋` and sign `s_j = 1 − 2·bit_j(h)`, up to a bounded
//! boundary residual. Unfolding the recursion yields coefficients `α_j, β_j`
//! whose growth is controlled by the base-4 digit statistic `κ₁₂(⌊h/2⌋)`;
//! that control is what caps the aggregate `Σ_{h≤H} |S(X,h)|`.
//!
//! All sums here run over integer `n` from 1 to `⌊X⌋`, and scaled range
//! arguments are floored per level.

use num_bigint::BigInt;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::digits::{epsilon_i64, kappa12};
use crate::error::{Error, Result};

/// Growth exponent `μ = ln 3.5 / ln 4 = 0.9036…` for the `Σ|S|` audit.
pub fn mu() -> f64 {
    3.5f64.ln() / 4f64.ln()
}

/// Exact values of one correlation pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CorrelationValue {
    /// Range bound `X` (sums run over `1..=X`).
    pub x: u64,
    /// Shift `h`.
    pub h: u64,
    /// `S(X,h)`; every term is `±1`, so `|s| ≤ X`.
    pub s: i64,
    /// `V(X,h)`; every term is in `{−2, 0, 2}`, so `|v| ≤ 2X`.
    pub v: i64,
    /// Set when `h > X/4`, outside the regime the aggregate bound assumes.
    pub beyond_regime: bool,
}

/// `S(X,h)` and `V(X,h)` by direct enumeration. `h = 0` is allowed and gives
/// `S = X` exactly.
pub fn corr_direct(x: u64, h: u64) -> Result<CorrelationValue> {
    if x == 0 {
        return Err(Error::EmptyRange);
    }
    let mut s = 0i64;
    let mut v = 0i64;
    for n in 1..=x {
        let e = epsilon_i64(n);
        let eh = epsilon_i64(n + h);
        s += e * eh;
        v += e * (eh + epsilon_i64(n + h + 1));
    }
    Ok(CorrelationValue {
        x,
        h,
        s,
        v,
        beyond_regime: h > x / 4,
    })
}

/// Residuals of the even/odd halving step at one level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RecursionResiduals {
    /// `θ_j`: defect of the `S` relation at level `j`.
    pub theta: i64,
    /// `θ′_j`: defect of the `V` relation at level `j`.
    pub theta_prime: i64,
}

impl RecursionResiduals {
    /// Whether both residuals sit inside the `|θ| ≤ 1` contract.
    pub fn within_contract(&self) -> bool {
        self.theta.abs() <= 1 && self.theta_prime.abs() <= 1
    }
}

/// Evaluates both sides of the level-`j` halving relations by direct
/// enumeration and returns the residuals.
///
/// With `Y = ⌊X/2^j⌋`, `g = ⌊h/2^j⌋`, `s = 1 − 2·bit_j(h)`:
///
/// ```text
/// S(Y, g) = (1+s)·S(⌊Y/2⌋, g') + ((s−1)/2)·V(⌊Y/2⌋, g') + θ
/// V(Y, g) = 2s·S(⌊Y/2⌋, g')   − s·V(⌊Y/2⌋, g')          + θ′
/// ```
///
/// where `g' = ⌊g/2⌋`. On ranges `X` that are powers of two (where halving
/// is exact) both residuals satisfy `|θ| ≤ 1`; in fact they vanish whenever
/// the half-range point is itself a power of two dominating the shift.
pub fn recursion_step_check(x: u64, h: u64, j: u32) -> Result<RecursionResiduals> {
    if h == 0 || j >= 64 - h.leading_zeros() {
        return Err(Error::EmptyRange);
    }
    let y = x >> j;
    if y >> 1 == 0 {
        return Err(Error::EmptyRange);
    }
    let g = h >> j;
    let g1 = h >> (j + 1);
    let s = 1 - 2 * ((h >> j) & 1) as i64;

    let top = corr_direct(y, g)?;
    let half = corr_direct(y >> 1, g1)?;

    let theta = top.s - ((1 + s) * half.s + (s - 1) / 2 * half.v);
    let theta_prime = top.v - (2 * s * half.s - s * half.v);
    Ok(RecursionResiduals { theta, theta_prime })
}

/// One level of the unfolded recursion.
#[derive(Debug, Clone)]
pub struct TraceLevel {
    /// Level index `j`.
    pub j: u32,
    /// Shift at this level, `h_j = ⌊h/2^j⌋`.
    pub h_j: u64,
    /// Sign `s_j = 1 − 2·bit_j(h)`.
    pub s_j: i64,
    /// Coefficient `α_j` (exact integer, `|α_j| ≤ 2^j`).
    pub alpha: i128,
    /// Coefficient `β_j`, kept as an exact rational.
    pub beta: Ratio<i128>,
    /// Residual `θ_j` when the trace was computed against a concrete `X`.
    pub theta: Option<f64>,
    /// Residual `θ′_j` when the trace was computed against a concrete `X`.
    pub theta_prime: Option<f64>,
}

/// The full coefficient trace for one shift `h`.
///
/// Coefficients start from `α₀ = 1`, `β₀ = 0`, which is what makes
/// `S(X,h) = α₀·S(X,h₀) + β₀·V(X,h₀)` an identity at level 0 and reproduces
/// `α₁ = 1 + s₀`. Reports carry [`CorrelationTrace::INITIALIZATION_NOTE`]
/// because the recursion's source states `β₀ = 1`, which is inconsistent
/// with that identity; the per-level relations checked here are independent
/// of the choice.
#[derive(Debug, Clone)]
pub struct CorrelationTrace {
    /// The shift being traced.
    pub h: u64,
    /// Levels `0..=k` where `2^k ≤ h < 2^{k+1}`.
    pub levels: Vec<TraceLevel>,
    /// `κ₁₂(⌊h/2⌋)`, the statistic controlling the final coefficient.
    pub kappa12_h1: u32,
}

impl CorrelationTrace {
    /// Flagged alongside every exported trace; see the type docs.
    pub const INITIALIZATION_NOTE: &'static str =
        "coefficients start from alpha0 = 1, beta0 = 0; the beta0 = 1 variant \
         breaks S = alpha0*S + beta0*V at level 0 and is not used";

    /// Number of halving steps, `k = bitlen(h) − 1`.
    pub fn k(&self) -> u32 {
        self.levels.len() as u32 - 1
    }

    /// Final coefficient `α_k`.
    pub fn alpha_final(&self) -> i128 {
        self.levels.last().expect("nonempty trace").alpha
    }

    /// `|α_j| ≤ 2^j` at every level (exact integer comparison).
    pub fn alpha_doubling_bound_holds(&self) -> bool {
        self.levels
            .iter()
            .all(|lv| lv.alpha.unsigned_abs() <= 1u128 << lv.j)
    }

    /// Second-difference relation `α_{j+2} − α_{j+1} = 2 s_j s_{j+1} α_j`
    /// at every applicable level.
    pub fn second_difference_holds(&self) -> bool {
        self.levels.windows(3).all(|w| {
            w[2].alpha - w[1].alpha == 2 * (w[0].s_j * w[1].s_j) as i128 * w[0].alpha
        })
    }

    /// Closed-form cap `|α_k| ≤ (3/4)^{κ₁₂(⌊h/2⌋)} · (4/3) · 2^k`, compared
    /// in exact integers: `3 · 4^κ · |α_k| ≤ 4 · 3^κ · 2^k`.
    pub fn closed_form_bound_holds(&self) -> bool {
        let kappa = self.kappa12_h1;
        let lhs = BigInt::from(3)
            * BigInt::from(4).pow(kappa)
            * BigInt::from(self.alpha_final().unsigned_abs());
        let rhs = BigInt::from(4) * BigInt::from(3).pow(kappa) * (BigInt::from(1) << self.k());
        lhs <= rhs
    }

    /// The cap value `(3/4)^κ · 4/3` normalised by `2^k`, as a float for
    /// report rows.
    pub fn alpha_bound_normalized(&self) -> f64 {
        (3f64 / 4f64).powi(self.kappa12_h1 as i32) * 4.0 / 3.0
    }

    /// Serializable snapshot carrying the bound verdicts and the
    /// initialization note.
    pub fn to_report(&self) -> TraceReport {
        TraceReport {
            h: self.h,
            k: self.k(),
            kappa12_h1: self.kappa12_h1,
            alpha_final: self.alpha_final(),
            alpha_doubling_bound_holds: self.alpha_doubling_bound_holds(),
            second_difference_holds: self.second_difference_holds(),
            closed_form_bound_holds: self.closed_form_bound_holds(),
            alpha_bound_normalized: self.alpha_bound_normalized(),
            levels: self
                .levels
                .iter()
                .map(|lv| TraceLevelReport {
                    j: lv.j,
                    h_j: lv.h_j,
                    s_j: lv.s_j,
                    alpha: lv.alpha,
                    beta: format!("{}/{}", lv.beta.numer(), lv.beta.denom()),
                    theta: lv.theta,
                    theta_prime: lv.theta_prime,
                })
                .collect(),
            initialization_note: Self::INITIALIZATION_NOTE,
        }
    }
}

/// Serializable form of [`CorrelationTrace`].
#[derive(Debug, Clone, Serialize)]
pub struct TraceReport {
    pub h: u64,
    pub k: u32,
    pub kappa12_h1: u32,
    #[serde(with = "crate::report::i128_str")]
    pub alpha_final: i128,
    pub alpha_doubling_bound_holds: bool,
    pub second_difference_holds: bool,
    pub closed_form_bound_holds: bool,
    pub alpha_bound_normalized: f64,
    pub levels: Vec<TraceLevelReport>,
    pub initialization_note: &'static str,
}

/// One serialized trace level; `beta` travels as an exact `num/den` string.
#[derive(Debug, Clone, Serialize)]
pub struct TraceLevelReport {
    pub j: u32,
    pub h_j: u64,
    pub s_j: i64,
    #[serde(with = "crate::report::i128_str")]
    pub alpha: i128,
    pub beta: String,
    pub theta: Option<f64>,
    pub theta_prime: Option<f64>,
}

/// Runs the coefficient recursion for `h ≥ 1` and returns the full trace.
pub fn coefficient_trace(h: u64) -> Result<CorrelationTrace> {
    coefficient_trace_impl(h, None)
}

/// As [`coefficient_trace`], additionally evaluating the per-level residuals
/// against a concrete range `X` (levels where the halved range is empty get
/// `None`).
pub fn coefficient_trace_with_residuals(x: u64, h: u64) -> Result<CorrelationTrace> {
    if x == 0 {
        return Err(Error::EmptyRange);
    }
    coefficient_trace_impl(h, Some(x))
}

fn coefficient_trace_impl(h: u64, x: Option<u64>) -> Result<CorrelationTrace> {
    if h == 0 {
        return Err(Error::EmptyRange);
    }
    let bitlen = 64 - h.leading_zeros();
    let k = bitlen - 1;
    let mut alpha: i128 = 1;
    let mut beta: Ratio<i128> = Ratio::from_integer(0);
    let mut levels = Vec::with_capacity(bitlen as usize);
    for j in 0..=k {
        let s_j = 1 - 2 * ((h >> j) & 1) as i64;
        let (theta, theta_prime) = match x {
            Some(x) => match recursion_step_check(x, h, j) {
                Ok(r) => (Some(r.theta as f64), Some(r.theta_prime as f64)),
                Err(_) => (None, None),
            },
            None => (None, None),
        };
        levels.push(TraceLevel {
            j,
            h_j: h >> j,
            s_j,
            alpha,
            beta,
            theta,
            theta_prime,
        });
        if j < k {
            let s = s_j as i128;
            // beta stays integral from beta0 = 0 ((s-1)/2 is 0 or -1), but
            // run the step in rationals and check rather than assume.
            let next_alpha = Ratio::from_integer((1 + s) * alpha)
                + Ratio::from_integer(2 * s) * beta;
            debug_assert!(next_alpha.is_integer());
            let next_beta =
                Ratio::new(s - 1, 2) * Ratio::from_integer(alpha) - Ratio::from_integer(s) * beta;
            alpha = next_alpha.to_integer();
            beta = next_beta;
        }
    }
    Ok(CorrelationTrace {
        h,
        levels,
        kappa12_h1: kappa12(h >> 1).kappa12,
    })
}

/// One per-shift row of the aggregate audit.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundAuditRow {
    pub h: u64,
    pub s: i64,
    pub v: i64,
    /// `κ₁₂(⌊h/2⌋)`.
    pub kappa12_h1: u32,
    /// `(3/4)^{κ₁₂} · 4/3`, the normalised coefficient cap for this `h`.
    pub alpha_bound: f64,
}

/// Aggregate audit of `T = Σ_{h=1}^{H} |S(X,h)|` against `X · H^μ`.
#[derive(Debug, Clone, Serialize)]
pub struct BoundAudit {
    pub x: u64,
    pub h_max: u64,
    /// Exact total `Σ|S|`.
    pub total: u64,
    /// The exponent `μ` used for the reference.
    pub mu: f64,
    /// Empirical ratio `T / (X · H^μ)`; the implied constant is not asserted.
    pub ratio: f64,
    pub rows: Vec<BoundAuditRow>,
}

/// Computes `Σ_{h≤H} |S(X,h)|` exactly, with per-`h` rows for export.
/// Parallel over `h`; the reduction order is fixed by the row index, so the
/// exact totals are independent of thread count.
pub fn bound_audit(x: u64, h_max: u64) -> Result<BoundAudit> {
    if x == 0 || h_max == 0 {
        return Err(Error::EmptyRange);
    }
    let rows: Vec<BoundAuditRow> = (1..=h_max)
        .into_par_iter()
        .map(|h| {
            let cv = corr_direct(x, h).expect("x validated above");
            let trace = coefficient_trace(h).expect("h >= 1");
            BoundAuditRow {
                h,
                s: cv.s,
                v: cv.v,
                kappa12_h1: trace.kappa12_h1,
                alpha_bound: trace.alpha_bound_normalized(),
            }
        })
        .collect();
    let total: u64 = rows.iter().map(|r| r.s.unsigned_abs()).sum();
    let mu = mu();
    let ratio = total as f64 / (x as f64 * (h_max as f64).powf(mu));
    Ok(BoundAudit {
        x,
        h_max,
        total,
        mu,
        ratio,
        rows,
    })
}

/// Least-squares fit of `ln T(X,H)` against `ln H` over a grid of `H`.
#[derive(Debug, Clone, Serialize)]
pub struct SlopeFit {
    pub x: u64,
    /// `(H, T)` pairs with exact totals.
    pub points: Vec<(u64, u64)>,
    pub slope: f64,
    pub intercept: f64,
}

/// Fits the log–log growth of `T(X,H) = Σ_{h≤H}|S(X,h)|` over `h_grid`.
/// A single pass computes `S(X,h)` for every `h` up to the grid maximum.
pub fn slope_fit(x: u64, h_grid: &[u64]) -> Result<SlopeFit> {
    if x == 0 || h_grid.len() < 2 || h_grid.iter().any(|&h| h == 0) {
        return Err(Error::EmptyRange);
    }
    let h_max = *h_grid.iter().max().expect("nonempty grid");
    let abs_s: Vec<u64> = (1..=h_max)
        .into_par_iter()
        .map(|h| corr_direct(x, h).expect("x > 0").s.unsigned_abs())
        .collect();
    let mut points = Vec::with_capacity(h_grid.len());
    for &h in h_grid {
        let total: u64 = abs_s[..h as usize].iter().sum();
        points.push((h, total));
    }
    let logs: Vec<(f64, f64)> = points
        .iter()
        .map(|&(h, t)| ((h as f64).ln(), (t as f64).ln()))
        .collect();
    let n = logs.len() as f64;
    let sx: f64 = logs.iter().map(|p| p.0).sum();
    let sy: f64 = logs.iter().map(|p| p.1).sum();
    let sxx: f64 = logs.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = logs.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    Ok(SlopeFit {
        x,
        points,
        slope,
        intercept,
    })
}
