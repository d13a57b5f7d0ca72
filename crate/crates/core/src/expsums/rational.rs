//! Best rational approximation with the Dirichlet guarantee.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use serde::Serialize;

use crate::error::{Error, Result};

/// A rational approximation `α = a/q + θ/(qτ)` with `(a,q) = 1`, `|θ| ≤ 1`,
/// `1 ≤ q ≤ τ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RationalApprox {
    pub a: i64,
    pub q: u64,
    /// `θ = (α − a/q)·qτ ∈ [−1, 1]`.
    pub theta: f64,
    pub tau: f64,
}

impl RationalApprox {
    /// Exact check of all three constraints against the f64 values of
    /// `alpha` and `tau` (both are rationals, so this is decidable).
    pub fn verify(&self, alpha: f64) -> bool {
        let alpha_r = match BigRational::from_float(alpha) {
            Some(v) => v,
            None => return false,
        };
        let tau_r = match BigRational::from_float(self.tau) {
            Some(v) => v,
            None => return false,
        };
        let a = BigInt::from(self.a);
        let q = BigInt::from(self.q);
        if self.q == 0 || a.gcd(&q) != BigInt::one() {
            return false;
        }
        if BigRational::from_integer(q.clone()) > tau_r {
            return false;
        }
        // |alpha - a/q| <= 1/(q tau)  <=>  |alpha*q - a| * tau <= 1
        let err = (alpha_r * &q - a).abs();
        err * tau_r <= BigRational::one()
    }
}

/// Finds the approximation with the smallest denominator `q ≤ τ` satisfying
/// `|α − a/q| ≤ 1/(qτ)`. Existence is Dirichlet's theorem; minimality makes
/// the output deterministic.
///
/// The search walks the continued fraction of the exact rational value of
/// `alpha`. Within each stage the intermediate fractions
/// `(c·p_i + p_{i−1})/(c·q_i + q_{i−1})` have error `|e_{i−1}| − c·|e_i|`
/// linear in `c`, so the smallest qualifying `c` is solved for directly; any
/// fraction qualifying with minimal `q` is a best approximation and hence of
/// this form.
pub fn rational_approx(alpha: f64, tau: f64) -> Result<RationalApprox> {
    if !alpha.is_finite() || !tau.is_finite() || tau < 1.0 {
        return Err(Error::NonFinite);
    }
    let alpha_r = BigRational::from_float(alpha).expect("finite");
    let tau_r = BigRational::from_float(tau).expect("finite");
    let inv_tau = tau_r.recip();
    let tau_floor = tau_r.floor().to_integer();

    let num = alpha_r.numer().clone();
    let den = alpha_r.denom().clone(); // > 0

    // Convergent state: (p_prev, q_prev) = h_{-1}, (p_cur, q_cur) = h_0.
    let a0 = num.div_floor(&den);
    let mut p_prev = BigInt::one();
    let mut q_prev = BigInt::zero();
    let mut p_cur = a0.clone();
    let mut q_cur = BigInt::one();

    let make = |a: &BigInt, q: &BigInt| -> Result<RationalApprox> {
        let aq = BigRational::new(a.clone(), q.clone());
        let theta = ((&alpha_r - aq) * BigRational::from_integer(q.clone()) * &tau_r)
            .to_f64()
            .unwrap_or(0.0);
        Ok(RationalApprox {
            a: a.to_i64().ok_or(Error::ResourceLimit {
                what: "rational approximation numerator",
                requested: u128::MAX,
                cap: i64::MAX as u128,
            })?,
            q: q.to_u64().expect("q <= tau fits u64 for finite tau"),
            theta: theta.clamp(-1.0, 1.0),
            tau,
        })
    };

    // Stage -1 candidate: the integer part itself (q = 1).
    if (&alpha_r - BigRational::from_integer(a0.clone())).abs() <= inv_tau {
        return make(&a0, &BigInt::one());
    }

    // Remainder of the continued fraction: alpha - a0 = rem_num/rem_den.
    let mut rem_num = &num - &a0 * &den;
    let mut rem_den = den.clone();

    // e_i = q_i*alpha - p_i; adjacent errors have opposite signs.
    let err_of = |p: &BigInt, q: &BigInt| -> BigRational {
        (&alpha_r * BigRational::from_integer(q.clone())
            - BigRational::from_integer(p.clone()))
        .abs()
    };

    while !rem_num.is_zero() {
        let a = rem_den.div_floor(&rem_num);
        let e_prev = err_of(&p_prev, &q_prev);
        let e_cur = err_of(&p_cur, &q_cur);

        // Smallest c with |e_prev| - c|e_cur| <= 1/tau.
        let c_min = if e_prev <= inv_tau {
            BigInt::one()
        } else if e_cur.is_zero() {
            // p_cur/q_cur is alpha exactly; no further candidates here.
            break;
        } else {
            // boundary |e_c| = 1/tau still qualifies, so ceil is right
            let need = (&e_prev - &inv_tau) / &e_cur;
            let c = need.ceil().to_integer();
            if c < BigInt::one() {
                BigInt::one()
            } else {
                c
            }
        };
        // Largest c keeping the denominator within tau (and the stage).
        let mut c_max = (&tau_floor - &q_prev).div_floor(&q_cur);
        if c_max > a {
            c_max = a.clone();
        }
        if c_min <= c_max {
            let cand_p = &c_min * &p_cur + &p_prev;
            let cand_q = &c_min * &q_cur + &q_prev;
            return make(&cand_p, &cand_q);
        }
        // Advance to the next convergent.
        let p_next = &a * &p_cur + &p_prev;
        let q_next = &a * &q_cur + &q_prev;
        if q_next > tau_floor {
            break;
        }
        p_prev = std::mem::replace(&mut p_cur, p_next);
        q_prev = std::mem::replace(&mut q_cur, q_next);
        let new_rem_num = &rem_den - &a * &rem_num;
        rem_den = std::mem::replace(&mut rem_num, new_rem_num);
    }

    // Dirichlet guarantees a candidate is found above; reaching here means
    // alpha was hit exactly by a convergent with q <= tau.
    make(&p_cur, &q_cur)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force oracle: smallest q <= tau with |alpha - round(alpha q)/q|
    /// <= 1/(q tau), scanning every q.
    fn linear_scan(alpha: f64, tau: f64) -> (i64, u64) {
        let alpha_r = BigRational::from_float(alpha).unwrap();
        let tau_r = BigRational::from_float(tau).unwrap();
        let qmax = tau_r.floor().to_integer().to_u64().unwrap();
        for q in 1..=qmax {
            // best numerator for this q
            let target = &alpha_r * BigRational::from_integer(BigInt::from(q));
            let lo = target.floor().to_integer();
            for a in [lo.clone(), &lo + 1] {
                if BigInt::from(q).gcd(&a) != BigInt::one() {
                    continue;
                }
                let err = (&alpha_r - BigRational::new(a.clone(), BigInt::from(q))).abs();
                let bound = (BigRational::from_integer(BigInt::from(q)) * &tau_r).recip();
                if err <= bound {
                    return (a.to_i64().unwrap(), q);
                }
            }
        }
        panic!("oracle found nothing; Dirichlet violated?");
    }

    #[test]
    fn exact_half() {
        let r = rational_approx(0.5, 10.0).unwrap();
        assert_eq!((r.a, r.q), (1, 2));
        assert_eq!(r.theta, 0.0);
        assert!(r.verify(0.5));
    }

    #[test]
    fn near_third() {
        let alpha = 1.0 / 3.0 + 1e-9;
        let r = rational_approx(alpha, 100.0).unwrap();
        assert_eq!((r.a, r.q), (1, 3));
        assert!(r.theta.abs() <= 1.0);
        assert!(r.verify(alpha));
    }

    #[test]
    fn irrational_surrogate() {
        let alpha = 0.7071067811865476f64;
        let r = rational_approx(alpha, 50.0).unwrap();
        assert!(r.q <= 50);
        assert!(r.theta.abs() <= 1.0);
        assert!(r.verify(alpha));
        let (oa, oq) = linear_scan(alpha, 50.0);
        assert_eq!((r.a, r.q), (oa, oq));
    }

    #[test]
    fn integers_and_negatives() {
        let r = rational_approx(4.0, 7.0).unwrap();
        assert_eq!((r.a, r.q), (4, 1));
        let r = rational_approx(-1.25, 8.0).unwrap();
        assert!(r.verify(-1.25));
        assert_eq!((r.a, r.q), (-5, 4));
    }

    #[test]
    fn matches_linear_scan_on_grid() {
        let alphas = [
            0.123456789,
            0.9995,
            std::f64::consts::PI - 3.0,
            0.618033988749895,
            1.0 / 7.0 + 1e-7,
            0.25000001,
        ];
        for &alpha in &alphas {
            for tau in [3.0, 10.0, 33.5, 200.0] {
                let r = rational_approx(alpha, tau).unwrap();
                assert!(r.verify(alpha), "alpha={alpha} tau={tau} -> {:?}", r);
                let (oa, oq) = linear_scan(alpha, tau);
                assert_eq!((r.a, r.q), (oa, oq), "alpha={alpha} tau={tau}");
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(rational_approx(f64::NAN, 10.0).is_err());
        assert!(rational_approx(0.5, 0.5).is_err());
    }
}
