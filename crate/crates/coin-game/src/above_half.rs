//! The regime `p > 1/2`, where the suffix maximum of the optimality
//! recursion collapses onto the previous level and the recursion becomes
//! linear: `w_n = p^n + (1 - p^n - q^n) w_{n-1}` with `w_0 = 1`.
//!
//! The iterates increase strictly and converge to a limit `W(p)` that also
//! admits the series representation `W(p) = sum_{k>=1} p^k prod_{j>k}
//! (1 - p^j - q^j)`. Both routes are implemented with rigorous rational
//! error radii.

use num_traits::{One, Signed, Zero};

use crate::game::Prob;
use crate::numerics::{pow, round_dyadic, BoundedValue, Rational};
use crate::{Error, Result};

/// Default denominator budget for the iteration; once exceeded, iterates are
/// rounded to dyadics and the rounding error is charged to the radius.
pub const DEFAULT_DENOM_BITS: u64 = 512;

fn require_above_half(p: &Prob) -> Result<()> {
    if !p.above_half() {
        return Err(Error::RequiresAboveHalf(p.value().to_string()));
    }
    Ok(())
}

/// One Bellman factor `1 - p^j - q^j`; zero at `j = 1`, inside `(0,1)` for
/// `j >= 2`.
pub fn bellman_factor(j: usize, p: &Prob) -> Rational {
    Rational::one() - pow(p.value(), j) - pow(&p.complement(), j)
}

/// Exact `w_{n,p}` by the linear recursion; agrees with the full optimality
/// table whenever `p > 1/2`.
pub fn w_recursion(n: usize, p: &Prob) -> Result<Rational> {
    require_above_half(p)?;
    let pr = p.value();
    let q = p.complement();
    let mut p_pow = Rational::one();
    let mut q_pow = Rational::one();
    let mut w = Rational::one();
    for _ in 1..=n {
        p_pow *= pr;
        q_pow *= &q;
        w = &p_pow + (Rational::one() - &p_pow - &q_pow) * w;
    }
    Ok(w)
}

/// Companion iterate `u_n = q^n + (1 - p^n - q^n) u_{n-1}` with `u_0 = 0`;
/// equals `1 - w_n` exactly.
pub fn u_recursion(n: usize, p: &Prob) -> Result<Rational> {
    require_above_half(p)?;
    let pr = p.value();
    let q = p.complement();
    let mut p_pow = Rational::one();
    let mut q_pow = Rational::one();
    let mut u = Rational::zero();
    for _ in 1..=n {
        p_pow *= pr;
        q_pow *= &q;
        u = &q_pow + (Rational::one() - &p_pow - &q_pow) * u;
    }
    Ok(u)
}

/// The limit `W(p)` as a rigorous interval of radius at most `tolerance`.
///
/// One recursion step gives `w_n - w_{n-1} = p^n (1 - w_{n-1}) - q^n w_{n-1}`,
/// which lies in `[0, p^n]` above the fair coin, so the distance to the
/// limit is bounded by the geometric tail: `W - w_N <= sum_{k>N} p^k =
/// p^{N+1}/(1-p)`. (The recursion itself carries no explicit rate; this tail
/// bound is derived here.) Iterates whose denominators outgrow the bit
/// budget are rounded to dyadics, each rounding adding `2^-(bits+1)` to the
/// radius; the budget is raised automatically so the total stays within
/// `tolerance`.
pub fn limit_w(p: &Prob, tolerance: &Rational) -> Result<BoundedValue> {
    limit_w_with_cap(p, tolerance, Some(DEFAULT_DENOM_BITS))
}

/// [`limit_w`] with an explicit denominator budget (`None` iterates exactly).
pub fn limit_w_with_cap(
    p: &Prob,
    tolerance: &Rational,
    denom_bits: Option<u64>,
) -> Result<BoundedValue> {
    require_above_half(p)?;
    if !tolerance.is_positive() {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }

    // smallest N >= 1 with p^{N+1}/(1-p) <= tolerance/2; the increment bound
    // w_k - w_{k-1} <= p^k needs k >= 2, so the iterate w_0 = 1 (which sits
    // above the limit) is never used as the approximation
    let pr = p.value();
    let q = p.complement();
    let half_tol = tolerance / crate::numerics::rat_int(2);
    let mut n = 1usize;
    let mut p_tail = pr * pr; // p^{n+1}
    while &p_tail / &q > half_tol {
        n += 1;
        p_tail *= pr;
    }
    let geo_tail = &p_tail / &q;

    // rounding budget: n roundings of 2^-(bits+1) must fit in tolerance/2
    let bits = denom_bits.map(|requested| {
        let mut bits = requested.max(64);
        let unit = |b: u64| Rational::new(1.into(), num_bigint::BigInt::one() << (b + 1));
        while crate::numerics::rat_int(n.max(1) as i64) * unit(bits) > half_tol {
            bits += 64;
        }
        bits
    });

    let mut p_pow = Rational::one();
    let mut q_pow = Rational::one();
    let mut w = Rational::one();
    let mut rounding = Rational::zero();
    for _ in 1..=n {
        p_pow *= pr;
        q_pow *= &q;
        w = &p_pow + (Rational::one() - &p_pow - &q_pow) * w;
        if let Some(bits) = bits {
            if w.denom().bits() > bits {
                w = round_dyadic(&w, bits);
                rounding += Rational::new(1.into(), num_bigint::BigInt::one() << (bits + 1));
            }
        }
    }
    Ok(BoundedValue::new(w, geo_tail + rounding))
}

/// A truncated infinite product `prod_{j=k+1}^{M} (1 - p^j - q^j)` together
/// with a rigorous lower bound for the untruncated product.
#[derive(Debug, Clone)]
pub struct ProductTail {
    pub k: usize,
    pub truncation: usize,
    pub partial: Rational,
    pub lower_bound: Rational,
}

/// Builds the truncated product for `prod_{j>k}`; the dropped factors are
/// bounded below by `1 - sum_{j>M} (p^j + q^j)` (Bernoulli).
pub fn product_tail(k: usize, truncation: usize, p: &Prob) -> Result<ProductTail> {
    require_above_half(p)?;
    let mut partial = Rational::one();
    for j in (k + 1)..=truncation {
        partial *= bellman_factor(j, p);
    }
    let lower_bound = {
        let shrink = Rational::one() - dropped_factor_sum(truncation, p);
        if shrink.is_positive() { &partial * shrink } else { Rational::zero() }
    };
    Ok(ProductTail { k, truncation, partial, lower_bound })
}

/// `sum_{j>M} (p^j + q^j) = p^{M+1}/(1-p) + q^{M+1}/(1-q)`, exactly.
fn dropped_factor_sum(truncation: usize, p: &Prob) -> Rational {
    let pr = p.value();
    let q = p.complement();
    pow(pr, truncation + 1) / &q + pow(&q, truncation + 1) / pr
}

fn series_interval(
    p: &Prob,
    weight_of: impl Fn(usize) -> Rational,
    weight_tail: Rational,
    k_terms: usize,
    truncation: usize,
) -> BoundedValue {
    // suffix products prod_{j=k+1}^{M}(1 - p^j - q^j), built once
    let mut factors = vec![Rational::one(); truncation + 2];
    for j in (1..=truncation).rev() {
        factors[j] = bellman_factor(j, p) * &factors[j + 1];
    }
    let mut truncated = Rational::zero();
    for k in 1..=k_terms {
        let suffix_product = if k >= truncation { Rational::one() } else { factors[k + 1].clone() };
        truncated += weight_of(k) * suffix_product;
    }
    let upper = &truncated + weight_tail;
    let shrink = Rational::one() - dropped_factor_sum(truncation, p);
    let lower = if shrink.is_positive() { &truncated * shrink } else { Rational::zero() };
    BoundedValue::from_bounds(lower, upper)
}

/// The series route to `W(p) = sum_{k>=1} p^k prod_{j>k} (1 - p^j - q^j)`,
/// truncated to `k <= k_terms` with products truncated at `truncation`.
pub fn w_series(p: &Prob, k_terms: usize, truncation: usize) -> Result<BoundedValue> {
    require_above_half(p)?;
    let pr = p.value().clone();
    let q = p.complement();
    let tail = pow(&pr, k_terms + 1) / q;
    Ok(series_interval(p, |k| pow(&pr, k), tail, k_terms, truncation))
}

/// The complement series `U(p) = sum_{k>=1} q^k prod_{j>k} (1 - p^j - q^j)`;
/// positive, and `W + U = 1`, which witnesses `W(p) < 1`.
pub fn u_series(p: &Prob, k_terms: usize, truncation: usize) -> Result<BoundedValue> {
    require_above_half(p)?;
    let pr = p.value().clone();
    let q = p.complement();
    let tail = pow(&q, k_terms + 1) / pr;
    Ok(series_interval(p, |k| pow(&q, k), tail, k_terms, truncation))
}
