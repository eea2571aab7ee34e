//! First-order expansion of the win deficit around the fair coin.
//!
//! Writing `p = 1/2 - d`, the deficit `1/2 - w_{n,p}` equals `c_n d + O(d^2)`
//! where `c_1 = 1` and
//! `c_n = n/2^{n-1} + 2^{-n} sum_{j=1}^{n-1} C(n,j) min_{j<=m<=n-1} c_m`.
//! Every `c_n` is dyadic. For `n >= 7` the suffix minimum collapses (`c_j`
//! for `j <= 3`, `c_{n-1}` otherwise), which linearizes the recursion to
//! `c_n = A_n + (1 - B_n) c_{n-1}` and makes the limit `L = lim c_n`
//! computable with a rigorous tail radius.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::numerics::{binom, pow2, rat, rat_int, Rational};
use crate::{Error, Result};
pub use crate::numerics::BoundedValue;

/// Exact first-order coefficients `c_1..c_N` with suffix minima of the
/// completed table.
#[derive(Debug, Clone)]
pub struct CnTable {
    values: Vec<Rational>,     // values[i] = c_{i+1}
    suffix_min: Vec<Rational>, // suffix_min[i] = min c_{i+1..N}
}

impl CnTable {
    pub fn build(n_max: usize) -> Self {
        assert!(n_max >= 1);
        let mut values: Vec<Rational> = vec![Rational::one()]; // c_1 = 1
        for n in 2..=n_max {
            // suffix minima of c_1..c_{n-1}; suf[j-1] = min c_{j..n-1}
            let mut suf = values.clone();
            for j in (0..n - 2).rev() {
                if suf[j + 1] < suf[j] {
                    suf[j] = suf[j + 1].clone();
                }
            }
            let mut weighted = Rational::zero();
            let mut binom_nj = BigInt::one();
            for j in 1..n {
                binom_nj = binom_nj * BigInt::from(n - j + 1) / BigInt::from(j);
                weighted += Rational::from_integer(binom_nj.clone()) * &suf[j - 1];
            }
            let c_n = rat_int(n as i64) / pow2(n - 1) + weighted / pow2(n);
            values.push(c_n);
        }
        let mut suffix_min = values.clone();
        for i in (0..suffix_min.len() - 1).rev() {
            if suffix_min[i + 1] < suffix_min[i] {
                suffix_min[i] = suffix_min[i + 1].clone();
            }
        }
        Self { values, suffix_min }
    }

    /// Largest index covered.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `c_n` (1-based); panics when `n` is out of range.
    pub fn c(&self, n: usize) -> &Rational {
        &self.values[n - 1]
    }

    /// `min_{j<=m<=N} c_m` over the completed table (1-based `j`).
    pub fn suffix_min(&self, j: usize) -> &Rational {
        &self.suffix_min[j - 1]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }
}

/// The coefficient table up to `n_max` (see [`CnTable::build`]).
pub fn c_table(n_max: usize) -> CnTable {
    CnTable::build(n_max)
}

/// Coefficients of the linearized recursion `c_n = A_n + (1 - B_n) c_{n-1}`:
/// `A_n = n/2^{n-1} + (n c_1 + C(n,2) c_2 + C(n,3) c_3)/2^n` and
/// `B_n = (2 + n + C(n,2) + C(n,3))/2^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinCoeffs {
    pub n: usize,
    pub a: Rational,
    pub b: Rational,
}

/// Pinned low coefficients entering `A_n`: c_1 = 1, c_2 = 3/2, c_3 = 27/16.
fn pinned_c123() -> [Rational; 3] {
    [Rational::one(), rat(3, 2), rat(27, 16)]
}

pub fn lin_coeffs(n: usize) -> LinCoeffs {
    assert!(n >= 1);
    let [c1, c2, c3] = pinned_c123();
    let nn = n as u64;
    let c_n1 = Rational::from_integer(binom(nn, 1));
    let c_n2 = Rational::from_integer(binom(nn, 2));
    let c_n3 = Rational::from_integer(binom(nn, 3));
    let two_n = pow2(n);
    let a = rat_int(n as i64) / pow2(n - 1) + (&c_n1 * c1 + &c_n2 * c2 + &c_n3 * c3) / &two_n;
    let b = (rat_int(2) + &c_n1 + &c_n2 + &c_n3) / &two_n;
    LinCoeffs { n, a, b }
}

/// `A_n - (27/16) B_n + 3(n^2 - 15n + 36)/(32 * 2^n)`; identically zero for
/// every `n >= 1`, which downstream bounds rely on.
pub fn alg_identity_residual(n: usize) -> Rational {
    let LinCoeffs { a, b, .. } = lin_coeffs(n);
    let ni = n as i64;
    let quadratic = rat_int(ni * ni - 15 * ni + 36);
    a - rat(27, 16) * b + rat(3, 1) * quadratic / (rat_int(32) * pow2(n))
}

/// The collapsed suffix minimum `min_{j<=m<=n-1} c_m` for `n >= 7`:
/// `c_j` when `j <= 3` and `c_{n-1}` otherwise. The closed form is also
/// checked against the brute suffix minimum before returning.
pub fn collapse_min(j: usize, n: usize, table: &CnTable) -> Result<Rational> {
    if n < 7 {
        return Err(Error::InvalidArgument(format!(
            "collapse holds for n >= 7, got n={n}"
        )));
    }
    if j < 1 || j > n - 1 || n - 1 > table.len() {
        return Err(Error::InvalidArgument(format!(
            "collapse_min requires 1 <= j <= n-1 <= table length, got j={j}, n={n}, len={}",
            table.len()
        )));
    }
    let collapsed = if j <= 3 { table.c(j).clone() } else { table.c(n - 1).clone() };
    let brute = (j..n).map(|m| table.c(m)).min().expect("nonempty range");
    assert_eq!(collapsed, *brute, "collapse disagrees with brute suffix minimum");
    Ok(collapsed)
}

/// `A_n + (1 - B_n) c_{n-1}`, the linearized recursion; valid for `n >= 7`.
pub fn c_linear(n: usize, table: &CnTable) -> Result<Rational> {
    if n < 7 {
        return Err(Error::InvalidArgument(format!(
            "linear recursion holds for n >= 7, got n={n}"
        )));
    }
    if table.len() < n - 1 {
        return Err(Error::InvalidArgument(format!(
            "table covers {} entries, need {}",
            table.len(),
            n - 1
        )));
    }
    let LinCoeffs { a, b, .. } = lin_coeffs(n);
    Ok(a + (Rational::one() - b) * table.c(n - 1))
}

/// Exact tail `sum_{k>N} B_k`. The numerator of `B_k 2^k` expands to
/// `(k^3 + 5k + 12)/6`, so the closed-form polynomial tail applies.
pub fn tail_b(n: usize) -> Rational {
    assert!(n >= 7, "tail bound used from n >= 7");
    let coeffs = [rat_int(2), rat(5, 6), Rational::zero(), rat(1, 6)];
    crate::numerics::poly_geo_tail(&coeffs, n as u64)
}

/// The negative drift term `d_n = 3(n^2 - 15n + 36)/(32 * 2^n)` of the
/// buffer iteration; negative exactly on `4 <= n <= 11` (roots 3 and 12).
pub fn delta_term(n: usize) -> Rational {
    let ni = n as i64;
    rat(3, 32) * rat_int(ni * ni - 15 * ni + 36) / pow2(n)
}

/// Rigorous upper bound for `sum_{k>N} d_k`, obtained by majorizing
/// `k^2 - 15k + 36 <= k^2` (valid since `15k > 36` for `k >= 3`):
/// `(3/32) sum_{k>N} k^2/2^k`, exactly. At `N = 12` this is `297/65536`.
pub fn tail_delta(n: usize) -> Rational {
    assert!(n >= 12, "majorization applied from n >= 12");
    let coeffs = [Rational::zero(), Rational::zero(), rat(3, 32)];
    crate::numerics::poly_geo_tail(&coeffs, n as u64)
}

/// Exact check that the buffer `c_12 - 27/16` exceeds `1/60`, the seed of
/// the cumulative lower-bound chain for `c_n` with `n >= 13`.
pub fn eps_buffer_check() -> bool {
    c_table(12).c(12) - rat(27, 16) > rat(1, 60)
}

/// The limit `L = lim c_n` as a rigorous interval of radius at most
/// `tolerance`.
///
/// Past the collapse the sequence decreases, and one recursion step gives
/// `0 <= c_{k-1} - c_k = B_k c_{k-1} - A_k <= c_5 B_k` since `c_5` is the
/// global maximum. Summing, `0 <= c_N - L <= c_5 * tail_b(N)`, so `c_N` with
/// radius `c_5 * tail_b(N)` encloses `L`.
pub fn limit_l(tolerance: &Rational) -> BoundedValue {
    assert!(tolerance.is_positive(), "tolerance must be positive");
    let c5 = rat(3555, 2048);
    let mut n = 7;
    let mut radius = &c5 * tail_b(n);
    while radius > *tolerance {
        n += 1;
        radius = &c5 * tail_b(n);
    }
    let table = c_table(n);
    BoundedValue::new(table.c(n).clone(), radius)
}

/// The limit by its explicit representation
/// `L = c_{n0-1} prod_{m>=n0}(1-B_m) + sum_{k>=n0} A_k prod_{m>k}(1-B_m)`,
/// truncated at level `n0 + terms` with rigorous tail handling: truncated
/// products over-estimate (all factors lie in `(0,1)`), the dropped tail
/// factor is at least `1 - tail_b` (Bernoulli), and the dropped series tail
/// lies in `[0, sum_{k>M} A_k]` with `A_k` again cubic over `2^k`.
pub fn limit_l_formula(n0: usize, terms: usize) -> Result<BoundedValue> {
    if n0 < 7 {
        return Err(Error::InvalidArgument(format!(
            "the linear recursion starts at n0 = 7, got {n0}"
        )));
    }
    assert!(terms >= 1);
    let m_top = n0 + terms;
    let table = c_table(n0 - 1);

    // suffix products P[a - n0] = prod_{m=a}^{m_top} (1 - B_m), plus the
    // empty product at a = m_top + 1
    let mut suffix = vec![Rational::one(); terms + 2];
    for a in (n0..=m_top).rev() {
        let LinCoeffs { b, .. } = lin_coeffs(a);
        suffix[a - n0] = (Rational::one() - b) * &suffix[a - n0 + 1];
    }

    let mut truncated = table.c(n0 - 1) * &suffix[0];
    for k in n0..=m_top {
        let LinCoeffs { a, .. } = lin_coeffs(k);
        truncated += a * &suffix[k - n0 + 1];
    }

    // A_k = (3/32)(3k^3 - k^2 + 30k)/2^k
    let a_tail_coeffs = [
        Rational::zero(),
        rat(45, 16),
        rat(-3, 32),
        rat(9, 32),
    ];
    let tail_a = crate::numerics::poly_geo_tail(&a_tail_coeffs, m_top as u64);
    let tail_factor_deficit = tail_b(m_top);

    let upper = &truncated + &tail_a;
    let shrink = Rational::one() - &tail_factor_deficit;
    let lower = if shrink.is_positive() { &truncated * shrink } else { Rational::zero() };
    Ok(BoundedValue::from_bounds(lower, upper))
}

/// First-order gap coefficient `c_n - c_{n-1}` consumed by the slope checks.
pub fn cn_slope_reference(n: usize) -> Rational {
    assert!(n >= 2);
    let table = c_table(n);
    table.c(n) - table.c(n - 1)
}

/// True when the denominator is a power of two.
pub fn is_dyadic(x: &Rational) -> bool {
    let mut d = x.denom().clone();
    while d.is_even() {
        d /= BigInt::from(2);
    }
    d == BigInt::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::to_decimal;

    #[test]
    fn first_six_coefficients() {
        let table = c_table(6);
        let expected = [
            Rational::one(),
            rat(3, 2),
            rat(27, 16),
            rat(111, 64),
            rat(3555, 2048),
            rat(113337, 65536),
        ];
        for (i, value) in expected.iter().enumerate() {
            assert_eq!(table.c(i + 1), value);
        }
        assert!(table.c(5) > table.c(4));
        assert!(table.c(5) > table.c(6));
        assert!(table.c(4) > table.c(6));
        assert_eq!(to_decimal(table.c(3), 4).as_str(), "1.6875");
    }

    #[test]
    fn coefficients_are_dyadic() {
        let table = c_table(80);
        for n in 1..=80 {
            assert!(is_dyadic(table.c(n)), "c_{n} should be dyadic");
        }
    }

    #[test]
    fn suffix_min_consistency() {
        let table = c_table(30);
        for j in 1..=30 {
            let brute = (j..=30).map(|m| table.c(m)).min().unwrap();
            assert_eq!(table.suffix_min(j), brute);
        }
    }

    #[test]
    fn lin_coeffs_at_seven() {
        let LinCoeffs { a, b, .. } = lin_coeffs(7);
        assert_eq!(b, rat(65, 128));
        assert_eq!(a, rat(1785, 2048)); // 7/64 + (7 + 21*(3/2) + 35*(27/16))/128
        for n in 7..=64 {
            let LinCoeffs { b, .. } = lin_coeffs(n);
            assert!(b > Rational::zero() && b < Rational::one());
        }
    }

    #[test]
    fn algebraic_identity_holds_everywhere() {
        for n in 1..=64 {
            assert_eq!(alg_identity_residual(n), Rational::zero(), "residual at n={n}");
        }
        // roots of the quadratic factor
        assert_eq!(delta_term(3), Rational::zero());
        assert_eq!(delta_term(12), Rational::zero());
    }

    #[test]
    fn collapse_examples() {
        let table = c_table(20);
        assert_eq!(collapse_min(2, 10, &table).unwrap(), rat(3, 2));
        assert_eq!(collapse_min(4, 10, &table).unwrap(), *table.c(9));
        assert_eq!(collapse_min(1, 7, &table).unwrap(), Rational::one());
        assert!(collapse_min(1, 6, &table).is_err());
        assert!(collapse_min(0, 10, &table).is_err());
        assert!(collapse_min(10, 10, &table).is_err());
    }

    #[test]
    fn linear_recursion_matches_table() {
        let table = c_table(40);
        for n in 7..=40 {
            assert_eq!(c_linear(n, &table).unwrap(), *table.c(n));
        }
        assert!(c_linear(6, &table).is_err());
        // the gap turns negative once the quadratic is positive
        assert!(table.c(13) < table.c(12));
    }

    #[test]
    fn tail_values() {
        // closed form against a 500-term partial sum of the B_k themselves
        let mut partial = Rational::zero();
        for k in 13..=512 {
            let LinCoeffs { b, .. } = lin_coeffs(k);
            partial += b;
        }
        let remainder = tail_b(12) - &partial;
        assert!(!remainder.is_negative());
        assert!(remainder < Rational::new(BigInt::one(), BigInt::one() << 200));
        assert!(tail_b(12) < rat(1, 8));
        for n in 12..=40 {
            assert!(tail_b(n + 1) < tail_b(n));
        }
        assert_eq!(tail_delta(12), rat(297, 65536));
        assert!(tail_delta(12) < rat(1, 200));
        // majorization really is an upper bound for the exact tail
        let exact: Rational = (13..=300).map(delta_term).sum();
        assert!(exact <= tail_delta(12));
        // the drift ratio d_14/d_13 = 11/10
        assert_eq!(delta_term(14) / delta_term(13), rat(11, 10));
    }

    #[test]
    fn buffer_chain() {
        assert!(eps_buffer_check());
        let table = c_table(40);
        assert!(rat(27, 16) + rat(1, 60) < *table.c(12));
        assert!(table.c(12) < table.c(5));
        for n in 13..=40 {
            assert!(table.c(n) - rat(27, 16) > rat(23, 2400), "buffer at n={n}");
        }
    }

    #[test]
    fn limit_enclosure() {
        let coarse = limit_l(&rat(1, 10));
        let fine = limit_l(&Rational::new(BigInt::one(), BigInt::from(10u32).pow(24)));
        assert!(coarse.contains(fine.approx()));
        assert!(coarse.overlaps(&fine));
        assert_eq!(to_decimal(fine.approx(), 20).as_str(), "1.70347176087173673645");
    }

    #[test]
    fn limit_formula_routes_agree() {
        let direct = limit_l(&Rational::new(BigInt::one(), BigInt::from(10u32).pow(21)));
        let formula = limit_l_formula(7, 120).unwrap();
        assert!(formula.overlaps(&direct));
        let other_start = limit_l_formula(10, 120).unwrap();
        assert!(formula.overlaps(&other_start));
        let degenerate = limit_l_formula(7, 1).unwrap();
        assert!(degenerate.contains(direct.approx()));
        assert!(limit_l_formula(6, 10).is_err());
    }

    #[test]
    fn slope_reference_values() {
        assert_eq!(cn_slope_reference(2), rat(1, 2));
        assert!(cn_slope_reference(5) > Rational::zero());
        assert!(cn_slope_reference(6) < Rational::zero());
        assert_eq!(cn_slope_reference(5), rat(3555, 2048) - rat(111, 64));
    }
}
