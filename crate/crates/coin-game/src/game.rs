//! Exact evaluation of the optimal winning probability `w_{n,p}`, the
//! strategy values `a_{n,p}` (One) and `b_{n,p}` (All), and the deficit
//! `1/2 - w_{n,p}`.
//!
//! The optimal value satisfies
//! `w_n = p^n + sum_{j=1}^{n-1} C(n,j) p^{n-j} q^j max_{j<=m<=n-1} w_m`
//! with `w_0 = 1`: the `p^n` term is the all-heads immediate win, and the
//! summand for `j` tails keeps the best continuation among `m in [j, n-1]`
//! remaining coins. Suffix maxima are rebuilt once per level, so a table of
//! size `N` costs `O(N^2)` rational operations.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::numerics::{parse_rational, pow, rat, Rational};
use crate::{Error, Result};

/// A heads probability, strictly inside `(0, 1)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Prob(Rational);

impl Prob {
    pub fn new(value: Rational) -> Result<Self> {
        if value <= Rational::zero() || value >= Rational::one() {
            return Err(Error::ProbOutOfRange(value.to_string()));
        }
        Ok(Self(value))
    }

    /// Parses a fraction or decimal literal into a probability.
    pub fn parse(s: &str) -> Result<Self> {
        Self::new(parse_rational(s)?)
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    /// The tails probability `q = 1 - p`.
    pub fn complement(&self) -> Rational {
        Rational::one() - &self.0
    }

    pub fn is_half(&self) -> bool {
        self.0 == rat(1, 2)
    }

    pub fn above_half(&self) -> bool {
        self.0 > rat(1, 2)
    }

    pub fn below_half(&self) -> bool {
        self.0 < rat(1, 2)
    }
}

impl std::fmt::Display for Prob {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// The named strategies of the game plus the Bellman optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyKind {
    /// Set aside exactly one head, or all of them when every coin is heads.
    One,
    /// Set aside every head that appears.
    All,
    /// Follow the argmax of the optimality recursion.
    Optimal,
}

impl StrategyKind {
    /// Exact winning probability of the strategy from `n` coins.
    pub fn value(&self, n: usize, p: &Prob) -> Rational {
        match self {
            StrategyKind::One => a_value(n, p),
            StrategyKind::All => b_value(n, p),
            StrategyKind::Optimal => w_table(p, n).value(n).clone(),
        }
    }
}

impl std::str::FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "one" => Ok(StrategyKind::One),
            "all" => Ok(StrategyKind::All),
            "optimal" => Ok(StrategyKind::Optimal),
            other => Err(Error::InvalidArgument(format!(
                "unknown strategy `{other}` (expected one, all or optimal)"
            ))),
        }
    }
}

/// Optimal values `w_0..w_N` for one probability, with suffix maxima of the
/// completed table.
#[derive(Debug, Clone)]
pub struct ValueTable {
    p: Prob,
    values: Vec<Rational>,
    suffix_max: Vec<Rational>,
}

impl ValueTable {
    /// Builds the table up to horizon `n_max` by the optimality recursion.
    pub fn build(p: &Prob, n_max: usize) -> Self {
        let pr = p.value().clone();
        let q = p.complement();
        let mut p_pow = Vec::with_capacity(n_max + 1);
        let mut q_pow = Vec::with_capacity(n_max + 1);
        p_pow.push(Rational::one());
        q_pow.push(Rational::one());
        for i in 1..=n_max {
            p_pow.push(&p_pow[i - 1] * &pr);
            q_pow.push(&q_pow[i - 1] * &q);
        }

        let mut values: Vec<Rational> = Vec::with_capacity(n_max + 1);
        values.push(Rational::one());
        for n in 1..=n_max {
            // suffix maxima of the prefix w_1..w_{n-1}; suf[j] = max w_{j..n-1}
            let mut suf = vec![Rational::zero(); n];
            if n >= 2 {
                suf[n - 1] = values[n - 1].clone();
                for j in (1..n - 1).rev() {
                    suf[j] = if values[j] > suf[j + 1] {
                        values[j].clone()
                    } else {
                        suf[j + 1].clone()
                    };
                }
            }
            let mut total = p_pow[n].clone();
            let mut binom_nj = BigInt::one();
            for j in 1..n {
                binom_nj = binom_nj * BigInt::from(n - j + 1) / BigInt::from(j);
                total += Rational::from_integer(binom_nj.clone())
                    * &p_pow[n - j]
                    * &q_pow[j]
                    * &suf[j];
            }
            values.push(total);
        }

        let mut suffix_max = values.clone();
        for j in (0..n_max).rev() {
            if suffix_max[j + 1] > suffix_max[j] {
                suffix_max[j] = suffix_max[j + 1].clone();
            }
        }
        Self { p: p.clone(), values, suffix_max }
    }

    pub fn p(&self) -> &Prob {
        &self.p
    }

    /// Largest horizon covered by the table.
    pub fn horizon(&self) -> usize {
        self.values.len() - 1
    }

    /// `w_{n,p}`; panics if `n` exceeds the horizon.
    pub fn value(&self, n: usize) -> &Rational {
        &self.values[n]
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    /// `max_{j<=m<=N} w_m` over the completed table.
    pub fn suffix_max(&self, j: usize) -> &Rational {
        &self.suffix_max[j]
    }
}

/// Optimal values up to horizon `n_max` (see [`ValueTable::build`]).
pub fn w_table(p: &Prob, n_max: usize) -> ValueTable {
    ValueTable::build(p, n_max)
}

/// Value of strategy One: `a_0 = 1`, `a_n = p^n + (1 - p^n - q^n) a_{n-1}`.
pub fn a_value(n: usize, p: &Prob) -> Rational {
    let pr = p.value();
    let q = p.complement();
    let mut p_pow = Rational::one();
    let mut q_pow = Rational::one();
    let mut a = Rational::one();
    for _ in 1..=n {
        p_pow *= pr;
        q_pow *= &q;
        a = &p_pow + (Rational::one() - &p_pow - &q_pow) * a;
    }
    a
}

/// Value of strategy All: `b_0 = 1`,
/// `b_n = p^n + sum_{j=1}^{n-1} C(n,j) p^{n-j} q^j b_j` (the index `j`
/// counts tails, i.e. the coins kept).
pub fn b_value(n: usize, p: &Prob) -> Rational {
    let pr = p.value().clone();
    let q = p.complement();
    let mut p_pow = Vec::with_capacity(n + 1);
    let mut q_pow = Vec::with_capacity(n + 1);
    p_pow.push(Rational::one());
    q_pow.push(Rational::one());
    for i in 1..=n {
        p_pow.push(&p_pow[i - 1] * &pr);
        q_pow.push(&q_pow[i - 1] * &q);
    }
    let mut b: Vec<Rational> = vec![Rational::one()];
    for m in 1..=n {
        let mut total = p_pow[m].clone();
        let mut binom_mj = BigInt::one();
        for j in 1..m {
            binom_mj = binom_mj * BigInt::from(m - j + 1) / BigInt::from(j);
            total += Rational::from_integer(binom_mj.clone()) * &p_pow[m - j] * &q_pow[j] * &b[j];
        }
        b.push(total);
    }
    b.pop().expect("b has n+1 entries")
}

/// The deficit `1/2 - w_{n,p}`; equals `-1/2` at `n = 0` for every `p`.
pub fn deficit(n: usize, p: &Prob) -> Rational {
    rat(1, 2) - w_table(p, n).value(n)
}

/// Left-minus-right of the deficit recursion
/// `D_n = (q^n - p^n)/2 + sum_j C(n,j) p^{n-j} q^j min_{j<=m<=n-1} D_m`;
/// substituting `w = 1/2 - D` into the optimality recursion shows the
/// residual vanishes identically, which this function confirms exactly.
pub fn deficit_recursion_residual(n: usize, p: &Prob) -> Rational {
    assert!(n >= 1, "residual defined for n >= 1");
    let table = w_table(p, n);
    let half = rat(1, 2);
    let deficits: Vec<Rational> = table.values().iter().map(|w| &half - w).collect();

    let pr = p.value().clone();
    let q = p.complement();
    let p_n = pow(&pr, n);
    let q_n = pow(&q, n);
    let mut rhs = (&q_n - &p_n) / rat(2, 1);

    // suffix minima of D_1..D_{n-1}
    let mut suf = vec![Rational::zero(); n];
    if n >= 2 {
        suf[n - 1] = deficits[n - 1].clone();
        for j in (1..n - 1).rev() {
            suf[j] = if deficits[j] < suf[j + 1] {
                deficits[j].clone()
            } else {
                suf[j + 1].clone()
            };
        }
    }
    let mut binom_nj = BigInt::one();
    for j in 1..n {
        binom_nj = binom_nj * BigInt::from(n - j + 1) / BigInt::from(j);
        rhs += Rational::from_integer(binom_nj.clone())
            * pow(&pr, n - j)
            * pow(&q, j)
            * &suf[j];
    }
    &deficits[n] - rhs
}

/// All keep-counts `m in [j, n-1]` attaining the inner maximum of the
/// optimality recursion, in increasing order. At `p = 1/2` every `m` ties.
pub fn optimal_keeps(n: usize, j: usize, p: &Prob) -> Result<Vec<usize>> {
    if n < 2 || j < 1 || j > n - 1 {
        return Err(Error::InvalidArgument(format!(
            "keep-set requires 1 <= j <= n-1, got n={n}, j={j}"
        )));
    }
    let table = w_table(p, n - 1);
    let best = (j..n)
        .map(|m| table.value(m))
        .max()
        .expect("range is nonempty")
        .clone();
    Ok((j..n).filter(|&m| *table.value(m) == best).collect())
}

/// Checks `w_{n-1,p} < p^n / (p^n + q^n)` exactly; only meaningful above the
/// fair coin, where it drives the strict increase of `n -> w_{n,p}`.
pub fn ratio_bound_check(n: usize, p: &Prob) -> Result<bool> {
    if !p.above_half() {
        return Err(Error::RequiresAboveHalf(p.value().to_string()));
    }
    assert!(n >= 2, "ratio bound starts at n = 2");
    let p_n = pow(p.value(), n);
    let q_n = pow(&p.complement(), n);
    let bound = &p_n / (&p_n + &q_n);
    Ok(*w_table(p, n - 1).value(n - 1) < bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::to_decimal;
    use num_traits::Signed;

    fn prob(s: &str) -> Prob {
        Prob::parse(s).unwrap()
    }

    #[test]
    fn prob_rejects_boundaries() {
        assert!(Prob::parse("0").is_err());
        assert!(Prob::parse("1").is_err());
        assert!(Prob::parse("-1/2").is_err());
        assert!(Prob::parse("3/2").is_err());
        assert!(Prob::parse("1/2").is_ok());
    }

    #[test]
    fn first_level_is_p() {
        for s in ["1/4", "49/100", "1/2", "3/5"] {
            let p = prob(s);
            assert_eq!(w_table(&p, 1).value(1), p.value());
        }
    }

    #[test]
    fn fair_coin_is_constant_half() {
        let table = w_table(&prob("1/2"), 20);
        for n in 1..=20 {
            assert_eq!(*table.value(n), rat(1, 2));
        }
    }

    #[test]
    fn two_coin_closed_form() {
        // w_2 = 3p^2 - 2p^3
        assert_eq!(*w_table(&prob("3/5"), 2).value(2), rat(81, 125));
        let p = prob("49/100");
        let expected = rat(3, 1) * pow(p.value(), 2) - rat(2, 1) * pow(p.value(), 3);
        assert_eq!(*w_table(&p, 2).value(2), expected);
    }

    #[test]
    fn table_one_spot_check() {
        let table = w_table(&prob("49/100"), 5);
        assert_eq!(to_decimal(table.value(5), 8).as_str(), "0.48254059");
    }

    #[test]
    fn table_bounds_and_suffix_monotone() {
        for s in ["1/4", "42/100", "1/2", "3/5", "9/10"] {
            let table = w_table(&prob(s), 25);
            for n in 1..=25 {
                assert!(table.value(n) > &Rational::zero());
                assert!(table.value(n) < &Rational::one());
            }
            for j in 1..25 {
                assert!(table.suffix_max(j) >= table.suffix_max(j + 1));
            }
        }
    }

    #[test]
    fn strategy_one_matches_bellman_above_half() {
        let p = prob("3/5");
        let table = w_table(&p, 30);
        for n in 0..=30 {
            assert_eq!(a_value(n, &p), *table.value(n));
        }
    }

    #[test]
    fn strategies_at_half() {
        let p = prob("1/2");
        for n in 1..=20 {
            assert_eq!(a_value(n, &p), rat(1, 2));
            assert_eq!(b_value(n, &p), rat(1, 2));
        }
        assert_eq!(a_value(0, &p), Rational::one());
        assert_eq!(b_value(0, &p), Rational::one());
    }

    #[test]
    fn all_strategy_below_half_is_suboptimal_somewhere() {
        let p = prob("2/5");
        let table = w_table(&p, 20);
        let mut first_strict = None;
        for n in 1..=20 {
            let b = b_value(n, &p);
            assert!(b <= *table.value(n));
            if b < *table.value(n) && first_strict.is_none() {
                first_strict = Some(n);
            }
        }
        // All matches the optimum up to n = 15 here; the gap opens at 16
        assert_eq!(first_strict, Some(16));
    }

    #[test]
    fn deficit_signs() {
        assert_eq!(deficit(0, &prob("1/4")), rat(-1, 2));
        assert_eq!(deficit(0, &prob("7/10")), rat(-1, 2));
        for n in 1..=20 {
            assert_eq!(deficit(n, &prob("1/2")), Rational::zero());
            assert!(deficit(n, &prob("2/5")).is_positive());
            assert!(deficit(n, &prob("7/10")).is_negative());
        }
    }

    #[test]
    fn deficit_recursion_is_exact() {
        for s in ["2/5", "1/2", "7/10"] {
            let p = prob(s);
            for n in 1..=15 {
                assert_eq!(deficit_recursion_residual(n, &p), Rational::zero());
            }
        }
    }

    #[test]
    fn keep_sets() {
        // every keep-count ties at the fair coin
        for n in 2..=8 {
            for j in 1..n {
                let keeps = optimal_keeps(n, j, &prob("1/2")).unwrap();
                assert_eq!(keeps, (j..n).collect::<Vec<_>>());
            }
        }
        // strictly increasing values force m = n-1 above the fair coin
        assert_eq!(optimal_keeps(8, 3, &prob("3/5")).unwrap(), vec![7]);
        // brute comparison against the table itself
        let p = prob("42/100");
        let table = w_table(&p, 9);
        let best = (4..10).map(|m| table.value(m)).max().unwrap();
        let expected: Vec<usize> = (4..10).filter(|&m| table.value(m) == best).collect();
        assert_eq!(optimal_keeps(10, 4, &p).unwrap(), expected);
        // argument validation
        assert!(optimal_keeps(5, 0, &p).is_err());
        assert!(optimal_keeps(5, 5, &p).is_err());
        assert!(optimal_keeps(1, 1, &p).is_err());
    }

    #[test]
    fn ratio_bound_above_half() {
        assert!(ratio_bound_check(2, &prob("3/5")).unwrap());
        // w_1 = 3/5 against p^2/(p^2+q^2) = 9/13
        assert!(rat(3, 5) < rat(9, 13));
        for s in ["51/100", "9/10"] {
            let p = prob(s);
            for n in 2..=25 {
                assert!(ratio_bound_check(n, &p).unwrap());
            }
        }
        assert!(ratio_bound_check(2, &prob("1/2")).is_err());
        assert!(ratio_bound_check(2, &prob("2/5")).is_err());
    }

    #[test]
    fn ratio_is_monotone_above_half() {
        for s in ["51/100", "3/5", "9/10"] {
            let p = prob(s);
            let q = p.complement();
            let mut prev = rat(1, 2); // n = 0 gives p^0/(p^0+q^0) = 1/2
            for n in 1..=30 {
                let p_n = pow(p.value(), n);
                let q_n = pow(&q, n);
                let ratio = &p_n / (&p_n + &q_n);
                assert!(ratio > prev);
                prev = ratio;
            }
        }
    }

    #[test]
    fn strategy_kind_parsing_and_dispatch() {
        let p = prob("3/5");
        assert_eq!("one".parse::<StrategyKind>().unwrap().value(5, &p), a_value(5, &p));
        assert_eq!("ALL".parse::<StrategyKind>().unwrap().value(5, &p), b_value(5, &p));
        assert_eq!(
            "optimal".parse::<StrategyKind>().unwrap().value(5, &p),
            *w_table(&p, 5).value(5)
        );
        assert!("greedy".parse::<StrategyKind>().is_err());
    }
}
