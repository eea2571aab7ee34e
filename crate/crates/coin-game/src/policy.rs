//! Deterministic Markov policies for the game, exact policy evaluation, and
//! a brute-force enumeration oracle that certifies the optimal values on
//! small horizons.
//!
//! A policy fixes, for every state `m` (coins remaining) and every observed
//! head count `k in [1, m]`, how many heads to set aside. State strictly
//! decreases each surviving round, so the value vector is computed in one
//! bottom-up pass.

use num_bigint::BigInt;
use num_traits::One;

use crate::game::{Prob, ValueTable};
use crate::numerics::Rational;
use crate::{Error, Result};

/// Horizon limit for [`brute_force_value`]: the policy count is
/// `prod_{m<=n} m!`, which already reaches 24_883_200 at `n = 6`.
pub const BRUTE_FORCE_MAX: usize = 6;

/// A deterministic decision table: `decision(m, k)` heads are set aside in
/// state `m` when `k` heads appear.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Policy {
    // decisions[m-1][k-1] = i, with 1 <= i <= k <= m
    decisions: Vec<Vec<usize>>,
}

impl Policy {
    /// Validates `1 <= decisions(m,k) <= k` for every `1 <= k <= m <= N`.
    pub fn new(decisions: Vec<Vec<usize>>) -> Result<Self> {
        for (row, choices) in decisions.iter().enumerate() {
            let m = row + 1;
            if choices.len() != m {
                return Err(Error::ParsePolicy(format!(
                    "state {m} must have exactly {m} decisions, got {}",
                    choices.len()
                )));
            }
            for (col, &i) in choices.iter().enumerate() {
                let k = col + 1;
                if i < 1 || i > k {
                    return Err(Error::ParsePolicy(format!(
                        "decision({m},{k}) = {i} outside [1, {k}]"
                    )));
                }
            }
        }
        Ok(Self { decisions })
    }

    /// Builds a policy from a decision function over `(m, k)`.
    pub fn from_fn(horizon: usize, decide: impl Fn(usize, usize) -> usize) -> Result<Self> {
        let decisions = (1..=horizon)
            .map(|m| (1..=m).map(|k| decide(m, k)).collect())
            .collect();
        Self::new(decisions)
    }

    /// Strategy One: one head set aside, all of them on an all-heads round.
    pub fn one(horizon: usize) -> Self {
        Self::from_fn(horizon, |m, k| if k == m { m } else { 1 }).expect("valid by construction")
    }

    /// Strategy All: every head set aside.
    pub fn all(horizon: usize) -> Self {
        Self::from_fn(horizon, |_, k| k).expect("valid by construction")
    }

    pub fn horizon(&self) -> usize {
        self.decisions.len()
    }

    /// Heads set aside in state `m` on seeing `k` heads.
    pub fn decision(&self, m: usize, k: usize) -> usize {
        self.decisions[m - 1][k - 1]
    }

    /// True if the policy declines the immediate win in some state
    /// (`decision(m, m) < m`); such policies lose value at the fair coin.
    pub fn refuses_immediate_win(&self) -> bool {
        (1..=self.horizon()).any(|m| self.decision(m, m) < m)
    }

    /// Plain-text table, one `m k i` triple per line in ascending order.
    pub fn to_table_string(&self) -> String {
        let mut out = String::new();
        for m in 1..=self.horizon() {
            for k in 1..=m {
                out.push_str(&format!("{m} {k} {}\n", self.decision(m, k)));
            }
        }
        out
    }

    /// Parses the `m k i` table format produced by [`Policy::to_table_string`].
    pub fn parse_table(text: &str) -> Result<Self> {
        let mut triples = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(Error::ParsePolicy(format!(
                    "line {}: expected `m k i`, got `{line}`",
                    lineno + 1
                )));
            }
            let parse = |s: &str| -> Result<usize> {
                s.parse()
                    .map_err(|_| Error::ParsePolicy(format!("line {}: bad integer `{s}`", lineno + 1)))
            };
            triples.push((parse(fields[0])?, parse(fields[1])?, parse(fields[2])?));
        }
        let horizon = triples.iter().map(|&(m, _, _)| m).max().unwrap_or(0);
        if horizon == 0 {
            return Err(Error::ParsePolicy("empty policy table".into()));
        }
        let mut decisions: Vec<Vec<Option<usize>>> =
            (1..=horizon).map(|m| vec![None; m]).collect();
        for (m, k, i) in triples {
            if m < 1 || m > horizon || k < 1 || k > m {
                return Err(Error::ParsePolicy(format!("triple ({m}, {k}, {i}) out of range")));
            }
            if decisions[m - 1][k - 1].replace(i).is_some() {
                return Err(Error::ParsePolicy(format!("duplicate entry for ({m}, {k})")));
            }
        }
        let filled: Result<Vec<Vec<usize>>> = decisions
            .iter()
            .enumerate()
            .map(|(row, choices)| {
                choices
                    .iter()
                    .enumerate()
                    .map(|(col, c)| {
                        c.ok_or_else(|| {
                            Error::ParsePolicy(format!("missing entry for ({}, {})", row + 1, col + 1))
                        })
                    })
                    .collect()
            })
            .collect();
        Self::new(filled?)
    }
}

/// Exact winning probabilities `v_0..v_N` of a policy at one heads
/// probability.
#[derive(Debug, Clone)]
pub struct PolicyValue {
    values: Vec<Rational>,
}

impl PolicyValue {
    /// One bottom-up pass of
    /// `v_m = sum_{k=1}^m C(m,k) p^k q^{m-k} v_{m - decision(m,k)}`;
    /// the `k = 0` round is an immediate loss and contributes nothing.
    pub fn compute(policy: &Policy, p: &Prob) -> Self {
        let horizon = policy.horizon();
        let pr = p.value().clone();
        let q = p.complement();
        let mut p_pow = Vec::with_capacity(horizon + 1);
        let mut q_pow = Vec::with_capacity(horizon + 1);
        p_pow.push(Rational::one());
        q_pow.push(Rational::one());
        for i in 1..=horizon {
            p_pow.push(&p_pow[i - 1] * &pr);
            q_pow.push(&q_pow[i - 1] * &q);
        }
        let mut values: Vec<Rational> = vec![Rational::one()];
        for m in 1..=horizon {
            let mut total = &p_pow[m] * &values[m - policy.decision(m, m)];
            let mut binom_mk = BigInt::one();
            for k in 1..m {
                binom_mk = binom_mk * BigInt::from(m - k + 1) / BigInt::from(k);
                total += Rational::from_integer(binom_mk.clone())
                    * &p_pow[k]
                    * &q_pow[m - k]
                    * &values[m - policy.decision(m, k)];
            }
            values.push(total);
        }
        Self { values }
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn value(&self, n: usize) -> &Rational {
        &self.values[n]
    }
}

/// Exact winning probability of `policy` started from `n` coins.
pub fn eval_policy(policy: &Policy, n: usize, p: &Prob) -> Result<Rational> {
    if n > policy.horizon() {
        return Err(Error::InvalidArgument(format!(
            "start state {n} exceeds policy horizon {}",
            policy.horizon()
        )));
    }
    Ok(PolicyValue::compute(policy, p).value(n).clone())
}

/// Number of deterministic policies with the given horizon,
/// `prod_{m=1}^{n} m!`.
pub fn policy_count(n: usize) -> u128 {
    let mut total: u128 = 1;
    let mut factorial: u128 = 1;
    for m in 1..=n as u128 {
        factorial *= m;
        total *= factorial;
    }
    total
}

/// Iterates every deterministic policy of the given horizon in lexicographic
/// order over the cells `(m, k)` with the set-aside count ascending.
pub fn enumerate_policies(horizon: usize) -> PolicyEnumerator {
    let cells: Vec<(usize, usize)> =
        (1..=horizon).flat_map(|m| (1..=m).map(move |k| (m, k))).collect();
    PolicyEnumerator { horizon, current: Some(vec![1; cells.len()]), cells }
}

pub struct PolicyEnumerator {
    horizon: usize,
    cells: Vec<(usize, usize)>,
    current: Option<Vec<usize>>,
}

impl Iterator for PolicyEnumerator {
    type Item = Policy;

    fn next(&mut self) -> Option<Policy> {
        let choices = self.current.as_ref()?.clone();
        let mut decisions: Vec<Vec<usize>> = (1..=self.horizon).map(|m| vec![0; m]).collect();
        for (idx, &(m, k)) in self.cells.iter().enumerate() {
            decisions[m - 1][k - 1] = choices[idx];
        }
        // odometer step: the last cell moves fastest
        let mut next = choices.clone();
        let mut pos = self.cells.len();
        loop {
            if pos == 0 {
                self.current = None;
                break;
            }
            pos -= 1;
            let (_, k) = self.cells[pos];
            if next[pos] < k {
                next[pos] += 1;
                self.current = Some(next);
                break;
            }
            next[pos] = 1;
        }
        Some(Policy { decisions })
    }
}

/// Enumerates every policy with horizon `n`, evaluates each exactly, and
/// returns the maximum winning probability. Independent of the optimality
/// recursion, so it certifies [`crate::game::w_table`] on small instances.
pub fn brute_force_value(n: usize, p: &Prob) -> Result<Rational> {
    if n == 0 {
        return Err(Error::InvalidArgument("brute force requires n >= 1".into()));
    }
    if n > BRUTE_FORCE_MAX {
        return Err(Error::BruteForceGuard { n, max: BRUTE_FORCE_MAX });
    }
    let mut best: Option<Rational> = None;
    for policy in enumerate_policies(n) {
        let value = PolicyValue::compute(&policy, p).value(n).clone();
        best = Some(match best {
            Some(b) if b >= value => b,
            _ => value,
        });
    }
    Ok(best.expect("at least one policy exists"))
}

/// Convenience wrapper asserting the oracle agrees with the Bellman table.
pub fn oracle_matches(n: usize, p: &Prob) -> Result<bool> {
    let brute = brute_force_value(n, p)?;
    Ok(brute == *ValueTable::build(p, n).value(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{a_value, b_value, w_table};
    use crate::numerics::rat;

    fn prob(s: &str) -> Prob {
        Prob::parse(s).unwrap()
    }

    #[test]
    fn strategy_one_table() {
        let one = Policy::one(3);
        assert_eq!(one.decision(1, 1), 1);
        assert_eq!(one.decision(3, 2), 1);
        assert_eq!(one.decision(3, 3), 3);
        assert_eq!(Policy::one(1).decision(1, 1), 1);
    }

    #[test]
    fn strategy_all_table() {
        let all = Policy::all(4);
        for m in 1..=4 {
            for k in 1..=m {
                assert_eq!(all.decision(m, k), k);
            }
        }
    }

    #[test]
    fn policies_match_strategy_recursions() {
        for s in ["2/5", "3/5"] {
            let p = prob(s);
            assert_eq!(eval_policy(&Policy::one(10), 10, &p).unwrap(), a_value(10, &p));
            assert_eq!(eval_policy(&Policy::all(10), 10, &p).unwrap(), b_value(10, &p));
        }
        let half = prob("1/2");
        assert_eq!(eval_policy(&Policy::all(10), 10, &half).unwrap(), rat(1, 2));
    }

    #[test]
    fn eval_edge_cases() {
        let p = prob("2/5");
        assert_eq!(eval_policy(&Policy::one(4), 0, &p).unwrap(), Rational::one());
        assert!(eval_policy(&Policy::one(4), 5, &p).is_err());
    }

    #[test]
    fn refusing_the_win_costs_at_half() {
        // deviate from One only at (2,2): keep one coin instead of winning
        let refuse = Policy::from_fn(2, |m, k| if (m, k) == (2, 2) { 1 } else if k == m { m } else { 1 }).unwrap();
        assert!(refuse.refuses_immediate_win());
        let v = eval_policy(&refuse, 2, &prob("1/2")).unwrap();
        assert!(v < rat(1, 2));
    }

    #[test]
    fn table_serialization_round_trip() {
        let policy = Policy::one(5);
        let text = policy.to_table_string();
        assert!(text.starts_with("1 1 1\n"));
        assert_eq!(Policy::parse_table(&text).unwrap(), policy);
        assert!(Policy::parse_table("1 1 2\n").is_err());
        assert!(Policy::parse_table("2 1 1\n").is_err()); // missing entries
        assert!(Policy::parse_table("").is_err());
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(policy_count(2), 2);
        assert_eq!(policy_count(4), 288);
        assert_eq!(policy_count(6), 24_883_200);
        assert_eq!(enumerate_policies(2).count(), 2);
        assert_eq!(enumerate_policies(4).count(), 288);
    }

    #[test]
    fn brute_force_small_instances() {
        assert_eq!(brute_force_value(2, &prob("2/5")).unwrap(), rat(44, 125));
        assert_eq!(brute_force_value(4, &prob("1/2")).unwrap(), rat(1, 2));
        for s in ["2/5", "1/2", "3/5"] {
            let p = prob(s);
            for n in 1..=4 {
                assert_eq!(brute_force_value(n, &p).unwrap(), *w_table(&p, n).value(n));
            }
        }
        assert!(brute_force_value(7, &prob("2/5")).is_err());
        assert!(brute_force_value(0, &prob("2/5")).is_err());
    }

    #[test]
    fn every_policy_is_dominated() {
        let p = prob("42/100");
        let optimum = w_table(&p, 4).value(4).clone();
        for policy in enumerate_policies(4) {
            assert!(*PolicyValue::compute(&policy, &p).value(4) <= optimum);
        }
    }
}
