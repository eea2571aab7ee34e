//! Seeded simulation of the actual coin game under an explicit policy,
//! cross-validating the analytic values statistically.
//!
//! Reproducibility contract: each trial draws from its own ChaCha8 stream
//! keyed by a SplitMix64 mix of `(seed, trial index)`, so results are
//! bit-identical for a given `(seed, config)` and independent of any
//! execution order. Coins are flipped by comparing a uniform 64-bit draw
//! against `floor(p * 2^64)`; `p` never passes through floating point, so
//! the per-flip bias is below `2^-64`.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::game::Prob;
use crate::numerics::Rational;
use crate::policy::Policy;
use crate::{Error, Result};

/// Hard cap on rounds per game. Every surviving round removes at least one
/// coin, so hitting the cap can only mean a corrupted policy.
pub const MAX_ROUNDS: u64 = 1_000_000;

/// Parameters of one simulation run.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub n: usize,
    pub p: Prob,
    pub trials: u64,
    pub seed: u64,
    pub policy: Policy,
}

impl SimConfig {
    pub fn new(n: usize, p: Prob, trials: u64, seed: u64, policy: Policy) -> Result<Self> {
        if trials == 0 {
            return Err(Error::Simulation("trials must be >= 1".into()));
        }
        if policy.horizon() < n {
            return Err(Error::Simulation(format!(
                "policy horizon {} is below the start state {n}",
                policy.horizon()
            )));
        }
        Ok(Self { n, p, trials, seed, policy })
    }
}

/// Outcome counts with the usual binomial-proportion summary statistics.
#[derive(Debug, Clone)]
pub struct SimResult {
    pub wins: u64,
    pub trials: u64,
    pub estimate: f64,
    pub std_error: f64,
    /// z-score of the estimate against a supplied analytic value.
    pub z_vs: Option<f64>,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D049BB133111EB);
    x ^ (x >> 31)
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed) ^ splitmix64(trial.wrapping_mul(0xA24BAED4963EE407)))
}

/// `floor(p * 2^64)` computed in exact integer arithmetic.
fn heads_threshold(p: &Prob) -> u64 {
    let scaled: BigInt = (p.value().numer() << 64u32) / p.value().denom();
    scaled.to_u64().expect("p < 1 keeps the threshold below 2^64")
}

/// Runs `trials` independent games. Per round the remaining coins are
/// flipped; zero heads loses, otherwise the policy picks how many heads to
/// set aside and the game continues from the smaller state. Wins are counted
/// when the state reaches zero.
pub fn simulate(config: &SimConfig, analytic: Option<&Rational>) -> Result<SimResult> {
    let threshold = heads_threshold(&config.p);
    let mut wins: u64 = 0;
    for trial in 0..config.trials {
        let mut rng = trial_rng(config.seed, trial);
        let mut remaining = config.n;
        let mut rounds: u64 = 0;
        loop {
            if remaining == 0 {
                wins += 1;
                break;
            }
            rounds += 1;
            if rounds > MAX_ROUNDS {
                return Err(Error::Simulation(format!(
                    "round cap {MAX_ROUNDS} hit in state {remaining}; the policy is corrupt"
                )));
            }
            let heads = (0..remaining).filter(|_| rng.next_u64() < threshold).count();
            if heads == 0 {
                break;
            }
            remaining -= config.policy.decision(remaining, heads);
        }
    }

    let trials_f = config.trials as f64;
    let estimate = wins as f64 / trials_f;
    let std_error = (estimate * (1.0 - estimate) / trials_f).sqrt();
    let z_vs = analytic.map(|reference| {
        let floor = 1.0 / trials_f;
        (estimate - reference.to_f64().expect("analytic value fits f64")) / std_error.max(floor)
    });
    Ok(SimResult { wins, trials: config.trials, estimate, std_error, z_vs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{a_value, b_value};
    use crate::numerics::rat;

    fn prob(s: &str) -> Prob {
        Prob::parse(s).unwrap()
    }

    #[test]
    fn rejects_bad_configs() {
        let p = prob("3/5");
        assert!(SimConfig::new(5, p.clone(), 0, 1, Policy::one(5)).is_err());
        assert!(SimConfig::new(5, p, 100, 1, Policy::one(4)).is_err());
    }

    #[test]
    fn deterministic_given_seed() {
        let config = SimConfig::new(6, prob("2/5"), 20_000, 99, Policy::all(6)).unwrap();
        let a = simulate(&config, None).unwrap();
        let b = simulate(&config, None).unwrap();
        assert_eq!(a.wins, b.wins);
        let other_seed = SimConfig::new(6, prob("2/5"), 20_000, 100, Policy::all(6)).unwrap();
        let c = simulate(&other_seed, None).unwrap();
        assert_ne!(a.wins, c.wins, "different seeds should almost surely differ");
    }

    #[test]
    fn single_coin_matches_p() {
        let config = SimConfig::new(1, prob("3/5"), 200_000, 1, Policy::one(1)).unwrap();
        let result = simulate(&config, Some(&rat(3, 5))).unwrap();
        assert!(result.z_vs.unwrap().abs() <= 4.0);
    }

    #[test]
    fn strategies_match_their_recursions() {
        let all = SimConfig::new(8, prob("1/2"), 200_000, 7, Policy::all(8)).unwrap();
        let b8 = b_value(8, &prob("1/2"));
        let result = simulate(&all, Some(&b8)).unwrap();
        assert!(result.z_vs.unwrap().abs() <= 4.0);

        let one = SimConfig::new(10, prob("3/5"), 200_000, 42, Policy::one(10)).unwrap();
        let a10 = a_value(10, &prob("3/5"));
        let result = simulate(&one, Some(&a10)).unwrap();
        assert!(result.z_vs.unwrap().abs() <= 4.0);
    }

    #[test]
    fn estimate_bookkeeping() {
        let config = SimConfig::new(2, prob("1/2"), 1_000, 5, Policy::all(2)).unwrap();
        let result = simulate(&config, None).unwrap();
        assert!(result.wins <= result.trials);
        assert!((result.estimate - result.wins as f64 / 1_000.0).abs() < 1e-12);
        assert!(result.z_vs.is_none());
    }
}
