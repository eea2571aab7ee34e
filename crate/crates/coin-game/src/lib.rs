//! Exact solver and analysis toolkit for a sequential all-heads coin game.
//!
//! A player holds `n` coins that land heads with probability `p`. Each round
//! every remaining coin is flipped; if no head shows, the game is lost,
//! otherwise at least one head must be set aside. The player wins once all
//! coins are set aside. This crate computes the optimal winning probability
//! exactly (arbitrary-precision rationals throughout), evaluates the natural
//! strategies One and All, extracts optimal decisions, expands the win
//! deficit to first order around the fair coin, and bounds the two limit
//! constants of the game with rigorous error radii.
//!
//! Modules:
//! - [`numerics`] — exact rational arithmetic, combinatorics, decimal rendering
//! - [`game`] — the optimality recursion, strategy values, deficits
//! - [`policy`] — explicit decision tables, policy evaluation, brute-force oracle
//! - [`perturbation`] — first-order coefficients `c_n` and the limit `L`
//! - [`above_half`] — the `p > 1/2` regime and the limit `W(p)`
//! - [`analysis`] — value tables, local-extrema scans, slope checks
//! - [`montecarlo`] — seeded simulation of the actual game
//! - [`verify`] — self-check suites backing the CLI `verify` command

pub mod above_half;
pub mod analysis;
pub mod game;
pub mod montecarlo;
pub mod numerics;
pub mod perturbation;
pub mod policy;
pub mod verify;

pub use game::{Prob, StrategyKind, ValueTable};
pub use numerics::{BoundedValue, DecimalString, Rational};

/// Errors reported by fallible operations in this crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid rational literal `{input}`: {reason}")]
    ParseRational { input: String, reason: String },

    #[error("probability must satisfy 0 < p < 1, got {0}")]
    ProbOutOfRange(String),

    #[error("operation requires p > 1/2, got {0}")]
    RequiresAboveHalf(String),

    #[error("invalid policy table: {0}")]
    ParsePolicy(String),

    #[error("brute-force horizon {n} exceeds the enumeration guard ({max})")]
    BruteForceGuard { n: usize, max: usize },

    #[error("{0}")]
    InvalidArgument(String),

    #[error("simulation error: {0}")]
    Simulation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
