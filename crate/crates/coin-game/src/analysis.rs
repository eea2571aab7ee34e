//! Value tables, local-extrema scans over `n -> w_{n,p}`, and
//! finite-difference validation of the first-order picture near the fair
//! coin.

use num_traits::Signed;

use crate::game::{w_table, Prob};
use crate::numerics::{rat, to_decimal, DecimalString, Rational};
use crate::perturbation::c_table;
use crate::{Error, Result};

/// One row of a rendered value table: `n` and one cell per probability.
#[derive(Debug, Clone)]
pub struct ValueRow {
    pub n: usize,
    pub cells: Vec<DecimalString>,
}

/// Rendered optimal values for a list of probabilities, `n = 1..n_max`.
/// Computation is exact; rounding happens only in the rendering.
pub fn value_table(ps: &[Prob], n_max: usize, digits: usize) -> Vec<ValueRow> {
    assert!(n_max >= 1);
    let tables: Vec<_> = ps.iter().map(|p| w_table(p, n_max)).collect();
    (1..=n_max)
        .map(|n| ValueRow {
            n,
            cells: tables.iter().map(|t| to_decimal(t.value(n), digits)).collect(),
        })
        .collect()
}

/// Strict local extrema of `n -> w_{n,p}` over the interior indices of a
/// computed table. Plateau points (exact ties with a neighbour) are neither
/// minima nor maxima, so the fair coin reports none.
#[derive(Debug, Clone)]
pub struct ExtremaReport {
    pub p: Prob,
    /// First interior index scanned (always 2).
    pub n_lo: usize,
    /// Last interior index scanned (`n_max - 1`).
    pub n_hi: usize,
    pub minima: Vec<usize>,
    pub maxima: Vec<usize>,
}

/// Scans `n in [2, n_max-1]` with exact strict comparisons on both sides.
pub fn extrema_scan(p: &Prob, n_max: usize) -> ExtremaReport {
    assert!(n_max >= 3, "need at least one interior index");
    let table = w_table(p, n_max);
    let mut minima = Vec::new();
    let mut maxima = Vec::new();
    for n in 2..n_max {
        let (prev, here, next) = (table.value(n - 1), table.value(n), table.value(n + 1));
        if prev > here && here < next {
            minima.push(n);
        } else if prev < here && here > next {
            maxima.push(n);
        }
    }
    ExtremaReport { p: p.clone(), n_lo: 2, n_hi: n_max - 1, minima, maxima }
}

/// Finite-difference quotients `(1/2 - w_{n,1/2-d}) / d` against the
/// first-order coefficient `c_n`, for a decreasing ladder of offsets.
#[derive(Debug, Clone)]
pub struct SlopeCheck {
    pub n: usize,
    pub deltas: Vec<Rational>,
    pub quotients: Vec<Rational>,
    /// The exact coefficient `c_n` the quotients converge to.
    pub reference: Rational,
    pub tolerance: Rational,
    /// Final quotient within tolerance of the reference, errors decaying
    /// monotonically along the ladder.
    pub passed: bool,
}

impl SlopeCheck {
    /// Absolute deviations of the quotients from the reference.
    pub fn errors(&self) -> Vec<Rational> {
        self.quotients.iter().map(|q| (q - &self.reference).abs()).collect()
    }

    pub fn errors_nonincreasing(&self) -> bool {
        self.errors().windows(2).all(|w| w[0] >= w[1])
    }
}

/// Evaluates the deficit quotient exactly at each offset. The offsets must
/// be strictly decreasing and below `1/2`. The tolerance only enters the
/// pass verdict; it is caller-supplied because the second-order remainder
/// has no explicit constant here.
pub fn slope_check(n: usize, deltas: &[Rational], tolerance: &Rational) -> Result<SlopeCheck> {
    assert!(n >= 1);
    if deltas.is_empty() {
        return Err(Error::InvalidArgument("need at least one offset".into()));
    }
    for pair in deltas.windows(2) {
        if pair[0] <= pair[1] {
            return Err(Error::InvalidArgument("offsets must be strictly decreasing".into()));
        }
    }
    let half = rat(1, 2);
    let mut quotients = Vec::with_capacity(deltas.len());
    for delta in deltas {
        if !delta.is_positive() || *delta >= half {
            return Err(Error::InvalidArgument(format!(
                "offset must lie in (0, 1/2), got {delta}"
            )));
        }
        let p = Prob::new(&half - delta)?;
        let deficit = &half - w_table(&p, n).value(n);
        quotients.push(deficit / delta);
    }
    let reference = c_table(n).c(n).clone();
    let mut check = SlopeCheck {
        n,
        deltas: deltas.to_vec(),
        quotients,
        reference,
        tolerance: tolerance.clone(),
        passed: false,
    };
    check.passed = check
        .errors()
        .last()
        .map(|last| last <= tolerance && check.errors_nonincreasing())
        .unwrap_or(false);
    Ok(check)
}

/// Extrema scan at `p = 1/2 - delta`; for small offsets the only extremum
/// within `n <= 20` is the first-order minimum at `n = 5`.
pub fn shape_report(delta: &Rational, n_max: usize) -> Result<ExtremaReport> {
    let p = Prob::new(rat(1, 2) - delta)?;
    Ok(extrema_scan(&p, n_max))
}
