//! Exact arbitrary-precision rational arithmetic, integer combinatorics, and
//! controlled decimal rendering.
//!
//! Everything downstream is computed in `Rational`; floating point never
//! enters an analytic result. Decimal output is produced at the very end by
//! [`to_decimal`] with round-half-even.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// Exact rational number; always stored in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

/// Shorthand for small rational constants.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Rational from an integer.
pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `x^k` for nonnegative `k`.
pub fn pow(x: &Rational, k: usize) -> Rational {
    let mut acc = Rational::one();
    let mut base = x.clone();
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    acc
}

/// Exact `2^k` as a rational.
pub fn pow2(k: usize) -> Rational {
    Rational::from_integer(BigInt::one() << k)
}

/// Binomial coefficient `C(n, k)`; zero when `k > n`.
pub fn binom(n: u64, k: u64) -> BigInt {
    num_integer::binomial(BigInt::from(n), BigInt::from(k))
}

/// Parses an exact rational from either a fraction `a/b` (`b > 0`) or a
/// decimal literal such as `0.49` or `1e-21`. No binary floating point is
/// involved, so `0.49` is exactly `49/100`.
pub fn parse_rational(input: &str) -> Result<Rational> {
    let fail = |reason: &str| Error::ParseRational {
        input: input.to_string(),
        reason: reason.to_string(),
    };
    let s = input.trim();
    if s.is_empty() {
        return Err(fail("empty string"));
    }
    if let Some((a, b)) = s.split_once('/') {
        let numer: BigInt = a.trim().parse().map_err(|_| fail("bad numerator"))?;
        let denom: BigInt = b.trim().parse().map_err(|_| fail("bad denominator"))?;
        if denom <= BigInt::zero() {
            return Err(fail("denominator must be positive"));
        }
        return Ok(Rational::new(numer, denom));
    }

    // Decimal form: [sign] digits [. digits] [eE [sign] digits]
    let (mantissa, exponent) = match s.split_once(['e', 'E']) {
        Some((m, e)) => {
            let exp: i64 = e.parse().map_err(|_| fail("bad exponent"))?;
            (m, exp)
        }
        None => (s, 0),
    };
    let (sign, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(fail("no digits"));
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(fail("non-digit in mantissa"));
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| fail("mantissa overflow"))?
    };
    let mut value = Rational::new(numer * sign, BigInt::from(10u32).pow(frac_part.len() as u32));
    let ten = rat_int(10);
    if exponent >= 0 {
        value *= pow(&ten, exponent as usize);
    } else {
        value /= pow(&ten, (-exponent) as usize);
    }
    Ok(value)
}

/// A decimal rendering of a rational with a fixed number of fractional
/// digits, produced by round-half-even. Re-parsing recovers the source to
/// within half an ulp.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecimalString {
    text: String,
    precision: usize,
}

impl DecimalString {
    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn precision(&self) -> usize {
        self.precision
    }

    /// The exact rational denoted by the rendered digits.
    pub fn to_rational(&self) -> Rational {
        parse_rational(&self.text).expect("rendered decimal is always parseable")
    }
}

impl std::fmt::Display for DecimalString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.text)
    }
}

/// Renders `x` with exactly `digits` fractional digits, round-half-even.
pub fn to_decimal(x: &Rational, digits: usize) -> DecimalString {
    assert!(digits >= 1, "digits must be >= 1");
    let neg = x.is_negative();
    let abs = x.abs();
    let scale = BigInt::from(10u32).pow(digits as u32);
    let (mut q, r) = (abs.numer() * &scale).div_rem(abs.denom());
    let twice_r: BigInt = &r * BigInt::from(2);
    match twice_r.cmp(abs.denom()) {
        std::cmp::Ordering::Greater => q += 1,
        std::cmp::Ordering::Equal => {
            if q.is_odd() {
                q += 1;
            }
        }
        std::cmp::Ordering::Less => {}
    }
    let (int_part, frac_part) = q.div_rem(&scale);
    let frac_digits = frac_part.to_string();
    let text = format!(
        "{}{}.{}{}",
        if neg { "-" } else { "" },
        int_part,
        "0".repeat(digits - frac_digits.len()),
        frac_digits
    );
    DecimalString { text, precision: digits }
}

/// Exact value of the tail `sum_{k>N} P(k) / 2^k` for a polynomial
/// `P(k) = c0 + c1 k + c2 k^2 + c3 k^3` (degree at most 3).
///
/// Shifting the index by `N+1` reduces the tail to the full sums
/// `sum_{j>=0} j^i / 2^j` for `i <= 3`, which are 2, 2, 6 and 26.
pub fn poly_geo_tail(coeffs: &[Rational], n: u64) -> Rational {
    assert!(coeffs.len() <= 4, "polynomial degree at most 3");
    let full_sums = [rat_int(2), rat_int(2), rat_int(6), rat_int(26)];
    let shift = Rational::from_integer(BigInt::from(n + 1));
    let mut total = Rational::zero();
    for (d, coeff) in coeffs.iter().enumerate() {
        if coeff.is_zero() {
            continue;
        }
        let mut inner = Rational::zero();
        for (i, m) in full_sums.iter().enumerate().take(d + 1) {
            let weight = Rational::from_integer(binom(d as u64, i as u64));
            inner += weight * pow(&shift, d - i) * m;
        }
        total += coeff * inner;
    }
    total / pow2(n as usize + 1)
}

/// Nearest multiple of `2^-bits`; the rounding error is at most `2^-(bits+1)`.
pub fn round_dyadic(x: &Rational, bits: u64) -> Rational {
    let scaled = x.numer() << bits;
    let (q, r) = scaled.div_mod_floor(x.denom());
    let q = if &r * BigInt::from(2) >= *x.denom() { q + 1 } else { q };
    Rational::new(q, BigInt::one() << bits)
}

/// An approximation paired with a rigorous two-sided error bound: the exact
/// quantity it stands for lies in `[approx - error_radius, approx + error_radius]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundedValue {
    approx: Rational,
    error_radius: Rational,
}

impl BoundedValue {
    pub fn new(approx: Rational, error_radius: Rational) -> Self {
        assert!(!error_radius.is_negative(), "error radius must be nonnegative");
        Self { approx, error_radius }
    }

    pub fn approx(&self) -> &Rational {
        &self.approx
    }

    pub fn error_radius(&self) -> &Rational {
        &self.error_radius
    }

    pub fn lower(&self) -> Rational {
        &self.approx - &self.error_radius
    }

    pub fn upper(&self) -> Rational {
        &self.approx + &self.error_radius
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.lower() <= *x && *x <= self.upper()
    }

    pub fn overlaps(&self, other: &BoundedValue) -> bool {
        self.lower() <= other.upper() && other.lower() <= self.upper()
    }

    /// Midpoint interval built from explicit lower and upper bounds.
    pub fn from_bounds(lower: Rational, upper: Rational) -> Self {
        assert!(lower <= upper, "lower bound exceeds upper bound");
        let two = rat_int(2);
        let approx = (&lower + &upper) / &two;
        let error_radius = (&upper - &lower) / &two;
        Self { approx, error_radius }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn binom_small_values() {
        assert_eq!(binom(5, 2), BigInt::from(10));
        for n in 0..40u64 {
            assert_eq!(binom(n, 0), BigInt::one());
        }
        assert_eq!(binom(3, 7), BigInt::zero());
        let total: BigInt = (0..=12).map(|j| binom(12, j)).sum();
        assert_eq!(total, BigInt::from(4096));
    }

    #[test]
    fn binom_pascal_rule() {
        for n in 1..=64u64 {
            for k in 1..=n {
                assert_eq!(binom(n, k), binom(n - 1, k - 1) + binom(n - 1, k));
            }
        }
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(to_decimal(&rat(1, 2), 8).as_str(), "0.50000000");
        assert_eq!(to_decimal(&rat(81, 125), 8).as_str(), "0.64800000");
        assert_eq!(to_decimal(&rat(27, 16), 4).as_str(), "1.6875");
    }

    #[test]
    fn decimal_round_half_even() {
        // 0.125 -> ties to even 0.12, 0.375 -> 0.38
        assert_eq!(to_decimal(&rat(1, 8), 2).as_str(), "0.12");
        assert_eq!(to_decimal(&rat(3, 8), 2).as_str(), "0.38");
        assert_eq!(to_decimal(&rat(-1, 8), 2).as_str(), "-0.12");
        assert_eq!(to_decimal(&rat(-198, 100), 1).as_str(), "-2.0");
    }

    #[test]
    fn parse_fraction_and_decimal() {
        assert_eq!(parse_rational("3/5").unwrap(), rat(3, 5));
        assert_eq!(parse_rational("0.49").unwrap(), rat(49, 100));
        assert_eq!(parse_rational("-7/2").unwrap(), rat(-7, 2));
        assert_eq!(parse_rational("1e-21").unwrap(), Rational::new(BigInt::one(), BigInt::from(10u32).pow(21)));
        assert_eq!(parse_rational("2.5e2").unwrap(), rat_int(250));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("1/-2").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn tail_examples() {
        // sum_{k>=13} k^2/2^k = 99/2048
        let quadratic = [rat_int(0), rat_int(0), rat_int(1), rat_int(0)];
        assert_eq!(poly_geo_tail(&quadratic, 12), rat(99, 2048));
        // plain geometric series and sum k/2^k
        assert_eq!(poly_geo_tail(&[rat_int(1)], 0), rat_int(1));
        assert_eq!(poly_geo_tail(&[rat_int(0), rat_int(1)], 0), rat_int(2));
    }

    #[test]
    fn dyadic_rounding() {
        let x = rat(1, 3);
        let rounded = round_dyadic(&x, 8);
        assert_eq!(rounded.denom() % BigInt::from(2), BigInt::zero());
        assert!((rounded - x).abs() <= rat(1, 512));
    }

    #[test]
    fn bounded_value_geometry() {
        let a = BoundedValue::new(rat(1, 2), rat(1, 10));
        let b = BoundedValue::new(rat(3, 5), rat(1, 100));
        assert!(a.contains(&rat(11, 20)));
        assert!(a.overlaps(&b));
        assert!(!b.overlaps(&BoundedValue::new(rat(1, 4), rat(1, 100))));
        let c = BoundedValue::from_bounds(rat(1, 4), rat(3, 4));
        assert_eq!(*c.approx(), rat(1, 2));
        assert_eq!(*c.error_radius(), rat(1, 4));
    }

    fn arb_rational(max_abs: i64, max_den: i64) -> impl Strategy<Value = Rational> {
        (-max_abs..=max_abs, 1..=max_den).prop_map(|(n, d)| rat(n, d))
    }

    proptest! {
        #[test]
        fn arithmetic_round_trips(x in arb_rational(1000, 60), y in arb_rational(1000, 60)) {
            prop_assert_eq!(&(&x + &y) - &y, x.clone());
            if !y.is_zero() {
                prop_assert_eq!((&x * &y) / &y, x);
            }
        }

        #[test]
        fn decimal_reparse_within_half_ulp(x in arb_rational(10_000, 9999), digits in 1usize..12) {
            let rendered = to_decimal(&x, digits);
            let ulp_half = Rational::new(BigInt::one(), BigInt::from(10u32).pow(digits as u32) * 2);
            prop_assert!((rendered.to_rational() - &x).abs() <= ulp_half);
        }

        #[test]
        fn tail_matches_partial_sums(
            c0 in 0i64..=4, c1 in 0i64..=4, c2 in 0i64..=4, c3 in 0i64..=4,
            den in 1i64..=4, n in 0u64..=20,
        ) {
            let coeffs = [rat(c0, den), rat(c1, den), rat(c2, den), rat(c3, den)];
            let tail = poly_geo_tail(&coeffs, n);
            let mut partial = Rational::zero();
            for k in (n + 1)..=(n + 200) {
                let kr = rat_int(k as i64);
                let p = &coeffs[0] + &coeffs[1] * &kr + &coeffs[2] * pow(&kr, 2) + &coeffs[3] * pow(&kr, 3);
                partial += p / pow2(k as usize);
            }
            let remainder = &tail - &partial;
            prop_assert!(!remainder.is_negative());
            prop_assert!(remainder < Rational::new(BigInt::one(), BigInt::one() << 100));
        }
    }
}
