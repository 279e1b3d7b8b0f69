//! Exact fixed-point similarity values.
//!
//! Every similarity is an integer number of millionths, so sums, optima and
//! guarantee ratios are compared without rounding.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

/// Fixed denominator of every similarity value.
pub const SCALE: i64 = 1_000_000;

const SCALE_DIGITS: usize = 6;

/// A total (or single) similarity in millionths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Score(pub i64);

impl Score {
    pub const ZERO: Score = Score(0);
    pub const ONE: Score = Score(SCALE);

    pub fn from_units(units: i64) -> Self {
        Score(units)
    }

    pub fn units(self) -> i64 {
        self.0
    }

    /// Nearest fixed-point value; for tests and random generation only.
    pub fn from_f64(x: f64) -> Self {
        Score((x * SCALE as f64).round() as i64)
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / SCALE as f64
    }

    /// `self / other` as an exact fraction. Panics if `other` is zero.
    pub fn ratio(self, other: Score) -> Ratio<i64> {
        Ratio::new(self.0, other.0)
    }

    /// Exact check of `self >= num/den * other`.
    pub fn at_least_fraction_of(self, num: i64, den: i64, other: Score) -> bool {
        self.0 as i128 * den as i128 >= num as i128 * other.0 as i128
    }

    pub fn scale(self, factor: i64) -> Score {
        Score(self.0 * factor)
    }
}

impl Add for Score {
    type Output = Score;
    fn add(self, rhs: Score) -> Score {
        Score(self.0 + rhs.0)
    }
}

impl AddAssign for Score {
    fn add_assign(&mut self, rhs: Score) {
        self.0 += rhs.0;
    }
}

impl Sub for Score {
    type Output = Score;
    fn sub(self, rhs: Score) -> Score {
        Score(self.0 - rhs.0)
    }
}

impl Sum for Score {
    fn sum<I: Iterator<Item = Score>>(iter: I) -> Score {
        iter.fold(Score::ZERO, Add::add)
    }
}

impl fmt::Display for Score {
    /// Shortest exact decimal: `1.1`, `0`, `0.000001`, `-2.5`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        let int = abs / SCALE as u64;
        let frac = abs % SCALE as u64;
        if frac == 0 {
            write!(f, "{sign}{int}")
        } else {
            let digits = format!("{frac:0width$}", width = SCALE_DIGITS);
            write!(f, "{sign}{int}.{}", digits.trim_end_matches('0'))
        }
    }
}

/// Why a decimal string was rejected.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecimalError {
    #[error("empty value")]
    Empty,
    #[error("not a decimal number: {0:?}")]
    Syntax(String),
    #[error("more than {SCALE_DIGITS} fractional digits: {0:?}")]
    TooPrecise(String),
    #[error("value out of range: {0:?}")]
    Overflow(String),
}

/// Parses plain decimal text (`0.4`, `1`, `.25`, `-3.5`) into millionths.
/// Exponents are not accepted and extra precision is an error, never rounded.
pub fn parse_decimal(text: &str) -> Result<Score, DecimalError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(DecimalError::Empty);
    }
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    let all_digits = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
    if (int_part.is_empty() && frac_part.is_empty()) || !all_digits(int_part) || !all_digits(frac_part) {
        return Err(DecimalError::Syntax(s.to_string()));
    }
    let frac_trimmed = frac_part.trim_end_matches('0');
    if frac_trimmed.len() > SCALE_DIGITS {
        return Err(DecimalError::TooPrecise(s.to_string()));
    }
    let int: i64 = if int_part.is_empty() {
        0
    } else {
        int_part
            .parse()
            .map_err(|_| DecimalError::Overflow(s.to_string()))?
    };
    let mut frac: i64 = 0;
    for (i, b) in frac_trimmed.bytes().enumerate() {
        frac += (b - b'0') as i64 * 10i64.pow((SCALE_DIGITS - 1 - i) as u32);
    }
    let units = int
        .checked_mul(SCALE)
        .and_then(|v| v.checked_add(frac))
        .ok_or_else(|| DecimalError::Overflow(s.to_string()))?;
    Ok(Score(if negative { -units } else { units }))
}

impl FromStr for Score {
    type Err = DecimalError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_decimal(s)
    }
}

/// Formats an exact fraction as `num/den` in lowest terms (`0` and integers bare).
pub fn format_ratio(r: &Ratio<i64>) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_ratio(text: &str) -> Option<Ratio<i64>> {
    let s = text.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let d: i64 = d.trim().parse().ok()?;
            if d == 0 {
                return None;
            }
            Some(Ratio::new(n.trim().parse().ok()?, d))
        }
        None => Some(Ratio::from_integer(s.parse().ok()?)),
    }
}
