//! Exact non-negative fractions for support, confidence and ranking.

use std::cmp::Ordering;
use std::fmt;

/// `num / den`, kept exactly as counted (never reduced).
///
/// Equality is structural: `7/7` and `1/1` are different values of this
/// type even though they compare equal with [`Ratio::value_cmp`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    /// Panics if `den` is zero.
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den > 0, "zero denominator");
        Ratio { num, den }
    }

    pub fn value_cmp(&self, other: &Ratio) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }

    pub fn value_eq(&self, other: &Ratio) -> bool {
        self.value_cmp(other) == Ordering::Equal
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// Value scaled by 100 and rounded half-up, computed in integers.
    pub fn hundredths(&self) -> u128 {
        (200 * self.num as u128 + self.den as u128) / (2 * self.den as u128)
    }

    /// Two-decimal display, half-up: `35/12` renders as `2.92`.
    pub fn display2(&self) -> String {
        let h = self.hundredths();
        format!("{}.{:02}", h / 100, h % 100)
    }

    pub fn scale(&self, k: u64) -> Ratio {
        Ratio::new(self.num * k, self.den)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}
