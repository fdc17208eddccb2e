use std::cmp::Ordering;
use std::fmt;

use crate::error::{domain, Result};

/// Deepest supported basis level. Level `i` uses denominators `2^(i-2)`.
pub const MAX_LEVEL: u32 = 52;

/// An exact dyadic rational `num / den` with `den` a power of two, kept in
/// lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: i64,
    den: u64,
}

impl Dyadic {
    pub const MINUS_ONE: Dyadic = Dyadic { num: -1, den: 1 };
    pub const ZERO: Dyadic = Dyadic { num: 0, den: 1 };
    pub const ONE: Dyadic = Dyadic { num: 1, den: 1 };

    pub fn new(num: i64, den: u64) -> Result<Self> {
        if den == 0 || !den.is_power_of_two() {
            return domain(format!("{num}/{den} is not a dyadic rational"));
        }
        let (mut num, mut den) = (num, den);
        while den > 1 && num % 2 == 0 {
            num /= 2;
            den /= 2;
        }
        if num == 0 {
            den = 1;
        }
        Ok(Dyadic { num, den })
    }

    pub fn num(&self) -> i64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// The basis level whose center set contains this value, if it lies in
    /// `[-1, +1]`.
    pub fn level(&self) -> Option<u32> {
        if self.num.unsigned_abs() > self.den {
            return None;
        }
        Some(match (self.den, self.num) {
            (1, 0) => 2,
            (1, _) => 1,
            (d, _) => d.trailing_zeros() + 2,
        })
    }

    /// Snaps `x` to the grid of all centers of levels `1..=pr` when it lies
    /// within `tolerance` of a node.
    pub fn snap(x: f64, pr: u32, tolerance: f64) -> Option<Self> {
        if !x.is_finite() || pr == 0 || pr > MAX_LEVEL {
            return None;
        }
        let den = 1u64 << pr.max(2).saturating_sub(2);
        let scaled = (x * den as f64).round();
        if scaled.abs() > den as f64 {
            return None;
        }
        let node = Dyadic::new(scaled as i64, den).ok()?;
        if (node.to_f64() - x).abs() > tolerance || node.level()? > pr {
            return None;
        }
        Some(node)
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = self.num as i128 * other.den as i128;
        let rhs = other.num as i128 * self.den as i128;
        lhs.cmp(&rhs)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{:+}", self.num)
        } else {
            write!(f, "{:+}/{}", self.num, self.den)
        }
    }
}
