//! C-bit perception logic.
//!
//! A [`Cbit`] holds two belonging degrees, one toward each extreme of the
//! perception space, that always sum to one. The scalar view of a C-bit is
//! its perception value `l_pos - l_neg` in `[-1, +1]`. Under that view the
//! logical operators become arithmetic: complement negates, OR averages and
//! AND multiplies.

use crate::error::{check_perception, domain, Error, Result};

/// Tolerance on the unit-sum invariant.
pub const SUM_TOLERANCE: f64 = 1e-12;

/// A C-bit, or the Null (passive) state that carries no belonging at all.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cbit {
    Null,
    Value { pos: f64, neg: f64 },
}

impl Cbit {
    /// Builds a C-bit from its two belonging degrees.
    ///
    /// A sum that misses one by less than [`SUM_TOLERANCE`] is renormalized;
    /// anything larger is rejected.
    pub fn new(pos: f64, neg: f64) -> Result<Self> {
        for (name, v) in [("l_pos", pos), ("l_neg", neg)] {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return domain(format!("{name} = {v} is outside [0, 1]"));
            }
        }
        let sum = pos + neg;
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return domain(format!("belonging degrees ({pos}, {neg}) sum to {sum}, not 1"));
        }
        Ok(Cbit::Value {
            pos: pos / sum,
            neg: neg / sum,
        })
    }

    /// Maps a perception value onto its C-bit, `((1 + x)/2, (1 - x)/2)`.
    pub fn from_perception(x: f64) -> Result<Self> {
        let x = check_perception(x)?;
        Ok(Self::from_pos((1.0 + x) / 2.0))
    }

    /// Like [`Cbit::from_perception`] but `None` maps to [`Cbit::Null`].
    pub fn from_optional(x: Option<f64>) -> Result<Self> {
        x.map_or(Ok(Cbit::Null), Self::from_perception)
    }

    // `pos` must already lie in [0, 1].
    fn from_pos(pos: f64) -> Self {
        Cbit::Value { pos, neg: 1.0 - pos }
    }

    pub fn is_null(&self) -> bool {
        matches!(self, Cbit::Null)
    }

    /// Belonging degree toward +1.
    pub fn pos(&self) -> Option<f64> {
        match *self {
            Cbit::Value { pos, .. } => Some(pos),
            Cbit::Null => None,
        }
    }

    /// Belonging degree toward -1.
    pub fn neg(&self) -> Option<f64> {
        match *self {
            Cbit::Value { neg, .. } => Some(neg),
            Cbit::Null => None,
        }
    }

    /// Perception value `l_pos - l_neg`; `None` for Null.
    pub fn perception(&self) -> Option<f64> {
        match *self {
            Cbit::Value { pos, neg } => Some(pos - neg),
            Cbit::Null => None,
        }
    }

    pub fn complement(&self) -> Self {
        match *self {
            Cbit::Value { pos, neg } => Cbit::Value { pos: neg, neg: pos },
            Cbit::Null => Cbit::Null,
        }
    }

    /// Componentwise average. Null is the identity.
    pub fn or(&self, other: &Cbit) -> Self {
        match (*self, *other) {
            (Cbit::Value { pos: a, neg: b }, Cbit::Value { pos: c, neg: d }) => Cbit::Value {
                pos: (a + c) / 2.0,
                neg: (b + d) / 2.0,
            },
            (Cbit::Null, o) => o,
            (s, Cbit::Null) => s,
        }
    }

    /// Agreement/disagreement product. Null is absorbing.
    pub fn and(&self, other: &Cbit) -> Self {
        match (*self, *other) {
            (Cbit::Value { pos: a, neg: b }, Cbit::Value { pos: c, neg: d }) => Cbit::Value {
                pos: a * c + b * d,
                neg: a * d + b * c,
            },
            _ => Cbit::Null,
        }
    }

    /// Joint state of two independent observables.
    pub fn tensor(&self, other: &Cbit) -> Result<Tensor2> {
        match (*self, *other) {
            (Cbit::Value { pos: a, neg: b }, Cbit::Value { pos: c, neg: d }) => Ok(Tensor2 {
                components: [a * c, a * d, b * c, b * d],
            }),
            _ => domain("tensor product is not defined for a Null C-bit"),
        }
    }
}

/// Two-observable joint state, ordered `(++, +-, -+, --)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tensor2 {
    pub components: [f64; 4],
}

impl Tensor2 {
    pub fn sum(&self) -> f64 {
        self.components.iter().sum()
    }
}

/// Belonging of an output observable at the two extremes of its input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Association {
    pub w_pos: f64,
    pub w_neg: f64,
}

impl Association {
    pub fn new(w_pos: f64, w_neg: f64) -> Result<Self> {
        for (name, v) in [("w_pos", w_pos), ("w_neg", w_neg)] {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return domain(format!("association component {name} = {v} is outside [0, 1]"));
            }
        }
        Ok(Association { w_pos, w_neg })
    }

    /// Recovers the association from the output belonging observed at the
    /// input extremes +1 and -1.
    pub fn estimate(l_y_at_pos: f64, l_y_at_neg: f64) -> Result<Self> {
        Self::new(l_y_at_pos, l_y_at_neg)
    }

    /// Output C-bit for input `c`. The second component is the complement of
    /// the first.
    pub fn apply(&self, c: &Cbit) -> Cbit {
        match *c {
            Cbit::Value { pos, neg } => {
                let l_y = (self.w_pos * pos + self.w_neg * neg).clamp(0.0, 1.0);
                Cbit::from_pos(l_y)
            }
            Cbit::Null => Cbit::Null,
        }
    }
}

/// Coordinates of `x` in the two half-space sub-perceptions `(x', x'')`.
///
/// `x'` covers `[0, +1]` and `x''` covers `[-1, 0)`; each is 0 outside its
/// half. `x = 0` belongs to the positive half.
pub fn subspace_coordinates(x: f64) -> Result<(f64, f64)> {
    let x = check_perception(x)?;
    if x >= 0.0 {
        Ok((2.0 * x - 1.0, 0.0))
    } else {
        Ok((0.0, 2.0 * x + 1.0))
    }
}

impl TryFrom<Cbit> for f64 {
    type Error = Error;

    fn try_from(c: Cbit) -> Result<f64> {
        c.perception().ok_or(Error::NullPerception)
    }
}
