//! Percept-let basis families and the level/center indexed basis hierarchy.
//!
//! A family is fixed by its *father* function `b` on `[-1, +1]`, rising from
//! 0 at -1 through 1/2 at 0 to 1 at +1. The *mother* is `1 - b` and the
//! *daughter* joins `b(2x + 1)` on `[-1, 0]` to `1 - b(2x - 1)` on `(0, 1]`,
//! giving a bump that peaks at 1 in the middle and vanishes at both ends.
//!
//! Level 1 holds the father (center +1) and mother (center -1), level 2 the
//! daughter (center 0), and every level `i >= 3` holds `2^(i-2)` daughters
//! compressed by `2^(i-2)` and centered on the odd multiples of `2^(2-i)`.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::sync::Arc;

use crate::dyadic::{Dyadic, MAX_LEVEL};
use crate::error::{check_perception, domain, Result};

/// Tolerance for conditions a-c.
pub const CONDITION_TOLERANCE: f64 = 1e-9;
/// Grid size for the monotonicity and range checks.
pub const VALIDATION_GRID: usize = 1001;
/// Finite-difference step for the boundary slope check.
pub const SLOPE_STEP: f64 = 1e-5;
const SLOPE_TOLERANCE: f64 = 1e-3;

type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A basis family, identified by its father function.
#[derive(Clone)]
pub enum Perceptlet {
    /// `b(x) = (1 + x) / 2`
    Linear,
    /// `b(x) = (1 + sin(pi x / 2)) / 2`
    Sin,
    /// A user-supplied father function.
    Custom { name: String, father: Evaluator },
}

impl fmt::Debug for Perceptlet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Perceptlet::Linear => f.write_str("Linear"),
            Perceptlet::Sin => f.write_str("Sin"),
            Perceptlet::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

impl Perceptlet {
    pub fn custom(name: impl Into<String>, father: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Perceptlet::Custom {
            name: name.into(),
            father: Arc::new(father),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Perceptlet::Linear => "linear",
            Perceptlet::Sin => "sin",
            Perceptlet::Custom { name, .. } => name,
        }
    }

    /// Parses a built-in family name.
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "linear" => Ok(Perceptlet::Linear),
            "sin" => Ok(Perceptlet::Sin),
            other => domain(format!(
                "unknown percept-let family {other:?} (expected \"linear\" or \"sin\")"
            )),
        }
    }

    // Callers guarantee x in [-1, 1].
    #[inline]
    fn b(&self, x: f64) -> f64 {
        match self {
            Perceptlet::Linear => 0.5 * (1.0 + x),
            Perceptlet::Sin => 0.5 * (1.0 + (FRAC_PI_2 * x).sin()),
            Perceptlet::Custom { father, .. } => father(x),
        }
    }

    #[inline]
    fn daughter_unchecked(&self, x: f64) -> f64 {
        if x <= 0.0 {
            self.b(2.0 * x + 1.0)
        } else {
            1.0 - self.b(2.0 * x - 1.0)
        }
    }

    pub fn father(&self, x: f64) -> Result<f64> {
        Ok(self.b(check_perception(x)?))
    }

    pub fn mother(&self, x: f64) -> Result<f64> {
        Ok(1.0 - self.b(check_perception(x)?))
    }

    pub fn daughter(&self, x: f64) -> Result<f64> {
        Ok(self.daughter_unchecked(check_perception(x)?))
    }

    /// Value of basis `id` at `x`.
    pub fn eval(&self, id: &BasisId, x: f64) -> Result<f64> {
        Ok(self.eval_unchecked(id, check_perception(x)?))
    }

    #[inline]
    pub(crate) fn eval_unchecked(&self, id: &BasisId, x: f64) -> f64 {
        match id.level {
            1 if id.center == Dyadic::ONE => self.b(x),
            1 => 1.0 - self.b(x),
            2 => self.daughter_unchecked(x),
            level => {
                let arg = id.scale(level) * (x - id.center.to_f64());
                if arg.abs() > 1.0 {
                    0.0
                } else {
                    self.daughter_unchecked(arg)
                }
            }
        }
    }

    /// Checks the family against the percept-let conditions.
    pub fn validate(&self) -> ValidationReport {
        let at = |x: f64| self.b(x);
        let grid: Vec<f64> = (0..VALIDATION_GRID)
            .map(|i| -1.0 + 2.0 * i as f64 / (VALIDATION_GRID - 1) as f64)
            .collect();
        let values: Vec<f64> = grid.iter().map(|&x| at(x)).collect();

        let in_range = values
            .iter()
            .all(|v| v.is_finite() && (-CONDITION_TOLERANCE..=1.0 + CONDITION_TOLERANCE).contains(v));
        let monotone = values.windows(2).all(|w| w[1] >= w[0] - CONDITION_TOLERANCE);

        // Slopes of the daughter on either side of its apex, where the two
        // parents meet: 2 b'(+1) from the left and -2 b'(-1) from the right.
        let h = SLOPE_STEP;
        let left = (at(1.0) - at(1.0 - h)) / h;
        let right = (at(-1.0 + h) - at(-1.0)) / h;
        let boundary_slopes = (left, right);

        ValidationReport {
            at_minus_one: (at(-1.0) - 0.0).abs() <= CONDITION_TOLERANCE,
            at_plus_one: (at(1.0) - 1.0).abs() <= CONDITION_TOLERANCE,
            at_zero: (at(0.0) - 0.5).abs() <= CONDITION_TOLERANCE,
            non_decreasing: monotone,
            in_range,
            smooth_join: (left + right).abs() <= SLOPE_TOLERANCE,
            boundary_slopes,
        }
    }
}

/// Outcome of [`Perceptlet::validate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationReport {
    /// Condition a: `b(-1) = 0`.
    pub at_minus_one: bool,
    /// Condition b: `b(+1) = 1`.
    pub at_plus_one: bool,
    /// Condition c: `b(0) = 1/2`.
    pub at_zero: bool,
    /// Condition d: non-decreasing on the validation grid.
    pub non_decreasing: bool,
    /// Every sampled value lies in `[0, 1]`.
    pub in_range: bool,
    /// Condition e (informational): the daughter has matching one-sided
    /// slopes at its apex.
    pub smooth_join: bool,
    /// One-sided estimates of `b'(+1)` and `b'(-1)`.
    pub boundary_slopes: (f64, f64),
}

impl ValidationReport {
    /// Conditions a-d and the range check. Condition e is not required.
    pub fn passed(&self) -> bool {
        self.at_minus_one && self.at_plus_one && self.at_zero && self.non_decreasing && self.in_range
    }
}

/// Identifies one fundamental basis by level and center.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisId {
    level: u32,
    center: Dyadic,
}

impl BasisId {
    pub fn new(level: u32, center: Dyadic) -> Result<Self> {
        if level == 0 || level > MAX_LEVEL {
            return domain(format!("basis level {level} is outside 1..={MAX_LEVEL}"));
        }
        match center.level() {
            Some(l) if l == level => Ok(BasisId { level, center }),
            _ => domain(format!("center {center} is not a level-{level} basis center")),
        }
    }

    /// The basis whose center is `center`.
    pub fn at(center: Dyadic) -> Result<Self> {
        match center.level() {
            Some(level) => Self::new(level, center),
            None => domain(format!("center {center} lies outside [-1, +1]")),
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn center(&self) -> Dyadic {
        self.center
    }

    /// Half-width of the support for levels >= 2.
    pub fn half_width(&self) -> f64 {
        match self.level {
            1 => 2.0,
            l => 1.0 / self.scale(l),
        }
    }

    #[inline]
    fn scale(&self, level: u32) -> f64 {
        (1u64 << (level - 2)) as f64
    }
}

impl fmt::Display for BasisId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "b[{}]({})", self.level, self.center)
    }
}

/// Centers of level `level`, ascending.
pub fn centers_at_level(level: u32) -> Result<Vec<Dyadic>> {
    match level {
        0 => domain("basis level must be at least 1"),
        1 => Ok(vec![Dyadic::MINUS_ONE, Dyadic::ONE]),
        2 => Ok(vec![Dyadic::ZERO]),
        l if l > MAX_LEVEL => domain(format!("basis level {l} exceeds {MAX_LEVEL}")),
        l => {
            let den = 1u64 << (l - 2);
            let d = den as i64;
            (-(d - 1)..d).step_by(2).map(|num| Dyadic::new(num, den)).collect()
        }
    }
}

/// Bases of levels `1..=pr` that are nonzero at `x`, with their values.
///
/// Same-level supports at level 3 and deeper only touch at their edges, so
/// each such level has at most one active basis.
pub fn active_bases(perceptlet: &Perceptlet, x: f64, pr: u32) -> Result<Vec<(BasisId, f64)>> {
    let x = check_perception(x)?;
    if pr == 0 || pr > MAX_LEVEL {
        return domain(format!("perception resolution {pr} is outside 1..={MAX_LEVEL}"));
    }
    let mut out = Vec::with_capacity(pr as usize + 1);
    let mut push = |id: BasisId| {
        let v = perceptlet.eval_unchecked(&id, x);
        if v != 0.0 {
            out.push((id, v));
        }
    };
    push(BasisId {
        level: 1,
        center: Dyadic::MINUS_ONE,
    });
    push(BasisId {
        level: 1,
        center: Dyadic::ONE,
    });
    if pr >= 2 {
        push(BasisId {
            level: 2,
            center: Dyadic::ZERO,
        });
    }
    for level in 3..=pr {
        let den = 1u64 << (level - 2);
        let d = den as i64;
        let floor = (x * den as f64).floor() as i64;
        let odd = if floor.rem_euclid(2) == 1 { floor } else { floor + 1 };
        let num = odd.clamp(1 - d, d - 1);
        push(BasisId {
            level,
            center: Dyadic::new(num, den)?,
        });
    }
    Ok(out)
}

/// Every basis of levels `1..=pr`, ordered by level then center.
pub fn bases_through(pr: u32) -> Result<Vec<BasisId>> {
    let mut out = Vec::new();
    for level in 1..=pr {
        for c in centers_at_level(level)? {
            out.push(BasisId { level, center: c });
        }
    }
    if out.is_empty() {
        return domain("perception resolution must be at least 1");
    }
    Ok(out)
}
