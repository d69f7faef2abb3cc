//! Phases carried as exact fractions of a full turn.
//!
//! Every phase that enters a trace formula (characters, Maslov offsets,
//! parity signs) is a rational number of turns. Keeping it as a reduced
//! fraction in `[0, 1)` makes selection rules exact; floats only appear when
//! the final cosine is evaluated.

use std::f64::consts::TAU;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Ratio;

pub type Rational = Ratio<i64>;

/// A rational number of turns, reduced modulo one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Phase(Rational);

impl serde::Serialize for Phase {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(&self.0)
    }
}

impl Phase {
    pub const ZERO: Phase = Phase(Ratio::new_raw(0, 1));

    pub fn new(numer: i64, denom: i64) -> Self {
        Self::from_turns(Ratio::new(numer, denom))
    }

    pub fn from_turns(turns: Rational) -> Self {
        let numer = turns.numer().mod_floor(turns.denom());
        Phase(Ratio::new(numer, *turns.denom()))
    }

    pub fn turns(self) -> Rational {
        self.0
    }

    pub fn is_zero(self) -> bool {
        *self.0.numer() == 0
    }

    pub fn to_radians(self) -> f64 {
        TAU * (*self.0.numer() as f64) / (*self.0.denom() as f64)
    }

    /// `exp(2πi·φ)`, exactly `1` for the zero phase and exact on the axes.
    pub fn unit_complex(self) -> Complex64 {
        let (n, d) = (*self.0.numer(), *self.0.denom());
        match (n, d) {
            (0, _) => Complex64::new(1.0, 0.0),
            (1, 2) => Complex64::new(-1.0, 0.0),
            (1, 4) => Complex64::new(0.0, 1.0),
            (3, 4) => Complex64::new(0.0, -1.0),
            _ => Complex64::from_polar(1.0, self.to_radians()),
        }
    }

    /// `cos(2π·(x + φ))` for a float number of turns `x`.
    ///
    /// The integer part of `x` is dropped before the exact phase is added,
    /// so large harmonics do not lose the phase to rounding.
    pub fn cos_shifted(self, turns: f64) -> f64 {
        (TAU * self.shifted_fraction(turns)).cos()
    }

    pub fn sin_shifted(self, turns: f64) -> f64 {
        (TAU * self.shifted_fraction(turns)).sin()
    }

    fn shifted_fraction(self, turns: f64) -> f64 {
        let frac = turns - turns.floor();
        let offset = (*self.0.numer() as f64) / (*self.0.denom() as f64);
        let total = frac + offset;
        if total >= 1.0 {
            total - 1.0
        } else {
            total
        }
    }
}

impl From<Rational> for Phase {
    fn from(turns: Rational) -> Self {
        Self::from_turns(turns)
    }
}

impl Add for Phase {
    type Output = Phase;
    fn add(self, rhs: Phase) -> Phase {
        Phase::from_turns(self.0 + rhs.0)
    }
}

impl Sub for Phase {
    type Output = Phase;
    fn sub(self, rhs: Phase) -> Phase {
        Phase::from_turns(self.0 - rhs.0)
    }
}

impl Neg for Phase {
    type Output = Phase;
    fn neg(self) -> Phase {
        Phase::from_turns(-self.0)
    }
}

impl Mul<i64> for Phase {
    type Output = Phase;
    fn mul(self, rhs: i64) -> Phase {
        // reduce the numerator first so r·numer cannot overflow for any
        // realistic repetition count
        let d = *self.0.denom();
        let n = (self.0.numer() * rhs.mod_floor(&d)).mod_floor(&d);
        Phase(Ratio::new(n, d))
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} turn", self.0)
    }
}
