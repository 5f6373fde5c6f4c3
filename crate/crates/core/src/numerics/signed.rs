use std::fmt;

use serde::{Deserialize, Serialize};

use super::{NumericsError, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Minus,
    Plus,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Minus => Side::Plus,
            Side::Plus => Side::Minus,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Side::Minus => '-',
            Side::Plus => '+',
        }
    }
}

/// One-sided point `x⁻` or `x⁺`. A minus point carries the left limit of the
/// dynamics at `x`, a plus point the right limit.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SignedPoint {
    pub value: Rational,
    pub side: Side,
}

impl SignedPoint {
    /// Requires `value ∈ (0,1]` for minus points and `value ∈ [0,1)` for plus
    /// points.
    pub fn new(value: Rational, side: Side) -> Result<Self, NumericsError> {
        let ok = match side {
            Side::Minus => value.is_positive() && value <= 1,
            Side::Plus => !value.is_negative() && value < 1,
        };
        if ok {
            Ok(SignedPoint { value, side })
        } else {
            Err(NumericsError::BadSignedPoint(format!("{value}{}", side.symbol())))
        }
    }

    pub fn plus(value: Rational) -> Result<Self, NumericsError> {
        Self::new(value, Side::Plus)
    }

    pub fn minus(value: Rational) -> Result<Self, NumericsError> {
        Self::new(value, Side::Minus)
    }

    /// `a ∼ b`: same value, opposite sides.
    pub fn touches(&self, other: &SignedPoint) -> bool {
        self.value == other.value && self.side != other.side
    }
}

impl fmt::Display for SignedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}){}", self.value, self.side.symbol())
    }
}

impl fmt::Debug for SignedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
