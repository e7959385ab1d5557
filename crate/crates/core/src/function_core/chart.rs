use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// A point of the two-point compactification `[-∞, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtendedReal {
    /// Maps an `f64` (which may be `±inf`) onto the extended line.
    pub fn from_f64(x: f64) -> Self {
        if x == f64::INFINITY {
            ExtendedReal::PosInf
        } else if x == f64::NEG_INFINITY {
            ExtendedReal::NegInf
        } else {
            ExtendedReal::Finite(x)
        }
    }

    /// The `f64` representative, with `±inf` for the two ideal points.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtendedReal::NegInf => f64::NEG_INFINITY,
            ExtendedReal::Finite(x) => x,
            ExtendedReal::PosInf => f64::INFINITY,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }
}

impl From<f64> for ExtendedReal {
    fn from(x: f64) -> Self {
        ExtendedReal::from_f64(x)
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.to_f64().partial_cmp(&other.to_f64())
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::NegInf => write!(f, "-inf"),
            ExtendedReal::PosInf => write!(f, "inf"),
            ExtendedReal::Finite(x) => write!(f, "{x}"),
        }
    }
}

impl FromStr for ExtendedReal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "+inf" | "infinity" | "+infinity" => Ok(ExtendedReal::PosInf),
            "-inf" | "-infinity" => Ok(ExtendedReal::NegInf),
            t => t
                .parse::<f64>()
                .ok()
                .filter(|v| !v.is_nan())
                .map(ExtendedReal::from_f64)
                .ok_or_else(|| Error::Domain(format!("not an extended real: `{s}`"))),
        }
    }
}

/// Coordinate in the compact chart `u = x / (1 + |x|)`, `u ∈ [-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct CompactCoord(pub f64);

/// Sends `x ∈ [-∞, ∞]` to `u ∈ [-1, 1]`.
pub fn compactify(x: ExtendedReal) -> CompactCoord {
    match x {
        ExtendedReal::NegInf => CompactCoord(-1.0),
        ExtendedReal::PosInf => CompactCoord(1.0),
        ExtendedReal::Finite(x) => CompactCoord(to_u(x)),
    }
}

/// Inverse chart.
pub fn decompactify(u: CompactCoord) -> ExtendedReal {
    ExtendedReal::from_f64(from_u(u.0))
}

#[inline]
pub(crate) fn to_u(x: f64) -> f64 {
    if x.is_infinite() {
        return x.signum();
    }
    x / (1.0 + x.abs())
}

#[inline]
pub(crate) fn from_u(u: f64) -> f64 {
    if u >= 1.0 {
        f64::INFINITY
    } else if u <= -1.0 {
        f64::NEG_INFINITY
    } else {
        u / (1.0 - u.abs())
    }
}

/// `dx/du` for the chart.
#[inline]
pub(crate) fn jacobian(u: f64) -> f64 {
    let d = 1.0 - u.abs();
    1.0 / (d * d)
}

/// `n + 1` equally spaced chart points from -1 to 1.
pub(crate) fn uniform_u_grid(n: usize) -> Vec<f64> {
    (0..=n).map(|i| -1.0 + 2.0 * i as f64 / n as f64).collect()
}

/// Points `±(2^k - 1)` marching to infinity; the images of `u = ±(1 - 2^-k)`.
pub(crate) fn tail_ladder(depth: u32) -> impl Iterator<Item = f64> {
    (1..=depth.min(60)).map(|k| (2f64).powi(k as i32) - 1.0)
}
