//! Scalar tower: exact rationals and complex doubles behind one trait.
//!
//! Every engine in this crate is generic over [`Scalar`], so the same code
//! runs losslessly over arbitrary-precision rationals (`Exact`) and over
//! complex doubles (`Cf64`). Exact mode is restricted to real rational
//! values; complex entries live in float mode only.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational scalar (exact mode).
pub type Exact = BigRational;

/// Complex double scalar (float mode).
pub type Cf64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarMode {
    Exact,
    Float,
}

impl ScalarMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ScalarMode::Exact => "exact",
            ScalarMode::Float => "float",
        }
    }
}

impl std::str::FromStr for ScalarMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(ScalarMode::Exact),
            "float" => Ok(ScalarMode::Float),
            other => Err(Error::Parse(format!("unknown mode {other:?}"))),
        }
    }
}

/// Common interface of the two scalar modes.
///
/// Arithmetic is closed and lossless in exact mode; float mode carries the
/// usual f64 semantics and all tolerance comparisons go through
/// [`Scalar::magnitude`].
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Display
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    const MODE: ScalarMode;

    fn from_int(v: i64) -> Self;

    /// Exact p/q in both modes (float mode evaluates the quotient).
    fn from_ratio(num: i64, den: i64) -> Self;

    /// Lossless embed of an f64 (every finite f64 is rational).
    fn from_f64(v: f64) -> Option<Self>;

    fn conj(&self) -> Self;

    /// |z| as f64, for tolerance scaling.
    fn magnitude(&self) -> f64;

    fn real_part(&self) -> f64;

    fn imag_part(&self) -> f64;

    /// x^k with the 0^0 = 1 convention used throughout the cycle algebra.
    fn pow_usize(&self, k: usize) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc * self.clone();
        }
        acc
    }

    /// Strict order on the real line: exact comparison for rationals,
    /// real-part comparison for floats.
    fn lt_real(&self, other: &Self) -> bool;

    /// JSON value per the matrix interchange format: "p/q" string in exact
    /// mode, [re, im] pair in float mode.
    fn json_value(&self) -> serde_json::Value;

    fn from_json(v: &serde_json::Value) -> Result<Self>;

    /// Parse a scalar from CLI text: "p/q", integer, or decimal.
    fn parse_text(s: &str) -> Result<Self>;
}

impl Scalar for Exact {
    const MODE: ScalarMode = ScalarMode::Exact;

    fn from_int(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64(v: f64) -> Option<Self> {
        BigRational::from_float(v)
    }

    fn conj(&self) -> Self {
        self.clone()
    }

    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }

    fn real_part(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn imag_part(&self) -> f64 {
        0.0
    }

    fn json_value(&self) -> serde_json::Value {
        serde_json::Value::String(format!("{}/{}", self.numer(), self.denom()))
    }

    fn from_json(v: &serde_json::Value) -> Result<Self> {
        match v {
            serde_json::Value::String(s) => Self::parse_text(s),
            serde_json::Value::Number(n) if n.is_i64() => {
                Ok(Self::from_int(n.as_i64().unwrap()))
            }
            other => Err(Error::Parse(format!(
                "expected \"p/q\" string for exact entry, got {other}"
            ))),
        }
    }

    fn parse_text(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("bad numerator {p:?}: {e}")))?;
            let q: BigInt = q
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("bad denominator {q:?}: {e}")))?;
            if q.is_zero() {
                return Err(Error::Parse("zero denominator".into()));
            }
            Ok(BigRational::new(p, q))
        } else if let Ok(p) = s.parse::<BigInt>() {
            Ok(BigRational::from_integer(p))
        } else {
            // Decimal literals embed losslessly (f64 is binary rational).
            let v: f64 = s
                .parse()
                .map_err(|e| Error::Parse(format!("bad rational {s:?}: {e}")))?;
            BigRational::from_float(v)
                .ok_or_else(|| Error::Parse(format!("non-finite rational {s:?}")))
        }
    }
}

impl Scalar for Cf64 {
    const MODE: ScalarMode = ScalarMode::Float;

    fn from_int(v: i64) -> Self {
        Complex64::new(v as f64, 0.0)
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }

    fn from_f64(v: f64) -> Option<Self> {
        Some(Complex64::new(v, 0.0))
    }

    fn conj(&self) -> Self {
        Complex64::conj(self)
    }

    fn magnitude(&self) -> f64 {
        self.norm()
    }

    fn real_part(&self) -> f64 {
        self.re
    }

    fn imag_part(&self) -> f64 {
        self.im
    }

    fn json_value(&self) -> serde_json::Value {
        serde_json::json!([self.re, self.im])
    }

    fn from_json(v: &serde_json::Value) -> Result<Self> {
        match v {
            serde_json::Value::Array(pair) if pair.len() == 2 => {
                let re = pair[0]
                    .as_f64()
                    .ok_or_else(|| Error::Parse("non-numeric re".into()))?;
                let im = pair[1]
                    .as_f64()
                    .ok_or_else(|| Error::Parse("non-numeric im".into()))?;
                Ok(Complex64::new(re, im))
            }
            serde_json::Value::Number(n) => Ok(Complex64::new(
                n.as_f64()
                    .ok_or_else(|| Error::Parse("non-finite entry".into()))?,
                0.0,
            )),
            other => Err(Error::Parse(format!(
                "expected [re, im] pair for float entry, got {other}"
            ))),
        }
    }

    fn parse_text(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: f64 = p
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("bad numerator {p:?}: {e}")))?;
            let q: f64 = q
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("bad denominator {q:?}: {e}")))?;
            Ok(Complex64::new(p / q, 0.0))
        } else {
            let v: f64 = s
                .parse()
                .map_err(|e| Error::Parse(format!("bad float {s:?}: {e}")))?;
            Ok(Complex64::new(v, 0.0))
        }
    }
}

/// Relative-tolerance comparison with the documented scale floor.
///
/// The floor keeps quotients meaningful when the quantities compared reach
/// the 1e-15 range of the small-x counterexample regime.
pub const SCALE_FLOOR: f64 = 1e-300;

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    let scale = a.abs().max(b.abs()).max(1.0);
    (a - b).abs() <= rel * scale
}

/// max(|values|..., floor) used when flagging inequality violations.
pub fn violation_scale(values: &[f64]) -> f64 {
    values
        .iter()
        .fold(SCALE_FLOOR, |acc, v| acc.max(v.abs()))
}
