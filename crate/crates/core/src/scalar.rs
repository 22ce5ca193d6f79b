//! Numeric back-ends for the exact engine: arbitrary-precision rationals
//! and `f64`.

use std::fmt::Debug;

use num::bigint::BigInt;
use num::traits::{One, ToPrimitive, Zero};
use num::BigRational;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NumericMode {
    ExactRational,
    Float64,
}

impl NumericMode {
    pub fn name(self) -> &'static str {
        match self {
            NumericMode::ExactRational => "rational",
            NumericMode::Float64 => "float",
        }
    }
}

pub trait Scalar:
    Clone + Debug + PartialOrd + Zero + One + Send + Sync + 'static
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Div<Output = Self>
{
    const MODE: NumericMode;

    fn ratio(num: u64, den: u64) -> Self;
    fn to_f64(&self) -> f64;

    fn from_usize(n: usize) -> Self {
        Self::ratio(n as u64, 1)
    }

    fn powu(&self, k: u32) -> Self {
        num::traits::pow(self.clone(), k as usize)
    }

    /// Sum in a fixed order. Floats use Neumaier compensation.
    fn ordered_sum<I: IntoIterator<Item = Self>>(items: I) -> Self;

    /// Human-readable exact value (`p/q` for rationals).
    fn render(&self) -> String;
}

impl Scalar for f64 {
    const MODE: NumericMode = NumericMode::Float64;

    fn ratio(num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn powu(&self, k: u32) -> Self {
        self.powi(k as i32)
    }

    fn ordered_sum<I: IntoIterator<Item = Self>>(items: I) -> Self {
        neumaier_sum(items)
    }

    fn render(&self) -> String {
        format!("{self}")
    }
}

impl Scalar for BigRational {
    const MODE: NumericMode = NumericMode::ExactRational;

    fn ratio(num: u64, den: u64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn ordered_sum<I: IntoIterator<Item = Self>>(items: I) -> Self {
        items.into_iter().fold(Self::zero(), |acc, v| acc + v)
    }

    fn render(&self) -> String {
        if self.denom().is_one() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
}

/// Compensated (Neumaier) summation in iteration order.
pub fn neumaier_sum<I: IntoIterator<Item = f64>>(items: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in items {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
