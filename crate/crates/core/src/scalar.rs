//! Numeric abstraction for metric values.
//!
//! Every Bunch metric is a quotient of small integers, so the metric code is
//! written once against [`Scalar`] and instantiated either with an exact
//! rational ([`BigRational`]) or with a float (`f64`, `f32`).

use std::cmp::Ordering;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

/// Absolute tolerance used when comparing floating metric values.
pub const FLOAT_TOLERANCE: f64 = 1e-9;

/// A number type metric values can be computed in.
pub trait Scalar: Num + Clone + Debug + PartialOrd + ToPrimitive + Send + Sync {
    /// Builds `num / den`. `den` must be non-zero.
    fn from_fraction(num: u64, den: u64) -> Self;

    /// `true` when values of this type are exact.
    fn is_exact() -> bool;

    /// Three-way comparison used for increase/same/decrease classification.
    /// Exact types compare exactly; floats treat values within
    /// [`FLOAT_TOLERANCE`] as equal.
    fn metric_cmp(&self, other: &Self) -> Ordering;

    /// Fixed-point decimal rendering, rounding half to even.
    fn to_fixed(&self, places: u32) -> String;

    /// Lossless textual form (`"num/den"` for rationals, shortest
    /// round-trip decimal for floats).
    fn to_exact_string(&self) -> String;

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for BigRational {
    fn from_fraction(num: u64, den: u64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn is_exact() -> bool {
        true
    }

    fn metric_cmp(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }

    fn to_fixed(&self, places: u32) -> String {
        round_rational_half_even(self, places)
    }

    fn to_exact_string(&self) -> String {
        if self.denom().is_one() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn from_fraction(num: u64, den: u64) -> Self {
                num as $t / den as $t
            }

            fn is_exact() -> bool {
                false
            }

            fn metric_cmp(&self, other: &Self) -> Ordering {
                let diff = f64::from(*self) - f64::from(*other);
                if diff.abs() <= FLOAT_TOLERANCE {
                    Ordering::Equal
                } else if diff < 0.0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }

            fn to_fixed(&self, places: u32) -> String {
                round_decimal_half_even(&format!("{}", self), places)
                    .unwrap_or_else(|| format!("{:.*}", places as usize, self))
            }

            fn to_exact_string(&self) -> String {
                format!("{}", self)
            }
        }
    };
}

float_scalar!(f64);
float_scalar!(f32);

/// Rounds an exact rational to `places` decimals, ties to even.
pub fn round_rational_half_even(value: &BigRational, places: u32) -> String {
    let negative = value.is_negative();
    let scale = BigInt::from(10u32).pow(places);
    let scaled = value.abs() * BigRational::from_integer(scale.clone());
    let floor = scaled.floor().to_integer();
    let frac = scaled - BigRational::from_integer(floor.clone());
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let rounded = match frac.cmp(&half) {
        Ordering::Less => floor,
        Ordering::Greater => floor + 1,
        Ordering::Equal => {
            if floor.is_even() {
                floor
            } else {
                floor + 1
            }
        }
    };
    let digits = format_scaled(&rounded, places);
    if negative && !rounded.is_zero() {
        format!("-{digits}")
    } else {
        digits
    }
}

fn format_scaled(scaled: &BigInt, places: u32) -> String {
    let mut digits = scaled.to_string();
    let places = places as usize;
    if places == 0 {
        return digits;
    }
    if digits.len() <= places {
        digits = format!("{}{}", "0".repeat(places + 1 - digits.len()), digits);
    }
    let split = digits.len() - places;
    format!("{}.{}", &digits[..split], &digits[split..])
}

/// Rounds a plain decimal literal (as produced by float `Display`) to
/// `places` decimals, ties to even. Returns `None` for non-decimal input
/// such as `NaN`, `inf` or exponent notation.
pub fn round_decimal_half_even(text: &str, places: u32) -> Option<String> {
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty()
        || !int_part.bytes().all(|b| b.is_ascii_digit())
        || !frac_part.bytes().all(|b| b.is_ascii_digit())
    {
        return None;
    }
    let numer: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let denom = BigInt::from(10u32).pow(frac_part.len() as u32);
    let mut value = BigRational::new(numer, denom);
    if negative {
        value = -value;
    }
    Some(round_rational_half_even(&value, places))
}
