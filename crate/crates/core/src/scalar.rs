//! Precision-configurable reals and monotone bisection.
//!
//! [`Scalar`] wraps an MPFR float. Every computation builds its scalars from
//! one [`PrecisionContext`]. Arithmetic on operands of different precision
//! (an escalated result against a constant, say) runs at the larger one;
//! bisection brackets must match exactly.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::Float;

use crate::error::{Error, Result};

pub const MIN_DIGITS: u32 = 16;
pub const DEFAULT_DIGITS: u32 = 50;
/// Environment variable consulted when no `--digits` flag is given.
pub const DIGITS_ENV: &str = "DLAP_DIGITS";

const GUARD_BITS: u32 = 16;
const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Working precision shared by every scalar of one computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrecisionContext {
    digits: u32,
    default_bisection_iters: u32,
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self::new(DEFAULT_DIGITS).expect("default precision is valid")
    }
}

impl PrecisionContext {
    pub fn new(digits: u32) -> Result<Self> {
        if digits < MIN_DIGITS {
            return Err(Error::Domain(format!(
                "working precision must be at least {MIN_DIGITS} digits, got {digits}"
            )));
        }
        let default_bisection_iters = (f64::from(digits) * LOG2_10).ceil() as u32;
        Ok(Self {
            digits,
            default_bisection_iters,
        })
    }

    /// Precision from `DLAP_DIGITS`, falling back to the default.
    pub fn from_env() -> Result<Self> {
        match std::env::var(DIGITS_ENV) {
            Ok(v) => {
                let digits = v
                    .trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("{DIGITS_ENV}={v:?} is not a digit count")))?;
                Self::new(digits)
            }
            Err(_) => Ok(Self::default()),
        }
    }

    pub fn with_bisection_iters(mut self, iters: u32) -> Result<Self> {
        if iters == 0 {
            return Err(Error::Domain("bisection iteration count must be positive".into()));
        }
        self.default_bisection_iters = iters;
        Ok(self)
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn bits(&self) -> u32 {
        (f64::from(self.digits) * LOG2_10).ceil() as u32 + GUARD_BITS
    }

    pub fn default_bisection_iters(&self) -> u32 {
        self.default_bisection_iters
    }

    pub fn int(&self, v: i64) -> Scalar {
        Scalar(Float::with_val(self.bits(), v))
    }

    pub fn uint(&self, v: u64) -> Scalar {
        Scalar(Float::with_val(self.bits(), v))
    }

    pub fn zero(&self) -> Scalar {
        self.int(0)
    }

    pub fn one(&self) -> Scalar {
        self.int(1)
    }

    /// `num / den`, correctly rounded.
    pub fn ratio(&self, num: i64, den: i64) -> Scalar {
        self.int(num) / den
    }

    /// `10^exp`, correctly rounded.
    pub fn pow10(&self, exp: i32) -> Scalar {
        use rug::ops::Pow;
        Scalar(Float::with_val(self.bits(), Float::with_val(self.bits(), 10).pow(exp)))
    }

    /// Parses a decimal literal such as `0.17`, `-1.5e-3` or `2025`.
    pub fn parse(&self, text: &str) -> Result<Scalar> {
        let parsed = Float::parse(text.trim())
            .map_err(|e| Error::Parse(format!("{text:?} is not a real number: {e}")))?;
        let value = Float::with_val(self.bits(), parsed);
        if !value.is_finite() {
            return Err(Error::Parse(format!("{text:?} is not finite")));
        }
        Ok(Scalar(value))
    }

    pub fn from_f64(&self, v: f64) -> Scalar {
        Scalar(Float::with_val(self.bits(), v))
    }
}

/// A real number carried at a fixed binary precision.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct Scalar(Float);

impl Scalar {
    pub fn prec(&self) -> u32 {
        self.0.prec()
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    /// The integer `v` at the precision of `self`.
    pub fn int_like(&self, v: i64) -> Scalar {
        Scalar(Float::with_val(self.prec(), v))
    }

    /// `10^exp` at the precision of `self`.
    pub fn pow10_like(&self, exp: i32) -> Scalar {
        use rug::ops::Pow;
        Scalar(Float::with_val(self.prec(), Float::with_val(self.prec(), 10).pow(exp)))
    }

    /// Errors unless `self` and `other` were created at the same precision.
    pub fn same_precision(&self, other: &Scalar) -> Result<()> {
        if self.prec() == other.prec() {
            Ok(())
        } else {
            Err(Error::PrecisionMismatch {
                left: self.prec(),
                right: other.prec(),
            })
        }
    }

    pub fn sqrt(&self) -> Result<Scalar> {
        if self.0.is_sign_negative() && !self.0.is_zero() {
            return Err(Error::NegativeSqrt);
        }
        Ok(Scalar(self.0.clone().sqrt()))
    }

    /// Real cube root; negative arguments give negative roots.
    pub fn cbrt(&self) -> Scalar {
        Scalar(self.0.clone().cbrt())
    }

    pub fn floor(&self) -> Scalar {
        Scalar(self.0.clone().floor())
    }

    pub fn abs(&self) -> Scalar {
        Scalar(self.0.clone().abs())
    }

    pub fn square(&self) -> Scalar {
        Scalar(self.0.clone().square())
    }

    pub fn recip(&self) -> Scalar {
        Scalar(self.0.clone().recip())
    }

    pub fn sign(&self) -> Ordering {
        self.0.cmp0().unwrap_or(Ordering::Equal)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.sign() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.sign() == Ordering::Less
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    /// The value as an unsigned integer, if it is one and fits.
    pub fn to_u64(&self) -> Option<u64> {
        if !self.0.is_integer() {
            return None;
        }
        self.0.to_integer()?.to_u64()
    }

    /// `log10 |self|` in double precision; `-inf` for zero.
    pub fn log10_abs(&self) -> f64 {
        if self.0.is_zero() {
            return f64::NEG_INFINITY;
        }
        Float::with_val(64, self.0.clone().abs().log10()).to_f64()
    }

    pub fn midpoint(a: &Scalar, b: &Scalar) -> Scalar {
        (a + b) / 2i64
    }

    pub fn min<'a>(&'a self, other: &'a Scalar) -> &'a Scalar {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max<'a>(&'a self, other: &'a Scalar) -> &'a Scalar {
        if other > self {
            other
        } else {
            self
        }
    }

    /// Total order; MPFR NaNs never arise from the operations exposed here.
    pub fn total_cmp(&self, other: &Scalar) -> Ordering {
        self.0.total_cmp(&other.0)
    }

    /// Decimal rendering with `digits` significant digits, rounded to nearest
    /// with ties to even. Moderate magnitudes print positionally, others in
    /// `d.ddde±x` form.
    pub fn to_sig_string(&self, digits: usize) -> String {
        let digits = digits.max(1);
        if self.0.is_zero() {
            return "0".to_string();
        }
        let (negative, mantissa, exp) = self.0.to_sign_string_exp(10, Some(digits));
        let Some(exp) = exp else {
            return self.0.to_string();
        };
        let e10 = exp - 1;
        let sign = if negative { "-" } else { "" };
        if (-5..digits as i32).contains(&e10) {
            if e10 >= 0 {
                let split = (e10 + 1) as usize;
                let (int_part, frac_part) = mantissa.split_at(split);
                if frac_part.is_empty() {
                    format!("{sign}{int_part}")
                } else {
                    format!("{sign}{int_part}.{frac_part}")
                }
            } else {
                let zeros = "0".repeat((-e10 - 1) as usize);
                format!("{sign}0.{zeros}{mantissa}")
            }
        } else {
            let (lead, rest) = mantissa.split_at(1);
            if rest.is_empty() {
                format!("{sign}{lead}e{e10}")
            } else {
                format!("{sign}{lead}.{rest}e{e10}")
            }
        }
    }

    /// Approximate number of decimal digits carried.
    pub fn digits(&self) -> u32 {
        ((f64::from(self.prec().saturating_sub(GUARD_BITS))) / LOG2_10).floor() as u32
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({})", self.to_sig_string(25))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(self.digits() as usize);
        f.write_str(&self.to_sig_string(digits))
    }
}

impl PartialEq<i64> for Scalar {
    fn eq(&self, other: &i64) -> bool {
        self.0 == *other
    }
}

impl PartialOrd<i64> for Scalar {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        self.0.partial_cmp(other)
    }
}

macro_rules! scalar_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                let prec = self.0.prec().max(rhs.0.prec());
                Scalar(Float::with_val(prec, $trait::$method(&self.0, &rhs.0)))
            }
        }
        impl $trait<Scalar> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                $trait::$method(self, &rhs)
            }
        }
        impl $trait<&Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                if self.0.prec() < rhs.0.prec() {
                    return $trait::$method(&self, rhs);
                }
                Scalar($trait::$method(self.0, &rhs.0))
            }
        }
        impl $trait<Scalar> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                $trait::$method(self, &rhs)
            }
        }
        impl $trait<i64> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: i64) -> Scalar {
                Scalar(Float::with_val(self.0.prec(), $trait::$method(&self.0, rhs)))
            }
        }
        impl $trait<i64> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: i64) -> Scalar {
                Scalar($trait::$method(self.0, rhs))
            }
        }
        impl $trait<u64> for &Scalar {
            type Output = Scalar;
            fn $method(self, rhs: u64) -> Scalar {
                Scalar(Float::with_val(self.0.prec(), $trait::$method(&self.0, rhs)))
            }
        }
        impl $trait<u64> for Scalar {
            type Output = Scalar;
            fn $method(self, rhs: u64) -> Scalar {
                Scalar($trait::$method(self.0, rhs))
            }
        }
        impl $trait<&Scalar> for i64 {
            type Output = Scalar;
            fn $method(self, rhs: &Scalar) -> Scalar {
                Scalar(Float::with_val(rhs.0.prec(), $trait::$method(self, &rhs.0)))
            }
        }
        impl $trait<Scalar> for i64 {
            type Output = Scalar;
            fn $method(self, rhs: Scalar) -> Scalar {
                $trait::$method(self, &rhs)
            }
        }
    };
}

scalar_binop!(Add, add);
scalar_binop!(Sub, sub);
scalar_binop!(Mul, mul);
scalar_binop!(Div, div);

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(Float::with_val(self.0.prec(), -&self.0))
    }
}

/// Final state of a bisection.
#[derive(Debug, Clone)]
pub struct Bracket {
    pub low: Scalar,
    pub high: Scalar,
    pub iterations: u32,
    /// The function vanished exactly at a midpoint; `low == high` then.
    pub exact: bool,
}

impl Bracket {
    pub fn midpoint(&self) -> Scalar {
        Scalar::midpoint(&self.low, &self.high)
    }

    pub fn width(&self) -> Scalar {
        &self.high - &self.low
    }
}

/// Bisection on a fallible function. `f(a)` and `f(b)` must have strictly
/// opposite signs; the sign of `f` at each midpoint picks the half kept.
pub fn try_bisect<F>(mut f: F, a: &Scalar, b: &Scalar, iters: u32) -> Result<Bracket>
where
    F: FnMut(&Scalar) -> Result<Scalar>,
{
    a.same_precision(b)?;
    if a >= b {
        return Err(Error::Domain(format!(
            "bisection needs a < b, got [{}, {}]",
            a.to_sig_string(12),
            b.to_sig_string(12)
        )));
    }
    let sign_a = f(a)?.sign();
    let sign_b = f(b)?.sign();
    if sign_a == Ordering::Equal || sign_b == Ordering::Equal || sign_a == sign_b {
        return Err(Error::Bracketing);
    }
    let mut low = a.clone();
    let mut high = b.clone();
    for i in 0..iters {
        let mid = Scalar::midpoint(&low, &high);
        let sign = f(&mid)?.sign();
        if sign == Ordering::Equal {
            return Ok(Bracket {
                low: mid.clone(),
                high: mid,
                iterations: i + 1,
                exact: true,
            });
        }
        if sign == sign_a {
            low = mid;
        } else {
            high = mid;
        }
    }
    Ok(Bracket {
        low,
        high,
        iterations: iters,
        exact: false,
    })
}

/// Root of a continuous strictly monotone `f` on `[a, b]`: the midpoint of
/// the final bracket, within `(b - a) / 2^iters` of the true root.
pub fn bisect_monotone_root<F>(mut f: F, a: &Scalar, b: &Scalar, iters: u32) -> Result<Scalar>
where
    F: FnMut(&Scalar) -> Scalar,
{
    try_bisect(|t| Ok(f(t)), a, b, iters).map(|br| br.midpoint())
}

/// Iterations needed to shrink a bracket of width `width` below `10^-digits`.
pub fn iterations_for_digits(width: &Scalar, digits: u32) -> u32 {
    let bits = (width.log10_abs() + f64::from(digits)) * LOG2_10;
    bits.ceil().max(1.0) as u32
}
