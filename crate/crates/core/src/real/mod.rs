//! Scalar abstraction over the two working precisions.
//!
//! Everything numerical in the crate is generic over [`Real`], implemented for
//! plain `f64` and for the double-double [`Dd`] used in extended-precision
//! mode.

mod dd;

pub use dd::{Dd, ParseDdError};

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Working precision of a computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Precision {
    #[default]
    Double,
    /// Double-double, about 32 significant decimal digits.
    Extended,
}

pub trait Real:
    Copy
    + Debug
    + Display
    + Default
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
{
    /// Relative machine epsilon of the representation.
    const EPSILON: f64;

    fn from_f64(x: f64) -> Self;
    fn from_dd(x: Dd) -> Self;
    fn to_f64(self) -> f64;
    fn to_dd(self) -> Dd;

    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn powi(self, n: i32) -> Self;
    fn pi() -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn one() -> Self {
        Self::from_f64(1.0)
    }

    fn from_usize(n: usize) -> Self {
        Self::from_dd(Dd::from(n as i64))
    }

    fn from_i64(n: i64) -> Self {
        Self::from_dd(Dd::from(n))
    }

    /// Exact ratio `num / den` rounded to this precision.
    fn ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn is_finite(self) -> bool {
        self.to_f64().is_finite()
    }

    /// Converts an exact rational, correctly rounded in the leading word and
    /// accurate to working precision overall.
    fn from_rational(q: &BigRational) -> Self {
        Self::from_dd(rational_to_dd(q))
    }
}

/// Double-double approximation of an exact rational.
pub fn rational_to_dd(q: &BigRational) -> Dd {
    if q.is_zero() {
        return Dd::ZERO;
    }
    let hi = q.to_f64().unwrap_or(f64::NAN);
    if !hi.is_finite() {
        return Dd::from_f64(hi);
    }
    let hi_q = BigRational::from_float(hi).expect("finite f64");
    let rem = q - hi_q;
    let lo = if rem.is_zero() {
        0.0
    } else {
        let lo = rem.to_f64().unwrap_or(0.0);
        if lo == 0.0 && !rem.is_zero() {
            // remainder underflowed to zero in the generic conversion
            let num = rem.numer().abs();
            let den = rem.denom().clone();
            let sign = if rem.is_negative() { -1.0 } else { 1.0 };
            sign * bigint_ratio(&num, &den)
        } else {
            lo
        }
    };
    Dd::new(hi, lo)
}

fn bigint_ratio(num: &BigInt, den: &BigInt) -> f64 {
    let nb = num.bits() as i64;
    let db = den.bits() as i64;
    let shift = nb - db - 60;
    let (n, d) = if shift > 0 { (num.clone(), den << shift as usize) } else { (num << (-shift) as usize, den.clone()) };
    let q = (n / d).to_f64().unwrap_or(0.0);
    q * 2f64.powi(shift as i32)
}

impl Real for f64 {
    const EPSILON: f64 = f64::EPSILON;

    fn from_f64(x: f64) -> Self {
        x
    }
    fn from_dd(x: Dd) -> Self {
        x.to_f64()
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn to_dd(self) -> Dd {
        Dd::from_f64(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn from_usize(n: usize) -> Self {
        n as f64
    }
    fn from_i64(n: i64) -> Self {
        n as f64
    }
}

impl Real for Dd {
    const EPSILON: f64 = Dd::EPSILON;

    fn from_f64(x: f64) -> Self {
        Dd::from_f64(x)
    }
    fn from_dd(x: Dd) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        Dd::to_f64(self)
    }
    fn to_dd(self) -> Dd {
        self
    }
    fn sqrt(self) -> Self {
        Dd::sqrt(self)
    }
    fn abs(self) -> Self {
        Dd::abs(self)
    }
    fn exp(self) -> Self {
        Dd::exp(self)
    }
    fn ln(self) -> Self {
        Dd::ln(self)
    }
    fn sin(self) -> Self {
        Dd::sin(self)
    }
    fn cos(self) -> Self {
        Dd::cos(self)
    }
    fn powi(self, n: i32) -> Self {
        Dd::powi(self, n)
    }
    fn pi() -> Self {
        Dd::PI
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn rational_conversion_is_double_double_accurate() {
        let q = BigRational::new(BigInt::from(1), BigInt::from(3));
        let d = rational_to_dd(&q);
        let back = Dd::ONE / Dd::from_f64(3.0);
        assert_eq!(d.hi(), back.hi());
        assert!((d.lo() - back.lo()).abs() < 1e-32);

        let tiny = BigRational::new(BigInt::from(7), BigInt::from(10).pow(40));
        let d = rational_to_dd(&tiny);
        assert!((d.to_f64() - 7e-40).abs() < 1e-54);
    }

    #[test]
    fn generic_helpers() {
        assert_eq!(<f64 as Real>::ratio(1, 4), 0.25);
        assert_eq!(<Dd as Real>::from_usize(12).to_f64(), 12.0);
        assert_eq!(Real::max(2.0f64, 3.0), 3.0);
    }
}
