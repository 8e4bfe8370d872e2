//! Scalar abstraction shared by thresholds, energies, costs and model coefficients.
//!
//! Everything numeric in the crate is generic over [`Scalar`]. The exact
//! instantiations ([`Rational`], [`BigRational`]) are the reference ones:
//! threshold rounding and the half-integer energy grid are only reproducible
//! bit-for-bit under exact arithmetic. The float instantiations round
//! thresholds with a small tolerance so that e.g. `5 * 0.6` still yields 3.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// Exact rational over `i64`; the default scalar of the crate.
pub type Rational = Ratio<i64>;

/// Arbitrary-precision rational.
pub type BigRational = Ratio<BigInt>;

const FLOAT_CEIL_SLACK: f64 = 1e-9;

pub trait Scalar:
    Num + Signed + Clone + PartialOrd + Debug + Display + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    /// Converts from an exact rational.
    fn from_rational(r: &Rational) -> Self;

    /// Exact rational image, if one exists (floats are approximated).
    fn to_rational(&self) -> Option<Rational>;

    /// Smallest integer `>= self`, or `None` for negative or non-finite input.
    fn ceil_count(&self) -> Option<u64>;

    /// Parses `p/q`, a decimal such as `0.6`, or an integer.
    fn parse_literal(s: &str) -> Option<Self>;

    fn from_ratio(numer: i64, denom: i64) -> Self {
        Self::from_rational(&Rational::new(numer, denom))
    }

    fn from_count(n: usize) -> Self {
        Self::from_rational(&Rational::from_integer(n as i64))
    }

    fn half() -> Self {
        Self::from_ratio(1, 2)
    }
}

/// Alpha marking a node that never adopts without direct subsidy.
///
/// `1 + 2^-20` makes `ceil(deg * alpha) = deg + 1` for every degree below
/// about a million, which is all the intransigence encoding needs.
pub fn intransigent_alpha<T: Scalar>() -> T {
    T::from_ratio((1 << 20) + 1, 1 << 20)
}

/// Parses an exact rational from `p/q`, a decimal (optionally with exponent)
/// or an integer literal.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: i64 = n.trim().parse().ok()?;
        let d: i64 = d.trim().parse().ok()?;
        if d == 0 {
            return None;
        }
        return Some(Rational::new(n, d));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first()? {
        b'-' => (true, &mantissa[1..]),
        b'+' => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut numer: i64 = if all.is_empty() { 0 } else { all.parse().ok()? };
    let mut scale = -(frac_part.len() as i32) + exponent;
    let mut denom: i64 = 1;
    while scale > 0 {
        numer = numer.checked_mul(10)?;
        scale -= 1;
    }
    while scale < 0 {
        denom = denom.checked_mul(10)?;
        scale += 1;
    }
    if negative {
        numer = -numer;
    }
    Some(Rational::new(numer, denom))
}

fn ratio_ceil_count<I>(r: &Ratio<I>) -> Option<u64>
where
    I: Clone + Integer + Signed + ToPrimitive,
{
    if r.is_negative() {
        return None;
    }
    r.ceil().to_integer().to_u64()
}

impl Scalar for Rational {
    fn from_rational(r: &Rational) -> Self {
        *r
    }

    fn to_rational(&self) -> Option<Rational> {
        Some(*self)
    }

    fn ceil_count(&self) -> Option<u64> {
        ratio_ceil_count(self)
    }

    fn parse_literal(s: &str) -> Option<Self> {
        parse_rational(s)
    }
}

impl Scalar for BigRational {
    fn from_rational(r: &Rational) -> Self {
        BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
    }

    fn to_rational(&self) -> Option<Rational> {
        Some(Rational::new(self.numer().to_i64()?, self.denom().to_i64()?))
    }

    fn ceil_count(&self) -> Option<u64> {
        ratio_ceil_count(self)
    }

    fn parse_literal(s: &str) -> Option<Self> {
        parse_rational(s).map(|r| Self::from_rational(&r))
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn from_rational(r: &Rational) -> Self {
                *r.numer() as $t / *r.denom() as $t
            }

            fn to_rational(&self) -> Option<Rational> {
                Rational::approximate_float(*self)
            }

            fn ceil_count(&self) -> Option<u64> {
                let v = *self as f64;
                if !v.is_finite() || v < 0.0 {
                    return None;
                }
                Some((v - FLOAT_CEIL_SLACK).ceil().max(0.0) as u64)
            }

            fn parse_literal(s: &str) -> Option<Self> {
                match parse_rational(s) {
                    Some(r) => Some(Self::from_rational(&r)),
                    None => s.trim().parse().ok(),
                }
            }
        }
    };
}

float_scalar!(f64);
float_scalar!(f32);

/// Best rational approximation with denominator at most `max_denom`
/// (continued-fraction convergents).
pub fn best_rational(value: &Rational, max_denom: i64) -> Rational {
    if *value.denom() <= max_denom {
        return *value;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    let mut n = *value.numer() as i128;
    let mut d = *value.denom() as i128;
    loop {
        let a = Integer::div_floor(&n, &d);
        let q2 = q0 + a * q1;
        if q2 > max_denom as i128 {
            break;
        }
        let p2 = p0 + a * p1;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let r = n - a * d;
        if r == 0 {
            break;
        }
        n = d;
        d = r;
    }
    Rational::new(p1 as i64, q1 as i64)
}

pub(crate) fn is_integral<T: Scalar>(v: &T) -> bool {
    match v.to_rational() {
        Some(r) => r.is_integer(),
        None => false,
    }
}
