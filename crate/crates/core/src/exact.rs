//! Exact scalars: arbitrary-precision rationals for distances and resolutions,
//! and dyadic rationals for interval-grid coordinates.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational used for every distance and every entourage radius.
pub type Q = BigRational;

pub fn q_int(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

pub fn q_frac(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Exact `2^k` for any integer `k`.
pub fn q_pow2(k: i64) -> Q {
    let big = BigInt::one() << k.unsigned_abs() as usize;
    if k >= 0 {
        Q::from_integer(big)
    } else {
        Q::new(BigInt::one(), big)
    }
}

/// Parses `"3"`, `"-0.125"`, `"1/3"`, `"2.5e-3"` into an exact rational.
pub fn parse_q(text: &str) -> Result<Q> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty number".into()));
    }
    if let Some((n, d)) = s.split_once('/') {
        let num = parse_q(n)?;
        let den = parse_q(d)?;
        if den.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(num / den);
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i64 = s[pos + 1..]
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in {text:?}")))?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::Parse(format!("no digits in {text:?}")));
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(Error::Parse(format!("invalid number {text:?}")));
    }
    let all = format!("{int_part}{frac_part}");
    let num = BigInt::from_str(if all.is_empty() { "0" } else { &all })
        .map_err(|_| Error::Parse(format!("invalid number {text:?}")))?;
    let scale = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        Q::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        Q::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        value = -value;
    }
    Ok(value)
}

pub fn q_to_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Decimal rendering with `sig` significant digits in fixed notation.
pub fn format_sig(value: f64, sig: usize) -> String {
    if value == 0.0 || !value.is_finite() {
        return if value == 0.0 {
            format!("{:.*}", sig.saturating_sub(1), 0.0)
        } else {
            value.to_string()
        };
    }
    let magnitude = value.abs().log10().floor() as i64;
    let decimals = (sig as i64 - 1 - magnitude).max(0) as usize;
    let rendered = format!("{value:.decimals$}");
    // rounding can carry into a new leading digit (9.99.. -> 10.0)
    let digits = rendered.chars().filter(|c| c.is_ascii_digit()).count();
    let leading_zeros = rendered
        .trim_start_matches('-')
        .chars()
        .take_while(|c| *c == '0' || *c == '.')
        .filter(|c| *c == '0')
        .count();
    if digits - leading_zeros > sig && decimals > 0 {
        format!("{value:.prec$}", prec = decimals - 1)
    } else {
        rendered
    }
}

/// Exact rational rendered as text: integers plainly, otherwise `p/q`.
pub fn q_to_string(q: &Q) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Serde adapter storing a rational as its exact text form.
pub mod q_serde {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&q_to_string(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        let text = String::deserialize(d)?;
        parse_q(&text).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for a matrix of rationals stored as exact text.
pub mod q_matrix_serde {
    use super::*;

    pub fn serialize<S: Serializer>(m: &[Vec<Q>], s: S) -> std::result::Result<S::Ok, S::Error> {
        let text: Vec<Vec<String>> = m.iter().map(|r| r.iter().map(q_to_string).collect()).collect();
        text.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<Q>>, D::Error> {
        let text = Vec::<Vec<String>>::deserialize(d)?;
        text.iter()
            .map(|r| r.iter().map(|t| parse_q(t)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)
    }
}

/// A dyadic rational `mant * 2^exp`, kept normalized (odd mantissa, or zero
/// with exponent 0) so that structural equality is numeric equality.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: i128,
    exp: i32,
}

fn shl_checked(m: i128, by: u32) -> Option<i128> {
    if m == 0 {
        return Some(0);
    }
    if by >= 127 {
        return None;
    }
    let r = m << by;
    (r >> by == m).then_some(r)
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { mant: 0, exp: 0 };
    pub const ONE: Dyadic = Dyadic { mant: 1, exp: 0 };

    pub fn new(mant: i128, exp: i32) -> Self {
        if mant == 0 {
            return Self::ZERO;
        }
        let tz = mant.trailing_zeros();
        Dyadic {
            mant: mant >> tz,
            exp: exp + tz as i32,
        }
    }

    pub fn from_int(v: i64) -> Self {
        Self::new(v as i128, 0)
    }

    pub fn pow2(k: i32) -> Self {
        Dyadic { mant: 1, exp: k }
    }

    pub fn mantissa(&self) -> i128 {
        self.mant
    }

    pub fn exponent(&self) -> i32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant == 0
    }

    pub fn signum(&self) -> i32 {
        self.mant.signum() as i32
    }

    /// Magnitude is an exact power of two (the only invertible dyadic scales).
    pub fn is_unit_scale(&self) -> bool {
        self.mant == 1 || self.mant == -1
    }

    pub fn abs(self) -> Self {
        Dyadic {
            mant: self.mant.abs(),
            exp: self.exp,
        }
    }

    pub fn mul_pow2(self, k: i32) -> Self {
        if self.mant == 0 {
            self
        } else {
            Dyadic {
                mant: self.mant,
                exp: self.exp + k,
            }
        }
    }

    pub fn checked_add(self, other: Dyadic) -> Result<Dyadic> {
        if self.mant == 0 {
            return Ok(other);
        }
        if other.mant == 0 {
            return Ok(self);
        }
        let e = self.exp.min(other.exp);
        let a = shl_checked(self.mant, (self.exp - e) as u32);
        let b = shl_checked(other.mant, (other.exp - e) as u32);
        match (a, b) {
            (Some(a), Some(b)) => a
                .checked_add(b)
                .map(|m| Dyadic::new(m, e))
                .ok_or_else(|| Error::Overflow(format!("{self} + {other}"))),
            _ => Err(Error::Overflow(format!("{self} + {other}"))),
        }
    }

    pub fn checked_sub(self, other: Dyadic) -> Result<Dyadic> {
        self.checked_add(-other)
    }

    pub fn checked_mul(self, other: Dyadic) -> Result<Dyadic> {
        self.mant
            .checked_mul(other.mant)
            .map(|m| Dyadic::new(m, self.exp + other.exp))
            .ok_or_else(|| Error::Overflow(format!("{self} * {other}")))
    }

    /// Reciprocal, defined only for `±2^k`.
    pub fn recip(self) -> Result<Dyadic> {
        if self.is_unit_scale() {
            Ok(Dyadic {
                mant: self.mant,
                exp: -self.exp,
            })
        } else {
            Err(Error::NonBijective(format!("scale {self} has no dyadic inverse")))
        }
    }

    pub fn to_q(&self) -> Q {
        Q::from_integer(BigInt::from(self.mant)) * q_pow2(self.exp as i64)
    }

    pub fn from_q(q: &Q) -> Result<Dyadic> {
        let den = q.denom();
        let bits = den.bits();
        if (BigInt::one() << (bits - 1) as usize) != *den {
            return Err(Error::Parse(format!("{} is not a dyadic rational", q_to_string(q))));
        }
        let num = q
            .numer()
            .to_i128()
            .ok_or_else(|| Error::Overflow(format!("numerator of {}", q_to_string(q))))?;
        Ok(Dyadic::new(num, -((bits - 1) as i32)))
    }

    pub fn to_f64(&self) -> f64 {
        self.mant as f64 * 2f64.powi(self.exp)
    }

    /// Mantissa rescaled to exponent `e` (must not exceed `self.exp`).
    pub fn scaled_to(&self, e: i32) -> Option<i128> {
        if self.mant == 0 {
            return Some(0);
        }
        if e > self.exp {
            return None;
        }
        shl_checked(self.mant, (self.exp - e) as u32)
    }

    /// Some dyadic strictly inside the open interval `(lo, hi)`.
    pub fn strictly_between(lo: &Q, hi: &Q) -> Option<Dyadic> {
        if lo >= hi {
            return None;
        }
        let width = hi - lo;
        let mut k: i64 = 0;
        while q_pow2(-k) < width.clone() / q_int(2) && k > -200 {
            k -= 1;
        }
        while q_pow2(-k) >= width.clone() / q_int(2) {
            k += 1;
            if k > 400 {
                return None;
            }
        }
        // grid 2^-k is finer than half the width, so a grid point lands inside
        let scale = q_pow2(-k);
        let steps = (lo / &scale).floor() + Q::one();
        let candidate = steps * scale;
        if &candidate > lo && &candidate < hi {
            Dyadic::from_q(&candidate).ok()
        } else {
            None
        }
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exp.min(other.exp);
        match (self.scaled_to(e), other.scaled_to(e)) {
            (Some(a), Some(b)) => a.cmp(&b),
            _ => self.to_q().cmp(&other.to_q()),
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    /// Exact finite decimal expansion.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp >= 0 {
            let v = BigInt::from(self.mant) << self.exp as usize;
            return write!(f, "{v}");
        }
        let places = (-self.exp) as usize;
        let scaled = BigInt::from(self.mant.abs()) * num_traits::pow(BigInt::from(5), places);
        let digits = scaled.to_string();
        let digits = format!("{digits:0>width$}", width = places + 1);
        let (int_part, frac) = digits.split_at(digits.len() - places);
        let frac = frac.trim_end_matches('0');
        let sign = if self.mant < 0 { "-" } else { "" };
        if frac.is_empty() {
            write!(f, "{sign}{int_part}")
        } else {
            write!(f, "{sign}{int_part}.{frac}")
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dyadic({self})")
    }
}

impl FromStr for Dyadic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Dyadic::from_q(&parse_q(s)?)
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

impl std::ops::Neg for Dyadic {
    type Output = Dyadic;

    fn neg(self) -> Dyadic {
        Dyadic {
            mant: -self.mant,
            exp: self.exp,
        }
    }
}

/// Smallest integer `t` with `t > num/den` style threshold: returns
/// `ceil(p / q)` for positive rationals, saturating at `i128::MAX`.
pub fn ceil_to_i128(q: &Q) -> i128 {
    let (quot, rem) = q.numer().div_rem(q.denom());
    let mut c = quot;
    if rem.is_positive() {
        c += 1;
    }
    c.to_i128()
        .unwrap_or(if c.is_negative() { i128::MIN } else { i128::MAX })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_decimal_and_fraction() {
        assert_eq!(parse_q("0.1").unwrap(), q_frac(1, 10));
        assert_eq!(parse_q("-1/4").unwrap(), q_frac(-1, 4));
        assert_eq!(parse_q("2.5e-3").unwrap(), q_frac(1, 400));
        assert_eq!(parse_q("3").unwrap(), q_int(3));
        assert!(parse_q("abc").is_err());
        assert!(parse_q("1/0").is_err());
    }

    #[test]
    fn dyadic_arithmetic_is_exact() {
        let a: Dyadic = "0.75".parse().unwrap();
        let b: Dyadic = "1/4096".parse().unwrap();
        assert_eq!(a.checked_add(b).unwrap().to_q(), q_frac(3073, 4096));
        assert_eq!(a.mul_pow2(2), Dyadic::from_int(3));
        assert_eq!(Dyadic::from_int(6), Dyadic::new(3, 1));
        assert!("0.1".parse::<Dyadic>().is_err());
        assert_eq!(a.to_string(), "0.75");
        assert_eq!(Dyadic::new(-5, -3).to_string(), "-0.625");
        assert_eq!(Dyadic::from_int(-12).to_string(), "-12");
    }

    #[test]
    fn dyadic_order_matches_rationals() {
        let xs = ["-3", "-0.5", "0", "1/1024", "0.25", "7.125"];
        for a in xs {
            for b in xs {
                let (da, db): (Dyadic, Dyadic) = (a.parse().unwrap(), b.parse().unwrap());
                assert_eq!(da.cmp(&db), da.to_q().cmp(&db.to_q()));
            }
        }
    }

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_sig(0.2, 12), "0.200000000000");
        assert_eq!(format_sig(0.05, 12), "0.0500000000000");
        assert_eq!(format_sig(0.123456789012345, 12), "0.123456789012");
        assert_eq!(format_sig(3.0, 12), "3.00000000000");
    }

    #[test]
    fn dyadic_between() {
        let d = Dyadic::strictly_between(&q_frac(1, 3), &q_frac(1, 2)).unwrap();
        assert!(d.to_q() > q_frac(1, 3) && d.to_q() < q_frac(1, 2));
        assert!(Dyadic::strictly_between(&q_int(1), &q_int(1)).is_none());
    }
}
