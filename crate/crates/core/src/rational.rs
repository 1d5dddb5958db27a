//! Exact rationals used for every real-valued quantity: f(n), the limiting
//! gradient, word means.
//!
//! Values are small in practice, so `i128` components are plenty; the heavy
//! enumeration paths never touch `Rational` and work with integer floors.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

pub fn rat(numer: i128, denom: i128) -> Rational {
    Ratio::new(numer, denom)
}

pub fn int(value: i128) -> Rational {
    Ratio::from_integer(value)
}

/// Parses `"p/q"`, `"p"` or `"-p/q"`.
pub fn parse(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (
            n.trim().parse::<i128>().map_err(|_| bad())?,
            d.trim().parse::<i128>().map_err(|_| bad())?,
        ),
        None => (s.parse::<i128>().map_err(|_| bad())?, 1),
    };
    if d <= 0 {
        return Err(Error::Parse(format!("denominator must be positive: {s:?}")));
    }
    Ok(Ratio::new(n, d))
}

/// Always `p/q`, even for integers, so files are uniform.
pub fn format(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn floor_i128(r: &Rational) -> i128 {
    r.numer().div_floor(r.denom())
}

pub fn ceil_i128(r: &Rational) -> i128 {
    r.numer().div_ceil(r.denom())
}

pub fn to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn is_nonnegative(r: &Rational) -> bool {
    r.is_zero() || r.is_positive()
}

/// `sum / len` compared against `alpha`, without building a Ratio.
#[inline]
pub fn mean_cmp(sum: u64, len: usize, alpha: &Rational) -> std::cmp::Ordering {
    let lhs = sum as i128 * *alpha.denom();
    let rhs = *alpha.numer() * len as i128;
    lhs.cmp(&rhs)
}

/// Serde adapter storing a rational as a `"p/q"` string.
pub mod serde_str {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        super::parse(&s).map_err(serde::de::Error::custom)
    }
}

pub mod serde_str_vec {
    use super::Rational;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&super::format(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| super::parse(s).map_err(serde::de::Error::custom))
            .collect()
    }
}
