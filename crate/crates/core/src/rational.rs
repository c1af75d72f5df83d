//! Exact rational numbers and the unreduced fractions used in hot loops.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact rational used throughout the public API.
pub type Q = Ratio<i128>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("cannot parse rational `{0}`")]
pub struct ParseRationalError(pub String);

/// Shorthand constructor, panics on a zero denominator.
pub fn q(num: i128, den: i128) -> Q {
    Q::new(num, den)
}

pub fn qi(n: i128) -> Q {
    Q::from_integer(n)
}

/// Parses `p`, `p/q` or a finite decimal such as `0.125`.
pub fn parse_q(s: &str) -> Result<Q, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: i128 = n.trim().parse().map_err(|_| err())?;
        let d: i128 = d.trim().parse().map_err(|_| err())?;
        if d == 0 {
            return Err(err());
        }
        return Ok(Q::new(n, d));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) || frac.len() > 18 {
            return Err(err());
        }
        let neg = int.starts_with('-');
        let ip: i128 = if int.is_empty() || int == "-" { 0 } else { int.parse::<i128>().map_err(|_| err())?.abs() };
        let den = 10i128.pow(frac.len() as u32);
        let fp: i128 = frac.parse().map_err(|_| err())?;
        let v = Q::new(ip * den + fp, den);
        return Ok(if neg { -v } else { v });
    }
    t.parse::<i128>().map(Q::from_integer).map_err(|_| err())
}

pub fn fmt_q(x: &Q) -> String {
    x.to_string()
}

pub fn to_f64(x: &Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

pub fn lcm_denominators<'a>(xs: impl IntoIterator<Item = &'a Q>) -> i128 {
    xs.into_iter().fold(1i128, |acc, x| acc.lcm(x.denom()))
}

/// Serde helpers storing rationals as strings like `"3/2"`.
pub mod serde_q {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let raw = QInput::deserialize(d)?;
        raw.into_q().map_err(serde::de::Error::custom)
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    pub(crate) enum QInput {
        Int(i64),
        Str(String),
    }

    impl QInput {
        pub(crate) fn into_q(self) -> Result<Q, ParseRationalError> {
            match self {
                QInput::Int(i) => Ok(qi(i as i128)),
                QInput::Str(s) => parse_q(&s),
            }
        }
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(x: &Option<Q>, s: S) -> Result<S::Ok, S::Error> {
            match x {
                Some(v) => s.serialize_str(&fmt_q(v)),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Q>, D::Error> {
            let raw: Option<QInput> = Option::deserialize(d)?;
            raw.map(|r| r.into_q().map_err(serde::de::Error::custom)).transpose()
        }
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(xs.len()))?;
            for x in xs {
                seq.serialize_element(&fmt_q(x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
            let raw: Vec<QInput> = Vec::deserialize(d)?;
            raw.into_iter().map(|r| r.into_q().map_err(serde::de::Error::custom)).collect()
        }
    }
}

/// Fraction with positive denominator that is never reduced implicitly.
///
/// Only used where the denominators are known to stay small (products of
/// grid denominators), so comparisons by cross multiplication cannot overflow.
#[derive(Clone, Copy, Debug)]
pub struct Frac {
    pub num: i128,
    pub den: i128,
}

impl Frac {
    pub const ZERO: Frac = Frac { num: 0, den: 1 };

    #[inline]
    pub fn new(num: i128, den: i128) -> Frac {
        debug_assert!(den > 0);
        Frac { num, den }
    }

    #[inline]
    pub fn int(n: i128) -> Frac {
        Frac { num: n, den: 1 }
    }

    pub fn from_q(x: &Q) -> Frac {
        Frac { num: *x.numer(), den: *x.denom() }
    }

    pub fn to_q(self) -> Q {
        Q::new(self.num, self.den)
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    #[inline]
    pub fn add(self, o: Frac) -> Frac {
        if self.den == o.den {
            return Frac { num: self.num + o.num, den: self.den };
        }
        Frac { num: self.num * o.den + o.num * self.den, den: self.den * o.den }
    }

    #[inline]
    pub fn sub(self, o: Frac) -> Frac {
        self.add(Frac { num: -o.num, den: o.den })
    }

    #[inline]
    pub fn mul(self, o: Frac) -> Frac {
        Frac { num: self.num * o.num, den: self.den * o.den }
    }

    #[inline]
    pub fn mul_int(self, k: i128) -> Frac {
        Frac { num: self.num * k, den: self.den }
    }

    #[inline]
    pub fn abs(self) -> Frac {
        Frac { num: self.num.abs(), den: self.den }
    }

    pub fn reduced(self) -> Frac {
        let g = self.num.gcd(&self.den);
        if g <= 1 {
            return self;
        }
        Frac { num: self.num / g, den: self.den / g }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    #[inline]
    pub fn max(self, o: Frac) -> Frac {
        if o > self {
            o
        } else {
            self
        }
    }

    #[inline]
    pub fn min(self, o: Frac) -> Frac {
        if o < self {
            o
        } else {
            self
        }
    }
}

impl PartialEq for Frac {
    fn eq(&self, o: &Frac) -> bool {
        self.num * o.den == o.num * self.den
    }
}

impl Eq for Frac {}

impl PartialOrd for Frac {
    fn partial_cmp(&self, o: &Frac) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Frac {
    fn cmp(&self, o: &Frac) -> Ordering {
        (self.num * o.den).cmp(&(o.num * self.den))
    }
}

impl fmt::Display for Frac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_q())
    }
}

pub fn q_is_positive(x: &Q) -> bool {
    x.is_positive()
}

pub fn q_zero() -> Q {
    Q::zero()
}

pub fn q_one() -> Q {
    Q::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_forms() {
        assert_eq!(parse_q("3/2").unwrap(), q(3, 2));
        assert_eq!(parse_q("-4").unwrap(), qi(-4));
        assert_eq!(parse_q("0.125").unwrap(), q(1, 8));
        assert_eq!(parse_q("-1.5").unwrap(), q(-3, 2));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }

    #[test]
    fn frac_order_matches_rationals() {
        let a = Frac::new(6, 4);
        let b = Frac::new(3, 2);
        assert_eq!(a, b);
        assert!(Frac::new(1, 3) < Frac::new(1, 2));
        assert_eq!(a.add(Frac::new(1, 2)).to_q(), qi(2));
        assert_eq!(a.sub(Frac::int(2)).to_q(), q(-1, 2));
    }
}
