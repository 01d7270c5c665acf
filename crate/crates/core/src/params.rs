//! Game parameters: edge costs and the reachability horizon.
//!
//! Costs are exact rationals so that the strict inequalities in the
//! addable/removable tests are never decided by rounding.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::graph::Mode;

pub type Rational = Ratio<i64>;

/// Maximum path length (in edges) that still yields utility.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Horizon {
    Finite(u32),
    Infinite,
}

impl Horizon {
    /// Depth limit for a breadth-first traversal; `None` means unbounded.
    pub fn depth_limit(self) -> Option<usize> {
        match self {
            Horizon::Finite(k) => Some(k as usize),
            Horizon::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Horizon::Infinite)
    }
}

impl fmt::Display for Horizon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Horizon::Finite(k) => write!(f, "{k}"),
            Horizon::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Horizon {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "Infinity" | "∞" => Ok(Horizon::Infinite),
            other => {
                let k: u32 = other.parse().map_err(|_| Error::InvalidParameter(format!("horizon `{other}`")))?;
                if k == 0 {
                    return Err(Error::InvalidParameter("horizon must be at least 1".into()));
                }
                Ok(Horizon::Finite(k))
            }
        }
    }
}

impl Serialize for Horizon {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Horizon {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(u32),
            Str(String),
        }
        let s = match Raw::deserialize(d)? {
            Raw::Int(k) => k.to_string(),
            Raw::Str(s) => s,
        };
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parses `"3/2"`, `"0.7"`, `"2"` or `"-1.25"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidParameter(format!("not a rational number: `{s}`"));
    if let Some((num, den)) = s.split_once('/') {
        let num: i64 = num.trim().parse().map_err(|_| bad())?;
        let den: i64 = den.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(num, den));
    }
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    if frac_part.len() > 15 {
        return Err(bad());
    }
    let int_val: i64 = if int_part.is_empty() { 0 } else { int_part.parse().map_err(|_| bad())? };
    let scale = 10i64.pow(frac_part.len() as u32);
    let frac_val: i64 = if frac_part.is_empty() { 0 } else { frac_part.parse().map_err(|_| bad())? };
    let num = int_val.checked_mul(scale).and_then(|v| v.checked_add(frac_val)).ok_or_else(bad)?;
    let r = Rational::new(num, scale);
    Ok(if negative { -r } else { r })
}

/// Renders `a/b`, or just `a` for integers. Inverse of [`parse_rational`].
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Approximate decimal value, for human-readable summaries only.
pub fn rational_to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Float(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(v) => Ok(Rational::from_integer(v)),
            Raw::Float(v) => parse_rational(&v.to_string()).map_err(serde::de::Error::custom),
            Raw::Str(s) => parse_rational(&s).map_err(serde::de::Error::custom),
        }
    }
}

pub mod serde_rational_opt {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_str(&format_rational(r)),
            None => s.serialize_str("undefined"),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Rational>, D::Error> {
        let raw = String::deserialize(d)?;
        if raw == "undefined" {
            return Ok(None);
        }
        parse_rational(&raw).map(Some).map_err(serde::de::Error::custom)
    }
}

pub mod serde_rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&format_rational(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(d)?.iter().map(|s| parse_rational(s).map_err(serde::de::Error::custom)).collect()
    }
}

/// Costs and horizon fixing one instance of the game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModelParams {
    #[serde(with = "serde_rational")]
    pub c_speak: Rational,
    #[serde(with = "serde_rational")]
    pub c_listen: Rational,
    pub horizon: Horizon,
}

impl ModelParams {
    pub fn new(c_speak: Rational, c_listen: Rational, horizon: Horizon) -> Result<Self> {
        if c_speak.is_negative() || c_listen.is_negative() {
            return Err(Error::InvalidParameter("edge costs must be nonnegative".into()));
        }
        if horizon == Horizon::Finite(0) {
            return Err(Error::InvalidParameter("horizon must be at least 1".into()));
        }
        Ok(Self { c_speak, c_listen, horizon })
    }

    /// Directed-mode parameters: listening is free.
    pub fn directed(c: Rational, horizon: Horizon) -> Result<Self> {
        Self::new(c, Rational::zero(), horizon)
    }

    /// Same cost on both layers.
    pub fn uniform(c: Rational, horizon: Horizon) -> Result<Self> {
        Self::new(c, c, horizon)
    }

    pub fn with_horizon(self, horizon: Horizon) -> Self {
        Self { horizon, ..self }
    }

    pub fn check_mode(&self, mode: Mode) -> Result<()> {
        if mode == Mode::Directed && !self.c_listen.is_zero() {
            return Err(Error::InvalidParameter("directed-mode graphs require a zero listening cost".into()));
        }
        Ok(())
    }
}

impl fmt::Display for ModelParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c_s={} c_l={} k={}", format_rational(&self.c_speak), format_rational(&self.c_listen), self.horizon)
    }
}

/// Shorthand for `Rational::new(num, den)`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(num, den)
}
