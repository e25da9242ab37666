use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Index `p` of an L^p norm, `1 <= p <= inf`.
///
/// Serialized as a string (`"1"`, `"2.5"`, `"inf"`) so that the infinite
/// index survives JSON.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormIndex {
    Finite(f64),
    Infinity,
}

impl NormIndex {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidNormIndex(p.to_string()));
        }
        if p.is_infinite() {
            Ok(NormIndex::Infinity)
        } else {
            Ok(NormIndex::Finite(p))
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, NormIndex::Finite(_))
    }

    /// The finite exponent, or an error naming the operation that needed it.
    pub fn finite(self, what: &'static str) -> Result<f64> {
        match self {
            NormIndex::Finite(p) => Ok(p),
            NormIndex::Infinity => Err(Error::InfiniteNorm(what)),
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            NormIndex::Finite(p) => p,
            NormIndex::Infinity => f64::INFINITY,
        }
    }
}

impl fmt::Display for NormIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NormIndex::Infinity => f.write_str("inf"),
            NormIndex::Finite(p) => write!(f, "{p}"),
        }
    }
}

impl FromStr for NormIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => Ok(NormIndex::Infinity),
            other => other
                .parse::<f64>()
                .map_err(|_| Error::InvalidNormIndex(t.to_string()))
                .and_then(NormIndex::new),
        }
    }
}

impl Serialize for NormIndex {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for NormIndex {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Number(f64),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Raw::Number(p) => NormIndex::new(p).map_err(serde::de::Error::custom),
        }
    }
}
