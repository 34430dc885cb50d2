use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Which tail the cumulative measure weighs: `F²` (past) or `F̄²` (residual).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Past,
    Residual,
}

/// Sampling design a measure or a sample refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Design {
    Single,
    Srs,
    MinRssu,
    MaxRssu,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Past => "past",
            Variant::Residual => "residual",
        }
    }
}

impl Design {
    pub fn as_str(self) -> &'static str {
        match self {
            Design::Single => "single",
            Design::Srs => "srs",
            Design::MinRssu => "minrssu",
            Design::MaxRssu => "maxrssu",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for Design {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "past" => Ok(Variant::Past),
            "residual" => Ok(Variant::Residual),
            _ => Err(Error::parse("variant", s, "expected past|residual")),
        }
    }
}

impl FromStr for Design {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "single" => Ok(Design::Single),
            "srs" => Ok(Design::Srs),
            "minrssu" => Ok(Design::MinRssu),
            "maxrssu" => Ok(Design::MaxRssu),
            _ => Err(Error::parse("design", s, "expected single|srs|minrssu|maxrssu")),
        }
    }
}
