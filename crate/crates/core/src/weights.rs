//! Nonnegative weight functions `w(x)`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::distributions::RealFn;
use crate::error::{Error, Result};

/// Grid size used when certifying monotonicity of a weight.
pub const DEFAULT_MONOTONE_GRID: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MonotonicityHint {
    Increasing,
    Decreasing,
    Constant,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MonotoneVerdict {
    Increasing,
    Decreasing,
    /// No strict rise or fall on the grid.
    Flat,
    Neither,
}

impl MonotoneVerdict {
    pub fn is_nonincreasing(self) -> bool {
        matches!(self, MonotoneVerdict::Decreasing | MonotoneVerdict::Flat)
    }

    pub fn is_nondecreasing(self) -> bool {
        matches!(self, MonotoneVerdict::Increasing | MonotoneVerdict::Flat)
    }
}

#[derive(Clone)]
enum WeightFamily {
    Power(f64),
    Constant(f64),
    ExpDecay(f64),
    Custom { name: String, eval: RealFn },
}

#[derive(Clone)]
pub struct WeightFunction {
    family: WeightFamily,
    hint: MonotonicityHint,
}

impl fmt::Debug for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeightFunction({self})")
    }
}

impl WeightFunction {
    /// `w(x) = x^m` on `x ≥ 0`.
    pub fn power(m: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::InvalidParameter(format!("power weight needs m > 0, got {m}")));
        }
        Ok(WeightFunction {
            family: WeightFamily::Power(m),
            hint: MonotonicityHint::Increasing,
        })
    }

    pub fn constant(c: f64) -> Result<Self> {
        if !(c >= 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("constant weight needs c >= 0, got {c}")));
        }
        Ok(WeightFunction {
            family: WeightFamily::Constant(c),
            hint: MonotonicityHint::Constant,
        })
    }

    /// `w(x) = e^{-a x}`.
    pub fn exp_decay(a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidParameter(format!("exp-decay weight needs a > 0, got {a}")));
        }
        Ok(WeightFunction {
            family: WeightFamily::ExpDecay(a),
            hint: MonotonicityHint::Decreasing,
        })
    }

    pub fn custom<F>(name: impl Into<String>, eval: F, hint: MonotonicityHint) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        WeightFunction {
            family: WeightFamily::Custom {
                name: name.into(),
                eval: Arc::new(eval),
            },
            hint,
        }
    }

    pub fn hint(&self) -> MonotonicityHint {
        self.hint
    }

    /// Exponent `m` of a power weight.
    pub fn power_exponent(&self) -> Option<f64> {
        match self.family {
            WeightFamily::Power(m) => Some(m),
            _ => None,
        }
    }

    pub fn is_constant_zero(&self) -> bool {
        matches!(self.family, WeightFamily::Constant(c) if c == 0.0)
    }

    /// True when `w(x) → 0` as `x → ∞` fast enough for the past-extropy
    /// integrals to converge on unbounded support.
    pub(crate) fn decays_at_infinity(&self) -> Option<bool> {
        match self.family {
            WeightFamily::Power(_) => Some(false),
            WeightFamily::Constant(c) => Some(c == 0.0),
            WeightFamily::ExpDecay(_) => Some(true),
            WeightFamily::Custom { .. } => None,
        }
    }

    /// Lower bound on the domain where the weight is defined.
    pub fn domain_lower(&self) -> f64 {
        match self.family {
            WeightFamily::Power(_) => 0.0,
            _ => f64::NEG_INFINITY,
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let value = match &self.family {
            WeightFamily::Power(m) => {
                if x < 0.0 {
                    return Err(Error::Domain {
                        what: "power weight argument",
                        value: x,
                    });
                }
                x.powf(*m)
            }
            WeightFamily::Constant(c) => *c,
            WeightFamily::ExpDecay(a) => (-a * x).exp(),
            WeightFamily::Custom { eval, .. } => eval(x),
        };
        if value >= 0.0 {
            Ok(value)
        } else {
            Err(Error::InvalidWeight {
                weight: self.to_string(),
                x,
                value,
            })
        }
    }
}

pub fn eval_weight(w: &WeightFunction, x: f64) -> Result<f64> {
    w.eval(x)
}

/// Monotonicity of `w` on an evenly spaced grid over `[lo, hi]`.
pub fn check_monotone_weight(
    w: &WeightFunction,
    lo: f64,
    hi: f64,
    grid_points: usize,
) -> Result<MonotoneVerdict> {
    if !(lo < hi) || grid_points < 2 {
        return Err(Error::InvalidParameter(format!(
            "monotonicity check needs lo < hi and at least 2 points, got [{lo}, {hi}] with {grid_points}"
        )));
    }
    let step = (hi - lo) / (grid_points - 1) as f64;
    let mut rise = false;
    let mut fall = false;
    let mut prev = w.eval(lo)?;
    for k in 1..grid_points {
        let x = if k == grid_points - 1 { hi } else { lo + step * k as f64 };
        let v = w.eval(x)?;
        rise |= v > prev;
        fall |= v < prev;
        prev = v;
    }
    Ok(match (rise, fall) {
        (true, true) => MonotoneVerdict::Neither,
        (true, false) => MonotoneVerdict::Increasing,
        (false, true) => MonotoneVerdict::Decreasing,
        (false, false) => MonotoneVerdict::Flat,
    })
}

impl fmt::Display for WeightFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            WeightFamily::Power(m) => write!(f, "power:{m}"),
            WeightFamily::Constant(c) => write!(f, "const:{c}"),
            WeightFamily::ExpDecay(a) => write!(f, "expdecay:{a}"),
            WeightFamily::Custom { name, .. } => write!(f, "custom:{name}"),
        }
    }
}

impl FromStr for WeightFunction {
    type Err = Error;

    /// Accepts `power:m`, `const:c` and `expdecay:a`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::parse("weight", s, "expected <family>:<parameter>"))?;
        let v: f64 = arg
            .trim()
            .parse()
            .map_err(|e| Error::parse("weight", s, format!("{e}")))?;
        match kind.trim().to_ascii_lowercase().as_str() {
            "power" => WeightFunction::power(v),
            "const" => WeightFunction::constant(v),
            "expdecay" => WeightFunction::exp_decay(v),
            other => Err(Error::parse("weight", s, format!("unknown family {other:?}"))),
        }
    }
}
