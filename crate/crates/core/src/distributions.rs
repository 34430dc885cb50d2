//! Absolutely continuous distributions in (cdf, pdf, quantile) form.
//!
//! All measures in this crate are integrals over `u ∈ (0, 1)`, so the
//! quantile function `F⁻¹` and the density along it, `f(F⁻¹(u))`, are the
//! primary representation. Closed forms are used where a family has them.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A shareable real-valued map.
pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Grid size used to certify that a transformation is increasing.
pub const TRANSFORM_CHECK_POINTS: usize = 512;

const INVERSION_TOL: f64 = 1e-12;

/// An increasing map `ψ` with `ψ(0) = 0`, used to build `Y = ψ(X)`.
#[derive(Clone)]
pub struct Transformation {
    name: String,
    psi: RealFn,
    psi_prime: RealFn,
    inverse: Option<RealFn>,
}

impl fmt::Debug for Transformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Transformation")
            .field("name", &self.name)
            .field("closed_inverse", &self.inverse.is_some())
            .finish()
    }
}

impl Transformation {
    /// `ψ(x) = eˣ − 1`.
    pub fn exp_minus_one() -> Self {
        Transformation {
            name: "exp_minus_one".into(),
            psi: Arc::new(f64::exp_m1),
            psi_prime: Arc::new(f64::exp),
            inverse: Some(Arc::new(f64::ln_1p)),
        }
    }

    pub fn identity() -> Self {
        Transformation {
            name: "identity".into(),
            psi: Arc::new(|x| x),
            psi_prime: Arc::new(|_| 1.0),
            inverse: Some(Arc::new(|y| y)),
        }
    }

    /// A user-supplied map. Without [`Transformation::with_inverse`] the
    /// inverse is found by bisection.
    pub fn custom<P, D>(name: impl Into<String>, psi: P, psi_prime: D) -> Self
    where
        P: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Transformation {
            name: name.into(),
            psi: Arc::new(psi),
            psi_prime: Arc::new(psi_prime),
            inverse: None,
        }
    }

    pub fn with_inverse<I>(mut self, inverse: I) -> Self
    where
        I: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        self.inverse = Some(Arc::new(inverse));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn psi(&self, x: f64) -> f64 {
        (self.psi)(x)
    }

    pub fn psi_prime(&self, x: f64) -> f64 {
        (self.psi_prime)(x)
    }

    pub fn has_closed_inverse(&self) -> bool {
        self.inverse.is_some()
    }

    fn psi_at_bound(&self, x: f64) -> f64 {
        if x.is_finite() {
            self.psi(x)
        } else {
            // ψ is increasing, so an unbounded domain maps to an unbounded
            // image unless ψ says otherwise.
            let y = self.psi(x);
            if y.is_nan() {
                x
            } else {
                y
            }
        }
    }

    /// `ψ⁻¹(y)` on the domain `[lo, hi]`.
    pub fn inverse(&self, y: f64, lo: f64, hi: f64) -> f64 {
        if let Some(inv) = &self.inverse {
            return inv(y);
        }
        let mut lo = lo;
        let mut hi = if hi.is_finite() {
            hi
        } else {
            let mut h = lo.abs().max(1.0) + lo;
            while self.psi(h) < y && h.is_finite() {
                lo = h;
                h = 2.0 * h + 1.0;
            }
            h
        };
        while hi - lo > INVERSION_TOL * hi.abs().max(1.0) {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.psi(mid) < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// A distribution given directly by its quantile function and the density
/// along it. The cdf is recovered by monotone inversion of the quantile.
#[derive(Clone)]
pub struct CustomDistribution {
    name: String,
    quantile: RealFn,
    density_at_quantile: RealFn,
    lower: f64,
    upper: f64,
}

impl fmt::Debug for CustomDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomDistribution")
            .field("name", &self.name)
            .field("lower", &self.lower)
            .field("upper", &self.upper)
            .finish()
    }
}

#[derive(Debug, Clone)]
enum Family {
    Uniform { a: f64, b: f64 },
    Exponential { rate: f64 },
    PowerSurvival { b: f64 },
    Transformed {
        base: Box<Distribution>,
        transform: Transformation,
    },
    Custom(CustomDistribution),
}

/// Family of a [`Distribution`] together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilyTag {
    Uniform { a: f64, b: f64 },
    Exponential { rate: f64 },
    /// Survival function `(1 − x)^b` on `(0, 1)`.
    PowerSurvival { b: f64 },
    Transformed,
    Custom,
}

#[derive(Debug, Clone)]
pub struct Distribution {
    family: Family,
    lower: f64,
    upper: f64,
}

fn check_probability(u: f64) -> Result<()> {
    if u > 0.0 && u < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "probability",
            value: u,
        })
    }
}

fn positive(what: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidParameter(format!("{what} must be positive and finite, got {v}")))
    }
}

impl Distribution {
    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidParameter(format!(
                "uniform bounds must be finite with a < b, got ({a}, {b})"
            )));
        }
        Ok(Distribution {
            family: Family::Uniform { a, b },
            lower: a,
            upper: b,
        })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        let rate = positive("exponential rate", rate)?;
        Ok(Distribution {
            family: Family::Exponential { rate },
            lower: 0.0,
            upper: f64::INFINITY,
        })
    }

    /// Survival function `F̄(x) = (1 − x)^b` on `(0, 1)`.
    pub fn power_survival(b: f64) -> Result<Self> {
        let b = positive("power-survival exponent", b)?;
        Ok(Distribution {
            family: Family::PowerSurvival { b },
            lower: 0.0,
            upper: 1.0,
        })
    }

    pub fn custom<Q, D>(
        name: impl Into<String>,
        quantile: Q,
        density_at_quantile: D,
        lower: f64,
        upper: f64,
    ) -> Result<Self>
    where
        Q: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if lower.is_nan() || upper.is_nan() || lower >= upper {
            return Err(Error::InvalidParameter(format!(
                "custom support must satisfy lower < upper, got ({lower}, {upper})"
            )));
        }
        Ok(Distribution {
            family: Family::Custom(CustomDistribution {
                name: name.into(),
                quantile: Arc::new(quantile),
                density_at_quantile: Arc::new(density_at_quantile),
                lower,
                upper,
            }),
            lower,
            upper,
        })
    }

    /// Distribution of `ψ(X)`.
    pub fn transform(&self, t: &Transformation) -> Result<Self> {
        transform(self, t)
    }

    pub fn family_tag(&self) -> FamilyTag {
        match &self.family {
            Family::Uniform { a, b } => FamilyTag::Uniform { a: *a, b: *b },
            Family::Exponential { rate } => FamilyTag::Exponential { rate: *rate },
            Family::PowerSurvival { b } => FamilyTag::PowerSurvival { b: *b },
            Family::Transformed { .. } => FamilyTag::Transformed,
            Family::Custom(_) => FamilyTag::Custom,
        }
    }

    pub fn support_lower(&self) -> f64 {
        self.lower
    }

    pub fn support_upper(&self) -> f64 {
        self.upper
    }

    pub fn is_nonnegative(&self) -> bool {
        self.lower >= 0.0
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.lower {
            return 0.0;
        }
        if x >= self.upper {
            return 1.0;
        }
        match &self.family {
            Family::Uniform { a, b } => (x - a) / (b - a),
            Family::Exponential { rate } => -(-rate * x).exp_m1(),
            Family::PowerSurvival { b } => -(b * (-x).ln_1p()).exp_m1(),
            Family::Transformed { base, transform } => {
                base.cdf(transform.inverse(x, base.lower, base.upper))
            }
            Family::Custom(c) => invert_quantile(&*c.quantile, x),
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x < self.lower || x > self.upper {
            return 0.0;
        }
        match &self.family {
            Family::Uniform { a, b } => 1.0 / (b - a),
            Family::Exponential { rate } => rate * (-rate * x).exp(),
            Family::PowerSurvival { b } => b * (1.0 - x).powf(b - 1.0),
            Family::Transformed { base, transform } => {
                let x0 = transform.inverse(x, base.lower, base.upper);
                base.pdf(x0) / transform.psi_prime(x0)
            }
            Family::Custom(c) => {
                let u = self.cdf(x).clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0);
                (c.density_at_quantile)(u)
            }
        }
    }

    /// `F⁻¹(u)` for `u ∈ (0, 1)`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        check_probability(u)?;
        Ok(match &self.family {
            Family::Uniform { a, b } => a + (b - a) * u,
            Family::Exponential { rate } => -(-u).ln_1p() / rate,
            Family::PowerSurvival { b } => -((-u).ln_1p() / b).exp_m1(),
            Family::Transformed { base, transform } => transform.psi(base.quantile(u)?),
            Family::Custom(c) => (c.quantile)(u),
        })
    }

    /// `f(F⁻¹(u))`. A zero return marks a singular point of the `1/f`
    /// integrands and is left for the quadrature to deal with.
    pub fn pdf_at_quantile(&self, u: f64) -> Result<f64> {
        check_probability(u)?;
        Ok(match &self.family {
            Family::Uniform { a, b } => 1.0 / (b - a),
            Family::Exponential { rate } => rate * (1.0 - u),
            Family::PowerSurvival { b } => b * (1.0 - u).powf((b - 1.0) / b),
            Family::Transformed { base, transform } => {
                let x = base.quantile(u)?;
                base.pdf_at_quantile(u)? / transform.psi_prime(x)
            }
            Family::Custom(c) => (c.density_at_quantile)(u),
        })
    }

    /// `F⁻¹(1 - v)` for `v ∈ (0, 1)`, accurate when `v` is small.
    pub fn upper_quantile(&self, v: f64) -> Result<f64> {
        check_probability(v)?;
        Ok(match &self.family {
            Family::Uniform { a, b } => b - (b - a) * v,
            Family::Exponential { rate } => -v.ln() / rate,
            Family::PowerSurvival { b } => -(v.ln() / b).exp_m1(),
            Family::Transformed { base, transform } => transform.psi(base.upper_quantile(v)?),
            Family::Custom(c) => (c.quantile)(1.0 - v),
        })
    }

    /// `f(F⁻¹(1 - v))`, the density at [`Distribution::upper_quantile`].
    pub fn pdf_at_upper_quantile(&self, v: f64) -> Result<f64> {
        check_probability(v)?;
        Ok(match &self.family {
            Family::Uniform { a, b } => 1.0 / (b - a),
            Family::Exponential { rate } => rate * v,
            Family::PowerSurvival { b } => b * v.powf((b - 1.0) / b),
            Family::Transformed { base, transform } => {
                let x = base.upper_quantile(v)?;
                base.pdf_at_upper_quantile(v)? / transform.psi_prime(x)
            }
            Family::Custom(c) => (c.density_at_quantile)(1.0 - v),
        })
    }
}

/// Bisection for `u` with `q(u) = x`; `q` must be nondecreasing.
fn invert_quantile(q: &dyn Fn(f64) -> f64, x: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..1100 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if q(mid) < x {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Points covering the support of `d`: the finite lower endpoint, if any,
/// followed by quantiles at `k / (points + 1)`.
pub(crate) fn support_grid(d: &Distribution, points: usize) -> Result<Vec<f64>> {
    let mut xs = Vec::with_capacity(points + 1);
    if d.lower.is_finite() {
        xs.push(d.lower);
    }
    let denom = (points + 1) as f64;
    for k in 1..=points {
        let x = d.quantile(k as f64 / denom)?;
        if xs.last().is_none_or(|&prev| x > prev) {
            xs.push(x);
        }
    }
    Ok(xs)
}

/// Distribution of `Y = ψ(X)` for nonnegative `X`.
pub fn transform(d: &Distribution, t: &Transformation) -> Result<Distribution> {
    if !d.is_nonnegative() {
        return Err(Error::InvalidTransformation(format!(
            "base support must be nonnegative, lower endpoint is {}",
            d.lower
        )));
    }
    let at_zero = t.psi(0.0);
    if at_zero != 0.0 {
        return Err(Error::InvalidTransformation(format!(
            "{}(0) must be exactly 0, got {at_zero}",
            t.name
        )));
    }

    let grid = support_grid(d, TRANSFORM_CHECK_POINTS)?;
    let mut prev: Option<f64> = None;
    for &x in &grid {
        let slope = t.psi_prime(x);
        if !(slope > 0.0 && slope.is_finite()) {
            return Err(Error::InvalidTransformation(format!(
                "{}' = {slope} at x = {x}",
                t.name
            )));
        }
        let y = t.psi(x);
        if let Some(p) = prev {
            if !(y > p) {
                return Err(Error::InvalidTransformation(format!(
                    "{} is not increasing near x = {x}",
                    t.name
                )));
            }
        }
        prev = Some(y);
    }

    Ok(Distribution {
        lower: t.psi_at_bound(d.lower),
        upper: t.psi_at_bound(d.upper),
        family: Family::Transformed {
            base: Box::new(d.clone()),
            transform: t.clone(),
        },
    })
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            Family::Uniform { a, b } => write!(f, "uniform:{a},{b}"),
            Family::Exponential { rate } => write!(f, "exp:{rate}"),
            Family::PowerSurvival { b } => write!(f, "powersurv:{b}"),
            Family::Transformed { base, transform } => {
                write!(f, "transform:{}({base})", transform.name)
            }
            Family::Custom(c) => write!(f, "custom:{}", c.name),
        }
    }
}

fn parse_number(what: &'static str, input: &str, s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|e| Error::parse(what, input, format!("{s:?}: {e}")))
}

impl FromStr for Distribution {
    type Err = Error;

    /// Accepts `uniform:a,b`, `exp:lambda`, `powersurv:b` and
    /// `transform:<name>(<base>)` with `<name>` one of `exp_minus_one`,
    /// `identity`.
    fn from_str(s: &str) -> Result<Self> {
        const WHAT: &str = "distribution";
        let s = s.trim();
        let (kind, args) = s
            .split_once(':')
            .ok_or_else(|| Error::parse(WHAT, s, "expected <family>:<parameters>"))?;
        match kind.trim().to_ascii_lowercase().as_str() {
            "uniform" => {
                let (a, b) = args
                    .split_once(',')
                    .ok_or_else(|| Error::parse(WHAT, s, "uniform needs a,b"))?;
                Distribution::uniform(parse_number(WHAT, s, a)?, parse_number(WHAT, s, b)?)
            }
            "exp" => Distribution::exponential(parse_number(WHAT, s, args)?),
            "powersurv" => Distribution::power_survival(parse_number(WHAT, s, args)?),
            "transform" => {
                let open = args
                    .find('(')
                    .ok_or_else(|| Error::parse(WHAT, s, "expected <name>(<base>)"))?;
                let inner = args[open + 1..]
                    .strip_suffix(')')
                    .ok_or_else(|| Error::parse(WHAT, s, "missing closing parenthesis"))?;
                let t = match args[..open].trim() {
                    "exp_minus_one" => Transformation::exp_minus_one(),
                    "identity" => Transformation::identity(),
                    other => {
                        return Err(Error::parse(WHAT, s, format!("unknown transformation {other:?}")))
                    }
                };
                inner.parse::<Distribution>()?.transform(&t)
            }
            other => Err(Error::parse(WHAT, s, format!("unknown family {other:?}"))),
        }
    }
}
