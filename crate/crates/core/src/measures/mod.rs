//! Weighted extropy measures for a single variable and for the SRS,
//! minRSSU and maxRSSU designs.
//!
//! Every measure is `-1/2` times an expectation over `U ~ Uniform(0, 1)`
//! (or a product of such expectations for the designs). The integrands are
//!
//! | kind     | integrand                               | measure                      |
//! |----------|-----------------------------------------|------------------------------|
//! | `Lambda` | `u² w(F⁻¹(u)) / f(F⁻¹(u))`              | GWCPJ, SRS past              |
//! | `Delta`  | `(1-u)² w(F⁻¹(u)) / f(F⁻¹(u))`          | GWCRJ, SRS residual          |
//! | `Psi(i)` | `u^{2i} w(F⁻¹(u)) / f(F⁻¹(u))`          | i-th factor, maxRSSU past    |
//! | `Phi(i)` | `(1-u)^{2i} w(F⁻¹(u)) / f(F⁻¹(u))`      | i-th factor, minRSSU residual|
//! | `WeightedDensity` | `w(F⁻¹(u)) f(F⁻¹(u))`          | weighted extropy (GWJ)       |
//!
//! Quadrature is always the evaluation path; [`closed_form`] holds the known
//! analytic values and is meant to be checked against, not substituted.

mod closed_form;

use std::cell::RefCell;
use std::fmt;

use serde::Serialize;

pub use closed_form::{closed_form, uniform_min_rssu_squared_gamma};

use crate::design::{Design, Variant};
use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, IntegrationResult, QuadratureConfig};
use crate::weights::WeightFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureVariant {
    Past,
    Residual,
    /// `J^w(X) = -1/2 ∫ w f²`.
    WeightedExtropy,
}

impl From<Variant> for MeasureVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Past => MeasureVariant::Past,
            Variant::Residual => MeasureVariant::Residual,
        }
    }
}

impl fmt::Display for MeasureVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MeasureVariant::Past => "past",
            MeasureVariant::Residual => "residual",
            MeasureVariant::WeightedExtropy => "weighted_extropy",
        })
    }
}

/// What to compute: the measure variant, the design and its size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct MeasureSpec {
    variant: MeasureVariant,
    design: Design,
    n: u32,
}

impl MeasureSpec {
    pub fn new(variant: MeasureVariant, design: Design, n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::UnsupportedMeasure("design size n must be at least 1".into()));
        }
        if design == Design::Single && n != 1 {
            return Err(Error::UnsupportedMeasure(format!(
                "single-variable measure requires n = 1, got {n}"
            )));
        }
        match (variant, design) {
            (MeasureVariant::Past, Design::MinRssu) => Err(Error::UnsupportedMeasure(
                "past extropy is defined for maxRSSU, not minRSSU".into(),
            )),
            (MeasureVariant::Residual, Design::MaxRssu) => Err(Error::UnsupportedMeasure(
                "residual extropy is defined for minRSSU, not maxRSSU".into(),
            )),
            (MeasureVariant::WeightedExtropy, d) if d != Design::Single => Err(
                Error::UnsupportedMeasure("weighted extropy is a single-variable measure".into()),
            ),
            _ => Ok(MeasureSpec { variant, design, n }),
        }
    }

    pub fn single(variant: MeasureVariant) -> Self {
        MeasureSpec {
            variant,
            design: Design::Single,
            n: 1,
        }
    }

    pub fn variant(&self) -> MeasureVariant {
        self.variant
    }

    pub fn design(&self) -> Design {
        self.design
    }

    pub fn n(&self) -> u32 {
        self.n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", content = "order", rename_all = "snake_case")]
pub enum IntegrandKind {
    Lambda,
    Delta,
    Psi(u32),
    Phi(u32),
    WeightedDensity,
}

impl IntegrandKind {
    fn validate(self) -> Result<Self> {
        match self {
            IntegrandKind::Psi(0) | IntegrandKind::Phi(0) => Err(Error::InvalidParameter(
                "order index of Psi/Phi integrands starts at 1".into(),
            )),
            k => Ok(k),
        }
    }

    /// Integrands built on `F²`, i.e. the past variants.
    fn is_past(self) -> bool {
        matches!(self, IntegrandKind::Lambda | IntegrandKind::Psi(_))
    }

    fn is_residual(self) -> bool {
        matches!(self, IntegrandKind::Delta | IntegrandKind::Phi(_))
    }
}

impl fmt::Display for IntegrandKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntegrandKind::Lambda => f.write_str("Lambda"),
            IntegrandKind::Delta => f.write_str("Delta"),
            IntegrandKind::Psi(i) => write!(f, "Psi_{i}"),
            IntegrandKind::Phi(i) => write!(f, "Phi_{i}"),
            IntegrandKind::WeightedDensity => f.write_str("delta_gwj"),
        }
    }
}

/// One expectation `E[kind(U)]` and its quadrature report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Factor {
    pub kind: IntegrandKind,
    pub result: IntegrationResult,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureValue {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub factors: Vec<Factor>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureOptions {
    pub quadrature: QuadratureConfig,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        MeasureOptions {
            quadrature: QuadratureConfig::with_tolerances(1e-15, 1e-11),
        }
    }
}

/// A non-finite integrand this close to 0 or 1 is taken as divergence of
/// the integral.
const ENDPOINT_OVERFLOW_ZONE: f64 = 1e-100;

/// Value of an integrand at `u`.
pub fn integrand_value(
    d: &Distribution,
    w: &WeightFunction,
    kind: IntegrandKind,
    u: f64,
) -> Result<f64> {
    if u > 0.5 {
        integrand_at(d, w, kind, 1.0 - u, true)
    } else {
        integrand_at(d, w, kind, u, false)
    }
}

/// Integrand at level `p` (`upper = false`) or `1 - p` (`upper = true`).
/// The quantile and density come from the side where `p` is the small
/// argument, so levels near 1 are not rounded.
fn integrand_at(d: &Distribution, w: &WeightFunction, kind: IntegrandKind, p: f64, upper: bool) -> Result<f64> {
    let (x, fx, u, s) = if upper {
        (d.upper_quantile(p)?, d.pdf_at_upper_quantile(p)?, 1.0 - p, p)
    } else {
        (d.quantile(p)?, d.pdf_at_quantile(p)?, p, 1.0 - p)
    };
    let wx = w.eval(x)?;
    Ok(match kind {
        IntegrandKind::Lambda => u * u * wx / fx,
        IntegrandKind::Delta => s * s * wx / fx,
        IntegrandKind::Psi(i) => u.powi(2 * i as i32) * wx / fx,
        IntegrandKind::Phi(i) => s.powi(2 * i as i32) * wx / fx,
        IntegrandKind::WeightedDensity => wx * fx,
    })
}

/// Integrals that are infinite for structural reasons, detected without
/// running the quadrature.
fn diverges_a_priori(d: &Distribution, w: &WeightFunction, kind: IntegrandKind) -> bool {
    if w.is_constant_zero() {
        return false;
    }
    if kind.is_past() && d.support_upper() == f64::INFINITY {
        return w.decays_at_infinity() == Some(false);
    }
    if kind.is_residual() && d.support_lower() == f64::NEG_INFINITY {
        return w.decays_at_infinity().is_some();
    }
    false
}

fn check_weight_domain(d: &Distribution, w: &WeightFunction) -> Result<()> {
    if d.support_lower() < w.domain_lower() {
        return Err(Error::Domain {
            what: "support lower endpoint for this weight",
            value: d.support_lower(),
        });
    }
    Ok(())
}

/// `E[kind(U)]` for `U ~ Uniform(0, 1)`.
pub fn expectation(
    d: &Distribution,
    w: &WeightFunction,
    kind: IntegrandKind,
    options: &MeasureOptions,
) -> Result<IntegrationResult> {
    let kind = kind.validate()?;
    check_weight_domain(d, w)?;
    if diverges_a_priori(d, w, kind) {
        return Err(Error::Divergence {
            what: format!("E[{kind}] for {d} with weight {w}"),
            estimate: f64::INFINITY,
            error_estimate: f64::INFINITY,
        });
    }

    // (0, 1/2] in u, then (0, 1/2) in 1 - u.
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let half = |upper: bool| {
        integrate(
            |p| match integrand_at(d, w, kind, p, upper) {
                Ok(v) => v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            },
            0.0,
            0.5,
            &options.quadrature,
        )
    };
    let lower = half(false);
    let upper = lower.as_ref().ok().map(|_| half(true));
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    let endpoint_overflow = |r: Result<IntegrationResult>| match r {
        Err(Error::Integrand { u, value }) if u < ENDPOINT_OVERFLOW_ZONE => Err(Error::Divergence {
            what: format!("E[{kind}] for {d} with weight {w} (integrand {value} at distance {u:e} from an endpoint)"),
            estimate: f64::INFINITY,
            error_estimate: f64::INFINITY,
        }),
        other => other,
    };
    let lower = endpoint_overflow(lower)?;
    let upper = endpoint_overflow(upper.expect("lower half succeeded"))?;
    let value = lower.value + upper.value;
    let abs_error_estimate = lower.abs_error_estimate + upper.abs_error_estimate;
    let result = IntegrationResult {
        value,
        abs_error_estimate,
        subdivisions: lower.subdivisions + upper.subdivisions,
        converged: lower.converged
            && upper.converged
            && abs_error_estimate <= options.quadrature.tolerance_for(value),
    };
    if !result.converged {
        return Err(Error::Divergence {
            what: format!("E[{kind}] for {d} with weight {w}"),
            estimate: result.value,
            error_estimate: result.abs_error_estimate,
        });
    }
    Ok(result)
}

/// `-1/2 ∏ E_k^{p_k}`; the error bound is first order in each factor's
/// quadrature error.
fn combine(factors: Vec<Factor>, powers: &[u32]) -> MeasureValue {
    let terms: Vec<(f64, f64)> = factors
        .iter()
        .zip(powers)
        .flat_map(|(f, &p)| {
            std::iter::repeat_n((f.result.value, f.result.abs_error_estimate), p as usize)
        })
        .collect();
    // Index order, sign applied once.
    let product = terms.iter().fold(1.0, |acc, &(v, _)| acc * v);
    let err: f64 = (0..terms.len())
        .map(|k| {
            let others = terms
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != k)
                .fold(1.0, |acc, (_, &(v, _))| acc * v.abs());
            terms[k].1 * others
        })
        .sum();
    MeasureValue {
        value: -0.5 * product,
        abs_error_estimate: 0.5 * err,
        factors,
    }
}

fn single_factor(
    d: &Distribution,
    w: &WeightFunction,
    kind: IntegrandKind,
    options: &MeasureOptions,
) -> Result<MeasureValue> {
    let result = expectation(d, w, kind, options)?;
    Ok(combine(vec![Factor { kind, result }], &[1]))
}

/// Weighted extropy `J^w(X) = -1/2 E[w(F⁻¹(U)) f(F⁻¹(U))]`.
pub fn gwj(d: &Distribution, w: &WeightFunction) -> Result<MeasureValue> {
    single_factor(d, w, IntegrandKind::WeightedDensity, &MeasureOptions::default())
}

/// GWCPJ (`Past`) or GWCRJ (`Residual`) of a single variable.
pub fn gw_cumulative(d: &Distribution, w: &WeightFunction, variant: Variant) -> Result<MeasureValue> {
    gw_cumulative_with(d, w, variant, &MeasureOptions::default())
}

pub fn gw_cumulative_with(
    d: &Distribution,
    w: &WeightFunction,
    variant: Variant,
    options: &MeasureOptions,
) -> Result<MeasureValue> {
    let kind = match variant {
        Variant::Past => IntegrandKind::Lambda,
        Variant::Residual => IntegrandKind::Delta,
    };
    single_factor(d, w, kind, options).map_err(|e| name_divergence(e, &format!("{variant} extropy")))
}

pub fn gw_design_measure(d: &Distribution, w: &WeightFunction, spec: &MeasureSpec) -> Result<MeasureValue> {
    gw_design_measure_with(d, w, spec, &MeasureOptions::default())
}

pub fn gw_design_measure_with(
    d: &Distribution,
    w: &WeightFunction,
    spec: &MeasureSpec,
    options: &MeasureOptions,
) -> Result<MeasureValue> {
    let spec = MeasureSpec::new(spec.variant, spec.design, spec.n)?;
    match (spec.variant, spec.design) {
        (MeasureVariant::WeightedExtropy, _) => {
            single_factor(d, w, IntegrandKind::WeightedDensity, options)
        }
        (variant, Design::Single | Design::Srs) => {
            let kind = if variant == MeasureVariant::Past {
                IntegrandKind::Lambda
            } else {
                IntegrandKind::Delta
            };
            let result = expectation(d, w, kind, options)
                .map_err(|e| name_divergence(e, &format!("{variant} extropy ({})", spec.design)))?;
            Ok(combine(vec![Factor { kind, result }], &[spec.n]))
        }
        (variant, design) => {
            let mut factors = Vec::with_capacity(spec.n as usize);
            for i in 1..=spec.n {
                let kind = if design == Design::MaxRssu {
                    IntegrandKind::Psi(i)
                } else {
                    IntegrandKind::Phi(i)
                };
                let result = expectation(d, w, kind, options)
                    .map_err(|e| name_divergence(e, &format!("{variant} extropy ({design}) factor i={i}")))?;
                factors.push(Factor { kind, result });
            }
            let powers = vec![1; factors.len()];
            Ok(combine(factors, &powers))
        }
    }
}

fn name_divergence(e: Error, label: &str) -> Error {
    match e {
        Error::Divergence {
            what,
            estimate,
            error_estimate,
        } => Error::Divergence {
            what: format!("{label}: {what}"),
            estimate,
            error_estimate,
        },
        other => other,
    }
}
