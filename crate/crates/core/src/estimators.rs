//! Empirical estimators of GWCPJ and GWCRJ under a power weight `w(x) = x^m`.
//!
//! Both estimators sum over consecutive order statistics,
//!
//! ```text
//! -1/(2(m+1)) Σ_{i=1}^{n-1} (x_{i+1}^{m+1} - x_i^{m+1}) · G_i
//! ```
//!
//! with `G_i = (i/n)²` (past) or `(1 - i/n)²` (residual) for the step
//! estimator, and the same with the kernel-smoothed cdf `F_h` in place of
//! `i/n` for the kernel estimator.
//!
//! `F_h` is evaluated at the midpoint of each gap by default
//! ([`KernelAnchor::Midpoint`]). As `h → 0` it then tends to the step value
//! `i/n` on that gap. Evaluating at the datum itself ([`KernelAnchor::Datum`])
//! tends to `(i - ½)/n` instead, because the integrated kernel is ½ at its
//! own centre.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use statrs::function::erf::erfc;

use crate::design::Variant;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum EstimatorStyle {
    #[default]
    Step,
    Kernel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Kernel {
    #[default]
    Gaussian,
    Epanechnikov,
}

impl Kernel {
    /// Integrated kernel `L(t) = ∫_{-∞}^t K`.
    pub fn integrated(self, t: f64) -> f64 {
        match self {
            Kernel::Gaussian => 0.5 * erfc(-t / std::f64::consts::SQRT_2),
            Kernel::Epanechnikov => {
                if t <= -1.0 {
                    0.0
                } else if t >= 1.0 {
                    1.0
                } else {
                    (0.5 + 0.75 * t - 0.25 * t * t * t).clamp(0.0, 1.0)
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum KernelAnchor {
    /// `F_h((x_i + x_{i+1}) / 2)`.
    #[default]
    Midpoint,
    /// `F_h(x_i)`.
    Datum,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Bandwidth {
    Fixed(f64),
    #[default]
    Silverman,
}

impl Serialize for Bandwidth {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Bandwidth::Fixed(h) => s.serialize_f64(*h),
            Bandwidth::Silverman => s.serialize_str("silverman"),
        }
    }
}

impl fmt::Display for Bandwidth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bandwidth::Fixed(h) => write!(f, "{h}"),
            Bandwidth::Silverman => f.write_str("silverman"),
        }
    }
}

impl FromStr for Bandwidth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("silverman") {
            return Ok(Bandwidth::Silverman);
        }
        let h: f64 = t
            .parse()
            .map_err(|e| Error::parse("bandwidth", s, format!("{e}")))?;
        if h > 0.0 && h.is_finite() {
            Ok(Bandwidth::Fixed(h))
        } else {
            Err(Error::Bandwidth(format!("bandwidth must be positive, got {h}")))
        }
    }
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gaussian" => Ok(Kernel::Gaussian),
            "epanechnikov" => Ok(Kernel::Epanechnikov),
            _ => Err(Error::parse("kernel", s, "expected gaussian|epanechnikov")),
        }
    }
}

impl FromStr for EstimatorStyle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "step" => Ok(EstimatorStyle::Step),
            "kernel" => Ok(EstimatorStyle::Kernel),
            _ => Err(Error::parse("estimator style", s, "expected step|kernel")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimatorConfig {
    pub variant: Variant,
    pub m: f64,
    pub style: EstimatorStyle,
    pub kernel: Kernel,
    pub bandwidth: Bandwidth,
    pub anchor: KernelAnchor,
    /// Adds the `[0, x_{1:n})` segment, `-x_{1:n}^{m+1}/(2(m+1))`, to the
    /// residual estimate.
    pub include_head: bool,
}

impl EstimatorConfig {
    pub fn step(variant: Variant, m: f64) -> Self {
        EstimatorConfig {
            variant,
            m,
            style: EstimatorStyle::Step,
            kernel: Kernel::default(),
            bandwidth: Bandwidth::default(),
            anchor: KernelAnchor::default(),
            include_head: false,
        }
    }

    pub fn kernel(variant: Variant, m: f64, kernel: Kernel, bandwidth: Bandwidth) -> Self {
        EstimatorConfig {
            style: EstimatorStyle::Kernel,
            kernel,
            bandwidth,
            ..EstimatorConfig::step(variant, m)
        }
    }

    pub fn with_anchor(mut self, anchor: KernelAnchor) -> Self {
        self.anchor = anchor;
        self
    }

    pub fn with_head(mut self, include_head: bool) -> Self {
        self.include_head = include_head;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m > 0.0 && self.m.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "weight exponent must be positive, got {}",
                self.m
            )));
        }
        if let Bandwidth::Fixed(h) = self.bandwidth {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::Bandwidth(format!("bandwidth must be positive, got {h}")));
            }
        }
        Ok(())
    }
}

/// Validated observations in ascending order.
fn prepare(sample: &[f64]) -> Result<Vec<f64>> {
    if sample.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: sample.len(),
        });
    }
    if let Some(&bad) = sample.iter().find(|x| !(**x >= 0.0 && x.is_finite())) {
        return Err(Error::Domain {
            what: "observation (power weight needs finite x >= 0)",
            value: bad,
        });
    }
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    Ok(xs)
}

fn power(x: f64, p: f64) -> f64 {
    if p.fract() == 0.0 && p.abs() < i32::MAX as f64 {
        x.powi(p as i32)
    } else {
        x.powf(p)
    }
}

/// Sums over gaps with cdf level `level(i)` for gap `[x_i, x_{i+1}]`.
fn gap_sum(xs: &[f64], cfg: &EstimatorConfig, level: impl Fn(usize) -> f64) -> f64 {
    let p = cfg.m + 1.0;
    let mut total = 0.0;
    for i in 1..xs.len() {
        let f = level(i);
        let g = match cfg.variant {
            Variant::Past => f * f,
            Variant::Residual => (1.0 - f) * (1.0 - f),
        };
        total += (power(xs[i], p) - power(xs[i - 1], p)) * g;
    }
    let mut value = -total / (2.0 * p);
    if cfg.include_head && cfg.variant == Variant::Residual {
        value -= power(xs[0], p) / (2.0 * p);
    }
    value
}

pub fn step_estimate(sample: &[f64], cfg: &EstimatorConfig) -> Result<f64> {
    cfg.validate()?;
    let xs = prepare(sample)?;
    let n = xs.len() as f64;
    Ok(gap_sum(&xs, cfg, |i| i as f64 / n))
}

/// `F_h(x) = (1/n) Σ L((x - X_i)/h)`.
pub fn smoothed_cdf(sample: &[f64], kernel: Kernel, h: f64, x: f64) -> Result<f64> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Bandwidth(format!("bandwidth must be positive, got {h}")));
    }
    if sample.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let s: f64 = sample.iter().map(|xi| kernel.integrated((x - xi) / h)).sum();
    Ok((s / sample.len() as f64).clamp(0.0, 1.0))
}

/// Silverman's rule of thumb `1.06 · s · n^{-1/5}`.
pub fn silverman_rule(std_dev: f64, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::Bandwidth(format!("silverman rule needs n >= 2, got {n}")));
    }
    if !(std_dev > 0.0 && std_dev.is_finite()) {
        return Err(Error::Bandwidth(format!(
            "silverman rule needs a positive standard deviation, got {std_dev}"
        )));
    }
    Ok(1.06 * std_dev * (n as f64).powf(-0.2))
}

/// Silverman bandwidth with the `n - 1` sample standard deviation.
pub fn bandwidth_silverman(sample: &[f64]) -> Result<f64> {
    let n = sample.len();
    if n < 2 {
        return Err(Error::Bandwidth(format!("silverman rule needs n >= 2, got {n}")));
    }
    let mean = sample.iter().sum::<f64>() / n as f64;
    let ss: f64 = sample.iter().map(|x| (x - mean) * (x - mean)).sum();
    silverman_rule((ss / (n - 1) as f64).sqrt(), n)
}

pub fn resolve_bandwidth(sample: &[f64], bandwidth: Bandwidth) -> Result<f64> {
    match bandwidth {
        Bandwidth::Fixed(h) if h > 0.0 && h.is_finite() => Ok(h),
        Bandwidth::Fixed(h) => Err(Error::Bandwidth(format!("bandwidth must be positive, got {h}"))),
        Bandwidth::Silverman => bandwidth_silverman(sample),
    }
}

pub fn kernel_estimate(sample: &[f64], cfg: &EstimatorConfig) -> Result<f64> {
    cfg.validate()?;
    let xs = prepare(sample)?;
    let h = resolve_bandwidth(&xs, cfg.bandwidth)?;
    let levels = (1..xs.len())
        .map(|i| {
            let at = match cfg.anchor {
                KernelAnchor::Midpoint => 0.5 * (xs[i - 1] + xs[i]),
                KernelAnchor::Datum => xs[i - 1],
            };
            smoothed_cdf(&xs, cfg.kernel, h, at)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(gap_sum(&xs, cfg, |i| levels[i - 1]))
}

/// Dispatches on `cfg.style`.
pub fn estimate(sample: &[f64], cfg: &EstimatorConfig) -> Result<f64> {
    match cfg.style {
        EstimatorStyle::Step => step_estimate(sample, cfg),
        EstimatorStyle::Kernel => kernel_estimate(sample, cfg),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn step(v: Variant, xs: &[f64]) -> f64 {
        step_estimate(xs, &EstimatorConfig::step(v, 1.0)).unwrap()
    }

    // -½ ∫ x · G(F̂(x)) dx over [x_1, x_n] by midpoint rule on a fine grid.
    fn integrated_step(v: Variant, xs: &[f64]) -> f64 {
        let n = xs.len() as f64;
        let (lo, hi) = (xs[0], xs[xs.len() - 1]);
        let cells = 200_000;
        let dx = (hi - lo) / cells as f64;
        let mut total = 0.0;
        for k in 0..cells {
            let x = lo + (k as f64 + 0.5) * dx;
            let f = xs.iter().filter(|&&xi| xi <= x).count() as f64 / n;
            let g = match v {
                Variant::Past => f * f,
                Variant::Residual => (1.0 - f) * (1.0 - f),
            };
            total += x * g * dx;
        }
        -0.5 * total
    }

    #[test]
    fn step_hand_values() {
        assert!((step(Variant::Past, &[1.0, 2.0]) + 3.0 / 16.0).abs() < 1e-12);
        assert!((step(Variant::Residual, &[1.0, 2.0]) + 3.0 / 16.0).abs() < 1e-12);
        assert!((step(Variant::Past, &[0.0, 1.0, 2.0]) + 13.0 / 36.0).abs() < 1e-12);
        assert!((step(Variant::Residual, &[0.0, 1.0, 2.0]) + 7.0 / 36.0).abs() < 1e-12);
    }

    #[test]
    fn step_matches_integrated_step_cdf() {
        let xs = [0.0, 1.0, 2.0];
        for v in [Variant::Past, Variant::Residual] {
            assert!((step(v, &xs) - integrated_step(v, &xs)).abs() < 1e-8);
        }
    }

    #[test]
    fn step_ignores_input_order() {
        assert_eq!(step(Variant::Past, &[2.0, 0.0, 1.0]), step(Variant::Past, &[0.0, 1.0, 2.0]));
    }

    #[test]
    fn step_rejects_bad_samples() {
        let cfg = EstimatorConfig::step(Variant::Past, 1.0);
        assert!(matches!(step_estimate(&[1.0], &cfg), Err(Error::InsufficientData { .. })));
        assert!(matches!(step_estimate(&[-1.0, 1.0], &cfg), Err(Error::Domain { .. })));
        assert!(matches!(step_estimate(&[f64::NAN, 1.0], &cfg), Err(Error::Domain { .. })));
        let bad_m = EstimatorConfig::step(Variant::Past, 0.0);
        assert!(step_estimate(&[1.0, 2.0], &bad_m).is_err());
    }

    #[test]
    fn head_term_only_touches_residual() {
        let xs = [1.0, 2.0];
        let past = EstimatorConfig::step(Variant::Past, 1.0).with_head(true);
        assert_eq!(step_estimate(&xs, &past).unwrap(), step(Variant::Past, &xs));
        let res = EstimatorConfig::step(Variant::Residual, 1.0).with_head(true);
        let v = step_estimate(&xs, &res).unwrap();
        assert!((v - (-3.0 / 16.0 - 0.25)).abs() < 1e-15);
    }

    #[test]
    fn smoothed_cdf_examples() {
        assert_eq!(smoothed_cdf(&[0.0], Kernel::Gaussian, 1.0, 0.0).unwrap(), 0.5);
        for h in [0.1, 1.0, 7.0] {
            let v = smoothed_cdf(&[-1.0, 1.0], Kernel::Gaussian, h, 0.0).unwrap();
            assert!((v - 0.5).abs() < 1e-15);
        }
        assert!((smoothed_cdf(&[0.0], Kernel::Gaussian, 1.0, 10.0).unwrap() - 1.0).abs() < 1e-9);
        assert!(smoothed_cdf(&[0.0], Kernel::Gaussian, 0.0, 0.0).is_err());
    }

    #[test]
    fn epanechnikov_integrated_kernel() {
        let k = Kernel::Epanechnikov;
        assert_eq!(k.integrated(-1.0), 0.0);
        assert_eq!(k.integrated(0.0), 0.5);
        assert_eq!(k.integrated(1.0), 1.0);
        assert!((k.integrated(0.5) - (0.5 + 0.375 - 0.03125)).abs() < 1e-15);
    }

    #[test]
    fn kernel_small_bandwidth_approaches_step() {
        for k in [Kernel::Gaussian, Kernel::Epanechnikov] {
            let cfg = EstimatorConfig::kernel(Variant::Past, 1.0, k, Bandwidth::Fixed(1e-6));
            assert!((kernel_estimate(&[1.0, 2.0], &cfg).unwrap() + 3.0 / 16.0).abs() < 1e-3);
            let cfg = EstimatorConfig::kernel(Variant::Residual, 1.0, k, Bandwidth::Fixed(1e-6));
            assert!((kernel_estimate(&[0.0, 1.0, 2.0], &cfg).unwrap() + 7.0 / 36.0).abs() < 1e-3);
        }
    }

    #[test]
    fn epanechnikov_is_exact_below_half_gap() {
        let cfg = EstimatorConfig::kernel(Variant::Residual, 1.0, Kernel::Epanechnikov, Bandwidth::Fixed(0.4));
        assert_eq!(kernel_estimate(&[0.0, 1.0, 2.0], &cfg).unwrap(), step(Variant::Residual, &[0.0, 1.0, 2.0]));
    }

    #[test]
    fn datum_anchor_tends_to_half_step() {
        let cfg = EstimatorConfig::kernel(Variant::Past, 1.0, Kernel::Gaussian, Bandwidth::Fixed(1e-6))
            .with_anchor(KernelAnchor::Datum);
        assert!((kernel_estimate(&[1.0, 2.0], &cfg).unwrap() + 3.0 / 64.0).abs() < 1e-12);
    }

    #[test]
    fn kernel_golden_values_at_half_bandwidth() {
        // [1, 2], m = 1, past, gaussian, h = 0.5.
        // Midpoint: F_h(1.5) = (Φ(1) + Φ(-1))/2 = 1/2, so -1/4 · 3 · 1/4.
        let mid = EstimatorConfig::kernel(Variant::Past, 1.0, Kernel::Gaussian, Bandwidth::Fixed(0.5));
        let v = kernel_estimate(&[1.0, 2.0], &mid).unwrap();
        assert!((v + 0.1875).abs() < 1e-15);
        // Datum: F_h(1) = (1/2 + Φ(-2))/2 with Φ(-2) = 0.022750131948179195.
        let f: f64 = (0.5 + 0.022_750_131_948_179_21) / 2.0;
        let v = kernel_estimate(&[1.0, 2.0], &mid.with_anchor(KernelAnchor::Datum)).unwrap();
        assert!((v + 0.75 * f * f).abs() < 1e-12, "{v}");
        assert!((v + 0.051_237_693_834_719_77).abs() < 1e-12, "{v}");
    }

    #[test]
    fn silverman_examples() {
        // 1.06 · 100^{-1/5} = 0.42199360...; the rounded 0.42198 is 1.4e-5 away.
        let h1 = silverman_rule(1.0, 100).unwrap();
        assert!((h1 - 0.421_993_600_786_707).abs() < 1e-14, "{h1}");
        assert!((h1 - 0.42198).abs() < 5e-5);
        assert_eq!(silverman_rule(2.0, 100).unwrap(), 2.0 * h1);
        assert!(silverman_rule(1.0, 1).is_err());
        assert!(matches!(bandwidth_silverman(&[3.0, 3.0, 3.0]), Err(Error::Bandwidth(_))));
        let xs = [1.0, 2.0, 3.0, 4.0];
        let s = (5.0f64 / 3.0).sqrt();
        assert!((bandwidth_silverman(&xs).unwrap() - 1.06 * s * 4f64.powf(-0.2)).abs() < 1e-15);
    }

    #[test]
    fn silverman_kernel_rejects_constant_sample() {
        let cfg = EstimatorConfig::kernel(Variant::Past, 1.0, Kernel::Gaussian, Bandwidth::Silverman);
        assert!(matches!(kernel_estimate(&[2.0, 2.0], &cfg), Err(Error::Bandwidth(_))));
    }

    #[test]
    fn bandwidth_parsing() {
        assert_eq!("silverman".parse::<Bandwidth>().unwrap(), Bandwidth::Silverman);
        assert_eq!("0.25".parse::<Bandwidth>().unwrap(), Bandwidth::Fixed(0.25));
        assert!("-1".parse::<Bandwidth>().is_err());
        assert!("wide".parse::<Bandwidth>().is_err());
    }

    fn sample_strategy() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0f64..10.0, 2..40)
    }

    proptest! {
        #[test]
        fn estimates_are_nonpositive(xs in sample_strategy(), m in 0.1f64..4.0, h in 1e-3f64..5.0) {
            for v in [Variant::Past, Variant::Residual] {
                prop_assert!(step_estimate(&xs, &EstimatorConfig::step(v, m)).unwrap() <= 0.0);
                let cfg = EstimatorConfig::kernel(v, m, Kernel::Gaussian, Bandwidth::Fixed(h));
                prop_assert!(kernel_estimate(&xs, &cfg).unwrap() <= 0.0);
            }
        }

        #[test]
        fn doubling_scales_step_by_four(xs in prop::collection::vec(0.0f64..100.0, 2..50)) {
            let doubled: Vec<f64> = xs.iter().map(|x| 2.0 * x).collect();
            for v in [Variant::Past, Variant::Residual] {
                let a = step(v, &xs);
                let b = step(v, &doubled);
                prop_assert!((b - 4.0 * a).abs() <= 1e-12 * a.abs().max(1e-300));
            }
        }

        #[test]
        fn smoothed_cdf_is_monotone(xs in sample_strategy(), h in 1e-3f64..5.0) {
            for k in [Kernel::Gaussian, Kernel::Epanechnikov] {
                let mut prev = 0.0;
                for j in 0..200 {
                    let x = -5.0 + 0.1 * j as f64;
                    let f = smoothed_cdf(&xs, k, h, x).unwrap();
                    prop_assert!((0.0..=1.0).contains(&f));
                    prop_assert!(f >= prev);
                    prev = f;
                }
            }
        }

        #[test]
        fn kernel_gap_shrinks_with_bandwidth(xs in prop::collection::vec(0.0f64..1.0, 5..60)) {
            for v in [Variant::Past, Variant::Residual] {
                let s = step(v, &xs);
                let gaps: Vec<f64> = [1e-2, 1e-4, 1e-6]
                    .iter()
                    .map(|&h| {
                        let cfg = EstimatorConfig::kernel(v, 1.0, Kernel::Gaussian, Bandwidth::Fixed(h));
                        (kernel_estimate(&xs, &cfg).unwrap() - s).abs()
                    })
                    .collect();
                prop_assert!(gaps[1] <= gaps[0] + 1e-15 && gaps[2] <= gaps[1] + 1e-15, "{:?}", gaps);
            }
        }
    }
}
