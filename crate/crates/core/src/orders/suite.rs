//! Hypothesis-gated checks of the comparison, dominance and monotonicity
//! results.
//!
//! Each check evaluates its hypotheses on a grid first, then the conclusion
//! inequality `lhs ≥ rhs` through the measures module, reported as the
//! margin `lhs - rhs`. A report only reads `violated` when every hypothesis
//! passed and the conclusion margin is below `-HYPOTHESIS_BAND`.
//!
//! Divergent measures take the value `-∞`. Two divergent sides compare equal
//! with margin 0, and a divergent right-hand side gives margin `+∞`.

use serde::{Serialize, Serializer};

use super::{check_order, density_condition_at_origin, OrderKind, ORDER_SLACK};
use crate::design::{Design, Variant};
use crate::distributions::{support_grid, Distribution, Transformation};
use crate::error::{Error, Result};
use crate::measures::{expectation, gw_design_measure_with, IntegrandKind, MeasureOptions, MeasureSpec};
use crate::weights::WeightFunction;

/// Margins in `[-HYPOTHESIS_BAND, -ORDER_SLACK)` are inconclusive.
pub const HYPOTHESIS_BAND: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TheoremId {
    /// GWCPJ of single variables under the dispersive order.
    PastDispersive,
    /// GWCRJ of single variables under the dispersive order.
    ResidualDispersive,
    PsiSrs,
    PsiMaxRssu,
    PsiMinRssu,
    MaxRssuDominatesSrs,
    MinRssuDominatesSrs,
    MaxRssuDispersive,
    MinRssuDispersive,
    MinRssuMonotone,
    MaxRssuMonotone,
}

impl TheoremId {
    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::PastDispersive => "T2.1",
            TheoremId::ResidualDispersive => "T2.2",
            TheoremId::PsiSrs => "T3.ψ",
            TheoremId::PsiMaxRssu => "T4.max-ψ",
            TheoremId::PsiMinRssu => "T4.min-ψ",
            TheoremId::MaxRssuDominatesSrs => "T4.max≥SRS",
            TheoremId::MinRssuDominatesSrs => "T4.min≥SRS",
            TheoremId::MaxRssuDispersive => "T5.1",
            TheoremId::MinRssuDispersive => "T5.3",
            TheoremId::MinRssuMonotone => "T6.min-mono",
            TheoremId::MaxRssuMonotone => "T6.max-mono",
        }
    }
}

impl Serialize for TheoremId {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// Finite values as numbers, the rest as `"inf"`, `"-inf"` or `"nan"`.
fn extended<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if v.is_nan() {
        s.serialize_str("nan")
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportStatus {
    Verified,
    Violated,
    HypothesesNotMet,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Outcome {
    Pass,
    Inconclusive,
    Fail,
}

fn classify(margin: f64) -> Outcome {
    if margin >= -ORDER_SLACK {
        Outcome::Pass
    } else if margin >= -HYPOTHESIS_BAND {
        Outcome::Inconclusive
    } else {
        Outcome::Fail
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub inconclusive: bool,
    #[serde(serialize_with = "extended")]
    pub margin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn from_margin(name: impl Into<String>, margin: f64) -> Self {
        let outcome = classify(margin);
        Check {
            name: name.into(),
            passed: outcome == Outcome::Pass,
            inconclusive: outcome == Outcome::Inconclusive,
            margin,
            detail: None,
        }
    }

    fn flag(name: impl Into<String>, passed: bool) -> Self {
        Check::from_margin(name, if passed { 0.0 } else { f64::NEG_INFINITY })
    }

    fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremReport {
    pub theorem_id: TheoremId,
    pub case: String,
    pub hypotheses_checked: Vec<Check>,
    pub conclusion_checks: Vec<Check>,
    #[serde(serialize_with = "extended")]
    pub conclusion_margin: f64,
    pub status: ReportStatus,
    pub passed: bool,
    pub notes: Vec<String>,
}

impl TheoremReport {
    fn assemble(
        theorem_id: TheoremId,
        case: String,
        hypotheses_checked: Vec<Check>,
        conclusion_checks: Vec<Check>,
        mut notes: Vec<String>,
    ) -> Self {
        let conclusion_margin = conclusion_checks
            .iter()
            .map(|c| c.margin)
            .fold(f64::INFINITY, |acc, m| if m.is_nan() || acc.is_nan() { f64::NAN } else { acc.min(m) });
        let hypotheses_failed = hypotheses_checked.iter().any(|h| !h.passed && !h.inconclusive);
        let hypotheses_unsure = hypotheses_checked.iter().any(|h| h.inconclusive);
        let status = if hypotheses_failed {
            notes.push("conclusion computed but not asserted: hypotheses not met".into());
            ReportStatus::HypothesesNotMet
        } else if hypotheses_unsure {
            ReportStatus::Inconclusive
        } else {
            match classify(conclusion_margin) {
                Outcome::Pass => ReportStatus::Verified,
                Outcome::Inconclusive => ReportStatus::Inconclusive,
                Outcome::Fail => ReportStatus::Violated,
            }
        };
        TheoremReport {
            theorem_id,
            case,
            hypotheses_checked,
            conclusion_checks,
            conclusion_margin,
            status,
            passed: status == ReportStatus::Verified,
            notes,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub grid_points: usize,
    pub measure: MeasureOptions,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            grid_points: 199,
            measure: MeasureOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ComparisonCase {
    pub x: Distribution,
    pub y: Distribution,
    pub w1: WeightFunction,
    pub w2: WeightFunction,
    pub n: u32,
}

impl ComparisonCase {
    /// Same weight on both sides.
    pub fn new(x: Distribution, y: Distribution, w: WeightFunction, n: u32) -> Self {
        ComparisonCase {
            x,
            y,
            w1: w.clone(),
            w2: w,
            n,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TransformCase {
    pub x: Distribution,
    pub psi: Transformation,
    pub w: WeightFunction,
    pub n: u32,
}

#[derive(Debug, Clone)]
pub enum SuiteRow {
    Comparison(TheoremId, ComparisonCase),
    Transform(TheoremId, TransformCase),
    Dominance(TheoremId, Distribution, WeightFunction, u32),
    Monotone(TheoremId, Distribution, WeightFunction, u32),
}

fn measure_or_divergent(
    d: &Distribution,
    w: &WeightFunction,
    variant: Variant,
    design: Design,
    n: u32,
    options: &MeasureOptions,
) -> Result<f64> {
    let spec = MeasureSpec::new(variant.into(), design, n)?;
    match gw_design_measure_with(d, w, &spec, options) {
        Ok(v) => Ok(v.value),
        Err(e) if e.is_divergence() => Ok(f64::NEG_INFINITY),
        Err(e) => Err(e),
    }
}

/// `lhs - rhs` over the extended reals.
fn margin(lhs: f64, rhs: f64, notes: &mut Vec<String>) -> f64 {
    if lhs == rhs {
        if lhs.is_infinite() {
            notes.push("both sides diverge to -inf; treated as equal".into());
        }
        0.0
    } else {
        if lhs.is_infinite() || rhs.is_infinite() {
            notes.push(format!("divergent side: lhs = {lhs}, rhs = {rhs}"));
        }
        lhs - rhs
    }
}

fn merged_grid(a: &Distribution, b: &Distribution, points: usize) -> Result<Vec<f64>> {
    let mut xs = support_grid(a, points)?;
    xs.extend(support_grid(b, points)?);
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    Ok(xs)
}

fn weight_values(w: &WeightFunction, xs: &[f64]) -> Result<Vec<f64>> {
    xs.iter().map(|&x| w.eval(x)).collect()
}

fn smallest(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(f64::INFINITY, f64::min)
}

fn comparison_design(theorem: TheoremId, n: u32) -> Result<(Variant, Design, u32)> {
    Ok(match theorem {
        TheoremId::PastDispersive => (Variant::Past, Design::Single, 1),
        TheoremId::ResidualDispersive => (Variant::Residual, Design::Single, 1),
        TheoremId::MaxRssuDispersive => (Variant::Past, Design::MaxRssu, n),
        TheoremId::MinRssuDispersive => (Variant::Residual, Design::MinRssu, n),
        other => {
            return Err(Error::InvalidParameter(format!(
                "{} is not a dispersive comparison",
                other.as_str()
            )))
        }
    })
}

fn dispersive_hypothesis(dx: &Distribution, dy: &Distribution, grid: usize, allow_shape_route: bool) -> Result<Check> {
    let direct = check_order(OrderKind::Disp, dx, dy, grid)?;
    let check = Check::from_margin("X <=disp Y", direct.worst_violation);
    if check.passed || !allow_shape_route || !density_condition_at_origin(dx, dy) {
        return Ok(check);
    }
    for kind in [OrderKind::Superadditive, OrderKind::Star, OrderKind::ConvexTransform] {
        let v = check_order(kind, dx, dy, grid)?;
        if v.holds_x_le_y {
            return Ok(Check::from_margin("X <=disp Y", v.worst_violation)
                .with_detail(format!("implied by the {kind} order with f(0) >= g(0) > 0")));
        }
    }
    Ok(check)
}

/// Dispersive comparison of `X` and `Y`: with `w1` decreasing, `w1 ≤ w2`,
/// `X ≤_disp Y` and a common finite right endpoint, the measure of `X`
/// under `w1` is at least that of `Y` under `w2`.
pub fn check_comparison(theorem: TheoremId, case: &ComparisonCase, cfg: &SuiteConfig) -> Result<TheoremReport> {
    let (variant, design, n) = comparison_design(theorem, case.n)?;
    let ComparisonCase { x, y, w1, w2, .. } = case;
    let label = format!("X={x} Y={y} w1={w1} w2={w2} n={n}");
    let mut notes = Vec::new();
    let mut hyps = vec![Check::from_margin(
        "X and Y nonnegative",
        x.support_lower().min(y.support_lower()),
    )];

    let (ux, uy) = (x.support_upper(), y.support_upper());
    let mut endpoint = Check::flag("equal finite right endpoints", ux == uy && ux.is_finite());
    if !endpoint.passed {
        endpoint = endpoint.with_detail(format!("u_X = {ux}, u_Y = {uy}"));
        notes.push("pair lies beyond the stated hypotheses".into());
    }
    hyps.push(endpoint);

    if hyps[0].passed {
        let xs = merged_grid(x, y, cfg.grid_points)?;
        let v1 = weight_values(w1, &xs)?;
        let v2 = weight_values(w2, &xs)?;
        hyps.push(Check::from_margin(
            "w1 decreasing",
            smallest(v1.windows(2).map(|p| p[0] - p[1])),
        ));
        hyps.push(Check::from_margin(
            "w1 <= w2",
            smallest(v1.iter().zip(&v2).map(|(a, b)| b - a)),
        ));
    }
    let shape_route = matches!(theorem, TheoremId::MaxRssuDispersive | TheoremId::MinRssuDispersive);
    hyps.push(dispersive_hypothesis(x, y, cfg.grid_points, shape_route)?);

    let lhs = measure_or_divergent(x, w1, variant, design, n, &cfg.measure)?;
    let rhs = measure_or_divergent(y, w2, variant, design, n, &cfg.measure)?;
    let conclusion = Check::from_margin(
        format!("{variant} {design} of X under w1 >= of Y under w2"),
        margin(lhs, rhs, &mut notes),
    );
    Ok(TheoremReport::assemble(theorem, label, hyps, vec![conclusion], notes))
}

/// `Y = ψ(X)`: `w(ψ(x))ψ'(x) ≥ w(x)` orders the measures of `X` above those
/// of `Y`, and `≤` reverses it.
pub fn check_transform(theorem: TheoremId, case: &TransformCase, cfg: &SuiteConfig) -> Result<TheoremReport> {
    let (variant, design) = match theorem {
        TheoremId::PsiSrs => (Variant::Past, Design::Srs),
        TheoremId::PsiMaxRssu => (Variant::Past, Design::MaxRssu),
        TheoremId::PsiMinRssu => (Variant::Residual, Design::MinRssu),
        other => {
            return Err(Error::InvalidParameter(format!(
                "{} is not a transformation result",
                other.as_str()
            )))
        }
    };
    let TransformCase { x, psi, w, n } = case;
    let label = format!("X={x} psi={} w={w} n={n}", psi.name());
    let mut notes = Vec::new();
    let mut hyps = vec![
        Check::from_margin("X nonnegative", x.support_lower()),
        Check::flag("psi(0) = 0", psi.psi(0.0) == 0.0),
    ];

    let mut direction = None;
    if hyps[0].passed {
        let xs = support_grid(x, cfg.grid_points)?;
        let min_slope = smallest(xs.iter().map(|&t| psi.psi_prime(t)));
        hyps.push(Check::flag("psi increasing", min_slope > 0.0).with_detail(format!("min psi' = {min_slope:e}")));
        let gaps = xs
            .iter()
            .map(|&t| Ok(w.eval(psi.psi(t))? * psi.psi_prime(t) - w.eval(t)?))
            .collect::<Result<Vec<f64>>>()?;
        let low = smallest(gaps.iter().copied());
        let high = -smallest(gaps.iter().map(|g| -g));
        if low >= -ORDER_SLACK {
            direction = Some(true);
            hyps.push(Check::from_margin("w(psi(x)) psi'(x) >= w(x)", low));
        } else if high <= ORDER_SLACK {
            direction = Some(false);
            hyps.push(Check::from_margin("w(psi(x)) psi'(x) <= w(x)", -high));
        } else {
            hyps.push(
                Check::from_margin("w(psi(x)) psi'(x) one-signed", low.max(-high))
                    .with_detail(format!("difference ranges over [{low:e}, {high:e}]")),
            );
        }
    }

    let y = match (direction, x.transform(psi)) {
        (Some(_), Ok(y)) => y,
        (_, result) => {
            if let Err(e) = result {
                notes.push(format!("Y = psi(X) unavailable: {e}"));
            }
            let c = Check::from_margin("conclusion", f64::NAN);
            return Ok(TheoremReport::assemble(theorem, label, hyps, vec![c], notes));
        }
    };
    let vx = measure_or_divergent(x, w, variant, design, *n, &cfg.measure)?;
    let vy = measure_or_divergent(&y, w, variant, design, *n, &cfg.measure)?;
    let conclusion = if direction == Some(true) {
        Check::from_margin(format!("{variant} {design}: X >= psi(X)"), margin(vx, vy, &mut notes))
    } else {
        Check::from_margin(format!("{variant} {design}: X <= psi(X)"), margin(vy, vx, &mut notes))
    };
    Ok(TheoremReport::assemble(theorem, label, hyps, vec![conclusion], notes))
}

/// The ranked design against SRS of the same size, `n ≥ 2`.
pub fn check_dominance(
    theorem: TheoremId,
    d: &Distribution,
    w: &WeightFunction,
    n: u32,
    cfg: &SuiteConfig,
) -> Result<TheoremReport> {
    let (variant, design) = match theorem {
        TheoremId::MaxRssuDominatesSrs => (Variant::Past, Design::MaxRssu),
        TheoremId::MinRssuDominatesSrs => (Variant::Residual, Design::MinRssu),
        other => {
            return Err(Error::InvalidParameter(format!(
                "{} is not a dominance result",
                other.as_str()
            )))
        }
    };
    let label = format!("X={d} w={w} n={n}");
    let mut notes = Vec::new();
    let hyps = vec![Check::from_margin("n >= 2", n as f64 - 2.0)];
    let ranked = measure_or_divergent(d, w, variant, design, n, &cfg.measure)?;
    let srs = measure_or_divergent(d, w, variant, Design::Srs, n, &cfg.measure)?;
    let conclusion = Check::from_margin(
        format!("{variant}: {design} >= srs"),
        margin(ranked, srs, &mut notes),
    );
    Ok(TheoremReport::assemble(theorem, label, hyps, vec![conclusion], notes))
}

/// Design measure increasing in `n` for `n = 1..=n_max` when
/// `w(F⁻¹(u)) / f(F⁻¹(u)) ≤ 1`, with each successive ratio at most
/// `1/(2n + 3)`.
pub fn check_monotone_in_n(
    theorem: TheoremId,
    d: &Distribution,
    w: &WeightFunction,
    n_max: u32,
    cfg: &SuiteConfig,
) -> Result<TheoremReport> {
    let (design, kind): (Design, fn(u32) -> IntegrandKind) = match theorem {
        TheoremId::MinRssuMonotone => (Design::MinRssu, IntegrandKind::Phi),
        TheoremId::MaxRssuMonotone => (Design::MaxRssu, IntegrandKind::Psi),
        other => {
            return Err(Error::InvalidParameter(format!(
                "{} is not a monotonicity result",
                other.as_str()
            )))
        }
    };
    let label = format!("X={d} w={w} n=1..{n_max}");
    let mut notes = Vec::new();

    let denom = (cfg.grid_points + 1) as f64;
    let mut worst_ratio = f64::NEG_INFINITY;
    for k in 1..=cfg.grid_points {
        let u = k as f64 / denom;
        let r = w.eval(d.quantile(u)?)? / d.pdf_at_quantile(u)?;
        worst_ratio = worst_ratio.max(r);
    }
    let hyps = vec![
        Check::from_margin("n_max >= 2", n_max as f64 - 2.0),
        Check::from_margin("w(F^-1(u)) / f(F^-1(u)) <= 1", 1.0 - worst_ratio),
    ];

    let mut factors = Vec::with_capacity(n_max as usize);
    for i in 1..=n_max {
        factors.push(match expectation(d, w, kind(i), &cfg.measure) {
            Ok(r) => r.value,
            Err(e) if e.is_divergence() => f64::INFINITY,
            Err(e) => return Err(e),
        });
    }
    let mut values = Vec::with_capacity(factors.len());
    let mut product = 1.0;
    for f in &factors {
        product *= f;
        values.push(-0.5 * product);
    }

    let mut conclusions = Vec::new();
    for n in 1..n_max as usize {
        let step = margin(values[n], values[n - 1], &mut notes);
        let mut c = Check::from_margin(format!("{design} n={} > n={n}", n + 1), step);
        if step <= 0.0 && c.passed {
            c = c.with_detail("not strict");
        }
        conclusions.push(c);
        let bound = 1.0 / (2 * n + 3) as f64;
        conclusions.push(Check::from_margin(
            format!("ratio n={} over n={n} <= 1/{}", n + 1, 2 * n + 3),
            bound - factors[n],
        ));
    }
    if conclusions.is_empty() {
        conclusions.push(Check::from_margin("conclusion", f64::NAN));
    }
    Ok(TheoremReport::assemble(theorem, label, hyps, conclusions, notes))
}

pub fn run_theorem_suite(rows: &[SuiteRow], cfg: &SuiteConfig) -> Result<Vec<TheoremReport>> {
    rows.iter()
        .map(|row| match row {
            SuiteRow::Comparison(id, case) => check_comparison(*id, case, cfg),
            SuiteRow::Transform(id, case) => check_transform(*id, case, cfg),
            SuiteRow::Dominance(id, d, w, n) => check_dominance(*id, d, w, *n, cfg),
            SuiteRow::Monotone(id, d, w, n_max) => check_monotone_in_n(*id, d, w, *n_max, cfg),
        })
        .collect()
}

/// The configurations run by `verify` when no rows are supplied.
pub fn default_suite() -> Result<Vec<SuiteRow>> {
    let unif = Distribution::uniform(0.0, 1.0)?;
    let upper_half = Distribution::uniform(0.5, 1.0)?;
    let exp1 = Distribution::exponential(1.0)?;
    let exp_half = Distribution::exponential(0.5)?;
    let decay = WeightFunction::exp_decay(1.0)?;
    let one = WeightFunction::constant(1.0)?;
    let linear = WeightFunction::power(1.0)?;

    let mut rows = Vec::new();
    let comparisons = [
        ComparisonCase::new(upper_half.clone(), unif.clone(), decay.clone(), 3),
        ComparisonCase {
            x: upper_half.clone(),
            y: unif.clone(),
            w1: decay.clone(),
            w2: one,
            n: 3,
        },
        ComparisonCase::new(exp1.clone(), exp_half, decay, 3),
    ];
    for case in comparisons {
        for id in [
            TheoremId::PastDispersive,
            TheoremId::ResidualDispersive,
            TheoremId::MaxRssuDispersive,
            TheoremId::MinRssuDispersive,
        ] {
            rows.push(SuiteRow::Comparison(id, case.clone()));
        }
    }

    for x in [unif.clone(), exp1.clone()] {
        for n in 1..=3 {
            let case = TransformCase {
                x: x.clone(),
                psi: Transformation::exp_minus_one(),
                w: linear.clone(),
                n,
            };
            for id in [TheoremId::PsiSrs, TheoremId::PsiMaxRssu, TheoremId::PsiMinRssu] {
                rows.push(SuiteRow::Transform(id, case.clone()));
            }
        }
    }

    let families = [
        unif.clone(),
        exp1.clone(),
        Distribution::power_survival(2.0)?,
        unif.transform(&Transformation::exp_minus_one())?,
    ];
    for d in &families {
        for m in [1.0, 2.0] {
            let w = WeightFunction::power(m)?;
            for n in 2..=4 {
                rows.push(SuiteRow::Dominance(TheoremId::MaxRssuDominatesSrs, d.clone(), w.clone(), n));
                rows.push(SuiteRow::Dominance(TheoremId::MinRssuDominatesSrs, d.clone(), w.clone(), n));
            }
        }
    }

    rows.push(SuiteRow::Monotone(TheoremId::MinRssuMonotone, unif.clone(), linear.clone(), 5));
    rows.push(SuiteRow::Monotone(TheoremId::MaxRssuMonotone, unif, linear, 5));
    Ok(rows)
}
