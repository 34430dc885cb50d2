//! Grid checks of stochastic orders between two distributions, and the
//! theorem suite built on them.
//!
//! Every check runs on the interior grid `u_k = k / (N + 1)`, with
//! `x_k = F⁻¹(u_k)` and `φ_k = G⁻¹(u_k) = φ(x_k)` for `φ = G⁻¹ ∘ F`. A
//! verdict carries the smallest signed margin seen. It holds when that
//! margin is at least `-ORDER_SLACK`.
//!
//! | kind               | margin at each test point                          |
//! |--------------------|----------------------------------------------------|
//! | `disp`             | `f(F⁻¹(u)) - g(G⁻¹(u))`                            |
//! | `st`               | `G⁻¹(u) - F⁻¹(u)`                                  |
//! | `convex_transform` | increase of the slope of `φ` between grid segments |
//! | `star`             | increase of `φ(x)/x` between grid points           |
//! | `superadditive`    | `F(x + y) - G(φ(x) + φ(y))`                        |
//!
//! The superadditive margin is measured in probability. Because `G` is
//! increasing it has the sign of `φ(x + y) - φ(x) - φ(y)`, and it is exactly
//! zero when a distribution is compared with itself.

mod suite;

pub use suite::{
    check_comparison, check_dominance, check_monotone_in_n, check_transform, default_suite,
    run_theorem_suite, Check, ComparisonCase, ReportStatus, SuiteConfig, SuiteRow, TheoremId,
    TheoremReport, TransformCase,
};

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::distributions::Distribution;
use crate::error::{Error, Result};

/// Violations smaller than this are floating-point equality.
pub const ORDER_SLACK: f64 = 1e-9;

/// Most grid points used on each axis of the superadditive pair grid.
pub const SUPERADDITIVE_AXIS_CAP: usize = 64;

pub const MIN_GRID_POINTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderKind {
    Disp,
    ConvexTransform,
    Star,
    Superadditive,
    St,
}

impl OrderKind {
    pub const ALL: [OrderKind; 5] = [
        OrderKind::Disp,
        OrderKind::ConvexTransform,
        OrderKind::Star,
        OrderKind::Superadditive,
        OrderKind::St,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            OrderKind::Disp => "disp",
            OrderKind::ConvexTransform => "convex_transform",
            OrderKind::Star => "star",
            OrderKind::Superadditive => "superadditive",
            OrderKind::St => "st",
        }
    }

    /// Shape orders that imply `disp` under the density condition at 0.
    pub fn is_shape_order(self) -> bool {
        matches!(
            self,
            OrderKind::ConvexTransform | OrderKind::Star | OrderKind::Superadditive
        )
    }
}

impl fmt::Display for OrderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OrderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OrderKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                Error::parse(
                    "order kind",
                    s,
                    "expected disp|convex_transform|star|superadditive|st",
                )
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderVerdict {
    pub kind: OrderKind,
    #[serde(rename = "holds_X_le_Y")]
    pub holds_x_le_y: bool,
    pub grid: usize,
    pub worst_violation: f64,
}

fn u_grid(points: usize) -> impl Iterator<Item = f64> {
    let denom = (points + 1) as f64;
    (1..=points).map(move |k| k as f64 / denom)
}

fn finite_at(at: f64, value: f64, what: &str) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Evaluation {
            at,
            reason: format!("{what} is {value}"),
        })
    }
}

/// Paired grid `(x_k, φ_k)`, starting at `(lower_X, lower_Y)` when both
/// lower endpoints are finite.
fn quantile_pairs(dx: &Distribution, dy: &Distribution, points: usize, with_origin: bool) -> Result<Vec<(f64, f64)>> {
    let mut pairs = Vec::with_capacity(points + 1);
    if with_origin && dx.support_lower().is_finite() && dy.support_lower().is_finite() {
        pairs.push((dx.support_lower(), dy.support_lower()));
    }
    for u in u_grid(points) {
        let x = finite_at(u, dx.quantile(u)?, "X quantile")?;
        let y = finite_at(u, dy.quantile(u)?, "Y quantile")?;
        pairs.push((x, y));
    }
    Ok(pairs)
}

fn requires_origin(kind: OrderKind, dx: &Distribution, dy: &Distribution) -> Result<()> {
    if dx.support_lower() == 0.0 && dy.support_lower() == 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{kind} check needs both supports to start at 0, got {} and {}",
            dx.support_lower(),
            dy.support_lower()
        )))
    }
}

/// `f(0) ≥ g(0) > 0` with both supports starting at 0: under it each shape
/// order implies the dispersive order.
pub fn density_condition_at_origin(dx: &Distribution, dy: &Distribution) -> bool {
    if dx.support_lower() != 0.0 || dy.support_lower() != 0.0 {
        return false;
    }
    let (f0, g0) = (dx.pdf(0.0), dy.pdf(0.0));
    f0 >= g0 && g0 > 0.0
}

fn smallest(margins: impl Iterator<Item = f64>) -> f64 {
    margins.fold(f64::INFINITY, f64::min)
}

pub fn check_order(kind: OrderKind, dx: &Distribution, dy: &Distribution, grid_points: usize) -> Result<OrderVerdict> {
    if grid_points < MIN_GRID_POINTS {
        return Err(Error::InvalidParameter(format!(
            "order checks need at least {MIN_GRID_POINTS} grid points, got {grid_points}"
        )));
    }
    let mut tested = 0usize;
    let worst = match kind {
        OrderKind::Disp => {
            let mut worst = f64::INFINITY;
            for u in u_grid(grid_points) {
                let f = finite_at(u, dx.pdf_at_quantile(u)?, "X density")?;
                let g = finite_at(u, dy.pdf_at_quantile(u)?, "Y density")?;
                worst = worst.min(f - g);
                tested += 1;
            }
            worst
        }
        OrderKind::St => {
            let pairs = quantile_pairs(dx, dy, grid_points, false)?;
            tested = pairs.len();
            smallest(pairs.iter().map(|&(x, y)| y - x))
        }
        OrderKind::ConvexTransform => {
            requires_origin(kind, dx, dy)?;
            let pairs = quantile_pairs(dx, dy, grid_points, true)?;
            let mut slopes = Vec::with_capacity(pairs.len());
            for w in pairs.windows(2) {
                let ((x0, y0), (x1, y1)) = (w[0], w[1]);
                if x1 <= x0 {
                    return Err(Error::Evaluation {
                        at: x1,
                        reason: "X quantile is not strictly increasing on the grid".into(),
                    });
                }
                slopes.push((y1 - y0) / (x1 - x0));
            }
            tested = slopes.len().saturating_sub(1);
            smallest(slopes.windows(2).map(|s| s[1] - s[0]))
        }
        OrderKind::Star => {
            requires_origin(kind, dx, dy)?;
            let pairs = quantile_pairs(dx, dy, grid_points, false)?;
            let ratios: Vec<f64> = pairs
                .iter()
                .map(|&(x, y)| {
                    if x > 0.0 {
                        Ok(y / x)
                    } else {
                        Err(Error::Evaluation {
                            at: x,
                            reason: "star check needs positive grid points".into(),
                        })
                    }
                })
                .collect::<Result<_>>()?;
            tested = ratios.len().saturating_sub(1);
            smallest(ratios.windows(2).map(|r| r[1] - r[0]))
        }
        OrderKind::Superadditive => {
            requires_origin(kind, dx, dy)?;
            let pairs = quantile_pairs(dx, dy, grid_points, false)?;
            let axis: Vec<(f64, f64)> = if pairs.len() > SUPERADDITIVE_AXIS_CAP {
                let last = pairs.len() - 1;
                (0..SUPERADDITIVE_AXIS_CAP)
                    .map(|k| pairs[k * last / (SUPERADDITIVE_AXIS_CAP - 1)])
                    .collect()
            } else {
                pairs
            };
            let mut worst = f64::INFINITY;
            for (j, &(xj, yj)) in axis.iter().enumerate() {
                for &(xk, yk) in &axis[j..] {
                    worst = worst.min(dx.cdf(xj + xk) - dy.cdf(yj + yk));
                    tested += 1;
                }
            }
            worst
        }
    };
    Ok(OrderVerdict {
        kind,
        holds_x_le_y: worst >= -ORDER_SLACK,
        grid: tested,
        worst_violation: worst,
    })
}
