//! Weighted cumulative residual extropy (GWCRJ) and weighted cumulative past
//! extropy (GWCPJ).
//!
//! The crate evaluates both measures for a single variable and for simple
//! random sampling (SRS) and ranked set sampling with unequal set sizes
//! (minRSSU, maxRSSU), simulates those designs, estimates the measures from
//! data, and checks the ordering, dominance and monotonicity results that
//! relate them.
//!
//! Every measure is computed in quantile space, as an integral over `u` in
//! `(0, 1)`:
//!
//! ```text
//! GWCPJ(X) = -1/2 ∫ w(F⁻¹(u)) u²     / f(F⁻¹(u)) du
//! GWCRJ(X) = -1/2 ∫ w(F⁻¹(u)) (1-u)² / f(F⁻¹(u)) du
//! ```
//!
//! ```
//! use extropy_core::{Design, Distribution, MeasureSpec, MeasureVariant, WeightFunction};
//! use extropy_core::measures::gw_design_measure;
//!
//! let d = Distribution::uniform(0.0, 1.0).unwrap();
//! let w = WeightFunction::power(1.0).unwrap();
//! let spec = MeasureSpec::new(MeasureVariant::Past, Design::MaxRssu, 2).unwrap();
//! let v = gw_design_measure(&d, &w, &spec).unwrap();
//! assert!((v.value + 1.0 / 48.0).abs() < 1e-12);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod design;
pub mod distributions;
pub mod error;
pub mod estimators;
pub mod measures;
pub mod orders;
pub mod quadrature;
pub mod sampling;
pub mod weights;

pub use design::{Design, Variant};
pub use distributions::{Distribution, FamilyTag, Transformation};
pub use error::{Error, Result};
pub use estimators::{Bandwidth, EstimatorConfig, EstimatorStyle, Kernel, KernelAnchor};
pub use measures::{MeasureSpec, MeasureValue, MeasureVariant};
pub use orders::{OrderKind, OrderVerdict, ReportStatus, TheoremId, TheoremReport};
pub use quadrature::IntegrationResult;
pub use sampling::Sample;
pub use weights::{MonotoneVerdict, WeightFunction};
