//! Fixtures shared by the benches.

use extropy_core::sampling::draw_design;
use extropy_core::{Design, Distribution, MeasureSpec, MeasureVariant, WeightFunction};

/// Distributions covering closed-form, singular and transformed cases.
pub fn distributions() -> Vec<(&'static str, Distribution)> {
    vec![
        ("uniform", Distribution::uniform(0.0, 1.0).unwrap()),
        ("exp", Distribution::exponential(1.0).unwrap()),
        ("powersurv2", Distribution::power_survival(2.0).unwrap()),
        ("exp_minus_one", "transform:exp_minus_one(uniform:0,1)".parse().unwrap()),
    ]
}

pub fn weight() -> WeightFunction {
    WeightFunction::power(1.0).unwrap()
}

pub fn residual_min_rssu(n: u32) -> MeasureSpec {
    MeasureSpec::new(MeasureVariant::Residual, Design::MinRssu, n).unwrap()
}

/// Sorted uniform SRS sample.
pub fn uniform_sample(n: usize, seed: u64) -> Vec<f64> {
    let d = Distribution::uniform(0.0, 1.0).unwrap();
    draw_design(&d, Design::Srs, n, seed).unwrap().values().to_vec()
}
