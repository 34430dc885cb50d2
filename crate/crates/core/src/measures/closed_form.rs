//! Known analytic values for power weights `w(x) = x^m`.

use statrs::function::gamma::ln_gamma;

use crate::design::Design;
use crate::distributions::{Distribution, FamilyTag};
use crate::quadrature::{beta, gamma};
use crate::weights::WeightFunction;

use super::{MeasureSpec, MeasureVariant};

/// `Γ(a) / Γ(b)`, through logarithms once the gammas would overflow.
fn gamma_ratio(a: f64, b: f64) -> f64 {
    if a < 170.0 && b < 170.0 {
        gamma(a).unwrap() / gamma(b).unwrap()
    } else {
        (ln_gamma(a) - ln_gamma(b)).exp()
    }
}

fn uniform_min_rssu(m: f64, n: u32, gamma_power: i32) -> f64 {
    let prod: f64 = (1..=n)
        .map(|i| {
            let i = i as f64;
            gamma_ratio(2.0 * i + 1.0, 2.0 * i + m + 2.0)
        })
        .product();
    -0.5 * gamma(m + 1.0).unwrap().powi(gamma_power) * prod
}

/// The uniform minRSSU form with the `Γ(m+1)` prefactor held at the second
/// power for every `n`. It agrees with the integral only when `n = 2` or
/// `Γ(m+1) = 1`; kept so the mismatch can be demonstrated.
pub fn uniform_min_rssu_squared_gamma(m: f64, n: u32) -> f64 {
    uniform_min_rssu(m, n, 2)
}

/// Registered closed form for `(d, w, spec)`, if there is one.
///
/// | family            | variant / design     | value                                           |
/// |-------------------|----------------------|-------------------------------------------------|
/// | Uniform(0, 1)     | past, single / SRS   | `-1/2 (1/(m+3))^n`                              |
/// | Uniform(0, 1)     | residual, single/SRS | `-1/2 (1/(m+1) - 2/(m+2) + 1/(m+3))^n`          |
/// | Uniform(0, 1)     | past, maxRSSU        | `-1/2 ∏ 1/(2i+m+1)`                             |
/// | Uniform(0, 1)     | residual, minRSSU    | `-1/2 Γ(m+1)^n ∏ Γ(2i+1)/Γ(2i+m+2)`             |
/// | Exponential(λ)    | residual, minRSSU    | `-1/2 (Γ(m+1)/(2λ)^{m+1})^n (1/n!)^{m+1}`       |
/// | PowerSurvival(b)  | residual, minRSSU    | `-1/2 ∏ B(m+1, 2ib+1)`                          |
pub fn closed_form(d: &Distribution, w: &WeightFunction, spec: &MeasureSpec) -> Option<f64> {
    let m = w.power_exponent()?;
    let n = spec.n();
    let nf = n as f64;
    match (d.family_tag(), spec.variant(), spec.design()) {
        (FamilyTag::Uniform { a, b }, variant, design) if a == 0.0 && b == 1.0 => {
            match (variant, design) {
                (MeasureVariant::Past, Design::Single | Design::Srs) => {
                    Some(-0.5 * (1.0 / (m + 3.0)).powi(n as i32))
                }
                (MeasureVariant::Residual, Design::Single | Design::Srs) => {
                    let e = 1.0 / (m + 1.0) - 2.0 / (m + 2.0) + 1.0 / (m + 3.0);
                    Some(-0.5 * e.powi(n as i32))
                }
                (MeasureVariant::Past, Design::MaxRssu) => Some(
                    -0.5 * (1..=n)
                        .map(|i| 1.0 / (2.0 * i as f64 + m + 1.0))
                        .product::<f64>(),
                ),
                (MeasureVariant::Residual, Design::MinRssu) => {
                    Some(uniform_min_rssu(m, n, n as i32))
                }
                _ => None,
            }
        }
        (FamilyTag::Exponential { rate }, MeasureVariant::Residual, Design::MinRssu) => {
            let per_unit = gamma(m + 1.0).ok()? / (2.0 * rate).powf(m + 1.0);
            let inv_factorial = 1.0 / gamma(nf + 1.0).ok()?;
            Some(-0.5 * per_unit.powi(n as i32) * inv_factorial.powf(m + 1.0))
        }
        (FamilyTag::PowerSurvival { b }, MeasureVariant::Residual, Design::MinRssu) => {
            let prod: f64 = (1..=n)
                .map(|i| beta(m + 1.0, 2.0 * i as f64 * b + 1.0).unwrap())
                .product();
            Some(-0.5 * prod)
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(v: MeasureVariant, d: Design, n: u32) -> MeasureSpec {
        MeasureSpec::new(v, d, n).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn uniform_min_rssu_uses_gamma_to_the_n() {
        let d = Distribution::uniform(0.0, 1.0).unwrap();
        let w = WeightFunction::power(2.0).unwrap();
        let v = closed_form(&d, &w, &spec(MeasureVariant::Residual, Design::MinRssu, 3)).unwrap();
        assert!(rel(v, -1.0 / 1_587_600.0) < 1e-13, "{v}");
        let printed = uniform_min_rssu_squared_gamma(2.0, 3);
        assert!(rel(printed / v, 0.5) < 1e-13);
    }

    #[test]
    fn power_survival_with_b_one_is_uniform() {
        let d = Distribution::power_survival(1.0).unwrap();
        let w = WeightFunction::power(1.0).unwrap();
        let v = closed_form(&d, &w, &spec(MeasureVariant::Residual, Design::MinRssu, 1)).unwrap();
        assert!(rel(v, -1.0 / 24.0) < 1e-14);
    }

    #[test]
    fn exponential_min_rssu() {
        let w = WeightFunction::power(1.0).unwrap();
        let s1 = spec(MeasureVariant::Residual, Design::MinRssu, 1);
        let d = Distribution::exponential(2.0).unwrap();
        // ∫ x e^{-4x} dx = 1/16.
        assert!(rel(closed_form(&d, &w, &s1).unwrap(), -1.0 / 32.0) < 1e-14);
        let d = Distribution::exponential(1.0).unwrap();
        let s2 = spec(MeasureVariant::Residual, Design::MinRssu, 2);
        assert!(rel(closed_form(&d, &w, &s2).unwrap(), -1.0 / 128.0) < 1e-14);
    }

    #[test]
    fn absent_outside_the_registry() {
        let w = WeightFunction::power(1.0).unwrap();
        let shifted = Distribution::uniform(0.0, 2.0).unwrap();
        assert!(closed_form(&shifted, &w, &spec(MeasureVariant::Past, Design::Srs, 2)).is_none());
        let e = Distribution::exponential(1.0).unwrap();
        assert!(closed_form(&e, &w, &spec(MeasureVariant::Residual, Design::Srs, 2)).is_none());
        let c = WeightFunction::constant(1.0).unwrap();
        let u = Distribution::uniform(0.0, 1.0).unwrap();
        assert!(closed_form(&u, &c, &spec(MeasureVariant::Past, Design::Srs, 1)).is_none());
    }
}
