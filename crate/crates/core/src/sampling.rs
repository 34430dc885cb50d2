//! Seeded generation of SRS, minRSSU and maxRSSU samples.
//!
//! Uniforms come from ChaCha8 (`rand_chacha`) seeded with
//! `seed_from_u64(seed)`, mapped to the open interval as
//! `((x >> 11) + 0.5) · 2⁻⁵³`. Both steps are platform independent, so a
//! fixed seed reproduces a sample bit for bit.
//!
//! Replicate `r` of a run with base seed `s` uses [`derive_seed`]`(s, r)`:
//! a SplitMix64 finalizer applied to `s + (r + 1)·γ` with the golden-ratio
//! increment γ. The map is injective in `r` for a fixed `s`.
//!
//! Unit `i` of a one-cycle minRSSU sample is the minimum of `i` draws and of
//! a maxRSSU sample the maximum. By default this is generated from one
//! uniform per unit through the law of the extreme,
//! `F_{1:i}⁻¹(v) = F⁻¹(1 − (1 − v)^{1/i})` and `F_{i:i}⁻¹(v) = F⁻¹(v^{1/i})`;
//! [`DrawRoute::Literal`] draws all `i` values instead.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::Serialize;

use crate::design::Design;
use crate::distributions::Distribution;
use crate::error::{Error, Result};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of replicate `r` under base seed `base`.
pub fn derive_seed(base: u64, r: u64) -> u64 {
    splitmix64(base.wrapping_add(r.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Stream of uniforms on the open interval `(0, 1)`.
pub struct UniformStream {
    rng: ChaCha8Rng,
}

impl UniformStream {
    pub fn new(seed: u64) -> Self {
        UniformStream {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn next_open01(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DrawRoute {
    /// One uniform per unit, pushed through the quantile of the extreme.
    #[default]
    InverseCdf,
    /// `i` draws for unit `i`, reduced to their minimum or maximum.
    Literal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Sample {
    values: Vec<f64>,
    raw_order: Vec<f64>,
    design: Design,
    seed: u64,
}

impl Sample {
    /// Observations in ascending order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Observations by unit: entry `i - 1` belongs to unit `i`.
    pub fn raw_order(&self) -> &[f64] {
        &self.raw_order
    }

    pub fn design(&self) -> Design {
        self.design
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

impl AsRef<[f64]> for Sample {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

fn clamp_open(u: f64) -> f64 {
    u.clamp(f64::MIN_POSITIVE, 1.0f64.next_down())
}

fn check_design(design: Design, n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain {
            what: "sample size",
            value: 0.0,
        });
    }
    if design == Design::Single {
        return Err(Error::InvalidParameter(
            "single is not a sampling design; use srs".into(),
        ));
    }
    Ok(())
}

pub fn draw_design(d: &Distribution, design: Design, n: usize, seed: u64) -> Result<Sample> {
    draw_design_with(d, design, n, seed, DrawRoute::InverseCdf)
}

pub fn draw_design_with(
    d: &Distribution,
    design: Design,
    n: usize,
    seed: u64,
    route: DrawRoute,
) -> Result<Sample> {
    check_design(design, n)?;
    let mut stream = UniformStream::new(seed);
    let mut raw_order = Vec::with_capacity(n);
    for i in 1..=n {
        let x = match (design, route) {
            (Design::Srs, _) => d.quantile(stream.next_open01())?,
            (Design::MinRssu, DrawRoute::InverseCdf) => {
                let v = stream.next_open01();
                let u = if i == 1 {
                    v
                } else {
                    -((-v).ln_1p() / i as f64).exp_m1()
                };
                d.quantile(clamp_open(u))?
            }
            (Design::MaxRssu, DrawRoute::InverseCdf) => {
                let v = stream.next_open01();
                let u = if i == 1 { v } else { (v.ln() / i as f64).exp() };
                d.quantile(clamp_open(u))?
            }
            (Design::MinRssu, DrawRoute::Literal) => {
                let mut best = f64::INFINITY;
                for _ in 0..i {
                    best = best.min(d.quantile(stream.next_open01())?);
                }
                best
            }
            (Design::MaxRssu, DrawRoute::Literal) => {
                let mut best = f64::NEG_INFINITY;
                for _ in 0..i {
                    best = best.max(d.quantile(stream.next_open01())?);
                }
                best
            }
            (Design::Single, _) => unreachable!("rejected by check_design"),
        };
        raw_order.push(x);
    }
    let mut values = raw_order.clone();
    values.sort_by(f64::total_cmp);
    Ok(Sample {
        values,
        raw_order,
        design,
        seed,
    })
}

/// Lazily draws `replicates` independent samples; replicate `r` is seeded
/// with [`derive_seed`]`(base_seed, r)`.
pub fn replicate<'a>(
    d: &'a Distribution,
    design: Design,
    n: usize,
    base_seed: u64,
    replicates: usize,
) -> Result<impl Iterator<Item = Result<Sample>> + 'a> {
    check_design(design, n)?;
    if replicates == 0 {
        return Err(Error::InvalidParameter("replicates must be at least 1".into()));
    }
    Ok((0..replicates as u64).map(move |r| draw_design(d, design, n, derive_seed(base_seed, r))))
}

/// Kolmogorov distance `sup |F̂(x) − F(x)|` between the empirical cdf of
/// `observations` and `cdf`.
pub fn kolmogorov_distance(observations: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = observations.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(k, &x)| {
            let f = cdf(x);
            (((k + 1) as f64 / n) - f).max(f - k as f64 / n)
        })
        .fold(0.0, f64::max)
}
