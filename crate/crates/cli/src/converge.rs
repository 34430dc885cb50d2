//! Estimator error over a ladder of sample sizes.

use std::io::Write;

use anyhow::bail;
use rayon::prelude::*;
use serde::Serialize;

use extropy_core::estimators::estimate;
use extropy_core::measures::gw_cumulative;
use extropy_core::sampling::{derive_seed, draw_design};
use extropy_core::{Design, Distribution, EstimatorConfig, Variant, WeightFunction};

use crate::io_formats::format_f64;

#[derive(Debug, Clone)]
pub struct ConvergenceStudy {
    pub dist: Distribution,
    pub design: Design,
    pub config: EstimatorConfig,
    pub sizes: Vec<usize>,
    pub seeds: u64,
    pub base_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub sample_size: usize,
    pub design: Design,
    pub variant: Variant,
    pub estimate: f64,
    pub truth: f64,
    pub abs_err: f64,
    /// Absent when the truth is 0.
    pub rel_err: Option<f64>,
    pub seed: u64,
}

/// One row per (size, seed) cell, sorted by size then seed.
///
/// The truth is the single-variable measure of the parent distribution under
/// the weight `x^m`, which is what the estimators target.
pub fn convergence_study(study: &ConvergenceStudy) -> anyhow::Result<Vec<ConvergenceRow>> {
    if study.sizes.is_empty() || study.seeds == 0 {
        bail!("need at least one sample size and one seed");
    }
    if let Some(n) = study.sizes.iter().find(|&&n| n < 2) {
        bail!("sample size {n} is below 2");
    }
    let cfg = &study.config;
    let w = WeightFunction::power(cfg.m)?;
    let truth = gw_cumulative(&study.dist, &w, cfg.variant)?.value;

    let cells: Vec<(usize, u64)> = study
        .sizes
        .iter()
        .flat_map(|&n| (0..study.seeds).map(move |r| (n, derive_seed(study.base_seed, r))))
        .collect();
    let mut rows = cells
        .into_par_iter()
        .map(|(n, seed)| {
            let sample = draw_design(&study.dist, study.design, n, seed)?;
            let est = estimate(sample.values(), cfg)?;
            let abs_err = (est - truth).abs();
            Ok(ConvergenceRow {
                sample_size: n,
                design: study.design,
                variant: cfg.variant,
                estimate: est,
                truth,
                abs_err,
                rel_err: (truth != 0.0).then(|| abs_err / truth.abs()),
                seed,
            })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    rows.sort_by_key(|r| (r.sample_size, r.seed));
    Ok(rows)
}

/// Median relative error per sample size, in ladder order.
pub fn median_rel_err(rows: &[ConvergenceRow]) -> Vec<(usize, f64)> {
    let mut sizes: Vec<usize> = rows.iter().map(|r| r.sample_size).collect();
    sizes.dedup();
    sizes
        .into_iter()
        .map(|n| {
            let mut errs: Vec<f64> = rows
                .iter()
                .filter(|r| r.sample_size == n)
                .filter_map(|r| r.rel_err)
                .collect();
            errs.sort_by(f64::total_cmp);
            let k = errs.len();
            let med = match k {
                0 => f64::NAN,
                _ if k % 2 == 1 => errs[k / 2],
                _ => 0.5 * (errs[k / 2 - 1] + errs[k / 2]),
            };
            (n, med)
        })
        .collect()
}

pub fn write_rows(rows: &[ConvergenceRow], w: &mut dyn Write) -> anyhow::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["sample_size", "design", "variant", "estimate", "truth", "abs_err", "rel_err", "seed"])?;
    for r in rows {
        wtr.write_record([
            r.sample_size.to_string(),
            r.design.to_string(),
            r.variant.to_string(),
            format_f64(r.estimate),
            format_f64(r.truth),
            format_f64(r.abs_err),
            r.rel_err.map(format_f64).unwrap_or_default(),
            r.seed.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}
