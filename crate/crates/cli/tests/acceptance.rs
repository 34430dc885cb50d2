//! Acceptance criteria 1-9, one PASS/FAIL line each.
//!
//! The process fails if any criterion is red, except those listed in
//! `KNOWN_RED`. A listed criterion still prints FAIL with its margins, and
//! the process also fails if it starts passing so the list cannot go stale.

use std::fs;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use extropy_cli::converge::median_rel_err;
use extropy_cli::{convergence_study, ConvergenceStudy};
use extropy_core::estimators::{estimate, step_estimate};
use extropy_core::measures::{gw_design_measure, uniform_min_rssu_squared_gamma};
use extropy_core::orders::{
    check_comparison, check_dominance, check_monotone_in_n, check_order, check_transform,
    density_condition_at_origin, ComparisonCase, OrderKind, ReportStatus, SuiteConfig, TheoremId, TheoremReport,
    TransformCase,
};
use extropy_core::sampling::{draw_design_with, kolmogorov_distance, replicate, DrawRoute};
use extropy_core::{
    Bandwidth, Design, Distribution, EstimatorConfig, Kernel, MeasureSpec, MeasureVariant, Transformation, Variant,
    WeightFunction,
};

/// Criteria that cannot pass as stated; see the project notes.
const KNOWN_RED: &[u32] = &[5];

type Outcome = Result<String, String>;

fn fact(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn measure(d: &Distribution, w: &WeightFunction, v: MeasureVariant, design: Design, n: u32) -> Result<f64, String> {
    let spec = MeasureSpec::new(v, design, n).map_err(|e| e.to_string())?;
    gw_design_measure(d, w, &spec).map(|m| m.value).map_err(|e| e.to_string())
}

fn unif() -> Distribution {
    Distribution::uniform(0.0, 1.0).unwrap()
}

fn power(m: f64) -> WeightFunction {
    WeightFunction::power(m).unwrap()
}

fn criterion_1() -> Outcome {
    const TOL: f64 = 1e-8;
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut count = 0;
    let mut check = |label: String, got: f64, want: f64| -> Result<(), String> {
        let r = rel(got, want);
        worst = worst.max(r);
        count += 1;
        if r <= TOL {
            Ok(())
        } else {
            Err(format!("{label}: quadrature {got:e} vs formula {want:e} (rel {r:.2e})"))
        }
    };
    for m in 1..=3u32 {
        let mf = f64::from(m);
        let w = power(mf);
        for n in 1..=3u32 {
            let srs = -0.5 * (1.0 / (mf + 3.0)).powi(n as i32);
            check(
                format!("uniform past srs m={m} n={n}"),
                measure(&unif(), &w, MeasureVariant::Past, Design::Srs, n)?,
                srs,
            )?;
            let max: f64 = -0.5 * (1..=n).map(|i| 1.0 / (2.0 * f64::from(i) + mf + 1.0)).product::<f64>();
            check(
                format!("uniform past maxrssu m={m} n={n}"),
                measure(&unif(), &w, MeasureVariant::Past, Design::MaxRssu, n)?,
                max,
            )?;
            for lambda in [0.5, 1.0, 2.0] {
                let d = Distribution::exponential(lambda).unwrap();
                let base = fact(m) / (2.0 * lambda).powi(m as i32 + 1);
                let want = -0.5 * base.powi(n as i32) * (1.0 / fact(n)).powi(m as i32 + 1);
                check(
                    format!("exp({lambda}) residual minrssu m={m} n={n}"),
                    measure(&d, &w, MeasureVariant::Residual, Design::MinRssu, n)?,
                    want,
                )?;
            }
            for b in [1u32, 2] {
                let d = Distribution::power_survival(f64::from(b)).unwrap();
                // B(m+1, 2ib+1) with integer arguments.
                let want: f64 = -0.5
                    * (1..=n)
                        .map(|i| {
                            let k = 2 * i * b;
                            fact(m) * fact(k) / fact(m + k + 1)
                        })
                        .product::<f64>();
                check(
                    format!("powersurv({b}) residual minrssu m={m} n={n}"),
                    measure(&d, &w, MeasureVariant::Residual, Design::MinRssu, n)?,
                    want,
                )?;
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(10) {
        return Err(format!("{count} values agree but took {elapsed:.2?} (limit 10s)"));
    }
    Ok(format!("{count} closed forms, worst rel {worst:.1e}, {elapsed:.2?}"))
}

fn criterion_2() -> Outcome {
    let got = measure(&unif(), &power(2.0), MeasureVariant::Residual, Design::MinRssu, 3)?;
    let oracle: f64 = -0.5 * fact(2).powi(3) * (1..=3u32).map(|i| fact(2 * i) / fact(2 * i + 3)).product::<f64>();
    let exact = -1.0 / 1_587_600.0;
    if rel(oracle, exact) > 1e-12 {
        return Err(format!("oracle {oracle:e} is not -1/1587600"));
    }
    if rel(got, exact) > 1e-8 {
        return Err(format!("quadrature {got:e} vs -1/1587600 (rel {:.2e})", rel(got, exact)));
    }
    let printed = uniform_min_rssu_squared_gamma(2.0, 3);
    let factor = got / printed;
    if (factor - 2.0).abs() > 1e-8 {
        return Err(format!("printed variant {printed:e}; quadrature/printed = {factor}, expected 2"));
    }
    Ok(format!("value {got:e}; printed squared-gamma form {printed:e} is off by a factor {factor:.10}"))
}

fn registered_families() -> Vec<Distribution> {
    vec![
        unif(),
        Distribution::uniform(0.5, 2.0).unwrap(),
        Distribution::exponential(0.5).unwrap(),
        Distribution::exponential(1.0).unwrap(),
        Distribution::exponential(2.0).unwrap(),
        Distribution::power_survival(1.0).unwrap(),
        Distribution::power_survival(2.0).unwrap(),
        unif().transform(&Transformation::exp_minus_one()).unwrap(),
    ]
}

fn degenerate(r: &TheoremReport) -> bool {
    r.notes.iter().any(|n| n.contains("both sides diverge"))
}

fn criterion_3() -> Outcome {
    let cfg = SuiteConfig::default();
    let (mut strict, mut equal) = (0, 0);
    let mut smallest = f64::INFINITY;
    for d in registered_families() {
        for m in [1.0, 2.0] {
            let w = power(m);
            for n in 2..=4 {
                for id in [TheoremId::MaxRssuDominatesSrs, TheoremId::MinRssuDominatesSrs] {
                    let r = check_dominance(id, &d, &w, n, &cfg).map_err(|e| e.to_string())?;
                    if r.status != ReportStatus::Verified {
                        return Err(format!("{} {}: {:?}, margin {:e}", id.as_str(), r.case, r.status, r.conclusion_margin));
                    }
                    if degenerate(&r) {
                        equal += 1;
                    } else if r.conclusion_margin > 0.0 {
                        strict += 1;
                        smallest = smallest.min(r.conclusion_margin);
                    } else {
                        return Err(format!("{} {}: margin {:e} is not strict", id.as_str(), r.case, r.conclusion_margin));
                    }
                }
            }
        }
    }
    Ok(format!("{strict} strict (smallest margin {smallest:.3e}), {equal} degenerate both-divergent equalities"))
}

fn criterion_4() -> Outcome {
    let cfg = SuiteConfig::default();
    let mut checks = 0;
    for m in [1.0, 2.0, 3.0] {
        for id in [TheoremId::MaxRssuMonotone, TheoremId::MinRssuMonotone] {
            let r = check_monotone_in_n(id, &unif(), &power(m), 5, &cfg).map_err(|e| e.to_string())?;
            if r.status != ReportStatus::Verified {
                return Err(format!("{} m={m}: {:?}", id.as_str(), r.status));
            }
            for c in &r.conclusion_checks {
                if !c.passed || c.detail.as_deref() == Some("not strict") {
                    return Err(format!("{} m={m}: {} margin {:e}", id.as_str(), c.name, c.margin));
                }
                checks += 1;
            }
        }
    }
    Ok(format!("{checks} step and ratio checks, n = 1..5, m in {{1,2,3}}"))
}

fn criterion_5() -> Outcome {
    let cfg = SuiteConfig::default();
    let x = Distribution::exponential(1.0).unwrap();
    let y = Distribution::exponential(0.5).unwrap();
    let w = WeightFunction::exp_decay(1.0).unwrap();
    let mut failures = Vec::new();

    let disp = check_order(OrderKind::Disp, &x, &y, cfg.grid_points).map_err(|e| e.to_string())?;
    if !disp.holds_x_le_y {
        failures.push(format!("disp does not hold (worst {:e})", disp.worst_violation));
    }
    for n in 1..=3 {
        let case = ComparisonCase::new(x.clone(), y.clone(), w.clone(), n);
        for id in [
            TheoremId::PastDispersive,
            TheoremId::ResidualDispersive,
            TheoremId::MaxRssuDispersive,
            TheoremId::MinRssuDispersive,
        ] {
            // Single-variable theorems are stated for n = 1 only.
            if n > 1 && matches!(id, TheoremId::PastDispersive | TheoremId::ResidualDispersive) {
                continue;
            }
            let r = check_comparison(id, &case, &cfg).map_err(|e| e.to_string())?;
            if r.conclusion_margin < -1e-9 || r.conclusion_margin.is_nan() {
                failures.push(format!("{} n={n} margin {:.6}", id.as_str(), r.conclusion_margin));
            }
        }
    }

    let family = registered_families();
    let mut implied = 0;
    for dx in &family {
        for dy in &family {
            if dx.support_lower() != 0.0 || dy.support_lower() != 0.0 || !density_condition_at_origin(dx, dy) {
                continue;
            }
            for kind in [OrderKind::ConvexTransform, OrderKind::Star, OrderKind::Superadditive] {
                if check_order(kind, dx, dy, 99).map_err(|e| e.to_string())?.holds_x_le_y {
                    implied += 1;
                    if !check_order(OrderKind::Disp, dx, dy, 99).map_err(|e| e.to_string())?.holds_x_le_y {
                        failures.push(format!("{kind} holds but disp fails: {dx} vs {dy}"));
                    }
                }
            }
        }
    }
    if implied == 0 {
        failures.push("no shape-order pair exercised the consistency check".into());
    }
    if failures.is_empty() {
        Ok(format!("disp holds; all comparison conclusions verified; {implied} shape-order implications consistent"))
    } else {
        Err(failures.join("; "))
    }
}

fn criterion_6() -> Outcome {
    let cfg = SuiteConfig::default();
    let mut count = 0;
    for x in [unif(), Distribution::exponential(1.0).unwrap()] {
        for n in 1..=3 {
            let case = TransformCase {
                x: x.clone(),
                psi: Transformation::exp_minus_one(),
                w: power(1.0),
                n,
            };
            for id in [TheoremId::PsiSrs, TheoremId::PsiMaxRssu, TheoremId::PsiMinRssu] {
                let r = check_transform(id, &case, &cfg).map_err(|e| e.to_string())?;
                if r.status != ReportStatus::Verified {
                    return Err(format!("{} {}: {:?}, margin {:e}", id.as_str(), r.case, r.status, r.conclusion_margin));
                }
                count += 1;
            }
        }
    }
    Ok(format!("{count} transform inequalities verified"))
}

fn criterion_7() -> Outcome {
    let cases: [(&[f64], Variant, f64); 4] = [
        (&[1.0, 2.0], Variant::Past, -3.0 / 16.0),
        (&[1.0, 2.0], Variant::Residual, -3.0 / 16.0),
        (&[0.0, 1.0, 2.0], Variant::Past, -13.0 / 36.0),
        (&[0.0, 1.0, 2.0], Variant::Residual, -7.0 / 36.0),
    ];
    let mut worst_kernel = 0.0f64;
    for (sample, variant, want) in cases {
        let step = step_estimate(sample, &EstimatorConfig::step(variant, 1.0)).map_err(|e| e.to_string())?;
        if (step - want).abs() > 1e-12 {
            return Err(format!("step {variant} {sample:?}: {step} vs {want}"));
        }
        for kernel in [Kernel::Gaussian, Kernel::Epanechnikov] {
            let cfg = EstimatorConfig::kernel(variant, 1.0, kernel, Bandwidth::Fixed(1e-6));
            let k = estimate(sample, &cfg).map_err(|e| e.to_string())?;
            worst_kernel = worst_kernel.max((k - step).abs());
            if (k - step).abs() > 1e-3 {
                return Err(format!("kernel {kernel:?} {variant} {sample:?}: {k} vs step {step}"));
            }
        }
    }
    Ok(format!("hand values exact to 1e-12; kernel at h=1e-6 within {worst_kernel:.1e} of step"))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let study = ConvergenceStudy {
        dist: unif(),
        design: Design::Srs,
        config: EstimatorConfig::step(Variant::Residual, 1.0),
        sizes: vec![100, 1000, 10_000],
        seeds: 50,
        base_seed: 0,
    };
    let rows = convergence_study(&study).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let medians = median_rel_err(&rows);
    let shown: Vec<String> = medians.iter().map(|(n, m)| format!("{n}:{:.3}%", 100.0 * m)).collect();
    let shown = shown.join(" ");
    if rows.iter().any(|r| (r.truth + 1.0 / 24.0).abs() > 1e-14) {
        return Err("truth is not -1/24".into());
    }
    if !medians.windows(2).all(|p| p[1].1 < p[0].1) {
        return Err(format!("medians not decreasing: {shown}"));
    }
    let last = medians.last().map(|m| m.1).unwrap_or(f64::NAN);
    if last.is_nan() || last >= 0.02 {
        return Err(format!("median at 10000 is {:.3}%: {shown}", 100.0 * last));
    }
    if elapsed > Duration::from_secs(60) {
        return Err(format!("took {elapsed:.2?} (limit 60s)"));
    }
    Ok(format!("median rel err {shown}, {elapsed:.2?}"))
}

fn criterion_9() -> Outcome {
    const REPLICATES: usize = 100_000;
    const UNITS: usize = 4;
    let d = unif();
    let mut worst = 0.0f64;
    for design in [Design::MinRssu, Design::MaxRssu] {
        let mut columns: Vec<Vec<f64>> = (0..UNITS).map(|_| Vec::with_capacity(REPLICATES)).collect();
        for s in replicate(&d, design, UNITS, 42, REPLICATES).map_err(|e| e.to_string())? {
            let s = s.map_err(|e| e.to_string())?;
            for (col, x) in columns.iter_mut().zip(s.raw_order()) {
                col.push(*x);
            }
        }
        // The literal route draws i uniforms per unit and keeps the extreme.
        let mut literal: Vec<Vec<f64>> = (0..UNITS).map(|_| Vec::with_capacity(REPLICATES / 10)).collect();
        for r in 0..(REPLICATES / 10) as u64 {
            let s = draw_design_with(&d, design, UNITS, r, DrawRoute::Literal).map_err(|e| e.to_string())?;
            for (col, x) in literal.iter_mut().zip(s.raw_order()) {
                col.push(*x);
            }
        }
        for (k, col) in columns.iter().enumerate() {
            let i = (k + 1) as i32;
            let cdf = |x: f64| match design {
                Design::MinRssu => 1.0 - (1.0 - x).powi(i),
                _ => x.powi(i),
            };
            let ks = kolmogorov_distance(col, cdf);
            worst = worst.max(ks);
            if ks >= 0.01 {
                return Err(format!("{design} unit {i}: KS {ks:.4}"));
            }
            // 10,000 literal draws: critical value at the 1e-4 level is about 0.02.
            let ks_lit = kolmogorov_distance(&literal[k], cdf);
            if ks_lit >= 0.02 {
                return Err(format!("{design} unit {i} literal route: KS {ks_lit:.4}"));
            }
        }
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let runs: [&[&str]; 4] = [
        &["simulate", "--dist", "exp:2", "--design", "srs", "--n", "300", "--seed", "5"],
        &["simulate", "--dist", "uniform:0,1", "--design", "minrssu", "--n", "300", "--seed", "5"],
        &["simulate", "--dist", "powersurv:2", "--design", "maxrssu", "--n", "300", "--seed", "5"],
        &[
            "converge", "--dist", "uniform:0,1", "--m", "1", "--variant", "residual", "--design", "srs", "--sizes",
            "100,1000", "--seeds", "8", "--seed", "3",
        ],
    ];
    for (k, args) in runs.iter().enumerate() {
        let mut bytes = Vec::new();
        for attempt in 0..2 {
            let path = dir.path().join(format!("out{k}_{attempt}.csv"));
            let status = Command::new(env!("CARGO_BIN_EXE_extropy"))
                .args(*args)
                .arg("--out")
                .arg(&path)
                .status()
                .map_err(|e| e.to_string())?;
            if !status.success() {
                return Err(format!("{} exited with {status}", args.join(" ")));
            }
            bytes.push(fs::read(&path).map_err(|e| e.to_string())?);
        }
        if bytes[0] != bytes[1] || bytes[0].is_empty() {
            return Err(format!("{} is not byte-reproducible", args.join(" ")));
        }
    }
    Ok(format!("worst KS {worst:.4} over Z_i and Y_i, i=1..{UNITS}; {} CSV outputs byte-identical", runs.len()))
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> Outcome); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    let mut unexpected = Vec::new();
    for (k, run) in criteria {
        let known_red = KNOWN_RED.contains(&k);
        match run() {
            Ok(detail) => {
                println!("PASS criterion {k}: {detail}");
                if known_red {
                    unexpected.push(format!("criterion {k} passed but is listed as known red"));
                }
            }
            Err(detail) => {
                let tag = if known_red { " [known red]" } else { "" };
                println!("FAIL criterion {k}{tag}: {detail}");
                if !known_red {
                    unexpected.push(format!("criterion {k} failed"));
                }
            }
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        for u in &unexpected {
            eprintln!("acceptance: {u}");
        }
        ExitCode::FAILURE
    }
}
