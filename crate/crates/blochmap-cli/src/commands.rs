//! One function per subcommand, generic over the working precision.

use crate::config::RunConfig;
use crate::output::{fmt_f64, write_json, CsvDoc};
use anyhow::{bail, Context};
use blochmap::bloch::{geodesic_distance, pair_at_delta, ProjectiveQubit, SpherePoint, StatePair};
use blochmap::circuit::{build_gates, iterate_via_circuit, success_probability};
use blochmap::dynamics::{apply_map, MapParams};
use blochmap::ensemble::{
    average_fidelity_vs_iteration, critical_iteration, rxy_vs_iteration, EnsembleSpec, Region,
    Sampling,
};
use blochmap::fractal::{box_dimension, default_scales, julia_raster, write_pgm, Window};
use blochmap::leggett_garg::{
    faulty_k3_series, k3_series, observable_expectation, ObservableAxis,
};
use blochmap::protocol::{
    machine_precision_probe, patch_success_optimization, resolution_heatmap, strategy_a_run,
    HeatmapCell,
};
use blochmap::scalar::Real;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use std::path::Path;

fn map_params<R: Real>(cfg: &RunConfig) -> MapParams<R> {
    let (re, im) = cfg.s_value();
    MapParams::new(blochmap::complex::Cx::from_f64(re, im))
}

fn axis<R: Real>(cfg: &RunConfig) -> anyhow::Result<ObservableAxis<R>> {
    // exact eigenstates for the canonical sigma_x device
    if cfg.axis_theta_m == std::f64::consts::FRAC_PI_2 && cfg.axis_phi_m == 0.0 {
        return Ok(ObservableAxis::sigma_x());
    }
    Ok(ObservableAxis::from_angles(
        R::from_f64(cfg.axis_theta_m),
        R::from_f64(cfg.axis_phi_m),
    )?)
}

fn ensemble_spec(cfg: &RunConfig, region: Region) -> EnsembleSpec {
    EnsembleSpec {
        size: cfg.ensemble,
        region,
        sampling: match cfg.sampling.as_str() {
            "grid" => Sampling::Grid,
            _ => Sampling::SeededUniform,
        },
        delta: cfg.delta,
        seed: cfg.seed,
    }
}

pub fn run<R: Real>(cfg: &RunConfig, out: &Path) -> anyhow::Result<()> {
    match cfg.command.as_str() {
        "rxy" => rxy::<R>(cfg, out),
        "fidelity-avg" => fidelity_avg::<R>(cfg, out),
        "fidelity-fatou" => fidelity_fatou::<R>(cfg, out),
        "patch-optimize" => patch_optimize::<R>(cfg, out),
        "k3-faulty" => k3_faulty::<R>(cfg, out),
        "k3-diff" => k3_diff::<R>(cfg, out),
        "heatmap" => heatmap::<R>(cfg, out),
        "histogram-fatou" => histogram_fatou::<R>(cfg, out),
        "precision-probe" => precision_probe::<R>(cfg, out),
        "julia" => julia::<R>(cfg, out),
        "boxdim" => boxdim::<R>(cfg, out),
        "circuit-verify" => circuit_verify::<R>(cfg, out),
        "success-prob" => success_prob::<R>(cfg, out),
        other => bail!("unknown command '{other}'"),
    }
}

fn rxy<R: Real>(cfg: &RunConfig, out: &Path) -> anyhow::Result<()> {
    let spec = ensemble_spec(cfg, Region::WholeSphere);
    let series = rxy_vs_iteration::<R>(&spec, &axis(cfg)?, &map_params(cfg), cfg.n_max)?;
    let critical = critical_iteration(&series.values, cfg.epsilon, cfg.window).ok();
    let notes = vec![
        format!("skipped_pairs: {}", series.skipped_pairs),
        format!(
            "critical_iteration (|r| < {} for {} consecutive): {}",
            cfg.epsilon,
            cfg.window,
            critical.map_or_else(|| "not reached".to_string(), |n| n.to_string())
        ),
    ];
    if cfg.format == "json" {
        return write_json(
            out,
            cfg,
            json!({
                "r_xy": series.values,
                "zero_variance_at": series.zero_variance_at,
                "skipped_pairs": series.skipped_pairs,
                "critical_iteration": critical,
            }),
        );
    }
    let mut doc = CsvDoc::new(cfg, &notes, &["n", "r_xy"]);
    for (n, r) in series.values.iter().enumerate() {
        doc.row(&[n.to_string(), fmt_f64(*r)]);
    }
    doc.write_to(out)
}

fn fidelity_avg<R: Real>(cfg: &RunConfig, out: &Path) -> anyhow::Result<()> {
    let spec = ensemble_spec(cfg, Region::WholeSphere);
    let stats = average_fidelity_vs_iteration::<R>(&spec, &map_params(cfg), cfg.n_max)?;
    if cfg.format == "json" {
        return write_json(
            out,
            cfg,
            json!({
                "mean_fidelity": stats.mean,
                "std_fidelity": stats.std_dev,
                "skipped_pairs": stats.skipped_pairs,
            }),
        );
    }
    let notes = vec![format!("skipped_pairs: {}", stats.skipped_pairs)];
    let mut doc = CsvDoc::new(cfg, &notes, &["n", "mean_f", "std_f"]);
    for n in 0..stats.mean.len() {
        doc.row(&[n.to_string(), fmt_f64(stats.mean[n]), fmt_f64(stats.std_dev[n])]);
    }
    doc.write_to(out)
}

/// Equator-straddling pairs under the squaring map: average fidelity decay.
fn fidelity_fatou<R: Real>(cfg: &RunConfig, out: &Path) -> anyhow::Result<()> {
    let pairs = straddling_pairs::<R>(cfg.ensemble, cfg.delta, cfg.seed)?;
    let report = strategy_a_run(&pairs, cfg.n_max, &[], cfg.bins)?;
    if cfg.format == "json" {
        return write_json(
            out,
            cfg,
            json!({
                "mean_fidelity": report.mean_fidelity,
                "std_fidelity": report.std_fidelity,
            }),
        );
    }
    let mut doc = CsvDoc::new(cfg, &[], &["n", "mean_f", "std_f"]);
    for n in 0..report.mean_fidelity.len() {
        doc.row(&[
            n.to_string(),
            fmt_f64(report.mean_fidelity[n]),
            fmt_f64(report.std_fidelity[n]),
        ]);
    }
    doc.write_to(out)
}

fn straddling_pairs<R: Real>(
    count: usize,
    delta: f64,
    seed: u64,
) -> anyhow::Result<Vec<StatePair<R>>> {
    if delta <= 0.0 || delta >= std::f64::consts::PI {
        bail!("straddling pairs need 0 < delta < pi");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let base = SpherePoint::<R>::from_f64(
                std::f64::consts::FRAC_PI_2 - delta / 2.0,
                phi,
            )?;
            Ok(pair_at_delta(base, R::from_f64(delta))?)
        })
        .collect()
}

fn patch_optimize<R: Real>(cfg: &RunConfig, out: &Path) -> anyhow::Result<()> {
    let report = patch_success_optimization::<R>(
        cfg.theta_max,
        cfg.delta,
        cfg.ensemble,
        cfg.seed,
        &axis(cfg)?,
        &map_params(cfg),
        cfg.n_max,
        cfg.epsilon,
        cfg.window,
    )?;
    let notes = vec![
        format!("min_single_step_success: {}", fmt_f64(report.min_single_step_success)),
        format!(
            "saturation_iteration: {}",
            report.saturation.map_or_else(|| "not reached".to_string(), |n| n.to_string())
        ),
        format!("cumulative_success_bound: {}", fmt_f64(report.cumulative_success_bound)),
    ];
    if cfg.format == "json" {
        return write_json(
            out,
            cfg,
            json!({
                "r_xy": report.rxy.values,
                "min_single_step_success": report.min_single_step_success,
                "saturation_iteration": report.saturation,
                "cumulative_success_bound": report.cumulative_success_bound,
            }),
        );
    }
    let mut doc = CsvDoc::new(cfg, &notes, &["n", "r_xy"]);
    for (n, r) in report.rxy.values.iter().enumerate() {
        doc.row(&[n.to_string(), fmt_f64(*r)]);
    }
    doc.write_to(out)
}

/// Ideal vs faulty K3 series for seeded random states.
fn k3_faulty<R: Real>(cfg: &RunConfig, out: &Path) -> anyhow::Result<()> {
    let params = map_params::<R>(cfg);
    let ideal_axis = ObservableAxis::<R>::sigma_x();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let states: Vec<ProjectiveQubit<R>> = (0..cfg.samples)
        .map(|_| {
            let u: f64 = rng.random_range(-1.0f64..1.0);
            let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            Ok(SpherePoint::<R>::from_f64(u.acos(), phi)?.to_state())
        })
        .collect::<anyhow::Result<_>>()?;
    let mut rows = Vec::new();
    let mut violating_states = 0usize;
    let mut luders_states = 0usize;
    for (idx, st) in states.iter().enumerate() {
        let ideal = k3_series(st, &ideal_axis, &params, cfg.n_max)?;
        let faulty = faulty_k3_series(
            st,
            (R::from_f64(cfg.d_theta), R::from_f64(cfg.d_phi)),
            &params,
            cfg.n_max,
        )?;
        if !faulty.lgi_violations.is_empty() {
            violating_states += 1;
        }
        if !faulty.luders_violations.is_empty() {
            luders_states += 1;
        }
        for (i, f) in ideal.iter().zip(&faulty.records) {
            rows.push((
                idx,
                i.n,
                i.k3.to_f64(),
                f.k3.to_f64(),
                faulty.lgi_violations.contains(&f.n),
            ));
        }
    }
    let notes = vec![
        format!("states_with_lgi_violation: {violating_states} of {}", cfg.samples),
        format!("states_beyond_luders: {luders_states} of {}", cfg.samples),
    ];
    if cfg.format == "json" {
        let series: Vec<_> = rows
            .iter()
            .map(|(s, n, i, f, v)| json!({"state": s, "n": n, "k3_ideal": i, "k3_faulty": f, "violation": v}))
            .collect();
        return write_json(
            out,
            cfg,
            json!({
                "states_with_lgi_violation": violating_states,
                "states_beyond_luders": luders_states,
                "series": series,
            }),
        );
    }
    let mut doc = CsvDoc::new(cfg, &notes, &["state", "n", "k3_ideal", "k3_faulty", "violation"]);
    for (s, n, i, f, v) in rows {
        doc.row(&[
            s.to_string(),
            n.to_string(),
            fmt_f64(i),
            fmt_f64(f),
            (v as u8).to_string(),
        ]);
    }
    doc.write_to(out)
}

/// K3 difference of one pair anchored at (--theta, --phi) or a seeded point.
fn k3_diff<R: Real>(cfg: &RunConfig, out: &Path) -> anyhow::Result<()> {
    let params = map_params::<R>(cfg);
    let ax = axis::<R>(cfg)?;
    let (theta, phi) = match (cfg.theta, cfg.phi) {
        (Some(t), Some(p)) => (t, p),
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let u: f64 = rng.random_range(-1.0f64..1.0);
            (u.acos(), rng.random_range(0.0..std::f64::consts::TAU))
        }
    };
    let base = SpherePoint::<R>::from_f64(theta, phi)?;
    let pair = pair_at_delta(base, R::from_f64(cfg.delta))?;
    let series_a = k3_series(&pair.a, &ax, &params, cfg.n_max)?;
    let series_b = k3_series(&pair.b, &ax, &params, cfg.n_max)?;
    let verdict =
        blochmap::protocol::strategy_b_discriminate(&pair, &ax, &params, cfg.n_max, cfg.threshold)?;
    let notes = vec![
        format!("anchor: theta = {theta}, phi = {phi}"),
        format!(
            "first |dk3| > {}: {}",
            cfg.threshold,
            verdict
                .first_nonzero_iteration
                .map_or_else(|| "not reached".to_string(), |n| n.to_string())
        ),
    ];
    if cfg.format == "json" {
        return write_json(
            out,
            cfg,
            json!({
                "theta": theta,
                "phi": phi,
                "distinguishable": verdict.distinguishable,
                "first_nonzero_iteration": verdict.first_nonzero_iteration,
                "dk3": verdict.k3_difference,
            }),
        );
    }
    let mut doc = CsvDoc::new(cfg, &notes, &["n", "k3_a", "k3_b", "dk3"]);
    doc.row(&[
        "0".to_string(),
        fmt_f64(observable_expectation(&pair.a, &ax).to_f64()),
        fmt_f64(observable_expectation(&pair.b, &ax).to_f64()),
        fmt_f64(verdict.k3_difference[0]),
    ]);
    for (ra, rb) in series_a.iter().zip(&series_b) {
        doc.row(&[
            ra.n.to_string(),
            fmt_f64(ra.k3.to_f64()),
            fmt_f64(rb.k3.to_f64()),
            fmt_f64(verdict.k3_difference[ra.n]),
        ]);
    }
    doc.write_to(out)
}

fn heatmap<R: Real>(cfg: &RunConfig, out: &Path) -> anyhow::Result<()> {
    let grid = resolution_heatmap::<R>(
        cfg.delta,
        &axis(cfg)?,
        &map_params(cfg),
        cfg.resolution,
        cfg.n_max,
        cfg.threshold,
    )?;
    let code = |c: &HeatmapCell| -> i64 {
        match c {
            HeatmapCell::Reached(n) => *n as i64,
            HeatmapCell::NotReached => -1,
            HeatmapCell::InvalidPair => -2,
            HeatmapCell::OutsideChart => -3,
        }
    };
    if cfg.format == "json" {
        let cells: Vec<i64> = grid.cells.iter().map(code).collect();
        return write_json(
            out,
            cfg,
            json!({
                "resolution": grid.resolution,
                "encoding": "row-major over [-1,1]^2; n>=0 first detection, -1 not reached, -2 invalid pair, -3 outside chart",
                "cells": cells,
            }),
        );
    }
    let notes = vec![
        "iterations: n >= 0 first detection, -1 not reached, -2 invalid pair, -3 outside chart"
            .to_string(),
    ];
    let mut doc = CsvDoc::new(cfg, &notes, &["re", "im", "iterations"]);
    let pitch = 2.0 / cfg.resolution as f64;
    for row in 0..cfg.resolution {
        let im = -1.0 + (row as f64 + 0.5) * pitch;
        for col in 0..cfg.resolution {
            let re = -1.0 + (col as f64 + 0.5) * pitch;
            doc.row(&[
                fmt_f64(re),
                fmt_f64(im),
                code(&grid.at(col, row)).to_string(),
            ]);
        }
    }
    doc.write_to(out)
}

/// Colatitude-gap histograms under the squaring map.
fn histogram_fatou<R: Real>(cfg: &RunConfig, out: &Path) -> anyhow::Result<()> {
    let pairs: Vec<StatePair<R>> = match cfg.pair_mode.as_str() {
        "delta" => straddling_pairs(cfg.ensemble, cfg.delta, cfg.seed)?,
        _ => {
            // independent uniform pairs; their separation is whatever it is
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            (0..cfg.ensemble)
                .map(|_| {
                    let draw = |rng: &mut ChaCha8Rng| -> anyhow::Result<ProjectiveQubit<R>> {
                        let u: f64 = rng.random_range(-1.0f64..1.0);
                        let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                        Ok(SpherePoint::<R>::from_f64(u.acos(), phi)?.to_state())
                    };
                    let a = draw(&mut rng)?;
                    let b = draw(&mut rng)?;
                    let delta = geodesic_distance(&a, &b);
                    Ok(StatePair::new(a, b, delta)?)
                })
                .collect::<anyhow::Result<_>>()?
        }
    };
    let mut at = cfg.histogram_at.clone();
    at.retain(|&n| n <= cfg.n_max);
    let report = strategy_a_run(&pairs, cfg.n_max, &at, cfg.bins)?;
    if cfg.format == "json" {
        let histograms: Vec<_> = report
            .histograms
            .iter()
            .map(|h| json!({"iteration": h.iteration, "fractions": h.fractions}))
            .collect();
        return write_json(out, cfg, json!({ "bins": cfg.bins, "histograms": histograms }));
    }
    let mut doc = CsvDoc::new(cfg, &[], &["iteration", "bin_low", "bin_high", "fraction"]);
    for h in &report.histograms {
        for (b, frac) in h.fractions.iter().enumerate() {
            let lo = b as f64 / cfg.bins as f64;
            let hi = (b + 1) as f64 / cfg.bins as f64;
            doc.row(&[h.iteration.to_string(), fmt_f64(lo), fmt_f64(hi), fmt_f64(*frac)]);
        }
    }
    doc.write_to(out)
}

fn precision_probe<R: Real>(cfg: &RunConfig, out: &Path) -> anyhow::Result<()> {
    let digits: Vec<u32> = (cfg.digits_min..=cfg.digits_max).collect();
    let points = machine_precision_probe::<R>(&digits, cfg.n_max)?;
    if cfg.format == "json" {
        let rows: Vec<_> = points
            .iter()
            .map(|p| json!({"digits": p.digits, "critical_iteration": p.critical}))
            .collect();
        return write_json(out, cfg, json!({ "points": rows }));
    }
    let notes = vec!["critical_n: -1 means the gap never became macroscopic".to_string()];
    let mut doc = CsvDoc::new(cfg, &notes, &["digits", "critical_n"]);
    for p in points {
        doc.row(&[
            p.digits.to_string(),
            p.critical.map_or(-1i64, |n| n as i64).to_string(),
        ]);
    }
    doc.write_to(out)
}

fn raster_for<R: Real>(cfg: &RunConfig) -> anyhow::Result<blochmap::fractal::JuliaRaster> {
    Ok(julia_raster::<R>(
        &map_params(cfg),
        Window::square(cfg.half_width),
        cfg.resolution,
        cfg.horizon,
        cfg.threshold,
        cfg.perturb,
    )?)
}

fn julia<R: Real>(cfg: &RunConfig, out: &Path) -> anyhow::Result<()> {
    let raster = raster_for::<R>(cfg)?;
    let mut file = std::fs::File::create(out)
        .with_context(|| format!("creating {}", out.display()))?;
    write_pgm(&raster, &mut file)?;
    eprintln!(
        "julia: s = {}, occupancy {:.4}, written to {}",
        cfg.s,
        raster.occupancy(),
        out.display()
    );
    Ok(())
}

fn boxdim<R: Real>(cfg: &RunConfig, out: &Path) -> anyhow::Result<()> {
    let raster = raster_for::<R>(cfg)?;
    let dim = box_dimension(&raster, &default_scales(cfg.resolution))?;
    if cfg.format == "json" {
        let counts: Vec<_> = dim
            .counts
            .iter()
            .map(|(b, n)| json!({"box_px": b, "occupied": n}))
            .collect();
        return write_json(
            out,
            cfg,
            json!({
                "dimension": dim.dimension,
                "r_squared": dim.r_squared,
                "counts": counts,
                "residuals": dim.residuals,
            }),
        );
    }
    let notes = vec![
        format!("dimension: {}", fmt_f64(dim.dimension)),
        format!("r_squared: {}", fmt_f64(dim.r_squared)),
    ];
    let mut doc = CsvDoc::new(cfg, &notes, &["box_px", "epsilon", "occupied"]);
    for (b, n) in &dim.counts {
        doc.row(&[
            b.to_string(),
            fmt_f64(*b as f64 / cfg.resolution as f64),
            n.to_string(),
        ]);
    }
    doc.write_to(out)
}

/// Circuit-vs-map equivalence sweep plus a resource-accounting chain.
fn circuit_verify<R: Real>(cfg: &RunConfig, out: &Path) -> anyhow::Result<()> {
    let params = map_params::<R>(cfg);
    let gates = build_gates(&params);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut worst_state = 0.0f64;
    let mut worst_prob = 0.0f64;
    for _ in 0..cfg.samples {
        let u: f64 = rng.random_range(-1.0f64..1.0);
        let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let st = SpherePoint::<R>::from_f64(u.acos(), phi)?.to_state();
        let (via_circuit, p) = iterate_via_circuit(&st, &params)?;
        let direct = apply_map(&st, &params)?;
        worst_state = worst_state
            .max(blochmap::bloch::chordal_distance(&via_circuit, &direct).to_f64());
        if params.is_imaginary_axis() {
            let closed = success_probability(&st, &params)?;
            worst_prob = worst_prob.max((p - closed).abs().to_f64());
        }
    }
    // per-iteration success probabilities and the resource estimate for one
    // seeded chain of length n_max (capped to keep the product in range)
    let chain_len = cfg.n_max.min(60);
    let u: f64 = rng.random_range(-1.0f64..1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let mut st = SpherePoint::<R>::from_f64(u.acos(), phi)?.to_state();
    let mut per_iteration = Vec::with_capacity(chain_len);
    let mut resource = 1.0f64;
    for _ in 0..chain_len {
        let (next, p) = iterate_via_circuit(&st, &params)?;
        per_iteration.push(p.to_f64());
        resource *= 2.0 / p.to_f64();
        st = next;
    }
    write_json(
        out,
        cfg,
        json!({
            "s": cfg.s,
            "samples": cfg.samples,
            "max_projective_deviation": worst_state,
            "max_probability_deviation": worst_prob,
            "u_xor_unitary": gates.u_xor.unitary,
            "u_gate_unitary": gates.u_gate.unitary,
            "u_gate_unitarity_deviation": gates.u_gate.deviation_from_unitarity(),
            "n": chain_len,
            "per_iteration_success": per_iteration,
            "resource_estimate": resource,
        }),
    )
}

/// Success probability profile over colatitude, plus the sphere average.
fn success_prob<R: Real>(cfg: &RunConfig, out: &Path) -> anyhow::Result<()> {
    let params = map_params::<R>(cfg);
    if !params.is_imaginary_axis() {
        bail!("success-prob needs s on the imaginary axis");
    }
    let mut rows = Vec::with_capacity(cfg.points);
    for k in 0..cfg.points {
        let theta = (k as f64 + 0.5) * std::f64::consts::PI / cfg.points as f64;
        let st = SpherePoint::<R>::from_f64(theta, 0.0)?.to_state();
        rows.push((theta, success_probability(&st, &params)?.to_f64()));
    }
    // area-weighted sphere average
    let n = 100;
    let mut sum = 0.0;
    for i in 0..n {
        let u = -1.0 + (i as f64 + 0.5) * 2.0 / n as f64;
        let st = SpherePoint::<R>::from_f64(u.acos(), 0.0)?.to_state();
        sum += success_probability(&st, &params)?.to_f64();
    }
    let average = sum / n as f64;
    if cfg.format == "json" {
        let curve: Vec<_> = rows.iter().map(|(t, p)| json!({"theta": t, "p": p})).collect();
        return write_json(out, cfg, json!({ "curve": curve, "sphere_average": average }));
    }
    let notes = vec![format!("sphere_average: {}", fmt_f64(average))];
    let mut doc = CsvDoc::new(cfg, &notes, &["theta", "p_success"]);
    for (t, p) in rows {
        doc.row(&[fmt_f64(t), fmt_f64(p)]);
    }
    doc.write_to(out)
}
