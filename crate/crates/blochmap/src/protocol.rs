//! End-to-end discrimination strategies and diagnostics.
//!
//! Strategy A (s = 0): equator-separated pairs flow to opposite poles; the
//! average fidelity collapses and the colatitude-gap histogram splits into
//! co-linear and orthogonal bins. Strategy B (s = i): the difference of the
//! partners' K₃ series becomes macroscopic after enough iterations for any
//! pair, anywhere on the sphere.

use crate::bloch::{fidelity, pair_at_delta, ProjectiveQubit, SpherePoint, StatePair};
use crate::circuit::success_probability_angular;
use crate::dynamics::{apply_map, iterate, MapParams};
use crate::ensemble::{
    critical_iteration, rxy_vs_iteration, EnsembleSpec, Region, RxySeries, Sampling,
};
use crate::error::{Error, Result};
use crate::leggett_garg::{
    k3_records_from_parts, observable_expectation, ObservableAxis, TransitionTables,
};
use crate::scalar::Real;
use rayon::prelude::*;

/// |θ₁ − θ₂| / π of a pair of states: 0 = co-linear, 1 = orthogonal poles.
pub fn colatitude_gap<R: Real>(a: &ProjectiveQubit<R>, b: &ProjectiveQubit<R>) -> f64 {
    let ta = a.sphere_point().theta.to_f64();
    let tb = b.sphere_point().theta.to_f64();
    (ta - tb).abs() / std::f64::consts::PI
}

#[derive(Debug, Clone)]
pub struct AngleGapHistogram {
    pub iteration: usize,
    /// Per-pair |θ₁−θ₂|/π, in input order.
    pub gaps: Vec<f64>,
    /// Fraction of pairs per bin over [0, 1].
    pub fractions: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct StrategyAReport {
    pub mean_fidelity: Vec<f64>,
    pub std_fidelity: Vec<f64>,
    pub histograms: Vec<AngleGapHistogram>,
}

/// Evolve pairs under s = 0, tracking average fidelity per iteration and
/// colatitude-gap histograms at the requested iterations.
pub fn strategy_a_run<R: Real>(
    pairs: &[StatePair<R>],
    n_max: usize,
    histogram_at: &[usize],
    bins: usize,
) -> Result<StrategyAReport> {
    if pairs.is_empty() || bins == 0 {
        return Err(Error::InvalidArgument("need pairs and at least one bin".into()));
    }
    let params = MapParams::squaring();
    struct Row {
        fid: Vec<f64>,
        gaps: Vec<f64>, // one per histogram snapshot
    }
    let rows: Vec<Row> = pairs
        .par_iter()
        .map(|pair| -> Result<Row> {
            let mut a = pair.a;
            let mut b = pair.b;
            let mut fid = Vec::with_capacity(n_max + 1);
            let mut gaps = Vec::with_capacity(histogram_at.len());
            for n in 0..=n_max {
                fid.push(fidelity(&a, &b).to_f64());
                if histogram_at.contains(&n) {
                    gaps.push(colatitude_gap(&a, &b));
                }
                if n < n_max {
                    a = apply_map(&a, &params)?;
                    b = apply_map(&b, &params)?;
                }
            }
            Ok(Row { fid, gaps })
        })
        .collect::<Result<_>>()?;
    let l = rows.len() as f64;
    let mut mean = Vec::with_capacity(n_max + 1);
    let mut std_dev = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let m = rows.iter().map(|r| r.fid[n]).sum::<f64>() / l;
        let v = rows.iter().map(|r| (r.fid[n] - m) * (r.fid[n] - m)).sum::<f64>() / l;
        mean.push(m);
        std_dev.push(v.sqrt());
    }
    let histograms = histogram_at
        .iter()
        .enumerate()
        .map(|(hi, &iteration)| {
            let gaps: Vec<f64> = rows.iter().map(|r| r.gaps[hi]).collect();
            let mut counts = vec![0usize; bins];
            for &g in &gaps {
                let idx = ((g * bins as f64) as usize).min(bins - 1);
                counts[idx] += 1;
            }
            let fractions = counts.iter().map(|&c| c as f64 / l).collect();
            AngleGapHistogram { iteration, gaps, fractions }
        })
        .collect();
    Ok(StrategyAReport { mean_fidelity: mean, std_fidelity: std_dev, histograms })
}

#[derive(Debug, Clone)]
pub struct DiscriminationVerdict {
    pub distinguishable: bool,
    pub first_nonzero_iteration: Option<usize>,
    /// ΔK₃(n) for n = 0..=n_max; entry 0 is the ⟨Q⟩ difference of the
    /// unevolved pair, matching the zeroth-iteration convention of r_XY.
    pub k3_difference: Vec<f64>,
    pub threshold: f64,
}

fn dk3_series_with_tables<R: Real>(
    pair: &StatePair<R>,
    axis: &ObservableAxis<R>,
    params: &MapParams<R>,
    tables: &TransitionTables<R>,
    n_max: usize,
) -> Result<Vec<f64>> {
    let orbit_a = iterate(&pair.a, params, n_max)?;
    let orbit_b = iterate(&pair.b, params, n_max)?;
    let rec_a = k3_records_from_parts(&orbit_a, axis, tables, n_max);
    let rec_b = k3_records_from_parts(&orbit_b, axis, tables, n_max);
    let mut diff = Vec::with_capacity(n_max + 1);
    diff.push(
        (observable_expectation(&pair.a, axis) - observable_expectation(&pair.b, axis)).to_f64(),
    );
    for (ra, rb) in rec_a.iter().zip(&rec_b) {
        diff.push((ra.k3 - rb.k3).to_f64());
    }
    Ok(diff)
}

/// ΔK₃ discrimination of one pair: the verdict fires at the first
/// |ΔK₃(n)| > threshold.
pub fn strategy_b_discriminate<R: Real>(
    pair: &StatePair<R>,
    axis: &ObservableAxis<R>,
    params: &MapParams<R>,
    n_max: usize,
    threshold: f64,
) -> Result<DiscriminationVerdict> {
    let tables = TransitionTables::build(axis, params, 2 * n_max)?;
    let k3_difference = dk3_series_with_tables(pair, axis, params, &tables, n_max)?;
    let first = k3_difference.iter().position(|d| d.abs() > threshold);
    Ok(DiscriminationVerdict {
        distinguishable: first.is_some(),
        first_nonzero_iteration: first,
        k3_difference,
        threshold,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeatmapCell {
    /// Pixel center outside the unit disk (northern hemisphere not charted).
    OutsideChart,
    /// Partner colatitude would leave the sphere (cell within δ of the pole).
    InvalidPair,
    Reached(usize),
    NotReached,
}

#[derive(Debug, Clone)]
pub struct HeatmapGrid {
    pub resolution: usize,
    pub delta: f64,
    pub threshold: f64,
    pub n_max: usize,
    /// Row-major over [−1, 1]², row 0 at Im z = −1.
    pub cells: Vec<HeatmapCell>,
}

impl HeatmapGrid {
    pub fn at(&self, col: usize, row: usize) -> HeatmapCell {
        self.cells[row * self.resolution + col]
    }
}

/// Minimum iterations to a non-zero ΔK₃ for a pair anchored at each cell of
/// the southern-hemisphere chart (unit disk |z| ≤ 1; the stable manifold
/// point z = 1 sits on the rim).
pub fn resolution_heatmap<R: Real>(
    delta: f64,
    axis: &ObservableAxis<R>,
    params: &MapParams<R>,
    resolution: usize,
    n_max: usize,
    threshold: f64,
) -> Result<HeatmapGrid> {
    if resolution < 2 {
        return Err(Error::InvalidArgument("heatmap resolution must be >= 2".into()));
    }
    let tables = TransitionTables::build(axis, params, 2 * n_max)?;
    let pitch = 2.0 / resolution as f64;
    let cells: Vec<HeatmapCell> = (0..resolution * resolution)
        .into_par_iter()
        .map(|idx| -> Result<HeatmapCell> {
            let row = idx / resolution;
            let col = idx % resolution;
            let x = -1.0 + (col as f64 + 0.5) * pitch;
            let y = -1.0 + (row as f64 + 0.5) * pitch;
            let modulus = (x * x + y * y).sqrt();
            if modulus > 1.0 {
                return Ok(HeatmapCell::OutsideChart);
            }
            // |z| = cot(theta/2) <= 1 is the southern hemisphere
            let theta = 2.0 * 1.0f64.atan2(modulus);
            let phi = y.atan2(x).rem_euclid(std::f64::consts::TAU);
            let base = match SpherePoint::<R>::from_f64(theta, phi) {
                Ok(p) => p,
                Err(_) => return Ok(HeatmapCell::InvalidPair),
            };
            let pair = match pair_at_delta(base, R::from_f64(delta)) {
                Ok(p) => p,
                Err(Error::OutOfRange { .. }) => return Ok(HeatmapCell::InvalidPair),
                Err(e) => return Err(e),
            };
            let diff = dk3_series_with_tables(&pair, axis, params, &tables, n_max)?;
            Ok(match diff.iter().position(|d| d.abs() > threshold) {
                Some(n) => HeatmapCell::Reached(n),
                None => HeatmapCell::NotReached,
            })
        })
        .collect::<Result<_>>()?;
    Ok(HeatmapGrid { resolution, delta, threshold, n_max, cells })
}

#[derive(Debug, Clone)]
pub struct PatchReport {
    pub rxy: RxySeries,
    /// Analytic minimum of the single-step success probability over the patch.
    pub min_single_step_success: f64,
    pub saturation: Option<usize>,
    /// min_single_step_success raised to the saturation horizon (n_max when
    /// saturation was not reached).
    pub cumulative_success_bound: f64,
}

/// r_XY over a polar-patch ensemble together with the success-probability
/// budget of running the protocol there.
#[allow(clippy::too_many_arguments)]
pub fn patch_success_optimization<R: Real>(
    theta_max: f64,
    delta: f64,
    size: usize,
    seed: u64,
    axis: &ObservableAxis<R>,
    params: &MapParams<R>,
    n_max: usize,
    epsilon: f64,
    window: usize,
) -> Result<PatchReport> {
    let spec = EnsembleSpec {
        size,
        region: Region::PolarPatch { theta_max },
        sampling: Sampling::SeededUniform,
        delta,
        seed,
    };
    let rxy = rxy_vs_iteration(&spec, axis, params, n_max)?;
    // p(θ) = ¼(3 + cos 2θ) decreases on [0, π/2]
    let worst_theta = theta_max.min(std::f64::consts::FRAC_PI_2);
    let min_single_step_success = success_probability_angular(worst_theta);
    let saturation = match critical_iteration(&rxy.values, epsilon, window) {
        Ok(n) => Some(n),
        Err(Error::NotReached) => None,
        Err(e) => return Err(e),
    };
    let horizon = saturation.unwrap_or(n_max) as i32;
    Ok(PatchReport {
        rxy,
        min_single_step_success,
        saturation,
        cumulative_success_bound: min_single_step_success.powi(horizon),
    })
}

#[derive(Debug, Clone, Copy)]
pub struct PrecisionPoint {
    pub digits: u32,
    /// First iteration with |θ₁−θ₂|/π > 0.5, if any.
    pub critical: Option<usize>,
}

/// Machine-precision probe via strategy A: an equator-straddling pair at
/// δ = 10^−digits under s = 0, run until the gap is macroscopic. Raw data for
/// any downstream extrapolation; no fit is performed here.
pub fn machine_precision_probe<R: Real>(
    digits: &[u32],
    n_max: usize,
) -> Result<Vec<PrecisionPoint>> {
    if digits.len() < 2 {
        return Err(Error::InvalidArgument("need at least two precision settings".into()));
    }
    let params = MapParams::<R>::squaring();
    digits
        .iter()
        .map(|&p| -> Result<PrecisionPoint> {
            let delta = R::from_f64(10f64.powi(-(p as i32)));
            let two = R::from_f64(2.0);
            let base = SpherePoint::new(R::half_pi() - delta / two, R::zero())?;
            let pair = pair_at_delta(base, delta)?;
            let mut a = pair.a;
            let mut b = pair.b;
            let mut critical = None;
            for n in 0..=n_max {
                if colatitude_gap(&a, &b) > 0.5 {
                    critical = Some(n);
                    break;
                }
                if n < n_max {
                    a = apply_map(&a, &params)?;
                    b = apply_map(&b, &params)?;
                }
            }
            Ok(PrecisionPoint { digits: p, critical })
        })
        .collect()
}
