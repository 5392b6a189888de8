//! Ensembles of state pairs and the statistical diagnostics over them:
//! Pearson r_XY between partner K₃ series, average fidelity curves, and the
//! saturation ("critical iteration") extraction.
//!
//! Sampling happens in `f64` angle space with a seeded ChaCha stream (or a
//! deterministic lattice) and is lifted into the working precision when the
//! spinors are built, so both precision modes see identical ensembles.
//! Evaluation parallelizes over members; reductions run in index order, so
//! results do not depend on the thread count.

use crate::bloch::{fidelity, pair_at_delta, SpherePoint, StatePair};
use crate::dynamics::{apply_map, iterate, MapParams};
use crate::error::{Error, Result};
use crate::leggett_garg::{
    k3_records_from_parts, observable_expectation, ObservableAxis, TransitionTables,
};
use crate::scalar::Real;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    WholeSphere,
    /// Colatitudes [0, theta_max].
    PolarPatch { theta_max: f64 },
    /// Colatitudes [theta_min, theta_max].
    Band { theta_min: f64, theta_max: f64 },
}

impl Region {
    fn theta_bounds(&self) -> (f64, f64) {
        match *self {
            Region::WholeSphere => (0.0, std::f64::consts::PI),
            Region::PolarPatch { theta_max } => (0.0, theta_max),
            Region::Band { theta_min, theta_max } => (theta_min, theta_max),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    /// Midpoint lattice, equal steps in colatitude × azimuth (the measure the
    /// closed-form r_XY(0) = cos δ is derived in). Out-of-range pairs near the
    /// south pole are skipped and counted.
    Grid,
    /// Area-uniform random points; out-of-range draws are resampled.
    SeededUniform,
}

#[derive(Debug, Clone, Copy)]
pub struct EnsembleSpec {
    pub size: usize,
    pub region: Region,
    pub sampling: Sampling,
    pub delta: f64,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        if self.size < 2 {
            return Err(Error::InvalidArgument("ensemble size must be >= 2".into()));
        }
        if !(0.0..=std::f64::consts::PI).contains(&self.delta) {
            return Err(Error::InvalidArgument(format!(
                "delta {} outside [0, pi]",
                self.delta
            )));
        }
        let (lo, hi) = self.region.theta_bounds();
        if !(0.0..=std::f64::consts::PI).contains(&lo)
            || !(0.0..=std::f64::consts::PI).contains(&hi)
            || lo >= hi
        {
            return Err(Error::InvalidArgument("bad region bounds".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct SampledEnsemble<R> {
    pub pairs: Vec<StatePair<R>>,
    /// Grid points dropped because the partner colatitude would exceed π.
    pub skipped: usize,
}

pub fn sample_ensemble<R: Real>(spec: &EnsembleSpec) -> Result<SampledEnsemble<R>> {
    spec.validate()?;
    let (lo, hi) = spec.region.theta_bounds();
    let delta_r = R::from_f64(spec.delta);
    let mut pairs = Vec::with_capacity(spec.size);
    let mut skipped = 0usize;
    match spec.sampling {
        Sampling::Grid => {
            let n = (spec.size as f64).sqrt().round().max(1.0) as usize;
            let dt = (hi - lo) / n as f64;
            let dp = std::f64::consts::TAU / n as f64;
            for i in 0..n {
                let theta = lo + (i as f64 + 0.5) * dt;
                if theta + spec.delta > std::f64::consts::PI {
                    skipped += n;
                    continue;
                }
                for j in 0..n {
                    let phi = j as f64 * dp;
                    let base = SpherePoint::<R>::from_f64(theta, phi)?;
                    match pair_at_delta(base, delta_r) {
                        Ok(p) => pairs.push(p),
                        Err(Error::OutOfRange { .. }) => skipped += 1,
                        Err(e) => return Err(e),
                    }
                }
            }
        }
        Sampling::SeededUniform => {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            let (u_lo, u_hi) = (hi.cos(), lo.cos());
            while pairs.len() < spec.size {
                let u: f64 = rng.random_range(u_lo..=u_hi);
                let theta = u.clamp(-1.0, 1.0).acos();
                let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                if theta + spec.delta > std::f64::consts::PI {
                    continue; // resample; the draw stays seeded and deterministic
                }
                let base = SpherePoint::<R>::from_f64(theta, phi)?;
                match pair_at_delta(base, delta_r) {
                    Ok(p) => pairs.push(p),
                    Err(Error::OutOfRange { .. }) => continue,
                    Err(e) => return Err(e),
                }
            }
        }
    }
    if pairs.len() < 2 {
        return Err(Error::InvalidArgument(
            "fewer than two pairs survived sampling".into(),
        ));
    }
    Ok(SampledEnsemble { pairs, skipped })
}

/// Per-state scalar series over iterations, row per ensemble member.
#[derive(Debug, Clone)]
pub struct SeriesMatrix {
    pub label: &'static str,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl SeriesMatrix {
    pub fn column(&self, c: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.rows).map(move |r| self.data[r * self.cols + c])
    }
}

/// Sample Pearson correlation; errors distinctly on zero variance.
pub fn pearson_rxy(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidArgument(
            "pearson needs two samples of equal length >= 2".into(),
        ));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 {
        return Err(Error::ZeroVariance { side: "X" });
    }
    if syy == 0.0 {
        return Err(Error::ZeroVariance { side: "Y" });
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// K₃ series matrix for a set of initial states: column 0 is ⟨Q(0)⟩, column n
/// the three-time K₃(n). Transition tables are built once and shared.
pub fn k3_matrix<R: Real>(
    states: &[crate::bloch::ProjectiveQubit<R>],
    axis: &ObservableAxis<R>,
    params: &MapParams<R>,
    n_max: usize,
) -> Result<SeriesMatrix> {
    let tables = TransitionTables::build(axis, params, 2 * n_max)?;
    let cols = n_max + 1;
    let rows: Vec<Vec<f64>> = states
        .par_iter()
        .map(|st| -> Result<Vec<f64>> {
            let orbit = iterate(st, params, n_max)?;
            let mut row = Vec::with_capacity(cols);
            row.push(observable_expectation(st, axis).to_f64());
            for rec in k3_records_from_parts(&orbit, axis, &tables, n_max) {
                row.push(rec.k3.to_f64());
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let mut data = Vec::with_capacity(states.len() * cols);
    for row in rows {
        data.extend(row);
    }
    Ok(SeriesMatrix { label: "k3", rows: states.len(), cols, data })
}

#[derive(Debug, Clone)]
pub struct RxySeries {
    /// r_XY(n) for n = 0..=n_max; NaN where a side had zero variance.
    pub values: Vec<f64>,
    /// Iterations where the correlation was undefined (zero variance).
    pub zero_variance_at: Vec<usize>,
    pub skipped_pairs: usize,
}

pub fn rxy_vs_iteration<R: Real>(
    spec: &EnsembleSpec,
    axis: &ObservableAxis<R>,
    params: &MapParams<R>,
    n_max: usize,
) -> Result<RxySeries> {
    let ensemble = sample_ensemble::<R>(spec)?;
    let bases: Vec<_> = ensemble.pairs.iter().map(|p| p.a).collect();
    let partners: Vec<_> = ensemble.pairs.iter().map(|p| p.b).collect();
    let xm = k3_matrix(&bases, axis, params, n_max)?;
    let ym = k3_matrix(&partners, axis, params, n_max)?;
    let mut values = Vec::with_capacity(n_max + 1);
    let mut zero_variance_at = Vec::new();
    for n in 0..=n_max {
        let x: Vec<f64> = xm.column(n).collect();
        let y: Vec<f64> = ym.column(n).collect();
        match pearson_rxy(&x, &y) {
            Ok(r) => values.push(r),
            Err(Error::ZeroVariance { .. }) => {
                zero_variance_at.push(n);
                values.push(f64::NAN);
            }
            Err(e) => return Err(e),
        }
    }
    Ok(RxySeries { values, zero_variance_at, skipped_pairs: ensemble.skipped })
}

#[derive(Debug, Clone)]
pub struct FidelityStats {
    pub mean: Vec<f64>,
    pub std_dev: Vec<f64>,
    pub skipped_pairs: usize,
}

/// Mean and population standard deviation of pair fidelity per iteration.
pub fn average_fidelity_vs_iteration<R: Real>(
    spec: &EnsembleSpec,
    params: &MapParams<R>,
    n_max: usize,
) -> Result<FidelityStats> {
    let ensemble = sample_ensemble::<R>(spec)?;
    let stats = fidelity_stats_for_pairs(&ensemble.pairs, params, n_max)?;
    Ok(FidelityStats {
        mean: stats.0,
        std_dev: stats.1,
        skipped_pairs: ensemble.skipped,
    })
}

pub(crate) fn fidelity_stats_for_pairs<R: Real>(
    pairs: &[StatePair<R>],
    params: &MapParams<R>,
    n_max: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let rows: Vec<Vec<f64>> = pairs
        .par_iter()
        .map(|pair| -> Result<Vec<f64>> {
            let mut a = pair.a;
            let mut b = pair.b;
            let mut row = Vec::with_capacity(n_max + 1);
            row.push(fidelity(&a, &b).to_f64());
            for _ in 0..n_max {
                a = apply_map(&a, params)?;
                b = apply_map(&b, params)?;
                row.push(fidelity(&a, &b).to_f64());
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let l = rows.len() as f64;
    let mut mean = Vec::with_capacity(n_max + 1);
    let mut std_dev = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let m = rows.iter().map(|r| r[n]).sum::<f64>() / l;
        let v = rows.iter().map(|r| (r[n] - m) * (r[n] - m)).sum::<f64>() / l;
        mean.push(m);
        std_dev.push(v.sqrt());
    }
    Ok((mean, std_dev))
}

/// Smallest n with |series[m]| < epsilon for all m in [n, n+window).
/// NaN entries never satisfy the band.
pub fn critical_iteration(series: &[f64], epsilon: f64, window: usize) -> Result<usize> {
    if window == 0 || series.len() <= window {
        return Err(Error::InvalidArgument(
            "need series length > window >= 1".into(),
        ));
    }
    'outer: for n in 0..=series.len() - window {
        for m in n..n + window {
            if !(series[m].abs() < epsilon) {
                continue 'outer;
            }
        }
        return Ok(n);
    }
    Err(Error::NotReached)
}
