//! Julia-set rasterization and box-counting dimension.
//!
//! Membership is an orbit-separation test, not an escape-time test: the map
//! is rational on the sphere and orbits need not escape for any s ≠ 0. Each
//! pixel launches two free orbits — the pixel center and a half-diagonal
//! partner — and the pixel is flagged when their running maximum chordal
//! separation exceeds the threshold within the horizon. Points straddling the
//! Julia set diverge to macroscopic separation; Fatou neighbors fall into the
//! same basin and stay close.

use crate::bloch::{chordal_distance, ProjectiveQubit};
use crate::complex::ExtComplex;
use crate::dynamics::{apply_map, MapParams};
use crate::error::{Error, Result};
use crate::scalar::Real;
use rayon::prelude::*;
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Window {
    pub fn square(half_width: f64) -> Self {
        Window {
            re_min: -half_width,
            re_max: half_width,
            im_min: -half_width,
            im_max: half_width,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.re_min < self.re_max && self.im_min < self.im_max)
            || !self.re_min.is_finite()
            || !self.re_max.is_finite()
            || !self.im_min.is_finite()
            || !self.im_max.is_finite()
        {
            return Err(Error::InvalidArgument("window must be finite and nonempty".into()));
        }
        Ok(())
    }
}

pub const DEFAULT_WINDOW_HALF_WIDTH: f64 = 2.0;
pub const DEFAULT_RESOLUTION: usize = 1024;
pub const DEFAULT_HORIZON: usize = 200;
/// Quarter of the sphere diameter: well above basin-internal transients,
/// well below the saturation scale of decorrelated chaotic orbits.
pub const DEFAULT_SEPARATION_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone)]
pub struct JuliaRaster {
    pub window: Window,
    pub resolution: usize,
    /// Row-major, row 0 at im_min; true = Julia-set candidate.
    pub mask: Vec<bool>,
    pub s: (f64, f64),
    pub horizon: usize,
    pub threshold: f64,
    /// Partner offset actually used (pixel half-diagonal unless overridden).
    pub perturbation: f64,
}

impl JuliaRaster {
    pub fn at(&self, col: usize, row: usize) -> bool {
        self.mask[row * self.resolution + col]
    }

    pub fn occupancy(&self) -> f64 {
        self.mask.iter().filter(|&&b| b).count() as f64 / self.mask.len() as f64
    }
}

pub fn julia_raster<R: Real>(
    params: &MapParams<R>,
    window: Window,
    resolution: usize,
    horizon: usize,
    threshold: f64,
    perturbation: Option<f64>,
) -> Result<JuliaRaster> {
    window.validate()?;
    if resolution < 16 {
        return Err(Error::InvalidArgument("resolution must be >= 16".into()));
    }
    if horizon < 10 {
        return Err(Error::InvalidArgument("horizon must be >= 10".into()));
    }
    let dx = (window.re_max - window.re_min) / resolution as f64;
    let dy = (window.im_max - window.im_min) / resolution as f64;
    let offset = perturbation.unwrap_or_else(|| (dx * dx + dy * dy).sqrt() / 2.0);
    let (ox, oy) = {
        let diag = (dx * dx + dy * dy).sqrt();
        (offset * dx / diag, offset * dy / diag)
    };
    let thr = R::from_f64(threshold);
    let mask: Vec<bool> = (0..resolution)
        .into_par_iter()
        .flat_map_iter(|row| {
            let im = window.im_min + (row as f64 + 0.5) * dy;
            (0..resolution).map(move |col| {
                let re = window.re_min + (col as f64 + 0.5) * dx;
                pixel_is_sensitive::<R>(re, im, ox, oy, params, horizon, thr)
            })
        })
        .collect();
    Ok(JuliaRaster {
        window,
        resolution,
        mask,
        s: params.s.to_f64(),
        horizon,
        threshold,
        perturbation: offset,
    })
}

fn pixel_is_sensitive<R: Real>(
    re: f64,
    im: f64,
    ox: f64,
    oy: f64,
    params: &MapParams<R>,
    horizon: usize,
    threshold: R,
) -> bool {
    let mut a: ProjectiveQubit<R> = ProjectiveQubit::from_plane_f64(re, im);
    let mut b: ProjectiveQubit<R> = ProjectiveQubit::from_plane_f64(re + ox, im + oy);
    for _ in 0..horizon {
        let d = chordal_distance(&a, &b);
        if d > threshold {
            return true;
        }
        if d == R::zero() {
            return false; // orbits merged exactly; they cannot separate again
        }
        // a degenerate image is the exceptional singular point: maximally sensitive
        a = match apply_map(&a, params) {
            Ok(next) => next,
            Err(_) => return true,
        };
        b = match apply_map(&b, params) {
            Ok(next) => next,
            Err(_) => return true,
        };
    }
    chordal_distance(&a, &b) > threshold
}

#[derive(Debug, Clone)]
pub struct BoxDimension {
    pub dimension: f64,
    pub r_squared: f64,
    /// (box size in pixels, occupied boxes) per scale.
    pub counts: Vec<(usize, usize)>,
    /// Fit residuals in log-count space, one per scale.
    pub residuals: Vec<f64>,
}

/// Box sizes 2⁻³…2⁻⁹ of the window width, in pixels; for small rasters the
/// range extends toward 2⁻¹ until it spans the 1.5 decades the fit needs.
pub fn default_scales(resolution: usize) -> Vec<usize> {
    let mut scales: Vec<usize> = (3..=9).map(|k| resolution >> k).filter(|&b| b >= 1).collect();
    scales.dedup();
    let span_ok = |s: &[usize]| {
        s.first().zip(s.last()).is_some_and(|(&hi, &lo)| hi as f64 / lo as f64 >= 10f64.powf(1.5))
    };
    while !span_ok(&scales) {
        let bigger = scales.first().copied().unwrap_or(1) * 2;
        if bigger > resolution / 2 {
            break;
        }
        scales.insert(0, bigger);
    }
    scales
}

/// Least-squares slope of log N(ε) against log(1/ε) over occupied boxes.
pub fn box_dimension(raster: &JuliaRaster, scales_px: &[usize]) -> Result<BoxDimension> {
    if scales_px.len() < 4 {
        return Err(Error::InvalidArgument("need at least 4 box scales".into()));
    }
    let (lo, hi) = scales_px
        .iter()
        .fold((usize::MAX, 0), |(lo, hi), &s| (lo.min(s), hi.max(s)));
    if lo == 0 || (hi as f64 / lo as f64) < 10f64.powf(1.5) {
        return Err(Error::InvalidArgument(
            "box scales must span at least 1.5 decades".into(),
        ));
    }
    let res = raster.resolution;
    let mut counts = Vec::with_capacity(scales_px.len());
    let mut xs = Vec::with_capacity(scales_px.len());
    let mut ys = Vec::with_capacity(scales_px.len());
    for &b in scales_px {
        let nb = res.div_ceil(b);
        let mut occupied = 0usize;
        for by in 0..nb {
            'boxes: for bx in 0..nb {
                for row in (by * b)..((by + 1) * b).min(res) {
                    for col in (bx * b)..((bx + 1) * b).min(res) {
                        if raster.at(col, row) {
                            occupied += 1;
                            continue 'boxes;
                        }
                    }
                }
            }
        }
        if occupied == 0 {
            return Err(Error::InsufficientOccupancy { scale_px: b });
        }
        counts.push((b, occupied));
        xs.push((res as f64 / b as f64).ln()); // log(1/epsilon), epsilon = b/res
        ys.push((occupied as f64).ln());
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residuals: Vec<f64> = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| y - (slope * x + intercept))
        .collect();
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    Ok(BoxDimension {
        dimension: slope,
        r_squared: if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 },
        counts,
        residuals,
    })
}

/// Binary PGM (P5), one byte per pixel: Julia candidates black on white.
pub fn write_pgm<W: Write>(raster: &JuliaRaster, out: &mut W) -> std::io::Result<()> {
    writeln!(out, "P5")?;
    writeln!(out, "# s = {:+e}{:+e}i  horizon = {}  threshold = {}", raster.s.0, raster.s.1, raster.horizon, raster.threshold)?;
    writeln!(out, "{} {}", raster.resolution, raster.resolution)?;
    writeln!(out, "255")?;
    let bytes: Vec<u8> = raster.mask.iter().map(|&b| if b { 0 } else { 255 }).collect();
    out.write_all(&bytes)
}

/// Raster with the complex-plane relabeling z → 1/z applied to pixel lookups:
/// fraction of comparable pixels whose flags disagree. The map commutes with
/// z → 1/z for every s, so this should be small (discretization only).
pub fn inversion_mismatch(raster: &JuliaRaster) -> f64 {
    let res = raster.resolution;
    let w = raster.window;
    let dx = (w.re_max - w.re_min) / res as f64;
    let dy = (w.im_max - w.im_min) / res as f64;
    let mut compared = 0usize;
    let mut mismatched = 0usize;
    for row in 0..res {
        let im = w.im_min + (row as f64 + 0.5) * dy;
        for col in 0..res {
            let re = w.re_min + (col as f64 + 0.5) * dx;
            let m2 = re * re + im * im;
            if m2 < 1e-12 {
                continue;
            }
            let (ire, iim) = (re / m2, -im / m2);
            if ire < w.re_min || ire > w.re_max || iim < w.im_min || iim > w.im_max {
                continue;
            }
            let icol = ((ire - w.re_min) / dx) as usize;
            let irow = ((iim - w.im_min) / dy) as usize;
            if icol >= res || irow >= res {
                continue;
            }
            compared += 1;
            if raster.at(col, row) != raster.at(icol, irow) {
                mismatched += 1;
            }
        }
    }
    if compared == 0 {
        0.0
    } else {
        mismatched as f64 / compared as f64
    }
}

/// Convenience: raster metadata as the extended-plane point grid generator
/// used by tests and emitters.
pub fn pixel_center(window: &Window, resolution: usize, col: usize, row: usize) -> ExtComplex<f64> {
    let dx = (window.re_max - window.re_min) / resolution as f64;
    let dy = (window.im_max - window.im_min) / resolution as f64;
    ExtComplex::Finite(crate::complex::Cx::new(
        window.re_min + (col as f64 + 0.5) * dx,
        window.im_min + (row as f64 + 0.5) * dy,
    ))
}
