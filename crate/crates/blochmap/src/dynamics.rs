//! The quadratic conformal map family f(z) = (z² + s)/(s·z² + 1), applied
//! projectively so the point at infinity needs no special casing:
//! (ζ₁, ζ₂) → (ζ₁² + s·ζ₂², s·ζ₁² + ζ₂²).

use crate::bloch::{chordal_distance, ProjectiveQubit};
use crate::complex::{Cx, ExtComplex};
use crate::error::{Error, Result};
use crate::leggett_garg::ObservableAxis;
use crate::scalar::Real;

/// Family parameter. The experiments in this crate use s = x·i with x ∈ [0, 1];
/// the map itself accepts any complex s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapParams<R> {
    pub s: Cx<R>,
}

impl<R: Real> MapParams<R> {
    pub fn new(s: Cx<R>) -> Self {
        MapParams { s }
    }

    /// s = x·i
    pub fn imaginary(x: f64) -> Self {
        MapParams { s: Cx::from_f64(0.0, x) }
    }

    pub fn squaring() -> Self {
        MapParams { s: Cx::zero() }
    }

    pub fn is_imaginary_axis(&self) -> bool {
        self.s.re == R::zero()
    }
}

/// One application of the map in homogeneous form.
///
/// Errors with `DegenerateImage` if both output components vanish (possible
/// only for |s| = 1 off the imaginary axis); that signals leaving the
/// post-selectable set and must not be silently normalized away.
pub fn apply_map<R: Real>(
    state: &ProjectiveQubit<R>,
    params: &MapParams<R>,
) -> Result<ProjectiveQubit<R>> {
    let z1sq = state.zeta1() * state.zeta1();
    let z2sq = state.zeta2() * state.zeta2();
    let w1 = z1sq + params.s * z2sq;
    let w2 = params.s * z1sq + z2sq;
    if w1.is_zero() && w2.is_zero() {
        return Err(Error::DegenerateImage { iteration: 0 });
    }
    Ok(ProjectiveQubit::renormalized(w1, w2))
}

/// Orbit of a state under repeated application; `points[0]` is the start.
#[derive(Debug, Clone)]
pub struct Orbit<R> {
    pub points: Vec<ProjectiveQubit<R>>,
    pub params: MapParams<R>,
}

impl<R: Real> Orbit<R> {
    pub fn last(&self) -> &ProjectiveQubit<R> {
        self.points.last().expect("orbit holds at least the start")
    }
}

pub fn iterate<R: Real>(
    state: &ProjectiveQubit<R>,
    params: &MapParams<R>,
    n: usize,
) -> Result<Orbit<R>> {
    let mut points = Vec::with_capacity(n + 1);
    points.push(*state);
    let mut current = *state;
    for k in 0..n {
        current = apply_map(&current, params).map_err(|e| match e {
            Error::DegenerateImage { .. } => Error::DegenerateImage { iteration: k + 1 },
            other => other,
        })?;
        points.push(current);
    }
    Ok(Orbit { points, params: *params })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
    Neutral,
}

/// Fixed point with its multiplier under the spherical (chordal) metric; at a
/// fixed point that equals the planar |f′(z)|, and the ∞ chart is used when
/// the cubic drops degree.
#[derive(Debug, Clone, Copy)]
pub struct FixedPoint<R> {
    pub location: ExtComplex<R>,
    pub multiplier: R,
    pub stability: Stability,
}

fn classify<R: Real>(multiplier: R) -> Stability {
    if multiplier < R::one() {
        Stability::Stable
    } else if multiplier > R::one() {
        Stability::Unstable
    } else {
        Stability::Neutral
    }
}

/// Planar derivative magnitude |f′(z)| = |2z(1−s²)| / |sz²+1|².
fn multiplier_at<R: Real>(z: Cx<R>, s: Cx<R>) -> R {
    let one_minus_s2 = Cx::one() - s * s;
    let den = s * z * z + Cx::one();
    let num = (z * one_minus_s2).abs() * R::from_f64(2.0);
    num / den.norm_sqr()
}

/// All solutions of f(z) = z, i.e. s·z³ − z² + z − s = (z−1)(s·z² + (s−1)z + s).
/// z = 1 is always a root; for s = 0 the cubic degenerates and ∞ joins the set.
pub fn fixed_points<R: Real>(params: &MapParams<R>) -> Vec<FixedPoint<R>> {
    let s = params.s;
    let mut out = Vec::with_capacity(3);
    let at = |z: Cx<R>| -> FixedPoint<R> {
        let m = multiplier_at(z, s);
        FixedPoint { location: ExtComplex::Finite(z), multiplier: m, stability: classify(m) }
    };
    out.push(at(Cx::one()));
    if s.is_zero() {
        out.push(at(Cx::zero()));
        // in the w = 1/z chart the map is w → w², so ∞ is superattracting
        out.push(FixedPoint {
            location: ExtComplex::Infinity,
            multiplier: R::zero(),
            stability: Stability::Stable,
        });
    } else {
        // s·z² + (s−1)z + s = 0
        let disc = ((s - Cx::one()) * (s - Cx::one())
            - (s * s).scale(R::from_f64(4.0)))
        .sqrt();
        let two_s = s.scale(R::from_f64(2.0));
        let minus_b = Cx::one() - s;
        out.push(at((minus_b + disc).div(two_s)));
        out.push(at((minus_b - disc).div(two_s)));
    }
    out
}

/// Measurement directions whose eigenstates all land on the fixed point z = 1
/// within a few iterations of the s = i map: ±x, ±y and the four equatorial
/// diagonals. Arrival counts are measured, not assumed.
#[derive(Debug, Clone)]
pub struct RootDirection<R> {
    pub label: &'static str,
    pub axis: ObservableAxis<R>,
    /// Iterations until the ±1 eigenstates reach z = 1 (None: not within horizon).
    pub arrival_plus: Option<usize>,
    pub arrival_minus: Option<usize>,
    pub verified: bool,
}

const ROOT_ARRIVAL_HORIZON: usize = 8;

fn arrival_iteration<R: Real>(
    state: &ProjectiveQubit<R>,
    params: &MapParams<R>,
) -> Option<usize> {
    let target = ProjectiveQubit::from_plane_f64(1.0, 0.0);
    let tol = R::from_f64(1e-6);
    let mut current = *state;
    for k in 0..=ROOT_ARRIVAL_HORIZON {
        if chordal_distance(&current, &target) < tol {
            return Some(k);
        }
        current = apply_map(&current, params).ok()?;
    }
    None
}

pub fn root_directions<R: Real>() -> Vec<RootDirection<R>> {
    let params = MapParams::imaginary(1.0);
    let labels: [(&'static str, usize); 8] = [
        ("+x", 0),
        ("-x", 4),
        ("+y", 2),
        ("-y", 6),
        ("+x+y", 1),
        ("-x+y", 3),
        ("-x-y", 5),
        ("+x-y", 7),
    ];
    labels
        .into_iter()
        .map(|(label, eighth)| {
            let axis = ObservableAxis::equatorial(eighth);
            let arrival_plus = arrival_iteration(&axis.eigenstate_plus(), &params);
            let arrival_minus = arrival_iteration(&axis.eigenstate_minus(), &params);
            let verified = arrival_plus.is_some() && arrival_minus.is_some();
            RootDirection { label, axis, arrival_plus, arrival_minus, verified }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::geodesic_distance;
    use crate::dd::Dd;

    fn plane(st: &ProjectiveQubit<f64>) -> (f64, f64) {
        st.to_plane().finite().unwrap().to_f64()
    }

    #[test]
    fn z_one_fixed_for_any_s() {
        for s in [Cx::from_f64(0.0, 0.0), Cx::from_f64(0.0, 1.0), Cx::from_f64(0.3, -0.2)] {
            let params = MapParams::new(s);
            let z1: ProjectiveQubit<f64> = ProjectiveQubit::from_plane_f64(1.0, 0.0);
            let out = apply_map(&z1, &params).unwrap();
            let (re, im) = plane(&out);
            assert!((re - 1.0).abs() < 1e-15 && im.abs() < 1e-15, "s={s:?}");
        }
    }

    #[test]
    fn squaring_map_anchor() {
        let params: MapParams<f64> = MapParams::squaring();
        let st = ProjectiveQubit::from_plane_f64(2.0, 0.0);
        let (re, im) = plane(&apply_map(&st, &params).unwrap());
        assert!((re - 4.0).abs() < 1e-14 && im.abs() < 1e-15);

        let orbit = iterate(&st, &params, 3).unwrap();
        let (re, _) = plane(orbit.last());
        assert!((re - 256.0).abs() < 1e-10);
    }

    #[test]
    fn s_i_orbit_from_south_pole() {
        // 0 → i → −1 → 1, then fixed
        let params: MapParams<f64> = MapParams::imaginary(1.0);
        let orbit = iterate(&ProjectiveQubit::south(), &params, 4).unwrap();
        let pts: Vec<(f64, f64)> = orbit.points.iter().map(plane).collect();
        let expect = [(0.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (1.0, 0.0), (1.0, 0.0)];
        for (got, want) in pts.iter().zip(expect) {
            assert!((got.0 - want.0).abs() < 1e-14 && (got.1 - want.1).abs() < 1e-14);
        }
    }

    #[test]
    fn degenerate_image_detected_for_real_unit_s() {
        // s = 1, z = i: both homogeneous components vanish
        let params = MapParams::new(Cx::from_f64(1.0, 0.0));
        let st: ProjectiveQubit<f64> = ProjectiveQubit::from_plane_f64(0.0, 1.0);
        assert!(matches!(
            apply_map(&st, &params),
            Err(Error::DegenerateImage { .. })
        ));
        let orbit = iterate(&st, &params, 5);
        assert!(matches!(orbit, Err(Error::DegenerateImage { iteration: 1 })));
    }

    #[test]
    fn composition_is_bitwise() {
        let params: MapParams<f64> = MapParams::imaginary(1.0);
        let st = ProjectiveQubit::from_plane_f64(0.37, -0.82);
        let whole = iterate(&st, &params, 11).unwrap();
        let first = iterate(&st, &params, 4).unwrap();
        let second = iterate(first.last(), &params, 7).unwrap();
        for k in 0..=7 {
            assert_eq!(whole.points[4 + k], second.points[k]);
        }
    }

    #[test]
    fn fixed_points_squaring() {
        let pts = fixed_points(&MapParams::<f64>::squaring());
        assert_eq!(pts.len(), 3);
        let find = |loc: ExtComplex<f64>| {
            pts.iter()
                .find(|p| match (p.location, loc) {
                    (ExtComplex::Infinity, ExtComplex::Infinity) => true,
                    (ExtComplex::Finite(a), ExtComplex::Finite(b)) => {
                        (a - b).abs() < 1e-12
                    }
                    _ => false,
                })
                .unwrap()
        };
        assert_eq!(find(ExtComplex::Infinity).stability, Stability::Stable);
        assert_eq!(find(ExtComplex::Finite(Cx::zero())).stability, Stability::Stable);
        let one = find(ExtComplex::Finite(Cx::one()));
        assert_eq!(one.stability, Stability::Unstable);
        assert!((one.multiplier - 2.0).abs() < 1e-14);
    }

    #[test]
    fn fixed_points_s_i_contains_one_with_multiplier_two() {
        // multiplier |2(1−s²)/(s+1)²| = 2 on the whole imaginary segment: the
        // point the measurement repeatedly collapses to is dynamically repelling,
        // consistent with the Julia set filling the sphere at s = i.
        let pts = fixed_points(&MapParams::<f64>::imaginary(1.0));
        assert_eq!(pts.len(), 3);
        let one = pts
            .iter()
            .find(|p| matches!(p.location, ExtComplex::Finite(z) if (z - Cx::one()).abs() < 1e-12))
            .unwrap();
        assert!((one.multiplier - 2.0).abs() < 1e-13);
        assert_eq!(one.stability, Stability::Unstable);
        // every fixed point satisfies f(z) = z
        for p in &pts {
            if let ExtComplex::Finite(z) = p.location {
                let st = ProjectiveQubit::from_plane(ExtComplex::Finite(z));
                let img = apply_map(&st, &MapParams::imaginary(1.0)).unwrap();
                assert!(chordal_distance(&st, &img) < 1e-12);
            }
        }
    }

    #[test]
    fn attracting_pair_exists_inside_imaginary_segment() {
        let pts = fixed_points(&MapParams::<f64>::imaginary(0.5));
        assert!(pts.iter().any(|p| p.stability == Stability::Stable));
    }

    #[test]
    fn root_directions_arrivals() {
        let dirs = root_directions::<f64>();
        assert_eq!(dirs.len(), 8);
        for d in &dirs {
            assert!(d.verified, "axis {} failed to reach the fixed point", d.label);
        }
        let by_label = |l: &str| dirs.iter().find(|d| d.label == l).unwrap();
        assert_eq!(by_label("+x").arrival_plus, Some(0));
        assert_eq!(by_label("+x").arrival_minus, Some(1));
        assert_eq!(by_label("-x").arrival_plus, Some(1));
        assert_eq!(by_label("+y").arrival_plus, Some(2));
        assert_eq!(by_label("+y").arrival_minus, Some(2));
        // equatorial diagonals take four steps: e^{±iπ/4}-type points → 0 → i → −1 → 1
        assert_eq!(by_label("+x+y").arrival_plus, Some(4));
        assert_eq!(by_label("-x-y").arrival_minus, Some(4));
    }

    #[test]
    fn fatou_behavior_of_squaring_map() {
        // |z| < 1 contracts to the south pole, |z| > 1 to the north pole
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let params: MapParams<f64> = MapParams::squaring();
        for _ in 0..1000 {
            let r: f64 = rng.random_range(0.05..0.95);
            let inside = rng.random_bool(0.5);
            let modulus = if inside { r } else { 1.0 / r };
            let angle: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let st = ProjectiveQubit::from_plane_f64(
                modulus * angle.cos(),
                modulus * angle.sin(),
            );
            let end = *iterate(&st, &params, 60).unwrap().last();
            let pole = if inside {
                ProjectiveQubit::south()
            } else {
                ProjectiveQubit::north()
            };
            assert!(geodesic_distance(&end, &pole) < 1e-9);
        }
    }

    #[test]
    fn homogeneous_matches_affine_formula() {
        // the affine reference (z²+s)/(sz²+1) is evaluated in double-double so
        // its own cancellation near the pole sz²+1 ≈ 0 cannot pollute the
        // comparison; agreement is judged in the chordal metric, the
        // scale-free distance on the sphere
        use crate::bloch::chordal_distance;
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let mut worst = 0.0f64;
        for _ in 0..100_000 {
            let x: f64 = rng.random_range(-3.0..3.0);
            let y: f64 = rng.random_range(-3.0..3.0);
            let sx: f64 = rng.random_range(0.0..1.0);
            let params: MapParams<f64> = MapParams::imaginary(sx);
            let st = ProjectiveQubit::from_plane_f64(x, y);
            let img = apply_map(&st, &params).unwrap();

            let zdd: Cx<Dd> = Cx::from_f64(x, y);
            let sdd: Cx<Dd> = Cx::from_f64(0.0, sx);
            let den = sdd * zdd * zdd + Cx::one();
            if den.is_zero() {
                continue;
            }
            let affine = (zdd * zdd + sdd).div(den);
            let (are, aim) = affine.to_f64();
            let reference = ProjectiveQubit::from_plane_f64(are, aim);
            let d = chordal_distance(&img, &reference);
            worst = worst.max(d);
        }
        assert!(worst < 1e-14, "worst chordal deviation {worst}");
    }

    #[test]
    fn dd_orbit_agrees_with_f64_at_moderate_depth() {
        let p64: MapParams<f64> = MapParams::imaginary(1.0);
        let pdd: MapParams<Dd> = MapParams::imaginary(1.0);
        let s64 = ProjectiveQubit::from_plane_f64(0.3, 0.2);
        let sdd: ProjectiveQubit<Dd> = ProjectiveQubit::from_plane_f64(0.3, 0.2);
        let o64 = iterate(&s64, &p64, 12).unwrap();
        let odd = iterate(&sdd, &pdd, 12).unwrap();
        for (a, b) in o64.points.iter().zip(odd.points.iter()) {
            let za = a.to_plane().finite().unwrap();
            let zb = b.to_plane().finite().unwrap();
            let (bre, bim) = zb.to_f64();
            assert!((za.re - bre).abs() < 1e-10 && (za.im - bim).abs() < 1e-10);
        }
    }
}
