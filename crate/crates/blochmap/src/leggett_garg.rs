//! Dichotomic-observable temporal correlations under post-selected map
//! dynamics: joint outcome probabilities, two-time correlations C_ij, and the
//! three-time series K₃(n) = C₁₂ + C₂₃ − C₁₃ on the equispaced grid
//! t₁ = 0, t₂ = n, t₃ = 2n.
//!
//! Evolution between measurements is map composition, never a Hamiltonian
//! exponential: k steps of the map are the time translation by k. Measurement
//! collapses projectively onto an eigenstate; every probability is
//! renormalized by the evolved state's squared norm (the post-selected
//! dynamics is trace-decreasing, so this renormalization is part of the
//! definition, not hygiene). Conditionals are therefore state-independent and
//! shared across a whole ensemble — see [`TransitionTables`].

use crate::bloch::{fidelity, ProjectiveQubit};
use crate::complex::Cx;
use crate::dynamics::{apply_map, iterate, MapParams, Orbit};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Tolerance guard on violation bookkeeping so rounding noise is never
/// flagged; claimed violations are O(1).
pub const VIOLATION_GUARD: f64 = 1e-12;

/// Measurement direction n̂(θ_m, φ_m) with its eigenstate spinors.
///
/// Eigenstates are stored, not recomputed, because exactness matters: the +x
/// eigenstate is the map's repelling fixed point, and a 1-ulp error in it
/// doubles every iteration. The dedicated constructors below build spinors
/// that are exact where the protocol needs them to be.
#[derive(Debug, Clone)]
pub struct ObservableAxis<R> {
    theta_m: R,
    phi_m: R,
    plus: ProjectiveQubit<R>,
    minus: ProjectiveQubit<R>,
}

impl<R: Real> ObservableAxis<R> {
    /// σ_x, with eigenstates exactly (1, 1) and (1, −1).
    pub fn sigma_x() -> Self {
        ObservableAxis {
            theta_m: R::half_pi(),
            phi_m: R::zero(),
            plus: ProjectiveQubit::new(Cx::one(), Cx::one()).expect("nonzero"),
            minus: ProjectiveQubit::new(Cx::one(), -Cx::one()).expect("nonzero"),
        }
    }

    /// Equatorial axis at azimuth k·π/4. The +1 eigenstate spinor is
    /// (1, e^{iφ_m}); the cardinal directions (even k) get exact components.
    pub fn equatorial(k_eighths: usize) -> Self {
        let k = k_eighths % 8;
        let h = (R::one() / R::from_f64(2.0)).sqrt();
        let phase: Cx<R> = match k {
            0 => Cx::one(),
            1 => Cx::new(h, h),
            2 => Cx::i(),
            3 => Cx::new(-h, h),
            4 => -Cx::one(),
            5 => Cx::new(-h, -h),
            6 => -Cx::i(),
            _ => Cx::new(h, -h),
        };
        let phi_m = R::pi() * R::from_f64(k as f64) / R::from_f64(4.0);
        ObservableAxis {
            theta_m: R::half_pi(),
            phi_m,
            plus: ProjectiveQubit::new(Cx::one(), phase).expect("nonzero"),
            minus: ProjectiveQubit::new(Cx::one(), -phase).expect("nonzero"),
        }
    }

    /// General axis; eigenstates (cos(θ_m/2), sin(θ_m/2)e^{iφ_m}) and its
    /// orthogonal complement.
    pub fn from_angles(theta_m: R, phi_m: R) -> Result<Self> {
        if theta_m < R::zero() || theta_m > R::pi() {
            return Err(Error::InvalidArgument(format!(
                "axis colatitude {} outside [0, pi]",
                theta_m.to_f64()
            )));
        }
        let two = R::from_f64(2.0);
        let (hs, hc) = ((theta_m / two).sin(), (theta_m / two).cos());
        let phase = Cx::from_polar(R::one(), phi_m);
        Ok(ObservableAxis {
            theta_m,
            phi_m,
            plus: ProjectiveQubit::new(Cx::new(hc, R::zero()), phase.scale(hs))?,
            minus: ProjectiveQubit::new(Cx::new(hs, R::zero()), -phase.scale(hc))?,
        })
    }

    /// σ_x misaligned by (dθ, dφ): the axis (π/2 + dθ, dφ). Built through
    /// half-angle identities so that zero error reproduces `sigma_x` exactly —
    /// cos(π/4 ± x) expansions leave spinors (1∓t, (1±t)e^{idφ}) with
    /// t = tan(dθ/2)·…, here kept as (c−s, (c+s)e^{idφ}) with c = cos(dθ/2),
    /// s = sin(dθ/2).
    pub fn sigma_x_perturbed(d_theta: R, d_phi: R) -> Result<Self> {
        let quarter = R::pi() / R::from_f64(4.0);
        if d_theta.abs() >= quarter || d_phi.abs() >= quarter {
            return Err(Error::InvalidArgument(
                "axis error must satisfy |dθ|, |dφ| < π/4".into(),
            ));
        }
        let two = R::from_f64(2.0);
        let (s, c) = ((d_theta / two).sin(), (d_theta / two).cos());
        let phase = Cx::from_polar(R::one(), d_phi);
        let plus = ProjectiveQubit::new(Cx::new(c - s, R::zero()), phase.scale(c + s))?;
        let minus = ProjectiveQubit::new(Cx::new(c + s, R::zero()), -phase.scale(c - s))?;
        Ok(ObservableAxis {
            theta_m: R::half_pi() + d_theta,
            phi_m: d_phi,
            plus,
            minus,
        })
    }

    pub fn theta_m(&self) -> R {
        self.theta_m
    }

    pub fn phi_m(&self) -> R {
        self.phi_m
    }

    pub fn eigenstate_plus(&self) -> ProjectiveQubit<R> {
        self.plus
    }

    pub fn eigenstate_minus(&self) -> ProjectiveQubit<R> {
        self.minus
    }

    pub fn unit_vector(&self) -> [R; 3] {
        let (st, ct) = (self.theta_m.sin(), self.theta_m.cos());
        let (sp, cp) = (self.phi_m.sin(), self.phi_m.cos());
        [st * cp, st * sp, ct]
    }
}

/// ⟨Q⟩ of a state for the given axis, via the outcome probabilities.
pub fn observable_expectation<R: Real>(
    state: &ProjectiveQubit<R>,
    axis: &ObservableAxis<R>,
) -> R {
    fidelity(&axis.plus, state) - fidelity(&axis.minus, state)
}

/// ⟨σ_x⟩ = 2·Re z / (1 + |z|²), the reduced K₃ formula for the ideal axis.
pub fn sigma_x_expectation<R: Real>(state: &ProjectiveQubit<R>) -> R {
    let cross = state.zeta1().conj() * state.zeta2();
    R::from_f64(2.0) * cross.re / state.norm_sqr()
}

/// Conditional outcome probabilities after k steps from a collapsed
/// eigenstate: T_k(q → q′) = |⟨q′|f^k(q)⟩|² (post-selection renormalized).
/// These depend only on (axis, params), so one table serves an entire
/// ensemble.
#[derive(Debug, Clone)]
pub struct TransitionTables<R> {
    pub plus_to_plus: Vec<R>,
    pub plus_to_minus: Vec<R>,
    pub minus_to_plus: Vec<R>,
    pub minus_to_minus: Vec<R>,
}

impl<R: Real> TransitionTables<R> {
    pub fn build(
        axis: &ObservableAxis<R>,
        params: &MapParams<R>,
        max_steps: usize,
    ) -> Result<Self> {
        let mut t = TransitionTables {
            plus_to_plus: Vec::with_capacity(max_steps + 1),
            plus_to_minus: Vec::with_capacity(max_steps + 1),
            minus_to_plus: Vec::with_capacity(max_steps + 1),
            minus_to_minus: Vec::with_capacity(max_steps + 1),
        };
        let mut from_plus = axis.plus;
        let mut from_minus = axis.minus;
        for k in 0..=max_steps {
            t.plus_to_plus.push(fidelity(&axis.plus, &from_plus));
            t.plus_to_minus.push(fidelity(&axis.minus, &from_plus));
            t.minus_to_plus.push(fidelity(&axis.plus, &from_minus));
            t.minus_to_minus.push(fidelity(&axis.minus, &from_minus));
            if k < max_steps {
                from_plus = step(&from_plus, params, k + 1)?;
                from_minus = step(&from_minus, params, k + 1)?;
            }
        }
        Ok(t)
    }

    /// ⟨Q⟩ after k steps conditioned on a + (resp. −) collapse.
    fn q_after_plus(&self, k: usize) -> R {
        self.plus_to_plus[k] - self.plus_to_minus[k]
    }

    fn q_after_minus(&self, k: usize) -> R {
        self.minus_to_plus[k] - self.minus_to_minus[k]
    }
}

fn step<R: Real>(
    state: &ProjectiveQubit<R>,
    params: &MapParams<R>,
    iteration: usize,
) -> Result<ProjectiveQubit<R>> {
    apply_map(state, params).map_err(|e| match e {
        Error::DegenerateImage { .. } => Error::DegenerateImage { iteration },
        other => other,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairIJ {
    OneTwo,
    TwoThree,
    OneThree,
}

/// Joint probabilities P_ij(q_i, q_j) for one time pair at spacing n.
#[derive(Debug, Clone, Copy)]
pub struct JointProbabilityTable<R> {
    pub pair: PairIJ,
    pub n: usize,
    pub pp: R,
    pub pm: R,
    pub mp: R,
    pub mm: R,
}

/// P_ij(q_i, q_j) = P(q_i at t_i) · P(q_j after the t_j − t_i step evolution
/// of the collapsed eigenstate), both factors post-selection renormalized.
pub fn joint_probabilities<R: Real>(
    initial: &ProjectiveQubit<R>,
    axis: &ObservableAxis<R>,
    params: &MapParams<R>,
    n: usize,
    pair: PairIJ,
) -> Result<JointProbabilityTable<R>> {
    if n == 0 {
        return Err(Error::InvalidArgument("spacing n must be >= 1".into()));
    }
    let (t_i, steps) = match pair {
        PairIJ::OneTwo => (0, n),
        PairIJ::TwoThree => (n, n),
        PairIJ::OneThree => (0, 2 * n),
    };
    let evolved = iterate(initial, params, t_i)?;
    let tables = TransitionTables::build(axis, params, steps)?;
    let at_ti = evolved.last();
    let p_plus = fidelity(&axis.plus, at_ti);
    let p_minus = fidelity(&axis.minus, at_ti);
    Ok(JointProbabilityTable {
        pair,
        n,
        pp: p_plus * tables.plus_to_plus[steps],
        pm: p_plus * tables.plus_to_minus[steps],
        mp: p_minus * tables.minus_to_plus[steps],
        mm: p_minus * tables.minus_to_minus[steps],
    })
}

/// C_ij = Σ q_i q_j P_ij = P(↑,↑) − P(↑,↓) − P(↓,↑) + P(↓,↓).
pub fn two_time_correlation<R: Real>(table: &JointProbabilityTable<R>) -> R {
    table.pp - table.pm - table.mp + table.mm
}

#[derive(Debug, Clone, Copy)]
pub struct K3Record<R> {
    pub n: usize,
    pub c12: R,
    pub c23: R,
    pub c13: R,
    pub k3: R,
}

/// K₃ records for one initial state against prebuilt transition tables
/// (covering 2·n_max steps) and its own orbit (covering n_max).
pub(crate) fn k3_records_from_parts<R: Real>(
    orbit: &Orbit<R>,
    axis: &ObservableAxis<R>,
    tables: &TransitionTables<R>,
    n_max: usize,
) -> Vec<K3Record<R>> {
    let p1_plus = fidelity(&axis.plus, &orbit.points[0]);
    let p1_minus = fidelity(&axis.minus, &orbit.points[0]);
    (1..=n_max)
        .map(|n| {
            let pn_plus = fidelity(&axis.plus, &orbit.points[n]);
            let pn_minus = fidelity(&axis.minus, &orbit.points[n]);
            let c12 = p1_plus * tables.q_after_plus(n) - p1_minus * tables.q_after_minus(n);
            let c23 = pn_plus * tables.q_after_plus(n) - pn_minus * tables.q_after_minus(n);
            let c13 =
                p1_plus * tables.q_after_plus(2 * n) - p1_minus * tables.q_after_minus(2 * n);
            K3Record { n, c12, c23, c13, k3: c12 + c23 - c13 }
        })
        .collect()
}

/// Full three-time K₃(n) series for n = 1..=n_max.
pub fn k3_series<R: Real>(
    initial: &ProjectiveQubit<R>,
    axis: &ObservableAxis<R>,
    params: &MapParams<R>,
    n_max: usize,
) -> Result<Vec<K3Record<R>>> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("n_max must be >= 1".into()));
    }
    let tables = TransitionTables::build(axis, params, 2 * n_max)?;
    let orbit = iterate(initial, params, n_max)?;
    Ok(k3_records_from_parts(&orbit, axis, &tables, n_max))
}

/// Reduced series ⟨σ_x(n)⟩ for n = 0..=n_max; equals the full K₃ for the
/// ideal σ_x axis under s = i where both eigenstates land on the fixed point.
pub fn k3_reduced_series<R: Real>(
    initial: &ProjectiveQubit<R>,
    params: &MapParams<R>,
    n_max: usize,
) -> Result<Vec<R>> {
    let orbit = iterate(initial, params, n_max)?;
    Ok(orbit.points.iter().map(sigma_x_expectation).collect())
}

#[derive(Debug, Clone)]
pub struct FaultyK3<R> {
    pub records: Vec<K3Record<R>>,
    /// n with |K₃(n)| > 1 (+ guard): Leggett-Garg violations.
    pub lgi_violations: Vec<usize>,
    /// n with K₃(n) > 1.5 (+ guard): beyond the Lüders bound.
    pub luders_violations: Vec<usize>,
}

/// K₃ series through the full pipeline with a misaligned device at
/// (π/2 + dθ, dφ); the perturbed eigenstates are no longer fixed points, so
/// C₁₂ ≠ C₁₃ and the series may leave [−1, 1].
pub fn faulty_k3_series<R: Real>(
    initial: &ProjectiveQubit<R>,
    axis_error: (R, R),
    params: &MapParams<R>,
    n_max: usize,
) -> Result<FaultyK3<R>> {
    let axis = ObservableAxis::sigma_x_perturbed(axis_error.0, axis_error.1)?;
    let records = k3_series(initial, &axis, params, n_max)?;
    let guard = R::from_f64(VIOLATION_GUARD);
    let lgi = records
        .iter()
        .filter(|r| r.k3.abs() > R::one() + guard)
        .map(|r| r.n)
        .collect();
    let luders = records
        .iter()
        .filter(|r| r.k3 > R::from_f64(1.5) + guard)
        .map(|r| r.n)
        .collect();
    Ok(FaultyK3 { records, lgi_violations: lgi, luders_violations: luders })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dd::Dd;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(rng: &mut ChaCha8Rng) -> ProjectiveQubit<f64> {
        let u: f64 = rng.random_range(-1.0f64..1.0);
        let theta = u.acos();
        let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        crate::bloch::SpherePoint::from_f64(theta, phi).unwrap().to_state()
    }

    #[test]
    fn axis_unit_vector_normalized() {
        for axis in [
            ObservableAxis::<f64>::sigma_x(),
            ObservableAxis::equatorial(3),
            ObservableAxis::from_angles(0.7, 2.1).unwrap(),
        ] {
            let v = axis.unit_vector();
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            assert!((n - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn sigma_x_eigenstates_are_exact_fixed_points() {
        let axis = ObservableAxis::<f64>::sigma_x();
        let params = MapParams::imaginary(1.0);
        // the + eigenstate never moves, bitwise; the − eigenstate lands on it in one step
        let mut p = axis.eigenstate_plus();
        for _ in 0..300 {
            p = apply_map(&p, &params).unwrap();
            let z = p.to_plane().finite().unwrap();
            assert_eq!(z.to_f64(), (1.0, 0.0));
        }
        let m1 = apply_map(&axis.eigenstate_minus(), &params).unwrap();
        assert_eq!(m1.to_plane().finite().unwrap().to_f64(), (1.0, 0.0));
    }

    #[test]
    fn perturbed_axis_at_zero_matches_sigma_x() {
        let a = ObservableAxis::<f64>::sigma_x_perturbed(0.0, 0.0).unwrap();
        let b = ObservableAxis::<f64>::sigma_x();
        assert_eq!(a.eigenstate_plus(), b.eigenstate_plus());
        assert_eq!(a.eigenstate_minus(), b.eigenstate_minus());
        assert!(ObservableAxis::<f64>::sigma_x_perturbed(1.0, 0.0).is_err());
    }

    #[test]
    fn eigenstates_orthogonal() {
        for axis in [
            ObservableAxis::<f64>::from_angles(1.234, 4.56).unwrap(),
            ObservableAxis::sigma_x_perturbed(1e-3, -2e-4).unwrap(),
            ObservableAxis::equatorial(5),
        ] {
            let f = fidelity(&axis.eigenstate_plus(), &axis.eigenstate_minus());
            assert!(f < 1e-28, "overlap {f}");
        }
    }

    #[test]
    fn plus_x_initial_is_trivial() {
        // z = 1 initial: P(+1) = 1 at every time, K3(n) = 1 for all n
        let params = MapParams::imaginary(1.0);
        let axis = ObservableAxis::<f64>::sigma_x();
        let st = ProjectiveQubit::from_plane_f64(1.0, 0.0);
        let series = k3_series(&st, &axis, &params, 20).unwrap();
        for r in series {
            assert!((r.k3 - 1.0).abs() < 1e-14);
        }
        let jt = joint_probabilities(&st, &axis, &params, 3, PairIJ::OneTwo).unwrap();
        assert!((jt.pp - 1.0).abs() < 1e-14);
        assert!(jt.pm.abs() < 1e-14 && jt.mp.abs() < 1e-14 && jt.mm.abs() < 1e-14);
    }

    #[test]
    fn minus_x_initial_anticorrelates_once() {
        // first outcome −1 with certainty, then the state sits on the fixed point
        let params = MapParams::imaginary(1.0);
        let axis = ObservableAxis::<f64>::sigma_x();
        let st = ProjectiveQubit::from_plane_f64(-1.0, 0.0);
        let jt = joint_probabilities(&st, &axis, &params, 1, PairIJ::OneTwo).unwrap();
        assert!((jt.mp - 1.0).abs() < 1e-14);
        let c = two_time_correlation(&jt);
        assert!((c + 1.0).abs() < 1e-14);
    }

    #[test]
    fn correlation_endpoints() {
        let all_up = JointProbabilityTable {
            pair: PairIJ::OneTwo,
            n: 1,
            pp: 1.0,
            pm: 0.0,
            mp: 0.0,
            mm: 0.0,
        };
        assert_eq!(two_time_correlation(&all_up), 1.0);
        let uniform = JointProbabilityTable {
            pair: PairIJ::OneTwo,
            n: 1,
            pp: 0.25,
            pm: 0.25,
            mp: 0.25,
            mm: 0.25,
        };
        assert_eq!(two_time_correlation(&uniform), 0.0);
    }

    #[test]
    fn conditional_rows_normalize() {
        let params = MapParams::imaginary(1.0);
        for axis in [
            ObservableAxis::<f64>::sigma_x(),
            ObservableAxis::sigma_x_perturbed(1e-8, 0.0).unwrap(),
            ObservableAxis::from_angles(0.9, 1.7).unwrap(),
        ] {
            let t = TransitionTables::build(&axis, &params, 80).unwrap();
            for k in 0..=80 {
                assert!((t.plus_to_plus[k] + t.plus_to_minus[k] - 1.0).abs() < 1e-12);
                assert!((t.minus_to_plus[k] + t.minus_to_minus[k] - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn ideal_axis_collapse_identity_and_reduced_formula() {
        // C12 = C13 for the ideal axis, so K3 = C23 = <sigma_x(n)>
        let params = MapParams::imaginary(1.0);
        let axis = ObservableAxis::<f64>::sigma_x();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let st = random_state(&mut rng);
            let series = k3_series(&st, &axis, &params, 40).unwrap();
            let reduced = k3_reduced_series(&st, &params, 40).unwrap();
            for r in &series {
                assert!((r.c12 - r.c13).abs() < 1e-12);
                assert!((r.k3 - reduced[r.n]).abs() < 1e-12);
                assert!(r.k3.abs() <= 1.0 + VIOLATION_GUARD);
            }
        }
    }

    #[test]
    fn ideal_axis_identity_in_dd() {
        let params: MapParams<Dd> = MapParams::imaginary(1.0);
        let axis = ObservableAxis::<Dd>::sigma_x();
        let st: ProjectiveQubit<Dd> = ProjectiveQubit::from_plane_f64(0.3, -0.4);
        let series = k3_series(&st, &axis, &params, 40).unwrap();
        let reduced = k3_reduced_series(&st, &params, 40).unwrap();
        for r in &series {
            assert!((r.c12 - r.c13).abs().to_f64() < 1e-12);
            assert!((r.k3 - reduced[r.n]).abs().to_f64() < 1e-12);
        }
    }

    #[test]
    fn faulty_device_zero_error_is_ideal() {
        let params = MapParams::imaginary(1.0);
        let st = ProjectiveQubit::from_plane_f64(0.2, 0.7);
        let faulty = faulty_k3_series(&st, (0.0, 0.0), &params, 60).unwrap();
        let ideal = k3_series(&st, &ObservableAxis::sigma_x(), &params, 60).unwrap();
        assert!(faulty.lgi_violations.is_empty());
        assert!(faulty.luders_violations.is_empty());
        for (a, b) in faulty.records.iter().zip(ideal.iter()) {
            assert_eq!(a.k3, b.k3);
        }
    }

    #[test]
    fn faulty_device_detects_azimuthal_error() {
        let params = MapParams::imaginary(1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut violated = 0;
        for _ in 0..20 {
            let st = random_state(&mut rng);
            let faulty = faulty_k3_series(&st, (0.0, 1e-8), &params, 100).unwrap();
            if !faulty.lgi_violations.is_empty() {
                violated += 1;
            }
            for r in &faulty.records {
                // algebraic bound: three correlators, each in [-1, 1]
                assert!(r.k3.abs() <= 3.0 + 1e-9, "K3 out of [-3, 3]: {}", r.k3);
            }
        }
        assert!(violated > 0, "no LGI violations with a faulty device");
    }

    #[test]
    fn k3_identity_exact_as_computed() {
        let params = MapParams::imaginary(0.7);
        let axis = ObservableAxis::<f64>::from_angles(1.1, 0.3).unwrap();
        let st = ProjectiveQubit::from_plane_f64(0.9, -1.4);
        for r in k3_series(&st, &axis, &params, 25).unwrap() {
            assert_eq!(r.k3, r.c12 + r.c23 - r.c13);
        }
    }
}
