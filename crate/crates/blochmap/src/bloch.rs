//! Bloch sphere / extended complex plane correspondence and state algebra.
//!
//! A pure qubit state is an unnormalized spinor (ζ₁, ζ₂) ≠ (0, 0), identified
//! projectively: (ζ₁, ζ₂) ~ (cζ₁, cζ₂). The stereographic image is
//! z = ζ₁/ζ₂ = cot(θ/2)·e^{iφ}, with the north pole (θ=0) at z = ∞.
//! Working projectively keeps iterated quadratic maps finite: orbits that run
//! off to z = ∞ are just (1, 0).

use crate::complex::{Cx, ExtComplex};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Pure qubit state as a projective spinor, kept in a canonical scaling with
/// max(|ζ₁|, |ζ₂|) = 1 so long iterations never overflow or underflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectiveQubit<R> {
    zeta1: Cx<R>,
    zeta2: Cx<R>,
}

impl<R: Real> ProjectiveQubit<R> {
    pub fn new(zeta1: Cx<R>, zeta2: Cx<R>) -> Result<Self> {
        if zeta1.is_zero() && zeta2.is_zero() {
            return Err(Error::NullState);
        }
        if !zeta1.is_finite() || !zeta2.is_finite() {
            return Err(Error::InvalidArgument("non-finite spinor component".into()));
        }
        Ok(Self::renormalized(zeta1, zeta2))
    }

    /// Rescale so the larger component has modulus 1 (phase untouched).
    pub(crate) fn renormalized(zeta1: Cx<R>, zeta2: Cx<R>) -> Self {
        let m1 = zeta1.norm_sqr();
        let m2 = zeta2.norm_sqr();
        let scale = R::one() / m1.max(m2).sqrt();
        ProjectiveQubit {
            zeta1: zeta1.scale(scale),
            zeta2: zeta2.scale(scale),
        }
    }

    pub fn zeta1(&self) -> Cx<R> {
        self.zeta1
    }

    pub fn zeta2(&self) -> Cx<R> {
        self.zeta2
    }

    /// North pole, z = ∞.
    pub fn north() -> Self {
        ProjectiveQubit { zeta1: Cx::one(), zeta2: Cx::zero() }
    }

    /// South pole, z = 0.
    pub fn south() -> Self {
        ProjectiveQubit { zeta1: Cx::zero(), zeta2: Cx::one() }
    }

    /// Stereographic image z = ζ₁/ζ₂; ∞ when ζ₂ = 0.
    pub fn to_plane(&self) -> ExtComplex<R> {
        if self.zeta2.is_zero() {
            ExtComplex::Infinity
        } else {
            ExtComplex::Finite(self.zeta1.div(self.zeta2))
        }
    }

    pub fn from_plane(z: ExtComplex<R>) -> Self {
        match z {
            ExtComplex::Infinity => Self::north(),
            ExtComplex::Finite(z) => Self::renormalized(z, Cx::one()),
        }
    }

    pub fn from_plane_f64(re: f64, im: f64) -> Self {
        Self::from_plane(ExtComplex::Finite(Cx::from_f64(re, im)))
    }

    /// Squared norm of the spinor as stored.
    pub fn norm_sqr(&self) -> R {
        self.zeta1.norm_sqr() + self.zeta2.norm_sqr()
    }

    /// Colatitude/azimuth of the corresponding sphere point.
    /// At the poles the azimuth canonicalizes to 0.
    pub fn sphere_point(&self) -> SpherePoint<R> {
        let m1 = self.zeta1.abs();
        let m2 = self.zeta2.abs();
        // |z| = cot(theta/2) => theta = 2*atan(|zeta2|/|zeta1|)
        let theta = R::from_f64(2.0) * m2.atan2(m1);
        let phi = if self.zeta1.is_zero() || self.zeta2.is_zero() {
            R::zero()
        } else {
            let mut p = (self.zeta1 * self.zeta2.conj()).arg();
            if p < R::zero() {
                p = p + R::from_f64(2.0) * R::pi();
            }
            p
        };
        SpherePoint { theta, phi }
    }

    /// Bloch vector (⟨σx⟩, ⟨σy⟩, ⟨σz⟩) of the normalized state.
    pub fn bloch_vector(&self) -> [R; 3] {
        let n = self.norm_sqr();
        let two = R::from_f64(2.0);
        let cross = self.zeta1.conj() * self.zeta2;
        [
            two * cross.re / n,
            two * cross.im / n,
            (self.zeta1.norm_sqr() - self.zeta2.norm_sqr()) / n,
        ]
    }
}

/// Point on the unit sphere; theta in [0, pi], phi in [0, 2pi).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint<R> {
    pub theta: R,
    pub phi: R,
}

impl<R: Real> SpherePoint<R> {
    pub fn new(theta: R, phi: R) -> Result<Self> {
        if theta < R::zero() || theta > R::pi() {
            return Err(Error::InvalidArgument(format!(
                "colatitude {} outside [0, pi]",
                theta.to_f64()
            )));
        }
        let zero_phi = theta == R::zero() || theta == R::pi();
        Ok(SpherePoint { theta, phi: if zero_phi { R::zero() } else { phi } })
    }

    pub fn from_f64(theta: f64, phi: f64) -> Result<Self> {
        Self::new(R::from_f64(theta), R::from_f64(phi))
    }

    /// Spinor (cos(θ/2)·e^{iφ}, sin(θ/2)) ∝ (cot(θ/2)e^{iφ}, 1); finite at both poles.
    pub fn to_state(&self) -> ProjectiveQubit<R> {
        let two = R::from_f64(2.0);
        let (half_sin, half_cos) = ((self.theta / two).sin(), (self.theta / two).cos());
        let phase = Cx::from_polar(R::one(), self.phi);
        ProjectiveQubit::renormalized(phase.scale(half_cos), Cx::new(half_sin, R::zero()))
    }
}

/// Two states at a fixed geodesic separation, same azimuth.
#[derive(Debug, Clone, Copy)]
pub struct StatePair<R> {
    pub a: ProjectiveQubit<R>,
    pub b: ProjectiveQubit<R>,
    pub delta: R,
}

impl<R: Real> StatePair<R> {
    /// Validates that the stored separation matches the states.
    pub fn new(a: ProjectiveQubit<R>, b: ProjectiveQubit<R>, delta: R) -> Result<Self> {
        let d = geodesic_distance(&a, &b);
        let tol = (R::from_f64(1e-12) * delta).max(R::from_f64(100.0) * R::epsilon());
        if (d - delta).abs() > tol {
            return Err(Error::InvalidArgument(format!(
                "pair separation {} does not match declared delta {}",
                d.to_f64(),
                delta.to_f64()
            )));
        }
        Ok(StatePair { a, b, delta })
    }
}

/// F = |⟨a|b⟩|² for the normalized states; scale-invariant and symmetric.
pub fn fidelity<R: Real>(a: &ProjectiveQubit<R>, b: &ProjectiveQubit<R>) -> R {
    let inner = a.zeta1().conj() * b.zeta1() + a.zeta2().conj() * b.zeta2();
    inner.norm_sqr() / (a.norm_sqr() * b.norm_sqr())
}

/// Chordal distance on the diameter-2 sphere: 2|ζ₁η₂ − ζ₂η₁| / (|ζ||η|).
/// Zero iff projectively equal; 2 for orthogonal states.
pub fn chordal_distance<R: Real>(a: &ProjectiveQubit<R>, b: &ProjectiveQubit<R>) -> R {
    let cross = a.zeta1() * b.zeta2() - a.zeta2() * b.zeta1();
    let two = R::from_f64(2.0);
    two * cross.abs() / (a.norm_sqr() * b.norm_sqr()).sqrt()
}

/// Geodesic (great-circle) separation in radians, computed from the chord so
/// that separations near 0 keep full relative accuracy.
pub fn geodesic_distance<R: Real>(a: &ProjectiveQubit<R>, b: &ProjectiveQubit<R>) -> R {
    let half_chord = chordal_distance(a, b) / R::from_f64(2.0);
    R::from_f64(2.0) * half_chord.min(R::one()).asin()
}

/// Partner displaced along the colatitude: (θ, φ) → (θ+δ, φ).
pub fn pair_at_delta<R: Real>(base: SpherePoint<R>, delta: R) -> Result<StatePair<R>> {
    if delta < R::zero() || delta > R::pi() {
        return Err(Error::InvalidArgument(format!(
            "delta {} outside [0, pi]",
            delta.to_f64()
        )));
    }
    let partner_theta = base.theta + delta;
    if partner_theta > R::pi() {
        return Err(Error::OutOfRange {
            base: base.theta.to_f64(),
            delta: delta.to_f64(),
        });
    }
    let a = base.to_state();
    let b = SpherePoint { theta: partner_theta, phi: base.phi }.to_state();
    Ok(StatePair { a, b, delta })
}

/// Minimum error probability for discriminating two equiprobable pure states
/// of fidelity F: ½(1 − √(1−F)).
pub fn helstrom_error(fidelity: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&fidelity) {
        return Err(Error::FidelityDomain(fidelity));
    }
    Ok(0.5 * (1.0 - (1.0 - fidelity).sqrt()))
}
