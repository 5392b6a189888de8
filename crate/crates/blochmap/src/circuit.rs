//! Ancilla-driven two-qubit emulation of one map iteration.
//!
//! Two copies of the state enter, a combined gate entangles them, and the
//! ancilla is post-selected in |↑⟩_z; the surviving branch of the first qubit
//! carries f(z). Post-selected amplitudes stay unnormalized with the branch
//! probability tracked alongside, so resource accounting keeps exact products.

use crate::bloch::ProjectiveQubit;
use crate::complex::Cx;
use crate::dynamics::MapParams;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Two-qubit amplitudes ordered |00⟩, |01⟩, |10⟩, |11⟩ (qubit 1 ⊗ qubit 2).
#[derive(Debug, Clone, Copy)]
pub struct TwoQubitState<R> {
    pub amps: [Cx<R>; 4],
}

impl<R: Real> TwoQubitState<R> {
    /// |ψ⟩ ⊗ |ψ⟩ from a normalized copy of the qubit.
    pub fn two_copies(state: &ProjectiveQubit<R>) -> Self {
        let n = state.norm_sqr().sqrt();
        let a = state.zeta1().scale(R::one() / n);
        let b = state.zeta2().scale(R::one() / n);
        TwoQubitState { amps: [a * a, a * b, b * a, b * b] }
    }

    pub fn norm_sqr(&self) -> R {
        self.amps
            .iter()
            .fold(R::zero(), |acc, a| acc + a.norm_sqr())
    }
}

#[derive(Debug, Clone)]
pub struct GateMatrix<R> {
    pub m: [[Cx<R>; 4]; 4],
    pub unitary: bool,
}

pub const UNITARITY_TOL: f64 = 1e-13;

impl<R: Real> GateMatrix<R> {
    pub fn new(m: [[Cx<R>; 4]; 4]) -> Self {
        let mut g = GateMatrix { m, unitary: false };
        g.unitary = g.deviation_from_unitarity() < UNITARITY_TOL;
        g
    }

    /// max |(U†U − I)_{jk}|
    pub fn deviation_from_unitarity(&self) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..4 {
            for k in 0..4 {
                let mut dot = Cx::<R>::zero();
                for l in 0..4 {
                    dot = dot + self.m[l][j].conj() * self.m[l][k];
                }
                let target = if j == k { Cx::one() } else { Cx::zero() };
                let dev = (dot - target).abs().to_f64();
                worst = worst.max(dev);
            }
        }
        worst
    }

    pub fn apply(&self, v: &TwoQubitState<R>) -> TwoQubitState<R> {
        let mut out = [Cx::<R>::zero(); 4];
        for (j, slot) in out.iter_mut().enumerate() {
            let mut acc = Cx::zero();
            for k in 0..4 {
                acc = acc + self.m[j][k] * v.amps[k];
            }
            *slot = acc;
        }
        TwoQubitState { amps: out }
    }

    pub fn matmul(&self, rhs: &GateMatrix<R>) -> GateMatrix<R> {
        let mut m = [[Cx::<R>::zero(); 4]; 4];
        for j in 0..4 {
            for k in 0..4 {
                let mut acc = Cx::zero();
                for l in 0..4 {
                    acc = acc + self.m[j][l] * rhs.m[l][k];
                }
                m[j][k] = acc;
            }
        }
        GateMatrix::new(m)
    }
}

#[derive(Debug, Clone)]
pub struct Gates<R> {
    pub u_xor: GateMatrix<R>,
    pub u_gate: GateMatrix<R>,
    pub u_comp: GateMatrix<R>,
}

/// The two printed gates and their product U_comp = U_gate · U_XOR, all with
/// the 1/√(1+|s|²) prefactor on U_gate. U_XOR is always unitary; U_gate is
/// unitary on the imaginary axis and the flag records what the check found —
/// the matrices are applied as printed either way.
pub fn build_gates<R: Real>(params: &MapParams<R>) -> Gates<R> {
    let o = Cx::<R>::zero();
    let l = Cx::<R>::one();
    let u_xor = GateMatrix::new([
        [l, o, o, o],
        [o, l, o, o],
        [o, o, o, l],
        [o, o, l, o],
    ]);
    let s = params.s;
    let pref = R::one() / (R::one() + s.norm_sqr()).sqrt();
    let sc = s.scale(pref);
    let cc = s.conj().scale(pref);
    let lp = l.scale(pref);
    let u_gate = GateMatrix::new([
        [lp, o, sc, o],
        [o, cc, o, lp],
        [sc, o, lp, o],
        [o, lp, o, cc],
    ]);
    let u_comp = u_gate.matmul(&u_xor);
    Gates { u_xor, u_gate, u_comp }
}

/// One map iteration through the circuit: two copies in, U_comp, post-select
/// the ancilla in |↑⟩_z, read the surviving first-qubit spinor. Returns the
/// evolved state and the branch probability ⟨Ψ(1)|P†P|Ψ(1)⟩.
pub fn iterate_via_circuit<R: Real>(
    state: &ProjectiveQubit<R>,
    params: &MapParams<R>,
) -> Result<(ProjectiveQubit<R>, R)> {
    let gates = build_gates(params);
    let evolved = gates.u_comp.apply(&TwoQubitState::two_copies(state));
    // P = I ⊗ |↑⟩⟨↑| keeps the |00⟩ and |10⟩ components
    let kept0 = evolved.amps[0];
    let kept1 = evolved.amps[2];
    let success = kept0.norm_sqr() + kept1.norm_sqr();
    if success.to_f64() < 1e-300 {
        return Err(Error::PostSelectionNull(success.to_f64()));
    }
    Ok((ProjectiveQubit::new(kept0, kept1)?, success))
}

/// Closed-form single-step success probability (1+|z|⁴)/(1+|z|²)², valid on
/// the imaginary axis s = x·i, written projectively so z = ∞ is fine.
pub fn success_probability<R: Real>(
    state: &ProjectiveQubit<R>,
    params: &MapParams<R>,
) -> Result<R> {
    if !params.is_imaginary_axis() {
        return Err(Error::InvalidArgument(
            "closed-form success probability requires s on the imaginary axis".into(),
        ));
    }
    let m1 = state.zeta1().norm_sqr();
    let m2 = state.zeta2().norm_sqr();
    let sum = m1 + m2;
    Ok((m1 * m1 + m2 * m2) / (sum * sum))
}

/// Same quantity through the colatitude: ¼(3 + cos 2θ).
pub fn success_probability_angular<R: Real>(theta: R) -> R {
    (R::from_f64(3.0) + (theta * R::from_f64(2.0)).cos()) / R::from_f64(4.0)
}

/// Expected initial-ensemble size for n successful iterations: ∏ₖ 2/p(k-th
/// iterate) — two copies consumed per step, each surviving with p.
pub fn resource_estimate<R: Real>(
    state: &ProjectiveQubit<R>,
    params: &MapParams<R>,
    n: usize,
) -> Result<R> {
    if n == 0 {
        return Err(Error::InvalidArgument("resource estimate needs n >= 1".into()));
    }
    let two = R::from_f64(2.0);
    let mut current = *state;
    let mut product = R::one();
    for _ in 0..n {
        let (next, p) = iterate_via_circuit(&current, params)?;
        product = product * (two / p);
        current = next;
    }
    Ok(product)
}
