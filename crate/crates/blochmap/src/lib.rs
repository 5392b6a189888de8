//! Iterated quadratic conformal dynamics of a qubit on the Bloch sphere.
//!
//! The map f(z) = (z² + s)/(s·z² + 1) acts on the stereographic image
//! z = cot(θ/2)e^{iφ} of a pure state. For s = 0 orbits flow to the poles;
//! on the imaginary segment up to s = i the dynamics turns chaotic and the
//! Julia set swallows the whole sphere. Iterating the map stretches any two
//! nearby states apart exponentially, which makes statistically
//! near-identical states distinguishable: the library builds the dynamics,
//! the post-selected measurement statistics (Leggett-Garg K₃ and two-time
//! correlations), ensemble diagnostics (Pearson r_XY, average fidelity), the
//! ancilla circuit realization with its success-probability accounting, and
//! Julia-set rasters with box-counting dimension.
//!
//! Everything numerical is generic over [`scalar::Real`], instantiated at
//! `f64` or the double-double [`dd::Dd`] (~32 digits), selectable per run.

pub mod bloch;
pub mod circuit;
pub mod complex;
pub mod dd;
pub mod dynamics;
pub mod ensemble;
pub mod error;
pub mod fractal;
pub mod leggett_garg;
pub mod protocol;
pub mod scalar;

pub use bloch::{
    chordal_distance, fidelity, geodesic_distance, helstrom_error, pair_at_delta,
    ProjectiveQubit, SpherePoint, StatePair,
};
pub use complex::{Cx, ExtComplex};
pub use dd::Dd;
pub use dynamics::{apply_map, fixed_points, iterate, root_directions, MapParams, Orbit};
pub use error::{Error, Result};
pub use leggett_garg::{
    faulty_k3_series, joint_probabilities, k3_reduced_series, k3_series, two_time_correlation,
    K3Record, ObservableAxis,
};
pub use scalar::{Precision, Real};
