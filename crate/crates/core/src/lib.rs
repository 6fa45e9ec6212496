//! Quadratic temporal finite elements for the single-degree-of-freedom
//! Kelvin–Voigt oscillator.
//!
//! The crate covers six one-step algorithms built from two mixed variational
//! formalisms (an extended Hamilton framework with states `(u, p, J)` and a
//! convolved-action framework with states `(u, J)`), each with quadratic time
//! interpolation of `J`, `u`, or both. Two Newmark schemes are carried as
//! reference methods.
//!
//! Modules:
//!
//! * [`model`]: oscillator parameters, forcing and impulse bookkeeping.
//! * [`elements`]: closed-form step matrices and the derivation oracles that
//!   rebuild them from the weak forms (Gauss–Legendre / exact rational
//!   integration and semi-derivative convolution).
//! * [`integrators`]: the one-step recurrence and trajectory reconstruction.
//! * [`spectral`]: amplification matrices, eigenvalues, dispersion,
//!   reversibility and symplecticity checks.
//! * [`oracle`]: closed-form responses, an RK4 reference, error norms and
//!   convergence studies.
//!
//! The crate is `no_std` (it needs `alloc`); file formats and the command line
//! live in the companion `tfem` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod elements;
pub mod error;
pub mod integrators;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod scalar;
pub mod spectral;

pub use elements::{build_step_matrices, AlgorithmId, Formalism, StepConstants, StepMatrices};
pub use error::{Error, Result};
pub use integrators::{simulate, Trajectory, TrajectoryState};
pub use model::{ForcingSpec, InitialConditions, OscillatorParams, SampledForce};
pub use scalar::{Rational, Scalar};
