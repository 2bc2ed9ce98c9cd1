//! Quantized torus toolkit.
//!
//! The algebra generated by unitaries U, V with U V = e^{4 pi^2 i hbar} V U
//! plays the role of functions on a toroidal phase space. This crate
//! implements that algebra over the integrality points h = 1/N together
//! with the structures built on it:
//!
//! - [`weyl`]: exact sparse arithmetic in the Weyl-monomial basis, the
//!   tracial state tau and the Koopman inner product (A,B) = tau(A^dag B);
//! - [`dynamics`]: cat-map and Kronecker Z-actions, Cesaro time averages,
//!   ergodicity-defect and mixing-correlation diagnostics, and the
//!   classical Fourier-mode pushforward used as their oracle;
//! - [`theta_rep`]: the N-dimensional clock/shift sector representation,
//!   sector traces and the theta-averaged trace, the DFT matrix, and
//!   Heisenberg evolution under a user-supplied propagator;
//! - [`bargmann`]: Jacobi theta series, sector basis wavefunctions with
//!   quadrature orthonormality, projective translations, delta-comb
//!   position/momentum representations and the diffraction-kernel pairing;
//! - [`quantize`]: Toeplitz/anti-Wick quantization of trigonometric
//!   symbols and the one-step Egorov defect.
//!
//! Values are immutable and every operation is a pure function, so
//! everything here is safe to use concurrently without synchronization.

pub mod bargmann;
pub mod dynamics;
pub mod error;
pub mod planck;
pub mod quantize;
pub mod theta_rep;
pub mod weyl;

#[cfg(test)]
mod test_support;

pub use error::{Error, Result};
pub use planck::PlanckParameter;
pub use weyl::{AlgebraElement, WeylIndex};
