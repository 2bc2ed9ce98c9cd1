//! Planck parameter for the integrality condition h = 1/N.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};

/// Planck data for the quantized torus at h = 1/N.
///
/// Carries N, hbar = 1/(2*pi*N) and the commutation phase
/// lambda = 4*pi^2*hbar = 2*pi/N, so that U V = e^{i lambda} V U.
#[derive(Debug, Clone, Copy)]
pub struct PlanckParameter {
    n: u32,
    hbar: f64,
    lambda: f64,
}

impl PartialEq for PlanckParameter {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
    }
}

impl Eq for PlanckParameter {}

impl PlanckParameter {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("N must be >= 1".into()));
        }
        let nf = f64::from(n);
        Ok(Self {
            n,
            hbar: 1.0 / (2.0 * PI * nf),
            lambda: 2.0 * PI / nf,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Planck's constant h = 1/N.
    pub fn h(&self) -> f64 {
        1.0 / f64::from(self.n)
    }

    /// Reduced Planck's constant hbar = h/(2 pi) = 1/(2 pi N).
    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// Commutation phase lambda = 4 pi^2 hbar = 2 pi / N.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// The unit phase e^{i pi s / N} for integer s.
    ///
    /// All algebra phases are integer multiples of lambda/2 = pi/N; reducing
    /// s mod 2N before evaluating keeps them exact for arbitrarily large
    /// exponents instead of drifting with |s|.
    pub fn pi_over_n_phase(&self, s: &BigInt) -> Complex64 {
        let two_n = BigInt::from(2 * u64::from(self.n));
        let mut r = s % &two_n;
        if r.sign() == num_bigint::Sign::Minus {
            r += &two_n;
        }
        let r = r.to_f64().expect("residue fits in f64");
        Complex64::from_polar(1.0, PI * r / f64::from(self.n))
    }

    /// Same phase for a machine-word exponent.
    pub fn pi_over_n_phase_i64(&self, s: i64) -> Complex64 {
        self.pi_over_n_phase(&BigInt::from(s))
    }

    /// Checks that a partner value carries the same N.
    pub fn ensure_same(&self, other: &PlanckParameter) -> Result<()> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(Error::PlanckMismatch {
                left: self.n,
                right: other.n,
            })
        }
    }
}
