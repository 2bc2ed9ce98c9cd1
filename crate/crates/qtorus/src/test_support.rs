//! Shared helpers for the unit-test modules.

use num_complex::Complex64;
use rand::Rng;

use crate::planck::PlanckParameter;
use crate::quantize::TorusSymbol;
use crate::weyl::{AlgebraElement, WeylIndex};

/// Coefficient-wise tolerance used by the algebraic property suites.
pub const COEFF_TOL: f64 = 1e-12;

/// A random sparse element: up to `max_terms` monomials with indices in
/// [-6,6]^2 and coefficients in the unit square.
pub fn random_element(
    rng: &mut impl Rng,
    planck: PlanckParameter,
    max_terms: usize,
) -> AlgebraElement {
    let n_terms = rng.gen_range(1..=max_terms);
    AlgebraElement::from_terms(
        planck,
        (0..n_terms).map(|_| {
            (
                WeylIndex::new(rng.gen_range(-6i64..=6), rng.gen_range(-6i64..=6)),
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            )
        }),
    )
}

/// A random trigonometric symbol with modes in [-degree,degree]^2.
pub fn random_symbol(rng: &mut impl Rng, degree: i64) -> TorusSymbol {
    let n_modes = rng.gen_range(1..=4);
    TorusSymbol::from_modes((0..n_modes).map(|_| {
        (
            WeylIndex::new(
                rng.gen_range(-degree..=degree),
                rng.gen_range(-degree..=degree),
            ),
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        )
    }))
}

/// Max coefficient-wise difference, treating missing terms as zero.
pub fn max_term_diff(a: &AlgebraElement, b: &AlgebraElement) -> f64 {
    let mut d: f64 = 0.0;
    for (v, c) in a.terms() {
        d = d.max((c - b.coefficient(v)).norm());
    }
    for (v, c) in b.terms() {
        d = d.max((c - a.coefficient(v)).norm());
    }
    d
}
