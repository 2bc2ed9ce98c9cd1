//! Toeplitz (anti-Wick) quantization of trigonometric symbols on the
//! torus, and the one-step Egorov defect against the classical
//! pushforward.
//!
//! The Toeplitz operator of a symbol sigma is
//! T(sigma) psi(z) = int e^{z wbar/hbar} sigma(w) psi(w) dmu_hbar(w),
//! which places every annihilator A = hbar d/dz to the left of every
//! creator A^dag = z (anti-Wick ordering), with [A, A^dag] = hbar.
//!
//! Mode rule. Writing z = (x + ip)/sqrt(2), the harmonic e^{2 pi i (m x + k p)}
//! factors as e^{alpha z} e^{beta zbar} with alpha = sqrt(2) pi i (m - ik)
//! and beta = sqrt(2) pi i (m + ik); anti-Wick ordering sends it to
//! e^{beta A} e^{alpha A^dag}. Re-merging the exponentials with
//! [beta A, alpha A^dag] = alpha beta hbar = -2 pi^2 (m^2+k^2) hbar gives
//!
//! T(e^{2 pi i (m x + k p)}) = e^{-pi^2 hbar (m^2+k^2)} W(m,k),
//!
//! i.e. each Fourier mode maps onto its Weyl monomial damped by
//! gamma(m,k) = e^{-pi^2 hbar (m^2+k^2)}. The constant is not taken on
//! faith: the test suite re-derives it by numerically evaluating the
//! Toeplitz integral against the theta-sector basis.
//!
//! Sign convention: with the opposite choice z = (x - ip)/sqrt(2) the
//! same calculation lands on W(m,-k); the translation operator
//! U(hbar pi sqrt(2)) that realizes V is then e^{-2 pi i p-hat} instead of
//! e^{+2 pi i p-hat}. We fix the k-sign so that quantization intertwines
//! the Kronecker automorphism phase e^{2 pi i n (v.t)} exactly, which is
//! what makes the Kronecker Egorov defect vanish identically.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use num_traits::ToPrimitive;

use crate::dynamics::{apply_automorphism, classical_pushforward, ToralAutomorphism};
use crate::error::{Error, Result};
use crate::planck::PlanckParameter;
use crate::weyl::{json_bigint, json_f64, AlgebraElement, WeylIndex};

/// A trigonometric symbol f(x,p) = sum c_{mk} e^{2 pi i (m x + k p)} with
/// finite Fourier support.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TorusSymbol {
    modes: BTreeMap<WeylIndex, Complex64>,
}

impl TorusSymbol {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn constant(c: Complex64) -> Self {
        Self::single_mode(WeylIndex::zero(), c)
    }

    pub fn single_mode(v: WeylIndex, c: Complex64) -> Self {
        let mut modes = BTreeMap::new();
        modes.insert(v, c);
        Self { modes }
    }

    pub fn from_modes(iter: impl IntoIterator<Item = (WeylIndex, Complex64)>) -> Self {
        let mut modes: BTreeMap<WeylIndex, Complex64> = BTreeMap::new();
        for (v, c) in iter {
            *modes.entry(v).or_insert_with(|| Complex64::new(0.0, 0.0)) += c;
        }
        Self { modes }
    }

    pub fn modes(&self) -> impl Iterator<Item = (&WeylIndex, &Complex64)> {
        self.modes.iter()
    }

    pub fn num_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn coefficient(&self, v: &WeylIndex) -> Complex64 {
        self.modes
            .get(v)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Pointwise evaluation on the torus.
    pub fn evaluate(&self, x: f64, p: f64) -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        for (v, c) in &self.modes {
            let m = v.m.to_f64().unwrap_or(f64::INFINITY);
            let k = v.k.to_f64().unwrap_or(f64::INFINITY);
            total += c * Complex64::from_polar(
                1.0,
                2.0 * std::f64::consts::PI * (m * x + k * p).rem_euclid(1.0),
            );
        }
        total
    }

    /// Whether c_{-m,-k} = conj(c_{mk}) within `tol`, i.e. the symbol is
    /// real-valued. Checked on demand, never enforced.
    pub fn is_conjugate_symmetric(&self, tol: f64) -> bool {
        self.modes
            .iter()
            .all(|(v, c)| (self.coefficient(&v.negated()) - c.conj()).norm() <= tol)
    }

    /// `{"modes": [{"m","k","re","im"}, ...]}`, sorted by (m,k).
    pub fn to_json(&self) -> String {
        let mut out = String::from("{\"modes\": [");
        for (i, (v, c)) in self.modes.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            write!(
                out,
                "{{\"m\": {}, \"k\": {}, \"re\": {:.16e}, \"im\": {:.16e}}}",
                v.m, v.k, c.re, c.im
            )
            .unwrap();
        }
        out.push_str("]}");
        out
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let modes = value
            .get("modes")
            .and_then(|v| v.as_array())
            .ok_or_else(|| Error::Parse("missing \"modes\" array".into()))?;
        let mut parsed = Vec::with_capacity(modes.len());
        for t in modes {
            parsed.push((
                WeylIndex {
                    m: json_bigint(t, "m")?,
                    k: json_bigint(t, "k")?,
                },
                Complex64::new(json_f64(t, "re")?, json_f64(t, "im")?),
            ));
        }
        Ok(Self::from_modes(parsed))
    }
}

/// The anti-Wick damping gamma(m,k) = e^{-pi^2 hbar (m^2+k^2)}.
pub fn gamma_damping(v: &WeylIndex, planck: &PlanckParameter) -> f64 {
    let norm_sq = v.norm_sq().to_f64().unwrap_or(f64::INFINITY);
    (-std::f64::consts::PI.powi(2) * planck.hbar() * norm_sq).exp()
}

/// Toeplitz quantization: c_{mk} e^{2 pi i (m x + k p)} maps to
/// c_{mk} gamma(m,k) W(m,k). Linear; gamma(0,0) = 1, so the trace of the
/// quantization is the phase-space mean of the symbol.
pub fn quantize(f: &TorusSymbol, planck: PlanckParameter) -> AlgebraElement {
    AlgebraElement::from_terms(
        planck,
        f.modes().map(|(v, c)| {
            (
                v.clone(),
                c * Complex64::new(gamma_damping(v, &planck), 0.0),
            )
        }),
    )
}

/// The phase-space mean int f dx dp = c_{00}.
pub fn symbol_integral(f: &TorusSymbol) -> Complex64 {
    f.coefficient(&WeylIndex::zero())
}

/// One-step Egorov defect || alpha_1(Q(f)) - Q(f o T) || in the Koopman
/// norm. Both routes relabel indices identically, so for a cat map the
/// defect reduces to the l2 mismatch of the gamma factors along the
/// orbit, and it vanishes identically for Kronecker shifts; it decays to
/// 0 as N grows at fixed f.
pub fn egorov_defect(f: &TorusSymbol, alpha: &ToralAutomorphism, planck: PlanckParameter) -> f64 {
    let evolved = apply_automorphism(alpha, &quantize(f, planck), 1);
    let quantized = quantize(&classical_pushforward(f, alpha, 1), planck);
    evolved
        .sub(&quantized)
        .expect("both sides share one Planck parameter")
        .koopman_norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_support::random_symbol;
    use crate::theta_rep::{represent, ThetaPoint};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn planck(n: u32) -> PlanckParameter {
        PlanckParameter::new(n).unwrap()
    }

    fn arnold() -> ToralAutomorphism {
        ToralAutomorphism::cat_map(2, 1, 1, 1).unwrap()
    }

    #[test]
    fn constant_symbol_quantizes_to_identity() {
        let p = planck(3);
        let f = TorusSymbol::constant(Complex64::new(1.0, 0.0));
        assert_eq!(quantize(&f, p), AlgebraElement::identity(p));
    }

    #[test]
    fn single_mode_gets_the_gaussian_damping() {
        for n in [2u32, 3, 8] {
            let p = planck(n);
            let f = TorusSymbol::single_mode(WeylIndex::new(1, 0), Complex64::new(1.0, 0.0));
            let q = quantize(&f, p);
            let expect = (-PI * PI * p.hbar()).exp();
            assert!(
                (q.coefficient(&WeylIndex::new(1, 0)) - Complex64::new(expect, 0.0)).norm() < 1e-15
            );
            assert_eq!(q.num_terms(), 1);
        }
    }

    #[test]
    fn toeplitz_integral_reproduces_the_damping() {
        // Independent derivation of gamma: evaluate
        //   T(sigma) phi_n(z) = int e^{z wbar/hbar} sigma(w) phi_n(w) dmu(w)
        // for sigma = e^{2 pi i x} by brute quadrature and compare against
        // gamma(1,0) * (the diagonal action of U on the sector basis).
        use crate::bargmann::{basis_value, BasisWavefunction, ThetaSeriesParams};

        let params = ThetaSeriesParams::default();
        for n_planck in [2u32, 3] {
            let p = planck(n_planck);
            let hbar = p.hbar();
            let theta = ThetaPoint::new(0.3, 0.7);
            let gamma = (-PI * PI * hbar).exp();
            // midpoint quadrature over a box that dominates the Gaussian
            let (lo, hi, steps) = (-2.5f64, 3.5f64, 300usize);
            let h = (hi - lo) / steps as f64;
            for m in 0..n_planck {
                let basis = BasisWavefunction::new(m, theta, p).unwrap();
                for z in [Complex64::new(0.2, 0.1), Complex64::new(0.5, -0.2)] {
                    let mut integral = Complex64::new(0.0, 0.0);
                    for i in 0..steps {
                        let u = lo + (i as f64 + 0.5) * h;
                        for j in 0..steps {
                            let v = lo + (j as f64 + 0.5) * h;
                            let w = Complex64::new(u, v);
                            let x_w = (w + w.conj()) / Complex64::new(2f64.sqrt(), 0.0);
                            let sigma = (Complex64::new(0.0, 2.0 * PI) * x_w).exp();
                            let mu = (-(w.norm_sqr()) / hbar).exp() / (PI * hbar);
                            integral += (z * w.conj() / hbar).exp()
                                * sigma
                                * basis_value(&basis, w, &params).unwrap()
                                * mu;
                        }
                    }
                    integral *= Complex64::new(h * h, 0.0);
                    let eigen = Complex64::from_polar(
                        1.0,
                        2.0 * PI * (theta.theta1() + f64::from(m)) / f64::from(n_planck),
                    );
                    let expect = Complex64::new(gamma, 0.0)
                        * eigen
                        * basis_value(&basis, z, &params).unwrap();
                    assert!(
                        (integral - expect).norm() < 1e-6 * expect.norm().max(1.0),
                        "N={n_planck} m={m} z={z}: {integral} vs {expect}"
                    );
                }
            }
        }
    }

    #[test]
    fn trace_equals_symbol_integral() {
        let p = planck(5);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let f = random_symbol(&mut rng, 3);
            assert_eq!(quantize(&f, p).trace(), symbol_integral(&f));
        }
        let f = TorusSymbol::from_modes([
            (WeylIndex::zero(), Complex64::new(3.0, 0.0)),
            (WeylIndex::new(1, 1), Complex64::new(2.0, 0.0)),
        ]);
        assert_eq!(symbol_integral(&f), Complex64::new(3.0, 0.0));
        let g = TorusSymbol::single_mode(WeylIndex::new(1, 0), Complex64::new(1.0, 0.0));
        assert_eq!(symbol_integral(&g), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn quantization_respects_adjoints() {
        let p = planck(4);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let f = random_symbol(&mut rng, 3);
            // symmetrize to a real symbol
            let symm = TorusSymbol::from_modes(
                f.modes()
                    .map(|(v, c)| (v.clone(), *c))
                    .chain(f.modes().map(|(v, c)| (v.negated(), c.conj()))),
            );
            assert!(symm.is_conjugate_symmetric(1e-14));
            let q = quantize(&symm, p);
            let diff = q.sub(&q.adjoint()).unwrap().koopman_norm();
            assert!(diff < 1e-13);
        }
    }

    #[test]
    fn egorov_defect_trivial_cases() {
        let f = TorusSymbol::constant(Complex64::new(1.0, 0.0));
        for n in [2u32, 8] {
            assert_eq!(egorov_defect(&f, &arnold(), planck(n)), 0.0);
        }
        // Kronecker shifts leave indices in place, so both routes multiply
        // each coefficient by the identical phase and the identical damping;
        // only the f64 multiplication order distinguishes them
        let alpha = ToralAutomorphism::kronecker(0.3, 0.77);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let f = random_symbol(&mut rng, 3);
            let norm: f64 = f.modes().map(|(_, c)| c.norm_sqr()).sum::<f64>().sqrt();
            assert!(egorov_defect(&f, &alpha, planck(4)) <= 1e-15 * norm.max(1.0));
        }
    }

    #[test]
    fn egorov_defect_closed_form_for_the_cat_map() {
        // mode (1,0) maps onto (2,1): defect = |gamma(1) - gamma(5)|
        let f = TorusSymbol::single_mode(WeylIndex::new(1, 0), Complex64::new(1.0, 0.0));
        let mut defects = Vec::new();
        for n in [4u32, 8, 16, 32, 64] {
            let p = planck(n);
            let d = egorov_defect(&f, &arnold(), p);
            let expect = ((-PI * PI * p.hbar()).exp() - (-5.0 * PI * PI * p.hbar()).exp()).abs();
            assert!((d - expect).abs() < 1e-15, "N={n}");
            defects.push(d);
        }
        // decreasing toward 0, with the doubling ratio approaching 1/2
        for w in defects.windows(2) {
            assert!(w[1] < w[0]);
        }
        let last_ratio = defects[4] / defects[3];
        assert!((0.4..=0.6).contains(&last_ratio), "ratio {last_ratio}");
    }

    #[test]
    fn koopman_norm_of_quantization_rises_to_the_symbol_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let f = random_symbol(&mut rng, 3);
        let l2: f64 = f.modes().map(|(_, c)| c.norm_sqr()).sum::<f64>().sqrt();
        let mut prev = 0.0;
        for n in [4u32, 8, 16, 32, 64, 128, 512, 4096] {
            let norm = quantize(&f, planck(n)).koopman_norm();
            assert!(norm >= prev);
            assert!(norm <= l2 + 1e-14);
            prev = norm;
        }
        // damping exponent at degree <= 3 is at most 18 pi^2 hbar ~ 7e-3
        assert!((prev - l2).abs() < 1e-2 * l2);
    }

    #[test]
    fn nonnegative_symbols_quantize_to_nonnegative_operators() {
        // f = |g|^2 for a random trig polynomial g; check the sector
        // representation's minimum eigenvalue.
        use nalgebra::DMatrix;
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for n in [2u32, 4, 8] {
            let p = planck(n);
            for _ in 0..5 {
                let g = random_symbol(&mut rng, 1);
                let f = TorusSymbol::from_modes(g.modes().flat_map(|(v, c)| {
                    g.modes()
                        .map(move |(w, d)| (v.sum(&w.negated()), c * d.conj()))
                        .collect::<Vec<_>>()
                }));
                // nonnegative on a 64^2 sample grid by construction
                for i in 0..64 {
                    for j in 0..64 {
                        let val = f.evaluate(i as f64 / 64.0, j as f64 / 64.0);
                        assert!(val.re >= -1e-10 && val.im.abs() < 1e-10);
                    }
                }
                let q = quantize(&f, p);
                let theta = ThetaPoint::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
                let mat = represent(&q, &theta);
                let dim = mat.dim();
                let nmat = DMatrix::from_fn(dim, dim, |r, c| mat.get(r, c));
                let eig = nmat.symmetric_eigen();
                let min = eig
                    .eigenvalues
                    .iter()
                    .cloned()
                    .fold(f64::INFINITY, f64::min);
                assert!(min >= -1e-8, "N={n}: min eigenvalue {min}");
            }
        }
    }

    #[test]
    fn symbol_json_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..20 {
            let f = random_symbol(&mut rng, 4);
            let back = TorusSymbol::from_json(&f.to_json()).unwrap();
            assert_eq!(back, f);
        }
    }
}
