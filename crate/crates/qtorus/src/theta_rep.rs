//! The finite-dimensional theta-sector representation at h = 1/N.
//!
//! At h = 1/N the center of the algebra is generated by X = U^N and
//! Y = V^N; the simultaneous eigenspace with X = e^{2 pi i theta_1},
//! Y = e^{2 pi i theta_2} is N-dimensional, and on it U acts as the clock
//! matrix diag(e^{2 pi i (theta_1 + m)/N}) and V as the cyclic shift
//! e_m -> e^{2 pi i theta_2/N} e_{m+1 mod N} (wrap phase 1; the alternate
//! wrap convention is unitarily equivalent, and the analytic basis
//! functions satisfy phi_{m+N} = phi_m, matching this choice). Averaging
//! the normalized sector trace over theta recovers the algebraic trace.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::planck::PlanckParameter;
use crate::weyl::{AlgebraElement, WeylIndex};

/// A point theta = (theta_1, theta_2) on the unit torus, stored mod 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaPoint {
    theta1: f64,
    theta2: f64,
}

impl ThetaPoint {
    pub fn new(theta1: f64, theta2: f64) -> Self {
        let wrap = |x: f64| {
            let f = x.rem_euclid(1.0);
            if f == 1.0 {
                0.0
            } else {
                f
            }
        };
        Self {
            theta1: wrap(theta1),
            theta2: wrap(theta2),
        }
    }

    pub fn theta1(&self) -> f64 {
        self.theta1
    }

    pub fn theta2(&self) -> f64 {
        self.theta2
    }
}

/// A dense N x N complex matrix acting on the sector Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl SectorMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Builds from a row-major entry list of length dim^2.
    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                left: dim * dim,
                right: entries.len(),
            });
        }
        Ok(Self { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: rhs.dim,
            });
        }
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for l in 0..n {
                let a = self.get(i, l);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    let v = out.get(i, j) + a * rhs.get(l, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: rhs.dim,
            });
        }
        Ok(Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.add(&rhs.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|a| a * c).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Deviation from unitarity, || M^dag M - I ||_F.
    pub fn unitarity_defect(&self) -> f64 {
        let prod = self
            .dagger()
            .matmul(self)
            .expect("dimensions agree by construction");
        prod.sub(&Self::identity(self.dim))
            .unwrap()
            .frobenius_norm()
    }

    /// `{"dim": N, "entries": [re, im, re, im, ...]}` row-major.
    pub fn to_json(&self) -> String {
        let mut out = String::new();
        write!(out, "{{\"dim\": {}, \"entries\": [", self.dim).unwrap();
        for (i, c) in self.entries.iter().enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            write!(out, "{:.16e}, {:.16e}", c.re, c.im).unwrap();
        }
        out.push_str("]}");
        out
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let dim = value
            .get("dim")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| Error::Parse("missing \"dim\"".into()))? as usize;
        let raw = value
            .get("entries")
            .and_then(|v| v.as_array())
            .ok_or_else(|| Error::Parse("missing \"entries\" array".into()))?;
        if raw.len() != 2 * dim * dim {
            return Err(Error::Parse(format!(
                "expected {} floats, found {}",
                2 * dim * dim,
                raw.len()
            )));
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for pair in raw.chunks(2) {
            let re = pair[0]
                .as_f64()
                .ok_or_else(|| Error::Parse("non-numeric entry".into()))?;
            let im = pair[1]
                .as_f64()
                .ok_or_else(|| Error::Parse("non-numeric entry".into()))?;
            entries.push(Complex64::new(re, im));
        }
        Self::from_entries(dim, entries)
    }

    /// CSV with columns `row,col,re,im`, row-major order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row,col,re,im\n");
        for i in 0..self.dim {
            for j in 0..self.dim {
                let c = self.get(i, j);
                writeln!(out, "{},{},{:.16e},{:.16e}", i, j, c.re, c.im).unwrap();
            }
        }
        out
    }
}

/// The sector images of the generators: uMat = diag(e^{2 pi i (theta_1+m)/N}),
/// vMat the cyclic shift with phase e^{2 pi i theta_2/N}. Both unitary with
/// uMat vMat = e^{2 pi i/N} vMat uMat.
pub fn sector_generators(
    planck: &PlanckParameter,
    theta: &ThetaPoint,
) -> (SectorMatrix, SectorMatrix) {
    let n = planck.n() as usize;
    let mut u = SectorMatrix::zeros(n);
    let mut v = SectorMatrix::zeros(n);
    for m in 0..n {
        u.set(
            m,
            m,
            Complex64::from_polar(
                1.0,
                2.0 * std::f64::consts::PI * (theta.theta1 + m as f64) / n as f64,
            ),
        );
        v.set(
            (m + 1) % n,
            m,
            Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * theta.theta2 / n as f64),
        );
    }
    (u, v)
}

fn bigint_mod_to_usize(x: &BigInt, modulus: usize) -> usize {
    let m = BigInt::from(modulus);
    let mut r = x % &m;
    if r.is_negative() {
        r += &m;
    }
    r.to_usize().expect("reduced residue fits")
}

/// Sector image of a single Weyl monomial, column by column:
/// W(m,k) e_j = e^{-i pi m k/N} e^{2 pi i theta_2 k/N}
///              e^{2 pi i m (theta_1 + r)/N} e_r   with r = (j+k) mod N.
fn represent_monomial(
    v: &WeylIndex,
    coeff: Complex64,
    planck: &PlanckParameter,
    theta: &ThetaPoint,
    out: &mut SectorMatrix,
) {
    let n = planck.n() as usize;
    let nf = n as f64;
    let two_pi = 2.0 * std::f64::consts::PI;
    let mf = v.m.to_f64().unwrap_or(f64::INFINITY);
    let kf = v.k.to_f64().unwrap_or(f64::INFINITY);
    // the Weyl symmetrization and the m*r part of the clock phase are
    // integer multiples of pi/N and 2*pi/N; reduce them exactly
    let weyl = planck.pi_over_n_phase(&(-(&v.m * &v.k)));
    let shift_phase = Complex64::from_polar(1.0, two_pi * (theta.theta2 * kf / nf).rem_euclid(1.0));
    let clock_theta = Complex64::from_polar(1.0, two_pi * (theta.theta1 * mf / nf).rem_euclid(1.0));
    let scale = coeff * weyl * shift_phase * clock_theta;
    for j in 0..n {
        let r = bigint_mod_to_usize(&(&v.k + BigInt::from(j)), n);
        let clock_r = planck.pi_over_n_phase(&(BigInt::from(2) * &v.m * BigInt::from(r)));
        let val = out.get(r, j) + scale * clock_r;
        out.set(r, j, val);
    }
}

/// Sector representation rho_theta of an algebra element: linear,
/// multiplicative, and adjoint-compatible; the centre monomials U^N, V^N
/// land on the scalars e^{2 pi i theta_1}, e^{2 pi i theta_2}.
pub fn represent(a: &AlgebraElement, theta: &ThetaPoint) -> SectorMatrix {
    let planck = a.planck();
    let mut out = SectorMatrix::zeros(planck.n() as usize);
    for (v, c) in a.terms() {
        represent_monomial(v, *c, &planck, theta, &mut out);
    }
    out
}

/// Normalized matrix trace (1/N) Tr.
pub fn sector_trace(m: &SectorMatrix) -> Complex64 {
    let mut t = Complex64::new(0.0, 0.0);
    for i in 0..m.dim {
        t += m.get(i, i);
    }
    t / m.dim as f64
}

/// Average of the sector trace over a uniform Q x Q theta-grid. By
/// discrete Fourier orthogonality this equals the algebraic trace
/// exactly once Q exceeds max(|m|,|k|)/N over the support.
pub fn theta_averaged_trace(a: &AlgebraElement, grid: u32) -> Result<Complex64> {
    if grid == 0 {
        return Err(Error::InvalidArgument("theta grid must be >= 1".into()));
    }
    let q = grid as usize;
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..q {
        for j in 0..q {
            let theta = ThetaPoint::new(i as f64 / q as f64, j as f64 / q as f64);
            total += sector_trace(&represent(a, &theta));
        }
    }
    Ok(total / (q * q) as f64)
}

/// The unitary DFT matrix F_{mn} = e^{-2 pi i m n / N} / sqrt(N).
pub fn dft_matrix(n: usize) -> SectorMatrix {
    assert!(n >= 1, "DFT dimension must be >= 1");
    let mut f = SectorMatrix::zeros(n);
    let scale = 1.0 / (n as f64).sqrt();
    for m in 0..n {
        for k in 0..n {
            let r = (m * k) % n;
            f.set(
                m,
                k,
                Complex64::from_polar(scale, -2.0 * std::f64::consts::PI * r as f64 / n as f64),
            );
        }
    }
    f
}

/// Heisenberg evolution F^{-n} A F^{n} for a user-supplied unitary
/// propagator F; preserves the sector trace. F must be unitary within
/// 1e-10 in Frobenius norm.
pub fn conjugate_evolve(f: &SectorMatrix, a: &SectorMatrix, n: i64) -> Result<SectorMatrix> {
    if f.dim != a.dim {
        return Err(Error::DimensionMismatch {
            left: f.dim,
            right: a.dim,
        });
    }
    let defect = f.unitarity_defect();
    if defect > 1e-10 {
        return Err(Error::NotUnitary { deviation: defect });
    }
    let f_dag = f.dagger();
    let (left, right) = if n >= 0 { (&f_dag, f) } else { (f, &f_dag) };
    let mut out = a.clone();
    for _ in 0..n.unsigned_abs() {
        out = left.matmul(&out)?.matmul(right)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_support::random_element;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn planck(n: u32) -> PlanckParameter {
        PlanckParameter::new(n).unwrap()
    }

    fn w(m: i64, k: i64, p: PlanckParameter) -> AlgebraElement {
        AlgebraElement::monomial(WeylIndex::new(m, k), p)
    }

    fn max_abs_diff(a: &SectorMatrix, b: &SectorMatrix) -> f64 {
        a.entries()
            .iter()
            .zip(b.entries())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn generators_at_small_n() {
        let p = planck(2);
        let (u, v) = sector_generators(&p, &ThetaPoint::new(0.0, 0.0));
        assert!((u.get(0, 0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((u.get(1, 1) - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
        assert!((v.get(1, 0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((v.get(0, 1) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        // UV = -VU at N = 2
        let uv = u.matmul(&v).unwrap();
        let vu = v.matmul(&u).unwrap();
        assert!(max_abs_diff(&uv, &vu.scale(Complex64::new(-1.0, 0.0))) < 1e-15);

        let p4 = planck(4);
        let (u4, _) = sector_generators(&p4, &ThetaPoint::new(0.0, 0.0));
        for (m, want) in [
            (0usize, (1.0, 0.0)),
            (1, (0.0, 1.0)),
            (2, (-1.0, 0.0)),
            (3, (0.0, -1.0)),
        ] {
            assert!((u4.get(m, m) - Complex64::new(want.0, want.1)).norm() < 1e-14);
        }

        // N = 1 is the commutative case: both generators are scalars
        let p1 = planck(1);
        let (u1, v1) = sector_generators(&p1, &ThetaPoint::new(0.3, 0.8));
        assert_eq!(u1.dim(), 1);
        assert!((u1.get(0, 0) - Complex64::from_polar(1.0, 2.0 * PI * 0.3)).norm() < 1e-14);
        assert!((v1.get(0, 0) - Complex64::from_polar(1.0, 2.0 * PI * 0.8)).norm() < 1e-14);
    }

    #[test]
    fn generator_commutation_for_a_range_of_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1u32..=16 {
            let p = planck(n);
            for _ in 0..10 {
                let theta = ThetaPoint::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
                let (u, v) = sector_generators(&p, &theta);
                assert!(u.unitarity_defect() < 1e-12);
                assert!(v.unitarity_defect() < 1e-12);
                let comm = u
                    .matmul(&v)
                    .unwrap()
                    .matmul(&u.dagger())
                    .unwrap()
                    .matmul(&v.dagger())
                    .unwrap();
                let expect = SectorMatrix::identity(n as usize)
                    .scale(Complex64::from_polar(1.0, 2.0 * PI / f64::from(n)));
                assert!(max_abs_diff(&comm, &expect) < 1e-12, "N={n}");
            }
        }
    }

    #[test]
    fn represent_maps_generators_onto_sector_matrices() {
        let p = planck(3);
        let theta = ThetaPoint::new(0.4, 0.9);
        let (u, v) = sector_generators(&p, &theta);
        assert!(max_abs_diff(&represent(&w(1, 0, p), &theta), &u) < 1e-14);
        assert!(max_abs_diff(&represent(&w(0, 1, p), &theta), &v) < 1e-14);
        let id = represent(&AlgebraElement::identity(p), &theta);
        assert!(max_abs_diff(&id, &SectorMatrix::identity(3)) < 1e-15);
    }

    #[test]
    fn centre_monomials_are_theta_scalars() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1u32, 2, 3, 5, 8, 16] {
            let p = planck(n);
            for _ in 0..10 {
                let theta = ThetaPoint::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
                let x = represent(&w(i64::from(n), 0, p), &theta);
                let y = represent(&w(0, i64::from(n), p), &theta);
                let ex = SectorMatrix::identity(n as usize)
                    .scale(Complex64::from_polar(1.0, 2.0 * PI * theta.theta1()));
                let ey = SectorMatrix::identity(n as usize)
                    .scale(Complex64::from_polar(1.0, 2.0 * PI * theta.theta2()));
                assert!(max_abs_diff(&x, &ex) < 1e-12, "N={n}");
                assert!(max_abs_diff(&y, &ey) < 1e-12, "N={n}");
            }
        }
    }

    #[test]
    fn representation_is_a_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [2u32, 3, 5, 8, 16] {
            let p = planck(n);
            for _ in 0..5 {
                let theta = ThetaPoint::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
                let a = random_element(&mut rng, p, 4);
                let b = random_element(&mut rng, p, 4);
                let lhs = represent(&a.multiply(&b).unwrap(), &theta);
                let rhs = represent(&a, &theta)
                    .matmul(&represent(&b, &theta))
                    .unwrap();
                assert!(lhs.sub(&rhs).unwrap().frobenius_norm() < 1e-10, "N={n}");
                // adjoint goes to conjugate transpose
                let lhs = represent(&a.adjoint(), &theta);
                let rhs = represent(&a, &theta).dagger();
                assert!(lhs.sub(&rhs).unwrap().frobenius_norm() < 1e-12);
            }
        }
        // the worked example: represent(W(1,0) W(0,1)) as a product, N = 3
        let p = planck(3);
        let theta = ThetaPoint::new(0.21, 0.88);
        let prod = w(1, 0, p).multiply(&w(0, 1, p)).unwrap();
        let lhs = represent(&prod, &theta);
        let rhs = represent(&w(1, 0, p), &theta)
            .matmul(&represent(&w(0, 1, p), &theta))
            .unwrap();
        assert!(max_abs_diff(&lhs, &rhs) < 1e-14);
    }

    #[test]
    fn sector_trace_examples() {
        assert_eq!(
            sector_trace(&SectorMatrix::identity(5)),
            Complex64::new(1.0, 0.0)
        );
        let p = planck(4);
        let theta = ThetaPoint::new(0.6, 0.1);
        // noncentral monomial: sum of 4th roots of unity vanishes
        let t = sector_trace(&represent(&w(1, 0, p), &theta));
        assert!(t.norm() < 1e-15);
        // central monomial sees theta, unlike the algebraic trace
        let t = sector_trace(&represent(&w(4, 0, p), &ThetaPoint::new(0.25, 0.0)));
        assert!((t - Complex64::new(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn theta_averaged_trace_recovers_the_algebraic_trace() {
        let p = planck(3);
        assert_eq!(
            theta_averaged_trace(&AlgebraElement::identity(p), 1).unwrap(),
            Complex64::new(1.0, 0.0)
        );
        assert!(theta_averaged_trace(&w(1, 0, p), 2).unwrap().norm() < 1e-15);
        // central monomial: pointwise nonzero, grid-average zero
        assert!(theta_averaged_trace(&w(3, 0, p), 2).unwrap().norm() < 1e-15);
        assert!(theta_averaged_trace(&w(1, 0, p), 0).is_err());
    }

    #[test]
    fn trace_factorization_over_monomials() {
        for n in [2u32, 3, 5] {
            let p = planck(n);
            let bound = 2 * i64::from(n);
            let q = 2 * (1 + 2) as u32; // Q > max degree / N
            for m in -bound..=bound {
                for k in -bound..=bound {
                    let a = w(m, k, p);
                    let avg = theta_averaged_trace(&a, q).unwrap();
                    assert!((avg - a.trace()).norm() < 1e-12, "N={n} m={m} k={k}: {avg}");
                }
            }
        }
    }

    #[test]
    fn koopman_norm_factorizes_through_the_sectors() {
        // for elements supported on {0..N-1}^2 x centre powers, the
        // squared norm is the grid average of (1/N)||rho_theta(a)||_F^2
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for n in [2u32, 3, 4] {
            let p = planck(n);
            for _ in 0..5 {
                let a = AlgebraElement::from_terms(
                    p,
                    (0..4).map(|_| {
                        let base_m = rng.gen_range(0..i64::from(n));
                        let base_k = rng.gen_range(0..i64::from(n));
                        let c_pow = rng.gen_range(-1i64..=1);
                        let d_pow = rng.gen_range(-1i64..=1);
                        (
                            WeylIndex::new(
                                base_m + c_pow * i64::from(n),
                                base_k + d_pow * i64::from(n),
                            ),
                            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                        )
                    }),
                );
                let q = 4usize; // exact for centre degree <= 1
                let mut avg = 0.0;
                for i in 0..q {
                    for j in 0..q {
                        let theta = ThetaPoint::new(i as f64 / q as f64, j as f64 / q as f64);
                        let r = represent(&a, &theta);
                        avg += r.frobenius_norm().powi(2) / f64::from(n);
                    }
                }
                avg /= (q * q) as f64;
                assert!((avg - a.koopman_norm().powi(2)).abs() < 1e-10, "N={n}");
            }
        }
    }

    #[test]
    fn dft_matrix_properties() {
        let f1 = dft_matrix(1);
        assert!((f1.get(0, 0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);

        let f2 = dft_matrix(2);
        let s = 1.0 / 2f64.sqrt();
        for (i, j, want) in [(0, 0, s), (0, 1, s), (1, 0, s), (1, 1, -s)] {
            assert!((f2.get(i, j) - Complex64::new(want, 0.0)).norm() < 1e-15);
        }

        let f4 = dft_matrix(4);
        assert!(f4.unitarity_defect() < 1e-12);
        let f4_4 = f4
            .matmul(&f4)
            .unwrap()
            .matmul(&f4)
            .unwrap()
            .matmul(&f4)
            .unwrap();
        assert!(max_abs_diff(&f4_4, &SectorMatrix::identity(4)) < 1e-12);
    }

    #[test]
    fn conjugate_evolution_preserves_traces() {
        let p = planck(4);
        let theta = ThetaPoint::new(0.3, 0.5);
        let a = represent(&w(1, 2, p), &theta)
            .add(&represent(&w(0, 1, p), &theta).scale(Complex64::new(0.5, 0.2)))
            .unwrap();

        // identity propagator: no motion
        let id = SectorMatrix::identity(4);
        assert_eq!(conjugate_evolve(&id, &a, 7).unwrap(), a);

        // DFT has order 4
        let f = dft_matrix(4);
        let back = conjugate_evolve(&f, &a, 4).unwrap();
        assert!(max_abs_diff(&back, &a) < 1e-12);

        // random unitary via Gram-Schmidt of a random matrix
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut cols: Vec<Vec<Complex64>> = (0..4)
            .map(|_| {
                (0..4)
                    .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                    .collect()
            })
            .collect();
        for i in 0..4 {
            for j in 0..i {
                let proj: Complex64 = (0..4).map(|r| cols[j][r].conj() * cols[i][r]).sum();
                let shadow = cols[j].clone();
                for (entry, base) in cols[i].iter_mut().zip(&shadow) {
                    *entry -= proj * base;
                }
            }
            let norm: f64 = cols[i].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            for entry in cols[i].iter_mut() {
                *entry /= norm;
            }
        }
        let mut u = SectorMatrix::zeros(4);
        for (j, col) in cols.iter().enumerate() {
            for (i, val) in col.iter().enumerate() {
                u.set(i, j, *val);
            }
        }
        assert!(u.unitarity_defect() < 1e-12);
        for n in [-3i64, 1, 5] {
            let moved = conjugate_evolve(&u, &a, n).unwrap();
            assert!((sector_trace(&moved) - sector_trace(&a)).norm() < 1e-12);
        }

        // group law in n
        let two_then_one = conjugate_evolve(&u, &conjugate_evolve(&u, &a, 2).unwrap(), 1).unwrap();
        let three = conjugate_evolve(&u, &a, 3).unwrap();
        assert!(max_abs_diff(&two_then_one, &three) < 1e-12);
    }

    #[test]
    fn non_unitary_propagators_are_rejected() {
        let a = SectorMatrix::identity(3);
        let f = SectorMatrix::identity(3).scale(Complex64::new(1.5, 0.0));
        match conjugate_evolve(&f, &a, 1) {
            Err(Error::NotUnitary { deviation }) => assert!(deviation > 1.0),
            other => panic!("expected NotUnitary, got {other:?}"),
        }
        let wrong_dim = SectorMatrix::identity(2);
        assert!(matches!(
            conjugate_evolve(&wrong_dim, &a, 1),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn sector_matrix_serialization_round_trips() {
        let p = planck(3);
        let theta = ThetaPoint::new(0.12, 0.93);
        let m = represent(&w(1, 2, p), &theta);
        let back = SectorMatrix::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
        let csv = m.to_csv();
        assert!(csv.starts_with("row,col,re,im\n"));
        assert_eq!(csv.lines().count(), 10);
    }
}
