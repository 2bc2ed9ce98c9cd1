//! Bargmann-space numerics: Jacobi theta series, the theta-sector basis
//! wavefunctions and their quadrature orthonormality, translation
//! operators, delta-comb position/momentum representations, the discrete
//! Fourier change of basis between them, and the diffraction-kernel inner
//! product on the unit interval.
//!
//! Bargmann space is the space of entire functions square integrable for
//! dmu_hbar(z) = (pi hbar)^{-1} e^{-|z|^2/hbar} d^2 z. The sector basis at
//! h = 1/N is
//!
//! phi_m(z) = C_m(theta) e^{-N pi z^2 + 2 sqrt(2) pi (theta_1+m) z}
//!            theta3(-i sqrt(2) N z + i(theta_1 + i theta_2 + m), iN),
//! C_m(theta) = (2/N)^{1/4} e^{-pi (theta_1+m)^2/N - 2 pi i theta_2 m / N},
//!
//! orthonormal over the phase-space unit cell D = {(x - ip)/sqrt(2) :
//! (x,p) in [0,1]^2} (so d^2 z = dx dp / 2 on that chart). In the position
//! representation these become delta combs on the lattice (m+theta_1)/N + Z,
//! and the sector inner product turns into a pairing against the
//! diffraction kernel K(x,y) = g((x-y)/(2 hbar)).

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::planck::PlanckParameter;
use crate::theta_rep::{dft_matrix, SectorMatrix, ThetaPoint};

/// Truncation control for the theta series.
#[derive(Debug, Clone, Copy)]
pub struct ThetaSeriesParams {
    tolerance: f64,
    max_terms: usize,
}

impl ThetaSeriesParams {
    pub fn new(tolerance: f64, max_terms: usize) -> Result<Self> {
        if tolerance <= 0.0 || tolerance.is_nan() {
            return Err(Error::InvalidArgument("tolerance must be > 0".into()));
        }
        if max_terms == 0 {
            return Err(Error::InvalidArgument("max_terms must be >= 1".into()));
        }
        Ok(Self {
            tolerance,
            max_terms,
        })
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }
}

impl Default for ThetaSeriesParams {
    fn default() -> Self {
        Self {
            tolerance: 1e-12,
            max_terms: 400,
        }
    }
}

/// theta(omega, tau) = sum_k e^{i pi k^2 tau + 2 pi i k omega}, Im tau > 0.
///
/// Terms at +-k are added in pairs; the loop stops once the pair bound
/// 2 e^{-pi k^2 Im tau + 2 pi k |Im omega|} falls below the tolerance and
/// the Gaussian peak k ~ |Im omega|/Im tau has been passed.
pub fn jacobi_theta(
    omega: Complex64,
    tau: Complex64,
    params: &ThetaSeriesParams,
) -> Result<Complex64> {
    if tau.im <= 0.0 {
        return Err(Error::Domain(format!(
            "theta series needs Im tau > 0, got {}",
            tau.im
        )));
    }
    let i = Complex64::new(0.0, 1.0);
    let term = |k: f64| (i * PI * k * k * tau + 2.0 * PI * i * k * omega).exp();
    let peak = omega.im.abs() / tau.im;
    let mut sum = Complex64::new(1.0, 0.0); // k = 0
    let mut bound = f64::INFINITY;
    for k in 1..=params.max_terms {
        let kf = k as f64;
        sum += term(kf) + term(-kf);
        bound = 2.0 * (-PI * kf * kf * tau.im + 2.0 * PI * kf * omega.im.abs()).exp();
        if bound < params.tolerance && kf >= peak {
            return Ok(sum);
        }
    }
    Err(Error::Convergence {
        achieved: bound,
        tolerance: params.tolerance,
    })
}

/// A sector basis function phi_m at fixed theta, 0 <= m < N.
#[derive(Debug, Clone, Copy)]
pub struct BasisWavefunction {
    m: u32,
    theta: ThetaPoint,
    planck: PlanckParameter,
}

impl BasisWavefunction {
    pub fn new(m: u32, theta: ThetaPoint, planck: PlanckParameter) -> Result<Self> {
        if m >= planck.n() {
            return Err(Error::InvalidArgument(format!(
                "basis index {m} out of range for N = {}",
                planck.n()
            )));
        }
        Ok(Self { m, theta, planck })
    }

    pub fn index(&self) -> u32 {
        self.m
    }

    pub fn theta(&self) -> ThetaPoint {
        self.theta
    }

    pub fn planck(&self) -> PlanckParameter {
        self.planck
    }

    /// C_m(theta) = (2/N)^{1/4} e^{-pi (theta_1+m)^2/N - 2 pi i theta_2 m/N}.
    pub fn normalization_constant(&self) -> Complex64 {
        let n = f64::from(self.planck.n());
        let a = f64::from(self.m) + self.theta.theta1();
        Complex64::from_polar(
            (2.0 / n).powf(0.25) * (-PI * a * a / n).exp(),
            -2.0 * PI * self.theta.theta2() * f64::from(self.m) / n,
        )
    }
}

/// Pointwise value of phi_m (entire in z); series truncation error is
/// bounded by the theta tolerance times the explicit exponential
/// prefactor.
pub fn basis_value(
    b: &BasisWavefunction,
    z: Complex64,
    params: &ThetaSeriesParams,
) -> Result<Complex64> {
    basis_value_with_index(b.planck, b.theta, f64::from(b.m), z, params)
}

/// Same formula with a real (possibly out-of-range) index; used to probe
/// the wrap identity phi_{m+N} = phi_m.
pub(crate) fn basis_value_with_index(
    planck: PlanckParameter,
    theta: ThetaPoint,
    m: f64,
    z: Complex64,
    params: &ThetaSeriesParams,
) -> Result<Complex64> {
    let n = f64::from(planck.n());
    let i = Complex64::new(0.0, 1.0);
    let a = theta.theta1() + m;
    let c = Complex64::from_polar(
        (2.0 / n).powf(0.25) * (-PI * a * a / n).exp(),
        -2.0 * PI * theta.theta2() * m / n,
    );
    let prefactor = (-n * PI * z * z + 2.0 * 2f64.sqrt() * PI * a * z).exp();
    let omega = -i * 2f64.sqrt() * n * z + i * Complex64::new(a, theta.theta2());
    Ok(c * prefactor * jacobi_theta(omega, i * n, params)?)
}

/// Inner product of two basis functions by tensor midpoint quadrature of
/// int_D conj(phi_a) phi_b dmu_hbar over the phase-space cell
/// (x,p) in [0,1]^2, z = (x-ip)/sqrt(2). Converges to delta_ab.
pub fn quadrature_inner_product(
    b1: &BasisWavefunction,
    b2: &BasisWavefunction,
    grid: u32,
) -> Result<Complex64> {
    b1.planck.ensure_same(&b2.planck)?;
    if b1.theta != b2.theta {
        return Err(Error::InvalidArgument(
            "basis functions live at different theta".into(),
        ));
    }
    if grid < 2 {
        return Err(Error::InvalidArgument(
            "quadrature grid must be >= 2".into(),
        ));
    }
    let gram = basis_pair_quadrature(
        b1.planck,
        b1.theta,
        &[b1.m, b2.m],
        grid,
        &ThetaSeriesParams::default(),
    )?;
    Ok(gram[1])
}

/// Full Gram matrix of {phi_0..phi_{N-1}} (row-major, length N^2) on a
/// grid^2 midpoint rule; basis values are shared across the pairs.
pub fn basis_gram(
    planck: PlanckParameter,
    theta: ThetaPoint,
    grid: u32,
    params: &ThetaSeriesParams,
) -> Result<Vec<Complex64>> {
    if grid < 2 {
        return Err(Error::InvalidArgument(
            "quadrature grid must be >= 2".into(),
        ));
    }
    let indices: Vec<u32> = (0..planck.n()).collect();
    let flat = basis_pair_quadrature(planck, theta, &indices, grid, params)?;
    Ok(flat)
}

/// Shared quadrature kernel: returns the Gram matrix of the listed basis
/// indices, row-major.
fn basis_pair_quadrature(
    planck: PlanckParameter,
    theta: ThetaPoint,
    indices: &[u32],
    grid: u32,
    params: &ThetaSeriesParams,
) -> Result<Vec<Complex64>> {
    let n_idx = indices.len();
    let hbar = planck.hbar();
    let g = grid as usize;
    let cell = 1.0 / grid as f64;
    let mut gram = vec![Complex64::new(0.0, 0.0); n_idx * n_idx];
    let mut vals = vec![Complex64::new(0.0, 0.0); n_idx];
    for ix in 0..g {
        let x = (ix as f64 + 0.5) * cell;
        for ip in 0..g {
            let p = (ip as f64 + 0.5) * cell;
            let z = Complex64::new(x, -p) / 2f64.sqrt();
            // d^2 z = dx dp / 2 on this chart
            let weight = (-(z.norm_sqr()) / hbar).exp() / (PI * hbar) * 0.5 * cell * cell;
            for (s, &m) in indices.iter().enumerate() {
                vals[s] = basis_value_with_index(planck, theta, f64::from(m), z, params)?;
            }
            for a in 0..n_idx {
                for b in 0..n_idx {
                    gram[a * n_idx + b] += vals[a].conj() * vals[b] * weight;
                }
            }
        }
    }
    Ok(gram)
}

/// The projective translation U(a): psi(z) -> e^{(conj(a) z - |a|^2/2)/hbar} psi(z-a),
/// satisfying U(a) U(b) = e^{i Im(conj(a) b)/hbar} U(a+b).
pub fn translation_apply<'a>(
    a: Complex64,
    planck: &PlanckParameter,
    f: impl Fn(Complex64) -> Complex64 + 'a,
) -> impl Fn(Complex64) -> Complex64 + 'a {
    let hbar = planck.hbar();
    move |z: Complex64| ((a.conj() * z - a.norm_sqr() / 2.0) / hbar).exp() * f(z - a)
}

/// Which representation a delta comb lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CombKind {
    Position,
    Momentum,
}

/// A truncated delta-comb wavefunction: spike locations with unit-modulus
/// amplitudes scaled by 1/sqrt(N).
///
/// Position: Phi_m = (e^{2 pi i theta_2 m/N}/sqrt(N)) sum_k e^{2 pi i theta_2 k} |(m+theta_1)/N + k>
/// Momentum: Phi~_m = (e^{-2 pi i m theta_1/N}/sqrt(N)) sum_k e^{-2 pi i theta_1 k} |(theta_2+m)/N + k>
#[derive(Debug, Clone)]
pub struct DeltaComb {
    kind: CombKind,
    base_index: u32,
    theta: ThetaPoint,
    planck: PlanckParameter,
    truncation: u32,
    spikes: Vec<(f64, Complex64)>,
}

impl DeltaComb {
    pub fn kind(&self) -> CombKind {
        self.kind
    }

    pub fn base_index(&self) -> u32 {
        self.base_index
    }

    pub fn theta(&self) -> ThetaPoint {
        self.theta
    }

    pub fn planck(&self) -> PlanckParameter {
        self.planck
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    /// (location, amplitude) pairs for k in [-K, K], in increasing k.
    pub fn spikes(&self) -> &[(f64, Complex64)] {
        &self.spikes
    }
}

/// Builds the truncated comb with spikes at k in [-K, K].
pub fn build_comb(
    kind: CombKind,
    m: u32,
    theta: ThetaPoint,
    planck: PlanckParameter,
    k_trunc: u32,
) -> Result<DeltaComb> {
    if m >= planck.n() {
        return Err(Error::InvalidArgument(format!(
            "comb index {m} out of range for N = {}",
            planck.n()
        )));
    }
    let n = f64::from(planck.n());
    let mf = f64::from(m);
    let scale = 1.0 / n.sqrt();
    let kk = i64::from(k_trunc);
    let mut spikes = Vec::with_capacity(2 * k_trunc as usize + 1);
    for k in -kk..=kk {
        let kf = k as f64;
        let (loc, amp) = match kind {
            CombKind::Position => (
                (mf + theta.theta1()) / n + kf,
                Complex64::from_polar(
                    scale,
                    2.0 * PI * (theta.theta2() * mf / n + theta.theta2() * kf),
                ),
            ),
            CombKind::Momentum => (
                (theta.theta2() + mf) / n + kf,
                Complex64::from_polar(
                    scale,
                    -2.0 * PI * (mf * theta.theta1() / n + theta.theta1() * kf),
                ),
            ),
        };
        spikes.push((loc, amp));
    }
    Ok(DeltaComb {
        kind,
        base_index: m,
        theta,
        planck,
        truncation: k_trunc,
        spikes,
    })
}

/// The diffraction kernel g(r) = (1/(2 pi hbar)) e^{-hbar r^2 + i r} sin(r)/r
/// for an explicit hbar; g(0) is the limit value 1/(2 pi hbar).
pub fn kernel_g_hbar(r: f64, hbar: f64) -> Complex64 {
    let sinc = if r == 0.0 { 1.0 } else { r.sin() / r };
    Complex64::from_polar((-hbar * r * r).exp() * sinc / (2.0 * PI * hbar), r)
}

/// [`kernel_g_hbar`] at the library's hbar = 1/(2 pi N).
pub fn kernel_g(r: f64, planck: &PlanckParameter) -> Complex64 {
    kernel_g_hbar(r, planck.hbar())
}

/// The sector inner-product kernel K(x,y) = g((x-y)/(2 hbar)); tends to
/// delta(x-y) as hbar -> 0.
#[derive(Debug, Clone, Copy)]
pub struct DiffractionKernel {
    planck: PlanckParameter,
}

impl DiffractionKernel {
    pub fn new(planck: PlanckParameter) -> Self {
        Self { planck }
    }

    pub fn g(&self, r: f64) -> Complex64 {
        kernel_g(r, &self.planck)
    }

    pub fn evaluate(&self, x: f64, y: f64) -> Complex64 {
        self.g((x - y) / (2.0 * self.planck.hbar()))
    }
}

/// (Psi_1, Psi_2)_P = int_0^1 conj(Psi_1)(x) (K Psi_2)(x) dx for combs:
/// the double sum of g((x_i - y_j)/(2 hbar)) over spike pairs, with the
/// left comb's spikes restricted to [0,1).
pub fn comb_inner_product(c1: &DeltaComb, c2: &DeltaComb) -> Result<Complex64> {
    c1.planck.ensure_same(&c2.planck)?;
    if c1.theta != c2.theta {
        return Err(Error::InvalidArgument(
            "combs live at different theta".into(),
        ));
    }
    if c1.kind != c2.kind {
        return Err(Error::InvalidArgument(
            "combs live in different representations".into(),
        ));
    }
    let kernel = DiffractionKernel::new(c1.planck);
    let mut total = Complex64::new(0.0, 0.0);
    for &(x, a) in c1.spikes.iter().filter(|(x, _)| (0.0..1.0).contains(x)) {
        for &(y, b) in &c2.spikes {
            total += a.conj() * b * kernel.evaluate(x, y);
        }
    }
    Ok(total)
}

/// Pairings of the position and momentum combs against the N^2 coherent
/// Gaussian probes g_{st}(x) = (pi hbar)^{-1/4} e^{-(x-x_s)^2/(2 hbar)}
/// e^{2 pi i N p_t x}, x_s = (s+theta_1)/N, p_t = (t+theta_2)/N. All sums
/// are closed-form with Gaussian tails, truncated at K.
///
/// Returns (position_pairings, momentum_pairings), each N^2 x N row-major:
/// rows are probes, columns the comb index.
fn comb_probe_pairings(
    theta: &ThetaPoint,
    planck: &PlanckParameter,
    k_trunc: u32,
) -> (Vec<Complex64>, Vec<Complex64>) {
    let n = planck.n() as usize;
    let nf = n as f64;
    let hbar = planck.hbar();
    let norm = (PI * hbar).powf(-0.25);
    let kk = i64::from(k_trunc);
    let mut pos = vec![Complex64::new(0.0, 0.0); n * n * n];
    let mut mom = vec![Complex64::new(0.0, 0.0); n * n * n];
    for s in 0..n {
        let xs = (s as f64 + theta.theta1()) / nf;
        for t in 0..n {
            let probe = s * n + t;
            for m in 0..n {
                let mf = m as f64;
                // <g, Phi_m>: spikes at (m+theta_1)/N + k
                let mut acc = Complex64::new(0.0, 0.0);
                for k in -kk..=kk {
                    let loc = (mf + theta.theta1()) / nf + k as f64;
                    let amp = Complex64::from_polar(
                        1.0 / nf.sqrt(),
                        2.0 * PI * (theta.theta2() * mf / nf + theta.theta2() * k as f64),
                    );
                    let gauss = (-(loc - xs) * (loc - xs) / (2.0 * hbar)).exp();
                    let probe_phase =
                        Complex64::from_polar(1.0, -2.0 * PI * (t as f64 + theta.theta2()) * loc);
                    acc += amp * Complex64::new(norm * gauss, 0.0) * probe_phase;
                }
                pos[probe * n + m] = acc;

                // <g, Phi~_m>: plane-wave expansion, frequencies
                // q_j = theta_2 + m + N j; omega = 2 pi (m - t + N j)
                let mut acc = Complex64::new(0.0, 0.0);
                for j in -kk..=kk {
                    let omega = 2.0 * PI * (mf - t as f64 + nf * j as f64);
                    let integral = Complex64::from_polar(
                        norm * (2.0 * PI * hbar).sqrt() * (-omega * omega * hbar / 2.0).exp(),
                        omega * xs,
                    );
                    let comb_phase =
                        Complex64::from_polar(1.0, -2.0 * PI * theta.theta1() * j as f64);
                    acc += comb_phase * integral;
                }
                mom[probe * n + m] =
                    acc * Complex64::from_polar(1.0, -2.0 * PI * mf * theta.theta1() / nf);
            }
        }
    }
    (pos, mom)
}

/// Max absolute deviation, over the N^2 Gaussian probes and all m, of
/// <g, Phi_m> against e^{-2 pi i theta_1 theta_2/N} sum_n F_{mn} <g, Phi~_n>.
/// Tends to 0 as the truncation K grows.
pub fn verify_dft_lemma(theta: &ThetaPoint, planck: &PlanckParameter, k_trunc: u32) -> f64 {
    assert!(k_trunc >= 1, "truncation must be >= 1");
    let n = planck.n() as usize;
    let nf = n as f64;
    let (pos, mom) = comb_probe_pairings(theta, planck, k_trunc);
    let f = dft_matrix(n);
    let phase = Complex64::from_polar(1.0, -2.0 * PI * theta.theta1() * theta.theta2() / nf);
    let mut dev: f64 = 0.0;
    for probe in 0..n * n {
        for m in 0..n {
            let mut rhs = Complex64::new(0.0, 0.0);
            for nn in 0..n {
                rhs += f.get(m, nn) * mom[probe * n + nn];
            }
            dev = dev.max((pos[probe * n + m] - phase * rhs).norm());
        }
    }
    dev
}

/// Recovers the change-of-basis matrix C with Phi_m = sum_n C_{mn} Phi~_n
/// from the probe pairings by least squares; converges to
/// e^{-2 pi i theta_1 theta_2/N} F as K grows.
pub fn recover_dft_matrix(
    theta: &ThetaPoint,
    planck: &PlanckParameter,
    k_trunc: u32,
) -> SectorMatrix {
    assert!(k_trunc >= 1, "truncation must be >= 1");
    let n = planck.n() as usize;
    let (pos, mom) = comb_probe_pairings(theta, planck, k_trunc);
    // normal equations: (B^dag B) c_m = B^dag y_m, B = momentum pairings
    let mut gram = vec![Complex64::new(0.0, 0.0); n * n];
    for a in 0..n {
        for b in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for probe in 0..n * n {
                acc += mom[probe * n + a].conj() * mom[probe * n + b];
            }
            gram[a * n + b] = acc;
        }
    }
    let mut out = SectorMatrix::zeros(n);
    for m in 0..n {
        let mut rhs = vec![Complex64::new(0.0, 0.0); n];
        for (a, r) in rhs.iter_mut().enumerate() {
            for probe in 0..n * n {
                *r += mom[probe * n + a].conj() * pos[probe * n + m];
            }
        }
        let c = solve_dense(&gram, &rhs);
        for (nn, val) in c.iter().enumerate() {
            out.set(m, nn, *val);
        }
    }
    out
}

/// Gaussian elimination with partial pivoting for small dense complex
/// systems (the DFT recovery solves N <= a few dozen).
fn solve_dense(matrix: &[Complex64], rhs: &[Complex64]) -> Vec<Complex64> {
    let n = rhs.len();
    let mut a = matrix.to_vec();
    let mut b = rhs.to_vec();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| {
                a[i * n + col]
                    .norm()
                    .partial_cmp(&a[j * n + col].norm())
                    .unwrap()
            })
            .unwrap();
        if pivot != col {
            for j in 0..n {
                a.swap(col * n + j, pivot * n + j);
            }
            b.swap(col, pivot);
        }
        let diag = a[col * n + col];
        for row in col + 1..n {
            let factor = a[row * n + col] / diag;
            for j in col..n {
                let delta = factor * a[col * n + j];
                a[row * n + j] -= delta;
            }
            let delta = factor * b[col];
            b[row] -= delta;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for j in row + 1..n {
            acc -= a[row * n + j] * x[j];
        }
        x[row] = acc / a[row * n + row];
    }
    x
}

/// CSV "r,g_abs2" of |g(r/(2 hbar))|^2 sampled at `points` values of
/// r in [-5, 5].
pub fn kernel_plot_csv(hbar: f64, points: usize) -> String {
    let mut out = String::from("r,g_abs2\n");
    for i in 0..points {
        let r = -5.0 + 10.0 * i as f64 / (points - 1) as f64;
        let val = kernel_g_hbar(r / (2.0 * hbar), hbar).norm_sqr();
        writeln!(out, "{:.16e},{:.16e}", r, val).unwrap();
    }
    out
}
