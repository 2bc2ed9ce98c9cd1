//! Quantum dynamics as a Z-action on the Weyl algebra, with time-average,
//! ergodicity and mixing diagnostics, plus the classical pushforward used
//! as the semiclassical oracle.
//!
//! A cat map A in SL(2,Z) acts by pure index relabeling W(v) -> W(Av);
//! since det A = 1 the symplectic form is preserved and the relabeling is
//! an algebra automorphism that fixes the trace. A Kronecker shift t acts
//! by the phase e^{2 pi i n (v . t)} on W(v). Both satisfy
//! tau(alpha_n(A)) = tau(A) exactly and are unitary on the Koopman space.
//!
//! Convention: the classical map quantized by `CatMap {a,b,c,d}` moves
//! phase-space points by the transposed matrix, x -> A^T x, so that
//! composing a function with it relabels Fourier modes by A — the same
//! matrix that relabels Weyl indices. This pairing is what makes
//! "evolve then quantize" agree with "quantize then evolve" (up to the
//! anti-Wick damping measured in [`crate::quantize::egorov_defect`]);
//! it is pinned by a grid-evaluation test.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::quantize::TorusSymbol;
use crate::weyl::{json_f64, AlgebraElement, WeylIndex};

/// A dynamics specification: hyperbolic/elliptic integer matrix (cat map)
/// or rigid translation (Kronecker map).
#[derive(Debug, Clone, PartialEq)]
pub enum ToralAutomorphism {
    CatMap { a: i64, b: i64, c: i64, d: i64 },
    Kronecker { t1: f64, t2: f64 },
}

fn wrap_unit(x: f64) -> f64 {
    let f = x.rem_euclid(1.0);
    if f == 1.0 {
        0.0
    } else {
        f
    }
}

impl ToralAutomorphism {
    /// A cat map [[a,b],[c,d]]; the determinant must be exactly 1 so the
    /// action preserves the symplectic form.
    pub fn cat_map(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        if a * d - b * c != 1 {
            return Err(Error::InvalidArgument(format!(
                "cat map determinant must be 1, got {}",
                a * d - b * c
            )));
        }
        Ok(Self::CatMap { a, b, c, d })
    }

    /// A Kronecker translation by (t1, t2), stored mod 1.
    pub fn kronecker(t1: f64, t2: f64) -> Self {
        Self::Kronecker {
            t1: wrap_unit(t1),
            t2: wrap_unit(t2),
        }
    }

    /// One application of the index map (n = +1 or -1).
    fn step_index(&self, v: &WeylIndex, forward: bool) -> WeylIndex {
        match *self {
            Self::CatMap { a, b, c, d } => {
                // inverse of a det-1 matrix is [[d,-b],[-c,a]]
                let (pa, pb, pc, pd) = if forward {
                    (a, b, c, d)
                } else {
                    (d, -b, -c, a)
                };
                WeylIndex {
                    m: BigInt::from(pa) * &v.m + BigInt::from(pb) * &v.k,
                    k: BigInt::from(pc) * &v.m + BigInt::from(pd) * &v.k,
                }
            }
            Self::Kronecker { .. } => v.clone(),
        }
    }

    /// Index image under n steps.
    pub(crate) fn index_power(&self, v: &WeylIndex, n: i64) -> WeylIndex {
        let mut w = v.clone();
        for _ in 0..n.unsigned_abs() {
            w = self.step_index(&w, n >= 0);
        }
        w
    }

    /// Phase attached to the coefficient at v under n steps.
    fn phase(&self, v: &WeylIndex, n: i64) -> Complex64 {
        match *self {
            Self::CatMap { .. } => Complex64::new(1.0, 0.0),
            Self::Kronecker { t1, t2 } => {
                let m = v.m.to_f64().unwrap_or(f64::INFINITY);
                let k = v.k.to_f64().unwrap_or(f64::INFINITY);
                // reduce v.t mod 1 before scaling by 2 pi so rational
                // shifts give exact fixed points
                let frac = wrap_unit((m * t1 + k * t2) * n as f64);
                Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * frac)
            }
        }
    }
}

/// The automorphism alpha_n applied to an algebra element.
pub fn apply_automorphism(alpha: &ToralAutomorphism, a: &AlgebraElement, n: i64) -> AlgebraElement {
    AlgebraElement::from_terms(
        a.planck(),
        a.terms()
            .map(|(v, c)| (alpha.index_power(v, n), c * alpha.phase(v, n))),
    )
}

/// Cesaro time average <A>_M = (1/M) sum_{m=0}^{M-1} alpha_m(A).
pub fn cesaro_average(
    alpha: &ToralAutomorphism,
    a: &AlgebraElement,
    m_steps: u32,
) -> Result<AlgebraElement> {
    if m_steps == 0 {
        return Err(Error::InvalidArgument("Cesaro average needs M >= 1".into()));
    }
    // accumulate term-wise; orbits at M ~ 10^3 make per-step element
    // clones quadratically expensive
    let mut sum = AlgebraElement::zero(a.planck());
    let mut current = a.clone();
    for step in 0..m_steps {
        sum.add_assign_terms(&current);
        if step + 1 < m_steps {
            current = apply_automorphism(alpha, &current, 1);
        }
    }
    Ok(sum.scale(Complex64::new(1.0 / f64::from(m_steps), 0.0)))
}

/// Koopman-norm distance || <A>_M - tau(A) I ||; tends to 0 for ergodic
/// dynamics and is exactly 0 for scalar multiples of the identity.
pub fn ergodicity_defect(
    alpha: &ToralAutomorphism,
    a: &AlgebraElement,
    m_steps: u32,
) -> Result<f64> {
    let avg = cesaro_average(alpha, a, m_steps)?;
    let scalar = AlgebraElement::identity(a.planck()).scale(a.trace());
    Ok(avg.sub(&scalar)?.koopman_norm())
}

/// Mixing correlation tau(alpha_n(A) B); mixing means it tends to
/// tau(A) tau(B).
pub fn mixing_correlation(
    alpha: &ToralAutomorphism,
    a: &AlgebraElement,
    b: &AlgebraElement,
    n: i64,
) -> Result<Complex64> {
    Ok(apply_automorphism(alpha, a, n).multiply(b)?.trace())
}

/// Classical pushforward f o T^n in Fourier modes: a cat map relabels the
/// mode at v to A^n v (the point map being x -> (A^T)^n x), a Kronecker
/// shift multiplies the mode at v by e^{2 pi i n (v . t)}. The (0,0)
/// coefficient is always preserved (measure preservation).
pub fn classical_pushforward(f: &TorusSymbol, alpha: &ToralAutomorphism, n: i64) -> TorusSymbol {
    TorusSymbol::from_modes(
        f.modes()
            .map(|(v, c)| (alpha.index_power(v, n), c * alpha.phase(v, n))),
    )
}

/// All indices with |m|,|k| <= degree_bound whose monomial is fixed by
/// alpha_n for some 1 <= n <= n_max. The probe window is finite by
/// construction; it reports invariance inside the window, not a proof.
/// Kronecker invariance is judged numerically by |phase - 1| < 1e-9.
pub fn find_invariant_monomials(
    alpha: &ToralAutomorphism,
    degree_bound: u32,
    n_max: u32,
) -> Vec<WeylIndex> {
    let bound = i64::from(degree_bound);
    let mut found = Vec::new();
    for m in -bound..=bound {
        for k in -bound..=bound {
            let v = WeylIndex::new(m, k);
            if v.is_zero() {
                found.push(v);
                continue;
            }
            let mut invariant = false;
            match alpha {
                ToralAutomorphism::CatMap { .. } => {
                    let mut w = v.clone();
                    for _ in 1..=n_max {
                        w = alpha.step_index(&w, true);
                        if w == v {
                            invariant = true;
                            break;
                        }
                    }
                }
                ToralAutomorphism::Kronecker { .. } => {
                    for n in 1..=i64::from(n_max) {
                        if (alpha.phase(&v, n) - Complex64::new(1.0, 0.0)).norm() < 1e-9 {
                            invariant = true;
                            break;
                        }
                    }
                }
            }
            if invariant {
                found.push(v);
            }
        }
    }
    found.sort();
    found
}

/// A recorded diagnostic sweep: per-step values together with the
/// tau-predicted limit.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsReport {
    steps: Vec<i64>,
    values: Vec<Complex64>,
    limit_reference: Complex64,
}

impl DiagnosticsReport {
    pub fn new(
        steps: Vec<i64>,
        values: Vec<Complex64>,
        limit_reference: Complex64,
    ) -> Result<Self> {
        if steps.len() != values.len() {
            return Err(Error::DimensionMismatch {
                left: steps.len(),
                right: values.len(),
            });
        }
        Ok(Self {
            steps,
            values,
            limit_reference,
        })
    }

    pub fn steps(&self) -> &[i64] {
        &self.steps
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn limit_reference(&self) -> Complex64 {
        self.limit_reference
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("step,value_re,value_im,reference_re,reference_im\n");
        for (s, v) in self.steps.iter().zip(&self.values) {
            writeln!(
                out,
                "{},{:.16e},{:.16e},{:.16e},{:.16e}",
                s, v.re, v.im, self.limit_reference.re, self.limit_reference.im
            )
            .unwrap();
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut out = String::from("{\"rows\": [");
        for (i, (s, v)) in self.steps.iter().zip(&self.values).enumerate() {
            if i > 0 {
                out.push_str(", ");
            }
            write!(
                out,
                "{{\"step\": {}, \"value_re\": {:.16e}, \"value_im\": {:.16e}, \"reference_re\": {:.16e}, \"reference_im\": {:.16e}}}",
                s, v.re, v.im, self.limit_reference.re, self.limit_reference.im
            )
            .unwrap();
        }
        out.push_str("]}");
        out
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let rows = value
            .get("rows")
            .and_then(|v| v.as_array())
            .ok_or_else(|| Error::Parse("missing \"rows\" array".into()))?;
        let mut steps = Vec::with_capacity(rows.len());
        let mut values = Vec::with_capacity(rows.len());
        let mut reference = Complex64::new(0.0, 0.0);
        for r in rows {
            steps.push(
                r.get("step")
                    .and_then(|x| x.as_i64())
                    .ok_or_else(|| Error::Parse("missing \"step\"".into()))?,
            );
            values.push(Complex64::new(
                json_f64(r, "value_re")?,
                json_f64(r, "value_im")?,
            ));
            reference = Complex64::new(json_f64(r, "reference_re")?, json_f64(r, "reference_im")?);
        }
        Self::new(steps, values, reference)
    }
}

/// Ergodicity-defect sweep over M = 1..=m_max; the reference is the
/// defect's limit, 0, reached exactly when the action is ergodic.
pub fn ergodicity_sweep(
    alpha: &ToralAutomorphism,
    a: &AlgebraElement,
    m_max: u32,
) -> Result<DiagnosticsReport> {
    if m_max == 0 {
        return Err(Error::InvalidArgument("sweep needs M >= 1".into()));
    }
    let scalar = AlgebraElement::identity(a.planck()).scale(a.trace());
    let mut sum = AlgebraElement::zero(a.planck());
    let mut current = a.clone();
    let mut steps = Vec::with_capacity(m_max as usize);
    let mut values = Vec::with_capacity(m_max as usize);
    for m in 1..=m_max {
        sum.add_assign_terms(&current);
        current = apply_automorphism(alpha, &current, 1);
        let avg = sum.scale(Complex64::new(1.0 / f64::from(m), 0.0));
        steps.push(i64::from(m));
        values.push(Complex64::new(avg.sub(&scalar)?.koopman_norm(), 0.0));
    }
    DiagnosticsReport::new(steps, values, Complex64::new(0.0, 0.0))
}

/// Mixing-correlation sweep over n = 1..=n_max; the reference is the
/// mixing limit tau(A) tau(B).
pub fn mixing_sweep(
    alpha: &ToralAutomorphism,
    a: &AlgebraElement,
    b: &AlgebraElement,
    n_max: u32,
) -> Result<DiagnosticsReport> {
    if n_max == 0 {
        return Err(Error::InvalidArgument("sweep needs steps >= 1".into()));
    }
    let mut current = a.clone();
    let mut steps = Vec::with_capacity(n_max as usize);
    let mut values = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        current = apply_automorphism(alpha, &current, 1);
        steps.push(i64::from(n));
        values.push(current.multiply(b)?.trace());
    }
    DiagnosticsReport::new(steps, values, a.trace() * b.trace())
}
