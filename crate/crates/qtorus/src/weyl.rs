//! Exact arithmetic in the algebra generated by U, V, U^-1, V^-1 with
//! U V = e^{i lambda} V U, lambda = 2 pi / N.
//!
//! Elements are finite sums over the symmetrized Weyl monomials
//! W(m,k) = e^{-i lambda m k / 2} U^m V^k, which satisfy W(v)^dag = W(-v)
//! and multiply by pure index addition. The trace picks out the W(0,0)
//! coefficient, and the monomials are orthonormal for the inner product
//! (A,B) = tau(A^dag B), so the induced norm is the l2 norm of the
//! coefficient map.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::planck::PlanckParameter;

/// Exponent pair (m,k) of a Weyl monomial; also used as a Fourier mode on
/// the classical torus. Unbounded: hyperbolic dynamics grow indices
/// exponentially, far past any machine word at desk-scale iteration counts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WeylIndex {
    pub m: BigInt,
    pub k: BigInt,
}

impl WeylIndex {
    pub fn new(m: impl Into<BigInt>, k: impl Into<BigInt>) -> Self {
        Self {
            m: m.into(),
            k: k.into(),
        }
    }

    /// The identity index (0,0).
    pub fn zero() -> Self {
        Self::new(0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero() && self.k.is_zero()
    }

    pub fn negated(&self) -> Self {
        Self {
            m: -&self.m,
            k: -&self.k,
        }
    }

    pub fn sum(&self, other: &Self) -> Self {
        Self {
            m: &self.m + &other.m,
            k: &self.k + &other.k,
        }
    }

    /// Symplectic form sigma(v,w) = m_v k_w - k_v m_w.
    pub fn symplectic(&self, other: &Self) -> BigInt {
        &self.m * &other.k - &self.k * &other.m
    }

    /// m^2 + k^2.
    pub fn norm_sq(&self) -> BigInt {
        &self.m * &self.m + &self.k * &self.k
    }
}

/// A finite complex combination of Weyl monomials over a fixed Planck
/// parameter. Immutable; all operations return fresh values.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    planck: PlanckParameter,
    terms: BTreeMap<WeylIndex, Complex64>,
}

impl AlgebraElement {
    pub fn zero(planck: PlanckParameter) -> Self {
        Self {
            planck,
            terms: BTreeMap::new(),
        }
    }

    /// The multiplicative identity W(0,0).
    pub fn identity(planck: PlanckParameter) -> Self {
        Self::monomial(WeylIndex::zero(), planck)
    }

    /// The basis element W(v) = e^{-i lambda m k / 2} U^m V^k with unit
    /// coefficient. W(0,0) is the identity.
    pub fn monomial(v: WeylIndex, planck: PlanckParameter) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(v, Complex64::new(1.0, 0.0));
        Self { planck, terms }
    }

    /// Builds an element from (index, coefficient) pairs, accumulating
    /// repeated indices.
    pub fn from_terms(
        planck: PlanckParameter,
        iter: impl IntoIterator<Item = (WeylIndex, Complex64)>,
    ) -> Self {
        let mut terms: BTreeMap<WeylIndex, Complex64> = BTreeMap::new();
        for (v, c) in iter {
            *terms.entry(v).or_insert_with(|| Complex64::new(0.0, 0.0)) += c;
        }
        Self { planck, terms }
    }

    pub fn planck(&self) -> PlanckParameter {
        self.planck
    }

    pub fn terms(&self) -> impl Iterator<Item = (&WeylIndex, &Complex64)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Coefficient at v (zero if absent).
    pub fn coefficient(&self, v: &WeylIndex) -> Complex64 {
        self.terms
            .get(v)
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.planck.ensure_same(&rhs.planck)?;
        let mut terms = self.terms.clone();
        for (v, c) in &rhs.terms {
            *terms
                .entry(v.clone())
                .or_insert_with(|| Complex64::new(0.0, 0.0)) += c;
        }
        Ok(Self {
            planck: self.planck,
            terms,
        })
    }

    pub fn sub(&self, rhs: &Self) -> Result<Self> {
        self.add(&rhs.scale(Complex64::new(-1.0, 0.0)))
    }

    /// In-place accumulation for hot summation loops; both sides must
    /// already share one PlanckParameter.
    pub(crate) fn add_assign_terms(&mut self, rhs: &Self) {
        debug_assert_eq!(self.planck.n(), rhs.planck.n());
        for (v, c) in &rhs.terms {
            *self
                .terms
                .entry(v.clone())
                .or_insert_with(|| Complex64::new(0.0, 0.0)) += c;
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            planck: self.planck,
            terms: self.terms.iter().map(|(v, x)| (v.clone(), x * c)).collect(),
        }
    }

    /// Bilinear product.
    ///
    /// In the symmetrized basis the product is a pure phase twist:
    ///
    /// W(v) W(w) = e^{i lambda sigma(v,w)/2} W(v+w),  sigma(v,w) = m_v k_w - k_v m_w.
    ///
    /// Derivation from U V = e^{i lambda} V U: moving V^{k_v} past U^{m_w}
    /// costs e^{-i lambda k_v m_w}, so U^{m_v}V^{k_v} U^{m_w}V^{k_w}
    /// = e^{-i lambda k_v m_w} U^{m_v+m_w}V^{k_v+k_w}; unfolding the three
    /// symmetrization factors e^{-i lambda m k/2} leaves the exponent
    /// (m_v k_w - k_v m_w)/2.
    pub fn multiply(&self, rhs: &Self) -> Result<Self> {
        self.planck.ensure_same(&rhs.planck)?;
        let mut terms: BTreeMap<WeylIndex, Complex64> = BTreeMap::new();
        for (v, cv) in &self.terms {
            for (w, cw) in &rhs.terms {
                let phase = self.planck.pi_over_n_phase(&v.symplectic(w));
                let coeff = cv * cw * phase;
                *terms
                    .entry(v.sum(w))
                    .or_insert_with(|| Complex64::new(0.0, 0.0)) += coeff;
            }
        }
        Ok(Self {
            planck: self.planck,
            terms,
        })
    }

    /// The adjoint A^dag: W(v) -> W(-v) with conjugated coefficients.
    pub fn adjoint(&self) -> Self {
        Self {
            planck: self.planck,
            terms: self
                .terms
                .iter()
                .map(|(v, c)| (v.negated(), c.conj()))
                .collect(),
        }
    }

    /// The tracial state tau: coefficient of W(0,0).
    ///
    /// tau(U^m V^k) = delta_{m0} delta_{k0}, the quantum analogue of the
    /// phase-space average int e^{2 pi i (m x + k p)} dx dp.
    pub fn trace(&self) -> Complex64 {
        self.coefficient(&WeylIndex::zero())
    }

    /// Koopman inner product (A,B) = tau(A^dag B), computed through the
    /// definitional route (adjoint, product, trace). Monomial
    /// orthonormality makes this the coefficient dot product; see
    /// [`Self::koopman_norm`] for the direct l2 route.
    pub fn inner_product(&self, rhs: &Self) -> Result<Complex64> {
        Ok(self.adjoint().multiply(rhs)?.trace())
    }

    /// Koopman norm via the l2 norm of the coefficient map.
    pub fn koopman_norm(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Drops terms with |coefficient| < threshold. The default
    /// representation keeps everything; pruning is an explicit choice.
    pub fn prune(&self, threshold: f64) -> Self {
        Self {
            planck: self.planck,
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.norm() >= threshold)
                .map(|(v, c)| (v.clone(), *c))
                .collect(),
        }
    }

    /// Serializes as `{"n": N, "terms": [{"m","k","re","im"}, ...]}` with
    /// terms sorted by (m,k) and floats printed to 17 significant digits,
    /// so equal elements serialize to identical bytes.
    pub fn to_json(&self) -> String {
        let mut out = String::new();
        write!(out, "{{\"n\": {}, \"terms\": [", self.planck.n()).unwrap();
        for (i, (v, c)) in self.terms.iter().enumerate() {
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
        let n = value
            .get("n")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| Error::Parse("missing or invalid \"n\"".into()))?;
        let n = u32::try_from(n).map_err(|_| Error::Parse("\"n\" out of range".into()))?;
        let planck = PlanckParameter::new(n)?;
        let terms = value
            .get("terms")
            .and_then(|v| v.as_array())
            .ok_or_else(|| Error::Parse("missing \"terms\" array".into()))?;
        let mut parsed = Vec::with_capacity(terms.len());
        for t in terms {
            parsed.push((
                WeylIndex {
                    m: json_bigint(t, "m")?,
                    k: json_bigint(t, "k")?,
                },
                Complex64::new(json_f64(t, "re")?, json_f64(t, "im")?),
            ));
        }
        Ok(Self::from_terms(planck, parsed))
    }
}

pub(crate) fn json_bigint(v: &serde_json::Value, key: &str) -> Result<BigInt> {
    let num = v
        .get(key)
        .and_then(|x| x.as_number())
        .ok_or_else(|| Error::Parse(format!("missing integer field \"{key}\"")))?;
    BigInt::from_str(&num.to_string())
        .map_err(|_| Error::Parse(format!("field \"{key}\" is not an integer")))
}

pub(crate) fn json_f64(v: &serde_json::Value, key: &str) -> Result<f64> {
    v.get(key)
        .and_then(|x| x.as_f64())
        .ok_or_else(|| Error::Parse(format!("missing number field \"{key}\"")))
}
