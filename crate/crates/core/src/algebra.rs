//! Smooth noncommutative torus as twisted Laurent polynomials.
//!
//! Elements are finite sums `Σ c·λᵏ·uᵐvⁿ` where `uv = λvu` and
//! `λ = exp(2πiθ)`. The power of `λ` attached to each monomial is kept as
//! an exact integer and only folded into the complex coefficient when two
//! monomials with different `λ`-powers land on the same `(m, n)` or when a
//! numeric value is requested. This keeps the commutation relation exact
//! regardless of the floating value of `θ`.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-coefficient tolerance for equality of elements.
pub const EQ_TOLERANCE: f64 = 1e-12;

/// `exp(2πi·x)`.
pub(crate) fn cis_turns(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * x)
}

/// Deformation parameter of the torus algebra.
///
/// Irrationality of `θ` is not checked; no computation here depends on it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TorusParams {
    theta: f64,
}

impl TorusParams {
    pub fn new(theta: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "theta must lie in (0,1), got {theta}"
            )));
        }
        Ok(Self { theta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// `λᵏ = exp(2πi·k·θ)`.
    pub fn lambda_pow(&self, k: i64) -> Complex64 {
        if k == 0 {
            return Complex64::new(1.0, 0.0);
        }
        cis_turns(k as f64 * self.theta)
    }

    pub(crate) fn ensure_same(&self, other: &TorusParams) -> Result<()> {
        if self.theta.to_bits() == other.theta.to_bits() {
            Ok(())
        } else {
            Err(Error::ParamMismatch {
                left: self.theta,
                right: other.theta,
            })
        }
    }
}

/// Integer weight `(α, β)` selecting the one-parameter group
/// `φ_τ(uᵐvⁿ) = exp(2πiτ(αm + βn))·uᵐvⁿ` and its generator `δ_(α,β)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[i64; 2]", into = "[i64; 2]")]
pub struct WeightVector {
    pub alpha: i64,
    pub beta: i64,
}

impl WeightVector {
    pub const U: WeightVector = WeightVector { alpha: 1, beta: 0 };
    pub const V: WeightVector = WeightVector { alpha: 0, beta: 1 };
    pub const ZERO: WeightVector = WeightVector { alpha: 0, beta: 0 };

    pub const fn new(alpha: i64, beta: i64) -> Self {
        Self { alpha, beta }
    }

    pub fn is_zero(&self) -> bool {
        self.alpha == 0 && self.beta == 0
    }

    /// `αm + βn`, the eigenvalue index of `uᵐvⁿ` under this flow.
    pub fn pairing(&self, m: i64, n: i64) -> i64 {
        self.alpha * m + self.beta * n
    }
}

impl From<[i64; 2]> for WeightVector {
    fn from([alpha, beta]: [i64; 2]) -> Self {
        Self { alpha, beta }
    }
}

impl From<WeightVector> for [i64; 2] {
    fn from(w: WeightVector) -> Self {
        [w.alpha, w.beta]
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.alpha, self.beta)
    }
}

/// Coefficient `c·λᵏ` of a single monomial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coeff {
    pub c: Complex64,
    pub lk: i64,
}

/// Element of the smooth torus algebra with finite Fourier support.
#[derive(Clone, PartialEq)]
pub struct TorusElement {
    params: TorusParams,
    terms: BTreeMap<(i64, i64), Coeff>,
}

impl TorusElement {
    pub fn zero(params: TorusParams) -> Self {
        Self {
            params,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(params: TorusParams) -> Self {
        Self::mono(0, 0, Complex64::new(1.0, 0.0), params)
    }

    pub fn scalar(c: Complex64, params: TorusParams) -> Self {
        Self::mono(0, 0, c, params)
    }

    /// `c·uᵐvⁿ`.
    pub fn mono(m: i64, n: i64, c: Complex64, params: TorusParams) -> Self {
        let mut out = Self::zero(params);
        out.push_term(m, n, c, 0);
        out
    }

    pub fn u(params: TorusParams) -> Self {
        Self::mono(1, 0, Complex64::new(1.0, 0.0), params)
    }

    pub fn v(params: TorusParams) -> Self {
        Self::mono(0, 1, Complex64::new(1.0, 0.0), params)
    }

    /// Builds an element from raw `(m, n, c, lk)` terms; repeated exponents are merged.
    pub fn from_terms<I>(params: TorusParams, terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, i64, Complex64, i64)>,
    {
        let mut out = Self::zero(params);
        for (m, n, c, lk) in terms {
            out.push_term(m, n, c, lk);
        }
        out
    }

    pub fn params(&self) -> TorusParams {
        self.params
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Raw stored terms `((m, n), c·λᵏ)` in exponent order.
    pub fn terms(&self) -> impl Iterator<Item = ((i64, i64), Coeff)> + '_ {
        self.terms.iter().map(|(&k, &v)| (k, v))
    }

    pub fn raw_coeff(&self, m: i64, n: i64) -> Option<Coeff> {
        self.terms.get(&(m, n)).copied()
    }

    /// Numeric coefficient of `uᵐvⁿ` with the `λ`-power folded in.
    pub fn coeff(&self, m: i64, n: i64) -> Complex64 {
        self.terms
            .get(&(m, n))
            .map(|t| self.fold(*t))
            .unwrap_or_default()
    }

    /// The complex value if this element is a multiple of `1`.
    pub fn as_scalar(&self) -> Option<Complex64> {
        match self.terms.len() {
            0 => Some(Complex64::default()),
            1 => self.terms.get(&(0, 0)).map(|t| self.fold(*t)),
            _ => None,
        }
    }

    pub fn is_scalar(&self) -> bool {
        self.as_scalar().is_some()
    }

    /// Largest folded coefficient modulus; `0` for the zero element.
    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|t| t.c.norm()).fold(0.0, f64::max)
    }

    /// Largest coefficientwise distance between two elements.
    pub fn max_abs_diff(&self, other: &TorusElement) -> f64 {
        let mut worst: f64 = 0.0;
        for (&(m, n), _) in self.terms.iter().chain(other.terms.iter()) {
            worst = worst.max((self.coeff(m, n) - other.coeff(m, n)).norm());
        }
        worst
    }

    /// Equality of folded coefficients within `tol`, for elements over the same `θ`.
    pub fn approx_eq(&self, other: &TorusElement, tol: f64) -> bool {
        self.params == other.params && self.max_abs_diff(other) <= tol
    }

    fn fold(&self, t: Coeff) -> Complex64 {
        t.c * self.params.lambda_pow(t.lk)
    }

    fn push_term(&mut self, m: i64, n: i64, c: Complex64, lk: i64) {
        if c == Complex64::default() {
            return;
        }
        let lambda = self.params;
        match self.terms.entry((m, n)) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(Coeff { c, lk });
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                let existing = slot.get_mut();
                if existing.lk == lk {
                    existing.c += c;
                } else {
                    existing.c += c * lambda.lambda_pow(lk - existing.lk);
                }
                if existing.c == Complex64::default() {
                    slot.remove();
                }
            }
        }
    }

    pub fn checked_add(&self, other: &TorusElement) -> Result<TorusElement> {
        self.params.ensure_same(&other.params)?;
        let mut out = self.clone();
        for (&(m, n), t) in &other.terms {
            out.push_term(m, n, t.c, t.lk);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &TorusElement) -> Result<TorusElement> {
        self.checked_add(&other.neg_ref())
    }

    /// Product via `(uᵐvⁿ)(uᵖv^q) = λ^{-np}·u^{m+p}v^{n+q}`.
    pub fn checked_mul(&self, other: &TorusElement) -> Result<TorusElement> {
        self.params.ensure_same(&other.params)?;
        let mut out = Self::zero(self.params);
        for (&(m, n), a) in &self.terms {
            for (&(p, q), b) in &other.terms {
                out.push_term(m + p, n + q, a.c * b.c, a.lk + b.lk - n * p);
            }
        }
        Ok(out)
    }

    fn neg_ref(&self) -> TorusElement {
        self.map_coeffs(|_, _, t| Coeff { c: -t.c, lk: t.lk })
    }

    pub fn scale(&self, s: Complex64) -> TorusElement {
        self.map_coeffs(|_, _, t| Coeff {
            c: t.c * s,
            lk: t.lk,
        })
    }

    /// Multiplication by `λᵏ`, exact in the exponent.
    pub fn scale_lambda(&self, k: i64) -> TorusElement {
        self.map_coeffs(|_, _, t| Coeff {
            c: t.c,
            lk: t.lk + k,
        })
    }

    fn map_coeffs<F>(&self, f: F) -> TorusElement
    where
        F: Fn(i64, i64, Coeff) -> Coeff,
    {
        let mut out = Self::zero(self.params);
        for (&(m, n), &t) in &self.terms {
            let t = f(m, n, t);
            out.push_term(m, n, t.c, t.lk);
        }
        out
    }

    /// Antilinear involution with `(uᵐvⁿ)* = λ^{-mn}·u^{-m}v^{-n}`.
    pub fn star(&self) -> TorusElement {
        let mut out = Self::zero(self.params);
        for (&(m, n), t) in &self.terms {
            out.push_term(-m, -n, t.c.conj(), -t.lk - m * n);
        }
        out
    }

    /// `φ_τ` for the weight `w`: scales `uᵐvⁿ` by `exp(2πiτ(αm+βn))`.
    pub fn apply_auto(&self, w: WeightVector, tau: f64) -> TorusElement {
        self.map_coeffs(|m, n, t| {
            let k = w.pairing(m, n);
            if k == 0 {
                t
            } else {
                Coeff {
                    c: t.c * cis_turns(tau * k as f64),
                    lk: t.lk,
                }
            }
        })
    }

    /// Generator of `φ`: `δ_w(uᵐvⁿ) = 2πi(αm+βn)·uᵐvⁿ`.
    pub fn apply_derivation(&self, w: WeightVector) -> TorusElement {
        let mut out = Self::zero(self.params);
        for (&(m, n), t) in &self.terms {
            let k = w.pairing(m, n);
            if k != 0 {
                let factor = Complex64::new(0.0, 2.0 * PI * k as f64);
                out.push_term(m, n, t.c * factor, t.lk);
            }
        }
        out
    }

    /// Random element with up to `max_terms` monomials, exponents in
    /// `[-max_exp, max_exp]` and coefficients in the unit box.
    pub fn random<R: Rng + ?Sized>(
        rng: &mut R,
        params: TorusParams,
        max_terms: usize,
        max_exp: i64,
    ) -> TorusElement {
        let count = rng.gen_range(1..=max_terms.max(1));
        let mut out = Self::zero(params);
        for _ in 0..count {
            let m = rng.gen_range(-max_exp..=max_exp);
            let n = rng.gen_range(-max_exp..=max_exp);
            let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            out.push_term(m, n, c, 0);
        }
        out
    }
}

impl fmt::Debug for TorusElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TorusElement(θ={}; ", self.params.theta)?;
        if self.terms.is_empty() {
            write!(f, "0")?;
        }
        for (i, (&(m, n), t)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({})·λ^{}·u^{}v^{}", t.c, t.lk, m, n)?;
        }
        write!(f, ")")
    }
}

// Operator sugar. These panic on mismatched θ; use the `checked_*` methods
// when the operands come from untrusted input.

impl Add for &TorusElement {
    type Output = TorusElement;
    fn add(self, rhs: &TorusElement) -> TorusElement {
        self.checked_add(rhs).expect("torus element addition")
    }
}

impl Sub for &TorusElement {
    type Output = TorusElement;
    fn sub(self, rhs: &TorusElement) -> TorusElement {
        self.checked_sub(rhs).expect("torus element subtraction")
    }
}

impl Mul for &TorusElement {
    type Output = TorusElement;
    fn mul(self, rhs: &TorusElement) -> TorusElement {
        self.checked_mul(rhs).expect("torus element product")
    }
}

impl Neg for &TorusElement {
    type Output = TorusElement;
    fn neg(self) -> TorusElement {
        self.neg_ref()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermRecord {
    m: i64,
    n: i64,
    re: f64,
    im: f64,
    #[serde(default)]
    lk: i64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementRecord {
    theta: f64,
    terms: Vec<TermRecord>,
}

impl Serialize for TorusElement {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        ElementRecord {
            theta: self.params.theta,
            terms: self
                .terms
                .iter()
                .map(|(&(m, n), t)| TermRecord {
                    m,
                    n,
                    re: t.c.re,
                    im: t.c.im,
                    lk: t.lk,
                })
                .collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TorusElement {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let record = ElementRecord::deserialize(deserializer)?;
        let params = TorusParams::new(record.theta).map_err(serde::de::Error::custom)?;
        Ok(TorusElement::from_terms(
            params,
            record
                .terms
                .into_iter()
                .map(|t| (t.m, t.n, Complex64::new(t.re, t.im), t.lk)),
        ))
    }
}

impl<'de> Deserialize<'de> for TorusParams {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            theta: f64,
        }
        let raw = Raw::deserialize(deserializer)?;
        TorusParams::new(raw.theta).map_err(serde::de::Error::custom)
    }
}
