//! Exact model of the universal `ℤ²` cover of the torus on character
//! monomials `c·π_u(e^{iax})·π_v(e^{ibx})`.
//!
//! Characters are eigenvectors of the shift `f ↦ f(· + 2π)`, so the deck
//! action and the lifted flows act on them by exact scalars. Products are
//! modelled as words of legs; adjacent factors on the same leg combine by
//! adding frequencies. The commutation rule between the two legs is not
//! modelled, so any product whose reduced word is not normal ordered
//! (u-leg before v-leg) is rejected.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use ordered_float::OrderedFloat;
use serde::{Deserialize, Serialize};

use crate::algebra::{cis_turns, WeightVector};
use crate::connections::Connection;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// Terms of a character sum below this modulus are discarded when a
/// holonomy is read off as a constant.
pub const CONSTANT_TOLERANCE: f64 = 1e-12;

/// `x ↦ e^{iax}` on the real line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Character {
    pub freq: f64,
}

impl Character {
    pub const fn new(freq: f64) -> Self {
        Self { freq }
    }

    pub fn value(&self, x: f64) -> Complex64 {
        Complex64::from_polar(1.0, self.freq * x)
    }

    pub fn mul(&self, other: &Character) -> Character {
        Character::new(self.freq + other.freq)
    }
}

/// `f↑(x) = f(x + 2π)`: for a character this is `e^{2πia}·f`.
pub fn shift_up(ch: Character) -> (Complex64, Character) {
    (cis_turns(ch.freq), ch)
}

/// Inverse shift `f(x − 2π)`.
pub fn shift_down(ch: Character) -> (Complex64, Character) {
    (cis_turns(-ch.freq), ch)
}

/// Scalar picked up by applying the shift `k` times (inverse shift for `k < 0`).
fn repeated_shift(ch: Character, k: i64) -> Complex64 {
    let step = if k >= 0 { shift_up } else { shift_down };
    let mut acc = Complex64::new(1.0, 0.0);
    for _ in 0..k.unsigned_abs() {
        acc *= step(ch).0;
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Leg {
    U,
    V,
}

/// `c·π_u(e^{iax})·π_v(e^{ibx})` in normal order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacterMonomial {
    pub c: Complex64,
    pub u_leg: Character,
    pub v_leg: Character,
}

impl CharacterMonomial {
    pub fn new(c: Complex64, a: f64, b: f64) -> Self {
        Self {
            c,
            u_leg: Character::new(a),
            v_leg: Character::new(b),
        }
    }

    /// The gauge unitary `U = π_u(e^{ic_u x})·π_v(e^{ic_v x})`.
    pub fn gauge(c_u: f64, c_v: f64) -> Self {
        Self::new(Complex64::new(1.0, 0.0), c_u, c_v)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (self.c.norm() - 1.0).abs() <= tol
    }

    pub fn word(&self) -> OperatorWord {
        let mut w = OperatorWord::default();
        w.push(Leg::U, self.u_leg.freq);
        w.push(Leg::V, self.v_leg.freq);
        w
    }

    /// `U⁻¹ = c⁻¹·π_v(e^{-ibx})·π_u(e^{-iax})`, which is not normal ordered.
    pub fn inverse(&self) -> (Complex64, OperatorWord) {
        (self.c.inv(), self.word().adjoint())
    }

    pub fn mul(&self, other: &CharacterMonomial) -> Result<CharacterMonomial> {
        self.word()
            .mul(&other.word())
            .into_monomial(self.c * other.c)
    }
}

/// `n₁ᵖ n₂^q` acting by `p` shifts of the u-leg and `q` shifts of the v-leg.
pub fn deck_act_inf(p: i64, q: i64, m: &CharacterMonomial) -> CharacterMonomial {
    let c = m.c * repeated_shift(m.u_leg, p) * repeated_shift(m.v_leg, q);
    CharacterMonomial { c, ..*m }
}

/// Left action of a base generator: multiplies its leg by `φ^exp = e^{ix}`.
pub fn base_act(gen: Leg, m: &CharacterMonomial) -> CharacterMonomial {
    let exp = Character::new(1.0);
    match gen {
        Leg::U => CharacterMonomial {
            u_leg: m.u_leg.mul(&exp),
            ..*m
        },
        Leg::V => CharacterMonomial {
            v_leg: m.v_leg.mul(&exp),
            ..*m
        },
    }
}

/// `(n₁ᵖn₂^q·U)·U⁻¹` for the scalar gauge `U = π_u(e^{ic_u x})π_v(e^{ic_v x})`.
pub fn wilson_relation(p: i64, q: i64, c_u: f64, c_v: f64) -> Complex64 {
    let gauge = CharacterMonomial::gauge(c_u, c_v);
    let moved = deck_act_inf(p, q, &gauge);
    let (inv_c, inv_word) = gauge.inverse();
    let product = moved
        .word()
        .mul(&inv_word)
        .into_monomial(moved.c * inv_c)
        .expect("legs cancel pairwise");
    debug_assert!(product.u_leg.freq == 0.0 && product.v_leg.freq == 0.0);
    product.c
}

/// Residual of `X̃U = ∇̃_X̃ U` for the scalar gauge and the flat connection
/// `ω = i(c_u du + c_v dv)`.
pub fn check_nc_ag(c_u: f64, c_v: f64, w: WeightVector) -> f64 {
    let gauge = GaugeField::scalar(c_u, c_v);
    let theta_u = CMatrix::from_element(1, 1, Complex64::new(0.0, c_u));
    let theta_v = CMatrix::from_element(1, 1, Complex64::new(0.0, c_v));
    gauge
        .nc_ag_residual(&theta_u, &theta_v, w)
        .expect("rank-one gauge and coefficients")
}

/// Reduced product of leg characters: no zero frequencies and no two
/// adjacent factors on the same leg.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OperatorWord {
    factors: Vec<(Leg, OrderedFloat<f64>)>,
}

impl OperatorWord {
    pub fn leg(leg: Leg, freq: f64) -> Self {
        let mut w = Self::default();
        w.push(leg, freq);
        w
    }

    pub fn is_identity(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factors(&self) -> impl Iterator<Item = (Leg, f64)> + '_ {
        self.factors.iter().map(|&(l, f)| (l, f.0))
    }

    fn push(&mut self, leg: Leg, freq: f64) {
        if freq == 0.0 {
            return;
        }
        if let Some(last) = self.factors.last_mut() {
            if last.0 == leg {
                let merged = last.1 .0 + freq;
                if merged == 0.0 {
                    self.factors.pop();
                } else {
                    last.1 = OrderedFloat(merged);
                }
                return;
            }
        }
        self.factors.push((leg, OrderedFloat(freq)));
    }

    pub fn mul(&self, other: &OperatorWord) -> OperatorWord {
        let mut out = self.clone();
        for &(leg, f) in &other.factors {
            out.push(leg, f.0);
        }
        out
    }

    /// Reversed word with conjugated characters.
    pub fn adjoint(&self) -> OperatorWord {
        let mut out = OperatorWord::default();
        for &(leg, f) in self.factors.iter().rev() {
            out.push(leg, -f.0);
        }
        out
    }

    /// Scalar from the deck action of `(p, q)`.
    pub fn deck_scalar(&self, p: i64, q: i64) -> Complex64 {
        self.factors
            .iter()
            .map(|&(leg, f)| match leg {
                Leg::U => repeated_shift(Character::new(f.0), p),
                Leg::V => repeated_shift(Character::new(f.0), q),
            })
            .fold(Complex64::new(1.0, 0.0), |acc, s| acc * s)
    }

    /// Eigenvalue of the lifted generator `X̃ = 2π(α∂_u + β∂_v)` on this word.
    pub fn generator_rate(&self, w: WeightVector) -> Complex64 {
        let mut rate = Complex64::new(0.0, 0.0);
        for &(leg, f) in &self.factors {
            let weight = match leg {
                Leg::U => w.alpha,
                Leg::V => w.beta,
            } as f64;
            rate += Complex64::new(0.0, weight * f.0);
        }
        rate * (2.0 * PI)
    }

    pub fn into_monomial(self, c: Complex64) -> Result<CharacterMonomial> {
        match self.factors.as_slice() {
            [] => Ok(CharacterMonomial::new(c, 0.0, 0.0)),
            [(Leg::U, a)] => Ok(CharacterMonomial::new(c, a.0, 0.0)),
            [(Leg::V, b)] => Ok(CharacterMonomial::new(c, 0.0, b.0)),
            [(Leg::U, a), (Leg::V, b)] => Ok(CharacterMonomial::new(c, a.0, b.0)),
            other => Err(Error::UnsupportedProduct(format!(
                "reduced word {:?} is not normal ordered",
                other.iter().map(|(l, f)| (*l, f.0)).collect::<Vec<_>>()
            ))),
        }
    }
}

/// Finite linear combination of operator words.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CharacterSum {
    terms: BTreeMap<OperatorWord, Complex64>,
}

impl CharacterSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Complex64) -> Self {
        let mut out = Self::default();
        out.push(OperatorWord::default(), c);
        out
    }

    /// `c·π_leg(e^{i·freq·x})`.
    pub fn leg(leg: Leg, freq: f64, c: Complex64) -> Self {
        let mut out = Self::default();
        out.push(OperatorWord::leg(leg, freq), c);
        out
    }

    /// `π_leg(cos(freq·x))`.
    pub fn cos(leg: Leg, freq: f64) -> Self {
        let half = Complex64::new(0.5, 0.0);
        Self::leg(leg, freq, half).add(&Self::leg(leg, -freq, half))
    }

    /// `π_leg(sin(freq·x))`.
    pub fn sin(leg: Leg, freq: f64) -> Self {
        let k = Complex64::new(0.0, -0.5);
        Self::leg(leg, freq, k).add(&Self::leg(leg, -freq, -k))
    }

    fn push(&mut self, word: OperatorWord, c: Complex64) {
        if c == Complex64::default() {
            return;
        }
        let slot = self.terms.entry(word).or_default();
        *slot += c;
    }

    pub fn terms(&self) -> impl Iterator<Item = (&OperatorWord, Complex64)> {
        self.terms.iter().map(|(w, &c)| (w, c))
    }

    pub fn add(&self, other: &CharacterSum) -> CharacterSum {
        let mut out = self.clone();
        for (w, &c) in &other.terms {
            out.push(w.clone(), c);
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> CharacterSum {
        let mut out = CharacterSum::default();
        for (w, &c) in &self.terms {
            out.push(w.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &CharacterSum) -> CharacterSum {
        let mut out = CharacterSum::default();
        for (w1, &c1) in &self.terms {
            for (w2, &c2) in &other.terms {
                out.push(w1.mul(w2), c1 * c2);
            }
        }
        out
    }

    pub fn adjoint(&self) -> CharacterSum {
        let mut out = CharacterSum::default();
        for (w, &c) in &self.terms {
            out.push(w.adjoint(), c.conj());
        }
        out
    }

    pub fn deck_act(&self, p: i64, q: i64) -> CharacterSum {
        let mut out = CharacterSum::default();
        for (w, &c) in &self.terms {
            out.push(w.clone(), c * w.deck_scalar(p, q));
        }
        out
    }

    /// `X̃` applied termwise.
    pub fn generator(&self, w: WeightVector) -> CharacterSum {
        let mut out = CharacterSum::default();
        for (word, &c) in &self.terms {
            out.push(word.clone(), word.generator_rate(w) * c);
        }
        out
    }

    /// Coefficient of the identity word; `None` if any other word carries
    /// more than `tol`.
    pub fn as_constant(&self, tol: f64) -> Option<Complex64> {
        let mut constant = Complex64::default();
        for (w, &c) in &self.terms {
            if w.is_identity() {
                constant = c;
            } else if c.norm() > tol {
                return None;
            }
        }
        Some(constant)
    }

    pub fn max_abs_diff(&self, other: &CharacterSum) -> f64 {
        let diff = self.add(&other.scale(Complex64::new(-1.0, 0.0)));
        diff.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Square matrix of character sums; the gauge unitary on `Ãⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeField {
    rank: usize,
    entries: Vec<CharacterSum>,
}

impl GaugeField {
    pub fn from_fn(rank: usize, mut f: impl FnMut(usize, usize) -> CharacterSum) -> Self {
        let mut entries = Vec::with_capacity(rank * rank);
        for i in 0..rank {
            for j in 0..rank {
                entries.push(f(i, j));
            }
        }
        Self { rank, entries }
    }

    /// `U = π_u(e^{ic_u x})·π_v(e^{ic_v x})` as a 1×1 field.
    pub fn scalar(c_u: f64, c_v: f64) -> Self {
        let m = CharacterMonomial::gauge(c_u, c_v);
        let mut sum = CharacterSum::default();
        sum.push(m.word(), m.c);
        Self {
            rank: 1,
            entries: vec![sum],
        }
    }

    /// Block rotation gauge: `[[π_u(cos), −π_u(sin)], [π_u(sin), π_u(cos)]]`
    /// at frequency `c_u`, then the same on the v-leg at `c_v`.
    pub fn rotation_pair(c_u: f64, c_v: f64) -> Self {
        let block = |leg: Leg, freq: f64, i: usize, j: usize| match (i, j) {
            (0, 0) | (1, 1) => CharacterSum::cos(leg, freq),
            (0, 1) => CharacterSum::sin(leg, freq).scale(Complex64::new(-1.0, 0.0)),
            _ => CharacterSum::sin(leg, freq),
        };
        Self::from_fn(4, |i, j| match (i / 2, j / 2) {
            (0, 0) => block(Leg::U, c_u, i, j),
            (1, 1) => block(Leg::V, c_v, i - 2, j - 2),
            _ => CharacterSum::zero(),
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn get(&self, i: usize, j: usize) -> &CharacterSum {
        &self.entries[i * self.rank + j]
    }

    pub fn mul(&self, other: &GaugeField) -> Result<GaugeField> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                got: other.rank,
            });
        }
        let n = self.rank;
        Ok(Self::from_fn(n, |i, j| {
            (0..n).fold(CharacterSum::zero(), |acc, k| {
                acc.add(&self.get(i, k).mul(other.get(k, j)))
            })
        }))
    }

    pub fn adjoint(&self) -> GaugeField {
        Self::from_fn(self.rank, |i, j| self.get(j, i).adjoint())
    }

    pub fn deck_act(&self, p: i64, q: i64) -> GaugeField {
        Self::from_fn(self.rank, |i, j| self.get(i, j).deck_act(p, q))
    }

    /// `X̃U`, entrywise.
    pub fn generator(&self, w: WeightVector) -> GaugeField {
        Self::from_fn(self.rank, |i, j| self.get(i, j).generator(w))
    }

    /// Left multiplication by a constant matrix.
    pub fn left_scale(&self, m: &CMatrix) -> Result<GaugeField> {
        if m.nrows() != self.rank || m.ncols() != self.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                got: m.nrows(),
            });
        }
        let n = self.rank;
        Ok(Self::from_fn(n, |i, j| {
            (0..n).fold(CharacterSum::zero(), |acc, k| {
                acc.add(&self.get(k, j).scale(m[(i, k)]))
            })
        }))
    }

    /// Reads the field off as a constant matrix when every entry is constant.
    pub fn as_constant(&self, tol: f64) -> Option<CMatrix> {
        let n = self.rank;
        let mut out = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = self.get(i, j).as_constant(tol)?;
            }
        }
        Some(out)
    }

    pub fn max_abs_diff(&self, other: &GaugeField) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }

    /// `max |U·U† − 1|` over all word coefficients.
    pub fn unitarity_residual(&self) -> f64 {
        let prod = self.mul(&self.adjoint()).expect("same rank");
        let id = Self::from_fn(self.rank, |i, j| {
            CharacterSum::constant(if i == j { 1.0.into() } else { 0.0.into() })
        });
        prod.max_abs_diff(&id)
    }

    /// `g ↦ (gU)·U⁻¹` for `g = n₁ᵖn₂^q`, with `U⁻¹ = U†`. The result must
    /// be a constant matrix; any surviving position-dependent term is an error.
    pub fn wilson_relation(&self, p: i64, q: i64) -> Result<CMatrix> {
        let product = self.deck_act(p, q).mul(&self.adjoint())?;
        product.as_constant(CONSTANT_TOLERANCE).ok_or_else(|| {
            Error::UnsupportedProduct("(gU)·U⁻¹ does not reduce to a constant matrix".into())
        })
    }

    /// Largest coefficient of `X̃U − 2π·Θ_X·U` for constant coefficient
    /// matrices `Θ_u`, `Θ_v`.
    pub fn nc_ag_residual(
        &self,
        theta_u: &CMatrix,
        theta_v: &CMatrix,
        w: WeightVector,
    ) -> Result<f64> {
        let theta_x = (theta_u * Complex64::from(w.alpha as f64)
            + theta_v * Complex64::from(w.beta as f64))
            * Complex64::from(2.0 * PI);
        let lhs = self.generator(w);
        let rhs = self.left_scale(&theta_x)?;
        Ok(lhs.max_abs_diff(&rhs))
    }

    /// As [`GaugeField::nc_ag_residual`], with the coefficients taken from a
    /// constant connection on the base.
    pub fn nc_ag_residual_for(&self, conn: &Connection, w: WeightVector) -> Result<f64> {
        let (tu, tv) = conn
            .constant_matrices()
            .ok_or(Error::NonConstantConnection)?;
        self.nc_ag_residual(&tu, &tv, w)
    }
}

#[derive(Serialize, Deserialize)]
struct MonomialRecord {
    c: [f64; 2],
    a: f64,
    b: f64,
}

impl Serialize for CharacterMonomial {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        MonomialRecord {
            c: [self.c.re, self.c.im],
            a: self.u_leg.freq,
            b: self.v_leg.freq,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CharacterMonomial {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let r = MonomialRecord::deserialize(deserializer)?;
        Ok(CharacterMonomial::new(
            Complex64::new(r.c[0], r.c[1]),
            r.a,
            r.b,
        ))
    }
}

/// `{"deck": [p, q], "value": [re, im]}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WilsonRelationReport {
    pub deck: [i64; 2],
    pub value: [f64; 2],
}

impl WilsonRelationReport {
    pub fn compute(p: i64, q: i64, c_u: f64, c_v: f64) -> Self {
        let z = wilson_relation(p, q, c_u, c_v);
        Self {
            deck: [p, q],
            value: [z.re, z.im],
        }
    }
}
