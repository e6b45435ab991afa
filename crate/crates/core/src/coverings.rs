//! Finite covering projections `A_θ → A_θ'` of degree `(k₁, k₂)`.
//!
//! The cover is generated by `x`, `y` with `xy = λ'yx`, `θ' = θ/(k₁k₂)`,
//! and the projection sends `u ↦ x^{k₁}`, `v ↦ y^{k₂}`. The deck group
//! `ℤ_{k₁} × ℤ_{k₂}` acts on `x^p y^q` by `exp(2πi(ap/k₁ + bq/k₂))`.

use serde::{Deserialize, Serialize};

use crate::algebra::{cis_turns, TorusElement, TorusParams, WeightVector};
use crate::connections::{Connection, TransportOperator};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg;

/// Transports closer than this are treated as equal by the path-independence check.
pub const PATH_INDEPENDENCE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoveringSpec {
    base: TorusParams,
    cover: TorusParams,
    k1: u32,
    k2: u32,
}

/// Deck transformation `(a, b) ∈ ℤ_{k₁} × ℤ_{k₂}`, stored reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[u32; 2]", into = "[u32; 2]")]
pub struct DeckElement {
    pub a: u32,
    pub b: u32,
}

impl From<[u32; 2]> for DeckElement {
    fn from([a, b]: [u32; 2]) -> Self {
        Self { a, b }
    }
}

impl From<DeckElement> for [u32; 2] {
    fn from(g: DeckElement) -> Self {
        [g.a, g.b]
    }
}

impl DeckElement {
    pub const IDENTITY: DeckElement = DeckElement { a: 0, b: 0 };

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    /// Canonical representative path: the flow with weight `(a, b)`.
    pub fn canonical_weight(&self) -> WeightVector {
        WeightVector::new(self.a as i64, self.b as i64)
    }
}

impl CoveringSpec {
    pub fn new(base: TorusParams, k1: u32, k2: u32) -> Result<Self> {
        if k1 == 0 || k2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "covering degrees must be positive, got ({k1}, {k2})"
            )));
        }
        let cover = TorusParams::new(base.theta() / (k1 as f64 * k2 as f64))?;
        Ok(Self {
            base,
            cover,
            k1,
            k2,
        })
    }

    pub fn base(&self) -> TorusParams {
        self.base
    }

    pub fn cover(&self) -> TorusParams {
        self.cover
    }

    pub fn degrees(&self) -> (u32, u32) {
        (self.k1, self.k2)
    }

    pub fn order(&self) -> usize {
        self.k1 as usize * self.k2 as usize
    }

    /// Reduces `(a, b)` into `ℤ_{k₁} × ℤ_{k₂}`.
    pub fn deck(&self, a: i64, b: i64) -> DeckElement {
        DeckElement {
            a: a.rem_euclid(self.k1 as i64) as u32,
            b: b.rem_euclid(self.k2 as i64) as u32,
        }
    }

    pub fn g_u(&self) -> DeckElement {
        self.deck(1, 0)
    }

    pub fn g_v(&self) -> DeckElement {
        self.deck(0, 1)
    }

    pub fn compose(&self, g: DeckElement, h: DeckElement) -> DeckElement {
        self.deck(g.a as i64 + h.a as i64, g.b as i64 + h.b as i64)
    }

    pub fn contains(&self, g: DeckElement) -> bool {
        g.a < self.k1 && g.b < self.k2
    }

    pub fn elements(&self) -> impl Iterator<Item = DeckElement> + '_ {
        (0..self.k1).flat_map(move |a| (0..self.k2).map(move |b| DeckElement { a, b }))
    }

    /// `uᵐvⁿ ↦ x^{k₁m} y^{k₂n}`, with `λᵏ ↦ λ'^{k·k₁k₂}`.
    pub fn project(&self, a: &TorusElement) -> Result<TorusElement> {
        self.base.ensure_same(&a.params())?;
        let (k1, k2) = (self.k1 as i64, self.k2 as i64);
        Ok(TorusElement::from_terms(
            self.cover,
            a.terms()
                .map(|((m, n), t)| (k1 * m, k2 * n, t.c, t.lk * k1 * k2)),
        ))
    }

    pub fn deck_act(&self, g: DeckElement, a: &TorusElement) -> Result<TorusElement> {
        self.cover.ensure_same(&a.params())?;
        if !self.contains(g) {
            return Err(Error::InvalidParameter(format!(
                "deck element ({}, {}) outside ℤ_{} × ℤ_{}",
                g.a, g.b, self.k1, self.k2
            )));
        }
        let (k1, k2) = (self.k1 as i64, self.k2 as i64);
        Ok(TorusElement::from_terms(
            self.cover,
            a.terms().map(|((p, q), t)| {
                let ra = (g.a as i64 * p).rem_euclid(k1) as f64 / k1 as f64;
                let rb = (g.b as i64 * q).rem_euclid(k2) as f64 / k2 as f64;
                let c = if ra == 0.0 && rb == 0.0 {
                    t.c
                } else {
                    t.c * cis_turns(ra + rb)
                };
                (p, q, c, t.lk)
            }),
        ))
    }

    pub fn lift_group(&self, w: WeightVector) -> LiftedFlow {
        LiftedFlow {
            spec: *self,
            weight: w,
        }
    }

    /// Decides whether the flow of `w` is a closed path and, if so, which
    /// deck element it is associated with.
    ///
    /// The lifted flow lies in the deck group at time `τ` exactly when
    /// `τα, τβ ∈ ℤ`, which first happens at `τ = 1/gcd(|α|, |β|)`.
    pub fn classify_path(&self, w: WeightVector) -> Result<ClosedPathReport> {
        if w.is_zero() {
            return Err(Error::ZeroWeight);
        }
        let g = gcd(w.alpha.unsigned_abs(), w.beta.unsigned_abs());
        let closed = g == 1;
        Ok(ClosedPathReport {
            weight: w,
            is_closed: closed,
            associated: closed.then(|| self.deck(w.alpha, w.beta)),
            witness: (!closed).then(|| 1.0 / g as f64),
        })
    }

    /// Classifies every nonzero weight with `|α|, |β| ≤ radius`.
    pub fn classify_sweep(&self, radius: i64, exec: Exec) -> Vec<ClosedPathReport> {
        let weights: Vec<WeightVector> = (-radius..=radius)
            .flat_map(|a| (-radius..=radius).map(move |b| WeightVector::new(a, b)))
            .filter(|w| !w.is_zero())
            .collect();
        exec.map(&weights, |w| {
            self.classify_path(*w).expect("nonzero weight")
        })
    }

    /// Generalized Wilson line of a flat constant connection, transported
    /// along the canonical representative path of `g`.
    pub fn wilson(&self, g: DeckElement, conn: &Connection) -> Result<TransportOperator> {
        self.base.ensure_same(&conn.params())?;
        if !self.contains(g) {
            return Err(Error::InvalidParameter(format!(
                "deck element ({}, {}) outside ℤ_{} × ℤ_{}",
                g.a, g.b, self.k1, self.k2
            )));
        }
        conn.ensure_flat()?;
        if !conn.is_constant() {
            return Err(Error::NonConstantConnection);
        }
        if g.is_identity() {
            return Ok(TransportOperator::identity(conn.rank()));
        }
        conn.transport(g.canonical_weight(), 1.0)
    }

    /// Wilson lines for every deck element, in [`CoveringSpec::elements`] order.
    pub fn wilson_table(
        &self,
        conn: &Connection,
        exec: Exec,
    ) -> Result<Vec<(DeckElement, TransportOperator)>> {
        let elements: Vec<DeckElement> = self.elements().collect();
        exec.map(&elements, |g| self.wilson(*g, conn).map(|t| (*g, t)))
            .into_iter()
            .collect()
    }

    /// Transports along several closed paths associated with `g` and reports
    /// how far apart the results are.
    pub fn check_path_independence(
        &self,
        g: DeckElement,
        conn: &Connection,
        weights: &[WeightVector],
    ) -> Result<PathIndependenceReport> {
        self.base.ensure_same(&conn.params())?;
        let mut transports = Vec::with_capacity(weights.len());
        for &w in weights {
            let report = self.classify_path(w)?;
            if report.associated != Some(g) {
                return Err(Error::PathNotAssociated {
                    weight: w,
                    expected: (g.a, g.b),
                });
            }
            transports.push(conn.transport(w, 1.0)?);
        }
        let mut max_distance: f64 = 0.0;
        for (i, a) in transports.iter().enumerate() {
            for b in &transports[i + 1..] {
                max_distance = max_distance.max(linalg::max_abs_diff(&a.matrix, &b.matrix));
            }
        }
        Ok(PathIndependenceReport {
            deck: g,
            transports,
            max_distance,
            certified: max_distance < PATH_INDEPENDENCE_TOLERANCE,
        })
    }
}

/// Lift of the base flow of `w` to the cover: scales `x^p y^q` by
/// `exp(2πiτ(αp/k₁ + βq/k₂))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiftedFlow {
    spec: CoveringSpec,
    weight: WeightVector,
}

impl LiftedFlow {
    pub fn weight(&self) -> WeightVector {
        self.weight
    }

    pub fn apply(&self, tau: f64, a: &TorusElement) -> Result<TorusElement> {
        self.spec.cover.ensure_same(&a.params())?;
        let (k1, k2) = (self.spec.k1 as f64, self.spec.k2 as f64);
        let (al, be) = (self.weight.alpha as f64, self.weight.beta as f64);
        Ok(TorusElement::from_terms(
            self.spec.cover,
            a.terms().map(|((p, q), t)| {
                let turns = tau * (al * p as f64 / k1 + be * q as f64 / k2);
                let c = if turns == 0.0 {
                    t.c
                } else {
                    t.c * cis_turns(turns)
                };
                (p, q, c, t.lk)
            }),
        ))
    }

    /// The deck element equal to the lifted flow at time `tau`, if any.
    pub fn deck_at(&self, tau: f64) -> Option<DeckElement> {
        let a = tau * self.weight.alpha as f64;
        let b = tau * self.weight.beta as f64;
        let near_int = |x: f64| (x - x.round()).abs() < 1e-12;
        (near_int(a) && near_int(b)).then(|| self.spec.deck(a.round() as i64, b.round() as i64))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedPathReport {
    pub weight: WeightVector,
    #[serde(rename = "closed")]
    pub is_closed: bool,
    #[serde(rename = "deck")]
    pub associated: Option<DeckElement>,
    pub witness: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathIndependenceReport {
    pub deck: DeckElement,
    pub transports: Vec<TransportOperator>,
    pub max_distance: f64,
    pub certified: bool,
}

#[derive(Serialize, Deserialize)]
struct CoveringRecord {
    theta: f64,
    degrees: [u32; 2],
}

impl Serialize for CoveringSpec {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        CoveringRecord {
            theta: self.base.theta(),
            degrees: [self.k1, self.k2],
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CoveringSpec {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let rec = CoveringRecord::deserialize(deserializer)?;
        let base = TorusParams::new(rec.theta).map_err(serde::de::Error::custom)?;
        CoveringSpec::new(base, rec.degrees[0], rec.degrees[1]).map_err(serde::de::Error::custom)
    }
}

/// `gcd(0, n) = n`.
fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
