//! Differential calculus `Ω⁰ → Ω¹ → Ω²` over the torus algebra.
//!
//! The basis forms `du`, `dv` are central and anticommute, and pair with the
//! derivations `δ_u = δ_(1,0)`, `δ_v = δ_(0,1)` as a dual basis.

use serde::{Deserialize, Serialize};

use crate::algebra::{TorusElement, TorusParams, WeightVector};
use crate::error::{Error, Result};

/// `du·a_u + dv·a_v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneForm {
    pub du: TorusElement,
    pub dv: TorusElement,
}

/// `a·du∧dv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoForm {
    pub dudv: TorusElement,
}

impl OneForm {
    pub fn new(du: TorusElement, dv: TorusElement) -> Result<Self> {
        du.params().ensure_same(&dv.params())?;
        Ok(Self { du, dv })
    }

    pub fn zero(params: TorusParams) -> Self {
        Self {
            du: TorusElement::zero(params),
            dv: TorusElement::zero(params),
        }
    }

    pub fn params(&self) -> TorusParams {
        self.du.params()
    }

    /// Evaluation on the derivation `δ_w`: `α·a_u + β·a_v`.
    pub fn contract(&self, w: WeightVector) -> TorusElement {
        let a = self.du.scale((w.alpha as f64).into());
        let b = self.dv.scale((w.beta as f64).into());
        &a + &b
    }

    pub fn is_zero(&self) -> bool {
        self.du.is_zero() && self.dv.is_zero()
    }

    /// Left module action `a·ω`.
    pub fn left_mul(&self, a: &TorusElement) -> Result<OneForm> {
        Ok(OneForm {
            du: a.checked_mul(&self.du)?,
            dv: a.checked_mul(&self.dv)?,
        })
    }

    /// Right module action `ω·a`.
    pub fn right_mul(&self, a: &TorusElement) -> Result<OneForm> {
        Ok(OneForm {
            du: self.du.checked_mul(a)?,
            dv: self.dv.checked_mul(a)?,
        })
    }

    pub fn checked_add(&self, other: &OneForm) -> Result<OneForm> {
        Ok(OneForm {
            du: self.du.checked_add(&other.du)?,
            dv: self.dv.checked_add(&other.dv)?,
        })
    }

    pub fn max_abs_diff(&self, other: &OneForm) -> f64 {
        self.du
            .max_abs_diff(&other.du)
            .max(self.dv.max_abs_diff(&other.dv))
    }
}

impl TwoForm {
    pub fn zero(params: TorusParams) -> Self {
        Self {
            dudv: TorusElement::zero(params),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.dudv.is_zero()
    }

    pub fn checked_add(&self, other: &TwoForm) -> Result<TwoForm> {
        Ok(TwoForm {
            dudv: self.dudv.checked_add(&other.dudv)?,
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.dudv.max_abs()
    }
}

/// Exterior derivative on functions: `δ_u(a)·du + δ_v(a)·dv`.
pub fn d0(a: &TorusElement) -> OneForm {
    OneForm {
        du: a.apply_derivation(WeightVector::U),
        dv: a.apply_derivation(WeightVector::V),
    }
}

/// Exterior derivative on 1-forms: `(δ_u(a_v) − δ_v(a_u))·du∧dv`.
pub fn d1(w: &OneForm) -> TwoForm {
    let left = w.dv.apply_derivation(WeightVector::U);
    let right = w.du.apply_derivation(WeightVector::V);
    TwoForm {
        dudv: &left - &right,
    }
}

/// `(a_u·b_v − a_v·b_u)·du∧dv`, left factor multiplying from the left.
pub fn wedge(w1: &OneForm, w2: &OneForm) -> Result<TwoForm> {
    let uv = w1.du.checked_mul(&w2.dv)?;
    let vu = w1.dv.checked_mul(&w2.du)?;
    Ok(TwoForm {
        dudv: uv.checked_sub(&vu)?,
    })
}

/// Square matrix of forms (or algebra elements), row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixForm<F> {
    rank: usize,
    entries: Vec<F>,
}

impl<F> MatrixForm<F> {
    pub fn from_rows(rows: Vec<Vec<F>>) -> Result<Self> {
        let rank = rows.len();
        if rank == 0 {
            return Err(Error::InvalidParameter(
                "matrix rank must be positive".into(),
            ));
        }
        let mut entries = Vec::with_capacity(rank * rank);
        for row in rows {
            if row.len() != rank {
                return Err(Error::RankMismatch {
                    expected: rank,
                    got: row.len(),
                });
            }
            entries.extend(row);
        }
        Ok(Self { rank, entries })
    }

    pub fn from_fn(rank: usize, mut f: impl FnMut(usize, usize) -> F) -> Self {
        let mut entries = Vec::with_capacity(rank * rank);
        for i in 0..rank {
            for j in 0..rank {
                entries.push(f(i, j));
            }
        }
        Self { rank, entries }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn get(&self, i: usize, j: usize) -> &F {
        &self.entries[i * self.rank + j]
    }

    pub fn entries(&self) -> &[F] {
        &self.entries
    }

    pub fn rows(&self) -> impl Iterator<Item = &[F]> {
        self.entries.chunks(self.rank)
    }

    pub fn map<G>(&self, f: impl FnMut(&F) -> G) -> MatrixForm<G> {
        MatrixForm {
            rank: self.rank,
            entries: self.entries.iter().map(f).collect(),
        }
    }
}

impl MatrixForm<OneForm> {
    /// Entrywise `d1`.
    pub fn d1(&self) -> MatrixForm<TwoForm> {
        self.map(d1)
    }

    /// `(A∧B)_ij = Σ_k A_ik ∧ B_kj`.
    pub fn wedge(&self, other: &MatrixForm<OneForm>) -> Result<MatrixForm<TwoForm>> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                got: other.rank,
            });
        }
        let params = self.entries[0].params();
        let n = self.rank;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = TwoForm::zero(params);
                for k in 0..n {
                    acc = acc.checked_add(&wedge(self.get(i, k), other.get(k, j))?)?;
                }
                entries.push(acc);
            }
        }
        Ok(MatrixForm { rank: n, entries })
    }
}

impl MatrixForm<TwoForm> {
    pub fn checked_add(&self, other: &MatrixForm<TwoForm>) -> Result<MatrixForm<TwoForm>> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch {
                expected: self.rank,
                got: other.rank,
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.checked_add(b))
            .collect::<Result<Vec<_>>>()?;
        Ok(MatrixForm {
            rank: self.rank,
            entries,
        })
    }

    /// True when every entry has an empty coefficient map.
    pub fn is_symbolically_zero(&self) -> bool {
        self.entries.iter().all(TwoForm::is_zero)
    }

    pub fn max_abs(&self) -> f64 {
        self.entries
            .iter()
            .map(TwoForm::max_abs)
            .fold(0.0, f64::max)
    }
}

impl<F: Serialize> Serialize for MatrixForm<F> {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<&[F]> = self.rows().collect();
        rows.serialize(serializer)
    }
}

impl<'de, F: Deserialize<'de>> Deserialize<'de> for MatrixForm<F> {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<F>>::deserialize(deserializer)?;
        MatrixForm::from_rows(rows).map_err(serde::de::Error::custom)
    }
}
