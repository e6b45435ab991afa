//! Connections on free modules `Aⁿ` over the torus algebra.
//!
//! A connection is stored through its coefficient matrices `Θ_u`, `Θ_v`;
//! for `X = (α, β)` it acts on column vectors as
//! `∇_X ξ = δ_X(ξ) + (αΘ_u + βΘ_v)·ξ`.
//!
//! Transport is normalized as `Φ_τ(s) = exp(2πτ·Θ_X)·φ_τ(s)`, so the loop
//! at `τ = 1` of a scalar connection `Θ_u = i·c` yields `exp(2πi·c)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{TorusElement, TorusParams, WeightVector};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::forms::{d1, MatrixForm, OneForm, TwoForm};
use crate::linalg::{self, CMatrix};

/// Coefficient threshold for [`Connection::is_flat`].
pub const FLATNESS_TOLERANCE: f64 = 1e-12;

pub type ElementMatrix = MatrixForm<TorusElement>;

#[derive(Debug, Clone, PartialEq)]
pub struct Connection {
    params: TorusParams,
    theta_u: ElementMatrix,
    theta_v: ElementMatrix,
}

impl Connection {
    pub fn new(theta_u: ElementMatrix, theta_v: ElementMatrix) -> Result<Self> {
        if theta_u.rank() != theta_v.rank() {
            return Err(Error::RankMismatch {
                expected: theta_u.rank(),
                got: theta_v.rank(),
            });
        }
        let params = theta_u.entries()[0].params();
        for e in theta_u.entries().iter().chain(theta_v.entries()) {
            params.ensure_same(&e.params())?;
        }
        Ok(Self {
            params,
            theta_u,
            theta_v,
        })
    }

    pub fn from_constant(
        params: TorusParams,
        theta_u: &CMatrix,
        theta_v: &CMatrix,
    ) -> Result<Self> {
        if !theta_u.is_square() || theta_u.nrows() == 0 {
            return Err(Error::InvalidParameter(
                "coefficient matrix must be square and non-empty".into(),
            ));
        }
        if theta_u.shape() != theta_v.shape() {
            return Err(Error::RankMismatch {
                expected: theta_u.nrows(),
                got: theta_v.nrows(),
            });
        }
        let n = theta_u.nrows();
        let lift =
            |m: &CMatrix| MatrixForm::from_fn(n, |i, j| TorusElement::scalar(m[(i, j)], params));
        Self::new(lift(theta_u), lift(theta_v))
    }

    pub fn zero(params: TorusParams, rank: usize) -> Result<Self> {
        Self::from_constant(
            params,
            &CMatrix::zeros(rank, rank),
            &CMatrix::zeros(rank, rank),
        )
    }

    /// Rank-one connection `ξ ↦ ξ ⊗ ω` with `ω = i(c_u du + c_v dv)`.
    pub fn scalar(params: TorusParams, c_u: f64, c_v: f64) -> Result<Self> {
        let m = |c: f64| CMatrix::from_element(1, 1, Complex64::new(0.0, c));
        Self::from_constant(params, &m(c_u), &m(c_v))
    }

    /// Rank-four connection `∇e₁ = c_u e₂ du`, `∇e₂ = −c_u e₁ du`,
    /// `∇e₃ = c_v e₄ dv`, `∇e₄ = −c_v e₃ dv`.
    pub fn rotation_pair(params: TorusParams, c_u: f64, c_v: f64) -> Result<Self> {
        let mut tu = CMatrix::zeros(4, 4);
        tu[(1, 0)] = c_u.into();
        tu[(0, 1)] = (-c_u).into();
        let mut tv = CMatrix::zeros(4, 4);
        tv[(3, 2)] = c_v.into();
        tv[(2, 3)] = (-c_v).into();
        Self::from_constant(params, &tu, &tv)
    }

    pub fn params(&self) -> TorusParams {
        self.params
    }

    pub fn rank(&self) -> usize {
        self.theta_u.rank()
    }

    pub fn theta_u(&self) -> &ElementMatrix {
        &self.theta_u
    }

    pub fn theta_v(&self) -> &ElementMatrix {
        &self.theta_v
    }

    /// True iff every coefficient is a complex multiple of `1`.
    pub fn is_constant(&self) -> bool {
        self.theta_u
            .entries()
            .iter()
            .chain(self.theta_v.entries())
            .all(TorusElement::is_scalar)
    }

    pub fn constant_matrices(&self) -> Option<(CMatrix, CMatrix)> {
        Some((scalar_matrix(&self.theta_u)?, scalar_matrix(&self.theta_v)?))
    }

    /// `Θ_u* = −Θ_u` and `Θ_v* = −Θ_v` (conjugate transpose, entrywise involution).
    pub fn is_antihermitian(&self, tol: f64) -> bool {
        let check = |m: &ElementMatrix| {
            let n = m.rank();
            (0..n).all(|i| {
                (0..n).all(|j| {
                    let lhs = m.get(j, i).star();
                    let rhs = -m.get(i, j);
                    lhs.approx_eq(&rhs, tol)
                })
            })
        };
        check(&self.theta_u) && check(&self.theta_v)
    }

    /// `Θ_X = αΘ_u + βΘ_v`.
    pub fn theta_along(&self, w: WeightVector) -> ElementMatrix {
        let a = Complex64::from(w.alpha as f64);
        let b = Complex64::from(w.beta as f64);
        MatrixForm::from_fn(self.rank(), |i, j| {
            &self.theta_u.get(i, j).scale(a) + &self.theta_v.get(i, j).scale(b)
        })
    }

    /// The matrix of 1-forms `Θ = Θ_u du + Θ_v dv`.
    pub fn connection_form(&self) -> MatrixForm<OneForm> {
        MatrixForm::from_fn(self.rank(), |i, j| OneForm {
            du: self.theta_u.get(i, j).clone(),
            dv: self.theta_v.get(i, j).clone(),
        })
    }

    /// `∇_w ξ = δ_w(ξ) + Θ_w·ξ`.
    pub fn nabla(&self, w: WeightVector, xi: &[TorusElement]) -> Result<Vec<TorusElement>> {
        if xi.len() != self.rank() {
            return Err(Error::RankMismatch {
                expected: self.rank(),
                got: xi.len(),
            });
        }
        for x in xi {
            self.params.ensure_same(&x.params())?;
        }
        let theta = self.theta_along(w);
        let action = mat_vec(&theta, xi);
        Ok(xi
            .iter()
            .zip(action)
            .map(|(x, t)| &x.apply_derivation(w) + &t)
            .collect())
    }

    /// Curvature as the matrix 2-form `dΘ + Θ∧Θ`. The grassmannian term
    /// vanishes on a free module.
    pub fn curvature_form(&self) -> MatrixForm<TwoForm> {
        let theta = self.connection_form();
        let wedge = theta.wedge(&theta).expect("entries share rank and params");
        theta
            .map(d1)
            .checked_add(&wedge)
            .expect("entries share rank and params")
    }

    /// `𝒯(X,Y) = ∇_X∇_Y − ∇_Y∇_X − ∇_[X,Y]`, evaluated column by column on
    /// the standard basis. Torus flows commute, so `[X,Y] = 0`.
    pub fn curvature_commutator(&self, x: WeightVector, y: WeightVector) -> ElementMatrix {
        let n = self.rank();
        let bracket = WeightVector::ZERO;
        let columns: Vec<Vec<TorusElement>> = (0..n)
            .map(|j| {
                let e = self.basis_vector(j);
                let xy = self
                    .nabla(x, &self.nabla(y, &e).expect("rank"))
                    .expect("rank");
                let yx = self
                    .nabla(y, &self.nabla(x, &e).expect("rank"))
                    .expect("rank");
                let br = self.nabla(bracket, &e).expect("rank");
                xy.iter()
                    .zip(&yx)
                    .zip(&br)
                    .map(|((a, b), c)| &(a - b) - c)
                    .collect()
            })
            .collect();
        MatrixForm::from_fn(n, |i, j| columns[j][i].clone())
    }

    pub fn is_flat(&self) -> bool {
        self.curvature_form().max_abs() < FLATNESS_TOLERANCE
    }

    pub(crate) fn ensure_flat(&self) -> Result<()> {
        let residual = self.curvature_form().max_abs();
        if residual < FLATNESS_TOLERANCE {
            Ok(())
        } else {
            Err(Error::NotFlat { residual })
        }
    }

    fn basis_vector(&self, j: usize) -> Vec<TorusElement> {
        (0..self.rank())
            .map(|i| {
                if i == j {
                    TorusElement::one(self.params)
                } else {
                    TorusElement::zero(self.params)
                }
            })
            .collect()
    }

    /// Parallel transport along the flow of `w` for time `tau`.
    pub fn transport(&self, w: WeightVector, tau: f64) -> Result<TransportOperator> {
        let (tu, tv) = self
            .constant_matrices()
            .ok_or(Error::NonConstantConnection)?;
        let generator = (tu * Complex64::from(w.alpha as f64)
            + tv * Complex64::from(w.beta as f64))
            * Complex64::from(2.0 * PI * tau);
        Ok(TransportOperator {
            matrix: linalg::expm(&generator),
            weight: w,
            tau,
        })
    }

    /// Randomized check of the module parallel transport axioms for the
    /// flow of `w`: twisted linearity, `Φ₀ = id`, and the group law.
    pub fn check_transport_axioms(
        &self,
        w: WeightVector,
        samples: usize,
        seed: u64,
        exec: Exec,
    ) -> Result<TransportAxiomReport> {
        if !self.is_constant() {
            return Err(Error::NonConstantConnection);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let draws: Vec<AxiomSample> = (0..samples)
            .map(|_| AxiomSample {
                s: (0..self.rank())
                    .map(|_| TorusElement::random(&mut rng, self.params, 5, 3))
                    .collect(),
                a: TorusElement::random(&mut rng, self.params, 5, 3),
                tau: rng.gen_range(-2.0..2.0),
                sigma: rng.gen_range(-2.0..2.0),
            })
            .collect();

        let residuals = exec.map(&draws, |d| self.axiom_residuals(w, d));
        let mut report = TransportAxiomReport {
            samples,
            twisted_linearity: 0.0,
            identity: 0.0,
            group_law: 0.0,
        };
        for r in residuals {
            let (lin, id, group) = r?;
            report.twisted_linearity = report.twisted_linearity.max(lin);
            report.identity = report.identity.max(id);
            report.group_law = report.group_law.max(group);
        }
        Ok(report)
    }

    fn axiom_residuals(&self, w: WeightVector, d: &AxiomSample) -> Result<(f64, f64, f64)> {
        let phi_tau = self.transport(w, d.tau)?;
        let phi_sigma = self.transport(w, d.sigma)?;
        let phi_sum = self.transport(w, d.tau + d.sigma)?;
        let phi_zero = self.transport(w, 0.0)?;

        let sa: Vec<_> = d.s.iter().map(|x| x * &d.a).collect();
        let lhs = phi_tau.apply(&sa)?;
        let twisted_a = d.a.apply_auto(w, d.tau);
        let rhs: Vec<_> = phi_tau
            .apply(&d.s)?
            .iter()
            .map(|x| x * &twisted_a)
            .collect();
        let lin = max_vec_diff(&lhs, &rhs);

        let id = max_vec_diff(&phi_zero.apply(&d.s)?, &d.s);

        let group = max_vec_diff(
            &phi_sum.apply(&d.s)?,
            &phi_tau.apply(&phi_sigma.apply(&d.s)?)?,
        );
        Ok((lin, id, group))
    }
}

struct AxiomSample {
    s: Vec<TorusElement>,
    a: TorusElement,
    tau: f64,
    sigma: f64,
}

/// Largest residual observed for each transport axiom.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransportAxiomReport {
    pub samples: usize,
    pub twisted_linearity: f64,
    pub identity: f64,
    pub group_law: f64,
}

impl TransportAxiomReport {
    pub fn max_residual(&self) -> f64 {
        self.twisted_linearity
            .max(self.identity)
            .max(self.group_law)
    }
}

/// `Φ_τ(s) = M·φ_τ(s)` on `Aⁿ`, `φ_τ` applied entrywise.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportOperator {
    pub matrix: CMatrix,
    pub weight: WeightVector,
    pub tau: f64,
}

impl TransportOperator {
    pub fn identity(rank: usize) -> Self {
        Self {
            matrix: linalg::identity(rank),
            weight: WeightVector::ZERO,
            tau: 1.0,
        }
    }

    pub fn rank(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, s: &[TorusElement]) -> Result<Vec<TorusElement>> {
        if s.len() != self.rank() {
            return Err(Error::RankMismatch {
                expected: self.rank(),
                got: s.len(),
            });
        }
        let twisted: Vec<_> = s
            .iter()
            .map(|x| x.apply_auto(self.weight, self.tau))
            .collect();
        let n = self.rank();
        (0..n)
            .map(|i| {
                let mut acc = TorusElement::zero(twisted[0].params());
                for (j, x) in twisted.iter().enumerate() {
                    let m = self.matrix[(i, j)];
                    if m != Complex64::default() {
                        acc = acc.checked_add(&x.scale(m))?;
                    }
                }
                Ok(acc)
            })
            .collect()
    }
}

fn scalar_matrix(m: &ElementMatrix) -> Option<CMatrix> {
    let n = m.rank();
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = m.get(i, j).as_scalar()?;
        }
    }
    Some(out)
}

fn mat_vec(m: &ElementMatrix, xi: &[TorusElement]) -> Vec<TorusElement> {
    (0..m.rank())
        .map(|i| {
            xi.iter()
                .enumerate()
                .fold(TorusElement::zero(xi[0].params()), |acc, (j, x)| {
                    &acc + &(m.get(i, j) * x)
                })
        })
        .collect()
}

fn max_vec_diff(a: &[TorusElement], b: &[TorusElement]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.max_abs_diff(y))
        .fold(0.0, f64::max)
}

/// A coefficient entry in connection JSON: either `[re, im]` for a
/// multiple of `1` or a full element object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EntryRecord {
    Complex([f64; 2]),
    Element(TorusElement),
}

/// JSON form `{"rank", "theta_u", "theta_v", "constant"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConnectionRecord {
    pub rank: usize,
    pub theta_u: Vec<Vec<EntryRecord>>,
    pub theta_v: Vec<Vec<EntryRecord>>,
    #[serde(default)]
    pub constant: bool,
}

impl ConnectionRecord {
    pub fn into_connection(self, params: TorusParams) -> Result<Connection> {
        let build = |rows: Vec<Vec<EntryRecord>>, label: &str| -> Result<ElementMatrix> {
            if rows.len() != self.rank {
                return Err(Error::RankMismatch {
                    expected: self.rank,
                    got: rows.len(),
                });
            }
            let rows = rows
                .into_iter()
                .map(|row| {
                    row.into_iter()
                        .map(|e| match e {
                            EntryRecord::Complex([re, im]) => {
                                Ok(TorusElement::scalar(Complex64::new(re, im), params))
                            }
                            EntryRecord::Element(x) => {
                                params.ensure_same(&x.params())?;
                                Ok(x)
                            }
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            MatrixForm::from_rows(rows).map_err(|e| Error::Schema(format!("{label}: {e}")))
        };
        let conn = Connection::new(
            build(self.theta_u.clone(), "theta_u")?,
            build(self.theta_v.clone(), "theta_v")?,
        )?;
        if self.constant && !conn.is_constant() {
            return Err(Error::Schema(
                "connection declared constant but has non-scalar coefficients".into(),
            ));
        }
        Ok(conn)
    }
}

impl From<&Connection> for ConnectionRecord {
    fn from(conn: &Connection) -> Self {
        let rows = |m: &ElementMatrix| -> Vec<Vec<EntryRecord>> {
            m.rows()
                .map(|row| {
                    row.iter()
                        .map(|e| match e.as_scalar() {
                            Some(z) => EntryRecord::Complex([z.re, z.im]),
                            None => EntryRecord::Element(e.clone()),
                        })
                        .collect()
                })
                .collect()
        };
        ConnectionRecord {
            rank: conn.rank(),
            theta_u: rows(&conn.theta_u),
            theta_v: rows(&conn.theta_v),
            constant: conn.is_constant(),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct TransportRecord {
    matrix: Vec<Vec<[f64; 2]>>,
    weight: WeightVector,
    tau: f64,
}

impl Serialize for TransportOperator {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        TransportRecord {
            matrix: complex_rows(&self.matrix),
            weight: self.weight,
            tau: self.tau,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TransportOperator {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let rec = TransportRecord::deserialize(deserializer)?;
        let n = rec.matrix.len();
        if n == 0 || rec.matrix.iter().any(|r| r.len() != n) {
            return Err(serde::de::Error::custom(
                "transport matrix must be square and non-empty",
            ));
        }
        let matrix = CMatrix::from_fn(n, n, |i, j| {
            Complex64::new(rec.matrix[i][j][0], rec.matrix[i][j][1])
        });
        Ok(TransportOperator {
            matrix,
            weight: rec.weight,
            tau: rec.tau,
        })
    }
}

pub(crate) fn complex_rows(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .map(|j| [m[(i, j)].re, m[(i, j)].im])
                .collect()
        })
        .collect()
}
