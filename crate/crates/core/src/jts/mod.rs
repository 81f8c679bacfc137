//! Jordan triple systems of the irreducible bounded symmetric domains.
//!
//! Every family is realised on coordinates that are orthonormal for its
//! invariant inner product, so the isotropy group acts unitarily:
//!
//! | family   | model                                   | coordinates                              |
//! |----------|-----------------------------------------|------------------------------------------|
//! | `I(p,q)` | `p × q` matrices                        | entries, row-major                       |
//! | `II(n)`  | skew `n × n` matrices                   | `√2·x_ij`, `i < j`, lexicographic        |
//! | `III(n)` | symmetric `n × n` matrices              | `x_ii`, and `√2·x_ij` for `i < j`        |
//! | `IV(n)`  | `ℂⁿ`                                    | standard                                 |
//! | `V`      | Peirce ½-space of `E₁₁` in the Albert algebra | Albert coordinates `3..19`         |
//! | `VI`     | complexified 3×3 octonion-Hermitian     | see [`albert`]                           |
//! | `D`      | `ℂ`                                     | standard                                 |
//!
//! Triple products (conjugate-linear in the middle slot):
//!
//! * matrix families: `{x,y,z} = x y* z + z y* x`;
//! * `IV(n)`: `{x,y,z} = (x·ȳ)z + (z·ȳ)x − (x·z)ȳ` with the bilinear dot;
//! * `VI`: `{x,y,z} = (x∘ȳ)∘z + (z∘ȳ)∘x − (x∘z)∘ȳ`; `V` is the restriction.
//!
//! Normalisations are not tied to any particular metric; everything
//! downstream depends only on kernels and ranks.

pub mod albert;
pub mod octonion;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::par::{map_indexed, Execution};
use crate::tensor_space::{singular_values, ZERO_EPS};
use crate::{CMatrix, CVector, Error, Result, C64};
use albert::{albert_triple, AlbertMatrix, ALBERT_DIM};

pub use octonion::{oct_mul, Octonion};

/// Tolerance for model-space membership checks (skew, symmetric, Hermitian).
pub const MODEL_TOL: f64 = 1e-10;

/// Coordinate range of the type-V space inside the Albert coordinates.
const V_RANGE: std::ops::Range<usize> = 3..19;

/// One of the irreducible families, with parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    I(usize, usize),
    II(usize),
    III(usize),
    IV(usize),
    V,
    VI,
    /// The unit disc.
    Disc,
}

impl Family {
    pub fn validate(self) -> Result<Self> {
        let ok = match self {
            Family::I(p, q) => p >= 1 && q >= 1,
            Family::II(n) => n >= 2,
            Family::III(n) | Family::IV(n) => n >= 1,
            Family::V | Family::VI | Family::Disc => true,
        };
        if ok {
            Ok(self)
        } else {
            Err(Error::ParseError(format!("parameters out of range for {self}")))
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Family::I(p, q) => p * q,
            Family::II(n) => n * (n - 1) / 2,
            Family::III(n) => n * (n + 1) / 2,
            Family::IV(n) => n,
            Family::V => 16,
            Family::VI => ALBERT_DIM,
            Family::Disc => 1,
        }
    }

    /// Rank of the triple system (maximal number of orthogonal tripotents).
    pub fn rank(self) -> usize {
        match self {
            Family::I(p, q) => p.min(q),
            Family::II(n) => n / 2,
            Family::III(n) => n,
            Family::IV(n) => n.min(2),
            Family::V => 2,
            Family::VI => 3,
            Family::Disc => 1,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::I(p, q) => write!(f, "I({p},{q})"),
            Family::II(n) => write!(f, "II({n})"),
            Family::III(n) => write!(f, "III({n})"),
            Family::IV(n) => write!(f, "IV({n})"),
            Family::V => write!(f, "V"),
            Family::VI => write!(f, "VI"),
            Family::Disc => write!(f, "D"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    /// Grammar: `I(p,q)`, `II(n)`, `III(n)`, `IV(n)`, `V`, `VI`, `D`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::ParseError(format!("unrecognised family `{s}`"));
        let (name, args) = match s.find('(') {
            Some(open) => {
                let inner = s[open + 1..].strip_suffix(')').ok_or_else(bad)?;
                let args = inner
                    .split(',')
                    .map(|a| a.trim().parse::<usize>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>>>()?;
                (s[..open].trim(), args)
            }
            None => (s, Vec::new()),
        };
        let family = match (name, args.as_slice()) {
            ("I", &[p, q]) => Family::I(p, q),
            ("II", &[n]) => Family::II(n),
            ("III", &[n]) => Family::III(n),
            ("IV", &[n]) => Family::IV(n),
            ("V", []) => Family::V,
            ("VI", []) => Family::VI,
            ("D", []) => Family::Disc,
            _ => return Err(bad()),
        };
        family.validate()
    }
}

fn skew_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

fn sym_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect()
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Bilinear dot product `Σ aᵢbᵢ`.
fn bilinear_dot(a: &CVector, b: &CVector) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// A rank-one element `e` with `{e,e,e} = scale · e`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tripotent {
    pub element: CVector,
    pub scale: f64,
    pub family: Family,
}

/// A Jordan triple system together with the operators `D(e_a, e_b)` on its
/// coordinate basis.
#[derive(Debug, Clone)]
pub struct JordanTripleSystem {
    family: Family,
    dim: usize,
    /// `d_basis[a·n + b] = D(e_a, e_b)`.
    d_basis: Vec<CMatrix>,
}

impl JordanTripleSystem {
    pub fn new(family: Family) -> Result<Self> {
        Self::with_execution(family, Execution::default())
    }

    pub fn with_execution(family: Family, exec: Execution) -> Result<Self> {
        let family = family.validate()?;
        let dim = family.dim();
        let proto = Self {
            family,
            dim,
            d_basis: Vec::new(),
        };
        let basis: Vec<CVector> = (0..dim).map(|i| unit(dim, i)).collect();
        let d_basis = map_indexed(exec, dim * dim, |ab| {
            let (a, b) = (ab / dim, ab % dim);
            let mut m = CMatrix::zeros(dim, dim);
            for (c, ec) in basis.iter().enumerate() {
                m.set_column(c, &proto.triple_unchecked(&basis[a], &basis[b], ec));
            }
            m
        });
        Ok(Self { family, dim, d_basis })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.family.rank()
    }

    /// `D(e_a, e_b)` for coordinate basis vectors.
    pub fn d_basis(&self, a: usize, b: usize) -> &CMatrix {
        &self.d_basis[a * self.dim + b]
    }

    fn check(&self, v: &CVector) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: v.len(),
            });
        }
        Ok(())
    }

    /// `{x, y, z}` on coordinate vectors.
    pub fn triple(&self, x: &CVector, y: &CVector, z: &CVector) -> Result<CVector> {
        self.check(x)?;
        self.check(y)?;
        self.check(z)?;
        Ok(self.triple_unchecked(x, y, z))
    }

    fn triple_unchecked(&self, x: &CVector, y: &CVector, z: &CVector) -> CVector {
        match self.family {
            Family::I(..) | Family::II(_) | Family::III(_) | Family::Disc => {
                let (x, y, z) = (self.to_matrix(x), self.to_matrix(y), self.to_matrix(z));
                let yh = y.adjoint();
                let m = &x * &yh * &z + &z * &yh * &x;
                self.coords_of_matrix(&m)
            }
            Family::IV(_) => {
                let yb = y.map(|c| c.conj());
                z * bilinear_dot(x, &yb) + x * bilinear_dot(z, &yb) - yb * bilinear_dot(x, z)
            }
            Family::VI => {
                let m = |v: &CVector| AlbertMatrix::from_coords(v).expect("length checked");
                albert_triple(&m(x), &m(y), &m(z)).to_coords()
            }
            Family::V => {
                let m = |v: &CVector| AlbertMatrix::from_coords(&embed_v(v)).expect("length checked");
                let full = albert_triple(&m(x), &m(y), &m(z)).to_coords();
                full.rows_range(V_RANGE).into_owned()
            }
        }
    }

    /// `{x, y, z}` on model matrices of the matrix families (`I`, `II`,
    /// `III`, `D`). Inputs outside the model subspace are rejected.
    pub fn triple_matrices(&self, x: &CMatrix, y: &CMatrix, z: &CMatrix) -> Result<CMatrix> {
        let (x, y, z) = (
            self.coords_from_matrix(x)?,
            self.coords_from_matrix(y)?,
            self.coords_from_matrix(z)?,
        );
        Ok(self.to_matrix(&self.triple_unchecked(&x, &y, &z)))
    }

    /// `{x, y, z}` on Albert-algebra models (`V`, `VI`).
    pub fn triple_albert(&self, x: &AlbertMatrix, y: &AlbertMatrix, z: &AlbertMatrix) -> Result<AlbertMatrix> {
        let (x, y, z) = (
            self.coords_from_albert(x)?,
            self.coords_from_albert(y)?,
            self.coords_from_albert(z)?,
        );
        AlbertMatrix::from_coords(&self.embed_albert(&self.triple_unchecked(&x, &y, &z)))
    }

    fn embed_albert(&self, v: &CVector) -> CVector {
        match self.family {
            Family::V => embed_v(v),
            _ => v.clone(),
        }
    }

    /// Model matrix of a coordinate vector (matrix families only; `IV` gives
    /// a column vector).
    pub fn to_matrix(&self, x: &CVector) -> CMatrix {
        let s = real(std::f64::consts::FRAC_1_SQRT_2);
        match self.family {
            Family::I(p, q) => CMatrix::from_fn(p, q, |r, c| x[r * q + c]),
            Family::Disc => CMatrix::from_element(1, 1, x[0]),
            Family::II(n) => {
                let mut m = CMatrix::zeros(n, n);
                for (k, (i, j)) in skew_pairs(n).into_iter().enumerate() {
                    m[(i, j)] = x[k] * s;
                    m[(j, i)] = -x[k] * s;
                }
                m
            }
            Family::III(n) => {
                let mut m = CMatrix::zeros(n, n);
                for (k, (i, j)) in sym_pairs(n).into_iter().enumerate() {
                    if i == j {
                        m[(i, i)] = x[k];
                    } else {
                        m[(i, j)] = x[k] * s;
                        m[(j, i)] = x[k] * s;
                    }
                }
                m
            }
            Family::IV(_) | Family::V | Family::VI => CMatrix::from_column_slice(x.len(), 1, x.as_slice()),
        }
    }

    fn coords_of_matrix(&self, m: &CMatrix) -> CVector {
        let r2 = real(std::f64::consts::SQRT_2);
        match self.family {
            Family::I(_, q) => CVector::from_fn(self.dim, |k, _| m[(k / q, k % q)]),
            Family::Disc => CVector::from_element(1, m[(0, 0)]),
            Family::II(n) => CVector::from_iterator(self.dim, skew_pairs(n).into_iter().map(|(i, j)| m[(i, j)] * r2)),
            Family::III(n) => CVector::from_iterator(
                self.dim,
                sym_pairs(n)
                    .into_iter()
                    .map(|(i, j)| if i == j { m[(i, i)] } else { m[(i, j)] * r2 }),
            ),
            Family::IV(_) | Family::V | Family::VI => m.column(0).into_owned(),
        }
    }

    /// Coordinates of a model matrix, checking shape and symmetry type.
    pub fn coords_from_matrix(&self, m: &CMatrix) -> Result<CVector> {
        let shape = match self.family {
            Family::I(p, q) => (p, q),
            Family::II(n) | Family::III(n) => (n, n),
            Family::Disc => (1, 1),
            Family::IV(n) => (n, 1),
            Family::V | Family::VI => {
                return Err(Error::ModelViolation(format!(
                    "{} is modelled on Albert matrices",
                    self.family
                )))
            }
        };
        if m.shape() != shape {
            return Err(Error::DimensionMismatch {
                expected: shape.0 * shape.1,
                got: m.len(),
            });
        }
        let scale = m.norm().max(1.0);
        match self.family {
            Family::II(_) if (m + m.transpose()).norm() > MODEL_TOL * scale => {
                Err(Error::ModelViolation("type II expects a skew-symmetric matrix".into()))
            }
            Family::III(_) if (m - m.transpose()).norm() > MODEL_TOL * scale => {
                Err(Error::ModelViolation("type III expects a symmetric matrix".into()))
            }
            _ => Ok(self.coords_of_matrix(m)),
        }
    }

    /// Coordinates of an Albert matrix (`VI`), or of one supported on the
    /// Peirce ½-space of `E₁₁` (`V`).
    pub fn coords_from_albert(&self, m: &AlbertMatrix) -> Result<CVector> {
        m.validate(MODEL_TOL)?;
        let full = m.to_coords();
        match self.family {
            Family::VI => Ok(full),
            Family::V => {
                let outside: f64 = full
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !V_RANGE.contains(i))
                    .map(|(_, c)| c.norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                if outside > MODEL_TOL * m.norm().max(1.0) {
                    return Err(Error::ModelViolation("type V lives in the (0,1),(0,2) entries".into()));
                }
                Ok(full.rows_range(V_RANGE).into_owned())
            }
            _ => Err(Error::ModelViolation(format!(
                "{} is not an exceptional family",
                self.family
            ))),
        }
    }

    /// `D(x, y) : z ↦ {x, y, z}`, linear in `x`, conjugate-linear in `y`.
    pub fn d_op(&self, x: &CVector, y: &CVector) -> Result<CMatrix> {
        self.check(x)?;
        self.check(y)?;
        let n = self.dim;
        let mut out = CMatrix::zeros(n, n);
        for (a, xa) in x.iter().enumerate() {
            if *xa == C64::new(0.0, 0.0) {
                continue;
            }
            for (b, yb) in y.iter().enumerate() {
                let coef = xa * yb.conj();
                if coef != C64::new(0.0, 0.0) {
                    out.zip_apply(&self.d_basis[a * n + b], |o, d| *o += coef * d);
                }
            }
        }
        Ok(out)
    }

    /// `Q_x(y) = {x, y, x}`.
    pub fn q_op(&self, x: &CVector, y: &CVector) -> Result<CVector> {
        self.triple(x, y, x)
    }

    /// Matrix of the conjugate-linear map `Q_x` acting on conjugated
    /// coordinates: `Q_x(y) = M · ȳ`, column `b` is `{x, e_b, x}`.
    pub fn q_matrix(&self, x: &CVector) -> Result<CMatrix> {
        self.check(x)?;
        let n = self.dim;
        let mut out = CMatrix::zeros(n, n);
        for b in 0..n {
            let mut col = CVector::zeros(n);
            for (a, xa) in x.iter().enumerate() {
                if *xa != C64::new(0.0, 0.0) {
                    col += (&self.d_basis[a * n + b] * x) * *xa;
                }
            }
            out.set_column(b, &col);
        }
        Ok(out)
    }

    /// Jordan rank one: `x ≠ 0` and `Q_x(T) ⊆ ℂx`, decided by the operator
    /// norm of `Q_x` projected off `ℂx`, relative to the norm of `Q_x`.
    pub fn rank1_test(&self, x: &CVector, tol: f64) -> Result<bool> {
        self.check(x)?;
        let xn = x.norm();
        if xn < ZERO_EPS {
            return Ok(false);
        }
        let q = self.q_matrix(x)?;
        let xh = x / C64::new(xn, 0.0);
        let off = &q - &xh * (xh.adjoint() * &q);
        let full = singular_values(&q).first().copied().unwrap_or(0.0);
        if full == 0.0 {
            return Ok(false);
        }
        let rest = singular_values(&off).first().copied().unwrap_or(0.0);
        Ok(rest <= tol * full)
    }

    fn tripotent_candidates(&self) -> Vec<CVector> {
        let n = self.dim;
        let mut e = CVector::zeros(n);
        match self.family {
            Family::I(..) | Family::III(_) | Family::VI | Family::Disc => e[0] = real(1.0),
            // E₁₂ − E₂₁ in the √2-scaled skew coordinates
            Family::II(_) => e[0] = real(std::f64::consts::SQRT_2),
            Family::IV(_) => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                e[0] = real(s);
                if n > 1 {
                    e[1] = C64::new(0.0, s);
                }
            }
            Family::V => {
                // x₀₁ = 1 + i·e₁ (a null octonion), x₀₂ = 0
                e[0] = real(std::f64::consts::SQRT_2);
                e[1] = C64::new(0.0, std::f64::consts::SQRT_2);
                let mut alt = CVector::zeros(n);
                alt[0] = real(std::f64::consts::SQRT_2);
                return vec![e, alt];
            }
        }
        vec![e]
    }

    /// A minimal tripotent: `E₁₁` (I, III), `E₁₂ − E₂₁` (II),
    /// `(1, i, 0, …)/√2` (IV), `diag(1,0,0)` (VI), and for V the element with
    /// `x₀₁ = 1 + i·e₁`. The first candidate passing [`Self::rank1_test`] is
    /// returned.
    pub fn minimal_tripotent(&self) -> Tripotent {
        let candidates = self.tripotent_candidates();
        let element = candidates
            .iter()
            .find(|e| self.rank1_test(e, crate::DEFAULT_TOL_RANK).unwrap_or(false))
            .unwrap_or(&candidates[0])
            .clone();
        let cube = self.triple_unchecked(&element, &element, &element);
        let scale = element.dotc(&cube).re / element.norm_squared();
        Tripotent {
            element,
            scale,
            family: self.family,
        }
    }
}

fn unit(n: usize, i: usize) -> CVector {
    let mut v = CVector::zeros(n);
    v[i] = real(1.0);
    v
}

fn embed_v(v: &CVector) -> CVector {
    let mut full = CVector::zeros(ALBERT_DIM);
    full.rows_range_mut(V_RANGE).copy_from(v);
    full
}

/// Embeds type-V coordinates into the Albert coordinates.
pub fn embed_v_in_vi(v: &CVector) -> Result<CVector> {
    if v.len() != V_RANGE.len() {
        return Err(Error::DimensionMismatch {
            expected: V_RANGE.len(),
            got: v.len(),
        });
    }
    Ok(embed_v(v))
}
