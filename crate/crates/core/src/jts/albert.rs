//! The complexified Albert algebra: 3×3 octonion-Hermitian matrices with
//! complex coefficients and the Jordan product `x∘y = (xy + yx)/2`.
//!
//! Coordinates (27 of them, orthonormal for the trace form `tr(x∘ȳ)`):
//! indices `0..3` are the diagonal entries, then for each off-diagonal pair in
//! [`PAIRS`] order come the 8 octonion components of the upper entry, scaled
//! by `√2`.

use super::octonion::Octonion;
use crate::{CVector, Error, Result, C64};

pub type ComplexOctonion = Octonion<C64>;

/// Upper-triangular positions, in coordinate order.
pub const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

pub const ALBERT_DIM: usize = 27;

/// Coordinate offset of off-diagonal pair `p`.
pub fn pair_offset(p: usize) -> usize {
    3 + 8 * p
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlbertMatrix {
    pub entries: [[ComplexOctonion; 3]; 3],
}

impl AlbertMatrix {
    pub fn zero() -> Self {
        Self {
            entries: [[ComplexOctonion::zero(); 3]; 3],
        }
    }

    pub fn from_coords(x: &CVector) -> Result<Self> {
        if x.len() != ALBERT_DIM {
            return Err(Error::DimensionMismatch {
                expected: ALBERT_DIM,
                got: x.len(),
            });
        }
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let mut m = Self::zero();
        for i in 0..3 {
            m.entries[i][i] = ComplexOctonion::scalar(x[i]);
        }
        for (p, &(i, j)) in PAIRS.iter().enumerate() {
            let o = ComplexOctonion::new(std::array::from_fn(|k| x[pair_offset(p) + k] * s));
            m.entries[i][j] = o;
            m.entries[j][i] = o.conj();
        }
        Ok(m)
    }

    /// Reads coordinates from the diagonal scalars and the upper triangle.
    pub fn to_coords(&self) -> CVector {
        let r2 = C64::new(std::f64::consts::SQRT_2, 0.0);
        let mut x = CVector::zeros(ALBERT_DIM);
        for i in 0..3 {
            x[i] = self.entries[i][i].re();
        }
        for (p, &(i, j)) in PAIRS.iter().enumerate() {
            for k in 0..8 {
                x[pair_offset(p) + k] = self.entries[i][j].coords[k] * r2;
            }
        }
        x
    }

    /// Size of the deviation from octonion-Hermitian form.
    pub fn hermitian_defect(&self) -> f64 {
        let mut d = 0.0;
        for i in 0..3 {
            d += self.entries[i][i].coords[1..].iter().map(|c| c.norm_sqr()).sum::<f64>();
            for j in 0..3 {
                if i != j {
                    let diff = self.entries[j][i] - self.entries[i][j].conj();
                    d += diff.coords.iter().map(|c| c.norm_sqr()).sum::<f64>();
                }
            }
        }
        d.sqrt()
    }

    pub fn norm(&self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .flat_map(|o| o.coords.iter())
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let defect = self.hermitian_defect();
        if defect > tol * self.norm().max(1.0) {
            return Err(Error::ModelViolation(format!(
                "matrix is not octonion-Hermitian (defect {defect:e})"
            )));
        }
        Ok(())
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        let mut out = Self::zero();
        for i in 0..3 {
            for k in 0..3 {
                let mut acc = ComplexOctonion::zero();
                for j in 0..3 {
                    acc = acc + self.entries[i][j] * rhs.entries[j][k];
                }
                out.entries[i][k] = acc;
            }
        }
        out
    }

    /// `x∘y = (xy + yx)/2`.
    pub fn jordan(&self, rhs: &Self) -> Self {
        let a = self.matmul(rhs);
        let b = rhs.matmul(self);
        let half = C64::new(0.5, 0.0);
        let mut out = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                out.entries[i][j] = (a.entries[i][j] + b.entries[i][j]).scale(half);
            }
        }
        out
    }

    /// Complex conjugation of every coefficient (the compact real form's
    /// involution).
    pub fn conj_coeffs(&self) -> Self {
        let mut out = *self;
        for row in out.entries.iter_mut() {
            for o in row.iter_mut() {
                *o = o.map(|c| c.conj());
            }
        }
        out
    }

    fn combine(&self, rhs: &Self, sign: f64) -> Self {
        let mut out = *self;
        for i in 0..3 {
            for j in 0..3 {
                out.entries[i][j] = out.entries[i][j] + rhs.entries[i][j].scale(C64::new(sign, 0.0));
            }
        }
        out
    }
}

/// `{x,y,z} = (x∘ȳ)∘z + (z∘ȳ)∘x − (x∘z)∘ȳ`.
pub fn albert_triple(x: &AlbertMatrix, y: &AlbertMatrix, z: &AlbertMatrix) -> AlbertMatrix {
    let yb = y.conj_coeffs();
    let a = x.jordan(&yb).jordan(z);
    let b = z.jordan(&yb).jordan(x);
    let c = x.jordan(z).jordan(&yb);
    a.combine(&b, 1.0).combine(&c, -1.0)
}
