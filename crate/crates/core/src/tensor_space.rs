//! Block-decomposed tangent spaces `T = T₁ ⊕ … ⊕ T_k` and operators on
//! `T ⊗ T∨`.
//!
//! Conventions fixed here and relied on everywhere else:
//!
//! * the inner product is the standard Hermitian one in the coordinate basis;
//! * `T∨` is identified with conjugated coordinates, so `t ⊗ t∨` is the
//!   ordinary outer product matrix and `g` acts by `A ↦ g A g*`;
//! * an `n × n` matrix `A` is flattened row-major: entry `(α, β)` sits at
//!   index `α·n + β` (0-based). Serialized operators use the same layout.

use std::ops::Range;

use nalgebra::SVD;
use serde::{Deserialize, Serialize};

use crate::par::{map_indexed, Execution};
use crate::{CMatrix, CVector, Error, Result, C64};

/// Vectors with norm below this are treated as zero inputs.
pub const ZERO_EPS: f64 = 1e-14;

/// Tangent space split into blocks of the given dimensions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSpace {
    block_dims: Vec<usize>,
    offsets: Vec<usize>,
    total_dim: usize,
}

impl BlockSpace {
    pub fn new(block_dims: Vec<usize>) -> Result<Self> {
        if block_dims.is_empty() {
            return Err(Error::SpecError("a block space needs at least one block".into()));
        }
        if let Some(pos) = block_dims.iter().position(|&d| d == 0) {
            return Err(Error::SpecError(format!("block {pos} has dimension 0")));
        }
        let mut offsets = Vec::with_capacity(block_dims.len());
        let mut acc = 0;
        for &d in &block_dims {
            offsets.push(acc);
            acc += d;
        }
        Ok(Self {
            block_dims,
            offsets,
            total_dim: acc,
        })
    }

    pub fn single(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn num_blocks(&self) -> usize {
        self.block_dims.len()
    }

    fn check_block(&self, i: usize) -> Result<()> {
        if i < self.num_blocks() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: i,
                blocks: self.num_blocks(),
            })
        }
    }

    /// Coordinate range of block `i` (0-based).
    pub fn block_range(&self, i: usize) -> Range<usize> {
        self.offsets[i]..self.offsets[i] + self.block_dims[i]
    }

    /// Flattened indices of `T_i ⊗ T_j∨`, in local row-major order.
    pub fn pair_indices(&self, i: usize, j: usize) -> Result<Vec<usize>> {
        self.check_block(i)?;
        self.check_block(j)?;
        let n = self.total_dim;
        let mut out = Vec::with_capacity(self.block_dims[i] * self.block_dims[j]);
        for a in self.block_range(i) {
            for b in self.block_range(j) {
                out.push(a * n + b);
            }
        }
        Ok(out)
    }

    /// Block `i` of a coordinate vector.
    pub fn project(&self, v: &CVector, i: usize) -> CVector {
        v.rows_range(self.block_range(i)).into_owned()
    }

    /// Embeds a block vector into the whole space (zeros elsewhere).
    pub fn embed(&self, block: &CVector, i: usize) -> CVector {
        let mut out = CVector::zeros(self.total_dim);
        out.rows_range_mut(self.block_range(i)).copy_from(block);
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    pub coords: CVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Covector {
    pub coords: CVector,
}

impl TangentVector {
    pub fn new(coords: CVector) -> Self {
        Self { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Metric dual: conjugated coordinates.
    pub fn dual(&self) -> Covector {
        Covector {
            coords: self.coords.map(|z| z.conj()),
        }
    }
}

impl Covector {
    pub fn new(coords: CVector) -> Self {
        Self { coords }
    }

    pub fn dual(&self) -> TangentVector {
        TangentVector {
            coords: self.coords.map(|z| z.conj()),
        }
    }

    pub fn apply(&self, z: &CVector) -> C64 {
        self.coords.iter().zip(z.iter()).map(|(f, z)| f * z).sum()
    }
}

/// Element of `T ⊗ T∨`, stored as an `n × n` matrix acting by `z ↦ A z`.
#[derive(Debug, Clone, PartialEq)]
pub struct EndTensor {
    pub entries: CMatrix,
}

impl EndTensor {
    pub fn new(entries: CMatrix) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::DimensionMismatch {
                expected: entries.nrows(),
                got: entries.ncols(),
            });
        }
        Ok(Self { entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Row-major flattening, index `α·n + β`.
    pub fn flatten(&self) -> CVector {
        flatten(&self.entries)
    }

    pub fn from_flat(n: usize, flat: &CVector) -> Result<Self> {
        Ok(Self {
            entries: unflatten(n, flat)?,
        })
    }
}

pub fn flatten(m: &CMatrix) -> CVector {
    let (r, c) = m.shape();
    CVector::from_fn(r * c, |k, _| m[(k / c, k % c)])
}

pub fn unflatten(n: usize, flat: &CVector) -> Result<CMatrix> {
    if flat.len() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            got: flat.len(),
        });
    }
    Ok(CMatrix::from_fn(n, n, |a, b| flat[a * n + b]))
}

/// The rank-one tensor `t ⊗ f`, entries `A[α][β] = t[α]·f[β]`.
pub fn rank1(t: &TangentVector, f: &Covector) -> Result<EndTensor> {
    if t.dim() != f.coords.len() {
        return Err(Error::DimensionMismatch {
            expected: t.dim(),
            got: f.coords.len(),
        });
    }
    if t.coords.norm() < ZERO_EPS || f.coords.norm() < ZERO_EPS {
        return Err(Error::ZeroInput);
    }
    Ok(EndTensor {
        entries: &t.coords * f.coords.transpose(),
    })
}

/// Nonzero operator on flattened `T ⊗ T∨`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureTypeTensor {
    op: CMatrix,
    space: BlockSpace,
}

impl CurvatureTypeTensor {
    pub fn new(op: CMatrix, space: BlockSpace) -> Result<Self> {
        let n2 = space.total_dim() * space.total_dim();
        if op.nrows() != n2 || op.ncols() != n2 {
            return Err(Error::DimensionMismatch {
                expected: n2,
                got: op.nrows().max(op.ncols()),
            });
        }
        if op.iter().all(|z| *z == C64::new(0.0, 0.0)) {
            return Err(Error::ZeroTensor);
        }
        Ok(Self { op, space })
    }

    pub fn identity(space: BlockSpace) -> Self {
        let n2 = space.total_dim() * space.total_dim();
        Self {
            op: CMatrix::identity(n2, n2),
            space,
        }
    }

    pub fn op(&self) -> &CMatrix {
        &self.op
    }

    pub fn space(&self) -> &BlockSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.total_dim()
    }

    pub fn apply(&self, a: &EndTensor) -> Result<EndTensor> {
        if a.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: a.dim(),
            });
        }
        EndTensor::from_flat(self.dim(), &(&self.op * a.flatten()))
    }

    pub fn into_op(self) -> CMatrix {
        self.op
    }

    pub fn to_json(&self) -> OperatorJson {
        let rows =
            |f: fn(&C64) -> f64| -> Vec<Vec<f64>> { self.op.row_iter().map(|r| r.iter().map(f).collect()).collect() };
        OperatorJson {
            n: self.dim(),
            blocks: self.space.block_dims().to_vec(),
            re: rows(|z| z.re),
            im: rows(|z| z.im),
        }
    }

    pub fn from_json(json: &OperatorJson) -> Result<Self> {
        let space = BlockSpace::new(json.blocks.clone())?;
        if space.total_dim() != json.n {
            return Err(Error::DimensionMismatch {
                expected: json.n,
                got: space.total_dim(),
            });
        }
        let n2 = json.n * json.n;
        let shape_ok = |m: &Vec<Vec<f64>>| m.len() == n2 && m.iter().all(|r| r.len() == n2);
        if !shape_ok(&json.re) || !shape_ok(&json.im) {
            return Err(Error::DimensionMismatch {
                expected: n2,
                got: json.re.len(),
            });
        }
        let op = CMatrix::from_fn(n2, n2, |r, c| C64::new(json.re[r][c], json.im[r][c]));
        Self::new(op, space)
    }
}

/// Wire format of an operator: row-major `n² × n²` real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorJson {
    pub n: usize,
    pub blocks: Vec<usize>,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

/// Singular values, largest first.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Number of singular values above `tol · σ_max`.
pub fn numerical_rank(m: &CMatrix, tol: f64) -> usize {
    let sv = singular_values(m);
    match sv.first() {
        Some(&smax) if smax > 0.0 => sv.iter().filter(|&&s| s > tol * smax).count(),
        _ => 0,
    }
}

/// Orthonormal basis of the numerical null space `{v : M v ≈ 0}`; singular
/// values `≤ tol · σ_max` count as zero.
pub fn null_space(m: &CMatrix, tol: f64) -> Vec<CVector> {
    let (rows, cols) = m.shape();
    if cols == 0 {
        return Vec::new();
    }
    let padded;
    let m = if rows < cols {
        padded = m.clone().resize_vertically(cols, C64::new(0.0, 0.0));
        &padded
    } else {
        m
    };
    let svd = SVD::new(m.clone(), false, true);
    let v_t = svd.v_t.expect("right singular vectors were requested");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= tol * smax || smax == 0.0)
        .map(|(i, _)| v_t.row(i).adjoint())
        .collect()
}

/// Orthonormal basis of the column span, rank decided at `tol` relative.
pub fn column_basis(m: &CMatrix, tol: f64) -> CMatrix {
    if m.ncols() == 0 || m.nrows() == 0 {
        return CMatrix::zeros(m.nrows(), 0);
    }
    let svd = SVD::new(m.clone(), true, false);
    let u = svd.u.expect("left singular vectors were requested");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| smax > 0.0 && svd.singular_values[i] > tol * smax)
        .collect();
    u.select_columns(keep.iter())
}

/// Orthonormal basis of the numerical kernel of `σ`, as tensors.
pub fn kernel_basis(sigma: &CurvatureTypeTensor, tol: f64) -> Vec<EndTensor> {
    let n = sigma.dim();
    null_space(sigma.op(), tol)
        .into_iter()
        .map(|v| EndTensor::from_flat(n, &v).expect("kernel vectors have length n²"))
        .collect()
}

/// The block `σ_{(i,j),(h,k)} : T_i ⊗ T_j∨ → T_h ⊗ T_k∨` (0-based block
/// indices), as an `(n_h n_k) × (n_i n_j)` array.
pub fn block_component(sigma: &CurvatureTypeTensor, source: (usize, usize), target: (usize, usize)) -> Result<CMatrix> {
    block_of(sigma.op(), sigma.space(), source, target)
}

/// Same as [`block_component`] for a bare operator on a block space.
pub fn block_of(op: &CMatrix, space: &BlockSpace, source: (usize, usize), target: (usize, usize)) -> Result<CMatrix> {
    let cols = space.pair_indices(source.0, source.1)?;
    let rows = space.pair_indices(target.0, target.1)?;
    Ok(op.select_rows(rows.iter()).select_columns(cols.iter()))
}

/// Block-diagonal unitary acting on a [`BlockSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElementSample {
    matrix: CMatrix,
    space: BlockSpace,
}

/// Allowed deviation from unitarity.
pub const UNITARITY_TOL: f64 = 1e-10;

impl GroupElementSample {
    /// Validates unitarity and exact block-diagonality.
    pub fn new(matrix: CMatrix, space: BlockSpace) -> Result<Self> {
        let n = space.total_dim();
        if matrix.shape() != (n, n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: matrix.nrows(),
            });
        }
        let zero = C64::new(0.0, 0.0);
        for i in 0..space.num_blocks() {
            for j in 0..space.num_blocks() {
                if i == j {
                    continue;
                }
                for r in space.block_range(i) {
                    for c in space.block_range(j) {
                        if matrix[(r, c)] != zero {
                            return Err(Error::StructureError(format!(
                                "group element has a nonzero entry at ({r}, {c}) between blocks {i} and {j}"
                            )));
                        }
                    }
                }
            }
        }
        let err = (matrix.adjoint() * &matrix - CMatrix::identity(n, n)).norm();
        if err > UNITARITY_TOL {
            return Err(Error::StructureError(format!(
                "group element is not unitary: ‖g*g − I‖ = {err:e}"
            )));
        }
        Ok(Self { matrix, space })
    }

    pub fn identity(space: BlockSpace) -> Self {
        let n = space.total_dim();
        Self {
            matrix: CMatrix::identity(n, n),
            space,
        }
    }

    /// Assembles per-block unitaries into one block-diagonal element.
    pub fn block_diagonal(space: BlockSpace, blocks: &[CMatrix]) -> Result<Self> {
        if blocks.len() != space.num_blocks() {
            return Err(Error::DimensionMismatch {
                expected: space.num_blocks(),
                got: blocks.len(),
            });
        }
        let n = space.total_dim();
        let mut m = CMatrix::zeros(n, n);
        for (i, b) in blocks.iter().enumerate() {
            let d = space.block_dims()[i];
            if b.shape() != (d, d) {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: b.nrows(),
                });
            }
            let r = space.block_range(i);
            m.view_mut((r.start, r.start), (d, d)).copy_from(b);
        }
        Self::new(m, space)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn space(&self) -> &BlockSpace {
        &self.space
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        &self.matrix * v
    }
}

/// Matrix of `Ad_g : A ↦ g A g*` on row-major flattened `T ⊗ T∨`, which is
/// `g ⊗ ḡ`.
pub fn adjoint_action(g: &CMatrix) -> CMatrix {
    g.kronecker(&g.map(|z| z.conj()))
}

/// `‖σ∘Ad_g − Ad_g∘σ‖_F / ‖σ‖_F`.
pub fn invariance_residual(sigma: &CurvatureTypeTensor, g: &GroupElementSample) -> Result<f64> {
    if g.space().total_dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: sigma.dim(),
            got: g.space().total_dim(),
        });
    }
    let op = sigma.op();
    let g = g.matrix();
    // σ∘Ad_g = (Ad_{g*}∘σ*)*
    let right = ad_columns(&g.adjoint(), &op.adjoint()).adjoint();
    let left = ad_columns(g, op);
    Ok((right - left).norm() / op.norm())
}

/// `Ad_g ∘ M`, applying `X ↦ g X g*` to each column of `M` reshaped to
/// `n × n`; `O(n⁵)` instead of the `O(n⁶)` Kronecker product.
fn ad_columns(g: &CMatrix, m: &CMatrix) -> CMatrix {
    let n = g.nrows();
    let g_adj = g.adjoint();
    let mut out = CMatrix::zeros(m.nrows(), m.ncols());
    for c in 0..m.ncols() {
        let x = CMatrix::from_row_iterator(n, n, m.column(c).iter().copied());
        let y = g * x * &g_adj;
        out.set_column(c, &flatten(&y));
    }
    out
}

const AVERAGE_CHUNK: usize = 32;

/// Empirical Haar average `(1/N) Σ Ad_g⁻¹ ∘ A ∘ Ad_g`.
///
/// Summation is chunked in a fixed order so that the result does not depend
/// on the execution strategy.
pub fn group_average(op: &CMatrix, samples: &[GroupElementSample], exec: Execution) -> Result<CMatrix> {
    if samples.is_empty() {
        return Err(Error::InconclusiveSample(
            "group average needs at least one sample".into(),
        ));
    }
    group_average_with(op, samples.len(), exec, |i| samples[i].clone())
}

/// Like [`group_average`] but draws sample `i` lazily from `sampler(i)`.
pub fn group_average_with<F>(op: &CMatrix, count: usize, exec: Execution, sampler: F) -> Result<CMatrix>
where
    F: Fn(usize) -> GroupElementSample + Sync + Send,
{
    if count == 0 {
        return Err(Error::InconclusiveSample(
            "group average needs at least one sample".into(),
        ));
    }
    let n2 = op.nrows();
    if !op.is_square() {
        return Err(Error::DimensionMismatch {
            expected: n2,
            got: op.ncols(),
        });
    }
    let chunks = count.div_ceil(AVERAGE_CHUNK);
    let partials: Vec<Result<CMatrix>> = map_indexed(exec, chunks, |c| {
        let mut acc = CMatrix::zeros(n2, n2);
        for i in c * AVERAGE_CHUNK..((c + 1) * AVERAGE_CHUNK).min(count) {
            let g = sampler(i);
            let d = g.space().total_dim();
            if d * d != n2 {
                return Err(Error::DimensionMismatch {
                    expected: n2,
                    got: d * d,
                });
            }
            let ad = adjoint_action(g.matrix());
            acc += ad.adjoint() * op * ad;
        }
        Ok(acc)
    });
    let mut total = CMatrix::zeros(n2, n2);
    for p in partials {
        total += p?;
    }
    Ok(total / C64::new(count as f64, 0.0))
}
