//! Curvature-type tensors built from Jordan triple systems, product tensors
//! with prescribed off-diagonal blocks, holonomy samples, and the Schur
//! block-structure report for invariant tensors.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::jts::{Family, JordanTripleSystem};
use crate::par::{map_indexed, Execution};
use crate::sampling::{complex_gaussian_vector, gaussian, haar_special_orthogonal, haar_unitary, rng_for};
use crate::tensor_space::{block_of, column_basis, flatten, BlockSpace, CurvatureTypeTensor, GroupElementSample};
use crate::{CMatrix, CVector, Error, Result, C64};

/// How a triple system is turned into an operator on `T ⊗ T∨`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SigmaConvention {
    /// `σ(x ⊗ ȳ) = D(x, y)`.
    #[default]
    DType,
    /// `(σA)_{γδ} = Σ R_{αβγδ} A_{αβ}` with `R_{αβγδ} = ⟨{e_α,e_β,e_γ}, e_δ⟩`,
    /// i.e. the transpose of the D-type output. Same kernel as D-type;
    /// intertwines `Ad_g` on the input with `Ad_ḡ` on the output.
    FormType,
    /// `I − P_K` for an explicit kernel `K`; see [`sigma_projector`].
    Projector,
}

impl fmt::Display for SigmaConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SigmaConvention::DType => "D-type",
            SigmaConvention::FormType => "form-type",
            SigmaConvention::Projector => "projector",
        })
    }
}

impl FromStr for SigmaConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "d-type" | "dtype" | "d" => Ok(SigmaConvention::DType),
            "form-type" | "form" => Ok(SigmaConvention::FormType),
            "projector" => Ok(SigmaConvention::Projector),
            _ => Err(Error::ParseError(format!("unknown convention `{s}`"))),
        }
    }
}

/// Scalar pattern for the off-diagonal blocks `σ_{(i,j),(i,j)}`, `i ≠ j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum OffDiagonal {
    /// All zero: the direct sum `⊕ σᵢ`.
    #[default]
    Zero,
    /// All one.
    Identity,
}

impl FromStr for OffDiagonal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "zero" => Ok(OffDiagonal::Zero),
            "identity" => Ok(OffDiagonal::Identity),
            _ => Err(Error::ParseError(format!("unknown off-diagonal pattern `{s}`"))),
        }
    }
}

impl fmt::Display for OffDiagonal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OffDiagonal::Zero => "zero",
            OffDiagonal::Identity => "identity",
        })
    }
}

/// Factor list joined by `x` (whitespace allowed), e.g. `I(2,3)xIV(5)xD`.
pub fn parse_factors(s: &str) -> Result<Vec<Family>> {
    if s.trim().is_empty() {
        return Err(Error::ParseError("empty product spec".into()));
    }
    s.split('x').map(|f| f.parse::<Family>()).collect()
}

/// Factors plus the `k × k` matrix of off-diagonal scalars `s_{ij}`
/// (diagonal entries unused).
#[derive(Debug, Clone, PartialEq)]
pub struct ProductSpec {
    factors: Vec<Family>,
    offdiag: CMatrix,
}

impl ProductSpec {
    pub fn new(factors: Vec<Family>, offdiag: CMatrix) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::SpecError("a product needs at least one factor".into()));
        }
        let k = factors.len();
        if offdiag.shape() != (k, k) {
            return Err(Error::SpecError(format!(
                "off-diagonal matrix is {}x{}, expected {k}x{k}",
                offdiag.nrows(),
                offdiag.ncols()
            )));
        }
        for f in &factors {
            f.validate().map_err(|e| Error::SpecError(e.to_string()))?;
        }
        Ok(Self { factors, offdiag })
    }

    pub fn with_pattern(factors: Vec<Family>, pattern: OffDiagonal) -> Result<Self> {
        let k = factors.len();
        let fill = match pattern {
            OffDiagonal::Zero => 0.0,
            OffDiagonal::Identity => 1.0,
        };
        let offdiag = CMatrix::from_fn(k, k, |i, j| C64::new(if i == j { 0.0 } else { fill }, 0.0));
        Self::new(factors, offdiag)
    }

    pub fn parse(s: &str, pattern: OffDiagonal) -> Result<Self> {
        Self::with_pattern(parse_factors(s)?, pattern)
    }

    pub fn factors(&self) -> &[Family] {
        &self.factors
    }

    pub fn offdiag(&self, i: usize, j: usize) -> C64 {
        self.offdiag[(i, j)]
    }

    pub fn space(&self) -> BlockSpace {
        BlockSpace::new(self.factors.iter().map(|f| f.dim()).collect()).expect("factor dims are positive")
    }
}

impl fmt::Display for ProductSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|f| f.to_string()).collect();
        f.write_str(&parts.join("x"))
    }
}

/// D-type operator: column `a·n + b` is `flatten(D(e_a, e_b))`.
fn d_type_op(j: &JordanTripleSystem) -> CMatrix {
    let n = j.dim();
    let mut op = CMatrix::zeros(n * n, n * n);
    for a in 0..n {
        for b in 0..n {
            op.set_column(a * n + b, &flatten(j.d_basis(a, b)));
        }
    }
    op
}

fn transpose_rows(op: &CMatrix, n: usize) -> CMatrix {
    let mut out = op.clone();
    for g in 0..n {
        for d in 0..n {
            out.set_row(g * n + d, &op.row(d * n + g));
        }
    }
    out
}

/// The curvature-type tensor of one factor. The disc gets the identity.
pub fn sigma_from_jts(j: &JordanTripleSystem, convention: SigmaConvention) -> Result<CurvatureTypeTensor> {
    let n = j.dim();
    let space = BlockSpace::single(n)?;
    if j.family() == Family::Disc {
        return Ok(CurvatureTypeTensor::identity(space));
    }
    match convention {
        SigmaConvention::DType => CurvatureTypeTensor::new(d_type_op(j), space),
        SigmaConvention::FormType => CurvatureTypeTensor::new(transpose_rows(&d_type_op(j), n), space),
        SigmaConvention::Projector => Err(Error::UnsupportedConvention(
            "the projector convention needs an explicit kernel (use sigma_projector)".into(),
        )),
    }
}

/// `σ = I − P_K`, the orthogonal projector onto the complement of
/// `K = span(kernel)` (flattened tensors).
pub fn sigma_projector(space: BlockSpace, kernel: &[CVector], tol: f64) -> Result<CurvatureTypeTensor> {
    let n2 = space.total_dim() * space.total_dim();
    if let Some(v) = kernel.iter().find(|v| v.len() != n2) {
        return Err(Error::DimensionMismatch {
            expected: n2,
            got: v.len(),
        });
    }
    let mut op = CMatrix::identity(n2, n2);
    if !kernel.is_empty() {
        let k = CMatrix::from_columns(kernel);
        let q = column_basis(&k, tol);
        op -= &q * q.adjoint();
    }
    // numerical noise from I − QQ* when K is everything
    if op.norm() <= tol * (n2 as f64).sqrt() {
        return Err(Error::ZeroTensor);
    }
    CurvatureTypeTensor::new(op, space)
}

/// A product spec with the triple system of each factor built once.
#[derive(Debug, Clone)]
pub struct ProductSystem {
    spec: ProductSpec,
    systems: Vec<JordanTripleSystem>,
    space: BlockSpace,
}

impl ProductSystem {
    pub fn new(spec: ProductSpec) -> Result<Self> {
        let systems = spec
            .factors()
            .iter()
            .map(|&f| JordanTripleSystem::new(f))
            .collect::<Result<Vec<_>>>()?;
        let space = spec.space();
        Ok(Self { spec, systems, space })
    }

    pub fn spec(&self) -> &ProductSpec {
        &self.spec
    }

    pub fn systems(&self) -> &[JordanTripleSystem] {
        &self.systems
    }

    pub fn space(&self) -> &BlockSpace {
        &self.space
    }

    /// `σ` with `σ_{(i,i),(i,i)} = σᵢ`, `σ_{(i,j),(i,j)} = s_{ij}·Id` and all
    /// other blocks zero.
    pub fn sigma(&self, convention: SigmaConvention) -> Result<CurvatureTypeTensor> {
        let space = &self.space;
        let n = space.total_dim();
        let mut op = CMatrix::zeros(n * n, n * n);
        let k = space.num_blocks();
        for (i, j) in self.systems.iter().enumerate() {
            let local = sigma_from_jts(j, convention)?;
            let idx = space.pair_indices(i, i)?;
            for (a, &r) in idx.iter().enumerate() {
                for (b, &c) in idx.iter().enumerate() {
                    op[(r, c)] = local.op()[(a, b)];
                }
            }
        }
        for i in 0..k {
            for j in 0..k {
                if i == j {
                    continue;
                }
                let s = self.spec.offdiag(i, j);
                for r in space.pair_indices(i, j)? {
                    op[(r, r)] = s;
                }
            }
        }
        CurvatureTypeTensor::new(op, space.clone())
    }

    /// Block-diagonal holonomy sample; factor `i` draws from stream `i` of a
    /// generator seeded by `seed`.
    pub fn holonomy_sample(&self, seed: u64) -> GroupElementSample {
        let blocks: Vec<CMatrix> = self
            .systems
            .iter()
            .enumerate()
            .map(|(i, j)| factor_holonomy(j, &mut rng_for(seed, i as u64)))
            .collect();
        GroupElementSample::block_diagonal(self.space.clone(), &blocks).expect("factor samples are unitary")
    }

    /// `count` samples with seeds derived from `seed`, evaluated under `exec`.
    pub fn holonomy_samples(&self, seed: u64, count: usize, exec: Execution) -> Vec<GroupElementSample> {
        map_indexed(exec, count, |s| self.holonomy_sample(derive_seed(seed, s as u64)))
    }
}

/// Mixes a sample index into a seed (splitmix64 finaliser).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn assemble_product(spec: &ProductSpec, convention: SigmaConvention) -> Result<CurvatureTypeTensor> {
    ProductSystem::new(spec.clone())?.sigma(convention)
}

pub fn holonomy_sample(spec: &ProductSpec, seed: u64) -> Result<GroupElementSample> {
    Ok(ProductSystem::new(spec.clone())?.holonomy_sample(seed))
}

/// One isotropy element of a factor, as a unitary on its coordinates:
///
/// * `I(p,q)`: `x ↦ U x V*` with independent Haar `U`, `V`;
/// * `II(n)`, `III(n)`: `x ↦ U x Uᵀ`;
/// * `IV(n)`: `x ↦ e^{iθ} O x`, `O ∈ SO(n)`;
/// * `V`, `VI`: `exp` of a random combination of the anti-Hermitian
///   generators `D(u,v) − D(v,u)` and `i·D(u,u)`;
/// * disc: `e^{iθ}`.
pub fn factor_holonomy<R: Rng + ?Sized>(j: &JordanTripleSystem, rng: &mut R) -> CMatrix {
    let n = j.dim();
    match j.family() {
        Family::Disc => CMatrix::from_element(1, 1, phase(rng)),
        Family::I(p, q) => {
            let u = haar_unitary(rng, p);
            let v = haar_unitary(rng, q);
            u.kronecker(&v.map(|z| z.conj()))
        }
        Family::II(m) | Family::III(m) => {
            let u = haar_unitary(rng, m);
            let mut g = CMatrix::zeros(n, n);
            for c in 0..n {
                let mut e = CVector::zeros(n);
                e[c] = C64::new(1.0, 0.0);
                let image = &u * j.to_matrix(&e) * u.transpose();
                g.set_column(c, &j.coords_from_matrix(&image).expect("U x Uᵀ preserves the model"));
            }
            g
        }
        Family::IV(m) => {
            let o = haar_special_orthogonal(rng, m).map(|x| C64::new(x, 0.0));
            o * phase(rng)
        }
        Family::V | Family::VI => {
            let mut g = CMatrix::identity(n, n);
            for _ in 0..2 {
                g = isotropy_exponential(j, rng) * g;
            }
            g
        }
    }
}

fn phase<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
}

fn isotropy_exponential<R: Rng + ?Sized>(j: &JordanTripleSystem, rng: &mut R) -> CMatrix {
    let n = j.dim();
    let mut x = CMatrix::zeros(n, n);
    for _ in 0..3 {
        let u = complex_gaussian_vector(rng, n);
        let v = complex_gaussian_vector(rng, n);
        let w = complex_gaussian_vector(rng, n);
        let duv = j.d_op(&u, &v).expect("dims match");
        let dvu = j.d_op(&v, &u).expect("dims match");
        let dww = j.d_op(&w, &w).expect("dims match");
        x += (duv - dvu) * C64::new(gaussian(rng), 0.0) + dww * C64::new(0.0, gaussian(rng));
    }
    // symmetrise away rounding so the exponential is unitary to working precision
    let x = (&x - x.adjoint()) * C64::new(0.5, 0.0);
    let scale = rng.random_range(0.5..std::f64::consts::PI) / x.norm().max(f64::MIN_POSITIVE) * (n as f64).sqrt();
    (x * C64::new(scale, 0.0)).exp()
}

/// Classification of one block of an operator on a product space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BlockKind {
    /// Norm at most `tol`.
    CrossZero,
    /// Within `tol` of `c·Id` (only reported for blocks mapping a pair space
    /// to itself).
    ScalarId,
    General,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockReport {
    pub source: (usize, usize),
    pub target: (usize, usize),
    pub kind: BlockKind,
    pub norm: f64,
    /// `‖B − c·Id‖` for same-pair blocks, `‖B‖` otherwise.
    pub deviation: f64,
    pub scalar: Option<(f64, f64)>,
}

impl BlockReport {
    /// `(i,i) → (i,i)` blocks may be arbitrary.
    pub fn is_diagonal_pair(&self) -> bool {
        self.source == self.target && self.source.0 == self.source.1
    }

    pub fn is_cross(&self) -> bool {
        self.source != self.target
    }

    pub fn is_violation(&self) -> bool {
        self.kind == BlockKind::General && !self.is_diagonal_pair()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureReport {
    pub tol: f64,
    pub blocks: Vec<BlockReport>,
}

impl StructureReport {
    pub fn violations(&self) -> impl Iterator<Item = &BlockReport> {
        self.blocks.iter().filter(|b| b.is_violation())
    }

    pub fn is_schur(&self) -> bool {
        self.violations().next().is_none()
    }

    pub fn max_cross_norm(&self) -> f64 {
        self.blocks
            .iter()
            .filter(|b| b.is_cross())
            .map(|b| b.norm)
            .fold(0.0, f64::max)
    }

    /// Largest `‖B − c·Id‖` over off-diagonal pair blocks `(i,j)→(i,j)`, `i ≠ j`.
    pub fn max_scalar_deviation(&self) -> f64 {
        self.blocks
            .iter()
            .filter(|b| !b.is_cross() && !b.is_diagonal_pair())
            .map(|b| b.deviation)
            .fold(0.0, f64::max)
    }

    /// `c` of the `(i,j) → (i,j)` block, if scalar.
    pub fn scalar_of(&self, i: usize, j: usize) -> Option<C64> {
        self.blocks
            .iter()
            .find(|b| b.source == (i, j) && b.target == (i, j))
            .and_then(|b| b.scalar)
            .map(|(re, im)| C64::new(re, im))
    }
}

/// Block-by-block report against the Schur pattern: cross blocks zero,
/// off-diagonal pair blocks scalar. Norms are absolute Frobenius norms.
pub fn schur_structure(op: &CMatrix, space: &BlockSpace, tol: f64) -> Result<StructureReport> {
    let k = space.num_blocks();
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).collect();
    let mut blocks = Vec::with_capacity(pairs.len() * pairs.len());
    for &source in &pairs {
        for &target in &pairs {
            let b = block_of(op, space, source, target)?;
            let norm = b.norm();
            let report = if source != target {
                let kind = if norm <= tol {
                    BlockKind::CrossZero
                } else {
                    BlockKind::General
                };
                BlockReport {
                    source,
                    target,
                    kind,
                    norm,
                    deviation: norm,
                    scalar: None,
                }
            } else {
                let d = b.nrows();
                let c = b.trace() / C64::new(d as f64, 0.0);
                let deviation = (&b - CMatrix::identity(d, d) * c).norm();
                let scalar = deviation <= tol;
                BlockReport {
                    source,
                    target,
                    kind: if scalar {
                        BlockKind::ScalarId
                    } else {
                        BlockKind::General
                    },
                    norm,
                    deviation,
                    scalar: scalar.then_some((c.re, c.im)),
                }
            };
            blocks.push(report);
        }
    }
    Ok(StructureReport { tol, blocks })
}

/// Component of a `(i,i) → (h,h)` block along the invariant map
/// `A ↦ tr(A)·I_h`, and the norm of what remains.
pub fn trace_coupling(block: &CMatrix, source_dim: usize, target_dim: usize) -> (C64, f64) {
    let ident = |d: usize| flatten(&CMatrix::identity(d, d));
    let unit =
        ident(target_dim) * ident(source_dim).transpose() / C64::new(((source_dim * target_dim) as f64).sqrt(), 0.0);
    let coef: C64 = unit.iter().zip(block.iter()).map(|(u, b)| u.conj() * b).sum();
    let rest = (block - unit * coef).norm();
    (coef, rest)
}
