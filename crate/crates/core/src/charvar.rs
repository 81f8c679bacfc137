//! Characteristic cones of curvature-type tensors: first-cone membership,
//! dimensions of Jordan rank-one cones, component decomposition of product
//! tensors, translation subspaces, the join singularity probe and the
//! higher-level filtration.

use nalgebra::SVD;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::curvature::{factor_holonomy, schur_structure, sigma_projector, ProductSpec, ProductSystem};
use crate::jts::{Family, JordanTripleSystem};
use crate::par::{map_indexed, Execution};
use crate::sampling::{complex_gaussian, complex_gaussian_vector, rng_for};
use crate::tensor_space::{
    block_of, column_basis, flatten, kernel_basis, numerical_rank, BlockSpace, CurvatureTypeTensor, ZERO_EPS,
};
use crate::{CMatrix, CVector, Error, Result, C64, DEFAULT_SEED, DEFAULT_TOL_JAC, DEFAULT_TOL_RANK};

/// What a component looks like on one factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BlockFlag {
    /// The whole factor `Tᵢ`.
    Full,
    /// Only the origin.
    Zero,
    /// The factor's own first cone.
    Cone,
}

/// One component `CS(j)` of the first characteristic cone of a product.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacteristicCone {
    pub component_index: usize,
    pub block_dims: Vec<usize>,
    pub block_flags: Vec<BlockFlag>,
    /// Points on the component (never the origin).
    pub witnesses: Vec<CVector>,
    /// Affine dimension of the cone on the flagged factor (0 for `Zero`).
    pub cone_dim: usize,
    /// `Σ_{Full} nᵢ + cone_dim`.
    pub affine_dim: usize,
}

impl CharacteristicCone {
    /// Projective dimension; `-1` for the cone `{0}`.
    pub fn proj_dim(&self) -> i64 {
        self.affine_dim as i64 - 1
    }

    pub fn full_blocks(&self) -> Vec<usize> {
        (0..self.block_flags.len())
            .filter(|&i| self.block_flags[i] == BlockFlag::Full)
            .collect()
    }

    pub fn summary(&self) -> ComponentSummary {
        ComponentSummary {
            component: self.component_index,
            flags: self.block_flags.clone(),
            cone_dim: self.cone_dim,
            affine_dim: self.affine_dim,
            proj_dim: self.proj_dim(),
            witness_count: self.witnesses.len(),
        }
    }
}

/// Serializable view of a [`CharacteristicCone`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentSummary {
    pub component: usize,
    pub flags: Vec<BlockFlag>,
    pub cone_dim: usize,
    pub affine_dim: usize,
    pub proj_dim: i64,
    pub witness_count: usize,
}

/// Thresholds, seed and sample counts shared by the sampling routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeOptions {
    pub tol_rank: f64,
    pub tol_jac: f64,
    pub seed: u64,
    pub witnesses: usize,
    pub exec: Execution,
}

impl Default for ConeOptions {
    fn default() -> Self {
        Self {
            tol_rank: DEFAULT_TOL_RANK,
            tol_jac: DEFAULT_TOL_JAC,
            seed: DEFAULT_SEED,
            witnesses: 8,
            exec: Execution::default(),
        }
    }
}

fn check_nonzero(x: &CVector) -> Result<()> {
    if x.norm() < ZERO_EPS {
        return Err(Error::ZeroInput);
    }
    Ok(())
}

/// `L_x : f ↦ σ(x ⊗ f)` as an `n² × n` array.
fn l_matrix(sigma: &CurvatureTypeTensor, x: &CVector) -> Result<CMatrix> {
    let n = sigma.dim();
    if x.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: x.len(),
        });
    }
    let op = sigma.op();
    let mut l = CMatrix::zeros(n * n, n);
    for (a, xa) in x.iter().enumerate() {
        if *xa == C64::new(0.0, 0.0) {
            continue;
        }
        for b in 0..n {
            l.column_mut(b).axpy(*xa, &op.column(a * n + b), C64::new(1.0, 0.0));
        }
    }
    Ok(l)
}

/// Smallest singular value of `L_x` relative to the largest, with the
/// corresponding covector.
pub fn first_cone_residual(sigma: &CurvatureTypeTensor, x: &CVector) -> Result<(f64, CVector)> {
    check_nonzero(x)?;
    let l = l_matrix(sigma, x)?;
    let svd = SVD::new(l, false, true);
    let v_t = svd.v_t.expect("right singular vectors were requested");
    let sv = &svd.singular_values;
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let (imin, smin) =
        sv.iter()
            .copied()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (i, s)| if s < acc.1 { (i, s) } else { acc });
    let ratio = if smax == 0.0 { 0.0 } else { smin / smax };
    Ok((ratio, v_t.row(imin).adjoint()))
}

/// Whether some nonzero covector `f` has `x ⊗ f ∈ ker σ`.
pub fn first_cone_contains(sigma: &CurvatureTypeTensor, x: &CVector, tol: f64) -> Result<bool> {
    Ok(first_cone_residual(sigma, x)?.0 <= tol)
}

/// Both estimates of the affine dimension of the Jordan rank-one cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeDimension {
    /// `dim span({e} ∪ {D(e_a, e_b) e})`.
    pub orbit_span: usize,
    /// `n − rank` of the Jacobian of the rank-one equations at `e`.
    pub minor_jacobian: usize,
}

/// `M[:, b] = {x, e_b, x}` and the cubic equations
/// `M[α,b]·x[β] − M[β,b]·x[α]`, `α < β`, whose common zeros are the
/// points with `Q_x(T) ⊆ ℂx`.
pub fn rank1_equations(j: &JordanTripleSystem, x: &CVector) -> Result<CVector> {
    let n = j.dim();
    let m = j.q_matrix(x)?;
    let mut out = Vec::with_capacity(n * n * n.saturating_sub(1) / 2);
    for b in 0..n {
        for a in 0..n {
            for c in a + 1..n {
                out.push(m[(a, b)] * x[c] - m[(c, b)] * x[a]);
            }
        }
    }
    Ok(CVector::from_vec(out))
}

/// Holomorphic Jacobian of [`rank1_equations`] at `x`, one column per
/// coordinate.
pub fn rank1_jacobian(j: &JordanTripleSystem, x: &CVector) -> Result<CMatrix> {
    let n = j.dim();
    let m = j.q_matrix(x)?;
    // dm[c][:, b] = ∂M[:, b]/∂x_c = 2{e_c, e_b, x}
    let two = C64::new(2.0, 0.0);
    let dm: Vec<CMatrix> = (0..n)
        .map(|c| {
            let mut p = CMatrix::zeros(n, n);
            for b in 0..n {
                p.set_column(b, &((j.d_basis(c, b) * x) * two));
            }
            p
        })
        .collect();
    let rows = n * n * n.saturating_sub(1) / 2;
    let mut jac = CMatrix::zeros(rows, n);
    let mut r = 0;
    for b in 0..n {
        for a in 0..n {
            for c2 in a + 1..n {
                for (c, p) in dm.iter().enumerate() {
                    let mut v = p[(a, b)] * x[c2] - p[(c2, b)] * x[a];
                    if c == c2 {
                        v += m[(a, b)];
                    }
                    if c == a {
                        v -= m[(c2, b)];
                    }
                    jac[(r, c)] = v;
                }
                r += 1;
            }
        }
    }
    Ok(jac)
}

fn orbit_tangent(j: &JordanTripleSystem, e: &CVector) -> CMatrix {
    let n = j.dim();
    let mut cols = Vec::with_capacity(n * n + 1);
    cols.push(e.clone());
    for a in 0..n {
        for b in 0..n {
            cols.push(j.d_basis(a, b) * e);
        }
    }
    CMatrix::from_columns(&cols)
}

/// Both dimension estimates at the minimal tripotent, without requiring them
/// to agree.
pub fn cone_dimension_estimates(j: &JordanTripleSystem, tol_jac: f64) -> Result<ConeDimension> {
    if j.family() == Family::Disc {
        return Err(Error::DiscHasNoS1);
    }
    let e = j.minimal_tripotent().element;
    if !j.rank1_test(&e, DEFAULT_TOL_RANK)? {
        return Err(Error::WitnessNotRankOne(format!("minimal tripotent of {}", j.family())));
    }
    let orbit_span = numerical_rank(&orbit_tangent(j, &e), tol_jac);
    let minor_jacobian = j.dim() - numerical_rank(&rank1_jacobian(j, &e)?, tol_jac);
    Ok(ConeDimension {
        orbit_span,
        minor_jacobian,
    })
}

/// Affine dimension of the Jordan rank-one cone, i.e. `dim S¹ + 1`.
pub fn cone_dimension_rank1(j: &JordanTripleSystem, tol_jac: f64) -> Result<usize> {
    let d = cone_dimension_estimates(j, tol_jac)?;
    if d.orbit_span != d.minor_jacobian {
        return Err(Error::StructureError(format!(
            "{}: orbit span gives {}, minor Jacobian gives {}",
            j.family(),
            d.orbit_span,
            d.minor_jacobian
        )));
    }
    Ok(d.orbit_span)
}

/// A random point `λ·g·e` on the rank-one cone of `j`, with `g` a holonomy
/// sample and `e` the given minimal tripotent.
pub fn rank1_point<R: Rng + ?Sized>(j: &JordanTripleSystem, tripotent: &CVector, rng: &mut R) -> CVector {
    let g = factor_holonomy(j, rng);
    (g * tripotent) * complex_gaussian(rng)
}

fn factor_has_cone(sigma: &CurvatureTypeTensor, i: usize, tol: f64) -> Result<bool> {
    let block = block_of(sigma.op(), sigma.space(), (i, i), (i, i))?;
    Ok(numerical_rank(&block, tol) < block.ncols())
}

/// Splits the first cone of an assembled product into one component per
/// factor. The block structure is checked first.
pub fn decompose_components(
    sigma: &CurvatureTypeTensor,
    spec: &ProductSpec,
    opts: &ConeOptions,
) -> Result<Vec<CharacteristicCone>> {
    let system = ProductSystem::new(spec.clone())?;
    decompose_with(&system, sigma, opts)
}

/// [`decompose_components`] reusing prebuilt triple systems.
pub fn decompose_with(
    system: &ProductSystem,
    sigma: &CurvatureTypeTensor,
    opts: &ConeOptions,
) -> Result<Vec<CharacteristicCone>> {
    let space = system.space();
    if sigma.space() != space {
        return Err(Error::DimensionMismatch {
            expected: space.total_dim(),
            got: sigma.dim(),
        });
    }
    let scale = sigma.op().norm();
    let tol = opts.tol_rank * scale;
    let report = schur_structure(sigma.op(), space, tol)?;
    if let Some(bad) = report.violations().next() {
        return Err(Error::StructureError(format!(
            "block {:?} -> {:?} is not of the expected form (norm {:e})",
            bad.source, bad.target, bad.norm
        )));
    }
    let k = space.num_blocks();
    let dims = space.block_dims().to_vec();
    let mut out = Vec::with_capacity(k);
    for j in 0..k {
        let own = if factor_has_cone(sigma, j, opts.tol_rank)? {
            BlockFlag::Cone
        } else {
            BlockFlag::Zero
        };
        let flags: Vec<BlockFlag> = (0..k)
            .map(|i| {
                if i == j {
                    own
                } else {
                    let s = report
                        .scalar_of(i, j)
                        .expect("pair blocks are scalar after the structure check");
                    if s.norm() <= tol {
                        BlockFlag::Full
                    } else {
                        BlockFlag::Zero
                    }
                }
            })
            .collect();
        let cone_dim = match own {
            BlockFlag::Cone => cone_dimension_rank1(&system.systems()[j], opts.tol_jac)?,
            _ => 0,
        };
        let affine_dim = cone_dim
            + (0..k)
                .filter(|&i| flags[i] == BlockFlag::Full)
                .map(|i| dims[i])
                .sum::<usize>();
        let mut cone = CharacteristicCone {
            component_index: j,
            block_dims: dims.clone(),
            block_flags: flags,
            witnesses: Vec::new(),
            cone_dim,
            affine_dim,
        };
        if affine_dim > 0 {
            let witnesses = sample_component(system, &cone, opts.witnesses, opts.seed, j as u64, opts.exec);
            let ok = map_indexed(opts.exec, witnesses.len(), |w| {
                first_cone_contains(sigma, &witnesses[w], opts.tol_rank)
            });
            for (w, r) in ok.into_iter().enumerate() {
                if !r? {
                    return Err(Error::StructureError(format!(
                        "witness {w} of component {j} is off the first cone"
                    )));
                }
            }
            cone.witnesses = witnesses;
        }
        out.push(cone);
    }
    Ok(out)
}

/// Points on a component: rank-one orbit points on the `Cone` factor, random
/// vectors on `Full` factors, zero elsewhere.
pub fn sample_component(
    system: &ProductSystem,
    cone: &CharacteristicCone,
    count: usize,
    seed: u64,
    stream: u64,
    exec: Execution,
) -> Vec<CVector> {
    let space = system.space();
    let tripotent = match cone.block_flags[cone.component_index] {
        BlockFlag::Cone => Some(system.systems()[cone.component_index].minimal_tripotent().element),
        _ => None,
    };
    map_indexed(exec, count, |s| {
        let mut rng = rng_for(seed, (stream << 32) | s as u64);
        let mut x = CVector::zeros(space.total_dim());
        for (i, flag) in cone.block_flags.iter().enumerate() {
            let block = match flag {
                BlockFlag::Full => complex_gaussian_vector(&mut rng, space.block_dims()[i]),
                BlockFlag::Cone => {
                    rank1_point(&system.systems()[i], tripotent.as_ref().expect("cone factor"), &mut rng)
                }
                BlockFlag::Zero => continue,
            };
            x += space.embed(&block, i);
        }
        x
    })
}

/// Each component must be a proper cone on its own factor: a `Cone` factor
/// with `dim CSᵢ < nᵢ`, or `Zero`. A `Full` flag at the component's own
/// factor makes the decomposition redundant.
pub fn irredundancy_check(components: &[CharacteristicCone]) -> bool {
    components.iter().all(|c| {
        let j = c.component_index;
        match c.block_flags[j] {
            BlockFlag::Cone => c.cone_dim < c.block_dims[j],
            BlockFlag::Zero => true,
            BlockFlag::Full => false,
        }
    })
}

/// A coordinate subspace spanned by whole factors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslationSubspace {
    pub blocks: Vec<usize>,
    pub dim: usize,
}

/// Largest subspace `V` with `V + CS(j) ⊆ CS(j)`. The candidate is the span
/// of the `Full` factors; it is accepted after `positives` translates of
/// witnesses by random `v ∈ V` stay on the component and, for each of
/// `negatives` random directions with a component outside `V`, some translate
/// leaves it.
pub fn max_translation_subspace<F>(
    component: &CharacteristicCone,
    membership: F,
    positives: usize,
    negatives: usize,
    seed: u64,
    exec: Execution,
) -> Result<TranslationSubspace>
where
    F: Fn(&CVector) -> Result<bool> + Sync,
{
    let space = BlockSpace::new(component.block_dims.clone())?;
    let n = space.total_dim();
    let inside = component.full_blocks();
    let outside: Vec<usize> = (0..component.block_dims.len())
        .filter(|i| !inside.contains(i))
        .collect();
    let candidate = TranslationSubspace {
        dim: inside.iter().map(|&i| component.block_dims[i]).sum(),
        blocks: inside.clone(),
    };
    let random_in = |rng: &mut rand_chacha::ChaCha8Rng, blocks: &[usize]| {
        let mut v = CVector::zeros(n);
        for &i in blocks {
            v += space.embed(&complex_gaussian_vector(rng, space.block_dims()[i]), i);
        }
        v
    };
    let base = |rng: &mut rand_chacha::ChaCha8Rng, s: usize| -> CVector {
        if component.witnesses.is_empty() {
            CVector::zeros(n)
        } else {
            &component.witnesses[s % component.witnesses.len()] * complex_gaussian(rng)
        }
    };

    if !inside.is_empty() {
        let results = map_indexed(exec, positives, |s| {
            let mut rng = rng_for(seed, s as u64);
            let x = base(&mut rng, s) + random_in(&mut rng, &inside);
            membership(&x)
        });
        for (s, r) in results.into_iter().enumerate() {
            if !r? {
                return Err(Error::InconclusiveSample(format!(
                    "translate {s} by the candidate subspace left the component"
                )));
            }
        }
    }

    if !outside.is_empty() && !component.witnesses.is_empty() {
        const TRANSLATES: usize = 3;
        let results = map_indexed(exec, negatives, |s| -> Result<bool> {
            let mut rng = rng_for(seed, (1 << 32) | s as u64);
            let u = random_in(&mut rng, &outside);
            for _ in 0..TRANSLATES {
                let x = base(&mut rng, s) + &u * complex_gaussian(&mut rng);
                if x.norm() >= ZERO_EPS && !membership(&x)? {
                    return Ok(true);
                }
            }
            Ok(false)
        });
        for (s, r) in results.into_iter().enumerate() {
            if !r? {
                return Err(Error::InconclusiveSample(format!(
                    "direction {s} outside the candidate subspace never left the component"
                )));
            }
        }
    }
    Ok(candidate)
}

/// Outcome of [`join_singularity_probe`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JoinReport {
    pub family: String,
    pub extra_dim: usize,
    pub ambient_dim: usize,
    /// `n − dim CS`, from the orbit span.
    pub codim: usize,
    /// Largest Jacobian rank over sampled points `(x, w)`, `x` on the cone.
    pub generic_rank: usize,
    /// Rank at `(e, 0)`.
    pub rank_at_witness: usize,
    /// Rank at `(0, w)`; absent when `W = 0`.
    pub rank_at_w: Option<usize>,
    pub smooth_at_witness: bool,
    pub singular_at_w: Option<bool>,
    /// Homogeneity degree of the defining equations, measured from
    /// `f(2v) / f(v)`.
    pub equation_degree: u32,
}

impl JoinReport {
    /// Smooth at the witness, and (for `W ≠ 0`) singular along `P(W)` with
    /// equations of degree at least two.
    pub fn passes(&self) -> bool {
        let w_ok = match (self.extra_dim, self.singular_at_w) {
            (0, None) => true,
            (_, Some(s)) => s,
            _ => false,
        };
        self.smooth_at_witness && w_ok && self.equation_degree >= 2
    }
}

fn join_jacobian(j: &JordanTripleSystem, x: &CVector, m: usize) -> Result<CMatrix> {
    let jac = rank1_jacobian(j, x)?;
    Ok(jac.resize_horizontally(j.dim() + m, C64::new(0.0, 0.0)))
}

/// Jacobian ranks of the equations of the cone `CS ⊕ W` (`dim W = m`) at a
/// point `(0, w)` of `P(W)` and at the smooth point `(e, 0)`.
pub fn join_singularity_probe(j: &JordanTripleSystem, m: usize, seed: u64, tol_jac: f64) -> Result<JoinReport> {
    if j.rank() < 2 {
        return Err(Error::SpecError(format!("{} has rank < 2", j.family())));
    }
    let n = j.dim();
    let e = j.minimal_tripotent().element;
    let codim = n - numerical_rank(&orbit_tangent(j, &e), tol_jac);
    let rank_at_witness = numerical_rank(&join_jacobian(j, &e, m)?, tol_jac);

    let mut rng = rng_for(seed, 0);
    let mut generic_rank = rank_at_witness;
    for _ in 0..4 {
        let x = rank1_point(j, &e, &mut rng);
        generic_rank = generic_rank.max(numerical_rank(&join_jacobian(j, &x, m)?, tol_jac));
    }
    // the equations only see the T-coordinates, so every w gives the same rank
    let rank_at_w = if m > 0 {
        Some(numerical_rank(&join_jacobian(j, &CVector::zeros(n), m)?, tol_jac))
    } else {
        None
    };

    let v = complex_gaussian_vector(&mut rng, n);
    let f1 = rank1_equations(j, &v)?.norm();
    let f2 = rank1_equations(j, &(&v * C64::new(2.0, 0.0)))?.norm();
    let equation_degree = (f2 / f1).log2().round() as u32;

    Ok(JoinReport {
        family: j.family().to_string(),
        extra_dim: m,
        ambient_dim: n + m,
        codim,
        generic_rank,
        rank_at_witness,
        rank_at_w,
        smooth_at_witness: rank_at_witness == codim,
        singular_at_w: rank_at_w.map(|r| r < generic_rank),
        equation_degree,
    })
}

/// An explicit kernel element certifying level-`h` membership.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelCertificate {
    pub kernel_element: CMatrix,
    pub rank: usize,
    /// Level at which it was found.
    pub level: usize,
    /// `‖σA‖ / (‖σ‖ ‖A‖)`.
    pub kernel_residual: f64,
    /// Distance from `x/‖x‖` to the column space of `A`.
    pub image_residual: f64,
}

const LEVEL_CONVERGENCE: f64 = 1e-8;
const LEVEL_RESTARTS: usize = 3;
const CERT_TOL: f64 = 1e-6;

/// Rank of `m` and the distance from the unit vector `x̂` to its column space.
fn certificate_for(
    sigma: &CurvatureTypeTensor,
    a: &CMatrix,
    x_hat: &CVector,
    h: usize,
    level: usize,
    tol: f64,
) -> Option<LevelCertificate> {
    let norm = a.norm();
    if norm < ZERO_EPS {
        return None;
    }
    let rank = numerical_rank(a, tol);
    let kernel_residual = (sigma.op() * flatten(a)).norm() / (sigma.op().norm() * norm);
    let cols = column_basis(a, tol);
    let image_residual = (x_hat - &cols * (cols.adjoint() * x_hat)).norm();
    (rank <= h && kernel_residual <= CERT_TOL && image_residual <= CERT_TOL).then_some(LevelCertificate {
        kernel_element: a.clone(),
        rank,
        level,
        kernel_residual,
        image_residual,
    })
}

/// `x̂x̂*A` plus the best rank-`(h−1)` approximation of `(I − x̂x̂*)A`.
fn project_constrained(a: &CMatrix, x_hat: &CVector, h: usize) -> CMatrix {
    let along = x_hat * (x_hat.adjoint() * a);
    let rest = a - &along;
    if h <= 1 {
        return along;
    }
    let svd = SVD::new(rest, true, true);
    let (u, v_t) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&p, &q| svd.singular_values[q].total_cmp(&svd.singular_values[p]));
    let mut trunc = CMatrix::zeros(a.nrows(), a.ncols());
    for &i in order.iter().take(h - 1) {
        trunc += u.column(i) * v_t.row(i) * C64::new(svd.singular_values[i], 0.0);
    }
    along + trunc
}

/// Searches for `A ∈ ker σ` of rank `≤ h` with `x ∈ im A`, trying levels
/// `1..=h` in turn with a fixed per-level budget, so a hit at level `h` is
/// also found at every larger level. Level 1 is decided exactly through
/// [`first_cone_residual`]; higher levels use alternating projections.
/// `None` means "not found".
pub fn level_h_search(
    sigma: &CurvatureTypeTensor,
    x: &CVector,
    h: usize,
    budget: usize,
    seed: u64,
    tol: f64,
) -> Result<Option<LevelCertificate>> {
    check_nonzero(x)?;
    let n = sigma.dim();
    let x_hat = x / C64::new(x.norm(), 0.0);
    let (ratio, f) = first_cone_residual(sigma, x)?;
    if ratio <= tol {
        let a = &x_hat * f.transpose();
        if let Some(c) = certificate_for(sigma, &a, &x_hat, 1, 1, tol) {
            return Ok(Some(c));
        }
    }
    if h < 2 {
        return Ok(None);
    }
    let kernel: Vec<CVector> = kernel_basis(sigma, tol).into_iter().map(|t| t.flatten()).collect();
    if kernel.is_empty() {
        return Ok(None);
    }
    let k = CMatrix::from_columns(&kernel);
    let project_kernel = |a: &CMatrix| -> CMatrix {
        let flat = flatten(a);
        let p = &k * (k.adjoint() * flat);
        CMatrix::from_row_iterator(n, n, p.iter().copied())
    };
    for level in 2..=h.min(n) {
        for restart in 0..LEVEL_RESTARTS {
            let mut rng = rng_for(seed, ((level as u64) << 16) | restart as u64);
            let coeffs = complex_gaussian_vector(&mut rng, kernel.len());
            let start = &k * coeffs;
            let mut a = CMatrix::from_row_iterator(n, n, start.iter().copied());
            for _ in 0..budget {
                let b = project_constrained(&a, &x_hat, level);
                let mut next = project_kernel(&b);
                let nn = next.norm();
                if nn < ZERO_EPS {
                    break;
                }
                next /= C64::new(nn, 0.0);
                let gap = (&b / C64::new(nn, 0.0) - &next).norm();
                a = next;
                if gap < LEVEL_CONVERGENCE {
                    let b = project_constrained(&a, &x_hat, level);
                    if let Some(c) = certificate_for(sigma, &b, &x_hat, level, level, tol) {
                        return Ok(Some(c));
                    }
                    break;
                }
            }
        }
    }
    Ok(None)
}

/// One-sided level-`h` membership: `true` only with a verified certificate.
pub fn level_h_member(sigma: &CurvatureTypeTensor, x: &CVector, h: usize, budget: usize, seed: u64) -> Result<bool> {
    Ok(level_h_search(sigma, x, h, budget, seed, DEFAULT_TOL_RANK)?.is_some())
}

/// The levels `1..=max_level` of the characteristic sequence of `σ`, as
/// membership oracles sharing a budget and seed.
#[derive(Debug, Clone)]
pub struct Filtration {
    sigma: CurvatureTypeTensor,
    max_level: usize,
    budget: usize,
    seed: u64,
}

impl Filtration {
    pub fn new(sigma: CurvatureTypeTensor, max_level: usize, budget: usize, seed: u64) -> Self {
        Self {
            sigma,
            max_level,
            budget,
            seed,
        }
    }

    pub fn max_level(&self) -> usize {
        self.max_level
    }

    pub fn member(&self, x: &CVector, h: usize) -> Result<bool> {
        level_h_member(&self.sigma, x, h, self.budget, self.seed)
    }

    /// Smallest level at which `x` is certified.
    pub fn level_of(&self, x: &CVector) -> Result<Option<usize>> {
        Ok(level_h_search(&self.sigma, x, self.max_level, self.budget, self.seed, DEFAULT_TOL_RANK)?.map(|c| c.level))
    }

    /// Membership at every level; nesting means the vector is monotone.
    pub fn profile(&self, x: &CVector) -> Result<Vec<bool>> {
        (1..=self.max_level).map(|h| self.member(x, h)).collect()
    }
}

/// Agreement between a projector-type first cone and the Jordan rank-one
/// cone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignReport {
    pub family: String,
    pub kernel_dim: usize,
    /// `[[rank1 ∧ cone, rank1 ∧ ¬cone], [¬rank1 ∧ cone, ¬rank1 ∧ ¬cone]]`.
    pub agreement: [[usize; 2]; 2],
}

impl DesignReport {
    pub fn disagreements(&self) -> usize {
        self.agreement[0][1] + self.agreement[1][0]
    }
}

/// Builds `σ = I − P_K` on the factor of `j` and compares its first cone with
/// the rank-one cone on `samples` rank-one points and `samples` generic
/// points.
pub fn kernel_design_experiment(
    j: &JordanTripleSystem,
    kernel: &[CVector],
    samples: usize,
    seed: u64,
    opts: &ConeOptions,
) -> Result<DesignReport> {
    let space = BlockSpace::single(j.dim())?;
    let sigma = sigma_projector(space, kernel, opts.tol_rank)?;
    let kernel_dim = kernel_basis(&sigma, opts.tol_rank).len();
    let e = j.minimal_tripotent().element;
    let rows = map_indexed(opts.exec, 2 * samples, |s| -> Result<(bool, bool)> {
        let mut rng = rng_for(seed, s as u64);
        let x = if s < samples {
            rank1_point(j, &e, &mut rng)
        } else {
            complex_gaussian_vector(&mut rng, j.dim())
        };
        Ok((
            j.rank1_test(&x, opts.tol_rank)?,
            first_cone_contains(&sigma, &x, opts.tol_rank)?,
        ))
    });
    let mut agreement = [[0usize; 2]; 2];
    for r in rows {
        let (rank1, cone) = r?;
        agreement[usize::from(!rank1)][usize::from(!cone)] += 1;
    }
    Ok(DesignReport {
        family: j.family().to_string(),
        kernel_dim,
        agreement,
    })
}

/// Spanning set of `{x ⊗ ȳ : x = uv*, y = u′v′*, u′ ⊥ u, v′ ⊥ v}` on `I(p,q)`
/// from `count` random choices.
pub fn cross_pair_kernel(j: &JordanTripleSystem, count: usize, seed: u64) -> Result<Vec<CVector>> {
    let Family::I(p, q) = j.family() else {
        return Err(Error::SpecError(format!(
            "cross pairs need a matrix family, got {}",
            j.family()
        )));
    };
    let mut rng = rng_for(seed, 0);
    let mut out = Vec::with_capacity(count);
    let perp = |a: &CVector, b: &CVector| b - a * (a.dotc(b) / a.dotc(a));
    for _ in 0..count {
        let u = complex_gaussian_vector(&mut rng, p);
        let v = complex_gaussian_vector(&mut rng, q);
        let u2 = perp(&u, &complex_gaussian_vector(&mut rng, p));
        let v2 = perp(&v, &complex_gaussian_vector(&mut rng, q));
        let x = j.coords_from_matrix(&(&u * v.adjoint()))?;
        let y = j.coords_from_matrix(&(&u2 * v2.adjoint()))?;
        out.push(flatten(&(&x * y.adjoint())));
    }
    Ok(out)
}

#[cfg(test)]
mod tests;
