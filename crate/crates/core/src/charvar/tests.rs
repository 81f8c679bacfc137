use super::*;
use crate::curvature::{assemble_product, sigma_from_jts, OffDiagonal, SigmaConvention};
use crate::jts::Family;
use proptest::prelude::*;

fn d_type(f: Family) -> (JordanTripleSystem, CurvatureTypeTensor) {
    let j = JordanTripleSystem::new(f).unwrap();
    let s = sigma_from_jts(&j, SigmaConvention::DType).unwrap();
    (j, s)
}

fn matrix_coords(j: &JordanTripleSystem, m: CMatrix) -> CVector {
    j.coords_from_matrix(&m).unwrap()
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

#[test]
fn polydisc_first_cone() {
    let spec = ProductSpec::parse("DxD", OffDiagonal::Zero).unwrap();
    let sigma = assemble_product(&spec, SigmaConvention::DType).unwrap();
    let e1 = CVector::from_vec(vec![c(1.0), c(0.0)]);
    assert!(first_cone_contains(&sigma, &e1, 1e-8).unwrap());
    let both = CVector::from_vec(vec![c(1.0), c(1.0)]);
    assert!(!first_cone_contains(&sigma, &both, 1e-8).unwrap());
}

#[test]
fn i22_first_cone() {
    let (j, sigma) = d_type(Family::I(2, 2));
    let e11 = matrix_coords(&j, CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)]));
    let id = matrix_coords(&j, CMatrix::identity(2, 2));
    assert!(first_cone_contains(&sigma, &e11, 1e-8).unwrap());
    assert!(!first_cone_contains(&sigma, &id, 1e-8).unwrap());
    // the witness covector is E22
    let (_, f) = first_cone_residual(&sigma, &e11).unwrap();
    assert!((f[3].norm() - 1.0).abs() < 1e-12);
}

#[test]
fn identity_sigma_has_empty_cone() {
    let sigma = CurvatureTypeTensor::identity(BlockSpace::single(3).unwrap());
    let mut rng = rng_for(1, 0);
    for _ in 0..10 {
        let x = complex_gaussian_vector(&mut rng, 3);
        assert!(!first_cone_contains(&sigma, &x, 1e-8).unwrap());
    }
    assert!(matches!(
        first_cone_contains(&sigma, &CVector::zeros(3), 1e-8),
        Err(Error::ZeroInput)
    ));
}

#[test]
fn cone_is_scale_invariant() {
    let (j, sigma) = d_type(Family::IV(5));
    let e = j.minimal_tripotent().element;
    let mut rng = rng_for(2, 0);
    for s in 0..20 {
        let x = if s % 2 == 0 {
            rank1_point(&j, &e, &mut rng)
        } else {
            complex_gaussian_vector(&mut rng, 5)
        };
        let lambda = complex_gaussian(&mut rng);
        assert_eq!(
            first_cone_contains(&sigma, &x, 1e-8).unwrap(),
            first_cone_contains(&sigma, &(&x * lambda), 1e-8).unwrap()
        );
    }
}

#[test]
fn iv5_first_cone_is_null_quadric() {
    let (j, sigma) = d_type(Family::IV(5));
    let mut rng = rng_for(4, 0);
    let e = j.minimal_tripotent().element;
    for _ in 0..20 {
        let x = rank1_point(&j, &e, &mut rng);
        assert!(x.dot(&x).norm() < 1e-10);
        assert!(first_cone_contains(&sigma, &x, 1e-8).unwrap());
        let y = complex_gaussian_vector(&mut rng, 5);
        assert!(!first_cone_contains(&sigma, &y, 1e-8).unwrap());
    }
}

#[test]
fn i33_first_cone_is_rank_two_locus() {
    let (j, sigma) = d_type(Family::I(3, 3));
    let mut rng = rng_for(5, 0);
    for _ in 0..10 {
        let a = crate::sampling::complex_gaussian_matrix(&mut rng, 3, 2);
        let b = crate::sampling::complex_gaussian_matrix(&mut rng, 2, 3);
        let x = matrix_coords(&j, a * b);
        assert!(!j.rank1_test(&x, 1e-8).unwrap());
        assert!(first_cone_contains(&sigma, &x, 1e-8).unwrap());
        let y = complex_gaussian_vector(&mut rng, 9);
        assert!(!first_cone_contains(&sigma, &y, 1e-8).unwrap());
    }
}

#[test]
fn cone_dimensions() {
    let cases = [
        (Family::I(2, 3), 4),
        (Family::I(1, 3), 3),
        (Family::II(4), 5),
        (Family::III(3), 3),
        (Family::IV(7), 6),
        (Family::V, 11),
    ];
    for (f, want) in cases {
        let j = JordanTripleSystem::new(f).unwrap();
        let d = cone_dimension_estimates(&j, 1e-6).unwrap();
        assert_eq!(
            d,
            ConeDimension {
                orbit_span: want,
                minor_jacobian: want
            },
            "{f}"
        );
        assert_eq!(cone_dimension_rank1(&j, 1e-6).unwrap(), want);
    }
    let disc = JordanTripleSystem::new(Family::Disc).unwrap();
    assert!(matches!(cone_dimension_rank1(&disc, 1e-6), Err(Error::DiscHasNoS1)));
}

#[test]
fn rank1_equations_vanish_on_cone() {
    let j = JordanTripleSystem::new(Family::III(3)).unwrap();
    let e = j.minimal_tripotent().element;
    let mut rng = rng_for(6, 0);
    for _ in 0..5 {
        let x = rank1_point(&j, &e, &mut rng);
        assert!(rank1_equations(&j, &x).unwrap().norm() < 1e-10);
        let y = complex_gaussian_vector(&mut rng, 6);
        assert!(rank1_equations(&j, &y).unwrap().norm() > 1e-3);
    }
}

#[test]
fn jacobian_matches_finite_differences() {
    let j = JordanTripleSystem::new(Family::II(4)).unwrap();
    let mut rng = rng_for(7, 0);
    let x = complex_gaussian_vector(&mut rng, 6);
    let jac = rank1_jacobian(&j, &x).unwrap();
    let h = 1e-6;
    for col in 0..6 {
        let mut xp = x.clone();
        xp[col] += c(h);
        let mut xm = x.clone();
        xm[col] -= c(h);
        let fd = (rank1_equations(&j, &xp).unwrap() - rank1_equations(&j, &xm).unwrap()) / c(2.0 * h);
        assert!((fd - jac.column(col)).norm() < 1e-6 * jac.norm());
    }
}

fn decompose(spec: &str, pattern: OffDiagonal) -> Vec<CharacteristicCone> {
    let spec = ProductSpec::parse(spec, pattern).unwrap();
    let sigma = assemble_product(&spec, SigmaConvention::DType).unwrap();
    decompose_components(&sigma, &spec, &ConeOptions::default()).unwrap()
}

#[test]
fn noball_components() {
    use BlockFlag::*;
    let comps = decompose("I(2,2)xIV(3)", OffDiagonal::Zero);
    assert_eq!(comps[0].block_flags, vec![Cone, Full]);
    assert_eq!(comps[1].block_flags, vec![Full, Cone]);
    assert_eq!((comps[0].cone_dim, comps[0].affine_dim), (3, 6));
    assert_eq!((comps[1].cone_dim, comps[1].affine_dim), (2, 6));
    assert!(irredundancy_check(&comps));
}

#[test]
fn rank_gt1_components() {
    use BlockFlag::*;
    let comps = decompose("I(2,2)xIV(3)", OffDiagonal::Identity);
    assert_eq!(comps[0].block_flags, vec![Cone, Zero]);
    assert_eq!(comps[1].block_flags, vec![Zero, Cone]);
    assert_eq!(comps[0].affine_dim, 3);
}

#[test]
fn single_factor_and_disc_components() {
    use BlockFlag::*;
    let comps = decompose("III(2)", OffDiagonal::Zero);
    assert_eq!(comps.len(), 1);
    assert_eq!(comps[0].block_flags, vec![Cone]);
    let comps = decompose("D", OffDiagonal::Zero);
    assert_eq!(comps[0].block_flags, vec![Zero]);
    assert_eq!(comps[0].affine_dim, 0);
    assert!(comps[0].witnesses.is_empty());
    assert_eq!(comps[0].proj_dim(), -1);
    let comps = decompose("DxI(2,2)", OffDiagonal::Zero);
    assert_eq!(comps[0].block_flags, vec![Zero, Full]);
    assert_eq!(comps[0].affine_dim, 4);
    assert!(irredundancy_check(&comps));
}

#[test]
fn planted_full_flag_is_redundant() {
    let mut comps = decompose("I(2,2)xD", OffDiagonal::Zero);
    assert!(irredundancy_check(&comps));
    comps[0].block_flags[0] = BlockFlag::Full;
    assert!(!irredundancy_check(&comps));
}

#[test]
fn non_schur_input_is_rejected() {
    let spec = ProductSpec::parse("DxD", OffDiagonal::Zero).unwrap();
    let sigma = assemble_product(&spec, SigmaConvention::DType).unwrap();
    let mut op = sigma.op().clone();
    op[(1, 0)] = c(1.0);
    let bad = CurvatureTypeTensor::new(op, spec.space()).unwrap();
    assert!(matches!(
        decompose_components(&bad, &spec, &ConeOptions::default()),
        Err(Error::StructureError(_))
    ));
}

#[test]
fn translation_subspaces() {
    let spec = ProductSpec::parse("I(2,2)xIV(3)", OffDiagonal::Zero).unwrap();
    let sigma = assemble_product(&spec, SigmaConvention::DType).unwrap();
    let comps = decompose_components(&sigma, &spec, &ConeOptions::default()).unwrap();
    let member = |x: &CVector| first_cone_contains(&sigma, x, 1e-8);
    let v = max_translation_subspace(&comps[0], member, 100, 20, 0, Execution::default()).unwrap();
    assert_eq!(
        v,
        TranslationSubspace {
            blocks: vec![1],
            dim: 3
        }
    );

    let spec = ProductSpec::parse("I(2,2)xIV(3)", OffDiagonal::Identity).unwrap();
    let sigma = assemble_product(&spec, SigmaConvention::DType).unwrap();
    let comps = decompose_components(&sigma, &spec, &ConeOptions::default()).unwrap();
    let member = |x: &CVector| first_cone_contains(&sigma, x, 1e-8);
    let v = max_translation_subspace(&comps[0], member, 100, 20, 0, Execution::default()).unwrap();
    assert_eq!(v.dim, 0);
}

#[test]
fn whole_space_component() {
    let cone = CharacteristicCone {
        component_index: 0,
        block_dims: vec![2, 3],
        block_flags: vec![BlockFlag::Full, BlockFlag::Full],
        witnesses: vec![],
        cone_dim: 0,
        affine_dim: 5,
    };
    let v = max_translation_subspace(&cone, |_| Ok(true), 100, 20, 0, Execution::Sequential).unwrap();
    assert_eq!(v.dim, 5);
}

#[test]
fn wrong_candidate_is_inconclusive() {
    let cone = CharacteristicCone {
        component_index: 0,
        block_dims: vec![2, 3],
        block_flags: vec![BlockFlag::Cone, BlockFlag::Full],
        witnesses: vec![CVector::from_element(5, c(1.0))],
        cone_dim: 1,
        affine_dim: 4,
    };
    assert!(matches!(
        max_translation_subspace(&cone, |_| Ok(true), 10, 5, 0, Execution::Sequential),
        Err(Error::InconclusiveSample(_))
    ));
    assert!(matches!(
        max_translation_subspace(&cone, |_| Ok(false), 10, 5, 0, Execution::Sequential),
        Err(Error::InconclusiveSample(_))
    ));
}

#[test]
fn join_probe_i22() {
    let j = JordanTripleSystem::new(Family::I(2, 2)).unwrap();
    let r = join_singularity_probe(&j, 2, 0, 1e-6).unwrap();
    assert_eq!(
        (r.codim, r.generic_rank, r.rank_at_witness, r.rank_at_w),
        (1, 1, 1, Some(0))
    );
    assert_eq!(r.equation_degree, 3);
    assert!(r.passes());
    let r = join_singularity_probe(&j, 0, 0, 1e-6).unwrap();
    assert!(r.smooth_at_witness && r.rank_at_w.is_none() && r.passes());
}

#[test]
fn join_probe_needs_rank_two() {
    let j = JordanTripleSystem::new(Family::I(1, 3)).unwrap();
    assert!(join_singularity_probe(&j, 1, 0, 1e-6).is_err());
}

#[test]
fn level_one_with_explicit_pair() {
    let (j, sigma) = d_type(Family::I(3, 3));
    let mut m = CMatrix::zeros(3, 3);
    m[(0, 0)] = c(1.0);
    m[(0, 1)] = c(2.0);
    m[(1, 1)] = c(-1.0);
    let x = matrix_coords(&j, m);
    let cert = level_h_search(&sigma, &x, 1, 100, 0, 1e-8).unwrap().unwrap();
    assert_eq!((cert.rank, cert.level), (1, 1));
    assert!(cert.kernel_residual < 1e-12);
    assert!(level_h_member(&sigma, &x, 2, 100, 0).unwrap());
}

#[test]
fn identity_sigma_has_no_levels() {
    let sigma = CurvatureTypeTensor::identity(BlockSpace::single(2).unwrap());
    let x = CVector::from_vec(vec![c(1.0), c(0.5)]);
    for h in 1..=2 {
        assert!(!level_h_member(&sigma, &x, h, 50, 0).unwrap());
    }
}

#[test]
fn generic_kernel_reaches_full_level() {
    // ker σ = all A with A[0][0] = 0 meets generic images at rank 2
    let space = BlockSpace::single(2).unwrap();
    let kernel: Vec<CVector> = (1..4)
        .map(|i| CVector::from_fn(4, |r, _| c((r == i) as u8 as f64)))
        .collect();
    let sigma = sigma_projector(space, &kernel, 1e-10).unwrap();
    let x = CVector::from_vec(vec![c(1.0), c(0.7)]);
    let f = Filtration::new(sigma, 2, 500, 0);
    assert_eq!(f.profile(&x).unwrap(), vec![true, true]);
    let e1 = CVector::from_vec(vec![c(1.0), c(0.0)]);
    assert_eq!(f.level_of(&e1).unwrap(), Some(1));
}

#[test]
fn design_experiment_extremes() {
    let j = JordanTripleSystem::new(Family::I(2, 2)).unwrap();
    let opts = ConeOptions::default();
    let r = kernel_design_experiment(&j, &[], 10, 0, &opts).unwrap();
    assert_eq!(r.kernel_dim, 0);
    assert_eq!(r.agreement, [[0, 10], [0, 10]]);
    let all: Vec<CVector> = (0..16)
        .map(|i| CVector::from_fn(16, |r, _| c((r == i) as u8 as f64)))
        .collect();
    assert!(matches!(
        kernel_design_experiment(&j, &all, 10, 0, &opts),
        Err(Error::ZeroTensor)
    ));
}

#[test]
fn cross_pairs_lie_in_d_type_kernel() {
    let (j, sigma) = d_type(Family::I(3, 3));
    for v in cross_pair_kernel(&j, 20, 0).unwrap() {
        assert!((sigma.op() * &v).norm() < 1e-12 * v.norm().max(1.0));
    }
    assert!(cross_pair_kernel(&JordanTripleSystem::new(Family::IV(3)).unwrap(), 1, 0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn cone_respects_holonomy(seed in any::<u64>()) {
        for f in [Family::I(2, 3), Family::III(2), Family::IV(4)] {
            let (j, sigma) = d_type(f);
            let mut rng = rng_for(seed, 0);
            let e = j.minimal_tripotent().element;
            let x = if seed % 2 == 0 { rank1_point(&j, &e, &mut rng) } else { complex_gaussian_vector(&mut rng, j.dim()) };
            let g = factor_holonomy(&j, &mut rng);
            prop_assert_eq!(
                first_cone_contains(&sigma, &x, 1e-8).unwrap(),
                first_cone_contains(&sigma, &(g * &x), 1e-8).unwrap()
            );
        }
    }
}

#[test]
fn level_one_certificate_on_random_low_rank() {
    let (j, sigma) = d_type(Family::I(3, 3));
    let mut rng = rng_for(9, 0);
    for rank in 1..=2 {
        let a = crate::sampling::complex_gaussian_matrix(&mut rng, 3, rank);
        let b = crate::sampling::complex_gaussian_matrix(&mut rng, rank, 3);
        let x = matrix_coords(&j, a * b);
        let (_, f) = first_cone_residual(&sigma, &x).unwrap();
        assert!((sigma.op() * flatten(&(&x * f.transpose()))).norm() < 1e-10 * x.norm());
        let cert = level_h_search(&sigma, &x, 1, 10, 0, 1e-8).unwrap().unwrap();
        assert_eq!(cert.level, 1);
    }
}
