//! Sampled invariants that span several modules.

use domain_oracle::charvar::{
    decompose_with, first_cone_contains, rank1_point, sample_component, BlockFlag, ConeOptions, Filtration,
};
use domain_oracle::curvature::{
    assemble_product, factor_holonomy, schur_structure, sigma_from_jts, OffDiagonal, ProductSpec, ProductSystem,
    SigmaConvention,
};
use domain_oracle::jts::{Family, JordanTripleSystem};
use domain_oracle::par::Execution;
use domain_oracle::sampling::{complex_gaussian_vector, rng_for};
use domain_oracle::tensor_space::{invariance_residual, kernel_basis};
use domain_oracle::{CVector, C64};

fn all_families() -> Vec<Family> {
    vec![
        Family::Disc,
        Family::I(2, 3),
        Family::I(3, 3),
        Family::II(4),
        Family::II(5),
        Family::III(3),
        Family::IV(5),
        Family::V,
        Family::VI,
    ]
}

#[test]
fn sigma_commutes_with_holonomy() {
    for f in all_families() {
        let system = ProductSystem::new(ProductSpec::with_pattern(vec![f], OffDiagonal::Zero).unwrap()).unwrap();
        let sigma = system.sigma(SigmaConvention::DType).unwrap();
        let worst = (0..50)
            .map(|s| invariance_residual(&sigma, &system.holonomy_sample(s)).unwrap())
            .fold(0.0, f64::max);
        assert!(worst <= 1e-8, "{f}: {worst:e}");
    }
}

#[test]
fn exactly_invariant_products_have_schur_structure() {
    for text in ["I(2,2)xIV(3)", "DxII(4)xIII(2)", "VIxD"] {
        for pattern in [OffDiagonal::Zero, OffDiagonal::Identity] {
            let sigma = assemble_product(&ProductSpec::parse(text, pattern).unwrap(), SigmaConvention::DType).unwrap();
            let r = schur_structure(sigma.op(), sigma.space(), 1e-10).unwrap();
            assert!(r.is_schur(), "{text}");
        }
    }
}

#[test]
fn cross_pairs_in_kernel_iff_scalar_vanishes() {
    let spec = ProductSpec::parse("I(2,2)xIV(3)xD", OffDiagonal::Identity).unwrap();
    let mut m = domain_oracle::CMatrix::from_element(3, 3, C64::new(1.0, 0.0));
    m[(0, 2)] = C64::new(0.0, 0.0);
    m[(1, 0)] = C64::new(0.0, 0.0);
    let spec = ProductSpec::new(spec.factors().to_vec(), m).unwrap();
    let sigma = assemble_product(&spec, SigmaConvention::DType).unwrap();
    let space = spec.space();
    let n = space.total_dim();
    for i in 0..3 {
        for j in 0..3 {
            if i == j {
                continue;
            }
            let mut killed = true;
            for a in space.block_range(i) {
                for b in space.block_range(j) {
                    let mut v = CVector::zeros(n * n);
                    v[a * n + b] = C64::new(1.0, 0.0);
                    killed &= (sigma.op() * v).norm() == 0.0;
                }
            }
            assert_eq!(killed, spec.offdiag(i, j).norm() == 0.0, "({i},{j})");
        }
    }
}

#[test]
fn kernel_vectors_are_orthonormal_and_small() {
    let j = JordanTripleSystem::new(Family::I(2, 3)).unwrap();
    let sigma = sigma_from_jts(&j, SigmaConvention::DType).unwrap();
    let tol = 1e-8;
    let smax = domain_oracle::tensor_space::singular_values(sigma.op())[0];
    let basis: Vec<CVector> = kernel_basis(&sigma, tol).into_iter().map(|t| t.flatten()).collect();
    assert!(!basis.is_empty());
    for (p, u) in basis.iter().enumerate() {
        assert!((sigma.op() * u).norm() <= 2.0 * tol * smax * u.norm());
        for (q, v) in basis.iter().enumerate() {
            let want = if p == q { 1.0 } else { 0.0 };
            assert!((u.dotc(v) - C64::new(want, 0.0)).norm() < 1e-10);
        }
    }
}

#[test]
fn first_cone_is_holonomy_invariant() {
    for f in [
        Family::I(2, 3),
        Family::I(3, 3),
        Family::II(5),
        Family::III(3),
        Family::IV(6),
        Family::V,
    ] {
        let j = JordanTripleSystem::new(f).unwrap();
        let sigma = sigma_from_jts(&j, SigmaConvention::DType).unwrap();
        let e = j.minimal_tripotent().element;
        let mut rng = rng_for(21, 0);
        for s in 0..100 {
            let x = if s % 2 == 0 {
                rank1_point(&j, &e, &mut rng)
            } else {
                complex_gaussian_vector(&mut rng, j.dim())
            };
            let g = factor_holonomy(&j, &mut rng);
            assert_eq!(
                first_cone_contains(&sigma, &x, 1e-8).unwrap(),
                first_cone_contains(&sigma, &(g * &x), 1e-8).unwrap(),
                "{f}"
            );
        }
    }
}

#[test]
fn components_cover_the_union() {
    for pattern in [OffDiagonal::Zero, OffDiagonal::Identity] {
        let system = ProductSystem::new(ProductSpec::parse("I(2,2)xIV(3)xD", pattern).unwrap()).unwrap();
        let sigma = system.sigma(SigmaConvention::DType).unwrap();
        let comps = decompose_with(&system, &sigma, &ConeOptions::default()).unwrap();
        let live: Vec<_> = comps.iter().filter(|c| c.affine_dim > 0).collect();
        let on = 200 / live.len() + 1;
        for c in &live {
            for x in sample_component(&system, c, on, 5, 100 + c.component_index as u64, Execution::default()) {
                assert!(first_cone_contains(&sigma, &x, 1e-8).unwrap());
            }
        }
        let mut rng = rng_for(6, 0);
        for _ in 0..200 {
            let x = complex_gaussian_vector(&mut rng, system.space().total_dim());
            assert!(!first_cone_contains(&sigma, &x, 1e-8).unwrap());
        }
        if pattern == OffDiagonal::Identity {
            assert_eq!(comps[2].block_flags, vec![BlockFlag::Zero; 3]);
            assert!(comps[2].witnesses.is_empty());
        }
    }
}

#[test]
fn filtration_is_nested_on_products() {
    let sigma = assemble_product(
        &ProductSpec::parse("I(2,2)xD", OffDiagonal::Identity).unwrap(),
        SigmaConvention::DType,
    )
    .unwrap();
    let f = Filtration::new(sigma, 3, 200, 2);
    let mut rng = rng_for(2, 1);
    for _ in 0..20 {
        let p = f.profile(&complex_gaussian_vector(&mut rng, 5)).unwrap();
        assert!(p.windows(2).all(|w| !w[0] || w[1]), "{p:?}");
    }
}

#[test]
fn execution_strategies_agree() {
    let system = ProductSystem::new(ProductSpec::parse("I(2,2)xIV(3)", OffDiagonal::Zero).unwrap()).unwrap();
    let seq = system.holonomy_samples(4, 40, Execution::Sequential);
    let par = system.holonomy_samples(4, 40, Execution::Parallel);
    assert_eq!(seq, par);
    let n2 = system.space().total_dim().pow(2);
    let mut rng = rng_for(4, 0);
    let a = domain_oracle::sampling::complex_gaussian_matrix(&mut rng, n2, n2);
    let avg = |exec| domain_oracle::tensor_space::group_average(&a, &seq, exec).unwrap();
    assert_eq!(avg(Execution::Sequential), avg(Execution::Parallel));
}
