mod common;

use common::*;
use cpspectra::algebra::{extension_superop, AlgebraShape};
use cpspectra::catalog::{corner_collapse_map, golden_ratio_map, path_graph_map, trace_pair_map};
use cpspectra::cpmap::{CpMap, LinearMap};
use cpspectra::mats::{self, DenseMatrix};
use cpspectra::perron::{irreducible_cp, maximal_part, spectral_structure, MaximalPart};
use cpspectra::C64;
use proptest::prelude::*;

fn linear(tau: &CpMap) -> LinearMap {
    LinearMap::new(tau.shape(), &tau.superop(), true, &tol()).unwrap()
}

fn coords(phi: &LinearMap, mp: &MaximalPart) -> DenseMatrix {
    phi.with_superop(mp.superop.clone()).algebra_matrix()
}

fn fixed_maps() -> Vec<CpMap> {
    vec![
        corner_collapse_map(),
        golden_ratio_map(),
        path_graph_map(),
        trace_pair_map(),
        jordan_map(),
    ]
}

fn check_maximal_part(tau: &CpMap, seed: u64) -> Result<(), TestCaseError> {
    let mut g = rng(seed);
    let phi = linear(tau);
    let a = phi.algebra_matrix();
    let mp = maximal_part(&phi, &tol()).unwrap();
    let hat = coords(&phi, &mp);
    let n = a.rows();
    let r = mp.r;
    let scale = hat.max_abs().max(1.0) * r.max(1.0);

    // φφ̂ = φ̂φ = rφ̂.
    let rhat = hat.scale_re(r);
    prop_assert!((&(&a * &hat) - &rhat).max_abs() < 1e-8 * scale);
    prop_assert!((&(&hat * &a) - &rhat).max_abs() < 1e-8 * scale);

    // Exactly one of φ̂² = φ̂, φ̂² = 0, matching d.
    let sq = &hat * &hat;
    let idem = (&sq - &hat).max_abs() < 1e-8 * scale;
    let nil = sq.max_abs() < 1e-8 * scale;
    prop_assert!(idem != nil);
    prop_assert_eq!(idem, mp.d == 1);
    prop_assert_eq!(idem, mp.idempotent);

    // r belongs to the maximal spectrum.
    prop_assert!(mp
        .structure
        .maximal_spectrum
        .iter()
        .any(|z| (z - C64::new(r, 0.0)).norm() < 1e-8 * r.max(1.0)));

    if idem {
        let eig = mats::null_space(&(&a - &DenseMatrix::identity(n).scale_re(r)), 1e-8, None).unwrap();
        for _ in 0..4 {
            let c: Vec<C64> = (0..eig.cols())
                .map(|_| C64::new(gaussian_like(&mut g), gaussian_like(&mut g)))
                .collect();
            let x = eig.mul_vec(&c);
            let y = hat.mul_vec(&x);
            prop_assert!(x.iter().zip(&y).all(|(p, q)| (p - q).norm() < 1e-8 * scale));
            // Fixed points of φ̂ are eigenvectors of φ at r.
            let z: Vec<C64> = (0..n).map(|_| C64::new(gaussian_like(&mut g), 0.0)).collect();
            let w = hat.mul_vec(&z);
            let aw = a.mul_vec(&w);
            prop_assert!(aw.iter().zip(&w).all(|(p, q)| (p - q * r).norm() < 1e-8 * scale));
        }
    }

    // φ̂ annihilates generalized eigenvectors of eigenvalues inside the disc.
    for c in mp
        .structure
        .eigenvalues
        .iter()
        .filter(|c| c.value.norm() < r * (1.0 - 1e-6))
    {
        let shifted = &a - &DenseMatrix::identity(n).scale(c.value);
        let p = mats::power(&shifted, c.multiplicity as u64).unwrap();
        let gen = mats::null_space(&p, 1e-7, Some(c.multiplicity)).unwrap();
        let killed = &hat * &gen;
        prop_assert!(killed.max_abs() < 1e-8 * scale, "residual {}", killed.max_abs());
    }

    prop_assert!(mp.route_gap < 1e-6, "route gap {}", mp.route_gap);
    Ok(())
}

#[test]
fn maximal_part_structure_on_fixed_maps() {
    for (i, tau) in fixed_maps().iter().enumerate() {
        check_maximal_part(tau, i as u64).unwrap();
    }
}

#[test]
fn jordan_map_has_nilpotent_maximal_part() {
    let mp = maximal_part(&linear(&jordan_map()), &tol()).unwrap();
    assert_eq!(mp.d, 2);
    assert!(!mp.idempotent);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn maximal_part_structure(seed in any::<u64>(), which in 0usize..3, count in 1usize..3) {
        let mut g = rng(seed);
        let shape = shapes()[which].clone();
        let tau = random_cp(&mut g, &shape, count);
        check_maximal_part(&tau, seed)?;
    }

    #[test]
    fn irreducible_maps_have_rank_one_maximal_part(seed in any::<u64>(), which in 0usize..3) {
        let mut g = rng(seed);
        let shape = shapes()[which].clone();
        let tau = random_cp(&mut g, &shape, 2);
        prop_assume!(irreducible_cp(&tau, &tol()).unwrap().irreducible);
        let phi = linear(&tau);
        let mp = maximal_part(&phi, &tol()).unwrap();
        prop_assert_eq!(mats::tolerant_rank(&coords(&phi, &mp), 1e-8), 1);
        let r = mp.r;
        let t128 = phi.superop().power(128);
        for _ in 0..8 {
            let x = random_psd(&mut g, &shape, 1);
            let y = mp.apply(x.matrix()).unwrap();
            let rep = mats::psd_checks(&y, &tol()).unwrap();
            prop_assert!(rep.min_eigenvalue > tol().psd_tol, "min eigenvalue {}", rep.min_eigenvalue);
            let z = t128.apply(x.matrix()).unwrap().scale_re(r.powi(-128));
            prop_assert!(z.op_norm() >= 1e-6 * x.matrix().op_norm());
        }
    }

    #[test]
    fn extension_preserves_radius_and_verdict(seed in any::<u64>(), which in 0usize..3, count in 1usize..3) {
        let mut g = rng(seed);
        let shape = shapes()[which].clone();
        let tau = random_cp(&mut g, &shape, count);
        let r = linear(&tau).spectral_radius().unwrap();
        let ext = extension_superop(&tau, &tol()).unwrap();
        prop_assert!((ext.spectral_radius().unwrap() - r).abs() < 1e-9 * r.max(1.0));
        let kraus = cpspectra::cpmap::kraus_of_choi(&ext.choi().hermitian_part(), &tol()).unwrap();
        let tilde = CpMap::new(kraus, AlgebraShape::full(shape.m())).unwrap();
        prop_assert_eq!(irreducible_cp(&tau, &tol()).unwrap().irreducible, irreducible_cp(&tilde, &tol()).unwrap().irreducible);
    }

    #[test]
    fn structure_clusters_are_consistent(seed in any::<u64>(), which in 0usize..3) {
        let mut g = rng(seed);
        let shape = shapes()[which].clone();
        let a = linear(&random_cp(&mut g, &shape, 2)).algebra_matrix();
        let s = spectral_structure(&a, &tol()).unwrap();
        prop_assert_eq!(s.eigenvalues.iter().map(|c| c.multiplicity).sum::<usize>(), a.rows());
        prop_assert!((s.r - mats::spectral_radius(&a).unwrap()).abs() < 1e-6 * s.r.max(1.0));
    }
}
