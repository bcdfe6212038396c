use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sepscan::hilbert::{
    eigh, is_unnormalized_pure, partial_transpose_matrix, realign_matrix, HermitianBasis, HermitianOp,
};
use sepscan::states::{random_density, random_hermitian, random_unit_vector};
use sepscan::{ComplexMatrix, Subsystem};

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn bloch_map_is_an_isometry(seed in any::<u64>(), m in 2usize..4, n in 2usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let basis = HermitianBasis::<f64>::new(m, n);
        let a = random_hermitian(m * n, &mut rng);
        let b = random_hermitian(m * n, &mut rng);
        let (va, vb) = (basis.to_bloch(&a).unwrap(), basis.to_bloch(&b).unwrap());
        let rhs = va.dot(&vb) + a.trace() * b.trace() / (m * n) as f64;
        prop_assert!((a.hs_inner(&b) - rhs).abs() < 1e-8);
    }

    #[test]
    fn partial_transposes(seed in any::<u64>(), m in 2usize..4, n in 2usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_density(m, n, &mut rng);
        let x = rho.matrix();
        for side in [Subsystem::A, Subsystem::B] {
            let twice = partial_transpose_matrix(&partial_transpose_matrix(x, m, n, side), m, n, side);
            prop_assert_eq!(&twice, x);
        }
        let ta = sorted(rho.partial_transpose(Subsystem::A).eigenvalues());
        let tb = sorted(rho.partial_transpose(Subsystem::B).eigenvalues());
        for (p, q) in ta.iter().zip(&tb) {
            prop_assert!((p - q).abs() < 1e-8);
        }
    }

    #[test]
    fn realignment_is_linear(seed in any::<u64>(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_hermitian(6, &mut rng).into_matrix();
        let y = random_hermitian(6, &mut rng).into_matrix();
        let comb = &x.scale_real(&a) + &y.scale_real(&b);
        let lhs = realign_matrix(&comb, 2, 3);
        let rhs = &realign_matrix(&x, 2, 3).scale_real(&a) + &realign_matrix(&y, 2, 3).scale_real(&b);
        prop_assert!(lhs.distance(&rhs) < 1e-10);
    }

    #[test]
    fn eigen_decomposition(seed in any::<u64>(), d in 1usize..13) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hermitian(d, &mut rng);
        let e = eigh(h.matrix());
        let sum: f64 = e.values.iter().sum();
        prop_assert!((sum - h.trace()).abs() < 1e-9);
        let rebuilt = e.vectors.matmul(&ComplexMatrix::diagonal(&e.values)).matmul(&e.vectors.dagger());
        prop_assert!(rebuilt.distance(h.matrix()) <= 1e-8 * d as f64);
    }

    #[test]
    fn purity_predicate(seed in any::<u64>(), c in 0.01f64..=1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let psi = random_unit_vector(4, &mut rng);
        let pure = HermitianOp::projector(&psi).scale(c);
        prop_assert!(is_unnormalized_pure(&pure, c, 1e-8).unwrap());
        let phi = random_unit_vector(4, &mut rng);
        let t: f64 = 0.3;
        let mixed = HermitianOp::projector(&psi).scale(c * t).add(&HermitianOp::projector(&phi).scale(c * (1.0 - t)));
        prop_assert!(!is_unnormalized_pure(&mixed, c, 1e-8).unwrap());
    }
}

#[test]
fn reconstruction_at_largest_supported_dimension() {
    let mut rng = ChaCha8Rng::seed_from_u64(36);
    let h = random_hermitian(36, &mut rng);
    let e = eigh(h.matrix());
    let rebuilt = e.vectors.matmul(&ComplexMatrix::diagonal(&e.values)).matmul(&e.vectors.dagger());
    assert!(rebuilt.distance(h.matrix()) <= 1e-8 * 36.0);
    assert!(e.vectors.dagger().matmul(&e.vectors).distance(&ComplexMatrix::identity(36)) < 1e-10);
}
