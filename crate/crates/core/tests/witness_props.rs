use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sepscan::nets::{DeltaNet, NetKind};
use sepscan::onesided::ppt_test;
use sepscan::states::{bell, random_density, random_product_mixture, random_unitary};
use sepscan::witness::{iteration_cap, revalidate, wsep_solve};
use sepscan::{DensityMatrix, Outcome, Subsystem, Tolerances};

#[test]
fn agrees_with_ppt_away_from_the_boundary() {
    let delta = 0.1;
    let net = DeltaNet::build(2, delta / 10.0, NetKind::Projective).unwrap();
    let finer = DeltaNet::build(2, delta / 20.0, NetKind::Projective).unwrap();
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut checked = 0;
    for i in 0..16 {
        // separable states pushed inside by mixing with I/4, and entangled
        // ones pulled out by mixing with a locally rotated Bell state
        let rho = if i % 2 == 0 {
            let pm = random_product_mixture(2, 2, 3, &mut rng).0;
            DensityMatrix::mixture(&[(0.5, &pm), (0.5, &DensityMatrix::maximally_mixed(2, 2))]).unwrap()
        } else {
            let (u, v) = (random_unitary(2, &mut rng), random_unitary(2, &mut rng));
            let bell = bell().local_unitary(&u, &v);
            let t = rng.random_range(0.6..1.0);
            DensityMatrix::mixture(&[(t, &bell), (1.0 - t, &random_density(2, 2, &mut rng))]).unwrap()
        };
        let lam = rho.partial_transpose(Subsystem::B).min_eigenvalue();
        if lam.abs() <= delta {
            continue;
        }
        checked += 1;
        let out = wsep_solve(&rho, delta, &net).unwrap();
        assert!(out.iterations <= iteration_cap(2, 2, delta));
        assert_eq!(out.verdict.outcome, ppt_test(&rho, &tol).outcome, "λ_min = {lam}");
        if let Some(cert) = &out.witness {
            assert!(revalidate(cert, &rho, &finer).unwrap() > -delta / 5.0);
        }
    }
    assert!(checked >= 8);
}

#[test]
fn verdicts_are_local_unitary_covariant() {
    let net = DeltaNet::build(2, 0.01, NetKind::Projective).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let rho = sepscan::states::werner(2, 0.8).unwrap();
    for _ in 0..3 {
        let (u, v) = (random_unitary(2, &mut rng), random_unitary(2, &mut rng));
        let moved = rho.local_unitary(&u, &v);
        assert_eq!(wsep_solve(&moved, 0.1, &net).unwrap().verdict.outcome, Outcome::Entangled);
    }
}
