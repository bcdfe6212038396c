use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sepscan::onesided::{
    ccnr_test, entropic_test, majorization_test, pipeline, ppt_test, reduction_test, two_by_n_pt_test,
};
use sepscan::states::{random_density, random_product_mixture, random_unitary, werner};
use sepscan::{Density64, Outcome, Tolerances, Verdict};

fn all_tests(rho: &Density64, tol: &Tolerances) -> Vec<Verdict> {
    let mut out = vec![
        ppt_test(rho, tol),
        reduction_test(rho, tol),
        majorization_test(rho, tol),
        ccnr_test(rho, tol),
        entropic_test(rho, 1, tol).unwrap(),
        entropic_test(rho, 2, tol).unwrap(),
        pipeline(rho, tol),
    ];
    if rho.m() == 2 {
        out.push(two_by_n_pt_test(rho, tol).unwrap());
    }
    out
}

#[test]
fn necessary_tests_never_reject_product_mixtures() {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(200);
    for _ in 0..200 {
        let (m, n) = (rng.random_range(2..=3), rng.random_range(2..=3));
        let terms = rng.random_range(1..=2 * m * n);
        let (rho, _) = random_product_mixture(m, n, terms, &mut rng);
        for v in all_tests(&rho, &tol) {
            assert_ne!(v.outcome, Outcome::Entangled, "{v:?} on a {m}x{n} mixture of {terms}");
        }
    }
}

#[test]
fn reduction_detections_are_ppt_detections() {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut detected = 0;
    for i in 0..300 {
        let n = 2 + i % 3;
        let rho = random_density(2, n, &mut rng);
        if reduction_test(&rho, &tol).outcome == Outcome::Entangled {
            detected += 1;
            assert_eq!(ppt_test(&rho, &tol).outcome, Outcome::Entangled);
        }
    }
    // also along the Werner line, where reduction fires
    for k in 0..20 {
        let rho = werner(2, 0.34 + 0.033 * k as f64).unwrap();
        assert_eq!(reduction_test(&rho, &tol).outcome, Outcome::Entangled);
        assert_eq!(ppt_test(&rho, &tol).outcome, Outcome::Entangled);
        detected += 1;
    }
    assert!(detected > 20);
}

#[test]
fn verdicts_are_local_unitary_invariant() {
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    for i in 0..50 {
        let (m, n) = if i % 2 == 0 { (2, 2) } else { (2, 3) };
        let rho = if i % 3 == 0 {
            random_product_mixture(m, n, 3, &mut rng).0
        } else {
            random_density(m, n, &mut rng)
        };
        let (u, v) = (random_unitary(m, &mut rng), random_unitary(n, &mut rng));
        let moved = rho.local_unitary(&u, &v);
        let before: Vec<Outcome> = all_tests(&rho, &tol).iter().map(|v| v.outcome).collect();
        let after: Vec<Outcome> = all_tests(&moved, &tol).iter().map(|v| v.outcome).collect();
        assert_eq!(before, after);
    }
}
