use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sepscan::nets::{DeltaNet, NetKind};
use sepscan::states::random_hermitian;
use sepscan::wopt::{quadratic_form, wopt_max};
use sepscan::HermitianOp;

fn unit_hs(d: usize, rng: &mut ChaCha8Rng) -> HermitianOp<f64> {
    let h = random_hermitian(d, rng);
    let s = 1.0 / h.frobenius_norm();
    h.scale(s)
}

#[test]
fn coarse_and_fine_maxima_respect_the_guarantee() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let coarse = DeltaNet::build(2, 0.4, NetKind::Complex).unwrap();
    let fine = DeltaNet::build(2, 0.1, NetKind::Complex).unwrap();
    for i in 0..20 {
        let n = 2 + i % 2;
        let a = unit_hs(2 * n, &mut rng);
        let c = wopt_max(&a, 2, n, &coarse).unwrap();
        let f = wopt_max(&a, 2, n, &fine).unwrap();
        assert!(c.value <= f.value + 1e-8 || c.value - f.value <= 1e-8);
        assert!(f.value - c.value <= 0.8);
        for r in [&c, &f] {
            let again = quadratic_form(&a, &r.maximizer.alpha, &r.maximizer.beta);
            assert!((again - r.value).abs() < 1e-9);
        }
    }
}

#[test]
fn eigen_side_matches_a_direct_pair_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let net = DeltaNet::build(2, 0.2, NetKind::Projective).unwrap();
    for _ in 0..5 {
        let a = unit_hs(4, &mut rng);
        let r = wopt_max(&a, 2, 2, &net).unwrap();
        let mut pair = f64::NEG_INFINITY;
        for i in 0..net.len() {
            for j in 0..net.len() {
                pair = pair.max(quadratic_form(&a, &net.point(i), &net.point(j)));
            }
        }
        // optimizing B exactly can only help, and by at most the net error
        assert!(r.value >= pair - 1e-12);
        assert!(r.value - pair <= r.guarantee);
    }
}
