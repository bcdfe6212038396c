use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sepscan::gadgets::{motzkin_straus_value, verify_chain, Graph};

#[test]
fn grid_maximum_matches_clique_number_on_six_vertices() {
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    for _ in 0..20 {
        let g = Graph::random(6, 0.5, &mut rng);
        let ms = motzkin_straus_value(&g).unwrap();
        let gap = ms.value - ms.grid_max.unwrap();
        assert!((0.0..=0.02).contains(&(gap + 1e-12)), "gap {gap}");
    }
}

#[test]
fn chain_preserves_answers_and_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..8 {
        let n = rng.random_range(2..=4);
        let g = Graph::random(n, 0.6, &mut rng);
        let c = rng.random_range(2..=n);
        let r = verify_chain(&g, c, 0.05).unwrap();
        assert!(r.consistent, "{r:?}");
        assert!((r.rsdf_value - r.h_value).abs() < 1e-12);
        assert!(r.wval_value <= r.h_value.sqrt() + 1e-9);
        assert!(r.h_value.sqrt() - r.wval_value <= r.guarantee);
    }
}
