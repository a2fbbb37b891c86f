mod support;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use support::*;

#[test]
fn metrics_match_exact_rational_recomputation() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..200 {
        let gap = metric_oracle_gap(&mut rng);
        assert!(gap <= 1e-12, "input {i}: gap {gap}");
    }
}

#[test]
fn exact_oracles_agree_on_hand_values() {
    assert_eq!(
        exact_average_runs(&[vec![1.0, 1.0], vec![3.0, 3.0]]),
        vec![2.0, 2.0]
    );
    assert_eq!(exact_normalize(&[10.0, 5.0, 0.0]), vec![1.0, 0.5, 0.0]);
    assert_eq!(exact_normalize(&[7.0, 7.0]), vec![0.0, 0.0]);
    let h = exact_aggregate_h(&[vec![1.0, 0.0], vec![0.0, 0.0]]);
    assert_eq!(h, vec![0.5f64.powf(0.1), 0.0]);
}
