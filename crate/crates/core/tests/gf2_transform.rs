mod common;

use common::{naive_walsh, random_vector};
use proptest::prelude::*;
use xorproof::gf2::{fwht, fwht_in_place};
use xorproof::RngState;

#[test]
fn matches_double_sum_at_m6() {
    let mut rng = RngState::from_seed(17);
    for _ in 0..10 {
        let v = random_vector(64, &mut rng);
        let fast = fwht(&v).unwrap();
        let slow = naive_walsh(&v);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        }
    }
}

#[test]
fn matches_double_sum_up_to_m8() {
    let mut rng = RngState::from_seed(18);
    for m in 0..=8 {
        let v = random_vector(1 << m, &mut rng);
        let fast = fwht(&v).unwrap();
        for (a, b) in fast.iter().zip(naive_walsh(&v)) {
            assert!((a - b).abs() <= 1e-12);
        }
    }
}

#[test]
fn zero_maps_to_zero_exactly() {
    for m in 0..=12 {
        assert!(fwht(&vec![0.0; 1 << m]).unwrap().iter().all(|x| *x == 0.0));
    }
}

#[test]
fn rejects_non_power_of_two() {
    assert!(fwht_in_place(&mut [1.0, 2.0, 3.0]).is_err());
    assert!(fwht(&[]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn applying_twice_scales_by_length(m in 1usize..=12, seed in any::<u64>()) {
        let mut rng = RngState::from_seed(seed);
        let v = random_vector(1 << m, &mut rng);
        let twice = fwht(&fwht(&v).unwrap()).unwrap();
        let n = (1u64 << m) as f64;
        let vmax = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        for (x, y) in v.iter().zip(&twice) {
            prop_assert!((y - n * x).abs() <= 1e-12 * n * vmax);
        }
    }
}
