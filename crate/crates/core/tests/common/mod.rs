//! Test-only oracles and generators shared by the integration tests.
#![allow(dead_code)]

use xorproof::games::{random_game, TransversalGame};
use xorproof::RngState;

/// `out[u] = sum_z (-1)^{popcount(u & z)} v[z]` by direct double sum.
pub fn naive_walsh(v: &[f64]) -> Vec<f64> {
    (0..v.len())
        .map(|u| {
            v.iter()
                .enumerate()
                .map(|(z, x)| if (u & z).count_ones() % 2 == 1 { -x } else { *x })
                .sum()
        })
        .collect()
}

pub fn random_vector(n: usize, rng: &mut RngState) -> Vec<f64> {
    (0..n).map(|_| 2.0 * rng.next_f64() - 1.0).collect()
}

/// Game with `m` in `min_m..=max_m` and 1 to 16 clauses.
pub fn game_in(min_m: usize, max_m: usize, rng: &mut RngState) -> TransversalGame {
    let m = min_m + rng.below((max_m - min_m + 1) as u64) as usize;
    let clauses = 1 + rng.below(16) as usize;
    random_game(m, clauses, 4, rng).unwrap()
}
