//! Seeded random generation of small-integer exact data.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::q_int;
use crate::linalg::Matrix;
use crate::Q;

/// Default bound for random integer entries.
pub const DEFAULT_ENTRY_BOUND: i64 = 10;

pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer; used to derive independent sub-seeds.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Sub-seed for shard `index` of a run seeded by `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ index.wrapping_mul(0xd6e8_feb8_6659_fd93))
}

pub fn random_int<R: Rng + ?Sized>(rng: &mut R, bound: i64) -> i64 {
    rng.gen_range(-bound..=bound)
}

pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, len: usize, bound: i64) -> Vec<Q> {
    (0..len).map(|_| q_int(random_int(rng, bound))).collect()
}

pub fn random_int_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, bound: i64) -> Vec<Vec<i64>> {
    (0..rows).map(|_| (0..cols).map(|_| random_int(rng, bound)).collect()).collect()
}

pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, bound: i64) -> Matrix<Q> {
    Matrix::from_fn(rows, cols, |_, _| q_int(random_int(rng, bound)))
}

pub fn random_symmetric<R: Rng + ?Sized>(rng: &mut R, n: usize, bound: i64) -> Matrix<Q> {
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = q_int(random_int(rng, bound));
            m[(i, j)] = v.clone();
            m[(j, i)] = v;
        }
    }
    m
}

/// Random matrix of full row rank `rows` (resampled until independent).
pub fn random_full_rank<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize, bound: i64) -> Matrix<Q> {
    loop {
        let m = random_matrix(rng, rows, cols, bound);
        if m.rank() == rows {
            return m;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_reproducible() {
        let a = random_int_matrix(&mut rng_from_seed(7), 3, 3, 10);
        let b = random_int_matrix(&mut rng_from_seed(7), 3, 3, 10);
        assert_eq!(a, b);
        assert_ne!(derive_seed(0, 1), derive_seed(0, 2));
        assert_ne!(derive_seed(1, 0), derive_seed(0, 1));
    }
}
