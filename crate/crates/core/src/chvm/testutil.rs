//! Shared test-model generators.

use rand::Rng;

use crate::rat::{ratio, Rational};

use super::ContextualModel;

pub(crate) fn grid_dist<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<Rational> {
    let mut raw: Vec<i64> = (0..n).map(|_| rng.random_range(0..16)).collect();
    if raw.iter().all(|&w| w == 0) {
        raw[0] = 1;
    }
    let total: i64 = raw.iter().sum();
    raw.into_iter().map(|w| ratio(w, total)).collect()
}

pub(crate) fn random_model<R: Rng + ?Sized>(
    k: usize,
    m: usize,
    allow_zero: bool,
    rng: &mut R,
) -> ContextualModel {
    ContextualModel::random(k, m, allow_zero, rng)
}
