//! Seeded random finite games and mediation outcomes for test batteries.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::model::{Belief, FiniteGame, OutcomeDistribution};
use crate::solve::extreme_md_outcome;

pub const SEED_VAR: &str = "MEDSOLVE_SEED";
pub const DEFAULT_SEED: u64 = 20_240_601;

/// Smallest prior entry drawn for a random game.
pub const MIN_PRIOR: f64 = 0.05;

/// `MEDSOLVE_SEED` when set and numeric, otherwise the default seed.
pub fn seed_from_env() -> u64 {
    std::env::var(SEED_VAR).ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_SEED)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_prior<R: Rng>(rng: &mut R, n: usize) -> Belief {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let free = 1.0 - MIN_PRIOR * n as f64;
    Belief::normalized(raw.iter().map(|r| MIN_PRIOR + free * r / total).collect())
}

/// Sender payoffs in `[0, 1]`, receiver payoffs in `[−1, 1]`.
pub fn random_game<R: Rng>(rng: &mut R, n: usize, m: usize) -> Result<FiniteGame> {
    let prior = random_prior(rng, n);
    let us = (0..m).map(|_| rng.gen_range(0.0..1.0)).collect();
    let ur = (0..n).map(|_| (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    FiniteGame::from_tables(prior.into_inner(), us, ur)
}

/// `count` games with `n ∈ 2..=4` states and `m ∈ 2..=6` actions.
pub fn finite_battery(seed: u64, count: usize) -> Result<Vec<FiniteGame>> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(2..=4);
            let m = rng.gen_range(2..=6);
            random_game(&mut rng, n, m)
        })
        .collect()
}

/// A vertex of the game's mediation polytope chosen by a random linear
/// objective.
pub fn random_md_outcome<R: Rng>(rng: &mut R, game: &FiniteGame) -> Result<OutcomeDistribution> {
    let weights: Vec<Vec<f64>> = (0..game.num_states())
        .map(|_| (0..game.num_actions()).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    extreme_md_outcome(game, game.prior(), &weights)
}
