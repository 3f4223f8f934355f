use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use super::belief::Belief;
use super::families::Family;
use crate::error::{Error, Result};

pub type MomentFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A game whose sender value depends on the posterior only through a linear
/// moment `T(μ) = Σ μ(ω) T(δ_ω)`.
#[derive(Clone)]
pub struct MomentGame {
    embedding: Vec<Vec<f64>>,
    prior: Belief,
    sender: MomentFn,
    receiver: Option<MomentFn>,
    family: Family,
}

impl fmt::Debug for MomentGame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MomentGame")
            .field("embedding", &self.embedding)
            .field("prior", &self.prior)
            .field("family", &self.family)
            .finish()
    }
}

impl MomentGame {
    pub fn new(
        embedding: Vec<Vec<f64>>,
        prior: Belief,
        sender: MomentFn,
        receiver: Option<MomentFn>,
        family: Family,
    ) -> Result<Self> {
        let n = embedding.len();
        if n < 2 {
            return Err(Error::InvalidGame(format!("need at least two states, got {n}")));
        }
        if prior.dim() != n {
            return Err(Error::InvalidGame(format!("prior has {} entries for {n} states", prior.dim())));
        }
        let k = embedding[0].len();
        if k == 0 || embedding.iter().any(|x| x.len() != k) {
            return Err(Error::InvalidGame("state embedding must have a common positive dimension".into()));
        }
        if k > n - 1 {
            return Err(Error::InvalidGame(format!("moment dimension {k} exceeds n − 1 = {}", n - 1)));
        }
        let diffs = DMatrix::from_fn(n - 1, k, |i, j| embedding[i + 1][j] - embedding[0][j]);
        if diffs.rank(1e-9) != k {
            return Err(Error::InvalidGame("state embedding is not of full rank".into()));
        }
        Ok(Self { embedding, prior, sender, receiver, family })
    }

    pub fn with_prior(&self, prior: &Belief) -> Result<Self> {
        if prior.dim() != self.num_states() {
            return Err(Error::DimensionMismatch("prior length".into()));
        }
        let mut game = self.clone();
        game.prior = prior.clone();
        Ok(game)
    }

    pub fn num_states(&self) -> usize {
        self.embedding.len()
    }

    pub fn moment_dim(&self) -> usize {
        self.embedding[0].len()
    }

    pub fn embedding(&self) -> &[Vec<f64>] {
        &self.embedding
    }

    pub fn prior(&self) -> &Belief {
        &self.prior
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn has_receiver_value(&self) -> bool {
        self.receiver.is_some()
    }

    pub fn moment(&self, mu: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.moment_dim()];
        for (w, t) in mu.iter().zip(&self.embedding) {
            for (xi, ti) in x.iter_mut().zip(t) {
                *xi += w * ti;
            }
        }
        x
    }

    pub fn value_at_moment(&self, x: &[f64]) -> f64 {
        (self.sender)(x)
    }

    pub fn moment_value(&self, mu: &[f64]) -> Result<f64> {
        let v = self.value_at_moment(&self.moment(mu));
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Domain(format!("sender value is {v} at {mu:?}")))
        }
    }

    pub fn receiver_value_at_moment(&self, x: &[f64]) -> Result<f64> {
        match &self.receiver {
            Some(f) => Ok(f(x)),
            None => Err(Error::MissingReceiverValue),
        }
    }

    pub fn receiver_value(&self, mu: &[f64]) -> Result<f64> {
        self.receiver_value_at_moment(&self.moment(mu))
    }

    /// `(min, max)` of the one-dimensional moment over the states.
    pub fn moment_range(&self) -> (f64, f64) {
        self.embedding
            .iter()
            .map(|t| t[0])
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentGameSummary<'a> {
    pub embedding: &'a [Vec<f64>],
    pub prior: &'a Belief,
    pub family: &'a Family,
}

impl MomentGame {
    pub fn summary(&self) -> MomentGameSummary<'_> {
        MomentGameSummary { embedding: &self.embedding, prior: &self.prior, family: &self.family }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::families;

    #[test]
    fn rotated_s_values() {
        let game = families::rotated_s(209.0 / 409.0, 0.3).unwrap();
        assert!(game.moment_value(&[0.45, 0.55]).unwrap().abs() < 1e-15);
        assert_eq!(game.moment_value(&[1.0, 0.0]).unwrap(), 0.0);
        let v34 = game.moment_value(&[0.25, 0.75]).unwrap();
        assert!((v34 - 12.0 / 409.0).abs() < 1e-15);
    }

    #[test]
    fn mean_variance_zero_at_base_vertex() {
        let game = families::mean_variance(4.0, &[0.0, 0.5, 1.0], None).unwrap();
        assert_eq!(game.moment_value(&[1.0, 0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn rank_deficient_embedding_rejected() {
        let f: MomentFn = Arc::new(|x: &[f64]| x[0]);
        let err = MomentGame::new(
            vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]],
            Belief::uniform(3),
            f,
            None,
            Family::Custom { label: "test".into() },
        );
        assert!(err.is_err());
    }
}
