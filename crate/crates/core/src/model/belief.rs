use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SUM_TOL: f64 = 1e-12;

/// A probability vector over the states of a game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Belief(Vec<f64>);

impl Belief {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidBelief("empty vector".into()));
        }
        if coords.iter().any(|c| !c.is_finite() || *c < -SUM_TOL || *c > 1.0 + SUM_TOL) {
            return Err(Error::InvalidBelief(format!("entry out of [0,1] in {coords:?}")));
        }
        let sum: f64 = coords.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL * coords.len() as f64 {
            return Err(Error::InvalidBelief(format!("entries sum to {sum}")));
        }
        Ok(Self(coords.into_iter().map(|c| c.clamp(0.0, 1.0)).collect()))
    }

    /// Clamps negatives and renormalises; for points produced by arithmetic
    /// that is known to stay on the simplex up to rounding.
    pub fn normalized(mut coords: Vec<f64>) -> Self {
        for c in coords.iter_mut() {
            if *c < 0.0 {
                *c = 0.0;
            }
        }
        let sum: f64 = coords.iter().sum();
        if sum > 0.0 {
            for c in coords.iter_mut() {
                *c /= sum;
            }
        }
        Self(coords)
    }

    pub fn vertex(n: usize, state: usize) -> Self {
        let mut coords = vec![0.0; n];
        coords[state] = 1.0;
        Self(coords)
    }

    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    /// Binary belief putting mass `x` on the second state.
    pub fn binary(x: f64) -> Result<Self> {
        Self::new(vec![1.0 - x, x])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// `lambda · self + (1 − lambda) · other`
    pub fn mix(&self, other: &Belief, lambda: f64) -> Belief {
        Belief::normalized(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
                .collect(),
        )
    }

    pub fn distance(&self, other: &Belief) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn is_interior(&self) -> bool {
        self.0.iter().all(|&c| c > 0.0)
    }
}

impl AsRef<[f64]> for Belief {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl std::ops::Index<usize> for Belief {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}
