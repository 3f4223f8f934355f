use std::sync::OnceLock;

use serde::Serialize;

use super::belief::{Belief, SUM_TOL};
use super::ValueInterval;
use crate::error::{Error, Result};
use crate::geom;

/// Relative tolerance when deciding which actions tie for the receiver.
pub const TIE_TOL: f64 = 1e-9;

/// Largest number of hyperplane subsets examined when enumerating
/// best-response vertices.
const VERTEX_BUDGET: u128 = 250_000;

#[derive(Debug, Clone, Serialize)]
pub struct FiniteGame {
    states: Vec<String>,
    actions: Vec<String>,
    prior: Belief,
    sender_utility: Vec<f64>,
    /// Indexed `[state][action]`.
    receiver_utility: Vec<Vec<f64>>,
    #[serde(skip)]
    vertices: OnceLock<Vec<Belief>>,
}

impl FiniteGame {
    pub fn new(
        states: Vec<String>,
        actions: Vec<String>,
        prior: Vec<f64>,
        sender_utility: Vec<f64>,
        receiver_utility: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let n = states.len();
        let m = actions.len();
        if n < 2 {
            return Err(Error::InvalidGame(format!("need at least two states, got {n}")));
        }
        if m < 1 {
            return Err(Error::InvalidGame("need at least one action".into()));
        }
        if prior.len() != n {
            return Err(Error::InvalidGame(format!("prior has {} entries for {n} states", prior.len())));
        }
        if prior.iter().any(|&p| !(p > 0.0)) {
            return Err(Error::InvalidGame("prior must have full support".into()));
        }
        let prior = Belief::new(prior).map_err(|e| Error::InvalidGame(e.to_string()))?;
        if sender_utility.len() != m {
            return Err(Error::InvalidGame(format!(
                "sender utility has {} entries for {m} actions",
                sender_utility.len()
            )));
        }
        if receiver_utility.len() != n || receiver_utility.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidGame("receiver utility must be states × actions".into()));
        }
        let finite = sender_utility.iter().chain(receiver_utility.iter().flatten()).all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidGame("utilities must be finite".into()));
        }
        Ok(Self {
            states,
            actions,
            prior,
            sender_utility,
            receiver_utility,
            vertices: OnceLock::new(),
        })
    }

    /// Same game with the labels generated as `w0, w1, …` and `a0, a1, …`.
    pub fn from_tables(prior: Vec<f64>, sender_utility: Vec<f64>, receiver_utility: Vec<Vec<f64>>) -> Result<Self> {
        let states = (0..prior.len()).map(|i| format!("w{i}")).collect();
        let actions = (0..sender_utility.len()).map(|j| format!("a{j}")).collect();
        Self::new(states, actions, prior, sender_utility, receiver_utility)
    }

    pub fn with_prior(&self, prior: &Belief) -> Result<Self> {
        let mut game = Self::new(
            self.states.clone(),
            self.actions.clone(),
            prior.coords().to_vec(),
            self.sender_utility.clone(),
            self.receiver_utility.clone(),
        )?;
        if let Some(v) = self.vertices.get() {
            let _ = game.vertices.set(v.clone());
        }
        game.prior = prior.clone();
        Ok(game)
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn prior(&self) -> &Belief {
        &self.prior
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn sender_utility(&self) -> &[f64] {
        &self.sender_utility
    }

    pub fn receiver_utility(&self) -> &[Vec<f64>] {
        &self.receiver_utility
    }

    /// Receiver's expected utility of each action at `mu`.
    pub fn expected_receiver_utility(&self, mu: &[f64]) -> Vec<f64> {
        (0..self.num_actions())
            .map(|a| {
                mu.iter()
                    .zip(&self.receiver_utility)
                    .map(|(w, row)| w * row[a])
                    .sum()
            })
            .collect()
    }

    fn tie_tolerance(&self) -> f64 {
        let scale = self
            .receiver_utility
            .iter()
            .flatten()
            .fold(1.0_f64, |m, v| m.max(v.abs()));
        TIE_TOL * scale
    }

    pub fn value_correspondence(&self, mu: &[f64]) -> ValueInterval {
        let payoffs = self.expected_receiver_utility(mu);
        let best = payoffs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let tol = self.tie_tolerance();
        let best_actions: Vec<usize> = (0..payoffs.len())
            .filter(|&a| payoffs[a] >= best - tol)
            .collect();
        let lo = best_actions
            .iter()
            .map(|&a| self.sender_utility[a])
            .fold(f64::INFINITY, f64::min);
        let hi = best_actions
            .iter()
            .map(|&a| self.sender_utility[a])
            .fold(f64::NEG_INFINITY, f64::max);
        ValueInterval { lo, hi, best_actions }
    }

    /// Receiver's indirect utility `max_a E_μ u_R(ω, a)`.
    pub fn receiver_value(&self, mu: &[f64]) -> f64 {
        self.expected_receiver_utility(mu)
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Vertices of the arrangement cut out by the simplex facets and the
    /// receiver's indifference hyperplanes. Every vertex of every
    /// best-response region, and of every intersection of such regions, is in
    /// this set. Empty when the enumeration would exceed the work budget.
    pub fn region_vertices(&self) -> &[Belief] {
        self.vertices.get_or_init(|| {
            let n = self.num_states();
            let m = self.num_actions();
            let mut planes: Vec<Vec<f64>> = (0..n)
                .map(|i| {
                    let mut h = vec![0.0; n];
                    h[i] = 1.0;
                    h
                })
                .collect();
            for a in 0..m {
                for b in a + 1..m {
                    let h: Vec<f64> = (0..n)
                        .map(|w| self.receiver_utility[w][a] - self.receiver_utility[w][b])
                        .collect();
                    if h.iter().any(|v| v.abs() > SUM_TOL) {
                        planes.push(h);
                    }
                }
            }
            if geom::binomial(planes.len(), n - 1) > VERTEX_BUDGET {
                return Vec::new();
            }
            geom::arrangement_vertices(&planes, n)
        })
    }
}
