//! Games, beliefs, and the sender's value correspondence.

mod belief;
pub mod families;
mod finite;
mod io;
mod moment;
mod outcome;
mod plan;

use serde::Serialize;

pub use belief::Belief;
pub use families::Family;
pub use finite::{FiniteGame, TIE_TOL};
pub use io::{parse_game, parse_plan, GameFile};
pub use moment::{MomentFn, MomentGame};
pub use outcome::{outcome_to_plan, plan_to_outcome, OutcomeDistribution, CONSISTENCY_TOL, OBEDIENCE_TOL};
pub(crate) use outcome::outcome_to_plan_at;
pub use plan::{Atom, BeliefPlan, MERGE_TOL};

use crate::error::{Error, Result};

/// `[lo, hi]` is the set of sender payoffs consistent with some receiver
/// best response at a belief.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValueInterval {
    pub lo: f64,
    pub hi: f64,
    pub best_actions: Vec<usize>,
}

/// What the solvers need to know about a game.
pub trait ValueModel: Sync {
    fn num_states(&self) -> usize;

    fn prior(&self) -> &Belief;

    /// `(V_lo(μ), V_hi(μ))`.
    fn interval(&self, mu: &[f64]) -> (f64, f64);

    /// Extra candidate posteriors beyond a grid. For finite games these make
    /// the belief-grid programs exact.
    fn critical_beliefs(&self) -> &[Belief] {
        &[]
    }

    /// Exact candidate payoff levels, when the payoff set is finite.
    fn payoff_levels(&self) -> Option<Vec<f64>> {
        None
    }

    fn receiver_value(&self, mu: &[f64]) -> Result<f64>;

    fn singleton_valued(&self) -> bool;
}

impl ValueModel for FiniteGame {
    fn num_states(&self) -> usize {
        FiniteGame::num_states(self)
    }

    fn prior(&self) -> &Belief {
        FiniteGame::prior(self)
    }

    fn interval(&self, mu: &[f64]) -> (f64, f64) {
        let vi = self.value_correspondence(mu);
        (vi.lo, vi.hi)
    }

    fn critical_beliefs(&self) -> &[Belief] {
        self.region_vertices()
    }

    fn payoff_levels(&self) -> Option<Vec<f64>> {
        let mut levels = self.sender_utility().to_vec();
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        Some(levels)
    }

    fn receiver_value(&self, mu: &[f64]) -> Result<f64> {
        Ok(FiniteGame::receiver_value(self, mu))
    }

    fn singleton_valued(&self) -> bool {
        let u = self.sender_utility();
        u.iter().all(|v| *v == u[0])
    }
}

impl ValueModel for MomentGame {
    fn num_states(&self) -> usize {
        MomentGame::num_states(self)
    }

    fn prior(&self) -> &Belief {
        MomentGame::prior(self)
    }

    fn interval(&self, mu: &[f64]) -> (f64, f64) {
        let v = self.value_at_moment(&self.moment(mu));
        (v, v)
    }

    fn receiver_value(&self, mu: &[f64]) -> Result<f64> {
        MomentGame::receiver_value(self, mu)
    }

    fn singleton_valued(&self) -> bool {
        true
    }
}

#[derive(Debug, Clone)]
pub enum Game {
    Finite(FiniteGame),
    Moment(MomentGame),
}

impl Game {
    pub fn model(&self) -> &dyn ValueModel {
        match self {
            Game::Finite(g) => g,
            Game::Moment(g) => g,
        }
    }

    pub fn num_states(&self) -> usize {
        self.model().num_states()
    }

    pub fn prior(&self) -> &Belief {
        self.model().prior()
    }

    pub fn with_prior(&self, prior: &Belief) -> Result<Game> {
        Ok(match self {
            Game::Finite(g) => Game::Finite(g.with_prior(prior)?),
            Game::Moment(g) => Game::Moment(g.with_prior(prior)?),
        })
    }

    pub fn as_finite(&self) -> Option<&FiniteGame> {
        match self {
            Game::Finite(g) => Some(g),
            Game::Moment(_) => None,
        }
    }

    pub fn as_moment(&self) -> Option<&MomentGame> {
        match self {
            Game::Moment(g) => Some(g),
            Game::Finite(_) => None,
        }
    }

    /// Accepts a belief of the right length for this game.
    pub fn check_belief(&self, mu: &Belief) -> Result<()> {
        if mu.dim() != self.num_states() {
            return Err(Error::DimensionMismatch(format!(
                "belief has {} entries for {} states",
                mu.dim(),
                self.num_states()
            )));
        }
        Ok(())
    }
}

impl ValueModel for Game {
    fn num_states(&self) -> usize {
        self.model().num_states()
    }

    fn prior(&self) -> &Belief {
        self.model().prior()
    }

    fn interval(&self, mu: &[f64]) -> (f64, f64) {
        self.model().interval(mu)
    }

    fn critical_beliefs(&self) -> &[Belief] {
        self.model().critical_beliefs()
    }

    fn payoff_levels(&self) -> Option<Vec<f64>> {
        self.model().payoff_levels()
    }

    fn receiver_value(&self, mu: &[f64]) -> Result<f64> {
        self.model().receiver_value(mu)
    }

    fn singleton_valued(&self) -> bool {
        self.model().singleton_valued()
    }
}

impl From<FiniteGame> for Game {
    fn from(g: FiniteGame) -> Self {
        Game::Finite(g)
    }
}

impl From<MomentGame> for Game {
    fn from(g: MomentGame) -> Self {
        Game::Moment(g)
    }
}
