use serde::{Deserialize, Serialize};

use super::belief::Belief;
use super::finite::FiniteGame;
use super::plan::{Atom, BeliefPlan, MERGE_TOL};
use crate::error::{Error, Result};

/// Obedience slack allowed when decomposing a selection into actions.
pub const OBEDIENCE_TOL: f64 = 1e-9;

/// Prior-consistency tolerance for outcome rows.
pub const CONSISTENCY_TOL: f64 = 1e-9;

/// Recommendations carrying less total probability are dropped.
const MESSAGE_MASS_TOL: f64 = 1e-11;

/// Joint distribution over states × actions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    pub table: Vec<Vec<f64>>,
}

impl OutcomeDistribution {
    pub fn zeros(n: usize, m: usize) -> Self {
        Self { table: vec![vec![0.0; m]; n] }
    }

    pub fn state_marginal(&self) -> Vec<f64> {
        self.table.iter().map(|row| row.iter().sum()).collect()
    }

    pub fn action_marginal(&self) -> Vec<f64> {
        let m = self.table.first().map_or(0, Vec::len);
        (0..m).map(|a| self.table.iter().map(|row| row[a]).sum()).collect()
    }

    pub fn sender_payoff(&self, game: &FiniteGame) -> f64 {
        self.table
            .iter()
            .flat_map(|row| row.iter().zip(game.sender_utility()).map(|(p, u)| p * u))
            .sum()
    }

    /// `E[u_S | ω]` for every state; the honesty condition asks these to be
    /// equal.
    pub fn honesty_rows(&self, game: &FiniteGame, prior: &Belief) -> Vec<f64> {
        self.table
            .iter()
            .enumerate()
            .map(|(w, row)| {
                row.iter().zip(game.sender_utility()).map(|(p, u)| p * u).sum::<f64>() / prior[w]
            })
            .collect()
    }

    /// Largest gain any recommended action could obtain by deviating.
    pub fn obedience_violation(&self, game: &FiniteGame) -> f64 {
        let m = game.num_actions();
        let ur = game.receiver_utility();
        let mut worst = 0.0_f64;
        for a in 0..m {
            for b in 0..m {
                let gain: f64 = self
                    .table
                    .iter()
                    .enumerate()
                    .map(|(w, row)| (ur[w][b] - ur[w][a]) * row[a])
                    .sum();
                worst = worst.max(gain);
            }
        }
        worst
    }
}

/// Splits every selection into a lowest-index lo action and a lowest-index
/// hi action among the receiver's best responses, then spreads each atom's
/// mass across states by its posterior.
pub fn plan_to_outcome(game: &FiniteGame, plan: &BeliefPlan) -> Result<OutcomeDistribution> {
    let n = game.num_states();
    let mut out = OutcomeDistribution::zeros(n, game.num_actions());
    let us = game.sender_utility();
    for (i, atom) in plan.atoms.iter().enumerate() {
        if atom.belief.dim() != n {
            return Err(Error::DimensionMismatch(format!("atom {i} has {} coordinates", atom.belief.dim())));
        }
        let vi = game.value_correspondence(atom.belief.coords());
        let s = atom.selection;
        if s < vi.lo - OBEDIENCE_TOL || s > vi.hi + OBEDIENCE_TOL {
            return Err(Error::ObedienceViolation { atom: i, selection: s, lo: vi.lo, hi: vi.hi });
        }
        let a_lo = *vi.best_actions.iter().find(|&&a| us[a] == vi.lo).expect("lo attained");
        let a_hi = *vi.best_actions.iter().find(|&&a| us[a] == vi.hi).expect("hi attained");
        let t = if vi.hi > vi.lo { ((s - vi.lo) / (vi.hi - vi.lo)).clamp(0.0, 1.0) } else { 0.0 };
        for (w, &mu) in atom.belief.coords().iter().enumerate() {
            let mass = atom.weight * mu;
            out.table[w][a_hi] += t * mass;
            out.table[w][a_lo] += (1.0 - t) * mass;
        }
    }
    Ok(out)
}

/// Posterior after each recommendation, with equal posteriors pooled.
pub fn outcome_to_plan(game: &FiniteGame, pi: &OutcomeDistribution) -> Result<BeliefPlan> {
    outcome_to_plan_at(game, game.prior(), pi)
}

pub(crate) fn outcome_to_plan_at(game: &FiniteGame, prior: &Belief, pi: &OutcomeDistribution) -> Result<BeliefPlan> {
    let n = game.num_states();
    let m = game.num_actions();
    if pi.table.len() != n || pi.table.iter().any(|r| r.len() != m) {
        return Err(Error::DimensionMismatch("outcome table must be states × actions".into()));
    }
    let residual = pi
        .state_marginal()
        .iter()
        .zip(prior.coords())
        .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs()));
    if residual > CONSISTENCY_TOL {
        return Err(Error::InconsistentPrior { residual });
    }
    let mut atoms = Vec::new();
    for (a, mass) in pi.action_marginal().into_iter().enumerate() {
        if mass <= MESSAGE_MASS_TOL {
            continue;
        }
        let posterior = Belief::normalized((0..n).map(|w| pi.table[w][a].max(0.0) / mass).collect());
        atoms.push(Atom { belief: posterior, weight: mass, selection: game.sender_utility()[a] });
    }
    Ok(BeliefPlan::new(atoms).merged(MERGE_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::families::think_tank;

    fn game() -> FiniteGame {
        think_tank(2.0, &[0.0, 1.0, 2.0, 3.0], Some(Belief::new(vec![0.2, 0.4, 0.4]).unwrap())).unwrap()
    }

    #[test]
    fn no_disclosure_plan_recommends_hi_action() {
        let g = game();
        let vi = g.value_correspondence(g.prior().coords());
        let plan = BeliefPlan::no_disclosure(g.prior(), vi.hi);
        let pi = plan_to_outcome(&g, &plan).unwrap();
        for w in 0..3 {
            assert!((pi.table[w][0] - g.prior()[w]).abs() < 1e-15);
        }
    }

    #[test]
    fn full_disclosure_round_trip() {
        let g = game();
        let mut pi = OutcomeDistribution::zeros(3, 4);
        for w in 0..3 {
            pi.table[w][w + 1] = g.prior()[w];
        }
        let plan = outcome_to_plan(&g, &pi).unwrap();
        assert_eq!(plan.len(), 3);
        for (w, atom) in plan.atoms.iter().enumerate() {
            assert_eq!(atom.belief, Belief::vertex(3, w));
            assert!((atom.weight - g.prior()[w]).abs() < 1e-15);
        }
    }

    #[test]
    fn identical_posteriors_merge() {
        let g = game();
        let mut pi = OutcomeDistribution::zeros(3, 4);
        for w in 0..3 {
            pi.table[w][0] = 0.5 * g.prior()[w];
            pi.table[w][2] = 0.5 * g.prior()[w];
        }
        let plan = outcome_to_plan(&g, &pi).unwrap();
        assert_eq!(plan.len(), 1);
        assert!((plan.atoms[0].selection - 1.0).abs() < 1e-15);
    }

    #[test]
    fn inconsistent_rows_rejected() {
        let g = game();
        let pi = OutcomeDistribution::zeros(3, 4);
        assert!(matches!(outcome_to_plan(&g, &pi), Err(Error::InconsistentPrior { .. })));
    }

    #[test]
    fn selection_outside_interval_rejected() {
        let g = game();
        let plan = BeliefPlan::no_disclosure(g.prior(), 3.0);
        assert!(matches!(plan_to_outcome(&g, &plan), Err(Error::ObedienceViolation { .. })));
    }
}
