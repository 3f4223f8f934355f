use super::{Method, Protocol, SolveReport};
use crate::error::{Error, Result};
use crate::linprog::{self, LinearProgram, Mode, Relation, Sense, Status};
use crate::model::{outcome_to_plan_at, Belief, FiniteGame, OutcomeDistribution};

/// Exact mediation value at the game's own prior.
pub fn solve_md_outcome(game: &FiniteGame, mode: Mode) -> Result<SolveReport> {
    solve_md_outcome_with(game, game.prior(), mode).map(|(r, _)| r)
}

/// Mediation over joint distributions `π(ω, a)`: prior-consistent,
/// obedient, and with `E[u_S | ω]` equal across states.
pub fn solve_md_outcome_with(
    game: &FiniteGame,
    p: &Belief,
    mode: Mode,
) -> Result<(SolveReport, OutcomeDistribution)> {
    let n = game.num_states();
    let m = game.num_actions();
    let objective = (0..n).flat_map(|_| game.sender_utility().iter().copied()).collect();
    let lp = program(game, p, objective)?;
    let sol = linprog::solve(&lp, mode)?;
    if sol.status != Status::Optimal {
        return Err(Error::Internal(format!("outcome program ended {:?}", sol.status)));
    }
    let table = (0..n).map(|w| (0..m).map(|a| sol.primal[w * m + a].max(0.0)).collect()).collect();
    let pi = OutcomeDistribution { table };
    let plan = outcome_to_plan_at(game, p, &pi)?;
    let report = SolveReport {
        protocol: Protocol::Md,
        value: sol.value,
        plan,
        method: Method::OutcomeLp,
        grid_resolution: None,
        dual: None,
    };
    Ok((report, pi))
}

/// Outcome distribution of an extreme point of the mediation polytope,
/// picked out by maximizing `Σ weights[ω][a] π(ω, a)`.
pub fn extreme_md_outcome(game: &FiniteGame, p: &Belief, weights: &[Vec<f64>]) -> Result<OutcomeDistribution> {
    let (n, m) = (game.num_states(), game.num_actions());
    if weights.len() != n || weights.iter().any(|r| r.len() != m) {
        return Err(Error::DimensionMismatch("objective table shape".into()));
    }
    let lp = program(game, p, weights.iter().flatten().copied().collect())?;
    let sol = linprog::vertex_solution(&lp)?;
    if sol.status != Status::Optimal {
        return Err(Error::Internal(format!("outcome program ended {:?}", sol.status)));
    }
    let table = (0..n).map(|w| (0..m).map(|a| sol.primal[w * m + a].max(0.0)).collect()).collect();
    Ok(OutcomeDistribution { table })
}

fn program(game: &FiniteGame, p: &Belief, objective: Vec<f64>) -> Result<LinearProgram> {
    let n = game.num_states();
    let m = game.num_actions();
    if p.dim() != n {
        return Err(Error::DimensionMismatch(format!("prior has {} entries for {n} states", p.dim())));
    }
    let us = game.sender_utility();
    let ur = game.receiver_utility();
    let var = |w: usize, a: usize| w * m + a;
    let mut lp = LinearProgram::new(Sense::Maximize, objective);
    for w in 0..n {
        let mut row = vec![0.0; n * m];
        row[var(w, 0)..var(w, 0) + m].fill(1.0);
        lp.add_row(row, Relation::Eq, p[w]);
    }
    for a in 0..m {
        for b in 0..m {
            if a == b {
                continue;
            }
            let mut row = vec![0.0; n * m];
            for w in 0..n {
                row[var(w, a)] = ur[w][b] - ur[w][a];
            }
            lp.add_row(row, Relation::Le, 0.0);
        }
    }
    let support: Vec<usize> = (0..n).filter(|&w| p[w] > 0.0).collect();
    if let Some((&reference, rest)) = support.split_first() {
        for &w in rest {
            let mut row = vec![0.0; n * m];
            for a in 0..m {
                row[var(w, a)] = us[a] / p[w];
                row[var(reference, a)] = -us[a] / p[reference];
            }
            lp.add_row(row, Relation::Eq, 0.0);
        }
    }
    Ok(lp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::families::think_tank;

    fn think_tank_at(p: [f64; 3]) -> FiniteGame {
        think_tank(2.0, &[0.0, 1.0, 2.0, 3.0], Some(Belief::new(p.to_vec()).unwrap())).unwrap()
    }

    #[test]
    fn float_and_rational_agree() {
        let game = think_tank_at([0.2, 0.4, 0.4]);
        let f = solve_md_outcome(&game, Mode::Float).unwrap();
        let r = solve_md_outcome(&game, Mode::Rational).unwrap();
        assert!((f.value - r.value).abs() < 1e-9);
        assert!(f.plan.len() <= game.num_actions());
    }

    #[test]
    fn outcome_is_honest_and_obedient() {
        let game = think_tank_at([0.2, 0.4, 0.4]);
        let (r, pi) = solve_md_outcome_with(&game, game.prior(), Mode::Float).unwrap();
        assert!(pi.obedience_violation(&game) < 1e-9);
        let rows = pi.honesty_rows(&game, game.prior());
        for v in &rows {
            assert!((v - r.value).abs() < 1e-8);
        }
    }
}
