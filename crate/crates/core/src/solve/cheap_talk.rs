use super::{check_prior, pull_to_level, Candidates, GridOptions, Method, Protocol, SolveReport, WEIGHT_TOL};
use crate::error::{Error, Result};
use crate::geom::{in_convex_hull, BeliefGrid, HullMembership};
use crate::linprog::{vertex_solution, LinearProgram, Relation, Sense, Status};
use crate::model::{Atom, Belief, BeliefPlan, ValueModel, MERGE_TOL};

/// Slack for "the correspondence reaches level `s`".
pub const LEVEL_EPS: f64 = 1e-9;

pub fn solve_ct_max<M: ValueModel + ?Sized>(model: &M, p: &Belief, grid: &BeliefGrid) -> Result<SolveReport> {
    solve_ct_max_with(model, p, grid, GridOptions::default())
}

pub fn solve_ct_min<M: ValueModel + ?Sized>(model: &M, p: &Belief, grid: &BeliefGrid) -> Result<SolveReport> {
    solve_ct_min_with(model, p, grid, GridOptions::default())
}

/// Largest `s` such that `p` lies in the hull of `{μ : V_hi(μ) ≥ s}`. Every
/// support point above the level is pulled toward `p` until it first
/// reaches it, which makes the level an admissible selection everywhere.
pub fn solve_ct_max_with<M: ValueModel + ?Sized>(
    model: &M,
    p: &Belief,
    grid: &BeliefGrid,
    options: GridOptions,
) -> Result<SolveReport> {
    check_prior(model, p)?;
    extreme(model, p, base_points(model, grid, options), Some(grid.resolution()), false)
}

/// Mirror image of [`solve_ct_max_with`] for the sender's worst equilibrium.
pub fn solve_ct_min_with<M: ValueModel + ?Sized>(
    model: &M,
    p: &Belief,
    grid: &BeliefGrid,
    options: GridOptions,
) -> Result<SolveReport> {
    check_prior(model, p)?;
    extreme(model, p, base_points(model, grid, options), Some(grid.resolution()), true)
}

fn base_points<M: ValueModel + ?Sized>(model: &M, grid: &BeliefGrid, options: GridOptions) -> Vec<Belief> {
    let mut points = grid.points().to_vec();
    if options.include_critical {
        points.extend(model.critical_beliefs().iter().cloned());
    }
    points
}

/// Cheap-talk extreme over an explicit candidate set; `p` is added to it.
pub(crate) fn extreme<M: ValueModel + ?Sized>(
    model: &M,
    p: &Belief,
    mut points: Vec<Belief>,
    grid_resolution: Option<usize>,
    minimize: bool,
) -> Result<SolveReport> {
    let sign = if minimize { -1.0 } else { 1.0 };
    // Work with (lo, hi) of `sign · V` so both directions maximise.
    let oriented = |mu: &[f64]| {
        let (lo, hi) = model.interval(mu);
        if minimize {
            (-hi, -lo)
        } else {
            (lo, hi)
        }
    };
    points.push(p.clone());
    let cand = Candidates::from_points(model, points);
    let key: Vec<f64> = (0..cand.len()).map(|i| if minimize { -cand.lo[i] } else { cand.hi[i] }).collect();
    let base = oriented(p.coords()).1;

    let mut levels: Vec<f64> = match model.payoff_levels() {
        Some(l) => l.into_iter().map(|v| sign * v).collect(),
        None => key.clone(),
    };
    levels.retain(|&s| s > base + LEVEL_EPS);
    levels.sort_by(f64::total_cmp);
    levels.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);

    let support_at = |s: f64| -> Result<Option<Vec<(usize, f64)>>> {
        let idx: Vec<usize> = (0..cand.len()).filter(|&i| key[i] >= s - LEVEL_EPS).collect();
        if idx.is_empty() {
            return Ok(None);
        }
        let gens: Vec<&Belief> = idx.iter().map(|&i| &cand.points[i]).collect();
        Ok(match in_convex_hull(&gens, p.coords())? {
            HullMembership::Member { weights } => Some(
                idx.iter().zip(weights).filter(|(_, w)| *w > WEIGHT_TOL).map(|(&i, w)| (i, w)).collect(),
            ),
            HullMembership::NonMember { .. } => None,
        })
    };

    let (mut lo, mut hi) = (0, levels.len());
    while lo < hi {
        let mid = (lo + hi) / 2;
        if support_at(levels[mid])?.is_some() {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    let protocol = if minimize { Protocol::CtMin } else { Protocol::CtMax };
    let report = |value: f64, plan: BeliefPlan| SolveReport {
        protocol,
        value,
        plan,
        method: Method::LevelSet,
        grid_resolution,
        dual: None,
    };
    if lo == 0 {
        return Ok(report(sign * base, BeliefPlan::no_disclosure(p, sign * base)));
    }
    let s = levels[lo - 1];
    let idx: Vec<usize> = (0..cand.len()).filter(|&i| key[i] >= s - LEVEL_EPS).collect();
    let support = least_dispersed(&cand.points, &idx, p)?
        .ok_or_else(|| Error::Internal("level set lost membership".into()))?;

    let mut atoms = Vec::with_capacity(support.len());
    for (i, w) in support {
        let mu = &cand.points[i];
        let (low, _) = oriented(mu.coords());
        if low <= s + LEVEL_EPS {
            atoms.push((mu.clone(), w));
            continue;
        }
        let (moved, t_on) = pull_to_level(|x| oriented(x).1, mu, p, s - LEVEL_EPS)
            .ok_or_else(|| Error::Internal("candidate fell below its level".into()))?;
        let (low, high) = oriented(moved.coords());
        if low > s + 1e-7 || high < s - 1e-7 {
            return Err(Error::ConstructionFailed(format!(
                "no admissible point at level {} between prior and candidate {i}",
                sign * s
            )));
        }
        atoms.push((moved, w / t_on));
    }
    let total: f64 = atoms.iter().map(|(_, c)| c).sum();
    let plan = BeliefPlan::new(
        atoms
            .into_iter()
            .map(|(belief, c)| Atom { belief, weight: c / total, selection: sign * s })
            .collect(),
    )
    .merged(MERGE_TOL);
    Ok(report(sign * s, plan))
}

/// Weights on `points[idx]` averaging to `p` with the least spread
/// `Σ w ‖μ − p‖²`, so ties among optimal equilibria go to the least
/// informative one.
fn least_dispersed(points: &[Belief], idx: &[usize], p: &Belief) -> Result<Option<Vec<(usize, f64)>>> {
    let spread = idx
        .iter()
        .map(|&i| points[i].coords().iter().zip(p.coords()).map(|(a, b)| (a - b) * (a - b)).sum())
        .collect();
    let mut lp = LinearProgram::new(Sense::Minimize, spread);
    for w in 0..p.dim() {
        lp.add_row(idx.iter().map(|&i| points[i][w]).collect(), Relation::Eq, p[w]);
    }
    let sol = vertex_solution(&lp)?;
    if sol.status != Status::Optimal {
        return Ok(None);
    }
    Ok(Some(
        idx.iter().zip(sol.primal).filter(|(_, w)| *w > WEIGHT_TOL).map(|(&i, w)| (i, w)).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::families::{rotated_s, think_tank, ROTATED_S_DELTA};

    #[test]
    fn think_tank_cheap_talk_value() {
        let p = Belief::new(vec![0.2, 0.4, 0.4]).unwrap();
        let game = think_tank(2.0, &[0.0, 1.0, 2.0, 3.0], Some(p.clone())).unwrap();
        let grid = BeliefGrid::new(3, 12).unwrap();
        let r = solve_ct_max(&game, &p, &grid).unwrap();
        assert!((r.value - 2.0).abs() < 1e-12);
        assert!(r.plan.len() <= 3);
        let bary = r.plan.barycenter();
        for (a, b) in bary.iter().zip(p.coords()) {
            assert!((a - b).abs() < 1e-9);
        }
        for atom in &r.plan.atoms {
            let (lo, hi) = game.interval(atom.belief.coords());
            assert!(lo <= 2.0 + 1e-9 && hi >= 2.0 - 1e-9);
        }
    }

    #[test]
    fn extremes_bracket_no_disclosure() {
        let game = rotated_s(ROTATED_S_DELTA, 0.5).unwrap();
        let grid = BeliefGrid::new(2, 400).unwrap();
        let p = game.prior().clone();
        let max = solve_ct_max(&game, &p, &grid).unwrap();
        let min = solve_ct_min(&game, &p, &grid).unwrap();
        let nd = game.interval(p.coords()).1;
        assert!(min.value <= nd + 1e-12 && nd <= max.value + 1e-12);
        assert!(max.plan.selection_variance() < 1e-12);
    }

    #[test]
    fn ties_go_to_the_least_informative_equilibrium() {
        // The level set {V ≥ 0} meets [0, 1] in {0} ∪ [0.55, 0.95].
        let game = rotated_s(ROTATED_S_DELTA, 0.3).unwrap();
        let grid = BeliefGrid::new(2, 400).unwrap();
        let r = solve_ct_max(&game, game.prior(), &grid).unwrap();
        let mut support: Vec<f64> = r.plan.atoms.iter().map(|a| a.belief[1]).collect();
        support.sort_by(f64::total_cmp);
        assert_eq!(support.len(), 2);
        assert!(support[0].abs() < 1e-9 && (support[1] - 0.55).abs() < 1e-9, "{support:?}");
    }
}
