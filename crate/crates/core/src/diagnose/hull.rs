use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{affine_hull, in_convex_hull, AffineBasis, BeliefGrid, HullMembership};
use crate::linprog::{vertex_solution, LinearProgram, Relation, Sense, Status};
use crate::model::{Atom, Belief, BeliefPlan, ValueModel, MERGE_TOL};
use crate::solve::{solve_ct_max, Candidates, GridOptions, LEVEL_EPS, WEIGHT_TOL};

/// A candidate farther than this from the current hull counts as outside it.
const OUTSIDE_TOL: f64 = 1e-7;

/// Probe radius for the neighbourhood check.
const NEIGHBOR_RADIUS: f64 = 1e-3;

#[derive(Debug, Clone, Serialize)]
pub struct HullReport {
    pub level: f64,
    pub atoms_in_play: Vec<Belief>,
    pub hull_dimension: usize,
    pub full_dimensional: bool,
    /// Cheap-talk plan at level `s` whose support spans the hull.
    pub spanning_plan: BeliefPlan,
}

/// Affine hull of all supports of cheap-talk plans attaining `s` at `p`.
pub fn cheap_talk_hull<M: ValueModel + ?Sized>(model: &M, p: &Belief, s: f64, grid: &BeliefGrid) -> Result<HullReport> {
    let cand = Candidates::at_level(model, grid, p, GridOptions::default(), s);
    hull_over(model, p, s, &cand).map(|(r, _)| r)
}

/// Each round finds a plan at level `s` with the most mass outside the
/// affine hull spanned so far; when no plan has such mass the hull is
/// complete.
pub(crate) fn hull_over<M: ValueModel + ?Sized>(
    model: &M,
    p: &Belief,
    s: f64,
    cand: &Candidates,
) -> Result<(HullReport, AffineBasis)> {
    let n = model.num_states();
    let eps = LEVEL_EPS * 1f64.max(s.abs());
    let level_set: Vec<usize> = (0..cand.len()).filter(|&i| cand.lo[i] <= s + eps && cand.hi[i] >= s - eps).collect();
    if level_set.is_empty() {
        return Err(Error::LevelNotAttainable { level: s });
    }
    let gens: Vec<&Belief> = level_set.iter().map(|&i| &cand.points[i]).collect();
    let first = match in_convex_hull(&gens, p.coords())? {
        HullMembership::Member { weights } => weights,
        HullMembership::NonMember { .. } => return Err(Error::LevelNotAttainable { level: s }),
    };
    let to_plan = |weights: &[f64]| {
        BeliefPlan::new(
            level_set
                .iter()
                .zip(weights)
                .filter(|(_, w)| **w > WEIGHT_TOL)
                .map(|(&i, &w)| Atom { belief: cand.points[i].clone(), weight: w, selection: s })
                .collect(),
        )
    };
    let mut plans = vec![to_plan(&first)];
    let mut spanned: Vec<Belief> = vec![p.clone()];
    spanned.extend(plans[0].atoms.iter().map(|a| a.belief.clone()));
    let mut basis = affine_hull(&spanned);
    while basis.dim() < n - 1 {
        let outside: Vec<f64> = gens
            .iter()
            .map(|g| if basis.distance(g.coords()) > OUTSIDE_TOL { 1.0 } else { 0.0 })
            .collect();
        if outside.iter().all(|o| *o == 0.0) {
            break;
        }
        let mut lp = LinearProgram::new(Sense::Maximize, outside);
        for w in 0..n {
            lp.add_row(gens.iter().map(|g| g[w]).collect(), Relation::Eq, p[w]);
        }
        let sol = vertex_solution(&lp)?;
        if sol.status != Status::Optimal || sol.value <= 1e-10 {
            break;
        }
        let plan = to_plan(&sol.primal);
        spanned.extend(plan.atoms.iter().map(|a| a.belief.clone()));
        plans.push(plan);
        let next = affine_hull(&spanned);
        if next.dim() <= basis.dim() {
            break;
        }
        basis = next;
    }
    let share = 1.0 / plans.len() as f64;
    let parts: Vec<(f64, &BeliefPlan)> = plans.iter().map(|pl| (share, pl)).collect();
    let spanning_plan = BeliefPlan::mixture(&parts).merged(MERGE_TOL);
    let atoms_in_play = spanning_plan.atoms.iter().map(|a| a.belief.clone()).collect();
    let hull_dimension = basis.dim();
    let report = HullReport {
        level: s,
        atoms_in_play,
        hull_dimension,
        full_dimensional: hull_dimension == n - 1,
        spanning_plan,
    };
    Ok((report, basis))
}

#[derive(Debug, Clone, Serialize)]
pub struct FullDimensionReport {
    pub ct_value: f64,
    pub hull: HullReport,
    pub full_dimensional: bool,
    /// Whether the cheap-talk value is unchanged at nearby priors; `None`
    /// when every probe leaves the simplex.
    pub neighbor_constant: Option<bool>,
}

pub fn is_full_dimensional<M: ValueModel + ?Sized>(model: &M, p: &Belief, grid: &BeliefGrid) -> Result<FullDimensionReport> {
    let ct = solve_ct_max(model, p, grid)?;
    let hull = cheap_talk_hull(model, p, ct.value, grid)?;
    let n = p.dim();
    let mut probes = 0;
    let mut constant = true;
    for w in 0..n {
        for sign in [1.0, -1.0] {
            let coords: Vec<f64> = (0..n)
                .map(|i| p[i] + sign * NEIGHBOR_RADIUS * (if i == w { 1.0 } else { 0.0 } - p[i]))
                .collect();
            if coords.iter().any(|c| *c < 0.0) {
                continue;
            }
            probes += 1;
            let q = Belief::normalized(coords);
            let v = solve_ct_max(model, &q, grid)?.value;
            if (v - ct.value).abs() > 1e-7 {
                constant = false;
            }
        }
    }
    Ok(FullDimensionReport {
        ct_value: ct.value,
        full_dimensional: hull.full_dimensional,
        hull,
        neighbor_constant: (probes > 0).then_some(constant),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::families::{rotated_s, think_tank, ROTATED_S_DELTA};

    fn think_tank_at(p: &[f64]) -> crate::model::FiniteGame {
        think_tank(2.0, &[0.0, 1.0, 2.0, 3.0], Some(Belief::new(p.to_vec()).unwrap())).unwrap()
    }

    #[test]
    fn think_tank_hull_is_full_between_regions() {
        let game = think_tank_at(&[0.2, 0.4, 0.4]);
        let grid = BeliefGrid::new(3, 6).unwrap();
        let r = cheap_talk_hull(&game, game.prior(), 2.0, &grid).unwrap();
        assert!(r.full_dimensional, "{r:?}");
    }

    #[test]
    fn think_tank_grey_line_is_degenerate() {
        let p = Belief::new(vec![0.2, 2.0 / 15.0, 2.0 / 3.0]).unwrap();
        let game = think_tank_at(p.coords());
        let grid = BeliefGrid::new(3, 6).unwrap();
        let r = is_full_dimensional(&game, &p, &grid).unwrap();
        assert_eq!(r.ct_value, 3.0);
        assert!(!r.full_dimensional);
        assert_eq!(r.neighbor_constant, Some(false));
    }

    #[test]
    fn vertex_prior_hull_is_a_point() {
        let game = think_tank_at(&[0.2, 0.4, 0.4]);
        let grid = BeliefGrid::new(3, 4).unwrap();
        let p = Belief::vertex(3, 2);
        let r = cheap_talk_hull(&game, &p, 3.0, &grid).unwrap();
        assert_eq!(r.hull_dimension, 0);
    }

    #[test]
    fn unattainable_level() {
        let game = rotated_s(ROTATED_S_DELTA, 0.3).unwrap();
        let grid = BeliefGrid::new(2, 50).unwrap();
        assert!(matches!(
            cheap_talk_hull(&game, game.prior(), 1.0, &grid),
            Err(Error::LevelNotAttainable { .. })
        ));
    }
}
