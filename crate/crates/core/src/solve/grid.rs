use super::{check_prior, Candidates, DualData, GridOptions, Method, Protocol, SolveReport, WEIGHT_TOL};
use crate::error::{Error, Result};
use crate::geom::BeliefGrid;
use crate::linprog::{vertex_solution, LinearProgram, Relation, Sense, Status};
use crate::model::{Atom, Belief, BeliefPlan, ValueModel, MERGE_TOL};

pub fn solve_bp<M: ValueModel + ?Sized>(model: &M, p: &Belief, grid: &BeliefGrid) -> Result<SolveReport> {
    solve_bp_with(model, p, grid, GridOptions::default())
}

/// `max Σ w_i V_hi(μ_i)` subject to `Σ w_i μ_i = p`.
pub fn solve_bp_with<M: ValueModel + ?Sized>(
    model: &M,
    p: &Belief,
    grid: &BeliefGrid,
    options: GridOptions,
) -> Result<SolveReport> {
    check_prior(model, p)?;
    let cand = Candidates::new(model, grid, p, options);
    let (value, plan, f) = concavify(&cand.points, &cand.hi, p)?;
    Ok(SolveReport {
        protocol: Protocol::Bp,
        value,
        plan,
        method: Method::Concavification,
        grid_resolution: Some(grid.resolution()),
        dual: Some(DualData { g: vec![0.0; f.len()], f }),
    })
}

/// Concave envelope at `p` of the point values `values[i]` at `points[i]`.
pub(crate) fn concavify(points: &[Belief], values: &[f64], p: &Belief) -> Result<(f64, BeliefPlan, Vec<f64>)> {
    let n = p.dim();
    let mut lp = LinearProgram::new(Sense::Maximize, values.to_vec());
    for w in 0..n {
        lp.add_row(points.iter().map(|mu| mu[w]).collect(), Relation::Eq, p[w]);
    }
    let sol = vertex_solution(&lp)?;
    match sol.status {
        Status::Optimal => {}
        Status::Infeasible => return Err(Error::PriorOffGridHull),
        Status::Unbounded => return Err(Error::Internal("persuasion program unbounded".into())),
    }
    let atoms = sol
        .primal
        .iter()
        .enumerate()
        .filter(|(_, &w)| w > WEIGHT_TOL)
        .map(|(i, &w)| Atom { belief: points[i].clone(), weight: w, selection: values[i] })
        .collect();
    Ok((sol.value, BeliefPlan::new(atoms).merged(MERGE_TOL), sol.dual))
}

pub fn solve_md_belief_grid<M: ValueModel + ?Sized>(model: &M, p: &Belief, grid: &BeliefGrid) -> Result<SolveReport> {
    solve_md_belief_grid_with(model, p, grid, GridOptions::default())
}

/// Mediation over candidate posteriors. Each posterior contributes a mass
/// column at `V_hi` and, when the interval is nondegenerate, one at `V_lo`;
/// mixing the two realises every selection in between. The rows are
/// Bayes plausibility (`n`) and truth-telling (`n − 1`, the last being implied).
pub fn solve_md_belief_grid_with<M: ValueModel + ?Sized>(
    model: &M,
    p: &Belief,
    grid: &BeliefGrid,
    options: GridOptions,
) -> Result<SolveReport> {
    check_prior(model, p)?;
    let cand = Candidates::new(model, grid, p, options);
    md_over(p, &cand, Some(grid.resolution()))
}

pub(crate) fn md_over(p: &Belief, cand: &Candidates, grid_resolution: Option<usize>) -> Result<SolveReport> {
    let n = p.dim();
    let mut owner = Vec::with_capacity(2 * cand.len());
    let mut payoff = Vec::with_capacity(2 * cand.len());
    for i in 0..cand.len() {
        owner.push(i);
        payoff.push(cand.hi[i]);
        if cand.hi[i] - cand.lo[i] > WEIGHT_TOL {
            owner.push(i);
            payoff.push(cand.lo[i]);
        }
    }
    let mut lp = LinearProgram::new(Sense::Maximize, payoff.clone());
    for w in 0..n {
        lp.add_row(owner.iter().map(|&i| cand.points[i][w]).collect(), Relation::Eq, p[w]);
    }
    for w in 0..n - 1 {
        let row = owner
            .iter()
            .zip(&payoff)
            .map(|(&i, &s)| s * (cand.points[i][w] - p[w]))
            .collect();
        lp.add_row(row, Relation::Eq, 0.0);
    }
    let sol = vertex_solution(&lp)?;
    match sol.status {
        Status::Optimal => {}
        Status::Infeasible => return Err(Error::PriorOffGridHull),
        Status::Unbounded => return Err(Error::Internal("mediation program unbounded".into())),
    }
    let mut mass = vec![0.0; cand.len()];
    let mut weighted = vec![0.0; cand.len()];
    for (c, &x) in sol.primal.iter().enumerate() {
        if x > WEIGHT_TOL {
            mass[owner[c]] += x;
            weighted[owner[c]] += x * payoff[c];
        }
    }
    let atoms = (0..cand.len())
        .filter(|&i| mass[i] > 0.0)
        .map(|i| Atom { belief: cand.points[i].clone(), weight: mass[i], selection: weighted[i] / mass[i] })
        .collect();
    let f = sol.dual[..n].to_vec();
    let mut g: Vec<f64> = sol.dual[n..].iter().map(|v| -v).collect();
    g.push(0.0);
    Ok(SolveReport {
        protocol: Protocol::Md,
        value: sol.value,
        plan: BeliefPlan::new(atoms).merged(MERGE_TOL),
        method: Method::BeliefGridLp,
        grid_resolution,
        dual: Some(DualData { f, g }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::families::{quadratic, rotated_s, ROTATED_S_DELTA};

    #[test]
    fn rotated_s_persuasion_closed_form() {
        let game = rotated_s(ROTATED_S_DELTA, 0.3).unwrap();
        let grid = BeliefGrid::new(2, 800).unwrap();
        let r = solve_bp(&game, game.prior(), &grid).unwrap();
        let expected = 0.4 * 12.0 / 409.0;
        assert!((r.value - expected).abs() < 1e-9, "{} vs {expected}", r.value);
        assert!(r.plan.len() <= 2);
    }

    #[test]
    fn quadratic_mediation_is_no_disclosure_value() {
        let game = quadratic(0.5).unwrap();
        let grid = BeliefGrid::new(2, 200).unwrap();
        let r = solve_md_belief_grid(&game, game.prior(), &grid).unwrap();
        assert!((r.value - 0.25).abs() < 1e-7, "{}", r.value);
    }

    #[test]
    fn mediation_dual_is_feasible_and_tight() {
        let game = rotated_s(ROTATED_S_DELTA, 0.3).unwrap();
        let grid = BeliefGrid::new(2, 100).unwrap();
        let p = game.prior().clone();
        let r = solve_md_belief_grid(&game, &p, &grid).unwrap();
        let d = r.dual.unwrap();
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        assert!((dot(&d.f, p.coords()) - r.value).abs() < 1e-8);
        for mu in grid.points() {
            let v = game.interval(mu.coords()).1;
            let shift: Vec<f64> = mu.coords().iter().zip(p.coords()).map(|(a, b)| a - b).collect();
            let rhs = (1.0 + dot(&d.g, &shift)) * v;
            assert!(dot(&d.f, mu.coords()) >= rhs - 1e-8);
        }
    }
}
