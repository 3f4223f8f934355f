use serde::Serialize;

use super::hull::hull_over;
use super::implement::{check_implementable, ImplementabilityReport};
use crate::error::{Error, Result};
use crate::geom::BeliefGrid;
use crate::linprog::{vertex_solution, LinearProgram, Relation, Sense, Status};
use crate::model::{Atom, Belief, BeliefPlan, ValueModel, MERGE_TOL};
use crate::solve::{cheap_talk, Candidates, GridOptions, WEIGHT_TOL};

/// Strictness margin for `V_hi > s` and `V_lo < s`.
pub const STRICT_EPS: f64 = 1e-9;

/// `λ` at or above `1 − LAMBDA_GAP` does not witness improvability.
const LAMBDA_GAP: f64 = 1e-7;

/// Cap on the stretch factor of the level-`s` plan.
const ALPHA_CAP: f64 = 1e6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    /// Far endpoint, where cheap talk can fall below `s`.
    pub mu: Belief,
    /// `λμ + (1−λ)p` is where cheap talk can rise above `s`.
    pub lambda: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Improvability {
    pub level: f64,
    pub local: bool,
    pub improvable: bool,
    /// Smallest feasible `λ`, when the two hulls can be aligned at all.
    pub min_lambda: Option<f64>,
    pub witness: Option<Witness>,
    pub hull_dimension: Option<usize>,
}

/// Decides whether some `x ∈ co{V_hi > s}` and `y ∈ co{V_lo < s}` satisfy
/// `x = λy + (1−λ)p` with `λ < 1`. With `b′ = λb` the condition is linear,
/// so the smallest such `λ` is one program. The local variant also keeps `y`
/// in the cheap-talk hull at level `s`.
pub fn is_improvable<M: ValueModel + ?Sized>(
    model: &M,
    p: &Belief,
    s: f64,
    grid: &BeliefGrid,
    local: bool,
) -> Result<Improvability> {
    let cand = Candidates::at_level(model, grid, p, GridOptions::default(), s);
    improvable_over(model, p, s, &cand, local)
}

pub(crate) fn improvable_over<M: ValueModel + ?Sized>(
    model: &M,
    p: &Belief,
    s: f64,
    cand: &Candidates,
    local: bool,
) -> Result<Improvability> {
    let n = p.dim();
    let (normals, hull_dimension) = if local {
        let (report, basis) = hull_over(model, p, s, cand)?;
        (basis.normal_directions(), Some(report.hull_dimension))
    } else {
        (Vec::new(), None)
    };
    let mut out = Improvability {
        level: s,
        local,
        improvable: false,
        min_lambda: None,
        witness: None,
        hull_dimension,
    };
    let above: Vec<usize> = (0..cand.len()).filter(|&i| cand.hi[i] > s + STRICT_EPS).collect();
    let below: Vec<usize> = (0..cand.len()).filter(|&i| cand.lo[i] < s - STRICT_EPS).collect();
    if above.is_empty() || below.is_empty() {
        return Ok(out);
    }
    let (na, nb) = (above.len(), below.len());
    let lam = na + nb;
    let dot = |c: &[f64], x: &[f64]| c.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();

    let build = |objective: Vec<f64>, lambda_range: (f64, f64)| {
        let mut lp = LinearProgram::new(Sense::Minimize, objective);
        for w in 0..n {
            let mut row: Vec<f64> = above.iter().map(|&i| cand.points[i][w]).collect();
            row.extend(below.iter().map(|&j| -cand.points[j][w]));
            row.push(p[w]);
            lp.add_row(row, Relation::Eq, p[w]);
        }
        let mut row = vec![1.0; na];
        row.extend(vec![0.0; nb + 1]);
        lp.add_row(row, Relation::Eq, 1.0);
        let mut row = vec![0.0; na];
        row.extend(vec![1.0; nb]);
        row.push(-1.0);
        lp.add_row(row, Relation::Eq, 0.0);
        for c in &normals {
            let mut row = vec![0.0; na];
            row.extend(below.iter().map(|&j| dot(c, cand.points[j].coords()) - dot(c, p.coords())));
            row.push(0.0);
            lp.add_row(row, Relation::Eq, 0.0);
        }
        lp.set_bounds(lam, lambda_range.0, lambda_range.1);
        lp
    };
    let unit = |k: usize, v: f64| {
        let mut c = vec![0.0; lam + 1];
        c[k] = v;
        c
    };

    let first = vertex_solution(&build(unit(lam, 1.0), (0.0, 1.0)))?;
    if first.status != Status::Optimal {
        return Ok(out);
    }
    let lambda_min = first.primal[lam];
    out.min_lambda = Some(lambda_min);
    if lambda_min >= 1.0 - LAMBDA_GAP {
        return Ok(out);
    }
    out.improvable = true;

    // A witness from the middle of the feasible λ-interval, placed as deep
    // inside both strict sets as possible.
    let widest = vertex_solution(&build(unit(lam, -1.0), (0.0, 1.0)))?;
    let lambda_max = if widest.status == Status::Optimal { widest.primal[lam] } else { lambda_min };
    let lambda = 0.5 * (lambda_min + lambda_max.min(1.0));
    let witness = if lambda > 1e-9 {
        let mut depth: Vec<f64> = above.iter().map(|&i| -(cand.hi[i] - s)).collect();
        depth.extend(below.iter().map(|&j| -(s - cand.lo[j]) / lambda));
        depth.push(0.0);
        let sol = vertex_solution(&build(depth, (lambda, lambda)))?;
        let sol = if sol.status == Status::Optimal { sol } else { first };
        let lambda = sol.primal[lam];
        let mut y = vec![0.0; n];
        for (k, &j) in below.iter().enumerate() {
            for (yw, m) in y.iter_mut().zip(cand.points[j].coords()) {
                *yw += sol.primal[na + k] * m;
            }
        }
        Witness { mu: Belief::normalized(y.iter().map(|v| v / lambda).collect()), lambda }
    } else {
        Witness { mu: far_point(cand, &below, &normals, p)?, lambda: 0.0 }
    };
    out.witness = Some(witness);
    Ok(out)
}

/// A point of `co{V_lo < s}` in the allowed affine slice, for the case
/// where `p` itself already lies in `co{V_hi > s}`.
fn far_point(cand: &Candidates, below: &[usize], normals: &[Vec<f64>], p: &Belief) -> Result<Belief> {
    let n = p.dim();
    let mut lp = LinearProgram::new(Sense::Minimize, vec![0.0; below.len()]);
    lp.add_row(vec![1.0; below.len()], Relation::Eq, 1.0);
    for c in normals {
        let row = below
            .iter()
            .map(|&j| (0..n).map(|w| c[w] * (cand.points[j][w] - p[w])).sum())
            .collect();
        lp.add_row(row, Relation::Eq, 0.0);
    }
    let sol = vertex_solution(&lp)?;
    if sol.status != Status::Optimal {
        return Err(Error::ConstructionFailed("no lower point inside the cheap-talk hull".into()));
    }
    let mut y = vec![0.0; n];
    for (k, &j) in below.iter().enumerate() {
        for (yw, m) in y.iter_mut().zip(cand.points[j].coords()) {
            *yw += sol.primal[k] * m;
        }
    }
    Ok(Belief::normalized(y))
}

#[derive(Debug, Clone, Serialize)]
pub struct ImprovementCertificate {
    pub s: f64,
    pub mu_minus: Belief,
    pub lambda: f64,
    pub mu_plus: Belief,
    pub tau_plus: BeliefPlan,
    pub tau_minus: BeliefPlan,
    /// Level-`s` cheap-talk plan re-centred on the far side of `p`; empty
    /// when no such plan is needed.
    pub tau_zero: BeliefPlan,
    pub v_plus: f64,
    pub v_minus: f64,
    pub xi: f64,
    /// `None` stands for an unbounded stretch (no level-`s` part needed).
    pub alpha: Option<f64>,
    pub mixed_plan: BeliefPlan,
    pub value: f64,
    pub value_gain: f64,
    pub closed_form_gain: f64,
    pub implementability: ImplementabilityReport,
}

/// Mixes a high cheap-talk plan near `p`, a low one at the far endpoint and
/// a level-`s` plan on the opposite side of `p` so that the mixture is
/// Bayes-plausible and truthful, and worth more than `s`.
pub fn construct_improving_plan<M: ValueModel + ?Sized>(
    model: &M,
    p: &Belief,
    s: f64,
    witness: &Witness,
    grid: &BeliefGrid,
) -> Result<ImprovementCertificate> {
    let mut points = grid.points().to_vec();
    points.extend(model.critical_beliefs().iter().cloned());
    let cand = Candidates::at_level(model, grid, p, GridOptions::default(), s);
    let (hull, _) = hull_over(model, p, s, &cand)?;
    let lambda = witness.lambda;
    let y = &witness.mu;
    let mu_hat = y.mix(p, lambda);

    let mut plus_points = points.clone();
    plus_points.push(p.clone());
    let tau_plus = cheap_talk::extreme(model, &mu_hat, plus_points, Some(grid.resolution()), false)?;
    let mut minus_points = points;
    minus_points.push(p.clone());
    let tau_minus = cheap_talk::extreme(model, y, minus_points, Some(grid.resolution()), true)?;
    let v_plus = tau_plus.value - s;
    let v_minus = s - tau_minus.value;
    if v_plus <= 0.0 || v_minus <= 0.0 {
        return Err(Error::ConstructionFailed(format!(
            "witness does not separate the level: V+ = {v_plus}, V- = {v_minus}"
        )));
    }
    let xi = v_minus / (lambda * v_plus + v_minus);
    let mu_star = mu_hat.mix(y, xi);
    let closed_core = if lambda > 0.0 {
        (1.0 / lambda - 1.0) * v_plus * v_minus / (v_plus + v_minus / lambda)
    } else {
        v_plus
    };

    let offset = mu_star.distance(p);
    let (alpha, tau_zero, mixed, factor) = if offset <= 1e-12 {
        let mixed = BeliefPlan::mixture(&[(xi, &tau_plus.plan), (1.0 - xi, &tau_minus.plan)]);
        (None, BeliefPlan::default(), mixed, 1.0)
    } else {
        let support = &hull.spanning_plan.atoms;
        let k = support.len();
        let mut objective = vec![0.0; k + 1];
        objective[k] = 1.0;
        let mut lp = LinearProgram::new(Sense::Maximize, objective);
        for w in 0..p.dim() {
            let mut row: Vec<f64> = support.iter().map(|a| a.belief[w]).collect();
            row.push(mu_star[w] - p[w]);
            lp.add_row(row, Relation::Eq, mu_star[w]);
        }
        lp.set_bounds(k, 0.0, ALPHA_CAP);
        let sol = vertex_solution(&lp)?;
        if sol.status != Status::Optimal {
            return Err(Error::ConstructionFailed("level-s plan cannot be re-centred".into()));
        }
        let alpha = sol.primal[k];
        if alpha <= 1.0 + 1e-9 {
            return Err(Error::ConstructionFailed(format!("stretch factor {alpha} too close to 1")));
        }
        let tau_zero = BeliefPlan::new(
            support
                .iter()
                .zip(&sol.primal)
                .filter(|(_, w)| **w > WEIGHT_TOL)
                .map(|(a, &w)| Atom { belief: a.belief.clone(), weight: w, selection: s })
                .collect(),
        );
        let rest = (alpha - 1.0) / alpha;
        let mixed = BeliefPlan::mixture(&[
            (1.0 / alpha, &tau_zero),
            (rest * xi, &tau_plus.plan),
            (rest * (1.0 - xi), &tau_minus.plan),
        ]);
        (Some(alpha), tau_zero, mixed, rest)
    };
    let mixed_plan = mixed.merged(MERGE_TOL);
    let implementability = check_implementable(model, p, &mixed_plan);
    let value = mixed_plan.value();
    Ok(ImprovementCertificate {
        s,
        mu_minus: y.clone(),
        lambda,
        mu_plus: mu_hat,
        tau_plus: tau_plus.plan,
        tau_minus: tau_minus.plan,
        tau_zero,
        v_plus,
        v_minus,
        xi,
        alpha,
        mixed_plan,
        value,
        value_gain: factor * (xi * v_plus - (1.0 - xi) * v_minus),
        closed_form_gain: factor * closed_core,
        implementability,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::families::{quadratic, rotated_s, think_tank, ROTATED_S_DELTA};

    #[test]
    fn rotated_s_is_improvable_and_construction_gains() {
        let game = rotated_s(ROTATED_S_DELTA, 0.3).unwrap();
        let grid = BeliefGrid::new(2, 400).unwrap();
        let p = game.prior().clone();
        let imp = is_improvable(&game, &p, 0.0, &grid, true).unwrap();
        assert!(imp.improvable);
        let cert = construct_improving_plan(&game, &p, 0.0, imp.witness.as_ref().unwrap(), &grid).unwrap();
        assert!(cert.implementability.verdict.md, "{:?}", cert.implementability);
        assert!(cert.value_gain > 1e-6);
        assert!((cert.value_gain - cert.closed_form_gain).abs() < 1e-8);
        assert!((cert.value - (cert.s + cert.value_gain)).abs() < 1e-8);
    }

    #[test]
    fn quadratic_is_not_improvable() {
        let game = quadratic(0.5).unwrap();
        let grid = BeliefGrid::new(2, 200).unwrap();
        let imp = is_improvable(&game, game.prior(), 0.25, &grid, false).unwrap();
        assert!(!imp.improvable);
    }

    #[test]
    fn think_tank_sides_of_the_dashed_line() {
        let values = [0.0, 1.0, 2.0, 3.0];
        let grid = BeliefGrid::new(3, 6).unwrap();
        let right = Belief::new(vec![0.5, 0.25, 0.25]).unwrap();
        let game = think_tank(2.0, &values, Some(right.clone())).unwrap();
        let imp = is_improvable(&game, &right, 1.0, &grid, true).unwrap();
        assert!(imp.improvable);
        let cert = construct_improving_plan(&game, &right, 1.0, imp.witness.as_ref().unwrap(), &grid).unwrap();
        assert!(cert.implementability.verdict.md);
        assert!(cert.value_gain > 1e-9);

        let left = Belief::new(vec![0.2, 0.4, 0.4]).unwrap();
        let game = think_tank(2.0, &values, Some(left.clone())).unwrap();
        assert!(!is_improvable(&game, &left, 2.0, &grid, false).unwrap().improvable);
    }
}
