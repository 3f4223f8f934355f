use serde::Serialize;

use crate::error::{Error, Result};
use crate::linprog::{self, LinearProgram, Relation, Sense, Status};
use crate::model::Belief;

pub const DEFAULT_LAMBDA_GRID: usize = 256;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum HullMembership {
    /// Convex weights, one per generator.
    Member { weights: Vec<f64> },
    /// `⟨separator, target⟩ ≥ max_g ⟨separator, g⟩ + margin` with `margin > 0`.
    NonMember { separator: Vec<f64>, margin: f64 },
}

impl HullMembership {
    pub fn is_member(&self) -> bool {
        matches!(self, HullMembership::Member { .. })
    }
}

/// Decides whether `target` is a convex combination of `generators`. The
/// returned weights come from a basic solution, so at most `n` are positive.
pub fn in_convex_hull<G: AsRef<[f64]>>(generators: &[G], target: &[f64]) -> Result<HullMembership> {
    if generators.is_empty() {
        return Err(Error::DimensionMismatch("hull query needs generators".into()));
    }
    let n = target.len();
    if generators.iter().any(|g| g.as_ref().len() != n) {
        return Err(Error::DimensionMismatch("generator length differs from target".into()));
    }
    let k = generators.len();
    let mut lp = LinearProgram::new(Sense::Minimize, vec![0.0; k]);
    for i in 0..n {
        lp.add_row(generators.iter().map(|g| g.as_ref()[i]).collect(), Relation::Eq, target[i]);
    }
    lp.add_row(vec![1.0; k], Relation::Eq, 1.0);
    let sol = linprog::vertex_solution(&lp)?;
    match sol.status {
        Status::Optimal => Ok(HullMembership::Member { weights: sol.primal }),
        Status::Infeasible => {
            let f = sol.farkas.expect("infeasible programs carry a certificate");
            let separator = f[..n].to_vec();
            let dot = |x: &[f64]| separator.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
            let best = generators.iter().map(|g| dot(g.as_ref())).fold(f64::NEG_INFINITY, f64::max);
            let margin = dot(target) - best;
            Ok(HullMembership::NonMember { separator, margin })
        }
        Status::Unbounded => Err(Error::Internal("feasibility program reported unbounded".into())),
    }
}

/// First `λ ∈ {0, 1/L, …, (L−1)/L}` with `λμ + (1−λ)p` in the hull of the
/// generators; the endpoint `μ` itself is never tested.
pub fn segment_hull_intersect<G: AsRef<[f64]>>(
    p: &Belief,
    mu: &Belief,
    generators: &[G],
    lambda_grid: usize,
) -> Result<Option<f64>> {
    for l in 0..lambda_grid.max(1) {
        let lambda = l as f64 / lambda_grid.max(1) as f64;
        let point = mu.mix(p, lambda);
        if in_convex_hull(generators, point.coords())?.is_member() {
            return Ok(Some(lambda));
        }
    }
    Ok(None)
}

/// Tests `p ∈ int co(generators)` relative to the simplex by probing the
/// `2n` points `p ± r(δ_ω − p)`.
pub fn is_interior<G: AsRef<[f64]>>(generators: &[G], p: &Belief, r: f64) -> Result<bool> {
    let n = p.dim();
    for w in 0..n {
        for sign in [1.0, -1.0] {
            let probe: Vec<f64> = (0..n)
                .map(|i| {
                    let e = if i == w { 1.0 } else { 0.0 };
                    p[i] + sign * r * (e - p[i])
                })
                .collect();
            if probe.iter().any(|c| *c < 0.0) {
                return Ok(false);
            }
            if !in_convex_hull(generators, &probe)?.is_member() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
