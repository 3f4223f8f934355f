use serde::Serialize;

use super::grid::concavify;
use super::{check_prior, Candidates, GridOptions};
use crate::error::{Error, Result};
use crate::geom::BeliefGrid;
use crate::model::{Belief, BeliefPlan, ValueModel};

#[derive(Debug, Clone, Serialize)]
pub struct DualProbe {
    pub g: Vec<f64>,
    pub value: f64,
    pub plan: BeliefPlan,
}

/// Concave envelope at `p` of `(1 + ⟨g, μ − p⟩) V(μ)`, where `V` is `V_hi`
/// when the multiplier is nonnegative and `V_lo` otherwise.
pub fn dual_probe<M: ValueModel + ?Sized>(model: &M, p: &Belief, g: &[f64], grid: &BeliefGrid) -> Result<DualProbe> {
    check_prior(model, p)?;
    if g.len() != p.dim() {
        return Err(Error::DimensionMismatch(format!("multiplier has {} entries for {} states", g.len(), p.dim())));
    }
    let cand = Candidates::new(model, grid, p, GridOptions::default());
    let values: Vec<f64> = (0..cand.len())
        .map(|i| {
            let tilt = 1.0 + cand.points[i].coords().iter().zip(p.coords()).zip(g).map(|((m, q), gi)| gi * (m - q)).sum::<f64>();
            if tilt >= 0.0 {
                tilt * cand.hi[i]
            } else {
                tilt * cand.lo[i]
            }
        })
        .collect();
    let (value, plan, _) = concavify(&cand.points, &values, p)?;
    Ok(DualProbe { g: g.to_vec(), value, plan })
}
