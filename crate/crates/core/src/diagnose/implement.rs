use serde::Serialize;

use crate::error::Result;
use crate::model::{Belief, BeliefPlan, ValueModel};

/// Bound on consistency and covariance residuals for a passing verdict.
pub const RESIDUAL_TOL: f64 = 1e-7;

/// Selection variance allowed under cheap talk.
pub const CT_VARIANCE_TOL: f64 = 1e-12;

/// Relative slack on selections lying inside their value interval.
pub const OBEDIENCE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObedienceIssue {
    pub atom: usize,
    pub selection: f64,
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Verdicts {
    pub bp: bool,
    pub md: bool,
    pub ct: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ImplementabilityReport {
    /// `Σ w_i μ_i − p`.
    pub consistency_residual: Vec<f64>,
    /// `Σ w_i − 1`.
    pub weight_residual: f64,
    /// `Cov[s, μ(ω)]` per state.
    pub covariance_residual: Vec<f64>,
    pub selection_variance: f64,
    pub obedience_violations: Vec<ObedienceIssue>,
    pub verdict: Verdicts,
}

impl ImplementabilityReport {
    pub fn max_consistency(&self) -> f64 {
        max_abs(&self.consistency_residual).max(self.weight_residual.abs())
    }

    pub fn max_covariance(&self) -> f64 {
        max_abs(&self.covariance_residual)
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

pub fn check_implementable<M: ValueModel + ?Sized>(model: &M, p: &Belief, plan: &BeliefPlan) -> ImplementabilityReport {
    let n = p.dim();
    let total = plan.total_weight();
    let bary = plan.barycenter();
    let consistency_residual: Vec<f64> = (0..n).map(|w| bary.get(w).copied().unwrap_or(0.0) - p[w]).collect();

    let mut covariance_residual = vec![0.0; n];
    if total > 0.0 {
        let mean_s = plan.value() / total;
        for (w, c) in covariance_residual.iter_mut().enumerate() {
            let joint: f64 = plan.atoms.iter().map(|a| a.weight * a.selection * a.belief[w]).sum::<f64>() / total;
            *c = joint - mean_s * bary[w] / total;
        }
    }

    let obedience_violations: Vec<ObedienceIssue> = plan
        .atoms
        .iter()
        .enumerate()
        .filter_map(|(i, a)| {
            let (lo, hi) = model.interval(a.belief.coords());
            let slack = OBEDIENCE_SLACK * 1f64.max(lo.abs()).max(hi.abs());
            (a.selection < lo - slack || a.selection > hi + slack).then_some(ObedienceIssue {
                atom: i,
                selection: a.selection,
                lo,
                hi,
            })
        })
        .collect();

    let dims_ok = plan.atoms.iter().all(|a| a.belief.dim() == n);
    let bp = dims_ok
        && !plan.is_empty()
        && obedience_violations.is_empty()
        && max_abs(&consistency_residual) <= RESIDUAL_TOL
        && (total - 1.0).abs() <= RESIDUAL_TOL;
    let md = bp && max_abs(&covariance_residual) <= RESIDUAL_TOL;
    let selection_variance = plan.selection_variance();
    let ct = md && selection_variance <= CT_VARIANCE_TOL;
    ImplementabilityReport {
        consistency_residual,
        weight_residual: total - 1.0,
        covariance_residual,
        selection_variance,
        obedience_violations,
        verdict: Verdicts { bp, md, ct },
    }
}

/// Receiver's expected utility `Σ w_i V_R(μ_i)`.
pub fn receiver_value<M: ValueModel + ?Sized>(model: &M, plan: &BeliefPlan) -> Result<f64> {
    plan.atoms.iter().map(|a| Ok(a.weight * model.receiver_value(a.belief.coords())?)).sum()
}

/// Honesty constraints when the sender's payoff depends on the state.
#[derive(Debug, Clone, Serialize)]
pub struct StateHonesty {
    /// `residuals[ω][ω′] = Σ w V(μ, ω) (μ(ω)/p(ω) − μ(ω′)/p(ω′))`; a sender
    /// in state `ω` prefers the truth to claiming `ω′` iff it is nonnegative.
    pub residuals: Vec<Vec<f64>>,
    pub honest: bool,
    /// In every state the sender's payoff is the same across the messages
    /// sent in that state.
    pub cheap_talk_feasible: bool,
}

pub const HONESTY_TOL: f64 = 1e-8;

pub fn check_honesty_state_dependent(
    payoff: impl Fn(&Belief, usize) -> f64,
    p: &Belief,
    plan: &BeliefPlan,
) -> StateHonesty {
    let n = p.dim();
    let mut residuals = vec![vec![0.0; n]; n];
    for (w, row) in residuals.iter_mut().enumerate() {
        for (w2, r) in row.iter_mut().enumerate() {
            *r = plan
                .atoms
                .iter()
                .map(|a| a.weight * payoff(&a.belief, w) * (a.belief[w] / p[w] - a.belief[w2] / p[w2]))
                .sum();
        }
    }
    let honest = residuals.iter().flatten().all(|r| *r >= -HONESTY_TOL);
    let cheap_talk_feasible = (0..n).all(|w| {
        let values: Vec<f64> =
            plan.atoms.iter().filter(|a| a.belief[w] > 0.0).map(|a| payoff(&a.belief, w)).collect();
        values.windows(2).all(|pair| (pair[0] - pair[1]).abs() <= 1e-9 * 1f64.max(pair[0].abs()))
    });
    StateHonesty { residuals, honest, cheap_talk_feasible }
}
