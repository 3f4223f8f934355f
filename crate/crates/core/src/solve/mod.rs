//! Protocol solvers.
//!
//! * [`solve_bp`]: concavification of `V_hi` over candidate posteriors.
//! * [`solve_md_belief_grid`]: mediation program over candidate posteriors.
//! * [`solve_md_outcome`]: exact mediation value of a finite game, stated over
//!   joint distributions of states and recommendations.
//! * [`solve_ct_max`] / [`solve_ct_min`]: best and worst cheap-talk payoffs by
//!   level-set hull membership.
//! * [`dual_probe`]: concavified virtual utility for a fixed truth-telling
//!   multiplier.

pub(crate) mod cheap_talk;
mod dual;
pub(crate) mod grid;
mod outcome;

use serde::Serialize;

pub use cheap_talk::{solve_ct_max, solve_ct_max_with, solve_ct_min, solve_ct_min_with, LEVEL_EPS};
pub use dual::{dual_probe, DualProbe};
pub use grid::{solve_bp, solve_bp_with, solve_md_belief_grid, solve_md_belief_grid_with};
pub use outcome::{extreme_md_outcome, solve_md_outcome, solve_md_outcome_with};

use crate::error::Result;
use crate::geom::BeliefGrid;
use crate::model::{Belief, BeliefPlan, ValueModel};

/// Weights at or below this are dropped from returned plans.
pub const WEIGHT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Protocol {
    Bp,
    Md,
    CtMax,
    CtMin,
    Nd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    OutcomeLp,
    BeliefGridLp,
    LevelSet,
    Concavification,
    NoDisclosure,
}

/// Multipliers of the Bayes-plausibility rows (`f`) and the truth-telling
/// rows (`g`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualData {
    pub f: Vec<f64>,
    pub g: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub protocol: Protocol,
    pub value: f64,
    pub plan: BeliefPlan,
    pub method: Method,
    pub grid_resolution: Option<usize>,
    pub dual: Option<DualData>,
}

/// Which posteriors a grid program may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridOptions {
    /// Add the model's critical beliefs (best-response region vertices for
    /// finite games) to the grid.
    pub include_critical: bool,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self { include_critical: true }
    }
}

/// Candidate posteriors with their value intervals.
pub(crate) struct Candidates {
    pub points: Vec<Belief>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Candidates {
    pub fn new<M: ValueModel + ?Sized>(model: &M, grid: &BeliefGrid, p: &Belief, options: GridOptions) -> Self {
        let mut points: Vec<Belief> = grid.points().to_vec();
        if options.include_critical {
            points.extend(model.critical_beliefs().iter().cloned());
        }
        points.push(p.clone());
        Self::from_points(model, points)
    }

    /// As [`Candidates::new`], plus, for games with a continuum of payoffs,
    /// the points where the segment from each candidate above `s` back to
    /// `p` crosses level `s`. Grid points alone almost never lie on a level
    /// set of a continuous value.
    pub fn at_level<M: ValueModel + ?Sized>(
        model: &M,
        grid: &BeliefGrid,
        p: &Belief,
        options: GridOptions,
        s: f64,
    ) -> Self {
        let mut cand = Self::new(model, grid, p, options);
        if model.payoff_levels().is_some() {
            return cand;
        }
        let eps = LEVEL_EPS * 1f64.max(s.abs());
        if model.interval(p.coords()).1 >= s - eps {
            return cand;
        }
        let extra: Vec<Belief> = (0..cand.len())
            .filter(|&i| cand.lo[i] > s + eps)
            .filter_map(|i| {
                let (moved, _) = pull_to_level(|mu| model.interval(mu).1, &cand.points[i], p, s - eps)?;
                let (lo, hi) = model.interval(moved.coords());
                (lo <= s + 1e-7 && hi >= s - 1e-7).then_some(moved)
            })
            .collect();
        for mu in extra {
            let (lo, hi) = model.interval(mu.coords());
            cand.points.push(mu);
            cand.lo.push(lo);
            cand.hi.push(hi);
        }
        cand
    }

    pub fn from_points<M: ValueModel + ?Sized>(model: &M, points: Vec<Belief>) -> Self {
        let (lo, hi) = points.iter().map(|mu| model.interval(mu.coords())).unzip();
        Self { points, lo, hi }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }
}

const BISECTION_STEPS: usize = 200;

/// Smallest `t` (to bisection precision) with `upper(tμ + (1−t)p) ≥ s`,
/// given `upper(μ) ≥ s > upper(p)`, and the point it gives.
pub(crate) fn pull_to_level(upper: impl Fn(&[f64]) -> f64, mu: &Belief, p: &Belief, s: f64) -> Option<(Belief, f64)> {
    if upper(mu.coords()) < s {
        return None;
    }
    let (mut t_off, mut t_on) = (0.0_f64, 1.0_f64);
    for _ in 0..BISECTION_STEPS {
        let t = 0.5 * (t_off + t_on);
        if t <= t_off || t >= t_on {
            break;
        }
        if upper(mu.mix(p, t).coords()) >= s {
            t_on = t;
        } else {
            t_off = t;
        }
    }
    Some((mu.mix(p, t_on), t_on))
}

/// Value of saying nothing: the sender-preferred best response at the prior.
pub fn solve_nd<M: ValueModel + ?Sized>(model: &M, p: &Belief) -> SolveReport {
    let (_, hi) = model.interval(p.coords());
    SolveReport {
        protocol: Protocol::Nd,
        value: hi,
        plan: BeliefPlan::no_disclosure(p, hi),
        method: Method::NoDisclosure,
        grid_resolution: None,
        dual: None,
    }
}

/// Default grid resolution for a game with `n` states.
pub fn default_resolution(n: usize, finite: bool) -> usize {
    match (n, finite) {
        (2, false) => 400,
        (3, false) => 60,
        (_, false) => 16,
        (2, true) => 32,
        (3, true) => 16,
        _ => 8,
    }
}

pub(crate) fn check_prior<M: ValueModel + ?Sized>(model: &M, p: &Belief) -> Result<()> {
    if p.dim() != model.num_states() {
        return Err(crate::Error::DimensionMismatch(format!(
            "prior has {} entries for {} states",
            p.dim(),
            model.num_states()
        )));
    }
    Ok(())
}
